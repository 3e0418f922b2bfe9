//! Generalized graphs and the fourteen generalization rules.
//!
//! Side conditions as implemented:
//! - 1: concrete `u` becomes an untyped any-1+ node `+`.
//! - 2: concrete `u` joins `S` (`+` or `S+`) when `(u, S)` is `u`'s only
//!   out-edge and `S`'s only in-edge; `S -> u` edges become self-loops.
//! - 3: an edge `A1 -> A2` is subdivided by a fresh empty `S*` or `G*`.
//!   Edges touching an inserted or appended node are not subdivided.
//! - 4: two `S*` merge. 5: a 0+ node merges into a `G*`.
//! - 6: a 1+ node merges with any wildcard into `G+` (self-loops vanish).
//! - 7/8: an empty `S*`/`G*` sink (source) is attached to a nonempty node.
//! - 9/10: two appended `S*` sinks (sources) merge; 11/12: an appended 0+
//!   sink (source) merges into an appended `G*` sink (source).
//! - 13/14: `S+` becomes `S*`, `G+` becomes `G*` (`+` may become either).
//!
//! Every edge records the graph edges ("pieces") it stands for, so that
//! edge constraints can be checked on the final generalized graph.

use std::collections::{BTreeMap, BTreeSet};

use crate::graph::Graph;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GKind {
    Concrete,
    /// any-1+ node from rule 1, not yet committed to a sequence or subgraph
    Plus,
    SeqPlus,
    SeqStar,
    SubPlus,
    SubStar,
}

impl GKind {
    pub fn is_plus(self) -> bool {
        matches!(self, GKind::Plus | GKind::SeqPlus | GKind::SubPlus)
    }

    pub fn is_star(self) -> bool {
        matches!(self, GKind::SeqStar | GKind::SubStar)
    }

    pub fn is_wildcard(self) -> bool {
        self != GKind::Concrete
    }

    pub fn symbol(self) -> &'static str {
        match self {
            GKind::Concrete => "node",
            GKind::Plus => "+",
            GKind::SeqPlus => "S+",
            GKind::SeqStar => "S*",
            GKind::SubPlus => "G+",
            GKind::SubStar => "G*",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Origin {
    Graph,
    Inserted,
    Appended,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GNode {
    pub kind: GKind,
    /// graph nodes absorbed, sorted
    pub members: Vec<usize>,
    pub origin: Origin,
}

pub type Piece = (usize, usize);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneralizedGraph {
    pub nodes: Vec<GNode>,
    pub edges: BTreeMap<(usize, usize), BTreeSet<Piece>>,
    /// highest rule applied so far
    pub last_rule: u8,
}

/// One rule application; node indices refer to the graph it is applied to.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Step {
    pub rule: u8,
    pub a: usize,
    pub b: Option<usize>,
    /// node kind introduced by rules 3, 7, 8, 13 and 14
    pub kind: Option<GKind>,
}

impl GeneralizedGraph {
    pub fn from_graph(g: &Graph) -> GeneralizedGraph {
        let nodes = (0..g.node_count())
            .map(|v| GNode { kind: GKind::Concrete, members: vec![v], origin: Origin::Graph })
            .collect();
        let edges = g.edges().iter().map(|&(u, v)| ((u, v), BTreeSet::from([(u, v)]))).collect();
        GeneralizedGraph { nodes, edges, last_rule: 1 }
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn succ(&self, a: usize) -> impl Iterator<Item = usize> + '_ {
        self.edges.keys().filter(move |&&(x, _)| x == a).map(|&(_, y)| y)
    }

    pub fn pred(&self, a: usize) -> impl Iterator<Item = usize> + '_ {
        self.edges.keys().filter(move |&&(_, y)| y == a).map(|&(x, _)| x)
    }

    fn has_edges_touching(&self, a: usize) -> bool {
        self.edges.keys().any(|&(x, y)| x == a || y == a)
    }

    /// Merges `b` into `a`, giving the result kind `kind`.
    fn merge(&self, a: usize, b: usize, kind: GKind, drop_loops: bool) -> GeneralizedGraph {
        let remap = |x: usize| -> usize {
            let x = if x == b { a } else { x };
            if x > b {
                x - 1
            } else {
                x
            }
        };
        let mut nodes = self.nodes.clone();
        let mut members = nodes[a].members.clone();
        members.extend(&nodes[b].members);
        members.sort_unstable();
        nodes[a] = GNode { kind, members, origin: nodes[a].origin.min(nodes[b].origin) };
        nodes.remove(b);
        let mut edges: BTreeMap<(usize, usize), BTreeSet<Piece>> = BTreeMap::new();
        for (&(x, y), ps) in &self.edges {
            let (x, y) = (remap(x), remap(y));
            if drop_loops && x == y && x == remap(a) {
                continue;
            }
            edges.entry((x, y)).or_default().extend(ps.iter().copied());
        }
        GeneralizedGraph { nodes, edges, last_rule: self.last_rule }
    }

    /// Contracts each block into its lowest-numbered node, as a run of
    /// pairwise merges into that node would. Blocks with `drop_loops` lose
    /// their self-loops.
    pub(super) fn contract(&self, blocks: &[(Vec<usize>, GKind, bool)]) -> GeneralizedGraph {
        let n = self.node_count();
        let mut rep: Vec<usize> = (0..n).collect();
        for (b, _, _) in blocks {
            let r = *b.iter().min().unwrap();
            b.iter().for_each(|&x| rep[x] = r);
        }
        let mut index = vec![0; n];
        let mut nodes = Vec::new();
        for x in 0..n {
            if rep[x] == x {
                index[x] = nodes.len();
                nodes.push(self.nodes[x].clone());
            }
        }
        let mut loopless = vec![false; nodes.len()];
        for (b, kind, drop_loops) in blocks {
            let i = index[rep[b[0]]];
            let node = &mut nodes[i];
            node.kind = *kind;
            for &x in b.iter().filter(|&&x| rep[x] != x) {
                node.members.extend(&self.nodes[x].members);
                node.origin = node.origin.min(self.nodes[x].origin);
            }
            node.members.sort_unstable();
            loopless[i] = *drop_loops;
        }
        let mut edges: BTreeMap<(usize, usize), BTreeSet<Piece>> = BTreeMap::new();
        for (&(x, y), ps) in &self.edges {
            let (x, y) = (index[rep[x]], index[rep[y]]);
            if x == y && loopless[x] {
                continue;
            }
            edges.entry((x, y)).or_default().extend(ps.iter().copied());
        }
        GeneralizedGraph { nodes, edges, last_rule: self.last_rule }
    }

    fn add_node(&mut self, kind: GKind, origin: Origin) -> usize {
        self.nodes.push(GNode { kind, members: Vec::new(), origin });
        self.nodes.len() - 1
    }

    /// Applies `step` if its side conditions hold.
    pub fn apply(&self, step: &Step) -> Option<GeneralizedGraph> {
        if step.rule < self.last_rule || step.a >= self.node_count() {
            return None;
        }
        if step.b.is_some_and(|b| b >= self.node_count() || b == step.a) {
            return None;
        }
        let n = &self.nodes;
        let kind = |x: usize| n[x].kind;
        let mut out = match (step.rule, step.b) {
            (1, None) if kind(step.a) == GKind::Concrete => {
                let mut g = self.clone();
                g.nodes[step.a].kind = GKind::Plus;
                g
            }
            (2, Some(s)) => {
                let u = step.a;
                if kind(u) != GKind::Concrete || !matches!(kind(s), GKind::Plus | GKind::SeqPlus) {
                    return None;
                }
                if !self.succ(u).eq([s]) || !self.pred(s).eq([u]) {
                    return None;
                }
                let mut g = self.clone();
                g.edges.remove(&(u, s));
                let (a, b) = if s < u { (s, u) } else { (u, s) };
                let mut m = g.merge(a, b, GKind::SeqPlus, false);
                m.nodes[a].origin = Origin::Graph;
                m
            }
            (3, Some(b)) => {
                let a = step.a;
                let t = step.kind.filter(|k| k.is_star())?;
                if n[a].origin != Origin::Graph || n[b].origin != Origin::Graph {
                    return None;
                }
                let mut g = self.clone();
                let pieces = g.edges.remove(&(a, b))?;
                let w = g.add_node(t, Origin::Inserted);
                g.edges.insert((a, w), pieces.clone());
                g.edges.insert((w, b), pieces);
                g
            }
            (3, None) => {
                // self-loop subdivision
                let a = step.a;
                let t = step.kind.filter(|k| k.is_star())?;
                if n[a].origin != Origin::Graph {
                    return None;
                }
                let mut g = self.clone();
                let pieces = g.edges.remove(&(a, a))?;
                let w = g.add_node(t, Origin::Inserted);
                g.edges.insert((a, w), pieces.clone());
                g.edges.insert((w, a), pieces);
                g
            }
            (4, Some(b)) if kind(step.a) == GKind::SeqStar && kind(b) == GKind::SeqStar => {
                self.merge(step.a.min(b), step.a.max(b), GKind::SeqStar, false)
            }
            (5, Some(b)) if kind(step.a).is_star() && kind(b) == GKind::SubStar => {
                self.merge(step.a.min(b), step.a.max(b), GKind::SubStar, false)
            }
            (6, Some(b)) if kind(step.a).is_plus() && kind(b).is_wildcard() => {
                self.merge(step.a.min(b), step.a.max(b), GKind::SubPlus, true)
            }
            (7 | 8, None) => {
                let t = step.kind.filter(|k| k.is_star())?;
                if n[step.a].members.is_empty() {
                    return None;
                }
                let mut g = self.clone();
                let w = g.add_node(t, Origin::Appended);
                let e = if step.rule == 7 { (step.a, w) } else { (w, step.a) };
                g.edges.insert(e, BTreeSet::new());
                g
            }
            (9..=12, Some(b)) => {
                let a = step.a;
                if n[a].origin != Origin::Appended || n[b].origin != Origin::Appended {
                    return None;
                }
                let sinks = step.rule % 2 == 1;
                let side_free = |x: usize| {
                    if sinks {
                        self.succ(x).next().is_none()
                    } else {
                        self.pred(x).next().is_none()
                    }
                };
                if !side_free(a) || !side_free(b) {
                    return None;
                }
                let k = if step.rule <= 10 {
                    if kind(a) != GKind::SeqStar || kind(b) != GKind::SeqStar {
                        return None;
                    }
                    GKind::SeqStar
                } else {
                    if kind(a) != GKind::SubStar || !kind(b).is_star() {
                        return None;
                    }
                    GKind::SubStar
                };
                self.merge(a.min(b), a.max(b), k, false)
            }
            (13, None) if matches!(kind(step.a), GKind::SeqPlus | GKind::Plus) => {
                let mut g = self.clone();
                g.nodes[step.a].kind = GKind::SeqStar;
                g
            }
            (14, None) if matches!(kind(step.a), GKind::SubPlus | GKind::Plus) => {
                let mut g = self.clone();
                g.nodes[step.a].kind = GKind::SubStar;
                g.edges.remove(&(step.a, step.a));
                g
            }
            _ => return None,
        };
        out.last_rule = step.rule;
        Some(out)
    }

    /// Every applicable step with rule index in `rules`, each paired with its
    /// result. `star_kinds` limits the kinds rules 3, 7 and 8 may introduce.
    pub fn successors(&self, rules: std::ops::RangeInclusive<u8>, star_kinds: &[GKind]) -> Vec<(Step, GeneralizedGraph)> {
        let mut out = Vec::new();
        let n = self.node_count();
        let mut push = |s: Step| {
            if let Some(g) = self.apply(&s) {
                out.push((s, g));
            }
        };
        for rule in rules.filter(|&r| r >= self.last_rule) {
            match rule {
                1 | 13 | 14 => (0..n).for_each(|a| push(Step { rule, a, b: None, kind: None })),
                2 => {
                    for &(u, s) in self.edges.keys() {
                        push(Step { rule, a: u, b: Some(s), kind: None });
                    }
                }
                3 => {
                    for &(a, b) in self.edges.keys() {
                        for &k in star_kinds {
                            let b = (a != b).then_some(b);
                            push(Step { rule, a, b, kind: Some(k) });
                        }
                    }
                }
                7 | 8 => {
                    for a in 0..n {
                        for &k in star_kinds {
                            push(Step { rule, a, b: None, kind: Some(k) });
                        }
                    }
                }
                4 | 9 | 10 => {
                    for a in 0..n {
                        for b in a + 1..n {
                            push(Step { rule, a, b: Some(b), kind: None });
                        }
                    }
                }
                _ => {
                    for a in 0..n {
                        for b in 0..n {
                            push(Step { rule, a, b: Some(b), kind: None });
                        }
                    }
                }
            }
        }
        out
    }

    /// A piece of edge `(a, b)` is real when its graph endpoints belong to
    /// `a` and `b`; otherwise it is routed through an absorbed empty node.
    pub fn is_real(&self, (a, b): (usize, usize), (u, v): Piece) -> bool {
        self.nodes[a].members.contains(&u) && self.nodes[b].members.contains(&v)
    }

    pub fn is_isolated(&self, a: usize) -> bool {
        !self.has_edges_touching(a)
    }

    /// Key identifying the graph up to node order.
    pub fn canonical_key(&self) -> CanonicalKey {
        let mut nonempty: Vec<(GKind, Vec<usize>, Origin)> = Vec::new();
        let mut empty: Vec<EmptyDesc> = Vec::new();
        let mut cross: Vec<(Vec<usize>, Vec<usize>, Vec<Piece>)> = Vec::new();
        for (i, node) in self.nodes.iter().enumerate() {
            if node.members.is_empty() {
                let mut ins: Vec<(Vec<usize>, Vec<Piece>)> = self
                    .edges
                    .iter()
                    .filter(|(&(_, y), _)| y == i)
                    .map(|(&(x, _), ps)| (self.nodes[x].members.clone(), ps.iter().copied().collect()))
                    .collect();
                let mut outs: Vec<(Vec<usize>, Vec<Piece>)> = self
                    .edges
                    .iter()
                    .filter(|(&(x, _), _)| x == i)
                    .map(|(&(_, y), ps)| (self.nodes[y].members.clone(), ps.iter().copied().collect()))
                    .collect();
                ins.sort();
                outs.sort();
                empty.push((node.kind, node.origin, ins, outs));
            } else {
                nonempty.push((node.kind, node.members.clone(), node.origin));
            }
        }
        for (&(x, y), ps) in &self.edges {
            if !self.nodes[x].members.is_empty() && !self.nodes[y].members.is_empty() {
                cross.push((self.nodes[x].members.clone(), self.nodes[y].members.clone(), ps.iter().copied().collect()));
            }
        }
        nonempty.sort();
        empty.sort();
        cross.sort();
        CanonicalKey { last_rule: self.last_rule, nonempty, empty, cross }
    }
}

type EmptyDesc = (GKind, Origin, Vec<(Vec<usize>, Vec<Piece>)>, Vec<(Vec<usize>, Vec<Piece>)>);

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CanonicalKey {
    last_rule: u8,
    nonempty: Vec<(GKind, Vec<usize>, Origin)>,
    empty: Vec<EmptyDesc>,
    cross: Vec<(Vec<usize>, Vec<usize>, Vec<Piece>)>,
}

/// All one-step successors under rules 1 to 14.
pub fn apply_rules(g: &GeneralizedGraph) -> Vec<GeneralizedGraph> {
    g.successors(1..=14, &[GKind::SeqStar, GKind::SubStar]).into_iter().map(|(_, g)| g).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constraints::Attrs;

    fn chain_with_extra_pred() -> Graph {
        Graph::builder()
            .node("u", Attrs::new())
            .node("s", Attrs::new())
            .node("v", Attrs::new())
            .edge("u", "s", Attrs::new())
            .edge("v", "s", Attrs::new())
            .build()
            .unwrap()
    }

    #[test]
    fn rule2_blocked_by_second_in_edge() {
        let g = chain_with_extra_pred();
        let gg = GeneralizedGraph::from_graph(&g);
        // ids sort as s, u, v
        let gg = gg.apply(&Step { rule: 1, a: 0, b: None, kind: None }).unwrap();
        assert!(gg.apply(&Step { rule: 2, a: 1, b: Some(0), kind: None }).is_none());
    }

    #[test]
    fn rule_order_is_enforced() {
        let g = chain_with_extra_pred();
        let gg = GeneralizedGraph::from_graph(&g);
        let later = gg.apply(&Step { rule: 3, a: 1, b: Some(0), kind: Some(GKind::SeqStar) }).unwrap();
        assert!(later.apply(&Step { rule: 1, a: 2, b: None, kind: None }).is_none());
    }
}
