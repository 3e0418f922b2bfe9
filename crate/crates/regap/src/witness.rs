//! Match witnesses and a checker that validates them directly against the
//! pattern and graph, without looking at any encoding.
//!
//! Semantics checked, for `f: V -> V_P` total with `M(x) = f^-1(x)`:
//! - concrete `x` gets exactly one node satisfying its constraint, 1+
//!   wildcards get at least one node;
//! - a sequence set is a simple path `s1 .. sl`; interior nodes are entered
//!   only from their predecessor and non-final nodes leave only to their
//!   successor;
//! - every graph edge between different pattern nodes is either a pattern
//!   edge (leaving the last node of a sequence, entering the first) whose
//!   constraint holds, or bypasses an optional wildcard that is empty or a
//!   0+ subgraph, with both edge constraints holding;
//! - every pattern edge with both ends present is realized by such a graph
//!   edge (or, next to a nonempty `G*`, by a bypass through it); a pattern
//!   edge touching an empty optional wildcard requires a bypass only when the
//!   wildcard has both predecessors and successors;
//! - a nonempty `G*` with predecessors (successors) has at least one real
//!   incoming (outgoing) edge;
//! - pair constraints hold.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::graph::{Graph, Pattern, WildcardKind};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MatchWitness {
    /// graph node id -> pattern node id
    pub mapping: BTreeMap<String, String>,
    /// wildcard id -> graph node ids; sequences are listed in path order
    pub wildcard_contents: BTreeMap<String, Vec<String>>,
}

/// Index-level form of a witness.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Assignment {
    /// graph node -> pattern node
    pub f: Vec<usize>,
    /// sequence wildcard -> its nodes in path order
    pub seq: BTreeMap<usize, Vec<usize>>,
}

impl MatchWitness {
    pub fn from_assignment(p: &Pattern, g: &Graph, a: &Assignment) -> MatchWitness {
        let mapping = a.f.iter().enumerate().map(|(v, &x)| (g.id(v).to_string(), p.id(x).to_string())).collect();
        let mut wildcard_contents = BTreeMap::new();
        for w in p.wildcards() {
            let nodes: Vec<usize> = match a.seq.get(&w) {
                Some(order) => order.clone(),
                None => (0..g.node_count()).filter(|&v| a.f[v] == w).collect(),
            };
            wildcard_contents.insert(p.id(w).to_string(), nodes.into_iter().map(|v| g.id(v).to_string()).collect());
        }
        MatchWitness { mapping, wildcard_contents }
    }

    pub fn to_assignment(&self, p: &Pattern, g: &Graph) -> Result<Assignment, String> {
        let mut f = vec![usize::MAX; g.node_count()];
        for (gv, pv) in &self.mapping {
            let v = g.index_of(gv).ok_or_else(|| format!("unknown graph node {gv}"))?;
            let x = p.index_of(pv).ok_or_else(|| format!("unknown pattern node {pv}"))?;
            f[v] = x;
        }
        if let Some(v) = f.iter().position(|&x| x == usize::MAX) {
            return Err(format!("graph node {} is unmapped", g.id(v)));
        }
        let mut seq = BTreeMap::new();
        for w in p.wildcards() {
            if p.wildcard(w).unwrap().is_seq() {
                let order = self
                    .wildcard_contents
                    .get(p.id(w))
                    .map(|ids| ids.iter().filter_map(|id| g.index_of(id)).collect())
                    .unwrap_or_default();
                seq.insert(w, order);
            }
        }
        Ok(Assignment { f, seq })
    }
}

/// The ordering of a sequence set, if the set induces a simple path.
pub fn path_order(g: &Graph, set: &[usize], inside: impl Fn(usize) -> bool) -> Option<Vec<usize>> {
    if set.is_empty() {
        return Some(Vec::new());
    }
    let starts: Vec<usize> = set.iter().copied().filter(|&v| !g.pred(v).iter().any(|&u| inside(u))).collect();
    if starts.len() != 1 {
        return None;
    }
    let mut order = vec![starts[0]];
    while order.len() < set.len() {
        let last = *order.last().unwrap();
        let next: Vec<usize> = g.succ(last).iter().copied().filter(|&u| inside(u)).collect();
        if next.len() != 1 || order.contains(&next[0]) {
            return None;
        }
        order.push(next[0]);
    }
    Some(order)
}

struct Ctx<'a> {
    p: &'a Pattern,
    g: &'a Graph,
    members: Vec<Vec<usize>>,
    first: Vec<Option<usize>>,
    last: Vec<Option<usize>>,
}

impl Ctx<'_> {
    fn is_seq(&self, x: usize) -> bool {
        self.p.wildcard(x).is_some_and(|k| k.is_seq())
    }

    fn is_entry(&self, x: usize, v: usize) -> bool {
        !self.is_seq(x) || self.first[x] == Some(v)
    }

    fn is_exit(&self, x: usize, v: usize) -> bool {
        !self.is_seq(x) || self.last[x] == Some(v)
    }

    fn present(&self, x: usize) -> bool {
        !self.members[x].is_empty()
    }

    fn edge_ok(&self, pe: usize, ge: usize) -> bool {
        self.p.edge_constraint(pe).eval(self.g.edge_attrs(ge))
    }

    /// Can graph edge `ge = (a, b)` realize pattern edge `(x, y)` directly?
    fn direct(&self, x: usize, y: usize, ge: usize) -> bool {
        let (a, b) = self.g.edges()[ge];
        match self.p.edge_id(x, y) {
            Some(pe) => self.is_exit(x, a) && self.is_entry(y, b) && self.edge_ok(pe, ge),
            None => false,
        }
    }

    /// Can graph edge `ge` bypass wildcard `w` from `x` to `y`?
    fn skip_via(&self, x: usize, w: usize, y: usize, ge: usize) -> bool {
        let Some(kind) = self.p.wildcard(w) else { return false };
        if !kind.is_zero_plus() || (self.present(w) && kind != WildcardKind::Sub0Plus) {
            return false;
        }
        let (a, b) = self.g.edges()[ge];
        match (self.p.edge_id(x, w), self.p.edge_id(w, y)) {
            (Some(e1), Some(e2)) => {
                self.is_exit(x, a) && self.is_entry(y, b) && self.edge_ok(e1, ge) && self.edge_ok(e2, ge)
            }
            _ => false,
        }
    }

    fn skip(&self, x: usize, y: usize, ge: usize) -> bool {
        self.p.succ(x).iter().any(|&w| self.skip_via(x, w, y, ge))
    }

    fn graph_edges_between(&self, x: usize, y: usize) -> impl Iterator<Item = usize> + '_ {
        self.members[x]
            .iter()
            .flat_map(move |&a| self.g.succ(a).iter().map(move |&b| (a, b)))
            .filter(move |&(_, b)| self.members[y].contains(&b))
            .map(move |(a, b)| self.g.edge_id(a, b).unwrap())
    }
}

pub fn check_assignment(p: &Pattern, g: &Graph, a: &Assignment) -> Result<(), String> {
    if a.f.len() != g.node_count() {
        return Err("assignment does not cover the graph".into());
    }
    let n_p = p.node_count();
    let mut members = vec![Vec::new(); n_p];
    for (v, &x) in a.f.iter().enumerate() {
        if x >= n_p {
            return Err(format!("graph node {} mapped out of range", g.id(v)));
        }
        members[x].push(v);
    }
    let mut first = vec![None; n_p];
    let mut last = vec![None; n_p];

    for x in 0..n_p {
        let m = &members[x];
        match p.wildcard(x) {
            None => {
                if m.len() != 1 {
                    return Err(format!("concrete {} has {} graph nodes", p.id(x), m.len()));
                }
                if !p.node_constraint(x).eval(g.node_attrs(m[0])) {
                    return Err(format!("{} fails the constraint of {}", g.id(m[0]), p.id(x)));
                }
            }
            Some(kind) => {
                if !kind.is_zero_plus() && m.is_empty() {
                    return Err(format!("wildcard {} is empty", p.id(x)));
                }
                if kind.is_seq() {
                    let order = a.seq.get(&x).cloned().unwrap_or_default();
                    let mut sorted = order.clone();
                    sorted.sort_unstable();
                    if sorted != *m {
                        return Err(format!("sequence order of {} does not list its nodes", p.id(x)));
                    }
                    check_chain(p, g, x, &order)?;
                    first[x] = order.first().copied();
                    last[x] = order.last().copied();
                }
            }
        }
    }
    let ctx = Ctx { p, g, members, first, last };

    for (ge, &(u, v)) in g.edges().iter().enumerate() {
        let (x, y) = (a.f[u], a.f[v]);
        if x == y && p.is_wildcard(x) {
            continue;
        }
        if !(ctx.direct(x, y, ge) || ctx.skip(x, y, ge)) {
            return Err(format!(
                "graph edge {} -> {} ({} -> {}) is not accounted for",
                g.id(u),
                g.id(v),
                p.id(x),
                p.id(y)
            ));
        }
    }

    for &(x, y) in p.edges() {
        let covered = match (ctx.present(x), ctx.present(y)) {
            (true, true) => {
                let direct = ctx.graph_edges_between(x, y).any(|ge| ctx.direct(x, y, ge));
                let through_y = p.wildcard(y) == Some(WildcardKind::Sub0Plus)
                    && p.succ(y).iter().any(|&z| ctx.graph_edges_between(x, z).any(|ge| ctx.skip_via(x, y, z, ge)));
                let through_x = p.wildcard(x) == Some(WildcardKind::Sub0Plus)
                    && p.pred(x).iter().any(|&z| ctx.graph_edges_between(z, y).any(|ge| ctx.skip_via(z, x, y, ge)));
                direct || through_y || through_x
            }
            (true, false) => {
                p.succ(y).is_empty()
                    || p.succ(y).iter().any(|&z| ctx.graph_edges_between(x, z).any(|ge| ctx.skip_via(x, y, z, ge)))
            }
            (false, true) => {
                p.pred(x).is_empty()
                    || p.pred(x).iter().any(|&z| ctx.graph_edges_between(z, y).any(|ge| ctx.skip_via(z, x, y, ge)))
            }
            (false, false) => false,
        };
        if !covered {
            return Err(format!("pattern edge {} -> {} is not realized", p.id(x), p.id(y)));
        }
    }

    for w in p.wildcards() {
        if p.wildcard(w) != Some(WildcardKind::Sub0Plus) || !ctx.present(w) {
            continue;
        }
        if !p.pred(w).is_empty() && !p.pred(w).iter().any(|&z| ctx.graph_edges_between(z, w).any(|ge| ctx.direct(z, w, ge))) {
            return Err(format!("nonempty {} has no real incoming edge", p.id(w)));
        }
        if !p.succ(w).is_empty() && !p.succ(w).iter().any(|&z| ctx.graph_edges_between(w, z).any(|ge| ctx.direct(w, z, ge))) {
            return Err(format!("nonempty {} has no real outgoing edge", p.id(w)));
        }
    }

    for pc in p.pairs() {
        let (u, v) = (ctx.members[pc.u][0], ctx.members[pc.v][0]);
        if !pc.constraint.eval(g.node_attrs(u), g.node_attrs(v)) {
            return Err(format!("pair constraint {} -> {} fails", p.id(pc.u), p.id(pc.v)));
        }
    }
    Ok(())
}

fn check_chain(p: &Pattern, g: &Graph, w: usize, order: &[usize]) -> Result<(), String> {
    let pos = |v: usize| order.iter().position(|&x| x == v);
    for (i, &v) in order.iter().enumerate() {
        for &u in g.succ(v) {
            if let Some(j) = pos(u) {
                if j != i + 1 {
                    return Err(format!("{} has a non-path edge {} -> {}", p.id(w), g.id(v), g.id(u)));
                }
            } else if i + 1 < order.len() {
                return Err(format!("{} leaves sequence {} before its end", g.id(v), p.id(w)));
            }
        }
        if i > 0 && g.pred(v) != [order[i - 1]] {
            return Err(format!("interior node {} of {} has extra in-edges", g.id(v), p.id(w)));
        }
        if i + 1 < order.len() && !g.has_edge(v, order[i + 1]) {
            return Err(format!("{} is not a path", p.id(w)));
        }
    }
    Ok(())
}

pub fn check_witness(p: &Pattern, g: &Graph, w: &MatchWitness) -> Result<(), String> {
    let a = w.to_assignment(p, g)?;
    check_assignment(p, g, &a)
}
