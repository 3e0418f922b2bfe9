//! Wildcard expansion: every wildcard becomes plain pattern nodes so that
//! the encoder only sees a wildcard-free graph plus bookkeeping sets.

use std::collections::{HashMap, HashSet};

use serde_json::{json, Value};

use crate::constraints::Constraint;
use crate::error::{Error, Result};
use crate::graph::{Graph, NodeKind, Pattern, WildcardKind};

/// `k` for sequence expansion: `|V|` (at least 1) unless overridden.
/// Returns `(k, incomplete)`; `incomplete` is set when the override is
/// below `|V|`, where a match might be missed.
pub fn choose_k(g: &Graph, override_k: Option<usize>) -> Result<(usize, bool)> {
    let full = g.node_count().max(1);
    match override_k {
        None => Ok((full, false)),
        Some(0) => Err(Error::BadK),
        Some(k) => Ok((k, k < g.node_count())),
    }
}

/// Pattern with every `S+` replaced by a concrete head, an `S*` tail and the
/// edge head -> tail, plus the maps back to the original pattern.
#[derive(Debug, Clone)]
pub struct Rewritten {
    pub pattern: Pattern,
    /// rewritten node -> original node
    pub node_origin: Vec<usize>,
    /// rewritten edge -> original edge; `None` for the head -> tail edges
    pub edge_origin: Vec<Option<usize>>,
}

fn fresh_id(taken: &HashSet<String>, base: String) -> String {
    let mut id = base;
    while taken.contains(&id) {
        id.push('\'');
    }
    id
}

pub fn rewrite_seq1plus(p: &Pattern) -> Pattern {
    rewrite_seq1plus_with_origin(p).pattern
}

pub fn rewrite_seq1plus_with_origin(p: &Pattern) -> Rewritten {
    let mut taken: HashSet<String> = p.ids().iter().cloned().collect();
    let mut head = vec![String::new(); p.node_count()];
    let mut tail = vec![String::new(); p.node_count()];
    let mut b = Pattern::builder();
    for v in 0..p.node_count() {
        let id = p.id(v).to_string();
        if p.wildcard(v) == Some(WildcardKind::Seq1Plus) {
            head[v] = fresh_id(&taken, format!("{id}^head"));
            taken.insert(head[v].clone());
            tail[v] = fresh_id(&taken, format!("{id}^tail"));
            taken.insert(tail[v].clone());
            b.add_node(head[v].clone(), NodeKind::Concrete, None);
            b.add_node(tail[v].clone(), NodeKind::Wildcard(WildcardKind::Seq0Plus), None);
            b.add_edge(head[v].clone(), tail[v].clone(), Constraint::True);
        } else {
            head[v] = id.clone();
            tail[v] = id.clone();
            let c = p.node_constraint(v);
            b.add_node(id, p.kind(v), (!c.is_true()).then(|| c.clone()));
        }
    }
    for (e, &(s, d)) in p.edges().iter().enumerate() {
        b.add_edge(tail[s].clone(), head[d].clone(), p.edge_constraint(e).clone());
    }
    for pc in p.pairs() {
        b.add_pair(p.id(pc.u), p.id(pc.v), pc.constraint.clone());
    }
    let pattern = b.build().expect("rewrite of a valid pattern is valid");

    let mut node_origin = vec![0; pattern.node_count()];
    for v in 0..p.node_count() {
        node_origin[pattern.index_of(&head[v]).unwrap()] = v;
        node_origin[pattern.index_of(&tail[v]).unwrap()] = v;
    }
    let mut edge_origin = vec![None; pattern.edge_count()];
    for (e, &(s, d)) in p.edges().iter().enumerate() {
        let rs = pattern.index_of(&tail[s]).unwrap();
        let rd = pattern.index_of(&head[d]).unwrap();
        edge_origin[pattern.edge_id(rs, rd).unwrap()] = Some(e);
    }
    Rewritten { pattern, node_origin, edge_origin }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExpNode {
    pub id: String,
    /// node of the rewritten pattern this one stands for
    pub origin: usize,
    /// sequence position (0-based) or copied graph node; 0 for concrete nodes
    pub pos: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EdgeKind {
    /// Stands for rewritten pattern edge `e`.
    Orig(usize),
    /// Path or graph-copy edge inside wildcard `w`.
    Mid(usize),
    /// Bypasses 0+ wildcard `w`; replaces the pair of edges `e_in`, `e_out`.
    Skip { w: usize, e_in: usize, e_out: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExpEdge {
    pub src: usize,
    pub dst: usize,
    pub kind: EdgeKind,
}

/// Bookkeeping for one wildcard of the rewritten pattern.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct WildcardExp {
    pub node: usize,
    pub exp_nodes: Vec<usize>,
    pub mid_edges: Vec<usize>,
    /// per predecessor: the expanded edges replacing `(pred, w)`
    pub in_edges: Vec<(usize, Vec<usize>)>,
    /// per successor: the expanded edges replacing `(w, succ)`
    pub out_edges: Vec<(usize, Vec<usize>)>,
    /// per predecessor: skip edges leaving it (0+ kinds only)
    pub skip_from: Vec<(usize, Vec<usize>)>,
    /// per successor: skip edges entering it (0+ kinds only)
    pub skip_to: Vec<(usize, Vec<usize>)>,
}

impl WildcardExp {
    pub fn all_in(&self) -> impl Iterator<Item = usize> + '_ {
        self.in_edges.iter().flat_map(|(_, es)| es.iter().copied())
    }

    pub fn all_out(&self) -> impl Iterator<Item = usize> + '_ {
        self.out_edges.iter().flat_map(|(_, es)| es.iter().copied())
    }

    pub fn all_skip(&self) -> impl Iterator<Item = usize> + '_ {
        self.skip_from.iter().flat_map(|(_, es)| es.iter().copied())
    }
}

#[derive(Debug, Clone)]
pub struct ExpandedPattern {
    pub rewritten: Rewritten,
    pub nodes: Vec<ExpNode>,
    pub edges: Vec<ExpEdge>,
    pub wildcards: Vec<WildcardExp>,
    pub k: usize,
    pub k_incomplete: bool,
    /// expanded nodes standing for each rewritten node
    pub members: Vec<Vec<usize>>,
    edge_index: HashMap<(usize, usize), usize>,
}

impl ExpandedPattern {
    pub fn pattern(&self) -> &Pattern {
        &self.rewritten.pattern
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edge_id(&self, src: usize, dst: usize) -> Option<usize> {
        self.edge_index.get(&(src, dst)).copied()
    }

    /// Original pattern node an expanded node stands for.
    pub fn original(&self, x: usize) -> usize {
        self.rewritten.node_origin[self.nodes[x].origin]
    }

    pub fn kind_of(&self, x: usize) -> NodeKind {
        self.pattern().kind(self.nodes[x].origin)
    }

    /// `true` for nodes that belong to some wildcard expansion.
    pub fn is_optional(&self, x: usize) -> bool {
        self.kind_of(x).is_wildcard()
    }

    /// Node constraint of an expanded node; expansion nodes accept anything.
    pub fn node_constraint(&self, x: usize) -> &Constraint {
        const TRUE: &Constraint = &Constraint::True;
        if self.is_optional(x) {
            TRUE
        } else {
            self.pattern().node_constraint(self.nodes[x].origin)
        }
    }

    /// Rewritten-pattern edges whose constraints an expanded edge inherits.
    pub fn edge_sources(&self, e: usize) -> Vec<usize> {
        match self.edges[e].kind {
            EdgeKind::Orig(pe) => vec![pe],
            EdgeKind::Mid(_) => vec![],
            EdgeKind::Skip { e_in, e_out, .. } => vec![e_in, e_out],
        }
    }

    pub fn wildcard(&self, w: usize) -> Option<&WildcardExp> {
        self.wildcards.iter().find(|x| x.node == w)
    }

    /// Serialized as a plain pattern with an `expansion` sidecar.
    pub fn to_json_value(&self) -> Value {
        let rp = self.pattern();
        let nodes: Vec<Value> = (0..self.node_count())
            .map(|x| {
                let mut n = json!({"id": self.nodes[x].id, "kind": "concrete"});
                let c = self.node_constraint(x);
                if !c.is_true() {
                    n["constraint"] = c.to_json();
                }
                n
            })
            .collect();
        let edges: Vec<Value> = self
            .edges
            .iter()
            .enumerate()
            .map(|(i, e)| {
                let mut v = json!({"src": self.nodes[e.src].id, "dst": self.nodes[e.dst].id});
                let cs: Vec<Constraint> = self
                    .edge_sources(i)
                    .into_iter()
                    .map(|pe| rp.edge_constraint(pe).clone())
                    .filter(|c| !c.is_true())
                    .collect();
                match cs.len() {
                    0 => {}
                    1 => v["constraint"] = cs[0].to_json(),
                    _ => v["constraint"] = Constraint::And(cs).to_json(),
                }
                v
            })
            .collect();
        let ids = |es: &[usize]| -> Vec<Value> {
            es.iter().map(|&e| json!([self.nodes[self.edges[e].src].id, self.nodes[self.edges[e].dst].id])).collect()
        };
        let grouped = |gs: &[(usize, Vec<usize>)]| -> Value {
            Value::Object(gs.iter().map(|(n, es)| (rp.id(*n).to_string(), Value::Array(ids(es)))).collect())
        };
        let wildcards: Vec<Value> = self
            .wildcards
            .iter()
            .map(|w| {
                json!({
                    "wildcard": rp.id(w.node),
                    "kind": rp.kind(w.node).name(),
                    "nodes": w.exp_nodes.iter().map(|&x| self.nodes[x].id.clone()).collect::<Vec<_>>(),
                    "mid": ids(&w.mid_edges),
                    "in": grouped(&w.in_edges),
                    "out": grouped(&w.out_edges),
                    "skip_from": grouped(&w.skip_from),
                    "skip_to": grouped(&w.skip_to),
                })
            })
            .collect();
        json!({
            "nodes": nodes,
            "edges": edges,
            "expansion": {
                "k": self.k,
                "k_incomplete": self.k_incomplete,
                "origin": (0..self.node_count())
                    .map(|x| (self.nodes[x].id.clone(), json!(rp.id(self.nodes[x].origin))))
                    .collect::<serde_json::Map<_, _>>(),
                "wildcards": wildcards,
            }
        })
    }
}

/// Shapes the encoding cannot express faithfully.
pub fn check_supported(rp: &Pattern) -> Result<()> {
    for &(s, d) in rp.edges() {
        let zs = rp.wildcard(s).is_some_and(|k| k.is_zero_plus());
        let zd = rp.wildcard(d).is_some_and(|k| k.is_zero_plus());
        if zs && zd {
            return Err(Error::Unsupported(format!(
                "edge {} -> {} joins two optional wildcards",
                rp.id(s),
                rp.id(d)
            )));
        }
    }
    for w in rp.wildcards() {
        if !rp.wildcard(w).unwrap().is_zero_plus() {
            continue;
        }
        // skip edges around w would coincide with the copy of E inside x
        if let Some(&x) = rp.pred(w).iter().find(|&&x| rp.succ(w).contains(&x) && rp.is_wildcard(x)) {
            return Err(Error::Unsupported(format!(
                "{} is both predecessor and successor of optional wildcard {}",
                rp.id(x),
                rp.id(w)
            )));
        }
    }
    Ok(())
}

/// Expands the wildcards of `p` against `g` with sequence length `k`.
/// `S+` nodes are rewritten first.
pub fn expand(p: &Pattern, g: &Graph, k: usize) -> Result<ExpandedPattern> {
    expand_rewritten(rewrite_seq1plus_with_origin(p), g, k, k < g.node_count())
}

pub fn expand_rewritten(rw: Rewritten, g: &Graph, k: usize, k_incomplete: bool) -> Result<ExpandedPattern> {
    if k == 0 {
        return Err(Error::BadK);
    }
    let rp = &rw.pattern;
    check_supported(rp)?;
    let n = g.node_count();

    let mut nodes: Vec<ExpNode> = Vec::new();
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); rp.node_count()];
    for v in 0..rp.node_count() {
        let id = rp.id(v);
        let mut push = |nodes: &mut Vec<ExpNode>, nid: String, pos: usize| {
            members[v].push(nodes.len());
            nodes.push(ExpNode { id: nid, origin: v, pos });
        };
        match rp.kind(v) {
            NodeKind::Concrete => push(&mut nodes, id.to_string(), 0),
            NodeKind::Wildcard(WildcardKind::Seq0Plus) => {
                for i in 0..k {
                    push(&mut nodes, format!("{id}^{}", i + 1), i);
                }
            }
            NodeKind::Wildcard(WildcardKind::Sub0Plus | WildcardKind::Sub1Plus) => {
                for x in 0..n {
                    push(&mut nodes, format!("{id}^{}", g.id(x)), x);
                }
            }
            NodeKind::Wildcard(WildcardKind::Seq1Plus) => unreachable!("S+ is rewritten before expansion"),
        }
    }
    let entry = |v: usize| -> &[usize] {
        match rp.wildcard(v) {
            Some(WildcardKind::Seq0Plus) => &members[v][..1],
            _ => &members[v][..],
        }
    };
    let exit = |v: usize| -> &[usize] { &members[v][..] };

    let mut edges: Vec<ExpEdge> = Vec::new();
    let mut by_orig: Vec<Vec<usize>> = vec![Vec::new(); rp.edge_count()];
    for (pe, &(a, b)) in rp.edges().iter().enumerate() {
        for &s in exit(a) {
            for &d in entry(b) {
                by_orig[pe].push(edges.len());
                edges.push(ExpEdge { src: s, dst: d, kind: EdgeKind::Orig(pe) });
            }
        }
    }

    let mut wildcards = Vec::new();
    for w in rp.wildcards() {
        let kind = rp.wildcard(w).unwrap();
        let mut wx = WildcardExp { node: w, exp_nodes: members[w].clone(), ..Default::default() };
        match kind {
            WildcardKind::Seq0Plus => {
                for pair in members[w].windows(2) {
                    wx.mid_edges.push(edges.len());
                    edges.push(ExpEdge { src: pair[0], dst: pair[1], kind: EdgeKind::Mid(w) });
                }
            }
            _ => {
                for &(x, y) in g.edges() {
                    wx.mid_edges.push(edges.len());
                    edges.push(ExpEdge { src: members[w][x], dst: members[w][y], kind: EdgeKind::Mid(w) });
                }
            }
        }
        for &u in rp.pred(w) {
            wx.in_edges.push((u, by_orig[rp.edge_id(u, w).unwrap()].clone()));
        }
        for &v in rp.succ(w) {
            wx.out_edges.push((v, by_orig[rp.edge_id(w, v).unwrap()].clone()));
        }
        if kind.is_zero_plus() {
            let mut to: HashMap<usize, Vec<usize>> = HashMap::new();
            for &u in rp.pred(w) {
                let e_in = rp.edge_id(u, w).unwrap();
                let mut from = Vec::new();
                for &v in rp.succ(w) {
                    let e_out = rp.edge_id(w, v).unwrap();
                    for &s in exit(u) {
                        for &d in entry(v) {
                            from.push(edges.len());
                            to.entry(v).or_default().push(edges.len());
                            edges.push(ExpEdge { src: s, dst: d, kind: EdgeKind::Skip { w, e_in, e_out } });
                        }
                    }
                }
                wx.skip_from.push((u, from));
            }
            for &v in rp.succ(w) {
                wx.skip_to.push((v, to.remove(&v).unwrap_or_default()));
            }
        }
        wildcards.push(wx);
    }

    let mut edge_index = HashMap::with_capacity(edges.len());
    for (i, e) in edges.iter().enumerate() {
        if let Some(j) = edge_index.insert((e.src, e.dst), i) {
            let skip = if matches!(e.kind, EdgeKind::Skip { .. }) { i } else { j };
            let EdgeKind::Skip { w, .. } = edges[skip].kind else { unreachable!() };
            return Err(Error::Unsupported(format!(
                "skip edge {} -> {} around {} coincides with another pattern edge",
                nodes[e.src].id,
                nodes[e.dst].id,
                rp.id(w)
            )));
        }
    }

    Ok(ExpandedPattern { rewritten: rw, nodes, edges, wildcards, k, k_incomplete, members, edge_index })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constraints::Attrs;

    fn chain(n: usize) -> Graph {
        let mut b = Graph::builder();
        for i in 0..n {
            b.add_node(format!("v{i}"), Attrs::new());
        }
        for i in 1..n {
            b.add_edge(format!("v{}", i - 1), format!("v{i}"), Attrs::new());
        }
        b.build().unwrap()
    }

    #[test]
    fn single_seq0plus() {
        let p = Pattern::builder()
            .concrete("A", Constraint::True)
            .wildcard("S", WildcardKind::Seq0Plus)
            .concrete("B", Constraint::True)
            .edge("A", "S")
            .edge("S", "B")
            .build()
            .unwrap();
        let ep = expand(&p, &chain(3), 3).unwrap();
        assert_eq!(ep.node_count(), 5);
        // A->s0, s0..s2 -> B, two chain edges, skip A->B
        assert_eq!(ep.edge_count(), 7);
    }

    #[test]
    fn skip_collision_is_unsupported() {
        let p = Pattern::builder()
            .concrete("A", Constraint::True)
            .wildcard("S", WildcardKind::Seq0Plus)
            .concrete("B", Constraint::True)
            .edge("A", "S")
            .edge("S", "B")
            .edge("A", "B")
            .build()
            .unwrap();
        assert!(matches!(expand(&p, &chain(2), 2), Err(Error::Unsupported(_))));
    }
}
