//! Node merging: contract chain edges whose endpoints no concrete pattern
//! node can accept.

use serde::Serialize;

use crate::graph::{Graph, Pattern};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct MergeReport {
    /// Contracted edges `(u, v)` in application order; `u` was removed.
    pub merged_pairs: Vec<(String, String)>,
    pub nodes_before: usize,
    pub nodes_after: usize,
    pub applied: bool,
}

/// `true` for graph nodes accepted by at least one concrete pattern node.
pub fn accepted_nodes(g: &Graph, p: &Pattern) -> Vec<bool> {
    (0..g.node_count())
        .map(|v| p.concretes().any(|c| p.node_constraint(c).eval(g.node_attrs(v))))
        .collect()
}

fn structurally_mergeable(g: &Graph, u: usize, v: usize) -> bool {
    u != v && g.succ(u) == [v] && g.pred(v) == [u]
}

fn mergeable_with(g: &Graph, accepted: &[bool]) -> Vec<(usize, usize)> {
    g.edges()
        .iter()
        .copied()
        .filter(|&(u, v)| !accepted[u] && !accepted[v] && structurally_mergeable(g, u, v))
        .collect()
}

/// Edges `(u, v)` that may be contracted: no concrete node constraint accepts
/// `u` or `v`, `(u, v)` is `v`'s only in-edge and `u`'s only out-edge.
/// Returned as `(src id, dst id)` in id order.
pub fn mergeable_edges(g: &Graph, p: &Pattern) -> Result<Vec<(String, String)>> {
    if p.has_wildcard_edge() {
        return Err(Error::WildcardEdge);
    }
    let acc = accepted_nodes(g, p);
    Ok(mergeable_with(g, &acc)
        .into_iter()
        .map(|(u, v)| (g.id(u).to_string(), g.id(v).to_string()))
        .collect())
}

/// Removes `u` and redirects every `(u', u)` to `(u', v)` keeping the
/// attributes of `(u', u)`. Only the structural side of mergeability is
/// checked here.
pub fn merge_once(g: &Graph, u: &str, v: &str) -> Result<Graph> {
    let iu = g.index_of(u).ok_or_else(|| Error::UnknownNode(u.to_string()))?;
    let iv = g.index_of(v).ok_or_else(|| Error::UnknownNode(v.to_string()))?;
    if !g.has_edge(iu, iv) || !structurally_mergeable(g, iu, iv) {
        return Err(Error::NotMergeable(u.to_string(), v.to_string()));
    }
    Ok(contract(g, iu, iv))
}

fn contract(g: &Graph, u: usize, v: usize) -> Graph {
    let nodes = (0..g.node_count())
        .filter(|&x| x != u)
        .map(|x| (g.id(x).to_string(), g.node_attrs(x).clone()))
        .collect();
    let edges = g
        .edges()
        .iter()
        .enumerate()
        .filter(|&(_, &(a, b))| !(a == u && b == v))
        .map(|(e, &(a, b))| {
            let b = if b == u { v } else { b };
            (g.id(a).to_string(), g.id(b).to_string(), g.edge_attrs(e).clone())
        })
        .collect();
    Graph::from_parts(nodes, edges)
}

/// Contracts mergeable edges, smallest `(src, dst)` id pair first, until none
/// remain. A pattern with a wildcard-wildcard edge leaves the graph alone.
pub fn merge_fixpoint(g: &Graph, p: &Pattern) -> (Graph, MergeReport) {
    let mut report = MergeReport {
        nodes_before: g.node_count(),
        nodes_after: g.node_count(),
        ..Default::default()
    };
    if p.has_wildcard_edge() {
        return (g.clone(), report);
    }
    report.applied = true;
    let acc_by_id: std::collections::HashMap<String, bool> = accepted_nodes(g, p)
        .into_iter()
        .enumerate()
        .map(|(v, a)| (g.id(v).to_string(), a))
        .collect();
    let mut cur = g.clone();
    loop {
        let acc: Vec<bool> = cur.ids().iter().map(|id| acc_by_id[id]).collect();
        let Some(&(u, v)) = mergeable_with(&cur, &acc).first() else {
            break;
        };
        report.merged_pairs.push((cur.id(u).to_string(), cur.id(v).to_string()));
        cur = contract(&cur, u, v);
    }
    report.nodes_after = cur.node_count();
    (cur, report)
}
