//! Exhaustive search over node assignments, checked with the witness
//! checker. Used to triage disagreements between the rule search and the
//! encoding.

use std::collections::BTreeMap;

use crate::graph::{Graph, Pattern};
use crate::witness::{check_assignment, path_order, Assignment};

/// First assignment `f: V -> V_P` accepted by the witness checker.
pub fn enumerate_match(p: &Pattern, g: &Graph) -> Option<Assignment> {
    let mut f = vec![0; g.node_count()];
    let mut taken = vec![false; p.node_count()];
    go(p, g, 0, &mut f, &mut taken)
}

fn go(p: &Pattern, g: &Graph, v: usize, f: &mut [usize], taken: &mut [bool]) -> Option<Assignment> {
    if v == g.node_count() {
        return finish(p, g, f);
    }
    for x in 0..p.node_count() {
        let concrete = !p.is_wildcard(x);
        if concrete && (taken[x] || !p.node_constraint(x).eval(g.node_attrs(v))) {
            continue;
        }
        f[v] = x;
        if concrete {
            taken[x] = true;
        }
        let r = go(p, g, v + 1, f, taken);
        if concrete {
            taken[x] = false;
        }
        if r.is_some() {
            return r;
        }
    }
    None
}

fn finish(p: &Pattern, g: &Graph, f: &[usize]) -> Option<Assignment> {
    let mut seq = BTreeMap::new();
    for w in p.wildcards() {
        if p.wildcard(w).unwrap().is_seq() {
            let set: Vec<usize> = (0..g.node_count()).filter(|&v| f[v] == w).collect();
            seq.insert(w, path_order(g, &set, |u| f[u] == w)?);
        }
    }
    let a = Assignment { f: f.to_vec(), seq };
    check_assignment(p, g, &a).is_ok().then_some(a)
}
