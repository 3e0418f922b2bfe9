//! Final check of a generalized graph against the pattern: a kind
//! preserving bijection with identical edges and satisfied constraints.

use crate::graph::{Graph, NodeKind, Pattern, WildcardKind};

use super::rules::{GKind, GeneralizedGraph, Origin};

fn compatible(pk: NodeKind, gk: GKind) -> bool {
    use WildcardKind::*;
    match pk {
        NodeKind::Concrete => gk == GKind::Concrete,
        NodeKind::Wildcard(Seq1Plus) => matches!(gk, GKind::SeqPlus | GKind::Plus),
        NodeKind::Wildcard(Sub1Plus) => matches!(gk, GKind::SubPlus | GKind::Plus),
        NodeKind::Wildcard(Seq0Plus) => gk == GKind::SeqStar,
        NodeKind::Wildcard(Sub0Plus) => gk == GKind::SubStar,
    }
}

/// 0+ wildcards without pattern edges stand for the empty graph too, so
/// they may be left without an image.
fn droppable(p: &Pattern, x: usize) -> bool {
    p.wildcard(x).is_some_and(|k| k.is_zero_plus()) && p.succ(x).is_empty() && p.pred(x).is_empty()
}

/// Pattern edge `x -> y` read as generalized edge `a -> b`: constraints hold
/// on every piece and nothing is routed through a 1+ image.
fn edge_ok(p: &Pattern, g: &Graph, gg: &GeneralizedGraph, (x, y): (usize, usize), (a, b): (usize, usize)) -> bool {
    let c = p.edge_constraint(p.edge_id(x, y).unwrap());
    let one_plus = |z: usize| p.wildcard(z).is_some_and(|k| !k.is_zero_plus());
    let members = |n: usize| &gg.nodes[n].members;
    gg.edges[&(a, b)].iter().all(|&(u, v)| {
        (!one_plus(x) || members(a).contains(&u))
            && (!one_plus(y) || members(b).contains(&v))
            && c.eval(g.edge_attrs(g.edge_id(u, v).unwrap()))
    })
}

/// Kinds a generalized node can still take on under rules 13 and 14.
fn may_become(pk: NodeKind, gk: GKind) -> bool {
    use WildcardKind::*;
    compatible(pk, gk)
        || match pk {
            NodeKind::Wildcard(Seq0Plus) => matches!(gk, GKind::Plus | GKind::SeqPlus),
            NodeKind::Wildcard(Sub0Plus) => matches!(gk, GKind::Plus | GKind::SubPlus),
            _ => false,
        }
}

/// Whether the non-appended nodes of `gg` embed into `p`. Later rules only
/// add appended nodes, retype wildcards and drop wildcard self-loops, so a
/// graph failing this can never match.
pub(super) fn core_fits(p: &Pattern, g: &Graph, gg: &GeneralizedGraph) -> bool {
    let core: Vec<usize> = (0..gg.node_count()).filter(|&a| gg.nodes[a].origin != Origin::Appended).collect();
    let mut f = Vec::with_capacity(core.len());
    let mut used = vec![false; p.node_count()];
    core_go(p, g, gg, &core, &mut f, &mut used)
}

fn core_go(p: &Pattern, g: &Graph, gg: &GeneralizedGraph, core: &[usize], f: &mut Vec<usize>, used: &mut [bool]) -> bool {
    let i = f.len();
    if i == core.len() {
        return true;
    }
    let a = core[i];
    let node = &gg.nodes[a];
    for x in 0..p.node_count() {
        if used[x] || !may_become(p.kind(x), node.kind) {
            continue;
        }
        if node.kind == GKind::Concrete && !p.node_constraint(x).eval(g.node_attrs(node.members[0])) {
            continue;
        }
        let fits = (0..=i).all(|j| {
            let (y, b) = if j == i { (x, a) } else { (f[j], core[j]) };
            if a == b && node.kind.is_wildcard() {
                return true;
            }
            [((x, y), (a, b)), ((y, x), (b, a))].iter().all(|&(pe, ge)| match (p.has_edge(pe.0, pe.1), gg.edges.contains_key(&ge)) {
                (false, false) => true,
                (true, true) => edge_ok(p, g, gg, pe, ge),
                _ => false,
            })
        });
        if !fits {
            continue;
        }
        f.push(x);
        used[x] = true;
        if core_go(p, g, gg, core, f, used) {
            return true;
        }
        used[x] = false;
        f.pop();
    }
    false
}

struct Search<'a> {
    p: &'a Pattern,
    g: &'a Graph,
    gg: &'a GeneralizedGraph,
    f: Vec<Option<usize>>,
    used: Vec<bool>,
    drops_left: usize,
}

impl Search<'_> {
    fn has_edge(&self, x: usize, a: usize, b: usize) -> bool {
        if a == b && self.p.wildcard(x) == Some(WildcardKind::Sub1Plus) {
            // an untyped `+` read as a subgraph loses its self-loop
            return false;
        }
        self.gg.edges.contains_key(&(a, b))
    }

    fn edge_ok(&self, x: usize, y: usize, a: usize, b: usize) -> bool {
        edge_ok(self.p, self.g, self.gg, (x, y), (a, b))
    }

    /// Edges between `x` and every assigned node agree.
    fn consistent(&self, x: usize) -> bool {
        let a = self.f[x].unwrap();
        for y in 0..=x {
            let Some(b) = self.f[y] else { continue };
            for (s, t, gs, gt) in [(x, y, a, b), (y, x, b, a)] {
                let pe = self.p.has_edge(s, t);
                let ge = self.has_edge(s, gs, gt);
                if pe != ge || (pe && !self.edge_ok(s, t, gs, gt)) {
                    return false;
                }
            }
        }
        true
    }

    fn final_ok(&self) -> bool {
        let (p, g, gg) = (self.p, self.g, self.gg);
        for w in p.wildcards() {
            if p.wildcard(w) != Some(WildcardKind::Sub0Plus) {
                continue;
            }
            let Some(a) = self.f[w] else { continue };
            if gg.nodes[a].members.is_empty() {
                continue;
            }
            let real_in = gg.edges.iter().any(|(&(s, t), ps)| t == a && s != a && ps.iter().any(|&pc| gg.is_real((s, t), pc)));
            let real_out = gg.edges.iter().any(|(&(s, t), ps)| s == a && t != a && ps.iter().any(|&pc| gg.is_real((s, t), pc)));
            if (!p.pred(w).is_empty() && !real_in) || (!p.succ(w).is_empty() && !real_out) {
                return false;
            }
        }
        p.pairs().iter().all(|pc| {
            let u = gg.nodes[self.f[pc.u].unwrap()].members[0];
            let v = gg.nodes[self.f[pc.v].unwrap()].members[0];
            pc.constraint.eval(g.node_attrs(u), g.node_attrs(v))
        })
    }

    fn run(&mut self, x: usize) -> bool {
        if x == self.p.node_count() {
            return self.drops_left == 0 && self.final_ok();
        }
        let pk = self.p.kind(x);
        for a in 0..self.gg.node_count() {
            if self.used[a] || !compatible(pk, self.gg.nodes[a].kind) {
                continue;
            }
            if pk == NodeKind::Concrete {
                let v = self.gg.nodes[a].members[0];
                if !self.p.node_constraint(x).eval(self.g.node_attrs(v)) {
                    continue;
                }
            }
            self.f[x] = Some(a);
            self.used[a] = true;
            if self.consistent(x) && self.run(x + 1) {
                return true;
            }
            self.used[a] = false;
            self.f[x] = None;
        }
        if self.drops_left > 0 && droppable(self.p, x) {
            self.drops_left -= 1;
            if self.run(x + 1) {
                return true;
            }
            self.drops_left += 1;
        }
        false
    }
}

/// Pattern node -> generalized node, if the generalized graph matches `p`.
pub fn find_bijection(p: &Pattern, g: &Graph, gg: &GeneralizedGraph) -> Option<Vec<Option<usize>>> {
    let n = gg.node_count();
    if n > p.node_count() {
        return None;
    }
    let drops = p.node_count() - n;
    if drops > (0..p.node_count()).filter(|&x| droppable(p, x)).count() {
        return None;
    }
    let mut s = Search { p, g, gg, f: vec![None; p.node_count()], used: vec![false; n], drops_left: drops };
    s.run(0).then_some(s.f)
}

pub fn is_isomorphic_to_pattern(p: &Pattern, g: &Graph, gg: &GeneralizedGraph) -> bool {
    find_bijection(p, g, gg).is_some()
}
