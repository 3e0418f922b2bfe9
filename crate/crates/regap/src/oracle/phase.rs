//! Rules 3 to 6 as a single move. Every successful rule sequence ends this
//! phase with a graph whose nodes are the images of distinct pattern nodes,
//! so instead of trying subdivisions and merges blindly we guess that
//! labelling: each node gets the pattern node it will stand for, each edge
//! is kept or subdivided by a star labelled with a 0+ pattern wildcard, and
//! nodes sharing a label are merged. Labels only steer the search; the
//! result is rebuilt from elementary steps and checked like any other state.

use std::collections::HashSet;

use crate::constraints::Constraint;
use crate::graph::{Graph, NodeKind, Pattern, WildcardKind};

use super::rules::{CanonicalKey, GKind, GeneralizedGraph, Piece, Step};

struct Labeller<'a> {
    p: &'a Pattern,
    g: &'a Graph,
    gg: &'a GeneralizedGraph,
    label: Vec<usize>,
    used: Vec<bool>,
    edges: Vec<((usize, usize), Vec<Piece>)>,
    star_kinds: &'a [GKind],
    seen: HashSet<CanonicalKey>,
    out: Vec<(Vec<Step>, GeneralizedGraph)>,
}

fn star_for(k: WildcardKind) -> Option<GKind> {
    match k {
        WildcardKind::Seq0Plus => Some(GKind::SeqStar),
        WildcardKind::Sub0Plus => Some(GKind::SubStar),
        _ => None,
    }
}

impl Labeller<'_> {
    fn holds(&self, c: &Constraint, pieces: &[Piece]) -> bool {
        pieces.iter().all(|&(u, v)| c.eval(self.g.edge_attrs(self.g.edge_id(u, v).unwrap())))
    }

    fn direct_ok(&self, (x, y): (usize, usize), pieces: &[Piece]) -> bool {
        if x == y && self.p.is_wildcard(x) {
            // a wildcard self-loop is either dropped later or fails the final check
            return true;
        }
        self.p.edge_id(x, y).is_some_and(|pe| self.holds(self.p.edge_constraint(pe), pieces))
    }

    /// 0+ wildcards that may subdivide an edge between `x` and `y`.
    fn vias(&self, (x, y): (usize, usize), pieces: &[Piece]) -> Vec<usize> {
        self.p
            .wildcards()
            .filter(|&w| w != x && w != y)
            .filter(|&w| self.p.wildcard(w).and_then(star_for).is_some_and(|k| self.star_kinds.contains(&k)))
            .filter(|&w| match (self.p.edge_id(x, w), self.p.edge_id(w, y)) {
                (Some(a), Some(b)) => self.holds(self.p.edge_constraint(a), pieces) && self.holds(self.p.edge_constraint(b), pieces),
                _ => false,
            })
            .collect()
    }

    fn may_label(&self, a: usize, x: usize) -> bool {
        let node = &self.gg.nodes[a];
        match (node.kind, self.p.kind(x)) {
            (GKind::Concrete, NodeKind::Concrete) => {
                let v = node.members[0];
                !self.used[x]
                    && self.p.node_constraint(x).eval(self.g.node_attrs(v))
                    && self.p.pairs().iter().all(|pc| {
                        let other = |y: usize| (0..a).find(|&b| self.label[b] == y).map(|b| self.gg.nodes[b].members[0]);
                        if pc.u == x {
                            other(pc.v).is_none_or(|w| pc.constraint.eval(self.g.node_attrs(v), self.g.node_attrs(w)))
                        } else if pc.v == x {
                            other(pc.u).is_none_or(|w| pc.constraint.eval(self.g.node_attrs(w), self.g.node_attrs(v)))
                        } else {
                            true
                        }
                    })
            }
            (GKind::Plus, NodeKind::Wildcard(_)) => true,
            (GKind::SeqPlus, NodeKind::Wildcard(k)) => k.is_seq(),
            (GKind::SubPlus, NodeKind::Wildcard(k)) => !k.is_seq(),
            _ => false,
        }
    }

    /// Every edge between labelled nodes still has some way to be read.
    fn edges_ok(&self, upto: usize) -> bool {
        self.edges.iter().all(|&((a, b), ref ps)| {
            if a > upto || b > upto {
                return true;
            }
            let xy = (self.label[a], self.label[b]);
            self.direct_ok(xy, ps) || !self.vias(xy, ps).is_empty()
        })
    }

    fn nodes(&mut self, a: usize) {
        if a == self.gg.node_count() {
            let options: Vec<Vec<Option<usize>>> = self
                .edges
                .iter()
                .map(|((a, b), ps)| {
                    let xy = (self.label[*a], self.label[*b]);
                    let mut o: Vec<Option<usize>> = self.vias(xy, ps).into_iter().map(Some).collect();
                    if self.direct_ok(xy, ps) {
                        o.insert(0, None);
                    }
                    o
                })
                .collect();
            let mut pick = Vec::with_capacity(options.len());
            self.edge_choices(&options, &mut pick);
            return;
        }
        for x in 0..self.p.node_count() {
            if !self.may_label(a, x) {
                continue;
            }
            self.label[a] = x;
            if !self.edges_ok(a) {
                continue;
            }
            let concrete = self.p.kind(x) == NodeKind::Concrete;
            self.used[x] |= concrete;
            self.nodes(a + 1);
            if concrete {
                self.used[x] = false;
            }
        }
    }

    fn edge_choices(&mut self, options: &[Vec<Option<usize>>], pick: &mut Vec<Option<usize>>) {
        if pick.len() == options.len() {
            self.emit(pick);
            return;
        }
        for &o in &options[pick.len()] {
            pick.push(o);
            self.edge_choices(options, pick);
            pick.pop();
        }
    }

    /// Builds the graph for one labelling from rule 3 insertions followed by
    /// the merges of rules 4 to 6.
    fn emit(&mut self, pick: &[Option<usize>]) {
        let mut steps = Vec::new();
        let mut cur = self.gg.clone();
        cur.last_rule = cur.last_rule.min(3);
        let mut node_label = self.label.clone();
        for (i, w) in pick.iter().enumerate() {
            let Some(w) = *w else { continue };
            let (a, b) = self.edges[i].0;
            let kind = self.p.wildcard(w).and_then(star_for);
            let step = Step { rule: 3, a, b: (a != b).then_some(b), kind };
            let Some(next) = cur.apply(&step) else { return };
            cur = next;
            steps.push(step);
            node_label.push(w);
        }
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        for x in self.p.wildcards() {
            let b: Vec<usize> = (0..cur.node_count()).filter(|&a| node_label[a] == x).collect();
            if b.len() >= 2 {
                blocks.push(b);
            }
        }
        let Some((merges, out)) = super::realise(&cur, &blocks) else { return };
        if self.seen.insert(out.canonical_key()) {
            steps.extend(merges);
            self.out.push((steps, out));
        }
    }
}

/// Graphs reachable from `gg` (rules 1 and 2 done) through rules 3 to 6
/// that can still line up with `p`, each with the steps producing it.
pub(super) fn core_phase(p: &Pattern, g: &Graph, gg: &GeneralizedGraph, star_kinds: &[GKind]) -> Vec<(Vec<Step>, GeneralizedGraph)> {
    let mut l = Labeller {
        p,
        g,
        gg,
        label: vec![usize::MAX; gg.node_count()],
        used: vec![false; p.node_count()],
        edges: gg.edges.iter().map(|(&e, ps)| (e, ps.iter().copied().collect())).collect(),
        star_kinds,
        seen: HashSet::new(),
        out: Vec::new(),
    };
    l.nodes(0);
    l.out
}
