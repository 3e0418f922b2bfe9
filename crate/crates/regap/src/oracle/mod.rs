//! Brute-force reference matcher: breadth-first search over generalization
//! rule sequences, with a final bijection check. Small inputs only.
//!
//! Rules 1, 2 and 7 to 14 are tried one step at a time. Rules 3 to 6 are
//! taken as one move (see `phase`), expanded back into single steps so that
//! every reported sequence can be replayed rule by rule.

mod iso;
mod phase;
mod rules;
mod semantic;

use std::collections::{BTreeMap, HashSet, VecDeque};

pub use iso::{find_bijection, is_isomorphic_to_pattern};
pub use rules::{apply_rules, CanonicalKey, GKind, GNode, GeneralizedGraph, Origin, Piece, Step};
pub use semantic::enumerate_match;

use crate::error::{Error, Result};
use crate::graph::{Graph, Pattern, WildcardKind};
use crate::witness::{path_order, Assignment};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    pub max_nodes: usize,
    /// generalized graphs visited before giving up
    pub max_states: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { max_nodes: 8, max_states: 2_000_000 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleVerdict {
    Match,
    NoMatch,
    Unknown,
}

#[derive(Debug, Clone)]
pub struct OracleOutcome {
    pub verdict: OracleVerdict,
    pub steps: Vec<Step>,
    pub generalized: Option<GeneralizedGraph>,
    /// pattern node -> node of `generalized`
    pub bijection: Option<Vec<Option<usize>>>,
    pub states: usize,
}

impl OracleOutcome {
    pub fn as_bool(&self) -> Option<bool> {
        match self.verdict {
            OracleVerdict::Match => Some(true),
            OracleVerdict::NoMatch => Some(false),
            OracleVerdict::Unknown => None,
        }
    }
}

struct Pruner<'a> {
    p: &'a Pattern,
    g: &'a Graph,
    concretes: Vec<usize>,
    /// pattern edges touching a 0+ wildcard; bounds useful appended nodes
    star_edges: usize,
    cap: usize,
}

impl Pruner<'_> {
    fn concrete_nodes(gg: &GeneralizedGraph) -> Vec<usize> {
        (0..gg.node_count()).filter(|&a| gg.nodes[a].kind == GKind::Concrete).collect()
    }

    /// Can the concrete part of `gg` still line up with the pattern's?
    fn concretes_fit(&self, gg: &GeneralizedGraph, with_edges: bool) -> bool {
        let cs = Self::concrete_nodes(gg);
        if cs.len() != self.concretes.len() {
            return false;
        }
        let mut f = vec![usize::MAX; self.concretes.len()];
        let mut used = vec![false; cs.len()];
        self.assign(gg, &cs, &mut f, &mut used, 0, with_edges)
    }

    fn assign(&self, gg: &GeneralizedGraph, cs: &[usize], f: &mut [usize], used: &mut [bool], i: usize, with_edges: bool) -> bool {
        let (p, g) = (self.p, self.g);
        if i == f.len() {
            return true;
        }
        let x = self.concretes[i];
        for j in 0..cs.len() {
            if used[j] {
                continue;
            }
            let a = cs[j];
            let v = gg.nodes[a].members[0];
            if !p.node_constraint(x).eval(g.node_attrs(v)) {
                continue;
            }
            let ok = (0..=i).all(|k| {
                let (y, b) = (self.concretes[k], if k == i { a } else { cs[f[k]] });
                let w = gg.nodes[b].members[0];
                let pairs_ok = p.pairs().iter().all(|pc| {
                    if (pc.u, pc.v) == (x, y) {
                        pc.constraint.eval(g.node_attrs(v), g.node_attrs(w))
                    } else if (pc.u, pc.v) == (y, x) {
                        pc.constraint.eval(g.node_attrs(w), g.node_attrs(v))
                    } else {
                        true
                    }
                });
                let edges_ok = !with_edges
                    || [(x, y, a, b), (y, x, b, a)].iter().all(|&(s, t, gs, gt)| match (p.edge_id(s, t), gg.edges.get(&(gs, gt))) {
                        (None, None) => true,
                        (Some(pe), Some(ps)) => {
                            let c = p.edge_constraint(pe);
                            ps.iter().all(|&(u, v)| c.eval(g.edge_attrs(g.edge_id(u, v).unwrap())))
                        }
                        _ => false,
                    });
                pairs_ok && edges_ok
            });
            if !ok {
                continue;
            }
            f[i] = j;
            used[j] = true;
            if self.assign(gg, cs, f, used, i + 1, with_edges) {
                return true;
            }
            used[j] = false;
        }
        false
    }

    fn viable(&self, gg: &GeneralizedGraph) -> bool {
        if gg.node_count() > self.cap {
            return false;
        }
        if gg.last_rule <= 2 {
            return Self::concrete_nodes(gg).len() >= self.concretes.len();
        }
        // past the merge phase: only appended nodes are still to come
        self.concretes_fit(gg, true)
            && gg.nodes.iter().filter(|n| n.origin == Origin::Appended).count() <= self.star_edges
            && iso::core_fits(self.p, self.g, gg)
    }
}

/// Searches for a rule sequence turning `g` into a graph that matches `p`.
pub fn oracle_match(p: &Pattern, g: &Graph, limits: Limits) -> Result<OracleOutcome> {
    if limits.max_nodes == 0 || limits.max_states == 0 {
        return Err(Error::Limits("limits must be positive".into()));
    }
    if g.node_count() > limits.max_nodes {
        return Err(Error::Limits(format!("graph has {} nodes, limit is {}", g.node_count(), limits.max_nodes)));
    }
    let mut star_kinds = Vec::new();
    for (wk, gk) in [(WildcardKind::Seq0Plus, GKind::SeqStar), (WildcardKind::Sub0Plus, GKind::SubStar)] {
        if p.wildcards().any(|w| p.wildcard(w) == Some(wk)) {
            star_kinds.push(gk);
        }
    }
    let pruner = Pruner {
        p,
        g,
        concretes: p.concretes().collect(),
        star_edges: p
            .edges()
            .iter()
            .filter(|&&(a, b)| [a, b].iter().any(|&x| p.wildcard(x).is_some_and(|k| k.is_zero_plus())))
            .count(),
        cap: g.node_count() + p.node_count() + 2,
    };

    let start = GeneralizedGraph::from_graph(g);
    // parent links for tracing; graphs live only in the queue
    let mut arena: Vec<Option<(usize, Vec<Step>)>> = vec![None];
    let mut seen: HashSet<CanonicalKey> = HashSet::from([start.canonical_key()]);
    let mut queue = VecDeque::from([(start, 0usize)]);
    let min_nodes = p.node_count() - (0..p.node_count()).filter(|&x| is_isolated_star(p, x)).count();
    let unknown = |states| OracleOutcome { verdict: OracleVerdict::Unknown, steps: Vec::new(), generalized: None, bijection: None, states };

    while let Some((gg, i)) = queue.pop_front() {
        if (min_nodes..=p.node_count()).contains(&gg.node_count()) {
            if let Some(f) = find_bijection(p, g, &gg) {
                return Ok(OracleOutcome {
                    verdict: OracleVerdict::Match,
                    steps: trace(&arena, i),
                    generalized: Some(gg),
                    bijection: Some(f),
                    states: arena.len(),
                });
            }
        }
        let single = |rules| {
            gg.successors(rules, &star_kinds).into_iter().filter(|(_, next)| pruner.viable(next)).map(|(s, g)| (vec![s], g))
        };
        let succs: Vec<(Vec<Step>, GeneralizedGraph)> = if gg.last_rule <= 2 {
            let mut v: Vec<_> = single(1..=2).collect();
            if pruner.concretes_fit(&gg, false) {
                v.extend(phase::core_phase(p, g, &gg, &star_kinds).into_iter().filter(|(_, next)| pruner.viable(next)));
            }
            v
        } else {
            single(7..=14).collect()
        };
        for (steps, next) in succs {
            if !seen.insert(next.canonical_key()) {
                continue;
            }
            if arena.len() >= limits.max_states {
                return Ok(unknown(arena.len()));
            }
            arena.push(Some((i, steps)));
            queue.push_back((next, arena.len() - 1));
        }
    }
    Ok(OracleOutcome { verdict: OracleVerdict::NoMatch, steps: Vec::new(), generalized: None, bijection: None, states: arena.len() })
}

fn is_isolated_star(p: &Pattern, x: usize) -> bool {
    p.wildcard(x).is_some_and(|k| k.is_zero_plus()) && p.succ(x).is_empty() && p.pred(x).is_empty()
}

fn trace(arena: &[Option<(usize, Vec<Step>)>], mut i: usize) -> Vec<Step> {
    let mut runs = Vec::new();
    while let Some((parent, steps)) = &arena[i] {
        runs.push(steps.clone());
        i = *parent;
    }
    runs.into_iter().rev().flatten().collect()
}

fn realise(gg: &GeneralizedGraph, blocks: &[Vec<usize>]) -> Option<(Vec<Step>, GeneralizedGraph)> {
    let kind = |a: usize| gg.nodes[a].kind;
    let mut plan: Vec<(u8, usize, usize)> = Vec::new();
    let mut contracted = Vec::new();
    for b in blocks.iter().filter(|b| b.len() >= 2) {
        if b.iter().all(|&x| kind(x) == GKind::SeqStar) {
            plan.extend(b[1..].iter().map(|&x| (4, b[0], x)));
            contracted.push((b.clone(), GKind::SeqStar, false));
        } else if b.iter().all(|&x| kind(x).is_star()) {
            let anchor = *b.iter().find(|&&x| kind(x) == GKind::SubStar)?;
            plan.extend(b.iter().filter(|&&x| x != anchor).map(|&x| (5, x, anchor)));
            contracted.push((b.clone(), GKind::SubStar, false));
        } else {
            let anchor = *b.iter().find(|&&x| kind(x).is_plus())?;
            plan.extend(b.iter().filter(|&&x| x != anchor).map(|&x| (6, anchor, x)));
            contracted.push((b.clone(), GKind::SubPlus, true));
        }
    }
    plan.sort_by_key(|&(r, _, _)| r);
    // node indices shift as merges remove nodes
    let mut pos: Vec<usize> = (0..gg.node_count()).collect();
    let mut steps = Vec::with_capacity(plan.len());
    for (rule, a, b) in plan {
        steps.push(Step { rule, a: pos[a], b: Some(pos[b]), kind: None });
        let (keep, gone) = (pos[a].min(pos[b]), pos[a].max(pos[b]));
        for p in pos.iter_mut() {
            if *p == gone {
                *p = keep;
            } else if *p > gone {
                *p -= 1;
            }
        }
    }
    let mut out = gg.contract(&contracted);
    out.last_rule = 6;
    Some((steps, out))
}

/// Re-applies `steps` to `g`, failing if any step's side conditions do not
/// hold at that point.
pub fn replay(g: &Graph, steps: &[Step]) -> Option<GeneralizedGraph> {
    let mut gg = GeneralizedGraph::from_graph(g);
    for s in steps {
        gg = gg.apply(s)?;
    }
    Some(gg)
}

/// Reads the graph-node assignment off a successful outcome.
pub fn outcome_assignment(p: &Pattern, g: &Graph, gg: &GeneralizedGraph, f: &[Option<usize>]) -> Assignment {
    let mut owner = vec![usize::MAX; g.node_count()];
    for (x, a) in f.iter().enumerate() {
        if let Some(a) = a {
            for &v in &gg.nodes[*a].members {
                owner[v] = x;
            }
        }
    }
    let mut seq = BTreeMap::new();
    for w in p.wildcards() {
        if p.wildcard(w).unwrap().is_seq() {
            let set: Vec<usize> = (0..g.node_count()).filter(|&v| owner[v] == w).collect();
            let order = path_order(g, &set, |u| owner[u] == w).unwrap_or(set);
            seq.insert(w, order);
        }
    }
    Assignment { f: owner, seq }
}

/// Human-readable rule sequence.
pub fn describe_steps(steps: &[Step]) -> Vec<String> {
    steps
        .iter()
        .map(|s| {
            let mut t = format!("rule {} on {}", s.rule, s.a);
            if let Some(b) = s.b {
                t.push_str(&format!(",{b}"));
            }
            if let Some(k) = s.kind {
                t.push_str(&format!(" ({})", k.symbol()));
            }
            t
        })
        .collect()
}
