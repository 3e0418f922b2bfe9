#![allow(dead_code)]

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use regap::constraints::{Attrs, Constraint};
use regap::graph::{load_graph, load_pattern, Graph, NodeKind, Pattern, WildcardKind};
use regap::matcher::{match_pattern, MatchOptions, MatchResult};
use regap::oracle::{oracle_match, outcome_assignment, replay, Limits, OracleOutcome};
use regap::sat::{amo, AmoStrategy, CnfFormula, Model};
use regap::witness::check_assignment;

pub fn data(name: &str) -> Vec<u8> {
    std::fs::read(format!("{}/tests/data/{name}.json", env!("CARGO_MANIFEST_DIR"))).unwrap()
}

pub fn graph(name: &str) -> Graph {
    load_graph(&data(name)).unwrap()
}

pub fn pattern(name: &str) -> Pattern {
    load_pattern(&data(name)).unwrap()
}

pub fn sat(p: &Pattern, g: &Graph, merge: bool) -> MatchResult {
    let mut o = MatchOptions::default();
    o.encode.merge = merge;
    match_pattern(p, g, &o).unwrap()
}

/// Oracle run whose match certificate (if any) has been replayed and checked.
pub fn certified_oracle(p: &Pattern, g: &Graph) -> Result<OracleOutcome, String> {
    let o = oracle_match(p, g, Limits::default()).map_err(|e| e.to_string())?;
    if let (Some(gg), Some(f)) = (&o.generalized, &o.bijection) {
        let mut back = replay(g, &o.steps).ok_or("rule sequence does not replay")?;
        back.last_rule = gg.last_rule;
        if &back != gg {
            return Err("replayed graph differs".into());
        }
        check_assignment(p, g, &outcome_assignment(p, g, gg, f))?;
    }
    Ok(o)
}

/// Chain `n0 -> n1 -> ... -> n{len-1}` without attributes.
pub fn chain(len: usize) -> Graph {
    let mut b = Graph::builder();
    for i in 0..len {
        b.add_node(format!("n{i}"), Attrs::new());
    }
    for i in 1..len {
        b.add_edge(format!("n{}", i - 1), format!("n{i}"), Attrs::new());
    }
    b.build().unwrap()
}

pub fn random_3cnf(rng: &mut ChaCha8Rng, max_vars: u32) -> CnfFormula {
    let n = rng.gen_range(3..=max_vars);
    // around the 4.26 threshold so both answers show up
    let m = (n as f64 * rng.gen_range(3.5..5.0)) as usize;
    let mut f = CnfFormula::new();
    for _ in 0..n {
        f.fresh_var();
    }
    for _ in 0..m {
        let c = (0..3)
            .map(|_| {
                let v = rng.gen_range(1..=n) as i32;
                if rng.gen() { v } else { -v }
            })
            .collect();
        f.add_clause(c);
    }
    f
}

/// Plain DPLL with unit propagation, for cross-checking.
pub fn dpll(f: &CnfFormula) -> Option<Vec<bool>> {
    fn go(clauses: &[Vec<i32>], assign: &mut Vec<Option<bool>>) -> bool {
        let val = |a: &Vec<Option<bool>>, l: i32| a[l.unsigned_abs() as usize].map(|b| b == (l > 0));
        loop {
            let mut unit = None;
            for c in clauses {
                if c.iter().any(|&l| val(assign, l) == Some(true)) {
                    continue;
                }
                let open: Vec<i32> = c.iter().copied().filter(|&l| val(assign, l).is_none()).collect();
                match open.len() {
                    0 => return false,
                    1 => {
                        unit = Some(open[0]);
                        break;
                    }
                    _ => {}
                }
            }
            match unit {
                Some(l) => assign[l.unsigned_abs() as usize] = Some(l > 0),
                None => break,
            }
        }
        let Some(v) = (1..assign.len()).find(|&v| assign[v].is_none()) else { return true };
        for b in [true, false] {
            let mut next = assign.clone();
            next[v] = Some(b);
            if go(clauses, &mut next) {
                *assign = next;
                return true;
            }
        }
        false
    }
    let mut assign = vec![None; f.num_vars as usize + 1];
    go(&f.clauses, &mut assign).then(|| assign[1..].iter().map(|b| b.unwrap_or(false)).collect())
}

/// Brute-force isomorphism between a wildcard-free, constraint-free pattern
/// and a graph.
pub fn isomorphic(p: &Pattern, g: &Graph) -> bool {
    let n = g.node_count();
    if p.node_count() != n || p.edge_count() != g.edge_count() {
        return false;
    }
    fn perms(k: usize, used: &mut Vec<bool>, f: &mut Vec<usize>, ok: &mut dyn FnMut(&[usize]) -> bool) -> bool {
        if k == used.len() {
            return ok(f);
        }
        for v in 0..used.len() {
            if !used[v] {
                used[v] = true;
                f.push(v);
                let hit = perms(k + 1, used, f, ok);
                f.pop();
                used[v] = false;
                if hit {
                    return true;
                }
            }
        }
        false
    }
    perms(0, &mut vec![false; n], &mut Vec::new(), &mut |f| p.edges().iter().all(|&(a, b)| g.has_edge(f[a], f[b])))
}

/// Pattern from `(id, kind)` nodes (`None` is concrete, no constraint) and
/// unconstrained edges.
pub fn pat(nodes: &[(&str, Option<WildcardKind>)], edges: &[(&str, &str)]) -> Pattern {
    let mut b = Pattern::builder();
    for &(id, k) in nodes {
        b.add_node(id, k.map_or(NodeKind::Concrete, NodeKind::Wildcard), None);
    }
    for &(s, d) in edges {
        b.add_edge(s, d, Constraint::True);
    }
    b.build().unwrap()
}

pub struct VarCase {
    pub name: &'static str,
    pub pattern: Pattern,
    pub graph: Graph,
    pub k: Option<usize>,
    /// |o| + |m| + |c|, counted by hand: X expanded nodes, X*n mapping
    /// variables, C expanded edges
    pub vars: u32,
}

pub fn var_cases() -> Vec<VarCase> {
    use WildcardKind::*;
    let c = None;
    let (sp, ss, gp, gs) = (Some(Seq1Plus), Some(Seq0Plus), Some(Sub1Plus), Some(Sub0Plus));
    let case = |name, pattern, graph, k, vars| VarCase { name, pattern, graph, k, vars };
    vec![
        // X=1 C=0: 1 + 3
        case("single", pat(&[("A", c)], &[]), chain(3), None, 4),
        // X=2 C=1: 2 + 6 + 1
        case("edge", pat(&[("A", c), ("B", c)], &[("A", "B")]), chain(3), None, 9),
        // X=3 C=2: 3 + 12 + 2
        case("path", pat(&[("A", c), ("B", c), ("C", c)], &[("A", "B"), ("B", "C")]), chain(4), None, 17),
        // X=2 C=2: 2 + 4 + 2
        case("two-cycle", pat(&[("A", c), ("B", c)], &[("A", "B"), ("B", "A")]), chain(2), None, 8),
        // X=3 C=3: 3 + 9 + 3
        case("triangle", pat(&[("A", c), ("B", c), ("C", c)], &[("A", "B"), ("B", "C"), ("C", "A")]), chain(3), None, 15),
        // X=2+3 C= A->s1 1, s->B 3, mid 2, skip 1 = 7: 5 + 15 + 7
        case("seq-star", pat(&[("A", c), ("S", ss), ("B", c)], &[("A", "S"), ("S", "B")]), chain(3), None, 27),
        // head h: X=3+3 C= A->h 1, h->t 1, t->B 3, mid 2, skip h->B 1 = 8: 6 + 18 + 8
        case("seq-plus", pat(&[("A", c), ("S", sp), ("B", c)], &[("A", "S"), ("S", "B")]), chain(3), None, 32),
        // X=2+3 C= A->G 3, G->B 3, mid 2, skip 1 = 9: 5 + 15 + 9
        case("sub-star", pat(&[("A", c), ("G", gs), ("B", c)], &[("A", "G"), ("G", "B")]), chain(3), None, 29),
        // X=5 C= 3 + 3 + 2 = 8: 5 + 15 + 8
        case("sub-plus", pat(&[("A", c), ("G", gp), ("B", c)], &[("A", "G"), ("G", "B")]), chain(3), None, 28),
        // X=1+2 C= A->s1 1, mid 1, no skip = 2: 3 + 6 + 2
        case("seq-star-sink", pat(&[("A", c), ("S", ss)], &[("A", "S")]), chain(2), None, 11),
        // X=4 C= mid 3: 4 + 16 + 3
        case("lone-sub-star", pat(&[("G", gs)], &[]), chain(4), None, 23),
        // X=4 C= mid 3: 4 + 16 + 3
        case("lone-seq-star", pat(&[("S", ss)], &[]), chain(4), None, 23),
        // X=1+1 C= A->G 1, no graph edges: 2 + 2 + 1
        case("one-node-sub", pat(&[("A", c), ("G", gp)], &[("A", "G")]), chain(1), None, 5),
        // X=3+3+3 C= A->s1 1, s->B 3, B->G 3, G->C 3, mid 2+2, skip A->B 1 = 15: 9 + 27 + 15
        case(
            "seq-then-sub",
            pat(&[("A", c), ("S", ss), ("B", c), ("G", gp), ("C", c)], &[("A", "S"), ("S", "B"), ("B", "G"), ("G", "C")]),
            chain(3),
            None,
            51,
        ),
        // n=7, 7 edges. X= A,h,B,C + 7 + 7 = 18
        // C= A->h 1, h->t 1, t->B 7, B->C 1, C->B 1, B->G 7, mid 6 + 7, skip 1 = 32: 18 + 126 + 32
        case("mixed", pattern("mixed_pattern"), graph("mixed_graph"), None, 176),
        // n=4, 3 edges. X=3+4 C= A->h 1, h->t 1, t->B 4, mid 3, skip 1 = 10: 7 + 28 + 10
        case("signs", pattern("signs_pattern"), graph("signs_graph"), None, 45),
        case("signs-branch", pattern("signs_pattern"), graph("signs_branch_graph"), None, 45),
        // n=2, 1 edge. X=3+2 C= A->G 2, B->G 2, G->C 2, mid 1, skip A->C, B->C = 9: 5 + 10 + 9
        case(
            "sub-star-fan-in",
            pat(&[("A", c), ("B", c), ("G", gs), ("C", c)], &[("A", "G"), ("B", "G"), ("G", "C")]),
            chain(2),
            None,
            24,
        ),
        // k=2. X=4+2 C= A->s1 1, B->s1 1, s->C 2, s->D 2, mid 1, skip 4 = 11: 6 + 12 + 11
        case(
            "seq-star-fan",
            pat(&[("A", c), ("B", c), ("S", ss), ("C", c), ("D", c)], &[("A", "S"), ("B", "S"), ("S", "C"), ("S", "D")]),
            chain(2),
            None,
            29,
        ),
        // k=2 on n=4. X=2+2 C= A->s1 1, s->B 2, mid 1, skip 1 = 5: 4 + 16 + 5
        case("seq-star-short-k", pat(&[("A", c), ("S", ss), ("B", c)], &[("A", "S"), ("S", "B")]), chain(4), Some(2), 25),
    ]
}

/// Satisfying assignments of the AMO clauses over `n` literals, projected
/// onto the literals.
pub fn amo_models(n: usize, strategy: AmoStrategy) -> Vec<Vec<bool>> {
    let mut f = CnfFormula::new();
    let lits: Vec<i32> = (0..n).map(|_| f.fresh_var()).collect();
    let mut aux = f.clone();
    for c in amo(&lits, strategy, &mut || aux.fresh_var()) {
        f.num_vars = aux.num_vars;
        f.add_clause(c);
    }
    f.num_vars = aux.num_vars;
    let total = f.num_vars as usize;
    let mut out: Vec<Vec<bool>> = Vec::new();
    for bits in 0u32..1 << total {
        let m = Model::new((0..total).map(|i| bits >> i & 1 == 1).collect());
        if f.satisfied_by(&m) {
            let proj: Vec<bool> = m.values()[..n].to_vec();
            if !out.contains(&proj) {
                out.push(proj);
            }
        }
    }
    out
}
