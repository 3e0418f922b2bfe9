mod common;

use proptest::prelude::*;

use regap::gen::rng;
use regap::sat::{amo, from_dimacs, solve, to_dimacs, AmoStrategy, Budget, CnfFormula, SolveOutcome};

#[test]
fn amo_admits_exactly_zero_or_one_true() {
    for n in 0..=6 {
        for s in [AmoStrategy::Pairwise, AmoStrategy::Sequential] {
            let models = common::amo_models(n, s);
            assert_eq!(models.len(), n + 1, "n={n} {s:?}");
            assert!(models.iter().all(|m| m.iter().filter(|&&b| b).count() <= 1));
        }
    }
}

#[test]
fn sequential_amo_clause_count() {
    for n in 2..=12 {
        let mut next = n as i32;
        let lits: Vec<i32> = (1..=n as i32).collect();
        let clauses = amo(&lits, AmoStrategy::Sequential, &mut || {
            next += 1;
            next
        });
        assert_eq!(clauses.len(), 3 * n - 4);
        assert_eq!(next as usize, 2 * n - 1);
    }
}

#[test]
fn cdcl_agrees_with_dpll_on_random_3cnf() {
    let mut r = rng(11);
    let (mut sats, mut unsats) = (0, 0);
    for i in 0..50 {
        let f = common::random_3cnf(&mut r, 30);
        let reference = common::dpll(&f);
        match solve(&f, Budget::unlimited(), i) {
            SolveOutcome::Sat(m) => {
                assert!(f.satisfied_by(&m), "formula {i}: model fails a clause");
                assert!(reference.is_some(), "formula {i}");
                sats += 1;
            }
            SolveOutcome::Unsat => {
                assert!(reference.is_none(), "formula {i}");
                unsats += 1;
            }
            other => panic!("formula {i}: {}", other.label()),
        }
    }
    assert!(sats > 0 && unsats > 0, "{sats} sat, {unsats} unsat");
}

#[test]
fn trivial_formulas() {
    assert!(solve(&CnfFormula::new(), Budget::unlimited(), 0).is_sat());
    let mut f = CnfFormula::new();
    let x = f.fresh_var();
    f.add_clause(vec![x]);
    f.add_clause(vec![-x]);
    assert!(solve(&f, Budget::unlimited(), 0).is_unsat());
}

#[test]
fn pigeonhole_is_unsat() {
    // 5 pigeons, 4 holes
    let (p, h) = (5, 4);
    let mut f = CnfFormula::new();
    let var = |i: usize, j: usize| (i * h + j + 1) as i32;
    f.num_vars = (p * h) as u32;
    for i in 0..p {
        f.add_clause((0..h).map(|j| var(i, j)).collect());
    }
    for j in 0..h {
        for a in 0..p {
            for b in a + 1..p {
                f.add_clause(vec![-var(a, j), -var(b, j)]);
            }
        }
    }
    assert!(solve(&f, Budget::unlimited(), 3).is_unsat());
}

#[test]
fn dimacs_rejects_garbage() {
    assert!(from_dimacs("p cnf 2 1\n1 3 0\n").is_err());
    assert!(from_dimacs("p cnf x 1\n").is_err());
    assert!(from_dimacs("1 2 0\n").is_err());
}

#[test]
fn dimacs_reads_comments_and_multiline_clauses() {
    let f = from_dimacs("c hello\np cnf 3 2\n1 -2\n 3 0 -1 0\n").unwrap();
    assert_eq!(f.num_vars, 3);
    assert_eq!(f.clauses, vec![vec![1, -2, 3], vec![-1]]);
}

fn formula() -> impl Strategy<Value = CnfFormula> {
    (1u32..12).prop_flat_map(|n| {
        let lit = (1..=n as i32, any::<bool>()).prop_map(|(v, s)| if s { v } else { -v });
        prop::collection::vec(prop::collection::vec(lit, 1..5), 0..20)
            .prop_map(move |clauses| CnfFormula { num_vars: n, clauses })
    })
}

proptest! {
    #[test]
    fn dimacs_round_trip(f in formula()) {
        let text = to_dimacs(&f);
        prop_assert_eq!(from_dimacs(&text).unwrap(), f.clone());
        prop_assert_eq!(to_dimacs(&from_dimacs(&text).unwrap()), text);
    }

    #[test]
    fn solver_answers_match_dpll(f in formula(), seed in 0u64..4) {
        let reference = common::dpll(&f);
        match solve(&f, Budget::unlimited(), seed) {
            SolveOutcome::Sat(m) => {
                prop_assert!(f.satisfied_by(&m));
                prop_assert!(reference.is_some());
            }
            SolveOutcome::Unsat => prop_assert!(reference.is_none()),
            other => prop_assert!(false, "{}", other.label()),
        }
    }
}
