//! CNF formulas, DIMACS interchange, at-most-one lowering and solvers.

mod cdcl;
mod dimacs;
mod external;

use std::time::Duration;

pub use cdcl::{solve, Solver};
pub use dimacs::{from_dimacs, to_dimacs};
pub use external::solve_external;

use crate::error::{Error, Result};

/// A formula in conjunctive normal form with DIMACS-style signed literals.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CnfFormula {
    pub num_vars: u32,
    pub clauses: Vec<Vec<i32>>,
}

impl CnfFormula {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn fresh_var(&mut self) -> i32 {
        self.num_vars += 1;
        self.num_vars as i32
    }

    pub fn add_clause(&mut self, clause: Vec<i32>) {
        debug_assert!(!clause.is_empty());
        debug_assert!(clause.iter().all(|&l| l != 0 && l.unsigned_abs() <= self.num_vars));
        self.clauses.push(clause);
    }

    pub fn validate(&self) -> Result<()> {
        for c in &self.clauses {
            if c.is_empty() {
                return Err(Error::Dimacs("empty clause".into()));
            }
            for &l in c {
                if l == 0 || l.unsigned_abs() > self.num_vars {
                    return Err(Error::LiteralRange { lit: l as i64, num_vars: self.num_vars });
                }
            }
        }
        Ok(())
    }

    pub fn tautologies(&self) -> usize {
        self.clauses.iter().filter(|c| c.iter().any(|&l| c.contains(&-l))).count()
    }

    /// Index of the first clause falsified by `model`, if any.
    pub fn first_violated(&self, model: &Model) -> Option<usize> {
        self.clauses.iter().position(|c| !c.iter().any(|&l| model.lit(l)))
    }

    pub fn satisfied_by(&self, model: &Model) -> bool {
        self.first_violated(model).is_none()
    }
}

/// A total assignment; `values[v - 1]` is the value of variable `v`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Model {
    values: Vec<bool>,
}

impl Model {
    pub fn new(values: Vec<bool>) -> Self {
        Model { values }
    }

    pub fn num_vars(&self) -> usize {
        self.values.len()
    }

    pub fn var(&self, v: u32) -> bool {
        self.values[v as usize - 1]
    }

    pub fn lit(&self, l: i32) -> bool {
        let v = self.var(l.unsigned_abs());
        if l > 0 {
            v
        } else {
            !v
        }
    }

    pub fn values(&self) -> &[bool] {
        &self.values
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolveOutcome {
    Sat(Model),
    Unsat,
    Unknown(String),
}

impl SolveOutcome {
    pub fn is_sat(&self) -> bool {
        matches!(self, SolveOutcome::Sat(_))
    }

    pub fn is_unsat(&self) -> bool {
        matches!(self, SolveOutcome::Unsat)
    }

    pub fn label(&self) -> &'static str {
        match self {
            SolveOutcome::Sat(_) => "SAT",
            SolveOutcome::Unsat => "UNSAT",
            SolveOutcome::Unknown(_) => "UNKNOWN",
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Budget {
    pub conflicts: Option<u64>,
    pub time: Option<Duration>,
}

impl Budget {
    pub fn unlimited() -> Self {
        Budget::default()
    }

    pub fn time(d: Duration) -> Self {
        Budget { conflicts: None, time: Some(d) }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AmoStrategy {
    Pairwise,
    Sequential,
}

/// Above this many literals at-most-one switches from pairwise to sequential.
pub const PAIRWISE_LIMIT: usize = 8;

impl AmoStrategy {
    pub fn for_len(n: usize) -> AmoStrategy {
        if n <= PAIRWISE_LIMIT {
            AmoStrategy::Pairwise
        } else {
            AmoStrategy::Sequential
        }
    }
}

/// Clauses enforcing that at most one of `lits` is true.
///
/// Sequential uses the Sinz ladder: `3n - 4` clauses over `n - 1` fresh
/// variables drawn from `fresh`.
pub fn amo(lits: &[i32], strategy: AmoStrategy, fresh: &mut dyn FnMut() -> i32) -> Vec<Vec<i32>> {
    let n = lits.len();
    let mut out = Vec::new();
    if n < 2 {
        return out;
    }
    match strategy {
        AmoStrategy::Pairwise => {
            for i in 0..n {
                for j in i + 1..n {
                    out.push(vec![-lits[i], -lits[j]]);
                }
            }
        }
        AmoStrategy::Sequential => {
            let s: Vec<i32> = (0..n - 1).map(|_| fresh()).collect();
            out.push(vec![-lits[0], s[0]]);
            for i in 1..n - 1 {
                out.push(vec![-lits[i], s[i]]);
                out.push(vec![-s[i - 1], s[i]]);
                out.push(vec![-lits[i], -s[i - 1]]);
            }
            out.push(vec![-lits[n - 1], -s[n - 2]]);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn amo_counts() {
        let lits: Vec<i32> = (1..=5).collect();
        let mut next = 5;
        let mut fresh = || {
            next += 1;
            next
        };
        assert_eq!(amo(&lits, AmoStrategy::Pairwise, &mut fresh).len(), 10);
        assert_eq!(amo(&lits, AmoStrategy::Sequential, &mut fresh).len(), 11);
        assert!(amo(&[1], AmoStrategy::Sequential, &mut fresh).is_empty());
        assert_eq!(next, 9);
    }
}
