//! End-to-end matching: encode, solve, decode.

use std::path::PathBuf;
use std::time::{Duration, Instant};

use serde::Serialize;

use crate::encode::{decode_model, encode, unmerge, EncodeOptions, Encoding};
use crate::error::Result;
use crate::expand::choose_k;
use crate::graph::{Graph, Pattern};
use crate::preprocess::MergeReport;
use crate::sat::{self, Budget, SolveOutcome};
use crate::witness::{Assignment, MatchWitness};

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum SolverChoice {
    #[default]
    Builtin,
    External(PathBuf),
}

impl SolverChoice {
    /// `builtin` or `external:PATH`.
    pub fn parse(s: &str) -> Option<SolverChoice> {
        match s {
            "builtin" => Some(SolverChoice::Builtin),
            _ => s.strip_prefix("external:").filter(|p| !p.is_empty()).map(|p| SolverChoice::External(p.into())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatchOptions {
    pub encode: EncodeOptions,
    pub solver: SolverChoice,
    pub timeout: Option<Duration>,
    pub seed: u64,
    /// Grow `k` from 1 (doubling) until a match is found or `k = |V|`.
    pub deepen: bool,
}

impl Default for MatchOptions {
    fn default() -> Self {
        MatchOptions {
            encode: EncodeOptions::default(),
            solver: SolverChoice::Builtin,
            timeout: Some(Duration::from_secs(60)),
            seed: 0,
            deepen: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING-KEBAB-CASE")]
pub enum Verdict {
    Match,
    NoMatch,
    Unknown,
}

impl Verdict {
    pub fn label(self) -> &'static str {
        match self {
            Verdict::Match => "MATCH",
            Verdict::NoMatch => "NO-MATCH",
            Verdict::Unknown => "UNKNOWN",
        }
    }

    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::Match => 0,
            Verdict::NoMatch => 1,
            Verdict::Unknown => 2,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct MatchStats {
    pub k: usize,
    pub k_incomplete: bool,
    pub vars: u32,
    pub clauses: usize,
    pub expanded_nodes: usize,
    pub expanded_edges: usize,
    pub merge: MergeReport,
    pub encode_time: Duration,
    pub solve_time: Duration,
}

#[derive(Debug, Clone)]
pub struct MatchResult {
    pub verdict: Verdict,
    /// set for `Unknown`
    pub reason: Option<String>,
    /// `Unknown` because the time budget ran out
    pub timed_out: bool,
    /// witness on the original (unmerged) graph
    pub assignment: Option<Assignment>,
    pub witness: Option<MatchWitness>,
    pub stats: MatchStats,
}

fn run_solver(enc: &Encoding, opts: &MatchOptions, remaining: Option<Duration>) -> Result<SolveOutcome> {
    match &opts.solver {
        SolverChoice::Builtin => Ok(sat::solve(&enc.formula, Budget { conflicts: None, time: remaining }, opts.seed)),
        SolverChoice::External(path) => sat::solve_external(&enc.formula, path, remaining),
    }
}

/// Decides whether `p` matches `g`.
pub fn match_pattern(p: &Pattern, g: &Graph, opts: &MatchOptions) -> Result<MatchResult> {
    let started = Instant::now();
    let schedule: Vec<Option<usize>> = if opts.deepen && opts.encode.k.is_none() {
        let full = g.node_count().max(1);
        let mut ks = Vec::new();
        let mut k = 1;
        while k < full {
            ks.push(Some(k));
            k *= 2;
        }
        ks.push(None);
        ks
    } else {
        vec![opts.encode.k]
    };

    let mut last = None;
    // times add up over the deepening rounds
    let (mut encode_total, mut solve_total) = (Duration::ZERO, Duration::ZERO);
    for k in schedule {
        let t0 = Instant::now();
        let enc = encode(p, g, EncodeOptions { k, ..opts.encode })?;
        let (_, incomplete) = choose_k(&enc.graph, k)?;
        encode_total += t0.elapsed();
        let mut stats = MatchStats {
            k: enc.expanded.k,
            k_incomplete: incomplete,
            vars: enc.formula.num_vars,
            clauses: enc.formula.clauses.len(),
            expanded_nodes: enc.expanded.node_count(),
            expanded_edges: enc.expanded.edge_count(),
            merge: enc.merge.clone(),
            encode_time: encode_total,
            solve_time: solve_total,
        };
        let remaining = match opts.timeout {
            Some(t) => match t.checked_sub(started.elapsed()) {
                Some(r) if !r.is_zero() => Some(r),
                _ => {
                    return Ok(MatchResult {
                        verdict: Verdict::Unknown,
                        reason: Some("time limit".into()),
                        timed_out: true,
                        assignment: None,
                        witness: None,
                        stats,
                    })
                }
            },
            None => None,
        };
        let t1 = Instant::now();
        let outcome = run_solver(&enc, opts, remaining)?;
        solve_total += t1.elapsed();
        stats.solve_time = solve_total;
        let result = match outcome {
            SolveOutcome::Sat(model) => {
                let rp = decode_model(&model, &enc.vars, &enc.expanded, p, &enc.graph)?;
                let a = unmerge(&rp, &enc.graph, g, &enc.merge);
                let witness = MatchWitness::from_assignment(p, g, &a);
                return Ok(MatchResult {
                    verdict: Verdict::Match,
                    reason: None,
                    timed_out: false,
                    assignment: Some(a),
                    witness: Some(witness),
                    stats,
                });
            }
            SolveOutcome::Unsat if incomplete => MatchResult {
                verdict: Verdict::Unknown,
                reason: Some(format!("no match with k = {} below |V|", stats.k)),
                timed_out: false,
                assignment: None,
                witness: None,
                stats,
            },
            SolveOutcome::Unsat => MatchResult { verdict: Verdict::NoMatch, reason: None, timed_out: false, assignment: None, witness: None, stats },
            SolveOutcome::Unknown(r) => {
                return Ok(MatchResult {
                    verdict: Verdict::Unknown,
                    timed_out: r == "time limit",
                    reason: Some(r),
                    assignment: None,
                    witness: None,
                    stats,
                })
            }
        };
        last = Some(result);
    }
    Ok(last.expect("schedule is never empty"))
}
