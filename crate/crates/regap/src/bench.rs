//! Benchmark harness: one record per (graph, pattern) pair with encoding
//! sizes before and after node merging, timings and the outcome, plus
//! corpus-level summaries.

use std::fmt;
use std::io::Write;

use serde::{Serialize, Serializer};

use crate::encode::{encode, EncodeOptions};
use crate::error::{Error, Result};
use crate::graph::{Graph, Pattern};
use crate::matcher::{match_pattern, MatchOptions, Verdict};
use crate::par;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Outcome {
    #[serde(rename = "SAT")]
    Sat,
    #[serde(rename = "UNSAT")]
    Unsat,
    #[serde(rename = "TIMEOUT")]
    Timeout,
    /// UNSAT under a sequence bound below the complete one
    #[serde(rename = "UNKNOWN")]
    Unknown,
    #[serde(rename = "ERROR")]
    Error,
}

impl Outcome {
    pub fn label(self) -> &'static str {
        match self {
            Outcome::Sat => "SAT",
            Outcome::Unsat => "UNSAT",
            Outcome::Timeout => "TIMEOUT",
            Outcome::Unknown => "UNKNOWN",
            Outcome::Error => "ERROR",
        }
    }
}

/// A size after merging: a number, absent (merging off, or the instance
/// failed), or not applied because the pattern has a wildcard-wildcard edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum After {
    Value(usize),
    Off,
    NotApplied,
}

impl After {
    pub fn value(self) -> Option<usize> {
        match self {
            After::Value(v) => Some(v),
            _ => None,
        }
    }
}

impl Serialize for After {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            After::Value(v) => s.serialize_u64(*v as u64),
            After::Off => s.serialize_str(""),
            After::NotApplied => s.serialize_str("not applied"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRecord {
    pub instance: String,
    pub nodes: usize,
    pub edges: usize,
    pub pattern: String,
    pub wildcards: usize,
    pub merge: &'static str,
    pub vars_before: Option<usize>,
    pub clauses_before: Option<usize>,
    pub nodes_after: After,
    pub edges_after: After,
    pub vars_after: After,
    pub clauses_after: After,
    pub encode_ms: f64,
    pub solve_ms: f64,
    pub outcome: Outcome,
    pub detail: String,
}

/// Columns that change from run to run.
pub const TIMING_COLUMNS: [&str; 2] = ["encode_ms", "solve_ms"];

pub const HEADER: [&str; 16] = [
    "instance",
    "nodes",
    "edges",
    "pattern",
    "wildcards",
    "merge",
    "vars_before",
    "clauses_before",
    "nodes_after",
    "edges_after",
    "vars_after",
    "clauses_after",
    "encode_ms",
    "solve_ms",
    "outcome",
    "detail",
];

fn ms(d: std::time::Duration) -> f64 {
    (d.as_secs_f64() * 1e6).round() / 1e3
}

/// Runs one pair. Failures end up in the record rather than the caller.
pub fn bench_one(instance: &str, g: &Graph, pattern: &str, p: &Pattern, opts: &MatchOptions) -> BenchRecord {
    let mut r = BenchRecord {
        instance: instance.to_string(),
        nodes: g.node_count(),
        edges: g.edge_count(),
        pattern: pattern.to_string(),
        wildcards: p.wildcards().count(),
        merge: "off",
        vars_before: None,
        clauses_before: None,
        nodes_after: After::Off,
        edges_after: After::Off,
        vars_after: After::Off,
        clauses_after: After::Off,
        encode_ms: 0.0,
        solve_ms: 0.0,
        outcome: Outcome::Error,
        detail: String::new(),
    };
    if let Err(e) = fill(&mut r, g, p, opts) {
        r.outcome = Outcome::Error;
        r.detail = e.to_string();
    }
    r
}

fn fill(r: &mut BenchRecord, g: &Graph, p: &Pattern, opts: &MatchOptions) -> Result<()> {
    let base = encode(p, g, EncodeOptions { merge: false, k: None })?;
    r.vars_before = Some(base.formula.num_vars as usize);
    r.clauses_before = Some(base.formula.clauses.len());
    if opts.encode.merge {
        if p.has_wildcard_edge() {
            r.merge = "not applied";
            r.nodes_after = After::NotApplied;
            r.edges_after = After::NotApplied;
            r.vars_after = After::NotApplied;
            r.clauses_after = After::NotApplied;
        } else {
            let m = encode(p, g, EncodeOptions { merge: true, k: None })?;
            r.merge = "on";
            r.nodes_after = After::Value(m.graph.node_count());
            r.edges_after = After::Value(m.graph.edge_count());
            r.vars_after = After::Value(m.formula.num_vars as usize);
            r.clauses_after = After::Value(m.formula.clauses.len());
        }
    }
    let res = match_pattern(p, g, opts)?;
    r.encode_ms = ms(res.stats.encode_time);
    r.solve_ms = ms(res.stats.solve_time);
    r.outcome = match res.verdict {
        Verdict::Match => Outcome::Sat,
        Verdict::NoMatch => Outcome::Unsat,
        Verdict::Unknown if res.timed_out => Outcome::Timeout,
        Verdict::Unknown => Outcome::Unknown,
    };
    r.detail = res.reason.unwrap_or_default();
    Ok(())
}

/// Every graph against every pattern, graph-major. Pairs run in parallel
/// when the `parallel` feature is on; the order of records does not depend
/// on it.
pub fn run(corpus: &[(String, Graph)], patterns: &[(String, Pattern)], opts: &MatchOptions) -> Vec<BenchRecord> {
    let pairs: Vec<(usize, usize)> =
        (0..corpus.len()).flat_map(|i| (0..patterns.len()).map(move |j| (i, j))).collect();
    par::map(&pairs, |&(i, j)| {
        let (gid, g) = &corpus[i];
        let (pid, p) = &patterns[j];
        bench_one(gid, g, pid, p, opts)
    })
}

/// CSV with a header line, also for an empty run.
pub fn write_csv<W: Write>(records: &[BenchRecord], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    let io = |e: csv::Error| Error::Io(e.to_string());
    w.write_record(HEADER).map_err(io)?;
    for r in records {
        w.serialize(r).map_err(io)?;
    }
    w.flush().map_err(|e| Error::Io(e.to_string()))
}

pub fn write_jsonl<W: Write>(records: &[BenchRecord], mut out: W) -> Result<()> {
    for r in records {
        let line = serde_json::to_string(r).map_err(|e| Error::Io(e.to_string()))?;
        writeln!(out, "{line}").map_err(|e| Error::Io(e.to_string()))?;
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Describe {
    pub min: f64,
    pub max: f64,
    pub median: f64,
    pub mean: f64,
}

pub fn describe(xs: &[f64]) -> Option<Describe> {
    if xs.is_empty() {
        return None;
    }
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    let median = if n % 2 == 1 { v[n / 2] } else { (v[n / 2 - 1] + v[n / 2]) / 2.0 };
    Some(Describe { min: v[0], max: v[n - 1], median, mean: v.iter().sum::<f64>() / n as f64 })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SizeRow {
    pub metric: &'static str,
    pub base: Option<Describe>,
    pub merged: Option<Describe>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PatternRow {
    pub pattern: String,
    pub wildcards: usize,
    pub instances: usize,
    pub sat: usize,
    pub unsat: usize,
    pub timeout: usize,
    pub other: usize,
    pub solve_ms: Option<Describe>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    /// nodes, edges, vars and clauses without and with merging, over the
    /// records where merging was applied
    pub sizes: Vec<SizeRow>,
    /// mean per-instance relative reduction, in percent
    pub node_reduction: Option<f64>,
    pub clause_reduction: Option<f64>,
    pub patterns: Vec<PatternRow>,
}

pub fn summarize(records: &[BenchRecord]) -> Summary {
    let merged: Vec<&BenchRecord> = records
        .iter()
        .filter(|r| r.clauses_before.is_some() && r.clauses_after.value().is_some())
        .collect();
    let col = |f: &dyn Fn(&BenchRecord) -> Option<usize>, rs: &[&BenchRecord]| -> Vec<f64> {
        rs.iter().filter_map(|r| f(r)).map(|x| x as f64).collect()
    };
    let ok: Vec<&BenchRecord> = records.iter().filter(|r| r.clauses_before.is_some()).collect();
    let sizes = vec![
        SizeRow {
            metric: "nodes",
            base: describe(&col(&|r| Some(r.nodes), &ok)),
            merged: describe(&col(&|r| r.nodes_after.value(), &merged)),
        },
        SizeRow {
            metric: "edges",
            base: describe(&col(&|r| Some(r.edges), &ok)),
            merged: describe(&col(&|r| r.edges_after.value(), &merged)),
        },
        SizeRow {
            metric: "vars",
            base: describe(&col(&|r| r.vars_before, &ok)),
            merged: describe(&col(&|r| r.vars_after.value(), &merged)),
        },
        SizeRow {
            metric: "clauses",
            base: describe(&col(&|r| r.clauses_before, &ok)),
            merged: describe(&col(&|r| r.clauses_after.value(), &merged)),
        },
    ];
    let reduction = |before: &dyn Fn(&BenchRecord) -> usize, after: &dyn Fn(&BenchRecord) -> usize| {
        let xs: Vec<f64> = merged
            .iter()
            .filter(|r| before(r) > 0)
            .map(|r| 100.0 * (1.0 - after(r) as f64 / before(r) as f64))
            .collect();
        describe(&xs).map(|d| d.mean)
    };
    let node_reduction = reduction(&|r| r.nodes, &|r| r.nodes_after.value().unwrap());
    let clause_reduction = reduction(&|r| r.clauses_before.unwrap(), &|r| r.clauses_after.value().unwrap());

    let mut patterns: Vec<PatternRow> = Vec::new();
    for r in records {
        let row = match patterns.iter_mut().find(|p| p.pattern == r.pattern) {
            Some(row) => row,
            None => {
                patterns.push(PatternRow {
                    pattern: r.pattern.clone(),
                    wildcards: r.wildcards,
                    instances: 0,
                    sat: 0,
                    unsat: 0,
                    timeout: 0,
                    other: 0,
                    solve_ms: None,
                });
                patterns.last_mut().unwrap()
            }
        };
        row.instances += 1;
        match r.outcome {
            Outcome::Sat => row.sat += 1,
            Outcome::Unsat => row.unsat += 1,
            Outcome::Timeout => row.timeout += 1,
            Outcome::Unknown | Outcome::Error => row.other += 1,
        }
    }
    for row in &mut patterns {
        let times: Vec<f64> = records
            .iter()
            .filter(|r| r.pattern == row.pattern && matches!(r.outcome, Outcome::Sat | Outcome::Unsat))
            .map(|r| r.solve_ms)
            .collect();
        row.solve_ms = describe(&times);
    }
    Summary { sizes, node_reduction, clause_reduction, patterns }
}

fn cell(d: Option<Describe>, f: fn(&Describe) -> f64) -> String {
    d.map_or_else(|| "-".to_string(), |d| format!("{:.1}", f(&d)))
}

impl fmt::Display for Summary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:<8} {:>8} {:>10} {:>10} {:>10} {:>10}", "", "", "min", "max", "median", "average")?;
        for row in &self.sizes {
            for (label, d) in [("base", row.base), ("merged", row.merged)] {
                writeln!(
                    f,
                    "{:<8} {:>8} {:>10} {:>10} {:>10} {:>10}",
                    row.metric,
                    label,
                    cell(d, |d| d.min),
                    cell(d, |d| d.max),
                    cell(d, |d| d.median),
                    cell(d, |d| d.mean)
                )?;
            }
        }
        let pct = |x: Option<f64>| x.map_or_else(|| "-".to_string(), |x| format!("{x:.1}%"));
        writeln!(f, "node reduction {}, clause reduction {}", pct(self.node_reduction), pct(self.clause_reduction))?;
        writeln!(f)?;
        writeln!(
            f,
            "{:<16} {:>3} {:>6} {:>6} {:>6} {:>8} {:>6} {:>12} {:>12}",
            "pattern", "W", "n", "SAT", "UNSAT", "TIMEOUT", "other", "median ms", "average ms"
        )?;
        for p in &self.patterns {
            writeln!(
                f,
                "{:<16} {:>3} {:>6} {:>6} {:>6} {:>8} {:>6} {:>12} {:>12}",
                p.pattern,
                p.wildcards,
                p.instances,
                p.sat,
                p.unsat,
                p.timeout,
                p.other,
                p.solve_ms.map_or_else(|| "-".to_string(), |d| format!("{:.3}", d.median)),
                p.solve_ms.map_or_else(|| "-".to_string(), |d| format!("{:.3}", d.mean)),
            )?;
        }
        Ok(())
    }
}
