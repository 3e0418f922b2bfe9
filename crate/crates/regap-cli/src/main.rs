use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use regap::bench;
use regap::encode::{encode, EncodeOptions};
use regap::gen::{cfg_corpus, default_bench_patterns, CfgParams};
use regap::graph::{load_graph, load_pattern, Graph, Pattern};
use regap::matcher::{match_pattern, MatchOptions, SolverChoice, Verdict};
use regap::oracle::{describe_steps, oracle_match, outcome_assignment, Limits, OracleVerdict};
use regap::preprocess::merge_fixpoint;
use regap::sat::to_dimacs;
use regap::witness::MatchWitness;
use regap::Error;

// sysexits
const EX_USAGE: u8 = 64;
const EX_DATAERR: u8 = 65;
const EX_NOINPUT: u8 = 66;
const EX_UNAVAILABLE: u8 = 69;
const EX_SOFTWARE: u8 = 70;
const EX_IOERR: u8 = 74;

#[derive(Parser)]
#[command(name = "regap", version, about = "Regular graph pattern matching via SAT")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone)]
struct Global {
    /// Time budget per instance, in seconds
    #[arg(long, global = true, default_value_t = 60.0)]
    timeout: f64,
    /// Node merging before encoding
    #[arg(long, global = true, value_enum, default_value_t = OnOff::On)]
    merge: OnOff,
    /// Sequence wildcard length bound (default: number of graph nodes)
    #[arg(long, global = true)]
    k: Option<usize>,
    /// `builtin` or `external:PATH`
    #[arg(long, global = true, default_value = "builtin")]
    solver: String,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum OnOff {
    On,
    Off,
}

#[derive(Subcommand)]
enum Cmd {
    /// Decide whether PATTERN matches GRAPH
    Match {
        graph: PathBuf,
        pattern: PathBuf,
        /// Print the witness as JSON on a match
        #[arg(long)]
        witness: bool,
    },
    /// Write the CNF encoding as DIMACS, with a variable map sidecar
    Encode {
        graph: PathBuf,
        pattern: PathBuf,
        /// DIMACS output (default: stdout)
        #[arg(short, long)]
        out: Option<PathBuf>,
        /// Variable map JSON (default: OUT.varmap.json when --out is given)
        #[arg(long)]
        varmap: Option<PathBuf>,
        /// Also write the expanded pattern as JSON
        #[arg(long)]
        emit_expanded: Option<PathBuf>,
    },
    /// Apply node merging and print the merged graph and a report
    Merge {
        graph: PathBuf,
        pattern: PathBuf,
        /// Merged graph output; the report then goes to stdout alone
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Decide a match with the rule-based reference search (small graphs)
    Oracle {
        graph: PathBuf,
        pattern: PathBuf,
        #[arg(long, default_value_t = Limits::default().max_nodes)]
        max_nodes: usize,
        #[arg(long, default_value_t = Limits::default().max_states)]
        max_states: usize,
    },
    /// Generate a corpus of CFG-like graphs
    Gen {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 10)]
        count: usize,
        #[arg(long, default_value_t = CfgParams::default().median_nodes)]
        median_nodes: f64,
        #[arg(long, default_value_t = CfgParams::default().sigma)]
        sigma: f64,
        #[arg(long, default_value_t = CfgParams::default().min_nodes)]
        min_nodes: usize,
        #[arg(long, default_value_t = CfgParams::default().max_nodes)]
        max_nodes: usize,
        /// Also write the default bench patterns to DIR
        #[arg(long)]
        patterns: Option<PathBuf>,
    },
    /// Run every pattern against every corpus graph and write a CSV
    Bench {
        corpus: PathBuf,
        /// Directory of pattern JSON files (default: built-in set)
        #[arg(long)]
        patterns: Option<PathBuf>,
        /// Output file (default: stdout)
        #[arg(short, long)]
        out: Option<PathBuf>,
        /// JSON lines instead of CSV
        #[arg(long)]
        jsonl: bool,
        /// Print the summary tables to stderr
        #[arg(long)]
        summary: bool,
    },
}

struct Failure {
    code: u8,
    msg: String,
}

impl Failure {
    fn new(code: u8, msg: impl Into<String>) -> Self {
        Failure { code, msg: msg.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::BadK | Error::Limits(_) => EX_USAGE,
            Error::External(_) => EX_UNAVAILABLE,
            Error::EncoderBug(_) => EX_SOFTWARE,
            Error::Io(_) => EX_IOERR,
            _ => EX_DATAERR,
        };
        Failure::new(code, e.to_string())
    }
}

type Res<T> = Result<T, Failure>;

fn read(path: &Path) -> Res<Vec<u8>> {
    fs::read(path).map_err(|e| Failure::new(EX_NOINPUT, format!("{}: {e}", path.display())))
}

fn read_graph(path: &Path) -> Res<Graph> {
    load_graph(&read(path)?).map_err(|e| Failure::new(EX_DATAERR, format!("{}: {e}", path.display())))
}

fn read_pattern(path: &Path) -> Res<Pattern> {
    load_pattern(&read(path)?).map_err(|e| Failure::new(EX_DATAERR, format!("{}: {e}", path.display())))
}

fn write(path: &Path, bytes: &[u8]) -> Res<()> {
    fs::write(path, bytes).map_err(|e| Failure::new(EX_IOERR, format!("{}: {e}", path.display())))
}

fn stdout(bytes: &[u8]) -> Res<()> {
    let mut out = io::stdout().lock();
    out.write_all(bytes).and_then(|_| out.flush()).map_err(|e| Failure::new(EX_IOERR, e.to_string()))
}

fn pretty(v: &serde_json::Value) -> String {
    serde_json::to_string_pretty(v).expect("json values serialize") + "\n"
}

impl Global {
    fn options(&self) -> Res<MatchOptions> {
        if !(self.timeout.is_finite() && self.timeout >= 0.0) {
            return Err(Failure::new(EX_USAGE, "--timeout must be a non-negative number of seconds"));
        }
        let solver = SolverChoice::parse(&self.solver)
            .ok_or_else(|| Failure::new(EX_USAGE, format!("unknown solver {:?}; use builtin or external:PATH", self.solver)))?;
        if self.k == Some(0) {
            return Err(Error::BadK.into());
        }
        Ok(MatchOptions {
            encode: EncodeOptions { merge: self.merge == OnOff::On, k: self.k },
            solver,
            timeout: Some(Duration::from_secs_f64(self.timeout)),
            seed: self.seed,
            ..MatchOptions::default()
        })
    }
}

/// `.json` files in `dir`, sorted by name, keyed by file stem.
fn json_files(dir: &Path) -> Res<Vec<(String, PathBuf)>> {
    let entries = fs::read_dir(dir).map_err(|e| Failure::new(EX_NOINPUT, format!("{}: {e}", dir.display())))?;
    let mut files = Vec::new();
    for entry in entries {
        let path = entry.map_err(|e| Failure::new(EX_IOERR, e.to_string()))?.path();
        if path.extension().is_some_and(|x| x == "json") {
            let stem = path.file_stem().unwrap().to_string_lossy().into_owned();
            files.push((stem, path));
        }
    }
    files.sort();
    Ok(files)
}

fn run(cli: Cli) -> Res<u8> {
    let g = &cli.global;
    match cli.cmd {
        Cmd::Match { graph, pattern, witness } => {
            let (gr, p) = (read_graph(&graph)?, read_pattern(&pattern)?);
            let r = match_pattern(&p, &gr, &g.options()?)?;
            let mut text = format!("{}\n", r.verdict.label());
            if let Some(reason) = &r.reason {
                eprintln!("{reason}");
            }
            if witness {
                if let Some(w) = &r.witness {
                    text.push_str(&pretty(&serde_json::to_value(w).unwrap()));
                }
            }
            stdout(text.as_bytes())?;
            Ok(r.verdict.exit_code() as u8)
        }
        Cmd::Encode { graph, pattern, out, varmap, emit_expanded } => {
            let (gr, p) = (read_graph(&graph)?, read_pattern(&pattern)?);
            let opts = g.options()?;
            let enc = encode(&p, &gr, opts.encode)?;
            let dimacs = to_dimacs(&enc.formula);
            let vm = pretty(&enc.vars.to_json(&enc.expanded, &enc.graph));
            match &out {
                Some(path) => write(path, dimacs.as_bytes())?,
                None => stdout(dimacs.as_bytes())?,
            }
            let sidecar = varmap.or_else(|| out.as_ref().map(|o| PathBuf::from(format!("{}.varmap.json", o.display()))));
            if let Some(path) = sidecar {
                write(&path, vm.as_bytes())?;
            }
            if let Some(path) = emit_expanded {
                write(&path, pretty(&enc.expanded.to_json_value()).as_bytes())?;
            }
            Ok(0)
        }
        Cmd::Merge { graph, pattern, out } => {
            let (gr, p) = (read_graph(&graph)?, read_pattern(&pattern)?);
            let (merged, report) = merge_fixpoint(&gr, &p);
            let report = serde_json::to_value(&report).unwrap();
            match out {
                Some(path) => {
                    write(&path, pretty(&merged.to_json_value()).as_bytes())?;
                    stdout(pretty(&report).as_bytes())?;
                }
                None => stdout(pretty(&json!({"graph": merged.to_json_value(), "report": report})).as_bytes())?,
            }
            Ok(0)
        }
        Cmd::Oracle { graph, pattern, max_nodes, max_states } => {
            let (gr, p) = (read_graph(&graph)?, read_pattern(&pattern)?);
            let o = oracle_match(&p, &gr, Limits { max_nodes, max_states })?;
            let (label, code) = match o.verdict {
                OracleVerdict::Match => (Verdict::Match.label(), 0),
                OracleVerdict::NoMatch => (Verdict::NoMatch.label(), 1),
                OracleVerdict::Unknown => (Verdict::Unknown.label(), 2),
            };
            let mut text = format!("{label}\n");
            for line in describe_steps(&o.steps) {
                text.push_str(&format!("  {line}\n"));
            }
            if let (Some(gg), Some(f)) = (&o.generalized, &o.bijection) {
                let w = MatchWitness::from_assignment(&p, &gr, &outcome_assignment(&p, &gr, gg, f));
                text.push_str(&pretty(&serde_json::to_value(&w).unwrap()));
            }
            eprintln!("{} states", o.states);
            stdout(text.as_bytes())?;
            Ok(code)
        }
        Cmd::Gen { out, count, median_nodes, sigma, min_nodes, max_nodes, patterns } => {
            if !(median_nodes > 0.0 && sigma > 0.0 && min_nodes >= 1 && min_nodes <= max_nodes) {
                return Err(Failure::new(EX_USAGE, "need median > 0, sigma > 0 and 1 <= min-nodes <= max-nodes"));
            }
            let params = CfgParams { median_nodes, sigma, min_nodes, max_nodes };
            fs::create_dir_all(&out).map_err(|e| Failure::new(EX_IOERR, format!("{}: {e}", out.display())))?;
            let width = count.saturating_sub(1).to_string().len().max(4);
            for (i, graph) in cfg_corpus(g.seed, count, params).iter().enumerate() {
                write(&out.join(format!("g{i:0width$}.json")), pretty(&graph.to_json_value()).as_bytes())?;
            }
            if let Some(dir) = patterns {
                fs::create_dir_all(&dir).map_err(|e| Failure::new(EX_IOERR, format!("{}: {e}", dir.display())))?;
                for (id, p) in default_bench_patterns() {
                    write(&dir.join(format!("{id}.json")), pretty(&p.to_json_value()).as_bytes())?;
                }
            }
            Ok(0)
        }
        Cmd::Bench { corpus, patterns, out, jsonl, summary } => {
            let opts = g.options()?;
            let graphs: Vec<(String, Graph)> =
                json_files(&corpus)?.into_iter().map(|(id, path)| Ok((id, read_graph(&path)?))).collect::<Res<_>>()?;
            let pats: Vec<(String, Pattern)> = match patterns {
                Some(dir) => json_files(&dir)?.into_iter().map(|(id, path)| Ok((id, read_pattern(&path)?))).collect::<Res<_>>()?,
                None => default_bench_patterns(),
            };
            let records = bench::run(&graphs, &pats, &opts);
            let mut buf = Vec::new();
            if jsonl {
                bench::write_jsonl(&records, &mut buf)?;
            } else {
                bench::write_csv(&records, &mut buf)?;
            }
            match out {
                Some(path) => write(&path, &buf)?,
                None => stdout(&buf)?,
            }
            if summary {
                eprint!("{}", bench::summarize(&records));
            }
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EX_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("regap: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}
