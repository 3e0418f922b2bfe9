use std::path::Path;
use std::process::{Command, Stdio};
use std::sync::atomic::{AtomicU64, Ordering};
use std::time::{Duration, Instant};

use super::{to_dimacs, CnfFormula, Model, SolveOutcome};
use crate::error::{Error, Result};

static COUNTER: AtomicU64 = AtomicU64::new(0);

/// Runs `program <file.cnf>` and reads its verdict from standard output.
///
/// Accepted output: `SAT` followed by literals, `UNSAT`, or competition
/// style `s SATISFIABLE` / `v ...` lines. Variables the solver leaves out
/// of the model default to false; the model is certified before returning.
pub fn solve_external(f: &CnfFormula, program: &Path, timeout: Option<Duration>) -> Result<SolveOutcome> {
    let n = COUNTER.fetch_add(1, Ordering::Relaxed);
    let path = std::env::temp_dir().join(format!("regap-{}-{n}.cnf", std::process::id()));
    std::fs::write(&path, to_dimacs(f)).map_err(|e| Error::External(e.to_string()))?;
    let result = run(program, &path, timeout);
    let _ = std::fs::remove_file(&path);
    let stdout = match result? {
        Some(s) => s,
        None => return Ok(SolveOutcome::Unknown("time limit".into())),
    };
    let out = parse_output(&stdout, f.num_vars)?;
    if let SolveOutcome::Sat(m) = &out {
        if let Some(i) = f.first_violated(m) {
            return Err(Error::External(format!("model violates clause {i}")));
        }
    }
    Ok(out)
}

fn run(program: &Path, cnf: &Path, timeout: Option<Duration>) -> Result<Option<String>> {
    let mut child = Command::new(program)
        .arg(cnf)
        .stdout(Stdio::piped())
        .stderr(Stdio::null())
        .spawn()
        .map_err(|e| Error::External(format!("{}: {e}", program.display())))?;
    let mut stdout = child.stdout.take().expect("piped stdout");
    let reader = std::thread::spawn(move || {
        let mut s = String::new();
        std::io::Read::read_to_string(&mut stdout, &mut s).map(|_| s)
    });
    let started = Instant::now();
    loop {
        if child.try_wait().map_err(|e| Error::External(e.to_string()))?.is_some() {
            break;
        }
        if timeout.is_some_and(|t| started.elapsed() >= t) {
            let _ = child.kill();
            let _ = child.wait();
            return Ok(None);
        }
        std::thread::sleep(Duration::from_millis(5));
    }
    let text = reader
        .join()
        .map_err(|_| Error::External("reader thread panicked".into()))?
        .map_err(|e| Error::External(e.to_string()))?;
    Ok(Some(text))
}

pub(crate) fn parse_output(text: &str, num_vars: u32) -> Result<SolveOutcome> {
    let mut verdict: Option<bool> = None;
    let mut values = vec![false; num_vars as usize];
    for line in text.lines() {
        let line = line.trim();
        let body = if let Some(rest) = line.strip_prefix("s ") {
            rest.trim()
        } else if let Some(rest) = line.strip_prefix("v ") {
            read_lits(rest, &mut values, num_vars)?;
            continue;
        } else {
            line
        };
        match body {
            "UNSAT" | "UNSATISFIABLE" => verdict = Some(false),
            "SAT" | "SATISFIABLE" => verdict = Some(true),
            "" => {}
            _ if line.starts_with('c') => {}
            _ if verdict == Some(true) => read_lits(body, &mut values, num_vars)?,
            _ => {}
        }
    }
    match verdict {
        Some(true) => Ok(SolveOutcome::Sat(Model::new(values))),
        Some(false) => Ok(SolveOutcome::Unsat),
        None => Err(Error::External("no SAT/UNSAT line in solver output".into())),
    }
}

fn read_lits(s: &str, values: &mut [bool], num_vars: u32) -> Result<()> {
    for tok in s.split_whitespace() {
        let l: i64 = tok.parse().map_err(|_| Error::External(format!("bad literal {tok:?}")))?;
        if l == 0 {
            continue;
        }
        if l.unsigned_abs() > num_vars as u64 {
            return Err(Error::LiteralRange { lit: l, num_vars });
        }
        values[l.unsigned_abs() as usize - 1] = l > 0;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plain_format() {
        let out = parse_output("SAT\n1 -2 3\n", 3).unwrap();
        assert_eq!(out, SolveOutcome::Sat(Model::new(vec![true, false, true])));
        assert_eq!(parse_output("UNSAT\n", 3).unwrap(), SolveOutcome::Unsat);
    }

    #[test]
    fn competition_format() {
        let out = parse_output("c x\ns SATISFIABLE\nv -1 2\nv 0\n", 2).unwrap();
        assert_eq!(out, SolveOutcome::Sat(Model::new(vec![false, true])));
    }
}
