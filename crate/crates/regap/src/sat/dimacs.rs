use std::fmt::Write;

use super::CnfFormula;
use crate::error::{Error, Result};

/// Writes `p cnf V C` followed by one zero-terminated clause per line.
pub fn to_dimacs(f: &CnfFormula) -> String {
    let mut out = String::with_capacity(16 + f.clauses.len() * 12);
    writeln!(out, "p cnf {} {}", f.num_vars, f.clauses.len()).unwrap();
    for c in &f.clauses {
        for l in c {
            write!(out, "{l} ").unwrap();
        }
        out.push_str("0\n");
    }
    out
}

/// Parses DIMACS CNF. Comment lines start with `c`; a trailing `%` line
/// (as in the SATLIB files) ends the clause section.
pub fn from_dimacs(text: &str) -> Result<CnfFormula> {
    let mut header: Option<(u32, usize)> = None;
    let mut clauses: Vec<Vec<i32>> = Vec::new();
    let mut current: Vec<i32> = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        if line.starts_with('%') {
            break;
        }
        if let Some(rest) = line.strip_prefix('p') {
            if header.is_some() {
                return Err(Error::Dimacs("second header line".into()));
            }
            let parts: Vec<&str> = rest.split_whitespace().collect();
            if parts.len() != 3 || parts[0] != "cnf" {
                return Err(Error::Dimacs(format!("bad header {line:?}")));
            }
            let vars = parts[1].parse().map_err(|_| Error::Dimacs(format!("bad variable count {:?}", parts[1])))?;
            let count = parts[2].parse().map_err(|_| Error::Dimacs(format!("bad clause count {:?}", parts[2])))?;
            header = Some((vars, count));
            continue;
        }
        let Some((num_vars, _)) = header else {
            return Err(Error::Dimacs("clause before header".into()));
        };
        for tok in line.split_whitespace() {
            let lit: i64 = tok.parse().map_err(|_| Error::Dimacs(format!("bad literal {tok:?}")))?;
            if lit == 0 {
                if current.is_empty() {
                    return Err(Error::Dimacs("empty clause".into()));
                }
                clauses.push(std::mem::take(&mut current));
            } else {
                if lit.unsigned_abs() > num_vars as u64 {
                    return Err(Error::LiteralRange { lit, num_vars });
                }
                current.push(lit as i32);
            }
        }
    }
    let (num_vars, count) = header.ok_or_else(|| Error::Dimacs("missing header".into()))?;
    if !current.is_empty() {
        return Err(Error::Dimacs("last clause is not zero-terminated".into()));
    }
    if clauses.len() != count {
        return Err(Error::Dimacs(format!("header declares {count} clauses, found {}", clauses.len())));
    }
    Ok(CnfFormula { num_vars, clauses })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_clause() {
        let f = CnfFormula { num_vars: 1, clauses: vec![vec![1]] };
        assert_eq!(to_dimacs(&f), "p cnf 1 1\n1 0\n");
    }

    #[test]
    fn multi_line_clause() {
        let f = from_dimacs("c hi\np cnf 3 2\n1 -2\n3 0 -1 0\n").unwrap();
        assert_eq!(f.clauses, vec![vec![1, -2, 3], vec![-1]]);
    }

    #[test]
    fn count_mismatch() {
        assert!(from_dimacs("p cnf 2 3\n1 0\n2 0\n").is_err());
    }
}
