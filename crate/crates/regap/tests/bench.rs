mod common;

use regap::bench::{bench_one, describe, run, summarize, write_csv, write_jsonl, After, Outcome, HEADER, TIMING_COLUMNS};
use regap::gen::{cfg_corpus, default_bench_patterns, CfgParams, CFG_KINDS};
use regap::graph::WildcardKind;
use regap::matcher::MatchOptions;

fn csv(records: &[regap::bench::BenchRecord]) -> String {
    let mut out = Vec::new();
    write_csv(records, &mut out).unwrap();
    String::from_utf8(out).unwrap()
}

fn strip_timing(text: &str) -> Vec<Vec<String>> {
    let mut r = ::csv::ReaderBuilder::new().has_headers(false).from_reader(text.as_bytes());
    let skip: Vec<usize> = TIMING_COLUMNS.iter().map(|c| HEADER.iter().position(|h| h == c).unwrap()).collect();
    r.records()
        .map(|rec| rec.unwrap().iter().enumerate().filter(|(i, _)| !skip.contains(i)).map(|(_, f)| f.to_string()).collect())
        .collect()
}

#[test]
fn empty_corpus_is_header_only() {
    let records = run(&[], &default_bench_patterns(), &MatchOptions::default());
    assert!(records.is_empty());
    assert_eq!(csv(&records), HEADER.join(",") + "\n");
    let mut out = Vec::new();
    write_jsonl(&records, &mut out).unwrap();
    assert!(out.is_empty());
}

#[test]
fn wildcard_edge_pattern_reports_not_applied() {
    use WildcardKind::*;
    let p = common::pat(&[("A", None), ("S", Some(Seq1Plus)), ("G", Some(Sub1Plus))], &[("A", "S"), ("S", "G")]);
    let g = common::chain(4);
    let r = bench_one("chain4", &g, "ww", &p, &MatchOptions::default());
    assert_eq!(r.merge, "not applied");
    assert_eq!(r.clauses_after, After::NotApplied);
    assert_eq!(r.outcome, Outcome::Sat);
    let text = csv(&[r]);
    assert!(text.lines().nth(1).unwrap().contains("not applied,not applied,not applied,not applied"));
}

#[test]
fn merge_columns_and_outcomes() {
    let corpus: Vec<(String, _)> = cfg_corpus(4, 5, CfgParams { median_nodes: 15.0, ..CfgParams::default() }).into_iter().enumerate().map(|(i, g)| (format!("g{i}"), g)).collect();
    let pats = default_bench_patterns();
    let on = run(&corpus, &pats, &MatchOptions::default());
    let mut off_opts = MatchOptions::default();
    off_opts.encode.merge = false;
    let off = run(&corpus, &pats, &off_opts);
    assert_eq!(on.len(), corpus.len() * pats.len());
    for (a, b) in on.iter().zip(&off) {
        assert_eq!((&a.instance, &a.pattern), (&b.instance, &b.pattern));
        assert_eq!(a.outcome, b.outcome, "{} {}", a.instance, a.pattern);
        assert!(matches!(a.outcome, Outcome::Sat | Outcome::Unsat));
        assert_eq!(b.merge, "off");
        assert_eq!(b.nodes_after, After::Off);
        let (Some(before), Some(after)) = (a.clauses_before, a.clauses_after.value()) else { panic!("merge columns missing") };
        assert!(after <= before);
        assert!(a.nodes_after.value().unwrap() <= a.nodes);
    }
    let s = summarize(&on);
    assert!(s.clause_reduction.unwrap() > 0.0);
    assert_eq!(s.patterns.len(), pats.len());
    assert!(s.to_string().contains("chain-w3"));
}

#[test]
fn same_seed_same_csv_modulo_timing() {
    let corpus: Vec<(String, _)> = cfg_corpus(9, 4, CfgParams::default()).into_iter().enumerate().map(|(i, g)| (format!("g{i}"), g)).collect();
    let a = csv(&run(&corpus, &default_bench_patterns(), &MatchOptions::default()));
    let b = csv(&run(&corpus, &default_bench_patterns(), &MatchOptions::default()));
    assert_eq!(strip_timing(&a), strip_timing(&b));
    assert_eq!(strip_timing(&a)[0].len(), HEADER.len() - TIMING_COLUMNS.len());
}

#[test]
fn tiny_timeout_is_recorded() {
    let g = cfg_corpus(2, 1, CfgParams { median_nodes: 40.0, min_nodes: 35, ..CfgParams::default() }).remove(0);
    let o = MatchOptions { timeout: Some(std::time::Duration::from_nanos(1)), ..MatchOptions::default() };
    let r = bench_one("big", &g, "w3", &regap::gen::wildcard_pattern(3), &o);
    assert_eq!(r.outcome, Outcome::Timeout);
    assert_eq!(r.outcome.label(), "TIMEOUT");
}

#[test]
fn generated_corpus_is_calibrated_and_reproducible() {
    let corpus = cfg_corpus(1, 10, CfgParams::default());
    assert_eq!(corpus.len(), 10);
    let mut sizes: Vec<usize> = corpus.iter().map(|g| g.node_count()).collect();
    sizes.sort();
    let median = (sizes[4] + sizes[5]) as f64 / 2.0;
    assert!((15.0..=27.0).contains(&median), "median {median}");
    for g in &corpus {
        // single entry: everything is reachable from the first node
        let mut seen = vec![false; g.node_count()];
        let mut stack = vec![0];
        while let Some(v) = stack.pop() {
            if !std::mem::replace(&mut seen[v], true) {
                stack.extend_from_slice(g.succ(v));
            }
        }
        assert!(seen.iter().all(|&s| s));
        for v in 0..g.node_count() {
            let kind = g.node_attrs(v)["kind"].clone();
            assert!(CFG_KINDS.iter().any(|k| kind == regap::constraints::AttrValue::Str(k.to_string())));
        }
    }
    let again = cfg_corpus(1, 10, CfgParams::default());
    let text = |c: &[regap::graph::Graph]| c.iter().map(|g| g.to_json_string()).collect::<Vec<_>>();
    assert_eq!(text(&corpus), text(&again));
    assert!(cfg_corpus(1, 0, CfgParams::default()).is_empty());
}

#[test]
fn describe_stats() {
    assert_eq!(describe(&[]), None);
    let d = describe(&[4.0, 1.0, 3.0, 2.0]).unwrap();
    assert_eq!((d.min, d.max, d.median, d.mean), (1.0, 4.0, 2.5, 2.5));
}
