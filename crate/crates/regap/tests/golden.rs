use regap::graph::{load_graph, load_pattern, Graph, Pattern};
use regap::matcher::{match_pattern, MatchOptions, Verdict};
use regap::preprocess::mergeable_edges;

fn graph(name: &str) -> Graph {
    load_graph(&std::fs::read(format!("{}/tests/data/{name}.json", env!("CARGO_MANIFEST_DIR"))).unwrap()).unwrap()
}

fn pattern(name: &str) -> Pattern {
    load_pattern(&std::fs::read(format!("{}/tests/data/{name}.json", env!("CARGO_MANIFEST_DIR"))).unwrap()).unwrap()
}

fn run(p: &Pattern, g: &Graph, merge: bool) -> regap::matcher::MatchResult {
    let mut o = MatchOptions::default();
    o.encode.merge = merge;
    match_pattern(p, g, &o).unwrap()
}

#[test]
fn mixed_matches_with_expected_witness() {
    let (p, g) = (pattern("mixed_pattern"), graph("mixed_graph"));
    for merge in [false, true] {
        let r = run(&p, &g, merge);
        assert_eq!(r.verdict, Verdict::Match);
        let w = r.witness.unwrap();
        assert_eq!(w.mapping["v1"], "A");
        assert_eq!(w.mapping["v4"], "B");
        assert_eq!(w.mapping["v5"], "C");
        assert_eq!(w.wildcard_contents["S"], ["v2", "v3"]);
        assert_eq!(w.wildcard_contents["G"], ["v6", "v7"]);
    }
}

#[test]
fn signs_matches_g_but_not_g_prime() {
    let p = pattern("signs_pattern");
    for merge in [false, true] {
        let r = run(&p, &graph("signs_graph"), merge);
        assert_eq!(r.verdict, Verdict::Match);
        assert_eq!(r.witness.unwrap().wildcard_contents["S"], ["v2", "v3"]);
        assert_eq!(run(&p, &graph("signs_branch_graph"), merge).verdict, Verdict::NoMatch);
    }
}

#[test]
fn signs_mergeable_edges() {
    let p = pattern("signs_pattern");
    assert_eq!(mergeable_edges(&graph("signs_graph"), &p).unwrap(), [("v2".to_string(), "v3".to_string())]);
    assert!(mergeable_edges(&graph("signs_branch_graph"), &p).unwrap().is_empty());
}
