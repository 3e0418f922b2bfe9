mod common;

use regap::constraints::Attrs;
use regap::error::Error;
use regap::gen::{small_suite, SmallParams};
use regap::graph::{Graph, WildcardKind};
use regap::matcher::Verdict;
use regap::oracle::{
    apply_rules, describe_steps, enumerate_match, is_isomorphic_to_pattern, oracle_match, replay, GKind, GeneralizedGraph,
    Limits, OracleVerdict, Origin, Step,
};

fn graph(nodes: &[&str], edges: &[(&str, &str)]) -> Graph {
    let mut b = Graph::builder();
    for n in nodes {
        b.add_node(*n, Attrs::new());
    }
    for (s, d) in edges {
        b.add_edge(*s, *d, Attrs::new());
    }
    b.build().unwrap()
}

fn step(rule: u8, a: usize, b: Option<usize>, kind: Option<GKind>) -> Step {
    Step { rule, a, b, kind }
}

#[test]
fn rule1_on_a_single_node() {
    let gg = GeneralizedGraph::from_graph(&common::chain(1));
    let plus: Vec<GeneralizedGraph> = apply_rules(&gg).into_iter().filter(|s| s.node_count() == 1).collect();
    assert_eq!(plus.len(), 1);
    assert_eq!(plus[0].nodes[0].kind, GKind::Plus);
    assert_eq!(plus[0].nodes[0].members, [0]);
    assert_eq!(plus[0].last_rule, 1);
}

#[test]
fn rule2_blocked_by_second_in_edge() {
    // ids sort as s=0, u=1, x=2
    let g = graph(&["u", "s", "x"], &[("u", "s"), ("x", "s")]);
    let gg = GeneralizedGraph::from_graph(&g).apply(&step(1, 0, None, None)).unwrap();
    assert!(gg.apply(&step(2, 1, Some(0), None)).is_none());
    let g = graph(&["u", "s"], &[("u", "s")]);
    let gg = GeneralizedGraph::from_graph(&g).apply(&step(1, 0, None, None)).unwrap();
    let joined = gg.apply(&step(2, 1, Some(0), None)).unwrap();
    assert_eq!(joined.node_count(), 1);
    assert_eq!(joined.nodes[0].kind, GKind::SeqPlus);
    assert_eq!(joined.nodes[0].members, [0, 1]);
}

#[test]
fn two_seq_stars_merge_into_one() {
    // u -> v -> x, both edges subdivided by S*, then the two S* merge
    let g = graph(&["u", "v", "x"], &[("u", "v"), ("v", "x")]);
    let s = Some(GKind::SeqStar);
    let gg = replay(&g, &[step(3, 0, Some(1), s), step(3, 1, Some(2), s)]).unwrap();
    assert_eq!(gg.node_count(), 5);
    let merged = gg.apply(&step(4, 3, Some(4), None)).unwrap();
    assert_eq!(merged.node_count(), 4);
    assert_eq!(merged.nodes[3].kind, GKind::SeqStar);
    assert!(merged.nodes[3].members.is_empty());
    let edges: Vec<(usize, usize)> = merged.edges.keys().copied().collect();
    // u -> S -> v -> S -> x
    assert_eq!(edges, [(0, 3), (1, 3), (3, 1), (3, 2)]);
    // no merging back down the order
    assert!(merged.apply(&step(3, 1, Some(2), s)).is_none());
}

#[test]
fn appended_seq_star_sinks_merge() {
    let s = Some(GKind::SeqStar);
    let gg = replay(&common::chain(1), &[step(7, 0, None, s), step(7, 0, None, s)]).unwrap();
    assert_eq!(gg.nodes[1].origin, Origin::Appended);
    let merged = gg.apply(&step(9, 1, Some(2), None)).unwrap();
    assert_eq!(merged.node_count(), 2);
    // sources cannot use the sink rule
    let gg = replay(&common::chain(1), &[step(8, 0, None, s), step(8, 0, None, s)]).unwrap();
    assert!(gg.apply(&step(9, 1, Some(2), None)).is_none());
    assert!(gg.apply(&step(10, 1, Some(2), None)).is_some());
}

#[test]
fn rule_order_is_enforced() {
    let gg = replay(&common::chain(2), &[step(1, 0, None, None), step(13, 0, None, None)]).unwrap();
    assert!(gg.apply(&step(1, 1, None, None)).is_none());
    assert!(replay(&common::chain(2), &[step(14, 0, None, None)]).is_none());
}

#[test]
fn mixed_uses_rules_one_two_and_six() {
    let (p, g) = (common::pattern("mixed_pattern"), common::graph("mixed_graph"));
    let o = common::certified_oracle(&p, &g).unwrap();
    assert_eq!(o.verdict, OracleVerdict::Match);
    let mut rules: Vec<u8> = o.steps.iter().map(|s| s.rule).collect();
    rules.sort();
    assert_eq!(rules, [1, 1, 1, 2, 6]);
    assert_eq!(describe_steps(&o.steps).len(), 5);
    assert!(is_isomorphic_to_pattern(&p, &g, o.generalized.as_ref().unwrap()));
}

#[test]
fn signs_matches_g_only() {
    let p = common::pattern("signs_pattern");
    assert_eq!(common::certified_oracle(&p, &common::graph("signs_graph")).unwrap().verdict, OracleVerdict::Match);
    assert_eq!(common::certified_oracle(&p, &common::graph("signs_branch_graph")).unwrap().verdict, OracleVerdict::NoMatch);
}

#[test]
fn identical_graphs_need_no_rules() {
    let p = common::pat(&[("A", None)], &[]);
    let o = oracle_match(&p, &common::chain(1), Limits::default()).unwrap();
    assert_eq!(o.verdict, OracleVerdict::Match);
    assert!(o.steps.is_empty());
    let p = common::pat(&[("a", None), ("b", None), ("c", None)], &[("a", "b"), ("b", "c")]);
    let g = common::chain(3);
    assert!(is_isomorphic_to_pattern(&p, &g, &GeneralizedGraph::from_graph(&g)));
}

#[test]
fn wildcard_kinds_must_agree() {
    let (p, g) = (common::pattern("signs_pattern"), common::graph("signs_graph"));
    let o = oracle_match(&p, &g, Limits::default()).unwrap();
    let gg = o.generalized.unwrap();
    assert!(is_isomorphic_to_pattern(&p, &g, &gg));
    let s = p.index_of("S").unwrap();
    let mut doc = p.to_json_value();
    doc["nodes"][s]["kind"] = "sub1plus".into();
    let swapped = regap::graph::Pattern::from_json_value(&doc).unwrap();
    assert_eq!(swapped.wildcard(s), Some(WildcardKind::Sub1Plus));
    assert!(!is_isomorphic_to_pattern(&swapped, &g, &gg));
}

#[test]
fn limits() {
    let p = common::pattern("mixed_pattern");
    let g = common::graph("mixed_graph");
    assert!(matches!(oracle_match(&p, &g, Limits { max_nodes: 6, ..Limits::default() }), Err(Error::Limits(_))));
    assert!(matches!(oracle_match(&p, &g, Limits { max_states: 0, ..Limits::default() }), Err(Error::Limits(_))));
    let o = oracle_match(&p, &g, Limits { max_states: 3, ..Limits::default() }).unwrap();
    assert_eq!(o.verdict, OracleVerdict::Unknown);
    assert!(o.steps.is_empty());
}

#[test]
fn agrees_with_sat_and_enumeration() {
    for inst in small_suite(3, 200, SmallParams::default()) {
        let (p, g) = (&inst.pattern, &inst.graph);
        let sat = common::sat(p, g, false).verdict == Verdict::Match;
        let o = common::certified_oracle(p, g).unwrap_or_else(|e| panic!("{}: {e}", inst.id));
        assert_eq!(o.as_bool(), Some(sat), "{}", inst.id);
        assert_eq!(enumerate_match(p, g).is_some(), sat, "{}", inst.id);
    }
}
