mod common;

use proptest::prelude::*;

use regap::error::Error;
use regap::gen::{chain_graph, small_suite, wildcard_pattern, SmallParams};
use regap::graph::WildcardKind;
use regap::matcher::Verdict;
use regap::preprocess::{accepted_nodes, merge_fixpoint, merge_once, mergeable_edges};

#[test]
fn signs_merges_v2_into_v3() {
    let (p, g) = (common::pattern("signs_pattern"), common::graph("signs_graph"));
    assert_eq!(accepted_nodes(&g, &p), [true, false, false, true]);
    let (m, report) = merge_fixpoint(&g, &p);
    assert_eq!(report.merged_pairs, [("v2".to_string(), "v3".to_string())]);
    assert_eq!((report.nodes_before, report.nodes_after, report.applied), (4, 3, true));
    assert_eq!(m.ids(), ["v1", "v3", "v4"]);
    assert!(m.has_edge(0, 1) && m.has_edge(1, 2));
}

#[test]
fn merge_once_checks_structure() {
    let g = common::graph("signs_branch_graph");
    assert_eq!(merge_once(&g, "v1'", "v2'").unwrap().node_count(), 3);
    // v2' has two successors
    assert_eq!(merge_once(&g, "v2'", "v3'"), Err(Error::NotMergeable("v2'".into(), "v3'".into())));
    assert_eq!(merge_once(&g, "v1'", "v3'"), Err(Error::NotMergeable("v1'".into(), "v3'".into())));
    assert_eq!(merge_once(&g, "zz", "v3'"), Err(Error::UnknownNode("zz".into())));
}

#[test]
fn wildcard_edge_disables_merging() {
    use WildcardKind::*;
    let p = common::pat(&[("S", Some(Seq1Plus)), ("G", Some(Sub1Plus))], &[("S", "G")]);
    let g = common::chain(5);
    assert_eq!(mergeable_edges(&g, &p), Err(Error::WildcardEdge));
    let (m, report) = merge_fixpoint(&g, &p);
    assert_eq!(m, g);
    assert!(!report.applied && report.merged_pairs.is_empty());
}

#[test]
fn chains_collapse_to_one_interior_node() {
    let p = wildcard_pattern(1);
    for interior in [2, 5, 20] {
        let g = chain_graph(interior);
        let (m, report) = merge_fixpoint(&g, &p);
        assert_eq!(m.node_count(), 3, "interior {interior}");
        assert_eq!(report.merged_pairs.len(), interior - 1);
        assert_eq!(common::sat(&p, &g, true).verdict, Verdict::Match);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn merging_never_grows_and_keeps_the_verdict(seed in any::<u64>()) {
        let inst = &small_suite(seed, 1, SmallParams::default())[0];
        let (p, g) = (&inst.pattern, &inst.graph);
        let (m, report) = merge_fixpoint(g, p);
        prop_assert!(m.node_count() <= g.node_count());
        prop_assert!(m.edge_count() <= g.edge_count());
        prop_assert_eq!(g.node_count() - m.node_count(), report.merged_pairs.len());
        prop_assert_eq!(g.edge_count() - m.edge_count(), report.merged_pairs.len());
        // fixpoint: nothing left to merge
        if !p.has_wildcard_edge() {
            prop_assert!(mergeable_edges(&m, p).unwrap().is_empty());
            let off = common::sat(p, g, false).verdict;
            let on = common::sat(p, g, true);
            prop_assert_eq!(on.verdict, off);
            if let Some(w) = &on.witness {
                prop_assert!(regap::witness::check_witness(p, g, w).is_ok());
            }
        }
    }
}
