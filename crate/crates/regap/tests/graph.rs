mod common;

use proptest::prelude::*;

use regap::constraints::{AttrValue, Attrs, CmpOp, Constraint, Operand, PairConstraint};
use regap::error::Error;
use regap::gen::{small_suite, SmallParams};
use regap::graph::{load_graph, load_pattern, neighbors, Direction, Graph, NodeKind, Pattern, WildcardKind};

fn pattern_err(doc: &str) -> Error {
    load_pattern(doc.as_bytes()).unwrap_err()
}

#[test]
fn mixed_neighbours() {
    let g = common::graph("mixed_graph");
    let out: Vec<String> = neighbors(&g, "v4", Direction::Out).unwrap().into_iter().collect();
    assert_eq!(out, ["v5", "v6", "v7"]);
    let p = common::pattern("mixed_pattern");
    let into_b: Vec<String> = neighbors(&p, "B", Direction::In).unwrap().into_iter().collect();
    assert_eq!(into_b, ["C", "S"]);
    assert_eq!(neighbors(&g, "nope", Direction::In), Err(Error::UnknownNode("nope".into())));
}

#[test]
fn ids_are_sorted_and_attrs_kept() {
    let g = load_graph(br#"{"nodes":[{"id":"b","attrs":{"k":"x"}},{"id":"a"}],"edges":[{"src":"b","dst":"a","attrs":{"w":1.5}}]}"#)
        .unwrap();
    assert_eq!(g.ids(), ["a", "b"]);
    assert_eq!(g.node_attrs(1)["k"], AttrValue::Str("x".into()));
    assert_eq!(g.edge_attrs(g.edge_id(1, 0).unwrap())["w"], AttrValue::Float(1.5));
}

#[test]
fn malformed_documents() {
    assert!(matches!(load_graph(b"[1,2]"), Err(Error::Malformed(_))));
    assert!(matches!(load_graph(b"{\"nodes\":[]"), Err(Error::Malformed(_))));
    assert_eq!(
        load_graph(br#"{"nodes":[{"id":"a"},{"id":"a"}],"edges":[]}"#),
        Err(Error::DuplicateNode("a".into()))
    );
    assert_eq!(
        load_graph(br#"{"nodes":[{"id":"a"}],"edges":[{"src":"a","dst":"b"}]}"#),
        Err(Error::DanglingEndpoint { src: "a".into(), dst: "b".into(), missing: "b".into() })
    );
    assert_eq!(
        load_graph(br#"{"nodes":[{"id":"a"}],"edges":[{"src":"a","dst":"a"},{"src":"a","dst":"a"}]}"#),
        Err(Error::DuplicateEdge("a".into(), "a".into()))
    );
}

#[test]
fn pattern_validation() {
    assert_eq!(pattern_err(r#"{"nodes":[{"id":"W","kind":"star"}],"edges":[]}"#), Error::UnknownKind("star".into()));
    assert_eq!(
        pattern_err(r#"{"nodes":[{"id":"W","kind":"sub0plus","constraint":{"op":"has","attr":"x"}}],"edges":[]}"#),
        Error::WildcardConstraint("W".into())
    );
    assert_eq!(
        pattern_err(r#"{"nodes":[{"id":"W","kind":"seq0plus"}],"edges":[{"src":"W","dst":"W"}]}"#),
        Error::WildcardSelfLoop("W".into())
    );
    let pair = |u: &str, v: &str| {
        format!(
            r#"{{"nodes":[{{"id":"A"}},{{"id":"B"}},{{"id":"W","kind":"sub1plus"}}],"edges":[],
                "pair_constraints":[{{"u":"{u}","v":"{v}","constraint":{{"op":"true"}}}}]}}"#
        )
    };
    assert_eq!(pattern_err(&pair("A", "W")), Error::WildcardPair("A".into(), "W".into()));
    assert_eq!(pattern_err(&pair("A", "A")), Error::PairSameNode("A".into()));
    assert!(load_pattern(pair("A", "B").as_bytes()).is_ok());
}

#[test]
fn wildcard_edge_flag() {
    let p = Pattern::builder()
        .wildcard("S", WildcardKind::Seq1Plus)
        .wildcard("G", WildcardKind::Sub0Plus)
        .edge("S", "G")
        .build()
        .unwrap();
    assert!(p.has_wildcard_edge());
    assert!(!common::pattern("mixed_pattern").has_wildcard_edge());
    assert_eq!(p.kind(p.index_of("G").unwrap()), NodeKind::Wildcard(WildcardKind::Sub0Plus));
}

fn attrs() -> impl Strategy<Value = Attrs> {
    let value = prop_oneof![
        (-3i64..3).prop_map(AttrValue::Int),
        any::<bool>().prop_map(AttrValue::Bool),
        "[a-c]{0,2}".prop_map(AttrValue::Str),
        (-4i32..4).prop_map(|x| AttrValue::Float(x as f64 + 0.5)),
    ];
    prop::collection::btree_map("[xyz]", value, 0..3)
}

fn constraint() -> impl Strategy<Value = Constraint> {
    let leaf = prop_oneof![
        Just(Constraint::True),
        "[xyz]".prop_map(Constraint::Has),
        ("[xyz]", 0usize..6, -3i64..3).prop_map(|(a, op, v)| {
            let op = [CmpOp::Eq, CmpOp::Ne, CmpOp::Lt, CmpOp::Le, CmpOp::Gt, CmpOp::Ge][op];
            Constraint::cmp(&a, op, AttrValue::Int(v))
        }),
    ];
    leaf.prop_recursive(3, 12, 3, |inner| {
        prop_oneof![
            prop::collection::vec(inner.clone(), 0..3).prop_map(Constraint::And),
            prop::collection::vec(inner.clone(), 0..3).prop_map(Constraint::Or),
            inner.prop_map(|c| Constraint::Not(Box::new(c))),
        ]
    })
}

fn graph() -> impl Strategy<Value = Graph> {
    (1usize..6).prop_flat_map(|n| {
        (prop::collection::vec(attrs(), n), prop::collection::btree_map((0..n, 0..n), attrs(), 0..n * 2)).prop_map(
            |(nodes, edges)| {
                let mut b = Graph::builder();
                for (i, a) in nodes.into_iter().enumerate() {
                    b.add_node(format!("n{i}"), a);
                }
                for ((u, v), a) in edges {
                    b.add_edge(format!("n{u}"), format!("n{v}"), a);
                }
                b.build().unwrap()
            },
        )
    })
}

proptest! {
    #[test]
    fn graph_json_round_trip(g in graph()) {
        prop_assert_eq!(load_graph(g.to_json_string().as_bytes()).unwrap(), g);
    }

    #[test]
    fn pattern_json_round_trip(seed in any::<u64>()) {
        let inst = &small_suite(seed, 1, SmallParams { constraint_density: 0.7, ..Default::default() })[0];
        let text = inst.pattern.to_json_string();
        let back = load_pattern(text.as_bytes()).unwrap();
        prop_assert_eq!(&back, &inst.pattern);
        prop_assert_eq!(back.to_json_string(), text);
    }

    #[test]
    fn double_negation(c in constraint(), a in attrs()) {
        let nn = Constraint::Not(Box::new(Constraint::Not(Box::new(c.clone()))));
        prop_assert_eq!(nn.eval(&a), c.eval(&a));
    }

    #[test]
    fn de_morgan(x in constraint(), y in constraint(), a in attrs()) {
        let not = |c: Constraint| Constraint::Not(Box::new(c));
        let lhs = not(Constraint::And(vec![x.clone(), y.clone()]));
        let rhs = Constraint::Or(vec![not(x.clone()), not(y.clone())]);
        prop_assert_eq!(lhs.eval(&a), rhs.eval(&a));
        let lhs = not(Constraint::Or(vec![x.clone(), y.clone()]));
        let rhs = Constraint::And(vec![not(x), not(y)]);
        prop_assert_eq!(lhs.eval(&a), rhs.eval(&a));
    }

    #[test]
    fn constraint_json_round_trip(c in constraint(), a in attrs()) {
        let back = Constraint::from_json(&c.to_json()).unwrap();
        prop_assert_eq!(back.eval(&a), c.eval(&a));
        prop_assert_eq!(back.to_json(), c.to_json());
    }

    #[test]
    fn pair_constraint_swaps_roles(u in attrs(), v in attrs(), attr in "[xyz]") {
        let lt = PairConstraint::cmp(Operand::u(&attr), CmpOp::Lt, Operand::v(&attr));
        let gt = PairConstraint::cmp(Operand::v(&attr), CmpOp::Gt, Operand::u(&attr));
        prop_assert_eq!(lt.eval(&u, &v), gt.eval(&u, &v));
        prop_assert_eq!(PairConstraint::from_json(&lt.to_json()).unwrap(), lt);
    }
}
