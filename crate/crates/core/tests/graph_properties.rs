mod common;

use lll_certify::{parse_graph, Error, VertexSet};
use proptest::prelude::*;

use common::{adjacency, independent, instance_strategy};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn closed_neighborhood_is_neighbors_plus_self(inst in instance_strategy(12)) {
        let g = &inst.graph;
        for i in 0..g.n() {
            let c = g.closed_neighborhood(i).unwrap();
            prop_assert!(c.contains(i));
            prop_assert_eq!(c, g.neighbors(i).with(i));
        }
    }

    #[test]
    fn enumeration_counts_independent_subsets(inst in instance_strategy(10)) {
        let g = &inst.graph;
        let adj = adjacency(g);
        for s in g.vertices().subsets() {
            let listed = g.independent_subsets(s);
            let counted = s.subsets().filter(|t| independent(&adj, t.bits())).count();
            prop_assert_eq!(listed.len(), counted);
            prop_assert!(listed.iter().all(|t| t.is_subset(s) && independent(&adj, t.bits())));
        }
    }

    #[test]
    fn independence_splits_over_components(inst in instance_strategy(9)) {
        let g = &inst.graph;
        for s in g.vertices().subsets().step_by(5) {
            let parts = g.induced_components(s);
            let union = parts.iter().fold(VertexSet::EMPTY, |acc, p| acc.union(*p));
            prop_assert_eq!(union, s);
            for t in s.subsets() {
                let split = parts.iter().all(|p| g.is_independent(t.intersection(*p)));
                prop_assert_eq!(g.is_independent(t), split);
            }
        }
    }

    #[test]
    fn edge_list_and_json_agree(inst in instance_strategy(10)) {
        let g = &inst.graph;
        let mut text = format!("# generated\nn {}\n", g.n());
        for (i, j) in g.edges() {
            text.push_str(&format!("{} {}\n", i + 1, j + 1));
        }
        let from_list = parse_graph(&text).unwrap();
        let json = lll_certify::graph::graph_to_json(g).to_string();
        let from_json = parse_graph(&json).unwrap();
        prop_assert_eq!(&from_list, g);
        prop_assert_eq!(&from_json, g);
    }
}

#[test]
fn malformed_inputs_name_their_location() {
    let err = parse_graph("n 3\n1 2\n2 7\n").unwrap_err();
    assert!(matches!(err, Error::VertexOutOfRange { vertex: 7, n: 3, .. }), "{err}");
    assert!(err.to_string().contains("line 3"), "{err}");

    let err = parse_graph(r#"{"n": 3, "edges": [[1, 2], [2, 2]]}"#).unwrap_err();
    assert!(matches!(err, Error::SelfLoop { vertex: 2, .. }), "{err}");

    assert!(matches!(parse_graph(r#"{"n": 65, "edges": []}"#), Err(Error::VertexCount { .. })));
    assert!(parse_graph("1 2\n").is_err());
    assert!(parse_graph(r#"{"n": 2, "edges": [], "extra": 1}"#).is_err());
}
