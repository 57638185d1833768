mod common;

use lll_certify::cluster::{
    check_cluster, cluster_bound, find_y, find_y_float, independence_polynomial,
    verify_cluster_vs_shearer, y_table, SearchOptions, SearchStatus, WeightVector, YEvaluator,
};
use lll_certify::instances::{random_graph, random_probs, random_tree, rng, shrink_to_shearer};
use lll_certify::numeric::{rational, NumericPolicy, Rational};
use lll_certify::shearer::{check_shearer, ProbVector};
use lll_certify::{Graph, VertexSet};
use num_traits::{One, Pow};
use proptest::prelude::*;

use common::{brute_y, instance_strategy, random_weights};

fn exact() -> NumericPolicy {
    NumericPolicy::exact()
}

fn joined(g: &Graph, a: VertexSet, b: VertexSet) -> bool {
    a.iter().any(|i| !g.neighbors(i).is_disjoint(b))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn y_table_matches_enumeration(inst in instance_strategy(8), seed in any::<u64>()) {
        let y = random_weights(inst.n(), seed);
        let table = y_table(&inst.graph, &y).unwrap();
        for (s, v) in table.iter() {
            prop_assert_eq!(v.clone(), brute_y(&inst.graph, y.as_slice(), s.bits()));
        }
    }

    #[test]
    fn evaluator_agrees_with_table(inst in instance_strategy(10), seed in any::<u64>()) {
        let y = random_weights(inst.n(), seed);
        let table = y_table(&inst.graph, &y).unwrap();
        let mut eval = YEvaluator::new(&inst.graph, &y).unwrap();
        for (s, v) in table.iter().step_by(7) {
            prop_assert_eq!(&eval.eval(s), v);
        }
    }

    #[test]
    fn log_subadditive_with_equality_when_unjoined(inst in instance_strategy(8), seed in any::<u64>()) {
        let y = random_weights(inst.n(), seed);
        let table = y_table(&inst.graph, &y).unwrap();
        let full = inst.graph.vertices();
        for a in full.subsets() {
            for b in a.complement(inst.n()).subsets().step_by(3) {
                let lhs = table.get(a.union(b));
                let rhs = table.get(a).clone() * table.get(b).clone();
                prop_assert!(*lhs <= rhs);
                if !joined(&inst.graph, a, b) {
                    prop_assert_eq!(lhs, &rhs);
                }
            }
        }
    }

    #[test]
    fn telescoping_prefix_ratios(inst in instance_strategy(10), seed in any::<u64>()) {
        let y = random_weights(inst.n(), seed);
        let table = y_table(&inst.graph, &y).unwrap();
        let mut product = Rational::one();
        for i in 1..=inst.n() {
            product *= table.get(VertexSet::full(i - 1)).clone() / table.get(VertexSet::full(i)).clone();
        }
        prop_assert_eq!(product, cluster_bound(&inst.graph, &y).unwrap());
    }

    #[test]
    fn closed_neighborhood_bounded_by_star(inst in instance_strategy(12), k in 1..6i64) {
        let d = inst.graph.max_degree() as u32;
        let yv = rational(k, 3);
        let y = WeightVector::uniform(inst.n(), yv.clone()).unwrap();
        let star = yv.clone() + Pow::pow(Rational::one() + yv, d);
        for i in 0..inst.n() {
            let local = independence_polynomial(&inst.graph, inst.graph.closed(i), &y).unwrap();
            prop_assert!(local <= star);
        }
    }
}

#[test]
fn certified_weights_dominate_shearer_chain() {
    for seed in 0..20 {
        let (g, p, y) = common::cluster_instance(700 + seed, 9);
        let check = verify_cluster_vs_shearer(&g, &p, &y, &exact()).unwrap();
        assert!(check.holds(), "seed {seed}: {check:?}");
    }
}

#[test]
fn random_tree_in_certified_range() {
    let g = random_tree(8, &mut rng(11));
    let p = random_probs(8, 10, &rational(1, 4), &mut rng(12));
    let cert = find_y(&g, &p, &SearchOptions::default()).unwrap();
    assert_eq!(cert.status, SearchStatus::Certified);
    let y = cert.exact_y().unwrap();
    assert!(check_cluster(&g, &p, y, &exact()).unwrap().holds);
    assert!(verify_cluster_vs_shearer(&g, &p, y, &exact()).unwrap().holds());
}

#[test]
fn cluster_certificate_implies_shearer() {
    for seed in 0..30 {
        let mut r = rng(900 + seed);
        let g = random_graph(8, 0.4, &mut r);
        let p = random_probs(8, 12, &rational(1, 3), &mut r);
        let cert = find_y(&g, &p, &SearchOptions::default()).unwrap();
        if cert.status == SearchStatus::Certified {
            let shearer = check_shearer(&g, &p, &exact()).unwrap();
            assert!(shearer.holds, "seed {seed}");
            let cluster = cert.exact_report.unwrap().bound.unwrap();
            assert!(shearer.bound.unwrap() >= cluster, "seed {seed}");
        }
    }
}

#[test]
fn search_reports_no_certificate_beyond_shearer() {
    let g = Graph::from_edges(2, &[(1, 2)]).unwrap();
    let p = ProbVector::new(vec![0.6, 0.6]).unwrap();
    let cert = find_y_float(&g, &p, &SearchOptions::default()).unwrap();
    assert!(!cert.converged);
    assert!(cert.status.as_str().starts_with("no certificate found"));
}

#[test]
fn shrunk_instances_eventually_certify() {
    let g = random_graph(7, 0.5, &mut rng(31));
    let p = random_probs(7, 9, &Rational::one(), &mut rng(32));
    let p = shrink_to_shearer(&g, p);
    let half = rational(1, 2);
    let mut p = p;
    for _ in 0..20 {
        if find_y(&g, &p, &SearchOptions::default()).unwrap().status == SearchStatus::Certified {
            return;
        }
        p = ProbVector::new(p.as_slice().iter().map(|v| v.clone() * half.clone()).collect()).unwrap();
    }
    panic!("search never certified a shrinking instance");
}
