//! Acceptance gate. Runs each criterion in isolation, prints one PASS/FAIL
//! line per criterion with its wall time, and exits non-zero on any failure.

mod common;

use std::panic;
use std::path::PathBuf;
use std::process::Command;
use std::time::Instant;

use lll_certify::cluster::{check_cluster, cluster_bound, y_table, WeightVector};
use lll_certify::graph::graph_to_json;
use lll_certify::instances::{cycle, complete, petersen, rng};
use lll_certify::numeric::{rational, rationalize, NumericPolicy, Rational, Scalar, Sign};
use lll_certify::oracle::{
    check_lopsided_condition, find_cluster_ratio_violation, prob_none, tight_instance,
    verify_bound, verify_fundamental_inequality,
};
use lll_certify::shearer::{
    breve_q_table, check_shearer, find_identity_violation, q_table, verify_q_breveq_relation,
    ProbVector,
};
use lll_certify::symmetric::{check_symm_inequality, symmetric_certificate, symmetric_thresholds};
use lll_certify::{Graph, VertexSet};
use num_traits::{One, Zero};
use rand::Rng;

use common::{brute_breve_q, brute_q, random_instance, random_weights};

type Outcome = Result<(), String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        let ok: bool = $cond;
        if !ok {
            return Err(format!($($fmt)+));
        }
    };
}

const RANDOM_INSTANCES: u64 = 200;

fn table_matches_definition() -> Outcome {
    for seed in 0..RANDOM_INSTANCES {
        let inst = random_instance(seed, 12);
        let table = breve_q_table(&inst.graph, &inst.p()).map_err(|e| e.to_string())?;
        let oracle = brute_breve_q(&inst);
        for (s, v) in table.iter() {
            ensure!(
                *v == inst.unscale(oracle[s.index()]),
                "seed {seed}: q̆ at {s} is {v}, brute force gives {}",
                inst.unscale(oracle[s.index()])
            );
        }
    }
    Ok(())
}

fn y_identity_violation(g: &Graph, y: &WeightVector<Rational>) -> Option<(VertexSet, usize)> {
    let table = y_table(g, y).unwrap();
    for (a_set, v) in table.iter().skip(1) {
        for a in a_set.iter() {
            let rhs = table.get(a_set.without(a)).clone()
                + y.get(a).clone() * table.get(a_set.difference(g.closed(a))).clone();
            if *v != rhs {
                return Some((a_set, a));
            }
        }
    }
    None
}

fn identities_at_all_pivots() -> Outcome {
    let exact = NumericPolicy::exact();
    for seed in 0..RANDOM_INSTANCES {
        let inst = random_instance(seed, 12);
        let p = inst.p();
        let table = breve_q_table(&inst.graph, &p).unwrap();
        let bad = find_identity_violation(&inst.graph, &p, &table, &exact).unwrap();
        ensure!(bad.is_none(), "seed {seed}: q̆ identity fails at {bad:?}");
        let y = random_weights(inst.n(), seed);
        let bad = y_identity_violation(&inst.graph, &y);
        ensure!(bad.is_none(), "seed {seed}: Y identity fails at {bad:?}");
    }
    Ok(())
}

fn q_breveq_bridge() -> Outcome {
    let exact = NumericPolicy::exact();
    for seed in 0..RANDOM_INSTANCES {
        let inst = random_instance(seed, 12);
        let p = inst.p();
        ensure!(
            verify_q_breveq_relation(&inst.graph, &p, &exact).unwrap(),
            "seed {seed}: q/q̆ relation fails"
        );
        let q = q_table(&inst.graph, &p).unwrap();
        let bq = breve_q_table(&inst.graph, &p).unwrap();
        ensure!(q.get(VertexSet::EMPTY) == bq.full(), "seed {seed}: q̆_[n] ≠ q_∅");
        let oracle = brute_q(&inst);
        for (s, v) in q.iter() {
            ensure!(*v == inst.unscale(oracle[s.index()]), "seed {seed}: q at {s} disagrees with brute force");
        }
    }
    Ok(())
}

fn tight_instance_suite() -> Outcome {
    let exact = NumericPolicy::exact();
    for seed in 0..100 {
        let (g, p) = common::shearer_instance(1000 + seed, 10);
        let space = tight_instance(&g, &p, &exact).map_err(|e| format!("seed {seed}: {e}"))?;
        ensure!(
            space.atoms().iter().all(|a| a.weight >= Rational::zero()),
            "seed {seed}: negative atom weight"
        );
        ensure!(space.total_weight() == Rational::one(), "seed {seed}: weights sum to {}", space.total_weight());
        for i in 0..g.n() {
            ensure!(space.marginal(i) == *p.get(i), "seed {seed}: Pr[E_{}] ≠ p", i + 1);
        }
        let lop = check_lopsided_condition(&space, &g, &p, &exact).unwrap();
        ensure!(lop.holds && lop.equality, "seed {seed}: lopsided check {lop:?}");
        let b = verify_bound(&space, &g, &p, &exact).unwrap();
        ensure!(b.all_hold && b.worst_gap.is_zero(), "seed {seed}: worst gap {}", b.worst_gap);
        ensure!(
            verify_fundamental_inequality(&space, &g, &p, &exact).unwrap(),
            "seed {seed}: fundamental inequality fails"
        );
    }
    Ok(())
}

fn cluster_soundness() -> Outcome {
    let exact = NumericPolicy::exact();
    for seed in 0..100 {
        let (g, p, y) = common::cluster_instance(2000 + seed, 10);
        let report = check_cluster(&g, &p, &y, &exact).unwrap();
        ensure!(report.holds, "seed {seed}: certified weights fail the exact check");
        let bound = cluster_bound(&g, &y).unwrap();
        let space = tight_instance(&g, &p, &exact).map_err(|e| format!("seed {seed}: {e}"))?;
        ensure!(prob_none(&space, g.vertices()) >= bound, "seed {seed}: P̆_[n] < 1/Y_[n]");
        let chain = find_cluster_ratio_violation(&space, &g, &y, &exact).unwrap();
        ensure!(chain.is_none(), "seed {seed}: ratio chain fails at {chain:?}");
        let shearer = check_shearer(&g, &p, &exact).unwrap();
        ensure!(
            shearer.bound.as_ref().is_some_and(|b| *b >= bound),
            "seed {seed}: q̆_[n] < 1/Y_[n]"
        );
    }
    Ok(())
}

fn symmetric_numbers() -> Outcome {
    let t = symmetric_thresholds(2).unwrap();
    ensure!(t.erdos_lovasz == rational(1, 8), "1/(4d) at d=2 is {}", t.erdos_lovasz);
    ensure!(t.spencer == rational(4, 27), "spencer at d=2 is {}", t.spencer);
    ensure!(t.shearer == rational(1, 4), "shearer at d=2 is {}", t.shearer);
    ensure!((t.cluster_ed - 0.183940).abs() < 1e-6, "1/(2e) is {}", t.cluster_ed);
    ensure!((t.cluster_ed - 1.0 / (2.0 * std::f64::consts::E)).abs() < 1e-9, "1/(2e) is {}", t.cluster_ed);

    let mut r = rng(6);
    let span = (1e6f64).ln() - 2f64.ln();
    for _ in 0..50 {
        let d = (2f64.ln() + r.gen::<f64>() * span).exp().round() as u64;
        let d = d.clamp(2, 1_000_000);
        ensure!(check_symm_inequality(d).unwrap(), "inequality fails at d = {d}");
    }
    ensure!(check_symm_inequality(2).unwrap() && check_symm_inequality(1_000_000).unwrap(), "endpoint fails");

    let float = NumericPolicy::float(1e-12).unwrap();
    let exact = NumericPolicy::exact();
    for (name, g) in [("C5", cycle(5)), ("K4", complete(4)), ("Petersen", petersen())] {
        let d = g.max_degree() as f64;
        let p = 1.0 / (std::f64::consts::E * d);
        let report = symmetric_certificate(&g, p, &float).unwrap();
        ensure!(report.holds, "{name}: float certificate fails");
        let p_exact = rationalize(p, 1e-12).unwrap();
        let report = symmetric_certificate(&g, p_exact, &exact).unwrap();
        ensure!(report.holds, "{name}: exact certificate fails");
    }
    Ok(())
}

fn boundary_behavior() -> Outcome {
    let exact = NumericPolicy::exact();
    let k2 = complete(2);
    let half = rational(1, 2);
    let p = ProbVector::new(vec![half.clone(), half.clone()]).unwrap();
    let r = check_shearer(&k2, &p, &exact).unwrap();
    ensure!(r.holds && r.degenerate, "K2 at (1/2,1/2): {r:?}");
    ensure!(r.bound == Some(Rational::zero()), "bound is {:?}", r.bound);
    ensure!(r.to_json()["degenerate"] == serde_json::json!(true), "JSON lacks degenerate flag");

    let p = ProbVector::new(vec![half.clone() + rational(1, 1_000_000), half]).unwrap();
    let r = check_shearer(&k2, &p, &exact).unwrap();
    ensure!(!r.holds && r.violating_set.is_some(), "K2 just above 1/2 should be violated");
    Ok(())
}

fn numeric_mode_agreement() -> Outcome {
    let exact = NumericPolicy::exact();
    let float = NumericPolicy::float(1e-12).unwrap();
    let tolerance = (1u64 << 20) as f64 * f64::EPSILON;
    let sign_floor = 1e3 * float.epsilon;
    for seed in 0..12 {
        let inst = random_instance(3000 + seed, 16);
        let e = breve_q_table(&inst.graph, &inst.p()).unwrap();
        let f = breve_q_table(&inst.graph, &inst.p_float()).unwrap();
        for ((s, ev), (_, fv)) in e.iter().zip(f.iter()) {
            let ef = ev.to_f64();
            ensure!(
                (fv - ef).abs() <= tolerance * ef.abs().max(1.0),
                "seed {seed}: {s} float {fv} vs exact {ef}"
            );
            if ef.abs() > sign_floor {
                let es = ev.sign(&exact).unwrap();
                ensure!(fv.sign(&float).unwrap() == es, "seed {seed}: sign flip at {s}");
                ensure!(es != Sign::Zero, "nonzero exact value reported zero");
            }
        }
    }
    Ok(())
}

fn write_fixture(name: &str, contents: &str) -> PathBuf {
    let path = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

fn cli_determinism() -> Outcome {
    let graph = write_fixture("acceptance_petersen.json", &graph_to_json(&petersen()).to_string());
    let graph = graph.to_str().unwrap();
    let runs: [&[&str]; 6] = [
        &["check-shearer", "--graph", graph, "--p", "1/10"],
        &["check-cluster", "--graph", graph, "--p", "1/10", "--y", "1/5"],
        &["find-y", "--graph", graph, "--p", "1/10", "--mode", "exact"],
        &["compare", "--graph", graph, "--p", "1/10"],
        &["verify", "--graph", graph, "--seed", "4"],
        &["thresholds", "--d", "2..6"],
    ];
    for args in runs {
        let outputs: Vec<Vec<u8>> = (0..2)
            .map(|_| {
                Command::new(env!("CARGO_BIN_EXE_lll-certify"))
                    .args(args)
                    .output()
                    .expect("binary runs")
                    .stdout
            })
            .collect();
        ensure!(!outputs[0].is_empty(), "{args:?}: empty output");
        serde_json::from_slice::<serde_json::Value>(&outputs[0])
            .map_err(|e| format!("{args:?}: not JSON: {e}"))?;
        ensure!(outputs[0] == outputs[1], "{args:?}: outputs differ between runs");
    }
    Ok(())
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("q̆ table equals brute-force alternating sums", table_matches_definition),
        ("q̆ and Y pivot identities at every pivot", identities_at_all_pivots),
        ("q/q̆ relation and q̆_[n] = q_∅", q_breveq_bridge),
        ("tight instance: weights, marginals, dependency, bound", tight_instance_suite),
        ("cluster certificates sound against Shearer and the tight instance", cluster_soundness),
        ("symmetric thresholds, inequality and certificates", symmetric_numbers),
        ("K2 boundary: degenerate at 1/2, violated just above", boundary_behavior),
        ("float and exact q̆ tables agree", numeric_mode_agreement),
        ("CLI JSON reports are byte-identical across runs", cli_determinism),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failures = 0;
    for (idx, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = panic::catch_unwind(check).unwrap_or_else(|payload| {
            let msg = payload
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| payload.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            Err(format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(()) => println!("PASS  criterion {}: {name} ({secs:.2}s)", idx + 1),
            Err(why) => {
                failures += 1;
                println!("FAIL  criterion {}: {name} ({secs:.2}s): {why}", idx + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}
