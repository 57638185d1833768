//! Brute-force oracles and seeded instance generators shared by the
//! integration suites.
//!
//! The oracles take `p_i = k_i / D` with a common denominator and work in
//! `i128` scaled by `D^n`, so they share no arithmetic with the library.

#![allow(dead_code)]

use lll_certify::cluster::{find_y, SearchOptions, WeightVector};
use lll_certify::instances::{random_graph, rng, shrink_to_shearer};
use lll_certify::numeric::Rational;
use lll_certify::shearer::ProbVector;
use lll_certify::Graph;
use num_bigint::BigInt;
use rand::Rng;

/// `(graph, numerators, denominator)` with `p_i = k_i / den`.
#[derive(Clone, Debug)]
pub struct Instance {
    pub graph: Graph,
    pub k: Vec<i64>,
    pub den: i64,
}

impl Instance {
    pub fn n(&self) -> usize {
        self.graph.n()
    }

    pub fn p(&self) -> ProbVector<Rational> {
        ProbVector::new(
            self.k
                .iter()
                .map(|&k| Rational::new(BigInt::from(k), BigInt::from(self.den)))
                .collect(),
        )
        .unwrap()
    }

    pub fn p_float(&self) -> ProbVector<f64> {
        ProbVector::new(self.k.iter().map(|&k| k as f64 / self.den as f64).collect()).unwrap()
    }

    /// `D^n`, the oracle's scale.
    pub fn scale(&self) -> i128 {
        (self.den as i128).pow(self.n() as u32)
    }

    /// Converts an oracle integer back to the rational it encodes.
    pub fn unscale(&self, v: i128) -> Rational {
        Rational::new(BigInt::from(v), BigInt::from(self.scale()))
    }
}

/// Adjacency as plain bit masks, built from the edge list.
pub fn adjacency(g: &Graph) -> Vec<u64> {
    let mut adj = vec![0u64; g.n()];
    for (i, j) in g.edges() {
        adj[i] |= 1 << j;
        adj[j] |= 1 << i;
    }
    adj
}

pub fn independent(adj: &[u64], mask: u64) -> bool {
    (0..adj.len()).all(|i| mask >> i & 1 == 0 || adj[i] & mask == 0)
}

/// `D^n · (-1)^{|I|} p^I`.
fn signed_term(inst: &Instance, mask: u64) -> i128 {
    let n = inst.n();
    let mut t: i128 = 1;
    for i in 0..n {
        t *= if mask >> i & 1 == 1 { inst.k[i] as i128 } else { inst.den as i128 };
    }
    if mask.count_ones() % 2 == 1 {
        -t
    } else {
        t
    }
}

/// `D^n · q̆_S` for every `S`, by direct submask enumeration.
pub fn brute_breve_q(inst: &Instance) -> Vec<i128> {
    let n = inst.n();
    let adj = adjacency(&inst.graph);
    let terms: Vec<i128> = (0..1u64 << n)
        .map(|m| if independent(&adj, m) { signed_term(inst, m) } else { 0 })
        .collect();
    (0..1u64 << n)
        .map(|s| {
            let mut acc = 0i128;
            let mut sub = s;
            loop {
                acc += terms[sub as usize];
                if sub == 0 {
                    break;
                }
                sub = (sub - 1) & s;
            }
            acc
        })
        .collect()
}

/// `D^n · q_S` for every `S`: `Σ_{I ⊇ S independent} (-1)^{|I \ S|} p^I`.
pub fn brute_q(inst: &Instance) -> Vec<i128> {
    let n = inst.n();
    let full = (1u64 << n) - 1;
    let adj = adjacency(&inst.graph);
    (0..1u64 << n)
        .map(|s| {
            if !independent(&adj, s) {
                return 0;
            }
            let rest = full & !s;
            let mut acc = 0i128;
            let mut sub = rest;
            loop {
                let i = s | sub;
                if independent(&adj, i) {
                    let t = signed_term(inst, i);
                    acc += if s.count_ones() % 2 == 1 { -t } else { t };
                }
                if sub == 0 {
                    break;
                }
                sub = (sub - 1) & rest;
            }
            acc
        })
        .collect()
}

/// `Y_S` for one `S` by direct enumeration over rationals.
pub fn brute_y(g: &Graph, y: &[Rational], s: u64) -> Rational {
    let adj = adjacency(g);
    let mut acc = Rational::from_integer(0.into());
    let mut sub = s;
    loop {
        if independent(&adj, sub) {
            let mut t = Rational::from_integer(1.into());
            for (i, yi) in y.iter().enumerate() {
                if sub >> i & 1 == 1 {
                    t *= yi.clone();
                }
            }
            acc += t;
        }
        if sub == 0 {
            break;
        }
        sub = (sub - 1) & s;
    }
    acc
}

/// Random graph on `1..=max_n` vertices with `p_i = k_i/D`, `D ∈ [2, 16]`.
pub fn random_instance(seed: u64, max_n: usize) -> Instance {
    let mut r = rng(seed);
    let n = r.gen_range(1..=max_n);
    let edge_prob = r.gen_range(0.15..0.7);
    let graph = random_graph(n, edge_prob, &mut r);
    let den = r.gen_range(2..=16i64);
    let k = (0..n).map(|_| r.gen_range(1..den)).collect();
    Instance { graph, k, den }
}

pub fn random_weights(n: usize, seed: u64) -> WeightVector<Rational> {
    let mut r = rng(seed ^ 0x9e37_79b9);
    WeightVector::new(
        (0..n)
            .map(|_| {
                let den = r.gen_range(1..=9i64);
                Rational::new(BigInt::from(r.gen_range(1..=12i64)), BigInt::from(den))
            })
            .collect(),
    )
    .unwrap()
}

/// Random instance shrunk until Shearer's condition holds strictly.
pub fn shearer_instance(seed: u64, max_n: usize) -> (Graph, ProbVector<Rational>) {
    let inst = random_instance(seed, max_n);
    let p = shrink_to_shearer(&inst.graph, inst.p());
    (inst.graph, p)
}

/// Random instance shrunk until the fixed-point search certifies it exactly.
pub fn cluster_instance(seed: u64, max_n: usize) -> (Graph, ProbVector<Rational>, WeightVector<Rational>) {
    let inst = random_instance(seed, max_n);
    let half = Rational::new(1.into(), 2.into());
    let mut p = inst.p();
    loop {
        let cert = find_y(&inst.graph, &p, &SearchOptions::default()).unwrap();
        if let Some(y) = cert.exact_y() {
            return (inst.graph, p, y.clone());
        }
        p = ProbVector::new(p.as_slice().iter().map(|v| v.clone() * half.clone()).collect()).unwrap();
    }
}

/// Proptest strategy: graph on `1..=max_n` vertices from an edge mask, with
/// `p_i = k_i / den`.
pub fn instance_strategy(max_n: usize) -> impl proptest::strategy::Strategy<Value = Instance> {
    use proptest::prelude::*;
    (1..=max_n, 2..=12i64)
        .prop_flat_map(|(n, den)| {
            let pairs = n * (n - 1) / 2;
            (
                Just(n),
                Just(den),
                proptest::collection::vec(any::<bool>(), pairs),
                proptest::collection::vec(1..den, n),
            )
        })
        .prop_map(|(n, den, mask, k)| {
            let mut graph = Graph::empty(n).unwrap();
            let mut bits = mask.into_iter();
            for i in 0..n {
                for j in i + 1..n {
                    if bits.next().unwrap() {
                        graph.add_edge(i, j);
                    }
                }
            }
            Instance { graph, k, den }
        })
}
