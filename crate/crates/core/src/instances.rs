//! Named graphs and seeded random instances for tests, the acceptance suite
//! and the `verify` command.

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::Graph;
use crate::numeric::{NumericPolicy, Rational};
use crate::shearer::{check_shearer, ProbVector};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn build(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Graph {
    let mut g = Graph::empty(n).expect("valid vertex count");
    for (i, j) in edges {
        g.add_edge(i, j);
    }
    g
}

pub fn path(n: usize) -> Graph {
    build(n, (1..n).map(|i| (i - 1, i)))
}

pub fn cycle(n: usize) -> Graph {
    assert!(n >= 3, "cycle needs at least 3 vertices");
    build(n, (0..n).map(|i| (i, (i + 1) % n)))
}

pub fn complete(n: usize) -> Graph {
    build(n, (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))))
}

/// Vertex 0 joined to every other vertex.
pub fn star(n: usize) -> Graph {
    build(n, (1..n).map(|i| (0, i)))
}

/// Outer 5-cycle 0..5, inner pentagram 5..10, spokes `{i, i+5}`.
pub fn petersen() -> Graph {
    let outer = (0..5).map(|i| (i, (i + 1) % 5));
    let inner = (0..5).map(|i| (5 + i, 5 + (i + 2) % 5));
    let spokes = (0..5).map(|i| (i, i + 5));
    build(10, outer.chain(inner).chain(spokes))
}

/// Erdős–Rényi `G(n, edge_prob)`.
pub fn random_graph<R: Rng>(n: usize, edge_prob: f64, rng: &mut R) -> Graph {
    let mut g = Graph::empty(n).expect("valid vertex count");
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(edge_prob) {
                g.add_edge(i, j);
            }
        }
    }
    g
}

/// Random recursive tree: vertex `i` attaches to a uniform earlier vertex.
pub fn random_tree<R: Rng>(n: usize, rng: &mut R) -> Graph {
    let mut g = Graph::empty(n).expect("valid vertex count");
    for i in 1..n {
        let parent = rng.gen_range(0..i);
        g.add_edge(parent, i);
    }
    g
}

/// Independent rationals `k/den` with `den ∈ [2, max_den]`, `k ∈ [1, den)`,
/// each then multiplied by `scale`.
pub fn random_probs<R: Rng>(n: usize, max_den: i64, scale: &Rational, rng: &mut R) -> ProbVector<Rational> {
    let values = (0..n)
        .map(|_| {
            let den = rng.gen_range(2..=max_den);
            let num = rng.gen_range(1..den);
            Rational::new(BigInt::from(num), BigInt::from(den)) * scale.clone()
        })
        .collect();
    ProbVector::new(values).expect("values lie in (0, 1)")
}

/// Halves `p` until Shearer's condition holds strictly (`q̆_[n] > 0`).
pub fn shrink_to_shearer(g: &Graph, mut p: ProbVector<Rational>) -> ProbVector<Rational> {
    let half = Rational::new(BigInt::from(1), BigInt::from(2));
    loop {
        let r = check_shearer(g, &p, &NumericPolicy::exact()).expect("table within cap");
        if r.holds && !r.degenerate {
            return p;
        }
        let scaled = p.as_slice().iter().map(|v| v.clone() * half.clone()).collect();
        p = ProbVector::new(scaled).expect("halving keeps range");
    }
}
