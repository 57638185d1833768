//! Explicit finite probability spaces used as ground truth: Shearer's tight
//! instance, variable-model product spaces, and exhaustive checks of every
//! probability-side inequality against them.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use rand::Rng;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::cluster::{y_table, WeightVector};
use crate::error::{Error, Result};
use crate::graph::{Graph, VertexSet};
use crate::instances;
use crate::numeric::{NumericPolicy, Rational, Scalar, Sign};
use crate::shearer::{
    breve_q_table, check_oracle_cap, check_shearer, q_table, CoefficientTable, ProbVector,
    TableKind,
};

/// One outcome: the set of events it lies in, and its probability.
#[derive(Clone, Debug, PartialEq)]
pub struct Atom<S> {
    pub events: VertexSet,
    pub weight: S,
}

/// Finite probability space over events `E_1..E_n`.
#[derive(Clone, Debug, PartialEq)]
pub struct FiniteSpace<S> {
    n: usize,
    atoms: Vec<Atom<S>>,
}

impl<S: Scalar> FiniteSpace<S> {
    /// Validates nonnegative weights summing to one (exactly, or within the
    /// policy tolerance in float mode).
    pub fn new(n: usize, atoms: Vec<Atom<S>>, policy: &NumericPolicy) -> Result<Self> {
        let universe = VertexSet::full(n);
        let mut total = S::zero();
        for (k, atom) in atoms.iter().enumerate() {
            if !atom.events.is_subset(universe) {
                return Err(Error::InvalidSpace(format!(
                    "atom #{} names events outside 1..={n}",
                    k + 1
                )));
            }
            if atom.weight.sign(policy)? == Sign::Negative {
                return Err(Error::InvalidSpace(format!(
                    "atom #{} has negative weight {:?}",
                    k + 1,
                    atom.weight
                )));
            }
            total = total + atom.weight.clone();
        }
        if !policy.eq(&total, &S::one())? {
            return Err(Error::InvalidSpace(format!("weights sum to {total:?}, not 1")));
        }
        Ok(FiniteSpace { n, atoms })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn atoms(&self) -> &[Atom<S>] {
        &self.atoms
    }

    pub fn total_weight(&self) -> S {
        self.atoms
            .iter()
            .fold(S::zero(), |acc, a| acc + a.weight.clone())
    }

    /// `Pr[E_i]`.
    pub fn marginal(&self, i: usize) -> S {
        self.atoms
            .iter()
            .filter(|a| a.events.contains(i))
            .fold(S::zero(), |acc, a| acc + a.weight.clone())
    }

    pub fn to_json(&self) -> Value {
        let atoms: Vec<Value> = self
            .atoms
            .iter()
            .map(|a| serde_json::json!({ "w": a.weight.to_json(), "events": a.events.to_one_based() }))
            .collect();
        serde_json::json!({ "atoms": atoms, "n": self.n })
    }

    /// Reads `{"atoms": [{"w": .., "events": [..]}], "n": ..}`.
    pub fn from_json(document: &str, policy: &NumericPolicy) -> Result<Self> {
        let doc: SpaceDoc = serde_json::from_str(document).map_err(|e| Error::Parse {
            at: format!("line {} column {}", e.line(), e.column()),
            msg: e.to_string(),
        })?;
        let mut atoms = Vec::with_capacity(doc.atoms.len());
        for a in &doc.atoms {
            atoms.push(Atom {
                events: VertexSet::from_one_based(&a.events, doc.n)?,
                weight: S::from_json(&a.w)?,
            });
        }
        FiniteSpace::new(doc.n, atoms, policy)
    }
}

#[derive(Serialize, Deserialize)]
struct AtomDoc {
    w: Value,
    events: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct SpaceDoc {
    atoms: Vec<AtomDoc>,
    n: usize,
}

fn check_space_graph<S>(space: &FiniteSpace<S>, g: &Graph) -> Result<()> {
    if space.n != g.n() {
        return Err(Error::LengthMismatch {
            expected: g.n(),
            got: space.n,
        });
    }
    Ok(())
}

/// Shearer's tight instance: one atom per independent set `I`, weight `q_I`,
/// lying in exactly the events indexed by `I`.
pub fn tight_instance<S: Scalar>(
    g: &Graph,
    p: &ProbVector<S>,
    policy: &NumericPolicy,
) -> Result<FiniteSpace<S>> {
    let report = check_shearer(g, p, policy)?;
    if let Some(v) = report.violating_set {
        return Err(Error::ShearerFails {
            violating: v.to_one_based(),
        });
    }
    let q = q_table(g, p)?;
    let mut atoms = Vec::new();
    for ind in g.independent_subsets(g.vertices()) {
        let w = q.get(ind).clone();
        if w.sign(policy)? == Sign::Negative {
            return Err(Error::NegativeTightWeight {
                set: ind.to_one_based(),
            });
        }
        atoms.push(Atom {
            events: ind,
            weight: w,
        });
    }
    FiniteSpace::new(g.n(), atoms, policy)
}

/// `P̆_A = Pr[no event of A occurs]`, by direct summation.
pub fn prob_none<S: Scalar>(space: &FiniteSpace<S>, a: VertexSet) -> S {
    space
        .atoms
        .iter()
        .filter(|atom| atom.events.is_disjoint(a))
        .fold(S::zero(), |acc, atom| acc + atom.weight.clone())
}

/// `P̆_A` for every `A ⊆ [n]`, via a superset-sum transform.
pub fn prob_none_table<S: Scalar>(space: &FiniteSpace<S>) -> Result<CoefficientTable<S>> {
    let n = space.n;
    crate::shearer::check_table_cap(n)?;
    let size = 1usize << n;
    let mut f = vec![S::zero(); size];
    for atom in &space.atoms {
        let slot = atom.events.complement(n).index();
        f[slot] = f[slot].clone() + atom.weight.clone();
    }
    for b in 0..n {
        let bit = 1usize << b;
        for mask in 0..size {
            if mask & bit == 0 {
                f[mask] = f[mask].clone() + f[mask | bit].clone();
            }
        }
    }
    Ok(CoefficientTable::from_entries(TableKind::BreveP, n, f))
}

/// `Pr[E_i | no event of J occurs]`.
pub fn conditional_prob<S: Scalar>(
    space: &FiniteSpace<S>,
    i: usize,
    j: VertexSet,
    policy: &NumericPolicy,
) -> Result<S> {
    if i >= space.n || j.contains(i) {
        return Err(Error::InvalidArgument(format!(
            "event {} must lie in 1..={} and outside the conditioning set",
            i + 1,
            space.n
        )));
    }
    let denom = prob_none(space, j);
    if denom.sign(policy)? != Sign::Positive {
        return Err(Error::UndefinedConditional);
    }
    let joint = space
        .atoms
        .iter()
        .filter(|a| a.events.contains(i) && a.events.is_disjoint(j))
        .fold(S::zero(), |acc, a| acc + a.weight.clone());
    Ok(joint / denom)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LopsidedReport {
    /// Every defined conditional is at most `p_i`.
    pub holds: bool,
    /// Every defined conditional equals `Pr[E_i]` (independence from non-neighbors).
    pub equality: bool,
    /// First `(i, J)` with a conditional above `p_i`.
    pub witness: Option<(usize, VertexSet)>,
    pub checked: usize,
    /// Conditionals skipped because `P̆_J = 0`.
    pub skipped_null: usize,
}

/// Checks `Pr[E_i | ⋂_{j∈J} Ē_j] ≤ p_i` for every `i` and every
/// `J ⊆ [n] \ Γ⁺(i)`.
pub fn check_lopsided_condition<S: Scalar>(
    space: &FiniteSpace<S>,
    g: &Graph,
    p: &ProbVector<S>,
    policy: &NumericPolicy,
) -> Result<LopsidedReport> {
    check_space_graph(space, g)?;
    p.check_len(g)?;
    check_oracle_cap(g.n())?;
    let none = prob_none_table(space)?;
    let mut report = LopsidedReport {
        holds: true,
        equality: true,
        witness: None,
        checked: 0,
        skipped_null: 0,
    };
    for i in 0..g.n() {
        let marginal = space.marginal(i);
        let far = g.closed(i).complement(g.n());
        for j in far.subsets() {
            let denom = none.get(j);
            if denom.sign(policy)? != Sign::Positive {
                report.skipped_null += 1;
                continue;
            }
            report.checked += 1;
            let cond = (denom.clone() - none.get(j.with(i)).clone()) / denom.clone();
            if !policy.ge(p.get(i), &cond)? {
                report.holds = false;
                report.witness.get_or_insert((i, j));
            }
            if !policy.eq(&cond, &marginal)? {
                report.equality = false;
            }
        }
    }
    Ok(report)
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoundReport<S> {
    /// `min_A (P̆_A - q̆_A)`.
    pub worst_gap: S,
    /// First `A` attaining the minimum.
    pub worst_set: VertexSet,
    pub all_hold: bool,
}

/// Computes `P̆_A - q̆_A` for every `A`.
pub fn verify_bound<S: Scalar>(
    space: &FiniteSpace<S>,
    g: &Graph,
    p: &ProbVector<S>,
    policy: &NumericPolicy,
) -> Result<BoundReport<S>> {
    check_space_graph(space, g)?;
    check_oracle_cap(g.n())?;
    let none = prob_none_table(space)?;
    let bq = breve_q_table(g, p)?;
    let mut worst: Option<(S, VertexSet)> = None;
    for (a, q) in bq.iter() {
        let gap = none.get(a).clone() - q.clone();
        let better = match &worst {
            None => true,
            Some((w, _)) => gap < *w,
        };
        if better {
            worst = Some((gap, a));
        }
    }
    let (worst_gap, worst_set) = worst.expect("table is nonempty");
    let all_hold = worst_gap.sign(policy)? != Sign::Negative;
    Ok(BoundReport {
        worst_gap,
        worst_set,
        all_hold,
    })
}

/// `P̆_A ≥ P̆_{A-a} - p_a P̆_{A \ Γ⁺(a)}` for all `A` and `a ∈ A`.
pub fn verify_fundamental_inequality<S: Scalar>(
    space: &FiniteSpace<S>,
    g: &Graph,
    p: &ProbVector<S>,
    policy: &NumericPolicy,
) -> Result<bool> {
    check_space_graph(space, g)?;
    p.check_len(g)?;
    check_oracle_cap(g.n())?;
    let none = prob_none_table(space)?;
    for (a_set, v) in none.iter().skip(1) {
        for a in a_set.iter() {
            let rhs = none.get(a_set.without(a)).clone()
                - p.get(a).clone() * none.get(a_set.difference(g.closed(a))).clone();
            if !policy.ge(v, &rhs)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// First `(A, a)` with `P̆_A/P̆_{A-a} < q̆_A/q̆_{A-a}`, among pairs with
/// `q̆_{A-a} > 0`. Meaningful when Shearer's condition holds.
pub fn find_shearer_ratio_violation<S: Scalar>(
    space: &FiniteSpace<S>,
    g: &Graph,
    p: &ProbVector<S>,
    policy: &NumericPolicy,
) -> Result<Option<(VertexSet, usize)>> {
    check_space_graph(space, g)?;
    check_oracle_cap(g.n())?;
    let none = prob_none_table(space)?;
    let bq = breve_q_table(g, p)?;
    for (a_set, q_a) in bq.iter().skip(1) {
        for a in a_set.iter() {
            let prev = a_set.without(a);
            let q_prev = bq.get(prev);
            if q_prev.sign(policy)? != Sign::Positive {
                continue;
            }
            let p_prev = none.get(prev);
            if p_prev.sign(policy)? != Sign::Positive {
                return Ok(Some((a_set, a)));
            }
            let lhs = none.get(a_set).clone() / p_prev.clone();
            let rhs = q_a.clone() / q_prev.clone();
            if !policy.ge(&lhs, &rhs)? {
                return Ok(Some((a_set, a)));
            }
        }
    }
    Ok(None)
}

/// First `(S, a)` violating `P̆_S > 0` and
/// `P̆_S/P̆_{S-a} ≥ Y_{S^c}/Y_{(S-a)^c}`. Meaningful when `(p, y)` satisfy the
/// cluster-expansion condition.
pub fn find_cluster_ratio_violation<S: Scalar>(
    space: &FiniteSpace<S>,
    g: &Graph,
    y: &WeightVector<S>,
    policy: &NumericPolicy,
) -> Result<Option<(VertexSet, usize)>> {
    check_space_graph(space, g)?;
    check_oracle_cap(g.n())?;
    let n = g.n();
    let none = prob_none_table(space)?;
    let yt = y_table(g, y)?;
    for (s, p_s) in none.iter().skip(1) {
        if p_s.sign(policy)? != Sign::Positive {
            return Ok(Some((s, s.first().expect("nonempty"))));
        }
        for a in s.iter() {
            let prev = s.without(a);
            let lhs = p_s.clone() / none.get(prev).clone();
            let rhs = yt.get(s.complement(n)).clone() / yt.get(prev.complement(n)).clone();
            if !policy.ge(&lhs, &rhs)? {
                return Ok(Some((s, a)));
            }
        }
    }
    Ok(None)
}

/// Variable-model instance on `g`: a private coin per vertex and a shared coin
/// per edge. `E_i` occurs when vertex `i`'s private coin lands heads and its
/// edge coins satisfy a per-vertex AND or OR rule. Events that share no coin
/// are independent, so the dependency graph is a subgraph of `g`. Returns the
/// space, aggregated by event pattern, and the exact marginals.
pub fn random_product_space(
    g: &Graph,
    seed: u64,
) -> Result<(FiniteSpace<Rational>, ProbVector<Rational>)> {
    check_oracle_cap(g.n())?;
    let n = g.n();
    let mut rng = instances::rng(seed);
    let ratio = |num: i64, den: i64| Rational::new(BigInt::from(num), BigInt::from(den));

    // Bit i of `or_rule` set: E_i needs at least one heads among its edge
    // coins; clear: needs all heads. Isolated vertices use the AND rule.
    let mut or_rule = VertexSet::EMPTY;
    for i in 0..n {
        if g.degree(i) > 0 && rng.gen_bool(0.5) {
            or_rule = or_rule.with(i);
        }
    }
    let and_rule = or_rule.complement(n);

    let mut dist: BTreeMap<u64, Rational> = BTreeMap::new();
    dist.insert(and_rule.bits(), ratio(1, 1));
    let step = |dist: BTreeMap<u64, Rational>,
                    heads: &Rational,
                    on_heads: &dyn Fn(u64) -> u64,
                    on_tails: &dyn Fn(u64) -> u64| {
        let tails = ratio(1, 1) - heads.clone();
        let mut next: BTreeMap<u64, Rational> = BTreeMap::new();
        for (state, w) in dist {
            for (s, pr) in [(on_heads(state), heads), (on_tails(state), &tails)] {
                if pr.numer() == &BigInt::from(0) {
                    continue;
                }
                *next.entry(s).or_insert_with(|| ratio(0, 1)) += w.clone() * pr.clone();
            }
        }
        next
    };

    for (u, v) in g.edges() {
        let heads = ratio(rng.gen_range(1..=3), 4);
        let pair = VertexSet::singleton(u).with(v);
        let or_bits = pair.intersection(or_rule).bits();
        let and_bits = pair.intersection(and_rule).bits();
        dist = step(dist, &heads, &|s| s | or_bits, &|s| s & !and_bits);
    }
    for i in 0..n {
        let heads = ratio(rng.gen_range(1..=4), 8);
        let bit = 1u64 << i;
        dist = step(dist, &heads, &|s| s, &|s| s & !bit);
    }

    let atoms: Vec<Atom<Rational>> = dist
        .into_iter()
        .map(|(state, weight)| Atom {
            events: VertexSet::from_bits(state),
            weight,
        })
        .collect();
    let space = FiniteSpace::new(n, atoms, &NumericPolicy::exact())?;
    let marginals = (0..n).map(|i| space.marginal(i)).collect();
    Ok((space, ProbVector::new(marginals)?))
}
