//! Shearer coefficients `q̆_S` and `q_S`, and the decision procedure for
//! Shearer's condition.
//!
//! The `q̆` table is filled in increasing canonical order with the pivot
//! recursion `q̆_A = q̆_{A-a} - p_a q̆_{A \ Γ⁺(a)}`, `a` the lowest member of
//! `A`. Both operands have smaller encodings than `A`, so a single forward
//! pass suffices.

use std::time::{Duration, Instant};

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::graph::{Graph, VertexSet};
use crate::numeric::{NumericPolicy, Rational, Scalar, Sign};

/// Largest `n` for which a full `2^n` table is built.
pub const TABLE_CAP: usize = 24;

/// Largest `n` for the exhaustive all-subsets verifications.
pub const ORACLE_CAP: usize = 12;

pub(crate) fn check_table_cap(n: usize) -> Result<()> {
    if n > TABLE_CAP {
        Err(Error::TableCap { n, cap: TABLE_CAP })
    } else {
        Ok(())
    }
}

pub(crate) fn check_oracle_cap(n: usize) -> Result<()> {
    if n > ORACLE_CAP {
        Err(Error::TableCap { n, cap: ORACLE_CAP })
    } else {
        Ok(())
    }
}

/// Per-vertex event probability bounds, each in `[0, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbVector<S> {
    p: Vec<S>,
}

impl<S: Scalar> ProbVector<S> {
    pub fn new(p: Vec<S>) -> Result<Self> {
        for (i, v) in p.iter().enumerate() {
            let in_range = *v >= S::zero() && *v <= S::one();
            if !in_range {
                return Err(Error::InvalidProbability {
                    vertex: i + 1,
                    value: format!("{v:?}"),
                });
            }
        }
        Ok(ProbVector { p })
    }

    pub fn uniform(n: usize, value: S) -> Result<Self> {
        Self::new(vec![value; n])
    }

    #[inline]
    pub fn get(&self, i: usize) -> &S {
        &self.p[i]
    }

    pub fn len(&self) -> usize {
        self.p.len()
    }

    pub fn is_empty(&self) -> bool {
        self.p.is_empty()
    }

    pub fn as_slice(&self) -> &[S] {
        &self.p
    }

    /// `∏_{i ∈ s} p_i`.
    pub fn product(&self, s: VertexSet) -> S {
        s.iter().fold(S::one(), |acc, i| acc * self.p[i].clone())
    }

    pub(crate) fn check_len(&self, g: &Graph) -> Result<()> {
        if self.p.len() != g.n() {
            Err(Error::LengthMismatch {
                expected: g.n(),
                got: self.p.len(),
            })
        } else {
            Ok(())
        }
    }

    pub fn to_json(&self) -> Value {
        json!({ "values": self.p.iter().map(Scalar::to_json).collect::<Vec<_>>() })
    }
}

impl ProbVector<Rational> {
    pub fn to_float(&self) -> ProbVector<f64> {
        ProbVector {
            p: self.p.iter().map(Scalar::to_f64).collect(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TableKind {
    BreveQ,
    Q,
    Y,
    /// `P̆_A` of a concrete probability space.
    BreveP,
}

/// One scalar per subset of `[n]`, indexed by canonical encoding.
#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientTable<S> {
    kind: TableKind,
    n: usize,
    entries: Vec<S>,
}

impl<S: Scalar> CoefficientTable<S> {
    pub(crate) fn from_entries(kind: TableKind, n: usize, entries: Vec<S>) -> Self {
        debug_assert_eq!(entries.len(), 1usize << n);
        CoefficientTable { kind, n, entries }
    }

    #[inline]
    pub fn get(&self, s: VertexSet) -> &S {
        &self.entries[s.index()]
    }

    pub fn kind(&self) -> TableKind {
        self.kind
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// The entry for `[n]`.
    pub fn full(&self) -> &S {
        self.entries.last().expect("table has 2^n >= 2 entries")
    }

    /// `(S, value)` pairs in canonical order.
    pub fn iter(&self) -> impl Iterator<Item = (VertexSet, &S)> {
        self.entries
            .iter()
            .enumerate()
            .map(|(k, v)| (VertexSet::from_bits(k as u64), v))
    }
}

/// `q̆_S` for every `S ⊆ [n]`.
pub fn breve_q_table<S: Scalar>(g: &Graph, p: &ProbVector<S>) -> Result<CoefficientTable<S>> {
    p.check_len(g)?;
    let n = g.n();
    check_table_cap(n)?;
    let size = 1usize << n;
    let mut entries: Vec<S> = Vec::with_capacity(size);
    entries.push(S::one());
    for idx in 1..size {
        let a = idx.trailing_zeros() as usize;
        let without_a = idx & !(1usize << a);
        let outside = idx & !(g.closed(a).bits() as usize);
        let v = entries[without_a].clone() - p.get(a).clone() * entries[outside].clone();
        entries.push(v);
    }
    Ok(CoefficientTable::from_entries(TableKind::BreveQ, n, entries))
}

/// `q_S = Σ_{I ∈ Ind, S ⊆ I} (-1)^{|I \ S|} p^I`, by enumeration of `Ind(G)`.
pub fn q_table<S: Scalar>(g: &Graph, p: &ProbVector<S>) -> Result<CoefficientTable<S>> {
    p.check_len(g)?;
    let n = g.n();
    check_table_cap(n)?;
    let mut entries = vec![S::zero(); 1usize << n];
    for ind in g.independent_subsets(g.vertices()) {
        let weight = p.product(ind);
        for s in ind.subsets() {
            let slot = &mut entries[s.index()];
            let term = weight.clone();
            *slot = if (ind.len() - s.len()) % 2 == 0 {
                slot.clone() + term
            } else {
                slot.clone() - term
            };
        }
    }
    Ok(CoefficientTable::from_entries(TableKind::Q, n, entries))
}

#[derive(Clone, Debug)]
pub struct TableStats {
    pub entries: usize,
    pub elapsed: Duration,
}

#[derive(Clone, Debug)]
pub struct ShearerReport<S> {
    pub n: usize,
    pub holds: bool,
    /// First `S` (canonical order) with `q̆_S < 0`.
    pub violating_set: Option<VertexSet>,
    /// `q̆_[n]`, present iff `holds`.
    pub bound: Option<S>,
    /// Holds with `q̆_[n] = 0`: the certified lower bound is vacuous.
    pub degenerate: bool,
    pub stats: TableStats,
}

impl<S: Scalar> ShearerReport<S> {
    pub fn to_json(&self) -> Value {
        json!({
            "holds": self.holds,
            "bound": self.bound.as_ref().map(Scalar::to_json),
            "violating_set": self.violating_set.map(VertexSet::to_one_based),
            "n": self.n,
            "mode": S::MODE.as_str(),
            "degenerate": self.degenerate,
        })
    }
}

/// Decides `q̆_S ≥ 0 ∀S` and returns the report along with the table.
pub fn check_shearer_with_table<S: Scalar>(
    g: &Graph,
    p: &ProbVector<S>,
    policy: &NumericPolicy,
) -> Result<(ShearerReport<S>, CoefficientTable<S>)> {
    let start = Instant::now();
    let table = breve_q_table(g, p)?;
    let mut violating_set = None;
    for (s, v) in table.iter() {
        if v.sign(policy)? == Sign::Negative {
            violating_set = Some(s);
            break;
        }
    }
    let holds = violating_set.is_none();
    let bound = holds.then(|| table.full().clone());
    let degenerate = match &bound {
        Some(b) => b.sign(policy)? == Sign::Zero,
        None => false,
    };
    let report = ShearerReport {
        n: g.n(),
        holds,
        violating_set,
        bound,
        degenerate,
        stats: TableStats {
            entries: table.len(),
            elapsed: start.elapsed(),
        },
    };
    Ok((report, table))
}

pub fn check_shearer<S: Scalar>(
    g: &Graph,
    p: &ProbVector<S>,
    policy: &NumericPolicy,
) -> Result<ShearerReport<S>> {
    check_shearer_with_table(g, p, policy).map(|(r, _)| r)
}

/// Checks `q̆_S = Σ_{T ⊆ [n] \ S} q_T` for every `S`, and `q̆_[n] = q_∅`.
pub fn verify_q_breveq_relation<S: Scalar>(
    g: &Graph,
    p: &ProbVector<S>,
    policy: &NumericPolicy,
) -> Result<bool> {
    check_oracle_cap(g.n())?;
    let breve = breve_q_table(g, p)?;
    let q = q_table(g, p)?;
    let n = g.n();
    // Subset-sum transform: after pass `i`, entry `U` sums `q_T` over the
    // `T ⊆ U` that agree with `U` outside bits `0..=i`.
    let mut below: Vec<S> = q.iter().map(|(_, v)| v.clone()).collect();
    for i in 0..n {
        let bit = 1usize << i;
        for u in 0..below.len() {
            if u & bit != 0 {
                let lower = below[u ^ bit].clone();
                below[u] = below[u].clone() + lower;
            }
        }
    }
    for (s, bq) in breve.iter() {
        let sum = &below[s.complement(n).index()];
        if !policy.eq(bq, sum)? {
            return Ok(false);
        }
    }
    policy.eq(breve.full(), q.get(VertexSet::EMPTY))
}

/// First `(A, a)` at which the pivot identity fails, trying every `a ∈ A`.
pub fn find_identity_violation<S: Scalar>(
    g: &Graph,
    p: &ProbVector<S>,
    table: &CoefficientTable<S>,
    policy: &NumericPolicy,
) -> Result<Option<(VertexSet, usize)>> {
    for (a_set, v) in table.iter().skip(1) {
        for a in a_set.iter() {
            let rhs = table.get(a_set.without(a)).clone()
                - p.get(a).clone() * table.get(a_set.difference(g.closed(a))).clone();
            if !policy.eq(v, &rhs)? {
                return Ok(Some((a_set, a)));
            }
        }
    }
    Ok(None)
}

/// When every entry is strictly positive, checks `q̆_A ≤ q̆_{A-a}` for all
/// `a ∈ A`. Returns `None` if the table is not strictly positive.
pub fn ratio_chain_holds<S: Scalar>(
    table: &CoefficientTable<S>,
    policy: &NumericPolicy,
) -> Result<Option<bool>> {
    for (_, v) in table.iter() {
        if v.sign(policy)? != Sign::Positive {
            return Ok(None);
        }
    }
    for (a_set, v) in table.iter().skip(1) {
        for a in a_set.iter() {
            if !policy.ge(table.get(a_set.without(a)), v)? {
                return Ok(Some(false));
            }
        }
    }
    Ok(Some(true))
}

/// `q̆_S = ∏_j q̆_{P_j}` over the induced components of every `S`.
pub fn components_factorize<S: Scalar>(
    g: &Graph,
    table: &CoefficientTable<S>,
    policy: &NumericPolicy,
) -> Result<bool> {
    for (s, v) in table.iter() {
        let prod = g
            .induced_components(s)
            .into_iter()
            .fold(S::one(), |acc, part| acc * table.get(part).clone());
        if !policy.eq(v, &prod)? {
            return Ok(false);
        }
    }
    Ok(true)
}
