//! Weighted independence polynomial `Y_S`, the cluster-expansion condition
//! `p_i ≤ y_i / Y_{Γ⁺(i)}`, and a fixed-point search for the weights `y`.

use std::collections::HashMap;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::graph::{Graph, VertexSet};
use crate::numeric::{rationalize, NumericPolicy, Rational, Scalar, Sign};
use crate::shearer::{
    breve_q_table, check_oracle_cap, check_table_cap, CoefficientTable, ProbVector, TableKind,
};

/// Strictly positive per-vertex weights.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightVector<S> {
    y: Vec<S>,
}

impl<S: Scalar> WeightVector<S> {
    pub fn new(y: Vec<S>) -> Result<Self> {
        for (i, v) in y.iter().enumerate() {
            let positive = *v > S::zero();
            if !positive {
                return Err(Error::NonPositiveWeight {
                    vertex: i + 1,
                    value: format!("{v:?}"),
                });
            }
        }
        Ok(WeightVector { y })
    }

    pub fn uniform(n: usize, value: S) -> Result<Self> {
        Self::new(vec![value; n])
    }

    #[inline]
    pub fn get(&self, i: usize) -> &S {
        &self.y[i]
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    pub fn as_slice(&self) -> &[S] {
        &self.y
    }

    fn check_len(&self, g: &Graph) -> Result<()> {
        if self.y.len() != g.n() {
            Err(Error::LengthMismatch {
                expected: g.n(),
                got: self.y.len(),
            })
        } else {
            Ok(())
        }
    }
}

/// Memoized evaluator of `Y_S` for one graph and one weight vector.
///
/// Each query splits `S` into induced components and multiplies; a connected
/// `S` is expanded with `Y_S = Y_{S-a} + y_a Y_{S \ Γ⁺(a)}` at its lowest
/// member `a`.
pub struct YEvaluator<'g, S> {
    graph: &'g Graph,
    y: Vec<S>,
    cache: HashMap<VertexSet, S>,
}

impl<'g, S: Scalar> YEvaluator<'g, S> {
    pub fn new(graph: &'g Graph, y: &WeightVector<S>) -> Result<Self> {
        y.check_len(graph)?;
        Ok(YEvaluator {
            graph,
            y: y.y.clone(),
            cache: HashMap::new(),
        })
    }

    /// Unchecked constructor for the search loop, where weights are positive
    /// by construction.
    fn from_raw(graph: &'g Graph, y: Vec<S>) -> Self {
        YEvaluator {
            graph,
            y,
            cache: HashMap::new(),
        }
    }

    /// Replaces the weights and drops every cached value.
    pub fn set_weights(&mut self, y: &WeightVector<S>) -> Result<()> {
        y.check_len(self.graph)?;
        self.y.clone_from(&y.y);
        self.cache.clear();
        Ok(())
    }

    pub fn cached(&self) -> usize {
        self.cache.len()
    }

    pub fn eval(&mut self, s: VertexSet) -> S {
        if s.is_empty() {
            return S::one();
        }
        if let Some(v) = self.cache.get(&s) {
            return v.clone();
        }
        let parts = self.graph.induced_components(s);
        let value = if parts.len() > 1 {
            parts
                .into_iter()
                .fold(S::one(), |acc, part| acc * self.eval(part))
        } else {
            let a = s.first().expect("nonempty");
            let without = self.eval(s.without(a));
            let outside = self.eval(s.difference(self.graph.closed(a)));
            without + self.y[a].clone() * outside
        };
        self.cache.insert(s, value.clone());
        value
    }
}

/// `Y_S(y)`.
pub fn independence_polynomial<S: Scalar>(g: &Graph, s: VertexSet, y: &WeightVector<S>) -> Result<S> {
    Ok(YEvaluator::new(g, y)?.eval(s))
}

/// `Y_S` for every `S ⊆ [n]`, by a forward pass in canonical order.
pub fn y_table<S: Scalar>(g: &Graph, y: &WeightVector<S>) -> Result<CoefficientTable<S>> {
    y.check_len(g)?;
    let n = g.n();
    check_table_cap(n)?;
    let size = 1usize << n;
    let mut entries: Vec<S> = Vec::with_capacity(size);
    entries.push(S::one());
    for idx in 1..size {
        let a = idx.trailing_zeros() as usize;
        let without_a = idx & !(1usize << a);
        let outside = idx & !(g.closed(a).bits() as usize);
        let v = entries[without_a].clone() + y.get(a).clone() * entries[outside].clone();
        entries.push(v);
    }
    Ok(CoefficientTable::from_entries(TableKind::Y, n, entries))
}

/// `1 / Y_[n](y)`.
pub fn cluster_bound<S: Scalar>(g: &Graph, y: &WeightVector<S>) -> Result<S> {
    let total = independence_polynomial(g, g.vertices(), y)?;
    Ok(S::one() / total)
}

#[derive(Clone, Debug)]
pub struct ClusterReport<S> {
    pub holds: bool,
    /// `y_i / Y_{Γ⁺(i)} - p_i` per vertex.
    pub slack: Vec<S>,
    /// `1 / Y_[n]`, present iff `holds`.
    pub bound: Option<S>,
    pub y_used: WeightVector<S>,
}

impl<S: Scalar> ClusterReport<S> {
    /// Index of the vertex with the smallest slack.
    pub fn tightest_vertex(&self) -> Option<usize> {
        (0..self.slack.len()).min_by(|&a, &b| {
            self.slack[a]
                .partial_cmp(&self.slack[b])
                .unwrap_or(std::cmp::Ordering::Equal)
        })
    }

    pub fn to_json(&self) -> Value {
        json!({
            "holds": self.holds,
            "bound": self.bound.as_ref().map(Scalar::to_json),
            "slack": self.slack.iter().map(Scalar::to_json).collect::<Vec<_>>(),
            "y": self.y_used.as_slice().iter().map(Scalar::to_json).collect::<Vec<_>>(),
            "mode": S::MODE.as_str(),
        })
    }
}

/// Checks the cluster-expansion condition at every vertex.
pub fn check_cluster<S: Scalar>(
    g: &Graph,
    p: &ProbVector<S>,
    y: &WeightVector<S>,
    policy: &NumericPolicy,
) -> Result<ClusterReport<S>> {
    p.check_len(g)?;
    let mut eval = YEvaluator::new(g, y)?;
    let mut slack = Vec::with_capacity(g.n());
    let mut holds = true;
    for i in 0..g.n() {
        let local = eval.eval(g.closed(i));
        let s = y.get(i).clone() / local - p.get(i).clone();
        if s.sign(policy)? == Sign::Negative {
            holds = false;
        }
        slack.push(s);
    }
    let bound = if holds {
        Some(S::one() / eval.eval(g.vertices()))
    } else {
        None
    };
    Ok(ClusterReport {
        holds,
        slack,
        bound,
        y_used: y.clone(),
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct SearchOptions {
    /// Stop when every coordinate's relative change is below this.
    pub tol: f64,
    /// Give up once any weight exceeds this.
    pub cap: f64,
    pub max_iter: usize,
    /// Relative inflation of `p` during the search, so the converged `y`
    /// satisfies the condition with room to spare. A failed inflated search
    /// is retried with no inflation.
    pub margin: f64,
    /// Search target for vertices with `p_i = 0`, keeping their `y_i > 0`.
    pub inert_floor: f64,
    /// Zero band of the float-mode validation.
    pub epsilon: f64,
    /// Relative accuracy of the rationalized weights used for exact validation.
    pub rationalize_tol: f64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            tol: 1e-10,
            cap: 1e6,
            max_iter: 10_000,
            margin: 1e-6,
            inert_floor: 1e-9,
            epsilon: crate::numeric::DEFAULT_EPSILON,
            rationalize_tol: 1e-12,
        }
    }
}

impl SearchOptions {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidArgument(msg));
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return bad(format!("tol must be positive, got {}", self.tol));
        }
        if self.cap.is_nan() || self.cap <= 1.0 {
            return bad(format!("cap must exceed 1, got {}", self.cap));
        }
        if self.max_iter == 0 {
            return bad("max_iter must be positive".into());
        }
        if !(self.margin >= 0.0 && self.margin < 1.0) {
            return bad(format!("margin must lie in [0, 1), got {}", self.margin));
        }
        if !(self.inert_floor > 0.0 && self.inert_floor < 1.0) {
            return bad(format!("inert_floor must lie in (0, 1), got {}", self.inert_floor));
        }
        if [self.epsilon, self.rationalize_tol].iter().any(|v| v.is_nan() || *v <= 0.0) {
            return bad("epsilon and rationalize_tol must be positive".into());
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SearchStatus {
    /// Converged and re-validated in exact arithmetic.
    Certified,
    /// Converged and valid in float mode; the rationalized weights failed the
    /// exact check.
    FloatOnly,
    /// Some weight exceeded the cap.
    Diverged,
    IterationLimit,
    /// Some `p_i = 1`; no positive weights can satisfy the condition there.
    UnitProbability,
    /// Converged, but the float check of the limit failed.
    ValidationFailed,
}

impl SearchStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            SearchStatus::Certified => "certified",
            SearchStatus::FloatOnly => "float-only",
            SearchStatus::Diverged => "no certificate found (diverged past cap)",
            SearchStatus::IterationLimit => "no certificate found (iteration limit)",
            SearchStatus::UnitProbability => "no certificate found (some p_i = 1)",
            SearchStatus::ValidationFailed => "no certificate found (limit failed validation)",
        }
    }
}

/// Outcome of [`find_y`]. `converged` implies the float check holds.
#[derive(Clone, Debug)]
pub struct Certificate {
    pub y: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub status: SearchStatus,
    /// Inflation of `p` under which the returned weights were found.
    pub margin_used: f64,
    pub float_report: Option<ClusterReport<f64>>,
    pub exact_report: Option<ClusterReport<Rational>>,
}

impl Certificate {
    fn failed(status: SearchStatus, iterations: usize, y: Vec<f64>, margin: f64) -> Self {
        Certificate {
            y,
            iterations,
            converged: false,
            status,
            margin_used: margin,
            float_report: None,
            exact_report: None,
        }
    }

    pub fn is_certified(&self) -> bool {
        self.converged
    }

    /// Exactly validated weights, if any.
    pub fn exact_y(&self) -> Option<&WeightVector<Rational>> {
        self.exact_report.as_ref().map(|r| &r.y_used)
    }

    /// JSON report. Exact fields are used when exact validation succeeded.
    pub fn to_json(&self) -> Value {
        let (y, holds, bound, slack, mode) = match (&self.exact_report, &self.float_report) {
            (Some(r), _) => (
                r.y_used.as_slice().iter().map(Scalar::to_json).collect::<Vec<_>>(),
                r.holds,
                r.bound.as_ref().map(Scalar::to_json),
                r.slack.iter().map(Scalar::to_json).collect::<Vec<_>>(),
                "exact",
            ),
            (None, Some(r)) => (
                self.y.iter().map(Scalar::to_json).collect(),
                r.holds,
                r.bound.as_ref().map(Scalar::to_json),
                r.slack.iter().map(Scalar::to_json).collect(),
                "float",
            ),
            (None, None) => (
                self.y.iter().map(Scalar::to_json).collect(),
                false,
                None,
                Vec::new(),
                "float",
            ),
        };
        json!({
            "y": y,
            "converged": self.converged,
            "iterations": self.iterations,
            "holds": holds,
            "bound": bound,
            "slack": slack,
            "status": self.status.as_str(),
            "mode": mode,
        })
    }
}

struct Iteration {
    y: Vec<f64>,
    iterations: usize,
    status: Option<SearchStatus>,
}

/// Monotone iteration `y ← target ⊙ Y_{Γ⁺(·)}(y)` from `y = target`.
fn iterate(g: &Graph, target: &[f64], opts: &SearchOptions) -> Iteration {
    let n = g.n();
    let mut y = target.to_vec();
    for t in 1..=opts.max_iter {
        let mut eval = YEvaluator::from_raw(g, y.clone());
        let next: Vec<f64> = (0..n).map(|i| target[i] * eval.eval(g.closed(i))).collect();
        debug_assert!(
            next.iter().zip(&y).all(|(a, b)| a >= b),
            "fixed-point iterates must be nondecreasing"
        );
        if next.iter().any(|&v| v.is_nan() || v > opts.cap) {
            return Iteration {
                y: next,
                iterations: t,
                status: Some(SearchStatus::Diverged),
            };
        }
        let settled = next
            .iter()
            .zip(&y)
            .all(|(&a, &b)| (a - b).abs() <= opts.tol * a);
        y = next;
        if settled {
            return Iteration {
                y,
                iterations: t,
                status: None,
            };
        }
    }
    Iteration {
        y,
        iterations: opts.max_iter,
        status: Some(SearchStatus::IterationLimit),
    }
}

/// Iterates in float and validates the limit in float only.
pub fn find_y_float(g: &Graph, p: &ProbVector<f64>, opts: &SearchOptions) -> Result<Certificate> {
    opts.validate()?;
    p.check_len(g)?;
    let probs = p.as_slice();
    if probs.iter().any(|&v| v >= 1.0) {
        return Ok(Certificate::failed(SearchStatus::UnitProbability, 0, probs.to_vec(), 0.0));
    }
    let margins: &[f64] = if opts.margin > 0.0 { &[opts.margin, 0.0] } else { &[0.0] };
    let mut last = None;
    for &margin in margins {
        let target: Vec<f64> = probs
            .iter()
            .map(|&v| if v > 0.0 { v * (1.0 + margin) } else { opts.inert_floor })
            .collect();
        let run = iterate(g, &target, opts);
        if let Some(status) = run.status {
            last = Some(Certificate::failed(status, run.iterations, run.y, margin));
            continue;
        }
        // Without inflation the limit sits on the boundary and is approached
        // from below, so it can only be validated to within `tol`.
        let eps = if margin > 0.0 { opts.epsilon } else { opts.epsilon.max(opts.tol) };
        let policy = NumericPolicy::float(eps)?;
        let y = WeightVector::new(run.y.clone())?;
        let report = check_cluster(g, p, &y, &policy)?;
        if report.holds {
            return Ok(Certificate {
                y: run.y,
                iterations: run.iterations,
                converged: true,
                status: SearchStatus::FloatOnly,
                margin_used: margin,
                float_report: Some(report),
                exact_report: None,
            });
        }
        last = Some(Certificate::failed(
            SearchStatus::ValidationFailed,
            run.iterations,
            run.y,
            margin,
        ));
    }
    Ok(last.expect("at least one attempt"))
}

/// Searches for weights certifying the cluster-expansion condition.
///
/// The search runs in float. A converged `y` is rationalized and checked
/// against the exact `p`; failing that check leaves the certificate at
/// [`SearchStatus::FloatOnly`]. A non-converged outcome means no certificate
/// was found, not that the condition is false.
pub fn find_y(g: &Graph, p: &ProbVector<Rational>, opts: &SearchOptions) -> Result<Certificate> {
    let mut cert = find_y_float(g, &p.to_float(), opts)?;
    if !cert.converged {
        return Ok(cert);
    }
    let exact: Vec<Rational> = cert
        .y
        .iter()
        .map(|&v| rationalize(v, opts.rationalize_tol))
        .collect::<Result<_>>()?;
    if let Ok(y) = WeightVector::new(exact) {
        let report = check_cluster(g, p, &y, &NumericPolicy::exact())?;
        if report.holds {
            cert.status = SearchStatus::Certified;
            cert.exact_report = Some(report);
        }
    }
    Ok(cert)
}

/// Result of comparing the `q̆` and `Y` ratio chains.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatioCheck {
    /// First `(S, a)` with `q̆_S/q̆_{S-a} < Y_{S^c}/Y_{(S-a)^c}`.
    pub witness: Option<(VertexSet, usize)>,
    /// `q̆_[n] ≥ 1/Y_[n]`.
    pub bound_ok: bool,
}

impl RatioCheck {
    pub fn holds(&self) -> bool {
        self.witness.is_none() && self.bound_ok
    }
}

/// Checks `q̆_S/q̆_{S-a} ≥ Y_{S^c}/Y_{(S-a)^c}` for all `a ∈ S` with
/// `q̆_{S-a} > 0`, and `q̆_[n] ≥ 1/Y_[n]`.
pub fn verify_cluster_vs_shearer<S: Scalar>(
    g: &Graph,
    p: &ProbVector<S>,
    y: &WeightVector<S>,
    policy: &NumericPolicy,
) -> Result<RatioCheck> {
    check_oracle_cap(g.n())?;
    let n = g.n();
    let bq = breve_q_table(g, p)?;
    let yt = y_table(g, y)?;
    let mut witness = None;
    'outer: for (s, q_s) in bq.iter().skip(1) {
        for a in s.iter() {
            let q_prev = bq.get(s.without(a));
            if q_prev.sign(policy)? != Sign::Positive {
                continue;
            }
            let lhs = q_s.clone() / q_prev.clone();
            let rhs = yt.get(s.complement(n)).clone() / yt.get(s.without(a).complement(n)).clone();
            if !policy.ge(&lhs, &rhs)? {
                witness = Some((s, a));
                break 'outer;
            }
        }
    }
    let bound_ok = policy.ge(bq.full(), &(S::one() / yt.full().clone()))?;
    Ok(RatioCheck { witness, bound_ok })
}
