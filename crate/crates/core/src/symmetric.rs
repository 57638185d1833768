//! Symmetric thresholds: uniform `p` on a graph of maximum degree `d`.
//!
//! All thresholds are exact rationals except `1/(ed)`, which stays in `f64`.

use std::f64::consts::E;

use num_bigint::BigInt;
use num_traits::{One, Pow};
use serde_json::{json, Value};

use crate::cluster::{check_cluster, ClusterReport, WeightVector};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::numeric::{rational_from_f64, NumericPolicy, Rational, Scalar};
use crate::shearer::ProbVector;

#[derive(Clone, Debug, PartialEq)]
pub struct ThresholdSet {
    pub d: u64,
    /// `1/(4d)`.
    pub erdos_lovasz: Rational,
    /// `d^d / (d+1)^(d+1)`.
    pub spencer: Rational,
    /// `(d-1)^(d-1) / d^d`.
    pub shearer: Rational,
    /// `1/(ed)`.
    pub cluster_ed: f64,
}

impl ThresholdSet {
    pub fn to_json(&self) -> Value {
        json!({
            "d": self.d,
            "erdos_lovasz": self.erdos_lovasz.to_json(),
            "spencer": self.spencer.to_json(),
            "shearer": self.shearer.to_json(),
            "cluster_ed": self.cluster_ed,
        })
    }
}

fn check_degree(d: u64) -> Result<()> {
    if d < 2 {
        Err(Error::DegreeTooSmall { d: d as usize })
    } else {
        Ok(())
    }
}

fn power(base: u64, exp: u64) -> BigInt {
    Pow::pow(BigInt::from(base), exp)
}

pub fn symmetric_thresholds(d: u64) -> Result<ThresholdSet> {
    check_degree(d)?;
    Ok(ThresholdSet {
        d,
        erdos_lovasz: Rational::new(BigInt::one(), BigInt::from(4 * d)),
        spencer: Rational::new(power(d, d), power(d + 1, d + 1)),
        shearer: Rational::new(power(d - 1, d - 1), power(d, d)),
        cluster_ed: 1.0 / (E * d as f64),
    })
}

/// `1/d + (d/(d-1))^(d-1)`, evaluated stably for large `d`.
pub fn symm_rhs(d: u64) -> Result<f64> {
    check_degree(d)?;
    let df = d as f64;
    Ok(1.0 / df + (-(df - 1.0) * (-1.0 / df).ln_1p()).exp())
}

/// `e - (1/d + (d/(d-1))^(d-1))`; positive when the inequality holds.
pub fn symm_margin(d: u64) -> Result<f64> {
    Ok(E - symm_rhs(d)?)
}

/// True iff `e ≥ 1/d + (d/(d-1))^(d-1)` in float with tolerance `1e-12`.
pub fn check_symm_inequality(d: u64) -> Result<bool> {
    Ok(symm_margin(d)? >= -crate::numeric::DEFAULT_EPSILON)
}

/// `y / (y + (1+y)^d)` at `y = 1/(d-1)`.
pub fn uniform_local_ratio(d: u64) -> Result<Rational> {
    check_degree(d)?;
    let y = Rational::new(BigInt::one(), BigInt::from(d - 1));
    let one_plus: Rational = Rational::one() + y.clone();
    Ok(y.clone() / (y + Pow::pow(one_plus, d as u32)))
}

/// `1 / (1 + d^d / (d-1)^(d-1))`.
pub fn uniform_local_closed_form(d: u64) -> Result<Rational> {
    check_degree(d)?;
    let frac = Rational::new(power(d, d), power(d - 1, d - 1));
    Ok((Rational::one() + frac).recip())
}

/// A rational no smaller than `1/(ed)`, within `1e-15` of it.
pub fn cluster_threshold_upper(d: u64) -> Result<Rational> {
    check_degree(d)?;
    let approx = rational_from_f64(1.0 / (E * d as f64))?;
    Ok(approx + rational_from_f64(1e-15)?)
}

/// Uniform `p = p_val` and `y = 1/(d-1)`, with `d` the graph's maximum degree,
/// checked against the cluster-expansion condition.
pub fn symmetric_certificate<S: Scalar>(
    g: &Graph,
    p_val: S,
    policy: &NumericPolicy,
) -> Result<ClusterReport<S>> {
    let d = g.max_degree() as u64;
    check_degree(d)?;
    let y_val = S::from_rational(&Rational::new(BigInt::one(), BigInt::from(d - 1)));
    let p = ProbVector::uniform(g.n(), p_val)?;
    let y = WeightVector::uniform(g.n(), y_val)?;
    check_cluster(g, &p, &y, policy)
}
