//! Threshold and rate functions from the almost-sure limit theorems for `M_N`.
//!
//! Every logarithm is taken to base `λ = 1/√(pq)`.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::params::BernoulliParams;

/// `log_λ x`.
pub fn log_lambda(x: f64, params: BernoulliParams) -> Result<f64> {
    if x.is_nan() || x <= 0.0 {
        return domain(format!("log_lambda needs x > 0, got {x}"));
    }
    Ok(x.ln() / params.lambda().ln())
}

/// Smallest integer `N` with `log_λ N > 1`, the point from which the nested
/// logarithms in the threshold formulas are defined.
pub fn min_admissible_n(params: BernoulliParams) -> u64 {
    let mut n = params.lambda().floor().max(1.0) as u64;
    while log_lambda(n as f64, params).expect("n >= 1") <= 1.0 {
        n += 1;
    }
    n
}

/// Arguments of the eventual lower threshold α₁ and the infinitely-often
/// upper threshold α₂.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdSpec {
    epsilon: f64,
    #[serde(rename = "N")]
    n: u64,
    params: BernoulliParams,
}

impl ThresholdSpec {
    pub fn new(epsilon: f64, n: u64, params: BernoulliParams) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return domain(format!(
                "epsilon must be a positive finite number, got {epsilon}"
            ));
        }
        if n < 1 || log_lambda(n as f64, params)? <= 1.0 {
            return domain(format!(
                "threshold needs log_lambda N > 1; N={n} is too small, minimal admissible N is {}",
                min_admissible_n(params)
            ));
        }
        Ok(Self { epsilon, n, params })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn params(&self) -> BernoulliParams {
        self.params
    }

    // log_λ N − log_λ log_λ log_λ N + log_λ log_λ e, shared by both thresholds
    fn common_part(&self) -> f64 {
        let ln_lambda = self.params.lambda().ln();
        let log = |x: f64| x.ln() / ln_lambda;
        let l1 = log(self.n as f64);
        l1 - log(log(l1)) + log(1.0 / ln_lambda)
    }

    /// The α₁ expression before flooring.
    pub fn alpha1_unfloored(&self) -> f64 {
        let log_2 = 2f64.ln() / self.params.lambda().ln();
        self.common_part() - log_2 - 1.0 - self.epsilon
    }

    /// The α₂ expression before flooring.
    pub fn alpha2_unfloored(&self) -> f64 {
        self.common_part() + 1.0 + self.epsilon
    }
}

/// α₁(N): `M_N` is at least this for all large `N`, almost surely.
///
/// Values whose un-floored expression lies within rounding distance of an
/// integer are floored as computed, without nudging.
pub fn alpha1(spec: &ThresholdSpec) -> i64 {
    spec.alpha1_unfloored().floor() as i64
}

/// α₂(N): `M_N` falls below this infinitely often, almost surely.
pub fn alpha2(spec: &ThresholdSpec) -> i64 {
    spec.alpha2_unfloored().floor() as i64
}

/// `M / log_λ N`, which tends to 1 almost surely.
pub fn slln_ratio(m: u64, n: u64, params: BernoulliParams) -> Result<f64> {
    if n < 2 {
        return domain(format!("SLLN ratio needs N >= 2, got N={n}"));
    }
    Ok(m as f64 / log_lambda(n as f64, params)?)
}

/// The sequence `γ_n = a · log_λ n + b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaFamily {
    pub a: f64,
    pub b: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SeriesVerdict {
    Converges,
    Diverges,
}

/// Decides whether `Σ (pq)^(γ_n / 2)` converges.
///
/// `(pq)^(γ_n / 2) = λ^(-γ_n) = λ^(-b) · n^(-a)`, a constant multiple of the
/// p-series with exponent `a`; the offset `b` never changes the verdict.
pub fn classify_gamma_series(family: GammaFamily, _params: BernoulliParams) -> SeriesVerdict {
    if family.a > 1.0 {
        SeriesVerdict::Converges
    } else {
        SeriesVerdict::Diverges
    }
}

/// `γ_n`; meaningful for `n >= 2`.
pub fn gamma_value(family: GammaFamily, n: u64, params: BernoulliParams) -> f64 {
    family.a * (n as f64).ln() / params.lambda().ln() + family.b
}
