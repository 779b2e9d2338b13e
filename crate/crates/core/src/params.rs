use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// Success probability of an IID Bernoulli trial together with the derived
/// quantities every formula in this crate is written in.
///
/// `lambda = 1 / sqrt(p q)` is the base of all logarithms in the limit
/// theorems; it equals 2 for a fair coin and is at least 2 otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct BernoulliParams {
    p: f64,
    q: f64,
    pq: f64,
    lambda: f64,
}

impl BernoulliParams {
    pub fn new(p: f64) -> Result<Self> {
        if !p.is_finite() || p <= 0.0 || p >= 1.0 {
            return domain(format!(
                "success probability must satisfy 0 < p < 1, got {p}"
            ));
        }
        let q = 1.0 - p;
        let pq = p * q;
        Ok(Self {
            p,
            q,
            pq,
            lambda: 1.0 / pq.sqrt(),
        })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn pq(&self) -> f64 {
        self.pq
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// The same model with heads and tails exchanged.
    pub fn swapped(&self) -> Self {
        Self::new(self.q).expect("q lies in (0, 1) whenever p does")
    }
}

impl TryFrom<f64> for BernoulliParams {
    type Error = crate::Error;

    fn try_from(p: f64) -> Result<Self> {
        Self::new(p)
    }
}

impl From<BernoulliParams> for f64 {
    fn from(params: BernoulliParams) -> f64 {
        params.p
    }
}
