//! Exact probabilities and two-sided bounds for the longest switch run.
//!
//! All quantities depend on the model only through `pq`, so every function
//! here is invariant under exchanging `p` and `q`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::format::format_probability;
use crate::params::BernoulliParams;
use crate::switches::longest_switch_run_of;

/// Absolute tolerance for float comparisons of probabilities.
pub const PROBABILITY_TOLERANCE: f64 = 1e-12;

/// Largest `N` accepted by the brute-force enumeration (2^N outcomes).
pub const ENUMERATION_CAP: usize = 24;

/// Probability that a window of `t` trials is fully alternating, i.e. holds
/// `t - 1` consecutive switches: `(pq)^⌊t/2⌋` for odd `t`, twice that for even `t`.
pub fn p_full_alternation(t: usize, params: BernoulliParams) -> Result<f64> {
    if t < 1 {
        return domain("window length t must be at least 1");
    }
    let base = params.pq().powi((t / 2) as i32);
    Ok(if t % 2 == 1 { base } else { 2.0 * base })
}

// P(M_2K >= K-1) for even K.
fn reach_even_form(k: usize, pq: f64) -> f64 {
    let k_f = k as f64;
    (k_f + 2.0) * pq.powf(k_f / 2.0) - 2.0 * pq.powi(k as i32)
}

// P(M_2K >= K-1) for odd K.
fn reach_odd_form(k: usize, pq: f64) -> f64 {
    let k_f = k as f64;
    (k_f + 1.0 - 2.0 * k_f * pq) * pq.powf((k_f - 1.0) / 2.0)
        - (1.0 - 2.0 * pq) * pq.powi(k as i32 - 1)
}

/// `P(M_2K^(m) >= K - 1)`: the chance that `2K` consecutive trials contain a
/// block of `K - 1` consecutive switches. Does not depend on `m`.
pub fn p_window2k_reach(k: usize, params: BernoulliParams) -> Result<f64> {
    if k < 1 {
        return domain("K must be at least 1");
    }
    let pq = params.pq();
    Ok(if k.is_multiple_of(2) {
        reach_even_form(k, pq)
    } else {
        reach_odd_form(k, pq)
    })
}

/// Lower and upper bounds on `P(M_N < K - 1)`, valid for `N >= 2K`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundEnvelope {
    pub lower: f64,
    pub upper: f64,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "K")]
    pub k: usize,
}

impl BoundEnvelope {
    pub fn contains(&self, probability: f64) -> bool {
        self.lower - PROBABILITY_TOLERANCE <= probability
            && probability <= self.upper + PROBABILITY_TOLERANCE
    }
}

// Bases of the bound powers are probabilities; anything further than the
// tolerance outside [0, 1] means a formula is wrong, not that the input is.
fn checked_unit(value: f64, what: &str, n: usize, k: usize) -> Result<f64> {
    if !(-PROBABILITY_TOLERANCE..=1.0 + PROBABILITY_TOLERANCE).contains(&value) {
        return Err(Error::InternalConsistency(format!(
            "{what} = {value} outside [0, 1] for N={n}, K={k}"
        )));
    }
    Ok(value.clamp(0.0, 1.0))
}

/// Two-sided envelope on `P(M_N < K - 1)`:
///
/// ```text
/// lower = (1 - (K+1-2Kpq)(pq)^((K-1)/2) + (1-2pq)(pq)^(K-1)) ^ (⌊N/K⌋ - 1)
/// upper = (1 - (K+2)(pq)^(K/2) + 2(pq)^K) ^ ((⌊N/K⌋ - 1) / 2)
/// ```
///
/// The lower bound uses the odd-`K` reach formula and the upper bound the
/// even-`K` one regardless of the parity of `K`.
pub fn bounds_mn_less(n: usize, k: usize, params: BernoulliParams) -> Result<BoundEnvelope> {
    if k < 1 || n < 2 * k {
        return domain(format!("bounds need N >= 2K >= 2, got N={n}, K={k}"));
    }
    let pq = params.pq();
    let blocks = (n / k - 1) as f64;
    let lower_base = checked_unit(1.0 - reach_odd_form(k, pq), "lower-bound base", n, k)?;
    let upper_base = checked_unit(1.0 - reach_even_form(k, pq), "upper-bound base", n, k)?;
    let lower = checked_unit(lower_base.powf(blocks), "lower bound", n, k)?;
    let upper = checked_unit(upper_base.powf(blocks / 2.0), "upper bound", n, k)?;
    if lower > upper + PROBABILITY_TOLERANCE {
        return Err(Error::InternalConsistency(format!(
            "lower bound {lower} exceeds upper bound {upper} for N={n}, K={k}"
        )));
    }
    Ok(BoundEnvelope { lower, upper, n, k })
}

/// [`bounds_mn_less`] with the lower exponent raised to `⌈N/K⌉ - 1`.
///
/// The 2K-trial blocks behind the lower bound start at multiples of `K`;
/// `⌊N/K⌋ - 1` of them leave the last `N mod K` trials uncovered, and the
/// lower bound of [`bounds_mn_less`] then exceeds the true probability (e.g. `N = 5`,
/// `K = 2`, `p = 1/2`: bound 1/8, exact 1/16). One more block restores
/// coverage. Both envelopes coincide when `K` divides `N`.
pub fn covering_bounds_mn_less(
    n: usize,
    k: usize,
    params: BernoulliParams,
) -> Result<BoundEnvelope> {
    let base = bounds_mn_less(n, k, params)?;
    let blocks = (n.div_ceil(k) - 1) as f64;
    let lower_base = checked_unit(
        1.0 - reach_odd_form(k, params.pq()),
        "lower-bound base",
        n,
        k,
    )?;
    let lower = checked_unit(lower_base.powf(blocks), "lower bound", n, k)?;
    Ok(BoundEnvelope { lower, ..base })
}

/// `P(M_N < K - 1)` by an absorbing dynamic program over (last outcome,
/// current run of consecutive switches), in O(N K) time.
pub fn exact_mn_cdf(n: usize, k: usize, params: BernoulliParams) -> Result<f64> {
    if n < 1 || k < 1 {
        return domain(format!(
            "exact CDF needs N >= 1 and K >= 1, got N={n}, K={k}"
        ));
    }
    Ok(*exact_mn_cdf_series(n, k, params)?.last().expect("n >= 1"))
}

/// `P(M_n < K - 1)` for every `n = 1..=n_max`, from a single DP sweep.
/// Element `i` holds the value for `n = i + 1`.
pub fn exact_mn_cdf_series(n_max: usize, k: usize, params: BernoulliParams) -> Result<Vec<f64>> {
    if n_max < 1 || k < 1 {
        return domain(format!(
            "exact CDF needs N >= 1 and K >= 1, got N={n_max}, K={k}"
        ));
    }
    if k == 1 {
        return Ok(vec![0.0; n_max]);
    }
    let (p, q) = (params.p(), params.q());
    let states = k - 1;
    // ends_one[c] / ends_zero[c]: mass of surviving paths whose last trial is
    // 1 / 0 and that end in exactly c consecutive switches.
    let mut ends_one = vec![0.0; states];
    let mut ends_zero = vec![0.0; states];
    ends_one[0] = p;
    ends_zero[0] = q;
    let mut out = Vec::with_capacity(n_max);
    out.push(1.0);
    let mut next_one = vec![0.0; states];
    let mut next_zero = vec![0.0; states];
    for n in 2..=n_max {
        let total_one: f64 = ends_one.iter().sum();
        let total_zero: f64 = ends_zero.iter().sum();
        next_one[0] = p * total_one;
        next_zero[0] = q * total_zero;
        // a switch out of the top state reaches K-1 and is absorbed
        for c in 1..states {
            next_zero[c] = q * ends_one[c - 1];
            next_one[c] = p * ends_zero[c - 1];
        }
        std::mem::swap(&mut ends_one, &mut next_one);
        std::mem::swap(&mut ends_zero, &mut next_zero);
        if k > n {
            out.push(1.0);
        } else {
            out.push(ends_one.iter().sum::<f64>() + ends_zero.iter().sum::<f64>());
        }
    }
    Ok(out)
}

/// Exact law of `M_N` for one `(N, p)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExactDistribution {
    #[serde(rename = "N")]
    pub n: usize,
    pub p: f64,
    /// `pmf[m] = P(M_N = m)` for `m = 0..N`.
    #[serde(skip)]
    pub pmf: Vec<f64>,
    /// `cdf[K - 1] = P(M_N < K - 1)` for `K = 1..=N+1`.
    pub cdf: Vec<f64>,
}

impl ExactDistribution {
    fn from_pmf(n: usize, p: f64, pmf: Vec<f64>) -> Self {
        let mut cdf = Vec::with_capacity(n + 1);
        let mut acc = 0.0;
        cdf.push(0.0);
        for mass in &pmf {
            acc += mass;
            cdf.push(acc);
        }
        Self { n, p, pmf, cdf }
    }

    /// `P(M_N < K - 1)`; `None` outside `K = 1..=N+1`.
    pub fn cdf_at(&self, k: usize) -> Option<f64> {
        k.checked_sub(1).and_then(|i| self.cdf.get(i)).copied()
    }

    /// Rows `K,cdf` with probabilities at twelve significant digits.
    pub fn to_csv(&self) -> Result<String> {
        let mut writer = csv::Writer::from_writer(Vec::new());
        let ser = |e: csv::Error| Error::Serialization(e.to_string());
        writer.write_record(["K", "cdf"]).map_err(ser)?;
        for (i, value) in self.cdf.iter().enumerate() {
            writer
                .write_record([(i + 1).to_string(), format_probability(*value)])
                .map_err(ser)?;
        }
        let bytes = writer
            .into_inner()
            .map_err(|e| Error::Serialization(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Serialization(e.to_string()))
    }

    /// `{"N": .., "p": .., "cdf": [..]}`.
    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string(self).map_err(|e| Error::Serialization(e.to_string()))
    }
}

/// Number of length-`N` sequences with a given count of ones and a given
/// longest switch run. Exact integers, so any partition of the outcome space
/// sums to the same table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SwitchRunCounts {
    pub n: usize,
    /// `counts[ones][m]`.
    pub counts: Vec<Vec<u64>>,
}

impl SwitchRunCounts {
    /// Enumerates all `2^N` sequences.
    pub fn enumerate(n: usize) -> Result<Self> {
        if !(1..=ENUMERATION_CAP).contains(&n) {
            return domain(format!(
                "enumeration needs 1 <= N <= {ENUMERATION_CAP}, got N={n}"
            ));
        }
        let empty = || vec![vec![0u64; n]; n + 1];
        let total = 1u64 << n;
        let chunk = 1u64 << n.min(12);
        let counts = (0..total / chunk)
            .into_par_iter()
            .fold(empty, |mut acc, c| {
                for word in c * chunk..(c + 1) * chunk {
                    let m = longest_switch_run_of((0..n).map(|i| word >> i & 1 == 1)).longest_run;
                    acc[word.count_ones() as usize][m] += 1;
                }
                acc
            })
            .reduce(empty, |mut a, b| {
                for (row_a, row_b) in a.iter_mut().zip(b) {
                    for (x, y) in row_a.iter_mut().zip(row_b) {
                        *x += y;
                    }
                }
                a
            });
        Ok(Self { n, counts })
    }

    pub fn pmf(&self, params: BernoulliParams) -> Vec<f64> {
        let (p, q) = (params.p(), params.q());
        let mut pmf = vec![0.0; self.n];
        for (ones, row) in self.counts.iter().enumerate() {
            let weight = p.powi(ones as i32) * q.powi((self.n - ones) as i32);
            for (m, &count) in row.iter().enumerate() {
                pmf[m] += count as f64 * weight;
            }
        }
        pmf
    }

    /// The law of `M_N` in exact rational arithmetic for a rational `p`.
    pub fn exact_pmf(&self, p: &BigRational) -> Vec<BigRational> {
        let q = BigRational::one() - p;
        let mut pmf = vec![BigRational::zero(); self.n];
        for (ones, row) in self.counts.iter().enumerate() {
            let weight = p.pow(ones as i32) * q.pow((self.n - ones) as i32);
            for (m, &count) in row.iter().enumerate() {
                if count > 0 {
                    pmf[m] += &weight * BigRational::from_integer(BigInt::from(count));
                }
            }
        }
        pmf
    }
}

/// Exact law of `M_N` by brute force over all `2^N` outcomes (`N <= 24`).
pub fn enumerate_mn_dist(n: usize, params: BernoulliParams) -> Result<ExactDistribution> {
    let counts = SwitchRunCounts::enumerate(n)?;
    Ok(ExactDistribution::from_pmf(
        n,
        params.p(),
        counts.pmf(params),
    ))
}

/// Rational-arithmetic versions of the closed forms, for `pq` given exactly.
pub mod rational {
    use super::*;

    pub fn full_alternation(t: usize, pq: &BigRational) -> BigRational {
        let base = pq.pow((t / 2) as i32);
        if t % 2 == 1 {
            base
        } else {
            base * BigRational::from_integer(2.into())
        }
    }

    /// The reach probability for `K >= 1`; every exponent is an integer once
    /// the parity of `K` is fixed, so the value is rational in `pq`.
    pub fn window2k_reach(k: usize, pq: &BigRational) -> BigRational {
        assert!(k >= 1);
        let int = |v: usize| BigRational::from_integer(BigInt::from(v));
        let two = int(2);
        if k.is_multiple_of(2) {
            (int(k) + &two) * pq.pow((k / 2) as i32) - &two * pq.pow(k as i32)
        } else {
            (int(k) + int(1) - &two * int(k) * pq) * pq.pow(((k - 1) / 2) as i32)
                - (int(1) - &two * pq) * pq.pow(k as i32 - 1)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(p: f64) -> BernoulliParams {
        BernoulliParams::new(p).unwrap()
    }

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= PROBABILITY_TOLERANCE
    }

    #[test]
    fn full_alternation_examples() {
        assert_eq!(p_full_alternation(1, params(0.3)).unwrap(), 1.0);
        // 0101 and 1010 out of 16
        assert!(close(
            p_full_alternation(4, params(0.5)).unwrap(),
            2.0 / 16.0
        ));
        // 010 and 101 weigh pq^2 + ... = pq(p + q)
        let (p, q) = (1.0 / 3.0, 2.0 / 3.0);
        let brute = q * p * q + p * q * p;
        assert!(close(p_full_alternation(3, params(p)).unwrap(), brute));
        assert!(close(brute, 2.0 / 9.0));
        assert!(p_full_alternation(0, params(0.5)).is_err());
    }

    #[test]
    fn window2k_examples() {
        assert!(close(p_window2k_reach(1, params(0.42)).unwrap(), 1.0));
        assert!(close(p_window2k_reach(2, params(0.5)).unwrap(), 0.875));
        assert!(close(p_window2k_reach(3, params(0.5)).unwrap(), 0.59375));
        assert!(p_window2k_reach(0, params(0.5)).is_err());
    }

    #[test]
    fn bounds_fair_coin_n4_k2() {
        let env = bounds_mn_less(4, 2, params(0.5)).unwrap();
        assert!(close(env.lower, 0.125));
        assert!(close(env.upper, 0.125f64.sqrt()));
        assert_eq!((env.n, env.k), (4, 2));
    }

    #[test]
    fn bounds_preconditions() {
        assert!(matches!(
            bounds_mn_less(3, 2, params(0.5)),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            bounds_mn_less(10, 0, params(0.5)),
            Err(Error::Domain(_))
        ));
        let env = bounds_mn_less(2, 1, params(0.5)).unwrap();
        assert_eq!(env.lower, 0.0);
    }

    #[test]
    fn bounds_exponents_at_n_equals_2k() {
        for k in 1..=12 {
            for p in [0.1, 0.25, 1.0 / 3.0, 0.5, 0.7] {
                let env = bounds_mn_less(2 * k, k, params(p)).unwrap();
                let pq = params(p).pq();
                assert!(close(env.lower, 1.0 - reach_odd_form(k, pq)));
                assert!(close(env.upper, (1.0 - reach_even_form(k, pq)).sqrt()));
                assert!(env.lower <= env.upper);
            }
        }
    }

    #[test]
    fn bounds_contain_dp_value() {
        let p = params(1.0 / 3.0);
        let env = bounds_mn_less(20, 4, p).unwrap();
        assert!(env.contains(exact_mn_cdf(20, 4, p).unwrap()));
    }

    #[test]
    fn floor_exponent_lower_bound_misses_trailing_trials() {
        let b = params(0.5);
        let exact = exact_mn_cdf(5, 2, b).unwrap();
        assert!(close(exact, 1.0 / 16.0));
        let floor_env = bounds_mn_less(5, 2, b).unwrap();
        assert!(close(floor_env.lower, 0.125));
        assert!(!floor_env.contains(exact));
        let covering = covering_bounds_mn_less(5, 2, b).unwrap();
        assert!(close(covering.lower, 0.125f64.powi(2)));
        assert!(covering.contains(exact));
        assert_eq!(
            covering_bounds_mn_less(20, 4, b).unwrap(),
            bounds_mn_less(20, 4, b).unwrap()
        );
    }

    #[test]
    fn dp_examples() {
        assert!(close(exact_mn_cdf(4, 2, params(0.5)).unwrap(), 0.125));
        assert!(close(
            exact_mn_cdf(2, 2, params(1.0 / 3.0)).unwrap(),
            5.0 / 9.0
        ));
        assert_eq!(exact_mn_cdf(1, 2, params(0.3)).unwrap(), 1.0);
        assert_eq!(exact_mn_cdf(7, 1, params(0.3)).unwrap(), 0.0);
        assert_eq!(exact_mn_cdf(5, 6, params(0.3)).unwrap(), 1.0);
        assert!(exact_mn_cdf(0, 2, params(0.3)).is_err());
        assert!(exact_mn_cdf(3, 0, params(0.3)).is_err());
    }

    #[test]
    fn dp_series_matches_pointwise() {
        let p = params(0.7);
        let series = exact_mn_cdf_series(40, 5, p).unwrap();
        for (i, v) in series.iter().enumerate() {
            assert_eq!(*v, exact_mn_cdf(i + 1, 5, p).unwrap());
        }
    }

    #[test]
    fn enumeration_examples() {
        let d = enumerate_mn_dist(4, params(0.5)).unwrap();
        assert!(close(d.cdf_at(2).unwrap(), 0.125));
        let d = enumerate_mn_dist(2, params(1.0 / 3.0)).unwrap();
        assert!(close(d.pmf[1], 4.0 / 9.0));
        let d = enumerate_mn_dist(1, params(0.2)).unwrap();
        assert!(close(d.pmf[0], 1.0));
        assert!(enumerate_mn_dist(0, params(0.5)).is_err());
        let err = enumerate_mn_dist(25, params(0.5)).unwrap_err();
        assert!(err.to_string().contains("24"), "{err}");
    }

    #[test]
    fn exact_distribution_invariants() {
        for n in 1..=12 {
            let d = enumerate_mn_dist(n, params(0.3)).unwrap();
            assert_eq!(d.cdf.len(), n + 1);
            assert_eq!(d.cdf_at(1), Some(0.0));
            assert!(close(d.cdf_at(n + 1).unwrap(), 1.0));
            assert!(d.cdf.windows(2).all(|w| w[0] <= w[1]));
            assert!(d
                .cdf
                .iter()
                .all(|v| (0.0..=1.0 + PROBABILITY_TOLERANCE).contains(v)));
            assert_eq!(d.cdf_at(0), None);
            assert_eq!(d.cdf_at(n + 2), None);
        }
    }

    #[test]
    fn exact_distribution_serializations() {
        let d = enumerate_mn_dist(2, params(0.5)).unwrap();
        assert_eq!(d.to_csv().unwrap(), "K,cdf\n1,0\n2,0.5\n3,1\n");
        assert_eq!(
            d.to_json().unwrap(),
            r#"{"N":2,"p":0.5,"cdf":[0.0,0.5,1.0]}"#
        );
    }

    #[test]
    fn counts_cover_all_sequences() {
        let c = SwitchRunCounts::enumerate(13).unwrap();
        let total: u64 = c.counts.iter().flatten().sum();
        assert_eq!(total, 1 << 13);
        // only the two alternating sequences reach M = N - 1
        let top: u64 = c.counts.iter().map(|row| row[12]).sum();
        assert_eq!(top, 2);
    }
}
