//! Seeded simulation of Bernoulli sequences and batch experiments.
//!
//! Each trial draws from its own [`BernoulliStream`] seeded with
//! [`mix_seed`]`(experiment seed, grid index, trial index)`, and per-trial
//! results are aggregated in trial order. Reports are therefore identical for
//! any rayon pool size or scheduling.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::asymptotics::{alpha1, alpha2, gamma_value, slln_ratio, GammaFamily, ThresholdSpec};
use crate::bits::BitSequence;
use crate::error::{domain, Error, Result};
use crate::format::format_significant;
use crate::params::BernoulliParams;
use crate::rng::{mix_seed, BernoulliStream};
use crate::switches::{SwitchRunStats, SwitchRunTracker};

/// `N` IID trials drawn from the stream seeded with `seed`.
pub fn simulate_sequence(n: usize, params: BernoulliParams, seed: u64) -> BitSequence {
    BernoulliStream::new(params, seed).take(n).collect()
}

/// Switch statistics of `simulate_sequence(n, params, seed)` without
/// materializing the sequence.
pub fn simulate_stats(n: u64, params: BernoulliParams, seed: u64) -> SwitchRunStats {
    let mut stream = BernoulliStream::new(params, seed);
    let mut tracker = SwitchRunTracker::new();
    for _ in 0..n {
        tracker.push(stream.next_bit());
    }
    tracker.stats()
}

/// Integer form of the event `M_N >= γ_N - 1`: since `M_N` is an integer the
/// event is exactly `M_N >= ⌈γ_N⌉ - 1`.
pub fn gamma_threshold(family: GammaFamily, n: u64, params: BernoulliParams) -> i64 {
    gamma_value(family, n, params).ceil() as i64 - 1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub p: BernoulliParams,
    #[serde(rename = "N_grid")]
    pub n_grid: Vec<u64>,
    pub trials: u64,
    pub seed: u64,
    pub epsilon: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<GammaFamily>,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials < 1 {
            return domain("trials must be at least 1");
        }
        if self.n_grid.is_empty() {
            return domain("N_grid must not be empty");
        }
        if let Some(n) = self.n_grid.iter().find(|&&n| n < 2) {
            return domain(format!("every N in N_grid must be at least 2, got {n}"));
        }
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return domain(format!("epsilon must be positive, got {}", self.epsilon));
        }
        if let Some(g) = self.gamma {
            if !(g.a.is_finite() && g.b.is_finite()) {
                return domain("gamma coefficients must be finite");
            }
        }
        Ok(())
    }
}

/// Aggregates for one sequence length of an experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridPointReport {
    #[serde(rename = "N")]
    pub n: u64,
    pub trials: u64,
    pub mean_m: f64,
    pub sd_m: f64,
    pub mean_ratio: f64,
    pub alpha1: Option<i64>,
    pub alpha2: Option<i64>,
    /// Fraction of trials with `M_N < α₁(N)`.
    pub frac_below_alpha1: Option<f64>,
    /// Fraction of trials with `M_N >= α₂(N)`.
    pub frac_at_or_above_alpha2: Option<f64>,
    /// Why α₁/α₂ are missing, when `N` is too small for them.
    pub threshold_error: Option<String>,
    pub gamma_threshold: Option<i64>,
    /// Fraction of trials with `M_N >= ⌈γ_N⌉ - 1`.
    pub frac_gamma_hit: Option<f64>,
    /// Longest alternating block of trial 0, e.g. `"01010"`.
    pub representative_pattern: String,
    pub representative_window_start: usize,
    /// `M_N` of every trial, in trial order.
    pub m_values: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialReport {
    pub config: ExperimentConfig,
    pub points: Vec<GridPointReport>,
}

impl TrialReport {
    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Serialization(e.to_string()))
    }

    /// Raw per-trial rows `p,N,trial,M,ratio`.
    pub fn to_raw_csv(&self) -> Result<String> {
        let ser = |e: csv::Error| Error::Serialization(e.to_string());
        let mut writer = csv::Writer::from_writer(Vec::new());
        writer
            .write_record(["p", "N", "trial", "M", "ratio"])
            .map_err(ser)?;
        let p = self.config.p;
        let p_text = format_significant(p.p(), 12);
        for point in &self.points {
            for (trial, &m) in point.m_values.iter().enumerate() {
                let ratio = slln_ratio(m, point.n, p)?;
                writer
                    .write_record([
                        p_text.clone(),
                        point.n.to_string(),
                        trial.to_string(),
                        m.to_string(),
                        format_significant(ratio, 12),
                    ])
                    .map_err(ser)?;
            }
        }
        let bytes = writer
            .into_inner()
            .map_err(|e| Error::Serialization(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Serialization(e.to_string()))
    }
}

/// Neumaier-compensated sum.
fn compensated_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

fn fraction(count: usize, trials: u64) -> f64 {
    count as f64 / trials as f64
}

fn run_point(config: &ExperimentConfig, grid: usize, n: u64) -> Result<GridPointReport> {
    let params = config.p;
    let stats: Vec<SwitchRunStats> = (0..config.trials)
        .into_par_iter()
        .map(|t| simulate_stats(n, params, mix_seed(config.seed, grid as u64, t)))
        .collect();
    let m_values: Vec<u64> = stats.iter().map(|s| s.longest_run as u64).collect();
    let trials = config.trials;

    let mean_m = compensated_sum(m_values.iter().map(|&m| m as f64)) / trials as f64;
    let sd_m = if trials > 1 {
        let ss = compensated_sum(m_values.iter().map(|&m| (m as f64 - mean_m).powi(2)));
        (ss / (trials - 1) as f64).sqrt()
    } else {
        0.0
    };
    let ratios = m_values
        .iter()
        .map(|&m| slln_ratio(m, n, params))
        .collect::<Result<Vec<_>>>()?;
    let mean_ratio = compensated_sum(ratios) / trials as f64;

    let (mut a1, mut a2, mut below, mut above, mut threshold_error) =
        (None, None, None, None, None);
    match ThresholdSpec::new(config.epsilon, n, params) {
        Ok(spec) => {
            let (lo, hi) = (alpha1(&spec), alpha2(&spec));
            a1 = Some(lo);
            a2 = Some(hi);
            below = Some(fraction(
                m_values.iter().filter(|&&m| (m as i64) < lo).count(),
                trials,
            ));
            above = Some(fraction(
                m_values.iter().filter(|&&m| m as i64 >= hi).count(),
                trials,
            ));
        }
        Err(e) => threshold_error = Some(e.to_string()),
    }

    let (gamma_thr, gamma_frac) = match config.gamma {
        Some(family) => {
            let thr = gamma_threshold(family, n, params);
            let hits = m_values.iter().filter(|&&m| m as i64 >= thr).count();
            (Some(thr), Some(fraction(hits, trials)))
        }
        None => (None, None),
    };

    let first = stats[0];
    Ok(GridPointReport {
        n,
        trials,
        mean_m,
        sd_m,
        mean_ratio,
        alpha1: a1,
        alpha2: a2,
        frac_below_alpha1: below,
        frac_at_or_above_alpha2: above,
        threshold_error,
        gamma_threshold: gamma_thr,
        frac_gamma_hit: gamma_frac,
        representative_pattern: first.pattern(n as usize),
        representative_window_start: first.window_start,
        m_values,
    })
}

/// Runs every grid point of `config` on the current rayon pool.
pub fn run_trials(config: &ExperimentConfig) -> Result<TrialReport> {
    config.validate()?;
    let points = config
        .n_grid
        .iter()
        .enumerate()
        .map(|(grid, &n)| run_point(config, grid, n))
        .collect::<Result<Vec<_>>>()?;
    Ok(TrialReport {
        config: config.clone(),
        points,
    })
}

/// [`run_trials`] on a dedicated pool of `threads` workers.
pub fn run_trials_with_threads(config: &ExperimentConfig, threads: usize) -> Result<TrialReport> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Domain(format!("cannot build thread pool: {e}")))?;
    pool.install(|| run_trials(config))
}

/// Monte Carlo estimate of `P(M_N < K - 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CdfEstimate {
    pub estimate: f64,
    /// 99% normal-approximation half-width `2.576 √(p̂(1 - p̂) / trials)`.
    pub half_width: f64,
    pub trials: u64,
}

pub const MIN_ESTIMATE_TRIALS: u64 = 100;
const Z_99: f64 = 2.576;

// Whether M_N < K - 1; stops drawing once a run of K - 1 switches appears.
fn survives(n: u64, k: u64, params: BernoulliParams, seed: u64) -> bool {
    let target = (k - 1) as usize;
    let mut stream = BernoulliStream::new(params, seed);
    let mut tracker = SwitchRunTracker::new();
    for _ in 0..n {
        tracker.push(stream.next_bit());
        if tracker.longest_run() >= target {
            return false;
        }
    }
    true
}

/// Fraction of `trials` simulated sequences with `M_N < K - 1`. Trial `t`
/// uses seed `mix_seed(seed, 0, t)`.
pub fn estimate_cdf(
    n: u64,
    k: u64,
    params: BernoulliParams,
    trials: u64,
    seed: u64,
) -> Result<CdfEstimate> {
    if trials < MIN_ESTIMATE_TRIALS {
        return domain(format!(
            "estimate_cdf needs at least {MIN_ESTIMATE_TRIALS} trials, got {trials}"
        ));
    }
    if n < 1 || k < 1 {
        return domain(format!(
            "estimate_cdf needs N >= 1 and K >= 1, got N={n}, K={k}"
        ));
    }
    let hits: u64 = (0..trials)
        .into_par_iter()
        .map(|t| survives(n, k, params, mix_seed(seed, 0, t)) as u64)
        .sum();
    let estimate = hits as f64 / trials as f64;
    let half_width = Z_99 * (estimate * (1.0 - estimate) / trials as f64).sqrt();
    Ok(CdfEstimate {
        estimate,
        half_width,
        trials,
    })
}

/// Outcome of following one simulated path over a range of `N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GammaScan {
    /// Number of `N` in the range with `M_N >= ⌈γ_N⌉ - 1`.
    pub hits: u64,
    pub first_hit: Option<u64>,
    pub last_hit: Option<u64>,
}

/// Streams one sequence seeded with `seed` and checks `M_N >= ⌈γ_N⌉ - 1` at
/// every `N` in `n_lo..=n_hi` (with `N >= 2`).
pub fn gamma_scan(
    family: GammaFamily,
    params: BernoulliParams,
    seed: u64,
    n_lo: u64,
    n_hi: u64,
) -> GammaScan {
    let mut stream = BernoulliStream::new(params, seed);
    let mut tracker = SwitchRunTracker::new();
    let mut scan = GammaScan {
        hits: 0,
        first_hit: None,
        last_hit: None,
    };
    let start = n_lo.max(2);
    for n in 1..=n_hi {
        tracker.push(stream.next_bit());
        if n >= start && tracker.longest_run() as i64 >= gamma_threshold(family, n, params) {
            scan.hits += 1;
            scan.first_hit.get_or_insert(n);
            scan.last_hit = Some(n);
        }
    }
    scan
}
