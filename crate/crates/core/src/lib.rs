//! Longest runs of consecutive switches in IID Bernoulli sequences.
//!
//! A *switch* is an adjacent pair of trials with different outcomes, and
//! `M_N` is the length (in switches) of the longest fully alternating block
//! among the first `N` trials. This crate provides
//!
//! * streaming and brute-force computation of `M_N` ([`switches`]),
//! * exact probabilities, a DP for the law of `M_N` and two-sided bounds ([`exact`]),
//! * the almost-sure growth rate and threshold functions ([`asymptotics`]),
//! * seeded, scheduling-independent simulation ([`montecarlo`], [`rng`]).

pub mod asymptotics;
pub mod bits;
pub mod error;
pub mod exact;
pub mod format;
pub mod montecarlo;
pub mod params;
pub mod rng;
pub mod switches;

pub use asymptotics::{
    alpha1, alpha2, classify_gamma_series, gamma_value, log_lambda, slln_ratio, GammaFamily,
    SeriesVerdict, ThresholdSpec,
};
pub use bits::BitSequence;
pub use error::{Error, Result};
pub use exact::{
    bounds_mn_less, covering_bounds_mn_less, enumerate_mn_dist, exact_mn_cdf, p_full_alternation,
    p_window2k_reach, BoundEnvelope, ExactDistribution,
};
pub use montecarlo::{
    estimate_cdf, run_trials, simulate_sequence, CdfEstimate, ExperimentConfig, TrialReport,
};
pub use params::BernoulliParams;
pub use switches::{
    longest_switch_run, switch_count, window_scan_oracle, windowed_longest, SwitchRunStats,
};
