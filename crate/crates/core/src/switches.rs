//! Switch counts and longest runs of consecutive switches.
//!
//! A switch is an adjacent pair of trials with different outcomes. A block of
//! `n` trials in which every adjacent pair is a switch holds `n - 1`
//! consecutive switches; `M_N` is the largest such count among the first `N`
//! trials.

use serde::{Deserialize, Serialize};

use crate::bits::{check_window, BitSequence};
use crate::error::Result;

/// Summary of the switch structure of one sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SwitchRunStats {
    pub total_switches: usize,
    /// `M_N`: length, in switches, of the longest alternating block.
    pub longest_run: usize,
    /// 1-based index of the first trial of the leftmost longest block.
    pub window_start: usize,
    /// Outcome of the trial at `window_start` (`false` for an empty sequence).
    pub window_first_bit: bool,
}

impl SwitchRunStats {
    /// The alternating block achieving `longest_run`, e.g. `"0101"`.
    /// Empty for an empty sequence.
    pub fn pattern(&self, sequence_len: usize) -> String {
        if sequence_len == 0 {
            return String::new();
        }
        (0..=self.longest_run)
            .map(|i| {
                if (i % 2 == 0) == self.window_first_bit {
                    '1'
                } else {
                    '0'
                }
            })
            .collect()
    }
}

/// Single-pass tracker for the switch statistics of a stream of trials.
///
/// Holds O(1) state, so sequences far larger than memory can be scanned as
/// they are generated. `stats()` is valid after any prefix.
#[derive(Debug, Clone, Default)]
pub struct SwitchRunTracker {
    seen: usize,
    prev: bool,
    run: usize,
    run_start: usize,
    run_first_bit: bool,
    best: usize,
    best_start: usize,
    best_first_bit: bool,
    total: usize,
}

impl SwitchRunTracker {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn push(&mut self, bit: bool) {
        if self.seen == 0 {
            self.seen = 1;
            self.prev = bit;
            self.run_start = 1;
            self.run_first_bit = bit;
            self.best_start = 1;
            self.best_first_bit = bit;
            return;
        }
        self.seen += 1;
        let switched = bit != self.prev;
        self.prev = bit;
        self.total += switched as usize;
        if switched {
            self.run += 1;
        } else {
            self.run = 0;
            self.run_start = self.seen;
            self.run_first_bit = bit;
        }
        // strict comparison keeps the leftmost maximal block
        if self.run > self.best {
            self.best = self.run;
            self.best_start = self.run_start;
            self.best_first_bit = self.run_first_bit;
        }
    }

    pub fn len(&self) -> usize {
        self.seen
    }

    pub fn is_empty(&self) -> bool {
        self.seen == 0
    }

    /// Current longest run `M_n` for the `n = len()` trials pushed so far.
    #[inline]
    pub fn longest_run(&self) -> usize {
        self.best
    }

    pub fn stats(&self) -> SwitchRunStats {
        SwitchRunStats {
            total_switches: self.total,
            longest_run: self.best,
            window_start: if self.seen == 0 { 1 } else { self.best_start },
            window_first_bit: self.best_first_bit,
        }
    }
}

/// `S_n^(m)`: number of switches among trials `X_m, ..., X_{m+n-1}`.
pub fn switch_count(seq: &BitSequence, m: usize, n: usize) -> Result<usize> {
    check_window(m, n, seq.len())?;
    let window = seq.iter().skip(m - 1).take(n);
    Ok(window
        .clone()
        .zip(window.skip(1))
        .filter(|(a, b)| a != b)
        .count())
}

/// Switch statistics of the whole sequence in one linear pass.
pub fn longest_switch_run(seq: &BitSequence) -> SwitchRunStats {
    longest_switch_run_of(seq.iter())
}

/// Same as [`longest_switch_run`] over any stream of trials.
pub fn longest_switch_run_of(bits: impl IntoIterator<Item = bool>) -> SwitchRunStats {
    let mut tracker = SwitchRunTracker::new();
    for bit in bits {
        tracker.push(bit);
    }
    tracker.stats()
}

/// `M_{N_w}^(m)`: longest switch run inside trials `X_m, ..., X_{m+N_w-1}`.
pub fn windowed_longest(seq: &BitSequence, m: usize, window_len: usize) -> Result<usize> {
    check_window(m, window_len, seq.len())?;
    Ok(longest_switch_run_of(seq.iter().skip(m - 1).take(window_len)).longest_run)
}

/// `M_N` by direct search: the largest `n - 1` such that some window of `n`
/// trials has `S_n^(i) = n - 1`. Quadratic or worse; used only as an oracle.
pub fn window_scan_oracle(seq: &BitSequence) -> usize {
    let len = seq.len();
    for n in (1..=len).rev() {
        for i in 1..=len - n + 1 {
            if switch_count(seq, i, n).expect("window in range") == n - 1 {
                return n - 1;
            }
        }
    }
    0
}
