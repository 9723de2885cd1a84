//! Monte Carlo simple random walks as a statistical cross-check of the
//! exact laws.
//!
//! Trial `t` under seed `s` draws its steps from ChaCha8 keyed by `s` on
//! stream `t`, one bit per step, so results do not depend on how trials are
//! scheduled across threads.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{domain, Result};
use crate::srw_laws::{pmf_for, ExactPmf};
use crate::statistic::Statistic;

/// Statistics of one path of length `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct WalkSummary {
    pub n: u64,
    pub max_value: u64,
    pub returns: u64,
    pub sign_changes: u64,
}

impl WalkSummary {
    /// `true` is a `+1` step.
    pub fn from_steps(steps: impl IntoIterator<Item = bool>) -> Self {
        let (mut n, mut s, mut max) = (0u64, 0i64, 0i64);
        let (mut returns, mut sign_changes) = (0u64, 0u64);
        let mut before_last = 0i64;
        for up in steps {
            let next = s + if up { 1 } else { -1 };
            // S_{n-1} S_{n+1} < 0 with n >= 1
            if n >= 1 && before_last * next < 0 {
                sign_changes += 1;
            }
            before_last = s;
            s = next;
            n += 1;
            max = max.max(s);
            returns += u64::from(s == 0);
        }
        WalkSummary {
            n,
            max_value: max as u64,
            returns,
            sign_changes,
        }
    }

    pub fn value(&self, statistic: Statistic) -> u64 {
        match statistic {
            Statistic::Returns => self.returns,
            Statistic::Max => self.max_value,
            Statistic::HalfMax => self.max_value.div_ceil(2),
            Statistic::SignChanges => self.sign_changes,
        }
    }
}

/// Steps of trial `trial` under `seed`.
fn steps(n: u64, seed: u64, trial: u64) -> impl Iterator<Item = bool> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    let mut word = 0u64;
    (0..n).map(move |i| {
        if i % 64 == 0 {
            word = rng.next_u64();
        }
        (word >> (i % 64)) & 1 == 1
    })
}

pub fn simulate_trial(n: u64, seed: u64, trial: u64) -> Result<WalkSummary> {
    if n == 0 {
        return domain("a walk needs n >= 1 steps");
    }
    Ok(WalkSummary::from_steps(steps(n, seed, trial)))
}

/// One path under `seed` (trial 0).
pub fn simulate_walk(n: u64, seed: u64) -> Result<WalkSummary> {
    simulate_trial(n, seed, 0)
}

/// Counts of each statistic value over `trials` independent paths.
pub fn tally(statistic: Statistic, n: u64, trials: u64, seed: u64) -> Result<Vec<u64>> {
    if n == 0 {
        return domain("a walk needs n >= 1 steps");
    }
    let size = statistic.max_value(n) as usize + 1;
    Ok((0..trials)
        .into_par_iter()
        .fold(
            || vec![0u64; size],
            |mut acc, t| {
                let summary = WalkSummary::from_steps(steps(n, seed, t));
                acc[summary.value(statistic) as usize] += 1;
                acc
            },
        )
        .reduce(
            || vec![0u64; size],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        ))
}

pub const DKW_ALPHA: f64 = 1e-3;
pub const MIN_TRIALS: u64 = 10_000;

/// `sqrt(ln(2/alpha) / (2 T))`.
pub fn dkw_threshold(trials: u64, alpha: f64) -> f64 {
    ((2.0 / alpha).ln() / (2.0 * trials as f64)).sqrt()
}

#[derive(Debug, Clone, Serialize)]
pub struct EmpiricalReport {
    pub statistic: Statistic,
    pub n: u64,
    pub trials: u64,
    pub seed: u64,
    pub max_deviation: f64,
    pub dkw_threshold: f64,
    /// Pass threshold: twice the DKW radius.
    pub allowed: f64,
    pub passed: bool,
    pub counts: Vec<u64>,
}

/// Largest gap between the empirical CDF and the exact CDF of the statistic.
pub fn empirical_check(
    statistic: Statistic,
    n: u64,
    trials: u64,
    seed: u64,
) -> Result<EmpiricalReport> {
    if trials < MIN_TRIALS {
        return domain(format!(
            "empirical check needs at least {MIN_TRIALS} trials, got {trials}"
        ));
    }
    let exact = pmf_for(statistic, n)?;
    let counts = tally(statistic, n, trials, seed)?;
    let max_deviation = cdf_deviation(&exact, &counts, trials);
    let threshold = dkw_threshold(trials, DKW_ALPHA);
    Ok(EmpiricalReport {
        statistic,
        n,
        trials,
        seed,
        max_deviation,
        dkw_threshold: threshold,
        allowed: 2.0 * threshold,
        passed: max_deviation < 2.0 * threshold,
        counts,
    })
}

fn cdf_deviation(exact: &ExactPmf, counts: &[u64], trials: u64) -> f64 {
    let cdf = exact.cdf_f64();
    let mut seen = 0u64;
    counts
        .iter()
        .enumerate()
        .map(|(k, &c)| {
            seen += c;
            let f = cdf.get(k).copied().unwrap_or(1.0);
            (seen as f64 / trials as f64 - f).abs()
        })
        .fold(0.0, f64::max)
}
