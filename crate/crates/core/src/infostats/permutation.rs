use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;

use super::estimator::{MiEstimator, RecursivePartitionEstimator};
use super::partition::ranks;
use crate::error::{Error, Result};
use crate::seed::SeedStream;

pub const DEFAULT_TRIALS: usize = 199;
pub const DEFAULT_ALPHA: f64 = 0.05;
const MIN_TRIALS: usize = 99;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PermutationOutcome {
    pub observed: f64,
    pub p_value: f64,
    /// `observed` when the zero-MI null is rejected at `alpha`, otherwise 0.
    pub accepted_mi: f64,
    pub trials: usize,
}

fn check_params(trials: usize, alpha: f64) -> Result<()> {
    if trials < MIN_TRIALS {
        return Err(Error::invalid(format!("need at least {MIN_TRIALS} permutation trials, got {trials}")));
    }
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::invalid(format!("alpha {alpha} outside (0, 1]")));
    }
    Ok(())
}

/// Permutation test of zero mutual information on rank vectors.
///
/// `ry` is shuffled `trials` times; the p-value uses the add-one convention
/// `(1 + #{null >= observed}) / (1 + trials)`.
pub fn permutation_test<R: Rng + ?Sized>(
    estimator: &dyn MiEstimator,
    rx: &[u32],
    ry: &[u32],
    observed: f64,
    trials: usize,
    alpha: f64,
    rng: &mut R,
) -> Result<PermutationOutcome> {
    check_params(trials, alpha)?;
    let mut shuffled = ry.to_vec();
    let mut exceed = 0usize;
    for _ in 0..trials {
        shuffled.shuffle(rng);
        if estimator.statistic(rx, &shuffled) >= observed {
            exceed += 1;
        }
    }
    let p_value = (1 + exceed) as f64 / (1 + trials) as f64;
    Ok(PermutationOutcome {
        observed,
        p_value,
        accepted_mi: if p_value <= alpha { observed } else { 0.0 },
        trials,
    })
}

/// Permutation test with the default estimator on raw series.
pub fn permutation_test_mi(x: &[f64], y: &[f64], trials: usize, alpha: f64, seed: SeedStream) -> Result<PermutationOutcome> {
    check_params(trials, alpha)?;
    let est = RecursivePartitionEstimator;
    let (rx, ry) = (ranks(x), ranks(y));
    let observed = est.estimate(&rx, &ry)?.mi;
    permutation_test(&est, &rx, &ry, observed, trials, alpha, &mut seed.rng())
}
