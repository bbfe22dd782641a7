use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::Serialize;

use super::correlation::{corr_distance, correlation_matrix};
use super::entropy::{mi_distance, normalized_mi};
use super::estimator::{estimators, DEFAULT_ESTIMATOR};
use super::partition::ranks;
use super::permutation::{permutation_test, DEFAULT_ALPHA, DEFAULT_TRIALS};
use crate::error::Result;
use crate::ingest::ReturnsPanel;
use crate::seed::SeedStream;

#[derive(Debug, Clone, PartialEq)]
pub struct PairConfig {
    /// Registered estimator name.
    pub estimator: String,
    /// Permutation trials per pair; 0 disables the significance test.
    pub trials: usize,
    pub alpha: f64,
    pub seed: SeedStream,
}

impl Default for PairConfig {
    fn default() -> Self {
        Self {
            estimator: DEFAULT_ESTIMATOR.into(),
            trials: DEFAULT_TRIALS,
            alpha: DEFAULT_ALPHA,
            seed: SeedStream::new(0),
        }
    }
}

/// Statistics for one symbol pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PairStats {
    pub i: usize,
    pub j: usize,
    pub rho: f64,
    /// MI after the significance test (zeroed when not significant).
    pub mi: f64,
    pub raw_mi: f64,
    pub joint_entropy: f64,
    /// Normalised MI of the raw estimate.
    pub nmi: f64,
    pub p_value: f64,
    pub d_corr: f64,
    pub d_mi: f64,
}

/// Symmetric k × k matrices, one per pair statistic.
#[derive(Debug, Clone, PartialEq)]
pub struct PairMatrix {
    pub symbols: Vec<String>,
    pub rho: DMatrix<f64>,
    pub mi: DMatrix<f64>,
    pub raw_mi: DMatrix<f64>,
    pub joint_entropy: DMatrix<f64>,
    pub nmi: DMatrix<f64>,
    pub p_value: DMatrix<f64>,
    pub d_corr: DMatrix<f64>,
    pub d_mi: DMatrix<f64>,
}

impl PairMatrix {
    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn pair(&self, i: usize, j: usize) -> PairStats {
        PairStats {
            i,
            j,
            rho: self.rho[(i, j)],
            mi: self.mi[(i, j)],
            raw_mi: self.raw_mi[(i, j)],
            joint_entropy: self.joint_entropy[(i, j)],
            nmi: self.nmi[(i, j)],
            p_value: self.p_value[(i, j)],
            d_corr: self.d_corr[(i, j)],
            d_mi: self.d_mi[(i, j)],
        }
    }

    /// All pairs with `i < j`, row-major.
    pub fn pairs(&self) -> impl Iterator<Item = PairStats> + '_ {
        let k = self.len();
        (0..k).flat_map(move |i| ((i + 1)..k).map(move |j| self.pair(i, j)))
    }

    /// Named fields in export order.
    pub fn fields(&self) -> [(&'static str, &DMatrix<f64>); 6] {
        [
            ("rho", &self.rho),
            ("mi", &self.mi),
            ("nmi", &self.nmi),
            ("d_corr", &self.d_corr),
            ("d_mi", &self.d_mi),
            ("p_value", &self.p_value),
        ]
    }
}

pub fn pair_count(k: usize) -> usize {
    k * k.saturating_sub(1) / 2
}

/// Compute every pair's statistics. Pairs run in parallel, each with its
/// own seed derived from `(config.seed, i, j)`, so output is identical to a
/// serial run.
pub fn pair_sweep(panel: &ReturnsPanel, config: &PairConfig) -> Result<PairMatrix> {
    panel.validate()?;
    let estimator = estimators().get(&config.estimator)?;
    let k = panel.cols();
    let rho = correlation_matrix(panel)?;
    let col_ranks: Vec<Vec<u32>> = (0..k).map(|j| ranks(panel.column(j))).collect();

    let index: Vec<(usize, usize)> = (0..k).flat_map(|i| ((i + 1)..k).map(move |j| (i, j))).collect();
    let stats: Vec<PairStats> = index
        .par_iter()
        .map(|&(i, j)| -> Result<PairStats> {
            let est = estimator.estimate(&col_ranks[i], &col_ranks[j])?;
            let (mi, p_value) = if config.trials == 0 {
                (est.mi, 0.0)
            } else {
                let mut rng = config.seed.pair(i, j).rng();
                let t = permutation_test(
                    estimator,
                    &col_ranks[i],
                    &col_ranks[j],
                    est.mi,
                    config.trials,
                    config.alpha,
                    &mut rng,
                )?;
                (t.accepted_mi, t.p_value)
            };
            let r = rho[(i, j)];
            Ok(PairStats {
                i,
                j,
                rho: r,
                mi,
                raw_mi: est.mi,
                joint_entropy: est.joint_entropy,
                nmi: normalized_mi(est.mi, est.hx, est.hy)?,
                p_value,
                d_corr: corr_distance(r)?,
                d_mi: mi_distance(mi, est.joint_entropy)?,
            })
        })
        .collect::<Result<_>>()?;

    // Diagonal: a series' self-information is its marginal entropy.
    let self_entropy = if k > 0 {
        estimator.estimate(&col_ranks[0], &col_ranks[0])?.hx
    } else {
        0.0
    };
    let mut out = PairMatrix {
        symbols: panel.symbols.clone(),
        rho,
        mi: DMatrix::from_diagonal_element(k, k, self_entropy),
        raw_mi: DMatrix::from_diagonal_element(k, k, self_entropy),
        joint_entropy: DMatrix::from_diagonal_element(k, k, self_entropy),
        nmi: DMatrix::identity(k, k),
        p_value: DMatrix::zeros(k, k),
        d_corr: DMatrix::zeros(k, k),
        d_mi: DMatrix::zeros(k, k),
    };
    for s in stats {
        for (a, b) in [(s.i, s.j), (s.j, s.i)] {
            out.mi[(a, b)] = s.mi;
            out.raw_mi[(a, b)] = s.raw_mi;
            out.joint_entropy[(a, b)] = s.joint_entropy;
            out.nmi[(a, b)] = s.nmi;
            out.p_value[(a, b)] = s.p_value;
            out.d_corr[(a, b)] = s.d_corr;
            out.d_mi[(a, b)] = s.d_mi;
        }
    }
    Ok(out)
}
