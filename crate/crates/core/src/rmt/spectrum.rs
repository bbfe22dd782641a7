use nalgebra::DMatrix;
use serde::Serialize;

use super::eigen::eigen_decompose;
use super::mp::{mp_bounds, mp_pdf, MpParams};
use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectrumFractions {
    pub within: f64,
    pub above: f64,
    pub below: f64,
}

/// Fractions of eigenvalues below, inside (closed interval) and above the MP support.
pub fn classify_spectrum(eigenvalues: &[f64], mp: &MpParams) -> SpectrumFractions {
    let n = eigenvalues.len().max(1) as f64;
    let above = eigenvalues.iter().filter(|&&l| l > mp.lambda_max).count();
    let below = eigenvalues.iter().filter(|&&l| l < mp.lambda_min).count();
    let within = eigenvalues.len() - above - below;
    SpectrumFractions {
        within: within as f64 / n,
        above: above as f64 / n,
        below: below as f64 / n,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumReport {
    pub period: String,
    pub mp: MpParams,
    /// Descending.
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: DMatrix<f64>,
    pub fractions: SpectrumFractions,
}

impl SpectrumReport {
    pub fn empirical_lambda_max(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(0.0)
    }
}

const CLAMP_TOLERANCE: f64 = 1e-10;

/// Eigen-analysis of a correlation matrix estimated from `m` observations.
pub fn spectrum_report(correlation: &DMatrix<f64>, m: usize, period: &str) -> Result<SpectrumReport> {
    let mp = mp_bounds(m, correlation.nrows())?;
    let eig = eigen_decompose(correlation)?;
    let eigenvalues: Vec<f64> = eig
        .values
        .iter()
        .map(|&l| if (-CLAMP_TOLERANCE..0.0).contains(&l) { 0.0 } else { l })
        .collect();
    let fractions = classify_spectrum(&eigenvalues, &mp);
    Ok(SpectrumReport {
        period: period.to_string(),
        mp,
        eigenvalues,
        eigenvectors: eig.vectors,
        fractions,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HistogramBin {
    pub bin_left: f64,
    pub bin_right: f64,
    pub empirical_density: f64,
    /// Mean of the MP density over the bin.
    pub mp_density: f64,
}

/// Density histogram over `[0, 1.05 · max(λ̂max, λmax)]` with the MP overlay.
pub fn eigen_histogram(eigenvalues: &[f64], mp: &MpParams, bins: usize) -> Vec<HistogramBin> {
    let top = eigenvalues.iter().copied().fold(mp.lambda_max, f64::max) * 1.05;
    let width = top / bins as f64;
    let mut counts = vec![0usize; bins];
    for &l in eigenvalues {
        let b = ((l.max(0.0) / width) as usize).min(bins - 1);
        counts[b] += 1;
    }
    let n = eigenvalues.len().max(1) as f64;
    const SUBSTEPS: usize = 64;
    (0..bins)
        .map(|b| {
            let left = b as f64 * width;
            let mean_pdf = (0..SUBSTEPS)
                .map(|s| mp_pdf(left + (s as f64 + 0.5) * width / SUBSTEPS as f64, mp))
                .sum::<f64>()
                / SUBSTEPS as f64;
            HistogramBin {
                bin_left: left,
                bin_right: left + width,
                empirical_density: counts[b] as f64 / (n * width),
                mp_density: mean_pdf,
            }
        })
        .collect()
}
