use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::Serialize;

use super::mp::{mp_bounds, MpParams};
use super::spectrum::{classify_spectrum, eigen_histogram, spectrum_report, HistogramBin};
use crate::error::Result;
use crate::infostats::correlation_matrix;
use crate::ingest::ReturnsPanel;
use crate::seed::SeedStream;

/// Shuffle every column independently; marginals are preserved exactly.
pub fn surrogate_shuffle(panel: &ReturnsPanel, seed: SeedStream) -> ReturnsPanel {
    let mut out = panel.clone();
    let m = out.rows();
    for (j, chunk) in out.returns.as_mut_slice().chunks_mut(m.max(1)).enumerate() {
        chunk.shuffle(&mut seed.indexed(j as u64).rng());
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SurrogateEnsemble {
    pub trials: usize,
    pub mp: MpParams,
    pub per_trial_frac_within: Vec<f64>,
    pub pooled_frac_within: f64,
    #[serde(skip)]
    pub pooled_eigenvalues: Vec<f64>,
    pub histogram: Vec<HistogramBin>,
}

/// Spectra of `trials` independent column shuffles, pooled.
pub fn surrogate_ensemble(panel: &ReturnsPanel, trials: usize, seed: SeedStream, bins: usize) -> Result<SurrogateEnsemble> {
    if trials == 0 {
        return Err(crate::Error::invalid("surrogate ensemble needs at least one trial"));
    }
    let mp = mp_bounds(panel.rows(), panel.cols())?;
    let spectra: Vec<Vec<f64>> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let shuffled = surrogate_shuffle(panel, seed.indexed(t as u64));
            let c = correlation_matrix(&shuffled)?;
            Ok(spectrum_report(&c, panel.rows(), &panel.period)?.eigenvalues)
        })
        .collect::<Result<_>>()?;

    let per_trial_frac_within = spectra.iter().map(|s| classify_spectrum(s, &mp).within).collect();
    let pooled_eigenvalues: Vec<f64> = spectra.concat();
    let pooled_frac_within = classify_spectrum(&pooled_eigenvalues, &mp).within;
    let histogram = eigen_histogram(&pooled_eigenvalues, &mp, bins);
    Ok(SurrogateEnsemble {
        trials,
        mp,
        per_trial_frac_within,
        pooled_frac_within,
        pooled_eigenvalues,
        histogram,
    })
}
