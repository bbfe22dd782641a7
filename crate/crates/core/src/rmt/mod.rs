//! Correlation spectra against the Marchenko–Pastur law.

mod components;
mod eigen;
mod mp;
mod spectrum;
mod surrogate;

pub use components::{top_eigenvector_components, ComponentRow, ComponentTable};
pub use eigen::{eigen_decompose, fix_sign, EigenDecomposition};
pub use mp::{mp_bounds, mp_pdf, MpParams};
pub use spectrum::{classify_spectrum, eigen_histogram, spectrum_report, HistogramBin, SpectrumFractions, SpectrumReport};
pub use surrogate::{surrogate_ensemble, surrogate_shuffle, SurrogateEnsemble};

/// Bins used for eigenvalue density overlays.
pub const HISTOGRAM_BINS: usize = 50;
