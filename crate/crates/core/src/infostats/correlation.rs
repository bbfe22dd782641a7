use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::ingest::ReturnsPanel;

fn is_constant(x: &[f64]) -> bool {
    x.iter().all(|&v| v == x[0])
}

/// Sample Pearson correlation. Constant series are an error, not zero.
pub fn pearson_correlation(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::invalid(format!("length mismatch: {} vs {}", x.len(), y.len())));
    }
    if x.len() < 2 {
        return Err(Error::TooFewSamples { got: x.len(), need: 2 });
    }
    if is_constant(x) {
        return Err(Error::ConstantSeries("x".into()));
    }
    if is_constant(y) {
        return Err(Error::ConstantSeries("y".into()));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (&a, &b) in x.iter().zip(y) {
        let (da, db) = (a - mx, b - my);
        sxy += da * db;
        sxx += da * da;
        syy += db * db;
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

/// k × k correlation matrix of the panel's columns: symmetric, unit diagonal.
pub fn correlation_matrix(panel: &ReturnsPanel) -> Result<DMatrix<f64>> {
    let (m, k) = panel.returns.shape();
    if m < 2 {
        return Err(Error::TooFewSamples { got: m, need: 2 });
    }
    let mut z = panel.returns.clone();
    for (j, mut col) in z.column_iter_mut().enumerate() {
        if is_constant(col.as_slice()) {
            return Err(Error::ConstantSeries(panel.symbols.get(j).cloned().unwrap_or_else(|| j.to_string())));
        }
        let mean = col.sum() / m as f64;
        col.add_scalar_mut(-mean);
        let norm = col.norm();
        col /= norm;
    }
    let mut c = z.tr_mul(&z);
    for i in 0..k {
        c[(i, i)] = 1.0;
        for j in (i + 1)..k {
            let v = (0.5 * (c[(i, j)] + c[(j, i)])).clamp(-1.0, 1.0);
            c[(i, j)] = v;
            c[(j, i)] = v;
        }
    }
    Ok(c)
}

/// `sqrt(2 (1 - rho))`, in `[0, 2]`.
pub fn corr_distance(rho: f64) -> Result<f64> {
    if !(-1.0 - 1e-12..=1.0 + 1e-12).contains(&rho) {
        return Err(Error::invalid(format!("correlation {rho} outside [-1, 1]")));
    }
    Ok((2.0 * (1.0 - rho.clamp(-1.0, 1.0))).sqrt())
}
