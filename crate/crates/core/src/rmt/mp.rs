use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};

/// Marchenko–Pastur support for a random correlation matrix with `Q = m / k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MpParams {
    pub q_ratio: f64,
    pub lambda_min: f64,
    pub lambda_max: f64,
}

impl MpParams {
    pub fn from_ratio(q_ratio: f64) -> Result<Self> {
        if !q_ratio.is_finite() || q_ratio <= 1.0 {
            return Err(Error::invalid(format!("Q = {q_ratio} must exceed 1")));
        }
        let s = (1.0 / q_ratio).sqrt();
        Ok(MpParams {
            q_ratio,
            lambda_min: (1.0 - s).powi(2),
            lambda_max: (1.0 + s).powi(2),
        })
    }

    pub fn contains(&self, lambda: f64) -> bool {
        self.lambda_min <= lambda && lambda <= self.lambda_max
    }
}

/// Bounds for `m` observations of `k` variables.
pub fn mp_bounds(m: usize, k: usize) -> Result<MpParams> {
    if k < 2 {
        return Err(Error::invalid("need at least two variables"));
    }
    if m <= k {
        return Err(Error::invalid(format!("m = {m} must exceed k = {k}")));
    }
    MpParams::from_ratio(m as f64 / k as f64)
}

/// `Q/(2π) · sqrt((λmax − λ)(λ − λmin)) / λ` on the support, 0 elsewhere.
pub fn mp_pdf(lambda: f64, mp: &MpParams) -> f64 {
    if !mp.contains(lambda) {
        return 0.0;
    }
    let r = (mp.lambda_max - lambda) * (lambda - mp.lambda_min);
    mp.q_ratio / (2.0 * PI) * r.max(0.0).sqrt() / lambda
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_values() {
        assert!((mp_bounds(30198, 89).unwrap().lambda_max - 1.1115).abs() < 1e-4);
        assert!((mp_bounds(101379, 89).unwrap().lambda_max - 1.0601).abs() < 1e-4);
    }

    #[test]
    fn large_q_collapses_to_one() {
        let mp = MpParams::from_ratio(1e12).unwrap();
        assert!((mp.lambda_min - 1.0).abs() < 1e-5 && (mp.lambda_max - 1.0).abs() < 1e-5);
    }

    #[test]
    fn pdf_support() {
        let mp = mp_bounds(1000, 10).unwrap();
        assert!(mp.lambda_min < 1.0 && 1.0 < mp.lambda_max);
        assert_eq!(mp_pdf(mp.lambda_max + 0.1, &mp), 0.0);
        assert_eq!(mp_pdf(mp.lambda_min * 0.5, &mp), 0.0);
        assert_eq!(mp_pdf(mp.lambda_max, &mp), 0.0);
        assert!(mp_pdf(1.0, &mp) > 0.0);
    }

    #[test]
    fn rejects_wide_panels() {
        assert!(mp_bounds(89, 89).is_err());
        assert!(mp_bounds(10, 1).is_err());
    }
}
