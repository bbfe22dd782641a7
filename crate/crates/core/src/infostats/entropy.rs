use nalgebra::DMatrix;

use crate::error::{Error, Result};

const SUM_TOLERANCE: f64 = 1e-9;

/// Shannon entropy `-Σ f ln f` of a probability vector, with `0 ln 0 = 0`.
pub fn entropy_discrete(pmf: &[f64]) -> Result<f64> {
    if let Some(p) = pmf.iter().find(|p| p.is_nan() || **p < 0.0) {
        return Err(Error::invalid(format!("negative or non-finite probability {p}")));
    }
    let total: f64 = pmf.iter().sum();
    if (total - 1.0).abs() > SUM_TOLERANCE {
        return Err(Error::invalid(format!("probabilities sum to {total}, not 1")));
    }
    Ok(plugin_entropy(pmf.iter().copied()))
}

pub(crate) fn plugin_entropy(pmf: impl Iterator<Item = f64>) -> f64 {
    -pmf.filter(|&p| p > 0.0).map(|p| p * p.ln()).sum::<f64>()
}

/// Entropy of counts normalised by `total`.
pub(crate) fn count_entropy(counts: impl Iterator<Item = u64>, total: u64) -> f64 {
    let n = total as f64;
    plugin_entropy(counts.map(|c| c as f64 / n))
}

/// Joint entropy of a probability grid.
pub fn joint_entropy_discrete(joint: &DMatrix<f64>) -> Result<f64> {
    entropy_discrete(joint.as_slice())
}

/// `2 I / (H(X) + H(Y))`.
pub fn normalized_mi(mi: f64, hx: f64, hy: f64) -> Result<f64> {
    if hx <= 0.0 || hy <= 0.0 {
        return Err(Error::invalid("marginal entropies must be positive"));
    }
    if mi < 0.0 {
        return Err(Error::invalid(format!("negative mutual information {mi}")));
    }
    Ok((2.0 * mi / (hx + hy)).min(1.0))
}

/// `1 - I / H(X, Y)`, in `[0, 1]`.
pub fn mi_distance(mi: f64, joint_entropy: f64) -> Result<f64> {
    if joint_entropy <= 0.0 {
        return Err(Error::invalid("joint entropy must be positive"));
    }
    if mi < 0.0 {
        return Err(Error::invalid(format!("negative mutual information {mi}")));
    }
    if mi > joint_entropy * (1.0 + 1e-12) {
        return Err(Error::invalid(format!(
            "mutual information {mi} exceeds joint entropy {joint_entropy}"
        )));
    }
    Ok((1.0 - mi / joint_entropy).max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::LN_2;

    #[test]
    fn marginal_examples() {
        assert!((entropy_discrete(&[0.25; 4]).unwrap() - 4f64.ln()).abs() < 1e-15);
        assert_eq!(entropy_discrete(&[0.0, 1.0, 0.0]).unwrap(), 0.0);
        assert!((entropy_discrete(&[0.5, 0.25, 0.25]).unwrap() - 1.5 * LN_2).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_pmf() {
        assert!(entropy_discrete(&[-0.1, 1.1]).is_err());
        assert!(entropy_discrete(&[0.5, 0.4]).is_err());
        assert!(entropy_discrete(&[f64::NAN, 1.0]).is_err());
    }

    #[test]
    fn joint_examples() {
        let coins = DMatrix::from_element(2, 2, 0.25);
        assert!((joint_entropy_discrete(&coins).unwrap() - 2.0 * LN_2).abs() < 1e-15);
        let coupled = DMatrix::from_row_slice(2, 2, &[0.5, 0.0, 0.0, 0.5]);
        assert!((joint_entropy_discrete(&coupled).unwrap() - LN_2).abs() < 1e-15);
    }

    #[test]
    fn nmi_examples() {
        assert!((normalized_mi(LN_2, LN_2, LN_2).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(normalized_mi(0.0, 1.0, 1.0).unwrap(), 0.0);
        assert!((normalized_mi(0.25, 1.0, 1.5).unwrap() - 0.2).abs() < 1e-15);
        assert!(normalized_mi(0.1, 0.0, 1.0).is_err());
    }

    #[test]
    fn distance_examples() {
        assert_eq!(mi_distance(1.2, 1.2).unwrap(), 0.0);
        assert_eq!(mi_distance(0.0, 1.2).unwrap(), 1.0);
        assert!((mi_distance(0.3, 1.2).unwrap() - 0.75).abs() < 1e-15);
        assert!(mi_distance(1.3, 1.2).is_err());
        assert!(mi_distance(0.3, 0.0).is_err());
    }
}
