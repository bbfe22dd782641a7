use serde::Serialize;

use super::eigen::fix_sign;
use super::spectrum::SpectrumReport;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComponentRow {
    pub symbol: String,
    pub sector: String,
    /// One entry per leading eigenvector.
    pub components: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComponentTable {
    pub n_top: usize,
    /// Grouped by sector (alphabetical), symbol order preserved within a sector.
    pub rows: Vec<ComponentRow>,
}

/// Signed components of the `n_top` leading eigenvectors, each sign-fixed so
/// its largest-magnitude component is positive.
pub fn top_eigenvector_components(
    report: &SpectrumReport,
    n_top: usize,
    symbols: &[String],
    sectors: &[String],
) -> Result<ComponentTable> {
    let k = report.eigenvalues.len();
    if n_top > k {
        return Err(Error::invalid(format!("asked for {n_top} eigenvectors of a {k}-variable spectrum")));
    }
    if symbols.len() != k || sectors.len() != k {
        return Err(Error::invalid("symbol/sector lists do not match the spectrum"));
    }
    let vectors: Vec<Vec<f64>> = (0..n_top)
        .map(|c| {
            let mut v: Vec<f64> = report.eigenvectors.column(c).iter().copied().collect();
            fix_sign(&mut v);
            v
        })
        .collect();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| sectors[a].cmp(&sectors[b]).then(a.cmp(&b)));
    let rows = order
        .into_iter()
        .map(|i| ComponentRow {
            symbol: symbols[i].clone(),
            sector: sectors[i].clone(),
            components: vectors.iter().map(|v| v[i]).collect(),
        })
        .collect();
    Ok(ComponentTable { n_top, rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rmt::spectrum_report;
    use nalgebra::DMatrix;

    fn names(k: usize) -> Vec<String> {
        (0..k).map(|i| format!("S{i}")).collect()
    }

    #[test]
    fn identity_gives_basis_vectors() {
        let r = spectrum_report(&DMatrix::identity(3, 3), 100, "p").unwrap();
        let t = top_eigenvector_components(&r, 3, &names(3), &["A".into(), "A".into(), "A".into()]).unwrap();
        for c in 0..3 {
            let col: Vec<f64> = t.rows.iter().map(|row| row.components[c]).collect();
            assert_eq!(col.iter().filter(|&&v| v == 1.0).count(), 1);
            assert_eq!(col.iter().filter(|&&v| v == 0.0).count(), 2);
        }
    }

    #[test]
    fn unit_norm_and_sector_order() {
        let c = DMatrix::from_row_slice(3, 3, &[1.0, 0.3, 0.1, 0.3, 1.0, 0.2, 0.1, 0.2, 1.0]);
        let r = spectrum_report(&c, 100, "p").unwrap();
        let sectors: Vec<String> = vec!["IT".into(), "ENERGY".into(), "IT".into()];
        let t = top_eigenvector_components(&r, 3, &names(3), &sectors).unwrap();
        assert_eq!(t.rows.iter().map(|r| r.symbol.as_str()).collect::<Vec<_>>(), vec!["S1", "S0", "S2"]);
        for c in 0..3 {
            let ss: f64 = t.rows.iter().map(|r| r.components[c].powi(2)).sum();
            assert!((ss - 1.0).abs() < 1e-9);
            let top = t.rows.iter().map(|r| r.components[c]).max_by(|a, b| a.abs().total_cmp(&b.abs())).unwrap();
            assert!(top > 0.0);
        }
        assert!(top_eigenvector_components(&r, 4, &names(3), &sectors).is_err());
    }
}
