use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};

/// Eigenpairs of a symmetric matrix, eigenvalues in descending order.
/// Column `i` of `vectors` belongs to `values[i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenDecomposition {
    pub values: Vec<f64>,
    pub vectors: DMatrix<f64>,
}

const SYMMETRY_TOLERANCE: f64 = 1e-12;

pub fn eigen_decompose(matrix: &DMatrix<f64>) -> Result<EigenDecomposition> {
    if !matrix.is_square() {
        return Err(Error::invalid(format!("matrix is {}x{}, not square", matrix.nrows(), matrix.ncols())));
    }
    let scale = matrix.amax().max(1.0);
    let asym = (matrix - matrix.transpose()).amax();
    if asym > SYMMETRY_TOLERANCE * scale {
        return Err(Error::NotSymmetric(asym));
    }
    let k = matrix.nrows();
    let sym = 0.5 * (matrix + matrix.transpose());
    let eig = SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]).then(a.cmp(&b)));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = eig.eigenvectors.select_columns(&order);
    Ok(EigenDecomposition { values, vectors })
}

/// Flip `v` so that its largest-magnitude entry (first one on ties) is positive.
pub fn fix_sign(v: &mut [f64]) {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if x.abs() > v[best].abs() + 1e-12 {
            best = i;
        }
    }
    if v.get(best).is_some_and(|&x| x < 0.0) {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}
