use nalgebra::{DMatrix, SymmetricEigen};

/// Square matrix from a row-major slice.
pub fn from_row_major(v: &[f64]) -> DMatrix<f64> {
    let n = (v.len() as f64).sqrt().round() as usize;
    assert_eq!(n * n, v.len(), "not a square matrix");
    DMatrix::from_row_slice(n, n, v)
}

/// Eigenvalues of a symmetric matrix, ascending.
pub fn eigenvalues(m: DMatrix<f64>) -> Vec<f64> {
    let mut e: Vec<f64> = SymmetricEigen::new(m).eigenvalues.iter().copied().collect();
    e.sort_by(f64::total_cmp);
    e
}
