//! Small dense linear algebra helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector};

/// Orthonormalize the columns of `m` by modified Gram-Schmidt, dropping
/// columns whose residual after projection falls below `tol`.
pub fn orthonormalize(m: &DMatrix<f64>, tol: f64) -> DMatrix<f64> {
    let n = m.nrows();
    let mut cols: Vec<DVector<f64>> = Vec::new();
    for j in 0..m.ncols() {
        let mut v = m.column(j).clone_owned();
        for u in &cols {
            let c = u.dot(&v);
            v -= u * c;
        }
        // second pass keeps orthogonality near machine precision
        for u in &cols {
            let c = u.dot(&v);
            v -= u * c;
        }
        let norm = v.norm();
        if norm > tol {
            cols.push(v / norm);
        }
    }
    from_columns(n, &cols)
}

/// Extend the orthonormal columns of `basis` to an orthonormal basis of the
/// ambient space using coordinate vectors, and return only the new columns
/// (an orthonormal basis of the orthogonal complement).
pub fn orthonormal_complement(basis: &DMatrix<f64>, tol: f64) -> DMatrix<f64> {
    let n = basis.nrows();
    let mut cols: Vec<DVector<f64>> = (0..basis.ncols())
        .map(|j| basis.column(j).clone_owned())
        .collect();
    let mut extra: Vec<DVector<f64>> = Vec::new();
    for j in 0..n {
        let mut v = DVector::zeros(n);
        v[j] = 1.0;
        for u in cols.iter().chain(extra.iter()) {
            let c = u.dot(&v);
            v -= u * c;
        }
        for u in cols.iter().chain(extra.iter()) {
            let c = u.dot(&v);
            v -= u * c;
        }
        let norm = v.norm();
        if norm > tol {
            extra.push(v / norm);
        }
    }
    debug_assert_eq!(cols.len() + extra.len(), n);
    cols.clear();
    from_columns(n, &extra)
}

/// Orthonormal basis of the kernel of `m` (columns of the result), using the
/// singular value decomposition with absolute threshold `tol` on singular
/// values relative to the largest one.
pub fn nullspace(m: &DMatrix<f64>, tol: f64) -> DMatrix<f64> {
    let ncols = m.ncols();
    if ncols == 0 {
        return DMatrix::zeros(0, 0);
    }
    if m.nrows() == 0 {
        return DMatrix::identity(ncols, ncols);
    }
    // kernel of m = eigenvectors of mᵀm with (near) zero eigenvalue; the
    // gram eigenvalues carry absolute noise ~eps·‖gram‖, so the effective
    // singular-value cut cannot go below ~1e-7 relative
    let gram = m.transpose() * m;
    let eig = nalgebra::SymmetricEigen::new(gram);
    let max = eig.eigenvalues.iter().cloned().fold(0.0_f64, f64::max);
    let sv_tol = tol.max(1e-7);
    let thresh = (sv_tol * sv_tol) * max.max(1.0);
    let mut cols = Vec::new();
    for (idx, &ev) in eig.eigenvalues.iter().enumerate() {
        if ev <= thresh {
            cols.push(eig.eigenvectors.column(idx).clone_owned());
        }
    }
    let raw = from_columns(ncols, &cols);
    orthonormalize(&raw, 1e-12)
}

/// Numerical rank of `m` with singular values below `tol * max_sv` treated
/// as zero.
pub fn numerical_rank(m: &DMatrix<f64>, tol: f64) -> usize {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0;
    }
    let svd = m.clone().svd(false, false);
    let max = svd.singular_values.iter().cloned().fold(0.0_f64, f64::max);
    if max == 0.0 {
        return 0;
    }
    svd.singular_values.iter().filter(|&&s| s > tol * max.max(1.0)).count()
}

/// Eigen decomposition of a symmetric matrix with eigenvalues sorted
/// ascending and eigenvectors as matching columns.
pub fn sym_eigen_sorted(m: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let n = m.nrows();
    let sym = (m + m.transpose()) * 0.5;
    let eig = nalgebra::SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    (values, vectors)
}

/// Inverse square root of a symmetric positive definite matrix.
pub fn spd_inv_sqrt(m: &DMatrix<f64>) -> DMatrix<f64> {
    let (values, vectors) = sym_eigen_sorted(m);
    let n = m.nrows();
    let mut d = DMatrix::zeros(n, n);
    for i in 0..n {
        d[(i, i)] = 1.0 / values[i].max(f64::MIN_POSITIVE).sqrt();
    }
    &vectors * d * vectors.transpose()
}

/// Build an `n × k` matrix from `k` column vectors (handles `k = 0`).
pub fn from_columns(n: usize, cols: &[DVector<f64>]) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(n, cols.len());
    for (j, c) in cols.iter().enumerate() {
        m.set_column(j, c);
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complement_dimensions_add_up() {
        let b = orthonormalize(
            &DMatrix::from_row_slice(4, 2, &[1.0, 1.0, 0.0, 1.0, 0.0, 1.0, 0.0, 0.0]),
            1e-12,
        );
        let c = orthonormal_complement(&b, 1e-9);
        assert_eq!(c.ncols(), 2);
        let cross = b.transpose() * &c;
        assert!(cross.norm() < 1e-12);
    }

    #[test]
    fn nullspace_of_rank_deficient_matrix() {
        // rank 1, kernel dimension 2
        let m = DMatrix::from_row_slice(2, 3, &[1.0, 2.0, 3.0, 2.0, 4.0, 6.0]);
        let k = nullspace(&m, 1e-9);
        assert_eq!(k.ncols(), 2);
        assert!((&m * &k).norm() < 1e-9);
        assert_eq!(numerical_rank(&m, 1e-9), 1);
    }
}
