//! Numeric rank, kernels and least squares for the floating backend.
//!
//! These lean on nalgebra's complex SVD; everything problem-specific stays in
//! the callers. Rank is the count of singular values above a relative cutoff.

use crate::error::{Error, Result};
use crate::matrix::Mat;
use crate::scalar::C64;
use nalgebra::DMatrix;

pub fn to_nalgebra(m: &Mat<C64>) -> DMatrix<C64> {
    DMatrix::from_fn(m.rows(), m.cols(), |i, j| m.at(i, j))
}

pub fn from_nalgebra(m: &DMatrix<C64>) -> Mat<C64> {
    Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

/// Singular values in nonincreasing order.
pub fn singular_values(m: &Mat<C64>) -> Vec<f64> {
    let svd = to_nalgebra(m).svd(false, false);
    let mut sv: Vec<f64> = svd.singular_values.iter().copied().collect();
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    sv
}

/// Number of singular values exceeding `rel_tol` times the largest one.
/// The zero matrix has rank zero.
pub fn numeric_rank(m: &Mat<C64>, rel_tol: f64) -> usize {
    let sv = singular_values(m);
    match sv.first() {
        None => 0,
        Some(&top) if top == 0.0 => 0,
        Some(&top) => sv.iter().filter(|&&s| s > rel_tol * top).count(),
    }
}

/// A unit right-kernel vector for the smallest singular value. For a wide
/// matrix the rows are zero-padded first so the full right factor exists.
pub fn kernel_vector(m: &Mat<C64>) -> Result<Vec<C64>> {
    let cols = m.cols();
    let padded = if m.rows() >= cols {
        to_nalgebra(m)
    } else {
        let mut p = DMatrix::zeros(cols, cols);
        p.view_mut((0, 0), (m.rows(), cols)).copy_from(&to_nalgebra(m));
        p
    };
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.as_ref().ok_or(Error::RankDeficient)?;
    let mut smallest = 0usize;
    for (k, s) in svd.singular_values.iter().enumerate() {
        if *s < svd.singular_values[smallest] {
            smallest = k;
        }
    }
    Ok((0..cols).map(|j| v_t[(smallest, j)].conj()).collect())
}

/// Orthonormal basis of the right kernel, assuming `rank` is known.
pub fn kernel_basis(m: &Mat<C64>, rank: usize) -> Result<Vec<Vec<C64>>> {
    let cols = m.cols();
    if rank > cols {
        return Err(Error::SizeMismatch {
            expected: cols,
            got: rank,
        });
    }
    let padded = {
        let side = m.rows().max(cols);
        let mut p = DMatrix::zeros(side, cols);
        p.view_mut((0, 0), (m.rows(), cols)).copy_from(&to_nalgebra(m));
        p
    };
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.as_ref().ok_or(Error::RankDeficient)?;
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| {
        svd.singular_values[b]
            .partial_cmp(&svd.singular_values[a])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    Ok(order[rank..]
        .iter()
        .map(|&row| (0..cols).map(|j| v_t[(row, j)].conj()).collect())
        .collect())
}

/// Minimum-norm least-squares solution of `a * x = rhs` for each column of
/// `rhs`, via the SVD with a relative cutoff.
pub fn least_squares(a: &Mat<C64>, rhs: &Mat<C64>, rel_tol: f64) -> Result<Mat<C64>> {
    if a.rows() != rhs.rows() {
        return Err(Error::SizeMismatch {
            expected: a.rows(),
            got: rhs.rows(),
        });
    }
    let svd = to_nalgebra(a).svd(true, true);
    let cutoff = rel_tol * svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let solved = svd
        .solve(&to_nalgebra(rhs), cutoff)
        .map_err(|_| Error::RankDeficient)?;
    Ok(from_nalgebra(&solved))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tol;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn identity_has_full_rank() {
        let m: Mat<C64> = Mat::identity(3);
        assert_eq!(numeric_rank(&m, tol::RANK_REL), 3);
    }

    #[test]
    fn outer_product_has_rank_one() {
        let u = [c(1.0, 0.5), c(-2.0, 0.0), c(0.0, 3.0)];
        let v = [c(0.5, 0.0), c(1.0, -1.0), c(2.0, 2.0), c(-1.0, 0.0)];
        let m = Mat::from_fn(3, 4, |i, j| u[i] * v[j]);
        assert_eq!(numeric_rank(&m, tol::RANK_REL), 1);
    }

    #[test]
    fn product_rank_is_bounded_by_inner_dimension() {
        // Vandermonde factors at distinct nodes have full rank, so the
        // product rank is exactly the inner dimension
        let a = Mat::from_fn(5, 3, |i, j| c(1.0 + i as f64, 0.2 * i as f64).powu(j as u32));
        let b = Mat::from_fn(3, 7, |i, j| c(0.5 + j as f64, 0.3).powu(i as u32));
        let m = a.mul(&b).unwrap();
        assert_eq!(numeric_rank(&m, tol::RANK_REL), 3);
    }

    #[test]
    fn zero_matrix_has_rank_zero() {
        let m: Mat<C64> = Mat::zeros(4, 2);
        assert_eq!(numeric_rank(&m, tol::RANK_REL), 0);
    }

    #[test]
    fn kernel_vector_annihilates_a_singular_square_matrix() {
        // rows are multiples, kernel is 1-dimensional plus the rank-deficiency
        let m = Mat::from_fn(3, 3, |i, j| c(((i + 1) * (j + 1)) as f64, 0.0));
        let k = kernel_vector(&m).unwrap();
        let image = m.mat_vec(&k).unwrap();
        let norm: f64 = image.iter().map(|z| z.norm()).sum();
        assert!(norm < 1e-10, "kernel image norm {norm}");
    }

    #[test]
    fn kernel_vector_of_wide_matrix() {
        let m = Mat::from_fn(1, 3, |_, j| c(1.0 + j as f64, -0.5 * j as f64));
        let k = kernel_vector(&m).unwrap();
        let image = m.mat_vec(&k).unwrap();
        assert!(image[0].norm() < 1e-12);
    }

    #[test]
    fn least_squares_solves_consistent_system() {
        let a = Mat::from_fn(4, 2, |i, j| c((i + j) as f64 + 1.0, i as f64 * 0.2));
        let planted = Mat::from_fn(2, 1, |i, _| c(1.0 - i as f64, 0.7));
        let rhs = a.mul(&planted).unwrap();
        let sol = least_squares(&a, &rhs, 1e-12).unwrap();
        let diff = sol.sub(&planted).unwrap();
        assert!(diff.max_abs() < 1e-10);
    }
}
