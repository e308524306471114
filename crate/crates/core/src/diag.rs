//! Simultaneous diagonalization of a pair of complex symmetric forms.
//!
//! For symmetric `(A, B)` with `A` invertible and the pencil `det(tA - B)`
//! having simple roots, there is a frame `G` with `Gᵀ A G = I` and
//! `Gᵀ B G = diag(λ)`. Columns are recovered as kernel vectors of the
//! singular pencil members, refined by a bilinear Rayleigh quotient, then
//! normalized against `A` with a deterministic sign convention.

use crate::error::{Error, Result};
use crate::matrix::{bilinear_dot, Mat, SymMatrix};
use crate::rank::{kernel_vector, numeric_rank};
use crate::roots::{poly_roots, sort_complex};
use crate::scalar::C64;
use crate::tol;
use crate::matrix::pencil_det_poly;

#[derive(Debug, Clone)]
pub struct DiagPair {
    /// Columns are the frame vectors `g_k`.
    pub frame: Mat<C64>,
    /// Pencil eigenvalues, sorted lexicographically by `(re, im)`.
    pub lambdas: Vec<C64>,
    /// Largest residual entry of `GᵀAG - I` and `GᵀBG - diag(λ)`, relative
    /// to the input scale.
    pub residual: f64,
}

pub fn simultaneous_diagonalize(a: &SymMatrix<C64>, b: &SymMatrix<C64>) -> Result<DiagPair> {
    let dim = a.dim();
    if b.dim() != dim {
        return Err(Error::SizeMismatch {
            expected: dim,
            got: b.dim(),
        });
    }
    if dim == 0 {
        return Err(Error::DomainError("empty form pair".into()));
    }
    let a_mat = a.to_mat();
    if numeric_rank(&a_mat, tol::RANK_REL) < dim {
        return Err(Error::SingularA);
    }

    let char_poly = pencil_det_poly(a, b)?;
    if char_poly.degree() != Some(dim) {
        return Err(Error::SingularA);
    }
    let mut lambdas = poly_roots(&char_poly)?;
    sort_complex(&mut lambdas);
    let lambda_scale = 1.0 + lambdas.iter().map(|z| z.norm()).fold(0.0, f64::max);
    for i in 0..lambdas.len() {
        for j in (i + 1)..lambdas.len() {
            if (lambdas[i] - lambdas[j]).norm() <= 1e-8 * lambda_scale {
                return Err(Error::DegeneratePencil);
            }
        }
    }

    let b_mat = b.to_mat();
    let mut columns = Vec::with_capacity(dim);
    let mut refined = Vec::with_capacity(dim);
    for lambda in &lambdas {
        let member = a.pencil_at(b, lambda)?.to_mat();
        let mut g = kernel_vector(&member)?;
        // one Rayleigh pass: quadratic accuracy in the eigenvalue
        let num = bilinear_dot(&g, &b_mat.mat_vec(&g)?);
        let den = bilinear_dot(&g, &a_mat.mat_vec(&g)?);
        let polished = if den.norm() > 1e-14 { num / den } else { *lambda };
        let member = a.pencil_at(b, &polished)?.to_mat();
        g = kernel_vector(&member)?;

        let weight = bilinear_dot(&g, &a_mat.mat_vec(&g)?);
        if weight.norm() <= 1e-12 {
            return Err(Error::DegeneratePencil);
        }
        let factor = 1.0 / weight.sqrt();
        let mut col: Vec<C64> = g.iter().map(|z| z * factor).collect();
        canonical_sign(&mut col);
        columns.push(col);
        refined.push(polished);
    }

    let frame = Mat::from_columns(&columns)?;
    let scale = a.max_abs().max(b.max_abs()).max(1.0);
    let gram_a = a.congruence(&frame)?;
    let gram_b = b.congruence(&frame)?;
    let mut residual: f64 = 0.0;
    for i in 0..dim {
        for j in 0..dim {
            let target_a = if i == j { C64::ONE } else { C64::ZERO };
            let target_b = if i == j { refined[i] } else { C64::ZERO };
            residual = residual.max((gram_a.at(i, j) - target_a).norm() / scale);
            residual = residual.max((gram_b.at(i, j) - target_b).norm() / scale);
        }
    }
    if residual > tol::DIAG_RESIDUAL {
        return Err(Error::NoConverge { residual });
    }
    Ok(DiagPair {
        frame,
        lambdas: refined,
        residual,
    })
}

/// Flips the vector so its first significant entry has positive real part
/// (positive imaginary part on the boundary), fixing the sign ambiguity left
/// by the quadratic normalization.
fn canonical_sign(v: &mut [C64]) {
    let scale = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if let Some(first) = v.iter().find(|z| z.norm() > 1e-8 * scale) {
        let flip = first.re < 0.0 || (first.re == 0.0 && first.im < 0.0);
        if flip {
            for z in v.iter_mut() {
                *z = -*z;
            }
        }
    }
}
