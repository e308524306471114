//! The spectral fibration: the distinguished family of symmetric 2-tensors,
//! the degree `n - 1` spectral polynomial of a cotangent vector, and the
//! auxiliary plane lift that identifies fibers with pencil data one
//! dimension down.
//!
//! Three independent routes to the same fiber invariant live here:
//! quadratic-form values of the tensors, roots of the adjugate-based
//! spectral polynomial, and singular members of the restricted pencil. The
//! verification suites cross-check them against each other.

use crate::diag::simultaneous_diagonalize;
use crate::error::{Error, Result};
use crate::matching::vec_norm;
use crate::matrix::{bilinear_dot, Mat, SymMatrix};
use crate::poly::Poly;
use crate::rank::{kernel_basis, kernel_vector, least_squares, numeric_rank};
use crate::roots::poly_roots;
use crate::scalar::{Scalar, C64};
use crate::seed::child_rng;
use crate::tol;
use crate::variety::{
    frame_covector, grad_q1, grad_q2, hessian_matrix, orthonormalize, restrict_to_hyperplane,
    sample_cotangent, sample_point, tangent_frame, CotangentSample, Covector, PencilConfig,
    PencilMember, Point, TangentFrame,
};
use serde::{Deserialize, Serialize};

/// Fixed stream used to calibrate the frame gauge of the spectral
/// polynomial; keeping it constant makes the fitted encoding map a function
/// of the configuration alone.
const GAUGE_CALIBRATION_SEED: u64 = 0x70c0_ffee;

/// Ambient symmetric matrix of the tensor with the given index: the value of
/// the tensor on a covector is the quadratic form of this matrix.
pub fn s_matrix<S: Scalar>(
    cfg: &PencilConfig<S>,
    index: usize,
    x: &[S],
) -> Result<SymMatrix<S>> {
    let dim = cfg.ambient_dim();
    if index >= dim {
        return Err(Error::DomainError(format!(
            "tensor index {index} out of range for {dim} coordinates"
        )));
    }
    if x.len() != dim {
        return Err(Error::SizeMismatch {
            expected: dim,
            got: x.len(),
        });
    }
    let mu = cfg.mu();
    let gap = |j: usize| mu[j].clone() - mu[index].clone();
    let mut diag_index = S::zero();
    for j in 0..dim {
        if j != index {
            diag_index = diag_index + x[j].clone() * x[j].clone() / gap(j);
        }
    }
    Ok(SymMatrix::from_fn(dim, |a, b| {
        if a == b {
            if a == index {
                diag_index.clone()
            } else {
                x[index].clone() * x[index].clone() / gap(a)
            }
        } else if a == index {
            -(x[index].clone() * x[b].clone()) / gap(b)
        } else if b == index {
            -(x[index].clone() * x[a].clone()) / gap(a)
        } else {
            S::zero()
        }
    }))
}

/// Value of one tensor on a covector, through its ambient matrix.
pub fn s_value<S: Scalar>(
    cfg: &PencilConfig<S>,
    index: usize,
    x: &[S],
    xi: &[S],
) -> Result<S> {
    s_matrix(cfg, index, x)?.quadratic_form(xi)
}

/// Values of all `n + 3` tensors on a covector.
pub fn s_values<S: Scalar>(cfg: &PencilConfig<S>, x: &[S], xi: &[S]) -> Result<Vec<S>> {
    (0..cfg.ambient_dim())
        .map(|i| s_value(cfg, i, x, xi))
        .collect()
}

/// The fibration value at a sample: all tensor values at once.
pub fn phi_s(cfg: &PencilConfig<C64>, sample: &CotangentSample) -> Result<Vec<C64>> {
    s_values(cfg, &sample.point.0, &sample.covector.0)
}

/// The spectral polynomial of a covector in a given frame: the adjugate of
/// the restricted pencil evaluated as a quadratic form on the frame
/// coordinates of the covector, interpolated from `n` integer nodes. Its
/// overall scale depends on the frame; its roots do not.
pub fn psi_poly(
    cfg: &PencilConfig<C64>,
    frame: &TangentFrame,
    covector: &Covector,
) -> Result<Poly<C64>> {
    let n = cfg.n();
    let xihat = frame_covector(frame, covector)?;
    let frame_scale = frame
        .0
        .iter()
        .map(|v| vec_norm(v))
        .fold(0.0, f64::max)
        .max(1e-300);
    if vec_norm(&xihat) <= 1e-10 * vec_norm(&covector.0) * frame_scale {
        return Err(Error::ZeroRestriction);
    }
    let a = hessian_matrix(cfg, frame, PencilMember::First)?;
    let b = hessian_matrix(cfg, frame, PencilMember::Second)?;
    let mut points = Vec::with_capacity(n);
    for k in 0..n {
        let t = C64::new(k as f64, 0.0);
        let member = a.pencil_at(&b, &t)?;
        let adj = member.to_mat().adjugate()?;
        let value = bilinear_dot(&xihat, &adj.mat_vec(&xihat)?);
        points.push((t, value));
    }
    Poly::interpolate(&points)
}

/// Roots of the spectral polynomial; errors if the degree dropped.
pub fn fiber_roots(cfg: &PencilConfig<C64>, psi: &Poly<C64>) -> Result<Vec<C64>> {
    let expected = cfg.n() - 1;
    if psi.degree() != Some(expected) {
        return Err(Error::DegenerateDrop { expected });
    }
    poly_roots(psi)
}

/// Parameters of the singular members of the pencil restricted to the
/// kernel hyperplane of the covector. An independent route to `fiber_roots`.
pub fn singular_members(
    cfg: &PencilConfig<C64>,
    frame: &TangentFrame,
    covector: &Covector,
) -> Result<Vec<C64>> {
    let n = cfg.n();
    let xihat = frame_covector(frame, covector)?;
    if vec_norm(&xihat) <= 1e-12 {
        return Err(Error::ZeroRestriction);
    }
    let a = hessian_matrix(cfg, frame, PencilMember::First)?;
    let b = hessian_matrix(cfg, frame, PencilMember::Second)?;
    let restriction = restrict_to_hyperplane(&a, &xihat)?;
    let b_restricted = b.congruence(&restriction.basis)?;
    let char_poly = crate::matrix::pencil_det_poly(&restriction.matrix, &b_restricted)?;
    if char_poly.degree() != Some(n - 1) {
        return Err(Error::DegenerateDrop { expected: n - 1 });
    }
    poly_roots(&char_poly)
}

/// One sample's spectral data, as exchanged over JSON.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpectralValue {
    /// Spectral polynomial coefficients, lowest degree first (frame gauge).
    #[serde(with = "crate::jsonio::complex_vec")]
    pub psi: Vec<C64>,
    /// Values of all tensors at the sample.
    #[serde(with = "crate::jsonio::complex_vec")]
    pub s: Vec<C64>,
    /// Roots of the spectral polynomial, sorted lexicographically.
    #[serde(with = "crate::jsonio::complex_vec")]
    pub roots: Vec<C64>,
}

/// Computes the full spectral record of a sample with the deterministic
/// frame construction.
pub fn spectral_value(cfg: &PencilConfig<C64>, sample: &CotangentSample) -> Result<SpectralValue> {
    let frame = tangent_frame(cfg, &sample.point)?;
    let psi = psi_poly(cfg, &frame, &sample.covector)?;
    let roots = fiber_roots(cfg, &psi)?;
    let s = phi_s(cfg, sample)?;
    let mut coeffs: Vec<C64> = (0..cfg.n()).map(|k| psi.coeff(k)).collect();
    if coeffs.is_empty() {
        coeffs.push(C64::ZERO);
    }
    Ok(SpectralValue {
        psi: coeffs,
        s,
        roots,
    })
}

/// The lifted plane on the two auxiliary quadrics in `2n + 2` coordinates:
/// `lambdas` are the weights of the second auxiliary quadric on the new
/// coordinates, `basis` columns span the plane.
#[derive(Debug, Clone)]
pub struct PlaneLift {
    pub lambdas: Vec<C64>,
    pub basis: Mat<C64>,
}

#[derive(Serialize, Deserialize)]
struct PlaneLiftWire {
    lambda: Vec<[f64; 2]>,
    plane: Vec<Vec<[f64; 2]>>,
}

impl Serialize for PlaneLift {
    fn serialize<T: serde::Serializer>(&self, s: T) -> std::result::Result<T::Ok, T::Error> {
        let plane = (0..self.basis.cols())
            .map(|j| {
                self.basis
                    .column(j)
                    .iter()
                    .map(crate::jsonio::to_pair)
                    .collect()
            })
            .collect();
        PlaneLiftWire {
            lambda: self.lambdas.iter().map(crate::jsonio::to_pair).collect(),
            plane,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for PlaneLift {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let wire = PlaneLiftWire::deserialize(d)?;
        let columns: Vec<Vec<C64>> = wire
            .plane
            .into_iter()
            .map(|col| col.into_iter().map(crate::jsonio::from_pair).collect())
            .collect();
        let basis = Mat::from_columns(&columns).map_err(serde::de::Error::custom)?;
        Ok(PlaneLift {
            lambdas: wire.lambda.into_iter().map(crate::jsonio::from_pair).collect(),
            basis,
        })
    }
}

/// Builds the plane lift of a sample: diagonalize the two restricted forms
/// on the covector's kernel hyperplane, read off linear forms from the
/// inverse frame, and pair each hyperplane vector with its form values as
/// new coordinates.
pub fn plane_lift(cfg: &PencilConfig<C64>, sample: &CotangentSample) -> Result<PlaneLift> {
    let n = cfg.n();
    let frame = tangent_frame(cfg, &sample.point)?;
    let xihat = frame_covector(&frame, &sample.covector)?;
    if vec_norm(&xihat) <= 1e-12 {
        return Err(Error::ZeroRestriction);
    }
    let a = hessian_matrix(cfg, &frame, PencilMember::First)?;
    let b = hessian_matrix(cfg, &frame, PencilMember::Second)?;
    let restriction = restrict_to_hyperplane(&a, &xihat)?;
    let b_restricted = b.congruence(&restriction.basis)?;
    let pair = simultaneous_diagonalize(&restriction.matrix.neg(), &b_restricted.neg())?;
    let alpha = pair.frame.inverse()?;
    let frame_mat = frame.as_matrix();
    let ambient_h = frame_mat.mul(&restriction.basis)?;

    let ambient = cfg.ambient_dim();
    let total = 2 * n + 2;
    let mut columns = Vec::with_capacity(n);
    let mut first = Vec::with_capacity(total);
    first.extend_from_slice(&sample.point.0);
    first.resize(total, C64::ZERO);
    columns.push(first);
    for bcol in 0..(n - 1) {
        let mut col = Vec::with_capacity(total);
        col.extend(ambient_h.column(bcol));
        debug_assert_eq!(col.len(), ambient);
        col.extend(alpha.column(bcol));
        columns.push(col);
    }
    Ok(PlaneLift {
        lambdas: pair.lambdas,
        basis: Mat::from_columns(&columns)?,
    })
}

/// Worst relative Gram entry of the two auxiliary quadrics on a lifted
/// plane: both must vanish, so the pair of maxima measures lift quality.
pub fn plane_gram_residuals(cfg: &PencilConfig<C64>, lift: &PlaneLift) -> Result<(f64, f64)> {
    let n = cfg.n();
    let total = 2 * n + 2;
    if lift.basis.rows() != total || lift.basis.cols() != n {
        return Err(Error::SizeMismatch {
            expected: total,
            got: lift.basis.rows(),
        });
    }
    let mut weights2: Vec<C64> = cfg.mu().to_vec();
    weights2.extend(lift.lambdas.iter().copied());
    let scale = lift.basis.max_abs().powi(2).max(1e-300);
    let mut worst1 = 0.0f64;
    let mut worst2 = 0.0f64;
    for a in 0..n {
        for b in 0..n {
            let col_a = lift.basis.column(a);
            let col_b = lift.basis.column(b);
            let mut g1 = C64::ZERO;
            let mut g2 = C64::ZERO;
            for i in 0..total {
                g1 += col_a[i] * col_b[i];
                g2 += weights2[i] * col_a[i] * col_b[i];
            }
            worst1 = worst1.max(g1.norm() / scale);
            worst2 = worst2.max(g2.norm() / scale);
        }
    }
    Ok((worst1, worst2))
}

/// Canonical covector representative: the Euler-orthogonal vector with the
/// span of the two gradients projected out. Class members all map to the
/// same representative.
pub fn canonical_covector(
    cfg: &PencilConfig<C64>,
    point: &Point,
    covector: &Covector,
) -> Result<Covector> {
    let g1 = grad_q1(&point.0);
    let g2 = grad_q2(cfg, &point.0)?;
    let conormal =
        orthonormalize(&[g1, g2], 1e-12).ok_or(Error::SingularPoint)?;
    let mut rep = covector.0.clone();
    for b in &conormal {
        let coeff = crate::matching::hermitian_dot(b, &rep);
        for (ri, bi) in rep.iter_mut().zip(b) {
            *ri -= coeff * bi;
        }
    }
    Ok(Covector(rep))
}

/// Recovers the sample underlying a lifted plane: its intersection with the
/// vanishing of the added coordinates, and the covector class cut out by the
/// images of the basis vectors.
pub fn psi_of_plane(cfg: &PencilConfig<C64>, basis: &Mat<C64>) -> Result<(Point, Covector)> {
    let n = cfg.n();
    let ambient = cfg.ambient_dim();
    let total = 2 * n + 2;
    if basis.rows() != total || basis.cols() != n {
        return Err(Error::SizeMismatch {
            expected: total * n,
            got: basis.rows() * basis.cols(),
        });
    }
    let y_block = Mat::from_fn(n - 1, n, |i, j| basis.at(ambient + i, j));
    let y_rank = numeric_rank(&y_block, tol::RANK_REL);
    let kernel_dim = n - y_rank;
    if kernel_dim != 1 {
        return Err(Error::BadIncidence { kernel_dim });
    }
    let combo = kernel_vector(&y_block)?;
    let x_block = Mat::from_fn(ambient, n, |i, j| basis.at(i, j));
    let mut x = x_block.mat_vec(&combo)?;
    let scale = x.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if scale <= 1e-300 {
        return Err(Error::BadIncidence { kernel_dim: 0 });
    }
    let inv = C64::new(1.0 / scale, 0.0);
    for v in x.iter_mut() {
        *v *= inv;
    }
    let point = Point(x);

    let pairings = x_block.transpose();
    if numeric_rank(&pairings, tol::RANK_REL) != n {
        return Err(Error::RankDeficient);
    }
    let kernel = kernel_basis(&pairings, n)?;
    let mut best: Option<Covector> = None;
    for candidate in kernel {
        let rep = canonical_covector(cfg, &point, &Covector(candidate))?;
        let better = match &best {
            None => true,
            Some(current) => vec_norm(&rep.0) > vec_norm(&current.0),
        };
        if better {
            best = Some(rep);
        }
    }
    let covector = best.ok_or(Error::ZeroCovector)?;
    if vec_norm(&covector.0) <= 1e-10 {
        return Err(Error::ZeroCovector);
    }
    Ok((point, covector))
}

/// Codimension of the rank-drop stratum labelled `(k, l)`.
pub fn codim_stratum(k: i64, l: i64) -> Result<i64> {
    if k < 0 || l < -1 || l > k {
        return Err(Error::DomainError(format!(
            "stratum labels out of range: k = {k}, l = {l}"
        )));
    }
    Ok((k - l) * (k - l - 1) + 2 * (l + 1))
}

/// Codimension of the corresponding locus upstairs in the Grassmannian
/// picture; exceeds the stratum codimension by `2(k+1)(l+1)`.
pub fn grassmann_codim(k: i64, l: i64) -> Result<i64> {
    if k < 0 || l < -1 || l > k {
        return Err(Error::DomainError(format!(
            "stratum labels out of range: k = {k}, l = {l}"
        )));
    }
    Ok(k * (k + 1) + (l + 1) * (l + 4))
}

/// The fitted linear map between the two fiber encodings: tensor values at
/// the chosen indices on one side, gauge-normalized spectral coefficients on
/// the other.
#[derive(Debug, Clone)]
pub struct EncodingMap {
    pub basis_indices: Vec<usize>,
    /// Applies to a column of tensor values, yielding spectral coefficients.
    pub matrix: Mat<C64>,
    /// Expresses the normalized leading coefficient in tensor values; this
    /// is the gauge fixing shared by every fit of the same configuration.
    pub calibration: Vec<C64>,
    pub holdout_residual: f64,
}

impl EncodingMap {
    pub fn apply(&self, s_values_at: &[C64]) -> Result<Vec<C64>> {
        self.matrix.mat_vec(s_values_at)
    }
}

fn chosen_values(values: &[C64], indices: &[usize]) -> Vec<C64> {
    indices.iter().map(|&i| values[i]).collect()
}

/// Normalizes a raw spectral polynomial into the calibrated gauge: rescale
/// so the leading coefficient equals the calibrated combination of tensor
/// values. Fails on samples where the raw leading coefficient degenerates.
fn normalized_psi_coeffs(
    cfg: &PencilConfig<C64>,
    sample: &CotangentSample,
    indices: &[usize],
    calibration: &[C64],
) -> Result<Vec<C64>> {
    let n = cfg.n();
    let frame = tangent_frame(cfg, &sample.point)?;
    let psi = psi_poly(cfg, &frame, &sample.covector)?;
    if psi.degree() != Some(n - 1) {
        return Err(Error::DegenerateDrop { expected: n - 1 });
    }
    let lead = psi.coeff(n - 1);
    if lead.norm() <= 1e-12 * psi.coeff_scale() {
        return Err(Error::DegenerateDrop { expected: n - 1 });
    }
    let s_all = phi_s(cfg, sample)?;
    let s_at = chosen_values(&s_all, indices);
    let target = bilinear_dot(calibration, &s_at);
    let factor = target / lead;
    Ok((0..n).map(|k| psi.coeff(k) * factor).collect())
}

/// Fits the encoding map on training samples and reports the worst relative
/// disagreement on held-out samples.
pub fn fit_encoding_map(
    cfg: &PencilConfig<C64>,
    basis_indices: &[usize],
    training: &[CotangentSample],
    holdout: &[CotangentSample],
) -> Result<EncodingMap> {
    let n = cfg.n();
    if basis_indices.len() != n {
        return Err(Error::SizeMismatch {
            expected: n,
            got: basis_indices.len(),
        });
    }
    for &i in basis_indices {
        if i >= cfg.ambient_dim() {
            return Err(Error::DomainError(format!("tensor index {i} out of range")));
        }
    }
    if training.len() < 4 * n {
        return Err(Error::DomainError(format!(
            "need at least {} training samples, got {}",
            4 * n,
            training.len()
        )));
    }
    if holdout.len() < n {
        return Err(Error::DomainError(format!(
            "need at least {n} holdout samples, got {}",
            holdout.len()
        )));
    }

    let calibration = calibrate_gauge(cfg, basis_indices)?;

    let mut s_rows = Vec::new();
    let mut psi_rows = Vec::new();
    for sample in training {
        match normalized_psi_coeffs(cfg, sample, basis_indices, &calibration) {
            Ok(coeffs) => {
                let s_all = phi_s(cfg, sample)?;
                s_rows.push(chosen_values(&s_all, basis_indices));
                psi_rows.push(coeffs);
            }
            Err(Error::DegenerateDrop { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
    if s_rows.len() < 2 * n {
        return Err(Error::GaugeError { residual: f64::NAN });
    }
    let s_mat = Mat::from_rows(&s_rows)?;
    let psi_mat = Mat::from_rows(&psi_rows)?;
    let solution = least_squares(&s_mat, &psi_mat, 1e-12)?;
    let matrix = solution.transpose();

    let mut worst: f64 = 0.0;
    let mut checked = 0usize;
    for sample in holdout {
        let coeffs = match normalized_psi_coeffs(cfg, sample, basis_indices, &calibration) {
            Ok(c) => c,
            Err(Error::DegenerateDrop { .. }) => continue,
            Err(e) => return Err(e),
        };
        let s_all = phi_s(cfg, sample)?;
        let predicted = matrix.mat_vec(&chosen_values(&s_all, basis_indices))?;
        let err: f64 = predicted
            .iter()
            .zip(&coeffs)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        let scale = coeffs.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1e-300);
        worst = worst.max(err / scale);
        checked += 1;
    }
    if !holdout.is_empty() && checked == 0 {
        return Err(Error::GaugeError { residual: f64::NAN });
    }
    Ok(EncodingMap {
        basis_indices: basis_indices.to_vec(),
        matrix,
        calibration,
        holdout_residual: worst,
    })
}

/// Solves for the leading spectral coefficient as a fixed combination of
/// tensor values, using a dedicated deterministic stream at a single point.
fn calibrate_gauge(cfg: &PencilConfig<C64>, basis_indices: &[usize]) -> Result<Vec<C64>> {
    let n = cfg.n();
    let mut rng = child_rng(GAUGE_CALIBRATION_SEED, cfg.n() as u64);
    let point = sample_point(cfg, &mut rng)?;
    let frame = tangent_frame(cfg, &point)?;
    let wanted = 3 * n + 6;
    let mut rows = Vec::with_capacity(wanted);
    let mut leads = Vec::with_capacity(wanted);
    let mut guard = 0usize;
    while rows.len() < wanted && guard < 8 * wanted {
        guard += 1;
        let sample = sample_cotangent(cfg, &point, &mut rng)?;
        let psi = psi_poly(cfg, &frame, &sample.covector)?;
        if psi.degree() != Some(n - 1) {
            continue;
        }
        let s_all = phi_s(cfg, &sample)?;
        rows.push(chosen_values(&s_all, basis_indices));
        leads.push(vec![psi.coeff(n - 1)]);
    }
    if rows.len() < wanted {
        return Err(Error::GaugeError { residual: f64::NAN });
    }
    let a = Mat::from_rows(&rows)?;
    let b = Mat::from_rows(&leads)?;
    let solved = least_squares(&a, &b, 1e-12)?;
    let calibration: Vec<C64> = solved.column(0);
    let predicted = a.mat_vec(&calibration)?;
    let mut residual: f64 = 0.0;
    for (p, l) in predicted.iter().zip(&leads) {
        let scale = l[0].norm().max(1e-300);
        residual = residual.max((p - l[0]).norm() / scale);
    }
    if residual > tol::ENCODING_FIT {
        return Err(Error::GaugeError { residual });
    }
    Ok(calibration)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matching::match_multisets;
    use crate::scalar::{rat, Rat};
    use crate::seed::child_rng;
    use crate::variety::{membership_residual, q1_value, q2_value};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn demo_config() -> PencilConfig<C64> {
        PencilConfig::from_reals(2, &[0.0, 1.0, 2.0, 3.0, 4.0]).unwrap()
    }

    fn rational_demo() -> PencilConfig<Rat> {
        let mu = vec![rat(0, 1), rat(1, 1), rat(2, 1), rat(3, 1), rat(4, 1)];
        PencilConfig::new(2, mu).unwrap()
    }

    fn demo_sample(stream: u64) -> (PencilConfig<C64>, CotangentSample) {
        let cfg = demo_config();
        let mut rng = child_rng(23, stream);
        let point = sample_point(&cfg, &mut rng).unwrap();
        let sample = sample_cotangent(&cfg, &point, &mut rng).unwrap();
        (cfg, sample)
    }

    /// Independent oracle: the summation formula for the tensor values.
    fn direct_s_value(cfg: &PencilConfig<Rat>, index: usize, x: &[Rat], xi: &[Rat]) -> Rat {
        let mu = cfg.mu();
        let mut acc = rat(0, 1);
        for j in 0..cfg.ambient_dim() {
            if j == index {
                continue;
            }
            let bracket = x[index].clone() * xi[j].clone() - x[j].clone() * xi[index].clone();
            acc = acc + bracket.clone() * bracket / (mu[j].clone() - mu[index].clone());
        }
        acc
    }

    fn rational_vector(rng: &mut rand_chacha::ChaCha8Rng, len: usize) -> Vec<Rat> {
        use rand::Rng;
        (0..len)
            .map(|_| rat(rng.random_range(-9..=9), rng.random_range(1..=7)))
            .collect()
    }

    #[test]
    fn matrix_route_matches_direct_summation_exactly() {
        let cfg = rational_demo();
        let mut rng = child_rng(29, 0);
        for _ in 0..25 {
            let x = rational_vector(&mut rng, 5);
            let xi = rational_vector(&mut rng, 5);
            for index in 0..5 {
                let via_matrix = s_value(&cfg, index, &x, &xi).unwrap();
                let via_sum = direct_s_value(&cfg, index, &x, &xi);
                assert_eq!(via_matrix, via_sum, "tensor {index}");
            }
        }
    }

    #[test]
    fn tensor_vanishes_on_coordinate_covector_at_coordinate_point() {
        // with x supported off index i and xi supported on index i the
        // brackets collapse to x_j^2 xi_i^2 terms
        let cfg = rational_demo();
        let x = vec![rat(0, 1), rat(1, 1), rat(1, 1), rat(0, 1), rat(0, 1)];
        let xi = vec![rat(1, 1), rat(0, 1), rat(0, 1), rat(0, 1), rat(0, 1)];
        // s_0 = x_1^2/(mu_1-mu_0) * xi_0^2 + x_2^2/(mu_2-mu_0) * xi_0^2 = 1 + 1/2
        let v = s_value(&cfg, 0, &x, &xi).unwrap();
        assert_eq!(v, rat(3, 2));
    }

    #[test]
    fn tensors_kill_both_gradient_covectors_identically() {
        // against grad q1 the brackets vanish identically; against grad q2
        // the value is 4 x_i^2 (q2 - mu_i q1), zero exactly on the cone
        let cfg = rational_demo();
        let mut rng = child_rng(29, 1);
        for _ in 0..25 {
            let x = rational_vector(&mut rng, 5);
            let g1 = grad_q1(&x);
            let g2 = grad_q2(&cfg, &x).unwrap();
            for index in 0..5 {
                assert_eq!(s_value(&cfg, index, &x, &g1).unwrap(), rat(0, 1));
                let against_g2 = s_value(&cfg, index, &x, &g2).unwrap();
                let q1 = q1_value(&x);
                let q2 = q2_value(&cfg, &x).unwrap();
                let expected = rat(4, 1)
                    * x[index].clone()
                    * x[index].clone()
                    * (q2 - cfg.mu()[index].clone() * q1);
                assert_eq!(against_g2, expected, "tensor {index}");
            }
        }
    }

    #[test]
    fn covector_scaling_acts_quadratically() {
        let (cfg, sample) = demo_sample(0);
        let base = phi_s(&cfg, &sample).unwrap();
        let factor = c(1.3, -0.4);
        let scaled_sample = CotangentSample {
            point: sample.point.clone(),
            covector: Covector(sample.covector.0.iter().map(|z| z * factor).collect()),
        };
        let scaled = phi_s(&cfg, &scaled_sample).unwrap();
        let expected_factor = factor * factor;
        for (a, b) in base.iter().zip(&scaled) {
            let err = (a * expected_factor - b).norm();
            assert!(err <= tol::HOMOGENEITY * (1.0 + b.norm()), "err {err}");
        }
    }

    #[test]
    fn joint_rescaling_fixes_values() {
        // x -> c x, xi -> xi / c leaves every tensor value unchanged
        let (cfg, sample) = demo_sample(1);
        let base = phi_s(&cfg, &sample).unwrap();
        let factor = c(0.7, 1.9);
        let rescaled = CotangentSample {
            point: Point(sample.point.0.iter().map(|z| z * factor).collect()),
            covector: Covector(sample.covector.0.iter().map(|z| z / factor).collect()),
        };
        let moved = phi_s(&cfg, &rescaled).unwrap();
        for (a, b) in base.iter().zip(&moved) {
            assert!((a - b).norm() <= tol::RESCALE * (1.0 + a.norm()));
        }
    }

    #[test]
    fn conormal_shifts_leave_values_fixed() {
        let (cfg, sample) = demo_sample(2);
        let base = phi_s(&cfg, &sample).unwrap();
        let g1 = grad_q1(&sample.point.0);
        let g2 = grad_q2(&cfg, &sample.point.0).unwrap();
        let shifted: Vec<C64> = sample
            .covector
            .0
            .iter()
            .zip(g1.iter().zip(&g2))
            .map(|(xi, (a, b))| xi + c(0.31, -0.7) * a + c(-0.2, 0.11) * b)
            .collect();
        let moved = phi_s(
            &cfg,
            &CotangentSample {
                point: sample.point.clone(),
                covector: Covector(shifted),
            },
        )
        .unwrap();
        for (a, b) in base.iter().zip(&moved) {
            assert!((a - b).norm() <= tol::GAUGE_REL * (1.0 + a.norm()));
        }
    }

    #[test]
    fn two_by_two_adjugate_spectral_polynomial() {
        // for n = 2 the adjugate of [[a,b],[b,d]] is [[d,-b],[-b,a]], so the
        // spectral polynomial is xi^T adj xi computed by hand
        let (cfg, sample) = demo_sample(3);
        let frame = tangent_frame(&cfg, &sample.point).unwrap();
        let psi = psi_poly(&cfg, &frame, &sample.covector).unwrap();
        let a = hessian_matrix(&cfg, &frame, PencilMember::First).unwrap();
        let b = hessian_matrix(&cfg, &frame, PencilMember::Second).unwrap();
        let xihat = frame_covector(&frame, &sample.covector).unwrap();
        for k in 0..4 {
            let t = c(0.37 * k as f64 - 0.4, 0.21 * k as f64);
            let m = a.pencil_at(&b, &t).unwrap();
            let hand = m.at(1, 1) * xihat[0] * xihat[0]
                - 2.0 * m.at(0, 1) * xihat[0] * xihat[1]
                + m.at(0, 0) * xihat[1] * xihat[1];
            let interp = psi.eval(&t);
            assert!(
                (hand - interp).norm() <= 1e-9 * (1.0 + hand.norm()),
                "mismatch at node {k}"
            );
        }
    }

    #[test]
    fn spectral_roots_match_singular_members() {
        let (cfg, sample) = demo_sample(4);
        let frame = tangent_frame(&cfg, &sample.point).unwrap();
        let psi = psi_poly(&cfg, &frame, &sample.covector).unwrap();
        let roots = fiber_roots(&cfg, &psi).unwrap();
        let members = singular_members(&cfg, &frame, &sample.covector).unwrap();
        assert!(
            match_multisets(&roots, &members, tol::MATCH_TOL).is_some(),
            "roots {roots:?} vs members {members:?}"
        );
    }

    #[test]
    fn frame_mixing_preserves_spectral_roots() {
        // recombine the frame by an invertible matrix; roots must not move
        let (cfg, sample) = demo_sample(5);
        let frame = tangent_frame(&cfg, &sample.point).unwrap();
        let mix = Mat::from_rows(&[
            vec![c(1.1, 0.3), c(-0.4, 0.2)],
            vec![c(0.5, -0.1), c(0.9, 0.7)],
        ])
        .unwrap();
        let mixed_vectors: Vec<Vec<C64>> = (0..2)
            .map(|a| {
                (0..cfg.ambient_dim())
                    .map(|i| {
                        (0..2).fold(C64::ZERO, |acc, b| {
                            acc + frame.0[b][i] * mix.at(b, a)
                        })
                    })
                    .collect()
            })
            .collect();
        let mixed = TangentFrame(mixed_vectors);
        let roots_a =
            fiber_roots(&cfg, &psi_poly(&cfg, &frame, &sample.covector).unwrap()).unwrap();
        let roots_b =
            fiber_roots(&cfg, &psi_poly(&cfg, &mixed, &sample.covector).unwrap()).unwrap();
        assert!(match_multisets(&roots_a, &roots_b, tol::MATCH_TOL).is_some());
    }

    #[test]
    fn plane_lift_lies_on_both_auxiliary_quadrics() {
        let (cfg, sample) = demo_sample(6);
        let lift = plane_lift(&cfg, &sample).unwrap();
        let (g1, g2) = plane_gram_residuals(&cfg, &lift).unwrap();
        assert!(g1 <= tol::GRAM_RESIDUAL, "first gram {g1}");
        assert!(g2 <= tol::GRAM_RESIDUAL, "second gram {g2}");
    }

    #[test]
    fn plane_lift_lambdas_are_the_fiber_roots() {
        let (cfg, sample) = demo_sample(7);
        let lift = plane_lift(&cfg, &sample).unwrap();
        let frame = tangent_frame(&cfg, &sample.point).unwrap();
        let members = singular_members(&cfg, &frame, &sample.covector).unwrap();
        assert!(match_multisets(&lift.lambdas, &members, tol::MATCH_TOL).is_some());
    }

    #[test]
    fn plane_round_trip_recovers_the_sample() {
        let (cfg, sample) = demo_sample(8);
        let lift = plane_lift(&cfg, &sample).unwrap();
        let (point, covector) = psi_of_plane(&cfg, &lift.basis).unwrap();
        assert!(membership_residual(&cfg, &point.0) < 1e-8);
        let d_point = crate::matching::projective_distance(&point.0, &sample.point.0);
        assert!(d_point <= tol::ROUND_TRIP, "point distance {d_point}");
        let original = canonical_covector(&cfg, &sample.point, &sample.covector).unwrap();
        let d_cov = crate::matching::projective_distance(&covector.0, &original.0);
        assert!(d_cov <= tol::ROUND_TRIP, "covector distance {d_cov}");
    }

    #[test]
    fn stratum_codimension_pinned_values() {
        assert_eq!(codim_stratum(0, -1).unwrap(), 0);
        assert_eq!(codim_stratum(1, -1).unwrap(), 2);
        assert_eq!(codim_stratum(0, 0).unwrap(), 2);
    }

    #[test]
    fn stratum_codimension_bound_and_consistency() {
        for k in 0..=6i64 {
            for l in -1..=k {
                let s = codim_stratum(k, l).unwrap();
                let g = grassmann_codim(k, l).unwrap();
                assert_eq!(g - s, 2 * (k + 1) * (l + 1), "gap at ({k},{l})");
                if k >= 1 || l >= 0 {
                    assert!(s >= 2, "stratum ({k},{l}) has codimension {s}");
                }
            }
        }
    }

    #[test]
    fn stratum_rejects_labels_outside_domain() {
        assert!(codim_stratum(-1, -1).is_err());
        assert!(codim_stratum(2, -2).is_err());
        assert!(codim_stratum(1, 2).is_err());
    }

    #[test]
    fn encoding_map_fits_and_generalizes() {
        let cfg = demo_config();
        let mut rng = child_rng(31, 0);
        let draw = |rng: &mut rand_chacha::ChaCha8Rng| {
            let point = sample_point(&cfg, rng).unwrap();
            sample_cotangent(&cfg, &point, rng).unwrap()
        };
        let training: Vec<_> = (0..12).map(|_| draw(&mut rng)).collect();
        let holdout: Vec<_> = (0..8).map(|_| draw(&mut rng)).collect();
        let map = fit_encoding_map(&cfg, &[0, 1], &training, &holdout).unwrap();
        assert!(
            map.holdout_residual <= tol::ENCODING_FIT,
            "holdout residual {}",
            map.holdout_residual
        );
        assert_eq!(numeric_rank(&map.matrix, tol::RANK_REL), cfg.n());
    }

    #[test]
    fn encoding_map_is_stable_across_training_sets() {
        let cfg = demo_config();
        let mut rng = child_rng(31, 1);
        let draw = |rng: &mut rand_chacha::ChaCha8Rng| {
            let point = sample_point(&cfg, rng).unwrap();
            sample_cotangent(&cfg, &point, rng).unwrap()
        };
        let set_a: Vec<_> = (0..14).map(|_| draw(&mut rng)).collect();
        let set_b: Vec<_> = (0..14).map(|_| draw(&mut rng)).collect();
        let holdout: Vec<_> = (0..6).map(|_| draw(&mut rng)).collect();
        let map_a = fit_encoding_map(&cfg, &[0, 1], &set_a, &holdout).unwrap();
        let map_b = fit_encoding_map(&cfg, &[0, 1], &set_b, &holdout).unwrap();
        let diff = map_a.matrix.sub(&map_b.matrix).unwrap().max_abs();
        let scale = map_a.matrix.max_abs().max(1e-300);
        assert!(diff / scale <= 1e-6, "relative drift {}", diff / scale);
    }

    #[test]
    fn spectral_value_serializes_per_schema() {
        let (cfg, sample) = demo_sample(9);
        let value = spectral_value(&cfg, &sample).unwrap();
        let text = serde_json::to_string(&value).unwrap();
        assert!(text.starts_with("{\"psi\":[["));
        assert!(text.contains("\"s\":[["));
        assert!(text.contains("\"roots\":[["));
        let back: SpectralValue = serde_json::from_str(&text).unwrap();
        assert_eq!(back.s.len(), value.s.len());
    }
}
