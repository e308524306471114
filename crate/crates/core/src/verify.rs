//! Evaluation-based verification: span dimension and polynomial freeness of
//! the tensor family, the exact restriction and pushforward identities of
//! the double-cover picture, and the dual-divisor facts for diagonal
//! quadrics.
//!
//! Statements that are polynomial identities run over exact rationals with
//! zero tolerance; everything involving ranks, roots, or genericity runs
//! over complex floats with pinned cutoffs.

use crate::error::{Error, Result};
use crate::fibration::{s_value, s_values};
use crate::matrix::Mat;
use crate::rank::{kernel_basis, numeric_rank};
use crate::scalar::{rat, Rat, Scalar, C64};
use crate::tol;
use crate::variety::{
    grad_q2, q1_value, sample_cotangent, sample_point, CotangentSample, PencilConfig,
};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

/// Outcome of a batch of exact identity checks.
#[derive(Debug, Clone, Serialize)]
pub struct IdentityReport {
    pub draws: usize,
    pub failures: usize,
}

impl IdentityReport {
    pub fn passed(&self) -> bool {
        self.draws > 0 && self.failures == 0
    }
}

/// Evaluation-rank summary of the tensor family, with the residuals of the
/// three expected linear relations (weights 1, mu, mu squared).
#[derive(Debug, Clone, Serialize)]
pub struct SpanReport {
    pub rank: usize,
    pub expected: usize,
    pub nullity: usize,
    pub relation_residuals: [f64; 3],
}

impl SpanReport {
    pub fn passed(&self) -> bool {
        self.rank == self.expected
            && self.nullity == 3
            && self.relation_residuals.iter().all(|&r| r <= tol::MEMBERSHIP)
    }
}

/// Result of sweeping subsets of the tensor family for basis property.
#[derive(Debug, Clone, Serialize)]
pub struct BasisSweep {
    pub subsets_checked: usize,
    pub failures: usize,
    pub exhaustive: bool,
}

impl BasisSweep {
    pub fn passed(&self) -> bool {
        self.subsets_checked > 0 && self.failures == 0
    }
}

fn draw_samples(
    cfg: &PencilConfig<C64>,
    count: usize,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<CotangentSample>> {
    (0..count)
        .map(|_| {
            let point = sample_point(cfg, rng)?;
            sample_cotangent(cfg, &point, rng)
        })
        .collect()
}

/// Matrix of all tensor values, one row per sample.
fn evaluation_matrix(
    cfg: &PencilConfig<C64>,
    samples: &[CotangentSample],
) -> Result<Mat<C64>> {
    let rows = samples
        .iter()
        .map(|s| s_values(cfg, &s.point.0, &s.covector.0))
        .collect::<Result<Vec<_>>>()?;
    Mat::from_rows(&rows)
}

/// Evaluation rank of the full tensor family: the dimension of the span.
pub fn dim_w(cfg: &PencilConfig<C64>, num_samples: usize, rng: &mut ChaCha8Rng) -> Result<usize> {
    Ok(tensor_span_report(cfg, num_samples, rng)?.rank)
}

/// Full span diagnosis: rank, nullity, and the residuals of the three
/// predicted relations among the tensors.
pub fn tensor_span_report(
    cfg: &PencilConfig<C64>,
    num_samples: usize,
    rng: &mut ChaCha8Rng,
) -> Result<SpanReport> {
    let n = cfg.n();
    let count = num_samples.max(5 * n);
    let samples = draw_samples(cfg, count, rng)?;
    let matrix = evaluation_matrix(cfg, &samples)?;
    let rank = numeric_rank(&matrix, tol::RANK_REL);
    let nullity = cfg.ambient_dim() - rank;
    let matrix_scale = matrix.max_abs().max(1e-300);
    let mut residuals = [0.0; 3];
    for (power, slot) in residuals.iter_mut().enumerate() {
        let weights: Vec<C64> = cfg
            .mu()
            .iter()
            .map(|m| m.powu(power as u32))
            .collect();
        let weight_scale = weights.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let image = matrix.mat_vec(&weights)?;
        let worst = image.iter().map(|z| z.norm()).fold(0.0, f64::max);
        *slot = worst / (matrix_scale * weight_scale);
    }
    Ok(SpanReport {
        rank,
        expected: n,
        nullity,
        relation_residuals: residuals,
    })
}

/// Binomial coefficient, exact in usize.
pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: usize = 1;
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// All exponent vectors of total degree `degree` in `vars` variables,
/// lexicographic order.
pub fn monomial_multi_indices(vars: usize, degree: usize) -> Vec<Vec<u32>> {
    fn extend(acc: &mut Vec<Vec<u32>>, prefix: &mut Vec<u32>, vars_left: usize, budget: usize) {
        if vars_left == 1 {
            prefix.push(budget as u32);
            acc.push(prefix.clone());
            prefix.pop();
            return;
        }
        for take in (0..=budget).rev() {
            prefix.push(take as u32);
            extend(acc, prefix, vars_left - 1, budget - take);
            prefix.pop();
        }
    }
    let mut acc = Vec::new();
    if vars == 0 {
        return acc;
    }
    extend(&mut acc, &mut Vec::new(), vars, degree);
    acc
}

/// Evaluation rank of all degree-`degree` monomials in the tensors at the
/// chosen indices. The sample count is raised to triple the monomial count
/// when the requested count is lower.
pub fn freeness_rank(
    cfg: &PencilConfig<C64>,
    degree: usize,
    basis_indices: &[usize],
    num_samples: usize,
    rng: &mut ChaCha8Rng,
) -> Result<usize> {
    let n = cfg.n();
    if basis_indices.len() != n {
        return Err(Error::SizeMismatch {
            expected: n,
            got: basis_indices.len(),
        });
    }
    if degree == 0 {
        return Err(Error::DomainError("degree must be positive".into()));
    }
    let exponents = monomial_multi_indices(n, degree);
    let count = num_samples.max(3 * exponents.len());
    let samples = draw_samples(cfg, count, rng)?;
    let mut rows = Vec::with_capacity(count);
    for sample in &samples {
        let values = s_values(cfg, &sample.point.0, &sample.covector.0)?;
        let chosen: Vec<C64> = basis_indices.iter().map(|&i| values[i]).collect();
        let row: Vec<C64> = exponents
            .iter()
            .map(|exps| {
                exps.iter()
                    .zip(&chosen)
                    .fold(C64::ONE, |acc, (&e, v)| acc * v.powu(e))
            })
            .collect();
        rows.push(row);
    }
    // Monomial columns differ in scale by powers of the parameter spread;
    // per-column normalization preserves rank and keeps the relative
    // singular-value cutoff meaningful.
    let mut column_scale = vec![0.0f64; exponents.len()];
    for row in &rows {
        for (j, v) in row.iter().enumerate() {
            column_scale[j] = column_scale[j].max(v.norm());
        }
    }
    for row in &mut rows {
        for (j, v) in row.iter_mut().enumerate() {
            if column_scale[j] > 0.0 {
                *v /= column_scale[j];
            }
        }
    }
    Ok(numeric_rank(&Mat::from_rows(&rows)?, tol::RANK_REL))
}

fn subsets_of_size(total: usize, size: usize) -> Vec<Vec<usize>> {
    fn extend(acc: &mut Vec<Vec<usize>>, prefix: &mut Vec<usize>, start: usize, total: usize, size: usize) {
        if prefix.len() == size {
            acc.push(prefix.clone());
            return;
        }
        for next in start..total {
            prefix.push(next);
            extend(acc, prefix, next + 1, total, size);
            prefix.pop();
        }
    }
    let mut acc = Vec::new();
    extend(&mut acc, &mut Vec::new(), 0, total, size);
    acc
}

/// Checks that subsets of `n` tensors each span the full space: all
/// subsets when `n` is at most 4, twenty random subsets otherwise.
pub fn any_n_basis_check(
    cfg: &PencilConfig<C64>,
    num_samples: usize,
    rng: &mut ChaCha8Rng,
) -> Result<BasisSweep> {
    let n = cfg.n();
    let total = cfg.ambient_dim();
    let count = num_samples.max(5 * n);
    let samples = draw_samples(cfg, count, rng)?;
    let matrix = evaluation_matrix(cfg, &samples)?;
    let exhaustive = n <= 4;
    let subsets: Vec<Vec<usize>> = if exhaustive {
        subsets_of_size(total, n)
    } else {
        let all = subsets_of_size(total, n);
        (0..20)
            .map(|_| all[rng.random_range(0..all.len())].clone())
            .collect()
    };
    let mut failures = 0;
    for subset in &subsets {
        let sub = Mat::from_fn(count, n, |r, c| matrix.at(r, subset[c]));
        if numeric_rank(&sub, tol::RANK_REL) != n {
            failures += 1;
        }
    }
    Ok(BasisSweep {
        subsets_checked: subsets.len(),
        failures,
        exhaustive,
    })
}

fn rational_vector(rng: &mut ChaCha8Rng, len: usize) -> Vec<Rat> {
    (0..len)
        .map(|_| rat(rng.random_range(-12..=12), rng.random_range(1..=8)))
        .collect()
}

fn bilinear_rat(a: &[Rat], b: &[Rat]) -> Rat {
    a.iter()
        .zip(b)
        .fold(rat(0, 1), |acc, (x, y)| acc + x.clone() * y.clone())
}

/// The polarization defect of each tensor against the second gradient: for
/// every index i, the exact identity
/// `s_i(x, xi + grad_q2) - s_i(x, xi) - s_i(x, grad_q2)
///    = 4 x_i^2 <x, xi> - 4 x_i xi_i q1(x)`
/// holds as a polynomial, hence at every rational point.
pub fn defect_identity_check(
    cfg: &PencilConfig<Rat>,
    draws: usize,
    rng: &mut ChaCha8Rng,
) -> Result<IdentityReport> {
    let dim = cfg.ambient_dim();
    let four = rat(4, 1);
    let mut failures = 0;
    for _ in 0..draws {
        let x = rational_vector(rng, dim);
        let xi = rational_vector(rng, dim);
        let g2 = grad_q2(cfg, &x)?;
        let shifted: Vec<Rat> = xi
            .iter()
            .zip(&g2)
            .map(|(a, b)| a.clone() + b.clone())
            .collect();
        let pairing = bilinear_rat(&x, &xi);
        let q1 = q1_value(&x);
        for i in 0..dim {
            let defect = s_value(cfg, i, &x, &shifted)?
                - s_value(cfg, i, &x, &xi)?
                - s_value(cfg, i, &x, &g2)?;
            let expected = four.clone() * x[i].clone() * x[i].clone() * pairing.clone()
                - four.clone() * x[i].clone() * xi[i].clone() * q1.clone();
            if defect != expected {
                failures += 1;
            }
        }
    }
    Ok(IdentityReport { draws, failures })
}

fn embed_with_zero_head(tail: &[Rat]) -> Vec<Rat> {
    let mut out = Vec::with_capacity(tail.len() + 1);
    out.push(rat(0, 1));
    out.extend_from_slice(tail);
    out
}

/// The hyperplane-restriction identities: with the first coordinate of both
/// the point and the covector set to zero, the first tensor vanishes
/// identically and every other tensor equals its counterpart for the
/// reduced parameter list. Exact, zero tolerance; includes the all-ones
/// special point besides random draws.
pub fn restriction_identity_check(
    cfg: &PencilConfig<Rat>,
    draws: usize,
    rng: &mut ChaCha8Rng,
) -> Result<IdentityReport> {
    let reduced = cfg.reduced()?;
    let tail_dim = reduced.ambient_dim();
    let mut failures = 0;
    let mut total = 0;
    let mut run_case = |tail_x: Vec<Rat>, tail_xi: Vec<Rat>| -> Result<()> {
        total += 1;
        let x = embed_with_zero_head(&tail_x);
        let xi = embed_with_zero_head(&tail_xi);
        if !s_value(cfg, 0, &x, &xi)?.is_zero_elem() {
            failures += 1;
        }
        for i in 1..cfg.ambient_dim() {
            let full = s_value(cfg, i, &x, &xi)?;
            let red = s_value(&reduced, i - 1, &tail_x, &tail_xi)?;
            if full != red {
                failures += 1;
            }
        }
        Ok(())
    };
    run_case(vec![rat(1, 1); tail_dim], vec![rat(1, 1); tail_dim])?;
    for _ in 1..draws {
        let tail_x = rational_vector(rng, tail_dim);
        let tail_xi = rational_vector(rng, tail_dim);
        run_case(tail_x, tail_xi)?;
    }
    Ok(IdentityReport {
        draws: total,
        failures,
    })
}

/// The pushforward identity for the first tensor: against covectors with
/// vanishing first coordinate,
/// `s_0(x, (0, eta)) = x_0^2 * sum_j eta_j^2 / (mu_j - mu_0)`, exactly.
pub fn s0_pushforward_check(
    cfg: &PencilConfig<Rat>,
    draws: usize,
    rng: &mut ChaCha8Rng,
) -> Result<IdentityReport> {
    let dim = cfg.ambient_dim();
    let mu = cfg.mu();
    let mut failures = 0;
    let mut total = 0;
    let mut run_case = |x: Vec<Rat>, eta: Vec<Rat>| -> Result<()> {
        total += 1;
        let xi = embed_with_zero_head(&eta);
        let lhs = s_value(cfg, 0, &x, &xi)?;
        let mut weighted = rat(0, 1);
        for (j, e) in eta.iter().enumerate() {
            weighted =
                weighted + e.clone() * e.clone() / (mu[j + 1].clone() - mu[0].clone());
        }
        let rhs = x[0].clone() * x[0].clone() * weighted;
        if lhs != rhs {
            failures += 1;
        }
        Ok(())
    };
    run_case(vec![rat(1, 1); dim], vec![rat(1, 1); dim - 1])?;
    for _ in 1..draws {
        let x = rational_vector(rng, dim);
        let eta = rational_vector(rng, dim - 1);
        run_case(x, eta)?;
    }
    Ok(IdentityReport {
        draws: total,
        failures,
    })
}

/// Rank of the restricted tensor family evaluated on samples of the reduced
/// variety: one relation is gained (the first tensor restricts to zero), so
/// the rank drops to `n - 1`.
pub fn restriction_rank_check(
    cfg: &PencilConfig<C64>,
    num_samples: usize,
    rng: &mut ChaCha8Rng,
) -> Result<bool> {
    let n = cfg.n();
    let reduced = cfg.reduced()?;
    let count = num_samples.max(5 * n);
    let mut rows = Vec::with_capacity(count);
    for _ in 0..count {
        let point = sample_point(&reduced, rng)?;
        let sample = sample_cotangent(&reduced, &point, rng)?;
        let mut x = vec![C64::ZERO];
        x.extend_from_slice(&sample.point.0);
        let mut xi = vec![C64::ZERO];
        xi.extend_from_slice(&sample.covector.0);
        rows.push(s_values(cfg, &x, &xi)?);
    }
    let rank = numeric_rank(&Mat::from_rows(&rows)?, tol::RANK_REL);
    Ok(rank == n - 1)
}

/// A diagonal quadric `sum_j a_j z_j^2 = 0` with nonzero coefficients.
#[derive(Debug, Clone)]
pub struct QuadricConfig {
    coeffs: Vec<C64>,
}

impl QuadricConfig {
    pub fn new(coeffs: Vec<C64>) -> Result<Self> {
        if coeffs.len() < 3 {
            return Err(Error::BadConfig(
                "need at least three quadric coefficients".into(),
            ));
        }
        let scale = coeffs.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if coeffs.iter().any(|z| z.norm() <= 1e-12 * scale.max(1.0)) {
            return Err(Error::BadConfig("quadric coefficients must be nonzero".into()));
        }
        Ok(QuadricConfig { coeffs })
    }

    /// The quadric attached to a pencil configuration: coefficients are the
    /// gaps to the first parameter, on the coordinates past the first.
    pub fn from_pencil_gaps(cfg: &PencilConfig<C64>) -> Result<Self> {
        let mu = cfg.mu();
        QuadricConfig::new(mu[1..].iter().map(|m| m - mu[0]).collect())
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn value(&self, z: &[C64]) -> Result<C64> {
        self.expect_len(z)?;
        Ok(z.iter()
            .zip(&self.coeffs)
            .fold(C64::ZERO, |acc, (v, a)| acc + a * v * v))
    }

    fn expect_len(&self, z: &[C64]) -> Result<()> {
        if z.len() != self.coeffs.len() {
            return Err(Error::SizeMismatch {
                expected: self.coeffs.len(),
                got: z.len(),
            });
        }
        Ok(())
    }

    fn membership_scale(&self, z: &[C64]) -> f64 {
        z.iter()
            .zip(&self.coeffs)
            .map(|(v, a)| a.norm() * v.norm_sqr())
            .sum::<f64>()
            .max(1e-300)
    }
}

/// Random point of the quadric: random tail, last coordinate solved.
pub fn quadric_point(q: &QuadricConfig, rng: &mut ChaCha8Rng) -> Result<Vec<C64>> {
    let m = q.dim();
    for _ in 0..64 {
        let mut z: Vec<C64> = (0..m - 1)
            .map(|_| crate::variety::draw_complex(rng, 1.0))
            .collect();
        let partial = q.value(&{
            let mut padded = z.clone();
            padded.push(C64::ZERO);
            padded
        })?;
        let square = -partial / q.coeffs[m - 1];
        if square.norm() <= tol::UNLUCKY_FLOOR {
            continue;
        }
        z.push(square.sqrt());
        return Ok(z);
    }
    Err(Error::Unlucky { attempts: 64 })
}

/// The dual-form value `sum_j zeta_j^2 / a_j` of a covector at a point of
/// the quadric; the point must lie on the quadric and the covector must be
/// Euler-orthogonal there, else the class is meaningless.
pub fn hq_prime_value(q: &QuadricConfig, z: &[C64], zeta: &[C64]) -> Result<C64> {
    q.expect_len(z)?;
    q.expect_len(zeta)?;
    let residual = q.value(z)?.norm() / q.membership_scale(z);
    if residual > tol::MEMBERSHIP {
        return Err(Error::OffQuadric { residual });
    }
    let z_norm = z.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    let zeta_norm = zeta.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    let euler = crate::matrix::bilinear_dot(z, zeta).norm();
    if euler > tol::MEMBERSHIP * (z_norm * zeta_norm).max(1e-300) {
        return Err(Error::DomainError(
            "covector is not Euler-orthogonal at the point".into(),
        ));
    }
    Ok(zeta
        .iter()
        .zip(&q.coeffs)
        .fold(C64::ZERO, |acc, (v, a)| acc + v * v / a))
}

fn dual_scale(q: &QuadricConfig, zeta: &[C64]) -> f64 {
    zeta.iter()
        .zip(&q.coeffs)
        .map(|(v, a)| v.norm_sqr() / a.norm())
        .sum::<f64>()
        .max(1e-300)
}

/// Whether the covector's hyperplane is declared tangent by the dual form:
/// the relative dual-form value is below the cutoff.
pub fn dual_divisor_test(q: &QuadricConfig, z: &[C64], zeta: &[C64], cutoff: f64) -> Result<bool> {
    let value = hq_prime_value(q, z, zeta)?;
    Ok(value.norm() <= cutoff * dual_scale(q, zeta))
}

/// Geometric tangency oracle, independent of the dual form: restrict the
/// quadric's bilinear form to the covector's kernel inside the tangent
/// space, quotient the point direction away, and test degeneracy.
///
/// The point direction always lies in the radical of the naive restriction
/// (it is isotropic, Euler-orthogonal to the covector, and spans the
/// tangent space's orthogonal line), so the determinant on the raw
/// intersection vanishes identically; the meaningful degeneracy lives on
/// the quotient by the point, realized here as its Hermitian complement.
/// Singular values of the quotient form are measured against the
/// coefficient scale rather than the Gram's own largest value, because a
/// tangent covector makes the whole Gram uniformly tiny.
pub fn tangency_oracle(q: &QuadricConfig, z: &[C64], zeta: &[C64]) -> Result<bool> {
    let m = q.dim();
    if m < 4 {
        return Err(Error::SizeMismatch {
            expected: 4,
            got: m,
        });
    }
    q.expect_len(z)?;
    q.expect_len(zeta)?;
    let zeta_scale = zeta.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    let z_scale = z.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    if zeta_scale <= 1e-300 || z_scale <= 1e-300 {
        return Err(Error::ZeroCovector);
    }
    let unit = |v: &[C64], s: f64| -> Vec<C64> { v.iter().map(|w| w / s).collect() };
    let gradient_dir: Vec<C64> = z.iter().zip(&q.coeffs).map(|(v, a)| a * v / z_scale).collect();
    let conj_point: Vec<C64> = z.iter().map(|v| v.conj() / z_scale).collect();
    let rows = Mat::from_rows(&[unit(zeta, zeta_scale), gradient_dir, conj_point])?;
    if numeric_rank(&rows, tol::RANK_REL) != 3 {
        return Err(Error::RankDeficient);
    }
    let basis = kernel_basis(&rows, 3)?;
    let size = basis.len();
    let gram = Mat::from_fn(size, size, |r, c| {
        basis[r]
            .iter()
            .zip(&basis[c])
            .zip(&q.coeffs)
            .fold(C64::ZERO, |acc, ((u, v), a)| acc + a * u * v)
    });
    let coeff_scale = q.coeffs.iter().map(|a| a.norm()).fold(0.0, f64::max);
    let rank = crate::rank::singular_values(&gram)
        .into_iter()
        .filter(|s| *s > tol::RANK_REL * coeff_scale)
        .count();
    Ok(rank < size)
}

/// Draws a covector in the dual divisor: Euler-orthogonal at the point and
/// with vanishing dual-form value, by solving a quadratic for one
/// coordinate.
pub fn tangent_covector(
    q: &QuadricConfig,
    z: &[C64],
    rng: &mut ChaCha8Rng,
) -> Result<Vec<C64>> {
    q.expect_len(z)?;
    let m = q.dim();
    if m < 3 {
        return Err(Error::SizeMismatch { expected: 3, got: m });
    }
    for _ in 0..64 {
        let tail: Vec<C64> = (2..m)
            .map(|_| crate::variety::draw_complex(rng, 1.0))
            .collect();
        if z[0].norm() <= 1e-8 {
            return Err(Error::Unlucky { attempts: 0 });
        }
        let c_pair: C64 = tail
            .iter()
            .enumerate()
            .fold(C64::ZERO, |acc, (j, v)| acc + z[j + 2] * v);
        let d_dual: C64 = tail
            .iter()
            .enumerate()
            .fold(C64::ZERO, |acc, (j, v)| acc + v * v / q.coeffs[j + 2]);
        // impose Euler pairing via zeta_0 = -(z_1 zeta_1 + c)/z_0 and solve
        // the dual-form quadratic for zeta_1
        let a0 = q.coeffs[0];
        let lead = z[1] * z[1] / (a0 * z[0] * z[0]) + C64::ONE / q.coeffs[1];
        if lead.norm() <= 1e-10 {
            continue;
        }
        let mid = 2.0 * z[1] * c_pair / (a0 * z[0] * z[0]);
        let tail_term = c_pair * c_pair / (a0 * z[0] * z[0]) + d_dual;
        let disc = (mid * mid - 4.0 * lead * tail_term).sqrt();
        let zeta_1 = (-mid + disc) / (2.0 * lead);
        let zeta_0 = -(z[1] * zeta_1 + c_pair) / z[0];
        let mut zeta = Vec::with_capacity(m);
        zeta.push(zeta_0);
        zeta.push(zeta_1);
        zeta.extend(tail);
        let norm = zeta.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        if norm <= 1e-8 {
            continue;
        }
        return Ok(zeta);
    }
    Err(Error::Unlucky { attempts: 64 })
}

/// Draws a covector Euler-orthogonal at the point with no tangency
/// constraint; its dual-form value is generically far from zero.
pub fn generic_covector(
    q: &QuadricConfig,
    z: &[C64],
    rng: &mut ChaCha8Rng,
) -> Result<Vec<C64>> {
    q.expect_len(z)?;
    let m = q.dim();
    let mut zeta: Vec<C64> = (0..m)
        .map(|_| crate::variety::draw_complex(rng, 1.0))
        .collect();
    let (pivot, pivot_value) = z
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
        .ok_or(Error::ZeroCovector)?;
    if pivot_value.norm() <= 1e-12 {
        return Err(Error::ZeroCovector);
    }
    let rest: C64 = zeta
        .iter()
        .enumerate()
        .filter(|(j, _)| *j != pivot)
        .fold(C64::ZERO, |acc, (j, v)| acc + z[j] * v);
    zeta[pivot] = -rest / pivot_value;
    Ok(zeta)
}

/// Head-to-head agreement counts between the dual-form test and the
/// geometric tangency oracle.
#[derive(Debug, Clone, Serialize)]
pub struct DualAgreement {
    pub samples: usize,
    pub tangent_cases: usize,
    pub generic_cases: usize,
    pub disagreements: usize,
}

impl DualAgreement {
    pub fn passed(&self) -> bool {
        self.samples > 0
            && self.disagreements == 0
            && self.tangent_cases > 0
            && self.generic_cases > 0
    }
}

/// Runs both tangency deciders on constructed-tangent and generic covectors
/// alternately and counts disagreements.
pub fn dual_agreement_check(
    q: &QuadricConfig,
    samples: usize,
    cutoff: f64,
    rng: &mut ChaCha8Rng,
) -> Result<DualAgreement> {
    let mut tangent_cases = 0;
    let mut generic_cases = 0;
    let mut disagreements = 0;
    let mut done = 0;
    let mut guard = 0;
    while done < samples && guard < 8 * samples + 64 {
        guard += 1;
        let z = quadric_point(q, rng)?;
        let want_tangent = done % 2 == 0;
        let zeta = if want_tangent {
            match tangent_covector(q, &z, rng) {
                Ok(v) => v,
                Err(_) => continue,
            }
        } else {
            generic_covector(q, &z, rng)?
        };
        let by_dual = dual_divisor_test(q, &z, &zeta, cutoff)?;
        let by_oracle = match tangency_oracle(q, &z, &zeta) {
            Ok(v) => v,
            Err(Error::RankDeficient) => continue,
            Err(e) => return Err(e),
        };
        if by_dual != by_oracle {
            disagreements += 1;
        }
        if by_dual {
            tangent_cases += 1;
        } else {
            generic_cases += 1;
        }
        done += 1;
    }
    Ok(DualAgreement {
        samples: done,
        tangent_cases,
        generic_cases,
        disagreements,
    })
}

/// Searches the branch locus for a point whose conormal covector has
/// nonvanishing dual-form value — the witness that the locus is not inside
/// the dual divisor. The conormal of the extra equation at a branch point
/// is the point itself.
pub fn branch_locus_witness(
    cfg: &PencilConfig<C64>,
    rng: &mut ChaCha8Rng,
) -> Result<(Vec<C64>, C64)> {
    let reduced = cfg.reduced()?;
    let q = QuadricConfig::from_pencil_gaps(cfg)?;
    let max_draws = 1000;
    for _ in 0..max_draws {
        let point = match sample_point(&reduced, rng) {
            Ok(p) => p,
            Err(_) => continue,
        };
        let z = point.0;
        let value = match hq_prime_value(&q, &z, &z) {
            Ok(v) => v,
            Err(_) => continue,
        };
        if value.norm() > 1e-6 * dual_scale(&q, &z) {
            return Ok((z, value));
        }
    }
    Err(Error::NoWitness { draws: max_draws })
}
