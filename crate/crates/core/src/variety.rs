//! The substrate: a smooth complete intersection of two diagonal quadrics,
//! with samplers for points, cotangent data and adapted tangent frames.
//!
//! Coordinates live on the affine cone in `C^{n+3}`. The first quadric is
//! the coordinate sum of squares, the second weights the squares by the
//! pencil parameters; both vanish on the cone over the variety. Covectors
//! are carried by ambient representatives orthogonal to the Euler field,
//! defined up to the span of the two gradients.

use crate::error::{Error, Result};
use crate::matching::{hermitian_dot, vec_norm};
use crate::matrix::{bilinear_dot, Mat, SymMatrix};
use crate::scalar::{rat_to_c64, Rat, Scalar, C64};
use crate::tol;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

const SAMPLE_ATTEMPTS: usize = 64;

/// The pencil data: `n` is the variety dimension, and the weights of the
/// second quadric are the `n + 3` pairwise distinct pencil parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct PencilConfig<S: Scalar> {
    n: usize,
    mu: Vec<S>,
}

impl<S: Scalar> PencilConfig<S> {
    pub fn new(n: usize, mu: Vec<S>) -> Result<Self> {
        if n < 1 {
            return Err(Error::BadConfig("variety dimension must be at least 1".into()));
        }
        if mu.len() != n + 3 {
            return Err(Error::BadConfig(format!(
                "expected {} pencil parameters, got {}",
                n + 3,
                mu.len()
            )));
        }
        let scale = 1.0 + mu.iter().map(Scalar::magnitude).fold(0.0, f64::max);
        for i in 0..mu.len() {
            for j in (i + 1)..mu.len() {
                let diff = mu[i].clone() - mu[j].clone();
                let collide = if S::EXACT {
                    diff.is_zero_elem()
                } else {
                    diff.magnitude() <= tol::PARAM_SEPARATION * scale
                };
                if collide {
                    return Err(Error::BadConfig(format!(
                        "pencil parameters {i} and {j} are not separated"
                    )));
                }
            }
        }
        Ok(PencilConfig { n, mu })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of ambient coordinates, `n + 3`.
    pub fn ambient_dim(&self) -> usize {
        self.n + 3
    }

    pub fn mu(&self) -> &[S] {
        &self.mu
    }

    /// The configuration one dimension down obtained by dropping the first
    /// pencil parameter; this is the substrate the restriction identities
    /// land on.
    pub fn reduced(&self) -> Result<PencilConfig<S>> {
        if self.n < 2 {
            return Err(Error::BadConfig(
                "cannot reduce below variety dimension 1".into(),
            ));
        }
        PencilConfig::new(self.n - 1, self.mu[1..].to_vec())
    }
}

impl PencilConfig<Rat> {
    pub fn to_float(&self) -> PencilConfig<C64> {
        PencilConfig {
            n: self.n,
            mu: self.mu.iter().map(rat_to_c64).collect(),
        }
    }

    /// Random small-height rational parameters, kept pairwise distinct.
    pub fn random_rational(n: usize, rng: &mut ChaCha8Rng) -> Self {
        loop {
            let mu: Vec<Rat> = (0..n + 3)
                .map(|_| {
                    let numer = rng.random_range(-24..=24i64);
                    let denom = rng.random_range(1..=6i64);
                    Rat::new(numer.into(), denom.into())
                })
                .collect();
            if let Ok(cfg) = PencilConfig::new(n, mu) {
                return cfg;
            }
        }
    }
}

impl PencilConfig<C64> {
    /// Random complex parameters in a moderate box, kept separated.
    pub fn random(n: usize, rng: &mut ChaCha8Rng) -> Self {
        loop {
            let mu: Vec<C64> = (0..n + 3).map(|_| draw_complex(rng, 2.0)).collect();
            if let Ok(cfg) = PencilConfig::new(n, mu) {
                return cfg;
            }
        }
    }

    pub fn from_reals(n: usize, values: &[f64]) -> Result<Self> {
        PencilConfig::new(n, values.iter().map(|&v| C64::new(v, 0.0)).collect())
    }
}

#[derive(Serialize, Deserialize)]
struct ConfigWire {
    n: usize,
    mu: Vec<[f64; 2]>,
}

impl Serialize for PencilConfig<C64> {
    fn serialize<T: serde::Serializer>(&self, s: T) -> std::result::Result<T::Ok, T::Error> {
        ConfigWire {
            n: self.n,
            mu: self.mu.iter().map(crate::jsonio::to_pair).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for PencilConfig<C64> {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let wire = ConfigWire::deserialize(d)?;
        PencilConfig::new(wire.n, wire.mu.into_iter().map(crate::jsonio::from_pair).collect())
            .map_err(serde::de::Error::custom)
    }
}

/// A point on the affine cone over the variety.
#[derive(Debug, Clone, PartialEq)]
pub struct Point(pub Vec<C64>);

/// An ambient covector representative, orthogonal to the Euler field.
#[derive(Debug, Clone, PartialEq)]
pub struct Covector(pub Vec<C64>);

/// A point together with a covector at it.
#[derive(Debug, Clone)]
pub struct CotangentSample {
    pub point: Point,
    pub covector: Covector,
}

/// An adapted frame: vectors annihilated by both gradients, spanning a
/// complement of the Euler direction, orthonormalized deterministically.
#[derive(Debug, Clone)]
pub struct TangentFrame(pub Vec<Vec<C64>>);

impl TangentFrame {
    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// Matrix whose columns are the frame vectors.
    pub fn as_matrix(&self) -> Mat<C64> {
        Mat::from_columns(&self.0).expect("frame vectors share a length")
    }
}

pub fn q1_value<S: Scalar>(x: &[S]) -> S {
    x.iter()
        .fold(S::zero(), |acc, v| acc + v.clone() * v.clone())
}

pub fn q2_value<S: Scalar>(cfg: &PencilConfig<S>, x: &[S]) -> Result<S> {
    expect_len(cfg, x)?;
    Ok(x.iter()
        .zip(cfg.mu())
        .fold(S::zero(), |acc, (v, m)| acc + m.clone() * v.clone() * v.clone()))
}

pub fn grad_q1<S: Scalar>(x: &[S]) -> Vec<S> {
    let two = S::from_int(2);
    x.iter().map(|v| two.clone() * v.clone()).collect()
}

pub fn grad_q2<S: Scalar>(cfg: &PencilConfig<S>, x: &[S]) -> Result<Vec<S>> {
    expect_len(cfg, x)?;
    let two = S::from_int(2);
    Ok(x.iter()
        .zip(cfg.mu())
        .map(|(v, m)| two.clone() * m.clone() * v.clone())
        .collect())
}

fn expect_len<S: Scalar, T>(cfg: &PencilConfig<S>, x: &[T]) -> Result<()> {
    if x.len() != cfg.ambient_dim() {
        return Err(Error::SizeMismatch {
            expected: cfg.ambient_dim(),
            got: x.len(),
        });
    }
    Ok(())
}

/// Worst relative residual of the two defining equations at `x`.
pub fn membership_residual(cfg: &PencilConfig<C64>, x: &[C64]) -> f64 {
    let scale1: f64 = x.iter().map(|v| v.norm_sqr()).sum::<f64>().max(1e-300);
    let scale2: f64 = x
        .iter()
        .zip(cfg.mu())
        .map(|(v, m)| m.norm() * v.norm_sqr())
        .sum::<f64>()
        .max(1e-300);
    let r1 = q1_value(x).norm() / scale1;
    let r2 = q2_value(cfg, x).map(|v| v.norm()).unwrap_or(f64::INFINITY) / scale2;
    r1.max(r2)
}

pub fn draw_complex(rng: &mut ChaCha8Rng, half_width: f64) -> C64 {
    C64::new(
        rng.random_range(-half_width..half_width),
        rng.random_range(-half_width..half_width),
    )
}

/// Completes a free tail `(x_2, …, x_{n+2})` to a point on both quadrics by
/// solving the two-by-two linear system for the first two squared
/// coordinates and taking principal square roots.
pub fn point_from_tail(cfg: &PencilConfig<C64>, tail: &[C64]) -> Result<Point> {
    let dim = cfg.ambient_dim();
    if tail.len() != dim - 2 {
        return Err(Error::SizeMismatch {
            expected: dim - 2,
            got: tail.len(),
        });
    }
    let mu = cfg.mu();
    let r0 = -tail.iter().fold(C64::ZERO, |acc, v| acc + v * v);
    let r1 = -tail
        .iter()
        .zip(&mu[2..])
        .fold(C64::ZERO, |acc, (v, m)| acc + m * v * v);
    let det = mu[1] - mu[0];
    let x0_sq = (mu[1] * r0 - r1) / det;
    let x1_sq = (r1 - mu[0] * r0) / det;
    let scale = 1.0 + tail.iter().map(|v| v.norm_sqr()).fold(0.0, f64::max);
    if x0_sq.norm() < tol::UNLUCKY_FLOOR * scale || x1_sq.norm() < tol::UNLUCKY_FLOOR * scale {
        return Err(Error::Unlucky { attempts: 1 });
    }
    let mut coords = Vec::with_capacity(dim);
    coords.push(x0_sq.sqrt());
    coords.push(x1_sq.sqrt());
    coords.extend_from_slice(tail);
    Ok(Point(coords))
}

/// Draws a point on the cone; also reports how many degenerate tails were
/// rejected before success.
pub fn sample_point_counted(
    cfg: &PencilConfig<C64>,
    rng: &mut ChaCha8Rng,
) -> Result<(Point, usize)> {
    for attempt in 0..SAMPLE_ATTEMPTS {
        let tail: Vec<C64> = (0..cfg.ambient_dim() - 2)
            .map(|_| draw_complex(rng, 1.0))
            .collect();
        if let Ok(point) = point_from_tail(cfg, &tail) {
            return Ok((point, attempt));
        }
    }
    Err(Error::Unlucky {
        attempts: SAMPLE_ATTEMPTS,
    })
}

pub fn sample_point(cfg: &PencilConfig<C64>, rng: &mut ChaCha8Rng) -> Result<Point> {
    sample_point_counted(cfg, rng).map(|(p, _)| p)
}

/// Draws an ambient covector representative at `point`: random coordinates
/// projected against the Euler pairing.
pub fn sample_cotangent(
    cfg: &PencilConfig<C64>,
    point: &Point,
    rng: &mut ChaCha8Rng,
) -> Result<CotangentSample> {
    expect_len(cfg, &point.0)?;
    let x = &point.0;
    let weight: f64 = x.iter().map(|v| v.norm_sqr()).sum();
    if weight < 1e-200 {
        return Err(Error::ZeroCovector);
    }
    for _ in 0..SAMPLE_ATTEMPTS {
        let mut xi: Vec<C64> = (0..x.len()).map(|_| draw_complex(rng, 1.0)).collect();
        let pairing = bilinear_dot(&xi, x);
        let correction = pairing / C64::new(weight, 0.0);
        for (c, xv) in xi.iter_mut().zip(x) {
            *c -= correction * xv.conj();
        }
        if vec_norm(&xi) > 1e-6 {
            return Ok(CotangentSample {
                point: point.clone(),
                covector: Covector(xi),
            });
        }
    }
    Err(Error::Unlucky {
        attempts: SAMPLE_ATTEMPTS,
    })
}

/// Hermitian Gram–Schmidt; `None` when the seeds are numerically dependent.
pub fn orthonormalize(seeds: &[Vec<C64>], rel_floor: f64) -> Option<Vec<Vec<C64>>> {
    let mut basis: Vec<Vec<C64>> = Vec::with_capacity(seeds.len());
    for seed in seeds {
        let scale = vec_norm(seed);
        let mut v = seed.clone();
        for b in &basis {
            let coeff = hermitian_dot(b, &v);
            for (vi, bi) in v.iter_mut().zip(b) {
                *vi -= coeff * bi;
            }
        }
        let remaining = vec_norm(&v);
        if remaining <= rel_floor * scale.max(1e-300) {
            return None;
        }
        let inv = C64::new(1.0 / remaining, 0.0);
        for vi in v.iter_mut() {
            *vi *= inv;
        }
        basis.push(v);
    }
    Some(basis)
}

/// Deterministically extends an orthonormal set to `extra` more vectors by
/// sweeping the standard basis in index order.
pub fn extend_orthonormal(base: &[Vec<C64>], extra: usize) -> Result<Vec<Vec<C64>>> {
    let dim = base.first().map(|v| v.len()).unwrap_or(0);
    let mut accepted: Vec<Vec<C64>> = Vec::with_capacity(extra);
    for j in 0..dim {
        if accepted.len() == extra {
            break;
        }
        let mut v = vec![C64::ZERO; dim];
        v[j] = C64::ONE;
        for b in base.iter().chain(accepted.iter()) {
            let coeff = hermitian_dot(b, &v);
            for (vi, bi) in v.iter_mut().zip(b) {
                *vi -= coeff * bi;
            }
        }
        let remaining = vec_norm(&v);
        if remaining > 1e-6 {
            let inv = C64::new(1.0 / remaining, 0.0);
            for vi in v.iter_mut() {
                *vi *= inv;
            }
            accepted.push(v);
        }
    }
    if accepted.len() != extra {
        return Err(Error::SingularPoint);
    }
    Ok(accepted)
}

/// Builds the adapted frame at `point`: vectors annihilating both gradients
/// and Hermitian-orthogonal to the point, orthonormalized with a fixed pivot
/// order so the construction is a function of the point alone.
pub fn tangent_frame(cfg: &PencilConfig<C64>, point: &Point) -> Result<TangentFrame> {
    expect_len(cfg, &point.0)?;
    let x = &point.0;
    let seed1: Vec<C64> = x.iter().map(|v| v.conj()).collect();
    let seed2: Vec<C64> = x
        .iter()
        .zip(cfg.mu())
        .map(|(v, m)| (m * v).conj())
        .collect();
    let seed3: Vec<C64> = x.clone();
    let base = orthonormalize(&[seed1, seed2, seed3], 1e-10).ok_or(Error::SingularPoint)?;
    let frame = extend_orthonormal(&base, cfg.n())?;
    Ok(TangentFrame(frame))
}

/// Selector for a quadric in the pencil.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PencilMember {
    /// The unweighted sum of squares.
    First,
    /// The weighted sum of squares.
    Second,
    /// The combination `t * first - second`.
    At(C64),
}

/// Diagonal ambient weights of the selected member.
pub fn member_weights(cfg: &PencilConfig<C64>, member: PencilMember) -> Vec<C64> {
    match member {
        PencilMember::First => vec![C64::ONE; cfg.ambient_dim()],
        PencilMember::Second => cfg.mu().to_vec(),
        PencilMember::At(t) => cfg.mu().iter().map(|m| t - m).collect(),
    }
}

/// Gram matrix of the selected member on the frame vectors.
pub fn hessian_matrix(
    cfg: &PencilConfig<C64>,
    frame: &TangentFrame,
    member: PencilMember,
) -> Result<SymMatrix<C64>> {
    let weights = member_weights(cfg, member);
    for v in &frame.0 {
        expect_len(cfg, v)?;
    }
    Ok(SymMatrix::from_fn(frame.dim(), |a, b| {
        frame.0[a]
            .iter()
            .zip(&frame.0[b])
            .zip(&weights)
            .fold(C64::ZERO, |acc, ((va, vb), w)| acc + w * va * vb)
    }))
}

/// Frame coordinates of an ambient covector: the bilinear pairings with the
/// frame vectors.
pub fn frame_covector(frame: &TangentFrame, covector: &Covector) -> Result<Vec<C64>> {
    frame
        .0
        .iter()
        .map(|v| {
            if v.len() != covector.0.len() {
                Err(Error::SizeMismatch {
                    expected: v.len(),
                    got: covector.0.len(),
                })
            } else {
                Ok(bilinear_dot(v, &covector.0))
            }
        })
        .collect()
}

/// A form restricted to the kernel hyperplane of a covector in frame
/// coordinates, together with the hyperplane basis used.
#[derive(Debug, Clone)]
pub struct Restriction {
    pub matrix: SymMatrix<C64>,
    /// Columns express the hyperplane basis in frame coordinates.
    pub basis: Mat<C64>,
}

/// Restricts `form` to the kernel of the frame covector `xihat`.
pub fn restrict_to_hyperplane(form: &SymMatrix<C64>, xihat: &[C64]) -> Result<Restriction> {
    let dim = form.dim();
    if xihat.len() != dim {
        return Err(Error::SizeMismatch {
            expected: dim,
            got: xihat.len(),
        });
    }
    let norm = vec_norm(xihat);
    if norm <= 1e-300 {
        return Err(Error::ZeroCovector);
    }
    let seed: Vec<C64> = xihat.iter().map(|z| z.conj() / norm).collect();
    let extension = extend_orthonormal(&[seed], dim - 1).map_err(|_| Error::ZeroCovector)?;
    let basis = Mat::from_columns(&extension)?;
    let matrix = form.congruence(&basis)?;
    Ok(Restriction { matrix, basis })
}

/// Checks the rank floor for a pencil member's tangent form: the restriction
/// of any member to the tangent space never drops more than one below full
/// rank, singular members included.
pub fn rank_bound_check(
    cfg: &PencilConfig<C64>,
    point: &Point,
    member: PencilMember,
) -> Result<bool> {
    let frame = tangent_frame(cfg, point)?;
    let form = hessian_matrix(cfg, &frame, member)?;
    let rank = crate::rank::numeric_rank(&form.to_mat(), tol::RANK_REL);
    Ok(rank + 1 >= cfg.n())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rank::numeric_rank;
    use crate::seed::child_rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn demo_config() -> PencilConfig<C64> {
        PencilConfig::from_reals(2, &[0.0, 1.0, 2.0, 3.0, 4.0]).unwrap()
    }

    #[test]
    fn config_rejects_wrong_parameter_count() {
        assert!(PencilConfig::from_reals(2, &[0.0, 1.0]).is_err());
    }

    #[test]
    fn config_rejects_colliding_parameters() {
        assert!(PencilConfig::from_reals(2, &[0.0, 1.0, 2.0, 3.0, 3.0]).is_err());
    }

    #[test]
    fn config_json_round_trip() {
        let cfg = demo_config();
        let text = serde_json::to_string(&cfg).unwrap();
        assert!(text.contains("\"n\":2"));
        assert!(text.contains("\"mu\":[[0.0,0.0]"));
        let back: PencilConfig<C64> = serde_json::from_str(&text).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn hand_solved_tail_completion() {
        // tail (1, 0, 0) forces the first squared coordinate to 1 and the
        // second to -2, hence the point (1, i*sqrt(2), 1, 0, 0)
        let cfg = demo_config();
        let p = point_from_tail(&cfg, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]).unwrap();
        assert!((p.0[0] - c(1.0, 0.0)).norm() < 1e-14);
        assert!((p.0[1] - c(0.0, 2.0_f64.sqrt())).norm() < 1e-14);
        assert!(membership_residual(&cfg, &p.0) < 1e-14);
    }

    #[test]
    fn sampled_points_satisfy_both_equations() {
        let cfg = demo_config();
        let mut rng = child_rng(11, 0);
        for _ in 0..50 {
            let p = sample_point(&cfg, &mut rng).unwrap();
            assert!(membership_residual(&cfg, &p.0) < tol::MEMBERSHIP);
        }
    }

    #[test]
    fn cone_scaling_preserves_membership() {
        let cfg = demo_config();
        let mut rng = child_rng(11, 1);
        let p = sample_point(&cfg, &mut rng).unwrap();
        let scaled: Vec<C64> = p.0.iter().map(|v| v * c(0.3, 1.1)).collect();
        assert!(membership_residual(&cfg, &scaled) < tol::MEMBERSHIP);
    }

    #[test]
    fn covector_satisfies_euler_orthogonality() {
        let cfg = demo_config();
        let mut rng = child_rng(11, 2);
        let p = sample_point(&cfg, &mut rng).unwrap();
        for _ in 0..20 {
            let s = sample_cotangent(&cfg, &p, &mut rng).unwrap();
            let pairing = bilinear_dot(&s.covector.0, &p.0).norm();
            let scale = vec_norm(&s.covector.0) * vec_norm(&p.0);
            assert!(pairing <= 1e-12 * scale);
        }
    }

    #[test]
    fn frame_has_expected_shape_and_orthogonality() {
        let cfg = demo_config();
        let mut rng = child_rng(11, 3);
        let p = sample_point(&cfg, &mut rng).unwrap();
        let frame = tangent_frame(&cfg, &p).unwrap();
        assert_eq!(frame.dim(), cfg.n());
        let g1 = grad_q1(&p.0);
        let g2 = grad_q2(&cfg, &p.0).unwrap();
        for v in &frame.0 {
            assert!(bilinear_dot(&g1, v).norm() < 1e-10);
            assert!(bilinear_dot(&g2, v).norm() < 1e-10);
        }
        // the frame together with the point spans n + 1 dimensions
        let mut cols = frame.0.clone();
        cols.push(p.0.clone());
        let m = Mat::from_columns(&cols).unwrap();
        assert_eq!(numeric_rank(&m, tol::RANK_REL), cfg.n() + 1);
    }

    #[test]
    fn hessian_is_well_defined_modulo_euler_shifts() {
        // replacing a frame vector v by v + c x leaves all Gram entries fixed
        let cfg = demo_config();
        let mut rng = child_rng(11, 4);
        let p = sample_point(&cfg, &mut rng).unwrap();
        let frame = tangent_frame(&cfg, &p).unwrap();
        let mut shifted = frame.0.clone();
        for (vi, xv) in shifted[0].iter_mut().zip(&p.0) {
            *vi += c(0.7, -0.4) * xv;
        }
        let shifted = TangentFrame(shifted);
        for member in [
            PencilMember::First,
            PencilMember::Second,
            PencilMember::At(c(1.7, 0.3)),
        ] {
            let h0 = hessian_matrix(&cfg, &frame, member).unwrap();
            let h1 = hessian_matrix(&cfg, &shifted, member).unwrap();
            let mut worst: f64 = 0.0;
            for i in 0..h0.dim() {
                for j in 0..h0.dim() {
                    worst = worst.max((h0.at(i, j) - h1.at(i, j)).norm());
                }
            }
            let scale = h0.max_abs().max(1.0);
            assert!(worst <= 1e-10 * scale, "shift moved entries by {worst}");
        }
    }

    #[test]
    fn hessian_pencil_linearity() {
        let cfg = demo_config();
        let mut rng = child_rng(11, 5);
        let p = sample_point(&cfg, &mut rng).unwrap();
        let frame = tangent_frame(&cfg, &p).unwrap();
        let t = c(0.8, -1.2);
        let a = hessian_matrix(&cfg, &frame, PencilMember::First).unwrap();
        let b = hessian_matrix(&cfg, &frame, PencilMember::Second).unwrap();
        let direct = hessian_matrix(&cfg, &frame, PencilMember::At(t)).unwrap();
        for i in 0..a.dim() {
            for j in 0..a.dim() {
                let combo = t * a.at(i, j) - b.at(i, j);
                assert!((combo - direct.at(i, j)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn restriction_drops_dimension_by_one() {
        let cfg = demo_config();
        let mut rng = child_rng(11, 6);
        let p = sample_point(&cfg, &mut rng).unwrap();
        let sample = sample_cotangent(&cfg, &p, &mut rng).unwrap();
        let frame = tangent_frame(&cfg, &p).unwrap();
        let a = hessian_matrix(&cfg, &frame, PencilMember::First).unwrap();
        let xihat = frame_covector(&frame, &sample.covector).unwrap();
        let restriction = restrict_to_hyperplane(&a, &xihat).unwrap();
        assert_eq!(restriction.matrix.dim(), cfg.n() - 1);
        // basis columns annihilate the covector bilinearly
        for b in 0..restriction.basis.cols() {
            let col = restriction.basis.column(b);
            assert!(bilinear_dot(&xihat, &col).norm() < 1e-12);
        }
    }

    #[test]
    fn generic_member_has_full_tangent_rank() {
        let cfg = demo_config();
        let mut rng = child_rng(11, 7);
        let p = sample_point(&cfg, &mut rng).unwrap();
        let frame = tangent_frame(&cfg, &p).unwrap();
        let h = hessian_matrix(&cfg, &frame, PencilMember::At(c(0.37, 0.91))).unwrap();
        assert_eq!(numeric_rank(&h.to_mat(), tol::RANK_REL), cfg.n());
    }

    #[test]
    fn special_members_keep_near_full_rank() {
        // at t equal to a pencil parameter the rank may drop at most once
        let cfg = demo_config();
        let mut rng = child_rng(11, 8);
        for index in 0..cfg.ambient_dim() {
            let p = sample_point(&cfg, &mut rng).unwrap();
            let frame = tangent_frame(&cfg, &p).unwrap();
            let h = hessian_matrix(&cfg, &frame, PencilMember::At(cfg.mu()[index])).unwrap();
            let rank = numeric_rank(&h.to_mat(), tol::RANK_REL);
            assert!(rank + 1 >= cfg.n(), "rank {rank} at parameter {index}");
        }
    }

    #[test]
    fn coordinate_hyperplane_restriction_is_a_principal_block() {
        let identity = SymMatrix::from_diagonal(&[c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0)]);
        let xihat = [C64::ZERO, C64::ZERO, c(1.0, 0.0)];
        let restriction = restrict_to_hyperplane(&identity, &xihat).unwrap();
        assert_eq!(restriction.matrix.dim(), 2);
        for a in 0..2 {
            for b in 0..2 {
                let expected = if a == b { 1.0 } else { 0.0 };
                assert!((restriction.matrix.at(a, b) - c(expected, 0.0)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn rank_floor_holds_at_every_member() {
        let cfg = demo_config();
        let mut rng = child_rng(11, 9);
        let p = sample_point(&cfg, &mut rng).unwrap();
        for index in 0..cfg.ambient_dim() {
            let member = PencilMember::At(cfg.mu()[index]);
            assert!(rank_bound_check(&cfg, &p, member).unwrap());
        }
        assert!(rank_bound_check(&cfg, &p, PencilMember::At(c(0.21, -1.4))).unwrap());
    }

    #[test]
    fn reduced_config_drops_first_parameter() {
        let cfg = PencilConfig::from_reals(3, &[0.0, 1.0, 2.0, 3.0, 4.0, 5.0]).unwrap();
        let red = cfg.reduced().unwrap();
        assert_eq!(red.n(), 2);
        assert_eq!(red.mu()[0], c(1.0, 0.0));
        assert_eq!(red.ambient_dim(), 5);
    }
}
