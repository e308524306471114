//! Branch-locus and genus bookkeeping for the double covers that appear in
//! the fiber description: hyperelliptic data from branch multisets,
//! Riemann–Hurwitz accounting, and the fixed low-genus tower attached to
//! six base parameters.

use crate::error::{Error, Result};
use crate::scalar::C64;
use crate::tol;
use crate::variety::PencilConfig;
use serde::{Deserialize, Serialize};

/// A hyperelliptic curve described by its finite branch points. Ramification
/// at infinity is implied by parity: an odd count means infinity is a branch
/// point as well.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HyperellipticData {
    #[serde(with = "crate::jsonio::complex_vec")]
    pub branch: Vec<C64>,
    pub genus: usize,
}

fn check_separation(points: &[C64]) -> Result<()> {
    let scale = points
        .iter()
        .map(|z| z.norm())
        .fold(1.0, f64::max);
    for (i, a) in points.iter().enumerate() {
        for b in points.iter().skip(i + 1) {
            if (a - b).norm() < tol::BRANCH_SEPARATION * scale {
                return Err(Error::SingularCurve);
            }
        }
    }
    Ok(())
}

impl HyperellipticData {
    /// Builds the curve data, rejecting colliding branch points.
    pub fn new(branch: Vec<C64>) -> Result<Self> {
        if branch.len() < 2 {
            return Err(Error::BadConfig(
                "need at least two branch points".into(),
            ));
        }
        check_separation(&branch)?;
        let genus = branch.len().div_ceil(2) - 1;
        Ok(HyperellipticData { branch, genus })
    }
}

/// The curve attached to a fiber: branch points are the pencil parameters
/// together with the `n - 1` fiber roots, giving `2n + 2` points and genus
/// `n`.
pub fn fiber_curve(cfg: &PencilConfig<C64>, lambdas: &[C64]) -> Result<HyperellipticData> {
    let n = cfg.n();
    if lambdas.len() != n - 1 {
        return Err(Error::SizeMismatch {
            expected: n - 1,
            got: lambdas.len(),
        });
    }
    let mut branch = cfg.mu().to_vec();
    branch.extend_from_slice(lambdas);
    let data = HyperellipticData::new(branch)?;
    debug_assert_eq!(data.genus, n);
    Ok(data)
}

/// Genus of a double cover of a genus `g_base` curve branched at
/// `branch_count` points: `2g - 2 = 2(2 g_base - 2) + branch_count`.
pub fn riemann_hurwitz_genus(g_base: usize, branch_count: usize) -> Result<usize> {
    if branch_count % 2 != 0 {
        return Err(Error::Parity(branch_count));
    }
    let doubled = 2 * (2 * g_base as i64 - 2) + branch_count as i64;
    let genus = doubled / 2 + 1;
    if genus < 0 {
        return Err(Error::DomainError(
            "branch data gives negative genus".into(),
        ));
    }
    Ok(genus as usize)
}

/// The fixed tower over six base parameters: the base double cover, the
/// four-point cover above it, and the eight-point quotient cover, with the
/// dimension of the associated three-dimensional abelian variety.
#[derive(Debug, Clone, Serialize)]
pub struct CoverTower {
    pub base: HyperellipticData,
    pub quotient: HyperellipticData,
    pub genus_base: usize,
    pub genus_cover: usize,
    pub genus_quotient: usize,
    pub abelian_dim: usize,
}

/// Builds the tower data from six distinct parameters and the two extra
/// branch values; the extra values must be distinct and away from the six.
pub fn cover_tower(mu: &[C64], p: C64, q: C64) -> Result<CoverTower> {
    if mu.len() != 6 {
        return Err(Error::SizeMismatch {
            expected: 6,
            got: mu.len(),
        });
    }
    check_separation(mu)?;
    let scale = mu
        .iter()
        .map(|z| z.norm())
        .fold(p.norm().max(q.norm()).max(1.0), f64::max);
    let collides = |a: C64, b: C64| (a - b).norm() < tol::BRANCH_SEPARATION * scale;
    if collides(p, q) || mu.iter().any(|&m| collides(m, p) || collides(m, q)) {
        return Err(Error::DegenerateOmega);
    }
    let base = HyperellipticData::new(mu.to_vec())?;
    let genus_base = base.genus;
    let genus_cover = riemann_hurwitz_genus(genus_base, 4)?;
    let mut extended = mu.to_vec();
    extended.push(p);
    extended.push(q);
    let quotient = HyperellipticData::new(extended)?;
    let genus_quotient = quotient.genus;
    let abelian_dim = genus_cover - genus_base;
    Ok(CoverTower {
        base,
        quotient,
        genus_base,
        genus_cover,
        genus_quotient,
        abelian_dim,
    })
}
