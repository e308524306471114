//! Simultaneous root finding for complex polynomials.
//!
//! Uses Aberth–Ehrlich iteration from a scaled circular initial layout,
//! followed by a few Newton polish steps per root. Residuals are measured
//! against the largest coefficient magnitude; callers get `NoConverge` with
//! the achieved residual when the iteration stalls.

use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::scalar::C64;
use crate::tol;

const MAX_SWEEPS: usize = 200;
const POLISH_STEPS: usize = 3;

/// All complex roots of `poly`, in nondecreasing lexicographic `(re, im)`
/// order. The polynomial must have degree at least one after trailing-noise
/// stripping.
pub fn poly_roots(poly: &Poly<C64>) -> Result<Vec<C64>> {
    let degree = match poly.degree() {
        None | Some(0) => return Err(Error::DegreeZero),
        Some(d) => d,
    };
    let scale = poly.coeff_scale();
    if degree == 1 {
        let root = -poly.coeff(0) / poly.coeff(1);
        return Ok(vec![root]);
    }

    let derivative = poly.derivative();
    let mut zs = initial_guesses(poly, degree);
    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        let mut shift_mass = 0.0;
        for i in 0..degree {
            let z = zs[i];
            let value = poly.eval(&z);
            let slope = derivative.eval(&z);
            let newton = if slope.norm() > 0.0 {
                value / slope
            } else {
                C64::new(1e-12, 1e-12)
            };
            let mut repel = C64::ZERO;
            for (j, other) in zs.iter().enumerate() {
                if j != i {
                    let gap = z - other;
                    if gap.norm() > 0.0 {
                        repel += 1.0 / gap;
                    }
                }
            }
            let denom = C64::ONE - newton * repel;
            let step = if denom.norm() > 1e-300 { newton / denom } else { newton };
            zs[i] = z - step;
            shift_mass += step.norm();
        }
        if shift_mass <= 1e-14 * (1.0 + zs.iter().map(|z| z.norm()).fold(0.0, f64::max)) {
            converged = true;
            break;
        }
    }

    for z in zs.iter_mut() {
        for _ in 0..POLISH_STEPS {
            let slope = derivative.eval(z);
            if slope.norm() == 0.0 {
                break;
            }
            let step = poly.eval(z) / slope;
            *z -= step;
        }
    }

    let residual = zs
        .iter()
        .map(|z| poly.eval(z).norm())
        .fold(0.0, f64::max);
    if residual > tol::ROOT_RESIDUAL * scale {
        return Err(Error::NoConverge {
            residual: residual / scale,
        });
    }
    let _ = converged;
    let mut out = zs;
    sort_complex(&mut out);
    Ok(out)
}

/// Lexicographic `(re, im)` ordering used everywhere results must be stable.
pub fn sort_complex(values: &mut [C64]) {
    values.sort_by(|a, b| {
        a.re.partial_cmp(&b.re)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.im.partial_cmp(&b.im).unwrap_or(std::cmp::Ordering::Equal))
    });
}

fn initial_guesses(poly: &Poly<C64>, degree: usize) -> Vec<C64> {
    let lead = poly.leading().cloned().unwrap_or(C64::ONE);
    let radius = 1.0
        + poly
            .coeffs()
            .iter()
            .take(degree)
            .map(|c| (c / lead).norm())
            .fold(0.0, f64::max);
    (0..degree)
        .map(|k| {
            let angle = 2.0 * std::f64::consts::PI * (k as f64) / (degree as f64) + 0.4;
            C64::from_polar(radius.min(1e6), angle)
        })
        .collect()
}
