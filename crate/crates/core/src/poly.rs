//! Dense univariate polynomials over either scalar backend.
//!
//! Coefficients are stored lowest degree first. Construction strips a
//! negligible tail so `degree` reflects the numerically meaningful degree:
//! exactly for the rational backend, relative to the largest coefficient for
//! the floating one.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Fraction of the largest coefficient below which a floating leading
/// coefficient is treated as absent.
const TRAILING_REL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct Poly<S: Scalar> {
    coeffs: Vec<S>,
}

impl<S: Scalar> Poly<S> {
    /// Builds a polynomial from coefficients listed lowest degree first.
    pub fn new(coeffs: Vec<S>) -> Self {
        let mut poly = Poly { coeffs };
        poly.normalize();
        poly
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn constant(value: S) -> Self {
        Poly::new(vec![value])
    }

    /// The monomial `t`.
    pub fn identity() -> Self {
        Poly::new(vec![S::zero(), S::one()])
    }

    /// Monic polynomial with the given roots.
    pub fn from_roots(roots: &[S]) -> Self {
        let mut poly = Poly::constant(S::one());
        for root in roots {
            let factor = Poly::new(vec![-root.clone(), S::one()]);
            poly = &poly * &factor;
        }
        poly
    }

    fn normalize(&mut self) {
        let scale = self
            .coeffs
            .iter()
            .map(Scalar::magnitude)
            .fold(0.0_f64, f64::max);
        while let Some(last) = self.coeffs.last() {
            let drop = if S::EXACT {
                last.is_zero_elem()
            } else {
                last.magnitude() <= scale * TRAILING_REL
            };
            if drop {
                self.coeffs.pop();
            } else {
                break;
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    /// Coefficient of `t^k`, zero-padded beyond the stored length.
    pub fn coeff(&self, k: usize) -> S {
        self.coeffs.get(k).cloned().unwrap_or_else(S::zero)
    }

    pub fn leading(&self) -> Option<&S> {
        self.coeffs.last()
    }

    /// Horner evaluation.
    pub fn eval(&self, at: &S) -> S {
        let mut acc = S::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * at.clone() + c.clone();
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return Poly::zero();
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| c.clone() * S::from_int(k as i64))
            .collect();
        Poly::new(coeffs)
    }

    pub fn scale(&self, factor: &S) -> Self {
        Poly::new(self.coeffs.iter().map(|c| c.clone() * factor.clone()).collect())
    }

    /// Largest coefficient magnitude; zero for the zero polynomial.
    pub fn coeff_scale(&self) -> f64 {
        self.coeffs
            .iter()
            .map(Scalar::magnitude)
            .fold(0.0_f64, f64::max)
    }

    /// Lagrange interpolation through `(node, value)` pairs with pairwise
    /// distinct nodes. The result has degree below the number of points.
    pub fn interpolate(points: &[(S, S)]) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::DomainError("interpolation needs at least one point".into()));
        }
        let mut acc = Poly::zero();
        for (i, (node_i, value_i)) in points.iter().enumerate() {
            let mut basis = Poly::constant(S::one());
            let mut denom = S::one();
            for (j, (node_j, _)) in points.iter().enumerate() {
                if i == j {
                    continue;
                }
                let diff = node_i.clone() - node_j.clone();
                if diff.is_zero_elem() {
                    return Err(Error::DomainError("interpolation nodes collide".into()));
                }
                basis = &basis * &Poly::new(vec![-node_j.clone(), S::one()]);
                denom = denom * diff;
            }
            acc = &acc + &basis.scale(&(value_i.clone() / denom));
        }
        Ok(acc)
    }
}

impl<S: Scalar> std::ops::Add for &Poly<S> {
    type Output = Poly<S>;

    fn add(self, rhs: Self) -> Poly<S> {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..len).map(|k| self.coeff(k) + rhs.coeff(k)).collect();
        Poly::new(coeffs)
    }
}

impl<S: Scalar> std::ops::Sub for &Poly<S> {
    type Output = Poly<S>;

    fn sub(self, rhs: Self) -> Poly<S> {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..len).map(|k| self.coeff(k) - rhs.coeff(k)).collect();
        Poly::new(coeffs)
    }
}

impl<S: Scalar> std::ops::Mul for &Poly<S> {
    type Output = Poly<S>;

    fn mul(self, rhs: Self) -> Poly<S> {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut coeffs = vec![S::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                coeffs[i + j] = coeffs[i + j].clone() + a.clone() * b.clone();
            }
        }
        Poly::new(coeffs)
    }
}

impl<S: Scalar> std::ops::Neg for &Poly<S> {
    type Output = Poly<S>;

    fn neg(self) -> Poly<S> {
        Poly::new(self.coeffs.iter().map(|c| -c.clone()).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, Rat, C64};

    #[test]
    fn eval_matches_hand_computation() {
        // 2 - 3t + t^2 at t = 5 is 2 - 15 + 25 = 12
        let p = Poly::new(vec![rat(2, 1), rat(-3, 1), rat(1, 1)]);
        assert_eq!(p.eval(&rat(5, 1)), rat(12, 1));
    }

    #[test]
    fn from_roots_expands_correctly() {
        // (t - 2)(t - 3) = 6 - 5t + t^2
        let p = Poly::from_roots(&[rat(2, 1), rat(3, 1)]);
        assert_eq!(p.coeffs(), &[rat(6, 1), rat(-5, 1), rat(1, 1)]);
    }

    #[test]
    fn zero_polynomial_has_no_degree() {
        let p: Poly<Rat> = Poly::new(vec![rat(0, 1), rat(0, 1)]);
        assert!(p.is_zero());
        assert_eq!(p.degree(), None);
    }

    #[test]
    fn float_normalization_strips_noise_tail() {
        let p = Poly::new(vec![
            C64::new(1.0, 0.0),
            C64::new(2.0, 0.0),
            C64::new(1e-15, 0.0),
        ]);
        assert_eq!(p.degree(), Some(1));
    }

    #[test]
    fn interpolation_recovers_exact_coefficients() {
        // through (0,1), (1,0), (2,1): 1 - 2t + t^2
        let pts = vec![
            (rat(0, 1), rat(1, 1)),
            (rat(1, 1), rat(0, 1)),
            (rat(2, 1), rat(1, 1)),
        ];
        let p = Poly::interpolate(&pts).unwrap();
        assert_eq!(p.coeffs(), &[rat(1, 1), rat(-2, 1), rat(1, 1)]);
    }

    #[test]
    fn derivative_of_cubic() {
        // d/dt (t^3 - t) = 3t^2 - 1
        let p = Poly::new(vec![rat(0, 1), rat(-1, 1), rat(0, 1), rat(1, 1)]);
        assert_eq!(p.derivative().coeffs(), &[rat(-1, 1), rat(0, 1), rat(3, 1)]);
    }

    #[test]
    fn product_against_distributed_expansion() {
        // (1 + t)(1 - t + t^2) = 1 + t^3
        let a = Poly::new(vec![rat(1, 1), rat(1, 1)]);
        let b = Poly::new(vec![rat(1, 1), rat(-1, 1), rat(1, 1)]);
        let p = &a * &b;
        assert_eq!(p.coeffs(), &[rat(1, 1), rat(0, 1), rat(0, 1), rat(1, 1)]);
    }
}
