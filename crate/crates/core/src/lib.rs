//! Verification laboratory for the spectral fibration attached to a pencil
//! of quadrics.
//!
//! The crate samples points on a smooth intersection of two diagonal
//! quadrics, evaluates the distinguished family of symmetric 2-tensors on
//! its cotangent spaces, and cross-checks the algebra, geometry, dynamics
//! and curve bookkeeping those tensors are supposed to satisfy. Exact claims
//! run over arbitrary-precision rationals; numeric claims run over complex
//! doubles with named tolerances.

pub mod curves;
pub mod diag;
pub mod dynamics;
pub mod error;
pub mod fibration;
pub mod jsonio;
pub mod matching;
pub mod matrix;
pub mod poly;
pub mod rank;
pub mod roots;
pub mod scalar;
pub mod seed;
pub mod tol;
pub mod variety;
pub mod verify;

pub use error::{Error, Result};
