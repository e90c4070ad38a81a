//! Schramm-Loewner evolution with internal degrees of freedom governed by
//! the affine Lie superalgebra of osp(1|2).
//!
//! The crate has two halves. The exact half ([`algebra`], [`grassmann`],
//! [`series`], [`affine`]) verifies the algebraic identities behind the
//! construction in the field Q(i, √2). The stochastic half ([`evolution`],
//! [`harness`]) integrates the SDE system with Euler–Maruyama and checks
//! the local-martingale property by Monte Carlo.

pub mod affine;
pub mod algebra;
pub mod evolution;
pub mod grassmann;
pub mod harness;
pub mod scalar;
pub mod series;

pub use scalar::{Coeff, Exact, Scalar};
