//! Finite-dimensional invariants of twisted cochain families and the knot
//! signature formulas attached to periodic index problems.
//!
//! The core objects are a cochain complex `(C, ∂)` with a symbol map `σ`
//! satisfying `∂σ + σ∂ = 0`, `σσ = 0`, and the family `∂_z = ∂ − zσ`. The
//! modules compute where `∂_z` fails to be acyclic ([`complexes`]), the
//! equivariant cohomology at those points and the resulting index jumps
//! ([`equivariant`]), chain homotopies and local resolvents ([`resolvent`]),
//! mapping-torus models and Alexander modules ([`covers`]), knot and
//! four-manifold signature formulas ([`knotcalc`]) and periodic spectral flow
//! ([`specflow`]).
//!
//! Linear algebra is generic over [`field::Scalar`]; exact work uses
//! [`GaussianRational`] and floating work uses `Complex<f64>`.

pub mod complexes;
pub mod config;
pub mod covers;
pub mod equivariant;
pub mod error;
pub mod exactalg;
pub mod field;
pub mod json;
pub mod knotcalc;
pub mod resolvent;
pub mod specflow;
pub mod verify;

pub use config::{Mode, RunConfig};
pub use error::{Error, Result};
pub use exactalg::{GaussianRational, LaurentPoly, Matrix, Polynomial, RationalFunction};

use num_complex::Complex64;

pub type ExactMatrix = Matrix<GaussianRational>;
pub type FloatMatrix = Matrix<Complex64>;
pub type Poly = Polynomial<GaussianRational>;
pub type LaurentMatrix = Matrix<LaurentPoly>;
pub type ExactComplex = complexes::CochainComplex<GaussianRational>;
pub type FloatComplex = complexes::CochainComplex<Complex64>;
pub type ExactFamily = complexes::TwistedFamily<GaussianRational>;
pub type FloatFamily = complexes::TwistedFamily<Complex64>;
