//! Curvature algebra and local chart geometry for almost Hermitian manifolds,
//! specialised to nearly Kähler manifolds of pointwise constant
//! antiholomorphic sectional curvature.
//!
//! The crate is organised bottom-up:
//!
//! - [`hermitian`]: a tangent space with metric `g` and almost complex
//!   structure `J`, orthonormal frames and 2-plane classification.
//! - [`tensor`]: dense (0,4) tensors.
//! - [`constructors`]: the tensors `R1`, `R2`, `psi`, complex space forms, the
//!   octonionic six-sphere and product curvature tensors.
//! - [`invariants`]: Ricci contractions, symmetry predicates, the vanishing
//!   lemma, the curvature decomposition checks and the model classifier.
//! - [`chart`]: Christoffel symbols, curvature and covariant derivatives on
//!   local charts, and the differential identities evaluated there.
//!
//! All values are immutable after construction and every operation is a
//! pure function, so everything here is `Send + Sync`.

pub mod chart;
pub mod constructors;
pub mod error;
pub mod hermitian;
pub mod invariants;
pub mod jet;
pub mod lemma;
pub mod octonion;
pub mod rng;
pub mod tensor;

pub use error::{GeometryError, Result};
pub use hermitian::{Frame, HermitianPoint, PlaneKind, PlaneType, TwoPlane};
pub use tensor::FourTensor;

/// Default tolerance for assertions that hold exactly up to round-off.
pub const STRUCTURAL_TOL: f64 = 1e-9;

/// Default tolerance for quantities derived from chart numerics.
pub const CHART_TOL: f64 = 1e-4;

/// Tolerance pair used by checks that mix pointwise algebra and chart numerics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub structural: f64,
    pub chart: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            structural: STRUCTURAL_TOL,
            chart: CHART_TOL,
        }
    }
}
