//! Local charts of almost Hermitian manifolds and the Levi-Civita calculus on
//! them.
//!
//! A parametric chart supplies `g(u)` and `J(u)` as matrices in the coordinate
//! basis `∂_1, …, ∂_d`, with `J` stored so that `J(∂_k) = J[(p, k)] ∂_p`.
//! Charts may also supply Taylor jets of both fields; [`geometry_at`] then
//! differentiates exactly, otherwise it falls back to nested central
//! differences. The round six-sphere is handled extrinsically by
//! [`EmbeddedS6`].

mod geometry;
mod identities;
mod models;
mod sphere;

use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;

use crate::error::{GeometryError, Result};
use crate::jet::JetMatrix;

pub use geometry::{
    geometry_at, geometry_at_with, ChartGeometry, Christoffels, DerivativeMode, GeometryOptions,
    Route,
};
pub use identities::{
    grad_ricci_identities, grad_ricci_identities_with, identity_report, nearly_kahler_defect,
    nearly_kahler_defect_with, nk_identities, nk_identities_with, schur_scan, schur_scan_with,
    seeded_points, GradRicciDefects, IdentityReport, NearlyKahlerDefect, SchurScan, SCHUR_STEP,
};
pub use models::{ComplexSpaceFormChart, FlatChart, PolynomialHermitianChart, SphereGraphChart};
pub use sphere::EmbeddedS6;

/// Axis-aligned coordinate box `[lower_i, upper_i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoordBox {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl CoordBox {
    pub fn cube(dim: usize, half_width: f64) -> Self {
        Self {
            lower: vec![-half_width; dim],
            upper: vec![half_width; dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    /// Distance from `u` to the boundary, negative outside.
    pub fn margin(&self, u: &[f64]) -> f64 {
        u.iter()
            .zip(self.lower.iter().zip(&self.upper))
            .map(|(x, (lo, hi))| (x - lo).min(hi - x))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn require_margin(&self, u: &[f64], margin: f64) -> Result<()> {
        if u.len() != self.dim() {
            return Err(GeometryError::DimensionMismatch {
                expected: self.dim(),
                found: u.len(),
            });
        }
        if self.margin(u) < margin {
            return Err(GeometryError::BoundaryProximity {
                point: u.to_vec(),
                margin,
            });
        }
        Ok(())
    }
}

/// Metric and almost complex structure on a coordinate box.
///
/// Only the value maps are required. Jets, when provided, must be exact to
/// the requested order; returning `None` sends [`geometry_at`] down the
/// finite-difference route.
pub trait ChartFields: Send + Sync + fmt::Debug {
    fn dim(&self) -> usize;
    fn domain(&self) -> &CoordBox;
    fn metric(&self, u: &[f64]) -> DMatrix<f64>;
    fn complex_structure(&self, u: &[f64]) -> DMatrix<f64>;

    fn metric_jet(&self, _u: &[f64], _order: u8) -> Option<JetMatrix> {
        None
    }

    fn complex_structure_jet(&self, _u: &[f64], _order: u8) -> Option<JetMatrix> {
        None
    }
}

#[derive(Debug, Clone)]
pub enum Chart {
    Parametric(Arc<dyn ChartFields>),
    EmbeddedSphere(EmbeddedS6),
}

impl Chart {
    pub fn parametric(fields: impl ChartFields + 'static) -> Self {
        Chart::Parametric(Arc::new(fields))
    }

    pub fn flat(n: usize) -> Self {
        Chart::parametric(FlatChart::new(n))
    }

    /// Complex space form of holomorphic sectional curvature `c`.
    pub fn complex_space_form(n: usize, c: f64) -> Self {
        Chart::parametric(ComplexSpaceFormChart::new(n, c))
    }

    pub fn embedded_s6(frame_seed: u64) -> Self {
        Chart::EmbeddedSphere(EmbeddedS6::new(frame_seed))
    }

    /// Tangent dimension.
    pub fn dim(&self) -> usize {
        match self {
            Chart::Parametric(f) => f.dim(),
            Chart::EmbeddedSphere(_) => 6,
        }
    }

    /// Length of a coordinate vector (7 for the embedded sphere).
    pub fn coordinate_len(&self) -> usize {
        match self {
            Chart::Parametric(f) => f.dim(),
            Chart::EmbeddedSphere(_) => 7,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Chart::Parametric(_) => "parametric",
            Chart::EmbeddedSphere(_) => "embedded-sphere",
        }
    }
}
