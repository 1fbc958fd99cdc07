use thiserror::Error;

pub type Result<T> = std::result::Result<T, GeometryError>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("metric is not positive definite")]
    NotPositiveDefinite,

    #[error("bilinear form is not symmetric (defect {defect:e})")]
    NotSymmetric { defect: f64 },

    #[error("vectors are linearly dependent at index {index} (residual norm {residual:e})")]
    RankDeficient { index: usize, residual: f64 },

    #[error("2-plane basis is not orthonormal (defect {defect:e})")]
    NotOrthonormal { defect: f64 },

    #[error("no antiholomorphic 2-plane exists in dimension {dim}")]
    NoAntiholomorphicPlane { dim: usize },

    #[error("vector is not a unit vector (norm {norm})")]
    NotUnit { norm: f64 },

    #[error(
        "tensor violates the vanishing-lemma hypotheses (defects {c1:e}, {c2:e}, {c3:e}, {c4:e})"
    )]
    LemmaHypothesis { c1: f64, c2: f64, c3: f64, c4: f64 },

    #[error("a product needs at least two factors, got {0}")]
    ProductTooSmall(usize),

    #[error("vector is not supported in a single factor other than the other argument's")]
    NotInDistinctFactors,

    #[error("point {point:?} is closer than {margin} to the chart boundary")]
    BoundaryProximity { point: Vec<f64>, margin: f64 },

    #[error("derivatives of order {0} are unavailable for this chart")]
    DerivativeUnavailable(usize),

    #[error("{0}")]
    Unsupported(String),
}
