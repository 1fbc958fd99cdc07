//! Pointwise linear algebra of an almost Hermitian tangent space.
//!
//! Vectors are dense coordinate arrays in a fixed basis of `R^{2n}`; the
//! metric `g` and the almost complex structure `J` are dense `2n x 2n`
//! matrices acting on those coordinates (`J` maps coordinates of `x` to
//! coordinates of `Jx`).

use nalgebra::{DMatrix, DVector};

use crate::error::{GeometryError, Result};
use crate::rng::{self, stream_rng, tagged_stream};
use crate::STRUCTURAL_TOL;

const TAG_FRAME: u32 = 1;
const TAG_PLANE: u32 = 2;
const TAG_VECTOR: u32 = 3;

/// A `2n`-dimensional real inner-product space with an almost complex
/// structure.
///
/// Construction validates shapes, symmetry and positive definiteness of `g`.
/// It does not insist that `J` is an orthogonal complex structure; that is
/// measured by [`HermitianPoint::structure_defects`].
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianPoint {
    g: DMatrix<f64>,
    j: DMatrix<f64>,
}

impl HermitianPoint {
    pub fn new(g: DMatrix<f64>, j: DMatrix<f64>) -> Result<Self> {
        let dim = g.nrows();
        if g.ncols() != dim {
            return Err(GeometryError::DimensionMismatch {
                expected: dim,
                found: g.ncols(),
            });
        }
        if j.nrows() != dim || j.ncols() != dim {
            return Err(GeometryError::DimensionMismatch {
                expected: dim,
                found: if j.nrows() != dim {
                    j.nrows()
                } else {
                    j.ncols()
                },
            });
        }
        if dim == 0 || !dim.is_multiple_of(2) {
            return Err(GeometryError::InvalidDimension(format!(
                "dimension must be even and positive, got {dim}"
            )));
        }
        let defect = (&g - g.transpose()).amax();
        if defect > STRUCTURAL_TOL * g.amax().max(1.0) {
            return Err(GeometryError::NotSymmetric { defect });
        }
        if g.clone().cholesky().is_none() {
            return Err(GeometryError::NotPositiveDefinite);
        }
        Ok(Self { g, j })
    }

    /// `R^{2n}` with the identity metric and `J0 e_{2k-1} = e_{2k}`,
    /// `J0 e_{2k} = -e_{2k-1}`.
    pub fn standard(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(GeometryError::InvalidDimension(
                "complex dimension n must be at least 1".into(),
            ));
        }
        Self::new(
            DMatrix::identity(2 * n, 2 * n),
            standard_complex_structure(n),
        )
    }

    pub fn dim(&self) -> usize {
        self.g.nrows()
    }

    /// Complex dimension `n = dim / 2`.
    pub fn n(&self) -> usize {
        self.dim() / 2
    }

    pub fn g(&self) -> &DMatrix<f64> {
        &self.g
    }

    pub fn j(&self) -> &DMatrix<f64> {
        &self.j
    }

    pub fn inner(&self, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        x.dot(&(&self.g * y))
    }

    pub fn norm(&self, x: &DVector<f64>) -> f64 {
        self.inner(x, x).max(0.0).sqrt()
    }

    pub fn apply_j(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.j * x
    }

    /// Matrix `W` with `W[(a, b)] = g(J e_a, e_b)`.
    pub fn kahler_form(&self) -> DMatrix<f64> {
        self.j.transpose() * &self.g
    }

    /// `(max |J^2 + I|, max |g(J e_i, J e_j) - g(e_i, e_j)|)`.
    pub fn structure_defects(&self) -> (f64, f64) {
        defects_unchecked(&self.g, &self.j)
    }

    /// Gram–Schmidt of the coordinate basis.
    pub fn default_frame(&self) -> Frame {
        let basis: Vec<DVector<f64>> = (0..self.dim())
            .map(|i| DVector::from_fn(self.dim(), |k, _| if k == i { 1.0 } else { 0.0 }))
            .collect();
        let vectors = orthonormalize(&basis, self, STRUCTURAL_TOL)
            .expect("coordinate basis is independent for a positive definite metric");
        Frame::from_vectors(&vectors)
    }

    /// A seeded random g-orthonormal frame.
    pub fn random_frame(&self, seed: u64) -> Frame {
        let dim = self.dim();
        let mut attempt = 0u64;
        loop {
            let mut rng = stream_rng(seed, tagged_stream(TAG_FRAME, attempt));
            let raw: Vec<DVector<f64>> = (0..dim)
                .map(|_| rng::gaussian_vector(&mut rng, dim))
                .collect();
            if let Ok(vectors) = orthonormalize(&raw, self, 1e-6) {
                return Frame::from_vectors(&vectors);
            }
            attempt += 1;
        }
    }

    /// Uniform draw from the g-unit sphere, addressed by `(seed, index)`.
    pub fn random_unit_vector(&self, seed: u64, index: u64) -> DVector<f64> {
        let mut rng = stream_rng(seed, tagged_stream(TAG_VECTOR, index));
        self.unit_from_frame_coords(&rng::unit_vector(&mut rng, self.dim()))
    }

    fn unit_from_frame_coords(&self, z: &DVector<f64>) -> DVector<f64> {
        let v = self.default_frame().matrix() * z;
        let norm = self.norm(&v);
        v / norm
    }
}

/// Canonical complex structure on `R^{2n}`.
pub fn standard_complex_structure(n: usize) -> DMatrix<f64> {
    let mut j = DMatrix::zeros(2 * n, 2 * n);
    for k in 0..n {
        j[(2 * k + 1, 2 * k)] = 1.0;
        j[(2 * k, 2 * k + 1)] = -1.0;
    }
    j
}

/// `R^{2n}` with the identity metric and the canonical complex structure.
pub fn make_standard_point(n: usize) -> Result<HermitianPoint> {
    HermitianPoint::standard(n)
}

/// Structure defects of a raw `(g, J)` pair whose dimensions are not yet
/// known to agree.
pub fn structure_defects(g: &DMatrix<f64>, j: &DMatrix<f64>) -> Result<(f64, f64)> {
    let dim = g.nrows();
    for found in [g.ncols(), j.nrows(), j.ncols()] {
        if found != dim {
            return Err(GeometryError::DimensionMismatch {
                expected: dim,
                found,
            });
        }
    }
    Ok(defects_unchecked(g, j))
}

fn defects_unchecked(g: &DMatrix<f64>, j: &DMatrix<f64>) -> (f64, f64) {
    let dim = g.nrows();
    let j_square = (j * j + DMatrix::identity(dim, dim)).amax();
    let compat = (j.transpose() * g * j - g).amax();
    (j_square, compat)
}

/// Modified Gram–Schmidt in the metric of `p`, with one re-orthogonalisation
/// pass. Fails when a vector's residual falls below `tol` times its norm.
pub fn orthonormalize(
    vectors: &[DVector<f64>],
    p: &HermitianPoint,
    tol: f64,
) -> Result<Vec<DVector<f64>>> {
    if let Some(v) = vectors.iter().find(|v| v.len() != p.dim()) {
        return Err(GeometryError::DimensionMismatch {
            expected: p.dim(),
            found: v.len(),
        });
    }
    gram_schmidt(vectors, |a, b| p.inner(a, b), tol)
}

/// Gram–Schmidt for an arbitrary inner product.
pub(crate) fn gram_schmidt(
    vectors: &[DVector<f64>],
    inner: impl Fn(&DVector<f64>, &DVector<f64>) -> f64,
    tol: f64,
) -> Result<Vec<DVector<f64>>> {
    let norm = |v: &DVector<f64>| inner(v, v).max(0.0).sqrt();
    let mut out: Vec<DVector<f64>> = Vec::with_capacity(vectors.len());
    for (index, v) in vectors.iter().enumerate() {
        let original = norm(v);
        let mut w = v.clone();
        for _ in 0..2 {
            for e in &out {
                let c = inner(e, &w);
                w.axpy(-c, e, 1.0);
            }
        }
        let residual = norm(&w);
        if original == 0.0 || residual <= tol * original {
            return Err(GeometryError::RankDeficient { index, residual });
        }
        out.push(w / residual);
    }
    Ok(out)
}

/// An ordered g-orthonormal family stored as matrix columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    vectors: DMatrix<f64>,
}

impl Frame {
    pub fn from_vectors(vectors: &[DVector<f64>]) -> Self {
        Self {
            vectors: DMatrix::from_columns(vectors),
        }
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.vectors
    }

    pub fn len(&self) -> usize {
        self.vectors.ncols()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn vector(&self, i: usize) -> DVector<f64> {
        self.vectors.column(i).into_owned()
    }

    /// `max |g(e_i, e_j) - delta_ij|`.
    pub fn orthonormality_defect(&self, p: &HermitianPoint) -> f64 {
        let gram = self.vectors.transpose() * p.g() * &self.vectors;
        (gram - DMatrix::identity(self.len(), self.len())).amax()
    }
}

/// A 2-plane given by a basis `{x, y}`, expected to be g-orthonormal.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoPlane {
    pub x: DVector<f64>,
    pub y: DVector<f64>,
}

impl TwoPlane {
    pub fn new(x: DVector<f64>, y: DVector<f64>) -> Self {
        Self { x, y }
    }

    pub fn orthonormality_defect(&self, p: &HermitianPoint) -> f64 {
        let a = (p.inner(&self.x, &self.x) - 1.0).abs();
        let b = (p.inner(&self.y, &self.y) - 1.0).abs();
        let c = p.inner(&self.x, &self.y).abs();
        a.max(b).max(c)
    }

    pub(crate) fn check(&self, p: &HermitianPoint) -> Result<()> {
        if self.x.len() != p.dim() || self.y.len() != p.dim() {
            return Err(GeometryError::DimensionMismatch {
                expected: p.dim(),
                found: self.x.len().min(self.y.len()),
            });
        }
        let defect = self.orthonormality_defect(p);
        if defect > STRUCTURAL_TOL {
            return Err(GeometryError::NotOrthonormal { defect });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlaneKind {
    Holomorphic,
    Antiholomorphic,
    Generic,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlaneType {
    pub kind: PlaneKind,
    pub hol_defect: f64,
    pub antihol_defect: f64,
}

/// Classifies a 2-plane. `hol_defect` is the summed g-distance of `Jx` and
/// `Jy` from the plane; `antihol_defect` is `|g(Jx, y)|`.
pub fn plane_type(p: &HermitianPoint, plane: &TwoPlane, tol: f64) -> Result<PlaneType> {
    plane.check(p)?;
    let distance = |v: &DVector<f64>| {
        let mut r = v.clone();
        r.axpy(-p.inner(&plane.x, v), &plane.x, 1.0);
        r.axpy(-p.inner(&plane.y, v), &plane.y, 1.0);
        p.norm(&r)
    };
    let jx = p.apply_j(&plane.x);
    let jy = p.apply_j(&plane.y);
    let hol_defect = distance(&jx) + distance(&jy);
    let antihol_defect = p.inner(&jx, &plane.y).abs();
    let kind = if hol_defect <= tol {
        PlaneKind::Holomorphic
    } else if antihol_defect <= tol {
        PlaneKind::Antiholomorphic
    } else {
        PlaneKind::Generic
    };
    Ok(PlaneType {
        kind,
        hol_defect,
        antihol_defect,
    })
}

/// Seeded uniform antiholomorphic plane: `x` uniform on the unit sphere,
/// `y` uniform on the unit sphere of `span{x, Jx}^perp`.
pub fn sample_antiholomorphic_plane(p: &HermitianPoint, seed: u64) -> Result<TwoPlane> {
    sample_antiholomorphic_plane_indexed(p, seed, 0)
}

/// As [`sample_antiholomorphic_plane`], for the `index`-th sample of a seed.
pub fn sample_antiholomorphic_plane_indexed(
    p: &HermitianPoint,
    seed: u64,
    index: u64,
) -> Result<TwoPlane> {
    let dim = p.dim();
    if dim < 4 {
        return Err(GeometryError::NoAntiholomorphicPlane { dim });
    }
    let frame = p.default_frame();
    let mut attempt = 0u64;
    loop {
        let stream = tagged_stream(TAG_PLANE, index.wrapping_mul(1 << 8) + attempt);
        let mut rng = stream_rng(seed, stream);
        let x = frame.matrix() * rng::unit_vector(&mut rng, dim);
        let w = frame.matrix() * rng::gaussian_vector(&mut rng, dim);
        let jx = p.apply_j(&x);
        if let Ok(basis) = orthonormalize(&[x, jx, w], p, 1e-6) {
            return Ok(TwoPlane::new(basis[0].clone(), basis[2].clone()));
        }
        attempt += 1;
    }
}

/// The holomorphic plane `(x, Jx)` through a g-unit vector.
pub fn holomorphic_plane(p: &HermitianPoint, x: &DVector<f64>) -> TwoPlane {
    TwoPlane::new(x.clone(), p.apply_j(x))
}
