//! Builders for named curvature-type tensors and the pointwise curvature of
//! the model spaces: complex Euclidean, projective and hyperbolic space, the
//! round six-sphere with its octonionic almost complex structure, and direct
//! products.

use nalgebra::{DMatrix, DVector};

use crate::error::{GeometryError, Result};
use crate::hermitian::{gram_schmidt, HermitianPoint};
use crate::invariants::contractions;
use crate::octonion::cross7_vec;
use crate::rng::{self, stream_rng, tagged_stream};
use crate::tensor::FourTensor;
use crate::STRUCTURAL_TOL;

const TAG_S6_FRAME: u32 = 20;

/// `R1(x,y,z,u) = g(y,z) g(x,u) - g(x,z) g(y,u)`.
pub fn build_r1(p: &HermitianPoint) -> FourTensor {
    let g = p.g();
    FourTensor::from_fn(p.dim(), |i, j, k, l| {
        g[(j, k)] * g[(i, l)] - g[(i, k)] * g[(j, l)]
    })
}

/// `R2(x,y,z,u) = g(Jy,z) g(Jx,u) - g(Jx,z) g(Jy,u) - 2 g(Jx,y) g(Jz,u)`.
pub fn build_r2(p: &HermitianPoint) -> FourTensor {
    let w = p.kahler_form();
    FourTensor::from_fn(p.dim(), |i, j, k, l| {
        w[(j, k)] * w[(i, l)] - w[(i, k)] * w[(j, l)] - 2.0 * w[(i, j)] * w[(k, l)]
    })
}

/// The six-term tensor
///
/// ```text
/// psi(x,y,z,u) = g(Jy,z) S(Jx,u) - g(Jx,z) S(Jy,u) - 2 g(Jx,y) S(Jz,u)
///              + g(Jx,u) S(Jy,z) - g(Jy,u) S(Jx,z) - 2 g(Jz,u) S(Jx,y)
/// ```
///
/// for a symmetric bilinear form `S`.
pub fn build_psi(p: &HermitianPoint, s: &DMatrix<f64>) -> Result<FourTensor> {
    check_symmetric_form(p, s)?;
    let w = p.kahler_form();
    let a = p.j().transpose() * s;
    Ok(FourTensor::from_fn(p.dim(), |i, j, k, l| {
        w[(j, k)] * a[(i, l)] - w[(i, k)] * a[(j, l)] - 2.0 * w[(i, j)] * a[(k, l)]
            + w[(i, l)] * a[(j, k)]
            - w[(j, l)] * a[(i, k)]
            - 2.0 * w[(k, l)] * a[(i, j)]
    }))
}

pub(crate) fn check_symmetric_form(p: &HermitianPoint, s: &DMatrix<f64>) -> Result<()> {
    if s.nrows() != p.dim() || s.ncols() != p.dim() {
        return Err(GeometryError::DimensionMismatch {
            expected: p.dim(),
            found: if s.nrows() != p.dim() {
                s.nrows()
            } else {
                s.ncols()
            },
        });
    }
    let defect = (s - s.transpose()).amax();
    if defect > STRUCTURAL_TOL * s.amax().max(1.0) {
        return Err(GeometryError::NotSymmetric { defect });
    }
    Ok(())
}

/// Curvature of the complex space form of constant holomorphic sectional
/// curvature `c`: `(c/4)(R1 + R2)`. `c = 0` is flat `C^n`, `c > 0` models
/// `CP^n` and `c < 0` models `CD^n`.
pub fn kahler_space_form(p: &HermitianPoint, c: f64) -> FourTensor {
    (build_r1(p) + build_r2(p)) * (c / 4.0)
}

/// Tangent space of the unit six-sphere at `base`, expressed in a seeded
/// orthonormal frame, with `J v = base × v`.
#[derive(Debug, Clone, PartialEq)]
pub struct S6Tangent {
    pub base: DVector<f64>,
    /// `7 x 6` matrix whose columns are the tangent frame in `R^7`.
    pub frame: DMatrix<f64>,
    pub point: HermitianPoint,
}

impl S6Tangent {
    /// Ambient `R^7` vector of frame coordinates `v`.
    pub fn to_ambient(&self, v: &DVector<f64>) -> DVector<f64> {
        &self.frame * v
    }

    /// Frame coordinates of an ambient vector (its tangential part).
    pub fn to_frame(&self, v: &DVector<f64>) -> DVector<f64> {
        self.frame.transpose() * v
    }
}

/// Orthonormal basis of the orthogonal complement of the unit vector `base`
/// in `R^7`, obtained by seeded Gram–Schmidt.
pub fn s6_frame(base: &DVector<f64>, frame_seed: u64) -> DMatrix<f64> {
    let mut attempt = 0u64;
    loop {
        let mut rng = stream_rng(frame_seed, tagged_stream(TAG_S6_FRAME, attempt));
        let mut raw = vec![base.clone()];
        raw.extend((0..6).map(|_| rng::gaussian_vector(&mut rng, 7)));
        if let Ok(basis) = gram_schmidt(&raw, |a, b| a.dot(b), 1e-6) {
            return DMatrix::from_columns(&basis[1..]);
        }
        attempt += 1;
    }
}

/// Pointwise almost Hermitian structure of the nearly Kähler six-sphere.
pub fn s6_point(base: &DVector<f64>, frame_seed: u64) -> Result<S6Tangent> {
    if base.len() != 7 {
        return Err(GeometryError::DimensionMismatch {
            expected: 7,
            found: base.len(),
        });
    }
    let norm = base.norm();
    if (norm - 1.0).abs() > STRUCTURAL_TOL {
        return Err(GeometryError::NotUnit { norm });
    }
    let frame = s6_frame(base, frame_seed);
    let j = DMatrix::from_fn(6, 6, |a, b| {
        let image = cross7_vec(base, &frame.column(b).into_owned());
        frame.column(a).dot(&image)
    });
    let point = HermitianPoint::new(DMatrix::identity(6, 6), j)?;
    Ok(S6Tangent {
        base: base.clone(),
        frame,
        point,
    })
}

/// Curvature of the round unit six-sphere: `R1` in the tangent frame.
pub fn s6_curvature(p: &HermitianPoint) -> Result<FourTensor> {
    if p.dim() != 6 {
        return Err(GeometryError::InvalidDimension(format!(
            "six-sphere curvature needs dimension 6, got {}",
            p.dim()
        )));
    }
    Ok(build_r1(p))
}

/// One factor of a product, placed at coordinates `offset..offset + dim`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductFactor {
    pub point: HermitianPoint,
    pub tensor: FourTensor,
    /// `lambda` when the factor's Ricci tensor is `lambda g`.
    pub einstein: Option<f64>,
    pub offset: usize,
}

impl ProductFactor {
    pub fn range(&self) -> std::ops::Range<usize> {
        self.offset..self.offset + self.point.dim()
    }
}

/// A locally reducible structure `M_1 × ... × M_k` at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductSpec {
    pub factors: Vec<ProductFactor>,
    pub point: HermitianPoint,
    pub tensor: FourTensor,
}

impl ProductSpec {
    /// Index of the factor supporting `v`, if it lies in exactly one.
    pub fn factor_of(&self, v: &DVector<f64>, tol: f64) -> Option<usize> {
        let scale = v.amax().max(f64::MIN_POSITIVE);
        let mut found = None;
        for (idx, f) in self.factors.iter().enumerate() {
            let inside = f.range().any(|i| v[i].abs() > tol * scale);
            if inside {
                if found.is_some() {
                    return None;
                }
                found = Some(idx);
            }
        }
        found
    }
}

/// Direct sum of factor structures: block-diagonal `g` and `J`, and a
/// curvature tensor whose components mixing distinct factors vanish.
pub fn product_curvature(factors: &[(HermitianPoint, FourTensor)]) -> Result<ProductSpec> {
    if factors.len() < 2 {
        return Err(GeometryError::ProductTooSmall(factors.len()));
    }
    for (p, t) in factors {
        if p.dim() != t.dim() {
            return Err(GeometryError::DimensionMismatch {
                expected: p.dim(),
                found: t.dim(),
            });
        }
    }
    let total: usize = factors.iter().map(|(p, _)| p.dim()).sum();
    let mut g = DMatrix::zeros(total, total);
    let mut j = DMatrix::zeros(total, total);
    let mut tensor: Option<FourTensor> = None;
    let mut out = Vec::with_capacity(factors.len());
    let mut offset = 0;
    for (p, t) in factors {
        let d = p.dim();
        g.view_mut((offset, offset), (d, d)).copy_from(p.g());
        j.view_mut((offset, offset), (d, d)).copy_from(p.j());
        tensor = Some(match tensor {
            None => t.clone(),
            Some(acc) => acc.direct_sum(t),
        });
        let ricci = contractions(t, p)?;
        let lambda = ricci.s[(0, 0)] / p.g()[(0, 0)];
        let einstein = ((&ricci.s - p.g() * lambda).amax()
            <= STRUCTURAL_TOL * (1.0 + ricci.s.amax()))
        .then_some(lambda);
        out.push(ProductFactor {
            point: p.clone(),
            tensor: t.clone(),
            einstein,
            offset,
        });
        offset += d;
    }
    Ok(ProductSpec {
        factors: out,
        point: HermitianPoint::new(g, j)?,
        tensor: tensor.expect("at least two factors"),
    })
}

/// `CP^{n1}(c) × CP^{n2}(c)` (or the hyperbolic analogues for `c < 0`) with
/// standard factor structures.
pub fn space_form_product(dims: &[(usize, f64)]) -> Result<ProductSpec> {
    let factors = dims
        .iter()
        .map(|&(n, c)| {
            let p = HermitianPoint::standard(n)?;
            let t = kahler_space_form(&p, c);
            Ok((p, t))
        })
        .collect::<Result<Vec<_>>>()?;
    product_curvature(&factors)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hermitian::{make_standard_point, sample_antiholomorphic_plane_indexed};
    use crate::invariants::symmetry_defects;

    fn e(dim: usize, i: usize) -> DVector<f64> {
        DVector::from_fn(dim, |k, _| if k == i { 1.0 } else { 0.0 })
    }

    #[test]
    fn r1_examples() {
        let p = make_standard_point(2).unwrap();
        let r1 = build_r1(&p);
        assert_eq!(r1.eval(&e(4, 0), &e(4, 1), &e(4, 1), &e(4, 0)), 1.0);
        let x = p.random_unit_vector(1, 0);
        let z = p.random_unit_vector(1, 1);
        let u = p.random_unit_vector(1, 2);
        assert!(r1.eval(&x, &x, &z, &u).abs() < 1e-15);
        for s in 0..50 {
            let plane = sample_antiholomorphic_plane_indexed(&p, 2, s).unwrap();
            let k = r1.eval(&plane.x, &plane.y, &plane.y, &plane.x);
            assert!((k - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn r2_examples() {
        let p = make_standard_point(2).unwrap();
        let r2 = build_r2(&p);
        for s in 0..20 {
            let x = p.random_unit_vector(9, s);
            let jx = p.apply_j(&x);
            assert!((r2.eval(&x, &jx, &jx, &x) - 3.0).abs() < 1e-13);
            let plane = sample_antiholomorphic_plane_indexed(&p, 9, s).unwrap();
            assert!(r2.eval(&plane.x, &plane.y, &plane.y, &plane.x).abs() < 1e-14);
        }
        assert_eq!(r2.eval(&e(4, 0), &e(4, 2), &e(4, 2), &e(4, 0)), 0.0);
    }

    #[test]
    fn psi_examples() {
        let p = make_standard_point(3).unwrap();
        let lambda = 2.5;
        let psi = build_psi(&p, &(p.g() * lambda)).unwrap();
        assert!(psi.max_abs_diff(&(build_r2(&p) * (2.0 * lambda))) < 1e-14);
        let zero = build_psi(&p, &DMatrix::zeros(6, 6)).unwrap();
        assert_eq!(zero.max_abs(), 0.0);

        // Antisymmetry in the first pair needs S(Jx, Jy) = S(x, y), which a
        // Ricci tensor of a J-invariant curvature tensor always has.
        let raw = DMatrix::from_fn(6, 6, |i, j| ((3 * i + 5 * j) % 7) as f64 - 3.0);
        let s = &raw + raw.transpose();
        let s_inv = (&s + p.j().transpose() * &s * p.j()) * 0.5;
        let psi = build_psi(&p, &s_inv).unwrap();
        let general = build_psi(&p, &s).unwrap();
        let mut general_defect: f64 = 0.0;
        for k in 0..20 {
            let v: Vec<_> = (0..4).map(|i| p.random_unit_vector(k, i)).collect();
            let a = psi.eval(&v[0], &v[1], &v[2], &v[3]);
            let b = psi.eval(&v[1], &v[0], &v[2], &v[3]);
            assert!((a + b).abs() < 1e-12);
            let a = general.eval(&v[0], &v[1], &v[2], &v[3]);
            let b = general.eval(&v[1], &v[0], &v[2], &v[3]);
            general_defect = general_defect.max((a + b).abs());
        }
        assert!(general_defect > 1e-3);
        assert!(matches!(
            build_psi(&p, &raw),
            Err(GeometryError::NotSymmetric { .. })
        ));
    }

    #[test]
    fn kahler_space_form_examples() {
        let p = make_standard_point(3).unwrap();
        assert_eq!(kahler_space_form(&p, 0.0).max_abs(), 0.0);
        let t = kahler_space_form(&p, 4.0);
        let x = p.random_unit_vector(3, 0);
        let jx = p.apply_j(&x);
        assert!((t.eval(&x, &jx, &jx, &x) - 4.0).abs() < 1e-13);
        let plane = sample_antiholomorphic_plane_indexed(&p, 3, 1).unwrap();
        assert!((t.eval(&plane.x, &plane.y, &plane.y, &plane.x) - 1.0).abs() < 1e-13);
    }

    #[test]
    fn r1_r2_satisfy_lemma_symmetries() {
        for n in 2..=8 {
            let p = make_standard_point(n).unwrap();
            for t in [build_r1(&p), build_r2(&p)] {
                let (c1, c2, c3, c4) = symmetry_defects(&t, &p).unwrap();
                assert!(c1.max(c2).max(c3).max(c4) < 1e-12, "n = {n}");
            }
        }
    }

    #[test]
    fn s6_structure_is_almost_hermitian() {
        for seed in 0..10 {
            let base = rng::unit_vector(&mut stream_rng(seed, 99), 7);
            let t = s6_point(&base, seed).unwrap();
            let (jsq, compat) = t.point.structure_defects();
            assert!(jsq < 1e-12 && compat < 1e-12);
            for c in 0..6 {
                let image = cross7_vec(&base, &t.frame.column(c).into_owned());
                assert!(image.dot(&base).abs() < 1e-14);
            }
            let neg = s6_point(&(-&base), seed).unwrap();
            assert!(neg.point.structure_defects().0 < 1e-12);
        }
        let e1 = e(7, 0);
        let t = s6_point(&e1, 0).unwrap();
        assert!((t.point.j() * t.point.j() + DMatrix::<f64>::identity(6, 6)).amax() < 1e-12);
        assert!(matches!(
            s6_point(&(e1 * 2.0), 0),
            Err(GeometryError::NotUnit { .. })
        ));
    }

    #[test]
    fn s6_curvature_is_unit_constant() {
        let t = s6_point(&e(7, 3), 5).unwrap();
        let r = s6_curvature(&t.point).unwrap();
        for s in 0..20 {
            let plane = sample_antiholomorphic_plane_indexed(&t.point, 1, s).unwrap();
            assert!((r.eval(&plane.x, &plane.y, &plane.y, &plane.x) - 1.0).abs() < 1e-13);
        }
        assert!(s6_curvature(&make_standard_point(2).unwrap()).is_err());
    }

    #[test]
    fn product_examples() {
        let flat = |n| {
            let p = make_standard_point(n).unwrap();
            let t = FourTensor::zeros(2 * n);
            (p, t)
        };
        let spec = product_curvature(&[flat(1), flat(2)]).unwrap();
        assert_eq!(spec.tensor.max_abs(), 0.0);

        let spec = space_form_product(&[(1, 4.0), (1, 4.0)]).unwrap();
        assert_eq!(spec.factors[0].einstein, Some(4.0));
        let r = &spec.tensor;
        let (x1, x2) = (e(4, 0), e(4, 2));
        assert_eq!(r.eval(&x1, &x2, &x2, &x1), 0.0);
        let jx1 = spec.point.apply_j(&x1);
        let jx2 = spec.point.apply_j(&x2);
        let x = (&x1 + &x2) / 2f64.sqrt();
        let y = (&jx1 - &jx2) / 2f64.sqrt();
        assert!((r.eval(&x, &y, &y, &x) - 2.0).abs() < 1e-14);

        assert_eq!(
            product_curvature(&[flat(1)]),
            Err(GeometryError::ProductTooSmall(1))
        );
    }
}
