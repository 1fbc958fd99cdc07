//! Pointwise curvature invariants: Ricci-type contractions, symmetry
//! predicates, the curvature decomposition for constant antiholomorphic
//! sectional curvature, and the model classifier.
//!
//! Contraction conventions, for a g-orthonormal frame `e_1..e_{2n}`:
//!
//! ```text
//! S(y,z)  = sum_i R(e_i, y, z, e_i)
//! S'(y,z) = sum_i R(e_i, y, Jz, Je_i)
//! tau = tr S,  tau' = tr S'
//! ```
//!
//! With these, the unit sphere tensor `R1` in dimension 6 has `S = 5g`,
//! `S' = g`, and the complex space forms satisfy `tau = tau'`.

mod classify;
mod range;

pub use classify::{classify, ClassLabel, ModelClass};
pub use range::{antiholo_range, AntiholoRange};

use nalgebra::{DMatrix, DVector};

use crate::constructors::{build_psi, build_r1, build_r2, check_symmetric_form, ProductSpec};
use crate::error::{GeometryError, Result};
use crate::hermitian::{sample_antiholomorphic_plane_indexed, Frame, HermitianPoint, TwoPlane};
use crate::tensor::FourTensor;
use crate::STRUCTURAL_TOL;

/// Sampling effort for searches over planes and unit vectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    pub samples: usize,
    pub refine_steps: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Self {
            samples: 500,
            refine_steps: 50,
        }
    }
}

fn check_dims(r: &FourTensor, p: &HermitianPoint) -> Result<()> {
    if r.dim() != p.dim() {
        return Err(GeometryError::DimensionMismatch {
            expected: p.dim(),
            found: r.dim(),
        });
    }
    Ok(())
}

/// Sectional curvature `K = R(x, y, y, x)` of an orthonormal plane.
pub fn sectional(r: &FourTensor, p: &HermitianPoint, plane: &TwoPlane) -> Result<f64> {
    check_dims(r, p)?;
    plane.check(p)?;
    Ok(r.eval(&plane.x, &plane.y, &plane.y, &plane.x))
}

/// Ricci-type contractions of a (0,4) tensor.
#[derive(Debug, Clone, PartialEq)]
pub struct RicciData {
    pub s: DMatrix<f64>,
    pub s_star: DMatrix<f64>,
    pub tau: f64,
    pub tau_star: f64,
}

pub fn contractions(r: &FourTensor, p: &HermitianPoint) -> Result<RicciData> {
    contractions_in_frame(r, p, &p.default_frame())
}

/// Contractions summed over the given orthonormal frame.
pub fn contractions_in_frame(
    r: &FourTensor,
    p: &HermitianPoint,
    frame: &Frame,
) -> Result<RicciData> {
    check_dims(r, p)?;
    let d = p.dim();
    let f = frame.matrix();
    if f.nrows() != d || f.ncols() != d {
        return Err(GeometryError::DimensionMismatch {
            expected: d,
            found: f.ncols(),
        });
    }
    // sum_i e_i^a e_i^b
    let m = f * f.transpose();
    let n = &m * p.j().transpose();
    let mut s = DMatrix::zeros(d, d);
    let mut a_mat = DMatrix::zeros(d, d);
    for a in 0..d {
        for j in 0..d {
            for k in 0..d {
                let mut acc_s = 0.0;
                let mut acc_a = 0.0;
                for l in 0..d {
                    let v = r.get(a, j, k, l);
                    acc_s += m[(a, l)] * v;
                    acc_a += n[(a, l)] * v;
                }
                s[(j, k)] += acc_s;
                a_mat[(j, k)] += acc_a;
            }
        }
    }
    let s_star = a_mat * p.j();
    let tau = m.component_mul(&s).sum();
    let tau_star = m.component_mul(&s_star).sum();
    Ok(RicciData {
        s,
        s_star,
        tau,
        tau_star,
    })
}

/// Max-norm violations of
/// (1) antisymmetry in the first pair, (2) the first Bianchi identity,
/// (3) antisymmetry in the last pair, (4) invariance under `J` in all slots.
pub fn symmetry_defects(t: &FourTensor, p: &HermitianPoint) -> Result<(f64, f64, f64, f64)> {
    check_dims(t, p)?;
    let d = t.dim();
    let (mut c1, mut c2, mut c3) = (0.0f64, 0.0f64, 0.0f64);
    for i in 0..d {
        for j in 0..d {
            for k in 0..d {
                for l in 0..d {
                    let v = t.get(i, j, k, l);
                    c1 = c1.max((v + t.get(j, i, k, l)).abs());
                    c2 = c2.max((v + t.get(j, k, i, l) + t.get(k, i, j, l)).abs());
                    c3 = c3.max((v + t.get(i, j, l, k)).abs());
                }
            }
        }
    }
    let c4 = t.max_abs_diff(&t.j_transform(p.j()));
    Ok((c1, c2, c3, c4))
}

/// `max |R - R(J., J., J., J.)|`; zero for curvature data of an RK-manifold.
pub fn rk_defect(r: &FourTensor, p: &HermitianPoint) -> Result<f64> {
    check_dims(r, p)?;
    Ok(r.max_abs_diff(&r.j_transform(p.j())))
}

/// Result of testing the vanishing condition on holomorphic and
/// antiholomorphic planes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LemmaDefect {
    /// `max |T(x,y,y,x)|` over the sampled planes.
    pub condition5_defect: f64,
    pub tensor_norm: f64,
}

/// Evaluates `T(x,y,y,x)` on `plane_budget` holomorphic and `plane_budget`
/// antiholomorphic seeded planes. The symmetry hypotheses must hold within
/// `tol` (relative to `max(1, |T|)`); otherwise the call fails.
pub fn lemma_defect(
    t: &FourTensor,
    p: &HermitianPoint,
    plane_budget: usize,
    seed: u64,
    tol: f64,
) -> Result<LemmaDefect> {
    let (c1, c2, c3, c4) = symmetry_defects(t, p)?;
    let tensor_norm = t.max_abs();
    if c1.max(c2).max(c3).max(c4) > tol * tensor_norm.max(1.0) {
        return Err(GeometryError::LemmaHypothesis { c1, c2, c3, c4 });
    }
    let mut worst = 0.0f64;
    for i in 0..plane_budget as u64 {
        let x = p.random_unit_vector(seed, i);
        let jx = p.apply_j(&x);
        worst = worst.max(t.eval(&x, &jx, &jx, &x).abs());
        if p.dim() >= 4 {
            let plane = sample_antiholomorphic_plane_indexed(p, seed, i)?;
            worst = worst.max(t.eval(&plane.x, &plane.y, &plane.y, &plane.x).abs());
        }
    }
    Ok(LemmaDefect {
        condition5_defect: worst,
        tensor_norm,
    })
}

/// `(1/6) psi(S) + nu R1 - ((2n-1)/3) nu R2`.
pub fn reconstruct_r(s: &DMatrix<f64>, nu: f64, p: &HermitianPoint) -> Result<FourTensor> {
    check_symmetric_form(p, s)?;
    if p.dim() < 4 {
        return Err(GeometryError::InvalidDimension(format!(
            "curvature reconstruction needs dimension >= 4, got {}",
            p.dim()
        )));
    }
    let n = p.n() as f64;
    let psi = build_psi(p, s)?;
    Ok(psi * (1.0 / 6.0) + build_r1(p) * nu - build_r2(p) * ((2.0 * n - 1.0) / 3.0 * nu))
}

/// `((2n+1) tau - 3 tau') / (8 n (n^2 - 1))`.
pub fn nu_from_scalars(n: usize, tau: f64, tau_star: f64) -> f64 {
    let n = n as f64;
    ((2.0 * n + 1.0) * tau - 3.0 * tau_star) / (8.0 * n * (n * n - 1.0))
}

/// Defects of the pointwise decomposition for constant antiholomorphic
/// sectional curvature.
#[derive(Debug, Clone, PartialEq)]
pub struct Prop1Report {
    /// `nu` recovered from the scalar curvatures.
    pub nu_hat: f64,
    pub nu_min: f64,
    pub nu_max: f64,
    /// `max |R - reconstruct_r(S, nu_hat)|`.
    pub eq6_residual: f64,
    /// `max |3S' - (n+1)S - (3tau' - (n+1)tau) g / (2n)|`.
    pub eq7_defect: f64,
    /// `max |S(x,x) - R(x,Jx,Jx,x) - 2(n-1) nu_hat|` over sampled unit `x`.
    pub eq9_max_defect: f64,
    pub rk_defect: f64,
    pub bianchi_defect: f64,
    /// `max |S(reconstruct_r(S, nu_hat)) - S|`. Nonzero when `(S, nu_hat)`
    /// is not self-consistent; reported, never enforced.
    pub reconstruction_ricci_gap: f64,
}

pub fn prop1_report(
    r: &FourTensor,
    p: &HermitianPoint,
    budget: Budget,
    seed: u64,
) -> Result<Prop1Report> {
    check_dims(r, p)?;
    if p.dim() < 4 {
        return Err(GeometryError::InvalidDimension(format!(
            "the decomposition needs dimension >= 4, got {}",
            p.dim()
        )));
    }
    let n = p.n();
    let nf = n as f64;
    let ricci = contractions(r, p)?;
    let nu_hat = nu_from_scalars(n, ricci.tau, ricci.tau_star);
    let range = antiholo_range(r, p, budget.samples, budget.refine_steps, seed)?;

    // S is symmetric for tensors with pair symmetry; symmetrise so that
    // arbitrary input still yields a report.
    let s_sym = (&ricci.s + ricci.s.transpose()) * 0.5;
    let rebuilt = reconstruct_r(&s_sym, nu_hat, p)?;
    let eq6_residual = r.max_abs_diff(&rebuilt);
    let rebuilt_ricci = contractions(&rebuilt, p)?;
    let reconstruction_ricci_gap = (&rebuilt_ricci.s - &s_sym).amax();

    let rhs = p.g() * ((3.0 * ricci.tau_star - (nf + 1.0) * ricci.tau) / (2.0 * nf));
    let eq7_defect = (&ricci.s_star * 3.0 - &ricci.s * (nf + 1.0) - rhs).amax();

    let eq9 = |x: &DVector<f64>| {
        let jx = p.apply_j(x);
        let sxx = x.dot(&(&ricci.s * x));
        (sxx - r.eval(x, &jx, &jx, x) - 2.0 * (nf - 1.0) * nu_hat).abs()
    };
    let frame = p.default_frame();
    let mut eq9_max_defect = (0..frame.len())
        .map(|i| eq9(&frame.vector(i)))
        .fold(0.0, f64::max);
    for i in 0..budget.samples as u64 {
        eq9_max_defect = eq9_max_defect.max(eq9(&p.random_unit_vector(seed, i)));
    }

    let (_, bianchi_defect, _, rk) = symmetry_defects(r, p)?;
    Ok(Prop1Report {
        nu_hat,
        nu_min: range.nu_min,
        nu_max: range.nu_max,
        eq6_residual,
        eq7_defect,
        eq9_max_defect,
        rk_defect: rk,
        bianchi_defect,
        reconstruction_ricci_gap,
    })
}

/// `S(X,X) + S(Y,Y)` for unit vectors lying in distinct factors of a product.
pub fn eq13_value(spec: &ProductSpec, x: &DVector<f64>, y: &DVector<f64>) -> Result<f64> {
    let p = &spec.point;
    for v in [x, y] {
        if v.len() != p.dim() {
            return Err(GeometryError::DimensionMismatch {
                expected: p.dim(),
                found: v.len(),
            });
        }
        let norm = p.norm(v);
        if (norm - 1.0).abs() > STRUCTURAL_TOL {
            return Err(GeometryError::NotUnit { norm });
        }
    }
    match (
        spec.factor_of(x, STRUCTURAL_TOL),
        spec.factor_of(y, STRUCTURAL_TOL),
    ) {
        (Some(a), Some(b)) if a != b => {}
        _ => return Err(GeometryError::NotInDistinctFactors),
    }
    let ricci = contractions(&spec.tensor, p)?;
    Ok(x.dot(&(&ricci.s * x)) + y.dot(&(&ricci.s * y)))
}
