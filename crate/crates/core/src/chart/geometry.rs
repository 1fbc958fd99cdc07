use nalgebra::{DMatrix, DVector};

use crate::error::{GeometryError, Result};
use crate::hermitian::HermitianPoint;
use crate::invariants::{contractions, RicciData};
use crate::jet::{Jet, JetMatrix};
use crate::tensor::FourTensor;

use super::{Chart, ChartFields};

/// `Gamma^k_ij` in a coordinate basis.
#[derive(Debug, Clone, PartialEq)]
pub struct Christoffels {
    dim: usize,
    data: Vec<f64>,
}

impl Christoffels {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![0.0; dim.pow(3)],
        }
    }

    pub(crate) fn from_vec(dim: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), dim.pow(3));
        Self { dim, data }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `Gamma^k_ij`.
    pub fn get(&self, k: usize, i: usize, j: usize) -> f64 {
        self.data[(k * self.dim + i) * self.dim + j]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    /// `max |Gamma^k_ij - Gamma^k_ji|`.
    pub fn asymmetry(&self) -> f64 {
        let d = self.dim;
        let mut worst: f64 = 0.0;
        for k in 0..d {
            for i in 0..d {
                for j in 0..d {
                    worst = worst.max((self.get(k, i, j) - self.get(k, j, i)).abs());
                }
            }
        }
        worst
    }
}

/// How the local derivatives were obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Route {
    /// Exact Taylor jets supplied by the chart.
    Analytic,
    /// Nested central differences of metric and `J` values.
    FiniteDifference,
    /// Extrinsic formulas for the round six-sphere.
    Embedded,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DerivativeMode {
    /// Jets when the chart has them, differences otherwise.
    Auto,
    /// Fail with [`GeometryError::DerivativeUnavailable`] unless jets exist.
    RequireAnalytic,
    ForceFiniteDifference,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GeometryOptions {
    pub mode: DerivativeMode,
    /// One Richardson step on every difference quotient.
    pub richardson: bool,
}

impl Default for GeometryOptions {
    fn default() -> Self {
        Self {
            mode: DerivativeMode::Auto,
            richardson: true,
        }
    }
}

impl GeometryOptions {
    pub fn finite_difference(richardson: bool) -> Self {
        Self {
            mode: DerivativeMode::ForceFiniteDifference,
            richardson,
        }
    }
}

/// Levi-Civita data at one point, in the coordinate basis of the chart (for
/// the embedded sphere: the seeded orthonormal tangent frame at the point).
#[derive(Debug, Clone, PartialEq)]
pub struct ChartGeometry {
    pub point: Vec<f64>,
    pub route: Route,
    /// `(g, J)` at the point.
    pub hermitian: HermitianPoint,
    pub christoffels: Christoffels,
    pub curvature: FourTensor,
    pub ricci: RicciData,
    pub grad_tau: DVector<f64>,
    pub grad_tau_star: DVector<f64>,
    /// `nabla_r[a] = nabla_{∂_a} R`.
    pub nabla_r: Vec<FourTensor>,
    /// `nabla_j[a][(p, k)] = (nabla_{∂_a} J)^p_k`.
    pub nabla_j: Vec<DMatrix<f64>>,
    pub nabla_s: Vec<DMatrix<f64>>,
    pub nabla_s_star: Vec<DMatrix<f64>>,
    /// Embedded sphere only: max difference between the Gauss-equation and
    /// Christoffel curvature tensors.
    pub gauss_route_defect: Option<f64>,
}

impl ChartGeometry {
    pub fn dim(&self) -> usize {
        self.hermitian.dim()
    }

    /// `nabla_X S` for a coordinate vector `x`.
    pub fn nabla_s_along(&self, x: &DVector<f64>) -> DMatrix<f64> {
        along(&self.nabla_s, x)
    }

    pub fn nabla_s_star_along(&self, x: &DVector<f64>) -> DMatrix<f64> {
        along(&self.nabla_s_star, x)
    }

    pub fn nabla_j_along(&self, x: &DVector<f64>) -> DMatrix<f64> {
        along(&self.nabla_j, x)
    }

    /// Sectional curvature of `span{x, y}` (any basis).
    pub fn sectional(&self, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        let p = &self.hermitian;
        let area = p.inner(x, x) * p.inner(y, y) - p.inner(x, y).powi(2);
        self.curvature.eval(x, y, y, x) / area
    }
}

fn along(fields: &[DMatrix<f64>], x: &DVector<f64>) -> DMatrix<f64> {
    let d = fields[0].nrows();
    let mut out = DMatrix::zeros(d, d);
    for (m, c) in fields.iter().zip(x.iter()) {
        out += m * *c;
    }
    out
}

/// Pointwise data produced by one of the derivative routes.
pub(super) struct Local {
    pub g: DMatrix<f64>,
    pub j: DMatrix<f64>,
    pub gamma: Christoffels,
    pub r: FourTensor,
    pub nabla_r: Vec<FourTensor>,
    pub nabla_j: Vec<DMatrix<f64>>,
    pub grad_tau: DVector<f64>,
    pub grad_tau_star: DVector<f64>,
}

/// Geometry with default options: exact jets when the chart has them.
pub fn geometry_at(chart: &Chart, u: &[f64], h: f64) -> Result<ChartGeometry> {
    geometry_at_with(chart, u, h, GeometryOptions::default())
}

pub fn geometry_at_with(
    chart: &Chart,
    u: &[f64],
    h: f64,
    opts: GeometryOptions,
) -> Result<ChartGeometry> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(GeometryError::Unsupported(format!(
            "step must be positive, got {h}"
        )));
    }
    match chart {
        Chart::EmbeddedSphere(s) => s.geometry(u, h),
        Chart::Parametric(fields) => {
            let fields = fields.as_ref();
            let analytic = match opts.mode {
                DerivativeMode::ForceFiniteDifference => None,
                DerivativeMode::Auto | DerivativeMode::RequireAnalytic => {
                    fields.domain().require_margin(u, 2.0 * h)?;
                    analytic_local(fields, u)?
                }
            };
            let (local, route) = match analytic {
                Some(local) => (local, Route::Analytic),
                None if opts.mode == DerivativeMode::RequireAnalytic => {
                    return Err(GeometryError::DerivativeUnavailable(3))
                }
                None => {
                    // Three nested central differences reach 3h from `u`.
                    fields.domain().require_margin(u, 3.0 * h)?;
                    (
                        fd_local(fields, u, h, opts.richardson)?,
                        Route::FiniteDifference,
                    )
                }
            };
            assemble(local, u.to_vec(), route, None)
        }
    }
}

pub(super) fn assemble(
    local: Local,
    point: Vec<f64>,
    route: Route,
    gauss_route_defect: Option<f64>,
) -> Result<ChartGeometry> {
    let hermitian = HermitianPoint::new(local.g, local.j)?;
    let ginv = hermitian
        .g()
        .clone()
        .try_inverse()
        .ok_or(GeometryError::NotPositiveDefinite)?;
    let ricci = contractions(&local.r, &hermitian)?;
    let j = hermitian.j();
    let nabla_s = local.nabla_r.iter().map(|t| ricci_of(&ginv, t)).collect();
    let nabla_s_star = local
        .nabla_r
        .iter()
        .zip(&local.nabla_j)
        .map(|(nr, nj)| {
            star_contraction(&ginv, nr, j, j)
                + star_contraction(&ginv, &local.r, nj, j)
                + star_contraction(&ginv, &local.r, j, nj)
        })
        .collect();
    Ok(ChartGeometry {
        point,
        route,
        hermitian,
        christoffels: local.gamma,
        curvature: local.r,
        ricci,
        grad_tau: local.grad_tau,
        grad_tau_star: local.grad_tau_star,
        nabla_r: local.nabla_r,
        nabla_j: local.nabla_j,
        nabla_s,
        nabla_s_star,
        gauss_route_defect,
    })
}

/// `S_jk = g^il T_ijkl`.
pub(super) fn ricci_of(ginv: &DMatrix<f64>, t: &FourTensor) -> DMatrix<f64> {
    let d = t.dim();
    DMatrix::from_fn(d, d, |j, k| {
        let mut acc = 0.0;
        for i in 0..d {
            for l in 0..d {
                acc += ginv[(i, l)] * t.get(i, j, k, l);
            }
        }
        acc
    })
}

/// `g^ib T_{i j m q} z[(m, k)] w[(q, b)]`; with `z = w = J` this is `S'`.
pub(super) fn star_contraction(
    ginv: &DMatrix<f64>,
    t: &FourTensor,
    z: &DMatrix<f64>,
    w: &DMatrix<f64>,
) -> DMatrix<f64> {
    let d = t.dim();
    // n[(i, q)] = g^ib w[(q, b)]
    let n = ginv * w.transpose();
    let mut c = DMatrix::zeros(d, d);
    for i in 0..d {
        for jj in 0..d {
            for m in 0..d {
                let mut acc = 0.0;
                for q in 0..d {
                    acc += t.get(i, jj, m, q) * n[(i, q)];
                }
                c[(jj, m)] += acc;
            }
        }
    }
    c * z
}

/// `(tau, tau')` from coordinate data.
pub(super) fn scalar_pair(ginv: &DMatrix<f64>, r: &FourTensor, j: &DMatrix<f64>) -> (f64, f64) {
    let s = ricci_of(ginv, r);
    let s_star = star_contraction(ginv, r, j, j);
    (
        ginv.component_mul(&s).sum(),
        ginv.component_mul(&s_star).sum(),
    )
}

fn gamma_index(d: usize, k: usize, i: usize, j: usize) -> usize {
    (k * d + i) * d + j
}

/// `Gamma^l_ij` from `g^{-1}` and `dg[c][(i, j)] = ∂_c g_ij`.
fn christoffel_from(ginv: &DMatrix<f64>, dg: &[DMatrix<f64>]) -> Vec<f64> {
    let d = ginv.nrows();
    let mut out = vec![0.0; d.pow(3)];
    for i in 0..d {
        for j in 0..d {
            for k in 0..d {
                let first = 0.5 * (dg[i][(j, k)] + dg[j][(i, k)] - dg[k][(i, j)]);
                for l in 0..d {
                    out[gamma_index(d, l, i, j)] += ginv[(l, k)] * first;
                }
            }
        }
    }
    out
}

/// `R_ijkl = g_lm (∂_i Γ^m_jk - ∂_j Γ^m_ik + Γ^m_ip Γ^p_jk - Γ^m_jp Γ^p_ik)`.
fn riemann_from(g: &DMatrix<f64>, gamma: &[f64], dgamma: &[Vec<f64>]) -> FourTensor {
    let d = g.nrows();
    let gi = |k, i, j| gamma[gamma_index(d, k, i, j)];
    let mut rm = vec![0.0; d.pow(4)];
    for m in 0..d {
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    let mut v =
                        dgamma[i][gamma_index(d, m, j, k)] - dgamma[j][gamma_index(d, m, i, k)];
                    for p in 0..d {
                        v += gi(m, i, p) * gi(p, j, k) - gi(m, j, p) * gi(p, i, k);
                    }
                    rm[((m * d + i) * d + j) * d + k] = v;
                }
            }
        }
    }
    FourTensor::from_fn(d, |i, j, k, l| {
        (0..d)
            .map(|m| g[(l, m)] * rm[((m * d + i) * d + j) * d + k])
            .sum()
    })
}

/// `nabla_a R` from partial derivatives.
pub(super) fn covariant_r(
    gamma: &Christoffels,
    r: &FourTensor,
    dr: &[FourTensor],
) -> Vec<FourTensor> {
    let d = r.dim();
    (0..d)
        .map(|a| {
            FourTensor::from_fn(d, |i, j, k, l| {
                let mut v = dr[a].get(i, j, k, l);
                for m in 0..d {
                    v -= gamma.get(m, a, i) * r.get(m, j, k, l)
                        + gamma.get(m, a, j) * r.get(i, m, k, l)
                        + gamma.get(m, a, k) * r.get(i, j, m, l)
                        + gamma.get(m, a, l) * r.get(i, j, k, m);
                }
                v
            })
        })
        .collect()
}

/// `(nabla_a J)^p_k = ∂_a J^p_k + Γ^p_am J^m_k - Γ^m_ak J^p_m`.
pub(super) fn covariant_j(
    gamma: &Christoffels,
    j: &DMatrix<f64>,
    dj: &[DMatrix<f64>],
) -> Vec<DMatrix<f64>> {
    let d = j.nrows();
    (0..d)
        .map(|a| {
            let ga = DMatrix::from_fn(d, d, |p, m| gamma.get(p, a, m));
            &dj[a] + &ga * j - j * &ga
        })
        .collect()
}

fn analytic_local(fields: &dyn ChartFields, u: &[f64]) -> Result<Option<Local>> {
    let (Some(g3), Some(j1)) = (fields.metric_jet(u, 3), fields.complex_structure_jet(u, 1)) else {
        return Ok(None);
    };
    let d = fields.dim();
    if g3.values().cholesky().is_none() {
        return Err(GeometryError::NotPositiveDefinite);
    }
    let ginv2 = g3
        .truncate(2)
        .inverse()
        .ok_or(GeometryError::NotPositiveDefinite)?;

    // Christoffel symbols of the first kind, then raised: order-2 jets.
    let dg: Vec<Vec<Jet>> = (0..d)
        .map(|c| {
            (0..d * d)
                .map(|e| g3.get(e / d, e % d).partial(c))
                .collect()
        })
        .collect();
    let mut gamma: Vec<Jet> = Vec::with_capacity(d.pow(3));
    let mut first = vec![Vec::with_capacity(d); d * d];
    for i in 0..d {
        for j in 0..d {
            for k in 0..d {
                let sum = &(&dg[i][j * d + k] + &dg[j][i * d + k]) - &dg[k][i * d + j];
                first[i * d + j].push(sum.scale(0.5));
            }
        }
    }
    for l in 0..d {
        for i in 0..d {
            for j in 0..d {
                let mut acc = ginv2.get(0, 0).lift(0.0);
                for k in 0..d {
                    acc = &acc + &(ginv2.get(l, k) * &first[i * d + j][k]);
                }
                gamma.push(acc);
            }
        }
    }

    // Curvature as order-1 jets, so that its first derivatives are exact.
    let gamma1: Vec<Jet> = gamma.iter().map(|x| x.truncate(1)).collect();
    let dgamma: Vec<Vec<Jet>> = (0..d)
        .map(|a| gamma.iter().map(|x| x.partial(a)).collect())
        .collect();
    let mut rm: Vec<Jet> = Vec::with_capacity(d.pow(4));
    for m in 0..d {
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    let mut v =
                        &dgamma[i][gamma_index(d, m, j, k)] - &dgamma[j][gamma_index(d, m, i, k)];
                    for p in 0..d {
                        let t1 =
                            &gamma1[gamma_index(d, m, i, p)] * &gamma1[gamma_index(d, p, j, k)];
                        let t2 =
                            &gamma1[gamma_index(d, m, j, p)] * &gamma1[gamma_index(d, p, i, k)];
                        v = &v + &(&t1 - &t2);
                    }
                    rm.push(v);
                }
            }
        }
    }
    let g1 = g3.truncate(1);
    let mut r_jets: Vec<Jet> = Vec::with_capacity(d.pow(4));
    for i in 0..d {
        for j in 0..d {
            for k in 0..d {
                for l in 0..d {
                    let mut acc = g1.get(0, 0).lift(0.0);
                    for m in 0..d {
                        acc = &acc + &(g1.get(l, m) * &rm[((m * d + i) * d + j) * d + k]);
                    }
                    r_jets.push(acc);
                }
            }
        }
    }

    let ginv1 = ginv2.truncate(1);
    let (tau, tau_star) = scalar_pair_jets(&ginv1, &r_jets, &j1.truncate(1), d);

    let r = FourTensor::from_vec(d, r_jets.iter().map(Jet::value).collect())?;
    let dr: Vec<FourTensor> = (0..d)
        .map(|a| FourTensor::from_vec(d, r_jets.iter().map(|x| x.d1(a)).collect()))
        .collect::<Result<_>>()?;
    let gamma = Christoffels::from_vec(d, gamma.iter().map(Jet::value).collect());
    let j = j1.values();
    let dj: Vec<DMatrix<f64>> = (0..d)
        .map(|a| DMatrix::from_fn(d, d, |p, k| j1.get(p, k).d1(a)))
        .collect();
    let nabla_r = covariant_r(&gamma, &r, &dr);
    let nabla_j = covariant_j(&gamma, &j, &dj);
    Ok(Some(Local {
        g: g3.values(),
        j,
        gamma,
        r,
        nabla_r,
        nabla_j,
        grad_tau: DVector::from_fn(d, |a, _| tau.d1(a)),
        grad_tau_star: DVector::from_fn(d, |a, _| tau_star.d1(a)),
    }))
}

/// Scalar curvatures as jets, contracted independently of `nabla R`.
fn scalar_pair_jets(ginv: &JetMatrix, r: &[Jet], j: &JetMatrix, d: usize) -> (Jet, Jet) {
    let zero = ginv.get(0, 0).lift(0.0);
    let rr = |i: usize, jj: usize, k: usize, l: usize| &r[((i * d + jj) * d + k) * d + l];
    let mut tau = zero.clone();
    for jj in 0..d {
        for k in 0..d {
            let mut s = zero.clone();
            for i in 0..d {
                for l in 0..d {
                    s = &s + &(ginv.get(i, l) * rr(i, jj, k, l));
                }
            }
            tau = &tau + &(ginv.get(jj, k) * &s);
        }
    }
    // n^{iq} = g^ib J^q_b
    let n: Vec<Jet> = (0..d * d)
        .map(|e| {
            let (i, q) = (e / d, e % d);
            let mut acc = zero.clone();
            for b in 0..d {
                acc = &acc + &(ginv.get(i, b) * j.get(q, b));
            }
            acc
        })
        .collect();
    let mut tau_star = zero.clone();
    for jj in 0..d {
        let c: Vec<Jet> = (0..d)
            .map(|m| {
                let mut acc = zero.clone();
                for i in 0..d {
                    for q in 0..d {
                        acc = &acc + &(rr(i, jj, m, q) * &n[i * d + q]);
                    }
                }
                acc
            })
            .collect();
        for k in 0..d {
            let mut s = zero.clone();
            for m in 0..d {
                s = &s + &(&c[m] * j.get(m, k));
            }
            tau_star = &tau_star + &(ginv.get(jj, k) * &s);
        }
    }
    (tau, tau_star)
}

fn checked_metric(fields: &dyn ChartFields, u: &[f64]) -> Result<DMatrix<f64>> {
    let g = fields.metric(u);
    if g.clone().cholesky().is_none() {
        return Err(GeometryError::NotPositiveDefinite);
    }
    Ok(g)
}

/// Central difference of a vector-valued map along `∂_a`, optionally with one
/// Richardson step `(4 D(h/2) - D(h)) / 3`.
fn central<F>(f: &F, u: &[f64], a: usize, h: f64, richardson: bool) -> Result<Vec<f64>>
where
    F: Fn(&[f64]) -> Result<Vec<f64>>,
{
    let quotient = |step: f64| -> Result<Vec<f64>> {
        let mut up = u.to_vec();
        let mut dn = u.to_vec();
        up[a] += step;
        dn[a] -= step;
        let fp = f(&up)?;
        let fm = f(&dn)?;
        Ok(fp
            .iter()
            .zip(&fm)
            .map(|(p, m)| (p - m) / (2.0 * step))
            .collect())
    };
    let coarse = quotient(h)?;
    if !richardson {
        return Ok(coarse);
    }
    let fine = quotient(0.5 * h)?;
    Ok(fine
        .iter()
        .zip(&coarse)
        .map(|(f, c)| (4.0 * f - c) / 3.0)
        .collect())
}

/// Nested central differences: `g` gives `Gamma`, `Gamma` gives `R`, and `R`
/// gives `∂R`. Each level is a genuine difference quotient of the level below,
/// so discretisation errors do not cancel in the differential identities.
fn fd_local(fields: &dyn ChartFields, u: &[f64], h: f64, richardson: bool) -> Result<Local> {
    let d = fields.dim();
    let metric =
        |v: &[f64]| -> Result<Vec<f64>> { Ok(checked_metric(fields, v)?.as_slice().to_vec()) };
    let gamma_at = |v: &[f64]| -> Result<Vec<f64>> {
        let g = checked_metric(fields, v)?;
        let ginv = g.try_inverse().ok_or(GeometryError::NotPositiveDefinite)?;
        let dg = (0..d)
            .map(|c| {
                Ok(DMatrix::from_column_slice(
                    d,
                    d,
                    &central(&metric, v, c, h, richardson)?,
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(christoffel_from(&ginv, &dg))
    };
    // Curvature followed by (tau, tau').
    let curvature_at = |v: &[f64]| -> Result<Vec<f64>> {
        let g = checked_metric(fields, v)?;
        let ginv = g
            .clone()
            .try_inverse()
            .ok_or(GeometryError::NotPositiveDefinite)?;
        let gamma = gamma_at(v)?;
        let dgamma = (0..d)
            .map(|a| central(&gamma_at, v, a, h, richardson))
            .collect::<Result<Vec<_>>>()?;
        let r = riemann_from(&g, &gamma, &dgamma);
        let (tau, tau_star) = scalar_pair(&ginv, &r, &fields.complex_structure(v));
        let mut packed = r.as_slice().to_vec();
        packed.push(tau);
        packed.push(tau_star);
        Ok(packed)
    };
    let structure =
        |v: &[f64]| -> Result<Vec<f64>> { Ok(fields.complex_structure(v).as_slice().to_vec()) };

    let g = checked_metric(fields, u)?;
    let gamma = Christoffels::from_vec(d, gamma_at(u)?);
    let packed = curvature_at(u)?;
    let n4 = d.pow(4);
    let r = FourTensor::from_vec(d, packed[..n4].to_vec())?;
    let mut dr = Vec::with_capacity(d);
    let mut grad_tau = DVector::zeros(d);
    let mut grad_tau_star = DVector::zeros(d);
    for a in 0..d {
        let dp = central(&curvature_at, u, a, h, richardson)?;
        grad_tau[a] = dp[n4];
        grad_tau_star[a] = dp[n4 + 1];
        dr.push(FourTensor::from_vec(d, dp[..n4].to_vec())?);
    }
    let j = fields.complex_structure(u);
    let dj = (0..d)
        .map(|a| {
            Ok(DMatrix::from_column_slice(
                d,
                d,
                &central(&structure, u, a, h, richardson)?,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    let nabla_r = covariant_r(&gamma, &r, &dr);
    let nabla_j = covariant_j(&gamma, &j, &dj);
    Ok(Local {
        g,
        j,
        gamma,
        r,
        nabla_r,
        nabla_j,
        grad_tau,
        grad_tau_star,
    })
}
