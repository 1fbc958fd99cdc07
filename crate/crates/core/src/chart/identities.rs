use nalgebra::{DMatrix, DVector};
use rand::Rng;

use crate::error::{GeometryError, Result};
use crate::invariants::{antiholo_range, nu_from_scalars, Budget};
use crate::rng::{stream_rng, tagged_stream, unit_vector};

use super::geometry::{geometry_at_with, ChartGeometry, GeometryOptions};
use super::Chart;

const TAG_POINTS: u32 = 31;

/// Step used by [`schur_scan`]: small enough for the great-circle and margin
/// checks, large enough for third-order differences on charts without jets.
pub const SCHUR_STEP: f64 = 1e-2;

/// Defects of the contracted second Bianchi identities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GradRicciDefects {
    /// `max |sum_i (nabla_{E_i} R)(X,Y,Z,E_i) - (nabla_X S)(Y,Z) + (nabla_Y S)(X,Z)|`
    pub eq1_defect: f64,
    /// `max |sum_i (nabla_{E_i} S)(X,E_i) - X tau / 2|`
    pub eq2_defect: f64,
}

/// Max-norm defects of the differential identities over coordinate basis
/// arguments. All entries are non-negative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentityReport {
    pub eq1_defect: f64,
    pub eq2_defect: f64,
    /// `div S' = d tau' / 2`
    pub eq3_defect: f64,
    /// `d(tau - tau') = 0`
    pub eq4_defect: f64,
    /// `2 (nabla_X (S - S'))(Y,Z) = (S - S')((nabla_X J)Y, JZ) + (S - S')(JY, (nabla_X J)Z)`
    pub eq5_defect: f64,
    /// `2 (nabla_X S)(Y,Z) = S((nabla_X J)Y, JZ) + S(JY, (nabla_X J)Z)`
    pub eq10_defect: f64,
    /// `(nabla_X S)(Y,Z) + (nabla_{JX} S)(JY,Z) = 0`
    pub eq11_defect: f64,
    /// cyclic sum of `(nabla_X S)(Y,Z)` vanishes
    pub eq12_defect: f64,
    pub nk_defect: f64,
    pub kahler_defect: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NearlyKahlerDefect {
    /// `max_X |(nabla_X J) X|`
    pub nk: f64,
    /// `max_{X,Y} |(nabla_X J) Y|`
    pub kahler: f64,
    /// `max_{X,Y} |(nabla_X J) Y + (nabla_Y J) X|`
    pub skew: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SchurScan {
    /// `nu` from the scalar curvatures at each point.
    pub nu_values: Vec<f64>,
    /// `max - min` of `nu_values`.
    pub spread: f64,
    pub mean: f64,
    /// Largest `nu_max - nu_min` over the antiholomorphic planes at any point;
    /// `None` when the budget has no samples.
    pub range_width: Option<f64>,
}

fn divergence(geo: &ChartGeometry, fields: &[DMatrix<f64>], grad: &DVector<f64>) -> f64 {
    let d = geo.dim();
    let ginv = inverse_metric(geo);
    let mut worst: f64 = 0.0;
    for x in 0..d {
        let mut lhs = 0.0;
        for a in 0..d {
            for b in 0..d {
                lhs += ginv[(a, b)] * fields[a][(x, b)];
            }
        }
        worst = worst.max((lhs - 0.5 * grad[x]).abs());
    }
    worst
}

fn inverse_metric(geo: &ChartGeometry) -> DMatrix<f64> {
    geo.hermitian
        .g()
        .clone()
        .try_inverse()
        .expect("metric was validated as positive definite")
}

fn grad_ricci_from(geo: &ChartGeometry) -> GradRicciDefects {
    let d = geo.dim();
    let ginv = inverse_metric(geo);
    let mut eq1: f64 = 0.0;
    for x in 0..d {
        for y in 0..d {
            for z in 0..d {
                let mut lhs = 0.0;
                for a in 0..d {
                    for e in 0..d {
                        lhs += ginv[(a, e)] * geo.nabla_r[a].get(x, y, z, e);
                    }
                }
                let rhs = geo.nabla_s[x][(y, z)] - geo.nabla_s[y][(x, z)];
                eq1 = eq1.max((lhs - rhs).abs());
            }
        }
    }
    GradRicciDefects {
        eq1_defect: eq1,
        eq2_defect: divergence(geo, &geo.nabla_s, &geo.grad_tau),
    }
}

/// Defect of `2 (nabla_X B)(Y,Z) = B((nabla_X J)Y, JZ) + B(JY, (nabla_X J)Z)`.
fn j_derivative_rule(geo: &ChartGeometry, b: &DMatrix<f64>, nabla_b: &[DMatrix<f64>]) -> f64 {
    let j = geo.hermitian.j();
    nabla_b
        .iter()
        .zip(&geo.nabla_j)
        .map(|(nb, nj)| {
            let rhs = nj.transpose() * b * j + j.transpose() * b * nj;
            (nb * 2.0 - rhs).amax()
        })
        .fold(0.0, f64::max)
}

fn nk_from(geo: &ChartGeometry) -> NearlyKahlerDefect {
    let d = geo.dim();
    let p = &geo.hermitian;
    let mut out = NearlyKahlerDefect {
        nk: 0.0,
        kahler: 0.0,
        skew: 0.0,
    };
    for x in 0..d {
        for y in 0..d {
            let v = geo.nabla_j[x].column(y).into_owned();
            let w = geo.nabla_j[y].column(x).into_owned();
            out.kahler = out.kahler.max(p.norm(&v));
            out.skew = out.skew.max(p.norm(&(&v + &w)));
            if x == y {
                out.nk = out.nk.max(p.norm(&v));
            }
        }
    }
    out
}

/// All differential identity defects of already computed geometry.
pub fn identity_report(geo: &ChartGeometry) -> IdentityReport {
    let d = geo.dim();
    let j = geo.hermitian.j();
    let grad = grad_ricci_from(geo);
    let s = &geo.ricci.s;
    let gap = s - &geo.ricci.s_star;
    let nabla_gap: Vec<DMatrix<f64>> = geo
        .nabla_s
        .iter()
        .zip(&geo.nabla_s_star)
        .map(|(a, b)| a - b)
        .collect();

    let mut eq11: f64 = 0.0;
    let mut eq12: f64 = 0.0;
    for x in 0..d {
        let jx = j.column(x).into_owned();
        let turned = j.transpose() * geo.nabla_s_along(&jx);
        eq11 = eq11.max((&geo.nabla_s[x] + turned).amax());
        for y in 0..d {
            for z in 0..d {
                let cyclic =
                    geo.nabla_s[x][(y, z)] + geo.nabla_s[y][(z, x)] + geo.nabla_s[z][(x, y)];
                eq12 = eq12.max(cyclic.abs());
            }
        }
    }
    let nk = nk_from(geo);
    IdentityReport {
        eq1_defect: grad.eq1_defect,
        eq2_defect: grad.eq2_defect,
        eq3_defect: divergence(geo, &geo.nabla_s_star, &geo.grad_tau_star),
        eq4_defect: (&geo.grad_tau - &geo.grad_tau_star).amax(),
        eq5_defect: j_derivative_rule(geo, &gap, &nabla_gap),
        eq10_defect: j_derivative_rule(geo, s, &geo.nabla_s),
        eq11_defect: eq11,
        eq12_defect: eq12,
        nk_defect: nk.nk,
        kahler_defect: nk.kahler,
    }
}

pub fn grad_ricci_identities(chart: &Chart, u: &[f64], h: f64) -> Result<GradRicciDefects> {
    grad_ricci_identities_with(chart, u, h, GeometryOptions::default())
}

pub fn grad_ricci_identities_with(
    chart: &Chart,
    u: &[f64],
    h: f64,
    opts: GeometryOptions,
) -> Result<GradRicciDefects> {
    Ok(grad_ricci_from(&geometry_at_with(chart, u, h, opts)?))
}

pub fn nk_identities(chart: &Chart, u: &[f64], h: f64) -> Result<IdentityReport> {
    nk_identities_with(chart, u, h, GeometryOptions::default())
}

pub fn nk_identities_with(
    chart: &Chart,
    u: &[f64],
    h: f64,
    opts: GeometryOptions,
) -> Result<IdentityReport> {
    Ok(identity_report(&geometry_at_with(chart, u, h, opts)?))
}

pub fn nearly_kahler_defect(chart: &Chart, u: &[f64], h: f64) -> Result<NearlyKahlerDefect> {
    nearly_kahler_defect_with(chart, u, h, GeometryOptions::default())
}

pub fn nearly_kahler_defect_with(
    chart: &Chart,
    u: &[f64],
    h: f64,
    opts: GeometryOptions,
) -> Result<NearlyKahlerDefect> {
    Ok(nk_from(&geometry_at_with(chart, u, h, opts)?))
}

/// `nu` from the scalar curvatures at each point, with step [`SCHUR_STEP`].
pub fn schur_scan(
    chart: &Chart,
    points: &[Vec<f64>],
    budget: Budget,
    seed: u64,
) -> Result<SchurScan> {
    schur_scan_with(
        chart,
        points,
        budget,
        seed,
        SCHUR_STEP,
        GeometryOptions::default(),
    )
}

pub fn schur_scan_with(
    chart: &Chart,
    points: &[Vec<f64>],
    budget: Budget,
    seed: u64,
    h: f64,
    opts: GeometryOptions,
) -> Result<SchurScan> {
    if points.is_empty() {
        return Err(GeometryError::Unsupported(
            "schur scan needs at least one point".into(),
        ));
    }
    let n = chart.dim() / 2;
    if n < 2 {
        return Err(GeometryError::InvalidDimension(format!(
            "nu from scalar curvatures needs complex dimension >= 2, got {n}"
        )));
    }
    let mut nu_values = Vec::with_capacity(points.len());
    let mut range_width: Option<f64> = None;
    for u in points {
        let geo = geometry_at_with(chart, u, h, opts)?;
        nu_values.push(nu_from_scalars(n, geo.ricci.tau, geo.ricci.tau_star));
        if budget.samples > 0 {
            let range = antiholo_range(
                &geo.curvature,
                &geo.hermitian,
                budget.samples,
                budget.refine_steps,
                seed,
            )?;
            let width = range.nu_max - range.nu_min;
            range_width = Some(range_width.map_or(width, |w| w.max(width)));
        }
    }
    let max = nu_values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = nu_values.iter().copied().fold(f64::INFINITY, f64::min);
    let mean = nu_values.iter().sum::<f64>() / nu_values.len() as f64;
    Ok(SchurScan {
        nu_values,
        spread: max - min,
        mean,
        range_width,
    })
}

/// Seeded points of the chart: uniform in the domain box shrunk by `margin`,
/// or uniform on the sphere for the embedded chart.
pub fn seeded_points(chart: &Chart, count: usize, seed: u64, margin: f64) -> Result<Vec<Vec<f64>>> {
    match chart {
        Chart::EmbeddedSphere(_) => Ok((0..count as u64)
            .map(|i| {
                let mut rng = stream_rng(seed, tagged_stream(TAG_POINTS, i));
                unit_vector(&mut rng, 7).as_slice().to_vec()
            })
            .collect()),
        Chart::Parametric(fields) => {
            let domain = fields.domain();
            if domain
                .lower
                .iter()
                .zip(&domain.upper)
                .any(|(lo, hi)| hi - lo <= 2.0 * margin)
            {
                return Err(GeometryError::BoundaryProximity {
                    point: domain.lower.clone(),
                    margin,
                });
            }
            Ok((0..count as u64)
                .map(|i| {
                    let mut rng = stream_rng(seed, tagged_stream(TAG_POINTS, i));
                    domain
                        .lower
                        .iter()
                        .zip(&domain.upper)
                        .map(|(lo, hi)| {
                            let t: f64 = rng.random();
                            lo + margin + t * (hi - lo - 2.0 * margin)
                        })
                        .collect()
                })
                .collect())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chart::{PolynomialHermitianChart, SphereGraphChart};

    const BUDGET: Budget = Budget {
        samples: 20,
        refine_steps: 5,
    };

    #[test]
    fn flat_chart_is_trivial() {
        let chart = Chart::flat(2);
        let u = [0.1, 0.0, -0.2, 0.3];
        let g = grad_ricci_identities(&chart, &u, 1e-3).unwrap();
        assert_eq!((g.eq1_defect, g.eq2_defect), (0.0, 0.0));
        let r = nk_identities(&chart, &u, 1e-3).unwrap();
        for v in [
            r.eq1_defect,
            r.eq2_defect,
            r.eq3_defect,
            r.eq4_defect,
            r.eq5_defect,
            r.eq10_defect,
            r.eq11_defect,
            r.eq12_defect,
            r.nk_defect,
            r.kahler_defect,
        ] {
            assert_eq!(v, 0.0);
        }
        let nk = nearly_kahler_defect(&chart, &u, 1e-3).unwrap();
        assert_eq!((nk.nk, nk.kahler, nk.skew), (0.0, 0.0, 0.0));
        let pts = seeded_points(&chart, 4, 1, 0.1).unwrap();
        let scan = schur_scan(&chart, &pts, BUDGET, 2).unwrap();
        assert!(scan.nu_values.iter().all(|v| *v == 0.0));
        assert_eq!(scan.spread, 0.0);
    }

    #[test]
    fn polynomial_metrics_satisfy_contracted_bianchi() {
        for seed in 0..3 {
            let chart = Chart::parametric(PolynomialHermitianChart::new(2, 0.05, seed));
            for u in seeded_points(&chart, 3, seed, 0.1).unwrap() {
                let g = grad_ricci_identities(&chart, &u, 1e-3).unwrap();
                assert!(g.eq1_defect < 1e-10 && g.eq2_defect < 1e-10, "{g:?}");
            }
        }
    }

    #[test]
    fn polynomial_metric_is_genuinely_curved_and_non_kahler() {
        let chart = Chart::parametric(PolynomialHermitianChart::new(2, 0.05, 1));
        let geo = geometry_at_with(
            &chart,
            &[0.1, 0.2, 0.0, -0.1],
            1e-3,
            GeometryOptions::default(),
        )
        .unwrap();
        let nk = nk_from(&geo);
        assert!(nk.kahler > 1e-3);
        assert!(geo.nabla_r.iter().map(|t| t.max_abs()).fold(0.0, f64::max) > 1e-3);
        assert!(geo.grad_tau.amax() > 1e-3);
    }

    #[test]
    fn fubini_study_identities() {
        let chart = Chart::complex_space_form(3, 4.0);
        for u in seeded_points(&chart, 3, 7, 0.1).unwrap() {
            let r = nk_identities(&chart, &u, 1e-3).unwrap();
            for v in [
                r.eq1_defect,
                r.eq2_defect,
                r.eq3_defect,
                r.eq4_defect,
                r.eq5_defect,
                r.eq10_defect,
                r.eq11_defect,
                r.eq12_defect,
                r.nk_defect,
                r.kahler_defect,
            ] {
                assert!(v < 1e-9, "{r:?}");
            }
        }
    }

    #[test]
    fn sphere_is_strictly_nearly_kahler() {
        let chart = Chart::embedded_s6(1);
        for u in seeded_points(&chart, 4, 3, 0.0).unwrap() {
            let nk = nearly_kahler_defect(&chart, &u, 1e-3).unwrap();
            assert!(nk.nk < 1e-12 && nk.skew < 1e-12);
            assert!(nk.kahler > 0.1 && nk.kahler <= 1.0 + 1e-12);
            let r = nk_identities(&chart, &u, 1e-3).unwrap();
            assert!(r.eq4_defect < 1e-9 && r.eq5_defect < 1e-9 && r.eq10_defect < 1e-9);
        }
        // The graph chart reaches the same conclusion away from its centre.
        let base = DVector::from_fn(7, |i, _| if i == 0 { 1.0 } else { 0.0 });
        let graph = Chart::parametric(SphereGraphChart::new(&base, 2));
        let nk = nearly_kahler_defect(&graph, &[0.1, -0.2, 0.0, 0.15, 0.05, 0.1], 1e-3).unwrap();
        assert!(nk.nk < 1e-12 && nk.skew < 1e-12 && nk.kahler > 0.1);
    }

    #[test]
    fn schur_scan_on_models() {
        let s6 = Chart::embedded_s6(0);
        let scan = schur_scan(&s6, &seeded_points(&s6, 4, 5, 0.0).unwrap(), BUDGET, 1).unwrap();
        assert!((scan.mean - 1.0).abs() < 1e-12 && scan.spread < 1e-12);
        assert!(scan.range_width.unwrap() < 1e-12);

        let fs = Chart::complex_space_form(3, 4.0);
        let pts = seeded_points(&fs, 4, 5, 0.1).unwrap();
        let scan = schur_scan(
            &fs,
            &pts,
            Budget {
                samples: 0,
                refine_steps: 0,
            },
            1,
        )
        .unwrap();
        assert!((scan.mean - 1.0).abs() < 1e-10 && scan.spread < 1e-10);
        assert!(scan.range_width.is_none());
    }

    #[test]
    fn seeded_points_respect_margin_and_seed() {
        let chart = Chart::complex_space_form(2, -4.0);
        let a = seeded_points(&chart, 5, 9, 0.05).unwrap();
        assert_eq!(a, seeded_points(&chart, 5, 9, 0.05).unwrap());
        let Chart::Parametric(f) = &chart else {
            unreachable!()
        };
        assert!(a.iter().all(|u| f.domain().margin(u) >= 0.05));
        assert!(seeded_points(&chart, 1, 0, 10.0).is_err());
    }
}
