use nalgebra::{DMatrix, DVector};

use crate::constructors::s6_point;
use crate::error::{GeometryError, Result};
use crate::octonion::cross7_vec;
use crate::tensor::FourTensor;
use crate::STRUCTURAL_TOL;

use super::geometry::{assemble, scalar_pair, ChartGeometry, Local, Route};
use super::{geometry_at, Chart, SphereGraphChart};

/// The round unit six-sphere in `R^7` with `J_p v = p × v`.
///
/// Points are unit 7-vectors. Tangent data is expressed in the seeded
/// orthonormal frame `E(p)` of `p^perp`, which is also the coordinate basis at
/// `w = 0` of the graph chart `w -> sqrt(1 - |w|^2) p + E w`. Curvature comes
/// from the Gauss equation with second fundamental form `II(x, y) = -<x, y> p`;
/// the Christoffel route through the graph chart is kept as a cross-check.
/// `nabla J` is the tangential part of the ambient derivative,
/// `(nabla_X J) Y = (X × Y)^T`, and `nabla R`, `d tau`, `d tau'` are central
/// differences along great circles of quantities evaluated in parallel
/// transported frames.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddedS6 {
    frame_seed: u64,
}

/// Gauss-equation curvature of the unit sphere at `q` on the columns of `frame`.
fn gauss_curvature(q: &DVector<f64>, frame: &DMatrix<f64>) -> FourTensor {
    let d = frame.ncols();
    let cols: Vec<DVector<f64>> = (0..d).map(|a| frame.column(a).into_owned()).collect();
    let ii = |x: &DVector<f64>, y: &DVector<f64>| -> DVector<f64> { q * -x.dot(y) };
    FourTensor::from_fn(d, |a, b, c, e| {
        let (x, y, z, u) = (&cols[a], &cols[b], &cols[c], &cols[e]);
        ii(y, z).dot(&ii(x, u)) - ii(x, z).dot(&ii(y, u))
    })
}

fn cross_structure(q: &DVector<f64>, frame: &DMatrix<f64>) -> DMatrix<f64> {
    let d = frame.ncols();
    DMatrix::from_fn(d, d, |a, b| {
        frame
            .column(a)
            .dot(&cross7_vec(q, &frame.column(b).into_owned()))
    })
}

impl EmbeddedS6 {
    pub fn new(frame_seed: u64) -> Self {
        Self { frame_seed }
    }

    pub fn frame_seed(&self) -> u64 {
        self.frame_seed
    }

    fn unit_point(u: &[f64]) -> Result<DVector<f64>> {
        if u.len() != 7 {
            return Err(GeometryError::DimensionMismatch {
                expected: 7,
                found: u.len(),
            });
        }
        let p = DVector::from_column_slice(u);
        let norm = p.norm();
        if (norm - 1.0).abs() > STRUCTURAL_TOL {
            return Err(GeometryError::NotUnit { norm });
        }
        Ok(p)
    }

    pub(super) fn geometry(&self, u: &[f64], h: f64) -> Result<ChartGeometry> {
        let p = Self::unit_point(u)?;
        let tangent = s6_point(&p, self.frame_seed)?;
        let frame = tangent.frame.clone();
        let d = 6;

        let r = gauss_curvature(&p, &frame);
        let graph = Chart::parametric(SphereGraphChart::with_frame(&p, frame.clone()));
        let intrinsic = geometry_at(&graph, &[0.0; 6], h)?;
        let gauss_route_defect = r.max_abs_diff(&intrinsic.curvature);

        let nabla_j: Vec<DMatrix<f64>> = (0..d)
            .map(|a| {
                let x = frame.column(a).into_owned();
                DMatrix::from_fn(d, d, |c, b| {
                    frame
                        .column(c)
                        .dot(&cross7_vec(&x, &frame.column(b).into_owned()))
                })
            })
            .collect();

        let identity = DMatrix::<f64>::identity(d, d);
        let mut nabla_r = Vec::with_capacity(d);
        let mut grad_tau = DVector::zeros(d);
        let mut grad_tau_star = DVector::zeros(d);
        for a in 0..d {
            let x = frame.column(a).into_owned();
            let along = |t: f64| -> (FourTensor, f64, f64) {
                let q = &p * t.cos() + &x * t.sin();
                let mut moved = frame.clone();
                moved.set_column(a, &(&p * -t.sin() + &x * t.cos()));
                let rt = gauss_curvature(&q, &moved);
                let (tau, tau_star) = scalar_pair(&identity, &rt, &cross_structure(&q, &moved));
                (rt, tau, tau_star)
            };
            let (rp, tp, sp) = along(h);
            let (rm, tm, sm) = along(-h);
            nabla_r.push((&rp - &rm) * (0.5 / h));
            grad_tau[a] = (tp - tm) / (2.0 * h);
            grad_tau_star[a] = (sp - sm) / (2.0 * h);
        }

        let local = Local {
            g: identity.clone(),
            j: tangent.point.j().clone(),
            gamma: intrinsic.christoffels.clone(),
            r,
            nabla_r,
            nabla_j,
            grad_tau,
            grad_tau_star,
        };
        assemble(local, u.to_vec(), Route::Embedded, Some(gauss_route_defect))
    }

    /// Christoffel-route geometry at `p` through the graph chart.
    pub fn intrinsic_geometry(&self, u: &[f64], h: f64) -> Result<ChartGeometry> {
        let p = Self::unit_point(u)?;
        let tangent = s6_point(&p, self.frame_seed)?;
        let graph = Chart::parametric(SphereGraphChart::with_frame(&p, tangent.frame));
        geometry_at(&graph, &[0.0; 6], h)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chart::seeded_points;

    #[test]
    fn ambient_and_intrinsic_routes_agree() {
        let chart = Chart::embedded_s6(3);
        let Chart::EmbeddedSphere(s6) = &chart else {
            unreachable!()
        };
        for u in seeded_points(&chart, 5, 8, 0.0).unwrap() {
            let geo = s6.geometry(&u, 1e-3).unwrap();
            let intrinsic = s6.intrinsic_geometry(&u, 1e-3).unwrap();
            assert!(geo.gauss_route_defect.unwrap() < 1e-12);
            assert!(intrinsic.christoffels.max_abs() < 1e-15);
            for a in 0..6 {
                assert!((&geo.nabla_j[a] - &intrinsic.nabla_j[a]).amax() < 1e-12);
                assert!(geo.nabla_r[a].max_abs() < 1e-9);
                assert!(intrinsic.nabla_r[a].max_abs() < 1e-12);
            }
            assert_eq!(geo.hermitian.j(), intrinsic.hermitian.j());
        }
    }

    #[test]
    fn rejects_non_unit_points() {
        let chart = Chart::embedded_s6(0);
        let mut u = vec![0.0; 7];
        u[0] = 1.1;
        assert!(matches!(
            geometry_at(&chart, &u, 1e-3),
            Err(GeometryError::NotUnit { .. })
        ));
        assert!(geometry_at(&chart, &u[..6], 1e-3).is_err());
    }

    #[test]
    fn unit_basis_vector_is_accepted() {
        let chart = Chart::embedded_s6(0);
        let u = [0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0];
        let geo = geometry_at(&chart, &u, 1e-3).unwrap();
        assert!((geo.ricci.tau - 30.0).abs() < 1e-12);
        assert!((geo.ricci.tau_star - 6.0).abs() < 1e-12);
    }
}
