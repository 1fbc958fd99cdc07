use nalgebra::{DMatrix, DVector};

use crate::constructors::s6_frame;
use crate::hermitian::standard_complex_structure;
use crate::jet::{Jet, JetMatrix};
use crate::octonion::FANO_TRIPLES;
use crate::rng::{gaussian_vector, stream_rng, tagged_stream};

use super::{ChartFields, CoordBox};

const TAG_POLY: u32 = 30;

fn constant_jets(m: &DMatrix<f64>, nvars: usize, order: u8) -> JetMatrix {
    JetMatrix::from_fn(m.nrows(), |i, j| Jet::constant(m[(i, j)], nvars, order))
}

fn linear(coeffs: impl Iterator<Item = f64>, vars: &[Jet], proto: &Jet) -> Jet {
    let mut acc = proto.lift(0.0);
    for (c, v) in coeffs.zip(vars) {
        if c != 0.0 {
            acc = &acc + &v.scale(c);
        }
    }
    acc
}

/// `R^{2n}` with the Euclidean metric and the standard `J0`.
#[derive(Debug, Clone)]
pub struct FlatChart {
    domain: CoordBox,
    j0: DMatrix<f64>,
}

impl FlatChart {
    pub fn new(n: usize) -> Self {
        Self {
            domain: CoordBox::cube(2 * n, 1.0),
            j0: standard_complex_structure(n),
        }
    }
}

impl ChartFields for FlatChart {
    fn dim(&self) -> usize {
        self.j0.nrows()
    }

    fn domain(&self) -> &CoordBox {
        &self.domain
    }

    fn metric(&self, _u: &[f64]) -> DMatrix<f64> {
        DMatrix::identity(self.dim(), self.dim())
    }

    fn complex_structure(&self, _u: &[f64]) -> DMatrix<f64> {
        self.j0.clone()
    }

    fn metric_jet(&self, u: &[f64], order: u8) -> Option<JetMatrix> {
        Some(constant_jets(&self.metric(u), u.len(), order))
    }

    fn complex_structure_jet(&self, u: &[f64], order: u8) -> Option<JetMatrix> {
        Some(constant_jets(&self.j0, u.len(), order))
    }
}

/// Affine chart of the complex space form with holomorphic sectional
/// curvature `c`:
/// `g = I / rho - kappa (u u^T + J0u (J0u)^T) / rho^2`, `rho = 1 + kappa |u|^2`,
/// `kappa = c / 4`, with the constant structure `J0`. For `c < 0` the box is
/// kept inside the ball `|u|^2 < 1 / |kappa|`.
#[derive(Debug, Clone)]
pub struct ComplexSpaceFormChart {
    c: f64,
    domain: CoordBox,
    j0: DMatrix<f64>,
}

impl ComplexSpaceFormChart {
    pub fn new(n: usize, c: f64) -> Self {
        let kappa = c / 4.0;
        let half_width = if kappa < 0.0 {
            0.9 / (2.0 * n as f64 * kappa.abs()).sqrt()
        } else {
            1.0
        };
        Self {
            c,
            domain: CoordBox::cube(2 * n, half_width),
            j0: standard_complex_structure(n),
        }
    }

    pub fn holomorphic_curvature(&self) -> f64 {
        self.c
    }
}

impl ChartFields for ComplexSpaceFormChart {
    fn dim(&self) -> usize {
        self.j0.nrows()
    }

    fn domain(&self) -> &CoordBox {
        &self.domain
    }

    fn metric(&self, u: &[f64]) -> DMatrix<f64> {
        self.metric_jet(u, 0).expect("closed form").values()
    }

    fn complex_structure(&self, _u: &[f64]) -> DMatrix<f64> {
        self.j0.clone()
    }

    fn metric_jet(&self, u: &[f64], order: u8) -> Option<JetMatrix> {
        let d = self.dim();
        let kappa = self.c / 4.0;
        let vars = Jet::variables(u, order);
        let proto = &vars[0];
        let ju: Vec<Jet> = (0..d)
            .map(|i| linear(self.j0.row(i).iter().copied(), &vars, proto))
            .collect();
        let mut r2 = proto.lift(0.0);
        for v in &vars {
            r2 = &r2 + &(v * v);
        }
        let inv_rho = r2.scale(kappa).add_const(1.0).recip();
        let inv_rho2 = &inv_rho * &inv_rho;
        Some(JetMatrix::from_fn(d, |i, j| {
            let outer = &(&vars[i] * &vars[j]) + &(&ju[i] * &ju[j]);
            let mut entry = (&outer * &inv_rho2).scale(-kappa);
            if i == j {
                entry = &entry + &inv_rho;
            }
            entry
        }))
    }

    fn complex_structure_jet(&self, u: &[f64], order: u8) -> Option<JetMatrix> {
        Some(constant_jets(&self.j0, u.len(), order))
    }
}

/// Monomials of degree at most three as sorted index lists.
fn monomials(dim: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for a in 0..dim {
        out.push(vec![a]);
    }
    for a in 0..dim {
        for b in a..dim {
            out.push(vec![a, b]);
        }
    }
    for a in 0..dim {
        for b in a..dim {
            for c in b..dim {
                out.push(vec![a, b, c]);
            }
        }
    }
    out
}

/// `g = I + eps P(u)` for a seeded symmetric cubic matrix polynomial `P`
/// averaged over `J0`, so that `J0` stays orthogonal. The structure is
/// Hermitian but generically neither Kähler nor nearly Kähler, and its
/// curvature is not J-invariant.
#[derive(Debug, Clone)]
pub struct PolynomialHermitianChart {
    dim: usize,
    eps: f64,
    domain: CoordBox,
    j0: DMatrix<f64>,
    monomials: Vec<Vec<usize>>,
    /// `coeffs[i * dim + j][m]`, symmetric in `(i, j)`.
    coeffs: Vec<Vec<f64>>,
}

impl PolynomialHermitianChart {
    pub const DEFAULT_EPS: f64 = 0.05;

    pub fn new(n: usize, eps: f64, seed: u64) -> Self {
        let dim = 2 * n;
        let monomials = monomials(dim);
        let m = monomials.len();
        let mut raw = vec![vec![0.0; m]; dim * dim];
        for i in 0..dim {
            for j in i..dim {
                let mut rng = stream_rng(seed, tagged_stream(TAG_POLY, (i * dim + j) as u64));
                let c: DVector<f64> = gaussian_vector(&mut rng, m);
                raw[i * dim + j] = c.as_slice().to_vec();
                raw[j * dim + i] = c.as_slice().to_vec();
            }
        }
        let j0 = standard_complex_structure(n);
        let mut coeffs = vec![vec![0.0; m]; dim * dim];
        for i in 0..dim {
            for j in 0..dim {
                for mono in 0..m {
                    let mut rotated = 0.0;
                    for k in 0..dim {
                        for l in 0..dim {
                            rotated += j0[(k, i)] * j0[(l, j)] * raw[k * dim + l][mono];
                        }
                    }
                    coeffs[i * dim + j][mono] = 0.5 * (raw[i * dim + j][mono] + rotated);
                }
            }
        }
        Self {
            dim,
            eps,
            domain: CoordBox::cube(dim, 0.5),
            j0,
            monomials,
            coeffs,
        }
    }
}

impl ChartFields for PolynomialHermitianChart {
    fn dim(&self) -> usize {
        self.dim
    }

    fn domain(&self) -> &CoordBox {
        &self.domain
    }

    fn metric(&self, u: &[f64]) -> DMatrix<f64> {
        self.metric_jet(u, 0).expect("closed form").values()
    }

    fn complex_structure(&self, _u: &[f64]) -> DMatrix<f64> {
        self.j0.clone()
    }

    fn metric_jet(&self, u: &[f64], order: u8) -> Option<JetMatrix> {
        let vars = Jet::variables(u, order);
        let one = vars[0].lift(1.0);
        let mono: Vec<Jet> = self
            .monomials
            .iter()
            .map(|idx| idx.iter().fold(one.clone(), |acc, &a| &acc * &vars[a]))
            .collect();
        Some(JetMatrix::from_fn(self.dim, |i, j| {
            let p = linear(self.coeffs[i * self.dim + j].iter().copied(), &mono, &one);
            let entry = p.scale(self.eps);
            if i == j {
                entry.add_const(1.0)
            } else {
                entry
            }
        }))
    }

    fn complex_structure_jet(&self, u: &[f64], order: u8) -> Option<JetMatrix> {
        Some(constant_jets(&self.j0, u.len(), order))
    }
}

/// Graph chart of the unit six-sphere around `base`:
/// `phi(w) = sqrt(1 - |w|^2) base + E w` with `E` a seeded orthonormal frame of
/// `base^perp`, so `g = I + w w^T / (1 - |w|^2)`, and `J` induced by the
/// octonionic cross product, `J ∂_b = phi × ∂_b phi`.
#[derive(Debug, Clone)]
pub struct SphereGraphChart {
    base: DVector<f64>,
    frame: DMatrix<f64>,
    domain: CoordBox,
}

fn cross_jets(x: &[Jet], y: &[Jet]) -> Vec<Jet> {
    let mut out: Vec<Jet> = (0..7).map(|_| x[0].lift(0.0)).collect();
    for [i, j, k] in FANO_TRIPLES {
        for (a, b, c) in [(i, j, k), (j, k, i), (k, i, j)] {
            out[c] = &out[c] + &(&(&x[a] * &y[b]) - &(&x[b] * &y[a]));
        }
    }
    out
}

impl SphereGraphChart {
    pub fn new(base: &DVector<f64>, frame_seed: u64) -> Self {
        let base = base / base.norm();
        let frame = s6_frame(&base, frame_seed);
        Self {
            base,
            frame,
            domain: CoordBox::cube(6, 0.4),
        }
    }

    /// Graph chart over a given orthonormal frame of `base^perp`.
    pub(crate) fn with_frame(base: &DVector<f64>, frame: DMatrix<f64>) -> Self {
        Self {
            base: base.clone(),
            frame,
            domain: CoordBox::cube(6, 0.4),
        }
    }

    pub fn base(&self) -> &DVector<f64> {
        &self.base
    }

    /// Ambient frame `E` (`7 x 6`); `∂_a phi (0) = E e_a`.
    pub fn frame(&self) -> &DMatrix<f64> {
        &self.frame
    }
}

impl ChartFields for SphereGraphChart {
    fn dim(&self) -> usize {
        6
    }

    fn domain(&self) -> &CoordBox {
        &self.domain
    }

    fn metric(&self, u: &[f64]) -> DMatrix<f64> {
        self.metric_jet(u, 0).expect("closed form").values()
    }

    fn complex_structure(&self, u: &[f64]) -> DMatrix<f64> {
        self.complex_structure_jet(u, 0)
            .expect("closed form")
            .values()
    }

    fn metric_jet(&self, u: &[f64], order: u8) -> Option<JetMatrix> {
        let w = Jet::variables(u, order);
        let mut r2 = w[0].lift(0.0);
        for v in &w {
            r2 = &r2 + &(v * v);
        }
        let inv = r2.scale(-1.0).add_const(1.0).recip();
        Some(JetMatrix::from_fn(6, |a, b| {
            let entry = &(&w[a] * &w[b]) * &inv;
            if a == b {
                entry.add_const(1.0)
            } else {
                entry
            }
        }))
    }

    fn complex_structure_jet(&self, u: &[f64], order: u8) -> Option<JetMatrix> {
        let w = Jet::variables(u, order);
        let proto = &w[0];
        let mut r2 = proto.lift(0.0);
        for v in &w {
            r2 = &r2 + &(v * v);
        }
        let s = r2.scale(-1.0).add_const(1.0).sqrt();
        let inv_s = s.recip();
        let phi: Vec<Jet> = (0..7)
            .map(|k| {
                let lin = linear(self.frame.row(k).iter().copied(), &w, proto);
                &s.scale(self.base[k]) + &lin
            })
            .collect();
        let tangents: Vec<Vec<Jet>> = (0..6)
            .map(|b| {
                let coef = (&w[b] * &inv_s).scale(-1.0);
                (0..7)
                    .map(|k| coef.scale(self.base[k]).add_const(self.frame[(k, b)]))
                    .collect()
            })
            .collect();
        let images: Vec<Vec<Jet>> = tangents.iter().map(|t| cross_jets(&phi, t)).collect();
        let m = JetMatrix::from_fn(6, |c, b| {
            let mut acc = proto.lift(0.0);
            for k in 0..7 {
                acc = &acc + &(&tangents[c][k] * &images[b][k]);
            }
            acc
        });
        let ginv = self.metric_jet(u, order)?.inverse()?;
        Some(JetMatrix::from_fn(6, |a, b| {
            let mut acc = proto.lift(0.0);
            for c in 0..6 {
                acc = &acc + &(ginv.get(a, c) * m.get(c, b));
            }
            acc
        }))
    }
}
