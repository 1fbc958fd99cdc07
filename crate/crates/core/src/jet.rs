//! Truncated multivariate Taylor jets up to third order.
//!
//! A [`Jet`] carries a value and all partial derivatives up to its order with
//! respect to `nvars` coordinates. Arithmetic propagates derivatives exactly
//! (Leibniz and Faà di Bruno rules), so evaluating a closed-form metric on
//! jets yields its analytic derivatives at a point. The order of a result is
//! the smallest order among the operands; [`Jet::partial`] lowers it by one.

use std::ops::{Add, Mul, Neg, Sub};

pub const MAX_ORDER: u8 = 3;

#[derive(Debug, Clone, PartialEq)]
pub struct Jet {
    order: u8,
    nvars: usize,
    v: f64,
    d1: Vec<f64>,
    d2: Vec<f64>,
    d3: Vec<f64>,
}

impl Jet {
    pub fn constant(value: f64, nvars: usize, order: u8) -> Self {
        assert!(order <= MAX_ORDER, "jets are truncated at third order");
        let len = |k: u8| if order >= k { nvars.pow(k as u32) } else { 0 };
        Self {
            order,
            nvars,
            v: value,
            d1: vec![0.0; len(1)],
            d2: vec![0.0; len(2)],
            d3: vec![0.0; len(3)],
        }
    }

    /// The coordinate function `u_index` with value `value`.
    pub fn variable(value: f64, index: usize, nvars: usize, order: u8) -> Self {
        let mut jet = Self::constant(value, nvars, order);
        if order >= 1 {
            jet.d1[index] = 1.0;
        }
        jet
    }

    /// Coordinate jets for every component of `u`.
    pub fn variables(u: &[f64], order: u8) -> Vec<Jet> {
        u.iter()
            .enumerate()
            .map(|(i, &x)| Jet::variable(x, i, u.len(), order))
            .collect()
    }

    /// A constant with the same shape as `self`.
    pub fn lift(&self, value: f64) -> Jet {
        Jet::constant(value, self.nvars, self.order)
    }

    pub fn order(&self) -> u8 {
        self.order
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn value(&self) -> f64 {
        self.v
    }

    pub fn d1(&self, i: usize) -> f64 {
        self.d1[i]
    }

    pub fn d2(&self, i: usize, j: usize) -> f64 {
        self.d2[i * self.nvars + j]
    }

    pub fn d3(&self, i: usize, j: usize, k: usize) -> f64 {
        self.d3[(i * self.nvars + j) * self.nvars + k]
    }

    pub fn truncate(&self, order: u8) -> Jet {
        if order >= self.order {
            return self.clone();
        }
        let mut out = self.clone();
        out.order = order;
        if order < 3 {
            out.d3.clear();
        }
        if order < 2 {
            out.d2.clear();
        }
        if order < 1 {
            out.d1.clear();
        }
        out
    }

    /// `d/du_a` of the jet, one order lower.
    pub fn partial(&self, a: usize) -> Jet {
        assert!(self.order >= 1, "cannot differentiate a zeroth-order jet");
        let n = self.nvars;
        let order = self.order - 1;
        let mut out = Jet::constant(self.d1[a], n, order);
        if order >= 1 {
            out.d1.copy_from_slice(&self.d2[a * n..(a + 1) * n]);
        }
        if order >= 2 {
            out.d2.copy_from_slice(&self.d3[a * n * n..(a + 1) * n * n]);
        }
        out
    }

    fn zip(&self, other: &Jet, f: impl Fn(f64, f64) -> f64) -> Jet {
        assert_eq!(self.nvars, other.nvars, "jets over different coordinates");
        let order = self.order.min(other.order);
        let mut out = Jet::constant(f(self.v, other.v), self.nvars, order);
        for (o, (a, b)) in out.d1.iter_mut().zip(self.d1.iter().zip(&other.d1)) {
            *o = f(*a, *b);
        }
        for (o, (a, b)) in out.d2.iter_mut().zip(self.d2.iter().zip(&other.d2)) {
            *o = f(*a, *b);
        }
        for (o, (a, b)) in out.d3.iter_mut().zip(self.d3.iter().zip(&other.d3)) {
            *o = f(*a, *b);
        }
        out
    }

    pub fn scale(&self, c: f64) -> Jet {
        let mut out = self.clone();
        out.v *= c;
        for x in out
            .d1
            .iter_mut()
            .chain(out.d2.iter_mut())
            .chain(out.d3.iter_mut())
        {
            *x *= c;
        }
        out
    }

    pub fn add_const(&self, c: f64) -> Jet {
        let mut out = self.clone();
        out.v += c;
        out
    }

    pub fn mul_jet(&self, other: &Jet) -> Jet {
        assert_eq!(self.nvars, other.nvars, "jets over different coordinates");
        let n = self.nvars;
        let order = self.order.min(other.order);
        let (f, g) = (self, other);
        let mut out = Jet::constant(f.v * g.v, n, order);
        if order >= 1 {
            for i in 0..n {
                out.d1[i] = f.d1[i] * g.v + f.v * g.d1[i];
            }
        }
        if order >= 2 {
            for i in 0..n {
                for j in 0..n {
                    out.d2[i * n + j] =
                        f.d2(i, j) * g.v + f.d1[i] * g.d1[j] + f.d1[j] * g.d1[i] + f.v * g.d2(i, j);
                }
            }
        }
        if order >= 3 {
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        out.d3[(i * n + j) * n + k] = f.d3(i, j, k) * g.v
                            + f.d2(i, j) * g.d1[k]
                            + f.d2(i, k) * g.d1[j]
                            + f.d2(j, k) * g.d1[i]
                            + f.d1[i] * g.d2(j, k)
                            + f.d1[j] * g.d2(i, k)
                            + f.d1[k] * g.d2(i, j)
                            + f.v * g.d3(i, j, k);
                    }
                }
            }
        }
        out
    }

    /// `phi(self)` given `[phi, phi', phi'', phi''']` at `self.value()`.
    pub fn compose(&self, p: [f64; 4]) -> Jet {
        let n = self.nvars;
        let f = self;
        let mut out = Jet::constant(p[0], n, f.order);
        for i in 0..out.d1.len() {
            out.d1[i] = p[1] * f.d1[i];
        }
        if f.order >= 2 {
            for i in 0..n {
                for j in 0..n {
                    out.d2[i * n + j] = p[2] * f.d1[i] * f.d1[j] + p[1] * f.d2(i, j);
                }
            }
        }
        if f.order >= 3 {
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        out.d3[(i * n + j) * n + k] = p[3] * f.d1[i] * f.d1[j] * f.d1[k]
                            + p[2]
                                * (f.d2(i, j) * f.d1[k]
                                    + f.d2(i, k) * f.d1[j]
                                    + f.d2(j, k) * f.d1[i])
                            + p[1] * f.d3(i, j, k);
                    }
                }
            }
        }
        out
    }

    pub fn recip(&self) -> Jet {
        let t = self.v;
        let r = 1.0 / t;
        self.compose([r, -r * r, 2.0 * r * r * r, -6.0 * r * r * r * r])
    }

    pub fn sqrt(&self) -> Jet {
        let t = self.v;
        let s = t.sqrt();
        self.compose([s, 0.5 / s, -0.25 / (t * s), 0.375 / (t * t * s)])
    }

    pub fn div_jet(&self, other: &Jet) -> Jet {
        self.mul_jet(&other.recip())
    }
}

impl Add for &Jet {
    type Output = Jet;
    fn add(self, rhs: &Jet) -> Jet {
        self.zip(rhs, |a, b| a + b)
    }
}

impl Sub for &Jet {
    type Output = Jet;
    fn sub(self, rhs: &Jet) -> Jet {
        self.zip(rhs, |a, b| a - b)
    }
}

impl Mul for &Jet {
    type Output = Jet;
    fn mul(self, rhs: &Jet) -> Jet {
        self.mul_jet(rhs)
    }
}

impl Neg for &Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

/// Square matrix of jets in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct JetMatrix {
    dim: usize,
    entries: Vec<Jet>,
}

impl JetMatrix {
    pub fn new(dim: usize, entries: Vec<Jet>) -> Self {
        assert_eq!(entries.len(), dim * dim, "jet matrix must be square");
        Self { dim, entries }
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Jet) -> Self {
        let mut entries = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                entries.push(f(i, j));
            }
        }
        Self { dim, entries }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> &Jet {
        &self.entries[i * self.dim + j]
    }

    pub fn order(&self) -> u8 {
        self.entries
            .iter()
            .map(Jet::order)
            .min()
            .unwrap_or(MAX_ORDER)
    }

    pub fn truncate(&self, order: u8) -> JetMatrix {
        JetMatrix {
            dim: self.dim,
            entries: self.entries.iter().map(|e| e.truncate(order)).collect(),
        }
    }

    pub fn values(&self) -> nalgebra::DMatrix<f64> {
        nalgebra::DMatrix::from_fn(self.dim, self.dim, |i, j| self.get(i, j).value())
    }

    /// Gauss–Jordan inverse with partial pivoting on values.
    pub fn inverse(&self) -> Option<JetMatrix> {
        let d = self.dim;
        let proto = self.get(0, 0);
        let mut a: Vec<Vec<Jet>> = (0..d)
            .map(|i| (0..d).map(|j| self.get(i, j).clone()).collect())
            .collect();
        let mut inv: Vec<Vec<Jet>> = (0..d)
            .map(|i| {
                (0..d)
                    .map(|j| proto.lift(if i == j { 1.0 } else { 0.0 }))
                    .collect()
            })
            .collect();
        for col in 0..d {
            let pivot = (col..d)
                .max_by(|&x, &y| a[x][col].value().abs().total_cmp(&a[y][col].value().abs()))?;
            if a[pivot][col].value() == 0.0 {
                return None;
            }
            a.swap(col, pivot);
            inv.swap(col, pivot);
            let r = a[col][col].recip();
            for j in 0..d {
                a[col][j] = &a[col][j] * &r;
                inv[col][j] = &inv[col][j] * &r;
            }
            for row in 0..d {
                if row == col {
                    continue;
                }
                let factor = a[row][col].clone();
                for j in 0..d {
                    a[row][j] = &a[row][j] - &(&factor * &a[col][j]);
                    inv[row][j] = &inv[row][j] - &(&factor * &inv[col][j]);
                }
            }
        }
        Some(JetMatrix {
            dim: d,
            entries: inv.into_iter().flatten().collect(),
        })
    }
}
