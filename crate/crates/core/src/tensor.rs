//! Dense (0,4) tensors over `R^d`.

use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector};

use crate::error::{GeometryError, Result};

/// A (0,4) multilinear form stored as a dense `d^4` array.
///
/// Component `(i, j, k, l)` is `T(e_i, e_j, e_k, e_l)` for the coordinate
/// basis. No symmetry is assumed.
#[derive(Debug, Clone, PartialEq)]
pub struct FourTensor {
    dim: usize,
    data: Vec<f64>,
}

impl FourTensor {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![0.0; dim.pow(4)],
        }
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize, usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(dim.pow(4));
        for i in 0..dim {
            for j in 0..dim {
                for k in 0..dim {
                    for l in 0..dim {
                        data.push(f(i, j, k, l));
                    }
                }
            }
        }
        Self { dim, data }
    }

    pub fn from_vec(dim: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != dim.pow(4) {
            return Err(GeometryError::DimensionMismatch {
                expected: dim.pow(4),
                found: data.len(),
            });
        }
        Ok(Self { dim, data })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    fn index(&self, i: usize, j: usize, k: usize, l: usize) -> usize {
        ((i * self.dim + j) * self.dim + k) * self.dim + l
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        self.data[self.index(i, j, k, l)]
    }

    pub fn set(&mut self, i: usize, j: usize, k: usize, l: usize, value: f64) {
        let idx = self.index(i, j, k, l);
        self.data[idx] = value;
    }

    /// `T(x, y, z, u)` by full multilinear contraction.
    pub fn eval(
        &self,
        x: &DVector<f64>,
        y: &DVector<f64>,
        z: &DVector<f64>,
        u: &DVector<f64>,
    ) -> f64 {
        let d = self.dim;
        let mut total = 0.0;
        for i in 0..d {
            if x[i] == 0.0 {
                continue;
            }
            let mut si = 0.0;
            for j in 0..d {
                if y[j] == 0.0 {
                    continue;
                }
                let mut sj = 0.0;
                for k in 0..d {
                    if z[k] == 0.0 {
                        continue;
                    }
                    let base = self.index(i, j, k, 0);
                    let row = &self.data[base..base + d];
                    let sk: f64 = row.iter().zip(u.iter()).map(|(t, v)| t * v).sum();
                    sj += z[k] * sk;
                }
                si += y[j] * sj;
            }
            total += x[i] * si;
        }
        total
    }

    /// Matrix `M[(a, b)] = T(e_a, y, z, e_b)` with the two middle slots fixed.
    pub fn middle_contraction(&self, y: &DVector<f64>, z: &DVector<f64>) -> DMatrix<f64> {
        let d = self.dim;
        DMatrix::from_fn(d, d, |a, b| {
            let mut s = 0.0;
            for j in 0..d {
                for k in 0..d {
                    s += y[j] * z[k] * self.get(a, j, k, b);
                }
            }
            s
        })
    }

    /// Matrix `M[(a, b)] = T(x, e_a, e_b, u)` with the outer slots fixed.
    pub fn outer_contraction(&self, x: &DVector<f64>, u: &DVector<f64>) -> DMatrix<f64> {
        let d = self.dim;
        DMatrix::from_fn(d, d, |a, b| {
            let mut s = 0.0;
            for i in 0..d {
                for l in 0..d {
                    s += x[i] * u[l] * self.get(i, a, b, l);
                }
            }
            s
        })
    }

    /// Components in the basis given by the columns of `basis`:
    /// `T'(a, b, c, e) = T(f_a, f_b, f_c, f_e)`.
    pub fn pullback(&self, basis: &DMatrix<f64>) -> FourTensor {
        let d = self.dim;
        let m = basis.ncols();
        // Contract one slot at a time; each pass moves the transformed index
        // to the end so the next pass always acts on the leading slot.
        let mut cur = self.data.clone();
        let mut dims = [d, d, d, d];
        for _ in 0..4 {
            let rest = dims[1] * dims[2] * dims[3];
            let mut next = vec![0.0; rest * m];
            for a in 0..dims[0] {
                let src = &cur[a * rest..(a + 1) * rest];
                for r in 0..rest {
                    let v = src[r];
                    if v == 0.0 {
                        continue;
                    }
                    for b in 0..m {
                        next[r * m + b] += basis[(a, b)] * v;
                    }
                }
            }
            cur = next;
            dims = [dims[1], dims[2], dims[3], m];
        }
        FourTensor { dim: m, data: cur }
    }

    /// `T(Jx, Jy, Jz, Ju)`.
    pub fn j_transform(&self, j: &DMatrix<f64>) -> FourTensor {
        self.pullback(j)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn max_abs_diff(&self, other: &FourTensor) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    pub fn scaled(&self, t: f64) -> FourTensor {
        FourTensor {
            dim: self.dim,
            data: self.data.iter().map(|v| v * t).collect(),
        }
    }

    /// Projection onto tensors with the algebraic curvature symmetries
    /// (antisymmetry in each pair, pair exchange, first Bianchi identity).
    pub fn curvature_projection(&self) -> FourTensor {
        let pairs = FourTensor::from_fn(self.dim, |i, j, k, l| {
            let t = |a, b, c, d| self.get(a, b, c, d);
            (t(i, j, k, l) - t(j, i, k, l) - t(i, j, l, k) + t(j, i, l, k) + t(k, l, i, j)
                - t(l, k, i, j)
                - t(k, l, j, i)
                + t(l, k, j, i))
                / 8.0
        });
        // Remove the Bianchi sum; for tensors with the pair symmetries this
        // subtracts exactly the totally antisymmetric part.
        FourTensor::from_fn(self.dim, |i, j, k, l| {
            let b = pairs.get(i, j, k, l) + pairs.get(j, k, i, l) + pairs.get(k, i, j, l);
            pairs.get(i, j, k, l) - b / 3.0
        })
    }

    /// Direct sum of two tensors on `R^{d1} + R^{d2}`.
    pub fn direct_sum(&self, other: &FourTensor) -> FourTensor {
        let d1 = self.dim;
        let d = d1 + other.dim;
        FourTensor::from_fn(d, |i, j, k, l| {
            let idx = [i, j, k, l];
            if idx.iter().all(|&a| a < d1) {
                self.get(i, j, k, l)
            } else if idx.iter().all(|&a| a >= d1) {
                other.get(i - d1, j - d1, k - d1, l - d1)
            } else {
                0.0
            }
        })
    }

    fn zip_with(&self, other: &FourTensor, f: impl Fn(f64, f64) -> f64) -> FourTensor {
        assert_eq!(self.dim, other.dim, "tensor dimensions differ");
        FourTensor {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| f(*a, *b))
                .collect(),
        }
    }
}

impl Add for &FourTensor {
    type Output = FourTensor;
    fn add(self, rhs: &FourTensor) -> FourTensor {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl Sub for &FourTensor {
    type Output = FourTensor;
    fn sub(self, rhs: &FourTensor) -> FourTensor {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl Mul<f64> for &FourTensor {
    type Output = FourTensor;
    fn mul(self, t: f64) -> FourTensor {
        self.scaled(t)
    }
}

impl Neg for &FourTensor {
    type Output = FourTensor;
    fn neg(self) -> FourTensor {
        self.scaled(-1.0)
    }
}

impl Add for FourTensor {
    type Output = FourTensor;
    fn add(self, rhs: FourTensor) -> FourTensor {
        &self + &rhs
    }
}

impl Sub for FourTensor {
    type Output = FourTensor;
    fn sub(self, rhs: FourTensor) -> FourTensor {
        &self - &rhs
    }
}

impl Mul<f64> for FourTensor {
    type Output = FourTensor;
    fn mul(self, t: f64) -> FourTensor {
        self.scaled(t)
    }
}
