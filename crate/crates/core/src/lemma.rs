//! The vanishing lemma as linear algebra.
//!
//! A (0,4) tensor that is antisymmetric in both pairs, satisfies the first
//! Bianchi identity and is `J`-invariant, and whose sectional values vanish on
//! every holomorphic and antiholomorphic plane, is zero. Here the space of
//! tensors with the four symmetries is built explicitly, and the linear map
//! "evaluate `T(x,y,y,x)` on a fixed finite set of planes" is shown to be
//! injective on it by a singular value rank count.

use nalgebra::{DMatrix, DVector};

use crate::hermitian::{HermitianPoint, TwoPlane};
use crate::tensor::FourTensor;

/// Result of the rank computation.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelAnalysis {
    pub dim: usize,
    /// Dimension of the space of tensors with the four symmetries.
    pub symmetric_space_dim: usize,
    pub plane_count: usize,
    pub rank: usize,
    pub kernel_dim: usize,
    pub largest_singular_value: f64,
    pub smallest_singular_value: f64,
}

impl KernelAnalysis {
    pub fn singular_ratio(&self) -> f64 {
        self.smallest_singular_value / self.largest_singular_value
    }
}

fn pairs(dim: usize) -> Vec<(usize, usize)> {
    (0..dim)
        .flat_map(|i| (i + 1..dim).map(move |j| (i, j)))
        .collect()
}

/// Tensor with both pair antisymmetries built from a bilinear form `m` on
/// the ordered pairs `i < j`.
fn tensor_from_pair_form(dim: usize, m: &DMatrix<f64>) -> FourTensor {
    let ps = pairs(dim);
    let index = |a: usize, b: usize| -> Option<(usize, f64)> {
        if a == b {
            return None;
        }
        let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
        ps.iter().position(|&p| p == (lo, hi)).map(|k| (k, sign))
    };
    let lookup: Vec<Vec<Option<(usize, f64)>>> = (0..dim)
        .map(|a| (0..dim).map(|b| index(a, b)).collect())
        .collect();
    FourTensor::from_fn(dim, |i, j, k, l| match (lookup[i][j], lookup[k][l]) {
        (Some((a, s)), Some((b, t))) => s * t * m[(a, b)],
        _ => 0.0,
    })
}

/// Basis of the tensors satisfying antisymmetry in both pairs (built in), the
/// first Bianchi identity and, when `j_invariant`, invariance under `J`.
///
/// The two linear conditions are imposed by brute force: each coordinate
/// tensor of the parametrisation is mapped to its full array of violations,
/// and the null space of that constraint matrix is read off an SVD.
pub fn symmetric_tensor_basis(p: &HermitianPoint, j_invariant: bool) -> Vec<FourTensor> {
    let dim = p.dim();
    let m = pairs(dim).len();
    let unknowns = m * m;
    let blocks = if j_invariant { 2 } else { 1 };
    let rows = blocks * dim.pow(4);
    let mut constraints = DMatrix::zeros(rows, unknowns);
    let mut generators = Vec::with_capacity(unknowns);
    for u in 0..unknowns {
        let mut form = DMatrix::zeros(m, m);
        form[(u / m, u % m)] = 1.0;
        let t = tensor_from_pair_form(dim, &form);
        let mut row = 0;
        for i in 0..dim {
            for j in 0..dim {
                for k in 0..dim {
                    for l in 0..dim {
                        constraints[(row, u)] =
                            t.get(i, j, k, l) + t.get(j, k, i, l) + t.get(k, i, j, l);
                        row += 1;
                    }
                }
            }
        }
        if j_invariant {
            let tj = t.j_transform(p.j());
            for (offset, (a, b)) in t.as_slice().iter().zip(tj.as_slice()).enumerate() {
                constraints[(row + offset, u)] = a - b;
            }
        }
        generators.push(t);
    }
    // The thin SVD only exposes all null directions of a tall matrix.
    debug_assert!(rows >= unknowns);
    let svd = constraints.svd(false, true);
    let v_t = svd.v_t.expect("requested right singular vectors");
    let smax = svd.singular_values.max();
    let mut basis = Vec::new();
    for (idx, sigma) in svd.singular_values.iter().enumerate() {
        if *sigma <= 1e-10 * smax.max(1.0) {
            basis.push(combine(&generators, &v_t.row(idx).transpose()));
        }
    }
    basis
}

fn combine(generators: &[FourTensor], coeffs: &DVector<f64>) -> FourTensor {
    let dim = generators[0].dim();
    let mut data = vec![0.0; dim.pow(4)];
    for (g, c) in generators.iter().zip(coeffs.iter()) {
        if *c == 0.0 {
            continue;
        }
        for (d, v) in data.iter_mut().zip(g.as_slice()) {
            *d += c * v;
        }
    }
    FourTensor::from_vec(dim, data).expect("length matches")
}

/// Coordinate vectors with entries in `{-1, 0, 1}`, at most `support`
/// nonzero entries, first nonzero entry positive.
fn signed_patterns(dim: usize, support: usize) -> Vec<DVector<f64>> {
    let mut out = Vec::new();
    let total = 3usize.pow(dim as u32);
    for code in 1..total {
        let mut c = code;
        let mut v = DVector::zeros(dim);
        for i in 0..dim {
            v[i] = (c % 3) as f64 - 1.0;
            c /= 3;
        }
        let nonzero = v.iter().filter(|x| **x != 0.0).count();
        let first = v.iter().find(|x| **x != 0.0).copied().unwrap_or(0.0);
        if nonzero <= support && first > 0.0 {
            out.push(v);
        }
    }
    out
}

/// Deterministic plane set: holomorphic planes `(x, Jx)` through the
/// normalised sign patterns with support at most three, and antiholomorphic
/// planes `(x, y')` where `y'` is the part of another pattern (support at most
/// two) orthogonal to `x` and `Jx`.
pub fn canonical_planes(p: &HermitianPoint) -> Vec<TwoPlane> {
    let dim = p.dim();
    let unit = |v: &DVector<f64>| v / p.norm(v);
    let mut planes: Vec<TwoPlane> = signed_patterns(dim, 3)
        .iter()
        .map(|v| {
            let x = unit(v);
            let jx = p.apply_j(&x);
            TwoPlane::new(x, jx)
        })
        .collect();
    let short = signed_patterns(dim, 2);
    for (a, xv) in short.iter().enumerate() {
        let x = unit(xv);
        let jx = unit(&p.apply_j(&x));
        for yv in short.iter().skip(a + 1) {
            let mut y = yv.clone();
            y.axpy(-p.inner(&x, &y), &x, 1.0);
            y.axpy(-p.inner(&jx, &y), &jx, 1.0);
            let norm = p.norm(&y);
            if norm > 1e-6 {
                planes.push(TwoPlane::new(x.clone(), y / norm));
            }
        }
    }
    planes
}

/// Rank analysis of plane evaluation on the symmetric tensor space.
/// Singular values below `rel_tol` times the largest count as zero.
pub fn lemma_kernel(p: &HermitianPoint, rel_tol: f64) -> KernelAnalysis {
    let basis = symmetric_tensor_basis(p, true);
    let planes = canonical_planes(p);
    let eval = DMatrix::from_fn(planes.len(), basis.len(), |row, col| {
        let pl = &planes[row];
        basis[col].eval(&pl.x, &pl.y, &pl.y, &pl.x)
    });
    let sv = eval.singular_values();
    let largest = sv.max();
    let rank = sv.iter().filter(|s| **s >= rel_tol * largest).count();
    KernelAnalysis {
        dim: p.dim(),
        symmetric_space_dim: basis.len(),
        plane_count: planes.len(),
        rank,
        kernel_dim: basis.len() - rank,
        largest_singular_value: largest,
        smallest_singular_value: sv.min(),
    }
}
