//! Extremal sectional curvature over the antiholomorphic Grassmannian.
//!
//! Candidates come from seeded uniform sampling. The best candidates are then
//! refined by block coordinate ascent: with `y` fixed, `K = x^T A x` is
//! extremised exactly over unit `x` in `span{y, Jy}^perp` (an eigenvector
//! problem), then the roles are swapped, then `x` and `y` are turned jointly
//! towards `Jy` and `Jx`. Every step keeps `g(Jx, y) = 0` and none moves `K`
//! away from the requested extreme.

use nalgebra::{DMatrix, DVector};

use crate::error::Result;
use crate::hermitian::{sample_antiholomorphic_plane_indexed, HermitianPoint, TwoPlane};
use crate::tensor::FourTensor;

use super::check_dims;

/// Number of best samples refined for each extreme.
const REFINED_CANDIDATES: usize = 4;

#[derive(Debug, Clone, PartialEq)]
pub struct AntiholoRange {
    pub nu_min: f64,
    pub nu_max: f64,
    pub min_plane: TwoPlane,
    pub max_plane: TwoPlane,
}

/// Estimates `min` and `max` of `R(x,y,y,x)` over antiholomorphic planes.
pub fn antiholo_range(
    r: &FourTensor,
    p: &HermitianPoint,
    samples: usize,
    refine_steps: usize,
    seed: u64,
) -> Result<AntiholoRange> {
    check_dims(r, p)?;
    // Work in an orthonormal frame: the metric becomes the identity.
    let frame = p.default_frame();
    let f = frame.matrix();
    let j = f.transpose() * p.g() * p.j() * f;
    let local = HermitianPoint::new(DMatrix::identity(p.dim(), p.dim()), j.clone())?;
    let tensor = r.pullback(f);

    let samples = samples.max(1);
    let mut scored = Vec::with_capacity(samples);
    for i in 0..samples as u64 {
        let plane = sample_antiholomorphic_plane_indexed(&local, seed, i)?;
        let k = tensor.eval(&plane.x, &plane.y, &plane.y, &plane.x);
        scored.push((k, i, plane));
    }
    scored.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));

    let take = REFINED_CANDIDATES.min(scored.len());
    let extreme = |sign: f64, candidates: Vec<&(f64, u64, TwoPlane)>| {
        candidates
            .into_iter()
            .map(|(_, _, plane)| refine(&tensor, &j, plane.clone(), refine_steps, sign))
            .fold(None::<(f64, TwoPlane)>, |best, (k, plane)| match best {
                Some((bk, _)) if sign * bk >= sign * k => best,
                _ => Some((k, plane)),
            })
            .expect("at least one candidate")
    };
    let (nu_min, min_plane) = extreme(-1.0, scored.iter().take(take).collect());
    let (nu_max, max_plane) = extreme(1.0, scored.iter().rev().take(take).collect());

    Ok(AntiholoRange {
        nu_min,
        nu_max,
        min_plane: TwoPlane::new(f * min_plane.x, f * min_plane.y),
        max_plane: TwoPlane::new(f * max_plane.x, f * max_plane.y),
    })
}

/// Coordinate ascent of `sign * K` in Euclidean coordinates.
fn refine(
    r: &FourTensor,
    j: &DMatrix<f64>,
    mut plane: TwoPlane,
    steps: usize,
    sign: f64,
) -> (f64, TwoPlane) {
    for _ in 0..steps {
        // Move x with y fixed: K = x^T A x, A[(a,b)] = R(e_a, y, y, e_b).
        let a = symmetrize(r.middle_contraction(&plane.y, &plane.y));
        let jy = j * &plane.y;
        plane.x = extreme_in_complement(&a, &plane.x, &[plane.y.clone(), jy], sign);

        // Move y with x fixed: K = y^T B y, B[(a,b)] = R(x, e_a, e_b, x).
        let b = symmetrize(r.outer_contraction(&plane.x, &plane.x));
        let jx = j * &plane.x;
        plane.y = extreme_in_complement(&b, &plane.y, &[plane.x.clone(), jx], sign);

        plane = best_joint_turn(r, j, plane, sign);
    }
    (r.eval(&plane.x, &plane.y, &plane.y, &plane.x), plane)
}

/// The blockwise steps never leave the complex line through `x` in
/// dimension four, so they are complemented by the joint turn
/// `(x, y) -> (cos t x + sin t Jy, cos t y + sin t Jx)`, which also keeps the
/// plane antiholomorphic. `K` is `pi`-periodic in `t`; the best of a coarse
/// grid is polished by golden-section search.
fn best_joint_turn(r: &FourTensor, j: &DMatrix<f64>, plane: TwoPlane, sign: f64) -> TwoPlane {
    const GRID: usize = 16;
    let jx = j * &plane.x;
    let jy = j * &plane.y;
    let turned = |t: f64| {
        let (s, c) = t.sin_cos();
        TwoPlane::new(&plane.x * c + &jy * s, &plane.y * c + &jx * s)
    };
    let score = |t: f64| {
        let q = turned(t);
        sign * r.eval(&q.x, &q.y, &q.y, &q.x)
    };
    let step = std::f64::consts::PI / GRID as f64;
    let best_grid = (0..GRID)
        .map(|k| k as f64 * step)
        .max_by(|a, b| score(*a).total_cmp(&score(*b)))
        .expect("grid is non-empty");
    let (mut lo, mut hi) = (best_grid - step, best_grid + step);
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    let mut a = hi - phi * (hi - lo);
    let mut b = lo + phi * (hi - lo);
    let (mut fa, mut fb) = (score(a), score(b));
    for _ in 0..60 {
        if fa < fb {
            lo = a;
            a = b;
            fa = fb;
            b = lo + phi * (hi - lo);
            fb = score(b);
        } else {
            hi = b;
            b = a;
            fb = fa;
            a = hi - phi * (hi - lo);
            fa = score(a);
        }
    }
    let t = if fa > fb { a } else { b };
    if score(t) > score(0.0) {
        turned(t)
    } else {
        plane
    }
}

fn symmetrize(m: DMatrix<f64>) -> DMatrix<f64> {
    (&m + m.transpose()) * 0.5
}

/// Unit vector in the orthogonal complement of `fixed` extremising
/// `sign * v^T q v`: an extreme eigenvector of `q` compressed to that
/// complement. `v` is returned unchanged if it is already as good.
fn extreme_in_complement(
    q: &DMatrix<f64>,
    v: &DVector<f64>,
    fixed: &[DVector<f64>],
    sign: f64,
) -> DVector<f64> {
    let dim = v.len();
    let mut basis: Vec<DVector<f64>> = Vec::with_capacity(dim);
    let push = |w: &DVector<f64>, basis: &mut Vec<DVector<f64>>| {
        let mut u = w.clone();
        for _ in 0..2 {
            for e in basis.iter() {
                let c = e.dot(&u);
                u.axpy(-c, e, 1.0);
            }
        }
        let n = u.norm();
        if n > 1e-8 {
            basis.push(u / n);
        }
    };
    for w in fixed {
        push(w, &mut basis);
    }
    let fixed_count = basis.len();
    push(v, &mut basis);
    for i in 0..dim {
        let e = DVector::from_fn(dim, |k, _| if k == i { 1.0 } else { 0.0 });
        push(&e, &mut basis);
    }
    let b = DMatrix::from_columns(&basis[fixed_count..]);
    let compressed = b.transpose() * q * &b;
    let eig = compressed.symmetric_eigen();
    let best = (0..eig.eigenvalues.len())
        .max_by(|&i, &k| (sign * eig.eigenvalues[i]).total_cmp(&(sign * eig.eigenvalues[k])))
        .expect("complement is non-empty");
    let candidate = &b * eig.eigenvectors.column(best);
    let current = v.dot(&(q * v));
    if sign * candidate.dot(&(q * &candidate)) > sign * current {
        candidate
    } else {
        v.clone()
    }
}
