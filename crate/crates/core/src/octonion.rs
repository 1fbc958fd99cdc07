//! The seven-dimensional cross product from imaginary octonions.

use nalgebra::DVector;

/// Oriented Fano-plane lines `(i, j, k)`, zero-based: `e_i e_j = e_k` for the
/// imaginary octonion units. They are the cyclic shifts of `(0, 1, 3)` modulo
/// seven, i.e. `e_i e_{i+1} = e_{i+3}`.
pub const FANO_TRIPLES: [[usize; 3]; 7] = [
    [0, 1, 3],
    [1, 2, 4],
    [2, 3, 5],
    [3, 4, 6],
    [4, 5, 0],
    [5, 6, 1],
    [6, 0, 2],
];

/// Structure constant `eps(i, j, k)` of the cross product, totally
/// antisymmetric and equal to 1 on each oriented Fano line.
pub fn structure_constant(i: usize, j: usize, k: usize) -> f64 {
    for t in FANO_TRIPLES {
        for (a, b, c, sign) in [
            (t[0], t[1], t[2], 1.0),
            (t[1], t[2], t[0], 1.0),
            (t[2], t[0], t[1], 1.0),
            (t[1], t[0], t[2], -1.0),
            (t[0], t[2], t[1], -1.0),
            (t[2], t[1], t[0], -1.0),
        ] {
            if (i, j, k) == (a, b, c) {
                return sign;
            }
        }
    }
    0.0
}

/// `x × y` in `R^7`.
pub fn cross7(x: &[f64], y: &[f64]) -> [f64; 7] {
    assert!(x.len() == 7 && y.len() == 7, "cross7 needs 7-vectors");
    let mut out = [0.0; 7];
    for t in FANO_TRIPLES {
        let [i, j, k] = t;
        // Each line contributes to all three of its cyclic rotations.
        out[k] += x[i] * y[j] - x[j] * y[i];
        out[i] += x[j] * y[k] - x[k] * y[j];
        out[j] += x[k] * y[i] - x[i] * y[k];
    }
    out
}

pub fn cross7_vec(x: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
    DVector::from_row_slice(&cross7(x.as_slice(), y.as_slice()))
}
