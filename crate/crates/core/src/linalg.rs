//! Exact linear algebra over ℚ for small dense matrices.

use num_rational::BigRational;
use num_traits::{One, Zero};

pub type Matrix = Vec<Vec<BigRational>>;

pub fn identity(n: usize) -> Matrix {
    (0..n).map(|i| (0..n).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }).collect()).collect()
}

/// Row-reduces a copy of `m` and returns (echelon form, pivot columns, sign of
/// the row permutation).
fn echelon(m: &Matrix) -> (Matrix, Vec<usize>, bool) {
    let mut a = m.clone();
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut negated = false;
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        if p != r {
            a.swap(p, r);
            negated = !negated;
        }
        for i in r + 1..rows {
            if a[i][c].is_zero() {
                continue;
            }
            let f = &a[i][c] / &a[r][c];
            for j in c..cols {
                let d = &f * &a[r][j];
                a[i][j] -= d;
            }
        }
        pivots.push(c);
        r += 1;
    }
    (a, pivots, negated)
}

pub fn rank(m: &Matrix) -> usize {
    echelon(m).1.len()
}

/// Pivot columns of the row echelon form, in increasing order.
pub fn pivot_columns(m: &Matrix) -> Vec<usize> {
    echelon(m).1
}

pub fn determinant(m: &Matrix) -> BigRational {
    let n = m.len();
    let (a, pivots, negated) = echelon(m);
    if pivots.len() < n {
        return BigRational::zero();
    }
    let mut d = BigRational::one();
    for (i, row) in a.iter().enumerate() {
        d *= &row[i];
    }
    if negated {
        -d
    } else {
        d
    }
}

/// Gauss-Jordan inverse; `None` when singular.
pub fn inverse(m: &Matrix) -> Option<Matrix> {
    let n = m.len();
    let mut a: Matrix = m
        .iter()
        .zip(identity(n))
        .map(|(row, id)| row.iter().cloned().chain(id).collect())
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&i| !a[i][c].is_zero())?;
        a.swap(p, c);
        let inv = BigRational::one() / &a[c][c];
        for v in a[c].iter_mut() {
            *v *= &inv;
        }
        for i in 0..n {
            if i == c || a[i][c].is_zero() {
                continue;
            }
            let f = a[i][c].clone();
            for j in 0..2 * n {
                let d = &f * &a[c][j];
                a[i][j] -= d;
            }
        }
    }
    Some(a.into_iter().map(|row| row[n..].to_vec()).collect())
}

pub fn mat_vec(m: &Matrix, v: &[BigRational]) -> Vec<BigRational> {
    m.iter().map(|row| row.iter().zip(v).fold(BigRational::zero(), |acc, (a, b)| acc + a * b)).collect()
}

pub fn mat_mul(a: &Matrix, b: &Matrix) -> Matrix {
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| (0..cols).map(|j| row.iter().zip(b).fold(BigRational::zero(), |acc, (x, brow)| acc + x * &brow[j])).collect())
        .collect()
}
