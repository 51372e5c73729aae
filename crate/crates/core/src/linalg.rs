//! Dense Gaussian elimination over a [`Scalar`] field.

use alloc::vec::Vec;

use crate::scalar::Scalar;

/// Row-reduce `m` in place to reduced row echelon form; returns pivot columns.
///
/// Entries with magnitude at most `tol` are treated as zero. Partial pivoting picks
/// the largest magnitude in each column, which is harmless for exact scalars.
pub fn rref<S: Scalar>(m: &mut [Vec<S>], tol: &S) -> Vec<usize> {
    let rows = m.len();
    let cols = if rows == 0 { 0 } else { m[0].len() };
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let mut best = r;
        for i in r + 1..rows {
            if m[i][c].abs() > m[best][c].abs() {
                best = i;
            }
        }
        if m[best][c].is_zero_tol(tol) {
            for row in m.iter_mut().skip(r) {
                row[c] = S::zero();
            }
            continue;
        }
        m.swap(r, best);
        let p = m[r][c].clone();
        for v in m[r].iter_mut() {
            *v = v.clone() / p.clone();
        }
        for i in 0..rows {
            if i == r || m[i][c] == S::zero() {
                continue;
            }
            let f = m[i][c].clone();
            for j in 0..cols {
                let delta = f.clone() * m[r][j].clone();
                m[i][j] -= delta;
            }
            m[i][c] = S::zero();
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank<S: Scalar>(m: &[Vec<S>], tol: &S) -> usize {
    let mut work = m.to_vec();
    rref(&mut work, tol).len()
}

/// Solve the square system `a x = b`; `None` when singular.
pub fn solve<S: Scalar>(a: &[Vec<S>], b: &[S], tol: &S) -> Option<Vec<S>> {
    let n = a.len();
    let mut aug: Vec<Vec<S>> = a
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let piv = rref(&mut aug, tol);
    if piv.len() < n || piv.iter().any(|&c| c >= n) {
        return None;
    }
    Some(aug.iter().map(|row| row[n].clone()).collect())
}

/// Least-squares solution of `a x ≈ b` through the normal equations.
///
/// Rank-deficient systems get the particular solution with free coordinates set to
/// zero. Returns the coefficients and the residual `a x − b`.
pub fn least_squares<S: Scalar>(a: &[Vec<S>], b: &[S], tol: &S) -> (Vec<S>, Vec<S>) {
    let rows = a.len();
    let cols = if rows == 0 { 0 } else { a[0].len() };
    let mut normal: Vec<Vec<S>> = (0..cols)
        .map(|i| {
            let mut row: Vec<S> = (0..cols)
                .map(|j| {
                    let mut s = S::zero();
                    for r in a {
                        s += r[i].clone() * r[j].clone();
                    }
                    s
                })
                .collect();
            let mut rhs = S::zero();
            for (r, bi) in a.iter().zip(b) {
                rhs += r[i].clone() * bi.clone();
            }
            row.push(rhs);
            row
        })
        .collect();
    let piv = rref(&mut normal, tol);
    let mut x = alloc::vec![S::zero(); cols];
    for (row, &c) in piv.iter().enumerate() {
        if c < cols {
            x[c] = normal[row][cols].clone();
        }
    }
    let residual = a
        .iter()
        .zip(b)
        .map(|(r, bi)| {
            let mut s = -bi.clone();
            for (aij, xj) in r.iter().zip(&x) {
                s += aij.clone() * xj.clone();
            }
            s
        })
        .collect();
    (x, residual)
}
