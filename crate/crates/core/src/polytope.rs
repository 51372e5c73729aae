//! Vertex enumeration of polytopes in equality and inequality form.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{rref, solve};
use crate::scalar::Scalar;

/// Reduced equality system with redundant rows removed.
#[derive(Debug, Clone)]
pub struct ReducedSystem<S> {
    pub a: Vec<Vec<S>>,
    pub b: Vec<S>,
}

/// Row-reduce `[A | b]`; fails with `Infeasible` when the system is inconsistent.
pub fn reduce_system<S: Scalar>(a: &[Vec<S>], b: &[S], tol: &S) -> Result<ReducedSystem<S>> {
    let cols = a.first().map_or(0, |r| r.len());
    let mut aug: Vec<Vec<S>> = a
        .iter()
        .zip(b)
        .map(|(r, bi)| {
            let mut row = r.clone();
            row.push(bi.clone());
            row
        })
        .collect();
    let piv = rref(&mut aug, tol);
    if piv.contains(&cols) {
        return Err(Error::Infeasible);
    }
    let rank = piv.len();
    aug.truncate(rank);
    let b = aug.iter_mut().map(|r| r.pop().unwrap()).collect();
    Ok(ReducedSystem { a: aug, b })
}

/// Advance `idx` to the next `k`-subset of `0..n` in lexicographic order.
pub fn next_combination(idx: &mut [usize], n: usize) -> bool {
    let k = idx.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if idx[i] < n - k + i {
            idx[i] += 1;
            for j in i + 1..k {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// All vertices of `{x ≥ 0 : A x = b}` in discovery order, duplicates removed.
///
/// Coordinates within `tol` of zero are clamped to zero.
pub fn enumerate_vertices<S: Scalar>(a: &[Vec<S>], b: &[S], tol: &S) -> Result<Vec<Vec<S>>> {
    let n = a.first().map_or(0, |r| r.len());
    let sys = reduce_system(a, b, tol)?;
    let r = sys.a.len();
    let mut out: Vec<Vec<S>> = Vec::new();
    if r == 0 {
        // no equality constraints: the orthant has the origin as its only vertex
        out.push(vec![S::zero(); n]);
        return Ok(out);
    }
    if r > n {
        return Ok(out);
    }
    let mut idx: Vec<usize> = (0..r).collect();
    let dedup_tol = S::tol(tol.to_f64().max(1e-12) * 100.0);
    loop {
        let sub: Vec<Vec<S>> = sys.a.iter().map(|row| idx.iter().map(|&j| row[j].clone()).collect()).collect();
        if let Some(xb) = solve(&sub, &sys.b, tol) {
            if xb.iter().all(|v| *v >= -tol.clone()) {
                let mut x = vec![S::zero(); n];
                for (&j, v) in idx.iter().zip(xb) {
                    x[j] = if v < S::zero() { S::zero() } else { v };
                }
                if !out.iter().any(|y| same_point(y, &x, &dedup_tol)) {
                    out.push(x);
                }
            }
        }
        if !next_combination(&mut idx, n) {
            break;
        }
    }
    Ok(out)
}

/// All vertices of `{x : A x = b, G x ≥ h}`, assuming the polytope is bounded.
///
/// A vertex solves the equalities together with `dim` tight inequalities, where `dim`
/// is the dimension left by the equalities; candidates violating any inequality by
/// more than `tol` are dropped and points within `dedup` of each other merged.
pub fn enumerate_vertices_ineq<S: Scalar>(a: &[Vec<S>], b: &[S], g: &[Vec<S>], h: &[S], tol: &S, dedup: &S) -> Result<Vec<Vec<S>>> {
    let n = a.first().or(g.first()).map_or(0, |r| r.len());
    let sys = if a.is_empty() { ReducedSystem { a: Vec::new(), b: Vec::new() } } else { reduce_system(a, b, tol)? };
    let dim = n - sys.a.len();
    let mut out: Vec<Vec<S>> = Vec::new();
    if dim > g.len() {
        return Ok(out);
    }
    let mut idx: Vec<usize> = (0..dim).collect();
    loop {
        let mut m = sys.a.clone();
        let mut rhs = sys.b.clone();
        for &i in &idx {
            m.push(g[i].clone());
            rhs.push(h[i].clone());
        }
        if let Some(x) = solve(&m, &rhs, tol) {
            let feasible = g.iter().zip(h).all(|(row, hi)| {
                let mut s = -hi.clone();
                for (gij, xj) in row.iter().zip(&x) {
                    s += gij.clone() * xj.clone();
                }
                s >= -tol.clone()
            });
            if feasible && !out.iter().any(|y| same_point(y, &x, dedup)) {
                out.push(x);
            }
        }
        if dim == 0 || !next_combination(&mut idx, g.len()) {
            break;
        }
    }
    Ok(out)
}

pub(crate) fn same_point<S: Scalar>(a: &[S], b: &[S], tol: &S) -> bool {
    a.iter().zip(b).all(|(x, y)| (x.clone() - y.clone()).abs() <= *tol)
}
