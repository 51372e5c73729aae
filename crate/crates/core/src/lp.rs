//! Dense two-phase simplex with Bland's rule.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone)]
pub struct Constraint<S> {
    pub coeffs: Vec<S>,
    pub rel: Relation,
    pub rhs: S,
}

/// `max`/`min` of `objective · x` subject to linear constraints.
///
/// Variables are nonnegative unless marked free.
#[derive(Debug, Clone)]
pub struct LinearProgram<S> {
    pub objective: Vec<S>,
    pub maximize: bool,
    pub constraints: Vec<Constraint<S>>,
    pub free: Vec<bool>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution<S> {
    pub x: Vec<S>,
    pub value: S,
}

impl<S: Scalar> LinearProgram<S> {
    pub fn maximize(objective: Vec<S>) -> Self {
        let n = objective.len();
        LinearProgram { objective, maximize: true, constraints: Vec::new(), free: vec![false; n] }
    }

    pub fn minimize(objective: Vec<S>) -> Self {
        let mut lp = Self::maximize(objective);
        lp.maximize = false;
        lp
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn set_free(&mut self, j: usize) -> &mut Self {
        self.free[j] = true;
        self
    }

    pub fn add(&mut self, coeffs: Vec<S>, rel: Relation, rhs: S) -> &mut Self {
        debug_assert_eq!(coeffs.len(), self.num_vars());
        self.constraints.push(Constraint { coeffs, rel, rhs });
        self
    }

    /// Solve; `tol` is the pivot and optimality threshold (zero for exact scalars).
    pub fn solve(&self, tol: &S) -> Result<LpSolution<S>> {
        let n = self.num_vars();
        // column map: original var j -> (pos column, optional neg column)
        let mut col_of = Vec::with_capacity(n);
        let mut ncols = 0;
        for j in 0..n {
            if self.free[j] {
                col_of.push((ncols, Some(ncols + 1)));
                ncols += 2;
            } else {
                col_of.push((ncols, None));
                ncols += 1;
            }
        }
        let structural = ncols;
        let m = self.constraints.len();
        let mut rows: Vec<(Vec<S>, Relation, S)> = Vec::with_capacity(m);
        for c in &self.constraints {
            let mut row = vec![S::zero(); structural];
            for (j, a) in c.coeffs.iter().enumerate() {
                let (p, q) = col_of[j];
                row[p] = a.clone();
                if let Some(q) = q {
                    row[q] = -a.clone();
                }
            }
            let (row, rel, rhs) = if c.rhs < S::zero() {
                let rel = match c.rel {
                    Relation::Le => Relation::Ge,
                    Relation::Ge => Relation::Le,
                    Relation::Eq => Relation::Eq,
                };
                (row.into_iter().map(|v| -v).collect(), rel, -c.rhs.clone())
            } else {
                (row, c.rel, c.rhs.clone())
            };
            rows.push((row, rel, rhs));
        }
        let n_slack = rows.iter().filter(|r| r.1 != Relation::Eq).count();
        let n_art = rows.iter().filter(|r| r.1 != Relation::Le).count();
        let total = structural + n_slack + n_art;
        let art_start = structural + n_slack;
        let mut tab: Vec<Vec<S>> = Vec::with_capacity(m);
        let mut basis = Vec::with_capacity(m);
        let (mut next_slack, mut next_art) = (structural, art_start);
        for (row, rel, rhs) in rows {
            let mut t = row;
            t.resize(total + 1, S::zero());
            t[total] = rhs;
            match rel {
                Relation::Le => {
                    t[next_slack] = S::one();
                    basis.push(next_slack);
                    next_slack += 1;
                }
                Relation::Ge => {
                    t[next_slack] = -S::one();
                    next_slack += 1;
                    t[next_art] = S::one();
                    basis.push(next_art);
                    next_art += 1;
                }
                Relation::Eq => {
                    t[next_art] = S::one();
                    basis.push(next_art);
                    next_art += 1;
                }
            }
            tab.push(t);
        }
        let mut allowed = vec![true; total];
        if n_art > 0 {
            let mut cost = vec![S::zero(); total];
            for c in cost.iter_mut().skip(art_start) {
                *c = -S::one();
            }
            run_simplex(&mut tab, &mut basis, &cost, &allowed, tol)?;
            let mut infeas = S::zero();
            for (i, &b) in basis.iter().enumerate() {
                if b >= art_start {
                    infeas += tab[i][total].clone();
                }
            }
            let feas_tol = S::tol(tol.to_f64().max(1e-12) * 10.0);
            if infeas > feas_tol {
                return Err(Error::Infeasible);
            }
            for a in allowed.iter_mut().skip(art_start) {
                *a = false;
            }
            // drive zero-level artificials out of the basis, dropping redundant rows
            let mut i = 0;
            while i < tab.len() {
                if basis[i] >= art_start {
                    let col = (0..art_start).find(|&j| !tab[i][j].is_zero_tol(tol));
                    match col {
                        Some(j) => pivot(&mut tab, &mut basis, i, j),
                        None => {
                            tab.remove(i);
                            basis.remove(i);
                            continue;
                        }
                    }
                }
                i += 1;
            }
        }
        let mut cost = vec![S::zero(); total];
        for j in 0..n {
            let c = if self.maximize { self.objective[j].clone() } else { -self.objective[j].clone() };
            let (p, q) = col_of[j];
            cost[p] = c.clone();
            if let Some(q) = q {
                cost[q] = -c;
            }
        }
        run_simplex(&mut tab, &mut basis, &cost, &allowed, tol)?;
        let mut xs = vec![S::zero(); total];
        for (i, &b) in basis.iter().enumerate() {
            xs[b] = tab[i][total].clone();
        }
        let x: Vec<S> = col_of
            .iter()
            .map(|&(p, q)| match q {
                Some(q) => xs[p].clone() - xs[q].clone(),
                None => xs[p].clone(),
            })
            .collect();
        let mut value = S::zero();
        for (c, v) in self.objective.iter().zip(&x) {
            value += c.clone() * v.clone();
        }
        Ok(LpSolution { x, value })
    }
}

fn pivot<S: Scalar>(tab: &mut [Vec<S>], basis: &mut [usize], r: usize, c: usize) {
    let p = tab[r][c].clone();
    for v in tab[r].iter_mut() {
        *v = v.clone() / p.clone();
    }
    let width = tab[r].len();
    for i in 0..tab.len() {
        if i == r || tab[i][c] == S::zero() {
            continue;
        }
        let f = tab[i][c].clone();
        for j in 0..width {
            let delta = f.clone() * tab[r][j].clone();
            tab[i][j] -= delta;
        }
        tab[i][c] = S::zero();
    }
    basis[r] = c;
}

/// Maximize `cost · x` from the current basic feasible tableau.
fn run_simplex<S: Scalar>(
    tab: &mut [Vec<S>],
    basis: &mut [usize],
    cost: &[S],
    allowed: &[bool],
    tol: &S,
) -> Result<()> {
    let total = cost.len();
    let limit = 50_000;
    for _ in 0..limit {
        // Bland: lowest-index column with positive reduced cost
        let mut entering = None;
        for j in 0..total {
            if !allowed[j] || basis.contains(&j) {
                continue;
            }
            let mut d = cost[j].clone();
            for (i, &b) in basis.iter().enumerate() {
                d -= cost[b].clone() * tab[i][j].clone();
            }
            if d > *tol {
                entering = Some(j);
                break;
            }
        }
        let Some(c) = entering else { return Ok(()) };
        let mut leave: Option<(usize, S)> = None;
        for i in 0..tab.len() {
            let a = tab[i][c].clone();
            if a <= *tol {
                continue;
            }
            let ratio = tab[i][total].clone() / a;
            leave = match leave {
                None => Some((i, ratio)),
                Some((bi, br)) => {
                    if ratio < br || (ratio == br && basis[i] < basis[bi]) {
                        Some((i, ratio))
                    } else {
                        Some((bi, br))
                    }
                }
            };
        }
        let Some((r, _)) = leave else { return Err(Error::Unbounded) };
        pivot(tab, basis, r, c);
    }
    Err(Error::InternalInconsistency(alloc::string::String::from("simplex iteration limit")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    #[test]
    fn textbook_maximum() {
        // max 3x + 5y, x <= 4, 2y <= 12, 3x + 2y <= 18 -> (2, 6), 36
        let mut lp = LinearProgram::maximize(vec![q(3, 1), q(5, 1)]);
        lp.add(vec![q(1, 1), q(0, 1)], Relation::Le, q(4, 1))
            .add(vec![q(0, 1), q(2, 1)], Relation::Le, q(12, 1))
            .add(vec![q(3, 1), q(2, 1)], Relation::Le, q(18, 1));
        let s = lp.solve(&Rational::tol(0.0)).unwrap();
        assert_eq!(s.x, vec![q(2, 1), q(6, 1)]);
        assert_eq!(s.value, q(36, 1));
    }

    #[test]
    fn equality_and_free_variables() {
        // min t s.t. t >= x, t >= -x, x = -3/2, t free, x free
        let mut lp = LinearProgram::minimize(vec![q(1, 1), q(0, 1)]);
        lp.set_free(0).set_free(1);
        lp.add(vec![q(1, 1), q(-1, 1)], Relation::Ge, q(0, 1))
            .add(vec![q(1, 1), q(1, 1)], Relation::Ge, q(0, 1))
            .add(vec![q(0, 1), q(1, 1)], Relation::Eq, q(-3, 2));
        let s = lp.solve(&Rational::tol(0.0)).unwrap();
        assert_eq!(s.value, q(3, 2));
        assert_eq!(s.x[1], q(-3, 2));
    }

    #[test]
    fn detects_infeasible_and_unbounded() {
        let mut lp = LinearProgram::maximize(vec![1.0]);
        lp.add(vec![1.0], Relation::Le, 1.0).add(vec![1.0], Relation::Ge, 2.0);
        assert_eq!(lp.solve(&1e-10), Err(Error::Infeasible));
        let mut lp = LinearProgram::maximize(vec![1.0, 0.0]);
        lp.add(vec![1.0, -1.0], Relation::Le, 1.0);
        assert_eq!(lp.solve(&1e-10), Err(Error::Unbounded));
    }

    #[test]
    fn redundant_equalities_are_dropped() {
        let mut lp = LinearProgram::maximize(vec![1.0, 2.0]);
        lp.add(vec![1.0, 1.0], Relation::Eq, 1.0).add(vec![2.0, 2.0], Relation::Eq, 2.0);
        let s = lp.solve(&1e-10).unwrap();
        assert!((s.value - 2.0).abs() < 1e-12);
    }

    #[test]
    fn degenerate_problem_terminates() {
        // classic cycling example under the largest-coefficient rule
        let mut lp = LinearProgram::maximize(vec![q(3, 4), q(-150, 1), q(1, 50), q(-6, 1)]);
        lp.add(vec![q(1, 4), q(-60, 1), q(-1, 25), q(9, 1)], Relation::Le, q(0, 1))
            .add(vec![q(1, 2), q(-90, 1), q(-1, 50), q(3, 1)], Relation::Le, q(0, 1))
            .add(vec![q(0, 1), q(0, 1), q(1, 1), q(0, 1)], Relation::Le, q(1, 1));
        let s = lp.solve(&Rational::tol(0.0)).unwrap();
        assert_eq!(s.value, q(1, 20));
    }
}
