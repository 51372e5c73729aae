//! Closed forms for the equiprobable 3-state market `S_0 = 2`, `S_T = (4, 2, 1)`.
//!
//! Its kernels are `ξ^u = (3u, 3 − 9u, 6u)` for `u ∈ [0, 1/3]`, and targets are
//! `F ∼ (x, y, z)` with `x < y < z`.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Sign of `2x − 3y + z`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    Neg,
    Zero,
    Pos,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThreeStateCase<S> {
    pub x: S,
    pub y: S,
    pub z: S,
    pub regime: Regime,
}

impl<S: Scalar> ThreeStateCase<S> {
    pub fn new(x: S, y: S, z: S) -> Result<Self> {
        if !(x < y && y < z) {
            return Err(Error::InvalidInput(format!("need x < y < z, got {:?}, {:?}, {:?}", x, y, z)));
        }
        let d = S::from_i64(2) * x.clone() - S::from_i64(3) * y.clone() + z.clone();
        let t = S::tol(1e-12);
        let regime = if d.abs() <= t {
            Regime::Zero
        } else if d > S::zero() {
            Regime::Pos
        } else {
            Regime::Neg
        };
        Ok(ThreeStateCase { x, y, z, regime })
    }

    fn lin(&self, a: i64, b: i64, c: i64, den: i64) -> S {
        (S::from_i64(a) * self.x.clone() + S::from_i64(b) * self.y.clone() + S::from_i64(c) * self.z.clone()) / S::from_i64(den)
    }

    fn zyx(&self) -> [S; 3] {
        [self.z.clone(), self.y.clone(), self.x.clone()]
    }
}

/// `ξ^u = (3u, 3 − 9u, 6u)`.
pub fn kernel<S: Scalar>(u: &S) -> Vec<S> {
    vec![S::from_i64(3) * u.clone(), S::from_i64(3) - S::from_i64(9) * u.clone(), S::from_i64(6) * u.clone()]
}

/// The `u` of a kernel `ξ^u`.
pub fn kernel_parameter<S: Scalar>(xi: &[S]) -> S {
    xi[0].clone() / S::from_i64(3)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table1<S> {
    pub maximin: S,
    pub cvx_maximin: S,
    pub cvx_minimax: S,
    pub minimax: S,
}

pub fn table1_values<S: Scalar>(case: &ThreeStateCase<S>) -> Table1<S> {
    let (common, minimax) = match case.regime {
        Regime::Pos => (case.lin(2, 1, 1, 4), case.lin(2, 0, 1, 3)),
        Regime::Zero => (case.y.clone(), case.y.clone()),
        Regime::Neg => (case.lin(2, 2, 1, 5), case.y.clone()),
    };
    Table1 { maximin: common.clone(), cvx_maximin: common.clone(), cvx_minimax: common, minimax }
}

/// A set of `u` values with open or closed ends.
#[derive(Debug, Clone, PartialEq)]
pub struct UInterval<S> {
    pub lo: S,
    pub hi: S,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

impl<S: Scalar> UInterval<S> {
    pub fn point(u: S) -> Self {
        UInterval { lo: u.clone(), hi: u, lo_closed: true, hi_closed: true }
    }

    pub fn closed(lo: S, hi: S) -> Self {
        UInterval { lo, hi, lo_closed: true, hi_closed: true }
    }

    pub fn open(lo: S, hi: S) -> Self {
        UInterval { lo, hi, lo_closed: false, hi_closed: false }
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, u: &S) -> bool {
        let above = if self.lo_closed { *u >= self.lo } else { *u > self.lo };
        let below = if self.hi_closed { *u <= self.hi } else { *u < self.hi };
        above && below
    }

    /// The closed endpoints plus the midpoint.
    pub fn samples(&self) -> Vec<S> {
        if self.is_point() {
            return vec![self.lo.clone()];
        }
        let mid = (self.lo.clone() + self.hi.clone()) / S::from_i64(2);
        let mut out = Vec::new();
        if self.lo_closed {
            out.push(self.lo.clone());
        }
        out.push(mid);
        if self.hi_closed {
            out.push(self.hi.clone());
        }
        out
    }
}

/// Payoffs on the segment from `payoff_from` to `payoff_to`, each paired with every
/// kernel `ξ^u`, `u ∈ kernels`.
#[derive(Debug, Clone, PartialEq)]
pub struct Family<S> {
    pub payoff_from: [S; 3],
    pub payoff_to: [S; 3],
    pub kernels: UInterval<S>,
}

impl<S: Scalar> Family<S> {
    fn fixed(z: [S; 3], kernels: UInterval<S>) -> Self {
        Family { payoff_from: z.clone(), payoff_to: z, kernels }
    }

    fn segment(from: [S; 3], to: [S; 3], u: S) -> Self {
        Family { payoff_from: from, payoff_to: to, kernels: UInterval::point(u) }
    }

    pub fn is_segment(&self) -> bool {
        self.payoff_from != self.payoff_to
    }

    /// `payoff_from + λ (payoff_to − payoff_from)`.
    pub fn payoff_at(&self, lambda: &S) -> [S; 3] {
        core::array::from_fn(|i| self.payoff_from[i].clone() + lambda.clone() * (self.payoff_to[i].clone() - self.payoff_from[i].clone()))
    }
}

/// Alternative optimizer families per problem.
#[derive(Debug, Clone, PartialEq)]
pub struct Table2<S> {
    pub maximin: Vec<Family<S>>,
    pub cvx_maximin: Vec<Family<S>>,
    pub cvx_minimax: Vec<Family<S>>,
    pub minimax: Vec<Family<S>>,
}

pub fn table2_optimizers<S: Scalar>(case: &ThreeStateCase<S>) -> Table2<S> {
    let (x, y, z) = (case.x.clone(), case.y.clone(), case.z.clone());
    let fifth = S::from_ratio(1, 5);
    let quarter = S::from_ratio(1, 4);
    let all_u = UInterval::closed(S::zero(), S::from_ratio(1, 3));
    let zyx = case.zyx();
    let yzx = [y.clone(), z.clone(), x.clone()];
    let zxy = [z.clone(), x.clone(), y.clone()];
    let xyz = [x.clone(), y.clone(), z.clone()];
    match case.regime {
        Regime::Pos => Table2 {
            maximin: vec![Family::fixed(zyx.clone(), UInterval::point(quarter.clone())), Family::fixed(yzx.clone(), UInterval::point(quarter.clone()))],
            cvx_maximin: vec![Family::segment(zyx.clone(), yzx, quarter)],
            cvx_minimax: vec![Family::fixed([case.lin(-2, 3, 3, 4), case.lin(2, 1, 1, 4), x], all_u)],
            minimax: vec![Family::fixed(zyx, UInterval::point(S::from_ratio(1, 3)))],
        },
        Regime::Zero => Table2 {
            maximin: vec![
                Family::fixed(zxy.clone(), UInterval::point(fifth.clone())),
                Family::fixed(yzx.clone(), UInterval::point(quarter.clone())),
                Family::fixed(zyx.clone(), UInterval::closed(fifth.clone(), quarter.clone())),
            ],
            cvx_maximin: vec![
                Family::fixed(zyx.clone(), UInterval::open(fifth.clone(), quarter.clone())),
                Family::segment(zyx.clone(), yzx, quarter),
                Family::segment(zyx.clone(), zxy, fifth),
            ],
            cvx_minimax: vec![Family::fixed(zyx.clone(), all_u.clone())],
            minimax: vec![Family::fixed(zyx, all_u)],
        },
        Regime::Neg => {
            let sub = case.lin(1, -3, 2, 1);
            let t = S::tol(1e-12);
            let xi0 = UInterval::point(S::zero());
            let minimax = if sub > t {
                vec![Family::fixed(zyx.clone(), xi0)]
            } else if sub.abs() <= t {
                vec![Family::fixed(xyz, all_u.clone()), Family::fixed(zyx.clone(), xi0)]
            } else {
                vec![Family::fixed(xyz, xi0.clone()), Family::fixed(zyx.clone(), xi0)]
            };
            Table2 {
                maximin: vec![Family::fixed(zxy.clone(), UInterval::point(fifth.clone())), Family::fixed(zyx.clone(), UInterval::point(fifth.clone()))],
                cvx_maximin: vec![Family::segment(zyx, zxy, fifth)],
                cvx_minimax: vec![Family::fixed([z, case.lin(2, 2, 1, 5), case.lin(3, 3, -1, 5)], all_u)],
                minimax,
            }
        }
    }
}

/// The `z` making `(x, y, z)` perfectly cost-efficient: `3y − 2x`.
pub fn perfect_ce_family<S: Scalar>(x: &S, y: &S) -> S {
    S::from_i64(3) * y.clone() - S::from_i64(2) * x.clone()
}

/// `Z_1 − 3Z_2 + 2Z_3`, zero exactly on attainable payoffs.
pub fn attainability_functional<S: Scalar>(z: &[S]) -> S {
    z[0].clone() - S::from_i64(3) * z[1].clone() + S::from_i64(2) * z[2].clone()
}

/// Branches of the anti-monotone coupling as a function of `u`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KkmBranch {
    BelowFifth,
    AtFifth,
    Between,
    AtQuarter,
    AboveQuarter,
}

impl KkmBranch {
    pub const ALL: [KkmBranch; 5] = [KkmBranch::BelowFifth, KkmBranch::AtFifth, KkmBranch::Between, KkmBranch::AtQuarter, KkmBranch::AboveQuarter];

    pub fn of<S: Scalar>(u: &S) -> Self {
        let fifth = S::from_ratio(1, 5);
        let quarter = S::from_ratio(1, 4);
        if *u < fifth {
            KkmBranch::BelowFifth
        } else if *u == fifth {
            KkmBranch::AtFifth
        } else if *u < quarter {
            KkmBranch::Between
        } else if *u == quarter {
            KkmBranch::AtQuarter
        } else {
            KkmBranch::AboveQuarter
        }
    }

    fn range<S: Scalar>(self) -> UInterval<S> {
        let fifth = S::from_ratio(1, 5);
        let quarter = S::from_ratio(1, 4);
        match self {
            KkmBranch::BelowFifth => UInterval::open(S::zero(), fifth),
            KkmBranch::AtFifth => UInterval::point(fifth),
            KkmBranch::Between => UInterval::open(fifth, quarter),
            KkmBranch::AtQuarter => UInterval::point(quarter),
            KkmBranch::AboveQuarter => UInterval::open(quarter, S::from_ratio(1, 3)),
        }
    }

    /// `(a, b)` with `e(s, u) = a + b s` on this branch.
    fn coefficients<S: Scalar>(self, c: &ThreeStateCase<S>) -> (S, S) {
        let two = S::from_i64(2);
        match self {
            KkmBranch::BelowFifth => (c.x.clone(), c.lin(-3, 2, 1, 1)),
            KkmBranch::AtFifth => {
                let m = (c.x.clone() + c.y.clone()) / two;
                (m.clone(), c.z.clone() - m)
            }
            KkmBranch::Between => (c.y.clone(), c.lin(2, -3, 1, 1)),
            KkmBranch::AtQuarter => ((c.y.clone() + c.z.clone()) / two, c.lin(2, -1, -1, 1)),
            KkmBranch::AboveQuarter => (c.z.clone(), c.lin(2, 1, -3, 1)),
        }
    }
}

/// `e(s, u)`: the price under `ξ^s` of the anti-monotone (randomized) coupling at `ξ^u`.
pub fn kkm_e<S: Scalar>(case: &ThreeStateCase<S>, s: &S, u: &S) -> S {
    let (a, b) = KkmBranch::of(u).coefficients(case);
    a + b * s.clone()
}

/// The closure of `B(ξ^s) = {u : e(s, u) ≤ e(u, u)}`.
pub fn kkm_set<S: Scalar>(case: &ThreeStateCase<S>, s: &S) -> Result<UInterval<S>> {
    let mut pieces: Vec<(S, S)> = Vec::new();
    for branch in KkmBranch::ALL {
        let r: UInterval<S> = branch.range();
        let (_, b) = branch.coefficients(case);
        // e(s,u) ≤ e(u,u) reduces to b s ≤ b u on the branch
        let (lo, hi) = if b > S::zero() {
            (S::max_of(r.lo.clone(), s.clone()), r.hi.clone())
        } else if b < S::zero() {
            (r.lo.clone(), S::min_of(r.hi.clone(), s.clone()))
        } else {
            (r.lo.clone(), r.hi.clone())
        };
        let nonempty = if r.is_point() { lo <= hi } else { lo < hi || (lo == hi && r.contains(&lo)) };
        if nonempty {
            pieces.push((lo, hi));
        }
    }
    if pieces.is_empty() {
        return Err(Error::InternalInconsistency(String::from("empty KKM set")));
    }
    pieces.sort_by(|a, b| crate::orders::cmp(&a.0, &b.0));
    let (lo, mut hi) = pieces[0].clone();
    for (a, b) in pieces.into_iter().skip(1) {
        if a > hi {
            return Err(Error::InternalInconsistency(String::from("KKM set is not an interval")));
        }
        hi = S::max_of(hi, b);
    }
    Ok(UInterval::closed(lo, hi))
}

/// `⋂_s B(ξ^s)` over the grid `s = k / (3m)`, `k = 1, …, m − 1`.
pub fn kkm_intersection<S: Scalar>(case: &ThreeStateCase<S>, m: usize) -> Result<UInterval<S>> {
    let den = 3 * m as i64;
    let mut acc = UInterval::closed(S::zero(), S::from_ratio(1, 3));
    for k in 1..m as i64 {
        let b = kkm_set(case, &S::from_ratio(k, den))?;
        acc.lo = S::max_of(acc.lo, b.lo);
        acc.hi = S::min_of(acc.hi, b.hi);
        if acc.lo > acc.hi {
            return Err(Error::InternalInconsistency(String::from("empty KKM intersection")));
        }
    }
    Ok(acc)
}
