//! Stochastic orders and anti-monotone couplings for equiprobable distributions.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use num_integer::Integer;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Equiprobable distribution given by its atoms in ascending order.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteDistribution<S> {
    values: Vec<S>,
}

pub(crate) fn cmp<S: Scalar>(a: &S, b: &S) -> Ordering {
    a.partial_cmp(b).unwrap_or(Ordering::Equal)
}

impl<S: Scalar> DiscreteDistribution<S> {
    /// Atoms in any order; they are sorted.
    pub fn new(mut values: Vec<S>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidInput(String::from("a distribution needs at least one atom")));
        }
        if values.iter().any(|v| !v.to_f64().is_finite()) {
            return Err(Error::InvalidInput(String::from("atoms must be finite")));
        }
        values.sort_by(cmp);
        Ok(DiscreteDistribution { values })
    }

    /// Ascending atoms.
    pub fn values(&self) -> &[S] {
        &self.values
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn descending(&self) -> Vec<S> {
        self.values.iter().rev().cloned().collect()
    }

    pub fn mean(&self) -> S {
        let mut s = S::zero();
        for v in &self.values {
            s += v.clone();
        }
        s / S::from_i64(self.n() as i64)
    }

    pub fn min(&self) -> S {
        self.values[0].clone()
    }

    pub fn max(&self) -> S {
        self.values[self.n() - 1].clone()
    }

    /// Same law with every atom split into `k` atoms.
    pub fn refine(&self, k: usize) -> Self {
        let values = self.values.iter().flat_map(|v| core::iter::repeat(v.clone()).take(k)).collect();
        DiscreteDistribution { values }
    }

    /// Whether some atoms coincide (within `tol`).
    pub fn has_ties(&self, tol: &S) -> bool {
        self.values.windows(2).any(|w| (w[1].clone() - w[0].clone()) <= *tol)
    }
}

/// Split both distributions to the least common number of atoms.
pub fn common_refinement<S: Scalar>(a: &DiscreteDistribution<S>, b: &DiscreteDistribution<S>) -> (DiscreteDistribution<S>, DiscreteDistribution<S>) {
    let l = a.n().lcm(&b.n());
    (a.refine(l / a.n()), b.refine(l / b.n()))
}

fn top_sums<S: Scalar>(d: &DiscreteDistribution<S>) -> Vec<S> {
    let mut acc = S::zero();
    d.values
        .iter()
        .rev()
        .map(|v| {
            acc += v.clone();
            acc.clone()
        })
        .collect()
}

fn bottom_sums<S: Scalar>(d: &DiscreteDistribution<S>) -> Vec<S> {
    let mut acc = S::zero();
    d.values
        .iter()
        .map(|v| {
            acc += v.clone();
            acc.clone()
        })
        .collect()
}

/// `A ⪯_cx B`: equal means and every k-largest sum of `A` at most that of `B`.
pub fn convex_order_leq<S: Scalar>(a: &DiscreteDistribution<S>, b: &DiscreteDistribution<S>, tol: &S) -> bool {
    let (a, b) = common_refinement(a, b);
    let (ta, tb) = (top_sums(&a), top_sums(&b));
    let n = ta.len();
    if (ta[n - 1].clone() - tb[n - 1].clone()).abs() > tol.clone() * S::from_i64(n as i64) {
        return false;
    }
    ta.iter().zip(&tb).all(|(x, y)| *x <= y.clone() + tol.clone())
}

/// First-order dominance of `B` over `A`: sorted atoms of `A` pairwise at most those of `B`.
pub fn fsd_leq<S: Scalar>(a: &DiscreteDistribution<S>, b: &DiscreteDistribution<S>, tol: &S) -> bool {
    let (a, b) = common_refinement(a, b);
    a.values.iter().zip(&b.values).all(|(x, y)| *x <= y.clone() + tol.clone())
}

/// Second-order dominance of `B` over `A` (every concave nondecreasing utility
/// weakly prefers `B`): ascending partial sums of `A` at most those of `B`.
pub fn ssd_leq<S: Scalar>(a: &DiscreteDistribution<S>, b: &DiscreteDistribution<S>, tol: &S) -> bool {
    let (a, b) = common_refinement(a, b);
    bottom_sums(&a).iter().zip(&bottom_sums(&b)).all(|(x, y)| *x <= y.clone() + tol.clone())
}

/// Membership of the payoff `z` in the convex hull of the permutations of `F`.
pub fn conv_hull_member<S: Scalar>(z: &[S], f: &DiscreteDistribution<S>, tol: &S) -> bool {
    if z.len() != f.n() {
        return false;
    }
    match DiscreteDistribution::new(z.to_vec()) {
        Ok(dz) => convex_order_leq(&dz, f, tol),
        Err(_) => false,
    }
}

/// Rearrange `v` into the next lexicographically larger permutation; returns
/// `false` (leaving `v` sorted ascending) after the last one. Repeated values
/// yield each distinct arrangement once.
pub fn next_permutation<S: Scalar>(v: &mut [S]) -> bool {
    let n = v.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        v.reverse();
        return false;
    }
    let mut j = n - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// Number of distinct arrangements of the atoms of `f`, saturating at `usize::MAX`.
pub fn distinct_permutation_count<S: Scalar>(f: &DiscreteDistribution<S>) -> usize {
    let mut count: u128 = 1;
    let mut run = 0u128;
    let mut placed = 0u128;
    for (k, v) in f.values.iter().enumerate() {
        if k > 0 && *v == f.values[k - 1] {
            run += 1;
        } else {
            run = 1;
        }
        placed += 1;
        count = count * placed / run;
        if count > usize::MAX as u128 {
            return usize::MAX;
        }
    }
    count as usize
}

/// All anti-monotone arrangements of `F` against a kernel, with uniform weights.
#[derive(Debug, Clone, PartialEq)]
pub struct TransformedQuantilePayoff<S> {
    pub assignments: Vec<(Vec<S>, S)>,
    pub kernel: Vec<S>,
    /// `(1/n) Σ ξ_(k) F_(n+1−k)`, shared by every assignment.
    pub price: S,
}

impl<S: Scalar> TransformedQuantilePayoff<S> {
    pub fn payoffs(&self) -> impl Iterator<Item = &Vec<S>> {
        self.assignments.iter().map(|(z, _)| z)
    }
}

/// Indices of `xi` in ascending order, grouped into blocks of tied values.
pub(crate) fn tie_blocks<S: Scalar>(xi: &[S], tol: &S) -> (Vec<usize>, Vec<(usize, usize)>) {
    let mut order: Vec<usize> = (0..xi.len()).collect();
    order.sort_by(|&i, &j| cmp(&xi[i], &xi[j]));
    let mut blocks = Vec::new();
    let mut start = 0;
    for k in 1..=order.len() {
        if k == order.len() || (xi[order[k]].clone() - xi[order[k - 1]].clone()) > *tol {
            blocks.push((start, k));
            start = k;
        }
    }
    (order, blocks)
}

/// The minimal price `min_σ (1/n) Σ ξ_i F_σ(i)` and one minimizing arrangement.
pub fn antimonotone_price<S: Scalar>(f: &DiscreteDistribution<S>, xi: &[S]) -> (S, Vec<S>) {
    let mut order: Vec<usize> = (0..xi.len()).collect();
    order.sort_by(|&i, &j| cmp(&xi[i], &xi[j]));
    let desc = f.descending();
    let mut z = vec![S::zero(); xi.len()];
    let mut s = S::zero();
    for (k, &i) in order.iter().enumerate() {
        z[i] = desc[k].clone();
        s += xi[i].clone() * desc[k].clone();
    }
    (s / S::from_i64(xi.len() as i64), z)
}

/// Every deterministic arrangement of `F` that is anti-monotone against `xi`.
///
/// Within a block of tied kernel values the matching atoms may be permuted freely;
/// each distinct arrangement receives equal weight.
pub fn antimonotone_couplings<S: Scalar>(f: &DiscreteDistribution<S>, xi: &[S], tol: &S) -> Result<TransformedQuantilePayoff<S>> {
    let n = f.n();
    if xi.len() != n {
        return Err(Error::InvalidInput(String::from("kernel and distribution sizes differ")));
    }
    let (order, blocks) = tie_blocks(xi, tol);
    let desc = f.descending();
    let (price, _) = antimonotone_price(f, xi);
    // per block: the sorted multiset of atoms, iterated through its permutations
    let mut states: Vec<Vec<S>> = blocks
        .iter()
        .map(|&(a, b)| {
            let mut atoms = desc[a..b].to_vec();
            atoms.sort_by(cmp);
            atoms
        })
        .collect();
    let mut payoffs = Vec::new();
    loop {
        let mut z = vec![S::zero(); n];
        for (bi, &(a, _)) in blocks.iter().enumerate() {
            for (k, v) in states[bi].iter().enumerate() {
                z[order[a + k]] = v.clone();
            }
        }
        payoffs.push(z);
        // odometer over blocks
        let mut advanced = false;
        for st in states.iter_mut().rev() {
            if next_permutation(st) {
                advanced = true;
                break;
            }
        }
        if !advanced {
            break;
        }
    }
    let w = S::one() / S::from_i64(payoffs.len() as i64);
    Ok(TransformedQuantilePayoff {
        assignments: payoffs.into_iter().map(|z| (z, w.clone())).collect(),
        kernel: xi.to_vec(),
        price,
    })
}

/// Whether `z` is an anti-monotone arrangement of its atoms against `xi`:
/// `ξ_i < ξ_j` forces `z_i ≥ z_j`.
pub fn is_antimonotone<S: Scalar>(z: &[S], xi: &[S], tol: &S) -> bool {
    for i in 0..z.len() {
        for j in 0..z.len() {
            if xi[i].clone() + tol.clone() < xi[j] && z[i].clone() + tol.clone() < z[j] {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::{LinearProgram, Relation};
    use crate::scalar::Rational;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    fn dist(v: &[(i64, i64)]) -> DiscreteDistribution<Rational> {
        DiscreteDistribution::new(v.iter().map(|&(n, d)| q(n, d)).collect()).unwrap()
    }

    fn ints(v: &[i64]) -> DiscreteDistribution<Rational> {
        DiscreteDistribution::new(v.iter().map(|&x| q(x, 1)).collect()).unwrap()
    }

    fn zero() -> Rational {
        q(0, 1)
    }

    #[test]
    fn convex_order_examples() {
        assert!(convex_order_leq(&ints(&[2, 2, 2]), &ints(&[1, 2, 3]), &zero()));
        assert!(convex_order_leq(&dist(&[(6, 5), (9, 5), (3, 1)]), &ints(&[1, 2, 3]), &zero()));
        let a = dist(&[(6, 5), (22, 25), (18, 25)]);
        let b = dist(&[(3, 5), (1, 1), (6, 5)]);
        assert!(convex_order_leq(&a, &b, &zero()));
        assert!(!convex_order_leq(&b, &a, &zero()));
    }

    #[test]
    fn unequal_sizes_use_common_refinement() {
        let a = ints(&[2]);
        let b = ints(&[1, 2, 3]);
        assert!(convex_order_leq(&a, &b, &zero()));
        let c = ints(&[1, 3]);
        let d = ints(&[0, 2, 2, 4]);
        assert!(convex_order_leq(&c, &d, &zero()));
        assert!(!convex_order_leq(&d, &c, &zero()));
    }

    #[test]
    fn dominance_examples() {
        assert!(fsd_leq(&ints(&[1, 2, 3]), &ints(&[2, 3, 4]), &zero()));
        let a = ints(&[1, 2, 3]);
        let b = ints(&[0, 2, 5]);
        assert!(!fsd_leq(&a, &b, &zero()));
        // ascending partial sums (1,3,6) vs (0,2,7): neither direction dominates
        assert!(!ssd_leq(&a, &b, &zero()));
        assert!(!ssd_leq(&b, &a, &zero()));
        assert!(fsd_leq(&a, &a, &zero()) && ssd_leq(&a, &a, &zero()));
    }

    /// E[min(X, t)] over the atom grid: the extreme concave nondecreasing tests.
    fn ssd_oracle(a: &DiscreteDistribution<Rational>, b: &DiscreteDistribution<Rational>) -> bool {
        let (a, b) = common_refinement(a, b);
        let grid: Vec<Rational> = a.values().iter().chain(b.values()).cloned().collect();
        grid.iter().all(|t| {
            let ea: Rational = a.values().iter().map(|x| if x < t { *x } else { *t }).sum();
            let eb: Rational = b.values().iter().map(|x| if x < t { *x } else { *t }).sum();
            ea <= eb
        })
    }

    #[test]
    fn ssd_matches_brute_force_on_example() {
        let a = ints(&[1, 2, 3]);
        let b = ints(&[0, 2, 5]);
        assert_eq!(ssd_leq(&a, &b, &zero()), ssd_oracle(&a, &b));
        assert_eq!(ssd_leq(&b, &a, &zero()), ssd_oracle(&b, &a));
    }

    #[test]
    fn hull_membership_examples() {
        let f = ints(&[1, 2, 3]);
        assert!(conv_hull_member(&[q(3, 1), q(9, 5), q(6, 5)], &f, &zero()));
        assert!(!conv_hull_member(&[q(0, 1), q(3, 1), q(3, 1)], &f, &zero()));
        let mut p = f.values().to_vec();
        loop {
            assert!(conv_hull_member(&p, &f, &zero()));
            if !next_permutation(&mut p) {
                break;
            }
        }
    }

    #[test]
    fn couplings_examples() {
        let f = ints(&[1, 2, 3]);
        let xi = [q(3, 5), q(6, 5), q(6, 5)];
        let t = antimonotone_couplings(&f, &xi, &zero()).unwrap();
        assert_eq!(t.price, q(9, 5));
        let zs: Vec<_> = t.payoffs().cloned().collect();
        assert_eq!(zs.len(), 2);
        assert!(zs.contains(&vec![q(3, 1), q(1, 1), q(2, 1)]));
        assert!(zs.contains(&vec![q(3, 1), q(2, 1), q(1, 1)]));
        assert!(t.assignments.iter().all(|(_, w)| *w == q(1, 2)));

        let t = antimonotone_couplings(&f, &[q(1, 2), q(1, 1), q(3, 2)], &zero()).unwrap();
        assert_eq!(t.assignments.len(), 1);
        assert_eq!(t.assignments[0].0, vec![q(3, 1), q(2, 1), q(1, 1)]);

        let t = antimonotone_couplings(&f, &[q(1, 1), q(1, 1), q(1, 1)], &zero()).unwrap();
        assert_eq!(t.assignments.len(), 6);
        assert_eq!(t.price, q(2, 1));
        assert!(t.assignments.iter().all(|(_, w)| *w == q(1, 6)));
    }

    #[test]
    fn couplings_with_repeated_atoms_are_distinct() {
        let f = ints(&[1, 1, 2]);
        let t = antimonotone_couplings(&f, &[q(1, 1), q(1, 1), q(1, 1)], &zero()).unwrap();
        assert_eq!(t.assignments.len(), 3);
        assert_eq!(distinct_permutation_count(&f), 3);
        assert_eq!(distinct_permutation_count(&ints(&[1, 2, 3, 4])), 24);
    }

    /// Birkhoff oracle: z is a convex combination of permutation matrices applied to F.
    fn birkhoff_member(z: &[f64], f: &DiscreteDistribution<f64>) -> bool {
        let mut perms = Vec::new();
        let mut p = f.values().to_vec();
        loop {
            perms.push(p.clone());
            if !next_permutation(&mut p) {
                break;
            }
        }
        let mut lp = LinearProgram::maximize(vec![0.0; perms.len()]);
        for i in 0..z.len() {
            lp.add(perms.iter().map(|p| p[i]).collect(), Relation::Eq, z[i]);
        }
        lp.add(vec![1.0; perms.len()], Relation::Eq, 1.0);
        lp.solve(&1e-10).is_ok()
    }

    fn arb_atoms(max_n: usize) -> impl Strategy<Value = Vec<i64>> {
        (2..=max_n).prop_flat_map(|n| proptest::collection::vec(-5i64..6, n))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn rearrangement_inequality(atoms in arb_atoms(6), seed in proptest::collection::vec(0i64..10, 6)) {
            let n = atoms.len();
            let f = ints(&atoms);
            let xi: Vec<Rational> = seed[..n].iter().map(|&s| q(s, 1)).collect();
            let (price, _) = antimonotone_price(&f, &xi);
            let mut p = f.values().to_vec();
            loop {
                let mut s = zero();
                for i in 0..n { s += xi[i] * p[i]; }
                prop_assert!(s / q(n as i64, 1) >= price);
                if !next_permutation(&mut p) { break; }
            }
            let t = antimonotone_couplings(&f, &xi, &zero()).unwrap();
            for z in t.payoffs() {
                let mut s = zero();
                for i in 0..n { s += xi[i] * z[i]; }
                prop_assert_eq!(s / q(n as i64, 1), price);
                prop_assert!(is_antimonotone(z, &xi, &zero()));
            }
        }

        #[test]
        fn convex_order_is_a_partial_order(a in arb_atoms(5), b in arb_atoms(5), c in arb_atoms(5)) {
            let (a, b, c) = (ints(&a), ints(&b), ints(&c));
            prop_assert!(convex_order_leq(&a, &a, &zero()));
            if convex_order_leq(&a, &b, &zero()) && convex_order_leq(&b, &a, &zero()) {
                let (ra, rb) = common_refinement(&a, &b);
                prop_assert_eq!(ra, rb);
            }
            if convex_order_leq(&a, &b, &zero()) && convex_order_leq(&b, &c, &zero()) {
                prop_assert!(convex_order_leq(&a, &c, &zero()));
            }
        }

        #[test]
        fn dominance_consistency(a in arb_atoms(5), b in arb_atoms(5)) {
            let (a, b) = (ints(&a), ints(&b));
            if fsd_leq(&a, &b, &zero()) {
                prop_assert!(ssd_leq(&a, &b, &zero()));
            }
            // a ⪯_cx b: every concave utility prefers a
            if convex_order_leq(&a, &b, &zero()) {
                prop_assert!(ssd_leq(&b, &a, &zero()));
            }
            prop_assert_eq!(ssd_leq(&a, &b, &zero()), ssd_oracle(&a, &b));
        }

        #[test]
        fn hull_membership_matches_birkhoff(atoms in proptest::collection::vec(0i64..6, 2..=4), w in proptest::collection::vec(0.01f64..1.0, 3), perturb in -0.5f64..0.5) {
            let f = DiscreteDistribution::new(atoms.iter().map(|&x| x as f64).collect()).unwrap();
            let n = f.n();
            // convex combination of three arrangements, optionally pushed off the hull
            let mut perms = Vec::new();
            let mut p = f.values().to_vec();
            loop { perms.push(p.clone()); if !next_permutation(&mut p) { break; } }
            let total: f64 = w.iter().sum();
            let mut z = vec![0.0; n];
            for (k, wk) in w.iter().enumerate() {
                let pk = &perms[(k * 7 + 3) % perms.len()];
                for i in 0..n { z[i] += wk / total * pk[i]; }
            }
            z[0] += perturb;
            z[n - 1] -= perturb;
            // stay away from the hull boundary where the two tolerances differ
            let mut sorted = z.clone();
            sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
            let desc = f.descending();
            let (mut sz, mut sf, mut slack) = (0.0, 0.0, f64::INFINITY);
            for k in 0..n - 1 { sz += sorted[k]; sf += desc[k]; slack = slack.min((sf - sz).abs()); }
            prop_assume!(slack > 1e-6);
            let fast = conv_hull_member(&z, &f, &1e-9);
            let slow = birkhoff_member(&z, &f);
            prop_assert_eq!(fast, slow);
        }
    }
}
