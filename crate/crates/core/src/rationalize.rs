//! Rationalizing utilities and expected-utility optimization over attainable payoffs.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::lp::{LinearProgram, Relation};
use crate::market::{DiscreteMarket, KernelPolytope};
use crate::orders::{cmp, convex_order_leq, DiscreteDistribution};
use crate::roots::golden_max;
use crate::scalar::Scalar;
use crate::solvers::{check_perfect_ce, solve_cvx_minimax, SolverOptions};

/// A concave, piecewise-linear utility.
///
/// `slopes[0]` applies left of `knots[0]`, `slopes[i]` between `knots[i-1]` and
/// `knots[i]`, and the last slope right of the last knot.
#[derive(Debug, Clone, PartialEq)]
pub struct UtilitySpline<S> {
    pub knots: Vec<S>,
    pub values: Vec<S>,
    pub slopes: Vec<S>,
    /// Point where the utility vanishes.
    pub anchor: S,
}

impl<S: Scalar> UtilitySpline<S> {
    /// Build from knots and slopes, normalized so that `u(anchor) = 0`.
    pub fn new(knots: Vec<S>, slopes: Vec<S>, anchor: S) -> Result<Self> {
        if slopes.len() != knots.len() + 1 {
            return Err(Error::InvalidInput(format!("{} knots need {} slopes, got {}", knots.len(), knots.len() + 1, slopes.len())));
        }
        if knots.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidInput(String::from("knots must be strictly increasing")));
        }
        if slopes.windows(2).any(|w| w[1] > w[0]) {
            return Err(Error::NonconcaveResult);
        }
        let mut values: Vec<S> = Vec::with_capacity(knots.len());
        for i in 0..knots.len() {
            let v = if i == 0 { S::zero() } else { values[i - 1].clone() + slopes[i].clone() * (knots[i].clone() - knots[i - 1].clone()) };
            values.push(v);
        }
        let mut u = UtilitySpline { knots, values, slopes, anchor: anchor.clone() };
        let shift = u.eval(&anchor);
        for v in u.values.iter_mut() {
            *v -= shift.clone();
        }
        Ok(u)
    }

    pub fn linear(slope: S) -> Self {
        UtilitySpline { knots: Vec::new(), values: Vec::new(), slopes: vec![slope], anchor: S::zero() }
    }

    pub fn eval(&self, x: &S) -> S {
        if self.knots.is_empty() {
            return self.slopes[0].clone() * (x.clone() - self.anchor.clone());
        }
        let k = self.knots.iter().take_while(|k| *k <= x).count();
        if k == 0 {
            self.values[0].clone() - self.slopes[0].clone() * (self.knots[0].clone() - x.clone())
        } else {
            self.values[k - 1].clone() + self.slopes[k].clone() * (x.clone() - self.knots[k - 1].clone())
        }
    }

    /// `(slope, intercept)` of each linear piece; the utility is their pointwise minimum.
    pub fn pieces(&self) -> Vec<(S, S)> {
        if self.knots.is_empty() {
            return vec![(self.slopes[0].clone(), -self.slopes[0].clone() * self.anchor.clone())];
        }
        self.slopes
            .iter()
            .enumerate()
            .map(|(i, s)| {
                let j = if i == 0 { 0 } else { i - 1 };
                (s.clone(), self.values[j].clone() - s.clone() * self.knots[j].clone())
            })
            .collect()
    }

    pub fn is_strictly_increasing(&self) -> bool {
        self.slopes.iter().all(|s| *s > S::zero())
    }
}

/// Utility whose derivative at each payoff value is the paired kernel value.
///
/// Pairs must be anti-monotone: larger payoffs get smaller or equal kernel values.
/// Slopes change midway between distinct payoff values and at payoff values shared
/// by several kernel values.
pub fn utility_from_coupling<S: Scalar>(z: &[S], xi: &[S], anchor: Option<S>) -> Result<UtilitySpline<S>> {
    if z.len() != xi.len() || z.is_empty() {
        return Err(Error::InvalidInput(String::from("payoff and kernel sizes differ")));
    }
    let mut pairs: Vec<(S, S)> = z.iter().cloned().zip(xi.iter().cloned()).collect();
    pairs.sort_by(|a, b| cmp(&a.0, &b.0).then(cmp(&b.1, &a.1)));
    // groups of equal payoff value: (value, max kernel, min kernel)
    let mut groups: Vec<(S, S, S)> = Vec::new();
    for (v, k) in pairs {
        match groups.last_mut() {
            Some(g) if g.0 == v => g.2 = k,
            _ => groups.push((v, k.clone(), k)),
        }
    }
    if groups.windows(2).any(|w| w[1].1 > w[0].2) {
        return Err(Error::NonconcaveResult);
    }
    let two = S::from_i64(2);
    let mut knots = Vec::new();
    let mut slopes = vec![groups[0].1.clone()];
    for (j, g) in groups.iter().enumerate() {
        if g.1 > g.2 {
            knots.push(g.0.clone());
            slopes.push(g.2.clone());
        }
        if let Some(next) = groups.get(j + 1) {
            knots.push((g.0.clone() + next.0.clone()) / two.clone());
            slopes.push(next.1.clone());
        }
    }
    let anchor = anchor.unwrap_or_else(|| groups[0].0.clone());
    let u = UtilitySpline::new(knots, slopes, anchor)?;
    if !u.is_strictly_increasing() {
        return Err(Error::Domain(String::from("kernel has non-positive entries; utility is not strictly increasing")));
    }
    Ok(u)
}

/// `u(x) = ∫_c^x F_ξ^{-1}(1 − F(y)) dy` for an equiprobable `F` and kernel `ξ`:
/// the `k`-th smallest atom is paired with the `k`-th largest kernel value.
pub fn build_utility<S: Scalar>(f: &DiscreteDistribution<S>, xi: &[S], anchor: Option<S>) -> Result<UtilitySpline<S>> {
    if xi.len() != f.n() {
        return Err(Error::InvalidInput(String::from("kernel and distribution sizes differ")));
    }
    let mut kd = xi.to_vec();
    kd.sort_by(|a, b| cmp(b, a));
    utility_from_coupling(f.values(), &kd, anchor)
}

#[derive(Debug, Clone, PartialEq)]
pub struct EuOptimum<S> {
    pub payoff: Vec<S>,
    pub value: S,
    pub cash: S,
    pub holdings: Vec<S>,
}

/// `max E[u(X)]` over payoffs `X = c + θ·S_T` with `c + θ·S_0 = x0`, as a linear program.
pub fn eu_optimum<S: Scalar>(market: &DiscreteMarket<S>, u: &UtilitySpline<S>, x0: &S, tol: &S) -> Result<EuOptimum<S>> {
    let n = market.n();
    let d = market.assets().len();
    let width = 1 + d + n;
    let mut obj = vec![S::zero(); width];
    for i in 0..n {
        obj[1 + d + i] = market.probability(i);
    }
    let mut lp = LinearProgram::maximize(obj);
    for j in 0..width {
        lp.set_free(j);
    }
    let mut budget = vec![S::zero(); width];
    budget[0] = S::one();
    for (k, p) in market.prices().iter().enumerate() {
        budget[1 + k] = p.clone();
    }
    lp.add(budget, Relation::Eq, x0.clone());
    for (slope, intercept) in u.pieces() {
        for i in 0..n {
            let mut r = vec![S::zero(); width];
            r[0] = -slope.clone();
            for (k, a) in market.assets().iter().enumerate() {
                r[1 + k] = -slope.clone() * a[i].clone();
            }
            r[1 + d + i] = S::one();
            lp.add(r, Relation::Le, intercept.clone());
        }
    }
    let sol = lp.solve(tol)?;
    let cash = sol.x[0].clone();
    let holdings = sol.x[1..1 + d].to_vec();
    let payoff = (0..n)
        .map(|i| {
            let mut v = cash.clone();
            for (k, a) in market.assets().iter().enumerate() {
                v += holdings[k].clone() * a[i].clone();
            }
            v
        })
        .collect();
    Ok(EuOptimum { payoff, value: sol.value, cash, holdings })
}

/// Whether `zstar` maximizes `E[u(X)]` among attainable payoffs of cost at most `x0`.
pub fn verify_rationalization<S: Scalar>(kp: &KernelPolytope<S>, zstar: &[S], u: &UtilitySpline<S>, x0: &S) -> Result<bool> {
    let market = kp.market();
    let tol = S::tol(kp.tolerances.feasibility);
    let gap_tol = S::tol(1e-7);
    let att = kp.is_attainable(zstar)?;
    if !att.attainable {
        return Ok(false);
    }
    let mut cost = att.cash.clone();
    for (h, p) in att.holdings.iter().zip(market.prices()) {
        cost += h.clone() * p.clone();
    }
    if cost > x0.clone() + gap_tol.clone() {
        return Ok(false);
    }
    let best = match eu_optimum(market, u, x0, &tol) {
        Ok(b) => b,
        Err(Error::Unbounded) => return Ok(false),
        Err(e) => return Err(e),
    };
    let mut eu = S::zero();
    for (i, z) in zstar.iter().enumerate() {
        eu += market.probability(i) * u.eval(z);
    }
    Ok(eu >= best.value - gap_tol)
}

#[derive(Clone, Copy)]
pub enum TrinomialUtility<'a> {
    Log,
    /// `−e^{−x}`.
    Exp,
    /// `x^α / α` with `α < 1`, `α ≠ 0`.
    Power(f64),
    /// A concave `u` maximized numerically over `x ∈ [lo, hi]`.
    Generic { u: &'a dyn Fn(f64) -> f64, lo: f64, hi: f64 },
}

/// The optimal payoff `(3x0 − 2x*, x0, x*)` in the 3-state market, where `x*`
/// maximizes `u(3x0 − 2x) + u(x)`.
pub fn trinomial_eu_solve(x0: f64, utility: TrinomialUtility<'_>) -> Result<[f64; 3]> {
    if !x0.is_finite() || x0 <= 0.0 {
        return Err(Error::InvalidInput(format!("initial capital must be positive, got {x0}")));
    }
    let x = match utility {
        TrinomialUtility::Log => 0.75 * x0,
        TrinomialUtility::Exp => x0 - libm::log(2.0) / 3.0,
        TrinomialUtility::Power(alpha) => {
            if !(alpha < 1.0) || alpha == 0.0 || !alpha.is_finite() {
                return Err(Error::Domain(format!("power utility needs α < 1, α ≠ 0, got {alpha}")));
            }
            let b = libm::pow(2.0, alpha / (alpha - 1.0));
            3.0 * x0 * 0.5 * b / (1.0 + b)
        }
        TrinomialUtility::Generic { u, lo, hi } => {
            let (x, fx) = golden_max(|x| u(3.0 * x0 - 2.0 * x) + u(x), lo, hi, 1e-12);
            if !fx.is_finite() {
                return Err(Error::Domain(String::from("utility undefined at the optimum")));
            }
            x
        }
    };
    Ok([3.0 * x0 - 2.0 * x, x0, x])
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticCounterexample<S> {
    /// Maximizer of `E[X²]` over nonnegative attainable payoffs of cost `x0`.
    pub maximizer: [S; 3],
    pub value: S,
    pub is_perfect_ce: bool,
    /// The interior stationary point `θ = −x0/5` of `θ ↦ E[X_θ²]`, a minimum.
    pub stationary: [S; 3],
    pub stationary_value: S,
    pub stationary_is_perfect_ce: bool,
    /// The cost-efficient payoff for the stationary point's distribution.
    pub stationary_dominator: Vec<S>,
    /// Whether the dominator is strictly smaller in convex order.
    pub strictly_dominated: bool,
}

/// `E[X²]` over the attainable payoffs `X_θ = (x0 + 2θ, x0, x0 − θ)` of the 3-state market.
pub fn quadratic_counterexample<S: Scalar>(kp: &KernelPolytope<S>, x0: &S) -> Result<QuadraticCounterexample<S>> {
    if *x0 <= S::zero() {
        return Err(Error::InvalidInput(String::from("initial capital must be positive")));
    }
    let payoff = |theta: &S| -> [S; 3] { [x0.clone() + S::from_i64(2) * theta.clone(), x0.clone(), x0.clone() - theta.clone()] };
    let objective = |x: &[S; 3]| -> S {
        let mut s = S::zero();
        for v in x {
            s += v.clone() * v.clone();
        }
        s / S::from_i64(3)
    };
    // convex in θ: the maximum over the nonnegativity range sits at an endpoint
    let ends = [-x0.clone() / S::from_i64(2), x0.clone()];
    let candidates = ends.map(|t| payoff(&t));
    let (maximizer, value) = if objective(&candidates[1]) >= objective(&candidates[0]) {
        (candidates[1].clone(), objective(&candidates[1]))
    } else {
        (candidates[0].clone(), objective(&candidates[0]))
    };
    let stationary = payoff(&(-x0.clone() / S::from_i64(5)));
    let stationary_value = objective(&stationary);
    let opts = SolverOptions::default();
    let verdict = |x: &[S; 3]| -> Result<bool> { Ok(check_perfect_ce(kp, &DiscreteDistribution::new(x.to_vec())?, &opts)?.is_perfect) };
    let f_stat = DiscreteDistribution::new(stationary.to_vec())?;
    let dom = solve_cvx_minimax(kp, &f_stat, &opts)?;
    let dominator = dom.optimizers[0].payoffs[0].clone();
    let tol = S::tol(kp.tolerances.optimality);
    let dd = DiscreteDistribution::new(dominator.clone())?;
    let strictly = convex_order_leq(&dd, &f_stat, &tol) && !convex_order_leq(&f_stat, &dd, &tol);
    Ok(QuadraticCounterexample {
        is_perfect_ce: verdict(&maximizer)?,
        maximizer,
        value,
        stationary_is_perfect_ce: verdict(&stationary)?,
        stationary,
        stationary_value,
        stationary_dominator: dominator,
        strictly_dominated: strictly,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::market::{build_kernel_polytope, Tolerances};
    use crate::scalar::Rational;
    use crate::solvers::solve_maximin;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    fn ints(v: &[i64]) -> DiscreteDistribution<Rational> {
        DiscreteDistribution::new(v.iter().map(|&x| q(x, 1)).collect()).unwrap()
    }

    fn kp() -> KernelPolytope<Rational> {
        build_kernel_polytope(&DiscreteMarket::three_state(), Tolerances::default()).unwrap()
    }

    #[test]
    fn utility_examples() {
        let f = ints(&[1, 2, 4]);
        let u = build_utility(&f, &[q(3, 4), q(3, 4), q(3, 2)], None).unwrap();
        assert_eq!(u.slopes, vec![q(3, 2), q(3, 4), q(3, 4)]);
        assert_eq!(u.eval(&q(1, 1)), q(0, 1));
        let u = build_utility(&f, &[q(3, 5), q(6, 5), q(6, 5)], None).unwrap();
        assert_eq!(u.slopes, vec![q(6, 5), q(6, 5), q(3, 5)]);
        let u = build_utility(&f, &[q(1, 1); 3], Some(q(0, 1))).unwrap();
        assert!(u.slopes.iter().all(|s| *s == q(1, 1)));
        assert_eq!(u.eval(&q(5, 2)), q(5, 2));
    }

    #[test]
    fn tied_atoms_get_a_kink() {
        let f = ints(&[1, 1, 3]);
        let u = build_utility(&f, &[q(1, 2), q(1, 1), q(3, 2)], None).unwrap();
        assert_eq!(u.knots, vec![q(1, 1), q(2, 1)]);
        assert_eq!(u.slopes, vec![q(3, 2), q(1, 1), q(1, 2)]);
    }

    #[test]
    fn non_antimonotone_coupling_is_rejected() {
        let r = utility_from_coupling(&[q(1, 1), q(2, 1)], &[q(1, 2), q(3, 2)], None);
        assert_eq!(r, Err(Error::NonconcaveResult));
    }

    #[test]
    fn pieces_reproduce_eval() {
        let u = UtilitySpline::new(vec![q(1, 1), q(3, 1)], vec![q(2, 1), q(1, 1), q(1, 3)], q(0, 1)).unwrap();
        for x in [q(-2, 1), q(1, 2), q(2, 1), q(7, 1)] {
            let m = u.pieces().into_iter().map(|(s, b)| s * x + b).min().unwrap();
            assert_eq!(m, u.eval(&x));
        }
    }

    #[test]
    fn rationalization_examples() {
        let kp = kp();
        let f = ints(&[1, 2, 4]);
        let z = [q(4, 1), q(2, 1), q(1, 1)];
        for xi in [[q(3, 4), q(3, 4), q(3, 2)], [q(3, 5), q(6, 5), q(6, 5)]] {
            let u = build_utility(&f, &xi, None).unwrap();
            assert!(verify_rationalization(&kp, &z, &u, &q(2, 1)).unwrap());
        }
        // (3,2,1) is not attainable; the distribution is not perfectly cost-efficient
        let f = ints(&[1, 2, 3]);
        let u = build_utility(&f, &[q(3, 5), q(6, 5), q(6, 5)], None).unwrap();
        assert!(!verify_rationalization(&kp, &[q(3, 1), q(2, 1), q(1, 1)], &u, &q(2, 1)).unwrap());
        // the physical measure is not risk-neutral here, so linear utility is unbounded
        let u = UtilitySpline::linear(q(1, 1));
        assert!(!verify_rationalization(&kp, &[q(6, 1), q(2, 1), q(0, 1)], &u, &q(2, 1)).unwrap());
        // under a risk-neutral physical measure every attainable payoff of cost x0 is optimal
        let rn = DiscreteMarket::new(2, vec![vec![q(2, 1), q(0, 1)]], vec![q(1, 1)]).unwrap();
        let kp2 = build_kernel_polytope(&rn, Tolerances::default()).unwrap();
        assert!(verify_rationalization(&kp2, &[q(5, 1), q(-1, 1)], &u, &q(2, 1)).unwrap());
    }

    #[test]
    fn trinomial_closed_forms() {
        let x = trinomial_eu_solve(1.0, TrinomialUtility::Log).unwrap();
        assert_eq!(x, [1.5, 1.0, 0.75]);
        let x = trinomial_eu_solve(1.0, TrinomialUtility::Exp).unwrap();
        assert!((x[2] - (1.0 - libm::log(2.0) / 3.0)).abs() < 1e-15);
        assert!((x[0] - (1.0 + 2.0 * libm::log(2.0) / 3.0)).abs() < 1e-15);
        for alpha in [-1.0, 0.5] {
            let b = libm::pow(2.0, alpha / (alpha - 1.0));
            let x = trinomial_eu_solve(1.0, TrinomialUtility::Power(alpha)).unwrap();
            assert!((x[0] - 3.0 / (1.0 + b)).abs() < 1e-12);
            assert!((x[2] - 3.0 * libm::pow(2.0, alpha / (alpha - 1.0) - 1.0) / (1.0 + b)).abs() < 1e-12);
        }
        assert!(trinomial_eu_solve(1.0, TrinomialUtility::Power(1.5)).is_err());
    }

    #[test]
    fn generic_route_matches_closed_forms() {
        let cases: [(TrinomialUtility, &dyn Fn(f64) -> f64); 3] = [
            (TrinomialUtility::Log, &|x: f64| if x > 0.0 { libm::log(x) } else { f64::NEG_INFINITY }),
            (TrinomialUtility::Exp, &|x: f64| -libm::exp(-x)),
            (TrinomialUtility::Power(-1.0), &|x: f64| if x > 0.0 { -1.0 / x } else { f64::NEG_INFINITY }),
        ];
        for (closed, u) in cases {
            let a = trinomial_eu_solve(1.3, closed).unwrap();
            let b = trinomial_eu_solve(1.3, TrinomialUtility::Generic { u, lo: 1e-9, hi: 1.95 - 1e-9 }).unwrap();
            assert!((a[2] - b[2]).abs() < 1e-6, "{a:?} vs {b:?}");
        }
    }

    #[test]
    fn quadratic_example() {
        let kp = kp();
        let r = quadratic_counterexample(&kp, &q(1, 1)).unwrap();
        assert_eq!(r.maximizer, [q(3, 1), q(1, 1), q(0, 1)]);
        assert_eq!(r.value, q(10, 3));
        assert!(r.is_perfect_ce);
        assert_eq!(r.stationary, [q(3, 5), q(1, 1), q(6, 5)]);
        assert_eq!(r.stationary_value, q(14, 15));
        assert!(!r.stationary_is_perfect_ce);
        assert_eq!(r.stationary_dominator, vec![q(6, 5), q(22, 25), q(18, 25)]);
        assert!(r.strictly_dominated);
        let r2 = quadratic_counterexample(&kp, &q(2, 1)).unwrap();
        assert_eq!(r2.value, q(4, 1) * r.value);
        assert_eq!(r2.stationary_value, q(4, 1) * r.stationary_value);
    }

    #[test]
    fn quadratic_matches_theta_grid() {
        let kp = kp();
        let r = quadratic_counterexample(&kp, &q(1, 1)).unwrap();
        let best = (0..=3000)
            .map(|k| q(-1, 2) + q(k, 2000))
            .map(|t| {
                let x = [q(1, 1) + q(2, 1) * t, q(1, 1), q(1, 1) - t];
                (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]) / q(3, 1)
            })
            .max()
            .unwrap();
        assert_eq!(best, r.value);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn perfect_family_round_trip(x in -20i64..20, h in 1i64..20, den in 1i64..6) {
            let (x, y) = (q(x, den), q(x + h, den));
            let z = q(3, 1) * y - q(2, 1) * x;
            let kp = kp();
            let f = DiscreteDistribution::new(vec![x, y, z]).unwrap();
            let r = solve_maximin(&kp, &f, &SolverOptions::default()).unwrap();
            for xi in &r.kernel_face {
                if xi.iter().all(|v| *v > q(0, 1)) {
                    let u = build_utility(&f, xi, None).unwrap();
                    prop_assert!(u.is_strictly_increasing());
                    prop_assert!(verify_rationalization(&kp, &[z, y, x], &u, &r.value).unwrap());
                }
            }
        }

        #[test]
        fn trinomial_optimum_is_attainable_and_satisfies_foc(x0 in 0.1f64..10.0, alpha in prop::sample::select(vec![-3.0, -1.0, 0.25, 0.5, 0.9])) {
            let x = trinomial_eu_solve(x0, TrinomialUtility::Power(alpha)).unwrap();
            prop_assert!((x[0] - 3.0 * x[1] + 2.0 * x[2]).abs() < 1e-10 * x0);
            prop_assert!(x[0] > x[1] && x[1] > x[2]);
            let du = |v: f64| libm::pow(v, alpha - 1.0);
            let g = |v: f64| du(v) - 2.0 * du(3.0 * x0 - 2.0 * v);
            let h = 1e-6 * x0;
            prop_assert!(g(x[2] - h) * g(x[2] + h) < 0.0);
        }
    }
}
