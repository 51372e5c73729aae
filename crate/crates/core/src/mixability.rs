//! Lower bounds on `P[X_1 + … + X_n < s]` over couplings of identically distributed
//! nonnegative variables with a decreasing density.
//!
//! With `b = (1 − s)/n` and `H_s(x) = (n − 1) Q(s + (n − 1)x) + Q(1 − x)` for the
//! quantile function `Q`, the bound is `m₊ⁿ(t) = φ_n^{-1}(t)` where `φ_n(s) = H_s(c_n(s))`.

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{Error, Result};
use crate::orders::DiscreteDistribution;
use crate::quad::adaptive_simpson;
use crate::scalar::Scalar;

const C_GRID: usize = 1000;
const S_GRID: usize = 1000;
const REFINE_STEPS: usize = 50;
const SIMPSON_TOL: f64 = 1e-10;

/// A distribution on `[0, ∞)` given by its quantile function.
///
/// Implementors assert a decreasing density; nothing here checks it.
pub trait TailDistribution {
    /// `Q(u)` for `u ∈ (0, 1)`.
    fn quantile(&self, u: f64) -> f64;

    /// `Q(1 − x)`, accurate for small `x`.
    fn upper_quantile(&self, x: f64) -> f64 {
        self.quantile(1.0 - x)
    }

    /// `∫_a^b Q(u) du` for `0 ≤ a ≤ b < 1`.
    fn quantile_integral(&self, a: f64, b: f64) -> Result<f64> {
        simpson_split(|u| self.quantile(u), a, b)
    }

    /// `∫_c^b Q(1 − x) dx` for `0 < c ≤ b`.
    fn upper_quantile_integral(&self, c: f64, b: f64) -> Result<f64> {
        simpson_split(|x| self.upper_quantile(x), c, b)
    }

    fn cdf(&self, x: f64) -> f64;

    /// `None` when the mean is infinite.
    fn mean(&self) -> Option<f64>;

    fn integrable(&self) -> bool {
        self.mean().is_some()
    }
}

/// Simpson on `[a, b]` with the interval split at its midpoint, so a singular endpoint
/// only refines its own half.
fn simpson_split<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> Result<f64> {
    if b <= a {
        return Ok(0.0);
    }
    let m = 0.5 * (a + b);
    Ok(adaptive_simpson(&f, a, m, 0.5 * SIMPSON_TOL, 60)? + adaptive_simpson(&f, m, b, 0.5 * SIMPSON_TOL, 60)?)
}

/// Uniform on `[0, hi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Uniform {
    pub hi: f64,
}

impl TailDistribution for Uniform {
    fn quantile(&self, u: f64) -> f64 {
        self.hi * u
    }

    fn upper_quantile(&self, x: f64) -> f64 {
        self.hi * (1.0 - x)
    }

    fn quantile_integral(&self, a: f64, b: f64) -> Result<f64> {
        Ok(0.5 * self.hi * (b * b - a * a))
    }

    fn upper_quantile_integral(&self, c: f64, b: f64) -> Result<f64> {
        Ok(self.hi * ((b - c) - 0.5 * (b * b - c * c)))
    }

    fn cdf(&self, x: f64) -> f64 {
        (x / self.hi).clamp(0.0, 1.0)
    }

    fn mean(&self) -> Option<f64> {
        Some(0.5 * self.hi)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Exponential {
    pub rate: f64,
}

impl TailDistribution for Exponential {
    fn quantile(&self, u: f64) -> f64 {
        -libm::log1p(-u) / self.rate
    }

    fn upper_quantile(&self, x: f64) -> f64 {
        -libm::log(x) / self.rate
    }

    fn quantile_integral(&self, a: f64, b: f64) -> Result<f64> {
        // ∫ −ln(1 − u) du = (1 − u) ln(1 − u) − (1 − u) + const
        let g = |u: f64| {
            let v = 1.0 - u;
            if v == 0.0 {
                u
            } else {
                v * libm::log(v) + u
            }
        };
        Ok((g(b) - g(a)) / self.rate)
    }

    fn upper_quantile_integral(&self, c: f64, b: f64) -> Result<f64> {
        let g = |x: f64| if x == 0.0 { 0.0 } else { x - x * libm::log(x) };
        Ok((g(b) - g(c)) / self.rate)
    }

    fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            0.0
        } else {
            -libm::expm1(-self.rate * x)
        }
    }

    fn mean(&self) -> Option<f64> {
        Some(1.0 / self.rate)
    }
}

/// `|C|` for a standard Cauchy `C`: `Q(u) = tan(πu/2)`, infinite mean.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FoldedCauchy;

impl TailDistribution for FoldedCauchy {
    fn quantile(&self, u: f64) -> f64 {
        libm::tan(0.5 * PI * u)
    }

    fn upper_quantile(&self, x: f64) -> f64 {
        1.0 / libm::tan(0.5 * PI * x)
    }

    fn quantile_integral(&self, a: f64, b: f64) -> Result<f64> {
        // ∫ tan(πu/2) du = −(2/π) ln cos(πu/2); cos(πu/2) = sin(π(1 − u)/2)
        let lc = |u: f64| libm::log(libm::sin(0.5 * PI * (1.0 - u)));
        Ok(2.0 / PI * (lc(a) - lc(b)))
    }

    fn upper_quantile_integral(&self, c: f64, b: f64) -> Result<f64> {
        let ls = |x: f64| libm::log(libm::sin(0.5 * PI * x));
        Ok(2.0 / PI * (ls(b) - ls(c)))
    }

    fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            0.0
        } else {
            2.0 / PI * libm::atan(x)
        }
    }

    fn mean(&self) -> Option<f64> {
        None
    }
}

/// Lomax (Pareto II) with unit scale: `Q(u) = (1 − u)^{−1/α} − 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lomax {
    pub alpha: f64,
}

impl TailDistribution for Lomax {
    fn quantile(&self, u: f64) -> f64 {
        libm::expm1(-libm::log1p(-u) / self.alpha)
    }

    fn upper_quantile(&self, x: f64) -> f64 {
        libm::pow(x, -1.0 / self.alpha) - 1.0
    }

    fn quantile_integral(&self, a: f64, b: f64) -> Result<f64> {
        // antiderivative of (1 − u)^{−1/α} in v = 1 − u, minus the constant part
        let k = 1.0 - 1.0 / self.alpha;
        let g = |v: f64| if k == 0.0 { -libm::log(v) } else { -libm::pow(v, k) / k };
        Ok(g(1.0 - b) - g(1.0 - a) - (b - a))
    }

    fn upper_quantile_integral(&self, c: f64, b: f64) -> Result<f64> {
        let k = 1.0 - 1.0 / self.alpha;
        let g = |x: f64| if k == 0.0 { libm::log(x) } else { libm::pow(x, k) / k };
        Ok(g(b) - g(c) - (b - c))
    }

    fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            0.0
        } else {
            1.0 - libm::pow(1.0 + x, -self.alpha)
        }
    }

    fn mean(&self) -> Option<f64> {
        (self.alpha > 1.0).then(|| 1.0 / (self.alpha - 1.0))
    }
}

fn check(n: usize, s: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidInput(format!("need n ≥ 1")));
    }
    if !(0.0..1.0).contains(&s) {
        return Err(Error::Domain(format!("s must lie in [0, 1), got {s}")));
    }
    Ok((1.0 - s) / n as f64)
}

fn h_raw<D: TailDistribution + ?Sized>(dist: &D, n: usize, s: f64, x: f64) -> f64 {
    let k = (n - 1) as f64;
    let head = if n == 1 { 0.0 } else { k * dist.quantile(s + k * x) };
    head + dist.upper_quantile(x)
}

/// `H_s(x) = (n − 1) Q(s + (n − 1)x) + Q(1 − x)` on `x ∈ (0, (1 − s)/n]`.
pub fn h_function<D: TailDistribution + ?Sized>(dist: &D, n: usize, s: f64, x: f64) -> Result<f64> {
    let b = check(n, s)?;
    if !(x > 0.0 && x <= b) {
        return Err(Error::Domain(format!("x must lie in (0, {b}], got {x}")));
    }
    Ok(h_raw(dist, n, s, x))
}

/// `∫_c^b H_s(t) dt − (b − c) H_s(c)`.
pub fn psi<D: TailDistribution + ?Sized>(dist: &D, n: usize, s: f64, c: f64) -> Result<f64> {
    let b = check(n, s)?;
    let k = (n - 1) as f64;
    let head = if n == 1 { 0.0 } else { dist.quantile_integral(s + k * c, s + k * b)? };
    let integral = head + dist.upper_quantile_integral(c, b)?;
    Ok(integral - (b - c) * h_raw(dist, n, s, c))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CRoot {
    /// `c_n(s)`, or `0` when `no_root` is set.
    pub c: f64,
    /// `ψ ≥ 0` on the whole interval, so the infimum is the open left endpoint.
    pub no_root: bool,
}

/// `c_n(s) = inf{c ∈ (0, b] : ψ(c) ≥ 0}`, by a scan over `grid` points of `(0, b]`,
/// geometric refinement toward `0`, and bisection to relative width `1e-12`.
pub fn c_n_with_grid<D: TailDistribution + ?Sized>(dist: &D, n: usize, s: f64, grid: usize) -> Result<CRoot> {
    let b = check(n, s)?;
    let grid = grid.max(1);
    let ok = |c: f64| -> Result<bool> {
        let v = psi(dist, n, s, c)?;
        let scale = (b - c) * libm::fabs(h_raw(dist, n, s, c));
        Ok(v >= -1e-12 * scale)
    };
    let point = |k: usize| if k == grid { b } else { b * k as f64 / grid as f64 };
    let mut bracket = None;
    for k in 1..=grid {
        if ok(point(k))? {
            if k > 1 {
                bracket = Some((point(k - 1), point(k)));
            }
            break;
        }
    }
    let (mut lo, mut hi) = match bracket {
        Some(br) => br,
        None => {
            let mut hi = point(1);
            let mut found = None;
            for _ in 0..REFINE_STEPS {
                let lo = 0.5 * hi;
                if !ok(lo)? {
                    found = Some((lo, hi));
                    break;
                }
                hi = lo;
            }
            match found {
                Some(br) => br,
                None => return Ok(CRoot { c: 0.0, no_root: true }),
            }
        }
    };
    while hi - lo > 1e-12 * hi {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if ok(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(CRoot { c: hi, no_root: false })
}

pub fn c_n<D: TailDistribution + ?Sized>(dist: &D, n: usize, s: f64) -> Result<CRoot> {
    c_n_with_grid(dist, n, s, C_GRID)
}

/// `φ_n(s) = H_s(c_n(s))`; when `c_n(s)` is the open endpoint `0`, the limit
/// `(1/b) ∫_0^b H_s`, which is `n E[X | X ≥ Q(s)]`.
pub fn phi_n<D: TailDistribution + ?Sized>(dist: &D, n: usize, s: f64) -> Result<f64> {
    phi_n_with_grid(dist, n, s, C_GRID)
}

pub fn phi_n_with_grid<D: TailDistribution + ?Sized>(dist: &D, n: usize, s: f64, grid: usize) -> Result<f64> {
    let b = check(n, s)?;
    let root = c_n_with_grid(dist, n, s, grid)?;
    if !root.no_root {
        return Ok(h_raw(dist, n, s, root.c));
    }
    let k = (n - 1) as f64;
    let head = if n == 1 { 0.0 } else { dist.quantile_integral(s, s + k * b)? };
    Ok((head + dist.upper_quantile_integral(0.0, b)?) / b)
}

/// `φ_n` on the grid `s = k/1000`, `k = 0, …, 999`, with whether it strictly increases.
pub fn phi_grid<D: TailDistribution + ?Sized>(dist: &D, n: usize) -> Result<(Vec<f64>, bool)> {
    let vals = (0..S_GRID).map(|k| phi_n(dist, n, k as f64 / S_GRID as f64)).collect::<Result<Vec<f64>>>()?;
    let increasing = vals.windows(2).all(|w| w[1] > w[0]);
    Ok((vals, increasing))
}

/// `m₊ⁿ(t) = inf P[X_1 + … + X_n < t]` over couplings with `X_i ∼ F`.
///
/// Locates `t` among `φ_n(k/1000)` by binary search over `k`, then bisects on `φ_n`
/// inside that cell.
pub fn m_plus<D: TailDistribution + ?Sized>(dist: &D, n: usize, t: f64) -> Result<f64> {
    m_plus_with_grid(dist, n, t, C_GRID)
}

pub fn m_plus_with_grid<D: TailDistribution + ?Sized>(dist: &D, n: usize, t: f64, grid: usize) -> Result<f64> {
    check(n, 0.0)?;
    if !t.is_finite() {
        return Err(Error::InvalidInput(format!("threshold must be finite, got {t}")));
    }
    let phi = |s: f64| phi_n_with_grid(dist, n, s, grid);
    let at = |k: usize| k as f64 / S_GRID as f64;
    if t <= phi(0.0)? {
        return Ok(0.0);
    }
    let top = 1.0 - 1e-9;
    if phi(top)? < t {
        return Ok(1.0);
    }
    // φ(at(lo)) < t ≤ φ(at(hi)), with at(S_GRID) standing for `top`
    let (mut lo, mut hi) = (0usize, S_GRID);
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if phi(at(mid))? >= t {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let (mut a, mut b) = (at(lo), if hi == S_GRID { top } else { at(hi) });
    while b - a > 1e-12 {
        let mid = 0.5 * (a + b);
        if phi(mid)? >= t {
            b = mid;
        } else {
            a = mid;
        }
    }
    Ok(0.5 * (a + b))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DivergenceRow {
    pub n: usize,
    pub m: f64,
    /// `P[S̃_n ≥ nM] = 1 − m₊ⁿ(nM)`.
    pub prob: f64,
}

/// Rows of `P[S̃_n ≥ nM]` for each `n` at a fixed level `M`.
pub fn divergence_table<D: TailDistribution + ?Sized>(dist: &D, ns: &[usize], m: f64) -> Result<Vec<DivergenceRow>> {
    ns.iter()
        .map(|&n| Ok(DivergenceRow { n, m, prob: 1.0 - m_plus(dist, n, n as f64 * m)? }))
        .collect()
}

/// `E|X| / M`: a bound on `P[|Y| ≥ M]` uniform over `Y` in the convex hull of `F`'s law.
pub fn markov_hull_bound<S: Scalar>(f: &DiscreteDistribution<S>, m: &S) -> Result<S> {
    if !(m.to_f64() > 0.0) {
        return Err(Error::InvalidInput(format!("M must be positive, got {}", m.to_f64())));
    }
    let mut total = S::zero();
    for v in f.values() {
        total = total + v.abs();
    }
    Ok(total / (S::from_i64(f.n() as i64) * m.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;
    use alloc::vec;
    use proptest::prelude::*;
    use rand::seq::SliceRandom;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Only the quantile; every integral goes through the Simpson defaults.
    struct QuantileOnly<F: Fn(f64) -> f64>(F);

    impl<F: Fn(f64) -> f64> TailDistribution for QuantileOnly<F> {
        fn quantile(&self, u: f64) -> f64 {
            (self.0)(u)
        }
        fn cdf(&self, _x: f64) -> f64 {
            unimplemented!()
        }
        fn mean(&self) -> Option<f64> {
            None
        }
    }

    #[test]
    fn h_examples() {
        let u = Uniform { hi: 1.0 };
        assert!((h_function(&u, 2, 0.0, 0.5).unwrap() - 1.0).abs() < 1e-15);
        let v = h_function(&FoldedCauchy, 3, 0.5, 0.1).unwrap();
        let want = 2.0 * libm::tan(0.35 * PI) + libm::tan(0.45 * PI);
        assert!((v / want - 1.0).abs() < 1e-13);
        assert!(h_function(&u, 3, 0.5, 0.2).is_err());
        assert!(h_function(&u, 3, 1.0, 0.1).is_err());
    }

    #[test]
    fn h_is_continuous_at_the_right_endpoint() {
        let (n, s) = (4, 0.3);
        let b = (1.0 - s) / n as f64;
        let at = h_function(&FoldedCauchy, n, s, b).unwrap();
        let near = h_function(&FoldedCauchy, n, s, b * (1.0 - 1e-9)).unwrap();
        assert!((at - near).abs() < 1e-6 * at);
        // at the endpoint both quantile arguments equal 1 − b
        assert!((at - n as f64 * FoldedCauchy.quantile(1.0 - b)).abs() < 1e-12 * at);
    }

    #[test]
    fn closed_form_integrals_match_simpson() {
        let cases: [(&dyn TailDistribution, fn(f64) -> f64); 3] = [
            (&Uniform { hi: 2.0 }, |u| 2.0 * u),
            (&Exponential { rate: 1.5 }, |u| -libm::log1p(-u) / 1.5),
            (&FoldedCauchy, |u| libm::tan(0.5 * PI * u)),
        ];
        for (d, q) in cases {
            let plain = QuantileOnly(q);
            for (a, b) in [(0.0, 0.3), (0.2, 0.9), (0.5, 0.99)] {
                let x = d.quantile_integral(a, b).unwrap();
                let y = plain.quantile_integral(a, b).unwrap();
                assert!((x - y).abs() < 1e-8 * (1.0 + x.abs()), "{a} {b}: {x} vs {y}");
            }
            for (c, b) in [(0.01, 0.2), (0.1, 0.5)] {
                let x = d.upper_quantile_integral(c, b).unwrap();
                let y = plain.upper_quantile_integral(c, b).unwrap();
                assert!((x - y).abs() < 1e-8 * (1.0 + x.abs()), "{c} {b}: {x} vs {y}");
            }
        }
    }

    #[test]
    fn lomax_default_integrals() {
        let d = Lomax { alpha: 0.5 };
        // ∫_c^b (x^{−2} − 1) dx
        let v = d.upper_quantile_integral(0.05, 0.4).unwrap();
        assert!((v - ((1.0 / 0.05 - 1.0 / 0.4) - 0.35)).abs() < 1e-12);
        for alpha in [0.5, 1.0, 3.0] {
            let d = Lomax { alpha };
            let plain = QuantileOnly(move |u: f64| Lomax { alpha }.quantile(u));
            let (x, y) = (d.quantile_integral(0.1, 0.9).unwrap(), plain.quantile_integral(0.1, 0.9).unwrap());
            assert!((x - y).abs() < 1e-8 * (1.0 + x.abs()), "{alpha}: {x} vs {y}");
            let (x, y) = (d.upper_quantile_integral(0.02, 0.3).unwrap(), plain.upper_quantile_integral(0.02, 0.3).unwrap());
            assert!((x - y).abs() < 1e-8 * (1.0 + x.abs()), "{alpha}: {x} vs {y}");
        }
        assert!(!d.integrable() && Lomax { alpha: 3.0 }.integrable());
        let r = c_n(&d, 3, 0.2).unwrap();
        assert!(!r.no_root);
        assert!(psi(&d, 3, 0.2, r.c * 1.01).unwrap() >= 0.0);
    }

    #[test]
    fn psi_vanishes_at_the_right_endpoint() {
        for n in 1..6 {
            for s in [0.0, 0.4, 0.9] {
                let b = (1.0 - s) / n as f64;
                assert!(psi(&FoldedCauchy, n, s, b).unwrap().abs() < 1e-12);
                assert!(psi(&Exponential { rate: 1.0 }, n, s, b).unwrap().abs() < 1e-12);
            }
        }
    }

    #[test]
    fn cauchy_c_n_is_stable_under_grid_refinement() {
        let a = c_n(&FoldedCauchy, 3, 0.5).unwrap();
        let b = c_n_with_grid(&FoldedCauchy, 3, 0.5, 10 * C_GRID).unwrap();
        assert!(!a.no_root && a.c > 0.0 && a.c < 0.5 / 3.0);
        assert!((a.c - b.c).abs() < 1e-10);
        // ψ changes sign there
        assert!(psi(&FoldedCauchy, 3, 0.5, a.c * 1.001).unwrap() >= 0.0);
        assert!(psi(&FoldedCauchy, 3, 0.5, a.c * 0.999).unwrap() < 0.0);
    }

    #[test]
    fn uniform_has_no_interior_root() {
        let u = Uniform { hi: 1.0 };
        for n in 2..6 {
            for s in [0.0, 0.25, 0.7] {
                let r = c_n(&u, n, s).unwrap();
                assert!(r.no_root);
                let b = (1.0 - s) / n as f64;
                for k in 1..=20 {
                    assert!(psi(&u, n, s, b * k as f64 / 20.0).unwrap() >= -1e-14);
                }
                // n E[U | U ≥ s]
                let phi = phi_n(&u, n, s).unwrap();
                assert!((phi - n as f64 * 0.5 * (1.0 + s)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn single_variable_bound_is_the_cdf() {
        // for n = 1, ψ has a double zero at c = b, so c is only located to about √ε
        for t in [0.2, 1.0, 3.0, 10.0] {
            assert!((m_plus(&FoldedCauchy, 1, t).unwrap() - FoldedCauchy.cdf(t)).abs() < 1e-7);
            let e = Exponential { rate: 1.0 };
            assert!((m_plus(&e, 1, t).unwrap() - e.cdf(t)).abs() < 1e-7);
        }
    }

    #[test]
    fn antithetic_uniform_pair() {
        let u = Uniform { hi: 1.0 };
        assert_eq!(m_plus(&u, 2, 1.0).unwrap(), 0.0);
        // φ_2(s) = 1 + s
        assert!((m_plus(&u, 2, 1.5).unwrap() - 0.5).abs() < 1e-9);
        assert_eq!(m_plus(&u, 3, 3.0).unwrap(), 1.0);
    }

    #[test]
    fn phi_grid_is_increasing() {
        for n in [2, 5] {
            let (vals, inc) = phi_grid(&FoldedCauchy, n).unwrap();
            assert!(inc && vals.len() == 1000);
        }
        assert!(phi_grid(&Uniform { hi: 1.0 }, 3).unwrap().1);
    }

    #[test]
    fn phi_is_increasing_in_s() {
        for n in [2, 3, 5] {
            let vals: Vec<f64> = (0..20).map(|k| phi_n(&FoldedCauchy, n, k as f64 / 20.0).unwrap()).collect();
            assert!(vals.windows(2).all(|w| w[1] > w[0]), "{n}: {vals:?}");
        }
    }

    #[test]
    fn cauchy_tail_probability_grows_with_n() {
        let rows = divergence_table(&FoldedCauchy, &[2, 3, 4, 5, 6, 7, 8], 3.0).unwrap();
        assert!(rows.windows(2).all(|w| w[1].prob > w[0].prob));
        // at M = 1 the bound is already saturated: φ_n(0) ≥ n
        let rows = divergence_table(&FoldedCauchy, &[2, 3, 4], 1.0).unwrap();
        assert!(rows.iter().all(|r| r.prob == 1.0));
        let u = divergence_table(&Uniform { hi: 1.0 }, &[2, 3, 4], 1.0).unwrap();
        assert!(u.iter().all(|r| r.prob <= 0.5));
    }

    #[test]
    fn markov_bound_examples() {
        let f = DiscreteDistribution::new(vec![Rational::from_i64(1), Rational::from_i64(3)]).unwrap();
        assert_eq!(markov_hull_bound(&f, &Rational::from_i64(10)).unwrap(), Rational::from_ratio(1, 5));
        let g = DiscreteDistribution::new(vec![1.0, 3.0]).unwrap();
        assert!(markov_hull_bound(&g, &1e12).unwrap() < 1e-11);
        assert!(markov_hull_bound(&g, &0.0).is_err());
    }

    #[test]
    fn markov_bound_dominates_hull_members() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let n = rng.gen_range(2..7);
            let atoms: Vec<f64> = (0..n).map(|_| rng.gen_range(-5.0..5.0)).collect();
            let f = DiscreteDistribution::new(atoms.clone()).unwrap();
            let m = rng.gen_range(0.5..6.0);
            let bound = markov_hull_bound(&f, &m).unwrap();
            let mut y = vec![0.0; n];
            let mut left = 1.0;
            for j in 0..4 {
                let w = if j == 3 { left } else { rng.gen_range(0.0..left) };
                left -= w;
                let mut perm = atoms.clone();
                perm.shuffle(&mut rng);
                for (yi, p) in y.iter_mut().zip(&perm) {
                    *yi += w * p;
                }
            }
            let tail = y.iter().filter(|v| v.abs() >= m).count() as f64 / n as f64;
            assert!(tail <= bound + 1e-12);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn bound_is_monotone_and_below_naive(n in 2usize..5, t1 in 0.5f64..20.0, dt in 0.0f64..10.0) {
            let a = m_plus(&FoldedCauchy, n, t1).unwrap();
            let b = m_plus(&FoldedCauchy, n, t1 + dt).unwrap();
            prop_assert!((0.0..=1.0).contains(&a));
            prop_assert!(b >= a - 1e-12);
            // the comonotone coupling gives P[S < t] = F(t/n)
            prop_assert!(a <= FoldedCauchy.cdf(t1 / n as f64) + 1e-9);
        }
    }
}
