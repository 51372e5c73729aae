//! Two-regime stochastic volatility model.
//!
//! Under the physical measure `S_T = S_0 exp(σ W_T + (μ − σ²/2) T)`, where the
//! volatility `σ` is `σ_H` with probability `p` and `σ_L` otherwise, independently
//! of `W`. Pricing kernels `ξ^q`, `q ∈ (0, 1)`, put mass `q` on the high regime.
//! All of these laws are mixtures of two lognormals.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::quad::gauss_kronrod;
use crate::roots::{bisect, golden_max};
use crate::special::{norm_cdf, norm_isf, norm_pdf, norm_ppf, norm_sf};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StochVolParams {
    pub s0: f64,
    pub mu: f64,
    pub sigma_h: f64,
    pub sigma_l: f64,
    /// Probability of the high-volatility regime.
    pub p: f64,
    pub t: f64,
    /// Interest rate; only `0` is supported.
    pub r: f64,
}

impl StochVolParams {
    pub fn reference() -> Self {
        StochVolParams { s0: 1.0, mu: 0.05, sigma_h: 0.3, sigma_l: 0.1, p: 0.5, t: 1.0, r: 0.0 }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.s0, self.mu, self.sigma_h, self.sigma_l, self.p, self.t, self.r].iter().all(|v| v.is_finite());
        if !finite {
            return Err(Error::InvalidInput(format!("non-finite parameter in {self:?}")));
        }
        if self.s0 <= 0.0 || self.t <= 0.0 {
            return Err(Error::InvalidInput(format!("need S0 > 0 and T > 0, got S0 = {}, T = {}", self.s0, self.t)));
        }
        if !(self.sigma_h >= self.sigma_l && self.sigma_l > 0.0) {
            return Err(Error::InvalidInput(format!("need σ_H ≥ σ_L > 0, got {} and {}", self.sigma_h, self.sigma_l)));
        }
        if !(self.p > 0.0 && self.p < 1.0) {
            return Err(Error::InvalidInput(format!("need p in (0, 1), got {}", self.p)));
        }
        if self.r != 0.0 {
            return Err(Error::InvalidInput(format!("only r = 0 is supported, got {}", self.r)));
        }
        Ok(())
    }

    pub fn theta_h(&self) -> f64 {
        self.mu / self.sigma_h
    }

    pub fn theta_l(&self) -> f64 {
        self.mu / self.sigma_l
    }

    /// `m = S_0 e^{μT}`.
    pub fn mean(&self) -> f64 {
        self.s0 * libm::exp(self.mu * self.t)
    }

    /// `Var[S_T] = (p e^{σ_H² T} + (1 − p) e^{σ_L² T} − 1) m²`.
    pub fn model_variance(&self) -> f64 {
        let m = self.mean();
        (self.p * libm::exp(self.sigma_h * self.sigma_h * self.t) + (1.0 - self.p) * libm::exp(self.sigma_l * self.sigma_l * self.t) - 1.0) * m * m
    }
}

/// `ln X ∼ N(loc, scale²)`; `scale = 0` is an atom at `e^{loc}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Component {
    pub weight: f64,
    pub loc: f64,
    pub scale: f64,
}

impl Component {
    fn cdf_log(&self, y: f64) -> f64 {
        if self.scale == 0.0 {
            return if y >= self.loc { 1.0 } else { 0.0 };
        }
        norm_cdf((y - self.loc) / self.scale)
    }

    fn sf_log(&self, y: f64) -> f64 {
        if self.scale == 0.0 {
            return if y >= self.loc { 0.0 } else { 1.0 };
        }
        norm_sf((y - self.loc) / self.scale)
    }

    fn pdf_log(&self, y: f64) -> f64 {
        norm_pdf((y - self.loc) / self.scale) / self.scale
    }
}

/// A two-component lognormal mixture.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogMixture {
    pub components: [Component; 2],
}

impl LogMixture {
    fn has_atoms(&self) -> bool {
        self.components.iter().any(|c| c.scale == 0.0)
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        let y = libm::log(x);
        self.components.iter().map(|c| c.weight * c.cdf_log(y)).sum()
    }

    pub fn sf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 1.0;
        }
        let y = libm::log(x);
        self.components.iter().map(|c| c.weight * c.sf_log(y)).sum()
    }

    pub fn mean(&self) -> f64 {
        self.components.iter().map(|c| c.weight * libm::exp(c.loc + 0.5 * c.scale * c.scale)).sum()
    }

    /// Levels `u` at which the quantile function jumps.
    pub fn jump_levels(&self) -> Vec<f64> {
        if !self.has_atoms() {
            return Vec::new();
        }
        let [a, b] = self.components;
        let (lo, hi) = if a.loc <= b.loc { (a, b) } else { (b, a) };
        if lo.scale == 0.0 && hi.scale == 0.0 && lo.loc < hi.loc {
            vec![lo.weight]
        } else {
            Vec::new()
        }
    }

    /// The quantile at level `u = Φ(t)`, accurate in both tails.
    ///
    /// Inverts the mixture cdf in log space between the component quantiles, using the
    /// survival function when `t > 0`.
    pub fn quantile_score(&self, t: f64) -> f64 {
        let ends = self.components.map(|c| c.loc + c.scale * t);
        let (mut lo, mut hi) = (ends[0].min(ends[1]), ends[0].max(ends[1]));
        if hi - lo <= 1e-15 * (1.0 + libm::fabs(lo)) {
            return libm::exp(lo);
        }
        let upper = t > 0.0;
        let target = if upper { norm_sf(t) } else { norm_cdf(t) };
        // increasing in y in both branches
        let resid = |y: f64| -> f64 {
            if upper {
                target - self.components.iter().map(|c| c.weight * c.sf_log(y)).sum::<f64>()
            } else {
                self.components.iter().map(|c| c.weight * c.cdf_log(y)).sum::<f64>() - target
            }
        };
        if self.has_atoms() {
            // smallest y with F(y) ≥ u
            let r_hi = resid(hi);
            let want = |r: f64| if upper { r >= 0.0 } else { r >= 0.0 };
            if resid(lo) >= 0.0 {
                return libm::exp(lo);
            }
            debug_assert!(want(r_hi));
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if mid == lo || mid == hi {
                    break;
                }
                if resid(mid) >= 0.0 {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            return libm::exp(hi);
        }
        let mut y = 0.5 * (lo + hi);
        for _ in 0..200 {
            let r = resid(y);
            if r == 0.0 {
                break;
            }
            if r > 0.0 {
                hi = y;
            } else {
                lo = y;
            }
            let d: f64 = self.components.iter().map(|c| c.weight * c.pdf_log(y)).sum();
            let mut next = y - r / d;
            if !(next > lo && next < hi) || !next.is_finite() {
                next = 0.5 * (lo + hi);
            }
            if libm::fabs(next - y) <= 4e-16 * (1.0 + libm::fabs(y)) || hi - lo <= 4e-16 * (1.0 + libm::fabs(y)) {
                y = next;
                break;
            }
            y = next;
        }
        libm::exp(y)
    }

    /// `F^{-1}(u)` by direct cdf inversion.
    pub fn quantile_inverse(&self, u: f64) -> f64 {
        let t = if u > 0.5 { norm_isf(1.0 - u) } else { norm_ppf(u) };
        self.quantile_score(t)
    }

    /// `F^{-1}(u) = exp(loc_1 + scale_1 Φ^{-1}(α))` where `α` solves
    /// `loc_1 + scale_1 Φ^{-1}(α) = loc_2 + scale_2 Φ^{-1}((u − α w_1) / w_2)`.
    pub fn quantile_alpha(&self, u: f64) -> Result<f64> {
        if !(u > 0.0 && u < 1.0) {
            return Err(Error::Domain(format!("quantile level must lie in (0, 1), got {u}")));
        }
        let [a, b] = self.components;
        if self.has_atoms() {
            return Ok(self.quantile_inverse(u));
        }
        let (w1, w2) = (a.weight, b.weight);
        let lo = ((u - w2) / w1).max(0.0);
        let hi = (u / w1).min(1.0);
        let nudge = 1e-14;
        let h = |alpha: f64| {
            let beta = ((u - alpha * w1) / w2).clamp(0.0, 1.0);
            (a.loc + a.scale * norm_ppf(alpha)) - (b.loc + b.scale * norm_ppf(beta))
        };
        let (l, r) = (lo + nudge * (hi - lo), hi - nudge * (hi - lo));
        if !(l < r) {
            return Err(Error::Bracket(format!("degenerate α bracket at u = {u}")));
        }
        // α pinned at an end of its range: the first component's share is 0 or w_1
        if h(l) > 0.0 && lo == 0.0 {
            return Ok(libm::exp(b.loc + b.scale * norm_ppf(u / w2)));
        }
        if h(r) < 0.0 && hi == 1.0 {
            return Ok(libm::exp(b.loc + b.scale * norm_ppf((u - w1) / w2)));
        }
        let alpha = bisect(h, l, r, 1e-15 * hi.max(1e-300), 400)?;
        let beta = ((u - alpha * w1) / w2).clamp(0.0, 1.0);
        // read the quantile off the component whose level is further from 0 and 1
        if alpha.min(1.0 - alpha) >= beta.min(1.0 - beta) {
            Ok(libm::exp(a.loc + a.scale * norm_ppf(alpha)))
        } else {
            Ok(libm::exp(b.loc + b.scale * norm_ppf(beta)))
        }
    }
}

/// Law of `S_T`.
pub fn stock_mixture(p: &StochVolParams) -> LogMixture {
    let comp = |w: f64, s: f64| Component { weight: w, loc: libm::log(p.s0) + (p.mu - 0.5 * s * s) * p.t, scale: s * libm::sqrt(p.t) };
    LogMixture { components: [comp(p.p, p.sigma_h), comp(1.0 - p.p, p.sigma_l)] }
}

/// Law of `ξ^q_T`.
pub fn kernel_mixture(p: &StochVolParams, q: f64) -> LogMixture {
    let comp = |w: f64, mass: f64, th: f64| Component {
        weight: w,
        loc: libm::log(mass / w) - p.r * p.t - 0.5 * th * th * p.t,
        scale: libm::fabs(th) * libm::sqrt(p.t),
    };
    LogMixture { components: [comp(p.p, q, p.theta_h()), comp(1.0 - p.p, 1.0 - q, p.theta_l())] }
}

fn check_q(q: f64) -> Result<()> {
    if q > 0.0 && q < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("q must lie in (0, 1), got {q}")))
    }
}

pub fn mixture_cdf_s(p: &StochVolParams, x: f64) -> Result<f64> {
    p.validate()?;
    if x <= 0.0 {
        return Err(Error::Domain(format!("cdf argument must be positive, got {x}")));
    }
    Ok(stock_mixture(p).cdf(x))
}

pub fn mixture_cdf_kernel(p: &StochVolParams, q: f64, x: f64) -> Result<f64> {
    p.validate()?;
    check_q(q)?;
    if x <= 0.0 {
        return Err(Error::Domain(format!("cdf argument must be positive, got {x}")));
    }
    Ok(kernel_mixture(p, q).cdf(x))
}

pub fn mixture_quantile_s(p: &StochVolParams, u: f64) -> Result<f64> {
    p.validate()?;
    stock_mixture(p).quantile_alpha(u)
}

pub fn mixture_quantile_kernel(p: &StochVolParams, q: f64, u: f64) -> Result<f64> {
    p.validate()?;
    check_q(q)?;
    kernel_mixture(p, q).quantile_alpha(u)
}

/// A target distribution, described by its quantile function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Target {
    Constant(f64),
    Normal { mean: f64, sd: f64 },
    /// `ln X ∼ N(loc, scale²)`.
    LogNormal { loc: f64, scale: f64 },
    Mixture(LogMixture),
}

impl Target {
    /// Quantile at level `Φ(t)`.
    pub fn quantile_score(&self, t: f64) -> f64 {
        match *self {
            Target::Constant(c) => c,
            Target::Normal { mean, sd } => mean + sd * t,
            Target::LogNormal { loc, scale } => libm::exp(loc + scale * t),
            Target::Mixture(m) => m.quantile_score(t),
        }
    }

    pub fn quantile(&self, u: f64) -> f64 {
        let t = if u > 0.5 { norm_isf(1.0 - u) } else { norm_ppf(u) };
        self.quantile_score(t)
    }

    pub fn mean(&self) -> f64 {
        match *self {
            Target::Constant(c) => c,
            Target::Normal { mean, .. } => mean,
            Target::LogNormal { loc, scale } => libm::exp(loc + 0.5 * scale * scale),
            Target::Mixture(m) => m.mean(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PriceOptions {
    /// Quantile-level truncation of the pricing integral.
    pub eps: f64,
    /// Points of the unimodality scan over `q`.
    pub grid: usize,
    pub q_tol: f64,
}

impl Default for PriceOptions {
    fn default() -> Self {
        PriceOptions { eps: 1e-10, grid: 101, q_tol: 1e-8 }
    }
}

fn g_raw(p: &StochVolParams, q: f64, target: &Target, eps: f64) -> Result<f64> {
    let kernel = kernel_mixture(p, q);
    let a = norm_ppf(eps);
    let b = -a;
    let mut cuts = vec![a];
    for level in kernel.jump_levels() {
        let t = norm_ppf(level);
        if t > a && t < b {
            cuts.push(t);
        }
    }
    cuts.push(b);
    let mut total = 0.0;
    for w in cuts.windows(2) {
        // kernel at level u, target at level 1 − u
        let f = |t: f64| kernel.quantile_score(t) * target.quantile_score(-t) * norm_pdf(t);
        total += gauss_kronrod(f, w[0], w[1], 1e-15, 1e-11)?;
    }
    Ok(total)
}

/// `g(q) = ∫_0^1 F_{ξ^q}^{-1}(u) F^{-1}(1 − u) du`, the anti-monotone price of the
/// target under `ξ^q`, truncated to `[ε, 1 − ε]` and checked against `ε/2`.
pub fn g_of_q(p: &StochVolParams, q: f64, target: &Target, eps: f64) -> Result<f64> {
    p.validate()?;
    check_q(q)?;
    let g = g_raw(p, q, target, eps)?;
    let g_half = g_raw(p, q, target, 0.5 * eps)?;
    let rel = libm::fabs(g - g_half) / libm::fabs(g).max(1e-300);
    if rel >= 1e-6 {
        return Err(Error::Quadrature(format!("truncation check failed at q = {q}: relative change {rel:e} when halving ε = {eps:e}")));
    }
    Ok(g)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PriceReport {
    pub price: f64,
    pub q0: f64,
    /// Whether the maximizer lies strictly inside the scanned `q` range.
    pub interior: bool,
    /// Whether the scan found a single local maximum.
    pub unimodal: bool,
}

/// `sup_q g(q)`: the distributional price of the target.
pub fn distribution_price(p: &StochVolParams, target: &Target, opts: &PriceOptions) -> Result<PriceReport> {
    p.validate()?;
    let k = opts.grid.max(3);
    let lo = 0.005;
    let hi = 0.995;
    let step = (hi - lo) / (k - 1) as f64;
    let mut vals = Vec::with_capacity(k);
    for i in 0..k {
        vals.push(g_raw(p, lo + step * i as f64, target, opts.eps)?);
    }
    let scale = vals.iter().fold(0.0f64, |m, v| m.max(libm::fabs(*v)));
    let flat = 1e-13 * scale.max(1.0);
    let mut best = 0;
    for i in 1..k {
        if vals[i] > vals[best] {
            best = i;
        }
    }
    let peaks = (0..k)
        .filter(|&i| {
            let left = i == 0 || vals[i] > vals[i - 1] + flat;
            let right = i + 1 == k || vals[i] >= vals[i + 1] - flat;
            left && right && (i == 0 || i + 1 == k || vals[i] >= vals[i + 1])
        })
        .count();
    let a = lo + step * best.saturating_sub(1) as f64;
    let b = lo + step * (best + 1).min(k - 1) as f64;
    let mut err = None;
    let (q0, _) = golden_max(
        |q| match g_raw(p, q, target, opts.eps) {
            Ok(v) => v,
            Err(e) => {
                err = Some(e);
                f64::NEG_INFINITY
            }
        },
        a,
        b,
        opts.q_tol,
    );
    if let Some(e) = err {
        return Err(e);
    }
    let price = g_of_q(p, q0, target, opts.eps)?;
    Ok(PriceReport { price, q0, interior: best > 0 && best + 1 < k, unimodal: peaks <= 1 })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TargetFamily {
    Normal,
    LogNormal,
}

/// The target of the family with mean `S_0 e^{μT}` and the given variance.
pub fn matched_target(p: &StochVolParams, family: TargetFamily, variance: f64) -> Target {
    let m = p.mean();
    if variance <= 0.0 {
        return Target::Constant(m);
    }
    match family {
        TargetFamily::Normal => Target::Normal { mean: m, sd: libm::sqrt(variance) },
        TargetFamily::LogNormal => {
            let s = libm::sqrt(libm::log1p(variance / (m * m)));
            Target::LogNormal { loc: libm::log(m) - 0.5 * s * s, scale: s }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrontierRow {
    pub variance: f64,
    pub price_normal: f64,
    pub price_lognormal: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Frontier {
    pub rows: Vec<FrontierRow>,
    /// Both price columns strictly decrease along the (ascending) variance grid.
    pub strictly_decreasing: bool,
}

/// Distributional prices of variance-matched normal and lognormal targets.
pub fn variance_frontier(p: &StochVolParams, variances: &[f64], opts: &PriceOptions) -> Result<Frontier> {
    p.validate()?;
    if variances.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
        return Err(Error::InvalidInput(format!("variances must be positive")));
    }
    let mut rows = Vec::with_capacity(variances.len());
    for &v in variances {
        let n = distribution_price(p, &matched_target(p, TargetFamily::Normal, v), opts)?;
        let l = distribution_price(p, &matched_target(p, TargetFamily::LogNormal, v), opts)?;
        rows.push(FrontierRow { variance: v, price_normal: n.price, price_lognormal: l.price });
    }
    let strictly_decreasing = rows
        .windows(2)
        .all(|w| w[1].variance > w[0].variance && w[1].price_normal < w[0].price_normal && w[1].price_lognormal < w[0].price_lognormal);
    Ok(Frontier { rows, strictly_decreasing })
}
