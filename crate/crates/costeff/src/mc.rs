//! Monte Carlo check of the anti-monotone price in the regime-switching model.

use costeff_core::stochvol::StochVolParams;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub samples: usize,
    pub seed: u64,
    pub estimate: f64,
    pub std_error: f64,
}

/// Estimate `E[ξ^q S_T]` under the anti-monotone coupling by pairing sorted
/// independent draws of `S_T` (ascending) with draws of `ξ^q` (descending).
pub fn antimonotone_stock_price(p: &StochVolParams, q: f64, samples: usize, seed: u64) -> McEstimate {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut s = Vec::with_capacity(samples);
    let mut xi = Vec::with_capacity(samples);
    let root_t = p.t.sqrt();
    for _ in 0..samples {
        let sigma = if rng.gen_bool(p.p) { p.sigma_h } else { p.sigma_l };
        let w: f64 = rng.sample(StandardNormal);
        s.push(p.s0 * ((p.mu - 0.5 * sigma * sigma) * p.t + sigma * root_t * w).exp());
        let (mass, weight, sigma) = if rng.gen_bool(p.p) { (q, p.p, p.sigma_h) } else { (1.0 - q, 1.0 - p.p, p.sigma_l) };
        let theta = p.mu / sigma;
        let w: f64 = rng.sample(StandardNormal);
        xi.push(mass / weight * (-0.5 * theta * theta * p.t - theta * root_t * w).exp());
    }
    s.sort_by(f64::total_cmp);
    xi.sort_by(|a, b| b.total_cmp(a));
    let n = samples as f64;
    let prods: Vec<f64> = s.iter().zip(&xi).map(|(a, b)| a * b).collect();
    let mean = prods.iter().sum::<f64>() / n;
    let var = prods.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0).max(1.0);
    McEstimate { samples, seed, estimate: mean, std_error: (var / n).sqrt() }
}
