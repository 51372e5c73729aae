//! Finite-state markets, the pricing-kernel polytope and superhedging prices.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use alloc::format;

use crate::error::{Error, Result};
use crate::linalg::least_squares;
use crate::lp::{LinearProgram, Relation};
use crate::polytope::{enumerate_vertices, reduce_system};
use crate::scalar::Scalar;

/// Numerical tolerances; ignored by exact scalars.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Equality and sign feasibility.
    pub feasibility: f64,
    /// Optimality gaps and tie detection.
    pub optimality: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { feasibility: 1e-10, optimality: 1e-9 }
    }
}

/// One-period market with `n` states, a riskless asset paying zero interest, and
/// `d` risky assets.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteMarket<S> {
    n: usize,
    assets: Vec<Vec<S>>,
    prices: Vec<S>,
    probabilities: Option<Vec<S>>,
}

impl<S: Scalar> DiscreteMarket<S> {
    /// Equiprobable market.
    pub fn new(n: usize, assets: Vec<Vec<S>>, prices: Vec<S>) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidInput(String::from("a market needs at least two states")));
        }
        if assets.len() != prices.len() {
            return Err(Error::InvalidInput(format!(
                "{} asset payoff vectors but {} prices",
                assets.len(),
                prices.len()
            )));
        }
        if let Some((k, a)) = assets.iter().enumerate().find(|(_, a)| a.len() != n) {
            return Err(Error::InvalidInput(format!("asset {} has {} payoffs, expected {}", k, a.len(), n)));
        }
        Ok(DiscreteMarket { n, assets, prices, probabilities: None })
    }

    /// Attach explicit state probabilities (superhedging and attainability only).
    pub fn with_probabilities(mut self, probabilities: Vec<S>) -> Result<Self> {
        if probabilities.len() != self.n || probabilities.iter().any(|p| *p <= S::zero()) {
            return Err(Error::InvalidInput(String::from("probabilities must be positive, one per state")));
        }
        let mut total = S::zero();
        for p in &probabilities {
            total += p.clone();
        }
        if !(total - S::one()).is_zero_tol(&S::tol(1e-12)) {
            return Err(Error::InvalidInput(String::from("probabilities must sum to one")));
        }
        self.probabilities = Some(probabilities);
        Ok(self)
    }

    /// The 3-state example market: `S0 = 2`, `S_T = (4, 2, 1)`.
    pub fn three_state() -> Self {
        DiscreteMarket::new(3, vec![vec![S::from_i64(4), S::from_i64(2), S::from_i64(1)]], vec![S::from_i64(2)])
            .expect("valid market")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn assets(&self) -> &[Vec<S>] {
        &self.assets
    }

    pub fn prices(&self) -> &[S] {
        &self.prices
    }

    pub fn is_equiprobable(&self) -> bool {
        self.probabilities.is_none()
    }

    pub fn probability(&self, i: usize) -> S {
        match &self.probabilities {
            Some(p) => p[i].clone(),
            None => S::from_ratio(1, self.n as i64),
        }
    }

    /// `E[ξ Z]` under the physical measure.
    pub fn expectation(&self, xi: &[S], z: &[S]) -> S {
        let mut s = S::zero();
        for i in 0..self.n {
            s += self.probability(i) * xi[i].clone() * z[i].clone();
        }
        s
    }

    fn equalities(&self) -> (Vec<Vec<S>>, Vec<S>) {
        let mut a = Vec::with_capacity(self.assets.len() + 1);
        let mut b = Vec::with_capacity(self.assets.len() + 1);
        a.push((0..self.n).map(|i| self.probability(i)).collect());
        b.push(S::one());
        for (asset, price) in self.assets.iter().zip(&self.prices) {
            a.push((0..self.n).map(|i| self.probability(i) * asset[i].clone()).collect());
            b.push(price.clone());
        }
        (a, b)
    }
}

/// The closed set of pricing kernels, by equalities and enumerated vertices.
#[derive(Debug, Clone)]
pub struct KernelPolytope<S> {
    market: DiscreteMarket<S>,
    pub a_eq: Vec<Vec<S>>,
    pub b_eq: Vec<S>,
    pub vertices: Vec<Vec<S>>,
    /// Whether each vertex is strictly positive.
    pub interior: Vec<bool>,
    /// Optimal value of `max min_i ξ_i` over the polytope.
    pub strict_margin: S,
    pub tolerances: Tolerances,
}

/// Superhedging price with the vertices attaining it.
#[derive(Debug, Clone, PartialEq)]
pub struct SuperhedgePrice<S> {
    pub value: S,
    pub argmax: Vec<usize>,
}

/// Replication test result; `cash` and `holdings` replicate the claim when attainable.
#[derive(Debug, Clone, PartialEq)]
pub struct Attainability<S> {
    pub attainable: bool,
    pub cash: S,
    pub holdings: Vec<S>,
    pub residual: S,
    pub price_spread: S,
}

/// Assemble the kernel polytope, enumerate its vertices and check for arbitrage.
pub fn build_kernel_polytope<S: Scalar>(market: &DiscreteMarket<S>, tolerances: Tolerances) -> Result<KernelPolytope<S>> {
    let feas = S::tol(tolerances.feasibility);
    let (a, b) = market.equalities();
    reduce_system(&a, &b, &feas).map_err(|_| Error::DegenerateMarket)?;
    let n = market.n();
    let mut obj = vec![S::zero(); n + 1];
    obj[n] = S::one();
    let mut lp = LinearProgram::maximize(obj);
    lp.set_free(n);
    for (row, bi) in a.iter().zip(&b) {
        let mut r = row.clone();
        r.push(S::zero());
        lp.add(r, Relation::Eq, bi.clone());
    }
    for i in 0..n {
        let mut r = vec![S::zero(); n + 1];
        r[i] = S::one();
        r[n] = -S::one();
        lp.add(r, Relation::Ge, S::zero());
    }
    let margin = match lp.solve(&feas) {
        Ok(sol) => sol.value,
        Err(Error::Infeasible) => return Err(Error::Arbitrage),
        Err(e) => return Err(e),
    };
    if margin <= feas {
        return Err(Error::Arbitrage);
    }
    let vertices = enumerate_vertices(&a, &b, &feas)?;
    if vertices.is_empty() {
        return Err(Error::Arbitrage);
    }
    let interior = vertices.iter().map(|v| v.iter().all(|x| *x > feas)).collect();
    Ok(KernelPolytope { market: market.clone(), a_eq: a, b_eq: b, vertices, interior, strict_margin: margin, tolerances })
}

impl<S: Scalar> KernelPolytope<S> {
    pub fn market(&self) -> &DiscreteMarket<S> {
        &self.market
    }

    pub fn n(&self) -> usize {
        self.market.n()
    }

    pub fn expectation(&self, xi: &[S], z: &[S]) -> S {
        self.market.expectation(xi, z)
    }

    /// Whether `xi` satisfies the pricing equalities and nonnegativity.
    pub fn contains(&self, xi: &[S]) -> bool {
        let feas = S::tol(self.tolerances.feasibility * 10.0);
        if xi.len() != self.n() || xi.iter().any(|x| *x < -feas.clone()) {
            return false;
        }
        self.a_eq.iter().zip(&self.b_eq).all(|(row, bi)| {
            let mut s = -bi.clone();
            for (a, x) in row.iter().zip(xi) {
                s += a.clone() * x.clone();
            }
            s.is_zero_tol(&feas)
        })
    }

    /// `c(Z) = max_ξ E[ξ Z]` over the vertices, with every vertex within the
    /// optimality tolerance of the maximum.
    pub fn superhedge_price(&self, z: &[S]) -> SuperhedgePrice<S> {
        let values: Vec<S> = self.vertices.iter().map(|v| self.expectation(v, z)).collect();
        let mut best = values[0].clone();
        for v in &values[1..] {
            if *v > best {
                best = v.clone();
            }
        }
        let tol = S::tol(self.tolerances.optimality);
        let argmax = values
            .iter()
            .enumerate()
            .filter(|(_, v)| (*v).clone() >= best.clone() - tol.clone())
            .map(|(i, _)| i)
            .collect();
        SuperhedgePrice { value: best, argmax }
    }

    /// Superhedging price by a direct LP over the polytope.
    pub fn superhedge_price_lp(&self, z: &[S]) -> Result<S> {
        let n = self.n();
        let obj = (0..n).map(|i| self.market.probability(i) * z[i].clone()).collect();
        let mut lp = LinearProgram::maximize(obj);
        for (row, bi) in self.a_eq.iter().zip(&self.b_eq) {
            lp.add(row.clone(), Relation::Eq, bi.clone());
        }
        Ok(lp.solve(&S::tol(self.tolerances.feasibility))?.value)
    }

    /// Replicability of `z` by cash and the traded assets.
    ///
    /// Computed twice: least squares onto the asset span, and constancy of `E[ξ Z]`
    /// across vertices. Disagreement is an internal error.
    pub fn is_attainable(&self, z: &[S]) -> Result<Attainability<S>> {
        let n = self.n();
        let market = &self.market;
        let rows: Vec<Vec<S>> = (0..n)
            .map(|i| {
                let mut r = vec![S::one()];
                r.extend(market.assets().iter().map(|a| a[i].clone()));
                r
            })
            .collect();
        let tol = S::tol(self.tolerances.optimality);
        let (coef, residual) = least_squares(&rows, z, &S::tol(1e-13));
        let mut res = S::zero();
        for r in residual {
            res = S::max_of(res, r.abs());
        }
        let prices: Vec<S> = self.vertices.iter().map(|v| self.expectation(v, z)).collect();
        let mut lo = prices[0].clone();
        let mut hi = prices[0].clone();
        for p in &prices {
            lo = S::min_of(lo, p.clone());
            hi = S::max_of(hi, p.clone());
        }
        let spread = hi - lo;
        let in_span = res <= tol;
        let constant = spread <= tol;
        if in_span != constant {
            return Err(Error::InternalInconsistency(format!(
                "attainability tests disagree: residual {:?}, price spread {:?}",
                res.to_f64(),
                spread.to_f64()
            )));
        }
        Ok(Attainability {
            attainable: in_span,
            cash: coef[0].clone(),
            holdings: coef[1..].to_vec(),
            residual: res,
            price_spread: spread,
        })
    }
}
