//! The four distributional cost problems and perfect cost-efficiency.
//!
//! For a target distribution `F` on an equiprobable market:
//!
//! * maximin: `sup_ξ inf_{Z∼F} E[ξZ]`
//! * convexified maximin: `sup_ξ inf_{Z∈conv(F)} E[ξZ]`
//! * convexified minimax: `inf_{Z∈conv(F)} sup_ξ E[ξZ]`
//! * minimax: `inf_{Z∼F} sup_ξ E[ξZ]`

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::lp::{LinearProgram, Relation};
use crate::market::KernelPolytope;
use crate::orders::{antimonotone_couplings, antimonotone_price, cmp, distinct_permutation_count, next_permutation, DiscreteDistribution};
use crate::polytope::enumerate_vertices_ineq;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Problem {
    Maximin,
    CvxMaximin,
    CvxMinimax,
    Minimax,
}

impl Problem {
    pub fn name(self) -> &'static str {
        match self {
            Problem::Maximin => "maximin",
            Problem::CvxMaximin => "cvx_maximin",
            Problem::CvxMinimax => "cvx_minimax",
            Problem::Minimax => "minimax",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SolverOptions {
    /// Largest `n` for which the minimax problem enumerates permutations.
    pub perm_guard: usize,
    /// Above this size the convexified minimax uses the lifted formulation.
    pub lift_threshold: usize,
    pub max_cut_rounds: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions { perm_guard: 8, lift_threshold: 12, max_cut_rounds: 10_000 }
    }
}

/// Every payoff in `payoffs` (or their convex hull) is optimal against every kernel
/// in `kernels` (or their convex hull).
#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerSet<S> {
    pub payoffs: Vec<Vec<S>>,
    pub payoff_hull: bool,
    pub kernels: Vec<Vec<S>>,
    pub kernel_hull: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport<S> {
    pub problem: Problem,
    pub value: S,
    pub optimizers: Vec<OptimizerSet<S>>,
    /// Extreme points of the optimal kernel set.
    pub kernel_face: Vec<Vec<S>>,
    /// Payoffs whose price constraint is active at the optimum (maximin problems).
    pub active_payoffs: Vec<Vec<S>>,
    /// Indices of kernel-polytope vertices active at the optimum (minimax problems).
    pub active_vertices: Vec<usize>,
}

impl<S: Scalar> SolveReport<S> {
    /// Every reported payoff, hull generators included.
    pub fn all_payoffs(&self) -> impl Iterator<Item = &Vec<S>> {
        self.optimizers.iter().flat_map(|o| o.payoffs.iter())
    }
}

fn check_inputs<S: Scalar>(kp: &KernelPolytope<S>, f: &DiscreteDistribution<S>) -> Result<()> {
    if !kp.market().is_equiprobable() {
        return Err(Error::NonEquiprobable);
    }
    if f.n() != kp.n() {
        return Err(Error::InvalidInput(format!("distribution has {} atoms, market has {} states", f.n(), kp.n())));
    }
    Ok(())
}

fn tie_tol<S: Scalar>(kp: &KernelPolytope<S>) -> S {
    S::tol(kp.tolerances.feasibility * 10.0)
}

struct MaximinCore<S> {
    value: S,
    xi: Vec<S>,
    cuts: Vec<Vec<S>>,
}

/// `max t` s.t. `t ≤ E[ξ Z]` for the generated arrangements, cuts separated by sorting.
fn maximin_core<S: Scalar>(kp: &KernelPolytope<S>, f: &DiscreteDistribution<S>, opts: &SolverOptions) -> Result<MaximinCore<S>> {
    let n = kp.n();
    let feas = S::tol(kp.tolerances.feasibility);
    let opt = S::tol(kp.tolerances.optimality);
    let nn = S::from_i64(n as i64);
    let mut cuts: Vec<Vec<S>> = Vec::new();
    for v in &kp.vertices {
        let (_, z) = antimonotone_price(f, v);
        if !cuts.contains(&z) {
            cuts.push(z);
        }
    }
    for _ in 0..opts.max_cut_rounds {
        let mut obj = vec![S::zero(); n + 1];
        obj[n] = S::one();
        let mut lp = LinearProgram::maximize(obj);
        lp.set_free(n);
        for (row, b) in kp.a_eq.iter().zip(&kp.b_eq) {
            let mut r = row.clone();
            r.push(S::zero());
            lp.add(r, Relation::Eq, b.clone());
        }
        for z in &cuts {
            let mut r: Vec<S> = z.iter().map(|zi| -zi.clone() / nn.clone()).collect();
            r.push(S::one());
            lp.add(r, Relation::Le, S::zero());
        }
        let sol = lp.solve(&feas)?;
        let xi: Vec<S> = sol.x[..n].iter().map(|x| if *x < S::zero() { S::zero() } else { x.clone() }).collect();
        let t = sol.x[n].clone();
        let (phi, z) = antimonotone_price(f, &xi);
        if phi < t.clone() - opt.clone() {
            if cuts.contains(&z) {
                return Err(Error::InternalInconsistency(String::from("maximin separation repeated a cut")));
            }
            cuts.push(z);
            continue;
        }
        return Ok(MaximinCore { value: phi, xi, cuts });
    }
    Err(Error::InternalInconsistency(String::from("maximin cut generation did not converge")))
}

/// Extreme points of `{ξ ∈ Ξ̄ : min_σ E[ξ Z_σ] ≥ level}`.
///
/// Cuts are added lazily and redundant ones pruned before each enumeration round.
fn superlevel_face<S: Scalar>(kp: &KernelPolytope<S>, f: &DiscreteDistribution<S>, level: &S, seed_cuts: &[Vec<S>], opts: &SolverOptions) -> Result<Vec<Vec<S>>> {
    let n = kp.n();
    let feas = S::tol(kp.tolerances.feasibility);
    let opt = S::tol(kp.tolerances.optimality);
    let relaxed = level.clone() - opt.clone();
    let nn = S::from_i64(n as i64);
    let dedup = S::tol(1e-7);
    let mut cuts = seed_cuts.to_vec();
    for _ in 0..opts.max_cut_rounds {
        prune_cuts(&kp.a_eq, &kp.b_eq, &mut cuts, &relaxed, &nn, &feas)?;
        let mut g: Vec<Vec<S>> = (0..n)
            .map(|i| {
                let mut r = vec![S::zero(); n];
                r[i] = S::one();
                r
            })
            .collect();
        let mut h = vec![S::zero(); n];
        for z in &cuts {
            g.push(z.iter().map(|zi| zi.clone() / nn.clone()).collect());
            h.push(relaxed.clone());
        }
        let verts = enumerate_vertices_ineq(&kp.a_eq, &kp.b_eq, &g, &h, &feas, &dedup)?;
        let mut added = false;
        for v in &verts {
            let (phi, z) = antimonotone_price(f, v);
            if phi < relaxed.clone() - opt.clone() && !cuts.contains(&z) {
                cuts.push(z);
                added = true;
            }
        }
        if !added {
            return Ok(verts);
        }
    }
    Err(Error::InternalInconsistency(String::from("optimal kernel face enumeration did not converge")))
}

/// Drop cuts implied by the equalities, `ξ ≥ 0` and the remaining cuts.
fn prune_cuts<S: Scalar>(eq_rows: &[Vec<S>], eq_rhs: &[S], cuts: &mut Vec<Vec<S>>, relaxed: &S, nn: &S, feas: &S) -> Result<()> {
    let mut i = 0;
    while i < cuts.len() {
        let row = |z: &Vec<S>| -> Vec<S> { z.iter().map(|zi| zi.clone() / nn.clone()).collect() };
        let mut lp = LinearProgram::minimize(row(&cuts[i]));
        for (r, b) in eq_rows.iter().zip(eq_rhs) {
            lp.add(r.clone(), Relation::Eq, b.clone());
        }
        for (j, z) in cuts.iter().enumerate() {
            if j != i {
                lp.add(row(z), Relation::Ge, relaxed.clone());
            }
        }
        if lp.solve(feas)?.value >= relaxed.clone() - feas.clone() {
            cuts.remove(i);
        } else {
            i += 1;
        }
    }
    Ok(())
}

fn barycenter<S: Scalar>(points: &[Vec<S>]) -> Vec<S> {
    let k = S::from_i64(points.len() as i64);
    let mut c = vec![S::zero(); points[0].len()];
    for p in points {
        for (ci, pi) in c.iter_mut().zip(p) {
            *ci += pi.clone();
        }
    }
    c.into_iter().map(|x| x / k.clone()).collect()
}

fn maximin_report<S: Scalar>(kp: &KernelPolytope<S>, f: &DiscreteDistribution<S>, opts: &SolverOptions, problem: Problem) -> Result<SolveReport<S>> {
    check_inputs(kp, f)?;
    let core = maximin_core(kp, f, opts)?;
    let face = superlevel_face(kp, f, &core.value, &core.cuts, opts)?;
    let face = if face.is_empty() { vec![core.xi.clone()] } else { face };
    let hull = problem == Problem::CvxMaximin;
    let ties = tie_tol(kp);
    let mut optimizers = Vec::new();
    for xi in &face {
        let t = antimonotone_couplings(f, xi, &ties)?;
        optimizers.push(OptimizerSet { payoffs: t.payoffs().cloned().collect(), payoff_hull: hull, kernels: vec![xi.clone()], kernel_hull: false });
    }
    if face.len() > 1 {
        let t = antimonotone_couplings(f, &barycenter(&face), &ties)?;
        optimizers.push(OptimizerSet { payoffs: t.payoffs().cloned().collect(), payoff_hull: hull, kernels: face.clone(), kernel_hull: true });
    }
    let opt = S::tol(kp.tolerances.optimality);
    let active_payoffs = core
        .cuts
        .iter()
        .filter(|z| (kp.expectation(&core.xi, z) - core.value.clone()).abs() <= opt)
        .cloned()
        .collect();
    Ok(SolveReport { problem, value: core.value, optimizers, kernel_face: face, active_payoffs, active_vertices: Vec::new() })
}

/// `sup_ξ inf_{Z∼F} E[ξZ]` with the full optimal kernel face and its couplings.
pub fn solve_maximin<S: Scalar>(kp: &KernelPolytope<S>, f: &DiscreteDistribution<S>, opts: &SolverOptions) -> Result<SolveReport<S>> {
    maximin_report(kp, f, opts, Problem::Maximin)
}

/// `sup_ξ inf_{Z∈conv(F)} E[ξZ]`; same value as the maximin problem, each payoff
/// set is the face of `conv(F)` spanned by the couplings.
pub fn solve_cvx_maximin<S: Scalar>(kp: &KernelPolytope<S>, f: &DiscreteDistribution<S>, opts: &SolverOptions) -> Result<SolveReport<S>> {
    maximin_report(kp, f, opts, Problem::CvxMaximin)
}

/// `inf_{Z∼F} sup_ξ E[ξZ]` by enumerating the distinct arrangements of `F`.
pub fn solve_minimax<S: Scalar>(kp: &KernelPolytope<S>, f: &DiscreteDistribution<S>, opts: &SolverOptions) -> Result<SolveReport<S>> {
    check_inputs(kp, f)?;
    let n = kp.n();
    if n > opts.perm_guard {
        return Err(Error::SizeLimit { what: "minimax permutation enumeration", n, limit: opts.perm_guard });
    }
    let opt = S::tol(kp.tolerances.optimality);
    let mut perm = f.values().to_vec();
    let mut priced: Vec<(Vec<S>, S, Vec<usize>)> = Vec::with_capacity(distinct_permutation_count(f));
    let mut best: Option<S> = None;
    loop {
        let p = kp.superhedge_price(&perm);
        if best.as_ref().map_or(true, |b| p.value < *b) {
            best = Some(p.value.clone());
        }
        priced.push((perm.clone(), p.value, p.argmax));
        if !next_permutation(&mut perm) {
            break;
        }
    }
    let value = best.expect("at least one arrangement");
    let mut optimizers = Vec::new();
    let mut active_vertices: Vec<usize> = Vec::new();
    for (z, v, argmax) in priced {
        if v <= value.clone() + opt.clone() {
            for &i in &argmax {
                if !active_vertices.contains(&i) {
                    active_vertices.push(i);
                }
            }
            let kernels = argmax.iter().map(|&i| kp.vertices[i].clone()).collect();
            optimizers.push(OptimizerSet { payoffs: vec![z], payoff_hull: false, kernels, kernel_hull: true });
        }
    }
    active_vertices.sort_unstable();
    let kernel_face = active_vertices.iter().map(|&i| kp.vertices[i].clone()).collect();
    Ok(SolveReport { problem: Problem::Minimax, value, optimizers, kernel_face, active_payoffs: Vec::new(), active_vertices })
}

fn top_sums<S: Scalar>(f: &DiscreteDistribution<S>) -> Vec<S> {
    let mut acc = S::zero();
    f.descending()
        .into_iter()
        .map(|v| {
            acc += v;
            acc.clone()
        })
        .collect()
}

fn epigraph_rows<S: Scalar>(kp: &KernelPolytope<S>, lp: &mut LinearProgram<S>, width: usize) {
    let n = kp.n();
    let nn = S::from_i64(n as i64);
    for v in &kp.vertices {
        let mut r = vec![S::zero(); width];
        for i in 0..n {
            r[i] = -v[i].clone() / nn.clone();
        }
        r[n] = S::one();
        lp.add(r, Relation::Ge, S::zero());
    }
}

/// Lazy formulation: subset constraints `Σ_{i∈K} Z_i ≤ top_|K|(F)` added when violated.
fn cvx_minimax_lazy<S: Scalar>(kp: &KernelPolytope<S>, f: &DiscreteDistribution<S>, opts: &SolverOptions) -> Result<Vec<S>> {
    let n = kp.n();
    let feas = S::tol(kp.tolerances.feasibility);
    let tops = top_sums(f);
    let total = tops[n - 1].clone();
    let mut subsets: Vec<Vec<usize>> = Vec::new();
    for i in 0..n {
        subsets.push(vec![i]);
        subsets.push((0..n).filter(|&j| j != i).collect());
    }
    for _ in 0..opts.max_cut_rounds {
        let mut obj = vec![S::zero(); n + 1];
        obj[n] = S::one();
        let mut lp = LinearProgram::minimize(obj);
        for j in 0..=n {
            lp.set_free(j);
        }
        epigraph_rows(kp, &mut lp, n + 1);
        let mut r = vec![S::one(); n + 1];
        r[n] = S::zero();
        lp.add(r, Relation::Eq, total.clone());
        for s in &subsets {
            let mut r = vec![S::zero(); n + 1];
            for &i in s {
                r[i] = S::one();
            }
            lp.add(r, Relation::Le, tops[s.len() - 1].clone());
        }
        let sol = lp.solve(&feas)?;
        let z = sol.x[..n].to_vec();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| cmp(&z[j], &z[i]));
        let mut acc = S::zero();
        let mut added = false;
        for k in 0..n - 1 {
            acc += z[order[k]].clone();
            if acc > tops[k].clone() + feas.clone() {
                let mut s: Vec<usize> = order[..=k].to_vec();
                s.sort_unstable();
                if !subsets.contains(&s) {
                    subsets.push(s);
                    added = true;
                }
            }
        }
        if !added {
            return Ok(z);
        }
    }
    Err(Error::InternalInconsistency(String::from("convexified minimax cut generation did not converge")))
}

/// Lifted formulation: `top_k(Z) ≤ T_k` as `k r_k + Σ_i u_{k,i} ≤ T_k`, `u_{k,i} ≥ Z_i − r_k`, `u ≥ 0`.
pub fn cvx_minimax_lifted<S: Scalar>(kp: &KernelPolytope<S>, f: &DiscreteDistribution<S>) -> Result<Vec<S>> {
    let n = kp.n();
    let feas = S::tol(kp.tolerances.feasibility);
    let tops = top_sums(f);
    let ks = n - 1;
    // layout: Z (n), t, r_1..r_ks, u_{k,i}
    let r0 = n + 1;
    let u0 = r0 + ks;
    let width = u0 + ks * n;
    let mut obj = vec![S::zero(); width];
    obj[n] = S::one();
    let mut lp = LinearProgram::minimize(obj);
    for j in 0..u0 {
        lp.set_free(j);
    }
    epigraph_rows(kp, &mut lp, width);
    let mut r = vec![S::zero(); width];
    for x in r.iter_mut().take(n) {
        *x = S::one();
    }
    lp.add(r, Relation::Eq, tops[n - 1].clone());
    for k in 0..ks {
        let mut r = vec![S::zero(); width];
        r[r0 + k] = S::from_i64(k as i64 + 1);
        for i in 0..n {
            r[u0 + k * n + i] = S::one();
        }
        lp.add(r, Relation::Le, tops[k].clone());
        for i in 0..n {
            let mut r = vec![S::zero(); width];
            r[u0 + k * n + i] = S::one();
            r[i] = -S::one();
            r[r0 + k] = S::one();
            lp.add(r, Relation::Ge, S::zero());
        }
    }
    let sol = lp.solve(&feas)?;
    Ok(sol.x[..n].to_vec())
}

/// `inf_{Z∈conv(F)} sup_ξ E[ξZ]`: the optimizer `Z*` with every kernel vertex
/// attaining its price.
pub fn solve_cvx_minimax<S: Scalar>(kp: &KernelPolytope<S>, f: &DiscreteDistribution<S>, opts: &SolverOptions) -> Result<SolveReport<S>> {
    check_inputs(kp, f)?;
    let z = if kp.n() <= opts.lift_threshold { cvx_minimax_lazy(kp, f, opts)? } else { cvx_minimax_lifted(kp, f)? };
    let price = kp.superhedge_price(&z);
    let kernels: Vec<Vec<S>> = price.argmax.iter().map(|&i| kp.vertices[i].clone()).collect();
    Ok(SolveReport {
        problem: Problem::CvxMinimax,
        value: price.value,
        optimizers: vec![OptimizerSet { payoffs: vec![z], payoff_hull: false, kernels: kernels.clone(), kernel_hull: true }],
        kernel_face: kernels,
        active_payoffs: Vec::new(),
        active_vertices: price.argmax,
    })
}

/// The four optimal values; `minimax` is `None` above the permutation guard.
#[derive(Debug, Clone, PartialEq)]
pub struct ValueChain<S> {
    pub maximin: S,
    pub cvx_maximin: S,
    pub cvx_minimax: S,
    pub minimax: Option<S>,
}

/// Verify `maximin = cvx-maximin = cvx-minimax ≤ minimax` from solved reports.
pub fn check_value_chain<S: Scalar>(
    kp: &KernelPolytope<S>,
    maximin: &SolveReport<S>,
    cvx_maximin: &SolveReport<S>,
    cvx_minimax: &SolveReport<S>,
    minimax: Option<&SolveReport<S>>,
) -> Result<ValueChain<S>> {
    let opt = S::tol(kp.tolerances.optimality);
    let eq = |a: &S, b: &S| (a.clone() - b.clone()).abs() <= opt;
    let ok = eq(&maximin.value, &cvx_maximin.value)
        && eq(&cvx_maximin.value, &cvx_minimax.value)
        && minimax.map_or(true, |m| cvx_minimax.value <= m.value.clone() + opt.clone());
    if !ok {
        return Err(Error::InternalInconsistency(format!(
            "value chain violated: {:?} {:?} {:?} {:?}",
            maximin.value.to_f64(),
            cvx_maximin.value.to_f64(),
            cvx_minimax.value.to_f64(),
            minimax.map(|m| m.value.to_f64())
        )));
    }
    Ok(ValueChain {
        maximin: maximin.value.clone(),
        cvx_maximin: cvx_maximin.value.clone(),
        cvx_minimax: cvx_minimax.value.clone(),
        minimax: minimax.map(|m| m.value.clone()),
    })
}

/// All four problems solved together with the chain verified.
#[derive(Debug, Clone, PartialEq)]
pub struct FourProblems<S> {
    pub maximin: SolveReport<S>,
    pub cvx_maximin: SolveReport<S>,
    pub cvx_minimax: SolveReport<S>,
    pub minimax: Option<SolveReport<S>>,
    pub chain: ValueChain<S>,
}

pub fn solve_all<S: Scalar>(kp: &KernelPolytope<S>, f: &DiscreteDistribution<S>, opts: &SolverOptions) -> Result<FourProblems<S>> {
    let maximin = solve_maximin(kp, f, opts)?;
    let mut cvx_maximin = maximin.clone();
    cvx_maximin.problem = Problem::CvxMaximin;
    for o in cvx_maximin.optimizers.iter_mut() {
        o.payoff_hull = true;
    }
    let cvx_minimax = solve_cvx_minimax(kp, f, opts)?;
    let minimax = if kp.n() <= opts.perm_guard { Some(solve_minimax(kp, f, opts)?) } else { None };
    let chain = check_value_chain(kp, &maximin, &cvx_maximin, &cvx_minimax, minimax.as_ref())?;
    Ok(FourProblems { maximin, cvx_maximin, cvx_minimax, minimax, chain })
}

#[derive(Debug, Clone, PartialEq)]
pub struct PerfectCeReport<S> {
    pub is_perfect: bool,
    /// `minimax − maximin`; `None` above the permutation guard.
    pub equality_gap: Option<S>,
    pub optimizer_distribution_matches: bool,
    /// An arrangement of `F`, anti-monotone against an optimal kernel, that is
    /// attainable and priced at the maximin value.
    pub attainable_antimonotone_witness: Option<Vec<S>>,
    /// A maximin coupling that also solves the minimax problem.
    pub shared_solution: Option<Vec<S>>,
    pub values: ValueChain<S>,
}

/// Decide perfect cost-efficiency: equal minimax and maximin values, with an
/// optimizer of the convexified minimax problem distributed as `F`.
pub fn check_perfect_ce<S: Scalar>(kp: &KernelPolytope<S>, f: &DiscreteDistribution<S>, opts: &SolverOptions) -> Result<PerfectCeReport<S>> {
    let all = solve_all(kp, f, opts)?;
    let opt = S::tol(kp.tolerances.optimality);
    let sorted_matches = |z: &Vec<S>| {
        let mut s = z.clone();
        s.sort_by(cmp);
        s.iter().zip(f.values()).all(|(a, b)| (a.clone() - b.clone()).abs() <= opt)
    };
    // a coupling priced at the maximin value is an F-distributed cvx-minimax optimizer
    let shared_solution = all
        .maximin
        .all_payoffs()
        .find(|z| kp.superhedge_price(z).value <= all.chain.maximin.clone() + opt.clone())
        .cloned();
    let matches = all.cvx_minimax.all_payoffs().any(sorted_matches)
        || shared_solution.is_some()
        || all.minimax.as_ref().map_or(false, |m| m.value.clone() <= all.chain.cvx_minimax.clone() + opt.clone());
    let gap = all.minimax.as_ref().map(|m| m.value.clone() - all.chain.maximin.clone());
    let gap_closed = match &gap {
        Some(g) => *g <= opt,
        None => shared_solution.is_some(),
    };
    let is_perfect = gap_closed && matches;
    let mut witness = None;
    if is_perfect {
        for z in all.maximin.all_payoffs() {
            if kp.superhedge_price(z).value <= all.chain.maximin.clone() + opt.clone() && kp.is_attainable(z)?.attainable {
                witness = Some(z.clone());
                break;
            }
        }
    }
    Ok(PerfectCeReport {
        is_perfect,
        equality_gap: gap,
        optimizer_distribution_matches: matches,
        attainable_antimonotone_witness: witness,
        shared_solution,
        values: all.chain,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::market::{build_kernel_polytope, DiscreteMarket, Tolerances};
    use crate::orders::is_antimonotone;
    use crate::scalar::Rational;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    fn qv(v: &[(i64, i64)]) -> Vec<Rational> {
        v.iter().map(|&(n, d)| q(n, d)).collect()
    }

    fn setup() -> KernelPolytope<Rational> {
        build_kernel_polytope(&DiscreteMarket::three_state(), Tolerances::default()).unwrap()
    }

    fn f(v: &[i64]) -> DiscreteDistribution<Rational> {
        DiscreteDistribution::new(v.iter().map(|&x| q(x, 1)).collect()).unwrap()
    }

    fn xi_u(u: Rational) -> Vec<Rational> {
        vec![q(3, 1) * u, q(3, 1) - q(9, 1) * u, q(6, 1) * u]
    }

    #[test]
    fn maximin_example() {
        let kp = setup();
        let r = solve_maximin(&kp, &f(&[1, 2, 3]), &SolverOptions::default()).unwrap();
        assert_eq!(r.value, q(9, 5));
        assert_eq!(r.kernel_face, vec![xi_u(q(1, 5))]);
        let zs: Vec<_> = r.all_payoffs().cloned().collect();
        assert!(zs.contains(&qv(&[(3, 1), (1, 1), (2, 1)])));
        assert!(zs.contains(&qv(&[(3, 1), (2, 1), (1, 1)])));
        for o in &r.optimizers {
            for z in &o.payoffs {
                for k in &o.kernels {
                    assert!(is_antimonotone(z, k, &q(0, 1)));
                    assert_eq!(kp.expectation(k, z), r.value);
                }
            }
        }
    }

    #[test]
    fn maximin_positive_regime_and_constant() {
        let kp = setup();
        let r = solve_maximin(&kp, &f(&[1, 2, 5]), &SolverOptions::default()).unwrap();
        assert_eq!(r.value, q(9, 4));
        assert_eq!(r.kernel_face, vec![xi_u(q(1, 4))]);
        let r = solve_maximin(&kp, &f(&[7, 7, 7]), &SolverOptions::default()).unwrap();
        assert_eq!(r.value, q(7, 1));
    }

    #[test]
    fn maximin_zero_regime_face() {
        let kp = setup();
        let r = solve_maximin(&kp, &f(&[1, 2, 4]), &SolverOptions::default()).unwrap();
        assert_eq!(r.value, q(2, 1));
        assert_eq!(r.kernel_face.len(), 2);
        assert!(r.kernel_face.contains(&xi_u(q(1, 5))));
        assert!(r.kernel_face.contains(&xi_u(q(1, 4))));
        let shared = r.optimizers.iter().find(|o| o.kernel_hull).unwrap();
        assert_eq!(shared.payoffs, vec![qv(&[(4, 1), (2, 1), (1, 1)])]);
    }

    #[test]
    fn minimax_examples() {
        let kp = setup();
        let opts = SolverOptions::default();
        let r = solve_minimax(&kp, &f(&[1, 2, 3]), &opts).unwrap();
        assert_eq!(r.value, q(2, 1));
        assert_eq!(r.optimizers.len(), 1);
        assert_eq!(r.optimizers[0].payoffs[0], qv(&[(3, 1), (2, 1), (1, 1)]));
        assert_eq!(r.optimizers[0].kernels, vec![qv(&[(0, 1), (3, 1), (0, 1)])]);
        let r = solve_minimax(&kp, &f(&[1, 2, 4]), &opts).unwrap();
        assert_eq!(r.value, q(2, 1));
        assert_eq!(r.optimizers[0].payoffs[0], qv(&[(4, 1), (2, 1), (1, 1)]));
        assert_eq!(r.optimizers[0].kernels.len(), 2);
        let r = solve_minimax(&kp, &f(&[1, 2, 5]), &opts).unwrap();
        assert_eq!(r.value, q(7, 3));
    }

    #[test]
    fn minimax_guard() {
        let kp = setup();
        let opts = SolverOptions { perm_guard: 2, ..SolverOptions::default() };
        assert!(matches!(solve_minimax(&kp, &f(&[1, 2, 3]), &opts), Err(Error::SizeLimit { .. })));
    }

    #[test]
    fn cvx_minimax_examples() {
        let kp = setup();
        let opts = SolverOptions::default();
        let r = solve_cvx_minimax(&kp, &f(&[1, 2, 3]), &opts).unwrap();
        assert_eq!(r.value, q(9, 5));
        assert_eq!(r.optimizers[0].payoffs[0], qv(&[(3, 1), (9, 5), (6, 5)]));
        assert_eq!(r.kernel_face.len(), 2);
        let f2 = DiscreteDistribution::new(qv(&[(3, 2), (2, 1), (7, 2)])).unwrap();
        let r = solve_cvx_minimax(&kp, &f2, &opts).unwrap();
        assert_eq!(r.optimizers[0].payoffs[0], qv(&[(27, 8), (17, 8), (3, 2)]));
        assert_eq!(r.value, q(17, 8));
        let r = solve_cvx_minimax(&kp, &f(&[1, 2, 4]), &opts).unwrap();
        assert_eq!(r.value, q(2, 1));
        assert_eq!(r.optimizers[0].payoffs[0], qv(&[(4, 1), (2, 1), (1, 1)]));
    }

    #[test]
    fn lifted_formulation_agrees() {
        let kp = setup();
        for atoms in [[1, 2, 3], [1, 2, 4], [1, 2, 5], [0, 0, 6]] {
            let dist = f(&atoms);
            let z = cvx_minimax_lifted(&kp, &dist).unwrap();
            let r = solve_cvx_minimax(&kp, &dist, &SolverOptions::default()).unwrap();
            assert_eq!(kp.superhedge_price(&z).value, r.value);
        }
    }

    #[test]
    fn cvx_maximin_families() {
        let kp = setup();
        let r = solve_cvx_maximin(&kp, &f(&[1, 2, 3]), &SolverOptions::default()).unwrap();
        assert_eq!(r.value, q(9, 5));
        assert!(r.optimizers.iter().all(|o| o.payoff_hull));
        // segment endpoints (z, y, x) and (z, x, y) at ξ^{1/5}
        let o = &r.optimizers[0];
        assert!(o.payoffs.contains(&qv(&[(3, 1), (2, 1), (1, 1)])));
        assert!(o.payoffs.contains(&qv(&[(3, 1), (1, 1), (2, 1)])));
    }

    #[test]
    fn perfect_ce_examples() {
        let kp = setup();
        let opts = SolverOptions::default();
        let r = check_perfect_ce(&kp, &f(&[1, 2, 4]), &opts).unwrap();
        assert!(r.is_perfect);
        assert_eq!(r.attainable_antimonotone_witness, Some(qv(&[(4, 1), (2, 1), (1, 1)])));
        let r = check_perfect_ce(&kp, &f(&[1, 2, 3]), &opts).unwrap();
        assert!(!r.is_perfect);
        assert_eq!(r.equality_gap, Some(q(1, 5)));
        assert!(r.attainable_antimonotone_witness.is_none());
    }

    #[test]
    fn float_path_agrees_with_exact() {
        let kp = build_kernel_polytope(&DiscreteMarket::<f64>::three_state(), Tolerances::default()).unwrap();
        let dist = DiscreteDistribution::new(vec![1.0, 2.0, 4.0]).unwrap();
        let all = solve_all(&kp, &dist, &SolverOptions::default()).unwrap();
        assert!((all.chain.maximin - 2.0).abs() < 1e-9);
        assert_eq!(all.maximin.kernel_face.len(), 2);
        assert!((all.chain.minimax.unwrap() - 2.0).abs() < 1e-9);
    }
}
