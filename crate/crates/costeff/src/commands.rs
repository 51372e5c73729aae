//! Subcommand bodies. Each returns a serializable report.

use std::path::Path;

use costeff_core::market::{build_kernel_polytope, DiscreteMarket, KernelPolytope, Tolerances};
use costeff_core::mixability::{m_plus_with_grid, Exponential, FoldedCauchy, Lomax, TailDistribution, Uniform};
use costeff_core::orders::DiscreteDistribution;
use costeff_core::rationalize::{build_utility, verify_rationalization};
use costeff_core::solvers::{check_perfect_ce, solve_all, solve_maximin, solve_minimax, OptimizerSet, SolveReport, SolverOptions};
use costeff_core::stochvol::{distribution_price, stock_mixture, variance_frontier, PriceOptions, StochVolParams, Target};
use costeff_core::three_state::{kkm_intersection, table1_values, table2_optimizers, Family, Regime, ThreeStateCase, UInterval};
use costeff_core::Error;
use serde::Serialize;

use crate::error::CliError;
use crate::format::{CliScalar, Num, Report, Rows, Style};
use crate::io::{parse_list, read_market, read_params};
use crate::mc::antimonotone_stock_price;

fn polytope<S: CliScalar>(path: &Path, tol: Tolerances) -> Result<KernelPolytope<S>, CliError> {
    let market: DiscreteMarket<S> = read_market(path)?;
    Ok(build_kernel_polytope(&market, tol)?)
}

fn distribution<S: CliScalar>(text: &str, n: usize) -> Result<DiscreteDistribution<S>, CliError> {
    let atoms = parse_list::<S>(text)?;
    if atoms.len() != n {
        return Err(CliError::Input(format!("the distribution has {} atoms but the market has {n} states", atoms.len())));
    }
    Ok(DiscreteDistribution::new(atoms)?)
}

#[derive(Debug, Serialize)]
pub struct PriceReport {
    pub payoff: Vec<Num>,
    pub price: Num,
    /// Kernel vertices at which the price is attained, in enumeration order.
    pub argmax_vertices: Vec<Vec<Num>>,
    pub attainable: bool,
}

impl Report for PriceReport {}

pub fn price<S: CliScalar>(style: Style, market: &Path, payoff: &str, tol: Tolerances) -> Result<PriceReport, CliError> {
    let kp = polytope::<S>(market, tol)?;
    let z = parse_list::<S>(payoff)?;
    if z.len() != kp.n() {
        return Err(CliError::Input(format!("the payoff has {} entries but the market has {} states", z.len(), kp.n())));
    }
    let sp = kp.superhedge_price(&z);
    let attainable = kp.is_attainable(&z)?.attainable;
    Ok(PriceReport {
        payoff: style.vec(&z),
        price: style.num(&sp.value),
        argmax_vertices: sp.argmax.iter().map(|&k| style.vec(&kp.vertices[k])).collect(),
        attainable,
    })
}

#[derive(Debug, Serialize)]
pub struct Values {
    pub maximin: Num,
    pub cvx_maximin: Num,
    pub cvx_minimax: Num,
    pub minimax: Option<Num>,
}

#[derive(Debug, Serialize)]
pub struct OptimizerReport {
    pub payoffs: Vec<Vec<Num>>,
    /// The whole convex hull of `payoffs` is optimal.
    pub payoff_hull: bool,
    pub kernels: Vec<Vec<Num>>,
    pub kernel_hull: bool,
}

#[derive(Debug, Serialize)]
pub struct ProblemReport {
    pub problem: &'static str,
    pub value: Num,
    pub optimizers: Vec<OptimizerReport>,
}

#[derive(Debug, Serialize)]
pub struct PerfectReport {
    pub is_perfect: bool,
    pub equality_gap: Option<Num>,
    pub distribution_matches: bool,
    pub attainable_witness: Option<Vec<Num>>,
    pub shared_solution: Option<Vec<Num>>,
}

#[derive(Debug, Serialize)]
pub struct CostEfficiencyReport {
    pub distribution: Vec<Num>,
    pub values: Values,
    pub problems: Vec<ProblemReport>,
    pub perfect: PerfectReport,
}

impl Report for CostEfficiencyReport {}

fn optimizer_set<S: CliScalar>(style: Style, o: &OptimizerSet<S>) -> OptimizerReport {
    OptimizerReport { payoffs: style.mat(&o.payoffs), payoff_hull: o.payoff_hull, kernels: style.mat(&o.kernels), kernel_hull: o.kernel_hull }
}

fn problem<S: CliScalar>(style: Style, r: &SolveReport<S>) -> ProblemReport {
    ProblemReport { problem: r.problem.name(), value: style.num(&r.value), optimizers: r.optimizers.iter().map(|o| optimizer_set(style, o)).collect() }
}

pub fn cost_efficiency<S: CliScalar>(style: Style, market: &Path, dist: &str, tol: Tolerances, opts: &SolverOptions) -> Result<CostEfficiencyReport, CliError> {
    let kp = polytope::<S>(market, tol)?;
    let f = distribution::<S>(dist, kp.n())?;
    if f.n() > opts.perm_guard {
        // surfaces the size limit instead of silently dropping the minimax problem
        solve_minimax(&kp, &f, opts)?;
    }
    let all = solve_all(&kp, &f, opts)?;
    let ce = check_perfect_ce(&kp, &f, opts)?;
    let mut problems = vec![problem(style, &all.maximin), problem(style, &all.cvx_maximin), problem(style, &all.cvx_minimax)];
    problems.extend(all.minimax.as_ref().map(|r| problem(style, r)));
    Ok(CostEfficiencyReport {
        distribution: style.vec(f.values()),
        values: Values {
            maximin: style.num(&all.chain.maximin),
            cvx_maximin: style.num(&all.chain.cvx_maximin),
            cvx_minimax: style.num(&all.chain.cvx_minimax),
            minimax: all.chain.minimax.as_ref().map(|v| style.num(v)),
        },
        problems,
        perfect: PerfectReport {
            is_perfect: ce.is_perfect,
            equality_gap: ce.equality_gap.as_ref().map(|v| style.num(v)),
            distribution_matches: ce.optimizer_distribution_matches,
            attainable_witness: ce.attainable_antimonotone_witness.as_ref().map(|z| style.vec(z)),
            shared_solution: ce.shared_solution.as_ref().map(|z| style.vec(z)),
        },
    })
}

#[derive(Debug, Serialize)]
pub struct UtilityReport {
    pub knots: Vec<Num>,
    pub values: Vec<Num>,
    /// Slope left of the first knot, between knots, and right of the last.
    pub slopes: Vec<Num>,
    pub anchor: Num,
}

#[derive(Debug, Serialize)]
pub struct RationalizeReport {
    pub distribution: Vec<Num>,
    pub is_perfect: bool,
    pub rationalized: bool,
    pub reason: Option<String>,
    pub payoff: Option<Vec<Num>>,
    pub kernel: Option<Vec<Num>>,
    pub initial_capital: Option<Num>,
    pub utility: Option<UtilityReport>,
    /// No attainable payoff of the same cost has higher expected utility.
    pub verified: bool,
}

impl Report for RationalizeReport {}

pub fn rationalize<S: CliScalar>(style: Style, market: &Path, dist: &str, tol: Tolerances, opts: &SolverOptions) -> Result<RationalizeReport, CliError> {
    let kp = polytope::<S>(market, tol)?;
    let f = distribution::<S>(dist, kp.n())?;
    let ce = check_perfect_ce(&kp, &f, opts)?;
    let mut report = RationalizeReport {
        distribution: style.vec(f.values()),
        is_perfect: ce.is_perfect,
        rationalized: false,
        reason: None,
        payoff: None,
        kernel: None,
        initial_capital: None,
        utility: None,
        verified: false,
    };
    let Some(zstar) = ce.attainable_antimonotone_witness else {
        report.reason = Some(if ce.is_perfect {
            "no arrangement of the distribution is attainable at the maximin value".to_string()
        } else {
            "the distribution is not perfectly cost-efficient".to_string()
        });
        return Ok(report);
    };
    let maximin = solve_maximin(&kp, &f, opts)?;
    let tie = S::tol(tol.optimality);
    // lexicographically largest optimal kernel that prices the witness
    let xi = maximin
        .kernel_face
        .iter()
        .filter(|xi| (kp.expectation(xi, &zstar) - ce.values.maximin.clone()).is_zero_tol(&tie))
        .max_by(|a, b| a.partial_cmp(b).unwrap_or(core::cmp::Ordering::Equal))
        .ok_or_else(|| Error::InternalInconsistency("no optimal kernel prices the witness at the maximin value".to_string()))?;
    let x0 = kp.superhedge_price(&zstar).value;
    report.payoff = Some(style.vec(&zstar));
    report.kernel = Some(style.vec(xi));
    report.initial_capital = Some(style.num(&x0));
    let u = match build_utility(&f, xi, None) {
        Ok(u) => u,
        Err(Error::Domain(msg)) => {
            report.reason = Some(msg);
            return Ok(report);
        }
        Err(e) => return Err(e.into()),
    };
    report.verified = verify_rationalization(&kp, &zstar, &u, &x0)?;
    report.rationalized = report.verified;
    report.utility = Some(UtilityReport { knots: style.vec(&u.knots), values: style.vec(&u.values), slopes: style.vec(&u.slopes), anchor: style.num(&u.anchor) });
    Ok(report)
}

#[derive(Debug, Serialize)]
pub struct IntervalReport {
    pub lo: Num,
    pub hi: Num,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

#[derive(Debug, Serialize)]
pub struct FamilyReport {
    pub payoff_from: Vec<Num>,
    pub payoff_to: Vec<Num>,
    /// Parameters `u` of the paired kernels `(3u, 3 − 9u, 6u)`.
    pub u: IntervalReport,
}

#[derive(Debug, Serialize)]
pub struct OptimizerFamilies {
    pub maximin: Vec<FamilyReport>,
    pub cvx_maximin: Vec<FamilyReport>,
    pub cvx_minimax: Vec<FamilyReport>,
    pub minimax: Vec<FamilyReport>,
}

#[derive(Debug, Serialize)]
pub struct ThreeStateReport {
    pub atoms: Vec<Num>,
    /// Sign of `2x − 3y + z`.
    pub regime: &'static str,
    pub values: Values,
    pub optimizers: OptimizerFamilies,
    /// Intersection of the anti-monotone kernel sets.
    pub kkm: IntervalReport,
    /// The generic solvers reproduce the closed-form values.
    pub generic_solvers_agree: bool,
}

impl Report for ThreeStateReport {}

fn interval<S: CliScalar>(style: Style, u: &UInterval<S>) -> IntervalReport {
    IntervalReport { lo: style.num(&u.lo), hi: style.num(&u.hi), lo_closed: u.lo_closed, hi_closed: u.hi_closed }
}

fn families<S: CliScalar>(style: Style, fams: &[Family<S>]) -> Vec<FamilyReport> {
    fams.iter().map(|f| FamilyReport { payoff_from: style.vec(&f.payoff_from), payoff_to: style.vec(&f.payoff_to), u: interval(style, &f.kernels) }).collect()
}

pub fn three_state<S: CliScalar>(style: Style, atoms: [&String; 3], kkm_grid: usize, opts: &SolverOptions) -> Result<ThreeStateReport, CliError> {
    let v: Vec<S> = atoms.iter().map(|t| S::parse_text(t).ok_or_else(|| CliError::Input(format!("not a finite number: {t:?}")))).collect::<Result<_, _>>()?;
    let case = ThreeStateCase::new(v[0].clone(), v[1].clone(), v[2].clone())?;
    let t1 = table1_values(&case);
    let t2 = table2_optimizers(&case);
    let kkm = kkm_intersection(&case, kkm_grid)?;
    let kp = build_kernel_polytope(&DiscreteMarket::<S>::three_state(), Tolerances::default())?;
    let all = solve_all(&kp, &DiscreteDistribution::new(v.clone())?, opts)?;
    let tie = S::tol(1e-9);
    let close = |a: &S, b: &S| (a.clone() - b.clone()).is_zero_tol(&tie);
    let generic_solvers_agree = close(&all.chain.maximin, &t1.maximin)
        && close(&all.chain.cvx_maximin, &t1.cvx_maximin)
        && close(&all.chain.cvx_minimax, &t1.cvx_minimax)
        && all.chain.minimax.as_ref().map_or(true, |m| close(m, &t1.minimax));
    Ok(ThreeStateReport {
        atoms: style.vec(&v),
        regime: match case.regime {
            Regime::Neg => "negative",
            Regime::Zero => "zero",
            Regime::Pos => "positive",
        },
        values: Values {
            maximin: style.num(&t1.maximin),
            cvx_maximin: style.num(&t1.cvx_maximin),
            cvx_minimax: style.num(&t1.cvx_minimax),
            minimax: Some(style.num(&t1.minimax)),
        },
        optimizers: OptimizerFamilies {
            maximin: families(style, &t2.maximin),
            cvx_maximin: families(style, &t2.cvx_maximin),
            cvx_minimax: families(style, &t2.cvx_minimax),
            minimax: families(style, &t2.minimax),
        },
        kkm: interval(style, &kkm),
        generic_solvers_agree,
    })
}

pub struct FrontierArgs {
    pub points: usize,
    pub max_variance: Option<f64>,
    pub mc_samples: usize,
    pub seed: u64,
}

#[derive(Debug, Serialize)]
pub struct ParamsReport {
    pub s0: Num,
    pub mu: Num,
    pub sigma_h: Num,
    pub sigma_l: Num,
    pub p: Num,
    pub t: Num,
    pub r: Num,
}

#[derive(Debug, Serialize)]
pub struct StockReport {
    pub price: Num,
    pub q0: Num,
    pub interior: bool,
    pub unimodal: bool,
    /// `S0` minus the distributional price.
    pub margin: Num,
}

#[derive(Debug, Serialize)]
pub struct McReport {
    pub samples: usize,
    pub seed: u64,
    pub estimate: Num,
    pub std_error: Num,
}

#[derive(Debug, Serialize)]
pub struct FrontierRowReport {
    pub variance: Num,
    pub price_normal: Num,
    pub price_lognormal: Num,
}

#[derive(Debug, Serialize)]
pub struct FrontierReport {
    pub params: ParamsReport,
    /// `S0 e^{μT}`, the price of every zero-variance target.
    pub mean: Num,
    pub stock: StockReport,
    pub monte_carlo: Option<McReport>,
    pub strictly_decreasing: bool,
    pub rows: Vec<FrontierRowReport>,
}

impl Report for FrontierReport {
    fn rows(&self) -> Option<Rows> {
        Some(Rows {
            field: "rows",
            header: vec!["variance", "price_normal", "price_lognormal"],
            rows: self.rows.iter().map(|r| vec![r.variance.as_str().to_string(), r.price_normal.as_str().to_string(), r.price_lognormal.as_str().to_string()]).collect(),
        })
    }
}

pub fn stochvol_frontier(style: Style, params: Option<&Path>, args: &FrontierArgs, opts: &PriceOptions) -> Result<FrontierReport, CliError> {
    let p = match params {
        Some(path) => read_params(path)?,
        None => StochVolParams::reference(),
    };
    if args.points == 0 {
        return Err(CliError::Input("--points must be positive".to_string()));
    }
    let vmax = args.max_variance.unwrap_or(2.0 * p.model_variance());
    if !(vmax.is_finite() && vmax > 0.0) {
        return Err(CliError::Input(format!("--max-variance must be positive, got {vmax}")));
    }
    let grid: Vec<f64> = (1..=args.points).map(|k| vmax * k as f64 / args.points as f64).collect();
    let frontier = variance_frontier(&p, &grid, opts)?;
    let stock = distribution_price(&p, &Target::Mixture(stock_mixture(&p)), opts)?;
    let monte_carlo = (args.mc_samples > 0).then(|| {
        let e = antimonotone_stock_price(&p, stock.q0, args.mc_samples, args.seed);
        McReport { samples: e.samples, seed: e.seed, estimate: style.float(e.estimate), std_error: style.float(e.std_error) }
    });
    Ok(FrontierReport {
        params: ParamsReport {
            s0: style.float(p.s0),
            mu: style.float(p.mu),
            sigma_h: style.float(p.sigma_h),
            sigma_l: style.float(p.sigma_l),
            p: style.float(p.p),
            t: style.float(p.t),
            r: style.float(p.r),
        },
        mean: style.float(p.mean()),
        stock: StockReport { price: style.float(stock.price), q0: style.float(stock.q0), interior: stock.interior, unimodal: stock.unimodal, margin: style.float(p.s0 - stock.price) },
        monte_carlo,
        strictly_decreasing: frontier.strictly_decreasing,
        rows: frontier.rows.iter().map(|r| FrontierRowReport { variance: style.float(r.variance), price_normal: style.float(r.price_normal), price_lognormal: style.float(r.price_lognormal) }).collect(),
    })
}

pub fn tail_distribution(spec: &str) -> Result<Box<dyn TailDistribution>, CliError> {
    let (name, arg) = match spec.split_once(':') {
        Some((n, a)) => (n, Some(a.parse::<f64>().map_err(|_| CliError::Input(format!("bad parameter in {spec:?}")))?)),
        None => (spec, None),
    };
    let positive = |v: f64| {
        if v.is_finite() && v > 0.0 {
            Ok(v)
        } else {
            Err(CliError::Input(format!("parameter of {name} must be positive, got {v}")))
        }
    };
    Ok(match (name, arg) {
        ("folded-cauchy", None) => Box::new(FoldedCauchy),
        ("uniform", a) => Box::new(Uniform { hi: positive(a.unwrap_or(1.0))? }),
        ("exponential", a) => Box::new(Exponential { rate: positive(a.unwrap_or(1.0))? }),
        ("lomax", Some(a)) => Box::new(Lomax { alpha: positive(a)? }),
        _ => return Err(CliError::Input(format!("unknown distribution {spec:?}; use folded-cauchy, uniform[:hi], exponential[:rate] or lomax:alpha"))),
    })
}

#[derive(Debug, Serialize)]
pub struct MixRow {
    pub n: usize,
    pub m: Num,
    /// `P[S_n ≥ nM]`.
    pub prob: Num,
    /// `E[X] / M` when the mean is finite.
    pub markov_bound: Option<Num>,
}

#[derive(Debug, Serialize)]
pub struct MixabilityReport {
    pub distribution: String,
    pub mean: Option<Num>,
    pub rows: Vec<MixRow>,
}

impl Report for MixabilityReport {
    fn rows(&self) -> Option<Rows> {
        Some(Rows {
            field: "rows",
            header: vec!["n", "M", "prob"],
            rows: self.rows.iter().map(|r| vec![r.n.to_string(), r.m.as_str().to_string(), r.prob.as_str().to_string()]).collect(),
        })
    }
}

pub fn mixability(style: Style, spec: &str, n_min: usize, n_max: usize, m: f64, s_grid: usize) -> Result<MixabilityReport, CliError> {
    let dist = tail_distribution(spec)?;
    if n_min < 1 || n_min > n_max {
        return Err(CliError::Input(format!("need 1 ≤ n-min ≤ n-max, got {n_min}..{n_max}")));
    }
    if !(m.is_finite() && m > 0.0) {
        return Err(CliError::Input(format!("M must be positive, got {m}")));
    }
    if s_grid < 2 {
        return Err(CliError::Input("--s-grid must be at least 2".to_string()));
    }
    let mean = dist.mean();
    let mut rows = Vec::new();
    for n in n_min..=n_max {
        let prob = 1.0 - m_plus_with_grid(dist.as_ref(), n, n as f64 * m, s_grid)?;
        rows.push(MixRow { n, m: style.float(m), prob: style.float(prob), markov_bound: mean.map(|e| style.float(e / m)) });
    }
    Ok(MixabilityReport { distribution: spec.to_string(), mean: mean.map(|e| style.float(e)), rows })
}
