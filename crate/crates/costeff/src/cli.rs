//! Argument parsing and subcommand dispatch.

use std::path::PathBuf;

use clap::{Parser, Subcommand};
use costeff_core::market::Tolerances;
use costeff_core::scalar::Rational;
use costeff_core::solvers::SolverOptions;
use costeff_core::stochvol::PriceOptions;

use crate::commands;
use crate::error::CliError;
use crate::format::{render, Format, Style};

#[derive(Debug, Clone, Parser)]
#[command(name = "costeff", version, about = "Cost-efficiency, distributional pricing and tail bounds")]
pub struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    pub format: Format,
    /// Optimality and tie tolerance (feasibility uses a tenth of it); the q-search
    /// tolerance for stochvol-frontier.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Seed for Monte Carlo checks.
    #[arg(long, default_value_t = 0, global = true)]
    pub seed: u64,
    /// Largest state count for which minimax enumerates permutations.
    #[arg(long, default_value_t = 8, global = true)]
    pub perm_guard: usize,
    /// Rational arithmetic for market inputs.
    #[arg(long, global = true)]
    pub exact: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Superhedging price of a payoff and the kernels that attain it.
    Price {
        market: PathBuf,
        /// State-wise payoff, e.g. `4,2,1`.
        #[arg(long, allow_hyphen_values = true)]
        payoff: String,
    },
    /// The four distributional problems and the perfect cost-efficiency verdict.
    CostEfficiency {
        market: PathBuf,
        /// Equiprobable atoms of the target distribution.
        #[arg(long, allow_hyphen_values = true)]
        dist: String,
    },
    /// A utility under which the cost-efficient payoff is an expected-utility optimum.
    Rationalize {
        market: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        dist: String,
    },
    /// Closed forms for the three-state market with atoms `x < y < z`.
    #[command(allow_negative_numbers = true)]
    ThreeState {
        x: String,
        y: String,
        z: String,
        /// Grid size `m` of the kernel-set intersection over `s = k/(3m)`.
        #[arg(long, default_value_t = 240)]
        kkm_grid: usize,
    },
    /// Distributional prices of variance-matched targets in the regime-switching model.
    StochvolFrontier {
        /// Parameter file; the reference parameters when omitted.
        params: Option<PathBuf>,
        #[arg(long, default_value_t = 20)]
        points: usize,
        /// Largest variance on the grid; twice the stock's variance by default.
        #[arg(long)]
        max_variance: Option<f64>,
        /// Points of the scan over q.
        #[arg(long, default_value_t = 101)]
        q_grid: usize,
        /// Monte Carlo draws confirming the stock's price (0 skips the check).
        #[arg(long, default_value_t = 0)]
        mc_samples: usize,
    },
    /// `P[S_n ≥ nM]` under the dependence structure maximizing it, for `n` in a range.
    Mixability {
        /// `folded-cauchy`, `uniform[:hi]`, `exponential[:rate]` or `lomax:alpha`.
        #[arg(long, default_value = "folded-cauchy")]
        dist: String,
        #[arg(long, default_value_t = 2)]
        n_min: usize,
        #[arg(long, default_value_t = 8)]
        n_max: usize,
        #[arg(long = "m", default_value_t = 1.0)]
        m: f64,
        /// Size of the grid over the level `s`.
        #[arg(long, default_value_t = 1000)]
        s_grid: usize,
    },
}

impl Cli {
    fn tolerances(&self) -> Result<Tolerances, CliError> {
        match self.tol {
            None => Ok(Tolerances::default()),
            Some(t) if t.is_finite() && t > 0.0 => Ok(Tolerances { feasibility: t / 10.0, optimality: t }),
            Some(t) => Err(CliError::Input(format!("--tol must be positive, got {t}"))),
        }
    }

    fn solver_options(&self) -> SolverOptions {
        SolverOptions { perm_guard: self.perm_guard, ..SolverOptions::default() }
    }
}

/// Run the subcommand and return the rendered report.
pub fn run(cli: &Cli) -> Result<String, CliError> {
    let style = Style { format: cli.format };
    let tol = cli.tolerances()?;
    let opts = cli.solver_options();
    macro_rules! scalar {
        ($f:ident($($arg:expr),*)) => {
            if cli.exact {
                render(&commands::$f::<Rational>($($arg),*)?, cli.format)
            } else {
                render(&commands::$f::<f64>($($arg),*)?, cli.format)
            }
        };
    }
    match &cli.command {
        Command::Price { market, payoff } => scalar!(price(style, market, payoff, tol)),
        Command::CostEfficiency { market, dist } => scalar!(cost_efficiency(style, market, dist, tol, &opts)),
        Command::Rationalize { market, dist } => scalar!(rationalize(style, market, dist, tol, &opts)),
        Command::ThreeState { x, y, z, kkm_grid } => scalar!(three_state(style, [x, y, z], *kkm_grid, &opts)),
        Command::StochvolFrontier { params, points, max_variance, q_grid, mc_samples } => {
            let mut popts = PriceOptions { grid: *q_grid, ..PriceOptions::default() };
            if let Some(t) = cli.tol {
                popts.q_tol = t;
            }
            let frontier = commands::FrontierArgs { points: *points, max_variance: *max_variance, mc_samples: *mc_samples, seed: cli.seed };
            render(&commands::stochvol_frontier(style, params.as_deref(), &frontier, &popts)?, cli.format)
        }
        Command::Mixability { dist, n_min, n_max, m, s_grid } => render(&commands::mixability(style, dist, *n_min, *n_max, *m, *s_grid)?, cli.format),
    }
}
