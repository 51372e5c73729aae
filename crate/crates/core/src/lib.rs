#![no_std]
//! Cost-efficient payoffs in finite incomplete markets.
//!
//! Superhedging prices over the pricing-kernel polytope, convex order and
//! anti-monotone couplings, the four distributional cost problems, rationalizing
//! utilities, a closed-form 3-state model, a two-regime stochastic volatility
//! model and joint-mixability bounds.

extern crate alloc;

pub mod error;
pub mod linalg;
pub mod lp;
pub mod market;
pub mod mixability;
pub mod orders;
pub mod polytope;
pub mod quad;
pub mod rationalize;
pub mod roots;
pub mod scalar;
pub mod solvers;
pub mod special;
pub mod stochvol;
pub mod three_state;

pub use error::{Error, Result};
pub use market::{build_kernel_polytope, DiscreteMarket, KernelPolytope, Tolerances};
pub use orders::DiscreteDistribution;
pub use scalar::{Rational, Scalar};
