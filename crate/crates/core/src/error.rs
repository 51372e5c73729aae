use alloc::string::String;

/// Errors raised by the solvers and numerical routines.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("market admits arbitrage: no strictly positive pricing kernel exists")]
    Arbitrage,
    #[error("degenerate market: pricing equations are inconsistent")]
    DegenerateMarket,
    #[error("distributional solvers require equiprobable states")]
    NonEquiprobable,
    #[error("size limit exceeded: {what} (n = {n}, limit = {limit})")]
    SizeLimit { what: &'static str, n: usize, limit: usize },
    #[error("linear program is infeasible")]
    Infeasible,
    #[error("linear program is unbounded")]
    Unbounded,
    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),
    #[error("kernel and atom ordering produce a nonconcave utility")]
    NonconcaveResult,
    #[error("argument outside the domain: {0}")]
    Domain(String),
    #[error("root bracket degenerated: {0}")]
    Bracket(String),
    #[error("quadrature did not converge: {0}")]
    Quadrature(String),
}

impl Error {
    /// Numeric failures as opposed to bad input or market conditions.
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            Error::Infeasible
                | Error::Unbounded
                | Error::InternalInconsistency(_)
                | Error::Bracket(_)
                | Error::Quadrature(_)
                | Error::NonconcaveResult
        )
    }
}

pub type Result<T> = core::result::Result<T, Error>;
