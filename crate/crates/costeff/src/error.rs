use std::path::PathBuf;

use costeff_core::Error;

/// Exit status for bad input, unreadable files and usage errors.
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_ARBITRAGE: i32 = 2;
pub const EXIT_SIZE_LIMIT: i32 = 3;
pub const EXIT_NUMERIC: i32 = 4;
/// Reports that could not be written.
pub const EXIT_OUTPUT: i32 = 5;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] Error),
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("malformed {path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("{0}")]
    Input(String),
    #[error("cannot write report: {0}")]
    Output(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(Error::Arbitrage) => EXIT_ARBITRAGE,
            CliError::Core(Error::SizeLimit { .. }) => EXIT_SIZE_LIMIT,
            CliError::Core(e) if e.is_numeric() => EXIT_NUMERIC,
            CliError::Output(_) => EXIT_OUTPUT,
            _ => EXIT_INPUT,
        }
    }

    /// A hint printed after the message, when there is one.
    pub fn guidance(&self) -> Option<String> {
        match self {
            CliError::Core(Error::SizeLimit { what, n, .. }) if what.contains("permutation") => {
                Some(format!("rerun with --perm-guard {n} or larger; the minimax search visits up to {n}! arrangements"))
            }
            CliError::Core(Error::SizeLimit { .. }) => Some("reduce the number of states".to_string()),
            CliError::Core(Error::NonEquiprobable) => Some("remove \"probabilities\" from the market file".to_string()),
            CliError::Core(Error::Arbitrage) => Some("check that every price lies strictly inside the range of its payoffs".to_string()),
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn codes_are_distinct() {
        let cases = [
            CliError::Input("x".into()),
            CliError::Core(Error::Arbitrage),
            CliError::Core(Error::SizeLimit { what: "permutations", n: 9, limit: 8 }),
            CliError::Core(Error::Quadrature("x".into())),
            CliError::Output("x".into()),
        ];
        let codes: Vec<i32> = cases.iter().map(CliError::exit_code).collect();
        assert_eq!(codes, vec![1, 2, 3, 4, 5]);
        assert_eq!(CliError::Core(Error::Domain("x".into())).exit_code(), EXIT_INPUT);
        assert!(cases[2].guidance().unwrap().contains("--perm-guard 9"));
    }
}
