//! Market and stochastic-volatility parameter files.

use std::path::Path;

use costeff_core::market::DiscreteMarket;
use costeff_core::stochvol::StochVolParams;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::CliError;
use crate::format::CliScalar;

/// `{"n": 3, "assets": [[4, 2, 1]], "prices": [2]}`, with optional `"probabilities"`.
///
/// Numbers may be JSON numbers or strings holding a decimal or a `p/q` fraction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MarketFile {
    pub n: usize,
    pub assets: Vec<Vec<Value>>,
    pub prices: Vec<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probabilities: Option<Vec<Value>>,
}

pub fn number<S: CliScalar>(v: &Value) -> Result<S, String> {
    let text = match v {
        Value::Number(n) => n.to_string(),
        Value::String(s) => s.clone(),
        other => return Err(format!("expected a number, got {other}")),
    };
    S::parse_text(&text).ok_or_else(|| format!("not a finite number: {text:?}"))
}

fn numbers<S: CliScalar>(vs: &[Value]) -> Result<Vec<S>, String> {
    vs.iter().map(number).collect()
}

impl MarketFile {
    pub fn to_market<S: CliScalar>(&self) -> Result<DiscreteMarket<S>, CliError> {
        let assets = self.assets.iter().map(|a| numbers(a)).collect::<Result<Vec<_>, _>>().map_err(CliError::Input)?;
        let prices = numbers(&self.prices).map_err(CliError::Input)?;
        let market = DiscreteMarket::new(self.n, assets, prices)?;
        Ok(match &self.probabilities {
            Some(p) => market.with_probabilities(numbers(p).map_err(CliError::Input)?)?,
            None => market,
        })
    }

    pub fn from_market<S: CliScalar>(market: &DiscreteMarket<S>) -> Self {
        let row = |xs: &[S]| xs.iter().map(CliScalar::canonical_json).collect::<Vec<_>>();
        MarketFile {
            n: market.n(),
            assets: market.assets().iter().map(|a| row(a)).collect(),
            prices: row(market.prices()),
            probabilities: (!market.is_equiprobable()).then(|| (0..market.n()).map(|i| market.probability(i).canonical_json()).collect()),
        }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

fn parse<T: for<'de> Deserialize<'de>>(path: &Path, text: &str) -> Result<T, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::Parse { path: path.to_path_buf(), message: e.to_string() })
}

pub fn read_market<S: CliScalar>(path: &Path) -> Result<DiscreteMarket<S>, CliError> {
    parse::<MarketFile>(path, &read(path)?)?.to_market()
}

/// A comma- or whitespace-separated list such as `1,2,4` or `3/2 2 7/2`.
pub fn parse_list<S: CliScalar>(text: &str) -> Result<Vec<S>, CliError> {
    let items: Vec<&str> = text.split([',', ' ', '\t']).filter(|s| !s.is_empty()).collect();
    if items.is_empty() {
        return Err(CliError::Input("empty list".to_string()));
    }
    items.iter().map(|s| S::parse_text(s).ok_or_else(|| CliError::Input(format!("not a finite number: {s:?}")))).collect()
}

/// Regime-switching model parameters; `r` defaults to zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsFile {
    pub s0: f64,
    pub mu: f64,
    pub sigma_h: f64,
    pub sigma_l: f64,
    pub p: f64,
    pub t: f64,
    #[serde(default)]
    pub r: f64,
}

impl From<ParamsFile> for StochVolParams {
    fn from(f: ParamsFile) -> Self {
        StochVolParams { s0: f.s0, mu: f.mu, sigma_h: f.sigma_h, sigma_l: f.sigma_l, p: f.p, t: f.t, r: f.r }
    }
}

impl From<StochVolParams> for ParamsFile {
    fn from(p: StochVolParams) -> Self {
        ParamsFile { s0: p.s0, mu: p.mu, sigma_h: p.sigma_h, sigma_l: p.sigma_l, p: p.p, t: p.t, r: p.r }
    }
}

pub fn read_params(path: &Path) -> Result<StochVolParams, CliError> {
    let params: StochVolParams = parse::<ParamsFile>(path, &read(path)?)?.into();
    params.validate()?;
    Ok(params)
}

#[cfg(test)]
mod tests {
    use super::*;
    use costeff_core::scalar::Rational;

    #[test]
    fn decimal_markets_round_trip_bit_exactly() {
        let text = r#"{"n": 3, "assets": [[4.1, 0.3, 1e-3], ["7/3", 2, 0.1]], "prices": [1.7, 0.9]}"#;
        let file: MarketFile = serde_json::from_str(text).unwrap();
        let m: DiscreteMarket<f64> = file.to_market().unwrap();
        let again: DiscreteMarket<f64> = serde_json::from_str::<MarketFile>(&serde_json::to_string(&MarketFile::from_market(&m)).unwrap()).unwrap().to_market().unwrap();
        for (a, b) in m.assets().iter().flatten().chain(m.prices()).zip(again.assets().iter().flatten().chain(again.prices())) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
        let exact: DiscreteMarket<Rational> = file.to_market().unwrap();
        assert_eq!(exact.assets()[0][0], Rational::new(41, 10));
        assert_eq!(exact.assets()[1][0], Rational::new(7, 3));
        let back: DiscreteMarket<Rational> = MarketFile::from_market(&exact).to_market().unwrap();
        assert_eq!(back, exact);
    }

    #[test]
    fn bad_files_are_input_errors() {
        let file: MarketFile = serde_json::from_str(r#"{"n": 2, "assets": [[1, "x"]], "prices": [1]}"#).unwrap();
        assert!(matches!(file.to_market::<f64>(), Err(CliError::Input(_))));
        assert!(serde_json::from_str::<MarketFile>(r#"{"n": 2, "assets": [], "prices": [], "extra": 1}"#).is_err());
        let file: MarketFile = serde_json::from_str(r#"{"n": 2, "assets": [[1, 2]], "prices": [1.5], "probabilities": [0.5, 0.6]}"#).unwrap();
        assert!(matches!(file.to_market::<f64>(), Err(CliError::Core(_))));
    }

    #[test]
    fn lists() {
        assert_eq!(parse_list::<Rational>("3/2, 2 7/2").unwrap(), vec![Rational::new(3, 2), Rational::from_integer(2), Rational::new(7, 2)]);
        assert!(parse_list::<f64>(" , ").is_err());
        assert!(parse_list::<f64>("1,two").is_err());
    }

    #[test]
    fn params_default_rate() {
        let f: ParamsFile = serde_json::from_str(r#"{"s0": 1, "mu": 0.05, "sigma_h": 0.3, "sigma_l": 0.1, "p": 0.5, "t": 1}"#).unwrap();
        assert_eq!(StochVolParams::from(f), StochVolParams::reference());
    }
}
