//! The seven bundled benchmark instances (`stocks2` .. `stocks8`) and a
//! synthetic two-ticker price series.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::knapsack::{BitString, KnapsackInstance};
use crate::portfolio::ExpectedReturns;

const TABLE_JSON: &str = include_str!("../fixtures/table2.json");

/// Synthetic MSFT/AAPL adjusted closes, business days 2018-01-02..2022-12-30.
pub const SAMPLE_PRICES_CSV: &str = include_str!("../fixtures/msft_aapl_2018_2023.csv");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fixture {
    pub name: String,
    pub tickers: Vec<String>,
    pub values: Vec<f64>,
    pub weights: Vec<u64>,
    pub capacity: u64,
    /// Best selection as printed with the published values.
    pub bks: String,
    pub qubits: usize,
}

impl Fixture {
    pub fn instance(&self) -> KnapsackInstance {
        KnapsackInstance::new(self.values.clone(), self.weights.clone(), self.capacity)
            .and_then(|i| i.with_tickers(self.tickers.clone()))
            .expect("bundled fixtures are valid")
    }

    pub fn expected_returns(&self) -> ExpectedReturns {
        ExpectedReturns {
            tickers: self.tickers.clone(),
            values: self.values.clone(),
        }
    }

    pub fn published_bks(&self) -> BitString {
        self.bks.parse().expect("bundled bitstrings parse")
    }
}

pub fn fixtures() -> Vec<Fixture> {
    serde_json::from_str(TABLE_JSON).expect("bundled fixture json parses")
}

pub fn fixture(name: &str) -> Result<Fixture> {
    fixtures()
        .into_iter()
        .find(|f| f.name == name)
        .ok_or_else(|| Error::UnknownFixture(name.to_string()))
}

pub fn fixture_names() -> Vec<String> {
    fixtures().into_iter().map(|f| f.name).collect()
}
