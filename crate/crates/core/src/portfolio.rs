//! Price ingestion, expected returns and the knapsack encoding of a
//! portfolio selection.

use std::path::Path;

use chrono::NaiveDate;

use crate::error::{Error, Result};
use crate::knapsack::KnapsackInstance;

/// Trading days per year used to annualize daily returns.
pub const TRADING_DAYS: f64 = 252.0;

/// Adjusted closes, one row per date and one column per ticker.
#[derive(Debug, Clone, PartialEq)]
pub struct PriceSeries {
    pub tickers: Vec<String>,
    pub dates: Vec<NaiveDate>,
    pub closes: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExpectedReturns {
    pub tickers: Vec<String>,
    pub values: Vec<f64>,
}

impl PriceSeries {
    pub fn validate(&self) -> Result<()> {
        if self.dates.len() != self.closes.len() {
            return Err(Error::Csv(format!(
                "{} dates but {} rows",
                self.dates.len(),
                self.closes.len()
            )));
        }
        for (row, date) in self.closes.iter().zip(&self.dates) {
            if row.len() != self.tickers.len() {
                return Err(Error::Csv(format!("row {date} has {} columns", row.len())));
            }
            for (price, ticker) in row.iter().zip(&self.tickers) {
                if !(price.is_finite() && *price > 0.0) {
                    return Err(Error::NonPositivePrice {
                        ticker: ticker.clone(),
                        date: date.to_string(),
                        price: *price,
                    });
                }
            }
        }
        if let Some(w) = self.dates.windows(2).find(|w| w[1] <= w[0]) {
            return Err(Error::NonMonotoneDates(w[1].to_string()));
        }
        Ok(())
    }

    /// Rows with `start <= date < end`; either bound may be open.
    pub fn between(&self, start: Option<NaiveDate>, end: Option<NaiveDate>) -> PriceSeries {
        let keep = |d: &NaiveDate| start.is_none_or(|s| *d >= s) && end.is_none_or(|e| *d < e);
        let (dates, closes) = self
            .dates
            .iter()
            .zip(&self.closes)
            .filter(|(d, _)| keep(d))
            .map(|(d, r)| (*d, r.clone()))
            .unzip();
        PriceSeries {
            tickers: self.tickers.clone(),
            dates,
            closes,
        }
    }
}

/// Reads a `date,<TICKER>...` CSV and keeps the requested tickers in the
/// requested order.
pub fn load_prices(path: impl AsRef<Path>, tickers: &[String]) -> Result<PriceSeries> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_prices(file, tickers)
}

pub fn parse_prices<R: std::io::Read>(reader: R, tickers: &[String]) -> Result<PriceSeries> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(reader);
    let header = rdr
        .headers()
        .map_err(|e| Error::Csv(e.to_string()))?
        .clone();
    if header.get(0).map(|h| h.eq_ignore_ascii_case("date")) != Some(true) {
        return Err(Error::Csv("first column must be \"date\"".into()));
    }
    let columns = tickers
        .iter()
        .map(|t| {
            header
                .iter()
                .skip(1)
                .position(|h| h == t)
                .map(|p| p + 1)
                .ok_or_else(|| Error::MissingTicker(t.clone()))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut dates = Vec::new();
    let mut closes = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| Error::Csv(e.to_string()))?;
        let raw_date = rec.get(0).unwrap_or_default();
        let date = NaiveDate::parse_from_str(raw_date, "%Y-%m-%d")
            .map_err(|e| Error::Csv(format!("bad date {raw_date:?}: {e}")))?;
        let row = columns
            .iter()
            .map(|&c| {
                let cell = rec.get(c).unwrap_or_default();
                cell.parse::<f64>()
                    .map_err(|_| Error::Csv(format!("bad price {cell:?} on {raw_date}")))
            })
            .collect::<Result<Vec<_>>>()?;
        dates.push(date);
        closes.push(row);
    }
    let series = PriceSeries {
        tickers: tickers.to_vec(),
        dates,
        closes,
    };
    series.validate()?;
    Ok(series)
}

/// Annualized arithmetic mean of daily simple returns.
pub fn expected_returns(prices: &PriceSeries) -> Result<ExpectedReturns> {
    let rows = prices.closes.len();
    if rows < 2 {
        return Err(Error::TooFewRows(rows));
    }
    let values = (0..prices.tickers.len())
        .map(|j| {
            let sum: f64 = prices
                .closes
                .windows(2)
                .map(|w| w[1][j] / w[0][j] - 1.0)
                .sum();
            TRADING_DAYS * sum / (rows - 1) as f64
        })
        .collect();
    Ok(ExpectedReturns {
        tickers: prices.tickers.clone(),
        values,
    })
}

/// Unit weights and capacity `floor(N / 2)`.
pub fn encode_to_knapsack(er: &ExpectedReturns) -> Result<KnapsackInstance> {
    let n = er.values.len();
    if n == 0 {
        return Err(Error::InvalidInstance("no expected returns".into()));
    }
    KnapsackInstance::new(er.values.clone(), vec![1; n], (n / 2) as u64)?
        .with_tickers(er.tickers.clone())
}
