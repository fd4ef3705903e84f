//! Historical prices, daily log-returns and drift/volatility estimation.

use std::fmt;
use std::str::FromStr;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sde::GbmParams;
use crate::stats;

/// Dated closing prices, strictly increasing in date, all positive.
#[derive(Debug, Clone, PartialEq)]
pub struct PriceSeries {
    observations: Vec<(NaiveDate, f64)>,
}

impl PriceSeries {
    pub fn new(observations: Vec<(NaiveDate, f64)>) -> Result<Self> {
        if observations.is_empty() {
            return Err(Error::TooFewSamples { needed: 1, got: 0 });
        }
        for (row, &(_, close)) in observations.iter().enumerate() {
            if !(close.is_finite() && close > 0.0) {
                return Err(Error::NonPositivePrice { row, value: close });
            }
        }
        if let Some(w) = observations.windows(2).find(|w| w[1].0 <= w[0].0) {
            return Err(Error::UnorderedDates {
                previous: w[0].0,
                next: w[1].0,
            });
        }
        Ok(Self { observations })
    }

    pub fn observations(&self) -> &[(NaiveDate, f64)] {
        &self.observations
    }

    pub fn closes(&self) -> Vec<f64> {
        self.observations.iter().map(|&(_, c)| c).collect()
    }

    pub fn len(&self) -> usize {
        self.observations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.observations.is_empty()
    }

    pub fn first_date(&self) -> NaiveDate {
        self.observations[0].0
    }

    pub fn last_date(&self) -> NaiveDate {
        self.observations[self.observations.len() - 1].0
    }

    /// Observations with `from ≤ date ≤ to` (either bound optional).
    pub fn window(&self, from: Option<NaiveDate>, to: Option<NaiveDate>) -> Result<Self> {
        let kept: Vec<_> = self
            .observations
            .iter()
            .copied()
            .filter(|(d, _)| from.is_none_or(|f| *d >= f) && to.is_none_or(|t| *d <= t))
            .collect();
        if kept.is_empty() {
            return Err(Error::invalid(
                "window",
                format!("no observations between {from:?} and {to:?}"),
            ));
        }
        Ok(Self { observations: kept })
    }
}

/// `ln(X_i / X_{i−1})` between consecutive observations. Calendar gaps are
/// not interpolated.
#[derive(Debug, Clone, PartialEq)]
pub struct LogReturns {
    values: Vec<f64>,
}

impl LogReturns {
    pub fn from_values(values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numerical("non-finite log-return".into()));
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

pub fn log_returns(series: &PriceSeries) -> Result<LogReturns> {
    if series.len() < 2 {
        return Err(Error::TooFewSamples {
            needed: 2,
            got: series.len(),
        });
    }
    let values = series
        .observations
        .windows(2)
        .map(|w| (w[1].1 / w[0].1).ln())
        .collect();
    LogReturns::from_values(values)
}

/// How `Γ` and `Σ` are derived from the sample mean `m` and unbiased sample
/// variance `v` of the log-returns.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CalibrationMode {
    /// `Γ = m − v²/2`, `Σ = v`, taken literally from the published formulas.
    Paper,
    /// `Γ = m`, `Σ = √v`: the usual log-price drift and daily volatility.
    #[default]
    Standard,
}

impl FromStr for CalibrationMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paper" => Ok(Self::Paper),
            "standard" => Ok(Self::Standard),
            other => Err(Error::invalid(
                "mode",
                format!("unknown calibration mode `{other}` (expected standard or paper)"),
            )),
        }
    }
}

impl fmt::Display for CalibrationMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Paper => "paper",
            Self::Standard => "standard",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Calibration {
    pub params: GbmParams,
    pub mode: CalibrationMode,
    pub n_returns: usize,
}

pub fn calibrate(returns: &LogReturns, mode: CalibrationMode) -> Result<Calibration> {
    let (mean, var) = stats::sample_moments(returns.values())?;
    let (gamma, sigma) = match mode {
        CalibrationMode::Paper => (mean - var * var / 2.0, var),
        CalibrationMode::Standard => (mean, var.sqrt()),
    };
    Ok(Calibration {
        params: GbmParams::new(gamma, sigma)?,
        mode,
        n_returns: returns.len(),
    })
}
