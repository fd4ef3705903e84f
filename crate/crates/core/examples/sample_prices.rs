//! Regenerates `data/sample_prices.csv`: one synthetic daily close series on
//! weekdays from 2007-10-11 through 2020-12-31, drawn from the log-price model
//! with daily drift 0.0008316271 and daily volatility 0.01648899.
//!
//! cargo run -p itolab --example sample_prices > data/sample_prices.csv

use std::io::Write;

use chrono::{Datelike, NaiveDate, Weekday};
use itolab::sde::{simulate_gbm, GbmParams};
use itolab::{SeedSpec, TimeGrid};

const SEED: u64 = 20_071_011;
const INITIAL: f64 = 5.0;

fn main() -> itolab::Result<()> {
    let first = NaiveDate::from_ymd_opt(2007, 10, 11).unwrap();
    let last = NaiveDate::from_ymd_opt(2020, 12, 31).unwrap();
    let dates: Vec<NaiveDate> = first
        .iter_days()
        .take_while(|d| *d <= last)
        .filter(|d| !matches!(d.weekday(), Weekday::Sat | Weekday::Sun))
        .collect();
    let steps = dates.len() - 1;
    let grid = TimeGrid::uniform(0.0, steps as f64, steps)?;
    let params = GbmParams::new(0.000_831_627_1, 0.016_488_99)?;
    let path = simulate_gbm(params, &grid, INITIAL, SeedSpec::new(SEED, 0))?;

    let mut out = std::io::stdout().lock();
    writeln!(out, "date,close")?;
    for (d, p) in dates.iter().zip(path.prices()) {
        writeln!(out, "{},{:.4}", d.format("%Y-%m-%d"), p)?;
    }
    Ok(())
}
