//! Log-price simulation: `d log Y = γ(t) dt + σ(t, Y) dB`.
//!
//! On a partition the equation is read as the left-endpoint sums
//!
//! ```text
//! log Y(t_n) − log Y(t_0) = Σ γ(t_{k−1}) Δt_k + Σ σ(t_{k−1}, Y(t_{k−1})) ΔB_k
//! ```
//!
//! and prices are recovered as `Y(t_0) · exp(drift sum) · exp(noise sum)`.
//! With constant coefficients this is the exact solution sampled on the grid,
//! so there is no discretisation bias.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::brownian::BrownianPath;
use crate::error::{Error, Result};
use crate::grid::TimeGrid;
use crate::montecarlo::ProjectionEnsemble;
use crate::rng::SeedSpec;

/// Constant drift `Γ` (per day) and diffusion `Σ` (per √day) of the log-price.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GbmParams {
    pub gamma: f64,
    pub sigma: f64,
}

impl GbmParams {
    pub fn new(gamma: f64, sigma: f64) -> Result<Self> {
        if !gamma.is_finite() {
            return Err(Error::invalid(
                "gamma",
                format!("must be finite, got {gamma}"),
            ));
        }
        if !sigma.is_finite() || sigma < 0.0 {
            return Err(Error::invalid(
                "sigma",
                format!("must be finite and non-negative, got {sigma}"),
            ));
        }
        Ok(Self { gamma, sigma })
    }
}

/// Coefficients of a log-price SDE. Both are evaluated at the left end of
/// each step, with the price observed there.
pub trait LogSdeCoefficients: Sync {
    fn drift(&self, t: f64) -> f64;
    fn diffusion(&self, t: f64, price: f64) -> f64;
}

impl LogSdeCoefficients for GbmParams {
    fn drift(&self, _t: f64) -> f64 {
        self.gamma
    }

    fn diffusion(&self, _t: f64, _price: f64) -> f64 {
        self.sigma
    }
}

/// A simulated price trajectory; `prices[0]` is the initial price.
#[derive(Debug, Clone, PartialEq)]
pub struct PricePath {
    grid: TimeGrid,
    prices: Vec<f64>,
}

impl PricePath {
    pub fn new(grid: TimeGrid, prices: Vec<f64>) -> Result<Self> {
        if prices.len() != grid.len() {
            return Err(Error::LengthMismatch {
                expected: grid.len(),
                found: prices.len(),
            });
        }
        if let Some((row, &value)) = prices
            .iter()
            .enumerate()
            .find(|(_, p)| !(p.is_finite() && **p > 0.0))
        {
            return Err(Error::NonPositivePrice { row, value });
        }
        Ok(Self { grid, prices })
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn prices(&self) -> &[f64] {
        &self.prices
    }
}

/// Drives the log-price scheme with an already sampled Brownian path on the
/// same grid.
pub fn simulate_log_sde_on<C: LogSdeCoefficients + ?Sized>(
    coefficients: &C,
    path: &BrownianPath,
    initial_price: f64,
) -> Result<PricePath> {
    if !(initial_price.is_finite() && initial_price > 0.0) {
        return Err(Error::invalid(
            "initial_price",
            format!("must be positive, got {initial_price}"),
        ));
    }
    let grid = path.grid();
    let b = path.values();
    let times = grid.times();
    let mut prices = Vec::with_capacity(grid.len());
    prices.push(initial_price);
    let mut drift_sum = 0.0;
    let mut noise_sum = 0.0;
    for k in 1..times.len() {
        let (t0, t1) = (times[k - 1], times[k]);
        let y0 = prices[k - 1];
        drift_sum += coefficients.drift(t0) * (t1 - t0);
        noise_sum += coefficients.diffusion(t0, y0) * (b[k] - b[k - 1]);
        let y = initial_price * drift_sum.exp() * noise_sum.exp();
        if !(y.is_finite() && y > 0.0) {
            return Err(Error::Numerical(format!(
                "price left (0, ∞) at t = {t1}: log-price exponent {}",
                drift_sum + noise_sum
            )));
        }
        prices.push(y);
    }
    Ok(PricePath {
        grid: grid.clone(),
        prices,
    })
}

/// General-coefficient simulation; the driving path comes from `seed`.
pub fn simulate_log_sde<C: LogSdeCoefficients + ?Sized>(
    coefficients: &C,
    grid: &TimeGrid,
    initial_price: f64,
    seed: SeedSpec,
) -> Result<PricePath> {
    let path = BrownianPath::sample(grid, seed);
    simulate_log_sde_on(coefficients, &path, initial_price)
}

/// `Y(t_n) = Y(t_0) · exp(Σ Γ Δt) · exp(Σ Σ ΔB)`. The generating path is
/// `BrownianPath::sample(grid, seed)`.
pub fn simulate_gbm(
    params: GbmParams,
    grid: &TimeGrid,
    initial_price: f64,
    seed: SeedSpec,
) -> Result<PricePath> {
    simulate_log_sde(&params, grid, initial_price, seed)
}

/// `n_paths` independent projections; path `n` uses stream
/// `(master_seed, n)`. Output does not depend on the worker count.
pub fn simulate_ensemble(
    params: GbmParams,
    grid: &TimeGrid,
    initial_price: f64,
    n_paths: usize,
    master_seed: u64,
) -> Result<ProjectionEnsemble> {
    if n_paths == 0 {
        return Err(Error::invalid("n_paths", "need at least 1 path"));
    }
    let paths = (0..n_paths as u64)
        .into_par_iter()
        .map(|n| simulate_gbm(params, grid, initial_price, SeedSpec::new(master_seed, n)))
        .collect::<Result<Vec<_>>>()?;
    ProjectionEnsemble::new(grid.clone(), paths, Some(master_seed), Some(params))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats;

    fn daily(days: usize) -> TimeGrid {
        TimeGrid::uniform(0.0, days as f64, days).unwrap()
    }

    #[test]
    fn params_validation() {
        assert!(GbmParams::new(0.0, -1.0).is_err());
        assert!(GbmParams::new(f64::NAN, 1.0).is_err());
        assert!(GbmParams::new(0.1, f64::INFINITY).is_err());
        assert!(GbmParams::new(-0.1, 0.0).is_ok());
    }

    #[test]
    fn zero_coefficients_give_constant_path() {
        let p = simulate_gbm(
            GbmParams::new(0.0, 0.0).unwrap(),
            &daily(50),
            42.0,
            SeedSpec::new(0, 0),
        )
        .unwrap();
        assert!(p.prices().iter().all(|&x| x == 42.0));
    }

    #[test]
    fn pure_drift_is_deterministic_exponential() {
        let p = simulate_gbm(
            GbmParams::new(0.01, 0.0).unwrap(),
            &daily(100),
            10.0,
            SeedSpec::new(0, 0),
        )
        .unwrap();
        let want = 10.0 * 1f64.exp();
        assert!((p.prices()[100] - want).abs() <= 1e-12 * want);
    }

    #[test]
    fn rejects_non_positive_initial_price() {
        let p = GbmParams::new(0.0, 0.1).unwrap();
        assert!(simulate_gbm(p, &daily(5), 0.0, SeedSpec::new(0, 0)).is_err());
        assert!(simulate_gbm(p, &daily(5), -3.0, SeedSpec::new(0, 0)).is_err());
    }

    #[test]
    fn overflow_is_reported() {
        let p = GbmParams::new(800.0, 0.0).unwrap();
        assert!(matches!(
            simulate_gbm(p, &daily(5), 1.0, SeedSpec::new(0, 0)),
            Err(Error::Numerical(_))
        ));
    }

    #[test]
    fn exponent_identity_on_sample_paths() {
        let params = GbmParams::new(0.0008, 0.0165).unwrap();
        let grid = daily(252);
        for id in 0..50 {
            let seed = SeedSpec::new(2, id);
            let p = simulate_gbm(params, &grid, 75.0, seed).unwrap();
            let b = BrownianPath::sample(&grid, seed);
            for (k, (&t, &y)) in grid.times().iter().zip(p.prices()).enumerate() {
                let got = (y / p.prices()[0]).ln();
                let drift = params.gamma * t;
                let noise = params.sigma * b.values()[k];
                let scale = (drift + noise).abs().max(drift.abs() + noise.abs());
                assert!((got - (drift + noise)).abs() <= 1e-12 * scale.max(f64::MIN_POSITIVE));
            }
        }
    }

    #[test]
    fn unit_log_increment_moments() {
        let params = GbmParams::new(0.0, 1.0).unwrap();
        let grid = TimeGrid::uniform(0.0, 1.0, 1).unwrap();
        let logs: Vec<f64> = simulate_ensemble(params, &grid, 1.0, 100_000, 0)
            .unwrap()
            .paths()
            .iter()
            .map(|p| p.prices()[1].ln())
            .collect();
        let (m, v) = stats::sample_moments(&logs).unwrap();
        assert!(m.abs() < 0.013, "mean {m}");
        assert!((v - 1.0).abs() < 0.02, "var {v}");
    }

    #[test]
    fn lognormal_moments() {
        let params = GbmParams::new(0.001, 0.02).unwrap();
        let days = 100;
        let n = 100_000;
        let ens = simulate_ensemble(params, &daily(days), 50.0, n, 13).unwrap();
        let logs: Vec<f64> = ens
            .paths()
            .iter()
            .map(|p| (p.prices()[days] / p.prices()[0]).ln())
            .collect();
        let (m, v) = stats::sample_moments(&logs).unwrap();
        let t = days as f64;
        let nf = n as f64;
        let s = params.sigma;
        assert!(
            (m - params.gamma * t).abs() < 4.0 * s * t.sqrt() / nf.sqrt(),
            "mean {m}"
        );
        assert!(
            (v - s * s * t).abs() < 4.0 * s * s * t * (2.0 / nf).sqrt(),
            "var {v}"
        );
        assert!(ens
            .paths()
            .iter()
            .all(|p| p.prices().iter().all(|&x| x > 0.0)));
    }

    #[test]
    fn ensemble_of_one_matches_single_simulation() {
        let params = GbmParams::new(0.001, 0.02).unwrap();
        let grid = daily(30);
        let ens = simulate_ensemble(params, &grid, 100.0, 1, 77).unwrap();
        let single = simulate_gbm(params, &grid, 100.0, SeedSpec::new(77, 0)).unwrap();
        assert_eq!(ens.paths(), &[single]);
    }

    #[test]
    fn ensemble_independent_of_worker_count() {
        let params = GbmParams::new(0.001, 0.02).unwrap();
        let grid = daily(60);
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| simulate_ensemble(params, &grid, 100.0, 200, 5).unwrap())
        };
        assert_eq!(run(1), run(8));
    }

    #[test]
    fn state_dependent_diffusion_uses_left_price() {
        // σ(t, y) = 0.1·[y > 100]: nothing moves until the price is above 100.
        struct Gate;
        impl LogSdeCoefficients for Gate {
            fn drift(&self, _t: f64) -> f64 {
                0.0
            }
            fn diffusion(&self, _t: f64, y: f64) -> f64 {
                if y > 100.0 {
                    0.1
                } else {
                    0.0
                }
            }
        }
        let grid = daily(20);
        let path = BrownianPath::sample(&grid, SeedSpec::new(0, 0));
        let below = simulate_log_sde_on(&Gate, &path, 100.0).unwrap();
        assert!(below.prices().iter().all(|&y| y == 100.0));
        let above = simulate_log_sde_on(&Gate, &path, 101.0).unwrap();
        let want = 101.0 * (0.1 * path.values()[1]).exp();
        assert!((above.prices()[1] - want).abs() < 1e-12 * want);
    }
}
