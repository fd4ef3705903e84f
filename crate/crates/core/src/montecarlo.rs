//! Projection ensembles against a historical series: per-path Pearson
//! correlation and its running mean over the number of projections.

use rayon::prelude::*;

use crate::calibrate::PriceSeries;
use crate::error::{Error, Result};
use crate::grid::TimeGrid;
use crate::sde::{GbmParams, PricePath};
use crate::stats::{self, ExactSum};

/// `N` simulated price paths on a shared grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionEnsemble {
    grid: TimeGrid,
    paths: Vec<PricePath>,
    /// Seed and parameters are unknown when the ensemble was read back from a
    /// file.
    master_seed: Option<u64>,
    params: Option<GbmParams>,
}

impl ProjectionEnsemble {
    pub fn new(
        grid: TimeGrid,
        paths: Vec<PricePath>,
        master_seed: Option<u64>,
        params: Option<GbmParams>,
    ) -> Result<Self> {
        if paths.is_empty() {
            return Err(Error::invalid("paths", "ensemble needs at least one path"));
        }
        if let Some(p) = paths.iter().find(|p| p.grid() != &grid) {
            return Err(Error::LengthMismatch {
                expected: grid.len(),
                found: p.grid().len(),
            });
        }
        Ok(Self {
            grid,
            paths,
            master_seed,
            params,
        })
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn paths(&self) -> &[PricePath] {
        &self.paths
    }

    pub fn len(&self) -> usize {
        self.paths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.paths.is_empty()
    }

    pub fn master_seed(&self) -> Option<u64> {
        self.master_seed
    }

    pub fn params(&self) -> Option<GbmParams> {
        self.params
    }
}

/// What the correlation is computed on.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum CorrelationBasis {
    /// Price levels `Y_t` against `H_t`.
    #[default]
    Levels,
    /// `log Y_t` against `log H_t`. A sensitivity variant.
    LogPrices,
}

/// Sample Pearson correlation.
///
/// `Ok(None)` when either input is constant, since the coefficient is then
/// undefined. Errors on unequal lengths or fewer than two points.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<Option<f64>> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            expected: x.len(),
            found: y.len(),
        });
    }
    if x.len() < 2 {
        return Err(Error::TooFewSamples {
            needed: 2,
            got: x.len(),
        });
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if !(sxy.is_finite() && sxx.is_finite() && syy.is_finite()) {
        return Err(Error::Numerical("non-finite correlation input".into()));
    }
    if sxx == 0.0 || syy == 0.0 {
        return Ok(None);
    }
    Ok(Some((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0)))
}

/// Per-path correlations and their cumulative mean `cor^N`.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationTrace {
    /// Correlations of the paths that were kept, in path order.
    pub per_path: Vec<f64>,
    /// `cumulative[N − 1]` is the mean of `per_path[..N]`.
    pub cumulative: Vec<f64>,
    /// Indices of ensemble paths dropped because they were constant.
    pub excluded: Vec<usize>,
}

impl CorrelationTrace {
    /// Builds the running mean from per-path values. Each entry uses a
    /// correctly rounded sum, so the value at `N` does not depend on the
    /// order of the first `N` correlations.
    pub fn from_per_path(per_path: Vec<f64>, excluded: Vec<usize>) -> Self {
        let mut acc = ExactSum::new();
        let cumulative = per_path
            .iter()
            .enumerate()
            .map(|(i, &c)| {
                acc.add(c);
                acc.value() / (i + 1) as f64
            })
            .collect();
        Self {
            per_path,
            cumulative,
            excluded,
        }
    }

    pub fn len(&self) -> usize {
        self.per_path.len()
    }

    pub fn is_empty(&self) -> bool {
        self.per_path.is_empty()
    }

    /// `cor^N`, for `1 ≤ N ≤ len`.
    pub fn mean_at(&self, n: usize) -> Option<f64> {
        n.checked_sub(1)
            .and_then(|i| self.cumulative.get(i).copied())
    }

    pub fn final_mean(&self) -> Option<f64> {
        self.cumulative.last().copied()
    }

    /// Sample standard deviation of the first `n` per-path correlations.
    pub fn std_at(&self, n: usize) -> Option<f64> {
        self.per_path
            .get(..n)
            .and_then(|xs| stats::sample_std(xs).ok())
    }
}

/// Correlates every ensemble path with the historical closes, aligned by
/// trading-day index.
pub fn correlation_trace(
    ensemble: &ProjectionEnsemble,
    historical: &PriceSeries,
    basis: CorrelationBasis,
) -> Result<CorrelationTrace> {
    if historical.len() != ensemble.grid().len() {
        return Err(Error::LengthMismatch {
            expected: ensemble.grid().len(),
            found: historical.len(),
        });
    }
    let transform = |xs: &[f64]| -> Vec<f64> {
        match basis {
            CorrelationBasis::Levels => xs.to_vec(),
            CorrelationBasis::LogPrices => xs.iter().map(|x| x.ln()).collect(),
        }
    };
    let target = transform(&historical.closes());
    let results: Vec<Option<f64>> = ensemble
        .paths()
        .par_iter()
        .map(|p| pearson(&transform(p.prices()), &target))
        .collect::<Result<_>>()?;
    let mut per_path = Vec::with_capacity(results.len());
    let mut excluded = Vec::new();
    for (i, r) in results.into_iter().enumerate() {
        match r {
            Some(c) => per_path.push(c),
            None => excluded.push(i),
        }
    }
    Ok(CorrelationTrace::from_per_path(per_path, excluded))
}
