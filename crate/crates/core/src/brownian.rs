//! Realised Brownian paths on a time grid.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::TimeGrid;
use crate::rng::SeedSpec;

/// One sample path `B(t_k, ω)` on a grid. The path starts at zero at the
/// first grid time.
#[derive(Debug, Clone, PartialEq)]
pub struct BrownianPath {
    grid: TimeGrid,
    values: Vec<f64>,
}

/// Read-only view of a path up to and including some time `t`.
///
/// Integrands receive a `History` rather than the whole path, so anything
/// they compute is a function of the past only.
#[derive(Debug, Clone, Copy)]
pub struct History<'a> {
    times: &'a [f64],
    values: &'a [f64],
}

impl<'a> History<'a> {
    pub fn times(&self) -> &'a [f64] {
        self.times
    }

    pub fn values(&self) -> &'a [f64] {
        self.values
    }

    /// The time this history ends at.
    pub fn now(&self) -> f64 {
        self.times[self.times.len() - 1]
    }

    /// `B(now)`.
    pub fn current(&self) -> f64 {
        self.values[self.values.len() - 1]
    }
}

impl BrownianPath {
    /// Samples a path with independent `N(0, t_k − t_{k−1})` increments drawn
    /// from the stream identified by `seed`.
    pub fn sample(grid: &TimeGrid, seed: SeedSpec) -> Self {
        let mut stream = seed.stream();
        let mut values = Vec::with_capacity(grid.len());
        let mut level = 0.0;
        values.push(level);
        for (a, b) in grid.intervals() {
            level += (b - a).sqrt() * stream.standard_normal();
            values.push(level);
        }
        Self {
            grid: grid.clone(),
            values,
        }
    }

    /// Wraps externally supplied values, e.g. a hand-built path in a test.
    pub fn from_values(grid: TimeGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::LengthMismatch {
                expected: grid.len(),
                found: values.len(),
            });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numerical("non-finite path value".into()));
        }
        Ok(Self { grid, values })
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn terminal(&self) -> f64 {
        self.values[self.values.len() - 1]
    }

    pub fn value_at(&self, t: f64) -> Result<f64> {
        self.grid
            .index_of(t)
            .map(|k| self.values[k])
            .ok_or(Error::NotOnGrid(t))
    }

    /// `B(t_k) − B(t_{k−1})` for `k = 1..n`.
    pub fn increments(&self) -> Vec<f64> {
        self.values.windows(2).map(|w| w[1] - w[0]).collect()
    }

    /// The path truncated at grid time `up_to`.
    pub fn restrict(&self, up_to: f64) -> Result<BrownianPath> {
        let k = self.grid.index_of(up_to).ok_or(Error::NotOnGrid(up_to))?;
        let times = self.grid.times()[..=k].to_vec();
        // A single-point prefix is not a valid partition, so build it directly.
        Ok(BrownianPath {
            grid: if times.len() >= 2 {
                TimeGrid::new(times)?
            } else {
                TimeGrid::single_point(times[0])
            },
            values: self.values[..=k].to_vec(),
        })
    }

    /// Borrowed history up to grid index `k` inclusive.
    pub fn history(&self, k: usize) -> History<'_> {
        History {
            times: &self.grid.times()[..=k],
            values: &self.values[..=k],
        }
    }
}

/// Samples `n_paths` paths; path `i` uses stream `(master_seed, i)`.
pub fn sample_paths(grid: &TimeGrid, master_seed: u64, n_paths: usize) -> Vec<BrownianPath> {
    (0..n_paths as u64)
        .into_par_iter()
        .map(|i| BrownianPath::sample(grid, SeedSpec::new(master_seed, i)))
        .collect()
}
