//! Partitions `t_0 < t_1 < … < t_n` of a time interval.
//!
//! Times are in model days: one trading day is `1.0`, so daily log-return
//! calibrations plug in with `Δt = 1`.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct TimeGrid {
    times: Vec<f64>,
}

impl TimeGrid {
    /// Validates an explicit partition: finite, strictly increasing, ≥ 2 points.
    pub fn new(times: Vec<f64>) -> Result<Self> {
        if times.len() < 2 {
            return Err(Error::InvalidGrid(format!(
                "need at least 2 points, got {}",
                times.len()
            )));
        }
        if let Some(t) = times.iter().find(|t| !t.is_finite()) {
            return Err(Error::InvalidGrid(format!("non-finite time {t}")));
        }
        if let Some(w) = times.windows(2).find(|w| w[1] <= w[0]) {
            return Err(Error::InvalidGrid(format!(
                "times not strictly increasing at {} -> {}",
                w[0], w[1]
            )));
        }
        Ok(Self { times })
    }

    /// Degenerate one-point grid; only produced by restricting a path to its
    /// first time.
    pub(crate) fn single_point(t: f64) -> Self {
        Self { times: vec![t] }
    }

    /// `steps + 1` equally spaced points from `start` to `end`.
    pub fn uniform(start: f64, end: f64, steps: usize) -> Result<Self> {
        if !(start.is_finite() && end.is_finite()) || end <= start {
            return Err(Error::InvalidGrid(format!(
                "need finite start < end, got [{start}, {end}]"
            )));
        }
        if steps == 0 {
            return Err(Error::InvalidGrid("steps must be at least 1".into()));
        }
        let span = end - start;
        let n = steps as f64;
        let mut times: Vec<f64> = (0..=steps).map(|k| start + span * (k as f64 / n)).collect();
        times[steps] = end;
        Self::new(times)
    }

    /// Inserts the midpoint of every interval. Original points are kept
    /// bit-for-bit, so coarse grids are exact subsets of their refinements.
    pub fn refine(&self) -> Self {
        let mut times = Vec::with_capacity(2 * self.times.len() - 1);
        for w in self.times.windows(2) {
            times.push(w[0]);
            times.push(0.5 * (w[0] + w[1]));
        }
        times.push(self.end());
        Self { times }
    }

    /// Applies [`refine`](Self::refine) `levels` times.
    pub fn refine_n(&self, levels: usize) -> Self {
        (0..levels).fold(self.clone(), |g, _| g.refine())
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    /// Always false: a valid grid has at least two points.
    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn steps(&self) -> usize {
        self.times.len() - 1
    }

    pub fn start(&self) -> f64 {
        self.times[0]
    }

    pub fn end(&self) -> f64 {
        self.times[self.times.len() - 1]
    }

    /// Largest subinterval length `|π|`.
    pub fn mesh(&self) -> f64 {
        self.intervals().map(|(a, b)| b - a).fold(0.0, f64::max)
    }

    /// Consecutive `(t_{k-1}, t_k)` pairs.
    pub fn intervals(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.times.windows(2).map(|w| (w[0], w[1]))
    }

    /// Index of `t` in the grid; exact match required.
    pub fn index_of(&self, t: f64) -> Option<usize> {
        self.times
            .binary_search_by(|probe| probe.total_cmp(&t))
            .ok()
    }

    /// Index of each point of `coarse` within `self`.
    pub fn embed(&self, coarse: &TimeGrid) -> Result<Vec<usize>> {
        coarse
            .times
            .iter()
            .map(|&t| self.index_of(t).ok_or(Error::NotOnGrid(t)))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn uniform_examples() {
        assert_eq!(TimeGrid::uniform(0.0, 1.0, 1).unwrap().times(), &[0.0, 1.0]);
        assert_eq!(
            TimeGrid::uniform(0.0, 1.0, 4).unwrap().times(),
            &[0.0, 0.25, 0.5, 0.75, 1.0]
        );
        let year = TimeGrid::uniform(0.0, 252.0, 252).unwrap();
        assert_eq!(year.len(), 253);
        assert_eq!(year.mesh(), 1.0);
    }

    #[test]
    fn uniform_rejects_bad_input() {
        assert!(TimeGrid::uniform(1.0, 1.0, 4).is_err());
        assert!(TimeGrid::uniform(2.0, 1.0, 4).is_err());
        assert!(TimeGrid::uniform(0.0, 1.0, 0).is_err());
        assert!(TimeGrid::uniform(0.0, f64::INFINITY, 4).is_err());
    }

    #[test]
    fn explicit_grid_validation() {
        assert!(TimeGrid::new(vec![0.0]).is_err());
        assert!(TimeGrid::new(vec![0.0, 0.0]).is_err());
        assert!(TimeGrid::new(vec![0.0, 2.0, 1.0]).is_err());
        assert!(TimeGrid::new(vec![0.0, f64::NAN]).is_err());
        assert!(TimeGrid::new(vec![0.0, 0.1, 5.0]).is_ok());
    }

    #[test]
    fn refine_unit_interval() {
        let g = TimeGrid::uniform(0.0, 1.0, 1).unwrap().refine();
        assert_eq!(g.times(), &[0.0, 0.5, 1.0]);
    }

    #[test]
    fn index_lookup_and_embedding() {
        let coarse = TimeGrid::uniform(0.0, 1.0, 3).unwrap();
        let fine = coarse.refine_n(3);
        let idx = fine.embed(&coarse).unwrap();
        assert_eq!(idx, vec![0, 8, 16, 24]);
        assert!(matches!(coarse.embed(&fine), Err(Error::NotOnGrid(_))));
    }

    proptest! {
        #[test]
        fn refine_keeps_points_and_halves_mesh(start in -100.0f64..100.0, span in 0.01f64..100.0, steps in 1usize..64) {
            let g = TimeGrid::uniform(start, start + span, steps).unwrap();
            let r = g.refine();
            prop_assert_eq!(r.len(), 2 * g.len() - 1);
            for &t in g.times() {
                prop_assert!(r.index_of(t).is_some());
            }
            prop_assert!(r.mesh() <= g.mesh() / 2.0 * (1.0 + 1e-9));
            prop_assert!(TimeGrid::new(r.times().to_vec()).is_ok());
        }

        #[test]
        fn uniform_mesh(start in -100.0f64..100.0, span in 0.01f64..100.0, steps in 1usize..500) {
            let g = TimeGrid::uniform(start, start + span, steps).unwrap();
            prop_assert_eq!(g.len(), steps + 1);
            let want = span / steps as f64;
            prop_assert!((g.mesh() - want).abs() <= 1e-9 * want.max(1.0));
        }
    }
}
