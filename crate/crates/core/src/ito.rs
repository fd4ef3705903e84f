//! Itô integration against realised Brownian paths.
//!
//! Integrals are built the way the Itô integral is constructed: an
//! elementary process `φ = Σ Z_j 𝟙_(t_j, t_{j+1}]` integrates to
//! `Σ Z_j (B(t_{j+1}) − B(t_j))`, and a general adapted integrand is
//! approximated by the elementary process that freezes it at the left end of
//! each grid interval. Refining the grid against a single fine driving path
//! gives a per-`ω` sequence whose L² behaviour can be measured directly.
//!
//! Evaluation is always at the left endpoint. Midpoint or right-point
//! evaluation would converge to a different (Stratonovich-type) limit.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::brownian::{BrownianPath, History};
use crate::error::{Error, Result};
use crate::grid::TimeGrid;
use crate::rng::SeedSpec;

/// Floor on the denominator of [`IsometryReport::rel_err`].
pub const REL_ERR_FLOOR: f64 = 1e-12;

/// A non-anticipating integrand `f(t, ω)`.
///
/// `eval` sees the path only up to `t`; implementations must be pure so
/// that Monte Carlo loops can call them from any worker.
pub trait AdaptedIntegrand: Sync {
    fn eval(&self, t: f64, history: History<'_>) -> f64;
}

impl<F> AdaptedIntegrand for F
where
    F: Fn(f64, History<'_>) -> f64 + Sync,
{
    fn eval(&self, t: f64, history: History<'_>) -> f64 {
        self(t, history)
    }
}

/// `f ≡ c`.
#[derive(Debug, Clone, Copy)]
pub struct Constant(pub f64);

impl AdaptedIntegrand for Constant {
    fn eval(&self, _t: f64, _history: History<'_>) -> f64 {
        self.0
    }
}

/// Integrands with names, as exposed on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BuiltinIntegrand {
    /// `f ≡ 1`
    #[serde(rename = "one")]
    One,
    /// `f(t) = B(t)`
    #[serde(rename = "bm")]
    Brownian,
    /// `f(t) = sin B(t)`
    #[serde(rename = "sin-bm")]
    SinBrownian,
}

impl AdaptedIntegrand for BuiltinIntegrand {
    fn eval(&self, _t: f64, history: History<'_>) -> f64 {
        match self {
            BuiltinIntegrand::One => 1.0,
            BuiltinIntegrand::Brownian => history.current(),
            BuiltinIntegrand::SinBrownian => history.current().sin(),
        }
    }
}

impl FromStr for BuiltinIntegrand {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "one" => Ok(Self::One),
            "bm" => Ok(Self::Brownian),
            "sin-bm" => Ok(Self::SinBrownian),
            other => Err(Error::invalid(
                "integrand",
                format!("unknown integrand `{other}` (expected one, bm, sin-bm)"),
            )),
        }
    }
}

impl fmt::Display for BuiltinIntegrand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BuiltinIntegrand::One => "one",
            BuiltinIntegrand::Brownian => "bm",
            BuiltinIntegrand::SinBrownian => "sin-bm",
        })
    }
}

/// A realised elementary process: `values[j]` is held on
/// `(breakpoints[j], breakpoints[j + 1]]`.
#[derive(Debug, Clone, PartialEq)]
pub struct StepProcess {
    breakpoints: Vec<f64>,
    values: Vec<f64>,
}

impl StepProcess {
    pub fn new(breakpoints: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if breakpoints.len() < 2 {
            return Err(Error::invalid("breakpoints", "need at least 2 breakpoints"));
        }
        if breakpoints.windows(2).any(|w| w[1] <= w[0])
            || breakpoints.iter().any(|t| !t.is_finite())
        {
            return Err(Error::invalid(
                "breakpoints",
                "must be finite and strictly increasing",
            ));
        }
        if values.len() != breakpoints.len() - 1 {
            return Err(Error::LengthMismatch {
                expected: breakpoints.len() - 1,
                found: values.len(),
            });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("values", "must be finite"));
        }
        Ok(Self {
            breakpoints,
            values,
        })
    }

    /// The elementary process that freezes `f` at the left end of each
    /// interval of `grid`, read off `path`.
    pub fn left_point<F: AdaptedIntegrand + ?Sized>(
        f: &F,
        grid: &TimeGrid,
        path: &BrownianPath,
    ) -> Result<Self> {
        let idx = path.grid().embed(grid)?;
        let values = grid
            .times()
            .iter()
            .zip(&idx)
            .take(grid.steps())
            .map(|(&t, &k)| f.eval(t, path.history(k)))
            .collect();
        Self::new(grid.times().to_vec(), values)
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `∫ φ² dt = Σ Z_j² (t_{j+1} − t_j)`.
    pub fn square_integral(&self) -> f64 {
        self.values
            .iter()
            .zip(self.breakpoints.windows(2))
            .map(|(z, w)| z * z * (w[1] - w[0]))
            .sum()
    }
}

/// `∫ φ dB = Σ Z_j (B(t_{j+1}) − B(t_j))` over the realised path.
pub fn integrate_step(phi: &StepProcess, path: &BrownianPath) -> Result<f64> {
    let idx = phi
        .breakpoints
        .iter()
        .map(|&t| path.grid().index_of(t).ok_or(Error::NotOnGrid(t)))
        .collect::<Result<Vec<_>>>()?;
    let b = path.values();
    Ok(phi
        .values
        .iter()
        .zip(idx.windows(2))
        .map(|(z, w)| z * (b[w[1]] - b[w[0]]))
        .sum())
}

/// How an elementary approximant is built from an adapted integrand.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Approximant {
    /// `Z_k = f(t_{k−1})`.
    LeftPoint,
    /// `Z_k = ½ (f(t_{k−2}) + f(t_{k−1}))`, with `Z_1 = f(t_0)`. Still
    /// adapted, and converges to the same integral.
    LaggedAverage,
}

/// Left-point Itô sum `Σ_{k=1..n} f(t_{k−1}) (B(t_k) − B(t_{k−1}))` over
/// `grid`, which must be a subset of the path grid.
pub fn approximate_ito<F: AdaptedIntegrand + ?Sized>(
    f: &F,
    grid: &TimeGrid,
    path: &BrownianPath,
) -> Result<f64> {
    approximate_ito_with(f, grid, path, Approximant::LeftPoint)
}

pub fn approximate_ito_with<F: AdaptedIntegrand + ?Sized>(
    f: &F,
    grid: &TimeGrid,
    path: &BrownianPath,
    approximant: Approximant,
) -> Result<f64> {
    let idx = path.grid().embed(grid)?;
    Ok(sums_on(f, grid.times(), &idx, path, approximant).0)
}

/// Left-point quadrature `Σ f(t_{k−1})² (t_k − t_{k−1})`.
pub fn left_point_square_integral<F: AdaptedIntegrand + ?Sized>(
    f: &F,
    grid: &TimeGrid,
    path: &BrownianPath,
) -> Result<f64> {
    let idx = path.grid().embed(grid)?;
    Ok(sums_on(f, grid.times(), &idx, path, Approximant::LeftPoint).1)
}

/// Returns `(Itô sum, quadrature of Z²)` over the coarse points `times`,
/// located at `idx` in the path grid.
fn sums_on<F: AdaptedIntegrand + ?Sized>(
    f: &F,
    times: &[f64],
    idx: &[usize],
    path: &BrownianPath,
    approximant: Approximant,
) -> (f64, f64) {
    let b = path.values();
    let mut ito = 0.0;
    let mut quad = 0.0;
    let mut prev_f: Option<f64> = None;
    for k in 1..times.len() {
        let (i0, i1) = (idx[k - 1], idx[k]);
        let left = f.eval(times[k - 1], path.history(i0));
        let z = match (approximant, prev_f) {
            (Approximant::LaggedAverage, Some(p)) => 0.5 * (p + left),
            _ => left,
        };
        prev_f = Some(left);
        ito += z * (b[i1] - b[i0]);
        quad += z * z * (times[k] - times[k - 1]);
    }
    (ito, quad)
}

/// Monte Carlo check of `E[(∫φ dB)²] = E[∫φ² dt]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IsometryReport {
    /// Mean of the squared Itô sums.
    pub lhs: f64,
    /// Mean of the left-point quadrature of `f²`.
    pub rhs: f64,
    /// `|lhs − rhs| / max(rhs, 10⁻¹²)`.
    pub rel_err: f64,
    pub n_paths: usize,
}

/// Both sides of the isometry over the same `n_paths` realisations; path `i`
/// is driven by stream `(master_seed, i)` on `grid`.
pub fn isometry_check<F: AdaptedIntegrand + ?Sized>(
    f: &F,
    grid: &TimeGrid,
    n_paths: usize,
    master_seed: u64,
) -> Result<IsometryReport> {
    if n_paths < 2 {
        return Err(Error::invalid("n_paths", "need at least 2 paths"));
    }
    let idx: Vec<usize> = (0..grid.len()).collect();
    let per_path: Vec<(f64, f64)> = (0..n_paths as u64)
        .into_par_iter()
        .map(|i| {
            let path = BrownianPath::sample(grid, SeedSpec::new(master_seed, i));
            let (ito, quad) = sums_on(f, grid.times(), &idx, &path, Approximant::LeftPoint);
            (ito * ito, quad)
        })
        .collect();
    let n = n_paths as f64;
    let (lhs, rhs) = per_path
        .iter()
        .fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let (lhs, rhs) = (lhs / n, rhs / n);
    check_finite(&[lhs, rhs])?;
    Ok(IsometryReport {
        lhs,
        rhs,
        rel_err: (lhs - rhs).abs() / rhs.max(REL_ERR_FLOOR),
        n_paths,
    })
}

/// One row of a refinement study.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConvergencePoint {
    /// Mesh of the coarser grid of the pair being compared.
    pub mesh: f64,
    /// Monte Carlo estimate of the mean squared difference (squared L²
    /// distance) between the two estimates.
    pub l2_distance: f64,
}

/// Squared L² distance between Itô sums on successive refinements.
///
/// The base grid is refined `levels` times; each path is sampled once on the
/// finest grid (stream `(master_seed, i)`) and every level reads its sums off
/// that same path. Entry `ℓ` estimates `E[(I_ℓ − I_{ℓ+1})²]`.
pub fn convergence_diagnostic<F: AdaptedIntegrand + ?Sized>(
    f: &F,
    base_grid: &TimeGrid,
    levels: usize,
    n_paths: usize,
    master_seed: u64,
) -> Result<Vec<ConvergencePoint>> {
    if levels < 2 {
        return Err(Error::invalid(
            "levels",
            "need at least 2 refinement levels",
        ));
    }
    let study = RefinementStudy::new(base_grid, levels)?;
    let rows = study.per_path(n_paths, master_seed, |grids, path| {
        let sums: Vec<f64> = grids
            .iter()
            .map(|(times, idx)| sums_on(f, times, idx, path, Approximant::LeftPoint).0)
            .collect();
        sums.windows(2).map(|w| (w[0] - w[1]).powi(2)).collect()
    });
    study.summarise(&rows, n_paths)
}

/// Squared L² distance between the [`Approximant::LeftPoint`] and
/// [`Approximant::LaggedAverage`] estimates at each refinement level
/// `0..=levels`, on common driving paths.
pub fn approximant_gap<F: AdaptedIntegrand + ?Sized>(
    f: &F,
    base_grid: &TimeGrid,
    levels: usize,
    n_paths: usize,
    master_seed: u64,
) -> Result<Vec<ConvergencePoint>> {
    let study = RefinementStudy::new(base_grid, levels)?;
    let rows = study.per_path(n_paths, master_seed, |grids, path| {
        grids
            .iter()
            .map(|(times, idx)| {
                let a = sums_on(f, times, idx, path, Approximant::LeftPoint).0;
                let b = sums_on(f, times, idx, path, Approximant::LaggedAverage).0;
                (a - b).powi(2)
            })
            .collect()
    });
    study.summarise(&rows, n_paths)
}

struct RefinementStudy {
    finest: TimeGrid,
    /// `(times, indices in finest)` per level, coarsest first.
    levels: Vec<(Vec<f64>, Vec<usize>)>,
    meshes: Vec<f64>,
}

impl RefinementStudy {
    fn new(base: &TimeGrid, levels: usize) -> Result<Self> {
        let finest = base.refine_n(levels);
        let mut grid = base.clone();
        let mut out = Vec::with_capacity(levels + 1);
        let mut meshes = Vec::with_capacity(levels + 1);
        for _ in 0..=levels {
            let idx = finest.embed(&grid)?;
            meshes.push(grid.mesh());
            out.push((grid.times().to_vec(), idx));
            grid = grid.refine();
        }
        Ok(Self {
            finest,
            levels: out,
            meshes,
        })
    }

    fn per_path<G>(&self, n_paths: usize, master_seed: u64, g: G) -> Vec<Vec<f64>>
    where
        G: Fn(&[(Vec<f64>, Vec<usize>)], &BrownianPath) -> Vec<f64> + Sync,
    {
        (0..n_paths as u64)
            .into_par_iter()
            .map(|i| {
                let path = BrownianPath::sample(&self.finest, SeedSpec::new(master_seed, i));
                g(&self.levels, &path)
            })
            .collect()
    }

    fn summarise(&self, rows: &[Vec<f64>], n_paths: usize) -> Result<Vec<ConvergencePoint>> {
        if n_paths == 0 {
            return Err(Error::invalid("n_paths", "need at least 1 path"));
        }
        let width = rows[0].len();
        let mut totals = vec![0.0; width];
        for row in rows {
            for (t, x) in totals.iter_mut().zip(row) {
                *t += x;
            }
        }
        let out: Vec<ConvergencePoint> = totals
            .iter()
            .zip(&self.meshes)
            .map(|(t, &mesh)| ConvergencePoint {
                mesh,
                l2_distance: t / n_paths as f64,
            })
            .collect();
        check_finite(&out.iter().map(|p| p.l2_distance).collect::<Vec<_>>())?;
        Ok(out)
    }
}

fn check_finite(xs: &[f64]) -> Result<()> {
    if xs.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::Numerical("non-finite Monte Carlo estimate".into()))
    }
}
