//! Statistical oracles used by tests and diagnostics.
//!
//! Nothing here depends on the simulation modules, so the checks stay
//! independent of the code they are used to validate.

use crate::error::{Error, Result};

/// Asymptotic 1% critical constant for the one-sample Kolmogorov–Smirnov test.
pub const KS_CRITICAL_1PCT: f64 = 1.63;

/// Smallest sample accepted by [`ks_normal`].
pub const KS_MIN_SAMPLES: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KsResult {
    /// Sup-distance between the empirical CDF and Φ.
    pub statistic: f64,
    pub n: usize,
    /// `1.63 / √n`.
    pub critical_1pct: f64,
}

impl KsResult {
    pub fn rejects_at_1pct(&self) -> bool {
        self.statistic >= self.critical_1pct
    }
}

/// Standard normal CDF.
///
/// For `|x| ≤ 3` uses the Taylor series `Φ(x) = ½ + φ(x)·(x + x³/3 + x⁵/(3·5) + …)`
/// summed until the terms stop changing the total. Further out the upper tail
/// comes from Laplace's continued fraction for the Mills ratio, which keeps
/// full relative accuracy in the tails. Absolute error is at the level of
/// double rounding throughout.
pub fn normal_cdf(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x.abs() > 3.0 {
        let tail = upper_tail(x.abs());
        return if x > 0.0 { 1.0 - tail } else { tail };
    }
    let x2 = x * x;
    let mut term = x;
    let mut sum = x;
    let mut k = 1.0;
    loop {
        k += 2.0;
        term *= x2 / k;
        let next = sum + term;
        if next == sum {
            break;
        }
        sum = next;
    }
    (0.5 + normal_density(x) * sum).clamp(0.0, 1.0)
}

fn normal_density(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// `1 − Φ(x)` for `x > 3`: `φ(x) / (x + 1/(x + 2/(x + 3/(x + …))))`.
fn upper_tail(x: f64) -> f64 {
    let mut frac = x;
    for k in (1..=80).rev() {
        frac = x + k as f64 / frac;
    }
    normal_density(x) / frac
}

/// One-sample KS test of pre-standardised samples against N(0, 1).
pub fn ks_normal(samples: &[f64]) -> Result<KsResult> {
    if samples.len() < KS_MIN_SAMPLES {
        return Err(Error::TooFewSamples {
            needed: KS_MIN_SAMPLES,
            got: samples.len(),
        });
    }
    if samples.iter().any(|x| x.is_nan()) {
        return Err(Error::Numerical("NaN in KS sample".into()));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let statistic = sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = normal_cdf(x);
            let above = (i + 1) as f64 / n - f;
            let below = f - i as f64 / n;
            above.max(below)
        })
        .fold(0.0f64, f64::max);
    Ok(KsResult {
        statistic,
        n: sorted.len(),
        critical_1pct: KS_CRITICAL_1PCT / n.sqrt(),
    })
}

/// Mean and unbiased (n − 1) variance, two-pass.
pub fn sample_moments(samples: &[f64]) -> Result<(f64, f64)> {
    if samples.len() < 2 {
        return Err(Error::TooFewSamples {
            needed: 2,
            got: samples.len(),
        });
    }
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    // Second pass on centred data, with the first-order correction term that
    // cancels the rounding error left in `mean`.
    let (sq, lin) = samples.iter().fold((0.0, 0.0), |(sq, lin), &x| {
        let d = x - mean;
        (sq + d * d, lin + d)
    });
    let var = (sq - lin * lin / n) / (n - 1.0);
    Ok((mean, var.max(0.0)))
}

/// Sample standard deviation with the n − 1 denominator.
pub fn sample_std(samples: &[f64]) -> Result<f64> {
    sample_moments(samples).map(|(_, v)| v.sqrt())
}

/// Moment-ratio skewness `m3 / m2^{3/2}` with population moments.
pub fn sample_skewness(samples: &[f64]) -> Result<f64> {
    if samples.len() < 3 {
        return Err(Error::TooFewSamples {
            needed: 3,
            got: samples.len(),
        });
    }
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let (m2, m3) = samples.iter().fold((0.0, 0.0), |(m2, m3), &x| {
        let d = x - mean;
        (m2 + d * d, m3 + d * d * d)
    });
    let (m2, m3) = (m2 / n, m3 / n);
    if m2 == 0.0 {
        return Ok(0.0);
    }
    Ok(m3 / m2.powf(1.5))
}

/// Correctly rounded floating-point sum (Shewchuk's non-overlapping partials).
///
/// The result does not depend on the order in which values are added.
#[derive(Debug, Clone, Default)]
pub struct ExactSum {
    partials: Vec<f64>,
}

impl ExactSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, mut x: f64) {
        let mut i = 0;
        for j in 0..self.partials.len() {
            let mut y = self.partials[j];
            if x.abs() < y.abs() {
                std::mem::swap(&mut x, &mut y);
            }
            let hi = x + y;
            let lo = y - (hi - x);
            if lo != 0.0 {
                self.partials[i] = lo;
                i += 1;
            }
            x = hi;
        }
        self.partials.truncate(i);
        self.partials.push(x);
    }

    pub fn value(&self) -> f64 {
        // Round-half-even correction across the top partials.
        let p = &self.partials;
        let Some(mut n) = p.len().checked_sub(1) else {
            return 0.0;
        };
        let mut hi = p[n];
        let mut lo = 0.0;
        while n > 0 {
            let x = hi;
            n -= 1;
            let y = p[n];
            hi = x + y;
            let yr = hi - x;
            lo = y - yr;
            if lo != 0.0 {
                break;
            }
        }
        if n > 0 && ((lo < 0.0 && p[n - 1] < 0.0) || (lo > 0.0 && p[n - 1] > 0.0)) {
            let y = lo * 2.0;
            let x = hi + y;
            let yr = x - hi;
            if y == yr {
                hi = x;
            }
        }
        hi
    }
}

impl FromIterator<f64> for ExactSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = ExactSum::new();
        for x in iter {
            s.add(x);
        }
        s
    }
}

pub fn exact_sum(values: &[f64]) -> f64 {
    values.iter().copied().collect::<ExactSum>().value()
}
