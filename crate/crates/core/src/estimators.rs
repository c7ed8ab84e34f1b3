//! Maximum-likelihood and moment estimators of the Weibull parameters.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::distributions::{Sample, WeibullParams};
use crate::error::{Error, Result};

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

const INITIAL_BRACKET: (f64, f64) = (0.05, 50.0);
const OUTER_BRACKET: (f64, f64) = (1e-4, 1e4);
const MAX_ITERATIONS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimatorKind {
    #[default]
    MaximumLikelihood,
    Moments,
}

impl EstimatorKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::MaximumLikelihood => "mle",
            Self::Moments => "moments",
        }
    }
}

impl fmt::Display for EstimatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EstimatorKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "mle" | "ml" | "maximum_likelihood" => Ok(Self::MaximumLikelihood),
            "moments" | "mom" => Ok(Self::Moments),
            other => Err(format!(
                "unknown estimator `{other}` (expected mle or moments)"
            )),
        }
    }
}

/// How the shape root was found.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitDiagnostics {
    pub iterations: usize,
    /// `n * g(k)` at the returned shape, where `g` is the profile function.
    pub residual: f64,
    /// Sign-change bracket the root was searched in.
    pub bracket: (f64, f64),
}

/// Centered log-data shared by both estimators.
struct LogData {
    mean: f64,
    centered: Vec<f64>,
    max: f64,
}

fn log_data(sample: &Sample) -> Result<LogData> {
    let n = sample.len();
    if n < 2 {
        return Err(Error::SampleTooSmall {
            required: 2,
            got: n,
        });
    }
    let logs: Vec<f64> = sample.values().iter().map(|x| x.ln()).collect();
    let mean = logs.iter().sum::<f64>() / n as f64;
    let centered: Vec<f64> = logs.iter().map(|y| y - mean).collect();
    let max = centered.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = centered.iter().copied().fold(f64::INFINITY, f64::min);
    if max == min {
        return Err(Error::ConstantSample);
    }
    Ok(LogData {
        mean,
        centered,
        max,
    })
}

/// Profile function `1/k - sum z_i e^{k z_i} / sum e^{k z_i}` on centered
/// logs, with the exponentials shifted by the maximum so that no power of the
/// data can overflow. Strictly decreasing in `k`.
fn profile(data: &LogData, k: f64) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    for &z in &data.centered {
        let w = (k * (z - data.max)).exp();
        num += z * w;
        den += w;
    }
    1.0 / k - num / den
}

/// Solve the likelihood equations.
///
/// The shape solves the profile equation
/// `n/k + sum ln X_i = n sum X_i^k ln X_i / sum X_i^k`, found by a
/// bisection/secant hybrid; the scale is then `(mean X_i^k)^(1/k)`.
pub fn fit_mle(sample: &Sample) -> Result<(WeibullParams, FitDiagnostics)> {
    let data = log_data(sample)?;
    let n = sample.len() as f64;

    let (mut lo, mut hi) = INITIAL_BRACKET;
    let mut g_lo = profile(&data, lo);
    let mut g_hi = profile(&data, hi);
    while g_lo <= 0.0 && lo > OUTER_BRACKET.0 {
        hi = lo;
        g_hi = g_lo;
        lo = (lo / 10.0).max(OUTER_BRACKET.0);
        g_lo = profile(&data, lo);
    }
    while g_hi >= 0.0 && hi < OUTER_BRACKET.1 {
        lo = hi;
        g_lo = g_hi;
        hi = (hi * 10.0).min(OUTER_BRACKET.1);
        g_hi = profile(&data, hi);
    }
    if !(g_lo > 0.0 && g_hi < 0.0) {
        return Err(Error::NoConvergence {
            low: OUTER_BRACKET.0,
            high: OUTER_BRACKET.1,
        });
    }
    let bracket = (lo, hi);

    // Illinois-modified regula falsi, falling back to bisection whenever the
    // interpolated step fails to shrink the bracket by half.
    let mut k = 0.5 * (lo + hi);
    let mut g_k = f64::NAN;
    let mut side = 0i8;
    let mut width = hi - lo;
    let mut iterations = 0;
    while iterations < MAX_ITERATIONS {
        iterations += 1;
        let secant = (lo * g_hi - hi * g_lo) / (g_hi - g_lo);
        k = if secant > lo && secant < hi {
            secant
        } else {
            0.5 * (lo + hi)
        };
        g_k = profile(&data, k);
        if g_k == 0.0 {
            break;
        }
        if g_k > 0.0 {
            lo = k;
            g_lo = g_k;
            if side == 1 {
                g_hi *= 0.5;
            }
            side = 1;
        } else {
            hi = k;
            g_hi = g_k;
            if side == -1 {
                g_lo *= 0.5;
            }
            side = -1;
        }
        if hi - lo > 0.5 * width {
            let mid = 0.5 * (lo + hi);
            let g_mid = profile(&data, mid);
            if g_mid > 0.0 {
                lo = mid;
                g_lo = g_mid;
            } else {
                hi = mid;
                g_hi = g_mid;
            }
            side = 0;
        }
        width = hi - lo;
        if width <= 4.0 * f64::EPSILON * hi {
            break;
        }
    }
    if !(g_k.abs() <= 1e-10) {
        // Collapsed bracket: take whichever endpoint is closer to the root.
        for k_end in [lo, hi] {
            let g_end = profile(&data, k_end);
            if g_end.abs() < g_k.abs() {
                k = k_end;
                g_k = g_end;
            }
        }
        if !(g_k.abs() <= 1e-10) {
            return Err(Error::NoConvergence {
                low: bracket.0,
                high: bracket.1,
            });
        }
    }

    // lambda^k = mean X^k, evaluated with the same shift as the profile.
    let mean_shifted = data
        .centered
        .iter()
        .map(|&z| (k * (z - data.max)).exp())
        .sum::<f64>()
        / n;
    let lambda = (data.mean + data.max + mean_shifted.ln() / k).exp();
    let params = WeibullParams::new(lambda, k)?;
    Ok((
        params,
        FitDiagnostics {
            iterations,
            residual: n * g_k,
            bracket,
        },
    ))
}

/// Moment estimators based on the log data: `k = (pi / sqrt 6) / S` with `S^2`
/// the unbiased variance of `ln X`, and `lambda = exp(mean ln X + gamma / k)`.
pub fn fit_moments(sample: &Sample) -> Result<WeibullParams> {
    let data = log_data(sample)?;
    let n = sample.len() as f64;
    let var = data.centered.iter().map(|z| z * z).sum::<f64>() / (n - 1.0);
    if !(var > 0.0) {
        return Err(Error::ConstantSample);
    }
    let k = std::f64::consts::PI / 6f64.sqrt() / var.sqrt();
    let lambda = (data.mean + EULER_GAMMA / k).exp();
    WeibullParams::new(lambda, k)
}

/// Fit with the chosen estimator.
pub fn fit(sample: &Sample, kind: EstimatorKind) -> Result<WeibullParams> {
    match kind {
        EstimatorKind::MaximumLikelihood => fit_mle(sample).map(|(p, _)| p),
        EstimatorKind::Moments => fit_moments(sample),
    }
}
