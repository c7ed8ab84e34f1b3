//! Parametric bootstrap calibration of the statistic.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distributions::{AlternativeSpec, Sample, WeibullParams};
use crate::error::{Error, Result};
use crate::estimators::{fit, EstimatorKind};
use crate::rng::RngStream;
use crate::statistic::{
    closed_form_raw, statistic_closed_form, StatisticValue, WeightSpec, ZERO_CLAMP,
};

/// Attempts per replicate before a run is abandoned.
const MAX_REDRAWS: u64 = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestConfig {
    pub weight: WeightSpec,
    pub estimator: EstimatorKind,
    pub b: usize,
    pub alpha: f64,
    pub seed: u64,
}

impl TestConfig {
    /// Exponential weight with `a = 5`, maximum likelihood, `b = 2000`,
    /// `alpha = 0.05`, seed 0.
    pub fn new(weight: WeightSpec) -> Self {
        Self {
            weight,
            estimator: EstimatorKind::MaximumLikelihood,
            b: 2000,
            alpha: 0.05,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.b == 0 {
            return Err(Error::InvalidParameter {
                name: "b",
                value: 0.0,
                reason: "need at least one bootstrap replicate",
            });
        }
        check_alpha(self.alpha)
    }
}

impl Default for TestConfig {
    fn default() -> Self {
        Self::new(WeightSpec::exponential(5.0).expect("5 is a valid tuning parameter"))
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name: "alpha",
            value: alpha,
            reason: "level must lie strictly between 0 and 1",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReplicateSummary {
    pub min: f64,
    pub median: f64,
    pub max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestReport {
    pub statistic: StatisticValue,
    pub critical_value: f64,
    pub p_value: f64,
    pub reject: bool,
    pub fitted: WeibullParams,
    pub config: TestConfig,
    pub bootstrap_replicates_summary: ReplicateSummary,
    /// Replicates drawn again because the re-fit failed.
    pub redraws: u64,
    /// Replicates exactly equal to the observed statistic.
    pub ties: usize,
}

/// Index (1-based) of the order statistic used as critical value:
/// `b(1-alpha)` if that is an integer, otherwise `floor(b(1-alpha)) + 1`.
pub fn critical_index(b: usize, alpha: f64) -> usize {
    let target = b as f64 * (1.0 - alpha);
    let nearest = target.round();
    let index = if (target - nearest).abs() <= 1e-9 * (b as f64).max(1.0) {
        nearest as usize
    } else {
        target.floor() as usize + 1
    };
    index.clamp(1, b)
}

/// Critical value from ascending replicate statistics.
pub fn critical_value(sorted_replicates: &[f64], alpha: f64) -> Result<f64> {
    if sorted_replicates.is_empty() {
        return Err(Error::EmptyReplicates);
    }
    check_alpha(alpha)?;
    Ok(sorted_replicates[critical_index(sorted_replicates.len(), alpha) - 1])
}

/// Bootstrap statistics for every weight in `weights`, computed on the same
/// `b` replicate samples from `W(fitted)`. Replicate `i` draws from
/// `RngStream(seed, i)`; if its re-fit fails it is drawn again from child
/// streams of that stream. Returns unsorted statistics per weight and the
/// number of redraws.
pub fn replicate_statistics(
    fitted: WeibullParams,
    n: usize,
    estimator: EstimatorKind,
    weights: &[WeightSpec],
    b: usize,
    seed: u64,
) -> Result<(Vec<Vec<f64>>, u64)> {
    let law = AlternativeSpec::Weibull(fitted);
    let per_replicate: Vec<(Vec<f64>, u64)> = (0..b as u64)
        .into_par_iter()
        .map(|i| {
            let base = RngStream::new(seed, i);
            let mut last_error = None;
            for attempt in 0..MAX_REDRAWS {
                let stream = if attempt == 0 {
                    base
                } else {
                    base.substream(attempt)
                };
                let refit = law
                    .sample(n, stream)
                    .and_then(|s| Ok((fit(&s, estimator)?, s)));
                match refit {
                    Ok((params, s)) => {
                        let values = weights
                            .iter()
                            .map(|&w| closed_form_raw(s.values(), params, w))
                            .collect();
                        return Ok((values, attempt));
                    }
                    Err(e) => last_error = Some(e),
                }
            }
            Err(last_error.expect("at least one attempt was made"))
        })
        .collect::<Result<_>>()?;
    let mut columns = vec![Vec::with_capacity(b); weights.len()];
    let mut redraws = 0;
    for (values, extra) in per_replicate {
        redraws += extra;
        for (column, v) in columns.iter_mut().zip(values) {
            column.push(clamp(v));
        }
    }
    Ok((columns, redraws))
}

fn clamp(v: f64) -> f64 {
    if v.abs() <= ZERO_CLAMP {
        0.0
    } else {
        v
    }
}

/// Run the bootstrap test.
pub fn run_test(sample: &Sample, config: TestConfig) -> Result<TestReport> {
    let mut reports = run_tests(sample, config, &[config.weight])?;
    Ok(reports.remove(0))
}

/// Run the test for several weights at once. All weights share one fit and
/// one set of bootstrap samples, so each report equals the one
/// [`run_test`] gives for that weight; `config.weight` is ignored.
pub fn run_tests(
    sample: &Sample,
    config: TestConfig,
    weights: &[WeightSpec],
) -> Result<Vec<TestReport>> {
    config.validate()?;
    let fitted = fit(sample, config.estimator)?;
    let (columns, redraws) = replicate_statistics(
        fitted,
        sample.len(),
        config.estimator,
        weights,
        config.b,
        config.seed,
    )?;
    let mut reports = Vec::with_capacity(weights.len());
    for (&weight, mut replicates) in weights.iter().zip(columns) {
        let statistic = statistic_closed_form(sample, fitted, weight);
        replicates.sort_by(f64::total_cmp);
        let critical = critical_value(&replicates, config.alpha)?;
        let observed = statistic.value;
        let exceed = replicates.iter().filter(|&&t| t >= observed).count();
        let ties = replicates.iter().filter(|&&t| t == observed).count();
        let b = replicates.len();
        reports.push(TestReport {
            statistic,
            critical_value: critical,
            p_value: exceed as f64 / b as f64,
            reject: observed > critical,
            fitted,
            config: TestConfig { weight, ..config },
            bootstrap_replicates_summary: ReplicateSummary {
                min: replicates[0],
                median: median_sorted(&replicates),
                max: replicates[b - 1],
            },
            redraws,
            ties,
        });
    }
    Ok(reports)
}

fn median_sorted(v: &[f64]) -> f64 {
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}
