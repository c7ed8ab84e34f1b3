//! Goodness-of-fit tests for the two-parameter Weibull family based on a
//! Laplace-transform characterization, calibrated by parametric bootstrap.
//!
//! ```
//! use weibull_gof::{run_test, AlternativeSpec, RngStream, TestConfig};
//!
//! let data = AlternativeSpec::weibull(2.0, 1.5)?.sample(40, RngStream::new(7, 0))?;
//! let report = run_test(&data, TestConfig { b: 99, ..TestConfig::default() })?;
//! assert!((0.0..=1.0).contains(&report.p_value));
//! # Ok::<(), weibull_gof::Error>(())
//! ```

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bootstrap;
pub mod datasets;
pub mod distributions;
pub mod error;
pub mod estimators;
pub mod power;
pub mod quadrature;
pub mod rng;
pub mod special;
pub mod statistic;

pub use bootstrap::{
    critical_value, replicate_statistics, run_test, run_tests, ReplicateSummary, TestConfig,
    TestReport,
};
pub use distributions::{
    alternative_pdf, sample, weibull_pdf, AlternativeSpec, Sample, WeibullParams,
};
pub use error::{Error, Result};
pub use estimators::{fit, fit_mle, fit_moments, EstimatorKind, FitDiagnostics};
pub use power::{
    catalog, estimate_rejection_rate, estimate_rejection_rates, run_table, run_table_with_progress,
    CellOutcome, NamedAlternative, PowerRow, PowerTable, RateEstimate, StudyConfig, TestSpec,
};
pub use rng::RngStream;
pub use special::{erf, erfc, erfcx};
pub use statistic::{
    characterization_gap, r_term, statistic_closed_form, statistic_quadrature, vn_at, GapEstimate,
    StatisticValue, WeightFamily, WeightSpec,
};
