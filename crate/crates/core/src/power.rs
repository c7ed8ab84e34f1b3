//! Monte Carlo estimation of rejection rates under null and alternative laws.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bootstrap::{run_tests, TestConfig};
use crate::distributions::AlternativeSpec;
use crate::error::{Error, Result};
use crate::estimators::EstimatorKind;
use crate::rng::{splitmix64, RngStream};
use crate::statistic::WeightSpec;

/// Largest tolerated fraction of replications whose test could not be run.
pub const MAX_SKIP_FRACTION: f64 = 0.001;

/// Status text for alternatives without usable parameters.
pub const UNAVAILABLE: &str = "unavailable: parameters missing from source";

/// A labelled entry of the study. `spec` is `None` for alternatives whose
/// parameters are unknown; their rows are reported as unavailable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedAlternative {
    pub label: String,
    pub spec: Option<AlternativeSpec>,
}

impl NamedAlternative {
    pub fn new(label: impl Into<String>, spec: AlternativeSpec) -> Self {
        Self {
            label: label.into(),
            spec: Some(spec),
        }
    }

    pub fn unavailable(label: impl Into<String>) -> Self {
        Self {
            label: label.into(),
            spec: None,
        }
    }

    pub fn is_null(&self) -> bool {
        matches!(self.spec, Some(AlternativeSpec::Weibull(_)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateEstimate {
    /// Fraction of completed replications that rejected.
    pub rate: f64,
    /// Binomial standard error `sqrt(rate (1 - rate) / completed)`.
    pub std_error: f64,
    pub completed: usize,
    pub skipped: usize,
}

impl RateEstimate {
    fn from_counts(rejections: usize, completed: usize, skipped: usize) -> Self {
        let p = rejections as f64 / completed as f64;
        Self {
            rate: p,
            std_error: (p * (1.0 - p) / completed as f64).sqrt(),
            completed,
            skipped,
        }
    }
}

/// Rejection rate of one test against `spec` at sample size `n`.
///
/// Replication `j` draws its data from `stream.substream(j).substream(0)`
/// and seeds its bootstrap with `stream.substream(j).substream(1)`.
pub fn estimate_rejection_rate(
    spec: &AlternativeSpec,
    n: usize,
    test: TestConfig,
    replications: usize,
    stream: RngStream,
) -> Result<RateEstimate> {
    let mut rates = estimate_rejection_rates(spec, n, test, &[test.weight], replications, stream)?;
    Ok(rates.remove(0))
}

/// Rejection rates of several tests that share data and bootstrap samples.
/// The result for each weight is identical to a separate
/// [`estimate_rejection_rate`] call with the same stream.
pub fn estimate_rejection_rates(
    spec: &AlternativeSpec,
    n: usize,
    template: TestConfig,
    weights: &[WeightSpec],
    replications: usize,
    stream: RngStream,
) -> Result<Vec<RateEstimate>> {
    if replications == 0 {
        return Err(Error::InvalidParameter {
            name: "replications",
            value: 0.0,
            reason: "need at least one replication",
        });
    }
    spec.validate()?;
    template.validate()?;
    let outcomes: Vec<Result<Vec<bool>>> = (0..replications as u64)
        .into_par_iter()
        .map(|j| {
            let rep = stream.substream(j);
            let data = spec.sample(n, rep.substream(0))?;
            let config = TestConfig {
                seed: rep.substream(1).derive_seed(),
                ..template
            };
            Ok(run_tests(&data, config, weights)?
                .iter()
                .map(|r| r.reject)
                .collect())
        })
        .collect();

    let mut rejections = vec![0usize; weights.len()];
    let mut skipped = 0;
    let mut last_error = None;
    for outcome in outcomes {
        match outcome {
            Ok(flags) => {
                for (count, flag) in rejections.iter_mut().zip(flags) {
                    *count += usize::from(flag);
                }
            }
            Err(e) => {
                skipped += 1;
                last_error = Some(e);
            }
        }
    }
    if skipped as f64 > MAX_SKIP_FRACTION * replications as f64 {
        return Err(Error::TooManySkips {
            skipped,
            total: replications,
            last_error: last_error.map(|e| e.to_string()).unwrap_or_default(),
        });
    }
    let completed = replications - skipped;
    Ok(rejections
        .into_iter()
        .map(|r| RateEstimate::from_counts(r, completed, skipped))
        .collect())
}

/// A test column of the study.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestSpec {
    pub weight: WeightSpec,
    pub label: String,
}

impl TestSpec {
    pub fn new(weight: WeightSpec) -> Self {
        Self {
            label: weight.label(),
            weight,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyConfig {
    pub alternatives: Vec<NamedAlternative>,
    pub sample_sizes: Vec<usize>,
    pub tests: Vec<TestSpec>,
    pub replications: usize,
    pub bootstrap_b: usize,
    pub alpha: f64,
    pub estimator: EstimatorKind,
    pub master_seed: u64,
}

impl StudyConfig {
    /// Desk-scale defaults: 1000 replications with 200 bootstrap samples.
    pub fn desk(alternatives: Vec<NamedAlternative>, sample_sizes: Vec<usize>) -> Self {
        Self {
            alternatives,
            sample_sizes,
            tests: standard_tests(),
            replications: 1000,
            bootstrap_b: 200,
            alpha: 0.05,
            estimator: EstimatorKind::MaximumLikelihood,
            master_seed: 0,
        }
    }

    /// Large-scale settings: 5000 replications, 500 bootstrap samples.
    pub fn full(alternatives: Vec<NamedAlternative>, sample_sizes: Vec<usize>) -> Self {
        Self {
            replications: 5000,
            bootstrap_b: 500,
            ..Self::desk(alternatives, sample_sizes)
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.replications == 0 {
            return Err(Error::InvalidParameter {
                name: "replications",
                value: 0.0,
                reason: "need at least one replication",
            });
        }
        if let Some(&n) = self.sample_sizes.iter().find(|&&n| n < 2) {
            return Err(Error::SampleTooSmall {
                required: 2,
                got: n,
            });
        }
        self.template().validate()?;
        for alt in &self.alternatives {
            if let Some(spec) = &alt.spec {
                spec.validate()?;
            }
        }
        Ok(())
    }

    fn template(&self) -> TestConfig {
        let weight = self
            .tests
            .first()
            .map(|t| t.weight)
            .unwrap_or_else(|| WeightSpec::exponential(5.0).expect("valid"));
        TestConfig {
            weight,
            estimator: self.estimator,
            b: self.bootstrap_b,
            alpha: self.alpha,
            seed: 0,
        }
    }
}

/// Stream of the cell `(label, n)`. It depends on the label rather than the
/// position, so adding or reordering rows leaves other cells unchanged.
pub fn cell_stream(master_seed: u64, label: &str, n: usize) -> RngStream {
    let mut h = 0xcbf2_9ce4_8422_2325u64;
    for byte in label.bytes() {
        h = (h ^ u64::from(byte)).wrapping_mul(0x0100_0000_01b3);
    }
    RngStream::new(master_seed, splitmix64(h ^ splitmix64(n as u64)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum CellOutcome {
    Ok {
        rate: f64,
        std_error: f64,
        skipped: usize,
    },
    Unavailable {
        reason: String,
    },
    Failed {
        reason: String,
    },
}

impl CellOutcome {
    pub fn status(&self) -> String {
        match self {
            Self::Ok { .. } => "ok".to_string(),
            Self::Unavailable { reason } => reason.clone(),
            Self::Failed { reason } => format!("failed: {reason}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerRow {
    pub alternative: String,
    pub n: usize,
    pub test: String,
    pub outcome: CellOutcome,
}

impl PowerRow {
    /// Rejection percentage, if the cell was computed.
    pub fn percent(&self) -> Option<f64> {
        match self.outcome {
            CellOutcome::Ok { rate, .. } => Some(100.0 * rate),
            _ => None,
        }
    }

    pub fn se_percent(&self) -> Option<f64> {
        match self.outcome {
            CellOutcome::Ok { std_error, .. } => Some(100.0 * std_error),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerTable {
    pub rows: Vec<PowerRow>,
    pub metadata: StudyConfig,
}

impl PowerTable {
    pub fn get(&self, alternative: &str, n: usize, test: &str) -> Option<&PowerRow> {
        self.rows
            .iter()
            .find(|r| r.alternative == alternative && r.n == n && r.test == test)
    }

    /// Number of computed cells.
    pub fn succeeded(&self) -> usize {
        self.rows.iter().filter(|r| r.percent().is_some()).count()
    }

    /// One line per cell: `alternative,n,test,rate,se,status` with the rate
    /// and its standard error in percent.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("alternative,n,test,rate,se,status\n");
        for row in &self.rows {
            let (rate, se) = match (row.percent(), row.se_percent()) {
                (Some(p), Some(s)) => (format!("{p:.1}"), format!("{s:.2}")),
                _ => (String::new(), String::new()),
            };
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                csv_field(&row.alternative),
                row.n,
                csv_field(&row.test),
                rate,
                se,
                csv_field(&row.outcome.status())
            );
        }
        out
    }

    /// Aligned text with one block per sample size, alternatives as rows and
    /// tests as columns, percentages rounded to integers.
    pub fn to_text(&self) -> String {
        let tests: Vec<&str> = self
            .metadata
            .tests
            .iter()
            .map(|t| t.label.as_str())
            .collect();
        let labels: Vec<&str> = self
            .metadata
            .alternatives
            .iter()
            .map(|a| a.label.as_str())
            .collect();
        let width = labels.iter().map(|l| l.len()).max().unwrap_or(4).max(4);
        let mut out = String::new();
        for &n in &self.metadata.sample_sizes {
            let _ = writeln!(
                out,
                "Percentages of rejection (n = {n}, {} replications, b = {}, alpha = {})",
                self.metadata.replications, self.metadata.bootstrap_b, self.metadata.alpha
            );
            let _ = write!(out, "{:<width$}", "");
            for t in &tests {
                let _ = write!(out, " {t:>7}");
            }
            out.push('\n');
            for label in &labels {
                let _ = write!(out, "{label:<width$}");
                for t in &tests {
                    let cell = match self.get(label, n, t) {
                        Some(row) => match row.percent() {
                            Some(p) => format!("{p:.0}"),
                            None if matches!(row.outcome, CellOutcome::Unavailable { .. }) => {
                                "n/a".into()
                            }
                            None => "fail".into(),
                        },
                        None => "-".into(),
                    };
                    let _ = write!(out, " {cell:>7}");
                }
                out.push('\n');
            }
            out.push('\n');
        }
        out
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Run the full cross-product of alternatives, sample sizes and tests.
pub fn run_table(config: &StudyConfig) -> Result<PowerTable> {
    run_table_with_progress(config, |_| {})
}

/// As [`run_table`], calling `progress` after each finished row.
/// Failures of individual cells are recorded in the table and do not stop
/// the remaining cells.
pub fn run_table_with_progress<F: FnMut(&PowerRow)>(
    config: &StudyConfig,
    mut progress: F,
) -> Result<PowerTable> {
    config.validate()?;
    let weights: Vec<WeightSpec> = config.tests.iter().map(|t| t.weight).collect();
    let template = config.template();
    let mut rows = Vec::new();
    for alt in &config.alternatives {
        for &n in &config.sample_sizes {
            let outcomes: Vec<CellOutcome> = match &alt.spec {
                None => vec![
                    CellOutcome::Unavailable {
                        reason: UNAVAILABLE.to_string()
                    };
                    weights.len()
                ],
                Some(spec) => {
                    let stream = cell_stream(config.master_seed, &alt.label, n);
                    match estimate_rejection_rates(
                        spec,
                        n,
                        template,
                        &weights,
                        config.replications,
                        stream,
                    ) {
                        Ok(rates) => rates
                            .into_iter()
                            .map(|r| CellOutcome::Ok {
                                rate: r.rate,
                                std_error: r.std_error,
                                skipped: r.skipped,
                            })
                            .collect(),
                        Err(e) => vec![
                            CellOutcome::Failed {
                                reason: e.to_string()
                            };
                            weights.len()
                        ],
                    }
                }
            };
            for (test, outcome) in config.tests.iter().zip(outcomes) {
                let row = PowerRow {
                    alternative: alt.label.clone(),
                    n,
                    test: test.label.clone(),
                    outcome,
                };
                progress(&row);
                rows.push(row);
            }
        }
    }
    Ok(PowerTable {
        rows,
        metadata: config.clone(),
    })
}

/// `T1` and `T2` with `a` in {1, 2, 5}.
pub fn standard_tests() -> Vec<TestSpec> {
    let mut tests = Vec::new();
    for a in [1.0, 2.0, 5.0] {
        tests.push(TestSpec::new(WeightSpec::exponential(a).expect("valid")));
    }
    for a in [1.0, 2.0, 5.0] {
        tests.push(TestSpec::new(WeightSpec::gaussian(a).expect("valid")));
    }
    tests
}

/// The standard catalog of null and alternative laws. The second
/// additive Weibull law has no known parameters and is kept as a placeholder.
pub fn catalog() -> Vec<NamedAlternative> {
    let ok = |label: &str, spec: Result<AlternativeSpec>| {
        NamedAlternative::new(label, spec.expect("valid catalog parameters"))
    };
    vec![
        ok("W(1,0.9)", AlternativeSpec::weibull(1.0, 0.9)),
        ok("W(1,1.5)", AlternativeSpec::weibull(1.0, 1.5)),
        ok("W(1,3)", AlternativeSpec::weibull(1.0, 3.0)),
        ok("W(1/4,1)", AlternativeSpec::weibull(0.25, 1.0)),
        ok("Gamma(8,1)", AlternativeSpec::gamma(8.0, 1.0)),
        ok("Gamma(2,1)", AlternativeSpec::gamma(2.0, 1.0)),
        ok("Gamma(0.2,1)", AlternativeSpec::gamma(0.2, 1.0)),
        ok("LN(0,0.5)", AlternativeSpec::log_normal(0.0, 0.5)),
        ok("LN(0,0.8)", AlternativeSpec::log_normal(0.0, 0.8)),
        ok("LN(0,1.2)", AlternativeSpec::log_normal(0.0, 1.2)),
        ok("iGamma(3,1)", AlternativeSpec::inverse_gamma(3.0, 1.0)),
        ok("iGamma(1.5,1)", AlternativeSpec::inverse_gamma(1.5, 1.0)),
        ok("GG1", AlternativeSpec::generalized_gamma(0.6, 0.9, 1.4)),
        ok("GG2", AlternativeSpec::generalized_gamma(10.0, 0.0001, 0.2)),
        ok(
            "AddW1",
            AlternativeSpec::additive_weibull(7.0, 5.0, 0.9, 0.9),
        ),
        NamedAlternative::unavailable("AddW2"),
        ok("P(0.5,2)", AlternativeSpec::pareto(0.5, 2.0)),
        ok("P(1.5,2.5)", AlternativeSpec::pareto(1.5, 2.5)),
        ok("IG(1,1)", AlternativeSpec::inverse_gaussian(1.0, 1.0)),
        ok("IG(1,2)", AlternativeSpec::inverse_gaussian(1.0, 2.0)),
    ]
}

/// The four Weibull null laws of the catalog.
pub fn weibull_nulls() -> Vec<NamedAlternative> {
    catalog()
        .into_iter()
        .filter(NamedAlternative::is_null)
        .collect()
}

/// Look up catalog entries by label (case-insensitive) or by group name:
/// `all`, `weibull-null`, `gamma`, `lognormal`, `inverse-gamma`,
/// `gen-gamma`, `add-weibull`, `pareto`, `inverse-gaussian`.
pub fn select(names: &[&str]) -> std::result::Result<Vec<NamedAlternative>, String> {
    let all = catalog();
    let mut chosen: Vec<NamedAlternative> = Vec::new();
    for name in names {
        let key = name.trim().to_ascii_lowercase();
        let group: Vec<NamedAlternative> = match key.as_str() {
            "all" => all.clone(),
            "weibull-null" | "null" | "weibull" => weibull_nulls(),
            other => {
                let prefix = match other {
                    "gamma" => Some("gamma("),
                    "lognormal" => Some("ln("),
                    "inverse-gamma" => Some("igamma("),
                    "gen-gamma" => Some("gg"),
                    "add-weibull" => Some("addw"),
                    "pareto" => Some("p("),
                    "inverse-gaussian" => Some("ig("),
                    _ => None,
                };
                match prefix {
                    Some(p) => all
                        .iter()
                        .filter(|a| a.label.to_ascii_lowercase().starts_with(p))
                        .cloned()
                        .collect(),
                    None => all
                        .iter()
                        .filter(|a| a.label.to_ascii_lowercase() == other)
                        .cloned()
                        .collect(),
                }
            }
        };
        if group.is_empty() {
            return Err(format!("unknown alternative `{name}`"));
        }
        for alt in group {
            if !chosen.iter().any(|c| c.label == alt.label) {
                chosen.push(alt);
            }
        }
    }
    Ok(chosen)
}
