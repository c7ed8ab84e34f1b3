//! Machine and human renderings of test results.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use weibull_gof::TestReport;

/// JSON record of one test decision. Field names are part of the interface.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JsonReport {
    pub statistic: f64,
    pub weight_family: String,
    pub tuning_a: f64,
    pub estimator: String,
    pub n: usize,
    pub b: usize,
    pub alpha: f64,
    pub critical_value: f64,
    pub p_value: f64,
    pub reject: bool,
    pub lambda_hat: f64,
    pub k_hat: f64,
    pub seed: u64,
    pub redraws: u64,
}

impl From<&TestReport> for JsonReport {
    fn from(r: &TestReport) -> Self {
        Self {
            statistic: r.statistic.value,
            weight_family: r.config.weight.family().as_str().to_string(),
            tuning_a: r.config.weight.a(),
            estimator: r.config.estimator.as_str().to_string(),
            n: r.statistic.n,
            b: r.config.b,
            alpha: r.config.alpha,
            critical_value: r.critical_value,
            p_value: r.p_value,
            reject: r.reject,
            lambda_hat: r.fitted.lambda(),
            k_hat: r.fitted.k(),
            seed: r.config.seed,
            redraws: r.redraws,
        }
    }
}

pub fn render_text(source: &str, r: &TestReport) -> String {
    let s = r.bootstrap_replicates_summary;
    let mut out = String::new();
    let _ = writeln!(out, "Weibull goodness-of-fit test");
    let _ = writeln!(
        out,
        "  data            {source} ({} observations)",
        r.statistic.n
    );
    let _ = writeln!(
        out,
        "  statistic       {} = {:.6e}",
        r.config.weight, r.statistic.value
    );
    let _ = writeln!(
        out,
        "  fitted          lambda = {:.6}, k = {:.6} ({})",
        r.fitted.lambda(),
        r.fitted.k(),
        r.config.estimator.as_str()
    );
    let _ = writeln!(
        out,
        "  bootstrap       b = {}, seed = {}, replicates min/median/max = {:.3e} / {:.3e} / {:.3e}",
        r.config.b, r.config.seed, s.min, s.median, s.max
    );
    if r.redraws > 0 || r.ties > 0 {
        let _ = writeln!(
            out,
            "  irregularities  {} redraws, {} ties",
            r.redraws, r.ties
        );
    }
    let _ = writeln!(
        out,
        "  critical value  {:.6e} (alpha = {})",
        r.critical_value, r.config.alpha
    );
    let _ = writeln!(out, "  p-value         {:.4}", r.p_value);
    let decision = if r.reject {
        "reject the Weibull hypothesis"
    } else {
        "do not reject the Weibull hypothesis"
    };
    let _ = writeln!(out, "  decision        {decision}");
    out
}
