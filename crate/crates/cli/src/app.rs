//! Argument parsing and subcommand execution.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::json;
use weibull_gof::power::select;
use weibull_gof::{
    bootstrap, datasets, fit, run_table_with_progress, run_test, run_tests, CellOutcome,
    EstimatorKind, StudyConfig, TestConfig, TestSpec, WeibullParams, WeightFamily, WeightSpec,
};

use crate::ingest::ingest;
use crate::report::{render_text, JsonReport};

/// Exit code when the test does not reject, or a command succeeds.
pub const EXIT_OK: i32 = 0;
/// Exit code when the Weibull hypothesis is rejected.
pub const EXIT_REJECT: i32 = 1;
/// Exit code for usage, input and computation errors.
pub const EXIT_ERROR: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "weibull-gof",
    version,
    about = "Laplace-transform goodness-of-fit tests for the Weibull family"
)]
pub struct Cli {
    /// Print machine-readable JSON instead of text.
    #[arg(long, global = true)]
    pub json: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Test whether a sample comes from some Weibull law.
    Test(TestArgs),
    /// Monte Carlo rejection rates for the catalog of alternatives.
    Power(PowerArgs),
    /// Bootstrap critical values for a fitted or given Weibull law.
    CriticalValues(CriticalArgs),
    /// Test the four carbon fiber datasets.
    Fibers(FibersArgs),
}

#[derive(Debug, Clone, Args)]
pub struct StatisticArgs {
    /// Weight family: exp (e^{-at}) or gauss (e^{-at^2}).
    #[arg(long, default_value = "exp")]
    pub weight: WeightFamily,
    /// Tuning parameter of the weight.
    #[arg(long, default_value_t = 5.0)]
    pub a: f64,
    /// Parameter estimator: mle or moments.
    #[arg(long, default_value = "mle")]
    pub estimator: EstimatorKind,
    /// Random seed of the bootstrap.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

impl StatisticArgs {
    fn weight(&self) -> Result<WeightSpec> {
        Ok(WeightSpec::new(self.weight, self.a)?)
    }
}

#[derive(Debug, Args)]
pub struct TestArgs {
    /// File of positive decimals, or a builtin dataset (fibers-1mm, fibers-10mm, fibers-20mm, fibers-50mm).
    pub data: String,
    #[command(flatten)]
    pub statistic: StatisticArgs,
    /// Number of bootstrap samples.
    #[arg(long, default_value_t = 2000)]
    pub b: usize,
    /// Significance level.
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
}

#[derive(Debug, Args)]
pub struct PowerArgs {
    /// Comma-separated catalog labels or groups (all, weibull-null, gamma,
    /// lognormal, inverse-gamma, gen-gamma, add-weibull, pareto, inverse-gaussian).
    /// Commas inside parentheses belong to the label.
    #[arg(long, default_value = "all", value_parser = parse_alternatives)]
    pub alts: AlternativeList,
    /// Comma-separated sample sizes.
    #[arg(long, default_value = "20,50", value_delimiter = ',')]
    pub n: Vec<usize>,
    /// Large-scale settings: 5000 replications with b = 500.
    #[arg(long, conflicts_with = "quick")]
    pub full: bool,
    /// Only the recommended statistic T1_5, at desk scale.
    #[arg(long)]
    pub quick: bool,
    /// Override the number of replications.
    #[arg(long)]
    pub reps: Option<usize>,
    /// Override the number of bootstrap samples.
    #[arg(long)]
    pub b: Option<usize>,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    #[arg(long, default_value = "mle")]
    pub estimator: EstimatorKind,
    /// Master seed; every cell derives its own stream from it.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Directory receiving power_table.csv and power_table.txt.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlternativeList(pub Vec<String>);

/// Split on commas outside parentheses: `gamma,LN(0,0.5)` is two entries.
fn parse_alternatives(raw: &str) -> std::result::Result<AlternativeList, String> {
    let mut items = Vec::new();
    let mut depth = 0i32;
    let mut current = String::new();
    for c in raw.chars() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            _ => {}
        }
        if depth < 0 {
            return Err(format!("unbalanced parentheses in `{raw}`"));
        }
        if c == ',' && depth == 0 {
            items.push(std::mem::take(&mut current));
        } else {
            current.push(c);
        }
    }
    if depth != 0 {
        return Err(format!("unbalanced parentheses in `{raw}`"));
    }
    items.push(current);
    let items: Vec<String> = items.into_iter().map(|s| s.trim().to_string()).collect();
    if items.iter().any(String::is_empty) {
        return Err(format!("empty entry in `{raw}`"));
    }
    Ok(AlternativeList(items))
}

#[derive(Debug, Args)]
pub struct CriticalArgs {
    /// Fit the null law to this file or builtin dataset instead of giving it.
    pub data: Option<String>,
    /// Sample size (required without data).
    #[arg(long, required_unless_present = "data")]
    pub n: Option<usize>,
    /// Weibull scale of the null law.
    #[arg(long, default_value_t = 1.0, conflicts_with = "data")]
    pub lambda: f64,
    /// Weibull shape of the null law (required without data).
    #[arg(long, required_unless_present = "data", conflicts_with = "data")]
    pub k: Option<f64>,
    #[command(flatten)]
    pub statistic: StatisticArgs,
    #[arg(long, default_value_t = 2000)]
    pub b: usize,
    /// Comma-separated levels.
    #[arg(long, default_value = "0.1,0.05,0.01", value_delimiter = ',')]
    pub alpha: Vec<f64>,
}

#[derive(Debug, Args)]
pub struct FibersArgs {
    /// Tuning parameter used with both weight families.
    #[arg(long, default_value_t = 5.0)]
    pub a: f64,
    #[arg(long, default_value = "mle")]
    pub estimator: EstimatorKind,
    #[arg(long, default_value_t = 2000)]
    pub b: usize,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

/// Parse `args` (including the program name), run, and return the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let wants_json = args.iter().any(|a| a == "--json");
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            if !e.use_stderr() {
                // --help and --version
                let _ = e.print();
                return EXIT_OK;
            }
            if wants_json {
                let rendered = e.render().to_string();
                let first = rendered.lines().next().unwrap_or_default();
                let message = first.strip_prefix("error: ").unwrap_or(first);
                print_json(&json!({ "error": message }));
            } else {
                let _ = e.print();
            }
            return EXIT_ERROR;
        }
    };
    let json = cli.json;
    match configure_threads().and_then(|()| execute(cli)) {
        Ok(code) => code,
        Err(e) => {
            let message = format!("{e:#}");
            if json {
                print_json(&json!({ "error": message }));
            } else {
                eprintln!("error: {message}");
            }
            EXIT_ERROR
        }
    }
}

/// Honour `GOF_THREADS` (0 or unset means one worker per core).
fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var("GOF_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .with_context(|| format!("GOF_THREADS must be a nonnegative integer, got `{raw}`"))?;
    if threads > 0 {
        // a second call in the same process finds the pool already built
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
    Ok(())
}

fn print_json(value: &serde_json::Value) {
    println!(
        "{}",
        serde_json::to_string_pretty(value).expect("JSON values serialize")
    );
}

pub fn execute(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Test(args) => cmd_test(args, cli.json),
        Command::Power(args) => cmd_power(args, cli.json),
        Command::CriticalValues(args) => cmd_critical_values(args, cli.json),
        Command::Fibers(args) => cmd_fibers(args, cli.json),
    }
}

fn cmd_test(args: TestArgs, json: bool) -> Result<i32> {
    let data = ingest(&args.data)?;
    if data.parse_report.skipped_values > 0 {
        eprintln!(
            "warning: dropped {} non-positive values from {}",
            data.parse_report.skipped_values, data.source
        );
    }
    let config = TestConfig {
        weight: args.statistic.weight()?,
        estimator: args.statistic.estimator,
        b: args.b,
        alpha: args.alpha,
        seed: args.statistic.seed,
    };
    let report = run_test(&data.values, config)?;
    if json {
        print_json(&serde_json::to_value(JsonReport::from(&report))?);
    } else {
        print!("{}", render_text(&data.source.to_string(), &report));
    }
    Ok(if report.reject { EXIT_REJECT } else { EXIT_OK })
}

fn cmd_power(args: PowerArgs, json: bool) -> Result<i32> {
    let names: Vec<&str> = args.alts.0.iter().map(String::as_str).collect();
    let alternatives = select(&names).map_err(anyhow::Error::msg)?;
    let mut config = if args.full {
        StudyConfig::full(alternatives, args.n.clone())
    } else {
        StudyConfig::desk(alternatives, args.n.clone())
    };
    if args.quick {
        config.tests = vec![TestSpec::new(WeightSpec::exponential(5.0)?)];
    }
    if let Some(reps) = args.reps {
        config.replications = reps;
    }
    if let Some(b) = args.b {
        config.bootstrap_b = b;
    }
    config.alpha = args.alpha;
    config.estimator = args.estimator;
    config.master_seed = args.seed;
    config.validate()?;

    let total = config.alternatives.len() * config.sample_sizes.len() * config.tests.len();
    let mut done = 0;
    let table = run_table_with_progress(&config, |row| {
        done += 1;
        let value = row
            .percent()
            .map_or_else(|| row.outcome.status(), |p| format!("{p:.1}%"));
        eprintln!(
            "[{done}/{total}] {} n={} {}: {value}",
            row.alternative, row.n, row.test
        );
    })?;

    std::fs::create_dir_all(&args.out)
        .with_context(|| format!("cannot create {}", args.out.display()))?;
    let csv_path = args.out.join("power_table.csv");
    let txt_path = args.out.join("power_table.txt");
    let text = table.to_text();
    write_file(&csv_path, &table.to_csv())?;
    write_file(&txt_path, &text)?;
    if json {
        print_json(&serde_json::to_value(&table)?);
    } else {
        print!("{text}");
        println!("wrote {} and {}", csv_path.display(), txt_path.display());
    }
    let failed = table
        .rows
        .iter()
        .any(|r| matches!(r.outcome, CellOutcome::Failed { .. }));
    if failed && table.succeeded() == 0 {
        bail!("no cell of the table could be computed");
    }
    Ok(EXIT_OK)
}

fn write_file(path: &std::path::Path, contents: &str) -> Result<()> {
    let mut f =
        std::fs::File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
    f.write_all(contents.as_bytes())
        .with_context(|| format!("cannot write {}", path.display()))
}

fn cmd_critical_values(args: CriticalArgs, json: bool) -> Result<i32> {
    let weight = args.statistic.weight()?;
    let estimator = args.statistic.estimator;
    let (params, n, source) = match &args.data {
        Some(path) => {
            let data = ingest(path)?;
            (
                fit(&data.values, estimator)?,
                data.values.len(),
                data.source.to_string(),
            )
        }
        None => {
            let n = args.n.expect("clap enforces --n");
            let k = args.k.expect("clap enforces --k");
            (WeibullParams::new(args.lambda, k)?, n, "given".to_string())
        }
    };
    if let Some(n_flag) = args.n.filter(|&m| m != n) {
        bail!("--n {n_flag} disagrees with the {n} observations of the data");
    }
    for &alpha in &args.alpha {
        TestConfig {
            alpha,
            b: args.b,
            ..TestConfig::new(weight)
        }
        .validate()?;
    }
    let (mut columns, redraws) = bootstrap::replicate_statistics(
        params,
        n,
        estimator,
        &[weight],
        args.b,
        args.statistic.seed,
    )?;
    let mut replicates = columns.remove(0);
    replicates.sort_by(f64::total_cmp);
    let values = args
        .alpha
        .iter()
        .map(|&alpha| Ok((alpha, bootstrap::critical_value(&replicates, alpha)?)))
        .collect::<Result<Vec<_>>>()?;

    if json {
        print_json(&json!({
            "weight_family": weight.family().as_str(),
            "tuning_a": weight.a(),
            "estimator": estimator.as_str(),
            "n": n,
            "b": args.b,
            "lambda": params.lambda(),
            "k": params.k(),
            "seed": args.statistic.seed,
            "redraws": redraws,
            "critical_values": values
                .iter()
                .map(|(alpha, c)| json!({ "alpha": alpha, "value": c }))
                .collect::<Vec<_>>(),
        }));
    } else {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "Bootstrap critical values of {weight} for n = {n} under {params} ({source})"
        );
        let _ = writeln!(
            out,
            "estimator {}, b = {}, seed = {}",
            estimator.as_str(),
            args.b,
            args.statistic.seed
        );
        let _ = writeln!(out, "{:>8}  {:>14}", "alpha", "critical value");
        for (alpha, c) in &values {
            let _ = writeln!(out, "{alpha:>8}  {c:>14.6e}");
        }
        print!("{out}");
    }
    Ok(EXIT_OK)
}

fn cmd_fibers(args: FibersArgs, json: bool) -> Result<i32> {
    let weights = [
        WeightSpec::exponential(args.a)?,
        WeightSpec::gaussian(args.a)?,
    ];
    let config = TestConfig {
        weight: weights[0],
        estimator: args.estimator,
        b: args.b,
        alpha: args.alpha,
        seed: args.seed,
    };
    let mut results = Vec::new();
    for name in datasets::BUILTIN_NAMES {
        let sample = datasets::builtin(name).expect("builtin names resolve");
        results.push((name, run_tests(&sample, config, &weights)?));
    }

    if json {
        let datasets: Vec<_> = results
            .iter()
            .map(|(name, reports)| {
                json!({
                    "dataset": name,
                    "reports": reports.iter().map(JsonReport::from).collect::<Vec<_>>(),
                })
            })
            .collect();
        print_json(&json!({ "datasets": datasets }));
    } else {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "p-values of the carbon fiber failure stresses (b = {}, seed = {}, {})",
            args.b,
            args.seed,
            args.estimator.as_str()
        );
        let _ = write!(out, "{:<12} {:>4}", "dataset", "n");
        for w in &weights {
            let _ = write!(out, " {:>9}", w.label());
        }
        out.push('\n');
        for (name, reports) in &results {
            let _ = write!(out, "{name:<12} {:>4}", reports[0].statistic.n);
            for r in reports {
                let mark = if r.reject { "*" } else { " " };
                let _ = write!(out, " {:>8.3}{mark}", r.p_value);
            }
            out.push('\n');
        }
        let _ = writeln!(out, "* rejected at alpha = {}", args.alpha);
        print!("{out}");
    }
    Ok(EXIT_OK)
}
