use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use sha2::{Digest, Sha256};
use weibull_gof::{datasets, AlternativeSpec, RngStream};
use weibull_gof_cli::{ingest, write_sample};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_weibull-gof"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("{e}: {}", String::from_utf8_lossy(&out.stdout));
    })
}

const REPORT_FIELDS: [&str; 14] = [
    "statistic",
    "weight_family",
    "tuning_a",
    "estimator",
    "n",
    "b",
    "alpha",
    "critical_value",
    "p_value",
    "reject",
    "lambda_hat",
    "k_hat",
    "seed",
    "redraws",
];

fn assert_report_schema(v: &Value) {
    let obj = v.as_object().expect("report is an object");
    let mut keys: Vec<&str> = obj.keys().map(String::as_str).collect();
    keys.sort_unstable();
    let mut expected = REPORT_FIELDS.to_vec();
    expected.sort_unstable();
    assert_eq!(keys, expected);
    for key in [
        "statistic",
        "tuning_a",
        "alpha",
        "critical_value",
        "p_value",
        "lambda_hat",
        "k_hat",
    ] {
        assert!(v[key].is_f64(), "{key}");
    }
    for key in ["n", "b", "seed", "redraws"] {
        assert!(v[key].is_u64(), "{key}");
    }
    assert!(v["reject"].is_boolean());
    let p = v["p_value"].as_f64().unwrap();
    assert!((0.0..=1.0).contains(&p));
    assert_eq!(
        v["reject"].as_bool().unwrap(),
        v["statistic"].as_f64().unwrap() > v["critical_value"].as_f64().unwrap()
    );
}

fn assert_error_object(out: &Output) {
    assert_eq!(out.status.code(), Some(2));
    let v = json_of(out);
    let obj = v.as_object().unwrap();
    assert_eq!(obj.len(), 1);
    assert!(!v["error"].as_str().unwrap().is_empty());
}

#[test]
fn ten_millimetre_fibers_are_rejected() {
    let out = run(&["test", "fibers-10mm", "--json"]);
    assert_eq!(out.status.code(), Some(1));
    let v = json_of(&out);
    assert_report_schema(&v);
    assert_eq!(v["n"], 64);
    assert_eq!(v["b"], 2000);
    assert_eq!(v["weight_family"], "exp");
    assert_eq!(v["tuning_a"], 5.0);
    assert_eq!(v["estimator"], "mle");
    assert!((v["p_value"].as_f64().unwrap() - 0.013).abs() <= 0.02);
}

#[test]
fn fifty_millimetre_fibers_are_not_rejected() {
    let out = run(&["test", "fibers-50mm"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("do not reject"), "{text}");
    assert!(text.contains("T1_5"));
}

#[test]
fn gaussian_weight_and_moments() {
    let out = run(&[
        "test",
        "fibers-20mm",
        "--weight",
        "gauss",
        "--a",
        "2",
        "--estimator",
        "moments",
        "--b",
        "300",
        "--seed",
        "4",
        "--json",
    ]);
    let v = json_of(&out);
    assert_report_schema(&v);
    assert_eq!(v["weight_family"], "gauss");
    assert_eq!(v["estimator"], "moments");
    assert_eq!(v["seed"], 4);
    assert_eq!(
        out.status.code(),
        Some(if v["reject"] == true { 1 } else { 0 })
    );
}

#[test]
fn invalid_levels_exit_with_two() {
    for alpha in ["0", "1"] {
        let out = run(&["test", "fibers-1mm", "--alpha", alpha]);
        assert_eq!(out.status.code(), Some(2));
        assert!(!out.stderr.is_empty());
        assert_error_object(&run(&["test", "fibers-1mm", "--alpha", alpha, "--json"]));
    }
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(run(&["test"]).status.code(), Some(2));
    assert_eq!(
        run(&["test", "fibers-1mm", "--weight", "cauchy"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_error_object(&run(&["test", "fibers-1mm", "--b", "many", "--json"]));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn file_inputs() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("good.txt");
    std::fs::write(&good, "1.0 2.0\n3.0").unwrap();
    let out = run(&["test", good.to_str().unwrap(), "--b", "50", "--json"]);
    let v = json_of(&out);
    assert_report_schema(&v);
    assert_eq!(v["n"], 3);

    let negative = dir.path().join("negative.txt");
    std::fs::write(&negative, "-1.0").unwrap();
    assert_error_object(&run(&["test", negative.to_str().unwrap(), "--json"]));

    let malformed = dir.path().join("malformed.txt");
    std::fs::write(&malformed, "1.0\n2,0x\n").unwrap();
    let out = run(&["test", malformed.to_str().unwrap(), "--json"]);
    assert_error_object(&out);
    assert!(json_of(&out)["error"].as_str().unwrap().contains("line 2"));

    let missing = dir.path().join("missing.txt");
    let out = run(&["test", missing.to_str().unwrap(), "--json"]);
    assert_error_object(&out);
    assert!(json_of(&out)["error"]
        .as_str()
        .unwrap()
        .contains("not found"));
}

#[test]
fn samples_round_trip_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sample.txt");
    let laws = [
        AlternativeSpec::weibull(0.3, 0.7).unwrap(),
        AlternativeSpec::log_normal(0.0, 3.0).unwrap(),
        AlternativeSpec::pareto(0.5, 2.0).unwrap(),
    ];
    for (i, law) in laws.iter().enumerate() {
        let sample = law.sample(500, RngStream::new(61, i as u64)).unwrap();
        std::fs::write(&path, write_sample(sample.values())).unwrap();
        let back = ingest(path.to_str().unwrap()).unwrap();
        assert_eq!(back.values, sample);
        assert_eq!(back.parse_report.skipped_lines, 0);
    }
}

#[test]
fn builtin_datasets_are_pinned() {
    let pinned = [
        (
            "fibers-1mm",
            "684f6256e7dacf42c7287241eee6aecf2f5423010861e50154767cb96392ee8a",
        ),
        (
            "fibers-10mm",
            "856096432647624788040500ebf904a07a10ab077c16f9ea152b033777ac54e9",
        ),
        (
            "fibers-20mm",
            "cedb73906b98153b1491f2c29bdb6b5290df2cc99abaea138247e9cd743ad948",
        ),
        (
            "fibers-50mm",
            "9aa9b42ebaa66796b107aee7b680b24db6df977f79a4a727042895664aa65bff",
        ),
    ];
    for (name, digest) in pinned {
        let data = ingest(name).unwrap();
        let text = datasets::canonical_text(data.values.values());
        assert_eq!(
            hex::encode(Sha256::digest(text.as_bytes())),
            digest,
            "{name}"
        );
    }
}

fn power_csv(dir: &Path, extra: &[&str]) -> (Output, String) {
    let mut args = vec!["power", "--out", dir.to_str().unwrap()];
    args.extend_from_slice(extra);
    let out = run(&args);
    let csv = std::fs::read_to_string(dir.join("power_table.csv")).unwrap_or_default();
    (out, csv)
}

#[test]
fn power_tables_are_reproducible() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let args = [
        "--alts",
        "gamma,IG(1,2)",
        "--n",
        "15",
        "--reps",
        "30",
        "--b",
        "40",
        "--seed",
        "8",
    ];
    let (out_a, csv_a) = power_csv(a.path(), &args);
    let (out_b, csv_b) = power_csv(b.path(), &args);
    assert_eq!(out_a.status.code(), Some(0));
    assert_eq!(out_b.status.code(), Some(0));
    assert_eq!(csv_a, csv_b);
    // header plus 4 alternatives x 6 tests
    assert_eq!(csv_a.lines().count(), 25);
    assert!(csv_a.starts_with("alternative,n,test,rate,se,status\n"));
    let text = std::fs::read_to_string(a.path().join("power_table.txt")).unwrap();
    assert!(text.contains("IG(1,2)") && text.contains("T2_5"));
}

#[test]
fn unavailable_alternative_is_marked() {
    let dir = tempfile::tempdir().unwrap();
    let (out, csv) = power_csv(dir.path(), &["--alts", "addw2", "--n", "20", "--quick"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        csv,
        "alternative,n,test,rate,se,status\nAddW2,20,T1_5,,,unavailable: parameters missing from source\n"
    );
}

#[test]
fn unknown_alternative_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let (out, _) = power_csv(dir.path(), &["--alts", "cauchy", "--json"]);
    assert_error_object(&out);
}

#[test]
fn quick_null_study_is_calibrated() {
    let dir = tempfile::tempdir().unwrap();
    let (out, csv) = power_csv(
        dir.path(),
        &["--alts", "weibull-null", "--n", "20,50", "--quick"],
    );
    assert_eq!(out.status.code(), Some(0));
    let rows: Vec<&str> = csv.lines().skip(1).collect();
    assert_eq!(rows.len(), 8);
    for row in rows {
        // labels may be quoted and contain commas; rate is third from the right
        let rate: f64 = row.rsplit(',').nth(2).unwrap().parse().unwrap();
        assert!((3.0..=7.0).contains(&rate), "{row}");
    }
    let text = String::from_utf8(out.stdout).unwrap();
    for label in ["W(1,0.9)", "W(1,1.5)", "W(1,3)", "W(1/4,1)"] {
        assert_eq!(
            text.matches(label).count(),
            2,
            "{label} once per sample size"
        );
    }
}

#[test]
fn critical_values_decrease_with_alpha() {
    let out = run(&[
        "critical-values",
        "--n",
        "30",
        "--k",
        "1.5",
        "--b",
        "400",
        "--alpha",
        "0.2,0.1,0.05,0.01",
        "--json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    let values: Vec<f64> = v["critical_values"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["value"].as_f64().unwrap())
        .collect();
    assert_eq!(values.len(), 4);
    assert!(values.windows(2).all(|w| w[0] <= w[1]));

    let out = run(&["critical-values", "fibers-1mm", "--b", "100"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8(out.stdout).unwrap().contains("n = 57"));
    assert_error_object(&run(&[
        "critical-values",
        "fibers-1mm",
        "--n",
        "10",
        "--b",
        "100",
        "--json",
    ]));
}

#[test]
fn fibers_summary() {
    let out = run(&["fibers", "--b", "300", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    let sets = v["datasets"].as_array().unwrap();
    assert_eq!(sets.len(), 4);
    for set in sets {
        let reports = set["reports"].as_array().unwrap();
        assert_eq!(reports.len(), 2);
        reports.iter().for_each(assert_report_schema);
    }
    let out = run(&["fibers", "--b", "300"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(
        text.contains("fibers-10mm") && text.contains("T2_5"),
        "{text}"
    );
}

#[test]
fn thread_count_from_environment() {
    let with = |value: &str| {
        Command::new(env!("CARGO_BIN_EXE_weibull-gof"))
            .args(["test", "fibers-1mm", "--b", "120", "--json"])
            .env("GOF_THREADS", value)
            .output()
            .unwrap()
    };
    let one = with("1");
    let auto = with("0");
    assert_eq!(one.status.code(), auto.status.code());
    assert_eq!(one.stdout, auto.stdout);
    assert_error_object(&with("lots"));
}
