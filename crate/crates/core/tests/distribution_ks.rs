use weibull_gof::power::catalog;
use weibull_gof::quadrature::{integrate, integrate_to_infinity, Tolerance};
use weibull_gof::{AlternativeSpec, RngStream};

/// Kolmogorov distance between the empirical law of `ln X` and the CDF
/// obtained by integrating the density of `ln X` between consecutive order
/// statistics. Working with `ln X` keeps the check meaningful for laws whose
/// draws fall below the double range.
fn ks_distance(spec: &AlternativeSpec, draws: usize, stream: RngStream) -> f64 {
    let mut y = spec.sample_ln(draws, stream).unwrap();
    y.sort_by(f64::total_cmp);
    let density = |v: f64| spec.ln_pdf_of_log(v).unwrap().exp();
    let mut cdf = integrate_to_infinity(
        |t| density(y[0] - t),
        0.0,
        Tolerance::relative(1e-10).with_abs(1e-14),
    )
    .unwrap()
    .value;
    let n = draws as f64;
    let mut worst: f64 = 0.0;
    for i in 0..y.len() {
        if i > 0 && y[i] > y[i - 1] {
            cdf += integrate(
                density,
                y[i - 1],
                y[i],
                Tolerance::relative(1e-10).with_abs(1e-15),
            )
            .unwrap()
            .value;
        }
        worst = worst
            .max((cdf - i as f64 / n).abs())
            .max((cdf - (i + 1) as f64 / n).abs());
    }
    worst
}

#[test]
fn every_catalog_law_passes_kolmogorov_check() {
    for (i, alt) in catalog().into_iter().enumerate() {
        let Some(spec) = alt.spec else { continue };
        let d = ks_distance(&spec, 100_000, RngStream::new(2024, i as u64));
        println!("{:<14} KS distance {d:.4}", alt.label);
        assert!(d <= 0.01, "{}: {d}", alt.label);
    }
}
