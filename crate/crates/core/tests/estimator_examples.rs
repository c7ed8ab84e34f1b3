use weibull_gof::{fit_mle, fit_moments, AlternativeSpec, Error, RngStream, Sample};

#[test]
fn mle_recovers_exponential_shape() {
    let data = AlternativeSpec::weibull(1.0, 1.0)
        .unwrap()
        .sample(10_000, RngStream::new(31, 0))
        .unwrap();
    let (p, diag) = fit_mle(&data).unwrap();
    assert!((p.k() - 1.0).abs() <= 0.05, "{p}");
    assert!(diag.residual.abs() <= 1e-10 * data.len() as f64);
    assert!(diag.bracket.0 < p.k() && p.k() < diag.bracket.1);
}

#[test]
fn moments_recover_shape_two() {
    let data = AlternativeSpec::weibull(1.0, 2.0)
        .unwrap()
        .sample(100_000, RngStream::new(32, 0))
        .unwrap();
    let p = fit_moments(&data).unwrap();
    assert!((p.k() - 2.0).abs() <= 0.05, "{p}");
    assert!((p.lambda() - 1.0).abs() <= 0.01, "{p}");
}

#[test]
fn fixed_scale_factor_equivariance() {
    let data = AlternativeSpec::gamma(3.0, 0.7)
        .unwrap()
        .sample(60, RngStream::new(33, 0))
        .unwrap();
    let scaled = data.scaled(3.7).unwrap();
    let ((p, _), (q, _)) = (fit_mle(&data).unwrap(), fit_mle(&scaled).unwrap());
    assert!((q.lambda() / (3.7 * p.lambda()) - 1.0).abs() <= 1e-9);
    assert!((q.k() / p.k() - 1.0).abs() <= 1e-9);
}

#[test]
fn extreme_shapes_need_bracket_expansion() {
    // nearly degenerate data push the root above the initial bracket
    let tight = Sample::new((0..40).map(|i| 1.0 + 1e-4 * f64::from(i)).collect()).unwrap();
    let (p, diag) = fit_mle(&tight).unwrap();
    assert!(p.k() > 50.0 && diag.bracket.1 > 50.0, "{p} {diag:?}");
    // very dispersed data push it below
    let wide = Sample::new((0..40).map(|i| 10f64.powi(i - 20)).collect()).unwrap();
    let (p, diag) = fit_mle(&wide).unwrap();
    assert!(p.k() < 0.05 && diag.bracket.0 < 0.05, "{p} {diag:?}");
}

#[test]
fn degenerate_samples_are_rejected() {
    let constant = Sample::new(vec![2.5; 8]).unwrap();
    assert_eq!(fit_mle(&constant).unwrap_err(), Error::ConstantSample);
    assert_eq!(fit_moments(&constant).unwrap_err(), Error::ConstantSample);
    let single = Sample::new(vec![2.5]).unwrap();
    assert!(matches!(
        fit_mle(&single),
        Err(Error::SampleTooSmall { .. })
    ));
    assert!(matches!(
        fit_moments(&single),
        Err(Error::SampleTooSmall { .. })
    ));
}
