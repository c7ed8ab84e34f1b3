use proptest::prelude::*;
use rand::Rng;
use weibull_gof::{
    fit_mle, fit_moments, statistic_closed_form, statistic_quadrature, AlternativeSpec, RngStream,
    Sample, WeibullParams, WeightSpec,
};

fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        ((a - b) / b).abs()
    }
}

/// Random instance in the documented input ranges: sample from an unrelated
/// Weibull law so the statistic is typically far from zero.
fn instance(seed: u64, i: u64) -> (Sample, WeibullParams, f64) {
    let mut rng = RngStream::new(seed, i).rng();
    let n = rng.random_range(1..=50);
    let params =
        WeibullParams::new(rng.random_range(0.2..5.0), rng.random_range(0.3..6.0)).unwrap();
    let a = 10f64.powf(rng.random_range(-1.3..1.3));
    let law =
        AlternativeSpec::weibull(rng.random_range(0.2..5.0), rng.random_range(0.3..6.0)).unwrap();
    let sample = law.sample(n, RngStream::new(seed, i).substream(1)).unwrap();
    (sample, params, a)
}

#[test]
fn closed_forms_match_quadrature_on_random_instances() {
    for family in ["exp", "gauss"] {
        let mut worst: f64 = 0.0;
        for i in 0..400 {
            let (sample, params, a) = instance(17, i);
            let weight = match family {
                "exp" => WeightSpec::exponential(a).unwrap(),
                _ => WeightSpec::gaussian(a).unwrap(),
            };
            let closed = statistic_closed_form(&sample, params, weight).value;
            let quad = statistic_quadrature(&sample, params, weight, 1e-10)
                .unwrap()
                .value;
            let e = rel(closed, quad);
            worst = worst.max(e);
            assert!(
                e <= 1e-6,
                "{family} #{i}: closed {closed} vs quadrature {quad} (n = {})",
                sample.len()
            );
        }
        println!("{family}: worst relative error {worst:.2e}");
    }
}

#[test]
fn tiny_and_huge_observations_stay_accurate() {
    // spans sixteen decades, exercising every evaluation regime
    let sample = Sample::new(vec![3e-9, 2e-6, 4e-4, 0.03, 0.7, 2.0, 45.0, 900.0, 2.5e4]).unwrap();
    for (l, k) in [(0.5, 0.25), (1.0, 0.4), (30.0, 0.3)] {
        let params = WeibullParams::new(l, k).unwrap();
        for a in [0.01, 1.0, 5.0, 300.0] {
            for weight in [
                WeightSpec::exponential(a).unwrap(),
                WeightSpec::gaussian(a).unwrap(),
            ] {
                let closed = statistic_closed_form(&sample, params, weight).value;
                let quad = statistic_quadrature(&sample, params, weight, 1e-10)
                    .unwrap()
                    .value;
                assert!(
                    rel(closed, quad) <= 1e-6,
                    "{weight} {l} {k}: {closed} vs {quad}"
                );
            }
        }
    }
}

#[test]
fn exponential_reduction() {
    // k = 1 and lambda = mean: T = n lambda^{-3} int ((1+s) L_Y(s) - 1)^2 e^{-(a/lambda) s} ds
    // with Y = X / mean, the empirical Laplace transform statistic for exponentiality.
    let law = AlternativeSpec::gamma(1.7, 1.3).unwrap();
    for seed in 0..10 {
        let sample = law
            .sample(5 + 4 * seed as usize, RngStream::new(seed, 4))
            .unwrap();
        let n = sample.len() as f64;
        let mean = sample.values().iter().sum::<f64>() / n;
        let y: Vec<f64> = sample.values().iter().map(|x| x / mean).collect();
        for a in [1.0, 2.0, 5.0] {
            let integral = weibull_gof::quadrature::integrate_to_infinity(
                |s| {
                    let laplace = y.iter().map(|v| (-s * v).exp()).sum::<f64>() / n;
                    let d = (1.0 + s) * laplace - 1.0;
                    d * d * (-(a / mean) * s).exp()
                },
                0.0,
                weibull_gof::quadrature::Tolerance::relative(1e-11),
            )
            .unwrap();
            let oracle = n * integral.value / mean.powi(3);
            let params = WeibullParams::new(mean, 1.0).unwrap();
            let closed =
                statistic_closed_form(&sample, params, WeightSpec::exponential(a).unwrap()).value;
            assert!(
                rel(closed, oracle) <= 1e-6,
                "seed {seed}, a = {a}: {closed} vs {oracle}"
            );
        }
    }
}

fn sample_strategy() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(1e-3f64..50.0, 1..30)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn statistic_is_nonnegative(
        values in sample_strategy(),
        lambda in 0.05f64..20.0,
        k in 0.1f64..10.0,
        a in 0.1f64..10.0,
    ) {
        let sample = Sample::new(values).unwrap();
        let params = WeibullParams::new(lambda, k).unwrap();
        for weight in [WeightSpec::exponential(a).unwrap(), WeightSpec::gaussian(a).unwrap()] {
            prop_assert!(statistic_closed_form(&sample, params, weight).value >= 0.0);
        }
    }

    #[test]
    fn scale_relation(
        values in sample_strategy(),
        lambda in 0.2f64..5.0,
        k in 0.3f64..6.0,
        c in 0.1f64..10.0,
        a_index in 0usize..3,
    ) {
        let a = [1.0, 2.0, 5.0][a_index];
        let sample = Sample::new(values).unwrap();
        let scaled = sample.scaled(c).unwrap();
        let params = WeibullParams::new(lambda, k).unwrap();
        let scaled_params = WeibullParams::new(c * lambda, k).unwrap();
        let lhs = statistic_closed_form(&scaled, scaled_params, WeightSpec::exponential(a).unwrap()).value;
        let rhs = statistic_closed_form(&sample, params, WeightSpec::exponential(a / c).unwrap()).value / c.powi(3);
        prop_assert!(rel(lhs, rhs) <= 1e-10, "exp: {} vs {}", lhs, rhs);
        let lhs = statistic_closed_form(&scaled, scaled_params, WeightSpec::gaussian(a).unwrap()).value;
        let rhs = statistic_closed_form(&sample, params, WeightSpec::gaussian(a / (c * c)).unwrap()).value / c.powi(3);
        prop_assert!(rel(lhs, rhs) <= 1e-10, "gauss: {} vs {}", lhs, rhs);
    }

    #[test]
    fn order_of_observations_is_irrelevant(
        values in sample_strategy(),
        lambda in 0.2f64..5.0,
        k in 0.3f64..6.0,
        a in 0.5f64..5.0,
    ) {
        let forward = Sample::new(values.clone()).unwrap();
        let mut reversed_values = values;
        reversed_values.reverse();
        let reversed = Sample::new(reversed_values).unwrap();
        let params = WeibullParams::new(lambda, k).unwrap();
        for weight in [WeightSpec::exponential(a).unwrap(), WeightSpec::gaussian(a).unwrap()] {
            let x = statistic_closed_form(&forward, params, weight).value;
            let y = statistic_closed_form(&reversed, params, weight).value;
            prop_assert!(rel(x, y) <= 1e-12 || (x - y).abs() <= 1e-14);
        }
    }

    #[test]
    fn estimators_are_scale_equivariant(values in prop::collection::vec(1e-2f64..100.0, 2..40), c in 0.01f64..100.0) {
        prop_assume!(values.iter().any(|v| *v != values[0]));
        let sample = Sample::new(values).unwrap();
        let scaled = sample.scaled(c).unwrap();
        let (p, _) = fit_mle(&sample).unwrap();
        let (q, _) = fit_mle(&scaled).unwrap();
        prop_assert!(rel(q.lambda(), c * p.lambda()) <= 1e-9);
        prop_assert!(rel(q.k(), p.k()) <= 1e-9);
        let p = fit_moments(&sample).unwrap();
        let q = fit_moments(&scaled).unwrap();
        prop_assert!(rel(q.lambda(), c * p.lambda()) <= 1e-12);
        prop_assert!(rel(q.k(), p.k()) <= 1e-12);
    }

    #[test]
    fn sampling_is_reproducible(seed in any::<u64>(), stream in any::<u64>(), n in 1usize..200) {
        let law = AlternativeSpec::inverse_gaussian(1.0, 2.0).unwrap();
        let a = law.sample(n, RngStream::new(seed, stream)).unwrap();
        let b = law.sample(n, RngStream::new(seed, stream)).unwrap();
        prop_assert_eq!(a, b);
    }
}
