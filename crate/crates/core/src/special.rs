//! Error function family.
//!
//! Rational Chebyshev approximations after W. J. Cody's CALERF, accurate to a
//! few ulps on the whole real line.

// coefficients are kept exactly as tabulated
#![allow(clippy::excessive_precision)]

use crate::error::{Error, Result};

const FRAC_1_SQRT_PI: f64 = 0.564_189_583_547_756_3;
const THRESHOLD: f64 = 0.46875;
const ERFC_UNDERFLOW: f64 = 26.543;

const A: [f64; 5] = [
    3.161_123_743_870_565_6,
    1.138_641_541_510_501_6e2,
    3.774_852_376_853_020_2e2,
    3.209_377_589_138_469_5e3,
    1.857_777_061_846_031_5e-1,
];
const B: [f64; 4] = [
    2.360_129_095_234_412e1,
    2.440_246_379_344_441_7e2,
    1.282_616_526_077_372_3e3,
    2.844_236_833_439_170_6e3,
];
const C: [f64; 9] = [
    5.641_884_969_886_701e-1,
    8.883_149_794_388_376,
    6.611_919_063_714_163e1,
    2.986_351_381_974_001_3e2,
    8.819_522_212_417_691e2,
    1.712_047_612_634_070_6e3,
    2.051_078_377_826_071_5e3,
    1.230_339_354_797_997_2e3,
    2.153_115_354_744_038_5e-8,
];
const D: [f64; 8] = [
    1.574_492_611_070_983_5e1,
    1.176_939_508_913_125e2,
    5.371_811_018_620_099e2,
    1.621_389_574_566_690_2e3,
    3.290_799_235_733_459_6e3,
    4.362_619_090_143_247e3,
    3.439_367_674_143_721_6e3,
    1.230_339_354_803_749_4e3,
];
const P: [f64; 6] = [
    3.053_266_349_612_323_4e-1,
    3.603_448_999_498_044_4e-1,
    1.257_817_261_112_292_5e-1,
    1.608_378_514_874_227_7e-2,
    6.587_491_615_298_378e-4,
    1.631_538_713_730_209_8e-2,
];
const Q: [f64; 5] = [
    2.568_520_192_289_822,
    1.872_952_849_923_460_4,
    5.279_051_029_514_284e-1,
    6.051_834_131_244_132e-2,
    2.335_204_976_268_691_8e-3,
];

/// erf(y)/y on |y| <= THRESHOLD, as a function of y^2.
fn small_ratio(ysq: f64) -> f64 {
    let mut num = A[4] * ysq;
    let mut den = ysq;
    for i in 0..3 {
        num = (num + A[i]) * ysq;
        den = (den + B[i]) * ysq;
    }
    (num + A[3]) / (den + B[3])
}

/// erfcx(y) on THRESHOLD < y <= 4.
fn mid_erfcx(y: f64) -> f64 {
    let mut num = C[8] * y;
    let mut den = y;
    for i in 0..7 {
        num = (num + C[i]) * y;
        den = (den + D[i]) * y;
    }
    (num + C[7]) / (den + D[7])
}

/// `1/sqrt(pi) - y erfcx(y)` on y > 4.
fn tail_correction(y: f64) -> f64 {
    let z = 1.0 / (y * y);
    let mut num = P[5] * z;
    let mut den = z;
    for i in 0..4 {
        num = (num + P[i]) * z;
        den = (den + Q[i]) * z;
    }
    z * (num + P[4]) / (den + Q[4])
}

/// erfcx(y) on y > 4.
fn tail_erfcx(y: f64) -> f64 {
    (FRAC_1_SQRT_PI - tail_correction(y)) / y
}

/// exp(-y^2) split so the rounding of y^2 does not leak into the result.
fn exp_neg_square(y: f64) -> f64 {
    let head = (y * 16.0).trunc() / 16.0;
    (-head * head).exp() * (-(y - head) * (y + head)).exp()
}

/// erfc(y) for y >= 0.
fn erfc_nonneg(y: f64) -> f64 {
    if y <= THRESHOLD {
        1.0 - y * small_ratio(y * y)
    } else if y >= ERFC_UNDERFLOW {
        0.0
    } else if y <= 4.0 {
        mid_erfcx(y) * exp_neg_square(y)
    } else {
        tail_erfcx(y) * exp_neg_square(y)
    }
}

/// The error function `2/sqrt(pi) * int_0^x exp(-t^2) dt`.
pub fn erf(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    let y = x.abs();
    if y <= THRESHOLD {
        return x * small_ratio(y * y);
    }
    let v = (0.5 - erfc_nonneg(y)) + 0.5;
    if x < 0.0 {
        -v
    } else {
        v
    }
}

/// Complementary error function `1 - erf(x)`.
pub fn erfc(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x >= 0.0 {
        erfc_nonneg(x)
    } else {
        2.0 - erfc_nonneg(-x)
    }
}

/// Scaled complementary error function `exp(x^2) * erfc(x)` for `x >= 0`,
/// without the intermediate overflow. Callers must uphold `x >= 0`.
pub(crate) fn erfcx_unchecked(x: f64) -> f64 {
    if x <= THRESHOLD {
        let ysq = x * x;
        ysq.exp() * (1.0 - x * small_ratio(ysq))
    } else if x <= 4.0 {
        mid_erfcx(x)
    } else {
        tail_erfcx(x)
    }
}

/// `x erfcx(x) - 1/sqrt(pi)` for `x >= 0`, free of the cancellation that the
/// direct difference suffers for large `x`.
pub(crate) fn x_erfcx_minus_limit(x: f64) -> f64 {
    if x > 4.0 {
        -tail_correction(x)
    } else {
        x * erfcx_unchecked(x) - FRAC_1_SQRT_PI
    }
}

/// Scaled complementary error function `exp(x^2) * (1 - erf(x))`.
///
/// Defined here for `x >= 0` only, which is all the statistics need.
pub fn erfcx(x: f64) -> Result<f64> {
    if !(x >= 0.0) {
        return Err(Error::InvalidParameter {
            name: "x",
            value: x,
            reason: "erfcx is defined for nonnegative arguments",
        });
    }
    Ok(erfcx_unchecked(x))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Maclaurin series of erf, summed until terms vanish. The alternating
    /// terms peak near e^{x^2}, so it is only trusted for |x| <= 2.
    fn erf_series(x: f64) -> f64 {
        let mut term = x;
        let mut sum = x;
        let x2 = x * x;
        for n in 1..200 {
            term *= -x2 / n as f64;
            let add = term / (2 * n + 1) as f64;
            sum += add;
            if add.abs() < 1e-20 {
                break;
            }
        }
        2.0 * FRAC_1_SQRT_PI * sum
    }

    /// Laplace continued fraction for erfcx, good for x >= 2.
    fn erfcx_continued_fraction(x: f64) -> f64 {
        let mut f = 0.0;
        for k in (1..=400).rev() {
            f = (k as f64 / 2.0) / (x + f);
        }
        FRAC_1_SQRT_PI / (x + f)
    }

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn erf_reference_values() {
        assert_eq!(erf(0.0), 0.0);
        // frozen from a 40-digit evaluation
        let table = [
            (0.1, 0.112_462_916_018_284_9),
            (0.5, 0.520_499_877_813_046_5),
            (1.0, 0.842_700_792_949_714_9),
            (2.0, 0.995_322_265_018_952_7),
            (3.5, 0.999_999_256_901_627_7),
            (5.0, 0.999_999_999_998_462_5),
        ];
        for (x, want) in table {
            assert!((erf(x) - want).abs() <= 1e-15, "erf({x})");
            assert_eq!(erf(-x), -erf(x));
        }
        assert!((erf(1.0) - 0.842_700_792_949_714_9).abs() <= 1e-14);
    }

    #[test]
    fn erf_matches_series_oracle() {
        for i in 0..=200 {
            let x = i as f64 * 0.01;
            assert!((erf(x) - erf_series(x)).abs() <= 1e-14, "x = {x}");
        }
    }

    #[test]
    fn erfcx_reference_values() {
        assert_eq!(erfcx(0.0).unwrap(), 1.0);
        let table = [
            (0.3, 0.734_599_334_567_655_1),
            (0.46875, 0.632_069_689_249_556_1),
            (1.0, 0.427_583_576_155_807),
            (2.0, 0.255_395_676_310_505_74),
            (4.0, 0.136_999_457_625_061_4),
            (4.5, 0.122_484_804_273_841_42),
            (10.0, 0.056_140_992_743_822_586),
            (26.0, 0.021_683_584_850_562_907),
            (100.0, 0.005_641_613_782_989_433),
            (1e6, 5.641_895_835_474_742e-7),
        ];
        for (x, want) in table {
            assert!(rel(erfcx(x).unwrap(), want) <= 1e-14, "erfcx({x})");
        }
    }

    #[test]
    fn erfcx_matches_continued_fraction() {
        for i in 0..200 {
            let x = 2.0 + i as f64 * 0.37;
            assert!(rel(erfcx(x).unwrap(), erfcx_continued_fraction(x)) <= 1e-13);
        }
    }

    #[test]
    fn erfcx_large_argument_asymptote() {
        let x: f64 = 100.0;
        let asym = 1.0 / (x * std::f64::consts::PI.sqrt());
        assert!(rel(erfcx(x).unwrap(), asym) <= 1e-4);
        assert!(rel(erfcx(x).unwrap(), asym * (1.0 - 0.5 / (x * x))) <= 1e-6);
        for x in [1e3, 1e6, 1e10, 1e200] {
            let v = erfcx(x).unwrap();
            assert!(v.is_finite() && v > 0.0);
            assert!(rel(v, FRAC_1_SQRT_PI / x) <= 1e-6);
        }
    }

    #[test]
    fn erfcx_consistent_with_erf() {
        for i in 0..=2500 {
            let x = i as f64 * 0.01;
            let lhs = erfcx(x).unwrap() * (-x * x).exp();
            let rhs = erfc(x);
            if rhs > 0.0 {
                assert!(rel(lhs, rhs) <= 1e-10, "x = {x}");
            }
            if x < 3.0 {
                assert!((erfc(x) - (1.0 - erf(x))).abs() <= 1e-15);
            }
        }
    }

    #[test]
    fn shifted_product_matches_direct_difference() {
        for i in 0..400 {
            let x = i as f64 * 0.05;
            let direct = x * erfcx(x).unwrap() - FRAC_1_SQRT_PI;
            let tol = 1e-15 * (1.0 + x * x);
            assert!((x_erfcx_minus_limit(x) - direct).abs() <= tol, "x = {x}");
        }
        // -1/(2 sqrt(pi) x^2) leading behavior
        let x = 1e4;
        let want = -FRAC_1_SQRT_PI / (2.0 * x * x) * (1.0 - 1.5 / (x * x));
        assert!(rel(x_erfcx_minus_limit(x), want) <= 1e-12);
    }

    #[test]
    fn erfcx_rejects_negative() {
        assert!(erfcx(-1e-300).is_err());
        assert!(erfcx(f64::NAN).is_err());
    }
}
