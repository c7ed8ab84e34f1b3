//! Globally adaptive Gauss–Kronrod (10/21 point) quadrature.
//!
//! Infinite ranges are mapped onto finite ones before subdivision:
//! `[a, inf)` through `t = a + u / (1 - u)` and the real line through
//! `t = u / (1 - u^2)`. The 21-point rule never touches interval endpoints,
//! so the mapped integrands are never evaluated at the singular points.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

const XGK: [f64; 11] = [
    0.995_657_163_025_808_1,
    0.973_906_528_517_171_7,
    0.930_157_491_355_708_2,
    0.865_063_366_688_984_5,
    0.780_817_726_586_416_9,
    0.679_409_568_299_024_4,
    0.562_757_134_668_604_7,
    0.433_395_394_129_247_2,
    0.294_392_862_701_460_2,
    0.148_874_338_981_631_2,
    0.0,
];
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874,
    0.032_558_162_307_964_73,
    0.054_755_896_574_351_996,
    0.075_039_674_810_919_95,
    0.093_125_454_583_697_6,
    0.109_387_158_802_297_64,
    0.123_491_976_262_065_85,
    0.134_709_217_311_473_33,
    0.142_775_938_577_060_08,
    0.147_739_104_901_338_5,
    0.149_445_554_002_916_9,
];
// Gauss weights for the odd-indexed Kronrod nodes 1, 3, 5, 7, 9.
const WG: [f64; 5] = [
    0.066_671_344_308_688_14,
    0.149_451_349_150_580_6,
    0.219_086_362_515_982_04,
    0.269_266_719_309_996_35,
    0.295_524_224_714_752_87,
];

/// Stopping rule: the total error estimate must fall below
/// `max(abs, rel * |integral|)` within `max_intervals` subdivisions.
#[derive(Debug, Clone, Copy)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_intervals: usize,
}

impl Tolerance {
    pub fn relative(rel: f64) -> Self {
        Self {
            abs: 0.0,
            rel,
            max_intervals: 4000,
        }
    }

    pub fn with_abs(mut self, abs: f64) -> Self {
        self.abs = abs;
        self
    }
}

/// Result of an adaptive integration.
#[derive(Debug, Clone)]
pub struct Integral {
    pub value: f64,
    pub abs_error: f64,
    /// Final partition, in the coordinate the rule was applied in.
    pub intervals: Vec<(f64, f64)>,
    pub evaluations: usize,
}

#[derive(Debug)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod21<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[10];
    let mut gauss = 0.0;
    let mut abs_sum = kronrod.abs();
    let mut values = [0.0f64; 21];
    values[10] = fc;
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        values[j] = f1;
        values[20 - j] = f2;
        kronrod += WGK[j] * (f1 + f2);
        abs_sum += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * kronrod;
    let mut asc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        asc += WGK[j] * ((values[j] - mean).abs() + (values[20 - j] - mean).abs());
    }
    let value = kronrod * half;
    let asc = asc * half.abs();
    let abs_sum = abs_sum * half.abs();
    let mut err = ((kronrod - gauss) * half).abs();
    if asc != 0.0 && err != 0.0 {
        err = asc * (200.0 * err / asc).powf(1.5).min(1.0);
    }
    if abs_sum > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * abs_sum);
    }
    (value, err)
}

/// Integrate `f` over the finite interval `[a, b]`.
pub fn integrate<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    tol: Tolerance,
) -> Result<Integral> {
    let mut heap = BinaryHeap::new();
    let (value, error) = kronrod21(&mut f, a, b);
    let mut total = value;
    let mut total_err = error;
    let mut evaluations = 21;
    heap.push(Segment { a, b, value, error });
    loop {
        let target = tol.abs.max(tol.rel * total.abs());
        if total_err <= target || !total_err.is_finite() {
            break;
        }
        if heap.len() >= tol.max_intervals {
            return Err(Error::QuadratureNonConvergence {
                tolerance: target,
                error: total_err,
            });
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Cannot split further in double precision.
            heap.push(worst);
            return Err(Error::QuadratureNonConvergence {
                tolerance: target,
                error: total_err,
            });
        }
        let (v1, e1) = kronrod21(&mut f, worst.a, mid);
        let (v2, e2) = kronrod21(&mut f, mid, worst.b);
        evaluations += 42;
        total += v1 + v2 - worst.value;
        total_err += e1 + e2 - worst.error;
        heap.push(Segment {
            a: worst.a,
            b: mid,
            value: v1,
            error: e1,
        });
        heap.push(Segment {
            a: mid,
            b: worst.b,
            value: v2,
            error: e2,
        });
    }
    if !total.is_finite() {
        return Err(Error::QuadratureNonConvergence {
            tolerance: tol.rel,
            error: f64::INFINITY,
        });
    }
    // Re-sum to shed the drift of the running totals.
    let segments = heap.into_vec();
    let value = segments.iter().map(|s| s.value).sum();
    let abs_error = segments.iter().map(|s| s.error).sum();
    let mut intervals: Vec<_> = segments.iter().map(|s| (s.a, s.b)).collect();
    intervals.sort_by(|x, y| x.0.total_cmp(&y.0));
    Ok(Integral {
        value,
        abs_error,
        intervals,
        evaluations,
    })
}

fn to_infinity(a: f64, u: f64) -> (f64, f64) {
    let v = 1.0 - u;
    (a + u / v, 1.0 / (v * v))
}

fn to_real_line(u: f64) -> (f64, f64) {
    let v = 1.0 - u * u;
    (u / v, (1.0 + u * u) / (v * v))
}

/// Integrate `f` over `[a, inf)`. The partition in the result lives in the
/// mapped coordinate `u in [0, 1)`.
pub fn integrate_to_infinity<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    tol: Tolerance,
) -> Result<Integral> {
    integrate(
        |u| {
            let (t, jac) = to_infinity(a, u);
            let y = f(t);
            if y == 0.0 {
                0.0
            } else {
                y * jac
            }
        },
        0.0,
        1.0,
        tol,
    )
}

/// Integrate `f` over the whole real line. The partition in the result lives
/// in the mapped coordinate `u in (-1, 1)`.
pub fn integrate_real_line<F: FnMut(f64) -> f64>(mut f: F, tol: Tolerance) -> Result<Integral> {
    integrate(
        |u| {
            let (t, jac) = to_real_line(u);
            let y = f(t);
            if y == 0.0 {
                0.0
            } else {
                y * jac
            }
        },
        -1.0,
        1.0,
        tol,
    )
}

/// Nodes and weights of the 21-point Kronrod rule applied on every interval
/// of a partition of `[0, 1)` produced by [`integrate_to_infinity`], mapped
/// back to `t in [a, inf)`. Summing `w * g(t)` integrates any `g` on the same
/// grid the adaptive run settled on.
pub fn kronrod_points_to_infinity(a: f64, intervals: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut points = Vec::with_capacity(21 * intervals.len());
    for &(lo, hi) in intervals {
        let center = 0.5 * (lo + hi);
        let half = 0.5 * (hi - lo);
        for j in 0..11 {
            let offsets: &[f64] = if j == 10 { &[0.0] } else { &[-1.0, 1.0] };
            for &sign in offsets {
                let u = center + sign * half * XGK[j];
                let (t, jac) = to_infinity(a, u);
                points.push((t, WGK[j] * half * jac));
            }
        }
    }
    points
}
