//! The weighted L2 statistic
//! `T_n = int_0^inf V_n(t)^2 w(t) dt`,
//! `V_n(t) = n^(-1/2) sum_j [r(X_j)(1 - e^{-t X_j}) - t e^{-t X_j}]`,
//! in closed form for the weights `e^{-a t}` and `e^{-a t^2}`, by direct
//! quadrature, and as the population functional behind consistency.
//!
//! Both closed forms are double sums over pairs `(i, j)` of
//! `r_i r_j A_ij - 2 r_j B_ij + C_ij` with
//! `A_ij = int (1 - e^{-t X_i})(1 - e^{-t X_j}) w`,
//! `B_ij = int t e^{-t X_i} (1 - e^{-t X_j}) w` and
//! `C_ij = int t^2 e^{-t (X_i + X_j)} w`.
//! Since `r(x)` grows like `1/x` near the origin, the code works with
//! `rho_i = r_i X_i`, `A_ij / (X_i X_j)` and `B_ij / X_j`, each evaluated
//! without the cancellation the raw forms suffer for small observations.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distributions::{AlternativeSpec, Sample, WeibullParams};
use crate::error::{Error, Result};
use crate::quadrature::{integrate_to_infinity, kronrod_points_to_infinity, Tolerance};
use crate::rng::RngStream;
use crate::special::{erfcx_unchecked, x_erfcx_minus_limit};

const SQRT_PI: f64 = 1.772_453_850_905_516;
const FRAC_2_SQRT_PI: f64 = std::f64::consts::FRAC_2_SQRT_PI;

/// Statistic values within this distance of zero are reported as zero.
pub const ZERO_CLAMP: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightFamily {
    /// `w(t) = e^{-a t}`
    Exponential,
    /// `w(t) = e^{-a t^2}`
    Gaussian,
}

impl WeightFamily {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Exponential => "exp",
            Self::Gaussian => "gauss",
        }
    }

    fn index(&self) -> u8 {
        match self {
            Self::Exponential => 1,
            Self::Gaussian => 2,
        }
    }
}

impl fmt::Display for WeightFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for WeightFamily {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "exp" | "exponential" | "1" => Ok(Self::Exponential),
            "gauss" | "gaussian" | "2" => Ok(Self::Gaussian),
            other => Err(format!("unknown weight `{other}` (expected exp or gauss)")),
        }
    }
}

/// Weight function family with its tuning parameter `a > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightSpec {
    family: WeightFamily,
    a: f64,
}

impl WeightSpec {
    pub fn new(family: WeightFamily, a: f64) -> Result<Self> {
        if !(a.is_finite() && a > 0.0) {
            return Err(Error::InvalidParameter {
                name: "a",
                value: a,
                reason: "weight tuning parameter must be positive and finite",
            });
        }
        Ok(Self { family, a })
    }

    pub fn exponential(a: f64) -> Result<Self> {
        Self::new(WeightFamily::Exponential, a)
    }

    pub fn gaussian(a: f64) -> Result<Self> {
        Self::new(WeightFamily::Gaussian, a)
    }

    pub fn family(&self) -> WeightFamily {
        self.family
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn eval(&self, t: f64) -> f64 {
        match self.family {
            WeightFamily::Exponential => (-self.a * t.abs()).exp(),
            WeightFamily::Gaussian => (-self.a * t * t).exp(),
        }
    }

    /// Short name such as `T1_5` or `T2_0.5`.
    pub fn label(&self) -> String {
        format!("T{}_{}", self.family.index(), self.a)
    }
}

impl fmt::Display for WeightSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StatisticValue {
    pub value: f64,
    pub n: usize,
    pub weight: WeightSpec,
    pub params_used: WeibullParams,
}

impl StatisticValue {
    fn clamped(raw: f64, n: usize, weight: WeightSpec, params: WeibullParams) -> Self {
        let value = if raw.abs() <= ZERO_CLAMP { 0.0 } else { raw };
        Self {
            value,
            n,
            weight,
            params_used: params,
        }
    }
}

/// `x^{-1} (k (x/lambda)^k - k + 1)`.
pub fn r_term(x: f64, params: WeibullParams) -> Result<f64> {
    if !(x.is_finite() && x > 0.0) {
        return Err(Error::NonPositiveData { index: 0, value: x });
    }
    Ok(rho(x, params) / x)
}

/// `x r(x)`, bounded near the origin.
fn rho(x: f64, params: WeibullParams) -> f64 {
    let k = params.k();
    k * (x / params.lambda()).powf(k) - k + 1.0
}

/// Neumaier-compensated running sum.
#[derive(Default, Clone, Copy)]
struct Compensated {
    sum: f64,
    carry: f64,
}

impl Compensated {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

/// Closed-form evaluation of the statistic in `O(n^2)`.
pub fn statistic_closed_form(
    sample: &Sample,
    params: WeibullParams,
    weight: WeightSpec,
) -> StatisticValue {
    let raw = closed_form_raw(sample.values(), params, weight);
    StatisticValue::clamped(raw, sample.len(), weight, params)
}

pub(crate) fn closed_form_raw(x: &[f64], params: WeibullParams, weight: WeightSpec) -> f64 {
    let rho: Vec<f64> = x.iter().map(|&xi| rho(xi, params)).collect();
    let total = match weight.family {
        WeightFamily::Exponential => exp_weight_sum(x, &rho, weight.a),
        WeightFamily::Gaussian => gauss_weight_sum(x, &rho, weight.a),
    };
    total / x.len() as f64
}

fn exp_weight_sum(x: &[f64], rho: &[f64], a: f64) -> f64 {
    let inv: Vec<f64> = x.iter().map(|xi| 1.0 / (a + xi)).collect();
    let mut acc = Compensated::default();
    for i in 0..x.len() {
        let (xi, ri, ii) = (x[i], rho[i], inv[i]);
        let mut row = Compensated::default();
        for j in i..x.len() {
            let (xj, rj, ij) = (x[j], rho[j], inv[j]);
            let s = xi + xj;
            let is = 1.0 / (a + s);
            let is2 = is * is;
            let a_scaled = (2.0 * a + s) * ii * ij * is / a;
            let b_ij = (2.0 * a + xi + s) * ii * ii * is2;
            let b_ji = (2.0 * a + xj + s) * ij * ij * is2;
            let c = 2.0 * is2 * is;
            let term = ri * rj * a_scaled - rj * b_ij - ri * b_ji + c;
            row.add(if i == j { term } else { 2.0 * term });
        }
        acc.add(row.value());
    }
    acc.value()
}

/// `1 / Gamma(m/2 + 1)` for `m = 0..SERIES_TERMS`.
const SERIES_TERMS: usize = 96;

fn inv_gamma_half() -> &'static [f64; SERIES_TERMS] {
    static TABLE: OnceLock<[f64; SERIES_TERMS]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut g = [0.0; SERIES_TERMS];
        g[0] = 1.0;
        g[1] = 0.5 * SQRT_PI;
        for m in 2..SERIES_TERMS {
            g[m] = 0.5 * m as f64 * g[m - 2];
        }
        g.map(|v| 1.0 / v)
    })
}

/// `(1 - E(u) - E(v) + E(u+v)) / (u v)` with `E = erfcx`, for `u, v > 0`.
fn gauss_pair_a(u: f64, v: f64, eu: f64, ev: f64) -> f64 {
    let s = u + v;
    let (u, v, eu, ev) = if u <= v {
        (u, v, eu, ev)
    } else {
        (v, u, ev, eu)
    };
    if s <= 1.5 {
        // E(z) = sum_m (-z)^m / Gamma(m/2 + 1); the m = 0, 1 terms cancel and
        // ((u+v)^m - u^m - v^m) / (u v) obeys P_m = s P_{m-1} + u^{m-2} + v^{m-2}.
        let ig = inv_gamma_half();
        let mut p = 2.0;
        let mut sum = p * ig[2];
        let (mut up, mut vp) = (1.0, 1.0);
        for (m, &g) in ig.iter().enumerate().skip(3) {
            up *= u;
            vp *= v;
            p = s * p + up + vp;
            let term = if m % 2 == 0 { p * g } else { -p * g };
            sum += term;
            if term.abs() <= 1e-17 * sum.abs() && (m as f64) > 2.0 * s * s + 4.0 {
                break;
            }
        }
        return sum;
    }
    if u * v >= 1e-5 {
        return (1.0 - eu - ev + erfcx_unchecked(s)) / (u * v);
    }
    // u tiny, v large: expand 1 - E(u) and E(v + u) - E(v) in u. The
    // -2/sqrt(pi) leading terms of both expansions cancel and are dropped.
    let ig = inv_gamma_half();
    let mut d1 = 0.0;
    let mut up = 1.0;
    for (m, &g) in ig.iter().enumerate().skip(2).take(30) {
        up *= u;
        let term = if m % 2 == 0 { -up * g } else { up * g };
        d1 += term;
        if term.abs() <= 1e-18 {
            break;
        }
    }
    let mut d2 = 2.0 * v * ev;
    let mut e_prev = ev;
    let mut e_cur = 2.0 * v * ev - FRAC_2_SQRT_PI;
    let mut coef = 1.0;
    for m in 2..30 {
        let e_next = 2.0 * v * e_cur + 2.0 * (m - 1) as f64 * e_prev;
        coef *= u / m as f64;
        let term = e_next * coef;
        d2 += term;
        e_prev = e_cur;
        e_cur = e_next;
        if term.abs() <= 1e-17 * d2.abs() {
            break;
        }
    }
    (d1 + d2) / v
}

/// `(F(u + d) - F(u)) / d` with `F(z) = z erfcx(z)`, for `u < 10`.
fn gauss_pair_q(u: f64, d: f64, eu: f64) -> f64 {
    if d >= 0.05 {
        return (x_erfcx_minus_limit(u + d) - x_erfcx_minus_limit(u)) / d;
    }
    // Taylor series in d; F^(m) = z E^(m) + m E^(m-1) and
    // E^(m+1) = 2 z E^(m) + 2 m E^(m-1).
    let mut e_prev = eu;
    let mut e_cur = 2.0 * u * eu - FRAC_2_SQRT_PI;
    let mut sum = u * e_cur + e_prev;
    let mut coef = 1.0;
    for m in 2..60 {
        let e_next = 2.0 * u * e_cur + 2.0 * (m - 1) as f64 * e_prev;
        coef *= d / m as f64;
        let term = (u * e_next + m as f64 * e_cur) * coef;
        sum += term;
        e_prev = e_cur;
        e_cur = e_next;
        if term.abs() <= 1e-17 * sum.abs() {
            break;
        }
    }
    sum
}

/// `B_ij / X_j` for the Gaussian weight when `X_i` is large against
/// `sqrt(a)`, by expanding the weight around `t = 0`:
/// `X_i^{-3} sum_k (-1)^k (2k+1)!/k! (a / X_i^2)^k sum_{l=1}^{2k+2} q^l`,
/// `q = X_i / (X_i + X_j)`. The series is asymptotic and is cut at its
/// smallest term.
fn gauss_pair_b_asymptotic(xi: f64, xj: f64, a: f64) -> f64 {
    let h = a / (xi * xi);
    let q = xi / (xi + xj);
    let mut power = q * q;
    let mut geo = q + power;
    let mut coef = 1.0;
    let mut total = geo;
    let mut last = f64::INFINITY;
    for k in 0..400 {
        coef *= -2.0 * (2 * k + 3) as f64 * h;
        power *= q;
        geo += power;
        power *= q;
        geo += power;
        let term = coef * geo;
        if term.abs() >= last {
            break;
        }
        total += term;
        last = term.abs();
        if last <= 1e-17 * total.abs() {
            break;
        }
    }
    total / (xi * xi * xi)
}

/// `sqrt(pi) (1 + 2 s^2) E(s) - 2 s`.
fn gauss_bracket(s: f64) -> f64 {
    if s < 10.0 {
        return SQRT_PI * (1.0 + 2.0 * s * s) * erfcx_unchecked(s) - 2.0 * s;
    }
    // sum_k (-1)^{k+1} 2k (2k-1)!! / 2^k s^{-(2k+1)}
    let inv2 = 1.0 / (s * s);
    let mut term = inv2 / s;
    let mut total = term;
    for k in 1..400 {
        let next = -term * (k + 1) as f64 / k as f64 * (2 * k + 1) as f64 * 0.5 * inv2;
        if next.abs() >= term.abs() {
            break;
        }
        term = next;
        total += term;
        if term.abs() <= 1e-17 * total.abs() {
            break;
        }
    }
    total
}

fn gauss_weight_sum(x: &[f64], rho: &[f64], a: f64) -> f64 {
    let sqrt_a = a.sqrt();
    let h = 0.5 / sqrt_a;
    // A / (X_i X_j) = K * gauss_pair_a, B / X_j = 2K * Q, C = (2K / sqrt(pi)) * bracket
    let kk = SQRT_PI / (8.0 * a * sqrt_a);
    let u: Vec<f64> = x.iter().map(|xi| xi * h).collect();
    let e: Vec<f64> = u.iter().map(|&ui| erfcx_unchecked(ui)).collect();
    let b_over = |i: usize, j: usize| -> f64 {
        if u[i] >= 10.0 {
            gauss_pair_b_asymptotic(x[i], x[j], a)
        } else {
            2.0 * kk * gauss_pair_q(u[i], u[j], e[i])
        }
    };
    let c_scale = 2.0 * kk / SQRT_PI;
    let mut acc = Compensated::default();
    for i in 0..x.len() {
        let mut row = Compensated::default();
        for j in i..x.len() {
            let a_scaled = kk * gauss_pair_a(u[i], u[j], e[i], e[j]);
            let b_ij = b_over(i, j);
            let b_ji = if i == j { b_ij } else { b_over(j, i) };
            let c = c_scale * gauss_bracket(u[i] + u[j]);
            let term = rho[i] * rho[j] * a_scaled - rho[j] * b_ij - rho[i] * b_ji + c;
            row.add(if i == j { term } else { 2.0 * term });
        }
        acc.add(row.value());
    }
    acc.value()
}

/// `V_n(t)` at a single point.
pub fn vn_at(sample: &Sample, params: WeibullParams, t: f64) -> Result<f64> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::InvalidParameter {
            name: "t",
            value: t,
            reason: "must be nonnegative and finite",
        });
    }
    let r: Vec<f64> = sample
        .values()
        .iter()
        .map(|&x| rho(x, params) / x)
        .collect();
    Ok(vn_raw(sample.values(), &r, t))
}

fn vn_raw(x: &[f64], r: &[f64], t: f64) -> f64 {
    let mut acc = Compensated::default();
    for (&xj, &rj) in x.iter().zip(r) {
        let e = (-t * xj).exp();
        acc.add(-rj * (-t * xj).exp_m1() - t * e);
    }
    acc.value() / (x.len() as f64).sqrt()
}

/// The statistic by adaptive quadrature of `V_n(t)^2 w(t)` over `[0, inf)`,
/// mapped onto `[0, 1)` by `t = u / (1 - u)`.
pub fn statistic_quadrature(
    sample: &Sample,
    params: WeibullParams,
    weight: WeightSpec,
    rel_tol: f64,
) -> Result<StatisticValue> {
    if !(rel_tol > 1e-12 && rel_tol < 1e-2) {
        return Err(Error::InvalidParameter {
            name: "rel_tol",
            value: rel_tol,
            reason: "must lie in (1e-12, 1e-2)",
        });
    }
    let x = sample.values();
    let r: Vec<f64> = x.iter().map(|&xi| rho(xi, params) / xi).collect();
    let integral = integrate_to_infinity(
        |t| {
            let w = weight.eval(t);
            if w == 0.0 {
                return 0.0;
            }
            let v = vn_raw(x, &r, t);
            v * v * w
        },
        0.0,
        Tolerance::relative(rel_tol),
    )?;
    Ok(StatisticValue::clamped(
        integral.value,
        x.len(),
        weight,
        params,
    ))
}

/// Monte Carlo estimate of the population distance
/// `int_0^inf (E[r(X)(1 - e^{-tX})] - E[t e^{-tX}])^2 w(t) dt`
/// between the law of `X` and the Weibull law `params`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GapEstimate {
    pub estimate: f64,
    /// Jackknife standard error over the independent draw groups.
    pub std_error: f64,
    pub groups: usize,
}

const GAP_GROUPS: usize = 20;

/// Estimate the consistency functional by Monte Carlo.
///
/// The draws are split into 20 groups with group means `m_g(t)` of the
/// integrand. The square of the expectation is estimated without bias by
/// averaging `int m_g m_h w` over pairs of distinct groups, so the estimate
/// is centered at zero exactly when the data come from `params`. The
/// integration grid is chosen adaptively on `int sum_g m_g^2 w` and then
/// reused for every pair.
#[allow(clippy::needless_range_loop)]
pub fn characterization_gap(
    params: WeibullParams,
    data_spec: &AlternativeSpec,
    weight: WeightSpec,
    mc_draws: usize,
    stream: RngStream,
) -> Result<GapEstimate> {
    if mc_draws < 1000 {
        return Err(Error::InvalidParameter {
            name: "mc_draws",
            value: mc_draws as f64,
            reason: "need at least 1000 draws",
        });
    }
    let draws = data_spec.sample(mc_draws, stream)?;
    let x = draws.values();
    let r: Vec<f64> = x.iter().map(|&xi| rho(xi, params) / xi).collect();
    let bounds: Vec<usize> = (0..=GAP_GROUPS)
        .map(|g| g * mc_draws / GAP_GROUPS)
        .collect();
    let group_means = |t: f64| -> Vec<f64> {
        (0..GAP_GROUPS)
            .map(|g| {
                let (lo, hi) = (bounds[g], bounds[g + 1]);
                let mut acc = Compensated::default();
                for j in lo..hi {
                    let e = (-t * x[j]).exp();
                    acc.add(-r[j] * (-t * x[j]).exp_m1() - t * e);
                }
                acc.value() / (hi - lo) as f64
            })
            .collect()
    };

    let driver = integrate_to_infinity(
        |t| {
            let w = weight.eval(t);
            if w == 0.0 {
                return 0.0;
            }
            group_means(t).iter().map(|m| m * m).sum::<f64>() * w
        },
        0.0,
        Tolerance::relative(1e-8),
    )?;

    let nodes = kronrod_points_to_infinity(0.0, &driver.intervals);
    let columns: Vec<(f64, Vec<f64>)> = nodes
        .par_iter()
        .map(|&(t, wq)| (wq * weight.eval(t), group_means(t)))
        .collect();
    let mut p = [[0.0f64; GAP_GROUPS]; GAP_GROUPS];
    for (wt, m) in &columns {
        if *wt == 0.0 || !wt.is_finite() {
            continue;
        }
        for g in 0..GAP_GROUPS {
            for h in g..GAP_GROUPS {
                p[g][h] += wt * m[g] * m[h];
            }
        }
    }
    for g in 0..GAP_GROUPS {
        for h in 0..g {
            p[g][h] = p[h][g];
        }
    }

    let off_diagonal = |skip: Option<usize>| -> f64 {
        let mut acc = 0.0;
        for g in 0..GAP_GROUPS {
            for h in 0..GAP_GROUPS {
                if g != h && Some(g) != skip && Some(h) != skip {
                    acc += p[g][h];
                }
            }
        }
        acc
    };
    let big_g = GAP_GROUPS as f64;
    let estimate = off_diagonal(None) / (big_g * (big_g - 1.0));
    let leave_out: Vec<f64> = (0..GAP_GROUPS)
        .map(|g| off_diagonal(Some(g)) / ((big_g - 1.0) * (big_g - 2.0)))
        .collect();
    let mean = leave_out.iter().sum::<f64>() / big_g;
    let var = (big_g - 1.0) / big_g * leave_out.iter().map(|v| (v - mean).powi(2)).sum::<f64>();
    Ok(GapEstimate {
        estimate,
        std_error: var.sqrt(),
        groups: GAP_GROUPS,
    })
}
