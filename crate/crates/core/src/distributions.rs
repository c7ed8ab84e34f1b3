//! The Weibull family, the alternatives of the power study, and their samplers.

use std::fmt;

use rand::distr::Open01;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{check_positive, Error, Result};
use crate::rng::RngStream;

/// Scale `lambda` and shape `k` of a two-parameter Weibull law.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeibullParams {
    lambda: f64,
    k: f64,
}

impl WeibullParams {
    pub fn new(lambda: f64, k: f64) -> Result<Self> {
        Ok(Self {
            lambda: check_positive("lambda", lambda)?,
            k: check_positive("k", k)?,
        })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    /// Density `(k / lambda^k) x^(k-1) exp(-(x / lambda)^k)`.
    pub fn pdf(&self, x: f64) -> Result<f64> {
        check_positive("x", x)?;
        let z = x / self.lambda;
        let zk = z.powf(self.k);
        Ok(self.k / self.lambda * z.powf(self.k - 1.0) * (-zk).exp())
    }

    /// Draw `n` observations by inversion, `lambda * (-ln U)^(1/k)`.
    pub fn sample(&self, n: usize, stream: RngStream) -> Result<Sample> {
        AlternativeSpec::Weibull(*self).sample(n, stream)
    }
}

impl fmt::Display for WeibullParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "W({},{})", self.lambda, self.k)
    }
}

/// Free-function form of [`WeibullParams::pdf`].
pub fn weibull_pdf(params: WeibullParams, x: f64) -> Result<f64> {
    params.pdf(x)
}

/// A data-generating law used in the simulation study.
///
/// Every parameter is positive except the lognormal location `mu`, and the
/// Pareto index must exceed 1. Use the checked constructors, or call
/// [`AlternativeSpec::validate`] on hand-built values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum AlternativeSpec {
    Weibull(WeibullParams),
    /// Shape `a`, scale `s`.
    Gamma {
        a: f64,
        s: f64,
    },
    LogNormal {
        mu: f64,
        sigma: f64,
    },
    /// Shape `alpha`, scale `beta`.
    InverseGamma {
        alpha: f64,
        beta: f64,
    },
    /// `(m / s) * G^(1/g)` with `G ~ Gamma(s, 1)`.
    GeneralizedGamma {
        m: f64,
        s: f64,
        g: f64,
    },
    /// Minimum of independent `W(a, b)` and `W(c, d)`.
    AdditiveWeibull {
        a: f64,
        b: f64,
        c: f64,
        d: f64,
    },
    /// Lomax law with scale `m (s - 1)` and index `s > 1`.
    Pareto {
        m: f64,
        s: f64,
    },
    /// Mean `m`, dispersion `s` (shape `1 / s`).
    InverseGaussian {
        m: f64,
        s: f64,
    },
}

impl AlternativeSpec {
    pub fn weibull(lambda: f64, k: f64) -> Result<Self> {
        Ok(Self::Weibull(WeibullParams::new(lambda, k)?))
    }

    pub fn gamma(a: f64, s: f64) -> Result<Self> {
        Self::Gamma { a, s }.validated()
    }

    pub fn log_normal(mu: f64, sigma: f64) -> Result<Self> {
        Self::LogNormal { mu, sigma }.validated()
    }

    pub fn inverse_gamma(alpha: f64, beta: f64) -> Result<Self> {
        Self::InverseGamma { alpha, beta }.validated()
    }

    pub fn generalized_gamma(m: f64, s: f64, g: f64) -> Result<Self> {
        Self::GeneralizedGamma { m, s, g }.validated()
    }

    pub fn additive_weibull(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        Self::AdditiveWeibull { a, b, c, d }.validated()
    }

    pub fn pareto(m: f64, s: f64) -> Result<Self> {
        Self::Pareto { m, s }.validated()
    }

    pub fn inverse_gaussian(m: f64, s: f64) -> Result<Self> {
        Self::InverseGaussian { m, s }.validated()
    }

    fn validated(self) -> Result<Self> {
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::Weibull(p) => {
                WeibullParams::new(p.lambda, p.k)?;
            }
            Self::Gamma { a, s } => {
                check_positive("a", a)?;
                check_positive("s", s)?;
            }
            Self::LogNormal { mu, sigma } => {
                if !mu.is_finite() {
                    return Err(Error::InvalidParameter {
                        name: "mu",
                        value: mu,
                        reason: "must be finite",
                    });
                }
                check_positive("sigma", sigma)?;
            }
            Self::InverseGamma { alpha, beta } => {
                check_positive("alpha", alpha)?;
                check_positive("beta", beta)?;
            }
            Self::GeneralizedGamma { m, s, g } => {
                check_positive("m", m)?;
                check_positive("s", s)?;
                check_positive("g", g)?;
            }
            Self::AdditiveWeibull { a, b, c, d } => {
                check_positive("a", a)?;
                check_positive("b", b)?;
                check_positive("c", c)?;
                check_positive("d", d)?;
            }
            Self::Pareto { m, s } => {
                check_positive("m", m)?;
                if !(s.is_finite() && s > 1.0) {
                    return Err(Error::InvalidParameter {
                        name: "s",
                        value: s,
                        reason: "Pareto index must exceed 1",
                    });
                }
            }
            Self::InverseGaussian { m, s } => {
                check_positive("m", m)?;
                check_positive("s", s)?;
            }
        }
        Ok(())
    }

    pub fn family_name(&self) -> &'static str {
        match self {
            Self::Weibull(_) => "Weibull",
            Self::Gamma { .. } => "Gamma",
            Self::LogNormal { .. } => "LogNormal",
            Self::InverseGamma { .. } => "InverseGamma",
            Self::GeneralizedGamma { .. } => "GeneralizedGamma",
            Self::AdditiveWeibull { .. } => "AdditiveWeibull",
            Self::Pareto { .. } => "Pareto",
            Self::InverseGaussian { .. } => "InverseGaussian",
        }
    }

    /// Natural log of the density at `x > 0`.
    pub fn ln_pdf(&self, x: f64) -> Result<f64> {
        check_positive("x", x)?;
        self.validate()?;
        let lx = x.ln();
        let v = match *self {
            Self::Weibull(p) => {
                let z = x / p.lambda;
                p.k.ln() - p.lambda.ln() + (p.k - 1.0) * z.ln() - z.powf(p.k)
            }
            Self::Gamma { a, s } => -a * s.ln() - ln_gamma(a) + (a - 1.0) * lx - x / s,
            Self::LogNormal { mu, sigma } => {
                let z = (lx - mu) / sigma;
                -0.5 * (2.0 * std::f64::consts::PI).ln() - sigma.ln() - lx - 0.5 * z * z
            }
            Self::InverseGamma { alpha, beta } => {
                alpha * beta.ln() - ln_gamma(alpha) - (1.0 + alpha) * lx - beta / x
            }
            Self::GeneralizedGamma { m, s, g } => {
                g.ln() + (g * s - 1.0) * lx
                    - g * s * (m / s).ln()
                    - ln_gamma(s)
                    - (x * s / m).powf(g)
            }
            Self::AdditiveWeibull { a, b, c, d } => {
                // log of the hazard sum, kept finite where the hazards overflow
                let l1 = (b / a).ln() + (b - 1.0) * (x / a).ln();
                let l2 = (d / c).ln() + (d - 1.0) * (x / c).ln();
                let (hi, lo) = if l1 >= l2 { (l1, l2) } else { (l2, l1) };
                hi + (lo - hi).exp().ln_1p() - (x / a).powf(b) - (x / c).powf(d)
            }
            Self::Pareto { m, s } => {
                let scale = m * (s - 1.0);
                s.ln() - scale.ln() - (s + 1.0) * (x / scale).ln_1p()
            }
            Self::InverseGaussian { m, s } => {
                -0.5 * (2.0 * std::f64::consts::PI * s).ln()
                    - 1.5 * lx
                    - (x - m) * (x - m) / (2.0 * x * s * m * m)
            }
        };
        Ok(v)
    }

    /// Log-density of `Y = ln X` at `y`. Finite even where `e^y` is not
    /// representable, which matters for laws that put most of their mass
    /// below the smallest double.
    pub fn ln_pdf_of_log(&self, y: f64) -> Result<f64> {
        self.validate()?;
        if let Self::GeneralizedGamma { m, s, g } = *self {
            let z = g * (y - (m / s).ln());
            return Ok(g.ln() + s * z - ln_gamma(s) - z.exp());
        }
        let x = y.exp();
        if x == 0.0 || !x.is_finite() {
            return Ok(f64::NEG_INFINITY);
        }
        Ok(self.ln_pdf(x)? + y)
    }

    /// Density at `x > 0`.
    pub fn pdf(&self, x: f64) -> Result<f64> {
        if let Self::Weibull(p) = self {
            return p.pdf(x);
        }
        Ok(self.ln_pdf(x)?.exp())
    }

    /// One draw of `ln X`.
    pub fn draw_ln<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            Self::Weibull(p) => ln_weibull_draw(p.lambda, p.k, rng),
            Self::Gamma { a, s } => s.ln() + ln_gamma_draw(a, rng),
            Self::LogNormal { mu, sigma } => {
                let z: f64 = rng.sample(StandardNormal);
                mu + sigma * z
            }
            Self::InverseGamma { alpha, beta } => beta.ln() - ln_gamma_draw(alpha, rng),
            Self::GeneralizedGamma { m, s, g } => (m / s).ln() + ln_gamma_draw(s, rng) / g,
            Self::AdditiveWeibull { a, b, c, d } => {
                let first = ln_weibull_draw(a, b, rng);
                let second = ln_weibull_draw(c, d, rng);
                first.min(second)
            }
            Self::Pareto { m, s } => {
                let u: f64 = rng.sample(Open01);
                (m * (s - 1.0)).ln() + (-u.ln() / s).exp_m1().ln()
            }
            Self::InverseGaussian { m, s } => inverse_gaussian_draw(m, 1.0 / s, rng).ln(),
        }
    }

    /// `n` i.i.d. draws of `ln X`. Always representable, even for laws whose
    /// draws underflow the double range.
    pub fn sample_ln(&self, n: usize, stream: RngStream) -> Result<Vec<f64>> {
        self.validate()?;
        let mut rng = stream.rng();
        Ok((0..n).map(|_| self.draw_ln(&mut rng)).collect())
    }

    /// `n` i.i.d. draws.
    ///
    /// Fails with [`Error::Unrepresentable`] if a draw falls outside the
    /// positive finite doubles, which happens for extreme generalized gamma
    /// parameters.
    pub fn sample(&self, n: usize, stream: RngStream) -> Result<Sample> {
        if n == 0 {
            return Err(Error::EmptySample);
        }
        let logs = self.sample_ln(n, stream)?;
        let mut values = Vec::with_capacity(n);
        for ln_value in logs {
            let x = ln_value.exp();
            if !(x > 0.0 && x.is_finite()) {
                return Err(Error::Unrepresentable {
                    family: self.family_name(),
                    ln_value,
                });
            }
            values.push(x);
        }
        Sample::new(values)
    }
}

impl fmt::Display for AlternativeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Weibull(p) => write!(f, "{p}"),
            Self::Gamma { a, s } => write!(f, "Gamma({a},{s})"),
            Self::LogNormal { mu, sigma } => write!(f, "LN({mu},{sigma})"),
            Self::InverseGamma { alpha, beta } => write!(f, "iGamma({alpha},{beta})"),
            Self::GeneralizedGamma { m, s, g } => write!(f, "GG({m},{s},{g})"),
            Self::AdditiveWeibull { a, b, c, d } => write!(f, "AddW({a},{b},{c},{d})"),
            Self::Pareto { m, s } => write!(f, "P({m},{s})"),
            Self::InverseGaussian { m, s } => write!(f, "IG({m},{s})"),
        }
    }
}

/// Free-function form of [`AlternativeSpec::pdf`].
pub fn alternative_pdf(spec: &AlternativeSpec, x: f64) -> Result<f64> {
    spec.pdf(x)
}

/// Free-function form of [`AlternativeSpec::sample`].
pub fn sample(spec: &AlternativeSpec, n: usize, stream: RngStream) -> Result<Sample> {
    spec.sample(n, stream)
}

fn ln_weibull_draw<R: Rng + ?Sized>(lambda: f64, k: f64, rng: &mut R) -> f64 {
    let u: f64 = rng.sample(Open01);
    lambda.ln() + (-u.ln()).ln() / k
}

/// `ln G` for `G ~ Gamma(shape, 1)`.
///
/// Marsaglia–Tsang squeeze/rejection for `shape >= 1`; smaller shapes use
/// `G = G' U^(1/shape)` with `G' ~ Gamma(shape + 1)`, kept in log space so
/// that tiny shapes cannot round to zero.
pub(crate) fn ln_gamma_draw<R: Rng + ?Sized>(shape: f64, rng: &mut R) -> f64 {
    if shape < 1.0 {
        let u: f64 = rng.sample(Open01);
        return ln_gamma_draw(shape + 1.0, rng) + u.ln() / shape;
    }
    let d = shape - 1.0 / 3.0;
    let c = 1.0 / (9.0 * d).sqrt();
    loop {
        let z: f64 = rng.sample(StandardNormal);
        let v = 1.0 + c * z;
        if v <= 0.0 {
            continue;
        }
        let v = v * v * v;
        let u: f64 = rng.sample(Open01);
        let z2 = z * z;
        if u < 1.0 - 0.0331 * z2 * z2 {
            return d.ln() + v.ln();
        }
        if u.ln() < 0.5 * z2 + d * (1.0 - v + v.ln()) {
            return d.ln() + v.ln();
        }
    }
}

/// Michael–Schucany–Haas transformation with multiple roots.
fn inverse_gaussian_draw<R: Rng + ?Sized>(mean: f64, shape: f64, rng: &mut R) -> f64 {
    let nu: f64 = rng.sample(StandardNormal);
    let q = mean * nu * nu / (2.0 * shape);
    // smaller root mean * (1 + q - sqrt(q^2 + 2q)), in cancellation-free form
    let root = mean / (1.0 + q + (q * (q + 2.0)).sqrt());
    let u: f64 = rng.sample(Open01);
    if u <= mean / (mean + root) {
        root
    } else {
        mean * mean / root
    }
}

/// Nonempty list of positive, finite observations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Sample {
    values: Vec<f64>,
}

impl Sample {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptySample);
        }
        if let Some((index, &value)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| !(v.is_finite() && **v > 0.0))
        {
            return Err(Error::NonPositiveData { index, value });
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// The sample multiplied by `c > 0`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        check_positive("c", c)?;
        Self::new(self.values.iter().map(|v| v * c).collect())
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.values
    }
}

impl TryFrom<Vec<f64>> for Sample {
    type Error = Error;

    fn try_from(values: Vec<f64>) -> Result<Self> {
        Self::new(values)
    }
}

impl From<Sample> for Vec<f64> {
    fn from(s: Sample) -> Self {
        s.values
    }
}

impl AsRef<[f64]> for Sample {
    fn as_ref(&self) -> &[f64] {
        &self.values
    }
}
