//! Fixtures shared by the benchmarks.

use weibull_gof::{AlternativeSpec, RngStream, Sample};

/// A Weibull sample of size `n` with a fixed seed.
pub fn fixture(n: usize) -> Sample {
    AlternativeSpec::weibull(1.0, 1.5)
        .and_then(|law| law.sample(n, RngStream::new(2024, n as u64)))
        .expect("fixed parameters are valid")
}
