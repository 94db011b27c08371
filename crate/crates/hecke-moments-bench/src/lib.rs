//! Shared fixtures for the criterion benchmarks.

use hecke_moments::transforms::GaussianWeight;
use hecke_moments::{ComplexValue, PrecisionContext};

/// Precision used by every benchmark.
pub fn bench_ctx() -> PrecisionContext {
    PrecisionContext::new(50, 1e-12, 10_000).expect("valid context")
}

/// A small spectral weight whose transforms stay cheap.
pub fn small_weight() -> GaussianWeight {
    GaussianWeight::kuznetsov(30.0, 3.0).expect("valid weight")
}

pub fn point(ctx: &PrecisionContext, re: f64, im: f64) -> ComplexValue {
    ComplexValue::from_f64(ctx.bits(), re, im)
}
