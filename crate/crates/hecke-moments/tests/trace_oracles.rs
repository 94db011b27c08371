use hecke_moments::spectral_data::{trace_rhs_with, PSI_ALPHA};
use hecke_moments::transforms::{GaussianWeight, LineKernels};
use hecke_moments::{ComplexValue, PrecisionContext};

#[test]
fn trace_sum_is_stable_and_line_independent() {
    let cx = PrecisionContext::new(30, 1e-10, 1000).unwrap();
    let w = GaussianWeight::kuznetsov(50.0, 10.0).unwrap();
    let kern = LineKernels::new(w, &cx);
    let u = ComplexValue::from_f64(cx.bits(), 0.0, 0.0);
    let a = trace_rhs_with(&kern, 1, &u, 32, PSI_ALPHA, &cx).unwrap();
    let b = trace_rhs_with(&kern, 1, &u, 64, PSI_ALPHA, &cx).unwrap();
    let v = b.value.abs_f64();
    assert!(v > 1e-9);
    assert!((&a.value - &b.value).abs_f64() < 10.0 * cx.rel_tol * v);
    // the envelope bound is far from sharp but must dominate the observed change
    assert!((&a.value - &b.value).abs_f64() <= a.tail_bound);
    let q = a.error - a.tail_bound;
    let c = trace_rhs_with(&kern, 1, &u, 32, -PSI_ALPHA, &cx).unwrap();
    let qc = c.error - c.tail_bound;
    assert!((&a.value - &c.value).abs_f64() <= q + qc, "{:?} {:?}", a.value.to_f64(), c.value.to_f64());
}
