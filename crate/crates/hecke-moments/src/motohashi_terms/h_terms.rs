use rug::float::Constant;
use rug::Float;
use serde::Serialize;

use crate::complex::ComplexValue;
use crate::error::{HeckeError, Result};
use crate::moment_integrals::h7_term_detailed;
use crate::precision::PrecisionContext;
use crate::quad::taylor_coefficients;
use crate::special_functions::arith::euler_gamma;
use crate::special_functions::{divisor_d, sigma_minus_one};
use crate::transforms::{h_star, GaussianWeight, LineKernels};

/// Abscissa of the `Psi+-` lines used by the series terms.
pub const DEFAULT_PSI_BETA: f64 = -0.4;
/// Radius of the Cauchy circle for `h*'(1/2)` and `h*''(1/2)`.
pub const HSTAR_JET_RADIUS: f64 = 0.1;

/// A term value with its absolute error, the number of series terms used and the booked tail.
#[derive(Clone, Debug, Serialize)]
pub struct TermValue {
    pub value: ComplexValue,
    pub error: f64,
    pub terms: usize,
    pub tail_bound: f64,
}

impl TermValue {
    fn exact(value: ComplexValue, error: f64) -> Self {
        TermValue { value, error, terms: 0, tail_bound: 0.0 }
    }
}

fn pi_pow(p: u32, k: i32) -> Float {
    let pi = Float::with_val(p, Constant::Pi);
    Float::with_val(p, rug::ops::Pow::pow(&pi, k))
}

/// `(h*'(1/2), h*''(1/2))` from a Cauchy circle.
pub fn h_star_jet_at_half(w: &GaussianWeight, ctx: &PrecisionContext) -> Result<(ComplexValue, ComplexValue)> {
    let p = ctx.bits();
    if w.is_zero() {
        return Ok((ComplexValue::zero(p), ComplexValue::zero(p)));
    }
    let c = taylor_coefficients(
        |s| h_star(s, w, ctx),
        &ComplexValue::from_f64(p, 0.5, 0.0),
        HSTAR_JET_RADIUS,
        2,
        ctx.rel_tol * 1e-2,
        ctx,
    )?;
    Ok((c[1].clone(), c[2].mul_f64(2.0)))
}

/// `H1` from precomputed `h*'(1/2)` and `h*''(1/2)`.
pub fn h1_from_jet(f: u64, d1: &ComplexValue, d2: &ComplexValue, ctx: &PrecisionContext) -> Result<ComplexValue> {
    if f == 0 {
        return Err(HeckeError::Domain("f must be positive".into()));
    }
    let p = ctx.bits();
    let ff = Float::with_val(p, f);
    let two_pi_sqrt_f = Float::with_val(p, Constant::Pi) * 2u32 * Float::with_val(p, ff.sqrt_ref());
    let shift = euler_gamma(ctx) - two_pi_sqrt_f.ln();
    let inner = &d1.mul_real(&shift) + &d2.mul_f64(0.25);
    let scale = Float::with_val(p, divisor_d(f)) / ff.sqrt() / pi_pow(p, 3) * -2i32;
    Ok(inner.mul_real(&scale).mul_i())
}

/// `H1(f; h) = -2 pi^{-3} i {(gamma - log(2 pi sqrt f)) h*'(1/2) + h*''(1/2)/4} d(f) f^{-1/2}`.
pub fn h1_term(f: u64, w: &GaussianWeight, ctx: &PrecisionContext) -> Result<ComplexValue> {
    let (d1, d2) = h_star_jet_at_half(w, ctx)?;
    h1_from_jet(f, &d1, &d2, ctx)
}

/// Gaussian envelope `-G^2 asinh^2(sqrt x)` of `log |Psi+-(x)|`, up to slowly varying factors.
fn log_envelope(x: f64, width: f64) -> f64 {
    let a = x.sqrt().asinh();
    -width * width * a * a
}

/// `sum_m coef(m) Psi(arg(m))` for `m = 1..=last`.
///
/// The series is cut once the envelope of the remaining terms, anchored on the computed
/// ones, falls below the error already accumulated or below `rel_tol` of the partial sum.
fn psi_series<C, A>(
    lk: &LineKernels,
    plus: bool,
    beta: f64,
    last: u64,
    finite: bool,
    coef: C,
    arg: A,
    ctx: &PrecisionContext,
) -> Result<TermValue>
where
    C: Fn(u64) -> f64,
    A: Fn(u64) -> f64,
{
    let p = ctx.bits();
    let width = lk.weight().width;
    let mut sum = ComplexValue::zero(p);
    let mut err = 0.0;
    let mut log_anchor: Option<f64> = None;
    let mut first: Option<f64> = None;
    let mut tail = 0.0;
    let mut m = 0;
    while m < last {
        m += 1;
        let x = arg(m);
        let r = if plus { lk.psi_plus(x, beta)? } else { lk.psi_minus(x, beta)? };
        let c = coef(m);
        sum += &r.value.mul_f64(c);
        err += c * r.error.to_f64();
        if finite {
            continue;
        }
        let (v, e) = (r.value.abs_f64(), r.error.to_f64());
        let ratio = (v + e).ln() - log_envelope(x, width);
        if v > 10.0 * e {
            log_anchor = Some(log_anchor.map_or(ratio, |a: f64| a.max(ratio)));
        }
        first.get_or_insert(ratio);
        let anchor = log_anchor.or(first).unwrap_or(0.0);
        tail = envelope_tail(m, anchor, width, &coef, &arg);
        if tail <= err.max(ctx.rel_tol * sum.abs_f64()) {
            break;
        }
    }
    if !finite && tail > err.max(ctx.rel_tol * sum.abs_f64()) {
        return Err(HeckeError::TailNotCertified(format!(
            "series tail {:e} after {} terms exceeds {:e}",
            tail,
            m,
            err.max(ctx.rel_tol * sum.abs_f64())
        )));
    }
    let pi3 = pi_pow(p, 3);
    let scale = pi3.to_f64();
    Ok(TermValue { value: sum.div_real(&pi3), error: (err + tail) / scale, terms: m as usize, tail_bound: tail / scale })
}

/// `sum_{m' > m} |coef(m')| e^{anchor + envelope(arg(m'))}`, summed until the terms die out.
fn envelope_tail<C: Fn(u64) -> f64, A: Fn(u64) -> f64>(m: u64, anchor: f64, width: f64, coef: &C, arg: &A) -> f64 {
    let mut total = 0.0;
    let mut j = m;
    loop {
        j += 1;
        let t = coef(j).abs().ln() + anchor + log_envelope(arg(j), width);
        let term = t.exp();
        total += term;
        if t < -745.0 || term < 1e-30 * total || j > m + 1_000_000 {
            return total;
        }
    }
}

/// `H2`, `H3`, `H4` of the explicit formula.
#[derive(Clone, Debug, Serialize)]
pub struct SeriesTerms {
    pub h2: TermValue,
    pub h3: TermValue,
    pub h4: TermValue,
}

/// `H2 = pi^{-3} sum m^{-1/2} d(m) d(m+f) Psi+(m/f)`,
/// `H3 = pi^{-3} sum (m+f)^{-1/2} d(m) d(m+f) Psi-(1 + m/f)`,
/// `H4 = pi^{-3} sum_{m < f} m^{-1/2} d(m) d(f-m) Psi-(m/f)`.
///
/// The infinite series run to at most `cutoff` terms.
pub fn h2_h3_h4_terms(f: u64, w: &GaussianWeight, cutoff: u64, ctx: &PrecisionContext) -> Result<SeriesTerms> {
    let lk = LineKernels::new(*w, ctx);
    h2_h3_h4_with(&lk, f, cutoff, DEFAULT_PSI_BETA, ctx)
}

/// As [`h2_h3_h4_terms`], reusing the line values held by `lk`.
pub fn h2_h3_h4_with(lk: &LineKernels, f: u64, cutoff: u64, beta: f64, ctx: &PrecisionContext) -> Result<SeriesTerms> {
    if f == 0 {
        return Err(HeckeError::Domain("f must be positive".into()));
    }
    if cutoff == 0 {
        return Err(HeckeError::Domain("cutoff must be positive".into()));
    }
    let ff = f as f64;
    let h2 = psi_series(
        lk,
        true,
        beta,
        cutoff,
        false,
        |m| (m as f64).powf(-0.5) * (divisor_d(m) * divisor_d(m + f)) as f64,
        |m| m as f64 / ff,
        ctx,
    )?;
    let h3 = psi_series(
        lk,
        false,
        beta,
        cutoff,
        false,
        |m| ((m + f) as f64).powf(-0.5) * (divisor_d(m) * divisor_d(m + f)) as f64,
        |m| 1.0 + m as f64 / ff,
        ctx,
    )?;
    let h4 = psi_series(
        lk,
        false,
        beta,
        f - 1,
        true,
        |m| (m as f64).powf(-0.5) * (divisor_d(m) * divisor_d(f - m)) as f64,
        |m| m as f64 / ff,
        ctx,
    )?;
    Ok(SeriesTerms { h2, h3, h4 })
}

/// `H5 = -(2 pi^3)^{-1} f^{-1/2} d(f) Psi-(1)` and `H6 = -12 pi^{-2} i sigma_{-1}(f) f^{1/2} h'(-i/2)`.
pub fn h5_h6_terms(f: u64, w: &GaussianWeight, ctx: &PrecisionContext) -> Result<(TermValue, TermValue)> {
    let lk = LineKernels::new(*w, ctx);
    h5_h6_with(&lk, f, DEFAULT_PSI_BETA, ctx)
}

pub fn h5_h6_with(lk: &LineKernels, f: u64, beta: f64, ctx: &PrecisionContext) -> Result<(TermValue, TermValue)> {
    if f == 0 {
        return Err(HeckeError::Domain("f must be positive".into()));
    }
    let p = ctx.bits();
    let psi = lk.psi_minus(1.0, beta)?;
    let s5 = divisor_d(f) as f64 / (f as f64).sqrt() / (2.0 * pi_pow(p, 3).to_f64());
    let h5 = TermValue::exact(psi.value.mul_f64(-s5), psi.error.to_f64() * s5);
    let hd = lk.weight().derivative(&ComplexValue::from_f64(p, 0.0, -0.5), ctx)?;
    let s6 = Float::with_val(p, sigma_minus_one(f)) * Float::with_val(p, f).sqrt() * 12u32 / pi_pow(p, 2);
    let h6 = TermValue::exact(hd.mul_real(&s6).mul_i().mul_f64(-1.0), 0.0);
    Ok((h5, h6))
}

/// One of `H1..H7` by index.
pub fn h_term(which: u32, f: u64, w: &GaussianWeight, cutoff: u64, ctx: &PrecisionContext) -> Result<TermValue> {
    match which {
        1 => Ok(TermValue::exact(h1_term(f, w, ctx)?, 0.0)),
        2..=4 => {
            let t = h2_h3_h4_terms(f, w, cutoff, ctx)?;
            Ok(match which {
                2 => t.h2,
                3 => t.h3,
                _ => t.h4,
            })
        }
        5 | 6 => {
            let (a, b) = h5_h6_terms(f, w, ctx)?;
            Ok(if which == 5 { a } else { b })
        }
        7 => {
            let r = h7_term_detailed(f, w, ctx)?;
            Ok(TermValue::exact(r.value, r.error.to_f64()))
        }
        _ => Err(HeckeError::Domain(format!("term index {} not in 1..=7", which))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> PrecisionContext {
        PrecisionContext::new(30, 1e-10, 1000).unwrap()
    }

    #[test]
    fn h1_scales_with_the_divisor_factor() {
        let cx = ctx();
        let p = cx.bits();
        let d1 = ComplexValue::from_f64(p, 0.0, 3.0);
        let d2 = ComplexValue::from_f64(p, 0.0, 40.0);
        let a = h1_from_jet(1, &d1, &d2, &cx).unwrap();
        let b = h1_from_jet(4, &d1, &d2, &cx).unwrap();
        // recomputed by hand: d(4)/sqrt 4 = 3/2 and the shift moves by -log 2
        let shift = |f: f64| 0.5772156649015329 - (2.0 * std::f64::consts::PI * f.sqrt()).ln();
        let pi3 = std::f64::consts::PI.powi(3);
        let want = |f: f64, df: f64| 2.0 / pi3 * (shift(f) * 3.0 + 10.0) * df / f.sqrt();
        assert!((a.re.to_f64() - want(1.0, 1.0)).abs() < 1e-14);
        assert!((b.re.to_f64() - want(4.0, 3.0)).abs() < 1e-14);
    }

    #[test]
    fn zero_weight_terms_vanish() {
        let cx = ctx();
        let w = GaussianWeight::quadratic(40.0, 3.0).unwrap().scaled(0.0);
        for which in 1..=6 {
            assert!(h_term(which, 3, &w, 10, &cx).unwrap().value.is_zero(), "H{}", which);
        }
    }

    #[test]
    fn h6_matches_direct_recomputation() {
        let cx = ctx();
        let w = GaussianWeight::quadratic(30.0, 3.0).unwrap();
        let (_, h6) = h5_h6_terms(6, &w, &cx).unwrap();
        let hd = w.derivative(&ComplexValue::from_f64(cx.bits(), 0.0, -0.5), &cx).unwrap();
        let want = 12.0 / std::f64::consts::PI.powi(2) * 2.0 * 6f64.sqrt() * hd.abs_f64();
        assert!((h6.value.abs_f64() / want - 1.0).abs() < 1e-14);
    }
}
