//! Critical-line moments of zeta and the continuous-spectrum integrals weighted by `1/|zeta(1+2ir)|^2`.

use std::f64::consts::PI;

use rug::Float;

use crate::complex::ComplexValue;
use crate::error::{HeckeError, Result};
use crate::precision::{Estimate, PrecisionContext};
use crate::quad::{integrate, mag, QuadOptions, QuadResult, MAG_PREC};
use crate::special_functions::{riemann_zeta, sigma_alpha};
use crate::transforms::GaussianWeight;

/// Largest height handled at the default precision.
pub const MAX_MOMENT_HEIGHT: f64 = 500.0;

/// Panel length covering about a quarter of the local zero spacing at height `t`.
pub fn panel_length(t: f64) -> f64 {
    let l = (t.max(2.0 * PI * std::f64::consts::E) / (2.0 * PI)).ln();
    (PI / (2.0 * l)).min(1.0)
}

fn zeta_abs2(r: &Float, sigma: f64, scale: f64, ctx: &PrecisionContext) -> Result<Float> {
    let p = ctx.bits();
    let s = ComplexValue::new(Float::with_val(p, sigma), Float::with_val(p, r * scale));
    Ok(riemann_zeta(&s, ctx)?.norm_sqr())
}

fn check_height(t: f64, ctx: &PrecisionContext) -> Result<()> {
    // the Euler-Maclaurin zeta loses about log10(t) digits to cancellation
    let limit = MAX_MOMENT_HEIGHT * (ctx.digits as f64 / 30.0).max(1.0);
    if t > limit {
        return Err(HeckeError::PrecisionInsufficient(format!(
            "height {} above {} at {} digits",
            t, limit, ctx.digits
        )));
    }
    Ok(())
}

/// `int_0^T |zeta(1/2 + it)|^{2k} dt` with its error bound.
pub fn zeta_moment_detailed(t: f64, k: u32, ctx: &PrecisionContext) -> Result<QuadResult> {
    let p = ctx.bits();
    if !(1..=4).contains(&k) {
        return Err(HeckeError::Domain(format!("moment order k = {} not in 1..=4", k)));
    }
    if !(t >= 0.0) {
        return Err(HeckeError::Domain(format!("height must be nonnegative, got {}", t)));
    }
    check_height(t, ctx)?;
    if t == 0.0 {
        return Ok(QuadResult { value: ComplexValue::zero(p), error: mag(0.0), l1: mag(0.0), evals: 0 });
    }
    let panels = (t / panel_length(t)).ceil() as usize;
    let opts = QuadOptions::from_ctx(ctx).panels(panels);
    integrate(
        |x| Ok(ComplexValue::real(rug::ops::Pow::pow(zeta_abs2(x, 0.5, 1.0, ctx)?, k))),
        &Float::with_val(p, 0),
        &Float::with_val(p, t),
        &opts,
        ctx,
    )
}

/// `int_0^T |zeta(1/2 + it)|^{2k} dt`.
pub fn zeta_moment(t: f64, k: u32, ctx: &PrecisionContext) -> Result<Estimate> {
    let r = zeta_moment_detailed(t, k, ctx)?;
    Ok(Estimate::new(r.value.re, r.error.to_f64()))
}

/// Crude explicit envelope of `|zeta(1/2+ir)|^{2k} / |zeta(1+2ir)|^2` for `r >= 3`, used only to
/// book the discarded tails.
fn ratio_envelope(r: f64, k: u32) -> f64 {
    let r = r.max(3.0);
    let l = r.ln();
    (0.7 * r.powf(1.0 / 6.0) * l).powi(2 * k as i32) * (50.0 * l).powi(2)
}

/// Half-width of the integration window in units of the weight width.
pub fn spectral_window(w: &GaussianWeight, k: u32, tol: f64) -> f64 {
    let base = (-tol.ln()).sqrt() + 1.0 + (w.prefactor_degree() as f64 + k as f64).sqrt();
    base.max(w.center.max(1.0).ln())
}

/// `int_R |zeta(1/2+ir)|^{2k} / |zeta(1+2ir)|^2 * g(r) h(r) dr` for `g` with `g(-r) = conj g(r)`.
///
/// Both halves of the line are folded onto `r >= 0`, where the window `|r - center| <= ell * width`
/// is integrated. The discarded part is bounded through the Gaussian decay of the weight.
fn folded_integral<G>(k: u32, w: &GaussianWeight, ell: f64, mut g: G, ctx: &PrecisionContext) -> Result<QuadResult>
where
    G: FnMut(&Float) -> ComplexValue,
{
    let p = ctx.bits();
    if !(0..=4).contains(&k) {
        return Err(HeckeError::Domain(format!("moment order k = {} not in 0..=4", k)));
    }
    if w.is_zero() {
        return Ok(QuadResult { value: ComplexValue::zero(p), error: mag(0.0), l1: mag(0.0), evals: 0 });
    }
    let lo = (w.center - ell * w.width).max(0.0);
    let hi = w.center + ell * w.width;
    check_height(hi, ctx)?;
    let panels = ((hi - lo) / panel_length(hi)).ceil() as usize;
    let opts = QuadOptions::from_ctx(ctx).panels(panels);
    let mut r = integrate(
        |r| {
            if r.is_zero() {
                return Ok(ComplexValue::zero(p));
            }
            let num = rug::ops::Pow::pow(zeta_abs2(r, 0.5, 1.0, ctx)?, k);
            let den = zeta_abs2(r, 1.0, 2.0, ctx)?;
            let hv = w.eval_real(r, ctx);
            Ok(g(r).mul_real(&(num / den * hv)))
        },
        &Float::with_val(p, lo),
        &Float::with_val(p, hi),
        &opts,
        ctx,
    )?;
    // tails past the window: Gaussian mass times the envelope and the prefactor at the far end
    let far = hi + w.width * ell;
    let pre = (far * far + 2.25).powi(w.prefactor_degree() as i32 / 2 + 1);
    let gauss = w.width * (-(ell * ell)).exp() / ell;
    let tail = 2.0 * w.amplitude.abs() * pre * gauss * ratio_envelope(far, k) * g_bound(&mut g, far, p);
    r.error += Float::with_val(MAG_PREC, tail);
    Ok(r)
}

fn g_bound<G: FnMut(&Float) -> ComplexValue>(g: &mut G, at: f64, p: u32) -> f64 {
    g(&Float::with_val(p, at)).abs_f64().max(1.0)
}

/// `int_R |zeta(1/2+ir)|^{2k} / |zeta(1+2ir)|^2 h(r) dr`.
pub fn weighted_spectral_integral(k: u32, w: &GaussianWeight, ctx: &PrecisionContext) -> Result<Estimate> {
    let ell = spectral_window(w, k, ctx.rel_tol * 1e-2);
    weighted_spectral_integral_window(k, w, ell, ctx)
}

/// As [`weighted_spectral_integral`] with an explicit window half-width in weight widths.
pub fn weighted_spectral_integral_window(k: u32, w: &GaussianWeight, ell: f64, ctx: &PrecisionContext) -> Result<Estimate> {
    let p = ctx.bits();
    let r = folded_integral(k, w, ell, |_| ComplexValue::from_f64(p, 2.0, 0.0), ctx)?;
    Ok(Estimate::new(r.value.re, r.error.to_f64()))
}

/// `-pi^{-1} int_R |zeta(1/2+ir)|^4 / |zeta(1+2ir)|^2 sigma_{2ir}(f) f^{-ir} h(r) dr`.
///
/// The `r` and `-r` contributions are computed separately, so the imaginary part of the result
/// measures the rounding left after they pair up.
pub fn h7_term(f: u64, w: &GaussianWeight, ctx: &PrecisionContext) -> Result<ComplexValue> {
    Ok(h7_term_detailed(f, w, ctx)?.value)
}

pub fn h7_term_detailed(f: u64, w: &GaussianWeight, ctx: &PrecisionContext) -> Result<QuadResult> {
    if f == 0 || f > 100 {
        return Err(HeckeError::Domain(format!("f = {} outside 1..=100", f)));
    }
    let p = ctx.bits();
    let lf = Float::with_val(p, f).ln();
    let ell = spectral_window(w, 2, ctx.rel_tol * 1e-2);
    let mut r = folded_integral(
        2,
        w,
        ell,
        |r| {
            let one = |sign: f64| {
                let ir = ComplexValue::imag(Float::with_val(p, r * sign));
                let sig = sigma_alpha(f, &ir.mul_f64(2.0), ctx);
                let twist = ir.mul_real(&lf).mul_f64(-1.0).exp();
                &sig * &twist
            };
            &one(1.0) + &one(-1.0)
        },
        ctx,
    )?;
    let pi = ComplexValue::pi(p);
    r.value = r.value.div_real(&pi).mul_f64(-1.0);
    r.error = Float::with_val(MAG_PREC, &r.error / PI);
    r.l1 = Float::with_val(MAG_PREC, &r.l1 / PI);
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> PrecisionContext {
        PrecisionContext::new(30, 1e-10, 1000).unwrap()
    }

    #[test]
    fn second_moment_matches_fixed_step() {
        let cx = ctx();
        let p = cx.bits();
        let got = zeta_moment(10.0, 1, &cx).unwrap().to_f64();
        // composite Simpson with step 1e-3
        let n = 10_000;
        let h = 10.0 / n as f64;
        let mut acc = 0.0;
        for i in 0..=n {
            let wt = if i == 0 || i == n { 1.0 } else if i % 2 == 1 { 4.0 } else { 2.0 };
            acc += wt * zeta_abs2(&Float::with_val(p, i as f64 * h), 0.5, 1.0, &cx).unwrap().to_f64();
        }
        let want = acc * h / 3.0;
        assert!((got / want - 1.0).abs() < 1e-6, "{} {}", got, want);
    }

    #[test]
    fn zero_height_and_zero_weight() {
        let cx = ctx();
        assert_eq!(zeta_moment(0.0, 2, &cx).unwrap().to_f64(), 0.0);
        let w = GaussianWeight::kuznetsov(50.0, 4.0).unwrap().scaled(0.0);
        assert_eq!(weighted_spectral_integral(2, &w, &cx).unwrap().to_f64(), 0.0);
        assert!(h7_term(3, &w, &cx).unwrap().is_zero());
    }

    #[test]
    fn zeta_modulus_is_even() {
        let cx = ctx();
        let p = cx.bits();
        for t in [0.5, 7.3, 14.1, 33.0] {
            let a = zeta_abs2(&Float::with_val(p, t), 0.5, 1.0, &cx).unwrap();
            let b = zeta_abs2(&Float::with_val(p, -t), 0.5, 1.0, &cx).unwrap();
            assert!((a.to_f64() / b.to_f64() - 1.0).abs() < 1e-20);
        }
    }

    #[test]
    fn h7_at_one_reduces_to_the_fourth_moment_integral() {
        let cx = ctx();
        let w = GaussianWeight::kuznetsov(30.0, 3.0).unwrap();
        let h = h7_term(1, &w, &cx).unwrap();
        let m = weighted_spectral_integral(2, &w, &cx).unwrap().to_f64();
        assert!((h.re.to_f64() + m / PI).abs() < 1e-9 * m);
        assert!(h.im.to_f64().abs() < 10.0 * cx.rel_tol * m);
        let h2 = h7_term(2, &w, &cx).unwrap();
        assert!(h2.abs_f64() <= 2.0 * h.abs_f64());
    }
}
