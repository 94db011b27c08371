use rug::float::Constant;
use rug::Float;

use crate::complex::ComplexValue;
use crate::error::{HeckeError, Result};
use crate::precision::PrecisionContext;
use crate::quad::{integrate, QuadOptions, QuadResult, MAG_PREC};
use crate::special_functions::gamma::lgamma_core;
use crate::special_functions::log_gamma;

/// `R(x) = (1/(2 pi^4 i lambda)) int (16 pi^4 x)^w Gamma^2(1/2 - w + i kappa) Gamma^2(1/2 - w - i kappa)
/// (cosh(pi kappa) + sin(pi w))^2 Gamma(w/lambda) dw` over the segment `Re w = -1/lambda`,
/// `|Im w| <= lambda^2`.
pub fn rj_correction(x: f64, kappa: f64, lambda: f64, ctx: &PrecisionContext) -> Result<ComplexValue> {
    Ok(rj_correction_detailed(x, kappa, lambda, ctx)?.value)
}

pub fn rj_correction_detailed(x: f64, kappa: f64, lambda: f64, ctx: &PrecisionContext) -> Result<QuadResult> {
    if !(x > 0.0) || !(lambda > 0.0) || !kappa.is_finite() {
        return Err(HeckeError::Domain(format!("need x > 0 and lambda > 0, got ({}, {})", x, lambda)));
    }
    let p = ctx.bits();
    let pi = Float::with_val(p, Constant::Pi);
    let sigma = Float::with_val(p, -1.0 / lambda);
    let lx = (Float::with_val(p, rug::ops::Pow::pow(&pi, 4u32)) * 16u32 * x).ln();
    let lam = Float::with_val(p, lambda);
    let kap = Float::with_val(p, kappa);
    let ch = Float::with_val(p, &pi * &kap).cosh();
    let half = Float::with_val(p, 0.5);
    let height = lambda * lambda;
    // the integrand turns once per 2 pi / log(16 pi^4 x) in height, and the gamma phases
    // change by about log(|t| + kappa) per unit
    let rate = lx.to_f64().abs() + 2.0 * (height + kappa.abs() + 1.0).ln() + 1.0;
    let panels = ((height * rate / std::f64::consts::PI).ceil() as usize).max(4);
    let opts = QuadOptions::from_ctx(ctx).panels(panels);
    let r = integrate(
        |t| {
            let w = ComplexValue::new(sigma.clone(), t.clone());
            let a = &ComplexValue::real(half.clone()) - &w;
            let ik = ComplexValue::imag(kap.clone());
            let lg = &lgamma_core(&(&a + &ik), p)? + &lgamma_core(&(&a - &ik), p)?;
            let lgw = log_gamma(&w.div_real(&lam), ctx)?;
            let trig = w.mul_real(&pi).sin().add_real(&ch);
            let l = &(&lg.mul_f64(2.0) + &w.mul_real(&lx)) + &lgw;
            let v = &l.exp() * &trig.square();
            // conjugate symmetry folds the segment onto t >= 0
            Ok(ComplexValue::real(v.re).mul_f64(2.0))
        },
        &Float::with_val(p, 0),
        &Float::with_val(p, height),
        &opts,
        ctx,
    )?;
    // dw = i dt cancels the i in the prefactor
    let scale = Float::with_val(p, rug::ops::Pow::pow(&pi, 4u32)) * 2u32 * &lam;
    let s = scale.to_f64();
    Ok(QuadResult {
        value: r.value.div_real(&scale),
        error: Float::with_val(MAG_PREC, &r.error / s),
        l1: Float::with_val(MAG_PREC, &r.l1 / s),
        evals: r.evals,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn refinement_agrees() {
        let cx = PrecisionContext::new(30, 1e-12, 1000).unwrap();
        let fine = cx.refined(15).with_rel_tol(1e-16).unwrap();
        let a = rj_correction(1.0, 10.0, 3.0, &cx).unwrap();
        let b = rj_correction(1.0, 10.0, 3.0, &fine).unwrap();
        assert!((&a - &b).abs_f64() < 1e-10 * b.abs_f64().max(1e-30), "{:?} {:?}", a.to_f64(), b.to_f64());
    }
}
