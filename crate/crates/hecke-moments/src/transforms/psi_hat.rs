use rug::float::Constant;
use rug::Float;

use super::hstar::{h_star_detailed, order_for};
use super::weight::GaussianWeight;
use crate::complex::ComplexValue;
use crate::error::{HeckeError, Result};
use crate::precision::PrecisionContext;
use crate::quad::{integrate, mag, taylor_coefficients, QuadOptions, QuadResult, MAG_PREC};
use crate::special_functions::gamma::lgamma_core;

/// Window `[lo, hi]` on `u >= 0` outside which `u^k h(u)` is below `tol` of its peak.
pub(crate) fn weight_window(w: &GaussianWeight, tol: f64, extra_degree: f64) -> (f64, f64) {
    let ell = (-tol.ln()).sqrt() + 1.0 + (w.prefactor_degree() as f64 + extra_degree.max(0.0)).sqrt();
    ((w.center - ell * w.width).max(0.0), w.center + ell * w.width)
}

/// `psi_hat(z) = (2^{z-1}/pi) int Gamma(z/2 - iu) Gamma(z/2 + iu) h(u) u sinh(pi u) du` over the real line.
pub fn psi_hat_direct(z: &ComplexValue, w: &GaussianWeight, ctx: &PrecisionContext) -> Result<QuadResult> {
    let p = ctx.bits();
    if z.re <= 0 {
        return Err(HeckeError::Domain(format!("psi_hat needs Re z > 0, got {}", z.re.to_f64())));
    }
    if w.is_zero() {
        return Ok(QuadResult { value: ComplexValue::zero(p), error: mag(0.0), l1: mag(0.0), evals: 0 });
    }
    let half = z.with_prec(p).div_real(&Float::with_val(p, 2));
    let tol = ctx.rel_tol * 1e-2;
    let (lo, hi) = weight_window(w, tol, 2.0 * half.re.to_f64().abs());
    let pi = Float::with_val(p, Constant::Pi);
    let panels = 2 + ((hi - lo) / w.width).ceil() as usize;
    let opts = QuadOptions::from_ctx(ctx).rel(tol).panels(panels).order(order_for(tol));
    let r = integrate(
        |u| {
            let hu = w.eval_real(u, ctx);
            if hu.is_zero() || u.is_zero() {
                return Ok(ComplexValue::zero(p));
            }
            let iu = ComplexValue::imag(u.clone());
            let sh = Float::with_val(p, &pi * u).sinh().ln();
            let l = &(&lgamma_core(&(&half + &iu), p)? + &lgamma_core(&(&half - &iu), p)?) + &ComplexValue::real(sh);
            Ok(l.exp().mul_real(&Float::with_val(p, u * &hu)))
        },
        &Float::with_val(p, lo),
        &Float::with_val(p, hi),
        &opts,
        ctx,
    )?;
    // even integrand: the full line is twice the half line, cancelling 2^{-1}
    let two_pow = ComplexValue::real(Float::with_val(p, 2)).pow(z).div_real(&pi);
    let scale = two_pow.abs_f64();
    Ok(QuadResult {
        value: &r.value * &two_pow,
        error: Float::with_val(MAG_PREC, &r.error * scale),
        l1: Float::with_val(MAG_PREC, &r.l1 * scale),
        evals: r.evals,
    })
}

/// `psi_hat(2w) = i 2^{2w-1} h*(w) / cos(pi w)`.
pub fn psi_hat_via_hstar(z: &ComplexValue, w: &GaussianWeight, ctx: &PrecisionContext) -> Result<ComplexValue> {
    let p = ctx.bits();
    let half = z.with_prec(p).div_real(&Float::with_val(p, 2));
    let pi = Float::with_val(p, Constant::Pi);
    let c = half.mul_real(&pi).cos();
    if c.abs_f64() < 1e-3 {
        return Err(HeckeError::Pole(format!(
            "cos(pi z/2) vanishes near z = {}; use the direct route",
            z.re.to_f64()
        )));
    }
    let hs = h_star_detailed(&half, w, ctx)?.value;
    let two_pow = ComplexValue::real(Float::with_val(p, 2)).pow(&z.add_f64(-1.0));
    Ok((&(&two_pow * &hs) / &c).mul_i())
}

/// `psi_hat(z)` for `Re z > 0`.
pub fn psi_hat(z: &ComplexValue, w: &GaussianWeight, ctx: &PrecisionContext) -> Result<ComplexValue> {
    Ok(psi_hat_direct(z, w, ctx)?.value)
}

/// `2 int_0^inf u h(u) tanh(pi u) du`, the value of `psi_hat(1)` after the reflection formula.
pub fn psi_hat_at_one_tanh(w: &GaussianWeight, ctx: &PrecisionContext) -> Result<Float> {
    let p = ctx.bits();
    let tol = ctx.rel_tol * 1e-2;
    let (lo, hi) = weight_window(w, tol, 1.0);
    let pi = Float::with_val(p, Constant::Pi);
    let opts = QuadOptions::from_ctx(ctx).rel(tol).panels(2 + ((hi - lo) / w.width).ceil() as usize);
    let r = integrate(
        |u| {
            let v = Float::with_val(p, u * &w.eval_real(u, ctx)) * Float::with_val(p, &pi * u).tanh();
            Ok(ComplexValue::real(v))
        },
        &Float::with_val(p, lo),
        &Float::with_val(p, hi),
        &opts,
        ctx,
    )?;
    Ok(r.value.re * 2u32)
}

/// Radius of the Cauchy circle used for derivatives of `psi_hat` at `z = 1`.
pub const DERIVATIVE_RADIUS: f64 = 0.1;

/// `psi_hat^{(m)}(1)` for `m = 0..=6`, from Cauchy's formula on a circle of radius 0.1.
pub fn psi_hat_derivatives_at_1(m: usize, w: &GaussianWeight, ctx: &PrecisionContext) -> Result<ComplexValue> {
    Ok(psi_hat_derivatives_up_to(m, w, ctx)?.swap_remove(m))
}

/// All derivatives `psi_hat^{(j)}(1)`, `j = 0..=m`, from one circle.
pub fn psi_hat_derivatives_up_to(m: usize, w: &GaussianWeight, ctx: &PrecisionContext) -> Result<Vec<ComplexValue>> {
    if m > 6 {
        return Err(HeckeError::Domain(format!("derivative order {} above 6", m)));
    }
    let p = ctx.bits();
    let center = ComplexValue::one(p);
    // the circle must stay inside Re z > 0
    if DERIVATIVE_RADIUS >= 1.0 {
        return Err(HeckeError::CircleEnclosesPole("circle reaches Re z <= 0".into()));
    }
    let co = taylor_coefficients(|z| psi_hat(z, w, ctx), &center, DERIVATIVE_RADIUS, m, ctx.rel_tol * 1e-2, ctx)?;
    let mut fact = Float::with_val(p, 1);
    Ok(co
        .into_iter()
        .enumerate()
        .map(|(j, c)| {
            if j > 1 {
                fact *= j as u32;
            }
            c.mul_real(&fact)
        })
        .collect())
}

/// Coefficients of the polynomial in `L = log T` fitted to `psi_hat^{(m)}(1) / (QT)`.
///
/// Uses the grid `T in ts`, `Q = T^{1/3}`, and fits the top `min(m, ts.len() - 1) + 1` powers
/// `L^m, L^{m-1}, ...` by least squares. Returns the coefficients from the top power down.
pub fn log_polynomial_fit(m: usize, ts: &[f64], prefactor: super::weight::Prefactor, ctx: &PrecisionContext) -> Result<Vec<f64>> {
    let k = m.min(ts.len().saturating_sub(1)) + 1;
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for &t in ts {
        let q = t.cbrt();
        let w = GaussianWeight::new(t, q, prefactor)?;
        let d = psi_hat_derivatives_at_1(m, &w, ctx)?;
        let l = t.ln();
        rows.push((0..k).map(|i| l.powi((m - i) as i32)).collect::<Vec<_>>());
        rhs.push(d.re.to_f64() / (q * t));
    }
    least_squares(&rows, &rhs)
}

fn least_squares(a: &[Vec<f64>], b: &[f64]) -> Result<Vec<f64>> {
    let k = a[0].len();
    let mut ata = nalgebra::DMatrix::<f64>::zeros(k, k);
    let mut atb = nalgebra::DVector::<f64>::zeros(k);
    // column scaling keeps the normal equations tame
    let scales: Vec<f64> = (0..k).map(|j| a.iter().map(|r| r[j].abs()).fold(0.0, f64::max).max(1e-300)).collect();
    for (row, &y) in a.iter().zip(b) {
        for i in 0..k {
            atb[i] += row[i] / scales[i] * y;
            for j in 0..k {
                ata[(i, j)] += row[i] / scales[i] * row[j] / scales[j];
            }
        }
    }
    let x = ata.lu().solve(&atb).ok_or_else(|| HeckeError::PrecisionInsufficient("singular fit".into()))?;
    Ok((0..k).map(|i| x[i] / scales[i]).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> PrecisionContext {
        PrecisionContext::new(30, 1e-12, 1000).unwrap()
    }

    #[test]
    fn tanh_reduction_at_one() {
        let cx = ctx();
        let w = GaussianWeight::kuznetsov(60.0, 4.0).unwrap();
        let d = psi_hat(&ComplexValue::one(cx.bits()), &w, &cx).unwrap();
        let t = psi_hat_at_one_tanh(&w, &cx).unwrap();
        assert!((d.re.to_f64() / t.to_f64() - 1.0).abs() < 1e-11);
        assert!(d.im.to_f64().abs() < 1e-11 * t.to_f64());
    }

    #[test]
    fn routes_agree_at_two() {
        let cx = ctx();
        let w = GaussianWeight::kuznetsov(40.0, 5.0).unwrap();
        let z = ComplexValue::from_f64(cx.bits(), 2.0, 0.0);
        let a = psi_hat(&z, &w, &cx).unwrap();
        let b = psi_hat_via_hstar(&z, &w, &cx).unwrap();
        assert!((&a - &b).abs_f64() < 1e-10 * a.abs_f64(), "{:?} {:?}", a.to_f64(), b.to_f64());
    }

    #[test]
    fn pole_proximity_is_reported() {
        let cx = ctx();
        let w = GaussianWeight::kuznetsov(40.0, 5.0).unwrap();
        let z = ComplexValue::from_f64(cx.bits(), 1.0, 0.0);
        assert!(matches!(psi_hat_via_hstar(&z, &w, &cx), Err(HeckeError::Pole(_))));
    }
}
