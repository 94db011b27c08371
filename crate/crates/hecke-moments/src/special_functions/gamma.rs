//! Complex log-gamma by upward recursion and the Stirling series.

use rug::float::Constant;
use rug::Float;

use super::bernoulli::stirling_coeffs;
use crate::complex::ComplexValue;
use crate::error::{HeckeError, Result};
use crate::precision::PrecisionContext;

fn is_nonpositive_integer(z: &ComplexValue) -> bool {
    z.im.is_zero() && z.re.is_integer() && z.re <= 0
}

/// Principal branch of `log Gamma(z)`, continuous off the negative real axis.
pub fn log_gamma(z: &ComplexValue, ctx: &PrecisionContext) -> Result<ComplexValue> {
    if !z.is_finite() {
        return Err(HeckeError::Domain("log_gamma of a non-finite argument".into()));
    }
    if is_nonpositive_integer(z) {
        return Err(HeckeError::Pole(format!("Gamma has a pole at {}", z.re.to_f64())));
    }
    let p = ctx.bits();
    let v = lgamma_core(&z.with_prec(p), p)?;
    let mag = v.abs_f64();
    if mag * 2f64.powi(-(p as i32)) > ctx.rel_tol {
        return Err(HeckeError::PrecisionInsufficient(format!(
            "|log Gamma| = {:e} exceeds the precision budget",
            mag
        )));
    }
    Ok(v)
}

/// `Gamma(z)`.
pub fn gamma(z: &ComplexValue, ctx: &PrecisionContext) -> Result<ComplexValue> {
    Ok(log_gamma(z, ctx)?.exp())
}

thread_local! {
    static HALF_LN_2PI: std::cell::RefCell<Vec<(u32, Float)>> = const { std::cell::RefCell::new(Vec::new()) };
    static COEFF_LOG2: std::cell::RefCell<Vec<f64>> = const { std::cell::RefCell::new(Vec::new()) };
}

fn half_ln_2pi(p: u32) -> Float {
    HALF_LN_2PI.with(|c| {
        let mut c = c.borrow_mut();
        if let Some((_, v)) = c.iter().find(|(q, _)| *q == p) {
            return v.clone();
        }
        let mut t = Float::with_val(p, Constant::Pi) * 2u32;
        t.ln_mut();
        let v = t / 2u32;
        c.push((p, v.clone()));
        v
    })
}

/// `log2 |B_{2k} / (2k(2k-1))|` for `k = 1..=n`, in double precision.
fn coeff_log2(n: usize) -> Vec<f64> {
    COEFF_LOG2.with(|c| {
        let mut c = c.borrow_mut();
        if c.len() < n {
            let co = stirling_coeffs(64, n);
            *c = co.iter().map(|x| x.to_f64().abs().log2()).collect();
        }
        c[..n].to_vec()
    })
}

pub(crate) fn lgamma_core(z: &ComplexValue, p: u32) -> Result<ComplexValue> {
    let r_min = 0.11 * p as f64 + 2.0;
    let x0 = z.re.to_f64();
    let y0 = z.im.to_f64();
    // far from the real axis the Stirling tail is already tiny once Re z >= 0
    let shift = if x0 >= r_min || (x0 >= 0.0 && y0.abs() >= 2.0 * r_min) {
        0
    } else if y0.abs() >= 2.0 * r_min {
        (-x0).ceil() as usize
    } else {
        let need = (r_min * r_min - y0 * y0).max(0.0).sqrt();
        ((need - x0).ceil().max(0.0) as usize).max(if x0 < 0.0 { (-x0).ceil() as usize } else { 0 })
    };

    let mut correction = None;
    let zz = if shift > 0 {
        let mut prod = z.clone();
        let mut argsum = y0.atan2(x0);
        for k in 1..shift {
            let zk = z.add_f64(k as f64);
            argsum += y0.atan2(x0 + k as f64);
            prod = &prod * &zk;
        }
        let mut lp = prod.ln();
        let two_pi = 2.0 * std::f64::consts::PI;
        let wind = ((argsum - lp.im.to_f64()) / two_pi).round();
        if wind != 0.0 {
            let tp = Float::with_val(p, Constant::Pi) * 2u32 * wind;
            lp.im += tp;
        }
        correction = Some(lp);
        z.add_f64(shift as f64)
    } else {
        z.clone()
    };

    let lz = zz.ln();
    let mut res = &(zz.add_f64(-0.5)) * &lz;
    res = &res - &zz;
    res.re += half_ln_2pi(p);

    // number of terms from double-precision magnitudes: |c_k| |z|^{1-2k} below 2^{-p} |res|
    let kmax = (0.45 * p as f64) as usize + 16;
    let logs = coeff_log2(kmax);
    let l2z = (x0 + shift as f64).hypot(y0).log2();
    let floor = -(p as f64) - 2.0 + res.abs_f64().max(1.0).log2();
    let mut nterms = None;
    let mut prev = f64::INFINITY;
    for (i, lc) in logs.iter().enumerate() {
        let m = lc - (2 * i + 1) as f64 * l2z;
        if m < floor {
            nterms = Some(i);
            break;
        }
        if m > prev {
            break;
        }
        prev = m;
    }
    let nterms = nterms.ok_or_else(|| HeckeError::PrecisionInsufficient("Stirling series did not converge".into()))?;
    if nterms > 0 {
        let coeffs = stirling_coeffs(p, kmax);
        let zinv = zz.recip();
        let y = zinv.square();
        let mut acc = ComplexValue::real(coeffs[nterms - 1].clone());
        for c in coeffs[..nterms - 1].iter().rev() {
            acc = &acc * &y;
            acc.re += c;
        }
        res += &(&acc * &zinv);
    }
    if let Some(lp) = correction {
        res = &res - &lp;
    }
    Ok(res)
}

/// `Gamma(s + iu) / Gamma(1 - s + iu)` via a log-gamma difference.
pub fn gamma_ratio(s: &ComplexValue, u: &Float, ctx: &PrecisionContext) -> Result<ComplexValue> {
    let p = ctx.bits();
    let s = s.with_prec(p);
    let iu = ComplexValue::imag(Float::with_val(p, u));
    let num = &s + &iu;
    let den = &(&ComplexValue::one(p) - &s) + &iu;
    if is_nonpositive_integer(&den) {
        return Ok(ComplexValue::zero(p));
    }
    Ok((&log_gamma(&num, ctx)? - &log_gamma(&den, ctx)?).exp())
}

/// Two-term Stirling approximation of `Gamma(sigma + it)` for `t >= 10`:
/// returns `(modulus, phase)` with modulus `sqrt(2 pi) t^(sigma - 1/2) e^(-pi t / 2)` and
/// phase `t log t - t + pi/2 (sigma - 1/2) + (sigma - sigma^2 - 1/6) / (2t)`.
pub fn stirling_phase(sigma: f64, t: f64, ctx: &PrecisionContext) -> Result<(Float, Float)> {
    if !(t >= 10.0) || !sigma.is_finite() {
        return Err(HeckeError::Domain(format!("stirling_phase needs t >= 10, got {}", t)));
    }
    let p = ctx.bits();
    let pi = Float::with_val(p, Constant::Pi);
    let tf = Float::with_val(p, t);
    let sf = Float::with_val(p, sigma);
    let lt = Float::with_val(p, tf.ln_ref());
    let mut modulus = Float::with_val(p, &pi * 2u32);
    modulus.sqrt_mut();
    let e = Float::with_val(p, &sf - 0.5) * &lt - Float::with_val(p, &pi * &tf) / 2u32;
    modulus *= e.exp();
    let corr = ((Float::with_val(p, &sf) - Float::with_val(p, sf.square_ref())) - Float::with_val(p, 1) / 6u32) / (Float::with_val(p, &tf * 2u32));
    let phase = Float::with_val(p, &tf * &lt) - &tf + Float::with_val(p, &pi / 2u32) * (Float::with_val(p, &sf - 0.5)) + corr;
    Ok((modulus, phase))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> PrecisionContext {
        PrecisionContext::default()
    }

    fn c(re: f64, im: f64) -> ComplexValue {
        ComplexValue::from_f64(ctx().bits(), re, im)
    }

    #[test]
    fn half_and_integer() {
        let p = ctx().bits();
        let mut sqrt_pi = Float::with_val(p, Constant::Pi);
        sqrt_pi.sqrt_mut();
        let v = log_gamma(&c(0.5, 0.0), &ctx()).unwrap();
        assert!((v.re - Float::with_val(p, sqrt_pi.ln_ref())).abs() < 1e-48);
        let v = log_gamma(&c(5.0, 0.0), &ctx()).unwrap();
        assert!((v.re - Float::with_val(p, 24).ln()).abs() < 1e-48);
        assert!(v.im.is_zero() || v.im.to_f64().abs() < 1e-60);
    }

    #[test]
    fn reflection_at_example_point() {
        let z = c(0.3, 0.2);
        let g1 = gamma(&z, &ctx()).unwrap();
        let g2 = gamma(&(&ComplexValue::one(z.prec()) - &z), &ctx()).unwrap();
        let pi = ComplexValue::pi(z.prec());
        let s = z.mul_real(&pi).sin();
        let v = (&g1 * &g2 * s).div_real(&pi);
        assert!((&v - &ComplexValue::one(v.prec())).abs_f64() < 1e-45);
    }

    #[test]
    fn poles_are_errors() {
        assert!(matches!(log_gamma(&c(0.0, 0.0), &ctx()), Err(HeckeError::Pole(_))));
        assert!(matches!(log_gamma(&c(-3.0, 0.0), &ctx()), Err(HeckeError::Pole(_))));
        assert!(log_gamma(&c(-3.0, 1e-20), &ctx()).is_ok());
    }

    #[test]
    fn principal_branch_is_continuous() {
        // imaginary part of log Gamma(1/2 + it) grows like t log t; no 2 pi jumps between nearby t
        let mut prev = log_gamma(&c(-7.5, 1.0), &ctx()).unwrap().im.to_f64();
        for k in 1..200 {
            let t = 1.0 + k as f64 * 0.05;
            let v = log_gamma(&c(-7.5, t), &ctx()).unwrap().im.to_f64();
            assert!((v - prev).abs() < 1.0, "jump at t={}", t);
            prev = v;
        }
    }

    #[test]
    fn large_imaginary_part_matches_shifted_route() {
        // compare against the recurrence Gamma(z) = Gamma(z + 40) / (z (z+1) ... (z+39))
        let p = ctx().bits();
        for &(x, y) in &[(0.3, 45.0), (-3.7, 60.0), (0.0, -80.0), (-0.7, 150.0), (0.1, 1.0), (0.5, 15.0), (2.0, 20.0), (-2.3, 25.0), (0.0, 30.0), (0.0, 12.0), (1.0, 9.0)] {
            let z = c(x, y);
            let direct = log_gamma(&z, &ctx()).unwrap();
            let mut prod = ComplexValue::one(p);
            for k in 0..40 {
                prod = &prod * &z.add_f64(k as f64);
            }
            let shifted = (&log_gamma(&z.add_f64(40.0), &ctx()).unwrap() - &prod.ln()).exp();
            let rel = (&direct.exp() - &shifted).abs_f64() / shifted.abs_f64();
            assert!(rel < 1e-45, "z = ({}, {}) rel = {:e}", x, y, rel);
        }
    }

    #[test]
    fn gamma_ratio_examples() {
        let p = ctx().bits();
        let one = gamma_ratio(&c(0.5, 0.0), &Float::with_val(p, 3.7), &ctx()).unwrap();
        assert!((&one - &ComplexValue::one(p)).abs_f64() < 1e-45);
        let v = gamma_ratio(&c(1.5, 0.0), &Float::with_val(p, 2), &ctx()).unwrap();
        assert!((v.re.to_f64() + 4.25).abs() < 1e-14 && v.im.to_f64().abs() < 1e-40);
        let v = gamma_ratio(&c(-1.5, 0.0), &Float::with_val(p, 1), &ctx()).unwrap();
        assert!((v.re.to_f64() - 1.0 / (1.25 * 3.25)).abs() < 1e-15);
    }

    #[test]
    fn stirling_phase_examples() {
        let (m, _) = stirling_phase(0.5, 50.0, &ctx()).unwrap();
        let g = gamma(&c(0.5, 50.0), &ctx()).unwrap().abs();
        assert!(((m / g).to_f64() - 1.0).abs() < 1e-3);
        let (_, ph) = stirling_phase(0.0, 100.0, &ctx()).unwrap();
        let arg = log_gamma(&c(0.0, 100.0), &ctx()).unwrap().im.to_f64();
        let d = (ph.to_f64() - arg).rem_euclid(2.0 * std::f64::consts::PI);
        assert!(d.min(2.0 * std::f64::consts::PI - d) < 1e-3);
        assert!(stirling_phase(0.5, 9.0, &ctx()).is_err());
        let (m, _) = stirling_phase(0.5, 5000.0, &ctx()).unwrap();
        let g = gamma(&c(0.5, 5000.0), &ctx()).unwrap().abs();
        assert!(((m / g).to_f64() - 1.0).abs() < 1e-7);
    }
}
