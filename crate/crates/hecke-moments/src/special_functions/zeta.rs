//! Riemann, Hurwitz and Lerch zeta functions by Euler-Maclaurin summation.

use rug::float::Constant;
use rug::Float;

use super::bernoulli::em_coeffs;
use super::gamma::gamma;
use crate::complex::ComplexValue;
use crate::error::{HeckeError, Result};
use crate::precision::PrecisionContext;

/// `(e^x - 1) / x` and its derivative-friendly series for small `|x|`.
fn expm1_over_x(x: &ComplexValue) -> ComplexValue {
    let p = x.prec();
    if x.abs_f64() < 0.5 {
        let mut sum = ComplexValue::one(p);
        let mut term = ComplexValue::one(p);
        let eps = 2f64.powi(-(p as i32));
        for n in 2..(4 * p as usize) {
            term = (&term * x).div_real(&Float::with_val(p, n));
            sum += &term;
            if term.abs_f64() < eps {
                break;
            }
        }
        sum
    } else {
        (&x.exp() - &ComplexValue::one(p)) / x
    }
}

/// `sum_{n>=2} x^(n-2) (n-1) / n!`, the derivative of `(e^x - 1 - x)/x^2`-type terms.
fn expm1_over_x_deriv_series(x: &ComplexValue) -> ComplexValue {
    let p = x.prec();
    if x.abs_f64() < 0.5 {
        // d/dx [(e^x - 1)/x] = sum_{n>=2} (n-1) x^(n-2) / n!
        let mut sum = ComplexValue::from_f64(p, 0.5, 0.0);
        let mut xp = ComplexValue::one(p);
        let mut fact = Float::with_val(p, 2);
        let eps = 2f64.powi(-(p as i32));
        for n in 3..(4 * p as usize) {
            xp = &xp * x;
            fact *= n as u32;
            let t = xp.mul_real(&Float::with_val(p, (n - 1) as u32)).div_real(&fact);
            let ta = t.abs_f64();
            sum += &t;
            if ta < eps {
                break;
            }
        }
        sum
    } else {
        let ex = x.exp();
        let one = ComplexValue::one(p);
        (&(&(x - &one) * &ex) + &one) / &x.square()
    }
}

/// Euler-Maclaurin result: the regular part `zeta(s, a) - 1/(s-1)` and optionally its derivative.
struct EmOut {
    reg: ComplexValue,
    dreg: Option<ComplexValue>,
}

/// Powers `(n + a)^(-s)` and logs `log(n + a)` for `n = 0..N`.
fn hurwitz_terms(s: &ComplexValue, a: &Float, n: usize, p: u32, want_log: bool) -> (Vec<ComplexValue>, Vec<Float>) {
    let a_is_one = *a == 1;
    let mut pw = Vec::with_capacity(n);
    let mut logs = Vec::with_capacity(if want_log || a_is_one { n } else { 0 });
    if a_is_one {
        // multiplicative reuse: m^(-s) = q^(-s) (m/q)^(-s) with q the least prime factor
        let m_max = n;
        let mut spf = vec![0usize; m_max + 1];
        for i in 2..=m_max {
            if spf[i] == 0 {
                let mut j = i;
                while j <= m_max {
                    if spf[j] == 0 {
                        spf[j] = i;
                    }
                    j += i;
                }
            }
        }
        let neg_s = -s;
        pw.push(ComplexValue::one(p));
        logs.push(Float::new(p));
        for m in 2..=m_max {
            let q = spf[m];
            if q == m {
                let l = Float::with_val(p, m).ln();
                pw.push(neg_s.mul_real(&l).exp());
                logs.push(l);
            } else {
                let v = &pw[q - 1] * &pw[m / q - 1];
                let l = Float::with_val(p, &logs[q - 1] + &logs[m / q - 1]);
                pw.push(v);
                logs.push(l);
            }
        }
        if !want_log {
            logs.clear();
        }
    } else {
        let neg_s = -s;
        for k in 0..n {
            let l = Float::with_val(p, a + k as u32).ln();
            pw.push(neg_s.mul_real(&l).exp());
            if want_log {
                logs.push(l);
            }
        }
    }
    (pw, logs)
}

fn em_core(s: &ComplexValue, a: &Float, ctx: &PrecisionContext, deriv: bool) -> Result<EmOut> {
    let p = ctx.bits();
    let s = s.with_prec(p);
    let digits = ctx.digits as f64 + 5.0;
    let m_terms = (digits * std::f64::consts::LN_10 / 2.0).ceil() as usize + 6;
    let s_abs = s.abs_f64();
    let mut n = ((std::f64::consts::E * (s_abs + 2.0 * m_terms as f64 + 2.0)) / (2.0 * std::f64::consts::PI)).ceil() as usize;
    n = n.max(8);
    let coeffs = em_coeffs(p, m_terms + 2);
    let one = ComplexValue::one(p);
    for _attempt in 0..6 {
        let (pw, logs) = hurwitz_terms(&s, a, n, p, deriv);
        let mut sum = ComplexValue::zero(p);
        for v in &pw {
            sum += v;
        }
        let mut dsum = ComplexValue::zero(p);
        if deriv {
            for (v, l) in pw.iter().zip(logs.iter()) {
                dsum -= &v.mul_real(l);
            }
        }
        let na = Float::with_val(p, a + n as u32);
        let ln_na = Float::with_val(p, na.ln_ref());
        let na_neg_s = (-&s).mul_real(&ln_na).exp();
        // ((N+a)^(1-s) - 1)/(s-1) = -ln(N+a) * expm1(x)/x with x = (1-s) ln(N+a)
        let x = (&one - &s).mul_real(&ln_na);
        let e1 = expm1_over_x(&x);
        let mut reg = &sum - &e1.mul_real(&ln_na);
        let half = na_neg_s.div_real(&Float::with_val(p, 2));
        reg += &half;
        let mut dreg = ComplexValue::zero(p);
        if deriv {
            // d/ds of -ln * (e^x - 1)/x with dx/ds = -ln
            let d1 = expm1_over_x_deriv_series(&x);
            let ln2 = Float::with_val(p, ln_na.square_ref());
            dreg = &dsum + &d1.mul_real(&ln2);
            dreg -= &half.mul_real(&ln_na);
        }
        // Bernoulli tail terms c_k (s)_{2k-1} (N+a)^{-s-2k+1}
        let inv_na2 = Float::with_val(p, na.square_ref()).recip();
        let mut pw_k = na_neg_s.div_real(&na);
        let mut poch = s.clone();
        let mut dpoch = one.clone();
        let scale = reg.abs().max(&Float::with_val(p, 1e-300)).to_f64().max(1.0);
        let eps = 10f64.powf(-digits) * scale;
        let dscale = if deriv { (dreg.abs_f64().max(1e-300) / scale).max(1.0) } else { 1.0 };
        let mut ok = false;
        for k in 1..=m_terms + 1 {
            let c = &coeffs[k - 1];
            let t = (&poch * &pw_k).mul_real(c);
            let mut ta = t.abs_f64();
            if deriv {
                // d/ds [poch * (N+a)^(-s-2k+1)] = dpoch*pw - ln(N+a)*poch*pw
                let dt = (&(&dpoch * &pw_k) - &(&poch * &pw_k).mul_real(&ln_na)).mul_real(c);
                ta = ta.max(dt.abs_f64() / dscale);
                dreg += &dt;
            }
            reg += &t;
            // remainder of an alternating-type Euler-Maclaurin series is bounded by the
            // next term times |s + 2k + 1| / (Re s + 2k + 1)
            let sig = s.re.to_f64() + 2.0 * k as f64 + 1.0;
            if sig > 0.0 {
                let factor = (s_abs + 2.0 * k as f64 + 1.0) / sig;
                if ta * factor < eps && k >= 2 {
                    ok = true;
                    break;
                }
            }
            let s2k = s.add_f64((2 * k - 1) as f64);
            let s2k1 = s.add_f64((2 * k) as f64);
            let q = &s2k * &s2k1;
            if deriv {
                dpoch = &(&dpoch * &q) + &(&poch * &(&s2k + &s2k1));
            }
            poch = &poch * &q;
            pw_k = pw_k.mul_real(&inv_na2);
        }
        if ok {
            return Ok(EmOut { reg, dreg: if deriv { Some(dreg) } else { None } });
        }
        n *= 2;
    }
    Err(HeckeError::PrecisionInsufficient("Euler-Maclaurin tail did not meet the tolerance".into()))
}

fn check_a(a: &Float) -> Result<()> {
    if !(a.is_finite() && *a > 0 && *a <= 1) {
        return Err(HeckeError::Domain(format!("Hurwitz parameter a = {} outside (0, 1]", a.to_f64())));
    }
    Ok(())
}

fn is_one(s: &ComplexValue) -> bool {
    s.im.is_zero() && s.re == 1
}

/// Hurwitz zeta `zeta(s, a) = sum_{n>=0} (n + a)^(-s)`, `0 < a <= 1`.
pub fn hurwitz_zeta(s: &ComplexValue, a: &Float, ctx: &PrecisionContext) -> Result<ComplexValue> {
    check_a(a)?;
    if is_one(s) {
        return Err(HeckeError::Pole("zeta(s, a) has a pole at s = 1".into()));
    }
    let p = ctx.bits();
    let out = em_core(s, &Float::with_val(p, a), ctx, false)?;
    let pole = (&s.with_prec(p) - &ComplexValue::one(p)).recip();
    Ok(&out.reg + &pole)
}

/// Hurwitz zeta and its `s`-derivative.
pub fn hurwitz_zeta_with_derivative(s: &ComplexValue, a: &Float, ctx: &PrecisionContext) -> Result<(ComplexValue, ComplexValue)> {
    check_a(a)?;
    if is_one(s) {
        return Err(HeckeError::Pole("zeta(s, a) has a pole at s = 1".into()));
    }
    let p = ctx.bits();
    let out = em_core(s, &Float::with_val(p, a), ctx, true)?;
    let sm1 = &s.with_prec(p) - &ComplexValue::one(p);
    let pole = sm1.recip();
    let dpole = -pole.square();
    Ok((&out.reg + &pole, &out.dreg.expect("derivative requested") + &dpole))
}

/// `zeta(s, a) - 1/(s - 1)`, regular at `s = 1`.
pub fn hurwitz_zeta_regular(s: &ComplexValue, a: &Float, ctx: &PrecisionContext) -> Result<ComplexValue> {
    check_a(a)?;
    Ok(em_core(s, &Float::with_val(ctx.bits(), a), ctx, false)?.reg)
}

/// Riemann zeta function.
pub fn riemann_zeta(s: &ComplexValue, ctx: &PrecisionContext) -> Result<ComplexValue> {
    hurwitz_zeta(s, &Float::with_val(ctx.bits(), 1), ctx)
}

/// `(zeta(s), zeta'(s))` from the term-wise differentiated expansion.
pub fn riemann_zeta_with_derivative(s: &ComplexValue, ctx: &PrecisionContext) -> Result<(ComplexValue, ComplexValue)> {
    hurwitz_zeta_with_derivative(s, &Float::with_val(ctx.bits(), 1), ctx)
}

/// `e(x) = exp(2 pi i x)` for a rational `x = num / den`.
pub fn e_rational(num: i64, den: i64, prec: u32) -> ComplexValue {
    let r = num.rem_euclid(den);
    let mut ang = Float::with_val(prec, Constant::Pi) * 2u32;
    ang *= r;
    ang /= den;
    let (s, c) = ang.sin_cos(Float::new(prec));
    ComplexValue::new(c, s)
}

fn check_hk(h: i64, k: i64) -> Result<()> {
    if k < 2 || h < 1 || h > k {
        return Err(HeckeError::Domain(format!("Lerch parameters need 1 <= h <= k, k >= 2; got h={}, k={}", h, k)));
    }
    Ok(())
}

/// Lerch zeta `E(s; e(h/k)) = sum_{m>=1} e(mh/k) m^(-s)`, via Hurwitz values:
/// `sum_{j=1}^k e(jh/k) k^(-s) zeta(s, j/k)`. Entire when `k` does not divide `h`.
pub fn lerch_e(s: &ComplexValue, h: i64, k: i64, ctx: &PrecisionContext) -> Result<ComplexValue> {
    check_hk(h, k)?;
    let p = ctx.bits();
    let s = s.with_prec(p);
    let regular = h % k != 0;
    if !regular && is_one(&s) {
        return Err(HeckeError::Pole("E(s; 1) = zeta(s) has a pole at s = 1".into()));
    }
    let kf = Float::with_val(p, k);
    let k_neg_s = (-&s).mul_real(&Float::with_val(p, kf.ln_ref())).exp();
    let mut acc = ComplexValue::zero(p);
    for j in 1..=k {
        let a = Float::with_val(p, j) / &kf;
        // the 1/(s-1) parts cancel because sum_j e(jh/k) = 0
        let z = if regular { hurwitz_zeta_regular(&s, &a, ctx)? } else { hurwitz_zeta(&s, &a, ctx)? };
        acc += &(&e_rational(j * h, k, p) * &z);
    }
    Ok(&acc * &k_neg_s)
}

/// Right-hand side of the Lerch functional equation:
/// `Gamma(1-s) (2 pi)^(s-1) { e^{i pi (1-s)/2} zeta(1-s, h/k) + e^{i pi (s-1)/2} zeta(1-s, 1-h/k) }`.
pub fn lerch_functional_rhs(s: &ComplexValue, h: i64, k: i64, ctx: &PrecisionContext) -> Result<ComplexValue> {
    check_hk(h, k)?;
    if h == k {
        return Err(HeckeError::Domain("functional equation form requires h < k".into()));
    }
    let p = ctx.bits();
    let s = s.with_prec(p);
    let one = ComplexValue::one(p);
    let w = &one - &s;
    let pi = Float::with_val(p, Constant::Pi);
    let two_pi = Float::with_val(p, &pi * 2u32);
    let g = gamma(&w, ctx)?;
    let pref = &g * &(-&w).mul_real(&Float::with_val(p, two_pi.ln_ref())).exp();
    let a1 = Float::with_val(p, h) / k;
    let a2 = Float::with_val(p, k - h) / k;
    let z1 = hurwitz_zeta(&w, &a1, ctx)?;
    let z2 = hurwitz_zeta(&w, &a2, ctx)?;
    let half_pi = Float::with_val(p, &pi / 2u32);
    let e1 = w.mul_real(&half_pi).mul_i().exp();
    let e2 = (-&w).mul_real(&half_pi).mul_i().exp();
    Ok(&pref * &(&(&e1 * &z1) + &(&e2 * &z2)))
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

    fn pi2() -> Float {
        Float::with_val(ctx().bits(), Constant::Pi).square()
    }

    #[test]
    fn zeta_two() {
        let z = riemann_zeta(&c(2.0, 0.0), &ctx()).unwrap();
        let want = pi2() / 6u32;
        assert!(Float::with_val(200, &z.re - &want).abs() < 1e-48);
    }

    #[test]
    fn first_zero_vicinity() {
        let z = riemann_zeta(&c(0.5, 14.134725), &ctx()).unwrap();
        assert!(z.abs_f64() < 1e-4);
        let far = riemann_zeta(&c(0.5, 14.0), &ctx()).unwrap();
        assert!(far.abs_f64() > 1e-2);
    }

    #[test]
    fn pole_at_one() {
        assert!(matches!(riemann_zeta(&c(1.0, 0.0), &ctx()), Err(HeckeError::Pole(_))));
    }

    #[test]
    fn hurwitz_values() {
        let p = ctx().bits();
        let half = Float::with_val(p, 0.5);
        let z = hurwitz_zeta(&c(2.0, 0.0), &half, &ctx()).unwrap();
        assert!(Float::with_val(p, &z.re - pi2() / 2u32).abs() < 1e-47);
        let z = hurwitz_zeta(&c(-1.0, 0.0), &Float::with_val(p, 1), &ctx()).unwrap();
        assert!(Float::with_val(p, &z.re + Float::with_val(p, 1) / 12u32).abs() < 1e-48);
        assert!(hurwitz_zeta(&c(2.0, 0.0), &Float::with_val(p, 1.5), &ctx()).is_err());
        assert!(hurwitz_zeta(&c(2.0, 0.0), &Float::with_val(p, 0), &ctx()).is_err());
    }

    #[test]
    fn derivative_at_zero_and_two() {
        let p = ctx().bits();
        // zeta'(0) = -log(2 pi)/2
        let (_, d) = riemann_zeta_with_derivative(&c(0.0, 0.0), &ctx()).unwrap();
        let want = -(Float::with_val(p, Constant::Pi) * 2u32).ln() / 2u32;
        assert!(Float::with_val(p, &d.re - &want).abs() < 1e-46);
        // against a Cauchy-free central difference at modest accuracy
        let s = c(0.5, 20.0);
        let (_, d) = riemann_zeta_with_derivative(&s, &ctx()).unwrap();
        let h = 1e-12;
        let zp = riemann_zeta(&s.add_f64(h), &ctx()).unwrap();
        let zm = riemann_zeta(&s.add_f64(-h), &ctx()).unwrap();
        let fd = (&zp - &zm).div_real(&Float::with_val(ctx().bits(), 2.0 * h));
        assert!((&fd - &d).abs_f64() < 1e-20);
    }

    #[test]
    fn derivative_near_pole() {
        // Laurent expansion: zeta(1+w) = 1/w + gamma - gamma_1 w + ...
        let w = 1e-3;
        let (z, d) = riemann_zeta_with_derivative(&c(1.0 + w, 0.0), &ctx()).unwrap();
        let euler = Float::with_val(ctx().bits(), Constant::Euler).to_f64();
        assert!((z.re.to_f64() - (1.0 / w + euler)).abs() < 1e-3);
        assert!((d.re.to_f64() + 1.0 / (w * w)).abs() < 0.1);
    }

    #[test]
    fn lerch_examples() {
        let e = lerch_e(&c(2.0, 0.0), 1, 2, &ctx()).unwrap();
        assert!(Float::with_val(200, &e.re + pi2() / 12u32).abs() < 1e-47);
        let e = lerch_e(&c(3.0, 0.0), 2, 2, &ctx()).unwrap();
        let z3 = riemann_zeta(&c(3.0, 0.0), &ctx()).unwrap();
        assert!((&e - &z3).abs_f64() < 1e-47);
        let s = c(0.7, 0.3);
        let l = lerch_e(&s, 1, 3, &ctx()).unwrap();
        let r = lerch_functional_rhs(&s, 1, 3, &ctx()).unwrap();
        assert!((&l - &r).abs_f64() < 1e-40 * l.abs_f64());
        // regular at s = 1 when k does not divide h
        let at_one = lerch_e(&c(1.0, 0.0), 1, 2, &ctx()).unwrap();
        assert!((at_one.re.to_f64() + std::f64::consts::LN_2).abs() < 1e-15);
    }
}
