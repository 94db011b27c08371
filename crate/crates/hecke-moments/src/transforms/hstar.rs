use std::cell::RefCell;
use std::collections::HashMap;
use std::f64::consts::PI;

use rug::float::Constant;
use rug::Float;

use super::weight::{GaussianWeight, Prefactor};
use crate::complex::ComplexValue;
use crate::error::{HeckeError, Result};
use crate::precision::PrecisionContext;
use crate::quad::{integrate, mag, mag_of, QuadOptions, MAG_PREC};
use crate::special_functions::gamma::lgamma_core;

/// `h*(s)` with the data needed to judge it: `l1` is the integral of the modulus of the
/// integrand (plus residue moduli), `error` the quadrature and truncation estimate.
#[derive(Clone, Debug)]
pub struct HStarValue {
    pub value: ComplexValue,
    pub l1: Float,
    pub error: Float,
}

/// Rule order suited to a tolerance rather than to the working precision.
pub(crate) fn order_for(rel_tol: f64) -> usize {
    ((-rel_tol.log10()) * 0.6 + 6.0).clamp(10.0, 64.0) as usize
}

fn ln_ratio(s: &ComplexValue, u: &Float, p: u32) -> Result<Option<ComplexValue>> {
    // Gamma(s + iu) / Gamma(1 - s + iu), None when the denominator has a pole
    let iu = ComplexValue::imag(u.clone());
    let num = s + &iu;
    let den = &(&ComplexValue::one(p) - s) + &iu;
    if den.im.is_zero() && den.re.is_integer() && den.re <= 0 {
        return Ok(None);
    }
    if num.im.is_zero() && num.re.is_integer() && num.re <= 0 {
        return Err(HeckeError::Pole("h* integrand hits a gamma pole on the real line".into()));
    }
    Ok(Some(&lgamma_core(&num, p)? - &lgamma_core(&den, p)?))
}

/// Location of the peak of `exp(-((u-m)/Q)^2 + pi min(|t|, u))` on `u >= 0` and its log height.
pub(crate) fn envelope_peak(m: f64, q: f64, t: f64) -> (f64, f64) {
    let shifted = m + PI * q * q / 2.0;
    let c = if t <= m { m } else { t.min(shifted) };
    let c = c.max(0.0);
    (c, -((c - m) / q).powi(2) + PI * t.min(c))
}

/// Lowest usable imaginary part of the shifted contour for this weight.
pub(crate) fn contour_floor(w: &GaussianWeight) -> f64 {
    match w.prefactor {
        Prefactor::KuznetsovQ { .. } => -2.9,
        _ => -4.0,
    }
}

/// `h*(s) = int u h(u) Gamma(s+iu)/Gamma(1-s+iu) du`.
///
/// The poles of the integrand in `u` sit at `Im u = Re s + n`, `n >= 0`, so the contour is
/// moved down to `Im u = Re s - 1`. This is the analytic continuation for every `Re s`, and
/// keeps the integrand a unit away from its singularities, where a trapezoid rule converges
/// geometrically.
pub fn h_star_detailed(s: &ComplexValue, w: &GaussianWeight, ctx: &PrecisionContext) -> Result<HStarValue> {
    let p = ctx.bits();
    if w.is_zero() {
        return Ok(HStarValue { value: ComplexValue::zero(p), l1: mag(0.0), error: mag(0.0) });
    }
    let sigma = s.re.to_f64();
    if sigma < -3.0 {
        return Err(HeckeError::Domain(format!("h* continuation supported for Re s >= -3, got {}", sigma)));
    }
    let eta = (sigma - 1.0).max(contour_floor(w));
    if sigma - eta < 0.5 {
        return h_star_real_line(s, w, ctx);
    }
    h_star_shifted(s, w, eta, ctx)
}

/// Half-width, in units of the weight width, of the window the shifted `h*` sum runs over.
pub(crate) fn hstar_window_half_width(w: &GaussianWeight, sigma: f64, eta: f64, tol: f64) -> f64 {
    (-tol.ln()).sqrt() + 1.0 + (w.prefactor_degree() as f64 + 2.0 * sigma.abs() + 2.0).sqrt() + eta.abs() / w.width
}

fn h_star_shifted(s: &ComplexValue, w: &GaussianWeight, eta: f64, ctx: &PrecisionContext) -> Result<HStarValue> {
    let p = ctx.bits();
    let sigma = s.re.to_f64();
    let t = s.im.to_f64();
    let s = s.with_prec(p);
    let tol = ctx.rel_tol * 1e-2;
    // distance from the contour to the nearest singularity, poles of q(r) sit near |Im r| = 3.6
    let mut dist = sigma - eta;
    if let Prefactor::KuznetsovQ { .. } = w.prefactor {
        dist = dist.min(3.6 - eta.abs());
    }
    let dist = dist.min(1.0);
    let q = w.width;
    let ell = hstar_window_half_width(w, sigma, eta, tol);
    let (c, _) = envelope_peak(w.center, q, t.abs());
    let (mut lo, hi) = (c - ell * q, c + ell * q);
    if lo < 0.0 {
        lo = -hi;
    }
    // windows [-hi, -lo] and [lo, hi] on the real part of u
    let mut step = (2.0 * PI * dist / (-(tol.ln()) + 3.0)).min(q / 2.0) * 2.0;
    let ieta = ComplexValue::from_f64(p, 0.0, eta);
    let one = ComplexValue::one(p);
    let term = |m: i64, step: f64| -> Result<(ComplexValue, Float)> {
        let x = Float::with_val(p, m) * step;
        let u = &ComplexValue::real(x) + &ieta;
        let hu = w.eval(&u, ctx)?;
        let iu = u.mul_i();
        let num = &s + &iu;
        let den = &(&one - &s) + &iu;
        let l = &lgamma_core(&num, p)? - &lgamma_core(&den, p)?;
        let v = &(&u * &hu) * &l.exp();
        let m = mag_of(&v);
        Ok((v, m))
    };
    let range = |step: f64| -> Vec<i64> {
        let a = (lo / step).ceil() as i64;
        let b = (hi / step).floor() as i64;
        if lo <= 0.0 {
            (-b..=b).collect()
        } else {
            (a..=b).chain(-b..=-a).collect()
        }
    };
    let mut sum = ComplexValue::zero(p);
    let mut abs_sum = mag(0.0);
    for m in range(step) {
        let (v, a) = term(m, step)?;
        sum += &v;
        abs_sum += a;
    }
    let mut value = sum.mul_f64(step);
    let mut l1;
    let mut error;
    let mut level = 0;
    loop {
        // halve the step, keeping the old nodes
        let half = step / 2.0;
        for m in range(half) {
            if m % 2 != 0 {
                let (v, a) = term(m, half)?;
                sum += &v;
                abs_sum += a;
            }
        }
        step = half;
        let refined = sum.mul_f64(step);
        l1 = Float::with_val(MAG_PREC, &abs_sum * step);
        let diff = mag_of(&(&refined - &value));
        value = refined;
        error = diff.clone();
        level += 1;
        if diff <= Float::with_val(MAG_PREC, &l1 * tol) {
            break;
        }
        if level >= 8 {
            return Err(HeckeError::TruncationNotCertified(format!(
                "h* trapezoid did not settle at s = ({}, {})",
                sigma, t
            )));
        }
    }
    error += Float::with_val(MAG_PREC, &l1 * (-(ell * ell)).exp());
    error += Float::with_val(MAG_PREC, &l1 * (ctx.epsilon() * 10.0));
    Ok(HStarValue { value, l1, error })
}

/// Real-line form of `h*`, continued to `Re s <= 0` by adding the residues of the gamma
/// poles that cross the real line. Slower; kept for points too far left for the shift.
pub(crate) fn h_star_real_line(s: &ComplexValue, w: &GaussianWeight, ctx: &PrecisionContext) -> Result<HStarValue> {
    let p = ctx.bits();
    let sigma = s.re.to_f64();
    let t = s.im.to_f64();
    // a pole on the contour: use the mean value over a small circle instead
    let n_on = (0..4).find(|&n| (sigma + n as f64).abs() < 1e-6);
    if n_on.is_some() {
        return h_star_mean(s, w, ctx);
    }
    let s = s.with_prec(p);
    let tol = ctx.rel_tol * 1e-2;
    let ell = (-tol.ln()).sqrt() + 1.0 + (w.prefactor_degree() as f64 + 2.0 * sigma.abs()).sqrt();
    let q = w.width;
    let ta = t.abs();
    let (c1, h1) = envelope_peak(w.center, q, ta);
    let (c2, h2) = envelope_peak(-w.center, q, ta);
    let (mut lo, mut hi) = (c1 - ell * q, c1 + ell * q);
    if h2 > h1 + tol.ln() - 4.0 {
        lo = lo.min(c2 - ell * q);
        hi = hi.max(c2 + ell * q);
    }
    let lo = lo.max(0.0);
    // the ratio with the smaller modulus is e^{-2 pi min(|t|, u)} times the larger one
    let skip_at = (ctx.digits as f64 + 5.0) * std::f64::consts::LN_10 / (2.0 * PI);
    // phase of the dominant ratio turns at rate log|(u+t)/(u-t)|; Gaussian needs ~ one panel per width
    let ns = 64;
    let du = (hi - lo) / ns as f64;
    let mut turn = 0.0;
    for k in 0..ns {
        let u = lo + (k as f64 + 0.5) * du;
        turn += (((u + ta) / (u - ta).abs().max(du)).ln()).abs() * du;
    }
    let panels = 2 + (turn / 3.0).ceil() as usize + ((hi - lo) / q).ceil() as usize;
    let neg_u = |u: &Float| Float::with_val(p, -u);
    // modulus scale from a coarse sample of the two pieces, so that integrals which
    // cancel to zero by symmetry are judged against the size of what cancels
    let mut scale = mag(0.0);
    for k in 0..ns {
        let u = Float::with_val(p, lo + (k as f64 + 0.5) * du);
        let uh = Float::with_val(MAG_PREC, &u * &w.eval_real(&u, ctx)).abs();
        if uh.is_zero() {
            continue;
        }
        for v in [u.clone(), neg_u(&u)] {
            if let Some(l) = ln_ratio(&s, &v, p)? {
                scale += Float::with_val(MAG_PREC, &uh * Float::with_val(MAG_PREC, l.re.exp_ref())) * du;
            }
        }
    }
    let opts = QuadOptions {
        rel_tol: tol,
        abs_tol: Float::with_val(MAG_PREC, &scale * tol),
        initial_panels: panels.min(400),
        max_depth: 30,
        order: order_for(tol),
    };
    let r = integrate(
        |u| {
            let hu = w.eval_real(u, ctx);
            if hu.is_zero() {
                return Ok(ComplexValue::zero(p));
            }
            let uh = Float::with_val(p, u * &hu);
            let skip = ta.min(u.to_f64()) > skip_at;
            let mut acc = ComplexValue::zero(p);
            if !(skip && t > 0.0) {
                if let Some(l) = ln_ratio(&s, u, p)? {
                    acc += &l.exp();
                }
            }
            if !(skip && t < 0.0) {
                if let Some(l) = ln_ratio(&s, &neg_u(u), p)? {
                    acc = &acc - &l.exp();
                }
            }
            Ok(acc.mul_real(&uh))
        },
        &Float::with_val(p, lo),
        &Float::with_val(p, hi),
        &opts,
        ctx,
    )?;
    let mut value = r.value;
    let mut l1 = r.l1.max(&scale);
    let mut error = r.error + Float::with_val(MAG_PREC, &l1 * (-(ell * ell)).exp());

    // residues at u_n = i(s+n) for sigma + n < 0
    let two_pi = Float::with_val(p, Constant::Pi) * 2u32;
    let mut n = 0u32;
    while sigma + (n as f64) < 0.0 {
        let u_n = s.add_f64(n as f64).mul_i();
        let hu = w.eval(&u_n, ctx)?;
        if !hu.is_zero() {
            // 1 / Gamma(1 - 2s - n)
            let arg = s.mul_f64(-2.0).add_f64(1.0 - n as f64);
            let rg = if arg.im.is_zero() && arg.re.is_integer() && arg.re <= 0 {
                ComplexValue::zero(p)
            } else {
                lgamma_core(&arg, p)?.mul_f64(-1.0).exp()
            };
            let mut fact = Float::with_val(p, 1);
            for k in 2..=n {
                fact *= k;
            }
            let mut res = (&(&u_n * &hu) * &rg).mul_real(&two_pi).div_real(&fact);
            if n % 2 == 1 {
                res = -res;
            }
            l1 += mag_of(&res);
            value += &res;
        }
        n += 1;
    }
    error += Float::with_val(MAG_PREC, &l1 * (ctx.epsilon() * 10.0));
    Ok(HStarValue { value, l1, error })
}

fn h_star_mean(s: &ComplexValue, w: &GaussianWeight, ctx: &PrecisionContext) -> Result<HStarValue> {
    let p = ctx.bits();
    let n = 48usize;
    let mut acc = ComplexValue::zero(p);
    let mut l1 = mag(0.0);
    let mut error = mag(0.0);
    let two_pi = Float::with_val(p, Constant::Pi) * 2u32;
    for k in 0..n {
        let th = Float::with_val(p, &two_pi * (2 * k + 1) as u32) / (2 * n) as u32;
        let (sn, cs) = th.sin_cos(Float::new(p));
        let z = s + &ComplexValue::new(cs, sn).mul_f64(0.25);
        let v = h_star_real_line(&z, w, ctx)?;
        l1.max_mut(&v.l1);
        error.max_mut(&v.error);
        acc += &v.value;
    }
    Ok(HStarValue { value: acc.div_real(&Float::with_val(p, n)), l1, error })
}

/// `h*(s)`.
pub fn h_star(s: &ComplexValue, w: &GaussianWeight, ctx: &PrecisionContext) -> Result<ComplexValue> {
    Ok(h_star_detailed(s, w, ctx)?.value)
}

/// Memoised `h*` for one weight, shared by line integrals that revisit the same nodes.
pub struct HStarCache<'a> {
    pub weight: GaussianWeight,
    ctx: &'a PrecisionContext,
    map: RefCell<HashMap<(String, String), HStarValue>>,
}

impl<'a> HStarCache<'a> {
    pub fn new(weight: GaussianWeight, ctx: &'a PrecisionContext) -> Self {
        HStarCache { weight, ctx, map: RefCell::new(HashMap::new()) }
    }

    pub fn get(&self, s: &ComplexValue) -> Result<HStarValue> {
        let key = (s.re.to_string_radix(16, None), s.im.to_string_radix(16, None));
        if let Some(v) = self.map.borrow().get(&key) {
            return Ok(v.clone());
        }
        let v = h_star_detailed(s, &self.weight, self.ctx)?;
        self.map.borrow_mut().insert(key, v.clone());
        Ok(v)
    }

    pub fn len(&self) -> usize {
        self.map.borrow().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> PrecisionContext {
        PrecisionContext::new(30, 1e-12, 1000).unwrap()
    }

    fn c(re: f64, im: f64) -> ComplexValue {
        ComplexValue::from_f64(ctx().bits(), re, im)
    }

    #[test]
    fn forced_zeros() {
        let cx = ctx();
        for w in [GaussianWeight::kuznetsov(100.0, 10.0).unwrap(), GaussianWeight::quadratic(100.0, 10.0).unwrap()] {
            for s in [0.5, 1.5, 2.5] {
                let v = h_star_detailed(&c(s, 0.0), &w, &cx).unwrap();
                assert!(v.value.abs_f64() < 1e-25 * v.l1.to_f64().max(1.0), "s = {}", s);
            }
            let v = h_star_detailed(&c(-1.5, 0.0), &w, &cx).unwrap();
            let scale = h_star_detailed(&c(-1.5, 0.3), &w, &cx).unwrap().l1.to_f64();
            assert!(v.value.abs_f64() < 1e-8 * scale, "{:e} vs {:e}", v.value.abs_f64(), scale);
        }
    }

    #[test]
    fn continuation_is_analytic_across_zero() {
        // Cauchy estimate of h*(-0.3+0.2i) from a circle that straddles Re s = 0
        let cx = ctx();
        let w = GaussianWeight::kuznetsov(12.0, 3.0).unwrap();
        let z0 = c(-0.1, 0.2);
        let co = crate::quad::taylor_coefficients(|z| h_star(z, &w, &cx), &z0, 0.4, 0, 1e-9, &cx).unwrap();
        let direct = h_star(&z0, &w, &cx).unwrap();
        assert!((&co[0] - &direct).abs_f64() < 1e-8 * direct.abs_f64());
    }

    #[test]
    fn shifted_contour_matches_real_line() {
        let cx = ctx();
        for w in [GaussianWeight::kuznetsov(20.0, 4.0).unwrap(), GaussianWeight::quadratic(15.0, 3.0).unwrap()] {
            for (re, im) in [(0.3, 0.0), (0.2, 7.0), (-0.7, 3.0), (-1.2, 25.0), (1.1, -12.0), (0.1, 40.0)] {
                let a = h_star_detailed(&c(re, im), &w, &cx).unwrap();
                let b = h_star_real_line(&c(re, im), &w, &cx).unwrap();
                let d = (&a.value - &b.value).abs_f64();
                assert!(d < 1e-11 * a.l1.to_f64().max(b.l1.to_f64()), "s = ({}, {}): {:?} vs {:?}", re, im, a.value.to_f64(), b.value.to_f64());
            }
        }
    }

    #[test]
    fn conjugation_symmetry() {
        let cx = ctx();
        let w = GaussianWeight::quadratic(30.0, 5.0).unwrap();
        let a = h_star(&c(0.3, 4.0), &w, &cx).unwrap();
        let b = h_star(&c(0.3, -4.0), &w, &cx).unwrap();
        assert!((&a + &b.conj()).abs_f64() < 1e-10 * a.abs_f64());
    }
}
