use std::f64::consts::PI;

use rug::Float;
use serde::Serialize;

use crate::complex::ComplexValue;
use crate::error::{HeckeError, Result};
use crate::precision::PrecisionContext;
use crate::special_functions::arith::{gcd, mod_inverse};
use crate::special_functions::{e_rational, hurwitz_zeta, kloosterman, riemann_zeta};
use crate::transforms::{GaussianWeight, LineKernels};

/// Abscissa of the `psi` line used for the values.
pub const PSI_ALPHA: f64 = -2.0 / 3.0;
/// Abscissa used for the envelope `|psi(x)| <= E (x/2)^{-2 alpha}` bounding the tail.
pub const PSI_ENVELOPE_ALPHA: f64 = -1.4;

#[derive(Clone, Debug, Serialize)]
pub struct TraceRhs {
    pub value: ComplexValue,
    /// Quadrature error plus `tail_bound`.
    pub error: f64,
    pub tail_bound: f64,
    pub terms: usize,
    /// `E` in the envelope of `psi`.
    pub envelope: f64,
}

impl TraceRhs {
    /// `TailNotCertified` unless the tail is below `tol * |value|`.
    pub fn certify(&self, tol: f64) -> Result<()> {
        let v = self.value.abs_f64();
        if self.tail_bound <= tol * v {
            Ok(())
        } else {
            Err(HeckeError::TailNotCertified(format!(
                "l-tail bound {:e} against |value| {:e} after {} terms",
                self.tail_bound, v, self.terms
            )))
        }
    }
}

struct Inner {
    value: ComplexValue,
    error: f64,
}

fn inner_sum(kern: &LineKernels, m: u64, ell_cutoff: u64, alpha: f64, ctx: &PrecisionContext) -> Result<Inner> {
    let p = ctx.bits();
    let mut value = ComplexValue::zero(p);
    let mut error = 0.0;
    let x0 = 4.0 * PI * (m as f64).sqrt();
    for ell in 1..=ell_cutoff {
        let s = kloosterman(m as i64, -1, ell, ctx)?;
        let psi = kern.psi_kernel(x0 / ell as f64, alpha)?;
        value = &value + &(&s * &psi.value).div_real(&Float::with_val(p, ell));
        error += s.abs_f64() / ell as f64 * psi.error.to_f64();
    }
    Ok(Inner { value, error })
}

fn envelope(kern: &LineKernels) -> Result<f64> {
    Ok(kern.psi_kernel(2.0, PSI_ENVELOPE_ALPHA)?.l1.to_f64())
}

/// `|S| <= l` and the envelope give `sum_{l > L} E (2 pi sqrt(m) / l)^{2a}` with `a = -alpha`.
fn ell_tail(e: f64, m: u64, ell_cutoff: u64) -> f64 {
    let a = -2.0 * PSI_ENVELOPE_ALPHA;
    e * (2.0 * PI * (m as f64).sqrt()).powf(a) * (ell_cutoff as f64).powf(1.0 - a) / (a - 1.0)
}

/// `m^{-u} sum_{l <= L} l^{-1} S(m, -1; l) psi(4 pi sqrt(m) / l)` with `psi` on the line `alpha`.
///
/// The discarded tail is bounded by the trivial Kloosterman bound and the envelope of `psi`; it is
/// included in `error` but not required to be small, see [`TraceRhs::certify`].
pub fn trace_rhs(m: u64, u: &ComplexValue, w: &GaussianWeight, ell_cutoff: u64, alpha: f64, ctx: &PrecisionContext) -> Result<TraceRhs> {
    trace_rhs_with(&LineKernels::new(*w, ctx), m, u, ell_cutoff, alpha, ctx)
}

/// As [`trace_rhs`], reusing the `h*` values already held by `kern`.
pub fn trace_rhs_with(kern: &LineKernels, m: u64, u: &ComplexValue, ell_cutoff: u64, alpha: f64, ctx: &PrecisionContext) -> Result<TraceRhs> {
    if m == 0 || ell_cutoff == 0 {
        return Err(HeckeError::Domain("m and the l-cutoff must be positive".into()));
    }
    let p = ctx.bits();
    if kern.weight().is_zero() {
        return Ok(TraceRhs { value: ComplexValue::zero(p), error: 0.0, tail_bound: 0.0, terms: ell_cutoff as usize, envelope: 0.0 });
    }
    let inner = inner_sum(kern, m, ell_cutoff, alpha, ctx)?;
    let e = envelope(kern)?;
    let mu = ComplexValue::real_base_pow(&Float::with_val(p, m), &u.mul_f64(-1.0));
    let scale = mu.abs_f64();
    let tail = ell_tail(e, m, ell_cutoff) * scale;
    Ok(TraceRhs {
        value: &inner.value * &mu,
        error: inner.error * scale + tail,
        tail_bound: tail,
        terms: ell_cutoff as usize,
        envelope: e,
    })
}

/// `sum_{m <= M} m^{-u} sum_{l <= L} ...` for `Re u > 2`.
///
/// The envelope gives `|inner(m)| << m^{1.4}`, so the bound on the `m`-tail is finite only for
/// `Re u > 2.4` and is reported as infinite below that.
pub fn trace_rhs_summed(m_max: u64, u: &ComplexValue, w: &GaussianWeight, ell_cutoff: u64, alpha: f64, ctx: &PrecisionContext) -> Result<TraceRhs> {
    let sigma = u.re.to_f64();
    if !(sigma > 2.0) {
        return Err(HeckeError::Domain(format!("the m-sum needs Re u > 2, got {}", sigma)));
    }
    if m_max == 0 || ell_cutoff == 0 {
        return Err(HeckeError::Domain("m_max and the l-cutoff must be positive".into()));
    }
    let p = ctx.bits();
    if w.is_zero() {
        return Ok(TraceRhs { value: ComplexValue::zero(p), error: 0.0, tail_bound: 0.0, terms: 0, envelope: 0.0 });
    }
    let kern = LineKernels::new(*w, ctx);
    let e = envelope(&kern)?;
    let mut value = ComplexValue::zero(p);
    let (mut error, mut tail) = (0.0, 0.0);
    for m in 1..=m_max {
        let inner = inner_sum(&kern, m, ell_cutoff, alpha, ctx)?;
        let mu = ComplexValue::real_base_pow(&Float::with_val(p, m), &u.mul_f64(-1.0));
        let scale = mu.abs_f64();
        value = &value + &(&inner.value * &mu);
        let t = ell_tail(e, m, ell_cutoff) * scale;
        error += inner.error * scale + t;
        tail += t;
    }
    let a = -2.0 * PSI_ENVELOPE_ALPHA;
    let growth = a / 2.0;
    let m_tail = if sigma > growth + 1.0 {
        // sum_l l^{-a} <= 1 + 1/(a-1)
        let zeta_a = 1.0 + 1.0 / (a - 1.0);
        e * zeta_a * (2.0 * PI).powf(a) * (m_max as f64).powf(growth + 1.0 - sigma) / (sigma - growth - 1.0)
    } else {
        f64::INFINITY
    };
    Ok(TraceRhs { value, error: error + m_tail, tail_bound: tail + m_tail, terms: (m_max * ell_cutoff) as usize, envelope: e })
}

#[derive(Clone, Debug, Serialize)]
pub struct MpmPartial {
    pub plus: ComplexValue,
    pub minus: ComplexValue,
    /// Bound on the discarded `l > L` part of either series.
    pub tail_bound: f64,
    pub terms: usize,
}

/// Partial sums over `l <= L` of
/// `M_pm(w) = sum_l sum_{(a,l)=1} e(-a/l) l^{-2w} (zeta(w, abar/l) pm zeta(w, 1 - abar/l))`,
/// with the Hurwitz parameters taken in `(0, 1]`.
pub fn m_pm_partial(w: &ComplexValue, ell_cutoff: u64, ctx: &PrecisionContext) -> Result<MpmPartial> {
    let sigma = w.re.to_f64();
    if !(sigma > 1.0) {
        return Err(HeckeError::Domain(format!("M_pm is only defined by its series for Re w > 1, got {}", sigma)));
    }
    if ell_cutoff == 0 {
        return Err(HeckeError::Domain("the l-cutoff must be positive".into()));
    }
    let p = ctx.bits();
    let mut plus = ComplexValue::zero(p);
    let mut minus = ComplexValue::zero(p);
    let mut terms = 0;
    let param = |num: i64, den: i64| {
        let r = num.rem_euclid(den);
        Float::with_val(p, if r == 0 { den } else { r }) / den
    };
    for ell in 1..=ell_cutoff as i64 {
        let le = ComplexValue::real_base_pow(&Float::with_val(p, ell), &w.mul_f64(-2.0));
        let mut acc_p = ComplexValue::zero(p);
        let mut acc_m = ComplexValue::zero(p);
        for a in 1..=ell {
            if gcd(a, ell) != 1 {
                continue;
            }
            let ab = mod_inverse(a, ell).expect("a is a unit");
            let z1 = hurwitz_zeta(w, &param(ab, ell), ctx)?;
            let z2 = hurwitz_zeta(w, &param(ell - ab, ell), ctx)?;
            let e = e_rational(-a, ell, p);
            acc_p = &acc_p + &(&e * &(&z1 + &z2));
            acc_m = &acc_m + &(&e * &(&z1 - &z2));
            terms += 1;
        }
        plus = &plus + &(&acc_p * &le);
        minus = &minus + &(&acc_m * &le);
    }
    // sum over units of |zeta(w, b/l)| <= l^sigma zeta(sigma), so each l contributes at most
    // 2 zeta(sigma) l^{-sigma}
    let zs = riemann_zeta(&ComplexValue::real(Float::with_val(p, sigma)), ctx)?.re.to_f64();
    let tail = 2.0 * zs * (ell_cutoff as f64).powf(1.0 - sigma) / (sigma - 1.0);
    Ok(MpmPartial { plus, minus, tail_bound: tail, terms })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> PrecisionContext {
        PrecisionContext::new(30, 1e-10, 1000).unwrap()
    }

    #[test]
    fn first_term_of_m_pm() {
        let cx = ctx();
        let p = cx.bits();
        let w = ComplexValue::from_f64(p, 2.5, 1.0);
        let r = m_pm_partial(&w, 1, &cx).unwrap();
        let z = riemann_zeta(&w, &cx).unwrap().mul_f64(2.0);
        assert!((&r.plus - &z).abs_f64() < 1e-25);
        assert!(r.minus.abs_f64() < 1e-25);
        // l = 2 contributes nothing to M_-
        let r2 = m_pm_partial(&w, 2, &cx).unwrap();
        assert!(r2.minus.abs_f64() < 1e-25);
        assert!(m_pm_partial(&ComplexValue::from_f64(p, 1.0, 3.0), 5, &cx).is_err());
    }

    #[test]
    fn m_pm_cutoff_doubling_within_tail() {
        let cx = ctx();
        let w = ComplexValue::from_f64(cx.bits(), 2.0, 0.0);
        let a = m_pm_partial(&w, 16, &cx).unwrap();
        let b = m_pm_partial(&w, 32, &cx).unwrap();
        assert!((&a.plus - &b.plus).abs_f64() <= a.tail_bound);
        assert!((&a.minus - &b.minus).abs_f64() <= a.tail_bound);
        assert!(b.tail_bound < a.tail_bound);
    }

    #[test]
    fn zero_weight_gives_zero() {
        let cx = ctx();
        let w = GaussianWeight::kuznetsov(50.0, 10.0).unwrap().scaled(0.0);
        let u = ComplexValue::from_f64(cx.bits(), 0.0, 0.0);
        let r = trace_rhs(1, &u, &w, 10, PSI_ALPHA, &cx).unwrap();
        assert!(r.value.is_zero());
    }
}
