use std::cell::RefCell;
use std::collections::HashMap;
use std::f64::consts::PI;

use rug::float::Constant;
use rug::Float;

use super::hline::{line_integral, trapezoid_step, HStarLine};
use super::line::{vertical_line_integral, Symmetry};
use super::weight::GaussianWeight;
use crate::complex::ComplexValue;
use crate::error::{HeckeError, Result};
use crate::precision::PrecisionContext;
use crate::quad::{ContourSpec, QuadOptions, QuadResult};
use crate::special_functions::gamma::lgamma_core;

/// Default number of `nu` terms in the Jacobi expansion.
pub const DEFAULT_N1: u32 = 4;
/// Default constant `C` in `lambda = C log K`.
pub const DEFAULT_LAMBDA_C: f64 = 2.0;
/// Default abscissa for the kernels `g`, `h0`, `h1`.
pub const DEFAULT_DELTA: f64 = 0.2;

/// Line integrals against `h*` for one weight. Values of `h*` on each abscissa are kept
/// and shared between kernels and arguments.
pub struct LineKernels<'a> {
    weight: GaussianWeight,
    ctx: &'a PrecisionContext,
    lines: RefCell<HashMap<(u64, u64), HStarLine>>,
    /// x-independent part of the `Psi+-` integrands at each line node
    psi_factors: RefCell<HashMap<(bool, u64), Vec<ComplexValue>>>,
}

fn check_half_integer(x: f64) -> Result<()> {
    if dist_to_half_integer(x) < 1e-3 {
        return Err(HeckeError::PoleAbscissa(x));
    }
    Ok(())
}

fn dist_to_half_integer(x: f64) -> f64 {
    (x - 0.5 - (x - 0.5).round()).abs()
}

impl<'a> LineKernels<'a> {
    pub fn new(w: GaussianWeight, ctx: &'a PrecisionContext) -> Self {
        LineKernels { weight: w, ctx, lines: RefCell::new(HashMap::new()), psi_factors: RefCell::new(HashMap::new()) }
    }

    pub fn weight(&self) -> &GaussianWeight {
        &self.weight
    }

    /// Number of distinct `h*` values computed so far.
    pub fn hstar_evaluations(&self) -> usize {
        self.lines.borrow().values().map(|l| l.nodes.len()).sum()
    }

    fn p(&self) -> u32 {
        self.ctx.bits()
    }

    fn zero(&self) -> QuadResult {
        QuadResult { value: ComplexValue::zero(self.p()), error: crate::quad::mag(0.0), l1: crate::quad::mag(0.0), evals: 0 }
    }

    /// Height up to which `h*` on a line can still grow.
    fn growth_height(&self) -> f64 {
        self.weight.center + 4.0
    }

    /// `int_{(abscissa)} F(s) h*(s) ds` where `F` is regular within `dist` of the line.
    fn line_step(&self, dist: f64) -> f64 {
        trapezoid_step(0.8 * dist.min(1.0), self.ctx.rel_tol * 1e-2)
    }

    fn line<F>(&self, abscissa: f64, dist: f64, min_height: f64, factor: F) -> Result<QuadResult>
    where
        F: FnMut(&ComplexValue) -> Result<ComplexValue>,
    {
        let dt = self.line_step(dist);
        let dist = 0.8 * dist.min(1.0);
        let key = (abscissa.to_bits(), dt.to_bits());
        let mut lines = self.lines.borrow_mut();
        if !lines.contains_key(&key) {
            lines.insert(key, HStarLine::new(&self.weight, abscissa, dt, self.ctx)?);
        }
        let line = lines.get_mut(&key).expect("line just inserted");
        line_integral(line, &self.weight, factor, min_height, dist, self.ctx)
    }

    fn lg(&self, z: &ComplexValue) -> Result<ComplexValue> {
        lgamma_core(z, self.p())
    }

    /// `Psi+(x) = int_{(beta)} Gamma^2(1/2 - s) tan(pi s) h*(s) x^s ds`.
    pub fn psi_plus(&self, x: f64, beta: f64) -> Result<QuadResult> {
        self.psi_pm(x, beta, true)
    }

    /// `Psi-(x) = int_{(beta)} Gamma^2(1/2 - s) h*(s) x^s / cos(pi s) ds`.
    pub fn psi_minus(&self, x: f64, beta: f64) -> Result<QuadResult> {
        self.psi_pm(x, beta, false)
    }

    fn psi_pm(&self, x: f64, beta: f64, plus: bool) -> Result<QuadResult> {
        if !(x > 0.0) {
            return Err(HeckeError::Domain(format!("x must be positive, got {}", x)));
        }
        if !(beta > -1.5 && beta < 0.5) {
            return Err(HeckeError::Domain(format!("beta must lie in (-3/2, 1/2), got {}", beta)));
        }
        check_half_integer(beta)?;
        if self.weight().is_zero() {
            return Ok(self.zero());
        }
        let p = self.p();
        let lx = Float::with_val(p, x).ln();
        let pi = Float::with_val(p, Constant::Pi);
        let dist = dist_to_half_integer(beta);
        let dt = self.line_step(dist);
        let mut cache = self.psi_factors.borrow_mut();
        let factors = cache.entry((plus, beta.to_bits())).or_default();
        self.line(beta, dist, self.growth_height(), |s| {
            let j = (s.im.to_f64() / dt).round() as usize;
            while factors.len() <= j {
                let t = Float::with_val(p, factors.len()) * dt;
                let sj = ComplexValue::new(Float::with_val(p, beta), t);
                let half_m = (&ComplexValue::real(Float::with_val(p, 0.5)) - &sj).with_prec(p);
                let ps = sj.mul_real(&pi);
                let trig = if plus { ps.tan() } else { ps.cos().recip() };
                factors.push(&self.lg(&half_m)?.mul_f64(2.0).exp() * &trig);
            }
            Ok(&factors[j] * &s.mul_real(&lx).exp())
        })
    }

    /// `psi(x) = pi^{-2} int_{(alpha)} (x/2)^{-2s} h*(s) / cos(pi s) ds`.
    pub fn psi_kernel(&self, x: f64, alpha: f64) -> Result<QuadResult> {
        if !(x > 0.0) {
            return Err(HeckeError::Domain(format!("x must be positive, got {}", x)));
        }
        if !(alpha > -1.5 && alpha < 1.5) {
            return Err(HeckeError::Domain(format!("alpha must lie in (-3/2, 3/2), got {}", alpha)));
        }
        check_half_integer(alpha)?;
        if self.weight().is_zero() {
            return Ok(self.zero());
        }
        let p = self.p();
        let lx = Float::with_val(p, x / 2.0).ln() * -2i32;
        let pi = Float::with_val(p, Constant::Pi);
        let pi2 = Float::with_val(p, pi.square_ref());
        let mut r = self.line(alpha, dist_to_half_integer(alpha), self.growth_height(), |s| Ok(&s.mul_real(&lx).exp() / &s.mul_real(&pi).cos()))?;
        r.value = r.value.div_real(&pi2);
        r.error /= pi2.to_f64();
        r.l1 /= pi2.to_f64();
        Ok(r)
    }

    /// `g(k) = pi^{-3} int_{(delta)} 2^{2w-1} Gamma^4(1/2 - w) tan(pi w) h*(w) / (k - 1/2 + w) dw`.
    pub fn g_k(&self, k: u32, delta: f64) -> Result<QuadResult> {
        if k < 12 || k % 2 == 1 {
            return Err(HeckeError::Domain(format!("k must be even and at least 12, got {}", k)));
        }
        check_delta(delta)?;
        if self.weight().is_zero() {
            return Ok(self.zero());
        }
        let p = self.p();
        let ln2 = Float::with_val(p, Constant::Log2);
        let pi = Float::with_val(p, Constant::Pi);
        let r = self.line(delta, dist_to_half_integer(delta), 0.0, |w| {
            let half_m = (&ComplexValue::real(Float::with_val(p, 0.5)) - w).with_prec(p);
            let l = &self.lg(&half_m)?.mul_f64(4.0) + &w.mul_f64(2.0).add_f64(-1.0).mul_real(&ln2);
            let den = w.add_f64(k as f64 - 0.5);
            Ok(&(&l.exp() * &w.mul_real(&pi).tan()) / &den)
        })?;
        Ok(scale_result(r, &pi_pow(p, 3).recip()))
    }

    /// `h0(r) = pi^{-3} int_{(delta)} 2^{2w+1} Gamma(w+ir) Gamma(w-ir) Gamma^4(1/2-w) sin(pi w) h*(w) dw`.
    pub fn h0(&self, r: f64, delta: f64) -> Result<QuadResult> {
        check_delta(delta)?;
        if self.weight().is_zero() {
            return Ok(self.zero());
        }
        let p = self.p();
        let r = r.abs();
        let ln2 = Float::with_val(p, Constant::Log2);
        let pi = Float::with_val(p, Constant::Pi);
        let ir = ComplexValue::from_f64(p, 0.0, r);
        let res = self.line(delta, delta.min(dist_to_half_integer(delta)), r + 2.0, |w| {
            let half_m = (&ComplexValue::real(Float::with_val(p, 0.5)) - w).with_prec(p);
            let l = &(&(&self.lg(&(w + &ir))? + &self.lg(&(w - &ir))?) + &self.lg(&half_m)?.mul_f64(4.0))
                + &w.mul_f64(2.0).add_f64(1.0).mul_real(&ln2);
            Ok(&l.exp() * &w.mul_real(&pi).sin())
        })?;
        Ok(scale_result(res, &pi_pow(p, 3).recip()))
    }

    /// `h1(r) = (2 pi^3)^{-1} int_{(delta)} 2^{2w} Gamma(w+ir) Gamma(w-ir) Gamma^4(1/2-w)
    /// cosh(pi r) (sin^2(pi w) + 1) h*(w) / cos(pi w) dw`.
    pub fn h1(&self, r: f64, delta: f64) -> Result<QuadResult> {
        check_delta(delta)?;
        if self.weight().is_zero() {
            return Ok(self.zero());
        }
        let p = self.p();
        let r = r.abs();
        let ln2 = Float::with_val(p, Constant::Log2);
        let pi = Float::with_val(p, Constant::Pi);
        let ir = ComplexValue::from_f64(p, 0.0, r);
        // ln cosh(pi r), stable for large r
        let pr = Float::with_val(p, &pi * r);
        let lcosh = Float::with_val(p, pr.cosh_ref()).ln();
        let res = self.line(delta, delta.min(dist_to_half_integer(delta)), r.max(self.weight.center) + 4.0, |w| {
            let half_m = (&ComplexValue::real(Float::with_val(p, 0.5)) - w).with_prec(p);
            let l = &(&(&self.lg(&(w + &ir))? + &self.lg(&(w - &ir))?) + &self.lg(&half_m)?.mul_f64(4.0))
                + &(&w.mul_f64(2.0).mul_real(&ln2) + &ComplexValue::real(lcosh.clone()));
            let pw = w.mul_real(&pi);
            let trig = &pw.sin().square().add_f64(1.0) / &pw.cos();
            Ok(&l.exp() * &trig)
        })?;
        Ok(scale_result(res, &(pi_pow(p, 3) * 2u32).recip()))
    }
}

fn check_delta(delta: f64) -> Result<()> {
    if !(delta > 0.0 && delta < 0.25) {
        return Err(HeckeError::Domain(format!("delta must lie in (0, 1/4), got {}", delta)));
    }
    Ok(())
}

fn pi_pow(p: u32, k: u32) -> Float {
    rug::ops::Pow::pow(Float::with_val(p, Constant::Pi), k)
}

fn scale_result(mut r: QuadResult, c: &Float) -> QuadResult {
    let cf = c.to_f64().abs();
    r.value = r.value.mul_real(c);
    r.error *= cf;
    r.l1 *= cf;
    r
}

/// `U_nu(x) = (1/(2 pi i lambda)) int_{(-1/lambda)} (4 pi^2 x / K^2)^w u_nu(w) Gamma(w/lambda) dw`
/// with `u_nu(w) = sum_j poly[j] w^j`.
///
/// The coefficients of `u_nu` are an input; `nu` only labels the term.
pub fn u_nu(x: f64, k: f64, nu: u32, lambda: f64, poly: &[f64], ctx: &PrecisionContext) -> Result<QuadResult> {
    let _ = nu;
    let p = ctx.bits();
    if !(x > 0.0) || !(k > 1.0) || !(lambda > 0.0) {
        return Err(HeckeError::Domain(format!("u_nu needs x > 0, K > 1, lambda > 0; got ({}, {}, {})", x, k, lambda)));
    }
    if poly.iter().all(|&c| c == 0.0) {
        return Ok(QuadResult { value: ComplexValue::zero(p), error: crate::quad::mag(0.0), l1: crate::quad::mag(0.0), evals: 0 });
    }
    u_nu_on_line(x, k, lambda, poly, -1.0 / lambda, ctx)
}

/// `U_nu` on an arbitrary abscissa in `(-lambda, 0)`; the value does not depend on it.
pub fn u_nu_on_line(x: f64, k: f64, lambda: f64, poly: &[f64], abscissa: f64, ctx: &PrecisionContext) -> Result<QuadResult> {
    let p = ctx.bits();
    if !(abscissa < 0.0 && abscissa > -lambda) {
        return Err(HeckeError::PoleAbscissa(abscissa));
    }
    let pi = Float::with_val(p, Constant::Pi);
    let lx = Float::with_val(p, Float::with_val(p, pi.square_ref()) * 4u32 * x / (k * k)).ln();
    let lam = Float::with_val(p, lambda);
    let coeffs: Vec<Float> = poly.iter().map(|&c| Float::with_val(p, c)).collect();
    let spec = ContourSpec::line(abscissa).with_chunk(4.0 * lambda.max(1.0));
    let opts = QuadOptions::from_ctx(ctx).panels(4);
    let mut r = vertical_line_integral(
        |w| {
            let mut pw = ComplexValue::zero(p);
            for c in coeffs.iter().rev() {
                pw = (&pw * w).add_real(c);
            }
            let l = &w.mul_real(&lx) + &lgamma_core(&w.div_real(&lam), p)?;
            Ok(&l.exp() * &pw)
        },
        &spec,
        Symmetry::Conjugate,
        PI / (2.0 * lambda),
        0.0,
        &opts,
        ctx,
    )?;
    // divide by 2 pi i lambda
    let den = Float::with_val(p, &pi * 2u32) * lambda;
    r.value = r.value.div_real(&den).mul_i().mul_f64(-1.0);
    let d = den.to_f64();
    r.error /= d;
    r.l1 /= d;
    Ok(r)
}

/// The bound `(x/K^2)^{-C/log K} log^2 K (1 + sum |coeffs|)` for `|U_nu(x)|`.
pub fn u_nu_bound(x: f64, k: f64, c: f64, poly: &[f64]) -> f64 {
    let lk = k.ln();
    (x / (k * k)).powf(-c / lk) * lk * lk * (1.0 + poly.iter().map(|a| a.abs()).sum::<f64>())
}

/// `Psi+(x)` for a single evaluation.
pub fn psi_plus(x: f64, w: &GaussianWeight, beta: f64, ctx: &PrecisionContext) -> Result<ComplexValue> {
    Ok(LineKernels::new(*w, ctx).psi_plus(x, beta)?.value)
}

/// `Psi-(x)` for a single evaluation.
pub fn psi_minus(x: f64, w: &GaussianWeight, beta: f64, ctx: &PrecisionContext) -> Result<ComplexValue> {
    Ok(LineKernels::new(*w, ctx).psi_minus(x, beta)?.value)
}

/// `psi(x)` for a single evaluation.
pub fn psi_kernel(x: f64, w: &GaussianWeight, alpha: f64, ctx: &PrecisionContext) -> Result<ComplexValue> {
    Ok(LineKernels::new(*w, ctx).psi_kernel(x, alpha)?.value)
}

/// `g(k)` on the default abscissa.
pub fn transform_g_k(k: u32, w: &GaussianWeight, ctx: &PrecisionContext) -> Result<ComplexValue> {
    Ok(LineKernels::new(*w, ctx).g_k(k, DEFAULT_DELTA)?.value)
}

/// `h0(r)` on the default abscissa.
pub fn transform_h0(r: f64, w: &GaussianWeight, ctx: &PrecisionContext) -> Result<ComplexValue> {
    Ok(LineKernels::new(*w, ctx).h0(r, DEFAULT_DELTA)?.value)
}

/// `h1(r)` on the default abscissa.
pub fn transform_h1(r: f64, w: &GaussianWeight, ctx: &PrecisionContext) -> Result<ComplexValue> {
    Ok(LineKernels::new(*w, ctx).h1(r, DEFAULT_DELTA)?.value)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> (GaussianWeight, PrecisionContext) {
        (GaussianWeight::kuznetsov(12.0, 3.0).unwrap(), PrecisionContext::new(30, 1e-12, 1000).unwrap())
    }

    #[test]
    fn psi_pm_contour_shift() {
        let (w, ctx) = small();
        let lk = LineKernels::new(w, &ctx);
        let a = lk.psi_minus(1.0, -0.7).unwrap();
        let b = lk.psi_minus(1.0, 0.2).unwrap();
        assert!((&a.value - &b.value).abs_f64() < 1e-10 * a.l1.to_f64().max(b.l1.to_f64()));
        let a = lk.psi_plus(2.0, -1.2).unwrap();
        let b = lk.psi_plus(2.0, 0.2).unwrap();
        assert!((&a.value - &b.value).abs_f64() < 1e-10 * a.l1.to_f64().max(b.l1.to_f64()));
        assert!(matches!(lk.psi_plus(1.0, -0.5), Err(HeckeError::PoleAbscissa(_))));
    }

    #[test]
    fn psi_kernel_contour_shift() {
        let (w, ctx) = small();
        let lk = LineKernels::new(w, &ctx);
        let a = lk.psi_kernel(24.0, -2.0 / 3.0).unwrap();
        let b = lk.psi_kernel(24.0, 2.0 / 3.0).unwrap();
        assert!((&a.value - &b.value).abs_f64() < 1e-10 * a.l1.to_f64().max(b.l1.to_f64()));
        assert!(a.value.re.to_f64().abs() > 1.0);
    }

    #[test]
    fn g_k_independent_of_delta() {
        let (w, ctx) = small();
        let lk = LineKernels::new(w, &ctx);
        let a = lk.g_k(12, 0.1).unwrap();
        let b = lk.g_k(12, 0.2).unwrap();
        assert!((&a.value - &b.value).abs_f64() < 1e-11 * a.l1.to_f64().max(b.l1.to_f64()));
        assert!(lk.g_k(11, 0.1).is_err());
        assert!(lk.g_k(12, 0.3).is_err());
    }

    #[test]
    fn zero_weight_gives_zero() {
        let ctx = PrecisionContext::new(30, 1e-12, 1000).unwrap();
        let w = GaussianWeight::kuznetsov(12.0, 3.0).unwrap().scaled(0.0);
        let lk = LineKernels::new(w, &ctx);
        assert!(lk.psi_plus(1.0, 0.2).unwrap().value.is_zero());
        assert!(lk.psi_kernel(1.0, 0.1).unwrap().value.is_zero());
        assert!(lk.h1(3.0, 0.2).unwrap().value.is_zero());
        assert!(u_nu(5.0, 10.0, 0, 2.0, &[0.0, 0.0], &ctx).unwrap().value.is_zero());
    }

    #[test]
    fn u_nu_constant_matches_closed_form() {
        // with u = 1 the line integral sums the gamma residues left of the line: exp(-X^{-lambda}) - 1
        let ctx = PrecisionContext::new(30, 1e-14, 1000).unwrap();
        let k: f64 = 100.0;
        let lambda = 2.0 * k.ln();
        let scale = k * k / (4.0 * PI * PI);
        for x in [k * k, scale, 1.05 * scale, 0.97 * scale] {
            let r = u_nu(x, k, 0, lambda, &[1.0], &ctx).unwrap();
            let big_x = x / scale;
            let want = (-big_x.powf(-lambda)).exp() - 1.0;
            let got = r.value.re.to_f64();
            assert!((got - want).abs() < 1e-12 * (want.abs() + r.l1.to_f64()), "{} vs {}", got, want);
            assert!(r.value.im.to_f64().abs() < 1e-20);
        }
    }

    #[test]
    fn u_nu_abscissa_invariance() {
        let ctx = PrecisionContext::new(30, 1e-14, 1000).unwrap();
        let lambda = 2.0 * 50f64.ln();
        let poly = [0.3, -1.0, 0.25];
        for x in [100.0, 700.0] {
            let a = u_nu_on_line(x, 50.0, lambda, &poly, -1.0 / lambda, &ctx).unwrap();
            let b = u_nu_on_line(x, 50.0, lambda, &poly, -2.0, &ctx).unwrap();
            let scale = a.l1.to_f64().max(b.l1.to_f64());
            assert!((&a.value - &b.value).abs_f64() < 1e-12 * scale, "{:?} {:?}", a.value.to_f64(), b.value.to_f64());
        }
    }
}
