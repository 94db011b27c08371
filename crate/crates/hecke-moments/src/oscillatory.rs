//! Gaussian moments, the arctanh phase series and a saddle-point check against quadrature.

use rug::float::Constant;
use rug::{Float, Rational};
use serde::Serialize;

use crate::complex::ComplexValue;
use crate::error::{HeckeError, Result};
use crate::precision::PrecisionContext;
use crate::quad::{integrate, QuadOptions};

/// Highest supported order of the Gaussian moments.
pub const MAX_GAUSSIAN_MOMENT: usize = 8;
/// Number of phase-series coefficients kept.
pub const PHASE_SERIES_TERMS: usize = 12;
/// Default constant in the no-saddle range `n > C K0^2 m / N^2`.
pub const DEFAULT_SADDLE_C: f64 = 10.0;

/// Coefficients of `P_j(A) / sqrt(pi)`, lowest degree first.
///
/// `P_{j+1} = P_j' + (A/2) P_j`, from differentiating `sqrt(pi) e^{A^2/4}` in `A`.
pub fn gaussian_moment_poly(j: usize) -> Vec<Rational> {
    let mut p = vec![Rational::from(1)];
    for _ in 0..j {
        let mut next = vec![Rational::new(); p.len() + 1];
        for (d, c) in p.iter().enumerate() {
            if d > 0 {
                next[d - 1] += Rational::from(c * d as u32);
            }
            next[d + 1] += Rational::from(c / 2u32);
        }
        p = next;
    }
    p
}

/// `int y^j e^{Ay - y^2} dy = P_j(A) e^{A^2/4}` over the real line.
pub fn gaussian_moment(j: usize, a: &ComplexValue, ctx: &PrecisionContext) -> Result<ComplexValue> {
    if j > MAX_GAUSSIAN_MOMENT {
        return Err(HeckeError::Domain(format!("moment order {} above {}", j, MAX_GAUSSIAN_MOMENT)));
    }
    let p = ctx.bits();
    let a = a.with_prec(p);
    let mut acc = ComplexValue::zero(p);
    for c in gaussian_moment_poly(j).iter().rev() {
        acc = (&acc * &a).add_real(&Float::with_val(p, c));
    }
    let sqrt_pi = Float::with_val(p, Constant::Pi).sqrt();
    let e = a.square().div_real(&Float::with_val(p, 4)).exp();
    Ok((&acc * &e).mul_real(&sqrt_pi))
}

/// Exact `b_1..b_{j_max}` in `log(sqrt(x/(1-x)) + sqrt(1/(1-x))) = sum b_j x^{j/2}`.
///
/// The left side is `log(1 + y) - log(1 - y^2)/2` with `y = sqrt(x)`; the two series are added
/// termwise.
pub fn phase_series_b_exact(j_max: usize) -> Result<Vec<Rational>> {
    if j_max > PHASE_SERIES_TERMS {
        return Err(HeckeError::Domain(format!("phase series supports j <= {}", PHASE_SERIES_TERMS)));
    }
    let mut b = vec![Rational::new(); j_max + 1];
    for (j, bj) in b.iter_mut().enumerate().skip(1) {
        // log(1 + y)
        let sign = if j % 2 == 1 { 1 } else { -1 };
        *bj += Rational::from((sign, j as u32));
        // -log(1 - y^2)/2 = sum y^{2k} / (2k)
        if j % 2 == 0 {
            *bj += Rational::from((1, j as u32));
        }
    }
    Ok(b)
}

/// `b_1..b_{j_max}` as floating point values; index `j - 1` holds `b_j`.
pub fn phase_series_b(j_max: usize, ctx: &PrecisionContext) -> Result<Vec<Float>> {
    let p = ctx.bits();
    Ok(phase_series_b_exact(j_max)?.into_iter().skip(1).map(|r| Float::with_val(p, &r)).collect())
}

/// `F(m, n) = -2 K0 log(sqrt(m/(n-m)) + sqrt(n/(n-m)))`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PhaseF {
    pub m: u64,
    pub n: u64,
    pub k0: f64,
}

impl PhaseF {
    pub fn new(m: u64, n: u64, k0: f64) -> Result<Self> {
        if m == 0 || m >= n || !(k0 > 0.0) {
            return Err(HeckeError::Domain(format!("phase needs 0 < m < n and K0 > 0, got ({}, {}, {})", m, n, k0)));
        }
        Ok(PhaseF { m, n, k0 })
    }

    pub fn value(&self, ctx: &PrecisionContext) -> Float {
        let p = ctx.bits();
        let d = Float::with_val(p, self.n - self.m);
        let a = Float::with_val(p, self.m) / &d;
        let b = Float::with_val(p, self.n) / &d;
        let l = (a.sqrt() + b.sqrt()).ln();
        l * (-2.0 * self.k0)
    }
}

/// `d/dn (F(m1, n) - F(m2, n))`, using `dF/dn = K0 sqrt(m) / (sqrt(n) (n - m))`.
pub fn phase_difference_derivative(m1: u64, m2: u64, n: u64, k0: f64, ctx: &PrecisionContext) -> Result<Float> {
    if m1.max(m2) >= n || m1 == 0 || m2 == 0 {
        return Err(HeckeError::Domain(format!("need 0 < m_i < n, got ({}, {}, {})", m1, m2, n)));
    }
    let p = ctx.bits();
    let nn = Float::with_val(p, n);
    let d = |m: u64| -> Float {
        let sm = Float::with_val(p, m).sqrt();
        sm / (Float::with_val(p, nn.sqrt_ref()) * Float::with_val(p, &nn - m))
    };
    Ok((d(m1) - d(m2)) * k0)
}

/// Phase `f(x) = 4 pi sqrt(n x) + 2 K0 sum_{j <= j_max} b_j (m/x)^{j/2}` of the saddle-point
/// integral and its first two derivatives.
///
/// The factor 2 on `K0` is the one carried by `F(m, x)`.
#[derive(Clone, Debug)]
pub struct SaddlePhase {
    pub m: u64,
    pub n: u64,
    pub k0: f64,
    b: Vec<Float>,
    p: u32,
}

impl SaddlePhase {
    pub fn new(m: u64, n: u64, k0: f64, j_max: usize, ctx: &PrecisionContext) -> Result<Self> {
        if m == 0 || n == 0 || !(k0 > 0.0) {
            return Err(HeckeError::Domain(format!("saddle phase needs m, n, K0 > 0, got ({}, {}, {})", m, n, k0)));
        }
        Ok(SaddlePhase { m, n, k0, b: phase_series_b(j_max, ctx)?, p: ctx.bits() })
    }

    /// `(f, f', f'')` at `x`.
    pub fn eval(&self, x: &Float) -> (Float, Float, Float) {
        let p = self.p;
        let pi = Float::with_val(p, Constant::Pi);
        let nx = Float::with_val(p, x * self.n);
        let snx = nx.sqrt();
        let mut f = Float::with_val(p, &snx * &pi) * 4u32;
        // d/dx 4 pi sqrt(n x) = 2 pi sqrt(n x) / x
        let mut d1 = Float::with_val(p, &snx * &pi) * 2u32 / x;
        let mut d2 = Float::with_val(p, &snx * &pi) * -1i32 / Float::with_val(p, x.square_ref());
        let r = (Float::with_val(p, self.m) / x).sqrt();
        let mut rj = Float::with_val(p, 1);
        let kk = 2.0 * self.k0;
        for (i, bj) in self.b.iter().enumerate() {
            let j = (i + 1) as f64;
            rj *= &r;
            if bj.is_zero() {
                continue;
            }
            let term = Float::with_val(p, bj * &rj) * kk;
            f += &term;
            // (m/x)^{j/2} has derivative -(j/2) (m/x)^{j/2} / x
            d1 -= Float::with_val(p, &term * (j / 2.0)) / x;
            d2 += Float::with_val(p, &term * (j / 2.0 * (j / 2.0 + 1.0))) / Float::with_val(p, x.square_ref());
        }
        (f, d1, d2)
    }

    /// Leading-order location `K0 sqrt(m/n) / (2 pi)`.
    pub fn leading_x0(&self) -> f64 {
        self.k0 * (self.m as f64 / self.n as f64).sqrt() / (2.0 * std::f64::consts::PI)
    }
}

/// Root of `f'(x) = 0` for the full truncated series.
pub fn saddle_point_x0(m: u64, n: u64, k0: f64, ctx: &PrecisionContext) -> Result<Float> {
    saddle_point_x0_truncated(m, n, k0, PHASE_SERIES_TERMS, ctx)
}

/// Root of `f'(x) = 0` with the phase series cut after `j_max` terms.
///
/// The search runs over `x >= 4m`, where the series is used well inside its disc of
/// convergence; a sign change of `f'` there is required.
pub fn saddle_point_x0_truncated(m: u64, n: u64, k0: f64, j_max: usize, ctx: &PrecisionContext) -> Result<Float> {
    let phase = SaddlePhase::new(m, n, k0, j_max, ctx)?;
    let p = ctx.bits();
    let mut lo = Float::with_val(p, 4 * m);
    if phase.eval(&lo).1 >= 0 {
        return Err(HeckeError::NoRoot(format!(
            "f' is positive already at x = 4m for (m, n, K0) = ({}, {}, {})",
            m, n, k0
        )));
    }
    let mut hi = Float::with_val(p, phase.leading_x0().max(8.0 * m as f64) * 2.0);
    let mut tries = 0;
    while phase.eval(&hi).1 <= 0 {
        hi *= 2u32;
        tries += 1;
        if tries > 200 {
            return Err(HeckeError::NoRoot("f' never changes sign".into()));
        }
    }
    let mut x = Float::with_val(p, phase.leading_x0()).clamp(&lo, &hi);
    let tiny = Float::with_val(p, Float::i_exp(1, -(p as i32) + 8));
    for _ in 0..4 * p {
        let (_, d1, d2) = phase.eval(&x);
        if d1.is_zero() {
            return Ok(x);
        }
        if d1 < 0 {
            lo = x.clone();
        } else {
            hi = x.clone();
        }
        let mut next = Float::with_val(p, &x - Float::with_val(p, &d1 / &d2));
        if !(next > lo && next < hi) || d2 <= 0 {
            next = Float::with_val(p, &lo + &hi) / 2u32;
        }
        let step = Float::with_val(p, &next - &x).abs();
        x = next;
        if step <= Float::with_val(p, &x * &tiny) {
            return Ok(x);
        }
    }
    Ok(x)
}

/// `C^infinity` bump, zero outside `[N/2, 5N/2]` and one on `[N, 2N]`.
pub fn bump(x: &Float, big_n: f64, p: u32) -> Float {
    let step = |t: Float| -> Float {
        // smooth transition from 0 at t <= 0 to 1 at t >= 1
        if t <= 0 {
            return Float::with_val(p, 0);
        }
        if t >= 1 {
            return Float::with_val(p, 1);
        }
        let a = Float::with_val(p, -Float::with_val(p, t.recip_ref())).exp();
        let one_m = Float::with_val(p, 1) - &t;
        let b = Float::with_val(p, -one_m.recip()).exp();
        let den = Float::with_val(p, &a + &b);
        a / den
    };
    let h = big_n / 2.0;
    if *x < big_n {
        step(Float::with_val(p, x - h) / h)
    } else if *x <= 2.0 * big_n {
        Float::with_val(p, 1)
    } else {
        step(Float::with_val(p, 2.5 * big_n - x) / h)
    }
}

/// Leading stationary-phase value against direct quadrature of
/// `int phi(x) x^{-1/2} n^{-1/4} e^{i f(x)} dx` over `[N/2, 5N/2]`.
#[derive(Clone, Debug, Serialize)]
pub struct SaddleComparison {
    pub x0: f64,
    pub saddle_value: ComplexValue,
    pub quad_value: ComplexValue,
    pub rel_err: f64,
}

/// Direct quadrature of the saddle-point integral, with or without the bump.
pub fn saddle_integral(m: u64, n: u64, k0: f64, big_n: f64, with_bump: bool, ctx: &PrecisionContext) -> Result<ComplexValue> {
    let phase = SaddlePhase::new(m, n, k0, PHASE_SERIES_TERMS, ctx)?;
    let p = ctx.bits();
    if !with_bump {
        return Ok(ComplexValue::zero(p));
    }
    let a = Float::with_val(p, big_n / 2.0);
    let b = Float::with_val(p, 2.5 * big_n);
    // panels about a quarter turn of the fastest phase
    let (_, d_lo, _) = phase.eval(&a);
    let (_, d_hi, _) = phase.eval(&b);
    let rate = d_lo.to_f64().abs().max(d_hi.to_f64().abs());
    let turns = rate * 2.0 * big_n / (2.0 * std::f64::consts::PI);
    let panels = (4.0 * turns).ceil().max(8.0) as usize;
    let n_quarter = Float::with_val(p, n).sqrt().sqrt();
    let opts = QuadOptions::from_ctx(ctx).panels(panels.min(200_000));
    let r = integrate(
        |x| {
            let phi = bump(x, big_n, p);
            if phi.is_zero() {
                return Ok(ComplexValue::zero(p));
            }
            let (f, _, _) = phase.eval(x);
            let amp = phi / Float::with_val(p, x.sqrt_ref()) / &n_quarter;
            let (s, c) = f.sin_cos(Float::new(p));
            Ok(ComplexValue::new(c * &amp, s * amp))
        },
        &a,
        &b,
        &opts,
        ctx,
    )?;
    Ok(r.value)
}

/// Stationary-phase value `phi(x0) x0^{-1/2} n^{-1/4} sqrt(2 pi / |f''|) e^{i f(x0) + i pi/4 sgn f''}`
/// compared with the quadrature.
pub fn saddle_vs_quadrature(m: u64, n: u64, k0: f64, big_n: f64, ctx: &PrecisionContext) -> Result<SaddleComparison> {
    let p = ctx.bits();
    let x0 = saddle_point_x0(m, n, k0, ctx)?;
    let x0f = x0.to_f64();
    if !(x0f >= big_n / 2.0 && x0f <= 2.5 * big_n) {
        return Err(HeckeError::SaddleOutsideSupport(format!("x0 = {} not in [{}, {}]", x0f, big_n / 2.0, 2.5 * big_n)));
    }
    let phase = SaddlePhase::new(m, n, k0, PHASE_SERIES_TERMS, ctx)?;
    let (f, _, d2) = phase.eval(&x0);
    let pi = Float::with_val(p, Constant::Pi);
    let phi = bump(&x0, big_n, p);
    let amp = phi / Float::with_val(p, x0.sqrt_ref()) / Float::with_val(p, n).sqrt().sqrt()
        * Float::with_val(p, Float::with_val(p, &pi * 2u32) / Float::with_val(p, d2.abs_ref())).sqrt();
    let sgn: i32 = if d2 >= 0 { 1 } else { -1 };
    let arg = f + Float::with_val(p, &pi / 4u32) * sgn;
    let (s, c) = arg.sin_cos(Float::new(p));
    let saddle = ComplexValue::new(c * &amp, s * amp);
    let quad = saddle_integral(m, n, k0, big_n, true, ctx)?;
    let rel_err = (&saddle - &quad).abs_f64() / quad.abs_f64().max(f64::MIN_POSITIVE);
    Ok(SaddleComparison { x0: x0f, saddle_value: saddle, quad_value: quad, rel_err })
}

/// Largest `n` with a saddle in range: `C K0^2 m / N^2`.
pub fn saddle_range_limit(m: u64, k0: f64, big_n: f64, c: f64) -> f64 {
    c * k0 * k0 * m as f64 / (big_n * big_n)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> PrecisionContext {
        PrecisionContext::new(30, 1e-20, 1000).unwrap()
    }

    #[test]
    fn gaussian_moments_small_cases() {
        let cx = ctx();
        let sp = std::f64::consts::PI.sqrt();
        let v = gaussian_moment(0, &ComplexValue::zero(cx.bits()), &cx).unwrap();
        assert!((v.re.to_f64() - sp).abs() < 1e-15);
        let v = gaussian_moment(1, &ComplexValue::from_f64(cx.bits(), 2.0, 0.0), &cx).unwrap();
        assert!((v.re.to_f64() - sp * 1f64.exp()).abs() < 1e-14);
        let v = gaussian_moment(2, &ComplexValue::zero(cx.bits()), &cx).unwrap();
        assert!((v.re.to_f64() - sp / 2.0).abs() < 1e-15);
    }

    #[test]
    fn phase_coefficients() {
        let b = phase_series_b_exact(12).unwrap();
        assert_eq!(b[1], 1);
        assert_eq!(b[2], 0);
        assert_eq!(b[3], Rational::from((1, 3)));
        for (j, bj) in b.iter().enumerate().skip(1) {
            let want = if j % 2 == 1 { Rational::from((1, j as u32)) } else { Rational::new() };
            assert_eq!(*bj, want);
        }
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let cx = ctx();
        let an = phase_difference_derivative(2, 3, 10_000, 1000.0, &cx).unwrap().to_f64();
        let f = |n: u64| PhaseF::new(2, n, 1000.0).unwrap().value(&cx) - PhaseF::new(3, n, 1000.0).unwrap().value(&cx);
        // F is smooth in n, so the central difference over +-1 is accurate to O(n^-2)
        let fd = Float::with_val(cx.bits(), f(10_001) - f(9_999)).to_f64() / 2.0;
        assert!((an / fd - 1.0).abs() < 1e-6, "{} {}", an, fd);
    }

    #[test]
    fn saddle_closed_form_with_one_term() {
        let cx = ctx();
        let x0 = saddle_point_x0_truncated(1, 5, 800.0, 1, &cx).unwrap().to_f64();
        let want = 800.0 / (2.0 * std::f64::consts::PI) * (1.0f64 / 5.0).sqrt();
        assert!((x0 / want - 1.0).abs() < 1e-14);
    }

    #[test]
    fn saddle_matches_quadrature() {
        let cx = PrecisionContext::new(30, 1e-10, 1000).unwrap();
        let x0 = saddle_point_x0(3, 1, 500.0, &cx).unwrap().to_f64();
        let big_n = (x0 / 1.5).round();
        let r = saddle_vs_quadrature(3, 1, 500.0, big_n, &cx).unwrap();
        assert!(r.rel_err <= 0.2, "{:?}", r);
        // doubling K0 at fixed geometry sharpens the saddle
        let r2 = saddle_vs_quadrature(3, 1, 1000.0, 2.0 * big_n, &cx).unwrap();
        assert!(r2.rel_err < r.rel_err, "{} {}", r.rel_err, r2.rel_err);
        // far past the range limit the integral is negligible
        let n_far = (4.0 * saddle_range_limit(3, 500.0, big_n, DEFAULT_SADDLE_C)) as u64;
        let far = saddle_integral(3, n_far, 500.0, big_n, true, &cx).unwrap();
        assert!(far.abs_f64() < 1e-3 * r.quad_value.abs_f64());
    }

    #[test]
    fn gaussian_moments_match_quadrature() {
        let cx = ctx();
        let p = cx.bits();
        for (ar, ai) in [(0.0, 0.0), (1.5, 0.0), (-2.0, 0.0), (0.0, 1.0), (0.7, -0.4)] {
            let a = ComplexValue::from_f64(p, ar, ai);
            for j in 0..=MAX_GAUSSIAN_MOMENT {
                let want = integrate(
                    |y| {
                        let e = a.mul_real(y).add_real(&(-Float::with_val(p, y.square_ref()))).exp();
                        Ok(e.mul_real(&Float::with_val(p, rug::ops::Pow::pow(y, j as u32))))
                    },
                    &Float::with_val(p, -14),
                    &Float::with_val(p, 14),
                    &QuadOptions::from_ctx(&cx).panels(28),
                    &cx,
                )
                .unwrap()
                .value;
                let got = gaussian_moment(j, &a, &cx).unwrap();
                assert!((&got - &want).abs_f64() < 1e-16 * (1.0 + want.abs_f64()), "j={} A=({}, {})", j, ar, ai);
            }
        }
    }
}
