use std::collections::BTreeMap;

use rug::float::Constant;
use rug::Float;
use serde::Serialize;

use crate::complex::ComplexValue;
use crate::error::{HeckeError, Result};
use crate::precision::PrecisionContext;
use crate::quad::{circle_integral, taylor_coefficients, ContourSpec, QuadOptions};
use crate::special_functions::arith::euler_gamma;
use crate::special_functions::{gamma, riemann_zeta, riemann_zeta_with_derivative};
use crate::transforms::{vertical_line_integral, Symmetry};

/// Radius of the Cauchy circles around `w = 0`.
pub const RESIDUE_RADIUS: f64 = 0.1;

/// The two Mellin-Barnes main terms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MainTermKind {
    /// `((L + shift) zeta^2(w+1) + zeta'(w+1) zeta(w+1)) K^w`
    Cubic,
    /// `((L + shift) Z(w) + Z'(w)/2) zeta(2w+1) K^{2w}` with `Z = zeta^4(w+1)/zeta(2w+2)`
    Sextic,
}

impl MainTermKind {
    /// Pole order at `w = 0` before the gamma factor.
    fn order(self) -> usize {
        match self {
            MainTermKind::Cubic => 3,
            MainTermKind::Sextic => 6,
        }
    }

    fn k_exponent(self) -> f64 {
        match self {
            MainTermKind::Cubic => 1.0,
            MainTermKind::Sextic => 2.0,
        }
    }

    pub fn degree(self) -> usize {
        self.order()
    }
}

/// Residue at `w = 0` of `(1/lambda) A(w) K^{cw} Gamma(w/lambda)` written as a Laurent
/// polynomial in `L = log K`, with `lambda = lambda_const * L`.
#[derive(Clone, Debug, Serialize)]
pub struct MainTermPolynomial {
    pub kind: MainTermKind,
    pub k: f64,
    pub g: f64,
    pub lambda_const: f64,
    pub lambda: f64,
    pub shift: f64,
    /// coefficient of `L^j`, `j = 0..=degree`
    pub coeffs: Vec<f64>,
    /// coefficient of `L^{-j}`, `j = 1..`, from the `1/lambda` expansion of the gamma factor
    pub inverse_coeffs: Vec<f64>,
    /// the residue at this `K`
    pub residue: f64,
    /// `4 pi^{-3/2} K^3 G` times the residue
    pub scaled: f64,
}

impl MainTermPolynomial {
    pub fn leading(&self) -> f64 {
        *self.coeffs.last().expect("nonempty polynomial")
    }

    /// Evaluates the Laurent polynomial at `L`.
    pub fn eval(&self, l: f64) -> f64 {
        let pos: f64 = self.coeffs.iter().rev().fold(0.0, |acc, c| acc * l + c);
        let neg: f64 = self.inverse_coeffs.iter().enumerate().map(|(j, c)| c * l.powi(-(j as i32 + 1))).sum();
        pos + neg
    }
}

/// `gamma - log(2 pi)`, the default shift.
pub fn default_shift(ctx: &PrecisionContext) -> f64 {
    let p = ctx.bits();
    let two_pi = Float::with_val(p, Constant::Pi) * 2u32;
    (euler_gamma(ctx) - two_pi.ln()).to_f64()
}

/// The part of `A(w)` multiplied by `L` and the part without it.
fn integrand_parts(kind: MainTermKind, w: &ComplexValue, shift: f64, ctx: &PrecisionContext) -> Result<(ComplexValue, ComplexValue)> {
    let (z1, dz1) = riemann_zeta_with_derivative(&w.add_f64(1.0), ctx)?;
    match kind {
        MainTermKind::Cubic => {
            let z2 = z1.square();
            Ok((z2.clone(), &z2.mul_f64(shift) + &(&dz1 * &z1)))
        }
        MainTermKind::Sextic => {
            let w2 = w.mul_f64(2.0);
            let (zd, dzd) = riemann_zeta_with_derivative(&w2.add_f64(2.0), ctx)?;
            let zc = riemann_zeta(&w2.add_f64(1.0), ctx)?;
            let z = &z1.powi(4) / &zd;
            // Z'/Z = 4 zeta'/zeta (w+1) - 2 zeta'/zeta (2w+2)
            let log_d = &(&dz1 / &z1).mul_f64(4.0) - &(&dzd / &zd).mul_f64(2.0);
            let dz = &z * &log_d;
            let a1 = &z * &zc;
            let a2 = &(&z.mul_f64(shift) + &dz.mul_f64(0.5)) * &zc;
            Ok((a1, a2))
        }
    }
}

fn check_lambda(lambda: f64) -> Result<()> {
    // the next pole of Gamma(w/lambda) is at w = -lambda
    if lambda <= 2.0 * RESIDUE_RADIUS {
        return Err(HeckeError::CircleEnclosesPole(format!(
            "lambda = {} puts a gamma pole within reach of the circle",
            lambda
        )));
    }
    Ok(())
}

/// Main-term Laurent polynomial from Taylor coefficients of `w^p A(w)` and of `Gamma(1+z)`.
pub fn main_term_polynomial(kind: MainTermKind, k: f64, g: f64, lambda_const: f64, shift: f64, ctx: &PrecisionContext) -> Result<MainTermPolynomial> {
    if !(k >= 2.0) || !(lambda_const > 0.0) {
        return Err(HeckeError::Domain(format!("need K >= 2 and a positive lambda constant, got ({}, {})", k, lambda_const)));
    }
    let p = ctx.bits();
    let l = k.ln();
    let lambda = lambda_const * l;
    check_lambda(lambda)?;
    let ord = kind.order();
    let tol = ctx.rel_tol * 1e-2;
    let zero = ComplexValue::zero(p);
    let mut parts = [Vec::new(), Vec::new()];
    for (idx, part) in parts.iter_mut().enumerate() {
        *part = taylor_coefficients(
            |w| {
                let (a1, a2) = integrand_parts(kind, w, shift, ctx)?;
                let a = if idx == 0 { a1 } else { a2 };
                Ok(&a * &w.powi(ord as u32))
            },
            &zero,
            RESIDUE_RADIUS,
            ord,
            tol,
            ctx,
        )?;
    }
    // Gamma(z) = sum_{n >= -1} gam[n+1] z^n, read off Gamma(1+z) = z Gamma(z)
    let gam = taylor_coefficients(|z| gamma(&z.add_f64(1.0), ctx), &zero, 0.5, ord, tol, ctx)?;
    let c = kind.k_exponent();
    // collect by power of L
    let mut poly: BTreeMap<i32, f64> = BTreeMap::new();
    let mut fact = vec![1.0f64; ord + 1];
    for m in 1..=ord {
        fact[m] = fact[m - 1] * m as f64;
    }
    for (idx, part) in parts.iter().enumerate() {
        for (i, a) in part.iter().enumerate() {
            let a = a.re.to_f64();
            for m in 0..=ord {
                // n from -1; i + m + n = ord - 1
                let n = ord as i64 - 1 - i as i64 - m as i64;
                if n < -1 {
                    continue;
                }
                let gn = gam[(n + 1) as usize].re.to_f64();
                let coef = a * c.powi(m as i32) / fact[m] * gn / lambda_const.powi((n + 1) as i32);
                let power = m as i32 - (n + 1) as i32 + if idx == 0 { 1 } else { 0 };
                *poly.entry(power).or_insert(0.0) += coef;
            }
        }
    }
    let top = kind.degree();
    let coeffs: Vec<f64> = (0..=top as i32).map(|j| poly.get(&j).copied().unwrap_or(0.0)).collect();
    let lowest = poly.keys().next().copied().unwrap_or(0).min(0);
    let inverse_coeffs: Vec<f64> = (1..=-lowest).map(|j| poly.get(&-j).copied().unwrap_or(0.0)).collect();
    let mut out = MainTermPolynomial {
        kind,
        k,
        g,
        lambda_const,
        lambda,
        shift,
        coeffs,
        inverse_coeffs,
        residue: 0.0,
        scaled: 0.0,
    };
    out.residue = out.eval(l);
    out.scaled = 4.0 * std::f64::consts::PI.powf(-1.5) * k.powi(3) * g * out.residue;
    Ok(out)
}

/// Coefficients `A_0..A_3` with `C1*(K, G) ~ sum A_j log^j K`.
pub fn cstar_main_terms(k: f64, g: f64, lambda_const: f64, ctx: &PrecisionContext) -> Result<MainTermPolynomial> {
    if k < 50.0 {
        return Err(HeckeError::Domain(format!("K = {} below 50", k)));
    }
    main_term_polynomial(MainTermKind::Cubic, k, g, lambda_const, default_shift(ctx), ctx)
}

/// Coefficients of the degree-six main term of the fourth moment.
pub fn dstar_main_term(k: f64, lambda_const: f64, ctx: &PrecisionContext) -> Result<MainTermPolynomial> {
    if k < 50.0 {
        return Err(HeckeError::Domain(format!("K = {} below 50", k)));
    }
    main_term_polynomial(MainTermKind::Sextic, k, 1.0, lambda_const, default_shift(ctx), ctx)
}

fn full_integrand(kind: MainTermKind, w: &ComplexValue, k: f64, lambda: f64, shift: f64, ctx: &PrecisionContext) -> Result<ComplexValue> {
    let p = ctx.bits();
    let l = k.ln();
    let (a1, a2) = integrand_parts(kind, w, shift, ctx)?;
    let a = &a1.mul_f64(l) + &a2;
    let kw = w.mul_f64(kind.k_exponent() * l).exp();
    let gm = gamma(&w.div_real(&Float::with_val(p, lambda)), ctx)?;
    Ok((&(&a * &kw) * &gm).div_real(&Float::with_val(p, lambda)))
}

/// Residue at `w = 0` from a Cauchy circle around the full integrand.
pub fn main_term_residue_direct(kind: MainTermKind, k: f64, lambda_const: f64, shift: f64, ctx: &PrecisionContext) -> Result<f64> {
    let lambda = lambda_const * k.ln();
    check_lambda(lambda)?;
    let zero = ComplexValue::zero(ctx.bits());
    let r = circle_integral(|w| full_integrand(kind, w, k, lambda, shift, ctx), &zero, RESIDUE_RADIUS, ctx.rel_tol * 1e-2, ctx)?;
    Ok(r.re.to_f64())
}

/// `(1/(2 pi i lambda)) int_{(1)} A(w) K^{cw} Gamma(w/lambda) dw` by direct quadrature.
pub fn main_term_line_value(kind: MainTermKind, k: f64, lambda_const: f64, shift: f64, ctx: &PrecisionContext) -> Result<f64> {
    let p = ctx.bits();
    let lambda = lambda_const * k.ln();
    let r = vertical_line_integral(
        |w| full_integrand(kind, w, k, lambda, shift, ctx),
        &ContourSpec::line(1.0).with_chunk(4.0),
        Symmetry::Conjugate,
        std::f64::consts::PI / (2.0 * lambda),
        0.0,
        &QuadOptions::from_ctx(ctx),
        ctx,
    )?;
    let two_pi = Float::with_val(p, Constant::Pi) * 2u32;
    Ok(r.value.im.to_f64() / two_pi.to_f64())
}

/// Leading coefficient of the moment polynomial assembled from a main-term leading coefficient.
///
/// The two main terms share the leading coefficient `c`, giving `4 pi^{-3/2} K^3 G * 2c L^d`,
/// which is matched with `sqrt(pi) G K^2 * 2K * a L^d` from integrating the weight against
/// the derivative of `a K^2 L^d`.
pub fn assembled_leading_coefficient(c: f64) -> f64 {
    4.0 * c / (std::f64::consts::PI * std::f64::consts::PI)
}

/// `C1*(K)` as the defining divisor sum `sum_f d(f)/f (L + gamma - log(2 pi sqrt f)) exp(-(f/K)^lambda)`.
pub fn cstar_divisor_sum(k: f64, lambda_const: f64, ctx: &PrecisionContext) -> f64 {
    let lambda = lambda_const * k.ln();
    let shift = default_shift(ctx);
    let l = k.ln();
    let mut total = 0.0;
    let mut f = 1u64;
    loop {
        let y = (f as f64 / k).powf(lambda);
        if y > 800.0 {
            break;
        }
        let d = crate::special_functions::divisor_d(f) as f64;
        total += d / f as f64 * (l + shift - 0.5 * (f as f64).ln()) * (-y).exp();
        f += 1;
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> PrecisionContext {
        PrecisionContext::new(30, 1e-12, 1000).unwrap()
    }

    #[test]
    fn cubic_leading_coefficient() {
        let cx = ctx();
        let m = cstar_main_terms(100.0, 5.0, 2.0, &cx).unwrap();
        assert!((m.leading() - 1.0 / 3.0).abs() < 1e-10, "{:?}", m.coeffs);
        let direct = main_term_residue_direct(MainTermKind::Cubic, 100.0, 2.0, m.shift, &cx).unwrap();
        assert!((direct / m.residue - 1.0).abs() < 1e-9, "{} {}", direct, m.residue);
        let z = main_term_polynomial(MainTermKind::Cubic, 100.0, 5.0, 2.0, 0.0, &cx).unwrap();
        assert!((z.leading() - 1.0 / 3.0).abs() < 1e-10);
    }

    #[test]
    fn sextic_leading_coefficient() {
        let cx = ctx();
        let m = dstar_main_term(100.0, 2.0, &cx).unwrap();
        let want = 4.0 / (15.0 * std::f64::consts::PI.powi(2));
        assert!((m.leading() - want).abs() < 1e-10, "{:?}", m.coeffs);
        let direct = main_term_residue_direct(MainTermKind::Sextic, 100.0, 2.0, m.shift, &cx).unwrap();
        assert!((direct / m.residue - 1.0).abs() < 1e-8, "{} {}", direct, m.residue);
    }

    #[test]
    fn line_route_matches_divisor_sum() {
        let cx = ctx();
        let line = main_term_line_value(MainTermKind::Cubic, 60.0, 2.0, default_shift(&cx), &cx).unwrap();
        let sum = cstar_divisor_sum(60.0, 2.0, &cx);
        assert!((line / sum - 1.0).abs() < 1e-9, "{} {}", line, sum);
    }
}
