use rug::Float;
use serde::Serialize;

use crate::complex::ComplexValue;
use crate::error::{HeckeError, Result};
use crate::precision::PrecisionContext;

/// Constant in the rational damping factor `q(r)`.
pub const DEFAULT_Q_CONSTANT: f64 = 626.0;

/// Polynomial or rational factor multiplying the pair of Gaussians.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind")]
pub enum Prefactor {
    Unit,
    /// `r^2 + 1/4`.
    Quadratic,
    /// `q(r) = P(r) / (P(r) + c)` with `P(r) = (r^2 + 1/4)(r^2 + 9/4)`.
    KuznetsovQ { constant: f64 },
    /// `(r^2 + 1/4)(1 - (r/K)^2)^nu` with `K` the weight center.
    JacobiNu { nu: u32 },
}

/// `h(r) = amplitude * prefactor(r) * (exp(-((r-c)/w)^2) + exp(-((r+c)/w)^2))`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GaussianWeight {
    pub center: f64,
    pub width: f64,
    pub prefactor: Prefactor,
    /// Overall scale; `0` gives the zero weight.
    pub amplitude: f64,
}

impl GaussianWeight {
    pub fn new(center: f64, width: f64, prefactor: Prefactor) -> Result<Self> {
        if !(center > 0.0 && center.is_finite()) || !(width > 0.0 && width.is_finite()) {
            return Err(HeckeError::Domain(format!("weight needs positive center and width, got ({}, {})", center, width)));
        }
        if let Prefactor::KuznetsovQ { constant } = prefactor {
            if !(constant > 0.0) {
                return Err(HeckeError::Domain("q(r) constant must be positive".into()));
            }
        }
        Ok(GaussianWeight { center, width, prefactor, amplitude: 1.0 })
    }

    /// Weight `(r^2 + 1/4)` times the Gaussian pair, centered at `K` with width `G`.
    pub fn quadratic(k: f64, g: f64) -> Result<Self> {
        Self::new(k, g, Prefactor::Quadratic)
    }

    /// Weight `q(r)` times the Gaussian pair, centered at `T` with width `Q`.
    pub fn kuznetsov(t: f64, q: f64) -> Result<Self> {
        Self::new(t, q, Prefactor::KuznetsovQ { constant: DEFAULT_Q_CONSTANT })
    }

    pub fn unit(center: f64, width: f64) -> Result<Self> {
        Self::new(center, width, Prefactor::Unit)
    }

    pub fn jacobi(k: f64, g: f64, nu: u32) -> Result<Self> {
        Self::new(k, g, Prefactor::JacobiNu { nu })
    }

    pub fn scaled(mut self, amplitude: f64) -> Self {
        self.amplitude = amplitude;
        self
    }

    pub fn is_zero(&self) -> bool {
        self.amplitude == 0.0
    }

    /// Degree of polynomial growth of the prefactor (for tail bounds).
    pub(crate) fn prefactor_degree(&self) -> u32 {
        match self.prefactor {
            Prefactor::Unit | Prefactor::KuznetsovQ { .. } => 0,
            Prefactor::Quadratic => 2,
            Prefactor::JacobiNu { nu } => 2 + 2 * nu,
        }
    }

    fn check_strip(&self, r: &ComplexValue) -> Result<()> {
        if let Prefactor::KuznetsovQ { .. } = self.prefactor {
            if r.im.to_f64().abs() > 3.0 {
                return Err(HeckeError::Domain(format!(
                    "q(r) weight is only used for |Im r| <= 3, got {}",
                    r.im.to_f64()
                )));
            }
        }
        Ok(())
    }

    fn gaussians(&self, r: &ComplexValue, p: u32) -> (ComplexValue, ComplexValue) {
        let c = Float::with_val(p, self.center);
        let w = Float::with_val(p, self.width);
        let a = r.add_real(&Float::with_val(p, -&c)).div_real(&w);
        let b = r.add_real(&c).div_real(&w);
        (a.square().mul_f64(-1.0).exp(), b.square().mul_f64(-1.0).exp())
    }

    fn prefactor_and_derivative(&self, r: &ComplexValue, p: u32) -> (ComplexValue, ComplexValue) {
        let r2 = r.square();
        match self.prefactor {
            Prefactor::Unit => (ComplexValue::one(p), ComplexValue::zero(p)),
            Prefactor::Quadratic => (r2.add_f64(0.25), r.mul_f64(2.0)),
            Prefactor::KuznetsovQ { constant } => {
                let big_p = &r2.add_f64(0.25) * &r2.add_f64(2.25);
                let den = big_p.add_f64(constant);
                let q = &big_p / &den;
                // P' = 2r(2r^2 + 5/2), q' = c P' / (P + c)^2
                let dp = &r.mul_f64(2.0) * &r2.mul_f64(2.0).add_f64(2.5);
                let dq = (&dp / &den.square()).mul_f64(constant);
                (q, dq)
            }
            Prefactor::JacobiNu { nu } => {
                let k2 = Float::with_val(p, self.center * self.center);
                let one_m = (&ComplexValue::one(p) - &r2.div_real(&k2)).with_prec(p);
                let quad = r2.add_f64(0.25);
                let pw = one_m.powi(nu);
                let val = &quad * &pw;
                let mut der = &r.mul_f64(2.0) * &pw;
                if nu > 0 {
                    let dpw = (&one_m.powi(nu - 1) * r).mul_f64(-2.0 * nu as f64).div_real(&k2);
                    der = &der + &(&quad * &dpw);
                }
                (val, der)
            }
        }
    }

    /// `h(r)` at a complex point.
    pub fn eval(&self, r: &ComplexValue, ctx: &PrecisionContext) -> Result<ComplexValue> {
        self.check_strip(r)?;
        let p = ctx.bits();
        if self.is_zero() {
            return Ok(ComplexValue::zero(p));
        }
        let r = r.with_prec(p);
        let (g1, g2) = self.gaussians(&r, p);
        let (pre, _) = self.prefactor_and_derivative(&r, p);
        Ok((&pre * &(&g1 + &g2)).mul_f64(self.amplitude))
    }

    /// `h'(r)` at a complex point.
    pub fn derivative(&self, r: &ComplexValue, ctx: &PrecisionContext) -> Result<ComplexValue> {
        self.check_strip(r)?;
        let p = ctx.bits();
        if self.is_zero() {
            return Ok(ComplexValue::zero(p));
        }
        let r = r.with_prec(p);
        let (g1, g2) = self.gaussians(&r, p);
        let (pre, dpre) = self.prefactor_and_derivative(&r, p);
        let w2 = Float::with_val(p, self.width * self.width);
        let c = Float::with_val(p, self.center);
        let dg1 = (&g1 * &r.add_real(&Float::with_val(p, -&c))).mul_f64(-2.0).div_real(&w2);
        let dg2 = (&g2 * &r.add_real(&c)).mul_f64(-2.0).div_real(&w2);
        let val = &(&dpre * &(&g1 + &g2)) + &(&pre * &(&dg1 + &dg2));
        Ok(val.mul_f64(self.amplitude))
    }

    /// `h(u)` for real `u`, in real arithmetic.
    pub fn eval_real(&self, u: &Float, ctx: &PrecisionContext) -> Float {
        let p = ctx.bits();
        if self.is_zero() {
            return Float::with_val(p, 0);
        }
        let a = Float::with_val(p, u - self.center) / self.width;
        let b = Float::with_val(p, u + self.center) / self.width;
        let g = Float::with_val(p, -a.square()).exp() + Float::with_val(p, -b.square()).exp();
        let u2 = Float::with_val(p, u.square_ref());
        let pre = match self.prefactor {
            Prefactor::Unit => Float::with_val(p, 1),
            Prefactor::Quadratic => Float::with_val(p, &u2 + 0.25),
            Prefactor::KuznetsovQ { constant } => {
                let big_p = Float::with_val(p, &u2 + 0.25) * Float::with_val(p, &u2 + 2.25);
                let den = Float::with_val(p, &big_p + constant);
                big_p / den
            }
            Prefactor::JacobiNu { nu } => {
                let one_m = Float::with_val(p, 1) - Float::with_val(p, &u2 / (self.center * self.center));
                Float::with_val(p, &u2 + 0.25) * rug::ops::Pow::pow(one_m, nu)
            }
        };
        pre * g * self.amplitude
    }
}

/// `h(r)` for a weight at a complex point.
pub fn weight_eval(w: &GaussianWeight, r: &ComplexValue, ctx: &PrecisionContext) -> Result<ComplexValue> {
    w.eval(r, ctx)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> PrecisionContext {
        PrecisionContext::with_digits(40).unwrap()
    }

    #[test]
    fn center_value_of_unit_weight() {
        let c = ctx();
        let w = GaussianWeight::unit(30.0, 7.0).unwrap();
        let v = w.eval(&ComplexValue::from_f64(c.bits(), 30.0, 0.0), &c).unwrap();
        let want = 1.0 + (-(60.0f64 / 7.0).powi(2)).exp();
        assert!((v.re.to_f64() - want).abs() < 1e-15);
    }

    #[test]
    fn kuznetsov_zeros_and_strip() {
        let c = ctx();
        let w = GaussianWeight::kuznetsov(100.0, 10.0).unwrap();
        for im in [0.5, -0.5, 1.5, -1.5] {
            let v = w.eval(&ComplexValue::from_f64(c.bits(), 0.0, im), &c).unwrap();
            assert!(v.is_zero() || v.abs_f64() < 1e-60);
        }
        assert!(w.eval(&ComplexValue::from_f64(c.bits(), 0.0, 3.5), &c).is_err());
    }

    #[test]
    fn evenness_and_real_agreement() {
        let c = ctx();
        let p = c.bits();
        for w in [
            GaussianWeight::quadratic(20.0, 4.0).unwrap(),
            GaussianWeight::kuznetsov(20.0, 4.0).unwrap(),
            GaussianWeight::jacobi(20.0, 4.0, 3).unwrap(),
        ] {
            let r = ComplexValue::from_f64(p, 17.3, 0.4);
            let a = w.eval(&r, &c).unwrap();
            let b = w.eval(&(-r.clone()), &c).unwrap();
            assert!((&a - &b).abs_f64() < 1e-35 * a.abs_f64());
            let u = Float::with_val(p, 18.25);
            let re = w.eval_real(&u, &c);
            let cx = w.eval(&ComplexValue::real(u), &c).unwrap();
            assert!((Float::with_val(p, &re - &cx.re)).abs().to_f64() < 1e-35 * re.to_f64().abs());
        }
    }

    #[test]
    fn derivative_matches_cauchy_estimate() {
        let c = ctx();
        let p = c.bits();
        let w = GaussianWeight::kuznetsov(8.0, 3.0).unwrap();
        let z0 = ComplexValue::from_f64(p, 0.0, -0.5);
        let co = crate::quad::taylor_coefficients(|z| w.eval(z, &c), &z0, 0.2, 2, 1e-30, &c).unwrap();
        let d = w.derivative(&z0, &c).unwrap();
        assert!((&d - &co[1]).abs_f64() < 1e-25 * d.abs_f64().max(1e-30));
    }
}
