use std::collections::HashMap;
use std::f64::consts::PI;

use rug::Float;

use super::hstar::{contour_floor, envelope_peak, hstar_window_half_width};
use super::weight::{GaussianWeight, Prefactor};
use crate::complex::ComplexValue;
use crate::error::{HeckeError, Result};
use crate::precision::PrecisionContext;
use crate::quad::{mag, mag_of, QuadResult, MAG_PREC};
use crate::special_functions::gamma::lgamma_core;

#[derive(Clone, Debug)]
pub(crate) struct Node {
    pub value: ComplexValue,
    pub error: Float,
}

/// Step for a trapezoid rule on a strip of half-width `dist` to reach `tol`.
pub(crate) fn trapezoid_step(dist: f64, tol: f64) -> f64 {
    2.0 * PI * dist / (-(tol.ln()) + 3.0)
}

/// `h*(beta + i j dt)` for `j = 0, 1, ...`, computed on a shared grid.
///
/// Along the line, `h*` is a trapezoid sum over `u = x + i eta` with `x` on a multiple of
/// the same step, so every gamma value is `lnGamma(a + i n dt)` or `lnGamma(b + i n dt)` for an
/// integer `n` and each is computed once.
pub(crate) struct HStarLine {
    pub beta: f64,
    pub dt: f64,
    eta: f64,
    /// u-step as a multiple of `dt`
    k: i64,
    tol: f64,
    ln_num: HashMap<i64, ComplexValue>,
    ln_den: HashMap<i64, ComplexValue>,
    uh: HashMap<i64, ComplexValue>,
    pub nodes: Vec<Node>,
}

impl HStarLine {
    pub fn new(w: &GaussianWeight, beta: f64, dt: f64, ctx: &PrecisionContext) -> Result<Self> {
        let eta = (beta - 1.0).max(contour_floor(w));
        if beta - eta < 0.5 {
            return Err(HeckeError::Domain(format!("abscissa {} too far left for the shifted h* contour", beta)));
        }
        let tol = ctx.rel_tol * 1e-2;
        let mut du_dist = (beta - eta).min(1.0);
        if let Prefactor::KuznetsovQ { .. } = w.prefactor {
            du_dist = du_dist.min(3.6 - eta.abs());
        }
        let du = trapezoid_step(du_dist, tol).min(w.width / 2.0);
        let k = ((du / dt).floor() as i64).max(1);
        Ok(HStarLine {
            beta,
            dt,
            eta,
            k,
            tol,
            ln_num: HashMap::new(),
            ln_den: HashMap::new(),
            uh: HashMap::new(),
            nodes: Vec::new(),
        })
    }

    fn lg(map: &mut HashMap<i64, ComplexValue>, re: &Float, n: i64, dt: f64, p: u32) -> Result<ComplexValue> {
        if let Some(v) = map.get(&n) {
            return Ok(v.clone());
        }
        let z = ComplexValue::new(re.clone(), Float::with_val(p, n) * dt);
        let v = lgamma_core(&z, p)?;
        map.insert(n, v.clone());
        Ok(v)
    }

    fn weight_term(&mut self, w: &GaussianWeight, n: i64, ctx: &PrecisionContext) -> Result<ComplexValue> {
        if let Some(v) = self.uh.get(&n) {
            return Ok(v.clone());
        }
        let p = ctx.bits();
        let u = ComplexValue::new(Float::with_val(p, n) * self.dt, Float::with_val(p, self.eta));
        let v = &u * &w.eval(&u, ctx)?;
        self.uh.insert(n, v.clone());
        Ok(v)
    }

    /// Makes sure nodes `0..=j` exist.
    pub fn ensure(&mut self, j: usize, w: &GaussianWeight, ctx: &PrecisionContext) -> Result<()> {
        while self.nodes.len() <= j {
            let jj = self.nodes.len() as i64;
            let n = self.compute(jj, w, ctx)?;
            self.nodes.push(n);
        }
        Ok(())
    }

    fn compute(&mut self, j: i64, w: &GaussianWeight, ctx: &PrecisionContext) -> Result<Node> {
        let p = ctx.bits();
        let t = j as f64 * self.dt;
        let q = w.width;
        let ell = hstar_window_half_width(w, self.beta, self.eta, self.tol);
        let (c, _) = envelope_peak(w.center, q, t);
        let (lo, hi) = (c - ell * q, c + ell * q);
        let step = self.dt * self.k as f64;
        let mb = (hi / step).floor() as i64;
        let ma = if lo <= 0.0 { -mb } else { (lo / step).ceil() as i64 };
        // terms with u > 0 carry an extra e^{-2 pi min(t, u)} against their mirror images
        let skip_at = (ctx.digits as f64 + 5.0) * std::f64::consts::LN_10 / (2.0 * PI);
        // offsets in working precision so that both gamma factors see the same contour
        let a = Float::with_val(p, self.beta) - self.eta;
        let b = Float::with_val(p, 1) - self.beta - self.eta;
        let mut full = ComplexValue::zero(p);
        let mut even = ComplexValue::zero(p);
        let mut abs = mag(0.0);
        let mut visit = |this: &mut Self, m: i64| -> Result<()> {
            let x = m as f64 * step;
            if x > 0.0 && t.min(x) > skip_at {
                return Ok(());
            }
            let n = m * this.k;
            let uh = this.weight_term(w, n, ctx)?;
            let ln = &Self::lg(&mut this.ln_num, &a, j + n, this.dt, p)? - &Self::lg(&mut this.ln_den, &b, n - j, this.dt, p)?;
            let v = &uh * &ln.exp();
            abs += mag_of(&v);
            if m % 2 == 0 {
                even += &v;
            }
            full += &v;
            Ok(())
        };
        let ranges: Vec<(i64, i64)> = if lo <= 0.0 { vec![(-mb, mb)] } else { vec![(ma, mb), (-mb, -ma)] };
        for (r0, r1) in ranges {
            for m in r0..=r1 {
                visit(self, m)?;
            }
        }
        let step_mp = Float::with_val(p, self.k) * self.dt;
        let value = full.mul_real(&step_mp);
        let coarse = even.mul_real(&step_mp).mul_f64(2.0);
        let l1 = Float::with_val(MAG_PREC, &abs * step);
        let diff = mag_of(&(&value - &coarse));
        // the coarse rule converges at the square root of the fine one
        let allowed = Float::with_val(MAG_PREC, &l1 * (1e5 * self.tol.sqrt()));
        if diff > allowed && diff.to_f64() > 0.0 {
            return Err(HeckeError::TruncationNotCertified(format!(
                "h* trapezoid at t = {} off by {:e} of {:e}",
                t,
                diff.to_f64(),
                l1.to_f64()
            )));
        }
        let error = Float::with_val(MAG_PREC, &l1 * (self.tol + (-(ell * ell)).exp() + ctx.epsilon() * 10.0));
        Ok(Node { value, error })
    }
}

/// `int_{(beta)} F(s) h*(s) ds` on the grid of `line`, for `F(conj s) = conj F(s)`.
///
/// The trapezoid sum over `t in dt Z` folds onto `t >= 0`. Summation runs at least to
/// `min_height` and stops once the integrand stays below tolerance for one unit of height.
/// `dist` is the distance from the line to the nearest singularity of `F`, used for the
/// a priori discretisation bound.
pub(crate) fn line_integral<F>(
    line: &mut HStarLine,
    w: &GaussianWeight,
    mut factor: F,
    min_height: f64,
    dist: f64,
    ctx: &PrecisionContext,
) -> Result<QuadResult>
where
    F: FnMut(&ComplexValue) -> Result<ComplexValue>,
{
    let p = ctx.bits();
    let dt = line.dt;
    let per_unit = (1.0 / dt).ceil() as usize;
    let mut sum = Float::with_val(p, 0);
    let mut even = Float::with_val(p, 0);
    let mut l1 = mag(0.0);
    let mut err = mag(0.0);
    let mut recent = mag(0.0);
    let mut j = 0usize;
    let max_j = (1e5 / dt) as usize;
    loop {
        line.ensure(j, w, ctx)?;
        let s = ComplexValue::new(Float::with_val(p, line.beta), Float::with_val(p, j) * dt);
        let fac = factor(&s)?;
        let node = &line.nodes[j];
        let v = &fac * &node.value;
        let weight = if j == 0 { 1.0 } else { 2.0 };
        let im = Float::with_val(p, &v.im * weight);
        if j % 2 == 0 {
            even += &im;
        }
        sum += &im;
        let m = mag_of(&v) * weight;
        l1 += &m;
        err += Float::with_val(MAG_PREC, mag_of(&fac) * &node.error) * weight;
        recent.max_mut(&m);
        j += 1;
        let t = j as f64 * dt;
        if j % per_unit == 0 {
            let tol = Float::with_val(MAG_PREC, &l1 * (ctx.rel_tol * 1e-2));
            if t >= min_height && recent <= tol {
                break;
            }
            recent = mag(0.0);
        }
        if j >= max_j {
            return Err(HeckeError::TruncationNotCertified("line integral did not decay".into()));
        }
    }
    // int F h* ds = i int I dt = -dt (Im I(0) + 2 sum Im I(t_j))
    let value = ComplexValue::real(Float::with_val(p, &sum * -dt));
    let coarse = Float::with_val(p, &even * (-2.0 * dt));
    let l1 = Float::with_val(MAG_PREC, &l1 * dt);
    let diff = Float::with_val(MAG_PREC, Float::with_val(p, &value.re - &coarse).abs());
    let apriori = (-2.0 * PI * dist / dt).exp();
    if diff > Float::with_val(MAG_PREC, &l1 * (1e5 * apriori.sqrt())) && diff.to_f64() > 0.0 {
        return Err(HeckeError::TruncationNotCertified(format!(
            "line trapezoid off by {:e} of {:e}",
            diff.to_f64(),
            l1.to_f64()
        )));
    }
    let error = Float::with_val(MAG_PREC, &err * dt) + Float::with_val(MAG_PREC, &l1 * (apriori + ctx.rel_tol * 1e-2));
    Ok(QuadResult { value, error, l1, evals: j })
}
