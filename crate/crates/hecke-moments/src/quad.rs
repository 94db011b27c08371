//! Multiple-precision quadrature: adaptive Gauss-Legendre panels, half-line
//! integrals with decay certificates, and trapezoidal Cauchy circles.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use rug::float::Constant;
use rug::Float;

use crate::complex::ComplexValue;
use crate::error::{HeckeError, Result};
use crate::precision::PrecisionContext;

/// Gauss-Legendre rule on `[-1, 1]`.
#[derive(Debug)]
pub struct GaussLegendre {
    pub nodes: Vec<Float>,
    pub weights: Vec<Float>,
}

type GlCache = Mutex<HashMap<(usize, u32), Arc<GaussLegendre>>>;

fn gl_cache() -> &'static GlCache {
    static C: OnceLock<GlCache> = OnceLock::new();
    C.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Legendre polynomial `P_n(x)` and derivative by the three-term recurrence.
fn legendre(n: usize, x: &Float) -> (Float, Float) {
    let p = x.prec();
    let mut p0 = Float::with_val(p, 1);
    let mut p1 = x.clone();
    for k in 2..=n {
        let a = Float::with_val(p, x * &p1) * (2 * k - 1) as u32;
        let b = Float::with_val(p, &p0 * (k - 1) as u32);
        let p2 = (a - b) / k as u32;
        p0 = p1;
        p1 = p2;
    }
    // P_n'(x) = n (x P_n - P_{n-1}) / (x^2 - 1)
    let x2m1 = Float::with_val(p, x.square_ref()) - 1u32;
    let d = (Float::with_val(p, x * &p1) - &p0) * n as u32 / x2m1;
    (p1, d)
}

/// Nodes and weights of the `n`-point rule at `prec` bits (cached).
pub fn gauss_legendre(n: usize, prec: u32) -> Arc<GaussLegendre> {
    if let Some(g) = gl_cache().lock().expect("gl cache").get(&(n, prec)) {
        return g.clone();
    }
    let wp = prec + 32;
    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    let eps = Float::with_val(wp, Float::i_exp(1, -(prec as i32) - 8));
    for i in 0..n {
        let guess = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut x = Float::with_val(wp, guess);
        for _ in 0..100 {
            let (pn, dp) = legendre(n, &x);
            let dx = Float::with_val(wp, &pn / &dp);
            x -= &dx;
            if dx.abs() < eps {
                break;
            }
        }
        let (_, dp) = legendre(n, &x);
        let one_m_x2 = Float::with_val(wp, 1) - Float::with_val(wp, x.square_ref());
        let w = Float::with_val(wp, 2) / (one_m_x2 * dp.square());
        nodes.push(Float::with_val(prec, &x));
        weights.push(Float::with_val(prec, &w));
    }
    let g = Arc::new(GaussLegendre { nodes, weights });
    gl_cache().lock().expect("gl cache").insert((n, prec), g.clone());
    g
}

/// Rule order used at a given precision.
pub fn default_order(ctx: &PrecisionContext) -> usize {
    ((ctx.digits as usize) / 2 + 8).clamp(16, 64)
}

/// Precision used for error and modulus bookkeeping: plain double mantissa, but with
/// MPFR's exponent range so that `e^{pi t}`-sized integrands do not overflow.
pub const MAG_PREC: u32 = 53;

pub fn mag(x: f64) -> Float {
    Float::with_val(MAG_PREC, x)
}

/// `|z|` as a low-precision float.
pub fn mag_of(z: &ComplexValue) -> Float {
    Float::with_val(MAG_PREC, z.re.hypot_ref(&z.im))
}

/// Tolerances and limits for the adaptive integrator.
#[derive(Clone, Debug)]
pub struct QuadOptions {
    pub rel_tol: f64,
    /// Absolute floor on the tolerance, useful for integrals that cancel to zero.
    pub abs_tol: Float,
    pub initial_panels: usize,
    pub max_depth: u32,
    pub order: usize,
}

impl QuadOptions {
    pub fn from_ctx(ctx: &PrecisionContext) -> Self {
        QuadOptions { rel_tol: ctx.rel_tol, abs_tol: mag(0.0), initial_panels: 4, max_depth: 24, order: default_order(ctx) }
    }

    pub fn panels(mut self, n: usize) -> Self {
        self.initial_panels = n.max(1);
        self
    }

    pub fn rel(mut self, tol: f64) -> Self {
        self.rel_tol = tol;
        self
    }

    pub fn abs(mut self, tol: Float) -> Self {
        self.abs_tol = tol;
        self
    }

    pub fn order(mut self, n: usize) -> Self {
        self.order = n;
        self
    }
}

/// Value with a posteriori error estimate and the L1 norm of the integrand.
#[derive(Clone, Debug)]
pub struct QuadResult {
    pub value: ComplexValue,
    pub error: Float,
    pub l1: Float,
    pub evals: usize,
}

struct Panel {
    a: Float,
    b: Float,
    whole: ComplexValue,
    l1: Float,
    depth: u32,
}

fn gl_panel<F>(f: &mut F, a: &Float, b: &Float, g: &GaussLegendre, p: u32, evals: &mut usize) -> Result<(ComplexValue, Float)>
where
    F: FnMut(&Float) -> Result<ComplexValue>,
{
    let half = Float::with_val(p, b - a) / 2u32;
    let mid = Float::with_val(p, a + b) / 2u32;
    let mut acc = ComplexValue::zero(p);
    let mut l1 = mag(0.0);
    for (x, w) in g.nodes.iter().zip(g.weights.iter()) {
        let t = Float::with_val(p, &half * x) + &mid;
        let v = f(&t)?;
        *evals += 1;
        if !v.is_finite() {
            return Err(HeckeError::PrecisionInsufficient(format!("non-finite integrand at {}", t.to_f64())));
        }
        l1 += mag_of(&v) * w.to_f64();
        acc += &v.mul_real(w);
    }
    let hf = half.to_f64().abs();
    Ok((acc.mul_real(&half), l1 * hf))
}

/// Adaptive Gauss-Legendre integral of `f` over `[a, b]`.
pub fn integrate<F>(mut f: F, a: &Float, b: &Float, opts: &QuadOptions, ctx: &PrecisionContext) -> Result<QuadResult>
where
    F: FnMut(&Float) -> Result<ComplexValue>,
{
    let p = ctx.bits();
    let g = gauss_legendre(opts.order, p);
    let mut evals = 0usize;
    let n0 = opts.initial_panels.max(1);
    let width = Float::with_val(p, b - a);
    let mut stack = Vec::with_capacity(n0);
    let mut l1_total = mag(0.0);
    for i in 0..n0 {
        let pa = Float::with_val(p, &width * i as u32) / n0 as u32 + a;
        let pb = Float::with_val(p, &width * (i + 1) as u32) / n0 as u32 + a;
        let (whole, l1) = gl_panel(&mut f, &pa, &pb, &g, p, &mut evals)?;
        l1_total += &l1;
        stack.push(Panel { a: pa, b: pb, whole, l1, depth: 0 });
    }
    stack.reverse();
    let total_w = width.to_f64().abs().max(f64::MIN_POSITIVE);
    let mut value = ComplexValue::zero(p);
    let mut err = mag(0.0);
    let mut l1_acc = mag(0.0);
    while let Some(pan) = stack.pop() {
        let mid = Float::with_val(p, &pan.a + &pan.b) / 2u32;
        let (left, l1l) = gl_panel(&mut f, &pan.a, &mid, &g, p, &mut evals)?;
        let (right, l1r) = gl_panel(&mut f, &mid, &pan.b, &g, p, &mut evals)?;
        let halves = &left + &right;
        let diff = mag_of(&(&halves - &pan.whole));
        l1_total += Float::with_val(MAG_PREC, &l1l + &l1r) - &pan.l1;
        let frac = Float::with_val(p, &pan.b - &pan.a).to_f64().abs() / total_w;
        let rel = Float::with_val(MAG_PREC, &l1_total * opts.rel_tol);
        let tol = Float::with_val(MAG_PREC, rel.max(&opts.abs_tol)) * frac;
        if diff <= tol || pan.depth >= opts.max_depth {
            if diff > tol {
                return Err(HeckeError::TruncationNotCertified(format!(
                    "adaptive quadrature hit depth {} on [{:.6e}, {:.6e}] with local error {:e}",
                    opts.max_depth,
                    pan.a.to_f64(),
                    pan.b.to_f64(),
                    diff.to_f64()
                )));
            }
            value += &halves;
            err += diff;
            l1_acc += Float::with_val(MAG_PREC, &l1l + &l1r);
        } else {
            stack.push(Panel { a: mid.clone(), b: pan.b, whole: right, l1: l1r, depth: pan.depth + 1 });
            stack.push(Panel { a: pan.a, b: mid, whole: left, l1: l1l, depth: pan.depth + 1 });
        }
    }
    Ok(QuadResult { value, error: err, l1: l1_acc, evals })
}

/// Integral of `f` over `[a, infinity)` for an integrand bounded by `C e^{-decay t}` far out.
///
/// The range is covered in chunks of length `chunk`; integration stops once the integrand
/// modulus at the chunk end, divided by `decay`, is below tolerance. That quotient is the
/// returned tail certificate, folded into `error`.
pub fn integrate_to_infinity<F>(
    mut f: F,
    a: &Float,
    chunk: f64,
    decay: f64,
    max_length: f64,
    opts: &QuadOptions,
    ctx: &PrecisionContext,
) -> Result<QuadResult>
where
    F: FnMut(&Float) -> Result<ComplexValue>,
{
    let p = ctx.bits();
    let mut value = ComplexValue::zero(p);
    let mut err = mag(0.0);
    let mut l1 = mag(0.0);
    let mut evals = 0;
    let mut lo = a.clone();
    let mut travelled = 0.0;
    loop {
        let hi = Float::with_val(p, &lo + chunk);
        let r = integrate(&mut f, &lo, &hi, opts, ctx)?;
        value += &r.value;
        err += &r.error;
        l1 += &r.l1;
        evals += r.evals;
        travelled += chunk;
        let tail = mag_of(&f(&hi)?) / decay;
        let rel = Float::with_val(MAG_PREC, &l1 * opts.rel_tol);
        let tol = Float::with_val(MAG_PREC, rel.max(&opts.abs_tol));
        let small_chunk = Float::with_val(MAG_PREC, &l1 * 1e-3).max(&tol);
        if tail <= tol && r.l1 <= small_chunk {
            err += tail;
            return Ok(QuadResult { value, error: err, l1, evals });
        }
        if travelled >= max_length {
            return Err(HeckeError::TruncationNotCertified(format!(
                "tail bound {:e} above tolerance {:e} after length {}",
                tail.to_f64(),
                tol.to_f64(),
                travelled
            )));
        }
        lo = hi;
    }
}

/// Integration contour for Mellin-type and residue integrals.
#[derive(Clone, Debug, PartialEq)]
pub enum ContourKind {
    /// `Re s = abscissa`, traversed upwards.
    VerticalLine { abscissa: f64 },
    /// Positively oriented circle.
    Circle { center: (f64, f64), radius: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct ContourSpec {
    pub kind: ContourKind,
    /// Half-height of a vertical line where truncation is forced (0 means adaptive).
    pub height_cut: f64,
    /// Length of the chunks the line is covered with.
    pub chunk: f64,
    /// Node count for circles (doubled until converged).
    pub nodes: usize,
}

impl ContourSpec {
    pub fn line(abscissa: f64) -> Self {
        ContourSpec { kind: ContourKind::VerticalLine { abscissa }, height_cut: 0.0, chunk: 4.0, nodes: 0 }
    }

    pub fn circle(center: (f64, f64), radius: f64) -> Self {
        ContourSpec { kind: ContourKind::Circle { center, radius }, height_cut: 0.0, chunk: 0.0, nodes: 32 }
    }

    pub fn with_height(mut self, h: f64) -> Self {
        self.height_cut = h;
        self
    }

    pub fn with_chunk(mut self, c: f64) -> Self {
        self.chunk = c;
        self
    }

    /// Reject abscissas within `1e-3` of any listed pole abscissa.
    pub fn check_abscissa(&self, pole_abscissas: &[f64]) -> Result<()> {
        if let ContourKind::VerticalLine { abscissa } = self.kind {
            for &q in pole_abscissas {
                if (abscissa - q).abs() < 1e-3 {
                    return Err(HeckeError::PoleAbscissa(abscissa));
                }
            }
        }
        Ok(())
    }
}

/// Points and weights `(z_k, w_k)` such that `(1/(2 pi i)) \oint f dz ~ sum w_k f(z_k)`.
fn circle_nodes(center: &ComplexValue, radius: &Float, n: usize, p: u32) -> Vec<(ComplexValue, ComplexValue)> {
    let two_pi = Float::with_val(p, Constant::Pi) * 2u32;
    (0..n)
        .map(|k| {
            let th = Float::with_val(p, &two_pi * k as u32) / n as u32;
            let (s, c) = th.sin_cos(Float::new(p));
            let e = ComplexValue::new(c, s);
            let z = center + &e.mul_real(radius);
            // dz / (2 pi i) = r e^{i th} d th / (2 pi), trapezoid weight 2 pi / n
            let w = e.mul_real(radius).div_real(&Float::with_val(p, n));
            (z, w)
        })
        .collect()
}

/// Taylor coefficients `a_0..a_{m}` of an analytic `f` about `center`, by the trapezoidal
/// rule on a circle of the given radius. The node count doubles until two successive
/// estimates agree to `tol` relative to the largest `|a_j| r^j`.
pub fn taylor_coefficients<F>(
    mut f: F,
    center: &ComplexValue,
    radius: f64,
    m: usize,
    tol: f64,
    ctx: &PrecisionContext,
) -> Result<Vec<ComplexValue>>
where
    F: FnMut(&ComplexValue) -> Result<ComplexValue>,
{
    let p = ctx.bits();
    let r = Float::with_val(p, radius);
    let mut n = (2 * m + 16).next_power_of_two().max(32);
    let mut vals: Vec<ComplexValue> = Vec::new();
    let mut prev: Option<Vec<ComplexValue>> = None;
    let two_pi = Float::with_val(p, Constant::Pi) * 2u32;
    loop {
        // reuse the even-indexed nodes of the previous level
        let mut new_vals = Vec::with_capacity(n);
        for k in 0..n {
            if !vals.is_empty() && k % 2 == 0 {
                new_vals.push(vals[k / 2].clone());
            } else {
                let th = Float::with_val(p, &two_pi * k as u32) / n as u32;
                let (s, c) = th.sin_cos(Float::new(p));
                let z = center + &ComplexValue::new(c, s).mul_real(&r);
                new_vals.push(f(&z)?);
            }
        }
        vals = new_vals;
        let mut coeffs = Vec::with_capacity(m + 1);
        for j in 0..=m {
            let mut acc = ComplexValue::zero(p);
            for (k, v) in vals.iter().enumerate() {
                let th = Float::with_val(p, &two_pi * ((k * j) % n) as u32) / n as u32;
                let (s, c) = th.sin_cos(Float::new(p));
                acc += &(v * &ComplexValue::new(c, -s));
            }
            let rj = Float::with_val(p, rug::ops::Pow::pow(&r, j as u32));
            coeffs.push(acc.div_real(&Float::with_val(p, n)).div_real(&rj));
        }
        if let Some(pv) = &prev {
            let scale = coeffs
                .iter()
                .enumerate()
                .map(|(j, c)| c.abs_f64() * radius.powi(j as i32))
                .fold(0.0, f64::max)
                .max(f64::MIN_POSITIVE);
            let diff = coeffs
                .iter()
                .zip(pv.iter())
                .enumerate()
                .map(|(j, (a, b))| (a - b).abs_f64() * radius.powi(j as i32))
                .fold(0.0, f64::max);
            if diff <= tol * scale {
                return Ok(coeffs);
            }
        }
        if n >= 4096 {
            return Err(HeckeError::TruncationNotCertified("Cauchy circle did not converge".into()));
        }
        prev = Some(coeffs);
        n *= 2;
    }
}

/// `(1 / (2 pi i)) \oint f(z) dz` over a circle, node count doubled until converged.
pub fn circle_integral<F>(mut f: F, center: &ComplexValue, radius: f64, tol: f64, ctx: &PrecisionContext) -> Result<ComplexValue>
where
    F: FnMut(&ComplexValue) -> Result<ComplexValue>,
{
    let p = ctx.bits();
    let r = Float::with_val(p, radius);
    let mut n = 32;
    let mut prev: Option<ComplexValue> = None;
    loop {
        let mut acc = ComplexValue::zero(p);
        let mut scale = 0.0f64;
        for (z, w) in circle_nodes(center, &r, n, p) {
            let v = f(&z)? * w;
            scale = scale.max(v.abs_f64() * n as f64);
            acc += &v;
        }
        if let Some(pv) = &prev {
            if (&acc - pv).abs_f64() <= tol * scale.max(acc.abs_f64()) {
                return Ok(acc);
            }
        }
        if n >= 4096 {
            return Err(HeckeError::TruncationNotCertified("circle integral did not converge".into()));
        }
        prev = Some(acc);
        n *= 2;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> PrecisionContext {
        PrecisionContext::with_digits(40).unwrap()
    }

    #[test]
    fn gl_weights_sum_to_two() {
        let g = gauss_legendre(20, 160);
        let s: Float = g.weights.iter().fold(Float::with_val(160, 0), |a, w| a + w);
        assert!((s - 2u32).abs() < 1e-40);
    }

    #[test]
    fn integrates_gaussian() {
        let c = ctx();
        let p = c.bits();
        let r = integrate(
            |x| Ok(ComplexValue::real(Float::with_val(p, -Float::with_val(p, x.square_ref())).exp())),
            &Float::with_val(p, -12),
            &Float::with_val(p, 12),
            &QuadOptions::from_ctx(&c).rel(1e-30),
            &c,
        )
        .unwrap();
        let want = Float::with_val(p, Constant::Pi).sqrt();
        assert!((r.value.re - want).abs() < 1e-29);
    }

    #[test]
    fn half_line_with_certificate() {
        let c = ctx();
        let p = c.bits();
        let r = integrate_to_infinity(
            |x| Ok(ComplexValue::real(Float::with_val(p, -Float::with_val(p, x * 2u32)).exp())),
            &Float::with_val(p, 0),
            3.0,
            2.0,
            200.0,
            &QuadOptions::from_ctx(&c).rel(1e-25),
            &c,
        )
        .unwrap();
        assert!((r.value.re.to_f64() - 0.5).abs() < 1e-24);
    }

    #[test]
    fn taylor_of_exp() {
        let c = ctx();
        let p = c.bits();
        let co = taylor_coefficients(|z| Ok(z.exp()), &ComplexValue::from_f64(p, 0.0, 0.0), 0.5, 6, 1e-35, &c).unwrap();
        let mut fact = 1.0;
        for (j, a) in co.iter().enumerate() {
            if j > 0 {
                fact *= j as f64;
            }
            assert!((a.re.to_f64() - 1.0 / fact).abs() < 1e-15);
        }
    }

    #[test]
    fn residue_of_simple_pole() {
        let c = ctx();
        let p = c.bits();
        let v = circle_integral(
            |z| Ok(ComplexValue::one(p) / z.add_f64(-0.05)),
            &ComplexValue::zero(p),
            0.1,
            1e-30,
            &c,
        )
        .unwrap();
        assert!((v.re.to_f64() - 1.0).abs() < 1e-25 && v.im.to_f64().abs() < 1e-25);
    }

    #[test]
    fn abscissa_guard() {
        assert!(ContourSpec::line(-0.5).check_abscissa(&[-0.5, 0.5]).is_err());
        assert!(ContourSpec::line(-0.7).check_abscissa(&[-0.5, 0.5]).is_ok());
    }
}
