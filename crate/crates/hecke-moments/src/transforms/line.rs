use rug::Float;

use crate::complex::ComplexValue;
use crate::error::{HeckeError, Result};
use crate::precision::PrecisionContext;
use crate::quad::{integrate, integrate_to_infinity, mag_of, ContourKind, ContourSpec, QuadOptions, QuadResult};

/// Behaviour of an integrand under `s -> conj(s)`, used to fold a vertical line onto `t >= 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Symmetry {
    /// `f(conj s) = conj f(s)`.
    Conjugate,
    /// `f(conj s) = -conj f(s)`.
    AntiConjugate,
    None,
}

/// `int_{(sigma)} f(s) ds = i int f(sigma + it) dt`.
///
/// `decay` is the exponential rate of the integrand envelope used for the tail
/// certificate. A positive `height_cut` in the spec forces truncation at that height,
/// with the edge value over `decay` booked as error. Below `min_height` the tail test is
/// not applied, for integrands that grow before they decay.
pub fn vertical_line_integral<F>(
    mut f: F,
    spec: &ContourSpec,
    sym: Symmetry,
    decay: f64,
    min_height: f64,
    opts: &QuadOptions,
    ctx: &PrecisionContext,
) -> Result<QuadResult>
where
    F: FnMut(&ComplexValue) -> Result<ComplexValue>,
{
    let sigma = match spec.kind {
        ContourKind::VerticalLine { abscissa } => abscissa,
        ContourKind::Circle { .. } => return Err(HeckeError::Domain("expected a vertical line contour".into())),
    };
    let p = ctx.bits();
    let sf = Float::with_val(p, sigma);
    let mut half = |sign: f64| -> Result<QuadResult> {
        let mut g = |t: &Float| -> Result<ComplexValue> {
            let tt = Float::with_val(p, t * sign);
            let v = f(&ComplexValue::new(sf.clone(), tt))?;
            Ok(match sym {
                Symmetry::Conjugate => ComplexValue::real(v.re).mul_f64(2.0),
                Symmetry::AntiConjugate => ComplexValue::imag(v.im).mul_f64(2.0),
                Symmetry::None => v,
            })
        };
        let zero = Float::with_val(p, 0);
        if spec.height_cut > 0.0 {
            let top = Float::with_val(p, spec.height_cut);
            let panels = ((spec.height_cut / spec.chunk.max(0.5)).ceil() as usize).max(1);
            let mut r = integrate(&mut g, &zero, &top, &opts.clone().panels(panels), ctx)?;
            r.error += mag_of(&g(&top)?) / decay;
            Ok(r)
        } else if min_height > 0.0 {
            let top = Float::with_val(p, min_height);
            let panels = ((min_height / spec.chunk.max(0.5)).ceil() as usize).max(1);
            let mut r = integrate(&mut g, &zero, &top, &opts.clone().panels(panels), ctx)?;
            let opts_tail = opts.clone().abs(Float::with_val(crate::quad::MAG_PREC, &r.l1 * opts.rel_tol));
            let t = integrate_to_infinity(&mut g, &top, spec.chunk.max(0.5), decay, 1e6, &opts_tail, ctx)?;
            r.value += &t.value;
            r.error += &t.error;
            r.l1 += &t.l1;
            r.evals += t.evals;
            Ok(r)
        } else {
            integrate_to_infinity(&mut g, &zero, spec.chunk.max(0.5), decay, 1e6, opts, ctx)
        }
    };
    let mut r = half(1.0)?;
    if sym == Symmetry::None {
        let r2 = half(-1.0)?;
        r.value += &r2.value;
        r.error += &r2.error;
        r.l1 += &r2.l1;
        r.evals += r2.evals;
    }
    // ds = i dt
    r.value = r.value.mul_i();
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special_functions::gamma;

    #[test]
    fn mellin_inverse_of_gamma() {
        // (1/(2 pi i)) int_{(1)} Gamma(s) y^{-s} ds = e^{-y}
        let ctx = PrecisionContext::new(30, 1e-15, 100).unwrap();
        let p = ctx.bits();
        let y = Float::with_val(p, 0.7);
        let ly = Float::with_val(p, y.ln_ref());
        for sym in [Symmetry::Conjugate, Symmetry::None] {
            let r = vertical_line_integral(
                |s| Ok(&gamma(s, &ctx)? * &s.mul_real(&ly).mul_f64(-1.0).exp()),
                &ContourSpec::line(1.0),
                sym,
                std::f64::consts::FRAC_PI_2,
                0.0,
                &QuadOptions::from_ctx(&ctx),
                &ctx,
            )
            .unwrap();
            let two_pi = Float::with_val(p, rug::float::Constant::Pi) * 2u32;
            let v = r.value.div_real(&two_pi);
            assert!((v.im.to_f64() - (-0.7f64).exp()).abs() < 1e-13, "{:?}", sym);
            assert!(v.re.to_f64().abs() < 1e-13);
        }
    }
}
