use rug::float::Constant;
use rug::Float;
use serde::Serialize;

use super::SpectralDataset;
use crate::complex::float_string;
use crate::error::{HeckeError, Result};
use crate::precision::PrecisionContext;
use crate::transforms::GaussianWeight;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum SpectralWeight {
    Gaussian(GaussianWeight),
    /// Indicator of `kappa <= K`, ties included.
    Sharp(f64),
}

impl SpectralWeight {
    /// Right end of the `kappa` range the data must cover.
    pub fn support_end(&self) -> f64 {
        match self {
            SpectralWeight::Sharp(k) => *k,
            SpectralWeight::Gaussian(w) => w.center + w.width * w.center.ln().max(1.0),
        }
    }

    fn eval(&self, kappa: f64, ctx: &PrecisionContext) -> Float {
        match self {
            SpectralWeight::Sharp(k) => ctx.float(if kappa <= *k { 1.0 } else { 0.0 }),
            SpectralWeight::Gaussian(w) => w.eval_real(&ctx.float(kappa), ctx),
        }
    }
}

/// `sum_j alpha_j H_j(1/2)^k weight(kappa_j)`.
pub fn spectral_sum(ds: &SpectralDataset, k: u32, weight: &SpectralWeight, ctx: &PrecisionContext) -> Result<Float> {
    if !(1..=4).contains(&k) {
        return Err(HeckeError::Domain(format!("moment order k = {} not in 1..=4", k)));
    }
    let mut acc = ctx.float(0.0);
    if ds.is_empty() {
        return Ok(acc);
    }
    let end = weight.support_end();
    if ds.complete_to < end {
        return Err(HeckeError::Coverage(format!(
            "data complete to kappa = {} but the weight needs {}",
            ds.complete_to, end
        )));
    }
    for r in &ds.records {
        let h = rug::ops::Pow::pow(ctx.float(r.central_value), k);
        acc += h * r.alpha * weight.eval(r.kappa, ctx);
    }
    Ok(acc)
}

#[derive(Clone, Debug, Serialize)]
pub struct SecondMomentRatio {
    pub k_cut: f64,
    #[serde(serialize_with = "ser_float")]
    pub sum: Float,
    /// `2 pi^{-2} K^2 (log K + gamma - 1/2 - log 2 pi)`
    #[serde(serialize_with = "ser_float")]
    pub model: Float,
    pub ratio: f64,
}

fn ser_float<S: serde::Serializer>(x: &Float, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&float_string(x))
}

/// Sharp-cutoff second moment against its asymptotic model. Reported, not asserted.
pub fn second_moment_ratio(ds: &SpectralDataset, k_cut: f64, ctx: &PrecisionContext) -> Result<SecondMomentRatio> {
    let sum = spectral_sum(ds, 2, &SpectralWeight::Sharp(k_cut), ctx)?;
    let p = ctx.bits();
    let kf = ctx.float(k_cut);
    let pi = Float::with_val(p, Constant::Pi);
    let paren = Float::with_val(p, kf.ln_ref()) + Float::with_val(p, Constant::Euler) - 0.5f64 - Float::with_val(p, &pi * 2u32).ln();
    let model = Float::with_val(p, kf.square_ref()) * paren * 2u32 / Float::with_val(p, pi.square_ref());
    let ratio = Float::with_val(p, &sum / &model).to_f64();
    Ok(SecondMomentRatio { k_cut, sum, model, ratio })
}

#[derive(Clone, Debug, Serialize)]
pub struct FirstMomentChain {
    pub t: f64,
    pub v: f64,
    /// Records with `T <= kappa <= 2T`.
    pub records: usize,
    /// `S(T) = sum alpha_j H_j(1/2)` over the window.
    pub s_t: f64,
    /// `sum alpha_j` over `H_j(1/2) >= V`.
    pub mass_above: f64,
    pub total_alpha: f64,
    pub second: f64,
    pub fourth: f64,
    /// `S(T) >= V * mass_above`
    pub lower_rhs: f64,
    pub lower_holds: bool,
    /// `second <= sqrt(mass_above * fourth) + V^2 * total_alpha`
    pub cs_rhs: f64,
    pub cs_holds: bool,
    pub min_alpha: Option<f64>,
}

/// Sums over `T <= kappa <= 2T` entering the lower-bound argument at threshold `V`, and the two
/// finite-sum inequalities between them.
pub fn first_moment_bound_chain(ds: &SpectralDataset, t: f64, v: f64, ctx: &PrecisionContext) -> FirstMomentChain {
    let p = ctx.bits();
    let zero = || Float::with_val(p, 0);
    let (mut s1, mut s2, mut s4, mut above, mut total) = (zero(), zero(), zero(), zero(), zero());
    let mut n = 0;
    let mut min_alpha: Option<f64> = None;
    for r in ds.records.iter().filter(|r| r.kappa >= t && r.kappa <= 2.0 * t) {
        n += 1;
        let h = ctx.float(r.central_value);
        let h2 = Float::with_val(p, h.square_ref());
        s1 += Float::with_val(p, &h * r.alpha);
        s4 += Float::with_val(p, h2.square_ref()) * r.alpha;
        s2 += h2 * r.alpha;
        total += r.alpha;
        if r.central_value >= v {
            above += r.alpha;
        }
        min_alpha = Some(min_alpha.map_or(r.alpha, |m| m.min(r.alpha)));
    }
    let lower_rhs = Float::with_val(p, &above * v);
    let cs_rhs = Float::with_val(p, &above * &s4).sqrt() + Float::with_val(p, &total * (v * v));
    // the inequalities are exact; allow only for rounding at the working precision
    let slack = |a: &Float, b: &Float| (Float::with_val(p, a.abs_ref()) + Float::with_val(p, b.abs_ref())) * (16.0 * ctx.epsilon());
    let lower_holds = s1 >= Float::with_val(p, &lower_rhs - slack(&s1, &lower_rhs));
    let cs_holds = s2 <= Float::with_val(p, &cs_rhs + slack(&s2, &cs_rhs));
    FirstMomentChain {
        t,
        v,
        records: n,
        s_t: s1.to_f64(),
        mass_above: above.to_f64(),
        total_alpha: total.to_f64(),
        second: s2.to_f64(),
        fourth: s4.to_f64(),
        lower_rhs: lower_rhs.to_f64(),
        lower_holds,
        cs_rhs: cs_rhs.to_f64(),
        cs_holds,
        min_alpha,
    }
}

#[cfg(test)]
mod tests {
    use super::super::{parse_csv, MaassFormRecord};
    use super::*;

    fn ctx() -> PrecisionContext {
        PrecisionContext::new(30, 1e-10, 1000).unwrap()
    }

    fn sample() -> SpectralDataset {
        parse_csv(include_str!("../../data/sample_synthetic.csv"), "sample").unwrap()
    }

    #[test]
    fn empty_and_single_record() {
        let cx = ctx();
        let ds = SpectralDataset::empty("none");
        assert_eq!(spectral_sum(&ds, 2, &SpectralWeight::Sharp(10.0), &cx).unwrap(), 0);
        let mut one = SpectralDataset::empty("one");
        one.records.push(MaassFormRecord::from_primes(12.0, 0.75, 1, 1.5, &[], 1));
        one.complete_to = 12.0;
        let s = spectral_sum(&one, 3, &SpectralWeight::Sharp(12.0), &cx).unwrap();
        assert_eq!(s.to_f64(), 0.75 * 1.5f64.powi(3));
    }

    #[test]
    fn coverage_is_enforced() {
        let cx = ctx();
        let ds = sample();
        assert!(matches!(spectral_sum(&ds, 1, &SpectralWeight::Sharp(31.0), &cx), Err(HeckeError::Coverage(_))));
        let w = GaussianWeight::quadratic(25.0, 3.0).unwrap();
        assert!(matches!(spectral_sum(&ds, 1, &SpectralWeight::Gaussian(w), &cx), Err(HeckeError::Coverage(_))));
        let w = GaussianWeight::quadratic(15.0, 3.0).unwrap();
        assert!(spectral_sum(&ds, 1, &SpectralWeight::Gaussian(w), &cx).unwrap() > 0);
    }

    #[test]
    fn sharp_sum_is_monotone_and_includes_ties() {
        let cx = ctx();
        let ds = sample();
        let mut last = cx.float(0.0);
        for k in [10.0, 14.0, 18.0, 22.0, 26.0, 30.0] {
            let s = spectral_sum(&ds, 2, &SpectralWeight::Sharp(k), &cx).unwrap();
            assert!(s >= last);
            last = s;
        }
        let r = ds.records.iter().find(|r| r.central_value > 0.0).unwrap();
        let at = spectral_sum(&ds, 1, &SpectralWeight::Sharp(r.kappa), &cx).unwrap();
        let below = spectral_sum(&ds, 1, &SpectralWeight::Sharp(r.kappa - 1e-9), &cx).unwrap();
        assert!(at > below);
        let rep = second_moment_ratio(&ds, 30.0, &cx).unwrap();
        assert!(rep.ratio.is_finite() && rep.ratio > 0.0);
    }

    #[test]
    fn chain_inequalities_hold() {
        let cx = ctx();
        let ds = sample();
        for v in [0.0, 0.1 * 10f64.ln().sqrt(), 0.5, 2.0, 100.0] {
            let c = first_moment_bound_chain(&ds, 10.0, v, &cx);
            assert!(c.records > 0);
            assert!(c.lower_holds && c.cs_holds, "{:?}", c);
        }
    }
}
