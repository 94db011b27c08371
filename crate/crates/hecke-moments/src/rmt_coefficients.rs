//! Random-matrix moment constants `g_k` (geometric), `a_k` (arithmetic) and the
//! predicted leading coefficient `d_k = a_k g_k / (pi^2 (k(k-1)/2)!)`.

use rug::float::Constant;
use rug::ops::Pow;
use rug::{Float, Integer, Rational};
use serde::Serialize;

use crate::complex::ComplexValue;
use crate::error::{HeckeError, Result};
use crate::precision::{Estimate, PrecisionContext};
use crate::special_functions::arith::{moebius, primes_up_to};
use crate::special_functions::riemann_zeta;

/// Largest `k` accepted by [`geometric_gk`].
pub const MAX_K: u32 = 20;

/// All constants for one `k`.
#[derive(Clone, Debug, Serialize)]
pub struct MomentCoefficients {
    pub k: u32,
    #[serde(serialize_with = "ser_rational")]
    pub g_k: Rational,
    pub a_k: Estimate,
    pub d_k: Estimate,
}

fn ser_rational<S: serde::Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

fn factorial(n: u32) -> Integer {
    Integer::from(Integer::factorial(n))
}

/// `g_k = (k(k-1)/2)! 2^{k(k+1)/2 - 1} prod_{j<k} j!/(2j)!`, exactly.
pub fn geometric_gk(k: u32) -> Result<Rational> {
    if k == 0 {
        return Err(HeckeError::Domain("k must be positive".into()));
    }
    if k > MAX_K {
        return Err(HeckeError::Overflow(format!("g_k is supported for k <= {}, got {}", MAX_K, k)));
    }
    let mut g = Rational::from(factorial(k * (k - 1) / 2));
    g *= Rational::from(Integer::from(1) << (k * (k + 1) / 2 - 1));
    for j in 1..k {
        g *= Rational::from((factorial(j), factorial(2 * j)));
    }
    Ok(g)
}

/// Coefficients `s_j = C(k+j-1, j) C(k+j-2, j) / (j+1)` for `j <= n`.
fn inner_series_coeffs(k: u32, n: usize) -> Vec<Rational> {
    (0..=n as u32)
        .map(|j| {
            let a = Integer::from(Integer::binomial_u(k + j - 1, j));
            let b = if k + j >= 2 { Integer::from(Integer::binomial_u(k + j - 2, j)) } else { Integer::from(j == 0) };
            Rational::from((a * b, j + 1))
        })
        .collect()
}

/// Power-series coefficients `e_m` of `log((1-x)^{k(k-1)/2} S_k(x))`, `m = 0..=n`.
fn log_factor_coeffs(k: u32, n: usize) -> Vec<Rational> {
    let s = inner_series_coeffs(k, n);
    let mut l = vec![Rational::new(); n + 1];
    for m in 1..=n {
        // m l_m = m s_m - sum_{i<m} i l_i s_{m-i}
        let mut acc = Rational::from(&s[m] * Rational::from(m as u32));
        for i in 1..m {
            acc -= Rational::from(&l[i] * &s[m - i]) * Rational::from(i as u32);
        }
        l[m] = acc / Rational::from(m as u32);
    }
    let big_n = k * (k.max(1) - 1) / 2;
    for (m, lm) in l.iter_mut().enumerate().skip(1) {
        *lm -= Rational::from((big_n, m as u32));
    }
    l
}

/// Inner series `S_k(x)` at `x = 1/p` with a certified geometric tail.
fn inner_series(k: u32, x: &Float, target: &Float) -> (Float, Float) {
    let p = x.prec();
    let mut term = Float::with_val(p, 1);
    let mut sum = Float::with_val(p, 1);
    let mut j = 0u32;
    loop {
        // t_{j+1} / t_j = (k+j)(k+j-1) x / ((j+1)(j+2))
        let num = (k + j) as f64 * (k + j) as f64 - (k + j) as f64;
        let ratio = Float::with_val(p, x * num) / ((j + 1) as f64 * (j + 2) as f64);
        term *= &ratio;
        j += 1;
        if term.is_zero() {
            return (sum, Float::with_val(p, 0));
        }
        sum += &term;
        // ratios decrease once j >= k, bound the rest geometrically
        if j >= k {
            let next = Float::with_val(p, x * ((k + j) as f64 * (k + j - 1) as f64)) / ((j + 1) as f64 * (j + 2) as f64);
            if next < 1 {
                let tail = Float::with_val(p, &term * &next) / (Float::with_val(p, 1) - &next);
                if tail < *target {
                    return (sum, tail);
                }
            }
        }
    }
}

/// Value of the arithmetic factor, with the pieces used to certify it.
#[derive(Clone, Debug, Serialize)]
pub struct ArithmeticFactor {
    /// Product over `p <= cutoff` times the prime-zeta tail correction.
    pub value: Estimate,
    /// Plain truncated product over `p <= cutoff`.
    pub truncated: Estimate,
    pub prime_cutoff: usize,
}

/// Prime zeta `P(s) = sum_p p^{-s} = sum_n mu(n)/n log zeta(n s)` for integer `s >= 2`.
fn prime_zeta(s: u32, ctx: &PrecisionContext) -> Result<Float> {
    let p = ctx.bits();
    let mut acc = Float::with_val(p, 0);
    let mut n = 1u32;
    loop {
        let e = n * s;
        // log zeta(e) < 2^{1-e}
        if (e as f64 - 1.0) * std::f64::consts::LOG10_2 > ctx.digits as f64 + 8.0 {
            break;
        }
        let mu = moebius(n as u64);
        if mu != 0 {
            let z = riemann_zeta(&ComplexValue::from_f64(p, e as f64, 0.0), ctx)?.re;
            let lz = z.ln() / n;
            if mu > 0 {
                acc += lz;
            } else {
                acc -= lz;
            }
        }
        n += 1;
    }
    Ok(acc)
}

/// Euler product `a_k = prod_p (1-1/p)^{k(k-1)/2} sum_j C(k+j-1,j) C(k+j-2,j) p^{-j}/(j+1)`.
///
/// The product over `p <= prime_cutoff` is completed by `exp(sum_m e_m P_{>cutoff}(m))`,
/// where `e_m` are the Taylor coefficients of the log of one factor and `P_{>cutoff}`
/// is the prime zeta function with small primes removed. `truncated.error` bounds the
/// plain product against the limit; `value.error` bounds the completed one.
pub fn arithmetic_ak(k: u32, prime_cutoff: usize, ctx: &PrecisionContext) -> Result<ArithmeticFactor> {
    if k == 0 {
        return Err(HeckeError::Domain("k must be positive".into()));
    }
    if prime_cutoff < 100 {
        return Err(HeckeError::Domain(format!("prime_cutoff must be >= 100, got {}", prime_cutoff)));
    }
    let p = ctx.bits();
    let big_n = k * (k - 1) / 2;
    let target = Float::with_val(p, Float::i_exp(1, -((ctx.digits as f64 + 5.0) * std::f64::consts::LOG2_10) as i32));
    let primes = primes_up_to(prime_cutoff);

    // number of tail moments needed: cutoff^{1-m} below the working precision
    let lc = (prime_cutoff as f64).log10();
    let m_max = (((ctx.digits + 8) as f64 / lc).ceil() as usize + 2).max(4);
    let e = log_factor_coeffs(k, m_max + 24);
    let mut log_sum = Float::with_val(p, 0);
    let mut inner_err = 0.0f64;
    let mut power_sums = vec![Float::with_val(p, 0); m_max + 1];
    for &q in &primes {
        let x = Float::with_val(p, 1) / q as u32;
        let (s, tail) = inner_series(k, &x, &target);
        inner_err += (tail / &s).to_f64();
        let one_m_x = Float::with_val(p, 1) - &x;
        log_sum += s.ln() + one_m_x.ln() * big_n;
        let mut xm = Float::with_val(p, &x * &x);
        for ps in power_sums.iter_mut().skip(2) {
            *ps += &xm;
            xm *= &x;
        }
    }

    // plain truncation: |log f_p| <= C_k p^{-2} for p > cutoff, and sum_{p>P} p^{-2} < 1/P
    let x0 = 1.0 / prime_cutoff as f64;
    let c_k: f64 = e.iter().skip(2).enumerate().map(|(i, em)| em.to_f64().abs() * x0.powi(i as i32)).sum();
    let raw_tail = (c_k / prime_cutoff as f64).exp_m1();

    let mut corr = Float::with_val(p, 0);
    for m in 2..=m_max {
        let tail_m = prime_zeta(m as u32, ctx)? - &power_sums[m];
        corr += Float::with_val(p, &e[m]) * &tail_m;
    }
    // remaining moments: sum_{m > m_max} |e_m| sum_{n > P} n^{-m}, with |e_m| <= rho^m
    let rho = e
        .iter()
        .enumerate()
        .skip(2)
        .map(|(m, em)| em.to_f64().abs().powf(1.0 / m as f64))
        .fold(1.0f64, f64::max)
        * 1.5;
    let ratio = rho / prime_cutoff as f64;
    let rest = prime_cutoff as f64 * ratio.powi(m_max as i32 + 1) / (1.0 - ratio) / m_max as f64;

    let truncated = log_sum.clone().exp();
    let value = Float::with_val(p, &log_sum + &corr).exp();
    let v = value.to_f64();
    let round = 10f64.powi(-(ctx.digits as i32)) * primes.len() as f64;
    let err_value = v * (rest + inner_err + round);
    let err_trunc = truncated.to_f64() * (raw_tail + inner_err + round);
    if err_value > ctx.rel_tol * v {
        return Err(HeckeError::CutoffTooSmall { tail: err_value, tol: ctx.rel_tol });
    }
    Ok(ArithmeticFactor {
        value: Estimate::new(value, err_value),
        truncated: Estimate::new(truncated, err_trunc),
        prime_cutoff,
    })
}

/// Residual `|S_k(x) (1-x)^{2k-3} - N_k(x)|` for the closed-form numerators of `k = 2..5`.
pub fn series_rational_check(k: u32, x: f64, ctx: &PrecisionContext) -> Result<Float> {
    if !(2..=5).contains(&k) {
        return Err(HeckeError::Domain(format!("closed form known for k = 2..5, got {}", k)));
    }
    if !(x.abs() < 0.5) {
        return Err(HeckeError::Domain(format!("need |x| < 1/2, got {}", x)));
    }
    let p = ctx.bits();
    let xf = Float::with_val(p, x);
    let target = Float::with_val(p, Float::i_exp(1, -((ctx.digits as f64 + 5.0) * std::f64::consts::LOG2_10) as i32));
    let s = if x >= 0.0 {
        inner_series(k, &xf, &target).0
    } else {
        // alternating: sum directly to below target
        let coeffs = inner_series_coeffs(k, 400);
        let mut acc = Float::with_val(p, 0);
        let mut xp = Float::with_val(p, 1);
        for c in coeffs {
            let t = Float::with_val(p, &c * &xp);
            let small = t.clone().abs() < target;
            acc += t;
            if small && xp.clone().abs() < target {
                break;
            }
            xp *= &xf;
        }
        acc
    };
    let one_m_x = Float::with_val(p, 1) - &xf;
    let lhs = s * one_m_x.pow(2 * k - 3);
    let rhs = match k {
        2 | 3 => Float::with_val(p, 1),
        4 => Float::with_val(p, 1) + &xf,
        _ => Float::with_val(p, 1) + Float::with_val(p, &xf * 3u32) + Float::with_val(p, xf.square_ref()),
    };
    Ok((lhs - rhs).abs())
}

/// `d_k = a_k g_k / (pi^2 (k(k-1)/2)!)` using a prime cutoff of `10^5`.
pub fn leading_dk(k: u32, ctx: &PrecisionContext) -> Result<MomentCoefficients> {
    leading_dk_with_cutoff(k, 100_000, ctx)
}

pub fn leading_dk_with_cutoff(k: u32, prime_cutoff: usize, ctx: &PrecisionContext) -> Result<MomentCoefficients> {
    let g = geometric_gk(k)?;
    let a = arithmetic_ak(k, prime_cutoff, ctx)?.value;
    let p = ctx.bits();
    let pi2 = Float::with_val(p, Constant::Pi).square();
    let fact = Float::with_val(p, &factorial(k * (k - 1) / 2));
    let scale = Float::with_val(p, &g) / (pi2 * fact);
    let d = Float::with_val(p, &a.value * &scale);
    let err = a.error * scale.to_f64();
    Ok(MomentCoefficients { k, g_k: g, a_k: a, d_k: Estimate::new(d, err) })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> PrecisionContext {
        PrecisionContext::with_digits(40).unwrap()
    }

    #[test]
    fn geometric_values() {
        let want = [1u32, 2, 8, 128];
        for (k, w) in (1..=4).zip(want) {
            assert_eq!(geometric_gk(k).unwrap(), Rational::from(w));
        }
        assert!(matches!(geometric_gk(21), Err(HeckeError::Overflow(_))));
    }

    #[test]
    fn log_coeffs_for_k4_are_log_one_minus_x2() {
        // per-prime factor is 1 - x^2, so log = -x^2 - x^4/2 - ...
        let e = log_factor_coeffs(4, 8);
        for (m, em) in e.iter().enumerate() {
            let want = if m > 0 && m % 2 == 0 { Rational::from((-2, m as i32)) } else { Rational::new() };
            assert_eq!(*em, want, "m = {}", m);
        }
    }

    #[test]
    fn rational_numerators() {
        let c = PrecisionContext::with_digits(50).unwrap();
        assert!(series_rational_check(3, 0.2, &c).unwrap() < 1e-40);
        assert!(series_rational_check(4, 0.3, &c).unwrap() < 1e-40);
        assert!(series_rational_check(5, 0.1, &c).unwrap() < 1e-40);
        assert!(series_rational_check(2, -0.3, &c).unwrap() < 1e-40);
        assert!(series_rational_check(6, 0.1, &c).is_err());
    }

    #[test]
    fn a4_is_inverse_zeta_two() {
        let c = ctx();
        let r = arithmetic_ak(4, 1000, &c).unwrap();
        let want = 6.0 / std::f64::consts::PI.powi(2);
        assert!((r.value.to_f64() - want).abs() < 1e-14);
        assert!((r.truncated.to_f64() - want).abs() <= r.truncated.error);
        assert!(r.truncated.error < 1e-2);
    }

    #[test]
    fn small_k_are_one() {
        let c = ctx();
        for k in 1..=3 {
            let r = arithmetic_ak(k, 1000, &c).unwrap();
            assert!((r.value.to_f64() - 1.0).abs() < 1e-30, "k={}", k);
        }
    }
}
