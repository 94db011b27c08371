//! Divisor functions, Kloosterman sums and small prime utilities.

use rug::float::Constant;
use rug::ops::Pow;
use rug::Float;

use super::zeta::e_rational;
use crate::complex::ComplexValue;
use crate::error::{HeckeError, Result};
use crate::precision::PrecisionContext;

/// Number of divisors `d(n)`.
pub fn divisor_d(n: u64) -> u64 {
    assert!(n >= 1, "divisor_d needs n >= 1");
    factorize(n).iter().map(|&(_, e)| e as u64 + 1).product()
}

/// Prime factorisation by trial division.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// All divisors of `n` in increasing order.
pub fn divisors(n: u64) -> Vec<u64> {
    let mut ds = vec![1u64];
    for (p, e) in factorize(n) {
        let len = ds.len();
        let mut pk = 1u64;
        for _ in 0..e {
            pk *= p;
            for i in 0..len {
                ds.push(ds[i] * pk);
            }
        }
    }
    ds.sort_unstable();
    ds
}

/// `sigma_alpha(n) = sum_{d | n} d^alpha`.
pub fn sigma_alpha(n: u64, alpha: &ComplexValue, ctx: &PrecisionContext) -> ComplexValue {
    let p = ctx.bits();
    let alpha = alpha.with_prec(p);
    let mut acc = ComplexValue::zero(p);
    for d in divisors(n) {
        if d == 1 {
            acc = acc.add_f64(1.0);
        } else {
            acc += &alpha.mul_real(&Float::with_val(p, d).ln()).exp();
        }
    }
    acc
}

/// `sigma_{-1}(n)` as an exact ratio `sigma_1(n) / n`, returned as `f64`.
pub fn sigma_minus_one(n: u64) -> f64 {
    divisors(n).iter().map(|&d| d as f64).sum::<f64>() / n as f64
}

/// Sieve of Eratosthenes up to and including `n`.
pub fn primes_up_to(n: usize) -> Vec<usize> {
    if n < 2 {
        return Vec::new();
    }
    let mut is = vec![true; n + 1];
    is[0] = false;
    is[1] = false;
    let mut i = 2;
    while i * i <= n {
        if is[i] {
            let mut j = i * i;
            while j <= n {
                is[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    is.iter().enumerate().filter(|(_, &b)| b).map(|(k, _)| k).collect()
}

/// Moebius function.
pub fn moebius(n: u64) -> i32 {
    let f = factorize(n);
    if f.iter().any(|&(_, e)| e > 1) {
        0
    } else if f.len() % 2 == 0 {
        1
    } else {
        -1
    }
}

pub fn gcd(mut a: i64, mut b: i64) -> i64 {
    a = a.abs();
    b = b.abs();
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Inverse of `a` modulo `m` when `gcd(a, m) = 1`.
pub fn mod_inverse(a: i64, m: i64) -> Option<i64> {
    if m == 1 {
        return Some(0);
    }
    let (mut r0, mut r1) = (a.rem_euclid(m), m);
    let (mut s0, mut s1) = (1i64, 0i64);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    if r0 == 1 {
        Some(s0.rem_euclid(m))
    } else {
        None
    }
}

/// Kloosterman sum `S(m, n; l) = sum_{a mod l, (a,l)=1} e((m a + n abar) / l)`.
pub fn kloosterman(m: i64, n: i64, ell: u64, ctx: &PrecisionContext) -> Result<ComplexValue> {
    Ok(kloosterman_batch(&[m], n, ell, ctx)?.pop().expect("one value"))
}

/// Kloosterman sums for several `m` at fixed `(n, l)`, sharing one table of `e(r/l)`.
pub fn kloosterman_batch(ms: &[i64], n: i64, ell: u64, ctx: &PrecisionContext) -> Result<Vec<ComplexValue>> {
    if ell == 0 {
        return Err(HeckeError::Domain("Kloosterman modulus must be positive".into()));
    }
    let p = ctx.bits();
    let l = ell as i64;
    let table: Vec<ComplexValue> = (0..l).map(|r| e_rational(r, l, p)).collect();
    let units: Vec<(i64, i64)> = (0..l.max(1))
        .filter_map(|a| if l == 1 { Some((0, 0)) } else { mod_inverse(a, l).map(|ab| (a, ab)) })
        .collect();
    Ok(ms
        .iter()
        .map(|&m| {
            let mut acc = ComplexValue::zero(p);
            for &(a, ab) in &units {
                let r = (m.rem_euclid(l) * a + n.rem_euclid(l) * ab).rem_euclid(l);
                acc += &table[r as usize];
            }
            acc
        })
        .collect())
}

/// `sum_{n <= N} sigma_{2ir}(n) n^{-ir-s}`, summed as `sum_{de <= N} d^{ir-s} e^{-ir-s}`.
pub fn sigma_dirichlet_partial(s: f64, r: f64, n_max: usize, ctx: &PrecisionContext) -> ComplexValue {
    let p = ctx.bits();
    let e = ComplexValue::from_f64(p, -s, r);
    // a[d] = d^{ir-s}; the conjugate is d^{-ir-s}
    let a: Vec<ComplexValue> = (0..=n_max)
        .map(|d| if d == 0 { ComplexValue::zero(p) } else { ComplexValue::real_base_pow(&Float::with_val(p, d), &e) })
        .collect();
    let mut prefix = vec![ComplexValue::zero(p); n_max + 1];
    for k in 1..=n_max {
        prefix[k] = &prefix[k - 1] + &a[k].conj();
    }
    let mut acc = ComplexValue::zero(p);
    for d in 1..=n_max {
        acc += &(&a[d] * &prefix[n_max / d]);
    }
    acc
}

/// `sum_{n <= N} d(n)^2 n^{-s}`.
pub fn d2_dirichlet_partial(s: f64, n_max: usize, ctx: &PrecisionContext) -> Float {
    let p = ctx.bits();
    let mut d = vec![0u32; n_max + 1];
    for i in 1..=n_max {
        for j in (i..=n_max).step_by(i) {
            d[j] += 1;
        }
    }
    let ms = Float::with_val(p, -s);
    let mut acc = Float::with_val(p, 0);
    for n in 1..=n_max {
        let t = Float::with_val(p, n).pow(&ms);
        acc += t * (d[n] * d[n]);
    }
    acc
}

/// Euler's constant at the context precision.
pub fn euler_gamma(ctx: &PrecisionContext) -> Float {
    Float::with_val(ctx.bits(), Constant::Euler)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dirichlet_partials_match_direct_sums() {
        let cx = PrecisionContext::new(30, 1e-10, 1000).unwrap();
        let p = cx.bits();
        let (s, r) = (3.0, 1.0);
        let mut want = ComplexValue::zero(p);
        for n in 1..=60u64 {
            let sig = sigma_alpha(n, &ComplexValue::from_f64(p, 0.0, 2.0 * r), &cx);
            want += &(&sig * &ComplexValue::real_base_pow(&Float::with_val(p, n), &ComplexValue::from_f64(p, -s, -r)));
        }
        let got = sigma_dirichlet_partial(s, r, 60, &cx);
        assert!((&got - &want).abs_f64() < 1e-25);
        // d(n)^2 for n = 1..6 is 1, 4, 4, 9, 4, 16
        let d2 = d2_dirichlet_partial(1.0, 6, &cx).to_f64();
        let direct = 1.0 + 4.0 / 2.0 + 4.0 / 3.0 + 9.0 / 4.0 + 4.0 / 5.0 + 16.0 / 6.0;
        assert!((d2 - direct).abs() < 1e-14);
    }

    fn ctx() -> PrecisionContext {
        PrecisionContext::with_digits(30).unwrap()
    }

    #[test]
    fn small_divisor_values() {
        assert_eq!(divisor_d(12), 6);
        assert_eq!(divisor_d(1), 1);
        assert_eq!(divisors(12), vec![1, 2, 3, 4, 6, 12]);
        let s1 = sigma_alpha(6, &ComplexValue::from_f64(ctx().bits(), 1.0, 0.0), &ctx());
        assert!((s1.re.to_f64() - 12.0).abs() < 1e-25);
        let s0 = sigma_alpha(36, &ComplexValue::zero(ctx().bits()), &ctx());
        assert!((s0.re.to_f64() - divisor_d(36) as f64).abs() < 1e-25);
        assert!((sigma_minus_one(6) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn twisted_sigma_is_real_after_normalising() {
        let p = ctx().bits();
        for n in [2u64, 6, 12, 30, 97] {
            let r = 1.7;
            let s = sigma_alpha(n, &ComplexValue::from_f64(p, 0.0, 2.0 * r), &ctx());
            let tw = ComplexValue::from_f64(p, 0.0, -r).mul_real(&Float::with_val(p, n).ln()).exp();
            let v = &s * &tw;
            assert!(v.im.to_f64().abs() < 1e-25, "n={}", n);
        }
    }

    #[test]
    fn kloosterman_examples() {
        let c = ctx();
        let s = kloosterman(1, -1, 3, &c).unwrap();
        assert!((s.re.to_f64() - 2.0).abs() < 1e-25 && s.im.to_f64().abs() < 1e-25);
        let s = kloosterman(1, 1, 3, &c).unwrap();
        assert!((s.re.to_f64() + 1.0).abs() < 1e-25);
        for m in [-3i64, 0, 5] {
            let s = kloosterman(m, 7, 1, &c).unwrap();
            assert!((s.re.to_f64() - 1.0).abs() < 1e-25);
        }
    }

    #[test]
    fn inverses_and_moebius() {
        assert_eq!(mod_inverse(3, 7), Some(5));
        assert_eq!(mod_inverse(2, 4), None);
        assert_eq!(moebius(30), -1);
        assert_eq!(moebius(12), 0);
        assert_eq!(primes_up_to(30), vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
    }
}
