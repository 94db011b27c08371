//! Even-index Bernoulli numbers via tangent numbers, cached as exact rationals
//! and as floats per precision.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use rug::{Float, Integer, Rational};

fn rational_cache() -> &'static Mutex<Vec<Rational>> {
    static C: OnceLock<Mutex<Vec<Rational>>> = OnceLock::new();
    C.get_or_init(|| Mutex::new(Vec::new()))
}

/// Tangent-number recurrence (integer arithmetic only).
fn compute_b2n(n: usize) -> Vec<Rational> {
    let mut t = vec![Integer::new(); n + 1];
    if n == 0 {
        return Vec::new();
    }
    t[1] = Integer::from(1);
    for k in 2..=n {
        t[k] = Integer::from(&t[k - 1] * (k as u64 - 1));
    }
    for k in 2..=n {
        for j in k..=n {
            let a = Integer::from(&t[j - 1] * (j - k) as u64);
            let b = Integer::from(&t[j] * (j - k + 2) as u64);
            t[j] = a + b;
        }
    }
    (1..=n)
        .map(|k| {
            let p2 = Integer::from(1) << (2 * k as u32);
            let den = Integer::from(&p2 * (Integer::from(&p2 - 1)));
            let mut num = Integer::from(&t[k] * (2 * k as u64));
            if k % 2 == 0 {
                num = -num;
            }
            Rational::from((num, den))
        })
        .collect()
}

/// `[B_2, B_4, ..., B_{2n}]` as exact rationals.
pub fn bernoulli_even(n: usize) -> Vec<Rational> {
    let mut c = rational_cache().lock().expect("bernoulli cache poisoned");
    if c.len() < n {
        let target = n.max(2 * c.len()).max(32);
        *c = compute_b2n(target);
    }
    c[..n].to_vec()
}

type FloatTable = Mutex<HashMap<(u32, u8), Arc<Vec<Float>>>>;

fn float_cache() -> &'static FloatTable {
    static C: OnceLock<FloatTable> = OnceLock::new();
    C.get_or_init(|| Mutex::new(HashMap::new()))
}

fn cached(prec: u32, kind: u8, n: usize, build: impl Fn(usize, u32) -> Vec<Float>) -> Arc<Vec<Float>> {
    {
        let c = float_cache().lock().expect("float cache poisoned");
        if let Some(v) = c.get(&(prec, kind)) {
            if v.len() >= n {
                return v.clone();
            }
        }
    }
    let len = n.max(64);
    let v = Arc::new(build(len, prec));
    float_cache().lock().expect("float cache poisoned").insert((prec, kind), v.clone());
    v
}

/// `B_{2k} / (2k (2k-1))` for `k = 1..=n` (Stirling series coefficients).
pub fn stirling_coeffs(prec: u32, n: usize) -> Arc<Vec<Float>> {
    cached(prec, 0, n, |len, p| {
        bernoulli_even(len)
            .iter()
            .enumerate()
            .map(|(i, b)| {
                let k = (i + 1) as u64;
                let r = Rational::from(b / Integer::from(2 * k * (2 * k - 1)));
                Float::with_val(p, &r)
            })
            .collect()
    })
}

/// `B_{2k} / (2k)!` for `k = 1..=n` (Euler-Maclaurin coefficients).
pub fn em_coeffs(prec: u32, n: usize) -> Arc<Vec<Float>> {
    cached(prec, 1, n, |len, p| {
        let mut fact = Integer::from(1);
        bernoulli_even(len)
            .iter()
            .enumerate()
            .map(|(i, b)| {
                let k = (i + 1) as u64;
                fact *= (2 * k - 1) * (2 * k);
                let r = Rational::from(b / &fact);
                Float::with_val(p, &r)
            })
            .collect()
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_values() {
        let b = bernoulli_even(4);
        assert_eq!(b[0], Rational::from((1, 6)));
        assert_eq!(b[1], Rational::from((-1, 30)));
        assert_eq!(b[2], Rational::from((1, 42)));
        assert_eq!(b[3], Rational::from((-1, 30)));
    }

    #[test]
    fn b20_and_growth() {
        let b = bernoulli_even(40);
        assert_eq!(b[9], Rational::from((-174611, 330)));
        assert_eq!(bernoulli_even(40), b);
    }
}
