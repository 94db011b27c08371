use approx::assert_relative_eq;
use proptest::prelude::*;

use hecke_moments::oscillatory::gaussian_moment;
use hecke_moments::spectral_data::{
    derive_hecke, first_moment_bound_chain, hecke_consistency, spectral_sum, MaassFormRecord, SpectralDataset, SpectralWeight,
};
use hecke_moments::special_functions::{d2_dirichlet_partial, kloosterman, lerch_e, riemann_zeta, sigma_dirichlet_partial};
use hecke_moments::special_functions::arith::gcd;
use hecke_moments::transforms::GaussianWeight;
use hecke_moments::{ComplexValue, PrecisionContext};

fn ctx() -> PrecisionContext {
    PrecisionContext::new(30, 1e-12, 1000).unwrap()
}

const PRIMES: [u64; 10] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29];

fn dataset(rows: &[(f64, f64, f64)]) -> SpectralDataset {
    let mut ds = SpectralDataset::empty("generated");
    let mut kappa = 9.0;
    for &(gap, alpha, h) in rows {
        kappa += gap;
        ds.records.push(MaassFormRecord::from_primes(kappa, alpha, 1, h, &[], 1));
    }
    ds.complete_to = kappa + 100.0;
    ds
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn derived_hecke_values_satisfy_the_relations(tp in prop::collection::vec(-2.0f64..2.0, PRIMES.len())) {
        let primes: Vec<(u64, f64)> = PRIMES.iter().copied().zip(tp.iter().copied()).collect();
        let rec = MaassFormRecord { kappa: 10.0, alpha: 1.0, parity: 1, hecke: derive_hecke(&primes, 30), central_value: 1.0 };
        let rep = hecke_consistency(&rec, 1e-9);
        prop_assert!(rep.passed, "{:?}", rep);
        prop_assert_eq!(rec.t(1), 1.0);
    }

    #[test]
    fn kloosterman_symmetry_and_twist(m in -40i64..40, n in -40i64..40, ell in 1u64..60) {
        let cx = ctx();
        let a = kloosterman(m, n, ell, &cx).unwrap();
        let b = kloosterman(n, m, ell, &cx).unwrap();
        prop_assert!((&a - &b).abs_f64() < 1e-20);
        prop_assert!(a.im.to_f64().abs() < 1e-20);
        prop_assert!(a.abs_f64() <= ell as f64 + 1e-20);
        // S(m, n; l) = S(1, mn; l) when m is a unit mod l
        if gcd(m, ell as i64) == 1 {
            let c = kloosterman(1, m * n, ell, &cx).unwrap();
            prop_assert!((&a - &c).abs_f64() < 1e-20);
        }
    }

    #[test]
    fn gaussian_moments_satisfy_the_recurrence(ar in -3.0f64..3.0, ai in -3.0f64..3.0, j in 1usize..8) {
        // integrating d/dy (y^j exp(-y^2 + Ay)) over R gives 2 P_{j+1} = A P_j + j P_{j-1}
        let cx = ctx();
        let a = ComplexValue::from_f64(cx.bits(), ar, ai);
        let lo = gaussian_moment(j - 1, &a, &cx).unwrap();
        let mid = gaussian_moment(j, &a, &cx).unwrap();
        let hi = gaussian_moment(j + 1, &a, &cx).unwrap();
        let rhs = &(&a * &mid) + &lo.mul_f64(j as f64);
        let d = (&hi.mul_f64(2.0) - &rhs).abs_f64();
        prop_assert!(d < 1e-20 * (1.0 + rhs.abs_f64()), "{:e}", d);
    }

    #[test]
    fn spectral_sums_are_additive_and_order_free(
        rows in prop::collection::vec((0.05f64..2.0, 0.01f64..2.0, 0.0f64..5.0), 2..20),
        split in 0usize..20,
        k in 1u32..=4,
        cut in 10.0f64..40.0,
    ) {
        let cx = ctx();
        let ds = dataset(&rows);
        let split = split.min(ds.records.len());
        let mut left = ds.clone();
        let mut right = ds.clone();
        right.records = left.records.split_off(split);
        for w in [SpectralWeight::Sharp(cut), SpectralWeight::Gaussian(GaussianWeight::quadratic(cut, 2.0).unwrap())] {
            let whole = spectral_sum(&ds, k, &w, &cx).unwrap().to_f64();
            let parts = spectral_sum(&left, k, &w, &cx).unwrap().to_f64() + spectral_sum(&right, k, &w, &cx).unwrap().to_f64();
            assert_relative_eq!(whole, parts, epsilon = 1e-300, max_relative = 1e-12);
            let mut rev = ds.clone();
            rev.records.reverse();
            let r = spectral_sum(&rev, k, &w, &cx).unwrap().to_f64();
            assert_relative_eq!(whole, r, epsilon = 1e-300, max_relative = 1e-12);
        }
    }

    #[test]
    fn first_moment_chain_always_holds(
        rows in prop::collection::vec((0.05f64..1.0, 0.01f64..2.0, 0.0f64..5.0), 1..30),
        t in 9.0f64..15.0,
        v in 0.0f64..6.0,
    ) {
        let cx = ctx();
        let c = first_moment_bound_chain(&dataset(&rows), t, v, &cx);
        prop_assert!(c.lower_holds && c.cs_holds, "{:?}", c);
        prop_assert!(c.mass_above <= c.total_alpha);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn lerch_values_sum_to_a_zeta_multiple(k in 2i64..8, re in 1.3f64..3.0, im in -6.0f64..6.0) {
        // sum_{h=1}^k e(mh/k) is k when k | m and 0 otherwise
        let cx = ctx();
        let s = ComplexValue::from_f64(cx.bits(), re, im);
        let mut acc = ComplexValue::zero(cx.bits());
        for h in 1..=k {
            acc += &lerch_e(&s, h, k, &cx).unwrap();
        }
        let kf = ComplexValue::from_f64(cx.bits(), k as f64, 0.0);
        let want = &riemann_zeta(&s, &cx).unwrap() * &kf.pow(&(&ComplexValue::one(cx.bits()) - &s));
        prop_assert!((&acc - &want).abs_f64() < 1e-20 * want.abs_f64(), "{:?} {:?}", acc.to_f64(), want.to_f64());
    }

    #[test]
    fn dirichlet_partials_are_consistent(s in 1.5f64..4.0, n in 10usize..400) {
        let cx = ctx();
        // at r = 0 the sigma series collapses to sum d(n) n^{-s}, bounded by sum d(n)^2 n^{-s}
        let a = sigma_dirichlet_partial(s, 0.0, n, &cx);
        let b = d2_dirichlet_partial(s, n, &cx).to_f64();
        prop_assert!(a.im.to_f64().abs() < 1e-25);
        prop_assert!(a.re.to_f64() <= b);
        prop_assert!(d2_dirichlet_partial(s, n + 1, &cx).to_f64() > b);
        let full = riemann_zeta(&ComplexValue::from_f64(cx.bits(), s, 0.0), &cx).unwrap().re.to_f64().powi(2);
        prop_assert!(a.re.to_f64() < full);
    }
}
