//! Frozen reference values from an independent arbitrary-precision implementation
//! (`scripts/gen_oracles.py`, mpmath at 45 digits).

use hecke_moments::moment_integrals::zeta_moment;
use hecke_moments::oscillatory::gaussian_moment;
use hecke_moments::special_functions::{d2_dirichlet_partial, gamma, hurwitz_zeta, lerch_e, log_gamma, riemann_zeta};
use hecke_moments::transforms::{psi_hat_at_one_tanh, GaussianWeight};
use hecke_moments::{ComplexValue, Float, PrecisionContext};

fn ctx() -> PrecisionContext {
    PrecisionContext::new(40, 1e-20, 1000).unwrap()
}

fn c(re: f64, im: f64) -> ComplexValue {
    ComplexValue::from_f64(ctx().bits(), re, im)
}

fn close(got: &ComplexValue, want: (f64, f64), tol: f64) {
    let w = c(want.0, want.1);
    let d = (got - &w).abs_f64();
    assert!(d <= tol * w.abs_f64(), "got {:?}, want {:?}, diff {:e}", got.to_f64(), want, d);
}

#[test]
fn riemann_zeta_values() {
    let cx = ctx();
    let cases = [
        ((0.5, 14.0), (0.022241142609993589246213199203968626, -0.10325812326645005790236309555257383)),
        ((2.5, -3.0), (0.8594150062168289455041772695949235, 0.099134926365933891537222238293608644)),
        ((-1.5, 2.0), (0.12424726557777474701374383525062728, -0.015707749528273202786181647907332331)),
        ((0.3, 40.0), (0.74877520950422583839966724701175831, -1.4408854406344405111286410157279289)),
    ];
    for ((re, im), want) in cases {
        close(&riemann_zeta(&c(re, im), &cx).unwrap(), want, 1e-15);
    }
}

#[test]
fn hurwitz_zeta_values() {
    let cx = ctx();
    let p = cx.bits();
    let cases = [
        ((3.0, 1.0), (1, 3), (12.739376303299922923711557137925897, 23.812600332404389438189778716106734)),
        ((0.5, 10.0), (3, 4), (-0.82466516298715995943133551707716044, 0.95457874805605342885085128896870589)),
        ((-2.5, 1.0), (1, 7), (0.012197866098611295425782402348177636, -0.019753769250464757034472756133625414)),
    ];
    for ((re, im), (n, d), want) in cases {
        let a = Float::with_val(p, n) / d;
        close(&hurwitz_zeta(&c(re, im), &a, &cx).unwrap(), want, 1e-15);
    }
}

#[test]
fn gamma_values() {
    let cx = ctx();
    close(&gamma(&c(0.5, 0.5), &cx).unwrap(), (0.81816399954174739407774887355532491, -0.76331382871398261667029678776090063), 1e-15);
    close(&gamma(&c(7.25, -3.0), &cx).unwrap(), (543.32807551791771094566063642903157, 268.42399878597702941499461817624702), 1e-15);
    close(&gamma(&c(-2.5, 1.0), &cx).unwrap(), (-0.041736625807893613744760138309780404, -0.086369107369763484694186279347028211), 1e-15);
    // principal branch, continuous in the upper half plane
    close(&log_gamma(&c(10.0, 100.0), &cx).unwrap(), (-112.39736554967237892570698055002232, 374.98942296222949950761542077996698), 1e-15);
}

#[test]
fn lerch_values() {
    let cx = ctx();
    let cases = [
        ((0.5, 3.0), 1, 3, (-1.324982359022466757108195915500811, 1.1530716184084459755374995741623454)),
        ((-1.25, 0.5), 2, 5, (-0.27939056948995490722228423970144941, -0.18572644509420269993619341496739353)),
        ((2.0, -4.0), 5, 7, (-0.038618864405873599871802171750783457, -1.3093570062487828436024305240425775)),
    ];
    for ((re, im), h, k, want) in cases {
        close(&lerch_e(&c(re, im), h, k, &cx).unwrap(), want, 1e-15);
    }
}

#[test]
fn second_moment_to_thirty() {
    let cx = PrecisionContext::new(40, 1e-14, 1000).unwrap();
    let v = zeta_moment(30.0, 1, &cx).unwrap().to_f64();
    assert!((v / 59.084429200342385640180793862170807 - 1.0).abs() < 1e-13, "{}", v);
}

#[test]
fn psi_hat_at_one() {
    let cx = ctx();
    let w = GaussianWeight::kuznetsov(60.0, 4.0).unwrap();
    let v = psi_hat_at_one_tanh(&w, &cx).unwrap().to_f64();
    assert!((v / 850.73622812096526436159197890888129 - 1.0).abs() < 1e-14, "{}", v);
}

#[test]
fn gaussian_moment_values() {
    let cx = ctx();
    close(&gaussian_moment(3, &c(0.7, -0.4), &cx).unwrap(), (0.90416896663869494089258397022134282, -0.83791326534403780352740216639378921), 1e-15);
    close(&gaussian_moment(8, &c(1.5, 0.0), &cx).unwrap(), (172.01498856792614967638275766640855, 0.0), 1e-15);
}

#[test]
fn divisor_square_partial_sum() {
    let v = d2_dirichlet_partial(2.0, 200, &ctx()).to_f64();
    assert!((v / 6.3373860845043391222135526136806198 - 1.0).abs() < 1e-15);
}
