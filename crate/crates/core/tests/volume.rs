use std::f64::consts::PI;

use finsler_gbc::forms::DiffStep;
use finsler_gbc::linalg::CMat;
use finsler_gbc::metric::{
    builtin_metric, FlatHermitian, FsProductBlend, FubiniStudy, LinearChange, QuarticBlend, QuarticMinkowski, Scaled,
};
use finsler_gbc::volume::{log_volume_differential, reference_volume, volume, volume_value, SphereRule};
use num_complex::Complex64 as C64;
use proptest::prelude::*;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn unitary(t: f64, s: f64) -> CMat {
    let (a, b) = (C64::from_polar(t.cos(), s), C64::from_polar(t.sin(), -0.7));
    vec![vec![a, -b.conj()], vec![b, a.conj()]]
}

#[test]
fn hermitian_volumes_with_default_rules() {
    let r1 = SphereRule::default_for(1).unwrap();
    let v = volume(&FlatHermitian { n: 1 }, 0, &[c(0.1, 0.2)], &r1).unwrap();
    assert!((v.vol - 2.0 * PI).abs() < 1e-12 && v.error < 1e-10);
    let v = volume_value(&FubiniStudy { conformal: 0.0 }, 0, &[c(0.4, -0.3)], &r1).unwrap();
    assert!((v - 2.0 * PI).abs() < 1e-12);
    let r2 = SphereRule::product(2, 16, 16).unwrap();
    let v = volume_value(&FlatHermitian { n: 2 }, 0, &[c(0.0, 0.0); 2], &r2).unwrap();
    assert!((v / (2.0 * PI * PI) - 1.0).abs() < 1e-6);
    assert_eq!(reference_volume(2), 2.0 * PI * PI);
}

#[test]
fn monte_carlo_oracle_agrees_with_the_product_rule() {
    let z = [c(0.1, 0.0), c(0.0, -0.2)];
    let mc = SphereRule::monte_carlo(2, 1_000_000, 11).unwrap();
    let pr = SphereRule::product(2, 24, 24).unwrap();
    let m = FsProductBlend { lambda: 0.5 };
    let a = volume_value(&m, 0, &z, &mc).unwrap();
    let b = volume_value(&m, 0, &z, &pr).unwrap();
    assert!((a / b - 1.0).abs() < 5e-3, "{a} {b}");
}

#[test]
fn log_volume_differential_cases() {
    let step = DiffStep::default();
    let r2 = SphereRule::product(2, 16, 16).unwrap();
    let z = [c(0.2, 0.1), c(-0.3, 0.2)];
    let d = log_volume_differential(&FlatHermitian { n: 2 }, 0, &z, &r2, step).unwrap();
    assert_eq!(d.max_abs(), 0.0);
    let d = log_volume_differential(&QuarticMinkowski, 0, &z, &r2, step).unwrap();
    assert!(d.max_abs() < 1e-6);
    let d = log_volume_differential(&FsProductBlend { lambda: 0.5 }, 0, &z, &r2, step).unwrap();
    assert!(d.max_abs().is_finite());
    println!("fs-product-blend(0.5): |d log vol| = {:.3e}", d.max_abs());
}

#[test]
fn berwald_volume_is_constant() {
    let r2 = SphereRule::product(2, 16, 16).unwrap();
    let a = volume_value(&QuarticBlend { lambda: 0.5 }, 0, &[c(0.0, 0.0); 2], &r2).unwrap();
    let b = volume_value(&QuarticBlend { lambda: 0.5 }, 0, &[c(0.7, 0.1), c(-0.4, 0.9)], &r2).unwrap();
    assert!((a - b).abs() < 1e-10 * a);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn scale_invariance(k in 1.0f64..4.0, z in (-0.5f64..0.5, -0.5f64..0.5)) {
        let r = SphereRule::product(2, 8, 8).unwrap();
        let zz = [c(z.0, z.1), c(z.1, -z.0)];
        let a = volume_value(&QuarticMinkowski, 0, &zz, &r).unwrap();
        let b = volume_value(&Scaled { inner: QuarticMinkowski, c: k }, 0, &zz, &r).unwrap();
        prop_assert!((a - b).abs() < 1e-10 * a);
    }

    #[test]
    fn unitary_invariance(t in 0.0f64..1.5, s in 0.0f64..6.0) {
        let r = SphereRule::product(2, 24, 24).unwrap();
        let z = [c(0.2, -0.1), c(0.05, 0.3)];
        let m = FsProductBlend { lambda: 0.3 };
        let a = volume_value(&m, 0, &z, &r).unwrap();
        let b = volume_value(&LinearChange { inner: m, a: unitary(t, s), change_base: false }, 0, &z, &r).unwrap();
        prop_assert!((a - b).abs() < 1e-8 * a, "{a} {b}");
    }
}

#[test]
fn builtin_volume_values_are_positive() {
    let r2 = SphereRule::product(2, 8, 8).unwrap();
    for name in ["quartic-minkowski", "quartic-blend(0.5)", "fs-product-blend(0.1)"] {
        let m = builtin_metric(name, None, 2).unwrap();
        let v = volume(m.as_ref(), 0, &[c(0.1, 0.1), c(0.2, 0.0)], &r2).unwrap();
        assert!(v.vol > 0.0 && v.error.is_finite());
    }
}
