use std::f64::consts::PI;

use finsler_gbc::atlas::{
    complement_table, hopf_check, integrate_complement, riemann_surface_check, Manifold, Mesh,
};
use finsler_gbc::connection::curvature;
use finsler_gbc::field::{DiagonalPolynomialField, FieldZero, HolomorphicField};
use finsler_gbc::forms::{DiffStep, ExteriorForm, Slot, TangentVector};
use finsler_gbc::gbc::gbc_verify;
use finsler_gbc::metric::{builtin_metric, FinslerMetric, FlatHermitian, FsProductBlend, FubiniStudy};
use finsler_gbc::scenario::{builtin_scenario, builtin_scenarios};
use finsler_gbc::transgression::{
    boundary_degree, gbc_integrand, lemma_ratio, theta_dbar_residual, transgression_point, SphereMesh,
};
use finsler_gbc::volume::{SphereRule, VolumeField};
use num_complex::Complex64 as C64;
use proptest::prelude::*;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn cases() -> Vec<(Box<dyn FinslerMetric>, DiagonalPolynomialField, usize)> {
    vec![
        (Box::new(FubiniStudy { conformal: 0.0 }), DiagonalPolynomialField::euler_projective(1), 1),
        (builtin_metric("conformal-fubini-study(0.5)", None, 1).unwrap(), DiagonalPolynomialField::euler_projective(1), 1),
        (Box::new(FsProductBlend { lambda: 0.0 }), DiagonalPolynomialField::euler_projective(2), 2),
        (Box::new(FsProductBlend { lambda: 0.4 }), DiagonalPolynomialField::euler_projective(2), 2),
        (
            builtin_metric("quartic-blend(0.5)", None, 2).unwrap(),
            DiagonalPolynomialField::constant(&[c(1.0, 0.5), c(-0.3, 0.7)]),
            2,
        ),
    ]
}

fn base_point(n: usize) -> impl Strategy<Value = Vec<C64>> {
    prop::collection::vec((0.2f64..0.9, 0.0f64..6.28).prop_map(|(r, t)| C64::from_polar(r, t)), n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn pointwise_identities(k in 0usize..5, zs in base_point(2)) {
        let cs = cases();
        let (m, f, n) = &cs[k];
        let z = &zs[..*n];
        let tp = transgression_point(m.as_ref(), f, 0, z, true).unwrap();
        let x = TangentVector::in_slot(Slot::BaseHolo, &tp.x);
        prop_assert!((tp.omega_x.contract(&x).scalar_value() - 1.0).norm() < 1e-12);
        let sum = tp.lambda1.add_form(&tp.lambda2);
        prop_assert!(sum.distance(&tp.psi[0]) < 1e-12);
        for i in 0..*n {
            for j in 0..*n {
                prop_assert!((tp.theta[i][j] - tp.theta_h[i][j] - tp.theta_v[i][j]).norm() < 1e-12);
            }
        }
        if m.flags().hermitian {
            prop_assert!(tp.theta_v.iter().flatten().all(|v| v.norm() < 1e-12));
            prop_assert!(tp.lambda1.max_abs() < 1e-12);
        }
    }
}

#[test]
fn dbar_theta_is_the_contracted_curvature() {
    for (m, f, n) in cases() {
        let z: Vec<C64> = [c(0.4, 0.2), c(-0.3, 0.5)][..n].to_vec();
        let r = theta_dbar_residual(m.as_ref(), &f, 0, &z, DiffStep::default()).unwrap();
        assert!(r < 1e-6, "{} {r:e}", m.name());
    }
}

#[test]
fn lemma_ratio_tends_to_the_sign() {
    for (m, f, n) in cases().into_iter().take(4) {
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        let mut last = f64::INFINITY;
        for eps in [1e-1, 1e-2, 1e-3] {
            let z: Vec<C64> = (0..n).map(|i| C64::from_polar(eps, 0.7 + i as f64)).collect();
            let d = (lemma_ratio(m.as_ref(), &f, 0, &z).unwrap() - sign).norm();
            assert!(d <= last * 1.0001 + 1e-12, "{} {d} {last}", m.name());
            last = d;
        }
        assert!(last < 1e-4, "{} {last}", m.name());
    }
}

#[test]
fn flat_plane_degrees_are_exact() {
    let flat1 = FlatHermitian { n: 1 };
    let vol1 = VolumeField::new(&flat1, SphereRule::default_for(1).unwrap());
    let f1 = DiagonalPolynomialField::euler_plane(1);
    let d = boundary_degree(&flat1, &f1, &vol1, &f1.zeros()[0], 0.3, SphereMesh { polar: 1, azimuth: 16 }).unwrap();
    assert!((d - 1.0 / (2.0 * PI)).abs() < 1e-14);

    let flat2 = FlatHermitian { n: 2 };
    let vol2 = VolumeField::new(&flat2, SphereRule::product(2, 8, 8).unwrap());
    let f2 = DiagonalPolynomialField::euler_plane(2);
    let d = boundary_degree(&flat2, &f2, &vol2, &f2.zeros()[0], 0.3, SphereMesh { polar: 8, azimuth: 4 }).unwrap();
    assert!((d - 1.0 / (2.0 * PI * PI)).abs() < 1e-10, "{d}");
}

#[test]
fn overlapping_balls_are_rejected() {
    let flat = FlatHermitian { n: 1 };
    let vol = VolumeField::new(&flat, SphereRule::default_for(1).unwrap());
    // X = (z² − 0.01) ∂/∂z: zeros at ±0.1
    let f = DiagonalPolynomialField {
        name: "two-zeros".into(),
        coeffs: vec![vec![vec![c(-0.01, 0.0), c(0.0, 0.0), c(1.0, 0.0)]]],
        zeros: vec![FieldZero { chart: 0, z: vec![[0.1, 0.0]] }, FieldZero { chart: 0, z: vec![[-0.1, 0.0]] }],
    };
    let mesh = SphereMesh { polar: 1, azimuth: 16 };
    assert!(boundary_degree(&flat, &f, &vol, &f.zeros[0], 0.25, mesh).is_err());
    assert!(boundary_degree(&flat, &f, &vol, &f.zeros[0], 0.05, mesh).is_ok());
}

#[test]
fn catalog_and_hopf() {
    let names: Vec<String> = builtin_scenarios().into_iter().map(|s| s.name).collect();
    assert_eq!(names.len(), 6);
    let cp1 = Manifold::builtin("cp1").unwrap();
    assert!(hopf_check(&cp1, &DiagonalPolynomialField::euler_projective(1)).unwrap().matches);
    let err = hopf_check(&cp1, &DiagonalPolynomialField::z_squared_projective()).unwrap_err();
    assert!(err.to_string().contains("degenerate"), "{err}");
    let torus = Manifold::builtin("torus-product").unwrap();
    assert!(hopf_check(&torus, &DiagonalPolynomialField::constant(&[c(1.0, 0.0), c(0.0, 1.0)])).unwrap().matches);
}

#[test]
fn first_chern_number_and_areas() {
    let cp1 = Manifold::builtin("cp1").unwrap();
    let m = FubiniStudy { conformal: 0.0 };
    let c1 = |chart: usize, z: &[C64]| -> finsler_gbc::Result<ExteriorForm> {
        let cp = curvature(&m, chart, z, &[c(1.0, 0.0)])?;
        Ok(cp.omega.unwrap().entries[0][0].scale(C64::new(0.0, 1.0 / (2.0 * PI))))
    };
    let v = integrate_complement(&cp1, &c1, &[], 0.1, Mesh { radial: 24, angular: 8 }).unwrap();
    assert!((v.re - 2.0).abs() < 1e-6, "{v}");
    let torus = Manifold::builtin("flat-torus").unwrap();
    let area = |_: usize, _: &[C64]| Ok(ExteriorForm::dz(0).wedge(&ExteriorForm::dzb(0)).scale(c(0.0, 0.5)));
    let t = complement_table(&torus, &area, &[], &[], Mesh { radial: 4, angular: 4 }).unwrap();
    assert!((t.extrapolated.value - 1.0).abs() < 1e-14);
}

#[test]
fn riemann_surface_values() {
    let cp1 = Manifold::builtin("cp1").unwrap();
    let m = FubiniStudy { conformal: 0.0 };
    let vol = VolumeField::new(&m, SphereRule::default_for(1).unwrap());
    let f = DiagonalPolynomialField::euler_projective(1);
    let r = riemann_surface_check(&cp1, &m, &f, &vol, &[0.2, 0.1, 0.05], Mesh { radial: 24, angular: 32 }).unwrap();
    assert!((r.value.value - 2.0).abs() < 0.01, "{:?}", r.value);
    let conformal = builtin_metric("conformal-fubini-study(0.5)", None, 1).unwrap();
    let vol = VolumeField::new(conformal.as_ref(), SphereRule::default_for(1).unwrap());
    let r2 = riemann_surface_check(&cp1, conformal.as_ref(), &f, &vol, &[0.2, 0.1, 0.05], Mesh { radial: 24, angular: 32 }).unwrap();
    assert!((r2.value.value - 2.0).abs() < 0.01, "{:?}", r2.value);
}

fn swapped_euler() -> DiagonalPolynomialField {
    let mut f = DiagonalPolynomialField::euler_projective(1);
    f.coeffs.swap(0, 1);
    f
}

#[test]
fn chart_swap_mesh_refinement_and_stokes() {
    let mut s = builtin_scenario("cp1-fs").unwrap();
    s.mesh = Mesh { radial: 16, angular: 16 };
    let man = s.manifold().unwrap();
    let m = s.metric().unwrap();
    let vol = VolumeField::new(m.as_ref(), s.sphere_rule().unwrap());
    let step = s.step().unwrap();
    let lhs = |f: &DiagonalPolynomialField, mesh: Mesh| {
        let integrand = |chart: usize, z: &[C64]| Ok(gbc_integrand(m.as_ref(), f, &vol, chart, z, step)?.form());
        complement_table(&man, &integrand, &f.zeros(), &s.eps, mesh).unwrap()
    };
    let euler = DiagonalPolynomialField::euler_projective(1);
    let a = lhs(&euler, s.mesh);
    let b = lhs(&swapped_euler(), s.mesh);
    assert!((a.extrapolated.value - b.extrapolated.value).abs() < 1e-6);
    let fine = lhs(&euler, s.mesh.refined());
    assert!((fine.extrapolated.value - a.extrapolated.value).abs() < a.extrapolated.error);

    let r = gbc_verify(&s).unwrap();
    assert!(r.stokes_consistent && r.passed, "{:?} {:?}", r.lhs, r.rhs);
}
