use finsler_gbc::connection::{connection_point, nonlinear_connection, parallel_transport, structure_residuals};
use finsler_gbc::forms::DiffStep;
use finsler_gbc::metric::{
    builtin_metric, cartan_norm, homogeneity_report, pseudoconvexity_at, pseudoconvexity_scan, FinslerMetric,
};
use num_complex::Complex64 as C64;
use proptest::prelude::*;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

const METRICS: &[(&str, usize)] = &[
    ("flat-hermitian", 1),
    ("flat-hermitian", 2),
    ("fubini-study", 1),
    ("conformal-fubini-study(0.5)", 1),
    ("quartic-minkowski", 2),
    ("quartic-blend(0.5)", 2),
    ("fs-product-blend(0)", 2),
    ("fs-product-blend(0.1)", 2),
];

fn metric(k: usize) -> Box<dyn FinslerMetric> {
    let (name, n) = METRICS[k];
    builtin_metric(name, None, n).unwrap()
}

fn point(n: usize) -> impl Strategy<Value = (Vec<C64>, Vec<C64>)> {
    let cx = |r: f64| (-r..r, -r..r).prop_map(|(a, b)| c(a, b));
    (prop::collection::vec(cx(0.6), n), prop::collection::vec(cx(1.0), n))
}

fn sample() -> impl Strategy<Value = (usize, Vec<C64>, Vec<C64>)> {
    (0..METRICS.len()).prop_flat_map(|k| point(METRICS[k].1).prop_map(move |(z, xi)| (k, z, xi)))
}

fn off_locus(m: &dyn FinslerMetric, xi: &[C64]) -> bool {
    xi.iter().map(|x| x.norm()).sum::<f64>() > 0.1 && m.locus().distance(xi) > 0.05
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn homogeneity_identities_hold((k, z, xi) in sample()) {
        let m = metric(k);
        prop_assume!(off_locus(m.as_ref(), &xi));
        let r = homogeneity_report(m.as_ref(), 0, &z, &xi).unwrap();
        prop_assert!(r.max() < 1e-9, "{} {:?}", m.name(), r);
    }

    #[test]
    fn nonlinear_connection_is_homogeneous((k, z, xi) in sample(), t in (0.2f64..3.0, 0.0f64..6.3)) {
        let m = metric(k);
        prop_assume!(off_locus(m.as_ref(), &xi));
        let lam = C64::from_polar(t.0, t.1);
        let a = nonlinear_connection(m.as_ref(), 0, &z, &xi).unwrap();
        let xs: Vec<C64> = xi.iter().map(|x| x * lam).collect();
        let b = nonlinear_connection(m.as_ref(), 0, &z, &xs).unwrap();
        for (ra, rb) in a.iter().zip(&b) {
            for (x, y) in ra.iter().zip(rb) {
                prop_assert!((x * lam - y).norm() < 1e-9 * (1.0 + y.norm()));
            }
        }
    }

    #[test]
    fn gamma_is_the_fiber_derivative_of_n((k, z, xi) in sample()) {
        let m = metric(k);
        prop_assume!(off_locus(m.as_ref(), &xi));
        let n = xi.len();
        let cp = connection_point(m.as_ref(), 0, &z, &xi, false).unwrap();
        let h = 1e-5;
        for i in 0..n {
            let shift = |d: C64| {
                let mut x = xi.clone();
                x[i] += d;
                nonlinear_connection(m.as_ref(), 0, &z, &x).unwrap()
            };
            let (px, mx, py, my) = (shift(c(h, 0.0)), shift(c(-h, 0.0)), shift(c(0.0, h)), shift(c(0.0, -h)));
            for j in 0..n {
                for kk in 0..n {
                    let d = ((px[j][kk] - mx[j][kk]) - C64::i() * (py[j][kk] - my[j][kk])) / (4.0 * h);
                    prop_assert!((d - cp.gamma[j][i][kk]).norm() < 1e-7, "{} {d} {}", m.name(), cp.gamma[j][i][kk]);
                }
            }
        }
    }
}

#[test]
fn structure_equations_at_a_few_points() {
    for k in 0..METRICS.len() {
        let m = metric(k);
        let n = METRICS[k].1;
        let z: Vec<C64> = (0..n).map(|i| c(0.2 - 0.1 * i as f64, 0.15)).collect();
        let xi: Vec<C64> = (0..n).map(|i| c(0.8, 0.3 + 0.4 * i as f64)).collect();
        let (a, b) = structure_residuals(m.as_ref(), 0, &z, &xi, DiffStep::default()).unwrap();
        assert!(a < 1e-6 && b < 1e-6, "{} {a:e} {b:e}", m.name());
    }
}

#[test]
fn quartic_is_not_hermitian_and_has_an_axis_locus() {
    let m = builtin_metric("quartic-minkowski", None, 2).unwrap();
    let z = [c(0.0, 0.0); 2];
    assert!(cartan_norm(m.as_ref(), 0, &z, &[c(1.0, 0.0), c(1.0, 0.0)]).unwrap() > 0.1);
    let dirs = vec![vec![c(1.0, 0.0), c(0.0, 0.0)], vec![c(0.6, 0.0), c(0.0, 0.8)]];
    let scan = pseudoconvexity_at(m.as_ref(), 0, &z, &dirs).unwrap();
    assert_eq!(scan.locus_warnings.len(), 1);
    let clean = pseudoconvexity_scan(m.as_ref(), 0, &z, 50, 3).unwrap();
    assert!(clean.locus_warnings.is_empty() && clean.min_eigenvalue > 0.0);
}

#[test]
fn fubini_study_transport_preserves_the_norm() {
    let m = builtin_metric("fubini-study", None, 1).unwrap();
    let tau = std::f64::consts::TAU;
    let curve = |t: f64| {
        let z = C64::from_polar(1.0, tau * t);
        (vec![z], vec![z * C64::new(0.0, tau)])
    };
    let v0 = [c(0.6, -0.3)];
    let path = parallel_transport(m.as_ref(), 0, &curve, &v0, 400).unwrap();
    let f0 = m.g_value(0, &curve(0.0).0, &v0).sqrt();
    for (k, &t) in path.t.iter().enumerate() {
        let f = m.g_value(0, &curve(t).0, &path.vector(k)).sqrt();
        assert!((f - f0).abs() < 1e-8, "t={t} {f} {f0}");
    }
    assert!(parallel_transport(m.as_ref(), 0, &curve, &v0, 7).is_err());
}
