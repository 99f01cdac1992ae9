use finsler_gbc::forms::{
    det_poly, numeric_d, pullback_section, CovectorLabel, DiffStep, ExteriorForm, FormMatrix, Slot, TangentVector,
};
use finsler_gbc::jet::{fiber_vars, real_vars, seed, wirtinger, Coord, Part, RealVar};
use num_complex::Complex64 as C64;
use proptest::prelude::*;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[test]
fn seed_rejections_and_sizes() {
    let t = fiber_vars(1);
    assert!(seed(&[c(0.0, 0.0)], &[c(0.0, 0.0)], 2, &t).is_err());
    assert!(seed(&[c(0.0, 0.0)], &[c(1.0, 0.0)], 5, &t).is_err());
    let tracked = [RealVar::new(Coord::Fiber(0), Part::Re), RealVar::new(Coord::Fiber(0), Part::Im)];
    let p = seed(&[c(0.0, 0.0)], &[c(1.0, 0.0)], 2, &tracked).unwrap();
    assert_eq!(p.space().len(), 6);
    assert_eq!(real_vars(&[Coord::Base(0), Coord::Fiber(1)]).len(), 4);
}

#[test]
fn wirtinger_examples() {
    let x = Coord::Fiber(0);
    let p = seed(&[c(0.0, 0.0)], &[c(2.0, 1.0)], 2, &fiber_vars(1)).unwrap();
    assert!((wirtinger(&p.xi[0].abs2(), &[x], &[x]).unwrap() - 1.0).norm() < 1e-14);
    let sq = (p.xi[0].clone() * p.xi[0].clone()).to_jet();
    assert!(wirtinger(&sq, &[], &[x]).unwrap().norm() < 1e-14);

    let p = seed(&[c(0.0, 0.0); 2], &[c(1.0, 0.0), c(1.0, 0.0)], 2, &fiber_vars(2)).unwrap();
    let a = p.xi[0].abs2();
    let b = p.xi[1].abs2();
    let g = (a.clone() * a + b.clone() * b).sqrt();
    assert!((wirtinger(&g, &[x], &[x]).unwrap() - 3.0 * 2f64.sqrt() / 4.0).norm() < 1e-14);
}

fn area_element(i: usize) -> ExteriorForm {
    ExteriorForm::dz(i).wedge(&ExteriorForm::dzb(i)).scale(c(0.0, 0.5))
}

#[test]
fn disk_and_bidisk_areas() {
    use finsler_gbc::atlas::{annulus_nodes, bidisk_nodes, Mesh};
    use finsler_gbc::forms::integrate_nodes;
    let disk = annulus_nodes(0.0, 1.0, Mesh { radial: 8, angular: 8 });
    let f = |_: &[C64]| Ok(area_element(0));
    let a = integrate_nodes(&f, &disk, 2).unwrap();
    assert!((a.re - std::f64::consts::PI).abs() < 1e-12);

    let bi = bidisk_nodes(0.0, None, Mesh { radial: 16, angular: 4 });
    let g = |_: &[C64]| Ok(area_element(0).wedge(&area_element(1)));
    let v = integrate_nodes(&g, &bi, 4).unwrap();
    assert!((v.re - std::f64::consts::PI.powi(2)).abs() < 1e-8, "{v}");
}

fn label() -> impl Strategy<Value = CovectorLabel> {
    (0usize..4, 0usize..2).prop_map(|(s, i)| {
        let slot = [Slot::BaseHolo, Slot::BaseAnti, Slot::FiberHolo, Slot::FiberAnti][s];
        CovectorLabel::new(slot, i)
    })
}

fn coeff() -> impl Strategy<Value = C64> {
    (-2.0f64..2.0, -2.0f64..2.0).prop_map(|(a, b)| c(a, b))
}

fn form(degree: usize) -> impl Strategy<Value = ExteriorForm> {
    prop::collection::vec((prop::collection::vec(label(), degree), coeff()), 1..4).prop_map(move |terms| {
        let mut f = ExteriorForm::zero(degree);
        for (ls, a) in terms {
            f = f.add_form(&ExteriorForm::monomial(&ls, a));
        }
        f
    })
}

fn vector() -> impl Strategy<Value = TangentVector> {
    (prop::collection::vec(coeff(), 2), prop::collection::vec(coeff(), 2))
        .prop_map(|(dz, dxi)| TangentVector::real_total(&dz, &dxi))
}

proptest! {
    #[test]
    fn graded_anticommutativity(a in (0usize..3).prop_flat_map(form), b in (0usize..3).prop_flat_map(form)) {
        let sign = if a.degree() * b.degree() % 2 == 0 { 1.0 } else { -1.0 };
        prop_assert!(a.wedge(&b).distance(&b.wedge(&a).scale_re(sign)) < 1e-12);
    }

    #[test]
    fn contraction_is_an_antiderivation(a in form(1), b in form(2), v in vector()) {
        let lhs = a.wedge(&b).contract(&v);
        let rhs = a.contract(&v).wedge(&b).add_form(&a.wedge(&b.contract(&v)).scale_re(-1.0));
        prop_assert!(lhs.distance(&rhs) < 1e-12);
    }

    #[test]
    fn det_poly_matches_expansion(
        a in prop::collection::vec(form(2), 4),
        b in prop::collection::vec(coeff(), 4),
        lam in 0.5f64..2.0,
    ) {
        let am = FormMatrix { entries: vec![a[..2].to_vec(), a[2..].to_vec()] };
        let bm = FormMatrix::from_scalars(&[b[..2].to_vec(), b[2..].to_vec()]);
        let d = det_poly(&am, &bm).unwrap();
        // det(λA + B) = det B + λ(a00 b11 + b00 a11 − a01 b10 − b01 a10) + λ² det A, degree by degree
        let (a_, b_) = (&am.entries, &bm.entries);
        let w = |x: &ExteriorForm, y: &ExteriorForm| x.wedge(y);
        let deg0 = w(&b_[0][0], &b_[1][1]).add_form(&w(&b_[0][1], &b_[1][0]).scale_re(-1.0));
        let deg2 = w(&a_[0][0], &b_[1][1])
            .add_form(&w(&b_[0][0], &a_[1][1]))
            .add_form(&w(&a_[0][1], &b_[1][0]).scale_re(-1.0))
            .add_form(&w(&b_[0][1], &a_[1][0]).scale_re(-1.0));
        let deg4 = w(&a_[0][0], &a_[1][1]).add_form(&w(&a_[0][1], &a_[1][0]).scale_re(-1.0));
        prop_assert!(d[0].distance(&deg0) < 1e-10);
        prop_assert!(d[1].distance(&deg2) < 1e-10);
        prop_assert!(d[2].distance(&deg4) < 1e-10);
        // at λ the pieces recombine to the determinant of λA + B on any top-degree evaluation
        let e = |i: usize, j: usize| (a_[i][j].scale_re(lam), b_[i][j].clone());
        let top = w(&e(0, 0).0, &e(1, 1).0).add_form(&w(&e(0, 1).0, &e(1, 0).0).scale_re(-1.0));
        prop_assert!(top.distance(&d[2].scale_re(lam * lam)) < 1e-10);
    }

    #[test]
    fn pullback_commutes_with_dbar(
        j in prop::collection::vec(coeff(), 4),
        nl in prop::collection::vec(coeff(), 4),
        w in prop::collection::vec(coeff(), 2),
        z in coeff(),
    ) {
        // ω = Σ w_i(z) δξ^i with w_i(z) = w_i z̄; J, N constant
        let jm = vec![j[..2].to_vec(), j[2..].to_vec()];
        let nm = vec![nl[..2].to_vec(), nl[2..].to_vec()];
        let field = |zz: &[C64]| -> finsler_gbc::Result<ExteriorForm> {
            let mut f = ExteriorForm::zero(1);
            for i in 0..2 {
                f = f.add_form(&ExteriorForm::dxi(i).scale(w[i] * zz[0].conj()));
            }
            Ok(f)
        };
        let pulled = |zz: &[C64]| pullback_section(&field(zz)?, &jm, &nm);
        let zp = [z * 0.3, c(0.1, 0.2)];
        let step = DiffStep::default();
        let a = numeric_d(&pulled, &zp, step).unwrap();
        let d_then_pull = numeric_d(&field, &zp, step).unwrap();
        let b = pullback_section(&d_then_pull, &jm, &nm).unwrap();
        prop_assert!(a.distance(&b) < 1e-8, "{}", a.distance(&b));
    }
}
