//! Transgression forms of a holomorphic vector field on the complement of its zeros.
//!
//! Everything here is evaluated along the section `ξ = X(z)`, so every field is a form on
//! the base chart. Matrices are indexed `[upper][lower]`, e.g. `theta[i][j] = Θ^i_j`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::connection::{connection_point, ConnectionPoint};
use crate::error::{Error, Result};
use crate::field::{FieldZero, HolomorphicField};
use crate::forms::{
    det_forms, det_poly, numeric_d, numeric_d_split, pullback_section, DiffStep, ExteriorForm, FormMatrix, Slot,
    TangentVector,
};
use crate::jet::{base_vars, seed, Coord};
use crate::linalg::{self, CMat};
use crate::metric::FinslerMetric;
use crate::quadrature::{gauss_legendre, neumaier_sum, periodic_trapezoid, richardson, Estimate};
use crate::volume::VolumeField;

type C64 = Complex64;

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// `i/2π`.
fn chern_factor() -> C64 {
    C64::new(0.0, 1.0 / (2.0 * PI))
}

/// All pointwise objects at one base point off the zeros.
#[derive(Clone, Debug)]
pub struct TransgressionPoint {
    pub n: usize,
    pub x: Vec<C64>,
    pub jac: CMat,
    pub omega_x: ExteriorForm,
    pub dbar_omega_x: ExteriorForm,
    pub theta: CMat,
    pub theta_h: CMat,
    pub theta_v: CMat,
    /// Pullback of the curvature matrix; present when curvature was requested.
    pub x_omega: Option<FormMatrix>,
    /// `Ψ_0, …, Ψ_{n−1}`; empty without curvature.
    pub psi: Vec<ExteriorForm>,
    pub lambda1: ExteriorForm,
    pub lambda2: ExteriorForm,
    pub xc_n: Option<ExteriorForm>,
}

impl TransgressionPoint {
    pub fn psi_total(&self) -> ExteriorForm {
        let mut s = ExteriorForm::zero(2 * self.n - 1);
        for p in &self.psi {
            s.add_scaled(p, c(1.0));
        }
        s
    }
}

fn field_at(f: &dyn HolomorphicField, chart: usize, z: &[C64]) -> Result<(Vec<C64>, CMat)> {
    let x = f.value(chart, z);
    if x.iter().all(|v| v.norm() < 1e-13) {
        return Err(Error::Pole(format!(
            "{} vanishes at chart {chart}, z = {:?}",
            f.name(),
            z.iter().map(|v| (v.re, v.im)).collect::<Vec<_>>()
        )));
    }
    Ok((x, f.jacobian(chart, z)))
}

/// `ω_X = G_i dz^i / G` and `∂̄ω_X`, both along `ξ = X(z)`.
pub fn omega_parts(cp: &ConnectionPoint, x: &[C64], jac: &CMat) -> (ExteriorForm, ExteriorForm) {
    let n = cp.n;
    let mut omega = ExteriorForm::zero(1);
    for i in 0..n {
        omega.add_scaled(&ExteriorForm::dz(i), cp.gi[i] / cp.g);
    }
    // ∂̄(G_i(z, X(z))) = (∂_{z̄^k} G_i + G_{il̄} conj(∂X^l/∂z^k)) dz̄^k
    let dbar_gi: Vec<ExteriorForm> = (0..n)
        .map(|i| {
            let mut e = ExteriorForm::zero(1);
            for k in 0..n {
                let mut v = cp.gi_zbar[i][k];
                for l in 0..n {
                    v += cp.h[i][l] * jac[l][k].conj();
                }
                e.add_scaled(&ExteriorForm::dzb(k), v);
            }
            e
        })
        .collect();
    let mut dbar_g = ExteriorForm::zero(1);
    for i in 0..n {
        dbar_g.add_scaled(&dbar_gi[i], x[i]);
    }
    let mut d = ExteriorForm::zero(2);
    for j in 0..n {
        d.add_scaled(&dbar_gi[j].wedge(&ExteriorForm::dz(j)), c(1.0 / cp.g));
    }
    d.add_scaled(&dbar_g.wedge(&omega), c(-1.0 / cp.g));
    (omega, d)
}

/// `(Θ_H, Θ_V)`: `Θ_H = −μ − Γ(z,X)·X`, `Θ_V = −C(z,X)·(μ + N)·X`.
pub fn theta_parts(cp: &ConnectionPoint, x: &[C64], jac: &CMat) -> (CMat, CMat) {
    let n = cp.n;
    let mut th = linalg::zeros(n);
    let mut tv = linalg::zeros(n);
    let lifted: Vec<C64> = (0..n).map(|l| (0..n).map(|s| (jac[l][s] + cp.nl[l][s]) * x[s]).sum()).collect();
    for i in 0..n {
        for j in 0..n {
            th[i][j] = -jac[i][j] - (0..n).map(|k| cp.gamma[i][j][k] * x[k]).sum::<C64>();
            tv[i][j] = -(0..n).map(|l| cp.cartan[i][j][l] * lifted[l]).sum::<C64>();
        }
    }
    (th, tv)
}

/// `Θ = −ι(X)X*ϖ − μ` assembled from the connection forms themselves.
pub fn theta_via_forms(cp: &ConnectionPoint, x: &[C64], jac: &CMat) -> Result<CMat> {
    let n = cp.n;
    let xv = TangentVector::in_slot(Slot::BaseHolo, x);
    let mut t = linalg::zeros(n);
    for i in 0..n {
        for j in 0..n {
            let pulled = pullback_section(&cp.varpi.entries[i][j], jac, &cp.nl)?;
            t[i][j] = -pulled.contract(&xv).scalar_value() - jac[i][j];
        }
    }
    Ok(t)
}

fn pulled_curvature(cp: &ConnectionPoint, jac: &CMat) -> Result<Option<FormMatrix>> {
    let Some(omega) = &cp.omega else { return Ok(None) };
    let n = cp.n;
    let mut out = FormMatrix::zero(n, 2);
    for i in 0..n {
        for j in 0..n {
            out.entries[i][j] = pullback_section(&omega.entries[i][j], jac, &cp.nl)?;
        }
    }
    Ok(Some(out))
}

fn add_matrices(a: &CMat, b: &CMat) -> CMat {
    a.iter().zip(b).map(|(r, s)| r.iter().zip(s).map(|(x, y)| x + y).collect()).collect()
}

/// Evaluate every transgression object at `z`; Ψ and `X*c_n` need `with_curvature`.
pub fn transgression_point(
    m: &dyn FinslerMetric,
    f: &dyn HolomorphicField,
    chart: usize,
    z: &[C64],
    with_curvature: bool,
) -> Result<TransgressionPoint> {
    let n = m.dim();
    if f.dim() != n {
        return Err(Error::Dimension(format!("field of dimension {} on a metric of dimension {n}", f.dim())));
    }
    let (x, jac) = field_at(f, chart, z)?;
    let cp = connection_point(m, chart, z, &x, with_curvature)?;
    let (omega_x, dbar_omega_x) = omega_parts(&cp, &x, &jac);
    let (theta_h, theta_v) = theta_parts(&cp, &x, &jac);
    let theta = add_matrices(&theta_h, &theta_v);
    let k = chern_factor();
    let kn = k.powu(n as u32);
    let base = omega_x.wedge(&dbar_omega_x.wedge_pow(n - 1));
    let split = det_poly(&FormMatrix::from_scalars(&theta_v), &FormMatrix::from_scalars(&theta_h))?;
    let mut lam1 = C64::new(0.0, 0.0);
    for d in &split[1..] {
        lam1 += d.scalar_value();
    }
    let lambda1 = base.scale(kn * lam1);
    let lambda2 = base.scale(kn * split[0].scalar_value());
    let x_omega = pulled_curvature(&cp, &jac)?;
    let (psi, xc_n) = match &x_omega {
        None => (Vec::new(), None),
        Some(xo) => {
            let a = xo.scale(k);
            let b = FormMatrix::from_scalars(&theta).scale(k);
            let dets = det_poly(&a, &b)?;
            let psi = (0..n)
                .map(|j| omega_x.wedge(&dbar_omega_x.wedge_pow(n - j - 1)).wedge(&dets[j]))
                .collect();
            (psi, Some(det_forms(&a)?))
        }
    };
    Ok(TransgressionPoint {
        n,
        x,
        jac,
        omega_x,
        dbar_omega_x,
        theta,
        theta_h,
        theta_v,
        x_omega,
        psi,
        lambda1,
        lambda2,
        xc_n,
    })
}

/// `det(Θ_H)/det(∂X/∂z)`; tends to `(−1)^n` at a zero.
pub fn lemma_ratio(m: &dyn FinslerMetric, f: &dyn HolomorphicField, chart: usize, z: &[C64]) -> Result<C64> {
    let tp = transgression_point(m, f, chart, z, false)?;
    Ok(linalg::det(&tp.theta_h) / linalg::det(&tp.jac))
}

/// `Σ_{j≥1} d Re Ψ_j + d Re Λ₁ + d log vol ∧ Re Λ₂`.
pub fn correction_integrand(
    m: &dyn FinslerMetric,
    f: &dyn HolomorphicField,
    vol: &VolumeField<'_>,
    chart: usize,
    z: &[C64],
    step: DiffStep,
) -> Result<ExteriorForm> {
    let n = m.dim();
    let needs_curvature = n > 1;
    let potential = |zz: &[C64]| -> Result<ExteriorForm> {
        let tp = transgression_point(m, f, chart, zz, needs_curvature)?;
        let mut s = tp.lambda1.clone();
        for p in tp.psi.iter().skip(1) {
            s.add_scaled(p, c(1.0));
        }
        Ok(s.real_part())
    };
    let mut e = numeric_d(&potential, z, step)?;
    let dlog = vol.log_differential(chart, z, step)?;
    let lam2 = transgression_point(m, f, chart, z, false)?.lambda2.real_part();
    let t = dlog.wedge(&lam2);
    if !t.is_zero() {
        e = e.add_form(&t);
    }
    Ok(e)
}

/// The pieces of the Gauss–Bonnet–Chern integrand at one point.
#[derive(Clone, Debug)]
pub struct GbcIntegrand {
    pub xc_n: ExteriorForm,
    pub correction: ExteriorForm,
    pub vol: f64,
}

impl GbcIntegrand {
    /// `(X*c_n + 𝔈)/vol`.
    pub fn form(&self) -> ExteriorForm {
        self.xc_n.add_form(&self.correction).scale_re(1.0 / self.vol)
    }
}

pub fn gbc_integrand(
    m: &dyn FinslerMetric,
    f: &dyn HolomorphicField,
    vol: &VolumeField<'_>,
    chart: usize,
    z: &[C64],
    step: DiffStep,
) -> Result<GbcIntegrand> {
    let tp = transgression_point(m, f, chart, z, true)?;
    let correction = correction_integrand(m, f, vol, chart, z, step)?;
    Ok(GbcIntegrand { xc_n: tp.xc_n.expect("curvature requested"), correction, vol: vol.value(chart, z)? })
}

/// Residuals of `X*c_n = −dΨ` and of `(X*c_n + 𝔈)/vol = −d(Re Λ₂/vol)`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct TransgressionResidual {
    pub lemma: f64,
    pub boundary: f64,
}

impl TransgressionResidual {
    pub fn max(&self) -> f64 {
        self.lemma.max(self.boundary)
    }
}

pub fn transgression_residual(
    m: &dyn FinslerMetric,
    f: &dyn HolomorphicField,
    vol: &VolumeField<'_>,
    chart: usize,
    z: &[C64],
    step: DiffStep,
) -> Result<TransgressionResidual> {
    let tp = transgression_point(m, f, chart, z, true)?;
    let xc = tp.xc_n.clone().expect("curvature requested");
    let psi = |zz: &[C64]| -> Result<ExteriorForm> { Ok(transgression_point(m, f, chart, zz, true)?.psi_total()) };
    let dpsi = numeric_d(&psi, z, step)?;
    let lemma = xc.add_form(&dpsi).max_abs();
    let gi = gbc_integrand(m, f, vol, chart, z, step)?;
    let boundary = |zz: &[C64]| -> Result<ExteriorForm> {
        let tp = transgression_point(m, f, chart, zz, false)?;
        Ok(tp.lambda2.real_part().scale_re(1.0 / vol.value(chart, zz)?))
    };
    let db = numeric_d(&boundary, z, step)?;
    let boundary = gi.form().add_form(&db).max_abs();
    Ok(TransgressionResidual { lemma, boundary })
}

/// Residuals at `h` and `h/2` with plain central differences, and the observed order.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ResidualDecay {
    pub h: f64,
    pub coarse: TransgressionResidual,
    pub fine: TransgressionResidual,
    pub order: f64,
}

impl ResidualDecay {
    /// Second order, or both residuals already at rounding level.
    pub fn is_second_order(&self, floor: f64) -> bool {
        let (a, b) = (self.coarse.max(), self.fine.max());
        if a < floor && b < floor {
            return true;
        }
        (self.order - 2.0).abs() < 0.3
    }
}

pub fn residual_decay(
    m: &dyn FinslerMetric,
    f: &dyn HolomorphicField,
    vol: &VolumeField<'_>,
    chart: usize,
    z: &[C64],
    h: f64,
) -> Result<ResidualDecay> {
    let coarse = transgression_residual(m, f, vol, chart, z, DiffStep::plain(h))?;
    let fine = transgression_residual(m, f, vol, chart, z, DiffStep::plain(h / 2.0))?;
    let order = (coarse.max() / fine.max()).log2();
    Ok(ResidualDecay { h, coarse, fine, order })
}

/// `max |∂̄Θ − ι(X)X*Ω|` with a numeric `∂̄`.
pub fn theta_dbar_residual(
    m: &dyn FinslerMetric,
    f: &dyn HolomorphicField,
    chart: usize,
    z: &[C64],
    step: DiffStep,
) -> Result<f64> {
    let n = m.dim();
    let field = |zz: &[C64]| -> Result<Vec<ExteriorForm>> {
        let tp = transgression_point(m, f, chart, zz, false)?;
        Ok(tp.theta.iter().flatten().map(|&v| ExteriorForm::scalar(v)).collect())
    };
    let d = numeric_d_split(&field, z, step)?;
    let tp = transgression_point(m, f, chart, z, true)?;
    let xo = tp.x_omega.expect("curvature requested");
    let xv = TangentVector::in_slot(Slot::BaseHolo, &tp.x);
    let mut r = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let rhs = xo.entries[i][j].contract(&xv);
            r = r.max(d.anti[i * n + j].distance(&rhs));
        }
    }
    Ok(r)
}

/// A holomorphic chart change `w = φ(z)` with Jacobian `P = ∂w/∂z`.
pub type ChartMap<'a> = &'a (dyn Fn(&[C64]) -> (Vec<C64>, CMat) + Sync);

#[derive(Clone, Copy, Debug, Serialize)]
pub struct TensorialityCheck {
    /// `max |Θ_b − PΘ_aP⁻¹|`.
    pub theta: f64,
    /// The same for `μ = ∂X/∂z` alone; not tensorial, so this stays large.
    pub mu: f64,
}

pub fn tensoriality_check(
    m: &dyn FinslerMetric,
    f: &dyn HolomorphicField,
    charts: (usize, usize),
    map: ChartMap<'_>,
    z: &[C64],
) -> Result<TensorialityCheck> {
    let (w, p) = map(z);
    let pinv = linalg::inverse(&p).ok_or_else(|| Error::InvalidArgument("singular chart transition".into()))?;
    let a = transgression_point(m, f, charts.0, z, false)?;
    let b = transgression_point(m, f, charts.1, &w, false)?;
    let conj = |t: &CMat| linalg::matmul(&linalg::matmul(&p, t), &pinv);
    Ok(TensorialityCheck {
        theta: linalg::max_abs(&linalg::sub(&b.theta, &conj(&a.theta))),
        mu: linalg::max_abs(&linalg::sub(&b.jac, &conj(&a.jac))),
    })
}

/// `max_k |∂X/∂z̄^k|` from base jets: zero for a holomorphic field.
pub fn holomorphy_residual(f: &dyn HolomorphicField, chart: usize, z: &[C64]) -> Result<f64> {
    let n = f.dim();
    let p = seed(z, &vec![c(1.0); n], 1, &base_vars(n))?;
    let x = f.value_jet(chart, &p.z);
    let mut r = 0.0f64;
    for xi in &x {
        let j = xi.to_jet();
        for k in 0..n {
            r = r.max(j.wirtinger1(Coord::Base(k), false)?.norm());
        }
    }
    Ok(r)
}

/// Nodes on the boundary of a coordinate ball, with positively oriented tangent frames.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, serde::Deserialize)]
pub struct SphereMesh {
    /// Gauss–Legendre nodes in the Hopf angle (unused for `n = 1`).
    pub polar: usize,
    /// Trapezoid nodes per circle angle.
    pub azimuth: usize,
}

#[derive(Clone, Debug)]
pub struct BoundaryNode {
    pub z: Vec<C64>,
    pub tangents: Vec<TangentVector>,
    pub weight: f64,
}

/// Determinant of real vectors given as complex `n`-vectors in `(x¹, y¹, …, xⁿ, yⁿ)` order.
pub fn real_orientation(vs: &[Vec<C64>]) -> f64 {
    let m = vs.len();
    let mut a: Vec<Vec<f64>> = vs.iter().map(|v| v.iter().flat_map(|c| [c.re, c.im]).collect()).collect();
    let mut det = 1.0;
    for k in 0..m {
        let p = (k..m).max_by(|&i, &j| a[i][k].abs().total_cmp(&a[j][k].abs())).unwrap();
        if a[p][k] == 0.0 {
            return 0.0;
        }
        if p != k {
            a.swap(p, k);
            det = -det;
        }
        det *= a[k][k];
        for i in k + 1..m {
            let f = a[i][k] / a[k][k];
            for j in k..m {
                a[i][j] -= f * a[k][j];
            }
        }
    }
    det
}

/// `∂B_ε(ζ)` with the outward-normal-first orientation.
pub fn sphere_nodes(center: &[C64], eps: f64, mesh: SphereMesh) -> Result<Vec<BoundaryNode>> {
    let n = center.len();
    let ang = periodic_trapezoid(mesh.azimuth, 2.0 * PI, 0.5);
    let mut out = Vec::new();
    let mut push = |u: Vec<C64>, mut tangents: Vec<Vec<C64>>, weight: f64| {
        let mut frame = vec![u.clone()];
        frame.extend(tangents.iter().cloned());
        if real_orientation(&frame) < 0.0 {
            let last = tangents.last_mut().unwrap();
            for v in last.iter_mut() {
                *v = -*v;
            }
        }
        out.push(BoundaryNode {
            z: center.iter().zip(&u).map(|(a, b)| a + b).collect(),
            tangents: tangents.iter().map(|t| TangentVector::real_base(t)).collect(),
            weight,
        });
    };
    match n {
        1 => {
            for &(t, w) in &ang {
                let u = C64::from_polar(eps, t);
                push(vec![u], vec![vec![u * C64::i()]], w);
            }
        }
        2 => {
            for &(a, wa) in &gauss_legendre(mesh.polar, 0.0, PI / 2.0) {
                let (s, co) = a.sin_cos();
                for &(t1, w1) in &ang {
                    for &(t2, w2) in &ang {
                        let e1 = C64::from_polar(1.0, t1);
                        let e2 = C64::from_polar(1.0, t2);
                        let u = vec![e1 * (eps * co), e2 * (eps * s)];
                        let d1 = vec![u[0] * C64::i(), c(0.0)];
                        let da = vec![e1 * (-eps * s), e2 * (eps * co)];
                        let d2 = vec![c(0.0), u[1] * C64::i()];
                        push(u, vec![d1, da, d2], wa * w1 * w2);
                    }
                }
            }
        }
        _ => return Err(Error::Dimension(format!("boundary spheres are implemented for n ≤ 2, got {n}"))),
    }
    Ok(out)
}

/// `∫_{∂B_ε(ζ)} Re Λ₂ / vol` in the zero's designated chart.
pub fn boundary_degree(
    m: &dyn FinslerMetric,
    f: &dyn HolomorphicField,
    vol: &VolumeField<'_>,
    zero: &FieldZero,
    eps: f64,
    mesh: SphereMesh,
) -> Result<f64> {
    if !(eps > 0.0) {
        return Err(Error::InvalidArgument(format!("ε must be positive, got {eps}")));
    }
    let center = zero.point();
    for other in f.zeros() {
        if other.chart != zero.chart || other == *zero {
            continue;
        }
        let d: f64 = other.point().iter().zip(&center).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
        if d <= eps {
            return Err(Error::InvalidArgument(format!(
                "ε = {eps} ball around {:?} contains the zero {:?}",
                zero.z, other.z
            )));
        }
    }
    let nodes = sphere_nodes(&center, eps, mesh)?;
    let vals = nodes
        .iter()
        .map(|nd| -> Result<f64> {
            let tp = transgression_point(m, f, zero.chart, &nd.z, false)?;
            let v = tp.lambda2.real_part().evaluate(&nd.tangents)?.re;
            Ok(v * nd.weight / vol.value(zero.chart, &nd.z)?)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(neumaier_sum(vals))
}

/// One zero's boundary integrals over a shrinking `ε` schedule and their extrapolation.
#[derive(Clone, Debug, Serialize)]
pub struct DegreeTable {
    pub chart: usize,
    pub zero: Vec<[f64; 2]>,
    pub eps: Vec<f64>,
    pub values: Vec<f64>,
    pub extrapolated: Estimate,
}

pub fn degree_table(
    m: &dyn FinslerMetric,
    f: &dyn HolomorphicField,
    vol: &VolumeField<'_>,
    zero: &FieldZero,
    schedule: &[f64],
    mesh: SphereMesh,
) -> Result<DegreeTable> {
    let values = schedule
        .iter()
        .map(|&e| boundary_degree(m, f, vol, zero, e, mesh))
        .collect::<Result<Vec<f64>>>()?;
    let samples: Vec<(f64, f64)> = schedule.iter().copied().zip(values.iter().copied()).collect();
    Ok(DegreeTable {
        chart: zero.chart,
        zero: zero.z.clone(),
        eps: schedule.to_vec(),
        values,
        extrapolated: richardson(&samples, 1),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::DiagonalPolynomialField;
    use crate::metric::{FlatHermitian, FubiniStudy};
    use crate::volume::SphereRule;

    #[test]
    fn flat_euler_field() {
        let m = FlatHermitian { n: 1 };
        let f = DiagonalPolynomialField::euler_plane(1);
        let z = C64::new(0.4, -0.3);
        let tp = transgression_point(&m, &f, 0, &[z], true).unwrap();
        assert!((tp.omega_x.coefficient(&[crate::forms::CovectorLabel::new(Slot::BaseHolo, 0)]) - 1.0 / z).norm() < 1e-14);
        assert!((tp.theta[0][0] + 1.0).norm() < 1e-14);
        assert!(tp.lambda1.is_zero());
        let rule = SphereRule::default_for(1).unwrap();
        let vol = VolumeField::new(&m, rule);
        let zero = &f.zeros()[0];
        let v = boundary_degree(&m, &f, &vol, zero, 0.3, SphereMesh { polar: 1, azimuth: 16 }).unwrap();
        assert!((v - 1.0 / (2.0 * PI)).abs() < 1e-13);
    }

    #[test]
    fn fubini_study_transgression() {
        let m = FubiniStudy { conformal: 0.0 };
        let f = DiagonalPolynomialField::euler_projective(1);
        let vol = VolumeField::new(&m, SphereRule::default_for(1).unwrap());
        let r = transgression_residual(&m, &f, &vol, 0, &[C64::new(0.5, 0.0)], DiffStep::default()).unwrap();
        assert!(r.max() < 1e-6, "{r:?}");
        let z = [C64::from_polar(1.0, 0.3)];
        let map = |z: &[C64]| (vec![1.0 / z[0]], vec![vec![-1.0 / (z[0] * z[0])]]);
        let t = tensoriality_check(&m, &f, (0, 1), &map, &z).unwrap();
        assert!(t.theta < 1e-8 && t.mu > 1.0);
    }

    #[test]
    fn orientation_of_sphere_frames() {
        let nodes = sphere_nodes(&[c(0.0), c(0.0)], 0.5, SphereMesh { polar: 3, azimuth: 3 }).unwrap();
        let area: f64 = nodes.iter().map(|n| n.weight).sum();
        // Σ w = ∫ dα dθ1 dθ2 = π/2·4π²; the metric factor lives in the tangents
        assert!((area - PI.powi(3) * 2.0).abs() < 1e-9);
    }
}
