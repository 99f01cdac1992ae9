//! Complex Finsler metrics `G = F²` and their fiberwise tensors.

use std::fmt;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::jet::{fiber_vars, seed, wirtinger, Coord, Cx, Jet, JetPoint, Scalar};
use crate::linalg::{self, CMat};

type C64 = Complex64;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct MetricFlags {
    pub hermitian: bool,
    pub locally_minkowski: bool,
    pub berwald: bool,
}

/// Fiber directions where the fundamental tensor may degenerate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum DegeneracyLocus {
    Empty,
    /// `ξ^i = 0` for some `i`.
    CoordinateAxes,
}

impl DegeneracyLocus {
    /// Relative distance of `ξ` from the locus (infinite when empty).
    pub fn distance(&self, xi: &[C64]) -> f64 {
        match self {
            DegeneracyLocus::Empty => f64::INFINITY,
            DegeneracyLocus::CoordinateAxes => {
                let norm = xi.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
                xi.iter().map(|x| x.norm()).fold(f64::INFINITY, f64::min) / norm
            }
        }
    }

    pub fn contains(&self, xi: &[C64], tol: f64) -> bool {
        self.distance(xi) < tol
    }
}

/// A metric written once over any real scalar type (plain values or jets).
pub trait MetricFormula: Send + Sync + fmt::Debug {
    fn name(&self) -> String;
    fn dim(&self) -> usize;
    fn flags(&self) -> MetricFlags;
    fn locus(&self) -> DegeneracyLocus {
        DegeneracyLocus::Empty
    }
    fn g<S: Scalar>(&self, chart: usize, z: &[Cx<S>], xi: &[Cx<S>]) -> S;
}

/// Object-safe view of a metric.
pub trait FinslerMetric: Send + Sync + fmt::Debug {
    fn name(&self) -> String;
    fn dim(&self) -> usize;
    fn flags(&self) -> MetricFlags;
    fn locus(&self) -> DegeneracyLocus;
    fn g_value(&self, chart: usize, z: &[C64], xi: &[C64]) -> f64;
    fn g_jet(&self, chart: usize, p: &JetPoint) -> Jet<f64>;
    fn g_jet_at(&self, chart: usize, z: &[Cx<Jet<f64>>], xi: &[Cx<Jet<f64>>]) -> Jet<f64>;
}

fn lift(v: &[C64]) -> Vec<Cx<f64>> {
    v.iter().map(|c| Cx::new(c.re, c.im)).collect()
}

impl<M: MetricFormula> FinslerMetric for M {
    fn name(&self) -> String {
        MetricFormula::name(self)
    }
    fn dim(&self) -> usize {
        MetricFormula::dim(self)
    }
    fn flags(&self) -> MetricFlags {
        MetricFormula::flags(self)
    }
    fn locus(&self) -> DegeneracyLocus {
        MetricFormula::locus(self)
    }
    fn g_value(&self, chart: usize, z: &[C64], xi: &[C64]) -> f64 {
        self.g(chart, &lift(z), &lift(xi))
    }
    fn g_jet(&self, chart: usize, p: &JetPoint) -> Jet<f64> {
        self.g(chart, &p.z, &p.xi)
    }
    fn g_jet_at(&self, chart: usize, z: &[Cx<Jet<f64>>], xi: &[Cx<Jet<f64>>]) -> Jet<f64> {
        self.g(chart, z, xi)
    }
}

fn sum_abs2<S: Scalar>(v: &[Cx<S>]) -> S {
    let mut acc = v[0].abs2();
    for x in &v[1..] {
        acc = acc + x.abs2();
    }
    acc
}

/// `p(z) = (1 − |z|²)/(1 + |z|²)`; `p²` is invariant under `z ↦ 1/z`.
fn height<S: Scalar>(z: &Cx<S>) -> S {
    let r = z.abs2();
    (r.clone() * -1.0 + 1.0) / (r + 1.0)
}

/// `Σ|ξ^i|²` on `ℂⁿ` (or any torus quotient).
#[derive(Clone, Debug)]
pub struct FlatHermitian {
    pub n: usize,
}

impl MetricFormula for FlatHermitian {
    fn name(&self) -> String {
        "flat-hermitian".into()
    }
    fn dim(&self) -> usize {
        self.n
    }
    fn flags(&self) -> MetricFlags {
        MetricFlags { hermitian: true, locally_minkowski: true, berwald: true }
    }
    fn g<S: Scalar>(&self, _: usize, _: &[Cx<S>], xi: &[Cx<S>]) -> S {
        sum_abs2(xi)
    }
}

/// Fubini–Study on `CP¹` in either affine chart, optionally rescaled by `e^{c p(z)²}`.
#[derive(Clone, Debug)]
pub struct FubiniStudy {
    pub conformal: f64,
}

impl MetricFormula for FubiniStudy {
    fn name(&self) -> String {
        if self.conformal == 0.0 {
            "fubini-study".into()
        } else {
            format!("conformal-fubini-study({})", self.conformal)
        }
    }
    fn dim(&self) -> usize {
        1
    }
    fn flags(&self) -> MetricFlags {
        MetricFlags { hermitian: true, locally_minkowski: false, berwald: true }
    }
    fn g<S: Scalar>(&self, _: usize, z: &[Cx<S>], xi: &[Cx<S>]) -> S {
        let d = z[0].abs2() + 1.0;
        let base = xi[0].abs2() / (d.clone() * d);
        if self.conformal == 0.0 {
            return base;
        }
        let p = height(&z[0]);
        base * (p.clone() * p * self.conformal).exp()
    }
}

/// `(|ξ¹|⁴ + |ξ²|⁴)^{1/2}`: locally Minkowski, degenerate on the fiber axes.
#[derive(Clone, Debug)]
pub struct QuarticMinkowski;

impl MetricFormula for QuarticMinkowski {
    fn name(&self) -> String {
        "quartic-minkowski".into()
    }
    fn dim(&self) -> usize {
        2
    }
    fn flags(&self) -> MetricFlags {
        MetricFlags { hermitian: false, locally_minkowski: true, berwald: true }
    }
    fn locus(&self) -> DegeneracyLocus {
        DegeneracyLocus::CoordinateAxes
    }
    fn g<S: Scalar>(&self, _: usize, _: &[Cx<S>], xi: &[Cx<S>]) -> S {
        let a = xi[0].abs2();
        let b = xi[1].abs2();
        (a.clone() * a + b.clone() * b).sqrt()
    }
}

/// `((|ξ¹|² + |ξ²|²)² + λ(|ξ¹|⁴ + |ξ²|⁴))^{1/2}`.
#[derive(Clone, Debug)]
pub struct QuarticBlend {
    pub lambda: f64,
}

impl MetricFormula for QuarticBlend {
    fn name(&self) -> String {
        format!("quartic-blend({})", self.lambda)
    }
    fn dim(&self) -> usize {
        2
    }
    fn flags(&self) -> MetricFlags {
        MetricFlags { hermitian: self.lambda == 0.0, locally_minkowski: true, berwald: true }
    }
    fn g<S: Scalar>(&self, _: usize, _: &[Cx<S>], xi: &[Cx<S>]) -> S {
        let a = xi[0].abs2();
        let b = xi[1].abs2();
        let s = a.clone() + b.clone();
        (s.clone() * s + (a.clone() * a + b.clone() * b) * self.lambda).sqrt()
    }
}

/// Product Fubini–Study on `CP¹×CP¹` blended with a position-dependent quartic term:
/// `G = ((A+B)² + λβ(z)(A²+B²))^{1/2}`, `A = |ξ¹|²/(1+|z¹|²)²`, `B` likewise,
/// `β = 1 + p(z¹)² + p(z²)²`. The same formula holds in all four affine charts.
#[derive(Clone, Debug)]
pub struct FsProductBlend {
    pub lambda: f64,
}

impl MetricFormula for FsProductBlend {
    fn name(&self) -> String {
        format!("fs-product-blend({})", self.lambda)
    }
    fn dim(&self) -> usize {
        2
    }
    fn flags(&self) -> MetricFlags {
        let h = self.lambda == 0.0;
        MetricFlags { hermitian: h, locally_minkowski: false, berwald: h }
    }
    fn g<S: Scalar>(&self, _: usize, z: &[Cx<S>], xi: &[Cx<S>]) -> S {
        let d1 = z[0].abs2() + 1.0;
        let d2 = z[1].abs2() + 1.0;
        let a = xi[0].abs2() / (d1.clone() * d1);
        let b = xi[1].abs2() / (d2.clone() * d2);
        let s = a.clone() + b.clone();
        if self.lambda == 0.0 {
            return s;
        }
        let p1 = height(&z[0]);
        let p2 = height(&z[1]);
        let beta = p1.clone() * p1 + p2.clone() * p2 + 1.0;
        (s.clone() * s + (a.clone() * a + b.clone() * b) * beta * self.lambda).sqrt()
    }
}

/// `c²·G`, i.e. `F ↦ cF`.
#[derive(Clone, Debug)]
pub struct Scaled<M> {
    pub inner: M,
    pub c: f64,
}

impl<M: MetricFormula> MetricFormula for Scaled<M> {
    fn name(&self) -> String {
        format!("{}*{}", self.c, self.inner.name())
    }
    fn dim(&self) -> usize {
        self.inner.dim()
    }
    fn flags(&self) -> MetricFlags {
        self.inner.flags()
    }
    fn locus(&self) -> DegeneracyLocus {
        self.inner.locus()
    }
    fn g<S: Scalar>(&self, chart: usize, z: &[Cx<S>], xi: &[Cx<S>]) -> S {
        self.inner.g(chart, z, xi) * (self.c * self.c)
    }
}

fn apply<S: Scalar>(m: &CMat, v: &[Cx<S>]) -> Vec<Cx<S>> {
    m.iter()
        .map(|row| {
            let mut acc = v[0].mul_c64(row[0]);
            for (x, &a) in v[1..].iter().zip(&row[1..]) {
                acc = acc + x.mul_c64(a);
            }
            acc
        })
        .collect()
}

/// The metric in linearly changed coordinates: `G'(w, η) = G(Aw, Aη)` with `A` constant.
/// With `A` unitary this is a change of unitary fiber frame.
#[derive(Clone, Debug)]
pub struct LinearChange<M> {
    pub inner: M,
    pub a: CMat,
    pub change_base: bool,
}

impl<M: MetricFormula> MetricFormula for LinearChange<M> {
    fn name(&self) -> String {
        format!("linear-change({})", self.inner.name())
    }
    fn dim(&self) -> usize {
        self.inner.dim()
    }
    fn flags(&self) -> MetricFlags {
        self.inner.flags()
    }
    fn locus(&self) -> DegeneracyLocus {
        DegeneracyLocus::Empty
    }
    fn g<S: Scalar>(&self, chart: usize, z: &[Cx<S>], xi: &[Cx<S>]) -> S {
        let zz = if self.change_base { apply(&self.a, z) } else { z.to_vec() };
        self.inner.g(chart, &zz, &apply(&self.a, xi))
    }
}

/// Parse a builtin metric name such as `quartic-blend(0.5)`; `lambda` fills a missing
/// parameter.
pub fn builtin_metric(name: &str, lambda: Option<f64>, n: usize) -> Result<Box<dyn FinslerMetric>> {
    let (base, arg) = match name.find('(') {
        Some(p) if name.ends_with(')') => {
            let v: f64 = name[p + 1..name.len() - 1]
                .trim()
                .parse()
                .map_err(|_| Error::InvalidArgument(format!("bad metric parameter in `{name}`")))?;
            (&name[..p], Some(v))
        }
        _ => (name, None),
    };
    let param = arg.or(lambda);
    let need = |d: usize| -> Result<()> {
        if n != d {
            return Err(Error::InvalidArgument(format!("metric `{base}` needs dimension {d}, got {n}")));
        }
        Ok(())
    };
    let m: Box<dyn FinslerMetric> = match base {
        "flat-hermitian" => Box::new(FlatHermitian { n }),
        "fubini-study" => {
            need(1)?;
            Box::new(FubiniStudy { conformal: 0.0 })
        }
        "conformal-fubini-study" => {
            need(1)?;
            Box::new(FubiniStudy { conformal: param.unwrap_or(0.5) })
        }
        "quartic-minkowski" => {
            need(2)?;
            Box::new(QuarticMinkowski)
        }
        "quartic-blend" => {
            need(2)?;
            Box::new(QuarticBlend { lambda: param.unwrap_or(1.0) })
        }
        "fs-product-blend" => {
            need(2)?;
            Box::new(FsProductBlend { lambda: param.unwrap_or(0.0) })
        }
        other => return Err(Error::InvalidArgument(format!("unknown metric `{other}`"))),
    };
    if let Some(l) = param {
        if l < 0.0 {
            return Err(Error::InvalidArgument(format!("metric parameter must be >= 0, got {l}")));
        }
    }
    Ok(m)
}

pub const BUILTIN_METRICS: &[&str] = &[
    "flat-hermitian",
    "fubini-study",
    "conformal-fubini-study",
    "quartic-minkowski",
    "quartic-blend",
    "fs-product-blend",
];

pub(crate) fn describe_point(chart: usize, z: &[C64], xi: &[C64]) -> String {
    let f = |v: &[C64]| {
        v.iter().map(|c| format!("{:.6}{:+.6}i", c.re, c.im)).collect::<Vec<_>>().join(", ")
    };
    format!("chart {chart}, z=({}), xi=({})", f(z), f(xi))
}

/// Fiber tensors at one point.
#[derive(Clone, Debug)]
pub struct MetricTensors {
    pub g: f64,
    pub gi: Vec<C64>,
    /// `G_{ij}` (both holomorphic).
    pub gij: CMat,
    /// `h[i][j] = G_{ij̄}`.
    pub h: CMat,
    /// `hinv[i][j] = G^{ij̄}`, so `Σ_j G^{ij̄} G_{kj̄} = δ^i_k`.
    pub hinv: CMat,
    /// `g3[i][j][k] = G_{ij̄k}`.
    pub g3: Vec<CMat>,
    /// `g_hhh[i][j][k] = G_{ijk}`.
    pub g_hhh: Vec<CMat>,
    /// `g_hha[i][j][k] = G_{ijk̄}`.
    pub g_hha: Vec<CMat>,
    /// `cartan[k][i][j] = C^k_{ij}`.
    pub cartan: Vec<CMat>,
    pub min_eigenvalue: f64,
}

fn check_point(m: &dyn FinslerMetric, z: &[C64], xi: &[C64]) -> Result<()> {
    let n = m.dim();
    if z.len() != n || xi.len() != n {
        return Err(Error::Dimension(format!(
            "metric of dimension {n} evaluated at z of length {} and xi of length {}",
            z.len(),
            xi.len()
        )));
    }
    Ok(())
}

/// Fiber Hessian `G_{ij̄}` without any invertibility requirement.
pub fn fiber_hessian(m: &dyn FinslerMetric, chart: usize, z: &[C64], xi: &[C64]) -> Result<CMat> {
    check_point(m, z, xi)?;
    let n = m.dim();
    let p = seed(z, xi, 2, &fiber_vars(n))?;
    let g = m.g_jet(chart, &p);
    let mut h = linalg::zeros(n);
    for i in 0..n {
        for j in 0..n {
            h[i][j] = wirtinger(&g, &[Coord::Fiber(i)], &[Coord::Fiber(j)])?;
        }
    }
    Ok(h)
}

/// Relative singularity test for the fundamental tensor.
pub(crate) fn is_singular(h: &CMat) -> bool {
    let n = h.len() as i32;
    let scale = linalg::max_abs(h).powi(n);
    let d = linalg::det(h).norm();
    !(scale > 0.0) || d < 1e-12 * scale
}

pub fn metric_tensors(m: &dyn FinslerMetric, chart: usize, z: &[C64], xi: &[C64]) -> Result<MetricTensors> {
    check_point(m, z, xi)?;
    let n = m.dim();
    let p = seed(z, xi, 3, &fiber_vars(n))?;
    let gj = m.g_jet(chart, &p);
    let f = Coord::Fiber;
    let w = |hol: &[Coord], anti: &[Coord]| wirtinger(&gj, hol, anti);
    let mut h = linalg::zeros(n);
    let mut gij = linalg::zeros(n);
    let mut gi = vec![C64::default(); n];
    let mut g3 = vec![linalg::zeros(n); n];
    let mut g_hhh = vec![linalg::zeros(n); n];
    let mut g_hha = vec![linalg::zeros(n); n];
    for i in 0..n {
        gi[i] = w(&[f(i)], &[])?;
        for j in 0..n {
            h[i][j] = w(&[f(i)], &[f(j)])?;
            gij[i][j] = w(&[f(i), f(j)], &[])?;
            for k in 0..n {
                g3[i][j][k] = w(&[f(i), f(k)], &[f(j)])?;
                g_hhh[i][j][k] = w(&[f(i), f(j), f(k)], &[])?;
                g_hha[i][j][k] = w(&[f(i), f(j)], &[f(k)])?;
            }
        }
    }
    if is_singular(&h) {
        return Err(Error::Degenerate(describe_point(chart, z, xi)));
    }
    let ht = linalg::transpose(&h);
    let hinv = linalg::inverse(&ht).ok_or_else(|| Error::Degenerate(describe_point(chart, z, xi)))?;
    let mut cartan = vec![linalg::zeros(n); n];
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                cartan[k][i][j] = (0..n).map(|l| hinv[k][l] * g3[i][l][j]).sum();
            }
        }
    }
    let min_eigenvalue = linalg::hermitian_eigenvalues(&h)[0];
    Ok(MetricTensors {
        g: gj.value(),
        gi,
        gij,
        h,
        hinv,
        g3,
        g_hhh,
        g_hha,
        cartan,
        min_eigenvalue,
    })
}

/// Absolute residuals of the homogeneity identities.
#[derive(Clone, Debug, Serialize)]
pub struct HomogeneityReport {
    pub conjugate_symmetry: f64,
    pub inverse: f64,
    pub g_from_hessian: f64,
    pub euler_first: f64,
    pub hessian_contraction: f64,
    pub holo_hessian_kernel: f64,
    pub third_holo: f64,
    pub third_mixed_anti: f64,
    pub third_mixed_kernel: f64,
}

impl HomogeneityReport {
    pub fn entries(&self) -> [(&'static str, f64); 9] {
        [
            ("conjugate_symmetry", self.conjugate_symmetry),
            ("inverse", self.inverse),
            ("g_from_hessian", self.g_from_hessian),
            ("euler_first", self.euler_first),
            ("hessian_contraction", self.hessian_contraction),
            ("holo_hessian_kernel", self.holo_hessian_kernel),
            ("third_holo", self.third_holo),
            ("third_mixed_anti", self.third_mixed_anti),
            ("third_mixed_kernel", self.third_mixed_kernel),
        ]
    }

    pub fn max(&self) -> f64 {
        self.entries().iter().map(|e| e.1).fold(0.0, f64::max)
    }
}

pub fn homogeneity_from_tensors(t: &MetricTensors, xi: &[C64]) -> HomogeneityReport {
    let n = xi.len();
    let mut r = [0.0f64; 9];
    let upd = |slot: &mut f64, v: C64| *slot = slot.max(v.norm());
    for i in 0..n {
        for j in 0..n {
            upd(&mut r[0], t.h[i][j].conj() - t.h[j][i]);
            let d = if i == j { 1.0 } else { 0.0 };
            let a: C64 = (0..n).map(|l| t.hinv[i][l] * t.h[j][l]).sum();
            let b: C64 = (0..n).map(|l| t.hinv[l][i] * t.h[l][j]).sum();
            upd(&mut r[1], a - d);
            upd(&mut r[1], b - d);
        }
    }
    let g_h: C64 = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .map(|(i, j)| t.h[i][j] * xi[i] * xi[j].conj())
        .sum();
    upd(&mut r[2], g_h - t.g);
    let e: C64 = (0..n).map(|i| t.gi[i] * xi[i]).sum();
    upd(&mut r[3], e - t.g);
    for i in 0..n {
        let s: C64 = (0..n).map(|j| t.h[i][j] * xi[j].conj()).sum();
        upd(&mut r[4], s - t.gi[i]);
        let s: C64 = (0..n).map(|j| t.gij[i][j] * xi[j]).sum();
        upd(&mut r[5], s);
        for j in 0..n {
            let s: C64 = (0..n).map(|k| t.g_hhh[i][j][k] * xi[k]).sum();
            upd(&mut r[6], s + t.gij[i][j]);
            let s: C64 = (0..n).map(|k| t.g_hha[i][j][k] * xi[k].conj()).sum();
            upd(&mut r[7], s - t.gij[i][j]);
            let s: C64 = (0..n).map(|k| t.g3[i][j][k] * xi[k]).sum();
            upd(&mut r[8], s);
        }
    }
    HomogeneityReport {
        conjugate_symmetry: r[0],
        inverse: r[1],
        g_from_hessian: r[2],
        euler_first: r[3],
        hessian_contraction: r[4],
        holo_hessian_kernel: r[5],
        third_holo: r[6],
        third_mixed_anti: r[7],
        third_mixed_kernel: r[8],
    }
}

pub fn homogeneity_report(
    m: &dyn FinslerMetric,
    chart: usize,
    z: &[C64],
    xi: &[C64],
) -> Result<HomogeneityReport> {
    let t = metric_tensors(m, chart, z, xi)?;
    Ok(homogeneity_from_tensors(&t, xi))
}

pub fn cartan_norm(m: &dyn FinslerMetric, chart: usize, z: &[C64], xi: &[C64]) -> Result<f64> {
    let t = metric_tensors(m, chart, z, xi)?;
    Ok(t.cartan.iter().map(linalg::max_abs).fold(0.0, f64::max))
}

#[derive(Clone, Debug, Serialize)]
pub struct ScanReport {
    pub min_eigenvalue: f64,
    pub worst_xi: Vec<[f64; 2]>,
    pub samples: usize,
    /// Sampled directions lying on the declared degeneracy locus.
    pub locus_warnings: Vec<Vec<[f64; 2]>>,
}

/// Uniform point on the unit sphere of `ℂⁿ`.
pub fn random_unit(rng: &mut ChaCha8Rng, n: usize) -> Vec<C64> {
    let v: Vec<C64> = (0..n)
        .map(|_| C64::new(StandardNormal.sample(rng), StandardNormal.sample(rng)))
        .collect();
    let norm = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|c| c / norm).collect()
}

fn pairs(v: &[C64]) -> Vec<[f64; 2]> {
    v.iter().map(|c| [c.re, c.im]).collect()
}

/// Minimum eigenvalue of `G_{ij̄}` over the given fiber directions.
pub fn pseudoconvexity_at(
    m: &dyn FinslerMetric,
    chart: usize,
    z: &[C64],
    directions: &[Vec<C64>],
) -> Result<ScanReport> {
    let mut min = f64::INFINITY;
    let mut worst = Vec::new();
    let mut warnings = Vec::new();
    for xi in directions {
        if m.locus().contains(xi, 1e-12) {
            warnings.push(pairs(xi));
        }
        let h = fiber_hessian(m, chart, z, xi)?;
        let ev = linalg::hermitian_eigenvalues(&h)[0];
        if ev < min {
            min = ev;
            worst = pairs(xi);
        }
    }
    Ok(ScanReport { min_eigenvalue: min, worst_xi: worst, samples: directions.len(), locus_warnings: warnings })
}

/// Seeded scan of unit fiber directions away from the degeneracy locus.
pub fn pseudoconvexity_scan(
    m: &dyn FinslerMetric,
    chart: usize,
    z: &[C64],
    count: usize,
    seed_value: u64,
) -> Result<ScanReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed_value);
    let mut dirs = Vec::with_capacity(count);
    while dirs.len() < count {
        let xi = random_unit(&mut rng, m.dim());
        if m.locus().contains(&xi, 1e-3) {
            continue;
        }
        dirs.push(xi);
    }
    pseudoconvexity_at(m, chart, z, &dirs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn quartic_tensor_values() {
        let m = QuarticMinkowski;
        let z = [c(0.0, 0.0); 2];
        let t = metric_tensors(&m, 0, &z, &[c(1.0, 0.0), c(1.0, 0.0)]).unwrap();
        assert!((t.h[0][0] - 3.0 * 2f64.sqrt() / 4.0).norm() < 1e-14);
        assert!(t.cartan.iter().map(linalg::max_abs).fold(0.0, f64::max) > 0.1);
        let h = fiber_hessian(&m, 0, &z, &[c(1.0, 0.0), c(0.0, 0.0)]).unwrap();
        assert!(h[1][1].norm() < 1e-14);
        let err = metric_tensors(&m, 0, &z, &[c(1.0, 0.0), c(0.0, 0.0)]).unwrap_err();
        assert!(matches!(err, Error::Degenerate(_)));
    }

    #[test]
    fn flat_is_hermitian_identity() {
        let m = FlatHermitian { n: 2 };
        let t = metric_tensors(&m, 0, &[c(0.3, 0.1), c(0.0, 1.0)], &[c(0.2, -1.0), c(0.7, 0.4)]).unwrap();
        assert!(linalg::max_abs(&linalg::sub(&t.h, &linalg::identity(2))) < 1e-14);
        assert!(t.cartan.iter().map(linalg::max_abs).fold(0.0, f64::max) < 1e-14);
        assert!((t.min_eigenvalue - 1.0).abs() < 1e-12);
    }

    #[test]
    fn broken_homogeneity_is_flagged() {
        #[derive(Debug)]
        struct Broken;
        impl MetricFormula for Broken {
            fn name(&self) -> String {
                "broken".into()
            }
            fn dim(&self) -> usize {
                1
            }
            fn flags(&self) -> MetricFlags {
                MetricFlags::default()
            }
            fn g<S: Scalar>(&self, _: usize, _: &[Cx<S>], xi: &[Cx<S>]) -> S {
                xi[0].abs2() + xi[0].re.clone()
            }
        }
        let r = homogeneity_report(&Broken, 0, &[c(0.0, 0.0)], &[c(0.5, 0.5)]).unwrap();
        assert!(r.max() > 0.1);
    }

    #[test]
    fn builtin_names_parse() {
        assert_eq!(builtin_metric("quartic-blend(0.5)", None, 2).unwrap().name(), "quartic-blend(0.5)");
        assert!(builtin_metric("fubini-study", None, 2).is_err());
        assert!(builtin_metric("nope", None, 1).is_err());
    }
}
