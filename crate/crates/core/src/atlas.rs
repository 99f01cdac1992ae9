//! Built-in compact manifolds, their integration covers and ball excision around zeros.
//!
//! Covers: a torus is one fundamental box; `CP¹` is the two closed unit disks of its affine
//! charts; `CP¹×CP¹` is the four closed unit bidisks. Every zero sits at the origin of its
//! designated chart, which is also the pole of that chart's polar (or hyperspherical)
//! parametrization, so `M_ε` is covered exactly.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{FieldZero, HolomorphicField};
use crate::forms::{integrate_nodes, ExteriorForm, PatchNode, TangentVector};
use crate::jet::{base_vars, seed, wirtinger, Coord};
use crate::linalg::{self, CMat};
use crate::metric::FinslerMetric;
use crate::quadrature::{gauss_legendre, periodic_trapezoid, richardson, Estimate};
use crate::transgression::real_orientation;
use crate::volume::VolumeField;

type C64 = Complex64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ManifoldKind {
    /// `ℂ/(ℤ + iℤ)`.
    FlatTorus,
    /// `T × T`.
    TorusProduct,
    Cp1,
    Cp1xCp1,
    /// `ℂⁿ`, not compact: only local computations.
    Plane(usize),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Manifold {
    pub name: String,
    pub kind: ManifoldKind,
    pub n: usize,
    pub charts: usize,
    /// Euler characteristic, stored rather than computed.
    pub chi: Option<i64>,
}

pub const BUILTIN_MANIFOLDS: &[&str] = &["flat-torus", "torus-product", "cp1", "cp1xcp1", "c1", "c2"];

impl Manifold {
    pub fn builtin(name: &str) -> Result<Manifold> {
        let (kind, n, charts, chi) = match name {
            "flat-torus" => (ManifoldKind::FlatTorus, 1, 1, Some(0)),
            "torus-product" => (ManifoldKind::TorusProduct, 2, 1, Some(0)),
            "cp1" => (ManifoldKind::Cp1, 1, 2, Some(2)),
            "cp1xcp1" => (ManifoldKind::Cp1xCp1, 2, 4, Some(4)),
            "c1" => (ManifoldKind::Plane(1), 1, 1, None),
            "c2" => (ManifoldKind::Plane(2), 2, 1, None),
            other => return Err(Error::InvalidArgument(format!("unknown manifold `{other}`"))),
        };
        Ok(Manifold { name: name.into(), kind, n, charts, chi })
    }

    pub fn is_compact(&self) -> bool {
        !matches!(self.kind, ManifoldKind::Plane(_))
    }

    /// `(w, ∂w/∂z)` for a point of chart `from` seen in chart `to`; `None` off the overlap.
    pub fn transition(&self, from: usize, to: usize, z: &[C64]) -> Option<(Vec<C64>, CMat)> {
        match self.kind {
            ManifoldKind::Cp1 | ManifoldKind::Cp1xCp1 => {
                let mut w = z.to_vec();
                let mut p = linalg::identity(self.n);
                for i in 0..self.n {
                    if (from ^ to) >> i & 1 == 1 {
                        if z[i].norm() == 0.0 {
                            return None;
                        }
                        w[i] = 1.0 / z[i];
                        p[i][i] = -1.0 / (z[i] * z[i]);
                    }
                }
                Some((w, p))
            }
            _ if from == to => Some((z.to_vec(), linalg::identity(self.n))),
            _ => None,
        }
    }
}

/// Quadrature resolution for chart patches.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, serde::Deserialize)]
pub struct Mesh {
    /// Gauss–Legendre nodes per radial (and Hopf-angle) interval; nodes per real
    /// coordinate on a torus.
    pub radial: usize,
    /// Trapezoid nodes per circle angle.
    pub angular: usize,
}

impl Mesh {
    /// Half the radial resolution, used for the quadrature error estimate.
    pub fn coarser(&self) -> Mesh {
        Mesh { radial: (self.radial / 2).max(2), angular: self.angular }
    }

    pub fn refined(&self) -> Mesh {
        Mesh { radial: self.radial * 2, angular: self.angular }
    }
}

fn oriented(chart_z: Vec<C64>, mut tangents: Vec<Vec<C64>>, weight: f64) -> PatchNode {
    if real_orientation(&tangents) < 0.0 {
        for v in tangents.last_mut().unwrap().iter_mut() {
            *v = -*v;
        }
    }
    PatchNode { z: chart_z, tangents: tangents.iter().map(|t| TangentVector::real_base(t)).collect(), weight }
}

/// `[0,1]^{2n}` with the periodic trapezoid rule.
pub fn box_nodes(n: usize, count: usize) -> Vec<PatchNode> {
    let t = periodic_trapezoid(count, 1.0, 0.5);
    let mut out = Vec::new();
    let total = count.pow(2 * n as u32);
    for idx in 0..total {
        let mut rem = idx;
        let mut z = vec![C64::new(0.0, 0.0); n];
        let mut w = 1.0;
        for zi in z.iter_mut() {
            let (x, wx) = t[rem % count];
            rem /= count;
            let (y, wy) = t[rem % count];
            rem /= count;
            *zi = C64::new(x, y);
            w *= wx * wy;
        }
        let mut tangents = Vec::new();
        for i in 0..n {
            for u in [C64::new(1.0, 0.0), C64::new(0.0, 1.0)] {
                let mut v = vec![C64::new(0.0, 0.0); n];
                v[i] = u;
                tangents.push(v);
            }
        }
        out.push(oriented(z, tangents, w));
    }
    out
}

/// The annulus `r0 ≤ |z| ≤ r1` in polar coordinates.
pub fn annulus_nodes(r0: f64, r1: f64, mesh: Mesh) -> Vec<PatchNode> {
    let mut out = Vec::new();
    for &(r, wr) in &gauss_legendre(mesh.radial, r0, r1) {
        for &(t, wt) in &periodic_trapezoid(mesh.angular, 2.0 * PI, 0.5) {
            let e = C64::from_polar(1.0, t);
            out.push(oriented(vec![e * r], vec![vec![e], vec![e * C64::new(0.0, r)]], wr * wt));
        }
    }
    out
}

/// Part of the unit bidisk with `ρ = |z| ∈ [ρ0, ρ1]`, where `ρ1 = None` runs to the bidisk
/// boundary `ρ = min(1/cos α, 1/sin α)`; `(|z¹|, |z²|) = ρ(cos α, sin α)`.
pub fn bidisk_nodes(rho0: f64, rho1: Option<f64>, mesh: Mesh) -> Vec<PatchNode> {
    let ang = periodic_trapezoid(mesh.angular, 2.0 * PI, 0.5);
    let halves: Vec<(f64, f64)> = match rho1 {
        Some(_) => vec![(0.0, PI / 2.0)],
        None => vec![(0.0, PI / 4.0), (PI / 4.0, PI / 2.0)],
    };
    let mut out = Vec::new();
    for (a0, a1) in halves {
        for &(a, wa) in &gauss_legendre(mesh.radial, a0, a1) {
            let (s, c) = a.sin_cos();
            let top = rho1.unwrap_or_else(|| (1.0 / c).min(1.0 / s));
            for &(rho, wr) in &gauss_legendre(mesh.radial, rho0, top) {
                for &(t1, w1) in &ang {
                    for &(t2, w2) in &ang {
                        let e1 = C64::from_polar(1.0, t1);
                        let e2 = C64::from_polar(1.0, t2);
                        let z = vec![e1 * (rho * c), e2 * (rho * s)];
                        let d_rho = vec![e1 * c, e2 * s];
                        let d_a = vec![e1 * (-rho * s), e2 * (rho * c)];
                        let d1 = vec![z[0] * C64::i(), C64::new(0.0, 0.0)];
                        let d2 = vec![C64::new(0.0, 0.0), z[1] * C64::i()];
                        out.push(oriented(z, vec![d_rho, d_a, d1, d2], wa * wr * w1 * w2));
                    }
                }
            }
        }
    }
    out
}

/// A base top-form field given per chart.
pub type ChartField<'a> = dyn Fn(usize, &[C64]) -> Result<ExteriorForm> + Sync + 'a;

fn integrate(field: &ChartField<'_>, chart: usize, nodes: &[PatchNode], n: usize) -> Result<f64> {
    let f = |z: &[C64]| field(chart, z);
    Ok(integrate_nodes(&f, nodes, 2 * n)?.re)
}

fn validate_zeros(man: &Manifold, zeros: &[FieldZero], schedule: &[f64]) -> Result<()> {
    if !man.is_compact() {
        return Err(Error::InvalidArgument(format!("{} is not compact", man.name)));
    }
    if schedule.windows(2).any(|w| w[1] >= w[0]) || schedule.iter().any(|&e| !(e > 0.0)) {
        return Err(Error::InvalidArgument(format!("ε schedule must be positive and decreasing: {schedule:?}")));
    }
    if zeros.is_empty() {
        return Ok(());
    }
    if matches!(man.kind, ManifoldKind::FlatTorus | ManifoldKind::TorusProduct) {
        return Err(Error::InvalidArgument("ball excision on a torus is not supported".into()));
    }
    let mut seen = vec![false; man.charts];
    for z in zeros {
        if z.chart >= man.charts {
            return Err(Error::InvalidArgument(format!("zero assigned to chart {} of {}", z.chart, man.charts)));
        }
        if z.point().iter().any(|c| c.norm() > 1e-14) {
            return Err(Error::InvalidArgument(format!(
                "zero {:?} is not at the origin of chart {}",
                z.z, z.chart
            )));
        }
        if seen[z.chart] {
            return Err(Error::InvalidArgument(format!("two ε-balls overlap in chart {}", z.chart)));
        }
        seen[z.chart] = true;
    }
    if let Some(&e) = schedule.first() {
        if e >= 0.5 {
            return Err(Error::InvalidArgument(format!("ε = {e} leaves the chart patch")));
        }
    }
    Ok(())
}

/// `∫_{M_ε}` for every `ε` in the schedule: an outer region plus nested shells.
fn complement_values(
    man: &Manifold,
    field: &ChartField<'_>,
    zeros: &[FieldZero],
    schedule: &[f64],
    mesh: Mesh,
) -> Result<Vec<f64>> {
    let has_zero = |c: usize| zeros.iter().any(|z| z.chart == c);
    let n = man.n;
    let k = schedule.len().max(1);
    let mut values = vec![0.0; k];
    for chart in 0..man.charts {
        let outer_lo = if has_zero(chart) { schedule[0] } else { 0.0 };
        let outer = match man.kind {
            ManifoldKind::FlatTorus | ManifoldKind::TorusProduct => box_nodes(n, mesh.radial),
            ManifoldKind::Cp1 => annulus_nodes(outer_lo, 1.0, mesh),
            ManifoldKind::Cp1xCp1 => bidisk_nodes(outer_lo, None, mesh),
            ManifoldKind::Plane(_) => unreachable!(),
        };
        let mut acc = integrate(field, chart, &outer, n)?;
        values[0] += acc;
        if has_zero(chart) {
            for i in 1..schedule.len() {
                let (lo, hi) = (schedule[i], schedule[i - 1]);
                let shell = match man.kind {
                    ManifoldKind::Cp1 => annulus_nodes(lo, hi, mesh),
                    _ => bidisk_nodes(lo, Some(hi), mesh),
                };
                acc += integrate(field, chart, &shell, n)?;
                values[i] += acc;
            }
        } else {
            for v in values.iter_mut().skip(1) {
                *v += acc;
            }
        }
    }
    Ok(values)
}

/// Integral over `M` minus ε-balls for a decreasing schedule, with an ε → 0 extrapolation.
#[derive(Clone, Debug, Serialize)]
pub struct ComplementTable {
    pub eps: Vec<f64>,
    pub values: Vec<f64>,
    /// `|I(mesh) − I(coarser mesh)|` per ε.
    pub quadrature_error: Vec<f64>,
    pub mesh: Mesh,
    pub extrapolated: Estimate,
}

pub fn complement_table(
    man: &Manifold,
    field: &ChartField<'_>,
    zeros: &[FieldZero],
    schedule: &[f64],
    mesh: Mesh,
) -> Result<ComplementTable> {
    let schedule = if zeros.is_empty() { &[][..] } else { schedule };
    if !zeros.is_empty() && schedule.is_empty() {
        return Err(Error::InvalidArgument("zeros present but the ε schedule is empty".into()));
    }
    validate_zeros(man, zeros, schedule)?;
    let values = complement_values(man, field, zeros, schedule, mesh)?;
    let coarse = complement_values(man, field, zeros, schedule, mesh.coarser())?;
    let quadrature_error: Vec<f64> = values.iter().zip(&coarse).map(|(a, b)| (a - b).abs()).collect();
    let qmax = quadrature_error.iter().copied().fold(0.0, f64::max);
    let extrapolated = if schedule.is_empty() {
        Estimate::new(values[0], qmax)
    } else {
        let samples: Vec<(f64, f64)> = schedule.iter().copied().zip(values.iter().copied()).collect();
        let r = richardson(&samples, 1);
        Estimate::new(r.value, r.error + qmax)
    };
    Ok(ComplementTable { eps: schedule.to_vec(), values, quadrature_error, mesh, extrapolated })
}

/// `∫_{M_ε} field` for a single ε (complex, as the field may be).
pub fn integrate_complement(
    man: &Manifold,
    field: &ChartField<'_>,
    zeros: &[FieldZero],
    eps: f64,
    mesh: Mesh,
) -> Result<C64> {
    let schedule = if zeros.is_empty() { vec![] } else { vec![eps] };
    validate_zeros(man, zeros, &schedule)?;
    let n = man.n;
    let mut total = C64::new(0.0, 0.0);
    for chart in 0..man.charts {
        let lo = if zeros.iter().any(|z| z.chart == chart) { eps } else { 0.0 };
        let nodes = match man.kind {
            ManifoldKind::FlatTorus | ManifoldKind::TorusProduct => box_nodes(n, mesh.radial),
            ManifoldKind::Cp1 => annulus_nodes(lo, 1.0, mesh),
            ManifoldKind::Cp1xCp1 => bidisk_nodes(lo, None, mesh),
            ManifoldKind::Plane(_) => unreachable!(),
        };
        let f = |z: &[C64]| field(chart, z);
        total += integrate_nodes(&f, &nodes, 2 * n)?;
    }
    Ok(total)
}

/// `√−1 ∂̄∂ log G(z, X(z))` for `n = 1`, from base jets.
pub fn riemann_surface_integrand(
    m: &dyn FinslerMetric,
    f: &dyn HolomorphicField,
    chart: usize,
    z: &[C64],
) -> Result<ExteriorForm> {
    if m.dim() != 1 {
        return Err(Error::Dimension("the Riemann-surface integrand needs n = 1".into()));
    }
    let p = seed(z, &[C64::new(1.0, 0.0)], 2, &base_vars(1))?;
    let x = f.value_jet(chart, &p.z);
    if x[0].value().norm() < 1e-13 {
        return Err(Error::Pole(format!("field vanishes at chart {chart}, z = {}", z[0])));
    }
    let g = m.g_jet_at(chart, &p.z, &x);
    let d = wirtinger(&g.ln(), &[Coord::Base(0)], &[Coord::Base(0)])?;
    // i ∂̄∂φ = i φ_{zz̄} dz̄∧dz = −i φ_{zz̄} dz∧dz̄
    Ok(ExteriorForm::dz(0).wedge(&ExteriorForm::dzb(0)).scale(C64::new(0.0, -1.0) * d))
}

#[derive(Clone, Debug, Serialize)]
pub struct RiemannSurfaceReport {
    pub chi: i64,
    pub table: ComplementTable,
    pub value: Estimate,
}

/// `(√−1/vol) ∫_M ∂̄∂ log F²(X)`, which should equal `χ(M)`.
pub fn riemann_surface_check(
    man: &Manifold,
    m: &dyn FinslerMetric,
    f: &dyn HolomorphicField,
    vol: &VolumeField<'_>,
    schedule: &[f64],
    mesh: Mesh,
) -> Result<RiemannSurfaceReport> {
    if man.n != 1 || m.dim() != 1 {
        return Err(Error::Dimension("Riemann-surface check needs n = 1".into()));
    }
    if !m.flags().berwald {
        return Err(Error::InvalidArgument(format!("{} is not flagged Berwald", m.name())));
    }
    let chi = man.chi.ok_or_else(|| Error::InvalidArgument(format!("{} has no Euler characteristic", man.name)))?;
    let field = |chart: usize, z: &[C64]| -> Result<ExteriorForm> {
        Ok(riemann_surface_integrand(m, f, chart, z)?.scale_re(1.0 / vol.value(chart, z)?))
    };
    let table = complement_table(man, &field, &f.zeros(), schedule, mesh)?;
    Ok(RiemannSurfaceReport { chi, value: table.extrapolated, table })
}

#[derive(Clone, Debug, Serialize)]
pub struct HopfReport {
    pub zeros: usize,
    pub chi: i64,
    pub determinants: Vec<[f64; 2]>,
    pub matches: bool,
}

/// Compare the zero count with `χ`; a degenerate zero is an error naming it.
pub fn hopf_check(man: &Manifold, f: &dyn HolomorphicField) -> Result<HopfReport> {
    let chi = man.chi.ok_or_else(|| Error::InvalidArgument(format!("{} has no Euler characteristic", man.name)))?;
    let mut determinants = Vec::new();
    for z in f.zeros() {
        let d = linalg::det(&f.jacobian(z.chart, &z.point()));
        if d.norm() < 1e-10 {
            return Err(Error::Degenerate(format!(
                "zero of {} at chart {}, z = {:?} has det(∂X/∂z) = {:e}",
                f.name(),
                z.chart,
                z.z,
                d.norm()
            )));
        }
        determinants.push([d.re, d.im]);
    }
    let zeros = determinants.len();
    Ok(HopfReport { zeros, chi, determinants, matches: zeros as i64 == chi })
}
