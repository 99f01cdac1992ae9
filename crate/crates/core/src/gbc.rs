//! End-to-end Gauss–Bonnet–Chern verification of a scenario.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::atlas::{complement_table, hopf_check, ComplementTable, HopfReport, ManifoldKind};
use crate::error::{Error, Result};
use crate::forms::ExteriorForm;
use crate::quadrature::Estimate;
use crate::scenario::Scenario;
use crate::transgression::{degree_table, gbc_integrand, transgression_residual, DegreeTable};
use crate::volume::{reference_volume, VolumeField};

type C64 = Complex64;

#[derive(Clone, Debug, Serialize)]
pub struct GbcReport {
    pub scenario: String,
    pub manifold: String,
    pub metric: String,
    pub field: String,
    pub n: usize,
    pub chi: i64,
    pub hopf: HopfReport,
    /// `χ / vol(S^{2n−1})`.
    pub target: Estimate,
    /// `∫_{M_ε} (X*c_n + 𝔈)/vol`, extrapolated in ε.
    pub lhs: Estimate,
    pub lhs_table: ComplementTable,
    /// `Σ_ζ lim ∫_{∂B_ε(ζ)} Re Λ₂ / vol`.
    pub rhs: Estimate,
    pub degrees: Vec<DegreeTable>,
    pub stokes_gap: Estimate,
    pub stokes_consistent: bool,
    /// Largest pointwise transgression residual over the seeded sample points.
    pub max_transgression_residual: Estimate,
    pub tolerance: f64,
    pub passed: bool,
}

/// Within tolerance: relative to `|target|`, or absolute when the target is 0.
pub fn within(value: f64, target: f64, tol: f64) -> bool {
    let scale = if target == 0.0 { 1.0 } else { target.abs() };
    (value - target).abs() <= tol * scale
}

/// Seeded sample points inside the cover of chart 0, away from its zero.
pub fn sample_points(s: &Scenario, count: usize) -> Result<Vec<(usize, Vec<C64>)>> {
    let man = s.manifold()?;
    let mut rng = ChaCha8Rng::seed_from_u64(s.seed);
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let chart = rng.random_range(0..man.charts);
        let z: Vec<C64> = (0..man.n)
            .map(|_| match man.kind {
                ManifoldKind::FlatTorus | ManifoldKind::TorusProduct => {
                    C64::new(rng.random::<f64>(), rng.random::<f64>())
                }
                _ => C64::from_polar(rng.random_range(0.3..0.95), rng.random_range(0.0..std::f64::consts::TAU)),
            })
            .collect();
        out.push((chart, z));
    }
    Ok(out)
}

pub fn gbc_verify(s: &Scenario) -> Result<GbcReport> {
    let man = s.manifold()?;
    let m = s.metric()?;
    let f = s.field()?;
    let step = s.step()?;
    let chi = man.chi.ok_or_else(|| Error::Scenario(format!("{} is not compact", man.name)))?;
    let hopf = hopf_check(&man, f.as_ref()).map_err(|e| e.at("hopf"))?;
    let vol = VolumeField::new(m.as_ref(), s.sphere_rule()?);
    let zeros = f.zeros();

    let integrand = |chart: usize, z: &[C64]| -> Result<ExteriorForm> {
        Ok(gbc_integrand(m.as_ref(), f.as_ref(), &vol, chart, z, step)?.form())
    };
    let lhs_table = complement_table(&man, &integrand, &zeros, &s.eps, s.mesh).map_err(|e| e.at("lhs"))?;
    let lhs = lhs_table.extrapolated;

    let degrees = zeros
        .iter()
        .map(|z| degree_table(m.as_ref(), f.as_ref(), &vol, z, &s.eps, s.boundary))
        .collect::<Result<Vec<_>>>()
        .map_err(|e| e.at("rhs"))?;
    let rhs = Estimate::new(
        degrees.iter().map(|d| d.extrapolated.value).sum(),
        degrees.iter().map(|d| d.extrapolated.error).sum(),
    );

    let mut worst = 0.0f64;
    for (chart, z) in sample_points(s, s.points)? {
        let r = transgression_residual(m.as_ref(), f.as_ref(), &vol, chart, &z, step).map_err(|e| e.at("residual"))?;
        worst = worst.max(r.max());
    }

    let target = chi as f64 / reference_volume(man.n);
    let gap = lhs.value - rhs.value;
    let gap_err = lhs.error + rhs.error;
    let stokes_consistent = gap.abs() <= gap_err.max(1e-12);
    let passed = hopf.matches
        && stokes_consistent
        && within(lhs.value, target, s.tolerance)
        && within(rhs.value, target, s.tolerance);
    Ok(GbcReport {
        scenario: s.name.clone(),
        manifold: man.name.clone(),
        metric: m.name(),
        field: f.name(),
        n: man.n,
        chi,
        hopf,
        target: Estimate::exact(target),
        lhs,
        lhs_table,
        rhs,
        degrees,
        stokes_gap: Estimate::new(gap, gap_err),
        stokes_consistent,
        max_transgression_residual: Estimate::new(worst, worst),
        tolerance: s.tolerance,
        passed,
    })
}
