//! Per-command reports and their JSON / CSV / `.dat` artifacts.
//!
//! Every number that leaves this module is an [`Estimate`]. Residuals carry themselves as
//! their own error bound. Wall-clock times are kept out of the reports so that two runs of
//! the same scenario and seed write identical files.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::atlas::{riemann_surface_check, ManifoldKind, RiemannSurfaceReport};
use crate::connection::structure_residuals;
use crate::error::Result;
use crate::gbc::{gbc_verify, sample_points, within, GbcReport};
use crate::metric::{cartan_norm, homogeneity_report, pseudoconvexity_scan, random_unit, FinslerMetric};
use crate::quadrature::Estimate;
use crate::scenario::Scenario;
use crate::transgression::{degree_table, DegreeTable};
use crate::volume::{reference_volume, volume, VolumeField};

type C64 = Complex64;

pub const HOMOGENEITY_TOL: f64 = 1e-9;
pub const STRUCTURE_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    CheckMetric,
    Volume,
    Structure,
    Degree,
    Gbc,
    Corollary,
    Suite,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::CheckMetric => "check-metric",
            Command::Volume => "volume",
            Command::Structure => "structure",
            Command::Degree => "degree",
            Command::Gbc => "gbc",
            Command::Corollary => "corollary",
            Command::Suite => "suite",
        }
    }
}

fn residual(r: f64) -> Estimate {
    Estimate::new(r, r)
}

fn pairs(v: &[C64]) -> Vec<[f64; 2]> {
    v.iter().map(|c| [c.re, c.im]).collect()
}

/// Seeded `(chart, z, ξ)` samples: base points as in the GBC diagnostics, unit fiber
/// directions off the degeneracy locus.
pub fn fiber_samples(s: &Scenario, m: &dyn FinslerMetric, count: usize) -> Result<Vec<(usize, Vec<C64>, Vec<C64>)>> {
    let base = sample_points(s, count)?;
    let mut rng = ChaCha8Rng::seed_from_u64(s.seed ^ 0x9e37_79b9_7f4a_7c15);
    let locus = m.locus();
    Ok(base
        .into_iter()
        .map(|(c, z)| {
            let xi = loop {
                let xi = random_unit(&mut rng, m.dim());
                if !locus.contains(&xi, 1e-3) {
                    break xi;
                }
            };
            (c, z, xi)
        })
        .collect())
}

#[derive(Clone, Debug, Serialize)]
pub struct MetricCheck {
    pub metric: String,
    pub samples: usize,
    /// Worst value of each homogeneity residual over the samples.
    pub homogeneity: Vec<(String, Estimate)>,
    pub min_eigenvalue: Estimate,
    pub max_cartan_norm: Estimate,
    pub locus_warnings: usize,
    pub tolerance: f64,
    pub passed: bool,
}

pub fn check_metric(s: &Scenario) -> Result<MetricCheck> {
    let m = s.metric()?;
    let count = s.points.max(1) * 10;
    let mut worst = [0.0f64; 9];
    let mut names = [""; 9];
    let mut min_ev = f64::INFINITY;
    let mut cartan = 0.0f64;
    let mut warnings = 0;
    for (chart, z, xi) in fiber_samples(s, m.as_ref(), count)? {
        let r = homogeneity_report(m.as_ref(), chart, &z, &xi)?;
        for (k, (name, v)) in r.entries().into_iter().enumerate() {
            names[k] = name;
            worst[k] = worst[k].max(v);
        }
        cartan = cartan.max(cartan_norm(m.as_ref(), chart, &z, &xi)?);
        let scan = pseudoconvexity_scan(m.as_ref(), chart, &z, 8, s.seed)?;
        min_ev = min_ev.min(scan.min_eigenvalue);
        warnings += scan.locus_warnings.len();
    }
    let passed = worst.iter().all(|&w| w <= HOMOGENEITY_TOL) && min_ev > 0.0;
    Ok(MetricCheck {
        metric: m.name(),
        samples: count,
        homogeneity: names.iter().zip(worst).map(|(n, w)| (n.to_string(), residual(w))).collect(),
        min_eigenvalue: Estimate::new(min_ev, min_ev.abs() * 1e-12),
        max_cartan_norm: Estimate::new(cartan, cartan * 1e-12),
        locus_warnings: warnings,
        tolerance: HOMOGENEITY_TOL,
        passed,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct VolumeRow {
    pub chart: usize,
    pub z: Vec<[f64; 2]>,
    /// Sweep parameter: `Re z¹`.
    pub t: f64,
    pub vol: Estimate,
}

#[derive(Clone, Debug, Serialize)]
pub struct VolumeSweep {
    pub metric: String,
    pub rule: String,
    /// `vol(S^{2n−1})`, the Hermitian value.
    pub hermitian_reference: Estimate,
    pub rows: Vec<VolumeRow>,
    /// Spread `max vol − min vol` over the sweep.
    pub spread: Estimate,
}

/// `vol(z)` along `z = (t, 0, …)` in chart 0.
pub fn volume_sweep(s: &Scenario, count: usize) -> Result<VolumeSweep> {
    let m = s.metric()?;
    let man = s.manifold()?;
    let rule = s.sphere_rule()?;
    let hi = match man.kind {
        ManifoldKind::FlatTorus | ManifoldKind::TorusProduct => 1.0,
        _ => 0.9,
    };
    let mut rows = Vec::with_capacity(count);
    for k in 0..count {
        let t = hi * k as f64 / count.max(2).saturating_sub(1).max(1) as f64;
        let mut z = vec![C64::new(0.0, 0.0); man.n];
        z[0] = C64::new(t, 0.0);
        let v = volume(m.as_ref(), 0, &z, &rule)?;
        rows.push(VolumeRow { chart: 0, z: pairs(&z), t, vol: Estimate::new(v.vol, v.error) });
    }
    let lo = rows.iter().map(|r| r.vol.value).fold(f64::INFINITY, f64::min);
    let up = rows.iter().map(|r| r.vol.value).fold(f64::NEG_INFINITY, f64::max);
    let err = rows.iter().map(|r| r.vol.error).fold(0.0, f64::max);
    Ok(VolumeSweep {
        metric: m.name(),
        rule: rule.describe(),
        hermitian_reference: Estimate::exact(reference_volume(man.n)),
        rows,
        spread: Estimate::new(up - lo, 2.0 * err),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct StructureRow {
    pub chart: usize,
    pub z: Vec<[f64; 2]>,
    pub xi: Vec<[f64; 2]>,
    /// `∂ϖ − ϖ∧ϖ`.
    pub torsion_free: Estimate,
    /// `Ω − ∂̄ϖ`.
    pub curvature: Estimate,
}

#[derive(Clone, Debug, Serialize)]
pub struct StructureReport {
    pub metric: String,
    pub rows: Vec<StructureRow>,
    pub max: Estimate,
    pub tolerance: f64,
    pub passed: bool,
}

pub fn structure(s: &Scenario) -> Result<StructureReport> {
    let m = s.metric()?;
    let step = s.step()?;
    let mut rows = Vec::new();
    for (chart, z, xi) in fiber_samples(s, m.as_ref(), s.points)? {
        let (a, b) = structure_residuals(m.as_ref(), chart, &z, &xi, step)?;
        rows.push(StructureRow { chart, z: pairs(&z), xi: pairs(&xi), torsion_free: residual(a), curvature: residual(b) });
    }
    let max = rows.iter().map(|r| r.torsion_free.value.max(r.curvature.value)).fold(0.0, f64::max);
    Ok(StructureReport { metric: m.name(), rows, max: residual(max), tolerance: STRUCTURE_TOL, passed: max <= STRUCTURE_TOL })
}

#[derive(Clone, Debug, Serialize)]
pub struct DegreeReport {
    pub tables: Vec<DegreeTable>,
    /// `1 / vol(S^{2n−1})`, the value for a nondegenerate zero.
    pub target: Estimate,
    pub tolerance: f64,
    pub passed: bool,
}

pub fn degrees(s: &Scenario) -> Result<DegreeReport> {
    let m = s.metric()?;
    let f = s.field()?;
    let man = s.manifold()?;
    let vol = VolumeField::new(m.as_ref(), s.sphere_rule()?);
    let tables = f
        .zeros()
        .iter()
        .map(|z| degree_table(m.as_ref(), f.as_ref(), &vol, z, &s.eps, s.boundary))
        .collect::<Result<Vec<_>>>()?;
    let target = 1.0 / reference_volume(man.n);
    let passed = tables.iter().all(|t| within(t.extrapolated.value, target, s.tolerance));
    Ok(DegreeReport { tables, target: Estimate::exact(target), tolerance: s.tolerance, passed })
}

#[derive(Clone, Debug, Serialize)]
pub struct CorollaryReport {
    pub check: RiemannSurfaceReport,
    pub tolerance: f64,
    pub passed: bool,
}

pub fn corollary(s: &Scenario) -> Result<CorollaryReport> {
    let man = s.manifold()?;
    let m = s.metric()?;
    let f = s.field()?;
    let vol = VolumeField::new(m.as_ref(), s.sphere_rule()?);
    let check = riemann_surface_check(&man, m.as_ref(), f.as_ref(), &vol, &s.eps, s.mesh)?;
    let passed = within(check.value.value, check.chi as f64, s.tolerance);
    Ok(CorollaryReport { check, tolerance: s.tolerance, passed })
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub metric: MetricCheck,
    pub structure: StructureReport,
    pub volume: VolumeSweep,
    pub gbc: GbcReport,
    pub passed: bool,
}

pub fn suite(s: &Scenario) -> Result<SuiteReport> {
    let metric = check_metric(s).map_err(|e| e.at("check-metric"))?;
    let structure = structure(s).map_err(|e| e.at("structure"))?;
    let volume = volume_sweep(s, 11).map_err(|e| e.at("volume"))?;
    let gbc = gbc_verify(s).map_err(|e| e.at("gbc"))?;
    let passed = metric.passed && structure.passed && gbc.passed;
    Ok(SuiteReport { metric, structure, volume, gbc, passed })
}

/// The outcome of one command, ready to be written out.
#[derive(Clone, Debug, Serialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Outcome {
    CheckMetric(MetricCheck),
    Volume(VolumeSweep),
    Structure(StructureReport),
    Degree(DegreeReport),
    Gbc(GbcReport),
    Corollary(CorollaryReport),
    Suite(SuiteReport),
}

impl Outcome {
    pub fn passed(&self) -> bool {
        match self {
            Outcome::CheckMetric(r) => r.passed,
            Outcome::Volume(_) => true,
            Outcome::Structure(r) => r.passed,
            Outcome::Degree(r) => r.passed,
            Outcome::Gbc(r) => r.passed,
            Outcome::Corollary(r) => r.passed,
            Outcome::Suite(r) => r.passed,
        }
    }
}

pub fn run(command: Command, s: &Scenario) -> Result<Outcome> {
    Ok(match command {
        Command::CheckMetric => Outcome::CheckMetric(check_metric(s)?),
        Command::Volume => Outcome::Volume(volume_sweep(s, 11)?),
        Command::Structure => Outcome::Structure(structure(s)?),
        Command::Degree => Outcome::Degree(degrees(s)?),
        Command::Gbc => Outcome::Gbc(gbc_verify(s)?),
        Command::Corollary => Outcome::Corollary(corollary(s)?),
        Command::Suite => Outcome::Suite(suite(s)?),
    })
}

fn e(x: f64) -> String {
    format!("{x:.17e}")
}

fn volume_csv(v: &VolumeSweep) -> String {
    let mut t = String::from("chart,t,z,vol,vol_error\n");
    for r in &v.rows {
        let z: Vec<String> = r.z.iter().map(|p| format!("{}{}{}i", e(p[0]), if p[1].is_sign_negative() { "" } else { "+" }, e(p[1]))).collect();
        let _ = writeln!(t, "{},{},{},{},{}", r.chart, e(r.t), z.join(" "), e(r.vol.value), e(r.vol.error));
    }
    t
}

fn volume_dat(v: &VolumeSweep) -> String {
    let mut t = format!("# {} {}\n# t vol vol_error\n", v.metric, v.rule);
    for r in &v.rows {
        let _ = writeln!(t, "{} {} {}", e(r.t), e(r.vol.value), e(r.vol.error));
    }
    t
}

fn degree_csv(tables: &[DegreeTable]) -> String {
    let mut t = String::from("zero,chart,eps,value,extrapolated,extrapolated_error\n");
    for (k, d) in tables.iter().enumerate() {
        for (eps, v) in d.eps.iter().zip(&d.values) {
            let _ = writeln!(t, "{k},{},{},{},{},{}", d.chart, e(*eps), e(*v), e(d.extrapolated.value), e(d.extrapolated.error));
        }
    }
    t
}

fn degree_dat(tables: &[DegreeTable]) -> String {
    let mut t = String::from("# eps value (one block per zero)\n");
    for d in tables {
        for (eps, v) in d.eps.iter().zip(&d.values) {
            let _ = writeln!(t, "{} {}", e(*eps), e(*v));
        }
        t.push_str("\n\n");
    }
    t
}

fn complement_csv(eps: &[f64], values: &[f64], q: &[f64]) -> String {
    let mut t = String::from("eps,value,quadrature_error\n");
    for ((a, b), c) in eps.iter().zip(values).zip(q) {
        let _ = writeln!(t, "{},{},{}", e(*a), e(*b), e(*c));
    }
    t
}

fn complement_dat(eps: &[f64], values: &[f64], q: &[f64]) -> String {
    let mut t = String::from("# eps value quadrature_error\n");
    for ((a, b), c) in eps.iter().zip(values).zip(q) {
        let _ = writeln!(t, "{} {} {}", e(*a), e(*b), e(*c));
    }
    t
}

fn structure_csv(r: &StructureReport) -> String {
    let mut t = String::from("chart,torsion_free,torsion_free_error,curvature,curvature_error\n");
    for row in &r.rows {
        let _ = writeln!(
            t,
            "{},{},{},{},{}",
            row.chart,
            e(row.torsion_free.value),
            e(row.torsion_free.error),
            e(row.curvature.value),
            e(row.curvature.error)
        );
    }
    t
}

fn homogeneity_csv(r: &MetricCheck) -> String {
    let mut t = String::from("identity,residual,error\n");
    for (n, v) in &r.homogeneity {
        let _ = writeln!(t, "{n},{},{}", e(v.value), e(v.error));
    }
    t
}

/// Writes `report.json` plus tables; returns the files written, in order.
pub fn write_artifacts(dir: &Path, scenario: &Scenario, outcome: &Outcome) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut files: Vec<(String, String)> = Vec::new();
    #[derive(Serialize)]
    struct Envelope<'a> {
        scenario: &'a Scenario,
        passed: bool,
        #[serde(flatten)]
        outcome: &'a Outcome,
    }
    let json = serde_json::to_string_pretty(&Envelope { scenario, passed: outcome.passed(), outcome })?;
    files.push(("report.json".into(), json + "\n"));
    files.push(("scenario.txt".into(), scenario.to_text()));
    let push_gbc = |g: &GbcReport, files: &mut Vec<(String, String)>| {
        let t = &g.lhs_table;
        files.push(("lhs.csv".into(), complement_csv(&t.eps, &t.values, &t.quadrature_error)));
        files.push(("lhs.dat".into(), complement_dat(&t.eps, &t.values, &t.quadrature_error)));
        files.push(("degree.csv".into(), degree_csv(&g.degrees)));
        files.push(("degree.dat".into(), degree_dat(&g.degrees)));
    };
    match outcome {
        Outcome::CheckMetric(r) => files.push(("homogeneity.csv".into(), homogeneity_csv(r))),
        Outcome::Volume(v) => {
            files.push(("volume.csv".into(), volume_csv(v)));
            files.push(("volume.dat".into(), volume_dat(v)));
        }
        Outcome::Structure(r) => files.push(("structure.csv".into(), structure_csv(r))),
        Outcome::Degree(r) => {
            files.push(("degree.csv".into(), degree_csv(&r.tables)));
            files.push(("degree.dat".into(), degree_dat(&r.tables)));
        }
        Outcome::Gbc(g) => push_gbc(g, &mut files),
        Outcome::Corollary(r) => {
            let t = &r.check.table;
            files.push(("corollary.csv".into(), complement_csv(&t.eps, &t.values, &t.quadrature_error)));
            files.push(("corollary.dat".into(), complement_dat(&t.eps, &t.values, &t.quadrature_error)));
        }
        Outcome::Suite(r) => {
            files.push(("homogeneity.csv".into(), homogeneity_csv(&r.metric)));
            files.push(("structure.csv".into(), structure_csv(&r.structure)));
            files.push(("volume.csv".into(), volume_csv(&r.volume)));
            files.push(("volume.dat".into(), volume_dat(&r.volume)));
            push_gbc(&r.gbc, &mut files);
        }
    }
    let mut out = Vec::new();
    for (name, body) in files {
        let p = dir.join(name);
        std::fs::write(&p, body)?;
        out.push(p);
    }
    Ok(out)
}

/// One-line human summary.
pub fn summary(command: Command, s: &Scenario, o: &Outcome) -> String {
    let verdict = if o.passed() { "PASS" } else { "FAIL" };
    let detail = match o {
        Outcome::CheckMetric(r) => {
            let w = r.homogeneity.iter().map(|h| h.1.value).fold(0.0, f64::max);
            format!("max homogeneity residual {w:.3e}, min eigenvalue {:.3e}", r.min_eigenvalue.value)
        }
        Outcome::Volume(v) => format!("vol spread {:.3e} over {} points ({})", v.spread.value, v.rows.len(), v.rule),
        Outcome::Structure(r) => format!("max residual {:.3e}", r.max.value),
        Outcome::Degree(r) => {
            let v: Vec<String> = r.tables.iter().map(|t| format!("{:.6}", t.extrapolated.value)).collect();
            format!("degrees [{}] target {:.6}", v.join(", "), r.target.value)
        }
        Outcome::Gbc(g) => gbc_line(g),
        Outcome::Corollary(r) => format!("chi {:.6} ± {:.1e} (expected {})", r.check.value.value, r.check.value.error, r.check.chi),
        Outcome::Suite(r) => gbc_line(&r.gbc),
    };
    format!("{verdict} {} {}: {detail}", command.name(), s.name)
}

fn gbc_line(g: &GbcReport) -> String {
    format!(
        "lhs {:.6} ± {:.1e}, rhs {:.6} ± {:.1e}, target {:.6}",
        g.lhs.value, g.lhs.error, g.rhs.value, g.rhs.error, g.target.value
    )
}
