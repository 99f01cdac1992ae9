//! Indicatrix volume via the radial pullback density on the Euclidean unit sphere.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::RwLock;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::forms::{numeric_d, CovectorLabel, DiffStep, ExteriorForm, Slot, TangentVector};
use crate::linalg;
use crate::metric::{describe_point, fiber_hessian, is_singular, random_unit, FinslerMetric};
use crate::quadrature::{gauss_legendre, neumaier_sum, periodic_trapezoid};

type C64 = Complex64;

/// `vol(S^{2n−1}) = 2πⁿ/(n−1)!`.
pub fn reference_volume(n: usize) -> f64 {
    assert!(n >= 1);
    let fact: f64 = (1..n).map(|k| k as f64).product();
    2.0 * PI.powi(n as i32) / fact
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum SphereRuleKind {
    /// Gauss–Legendre in the Hopf angle × periodic trapezoid in the phases.
    Product { polar: usize, azimuth: usize },
    /// As `Product`, with the common phase of `ξ` integrated exactly: every density here is
    /// invariant under `ξ ↦ e^{it}ξ`, so only the relative phase is sampled.
    PhaseReduced { polar: usize, azimuth: usize },
    MonteCarlo { count: usize, seed: u64 },
}

/// A node on the Euclidean unit sphere with a positively oriented orthonormal frame
/// (outward normal first) and an area weight.
#[derive(Clone, Debug)]
pub struct SphereNode {
    pub xi: Vec<C64>,
    pub frame: Vec<TangentVector>,
    pub weight: f64,
}

#[derive(Clone, Debug)]
pub struct SphereRule {
    pub n: usize,
    pub kind: SphereRuleKind,
    pub nodes: Vec<SphereNode>,
}

fn fiber_vec(v: &[C64]) -> TangentVector {
    TangentVector::real_fiber(v)
}

fn real4(v: &[C64]) -> [f64; 4] {
    [v[0].re, v[0].im, v[1].re, v[1].im]
}

fn det4(m: [[f64; 4]; 4]) -> f64 {
    let mut a = m;
    let mut det = 1.0;
    for k in 0..4 {
        let p = (k..4).max_by(|&i, &j| a[i][k].abs().total_cmp(&a[j][k].abs())).unwrap();
        if a[p][k] == 0.0 {
            return 0.0;
        }
        if p != k {
            a.swap(p, k);
            det = -det;
        }
        det *= a[k][k];
        for i in k + 1..4 {
            let f = a[i][k] / a[k][k];
            for j in k..4 {
                a[i][j] -= f * a[k][j];
            }
        }
    }
    det
}

impl SphereRule {
    /// Product rule: `azimuth` equispaced nodes on S¹, or Hopf angles on S³.
    pub fn product(n: usize, polar: usize, azimuth: usize) -> Result<Self> {
        Self::hopf(n, polar, azimuth, false)
    }

    /// Product rule with a single node in the common phase, weighted by `2π`.
    pub fn phase_reduced(n: usize, polar: usize, azimuth: usize) -> Result<Self> {
        Self::hopf(n, polar, azimuth, true)
    }

    fn hopf(n: usize, polar: usize, azimuth: usize, reduced: bool) -> Result<Self> {
        if polar == 0 || azimuth == 0 {
            return Err(Error::InvalidArgument("sphere rule sizes must be positive".into()));
        }
        let mut nodes = Vec::new();
        match n {
            1 => {
                let ang = if reduced { vec![(0.0, 2.0 * PI)] } else { periodic_trapezoid(azimuth, 2.0 * PI, 0.5) };
                for (t, w) in ang {
                    let xi = C64::from_polar(1.0, t);
                    nodes.push(SphereNode { xi: vec![xi], frame: vec![TangentVector::real_fiber(&[xi * C64::i()])], weight: w });
                }
            }
            2 => {
                let ang = periodic_trapezoid(azimuth, 2.0 * PI, 0.5);
                let common = if reduced { vec![(0.0, 2.0 * PI)] } else { ang.clone() };
                for (a, wa) in gauss_legendre(polar, 0.0, PI / 2.0) {
                    let (s, c) = a.sin_cos();
                    for &(t1, w1) in &common {
                        for &(t2, w2) in &ang {
                            let e1 = C64::from_polar(1.0, t1);
                            let e2 = C64::from_polar(1.0, t2);
                            let xi = vec![e1 * c, e2 * s];
                            // unit vectors along ∂θ1, ∂α, ∂θ2
                            let f1 = fiber_vec(&[e1 * C64::i(), C64::new(0.0, 0.0)]);
                            let f2 = fiber_vec(&[-e1 * s, e2 * c]);
                            let f3 = fiber_vec(&[C64::new(0.0, 0.0), e2 * C64::i()]);
                            nodes.push(SphereNode { xi, frame: vec![f1, f2, f3], weight: wa * w1 * w2 * c * s });
                        }
                    }
                }
            }
            _ => return Err(Error::InvalidArgument(format!("sphere rules exist for n = 1, 2; got {n}"))),
        }
        let kind = if reduced {
            SphereRuleKind::PhaseReduced { polar, azimuth }
        } else {
            SphereRuleKind::Product { polar, azimuth }
        };
        Ok(SphereRule { n, kind, nodes })
    }

    /// Seeded Monte Carlo rule with equal weights.
    pub fn monte_carlo(n: usize, count: usize, seed: u64) -> Result<Self> {
        if count == 0 {
            return Err(Error::InvalidArgument("Monte Carlo count must be positive".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = reference_volume(n) / count as f64;
        let mut nodes = Vec::with_capacity(count);
        for _ in 0..count {
            let xi = random_unit(&mut rng, n);
            let frame = match n {
                1 => vec![fiber_vec(&[xi[0] * C64::i()])],
                2 => {
                    let (a, b) = (xi[0], xi[1]);
                    let t1 = vec![a * C64::i(), b * C64::i()];
                    let t2 = vec![-b.conj(), a.conj()];
                    let mut t3 = vec![-b.conj() * C64::i(), a.conj() * C64::i()];
                    let d = det4([real4(&xi), real4(&t1), real4(&t2), real4(&t3)]);
                    if d < 0.0 {
                        t3 = t3.iter().map(|x| -x).collect();
                    }
                    vec![fiber_vec(&t1), fiber_vec(&t2), fiber_vec(&t3)]
                }
                _ => return Err(Error::InvalidArgument(format!("sphere rules exist for n = 1, 2; got {n}"))),
            };
            nodes.push(SphereNode { xi, frame, weight: w });
        }
        Ok(SphereRule { n, kind: SphereRuleKind::MonteCarlo { count, seed }, nodes })
    }

    /// Default rule: 256 nodes on S¹, 32×64×64 Hopf nodes on S³.
    pub fn default_for(n: usize) -> Result<Self> {
        match n {
            1 => Self::product(1, 1, 256),
            _ => Self::product(n, 32, 64),
        }
    }

    /// The rule at roughly half resolution, for error estimates.
    pub fn coarser(&self) -> Result<Self> {
        match self.kind {
            SphereRuleKind::Product { polar, azimuth } => {
                Self::product(self.n, (polar / 2).max(1), (azimuth / 2).max(1))
            }
            SphereRuleKind::PhaseReduced { polar, azimuth } => {
                Self::phase_reduced(self.n, (polar / 2).max(1), (azimuth / 2).max(1))
            }
            SphereRuleKind::MonteCarlo { count, seed } => Self::monte_carlo(self.n, (count / 2).max(1), seed ^ 0x9e37),
        }
    }

    pub fn describe(&self) -> String {
        match self.kind {
            SphereRuleKind::Product { azimuth, .. } if self.n == 1 => format!("trapezoid {azimuth}"),
            SphereRuleKind::Product { polar, azimuth } => format!("hopf {polar}x{azimuth}x{azimuth}"),
            SphereRuleKind::PhaseReduced { .. } if self.n == 1 => "phase-reduced 1".into(),
            SphereRuleKind::PhaseReduced { polar, azimuth } => format!("phase-reduced {polar}x{azimuth}"),
            SphereRuleKind::MonteCarlo { count, seed } => format!("monte-carlo {count} seed {seed}"),
        }
    }

    pub fn total_weight(&self) -> f64 {
        neumaier_sum(self.nodes.iter().map(|n| n.weight))
    }
}

/// `det(G_{ij̄})` checked against degeneracy.
fn det_h(m: &dyn FinslerMetric, chart: usize, z: &[C64], xi: &[C64]) -> Result<f64> {
    let h = fiber_hessian(m, chart, z, xi)?;
    if is_singular(&h) {
        return Err(Error::Degenerate(describe_point(chart, z, xi)));
    }
    Ok(linalg::det(&h).re)
}

/// The pullback density `σ_z` at `ξ`, a `(2n−1)`-form in the fiber labels.
pub fn sigma_density(m: &dyn FinslerMetric, chart: usize, z: &[C64], xi: &[C64]) -> Result<ExteriorForm> {
    let n = m.dim();
    let g = m.g_value(chart, z, xi);
    let kappa = det_h(m, chart, z, xi)? / (2f64.powi(n as i32 - 1) * g.powi(n as i32));
    let holo: Vec<CovectorLabel> = (0..n).map(|i| CovectorLabel::new(Slot::FiberHolo, i)).collect();
    let mut beta = ExteriorForm::zero(2 * n - 1);
    for i in 0..n {
        let mut labels: Vec<CovectorLabel> =
            (0..n).filter(|&k| k != i).map(|k| CovectorLabel::new(Slot::FiberAnti, k)).collect();
        labels.extend(holo.iter().copied());
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        beta.add_scaled(&ExteriorForm::monomial(&labels, xi[i].conj() * sign), C64::new(1.0, 0.0));
    }
    let branch = C64::from_polar(1.0, -PI * (n * n) as f64 / 2.0);
    Ok(beta.scale(branch).real_part().scale_re(kappa))
}

/// `det(G_{ij̄})/G^n`: the Euclidean-area density of the indicatrix volume on the unit sphere.
pub fn euclidean_density(m: &dyn FinslerMetric, chart: usize, z: &[C64], xi: &[C64]) -> Result<f64> {
    let n = m.dim() as i32;
    Ok(det_h(m, chart, z, xi)? / m.g_value(chart, z, xi).powi(n))
}

#[derive(Clone, Debug, Serialize)]
pub struct VolumeValue {
    pub vol: f64,
    pub error: f64,
    pub rule: String,
}

/// `∫ σ_z` over the rule, without an error estimate.
pub fn volume_value(m: &dyn FinslerMetric, chart: usize, z: &[C64], rule: &SphereRule) -> Result<f64> {
    if rule.n != m.dim() {
        return Err(Error::Dimension(format!("sphere rule for n={} used with n={}", rule.n, m.dim())));
    }
    let locus = m.locus();
    let vals = rule
        .nodes
        .par_iter()
        .map(|nd| {
            if locus.contains(&nd.xi, 1e-6) {
                return Err(Error::Degenerate(format!(
                    "sphere node adjacent to the degeneracy locus: {}",
                    describe_point(chart, z, &nd.xi)
                )));
            }
            let s = sigma_density(m, chart, z, &nd.xi)?;
            Ok(s.evaluate(&nd.frame)?.re * nd.weight)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(neumaier_sum(vals))
}

/// Volume with an error estimate from the half-resolution rule.
pub fn volume(m: &dyn FinslerMetric, chart: usize, z: &[C64], rule: &SphereRule) -> Result<VolumeValue> {
    let v = volume_value(m, chart, z, rule)?;
    let c = volume_value(m, chart, z, &rule.coarser()?)?;
    if !(v > 0.0) {
        return Err(Error::InvalidArgument(format!("non-positive volume {v} at chart {chart}")));
    }
    Ok(VolumeValue { vol: v, error: (v - c).abs(), rule: rule.describe() })
}

/// `d log vol` by central differences with the node set held fixed.
pub fn log_volume_differential(
    m: &dyn FinslerMetric,
    chart: usize,
    z: &[C64],
    rule: &SphereRule,
    step: DiffStep,
) -> Result<ExteriorForm> {
    let field = |zz: &[C64]| -> Result<ExteriorForm> { Ok(ExteriorForm::real(volume_value(m, chart, zz, rule)?.ln())) };
    numeric_d(&field, z, step)
}

/// Memoized `vol(z)` on a fixed rule, shared by integrand evaluations.
pub struct VolumeField<'a> {
    pub metric: &'a dyn FinslerMetric,
    pub rule: SphereRule,
    memo: RwLock<HashMap<(usize, Vec<u64>), f64>>,
}

impl<'a> VolumeField<'a> {
    pub fn new(metric: &'a dyn FinslerMetric, rule: SphereRule) -> Self {
        VolumeField { metric, rule, memo: RwLock::new(HashMap::new()) }
    }

    pub fn value(&self, chart: usize, z: &[C64]) -> Result<f64> {
        let key = (chart, z.iter().flat_map(|c| [c.re.to_bits(), c.im.to_bits()]).collect::<Vec<_>>());
        if let Some(v) = self.memo.read().unwrap().get(&key) {
            return Ok(*v);
        }
        let v = volume_value(self.metric, chart, z, &self.rule)?;
        self.memo.write().unwrap().insert(key, v);
        Ok(v)
    }

    pub fn log_differential(&self, chart: usize, z: &[C64], step: DiffStep) -> Result<ExteriorForm> {
        let field = |zz: &[C64]| -> Result<ExteriorForm> { Ok(ExteriorForm::real(self.value(chart, zz)?.ln())) };
        numeric_d(&field, z, step)
    }

    pub fn cached(&self) -> usize {
        self.memo.read().unwrap().len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::FlatHermitian;

    #[test]
    fn reference_volumes() {
        assert!((reference_volume(1) - 2.0 * PI).abs() < 1e-15);
        assert!((reference_volume(2) - 2.0 * PI * PI).abs() < 1e-14);
        assert!((reference_volume(3) - PI.powi(3)).abs() < 1e-13);
    }

    #[test]
    fn product_weights_sum_to_sphere_area() {
        for n in 1..=2 {
            let r = SphereRule::product(n, 16, 16).unwrap();
            assert!((r.total_weight() - reference_volume(n)).abs() < 1e-12);
        }
    }

    #[test]
    fn phase_reduced_matches_full_rule() {
        let m = crate::metric::builtin_metric("fs-product-blend", Some(0.1), 2).unwrap();
        let z = [C64::new(0.3, -0.2), C64::new(-0.1, 0.4)];
        let full = volume_value(m.as_ref(), 1, &z, &SphereRule::product(2, 16, 16).unwrap()).unwrap();
        let red = volume_value(m.as_ref(), 1, &z, &SphereRule::phase_reduced(2, 16, 16).unwrap()).unwrap();
        assert!((full - red).abs() < 1e-10 * full, "{full} {red}");
        let r = SphereRule::phase_reduced(2, 16, 16).unwrap();
        assert!((r.total_weight() - reference_volume(2)).abs() < 1e-12);
    }

    #[test]
    fn circle_density_is_dtheta() {
        let m = FlatHermitian { n: 1 };
        let xi = C64::from_polar(1.0, 0.7);
        let s = sigma_density(&m, 0, &[C64::new(0.0, 0.0)], &[xi]).unwrap();
        let v = s.evaluate(&[TangentVector::real_fiber(&[xi * C64::i()])]).unwrap();
        assert!((v - 1.0).norm() < 1e-14);
    }
}
