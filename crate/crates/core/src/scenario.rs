//! Scenario files: `key = value` lines, `#` comments.
//!
//! ```text
//! name      = cp1-fs
//! manifold  = cp1            # flat-torus | torus-product | cp1 | cp1xcp1 | c1 | c2
//! metric    = fubini-study   # a builtin metric; `name(param)` or the `lambda` key
//! field     = euler          # euler | constant | z-squared
//! mesh      = 24             # radial Gauss–Legendre nodes (nodes per coordinate on a torus)
//! angular   = 32             # trapezoid nodes per circle angle
//! eps       = 0.2, 0.1, 0.05
//! volume_rule = 256          # n=1: circle nodes; n=2: `polar x azimuth`, e.g. 8x8;
//!                            # a trailing `reduced` integrates the common phase of ξ exactly
//! boundary  = 1x64           # boundary sphere `polar x azimuth`
//! step      = 1e-4
//! seed      = 7
//! points    = 3              # seeded points for pointwise residual diagnostics
//! tolerance = 0.005          # relative to the target, absolute when the target is 0
//! ```

use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64;
use serde::Serialize;

use crate::atlas::{Manifold, ManifoldKind, Mesh};
use crate::error::{Error, Result};
use crate::field::{DiagonalPolynomialField, HolomorphicField};
use crate::forms::DiffStep;
use crate::metric::{builtin_metric, FinslerMetric};
use crate::transgression::SphereMesh;
use crate::volume::SphereRule;

type C64 = Complex64;

pub const SCENARIO_KEYS: &[&str] = &[
    "name",
    "manifold",
    "metric",
    "lambda",
    "field",
    "mesh",
    "angular",
    "eps",
    "volume_rule",
    "boundary",
    "step",
    "seed",
    "points",
    "tolerance",
];

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Scenario {
    pub name: String,
    pub manifold: String,
    pub metric: String,
    pub lambda: Option<f64>,
    pub field: String,
    pub mesh: Mesh,
    pub eps: Vec<f64>,
    pub volume_rule: (usize, usize),
    pub volume_reduced: bool,
    pub boundary: SphereMesh,
    pub step: f64,
    pub seed: u64,
    pub points: usize,
    pub tolerance: f64,
}

fn parse_pair(key: &str, v: &str) -> Result<(usize, usize)> {
    let bad = || Error::Scenario(format!("`{key}` expects `N` or `AxB`, got `{v}`"));
    match v.split_once('x') {
        Some((a, b)) => Ok((a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?)),
        None => Ok((1, v.trim().parse().map_err(|_| bad())?)),
    }
}

fn num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
    v.trim().parse().map_err(|_| Error::Scenario(format!("`{key}`: cannot parse `{v}`")))
}

impl Scenario {
    /// Defaults for a manifold; `name`, `metric` and `field` still need setting.
    pub fn defaults(manifold: &str) -> Result<Scenario> {
        let man = Manifold::builtin(manifold)?;
        let (mesh, volume_rule, boundary) = match man.kind {
            ManifoldKind::FlatTorus => (Mesh { radial: 8, angular: 8 }, (1, 64), SphereMesh { polar: 1, azimuth: 64 }),
            ManifoldKind::TorusProduct => (Mesh { radial: 4, angular: 4 }, (16, 16), SphereMesh { polar: 12, azimuth: 4 }),
            ManifoldKind::Cp1 | ManifoldKind::Plane(1) => {
                (Mesh { radial: 24, angular: 32 }, (1, 64), SphereMesh { polar: 1, azimuth: 64 })
            }
            _ => (Mesh { radial: 10, angular: 2 }, (12, 12), SphereMesh { polar: 12, azimuth: 4 }),
        };
        let volume_reduced = man.n == 2;
        Ok(Scenario {
            name: manifold.into(),
            manifold: manifold.into(),
            metric: String::new(),
            lambda: None,
            field: "euler".into(),
            mesh,
            eps: vec![0.2, 0.1, 0.05],
            volume_rule,
            volume_reduced,
            boundary,
            step: 1e-4,
            seed: 7,
            points: 3,
            tolerance: 0.02,
        })
    }

    pub fn parse(text: &str) -> Result<Scenario> {
        let mut kv: Vec<(String, String)> = Vec::new();
        for (ln, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Scenario(format!("line {}: expected `key = value`", ln + 1)))?;
            let k = k.trim();
            if !SCENARIO_KEYS.contains(&k) {
                return Err(Error::Scenario(format!("unknown key `{k}` on line {}", ln + 1)));
            }
            if kv.iter().any(|(a, _)| a == k) {
                return Err(Error::Scenario(format!("duplicate key `{k}` on line {}", ln + 1)));
            }
            kv.push((k.to_string(), v.trim().to_string()));
        }
        let get = |k: &str| kv.iter().find(|(a, _)| a == k).map(|(_, v)| v.as_str());
        let manifold = get("manifold").ok_or_else(|| Error::Scenario("missing key `manifold`".into()))?;
        let mut s = Scenario::defaults(manifold)?;
        s.metric = get("metric").ok_or_else(|| Error::Scenario("missing key `metric`".into()))?.to_string();
        if let Some(v) = get("name") {
            s.name = v.to_string();
        }
        if let Some(v) = get("lambda") {
            s.lambda = Some(num("lambda", v)?);
        }
        if let Some(v) = get("field") {
            s.field = v.to_string();
        }
        if let Some(v) = get("mesh") {
            s.mesh.radial = num("mesh", v)?;
        }
        if let Some(v) = get("angular") {
            s.mesh.angular = num("angular", v)?;
        }
        if let Some(v) = get("eps") {
            s.eps = parse_eps(v)?;
        }
        if let Some(v) = get("volume_rule") {
            let v = v.trim();
            let (rule, reduced) = match v.strip_suffix("reduced") {
                Some(r) => (r.trim(), true),
                None => (v, false),
            };
            s.volume_rule = parse_pair("volume_rule", rule)?;
            s.volume_reduced = reduced;
        }
        if let Some(v) = get("boundary") {
            let (p, a) = parse_pair("boundary", v)?;
            s.boundary = SphereMesh { polar: p, azimuth: a };
        }
        if let Some(v) = get("step") {
            s.step = num("step", v)?;
        }
        if let Some(v) = get("seed") {
            s.seed = num("seed", v)?;
        }
        if let Some(v) = get("points") {
            s.points = num("points", v)?;
        }
        if let Some(v) = get("tolerance") {
            s.tolerance = num("tolerance", v)?;
        }
        s.validate()?;
        Ok(s)
    }

    pub fn load(path: &Path) -> Result<Scenario> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Scenario(format!("cannot read {}: {e}", path.display())))?;
        Scenario::parse(&text)
    }

    pub fn to_text(&self) -> String {
        let mut t = String::new();
        let _ = writeln!(t, "name = {}", self.name);
        let _ = writeln!(t, "manifold = {}", self.manifold);
        let _ = writeln!(t, "metric = {}", self.metric);
        if let Some(l) = self.lambda {
            let _ = writeln!(t, "lambda = {l}");
        }
        let _ = writeln!(t, "field = {}", self.field);
        let _ = writeln!(t, "mesh = {}", self.mesh.radial);
        let _ = writeln!(t, "angular = {}", self.mesh.angular);
        let eps: Vec<String> = self.eps.iter().map(|e| e.to_string()).collect();
        let _ = writeln!(t, "eps = {}", eps.join(", "));
        let _ = writeln!(
            t,
            "volume_rule = {}x{}{}",
            self.volume_rule.0,
            self.volume_rule.1,
            if self.volume_reduced { " reduced" } else { "" }
        );
        let _ = writeln!(t, "boundary = {}x{}", self.boundary.polar, self.boundary.azimuth);
        let _ = writeln!(t, "step = {:e}", self.step);
        let _ = writeln!(t, "seed = {}", self.seed);
        let _ = writeln!(t, "points = {}", self.points);
        let _ = writeln!(t, "tolerance = {}", self.tolerance);
        t
    }

    pub fn validate(&self) -> Result<()> {
        let man = self.manifold()?;
        let m = self.metric()?;
        if m.dim() != man.n {
            return Err(Error::Scenario(format!("metric {} has dimension {}, manifold {} has {}", m.name(), m.dim(), man.name, man.n)));
        }
        self.field()?;
        if self.eps.windows(2).any(|w| w[1] >= w[0]) || self.eps.iter().any(|&e| !(e > 0.0)) {
            return Err(Error::Scenario(format!("`eps` must be positive and decreasing: {:?}", self.eps)));
        }
        if self.mesh.radial < 2 || self.mesh.angular < 1 {
            return Err(Error::Scenario("`mesh` must be >= 2 and `angular` >= 1".into()));
        }
        if !(self.tolerance >= 0.0) {
            return Err(Error::Scenario(format!("`tolerance` must be >= 0, got {}", self.tolerance)));
        }
        self.step()?.check()?;
        self.sphere_rule()?;
        Ok(())
    }

    pub fn manifold(&self) -> Result<Manifold> {
        Manifold::builtin(&self.manifold).map_err(|e| Error::Scenario(e.to_string()))
    }

    pub fn metric(&self) -> Result<Box<dyn FinslerMetric>> {
        let n = self.manifold()?.n;
        builtin_metric(&self.metric, self.lambda, n).map_err(|e| Error::Scenario(e.to_string()))
    }

    pub fn field(&self) -> Result<Box<dyn HolomorphicField>> {
        let man = self.manifold()?;
        build_field(&self.field, &man)
    }

    pub fn step(&self) -> Result<DiffStep> {
        let s = DiffStep { h: self.step, richardson: true };
        s.check()?;
        Ok(s)
    }

    pub fn sphere_rule(&self) -> Result<SphereRule> {
        let n = self.manifold()?.n;
        let (p, a) = self.volume_rule;
        if self.volume_reduced {
            SphereRule::phase_reduced(n, p, a)
        } else {
            SphereRule::product(n, p, a)
        }
    }

    pub fn boundary_mesh(&self) -> SphereMesh {
        self.boundary
    }
}

pub fn parse_eps(v: &str) -> Result<Vec<f64>> {
    v.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| num("eps", s))
        .collect()
}

/// Default constant field coefficients, away from the quartic's degeneracy locus.
pub fn constant_coefficients(n: usize) -> Vec<C64> {
    [C64::new(1.0, 0.5), C64::new(-0.3, 0.7)][..n].to_vec()
}

pub fn build_field(name: &str, man: &Manifold) -> Result<Box<dyn HolomorphicField>> {
    let n = man.n;
    let f: Box<dyn HolomorphicField> = match (name, man.kind) {
        ("constant", ManifoldKind::FlatTorus | ManifoldKind::TorusProduct | ManifoldKind::Plane(_)) => {
            Box::new(DiagonalPolynomialField::constant(&constant_coefficients(n)))
        }
        ("euler", ManifoldKind::Cp1 | ManifoldKind::Cp1xCp1) => Box::new(DiagonalPolynomialField::euler_projective(n)),
        ("euler", ManifoldKind::Plane(_)) => Box::new(DiagonalPolynomialField::euler_plane(n)),
        ("z-squared", ManifoldKind::Cp1) => Box::new(DiagonalPolynomialField::z_squared_projective()),
        _ => return Err(Error::Scenario(format!("field `{name}` is not available on {}", man.name))),
    };
    Ok(f)
}

/// The catalog `(a)`–`(f)`.
pub fn builtin_scenarios() -> Vec<Scenario> {
    let mk = |name: &str, manifold: &str, metric: &str, field: &str, tol: f64| {
        let mut s = Scenario::defaults(manifold).expect("builtin manifold");
        s.name = name.into();
        s.metric = metric.into();
        s.field = field.into();
        s.tolerance = tol;
        s
    };
    vec![
        mk("flat-torus", "flat-torus", "flat-hermitian", "constant", 1e-8),
        mk("cp1-fs", "cp1", "fubini-study", "euler", 0.005),
        mk("quartic-torus", "torus-product", "quartic-minkowski", "constant", 1e-3),
        mk("quartic-blend-torus", "torus-product", "quartic-blend(0.5)", "constant", 1e-3),
        mk("cp1xcp1-fs", "cp1xcp1", "fs-product-blend(0)", "euler", 0.02),
        mk("cp1xcp1-blend", "cp1xcp1", "fs-product-blend(0.1)", "euler", 0.05),
    ]
}

pub fn builtin_scenario(name: &str) -> Result<Scenario> {
    builtin_scenarios()
        .into_iter()
        .find(|s| s.name == name)
        .ok_or_else(|| Error::Scenario(format!("unknown builtin scenario `{name}`")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_and_unknown_keys() {
        for s in builtin_scenarios() {
            assert_eq!(Scenario::parse(&s.to_text()).unwrap(), s);
        }
        let err = Scenario::parse("manifold = cp1\nmetric = fubini-study\nmeshh = 3\n").unwrap_err();
        assert!(err.to_string().contains("`meshh`"));
        assert!(Scenario::parse("manifold = cp1\nmetric = quartic-minkowski\n").is_err());
        assert!(Scenario::parse("manifold = cp1\nmetric = fubini-study\neps = 0.1, 0.2\n").is_err());
    }
}
