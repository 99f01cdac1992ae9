//! Nonlinear connection, Chern–Finsler connection forms, curvature blocks and transport.
//!
//! Index conventions: `nl[j][k] = N^j_k`, `gamma[j][i][s] = Γ^j_{i,s}`,
//! `cartan[j][i][s] = C^j_{is}`, and form matrices store `ϖ^j_i` at `[j][i]`.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::forms::{numeric_d_total_split, DiffStep, ExteriorForm, FormMatrix};
use crate::jet::{all_vars, seed, Coeff, Coord, Jet};
use crate::linalg::{self, CMat};
use crate::metric::{describe_point, is_singular, FinslerMetric};

type C64 = Complex64;
type CJet = Jet<C64>;

fn czero() -> C64 {
    C64::new(0.0, 0.0)
}

/// Gauss–Jordan inverse of a jet matrix, pivoting on the constant terms.
fn jet_inverse(a: &[Vec<CJet>]) -> Option<Vec<Vec<CJet>>> {
    let n = a.len();
    let space = a[0][0].space().clone();
    let mut m: Vec<Vec<CJet>> = a.to_vec();
    let mut inv: Vec<Vec<CJet>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| Jet::constant(&space, if i == j { C64::one() } else { czero() }))
                .collect()
        })
        .collect();
    for k in 0..n {
        let p = (k..n).max_by(|&i, &j| m[i][k].value().norm().total_cmp(&m[j][k].value().norm()))?;
        if m[p][k].value().norm() == 0.0 {
            return None;
        }
        m.swap(p, k);
        inv.swap(p, k);
        let r = m[k][k].recip();
        for j in 0..n {
            m[k][j] = &m[k][j] * &r;
            inv[k][j] = &inv[k][j] * &r;
        }
        for i in 0..n {
            if i == k {
                continue;
            }
            let f = m[i][k].clone();
            for j in 0..n {
                m[i][j] = &m[i][j] - &(&f * &m[k][j]);
                inv[i][j] = &inv[i][j] - &(&f * &inv[k][j]);
            }
        }
    }
    Some(inv)
}

fn values(m: &[Vec<CJet>]) -> CMat {
    m.iter().map(|r| r.iter().map(|j| j.value()).collect()).collect()
}

/// Curvature coefficients, all indexed `[j][i][k][l]`.
#[derive(Clone, Debug, Serialize)]
pub struct CurvatureBlocks {
    /// `R^j_{ikl̄}` on `dz^k ∧ dz̄^l`.
    pub r: Vec<Vec<CMat>>,
    /// `P^j_{ik,l̄}` on `dz^k ∧ δξ̄^l`.
    pub p: Vec<Vec<CMat>>,
    /// `S^j_{ik,l̄}` on `δξ^k ∧ dz̄^l`.
    pub s: Vec<Vec<CMat>>,
    /// `Q^j_{ikl̄}` on `δξ^k ∧ δξ̄^l`.
    pub q: Vec<Vec<CMat>>,
}

impl CurvatureBlocks {
    fn max_abs(b: &[Vec<CMat>]) -> f64 {
        b.iter().flatten().map(linalg::max_abs).fold(0.0, f64::max)
    }

    pub fn norms(&self) -> [f64; 4] {
        [Self::max_abs(&self.r), Self::max_abs(&self.p), Self::max_abs(&self.s), Self::max_abs(&self.q)]
    }
}

/// Everything the connection layer knows at one point `(z, ξ)` of `T'M \ 0`.
#[derive(Clone, Debug)]
pub struct ConnectionPoint {
    pub n: usize,
    pub g: f64,
    pub gi: Vec<C64>,
    /// `gi_zbar[i][k] = ∂²G/∂ξ^i∂z̄^k`.
    pub gi_zbar: CMat,
    pub h: CMat,
    pub hinv: CMat,
    pub nl: CMat,
    pub gamma: Vec<CMat>,
    pub cartan: Vec<CMat>,
    pub varpi: FormMatrix,
    pub omega: Option<FormMatrix>,
    pub blocks: Option<CurvatureBlocks>,
}

/// Geometry at `(z, ξ)`; curvature needs `with_curvature` (order-4 jets).
pub fn connection_point(
    m: &dyn FinslerMetric,
    chart: usize,
    z: &[C64],
    xi: &[C64],
    with_curvature: bool,
) -> Result<ConnectionPoint> {
    let n = m.dim();
    if z.len() != n || xi.len() != n {
        return Err(Error::Dimension(format!("point of length {}/{} for dimension {n}", z.len(), xi.len())));
    }
    let order = if with_curvature { 4 } else { 3 };
    let p = seed(z, xi, order, &all_vars(n))?;
    let g = m.g_jet(chart, &p);
    let f = Coord::Fiber;
    let b = Coord::Base;
    let degenerate = || Error::Degenerate(describe_point(chart, z, xi));

    let mut gb = Vec::with_capacity(n);
    let mut gh = Vec::with_capacity(n);
    for i in 0..n {
        gb.push(g.wirtinger_d(f(i), false)?);
        gh.push(g.wirtinger_d(f(i), true)?);
    }
    // h[i][j] = G_{ij̄}, mz[k][i] = ∂²G/∂z^k∂ξ̄^i
    let mut h: Vec<Vec<CJet>> = Vec::with_capacity(n);
    let mut mz: Vec<Vec<CJet>> = Vec::with_capacity(n);
    for i in 0..n {
        let mut row = Vec::with_capacity(n);
        let mut zrow = Vec::with_capacity(n);
        for j in 0..n {
            row.push(gb[j].wirtinger_d(f(i), true)?);
            zrow.push(gb[j].wirtinger_d(b(i), true)?);
        }
        h.push(row);
        mz.push(zrow);
    }
    let hv = values(&h);
    if is_singular(&hv) {
        return Err(degenerate());
    }
    let ht: Vec<Vec<CJet>> = (0..n).map(|i| (0..n).map(|j| h[j][i].clone()).collect()).collect();
    let hinv = jet_inverse(&ht).ok_or_else(degenerate)?;
    // g3[i][l][m] = G_{il̄m}, dzh[s][i][l] = ∂G_{il̄}/∂z^s
    let mut g3 = vec![vec![Vec::with_capacity(n); n]; n];
    let mut dzh = vec![vec![Vec::with_capacity(n); n]; n];
    for i in 0..n {
        for l in 0..n {
            for s in 0..n {
                g3[i][l].push(h[i][l].wirtinger_d(f(s), true)?);
                dzh[s][i].push(h[i][l].wirtinger_d(b(s), true)?);
            }
        }
    }
    let sum = |terms: Vec<CJet>| -> CJet {
        let mut it = terms.into_iter();
        let first = it.next().unwrap();
        it.fold(first, |a, t| &a + &t)
    };
    let nl: Vec<Vec<CJet>> = (0..n)
        .map(|j| (0..n).map(|k| sum((0..n).map(|i| &hinv[j][i] * &mz[k][i]).collect())).collect())
        .collect();
    let cartan: Vec<Vec<Vec<CJet>>> = (0..n)
        .map(|k| {
            (0..n)
                .map(|i| (0..n).map(|j| sum((0..n).map(|l| &hinv[k][l] * &g3[i][l][j]).collect())).collect())
                .collect()
        })
        .collect();
    let gamma: Vec<Vec<Vec<CJet>>> = (0..n)
        .map(|j| {
            (0..n)
                .map(|i| {
                    (0..n)
                        .map(|s| {
                            sum((0..n)
                                .map(|l| {
                                    let mut inner = dzh[s][i][l].clone();
                                    for mm in 0..n {
                                        inner = &inner - &(&nl[mm][s] * &g3[i][l][mm]);
                                    }
                                    &hinv[j][l] * &inner
                                })
                                .collect())
                        })
                        .collect()
                })
                .collect()
        })
        .collect();

    let gi: Vec<C64> = gh.iter().map(|j| j.value()).collect();
    let mut gi_zbar = linalg::zeros(n);
    for i in 0..n {
        for k in 0..n {
            gi_zbar[i][k] = gh[i].wirtinger1(b(k), false)?;
        }
    }
    let nlv = values(&nl);
    let gammav: Vec<CMat> = gamma.iter().map(|m| values(m)).collect();
    let cartanv: Vec<CMat> = cartan.iter().map(|m| values(m)).collect();
    let varpi = varpi_adapted(&gammav, &cartanv);

    let (omega, blocks) = if with_curvature {
        let blocks = curvature_blocks(&nl, &nlv, &gamma, &cartan, &cartanv)?;
        (Some(assemble_omega(&blocks)), Some(blocks))
    } else {
        (None, None)
    };
    Ok(ConnectionPoint {
        n,
        g: g.value(),
        gi,
        gi_zbar,
        h: hv,
        hinv: values(&hinv),
        nl: nlv,
        gamma: gammav,
        cartan: cartanv,
        varpi,
        omega,
        blocks,
    })
}

fn curvature_blocks(
    nl: &[Vec<CJet>],
    nlv: &CMat,
    gamma: &[Vec<Vec<CJet>>],
    cartan: &[Vec<Vec<CJet>>],
    cartanv: &[CMat],
) -> Result<CurvatureBlocks> {
    let n = nl.len();
    let f = Coord::Fiber;
    let b = Coord::Base;
    // δf/δz̄^l = ∂f/∂z̄^l − conj(N^s_l) ∂f/∂ξ̄^s
    let delta = |x: &CJet, l: usize| -> Result<C64> {
        let mut v = x.wirtinger1(b(l), false)?;
        for s in 0..n {
            v -= nlv[s][l].conj() * x.wirtinger1(f(s), false)?;
        }
        Ok(v)
    };
    let fiber = |x: &CJet, l: usize| x.wirtinger1(f(l), false);
    let blank = || vec![vec![linalg::zeros(n); n]; n];
    let (mut r, mut p, mut s_, mut q) = (blank(), blank(), blank(), blank());
    for j in 0..n {
        for i in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let mut rv = delta(&gamma[j][i][k], l)?;
                    let mut pv = fiber(&gamma[j][i][k], l)?;
                    for s in 0..n {
                        rv += cartanv[j][i][s] * delta(&nl[s][k], l)?;
                        pv += cartanv[j][i][s] * fiber(&nl[s][k], l)?;
                    }
                    r[j][i][k][l] = -rv;
                    p[j][i][k][l] = -pv;
                    s_[j][i][k][l] = -delta(&cartan[j][i][k], l)?;
                    q[j][i][k][l] = -fiber(&cartan[j][i][k], l)?;
                }
            }
        }
    }
    Ok(CurvatureBlocks { r, p, s: s_, q })
}

/// `ϖ^j_i = Γ^j_{i,s} dz^s + C^j_{is} δξ^s`, with `δξ` carried by the fiber-holo label.
fn varpi_adapted(gamma: &[CMat], cartan: &[CMat]) -> FormMatrix {
    let n = gamma.len();
    let mut w = FormMatrix::zero(n, 1);
    for j in 0..n {
        for i in 0..n {
            let mut e = ExteriorForm::zero(1);
            for s in 0..n {
                e.add_scaled(&ExteriorForm::dz(s), gamma[j][i][s]);
                e.add_scaled(&ExteriorForm::dxi(s), cartan[j][i][s]);
            }
            w.entries[j][i] = e;
        }
    }
    w
}

/// `Ω^j_i` from its four blocks in the adapted coframe.
pub fn assemble_omega(bl: &CurvatureBlocks) -> FormMatrix {
    let n = bl.r.len();
    let mut o = FormMatrix::zero(n, 2);
    for j in 0..n {
        for i in 0..n {
            let mut e = ExteriorForm::zero(2);
            for k in 0..n {
                for l in 0..n {
                    e.add_scaled(&ExteriorForm::dz(k).wedge(&ExteriorForm::dzb(l)), bl.r[j][i][k][l]);
                    e.add_scaled(&ExteriorForm::dz(k).wedge(&ExteriorForm::dxib(l)), bl.p[j][i][k][l]);
                    e.add_scaled(&ExteriorForm::dxi(k).wedge(&ExteriorForm::dzb(l)), bl.s[j][i][k][l]);
                    e.add_scaled(&ExteriorForm::dxi(k).wedge(&ExteriorForm::dxib(l)), bl.q[j][i][k][l]);
                }
            }
            o.entries[j][i] = e;
        }
    }
    o
}

/// Rewrite a form from the adapted coframe `{dz, dz̄, δξ, δξ̄}` to `{dz, dz̄, dξ, dξ̄}`.
pub fn to_coordinate_coframe(f: &ExteriorForm, nl: &CMat) -> ExteriorForm {
    use crate::forms::Slot;
    let n = nl.len();
    f.substitute(&|l| match l.slot {
        Slot::FiberHolo => {
            let mut e = ExteriorForm::dxi(l.index);
            for k in 0..n {
                e.add_scaled(&ExteriorForm::dz(k), nl[l.index][k]);
            }
            Some(e)
        }
        Slot::FiberAnti => {
            let mut e = ExteriorForm::dxib(l.index);
            for k in 0..n {
                e.add_scaled(&ExteriorForm::dzb(k), nl[l.index][k].conj());
            }
            Some(e)
        }
        _ => None,
    })
}

pub fn nonlinear_connection(m: &dyn FinslerMetric, chart: usize, z: &[C64], xi: &[C64]) -> Result<CMat> {
    Ok(connection_point(m, chart, z, xi, false)?.nl)
}

/// `(ϖ, Γ)` with `ϖ` in the adapted coframe.
pub fn chern_finsler_form(
    m: &dyn FinslerMetric,
    chart: usize,
    z: &[C64],
    xi: &[C64],
) -> Result<(FormMatrix, Vec<CMat>)> {
    let cp = connection_point(m, chart, z, xi, false)?;
    Ok((cp.varpi, cp.gamma))
}

pub fn curvature(m: &dyn FinslerMetric, chart: usize, z: &[C64], xi: &[C64]) -> Result<ConnectionPoint> {
    connection_point(m, chart, z, xi, true)
}

/// Residuals of `∂ϖ^k_i = Σ_m ϖ^m_i ∧ ϖ^k_m` and `Ω = ∂̄ϖ`, compared in the coordinate coframe.
pub fn structure_residuals(
    m: &dyn FinslerMetric,
    chart: usize,
    z: &[C64],
    xi: &[C64],
    step: DiffStep,
) -> Result<(f64, f64)> {
    let n = m.dim();
    let field = |zz: &[C64], xx: &[C64]| -> Result<Vec<ExteriorForm>> {
        let cp = connection_point(m, chart, zz, xx, false)?;
        Ok(cp.varpi.entries.iter().flatten().map(|e| to_coordinate_coframe(e, &cp.nl)).collect())
    };
    let d = numeric_d_total_split(&field, z, xi, step)?;
    let cp = connection_point(m, chart, z, xi, true)?;
    let w: Vec<Vec<ExteriorForm>> = cp
        .varpi
        .entries
        .iter()
        .map(|r| r.iter().map(|e| to_coordinate_coframe(e, &cp.nl)).collect())
        .collect();
    let omega = cp.omega.as_ref().expect("curvature requested");
    let mut r1 = 0.0f64;
    let mut r2 = 0.0f64;
    for k in 0..n {
        for i in 0..n {
            let mut ww = ExteriorForm::zero(2);
            for mm in 0..n {
                ww.add_scaled(&w[mm][i].wedge(&w[k][mm]), C64::new(1.0, 0.0));
            }
            r1 = r1.max(d.holo[k * n + i].distance(&ww));
            let oc = to_coordinate_coframe(&omega.entries[k][i], &cp.nl);
            r2 = r2.max(d.anti[k * n + i].distance(&oc));
        }
    }
    Ok((r1, r2))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum TransportMode {
    /// Γ independent of the fiber point: ordinary linear transport.
    Linear,
    /// Γ evaluated at the transported vector itself.
    NonlinearAtTransported,
}

#[derive(Clone, Debug, Serialize)]
pub struct TransportPath {
    pub mode: TransportMode,
    pub t: Vec<f64>,
    pub v: Vec<Vec<[f64; 2]>>,
}

impl TransportPath {
    pub fn vector(&self, k: usize) -> Vec<C64> {
        self.v[k].iter().map(|p| C64::new(p[0], p[1])).collect()
    }
}

/// RK4 for `dv^i/dt = −Γ^i_{j,k}(z(t), v) v^j ż^k` on `t ∈ [0, 1]`.
pub fn parallel_transport(
    m: &dyn FinslerMetric,
    chart: usize,
    curve: &dyn Fn(f64) -> (Vec<C64>, Vec<C64>),
    v0: &[C64],
    steps: usize,
) -> Result<TransportPath> {
    if steps < 8 {
        return Err(Error::InvalidArgument(format!("transport needs at least 8 steps, got {steps}")));
    }
    let n = m.dim();
    let rhs = |t: f64, v: &[C64]| -> Result<Vec<C64>> {
        let (z, dz) = curve(t);
        let cp = connection_point(m, chart, &z, v, false)?;
        Ok((0..n)
            .map(|i| {
                -(0..n)
                    .flat_map(|j| (0..n).map(move |k| (j, k)))
                    .map(|(j, k)| cp.gamma[i][j][k] * v[j] * dz[k])
                    .sum::<C64>()
            })
            .collect())
    };
    let axpy = |v: &[C64], k: &[C64], s: f64| -> Vec<C64> { v.iter().zip(k).map(|(a, b)| a + b * s).collect() };
    let dt = 1.0 / steps as f64;
    let mut v = v0.to_vec();
    let pack = |v: &[C64]| v.iter().map(|c| [c.re, c.im]).collect::<Vec<_>>();
    let mut path = TransportPath {
        mode: if m.flags().berwald { TransportMode::Linear } else { TransportMode::NonlinearAtTransported },
        t: vec![0.0],
        v: vec![pack(&v)],
    };
    for s in 0..steps {
        let t = s as f64 * dt;
        let k1 = rhs(t, &v)?;
        let k2 = rhs(t + dt / 2.0, &axpy(&v, &k1, dt / 2.0))?;
        let k3 = rhs(t + dt / 2.0, &axpy(&v, &k2, dt / 2.0))?;
        let k4 = rhs(t + dt, &axpy(&v, &k3, dt))?;
        v = (0..n).map(|i| v[i] + (k1[i] + k2[i] * 2.0 + k3[i] * 2.0 + k4[i]) * (dt / 6.0)).collect();
        path.t.push(t + dt);
        path.v.push(pack(&v));
    }
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::{FlatHermitian, FubiniStudy, QuarticMinkowski};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn fubini_study_hand_values() {
        let m = FubiniStudy { conformal: 0.0 };
        let z = c(0.3, -0.4);
        let xi = c(0.7, 0.2);
        let cp = curvature(&m, 0, &[z], &[xi]).unwrap();
        let d = 1.0 + z.norm_sqr();
        assert!((cp.nl[0][0] - (-2.0 * z.conj() * xi / d)).norm() < 1e-13);
        assert!((cp.gamma[0][0][0] - (-2.0 * z.conj() / d)).norm() < 1e-13);
        let b = cp.blocks.unwrap();
        assert!((b.r[0][0][0][0] - 2.0 / (d * d)).norm() < 1e-12);
        assert!(b.norms()[1..].iter().all(|&x| x < 1e-12));
    }

    #[test]
    fn quartic_is_purely_vertical() {
        let cp = curvature(&QuarticMinkowski, 0, &[c(0.1, 0.2), c(-0.3, 0.0)], &[c(1.0, 0.5), c(0.4, -0.8)]).unwrap();
        assert!(linalg::max_abs(&cp.nl) == 0.0);
        assert!(cp.gamma.iter().map(linalg::max_abs).fold(0.0, f64::max) == 0.0);
        let n = cp.blocks.unwrap().norms();
        assert!(n[0] == 0.0 && n[1] == 0.0 && n[2] == 0.0 && n[3] > 1e-3);
    }

    #[test]
    fn flat_structure_is_trivial() {
        let m = FlatHermitian { n: 2 };
        let (r1, r2) = structure_residuals(&m, 0, &[c(0.1, 0.0), c(0.0, 0.2)], &[c(1.0, 0.0), c(0.0, 1.0)], DiffStep::default()).unwrap();
        assert_eq!((r1, r2), (0.0, 0.0));
    }

    #[test]
    fn transport_rejects_few_steps() {
        let m = FlatHermitian { n: 1 };
        let curve = |t: f64| (vec![c(t, 0.0)], vec![c(1.0, 0.0)]);
        assert!(parallel_transport(&m, 0, &curve, &[c(1.0, 0.0)], 4).is_err());
    }
}
