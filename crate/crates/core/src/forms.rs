//! Pointwise exterior algebra over the coframe `{dz, dz̄, δξ, δξ̄}`.
//!
//! A basis monomial is a bitmask over labels; bit `8*slot + index`. Increasing bit order is
//! the canonical wedge order, so the sign of any product is a parity count.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::quadrature::neumaier_sum_c;

type C64 = Complex64;

const PRUNE: f64 = 1e-300;
pub const MAX_DIM: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Slot {
    BaseHolo = 0,
    BaseAnti = 1,
    FiberHolo = 2,
    FiberAnti = 3,
}

impl Slot {
    pub const ALL: [Slot; 4] = [Slot::BaseHolo, Slot::BaseAnti, Slot::FiberHolo, Slot::FiberAnti];

    fn from_rank(r: u32) -> Slot {
        Slot::ALL[r as usize]
    }

    pub fn conj(self) -> Slot {
        Slot::from_rank(self as u32 ^ 1)
    }

    pub fn is_base(self) -> bool {
        matches!(self, Slot::BaseHolo | Slot::BaseAnti)
    }
}

/// One coframe element, index 0-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CovectorLabel {
    pub slot: Slot,
    pub index: usize,
}

impl CovectorLabel {
    pub fn new(slot: Slot, index: usize) -> Self {
        assert!(index < MAX_DIM);
        CovectorLabel { slot, index }
    }

    pub fn bit(self) -> u32 {
        self.slot as u32 * 8 + self.index as u32
    }

    pub fn from_bit(b: u32) -> Self {
        CovectorLabel { slot: Slot::from_rank(b / 8), index: (b % 8) as usize }
    }
}

impl fmt::Display for CovectorLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self.slot {
            Slot::BaseHolo => "dz",
            Slot::BaseAnti => "dzb",
            Slot::FiberHolo => "dxi",
            Slot::FiberAnti => "dxib",
        };
        write!(f, "{name}{}", self.index + 1)
    }
}

fn bits(mask: u32) -> impl Iterator<Item = u32> {
    (0..32u32).filter(move |b| mask & (1 << b) != 0)
}

/// Sign of `e_A ∧ e_B` relative to the canonical order of `A ∪ B`.
fn wedge_sign(a: u32, b: u32) -> f64 {
    let mut swaps = 0u32;
    for bb in bits(b) {
        let above = if bb >= 31 { 0 } else { a & !((1u32 << (bb + 1)) - 1) };
        swaps += above.count_ones();
    }
    if swaps % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

fn conj_mask(mask: u32) -> (u32, f64) {
    let mapped: Vec<u32> = bits(mask).map(|b| b ^ 8).collect();
    let mut inv = 0;
    for i in 0..mapped.len() {
        for j in i + 1..mapped.len() {
            if mapped[i] > mapped[j] {
                inv += 1;
            }
        }
    }
    let m = mapped.iter().fold(0u32, |acc, b| acc | (1 << b));
    (m, if inv % 2 == 0 { 1.0 } else { -1.0 })
}

/// Homogeneous complex form at a point.
#[derive(Clone, PartialEq)]
pub struct ExteriorForm {
    degree: usize,
    terms: BTreeMap<u32, C64>,
}

impl fmt::Debug for ExteriorForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for ExteriorForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (&m, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({:.6e}{:+.6e}i)", c.re, c.im)?;
            for b in bits(m) {
                write!(f, " {}", CovectorLabel::from_bit(b))?;
            }
        }
        Ok(())
    }
}

impl ExteriorForm {
    pub fn zero(degree: usize) -> Self {
        ExteriorForm { degree, terms: BTreeMap::new() }
    }

    pub fn scalar(c: C64) -> Self {
        let mut f = ExteriorForm::zero(0);
        f.push(0, c);
        f
    }

    pub fn real(c: f64) -> Self {
        ExteriorForm::scalar(C64::new(c, 0.0))
    }

    pub fn covector(l: CovectorLabel) -> Self {
        let mut f = ExteriorForm::zero(1);
        f.push(1 << l.bit(), C64::new(1.0, 0.0));
        f
    }

    pub fn dz(i: usize) -> Self {
        Self::covector(CovectorLabel::new(Slot::BaseHolo, i))
    }

    pub fn dzb(i: usize) -> Self {
        Self::covector(CovectorLabel::new(Slot::BaseAnti, i))
    }

    pub fn dxi(i: usize) -> Self {
        Self::covector(CovectorLabel::new(Slot::FiberHolo, i))
    }

    pub fn dxib(i: usize) -> Self {
        Self::covector(CovectorLabel::new(Slot::FiberAnti, i))
    }

    /// `c · e_{labels}` for labels in any order (sign applied), zero on repeats.
    pub fn monomial(labels: &[CovectorLabel], c: C64) -> Self {
        let mut f = ExteriorForm::scalar(c);
        for &l in labels {
            f = f.wedge(&ExteriorForm::covector(l));
        }
        if f.terms.is_empty() {
            f.degree = labels.len();
        }
        f
    }

    fn push(&mut self, mask: u32, c: C64) {
        if c.norm() <= PRUNE {
            return;
        }
        let e = self.terms.entry(mask).or_insert(C64::new(0.0, 0.0));
        *e += c;
        if e.norm() <= PRUNE {
            self.terms.remove(&mask);
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (Vec<CovectorLabel>, C64)> + '_ {
        self.terms.iter().map(|(&m, &c)| (bits(m).map(CovectorLabel::from_bit).collect(), c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Coefficient of `e_{labels}` (labels in any order, sign applied).
    pub fn coefficient(&self, labels: &[CovectorLabel]) -> C64 {
        let probe = ExteriorForm::monomial(labels, C64::new(1.0, 0.0));
        match probe.terms.iter().next() {
            Some((m, s)) => self.terms.get(m).copied().unwrap_or_default() * s,
            None => C64::new(0.0, 0.0),
        }
    }

    /// The value of a 0-form.
    pub fn scalar_value(&self) -> C64 {
        self.terms.get(&0).copied().unwrap_or_default()
    }

    pub fn max_abs(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn only_base(&self) -> bool {
        self.terms.keys().all(|m| m & 0xffff_0000 == 0)
    }

    pub fn uses_slot(&self, slot: Slot) -> bool {
        let mask = 0xffu32 << (slot as u32 * 8);
        self.terms.keys().any(|m| m & mask != 0)
    }

    fn check_add(&self, other: &ExteriorForm) -> usize {
        if self.terms.is_empty() {
            return other.degree;
        }
        if other.terms.is_empty() {
            return self.degree;
        }
        assert_eq!(self.degree, other.degree, "adding forms of different degree");
        self.degree
    }

    pub fn add_form(&self, other: &ExteriorForm) -> ExteriorForm {
        let mut out = self.clone();
        out.degree = self.check_add(other);
        for (&m, &c) in &other.terms {
            out.push(m, c);
        }
        out
    }

    pub fn add_scaled(&mut self, other: &ExteriorForm, s: C64) {
        self.degree = self.check_add(other);
        for (&m, &c) in &other.terms {
            self.push(m, c * s);
        }
    }

    pub fn scale(&self, s: C64) -> ExteriorForm {
        let mut out = ExteriorForm::zero(self.degree);
        for (&m, &c) in &self.terms {
            out.push(m, c * s);
        }
        out
    }

    pub fn scale_re(&self, s: f64) -> ExteriorForm {
        self.scale(C64::new(s, 0.0))
    }

    pub fn wedge(&self, other: &ExteriorForm) -> ExteriorForm {
        let mut out = ExteriorForm::zero(self.degree + other.degree);
        for (&a, &ca) in &self.terms {
            for (&b, &cb) in &other.terms {
                if a & b != 0 {
                    continue;
                }
                out.push(a | b, ca * cb * wedge_sign(a, b));
            }
        }
        out
    }

    /// `self^k` under the wedge product (`k = 0` gives 1).
    pub fn wedge_pow(&self, k: usize) -> ExteriorForm {
        let mut out = ExteriorForm::real(1.0);
        for _ in 0..k {
            out = out.wedge(self);
        }
        out
    }

    pub fn conj(&self) -> ExteriorForm {
        let mut out = ExteriorForm::zero(self.degree);
        for (&m, &c) in &self.terms {
            let (cm, s) = conj_mask(m);
            out.push(cm, c.conj() * s);
        }
        out
    }

    pub fn real_part(&self) -> ExteriorForm {
        self.add_form(&self.conj()).scale_re(0.5)
    }

    /// Interior product `ι(v)`.
    pub fn contract(&self, v: &TangentVector) -> ExteriorForm {
        if self.degree == 0 {
            return ExteriorForm::zero(0);
        }
        let mut out = ExteriorForm::zero(self.degree - 1);
        for (&m, &c) in &self.terms {
            for (pos, b) in bits(m).enumerate() {
                let val = v.component(CovectorLabel::from_bit(b));
                if val.norm() == 0.0 {
                    continue;
                }
                let s = if pos % 2 == 0 { 1.0 } else { -1.0 };
                out.push(m & !(1 << b), c * val * s);
            }
        }
        out
    }

    /// `f(v_1, …, v_k)` as a determinant pairing (no `1/k!`).
    pub fn evaluate(&self, vs: &[TangentVector]) -> Result<C64> {
        if vs.len() != self.degree {
            return Err(Error::Degree(format!(
                "evaluating a {}-form on {} vectors",
                self.degree,
                vs.len()
            )));
        }
        let mut f = self.clone();
        for v in vs {
            f = f.contract(v);
        }
        Ok(f.scalar_value())
    }

    /// Replace each label by a 1-form; labels absent from `map` are kept.
    pub fn substitute(&self, map: &dyn Fn(CovectorLabel) -> Option<ExteriorForm>) -> ExteriorForm {
        let mut out = ExteriorForm::zero(self.degree);
        let mut cache: BTreeMap<u32, ExteriorForm> = BTreeMap::new();
        for (&m, &c) in &self.terms {
            let mut acc = ExteriorForm::scalar(c);
            for b in bits(m) {
                let img = cache
                    .entry(b)
                    .or_insert_with(|| {
                        let l = CovectorLabel::from_bit(b);
                        map(l).unwrap_or_else(|| ExteriorForm::covector(l))
                    })
                    .clone();
                acc = acc.wedge(&img);
                if acc.is_zero() {
                    break;
                }
            }
            for (&am, &ac) in &acc.terms {
                out.push(am, ac);
            }
        }
        out
    }

    /// Largest absolute coefficient difference.
    pub fn distance(&self, other: &ExteriorForm) -> f64 {
        let mut d = self.clone();
        d.degree = other.degree.max(self.degree);
        d.add_scaled(&ExteriorForm { degree: d.degree, terms: other.terms.clone() }, C64::new(-1.0, 0.0));
        d.max_abs()
    }
}

impl Add for ExteriorForm {
    type Output = ExteriorForm;
    fn add(self, rhs: ExteriorForm) -> ExteriorForm {
        self.add_form(&rhs)
    }
}

impl Sub for ExteriorForm {
    type Output = ExteriorForm;
    fn sub(self, rhs: ExteriorForm) -> ExteriorForm {
        self.add_form(&rhs.scale_re(-1.0))
    }
}

impl Neg for ExteriorForm {
    type Output = ExteriorForm;
    fn neg(self) -> ExteriorForm {
        self.scale_re(-1.0)
    }
}

impl Mul<C64> for ExteriorForm {
    type Output = ExteriorForm;
    fn mul(self, rhs: C64) -> ExteriorForm {
        self.scale(rhs)
    }
}

/// Components of a tangent vector in the four slot families.
#[derive(Clone, Debug, PartialEq)]
pub struct TangentVector {
    comps: [[C64; MAX_DIM]; 4],
}

impl Default for TangentVector {
    fn default() -> Self {
        TangentVector { comps: [[C64::new(0.0, 0.0); MAX_DIM]; 4] }
    }
}

impl TangentVector {
    /// A vector with components in one slot family only, e.g. `X^i ∂/∂z^i`.
    pub fn in_slot(slot: Slot, v: &[C64]) -> Self {
        let mut t = TangentVector::default();
        t.comps[slot as usize][..v.len()].copy_from_slice(v);
        t
    }

    /// Real tangent vector of the base with complex components `dz^i(v) = v^i`.
    pub fn real_base(v: &[C64]) -> Self {
        let mut t = TangentVector::in_slot(Slot::BaseHolo, v);
        for (i, x) in v.iter().enumerate() {
            t.comps[Slot::BaseAnti as usize][i] = x.conj();
        }
        t
    }

    /// Real vertical vector with `dξ^i(v) = v^i`.
    pub fn real_fiber(v: &[C64]) -> Self {
        let mut t = TangentVector::in_slot(Slot::FiberHolo, v);
        for (i, x) in v.iter().enumerate() {
            t.comps[Slot::FiberAnti as usize][i] = x.conj();
        }
        t
    }

    /// Real tangent vector of the total space.
    pub fn real_total(dz: &[C64], dxi: &[C64]) -> Self {
        let mut t = TangentVector::real_base(dz);
        for (i, x) in dxi.iter().enumerate() {
            t.comps[Slot::FiberHolo as usize][i] = *x;
            t.comps[Slot::FiberAnti as usize][i] = x.conj();
        }
        t
    }

    pub fn component(&self, l: CovectorLabel) -> C64 {
        self.comps[l.slot as usize][l.index]
    }
}

/// Square matrix of forms, entry `[row][col]`.
#[derive(Clone, Debug, PartialEq)]
pub struct FormMatrix {
    pub entries: Vec<Vec<ExteriorForm>>,
}

impl FormMatrix {
    pub fn zero(n: usize, degree: usize) -> Self {
        FormMatrix { entries: vec![vec![ExteriorForm::zero(degree); n]; n] }
    }

    pub fn from_scalars(m: &[Vec<C64>]) -> Self {
        FormMatrix {
            entries: m
                .iter()
                .map(|r| r.iter().map(|&c| ExteriorForm::scalar(c)).collect())
                .collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, i: usize, j: usize) -> &ExteriorForm {
        &self.entries[i][j]
    }

    pub fn map(&self, f: impl Fn(&ExteriorForm) -> ExteriorForm) -> FormMatrix {
        FormMatrix { entries: self.entries.iter().map(|r| r.iter().map(&f).collect()).collect() }
    }

    pub fn scale(&self, s: C64) -> FormMatrix {
        self.map(|e| e.scale(s))
    }

    pub fn add(&self, other: &FormMatrix) -> FormMatrix {
        let n = self.dim();
        FormMatrix {
            entries: (0..n)
                .map(|i| (0..n).map(|j| self.entries[i][j].add_form(&other.entries[i][j])).collect())
                .collect(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().flatten().map(|e| e.max_abs()).fold(0.0, f64::max)
    }

    pub fn distance(&self, other: &FormMatrix) -> f64 {
        self.entries
            .iter()
            .flatten()
            .zip(other.entries.iter().flatten())
            .map(|(a, b)| a.distance(b))
            .fold(0.0, f64::max)
    }

    pub fn scalar_values(&self) -> Vec<Vec<C64>> {
        self.entries.iter().map(|r| r.iter().map(|e| e.scalar_value()).collect()).collect()
    }
}

fn permutations(n: usize) -> Vec<(Vec<usize>, f64)> {
    fn rec(k: usize, cur: &mut Vec<usize>, sign: f64, out: &mut Vec<(Vec<usize>, f64)>) {
        let n = cur.len();
        if k == n {
            out.push((cur.clone(), sign));
            return;
        }
        for i in k..n {
            cur.swap(k, i);
            rec(k + 1, cur, if i == k { sign } else { -sign }, out);
            cur.swap(k, i);
        }
    }
    let mut out = Vec::new();
    rec(0, &mut (0..n).collect(), 1.0, &mut out);
    out
}

/// `[det^0(A;B), …, det^n(A;B)]` with `det(λA + B) = Σ λ^j det^j(A;B)`.
pub fn det_poly(a: &FormMatrix, b: &FormMatrix) -> Result<Vec<ExteriorForm>> {
    let n = a.dim();
    if b.dim() != n {
        return Err(Error::Dimension(format!("det_poly of {n}x{n} and {}x{}", b.dim(), b.dim())));
    }
    let mut da = None;
    for e in a.entries.iter().flatten().filter(|e| !e.is_zero()) {
        if e.degree() % 2 != 0 {
            return Err(Error::Degree(format!("det_poly needs even forms, found degree {}", e.degree())));
        }
        if da.is_some_and(|d| d != e.degree()) {
            return Err(Error::Degree("det_poly entries of mixed degree".into()));
        }
        da = Some(e.degree());
    }
    if b.entries.iter().flatten().any(|e| !e.is_zero() && e.degree() != 0) {
        return Err(Error::Degree("det_poly needs scalar entries in B".into()));
    }
    let da = da.unwrap_or(2);
    let mut out: Vec<ExteriorForm> = (0..=n).map(|j| ExteriorForm::zero(j * da)).collect();
    for (perm, sign) in permutations(n) {
        let mut poly: Vec<ExteriorForm> = vec![ExteriorForm::real(sign)];
        for (i, &p) in perm.iter().enumerate() {
            let ae = &a.entries[i][p];
            let be = &b.entries[i][p];
            let mut next: Vec<ExteriorForm> =
                (0..=poly.len()).map(|j| ExteriorForm::zero(j * da)).collect();
            for (j, t) in poly.iter().enumerate() {
                if t.is_zero() {
                    continue;
                }
                if !be.is_zero() {
                    next[j].add_scaled(&t.wedge(be), C64::new(1.0, 0.0));
                }
                if !ae.is_zero() {
                    next[j + 1].add_scaled(&t.wedge(ae), C64::new(1.0, 0.0));
                }
            }
            poly = next;
        }
        for (j, t) in poly.into_iter().enumerate() {
            out[j].add_scaled(&t, C64::new(1.0, 0.0));
        }
    }
    Ok(out)
}

/// `det(A)` of an even-form matrix.
pub fn det_forms(a: &FormMatrix) -> Result<ExteriorForm> {
    let n = a.dim();
    Ok(det_poly(a, &FormMatrix::zero(n, 0))?.pop().unwrap())
}

/// Pullback along a holomorphic section `ξ = X(z)`: `δξ^i ↦ (J + N)^i_j dz^j`, conjugate for
/// `δξ̄`; base labels are fixed. `j[i][k] = ∂X^i/∂z^k`.
pub fn pullback_section(f: &ExteriorForm, jac: &[Vec<C64>], n_conn: &[Vec<C64>]) -> Result<ExteriorForm> {
    let n = jac.len();
    if n_conn.len() != n || jac.iter().chain(n_conn).any(|r| r.len() != n) {
        return Err(Error::Dimension("Jacobian and nonlinear connection sizes differ".into()));
    }
    for (l, _) in f.terms() {
        if l.iter().any(|c| c.index >= n) {
            return Err(Error::Dimension(format!("form uses an index beyond dimension {n}")));
        }
    }
    let m: Vec<Vec<C64>> =
        (0..n).map(|i| (0..n).map(|k| jac[i][k] + n_conn[i][k]).collect()).collect();
    Ok(f.substitute(&|l: CovectorLabel| match l.slot {
        Slot::FiberHolo => {
            let mut e = ExteriorForm::zero(1);
            for k in 0..n {
                e.add_scaled(&ExteriorForm::dz(k), m[l.index][k]);
            }
            Some(e)
        }
        Slot::FiberAnti => {
            let mut e = ExteriorForm::zero(1);
            for k in 0..n {
                e.add_scaled(&ExteriorForm::dzb(k), m[l.index][k].conj());
            }
            Some(e)
        }
        _ => None,
    }))
}

/// Step control for numeric exterior derivatives.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct DiffStep {
    pub h: f64,
    pub richardson: bool,
}

impl Default for DiffStep {
    fn default() -> Self {
        DiffStep { h: 1e-4, richardson: true }
    }
}

impl DiffStep {
    pub fn plain(h: f64) -> Self {
        DiffStep { h, richardson: false }
    }

    pub fn check(&self) -> Result<()> {
        if !(self.h >= 1e-8) {
            return Err(Error::StepTooSmall(self.h));
        }
        Ok(())
    }
}

/// The `∂` and `∂̄` parts of a numeric exterior derivative.
#[derive(Clone, Debug)]
pub struct SplitDerivative {
    pub holo: Vec<ExteriorForm>,
    pub anti: Vec<ExteriorForm>,
}

impl SplitDerivative {
    pub fn total(&self) -> Vec<ExteriorForm> {
        self.holo.iter().zip(&self.anti).map(|(a, b)| a.add_form(b)).collect()
    }
}

type ManyField<'a> = dyn Fn(&[C64], &[C64]) -> Result<Vec<ExteriorForm>> + Sync + 'a;

fn central_split(
    field: &ManyField<'_>,
    z: &[C64],
    xi: &[C64],
    fiber: bool,
    h: f64,
) -> Result<SplitDerivative> {
    let n = z.len();
    let dirs = if fiber { 2 * n } else { n };
    let mut holo: Option<Vec<ExteriorForm>> = None;
    let mut anti: Option<Vec<ExteriorForm>> = None;
    for d in 0..dirs {
        let (is_fiber, k) = if d < n { (false, d) } else { (true, d - n) };
        let mut parts = [Vec::new(), Vec::new()];
        for (pi, unit) in [C64::new(1.0, 0.0), C64::new(0.0, 1.0)].into_iter().enumerate() {
            let shift = |s: f64| -> Result<Vec<ExteriorForm>> {
                let mut zz = z.to_vec();
                let mut xx = xi.to_vec();
                if is_fiber {
                    xx[k] += unit * s;
                } else {
                    zz[k] += unit * s;
                }
                field(&zz, &xx)
            };
            let plus = shift(h)?;
            let minus = shift(-h)?;
            parts[pi] = plus
                .iter()
                .zip(&minus)
                .map(|(p, m)| p.add_form(&m.scale_re(-1.0)).scale_re(0.5 / h))
                .collect();
        }
        let (dl, dbl) = if is_fiber {
            (ExteriorForm::dxi(k), ExteriorForm::dxib(k))
        } else {
            (ExteriorForm::dz(k), ExteriorForm::dzb(k))
        };
        let count = parts[0].len();
        let hl = holo.get_or_insert_with(|| vec![ExteriorForm::zero(0); count]);
        let al = anti.get_or_insert_with(|| vec![ExteriorForm::zero(0); count]);
        for e in 0..count {
            // ∂f/∂ζ = ½(f_x − i f_y), ∂f/∂ζ̄ = ½(f_x + i f_y)
            let fx = &parts[0][e];
            let fy = &parts[1][e];
            let dh = fx.add_form(&fy.scale(C64::new(0.0, -1.0))).scale_re(0.5);
            let da = fx.add_form(&fy.scale(C64::new(0.0, 1.0))).scale_re(0.5);
            let t = dl.wedge(&dh);
            hl[e] = if hl[e].is_zero() { t } else { hl[e].add_form(&t) };
            let t = dbl.wedge(&da);
            al[e] = if al[e].is_zero() { t } else { al[e].add_form(&t) };
        }
    }
    Ok(SplitDerivative { holo: holo.unwrap_or_default(), anti: anti.unwrap_or_default() })
}

fn combine(fine: &SplitDerivative, coarse: &SplitDerivative) -> SplitDerivative {
    let mix = |a: &[ExteriorForm], b: &[ExteriorForm]| -> Vec<ExteriorForm> {
        a.iter()
            .zip(b)
            .map(|(f, c)| f.scale_re(4.0 / 3.0).add_form(&c.scale_re(-1.0 / 3.0)))
            .collect()
    };
    SplitDerivative { holo: mix(&fine.holo, &coarse.holo), anti: mix(&fine.anti, &coarse.anti) }
}

fn differentiate(
    field: &ManyField<'_>,
    z: &[C64],
    xi: &[C64],
    fiber: bool,
    step: DiffStep,
) -> Result<SplitDerivative> {
    step.check()?;
    let coarse = central_split(field, z, xi, fiber, step.h)?;
    if !step.richardson {
        return Ok(coarse);
    }
    let fine = central_split(field, z, xi, fiber, step.h / 2.0)?;
    Ok(combine(&fine, &coarse))
}

/// Numeric `∂` and `∂̄` of several base-chart form fields at `z`.
pub fn numeric_d_split(
    field: &(dyn Fn(&[C64]) -> Result<Vec<ExteriorForm>> + Sync),
    z: &[C64],
    step: DiffStep,
) -> Result<SplitDerivative> {
    let wrapped = |zz: &[C64], _: &[C64]| field(zz);
    differentiate(&wrapped, z, &[], false, step)
}

/// Numeric exterior derivative of a base-chart form field.
pub fn numeric_d(
    field: &(dyn Fn(&[C64]) -> Result<ExteriorForm> + Sync),
    z: &[C64],
    step: DiffStep,
) -> Result<ExteriorForm> {
    let many = |zz: &[C64]| field(zz).map(|f| vec![f]);
    Ok(numeric_d_split(&many, z, step)?.total().pop().unwrap())
}

/// Numeric `∂`, `∂̄` over the total space (base and fiber coordinates).
pub fn numeric_d_total_split(
    field: &ManyField<'_>,
    z: &[C64],
    xi: &[C64],
    step: DiffStep,
) -> Result<SplitDerivative> {
    differentiate(field, z, xi, true, step)
}

/// A parametrized region of a chart. Nodes carry the chart point, the coordinate tangent
/// vectors (positively oriented) and the rule weight.
pub trait Patch: Sync {
    fn dim(&self) -> usize;
    fn nodes(&self) -> Vec<PatchNode>;
}

#[derive(Clone, Debug)]
pub struct PatchNode {
    pub z: Vec<C64>,
    pub tangents: Vec<TangentVector>,
    pub weight: f64,
}

/// `∫ field` over a parametrized patch. The field must be a top-degree base form.
pub fn integrate_chart(
    field: &(dyn Fn(&[C64]) -> Result<ExteriorForm> + Sync),
    patch: &dyn Patch,
) -> Result<C64> {
    let nodes = patch.nodes();
    integrate_nodes(field, &nodes, 2 * patch.dim())
}

/// `∫ field` over explicit nodes; `degree` is the expected form degree.
pub fn integrate_nodes(
    field: &(dyn Fn(&[C64]) -> Result<ExteriorForm> + Sync),
    nodes: &[PatchNode],
    degree: usize,
) -> Result<C64> {
    let vals: Vec<C64> = nodes
        .par_iter()
        .map(|nd| {
            let f = field(&nd.z)?;
            if f.is_zero() {
                return Ok(C64::new(0.0, 0.0));
            }
            if f.degree() != degree || !f.only_base() {
                return Err(Error::Degree(format!(
                    "integrand has degree {} (base-only: {}), expected a base {degree}-form",
                    f.degree(),
                    f.only_base()
                )));
            }
            Ok(f.evaluate(&nd.tangents)? * nd.weight)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(neumaier_sum_c(vals))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn antisymmetry_and_signs() {
        let a = ExteriorForm::dz(0);
        assert!(a.wedge(&a).is_zero());
        let b = ExteriorForm::dzb(0);
        assert_eq!(a.wedge(&b), b.wedge(&a).scale_re(-1.0));
        let p = ExteriorForm::dz(0).wedge(&ExteriorForm::dzb(0));
        let q = ExteriorForm::dz(1).wedge(&ExteriorForm::dzb(1));
        assert_eq!(p.wedge(&q), q.wedge(&p));
    }

    #[test]
    fn contraction_examples() {
        let v = TangentVector::in_slot(Slot::BaseHolo, &[c(1.0, 0.0)]);
        let f = ExteriorForm::dz(0).wedge(&ExteriorForm::dzb(0));
        assert_eq!(f.contract(&v), ExteriorForm::dzb(0));
        assert!(ExteriorForm::dz(1).contract(&v).is_zero());
        assert!(ExteriorForm::real(2.0).contract(&v).is_zero());
    }

    #[test]
    fn real_part_examples() {
        let f = ExteriorForm::dz(0).wedge(&ExteriorForm::dzb(0)).scale(c(0.0, 1.0));
        assert!(f.real_part().distance(&f) < 1e-15);
        let g = ExteriorForm::dz(0).real_part();
        let want = ExteriorForm::dz(0).add_form(&ExteriorForm::dzb(0)).scale_re(0.5);
        assert!(g.distance(&want) < 1e-15);
    }

    #[test]
    fn evaluation_on_real_coordinate_vectors() {
        let f = ExteriorForm::dz(0).wedge(&ExteriorForm::dzb(0)).scale(c(0.0, 0.5));
        let dx = TangentVector::real_base(&[c(1.0, 0.0)]);
        let dy = TangentVector::real_base(&[c(0.0, 1.0)]);
        assert!((f.evaluate(&[dx, dy]).unwrap() - 1.0).norm() < 1e-15);
    }

    #[test]
    fn det_poly_small_cases() {
        let a = FormMatrix { entries: vec![vec![ExteriorForm::dz(0).wedge(&ExteriorForm::dzb(0))]] };
        let b = FormMatrix::from_scalars(&[vec![c(2.0, 1.0)]]);
        let d = det_poly(&a, &b).unwrap();
        assert_eq!(d[0].scalar_value(), c(2.0, 1.0));
        assert_eq!(d[1], a.entries[0][0]);
        let z = FormMatrix::zero(1, 2);
        let d = det_poly(&z, &b).unwrap();
        assert!(d[1].is_zero());
        let odd = FormMatrix { entries: vec![vec![ExteriorForm::dz(0)]] };
        assert!(det_poly(&odd, &b).is_err());
    }

    #[test]
    fn pullback_examples() {
        let j = vec![vec![c(1.0, 0.0)]];
        let z = vec![vec![c(0.0, 0.0)]];
        assert_eq!(pullback_section(&ExteriorForm::dz(0), &j, &z).unwrap(), ExteriorForm::dz(0));
        assert_eq!(pullback_section(&ExteriorForm::dxi(0), &j, &z).unwrap(), ExteriorForm::dz(0));
        assert!(pullback_section(&ExteriorForm::dxi(0), &z, &z).unwrap().is_zero());
        assert!(pullback_section(&ExteriorForm::dxi(1), &j, &z).is_err());
    }

    #[test]
    fn numeric_d_of_linear_coefficient() {
        let field = |z: &[C64]| Ok(ExteriorForm::dz(0).scale_re(z[0].re));
        let d = numeric_d(&field, &[c(0.3, -0.2)], DiffStep::default()).unwrap();
        let want = ExteriorForm::dz(0)
            .add_form(&ExteriorForm::dzb(0))
            .scale_re(0.5)
            .wedge(&ExteriorForm::dz(0));
        assert!(d.distance(&want) < 1e-10);
        assert!(numeric_d(&field, &[c(0.0, 0.0)], DiffStep::plain(1e-9)).is_err());
        let konst = |_: &[C64]| Ok(ExteriorForm::dz(0));
        assert!(numeric_d(&konst, &[c(0.1, 0.1)], DiffStep::default()).unwrap().max_abs() == 0.0);
    }
}
