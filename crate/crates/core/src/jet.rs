//! Truncated multivariate Taylor jets over real coordinates, with Wirtinger extraction.
//!
//! A jet stores `f(x0 + dx)` as a polynomial in the tracked real variables up to a fixed
//! total degree. Monomials are ordered by degree first, so a lower-order jet over the same
//! variables is a prefix of a higher-order one and truncation is a slice.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub const MAX_ORDER: usize = 4;
pub const MAX_TRACKED: usize = 8;

type C64 = Complex64;

/// A complex coordinate of the total space: base `z^i` or fiber `ξ^i` (0-based).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Coord {
    Base(usize),
    Fiber(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Part {
    Re,
    Im,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RealVar {
    pub coord: Coord,
    pub part: Part,
}

impl RealVar {
    pub fn new(coord: Coord, part: Part) -> Self {
        RealVar { coord, part }
    }
}

impl fmt::Display for RealVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = match self.part {
            Part::Re => "Re",
            Part::Im => "Im",
        };
        match self.coord {
            Coord::Base(i) => write!(f, "{p} z{}", i + 1),
            Coord::Fiber(i) => write!(f, "{p} xi{}", i + 1),
        }
    }
}

/// Both real parts of the given complex coordinates, in order.
pub fn real_vars(coords: &[Coord]) -> Vec<RealVar> {
    coords
        .iter()
        .flat_map(|&c| [RealVar::new(c, Part::Re), RealVar::new(c, Part::Im)])
        .collect()
}

type Mono = [u8; MAX_TRACKED];

/// Monomial tables shared by all jets over one variable list and order.
pub struct JetSpace {
    vars: Vec<RealVar>,
    order: usize,
    monomials: Vec<Mono>,
    index: HashMap<Mono, usize>,
    // products[a] = [(b, c)]: mono[a] * mono[b] = mono[c] with total degree <= order
    products: Vec<Vec<(u32, u32)>>,
    // shift[v][t] = source index of mono[t] + e_v, for t of degree < order
    shift: Vec<Vec<u32>>,
}

impl fmt::Debug for JetSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("JetSpace")
            .field("vars", &self.vars)
            .field("order", &self.order)
            .field("len", &self.monomials.len())
            .finish()
    }
}

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let mut r = 1usize;
    for i in 0..k {
        r = r * (n - i) / (i + 1);
    }
    r
}

/// Number of monomials of total degree at most `order` in `vars` variables.
pub fn coefficient_count(vars: usize, order: usize) -> usize {
    binomial(vars + order, order)
}

fn monomials_of_degree(m: usize, d: usize, out: &mut Vec<Mono>) {
    fn rec(pos: usize, m: usize, left: usize, cur: &mut Mono, out: &mut Vec<Mono>) {
        if pos + 1 == m {
            cur[pos] = left as u8;
            out.push(*cur);
            cur[pos] = 0;
            return;
        }
        for e in (0..=left).rev() {
            cur[pos] = e as u8;
            rec(pos + 1, m, left - e, cur, out);
        }
        cur[pos] = 0;
    }
    if m == 0 {
        if d == 0 {
            out.push([0; MAX_TRACKED]);
        }
        return;
    }
    let mut cur = [0u8; MAX_TRACKED];
    rec(0, m, d, &mut cur, out);
}

impl JetSpace {
    fn build(vars: Vec<RealVar>, order: usize) -> Self {
        let m = vars.len();
        let mut monomials = Vec::new();
        let mut prefix = Vec::with_capacity(order + 1);
        for d in 0..=order {
            monomials_of_degree(m, d, &mut monomials);
            prefix.push(monomials.len());
        }
        let degree: Vec<u8> = monomials.iter().map(|a| a.iter().sum()).collect();
        let index: HashMap<Mono, usize> =
            monomials.iter().enumerate().map(|(i, a)| (*a, i)).collect();
        let mut products = Vec::with_capacity(monomials.len());
        for (ia, a) in monomials.iter().enumerate() {
            let mut row = Vec::new();
            let room = order - degree[ia] as usize;
            for ib in 0..prefix[room] {
                let b = &monomials[ib];
                let mut c = [0u8; MAX_TRACKED];
                for v in 0..m {
                    c[v] = a[v] + b[v];
                }
                row.push((ib as u32, index[&c] as u32));
            }
            products.push(row);
        }
        let mut shift = Vec::with_capacity(m);
        let below = if order == 0 { 0 } else { prefix[order - 1] };
        for v in 0..m {
            let mut col = Vec::with_capacity(below);
            for t in monomials.iter().take(below) {
                let mut s = *t;
                s[v] += 1;
                col.push(index[&s] as u32);
            }
            shift.push(col);
        }
        JetSpace { vars, order, monomials, index, products, shift }
    }

    /// Shared space for the given variables and order, built once per process.
    pub fn get(vars: &[RealVar], order: usize) -> Result<Arc<JetSpace>> {
        if order > MAX_ORDER {
            return Err(Error::InvalidArgument(format!(
                "jet order {order} exceeds the cap {MAX_ORDER}"
            )));
        }
        if vars.len() > MAX_TRACKED {
            return Err(Error::InvalidArgument(format!(
                "{} tracked variables exceed the cap {MAX_TRACKED}",
                vars.len()
            )));
        }
        for (i, v) in vars.iter().enumerate() {
            if vars[..i].contains(v) {
                return Err(Error::InvalidArgument(format!("variable {v} tracked twice")));
            }
        }
        static CACHE: OnceLock<Mutex<HashMap<(Vec<RealVar>, usize), Arc<JetSpace>>>> =
            OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let key = (vars.to_vec(), order);
        if let Some(s) = cache.lock().unwrap().get(&key) {
            return Ok(s.clone());
        }
        let space = Arc::new(JetSpace::build(vars.to_vec(), order));
        Ok(cache.lock().unwrap().entry(key).or_insert(space).clone())
    }

    pub fn vars(&self) -> &[RealVar] {
        &self.vars
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn len(&self) -> usize {
        self.monomials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }

    pub fn var_index(&self, v: RealVar) -> Option<usize> {
        self.vars.iter().position(|&w| w == v)
    }

    pub fn monomial(&self, i: usize) -> &[u8] {
        &self.monomials[i][..self.vars.len()]
    }

    pub fn monomial_index(&self, exps: &[u8]) -> Option<usize> {
        if exps.len() != self.vars.len() {
            return None;
        }
        let mut key = [0u8; MAX_TRACKED];
        key[..exps.len()].copy_from_slice(exps);
        self.index.get(&key).copied()
    }

    fn same_vars(&self, other: &JetSpace) -> bool {
        self.vars == other.vars
    }
}

/// Coefficient field of a jet: real or complex.
pub trait Coeff:
    Copy
    + Send
    + Sync
    + fmt::Debug
    + PartialEq
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
    + 'static
{
    fn zero() -> Self;
    fn one() -> Self;
    fn from_f64(v: f64) -> Self;
    fn is_zero(&self) -> bool;
    fn scale(self, s: f64) -> Self;
    fn sqrt(self) -> Self;
    fn ln(self) -> Self;
    fn exp(self) -> Self;
    fn powf(self, p: f64) -> Self;
    fn to_c64(self) -> C64;
    fn conj(self) -> Self;
}

impl Coeff for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_f64(v: f64) -> Self {
        v
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn scale(self, s: f64) -> Self {
        self * s
    }
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    fn ln(self) -> Self {
        f64::ln(self)
    }
    fn exp(self) -> Self {
        f64::exp(self)
    }
    fn powf(self, p: f64) -> Self {
        f64::powf(self, p)
    }
    fn to_c64(self) -> C64 {
        C64::new(self, 0.0)
    }
    fn conj(self) -> Self {
        self
    }
}

impl Coeff for C64 {
    fn zero() -> Self {
        C64::new(0.0, 0.0)
    }
    fn one() -> Self {
        C64::new(1.0, 0.0)
    }
    fn from_f64(v: f64) -> Self {
        C64::new(v, 0.0)
    }
    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }
    fn scale(self, s: f64) -> Self {
        self * s
    }
    fn sqrt(self) -> Self {
        C64::sqrt(self)
    }
    fn ln(self) -> Self {
        C64::ln(self)
    }
    fn exp(self) -> Self {
        C64::exp(self)
    }
    fn powf(self, p: f64) -> Self {
        C64::powf(self, p)
    }
    fn to_c64(self) -> C64 {
        self
    }
    fn conj(self) -> Self {
        C64::conj(&self)
    }
}

/// Truncated Taylor polynomial. Coefficient `c[i]` multiplies `dx^mono[i]`, so the
/// real partial derivative `∂^α f` equals `α! c[α]`.
#[derive(Clone)]
pub struct Jet<T: Coeff> {
    space: Arc<JetSpace>,
    c: Vec<T>,
}

impl<T: Coeff> fmt::Debug for Jet<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Jet").field("order", &self.space.order).field("c", &self.c).finish()
    }
}

impl<T: Coeff> Jet<T> {
    pub fn constant(space: &Arc<JetSpace>, v: T) -> Self {
        let mut c = vec![T::zero(); space.len()];
        c[0] = v;
        Jet { space: space.clone(), c }
    }

    /// The jet of the tracked variable `var` at value `v`.
    pub fn variable(space: &Arc<JetSpace>, var: usize, v: T) -> Self {
        let mut j = Jet::constant(space, v);
        if space.order >= 1 {
            j.c[1 + var] = T::one();
        }
        j
    }

    pub fn from_coefficients(space: &Arc<JetSpace>, c: Vec<T>) -> Result<Self> {
        if c.len() != space.len() {
            return Err(Error::InvalidArgument(format!(
                "expected {} coefficients, got {}",
                space.len(),
                c.len()
            )));
        }
        Ok(Jet { space: space.clone(), c })
    }

    pub fn space(&self) -> &Arc<JetSpace> {
        &self.space
    }

    pub fn order(&self) -> usize {
        self.space.order
    }

    pub fn coefficients(&self) -> &[T] {
        &self.c
    }

    pub fn value(&self) -> T {
        self.c[0]
    }

    pub fn truncate(&self, order: usize) -> Jet<T> {
        if order >= self.space.order {
            return self.clone();
        }
        let space = JetSpace::get(&self.space.vars, order).expect("valid truncation");
        let len = space.len();
        Jet { space, c: self.c[..len].to_vec() }
    }

    fn common(&self, other: &Jet<T>) -> Arc<JetSpace> {
        if Arc::ptr_eq(&self.space, &other.space) {
            return self.space.clone();
        }
        assert!(self.space.same_vars(&other.space), "jets over different variables");
        if self.space.order <= other.space.order {
            self.space.clone()
        } else {
            other.space.clone()
        }
    }

    pub fn map_coeffs<U: Coeff>(&self, f: impl Fn(T) -> U) -> Jet<U> {
        Jet { space: self.space.clone(), c: self.c.iter().map(|&x| f(x)).collect() }
    }

    pub fn to_complex(&self) -> Jet<C64> {
        self.map_coeffs(|x| x.to_c64())
    }

    pub fn conj(&self) -> Jet<T> {
        self.map_coeffs(|x| x.conj())
    }

    pub fn scale(&self, s: T) -> Jet<T> {
        self.map_coeffs(|x| x * s)
    }

    pub fn add_scalar(mut self, s: T) -> Jet<T> {
        self.c[0] += s;
        self
    }

    fn mul_slices(space: &JetSpace, x: &[T], y: &[T]) -> Vec<T> {
        let len = space.len();
        let mut out = vec![T::zero(); len];
        for a in 0..len {
            let xa = x[a];
            if xa.is_zero() {
                continue;
            }
            for &(b, c) in &space.products[a] {
                out[c as usize] += xa * y[b as usize];
            }
        }
        out
    }

    pub fn mul_ref(&self, other: &Jet<T>) -> Jet<T> {
        let space = self.common(other);
        let c = Self::mul_slices(&space, &self.c, &other.c);
        Jet { space, c }
    }

    fn add_ref(&self, other: &Jet<T>, sign: f64) -> Jet<T> {
        let space = self.common(other);
        let len = space.len();
        let c = (0..len).map(|i| self.c[i] + other.c[i].scale(sign)).collect();
        Jet { space, c }
    }

    /// `Σ_m d[m] (f - f0)^m`, the composition of a univariate Taylor series with `self`.
    pub fn compose(&self, d: &[T]) -> Jet<T> {
        let k = self.space.order.min(d.len().saturating_sub(1));
        let mut du = self.c.clone();
        du[0] = T::zero();
        if k == 0 {
            return Jet::constant(&self.space, d[0]);
        }
        let mut r: Vec<T> = du.iter().map(|&x| x * d[k]).collect();
        r[0] += d[k - 1];
        for m in (0..k - 1).rev() {
            r = Self::mul_slices(&self.space, &r, &du);
            r[0] += d[m];
        }
        Jet { space: self.space.clone(), c: r }
    }

    fn series_len(&self) -> usize {
        self.space.order + 1
    }

    pub fn recip(&self) -> Jet<T> {
        let u0 = self.c[0];
        let inv = T::one() / u0;
        let mut d = Vec::with_capacity(self.series_len());
        let mut p = inv;
        for m in 0..self.series_len() {
            d.push(if m % 2 == 0 { p } else { -p });
            p = p * inv;
        }
        self.compose(&d)
    }

    pub fn powf(&self, e: f64) -> Jet<T> {
        let u0 = self.c[0];
        let inv = T::one() / u0;
        let mut d = Vec::with_capacity(self.series_len());
        let mut term = u0.powf(e);
        let mut binom = 1.0;
        for m in 0..self.series_len() {
            d.push(term.scale(binom));
            binom *= (e - m as f64) / (m as f64 + 1.0);
            term = term * inv;
        }
        self.compose(&d)
    }

    pub fn sqrt(&self) -> Jet<T> {
        self.powf(0.5)
    }

    pub fn ln(&self) -> Jet<T> {
        let u0 = self.c[0];
        let inv = T::one() / u0;
        let mut d = vec![u0.ln()];
        let mut p = inv;
        for m in 1..self.series_len() {
            let s = if m % 2 == 1 { 1.0 } else { -1.0 } / m as f64;
            d.push(p.scale(s));
            p = p * inv;
        }
        self.compose(&d)
    }

    pub fn exp(&self) -> Jet<T> {
        let e0 = self.c[0].exp();
        let mut d = Vec::with_capacity(self.series_len());
        let mut fact = 1.0;
        for m in 0..self.series_len() {
            if m > 0 {
                fact *= m as f64;
            }
            d.push(e0.scale(1.0 / fact));
        }
        self.compose(&d)
    }

    /// Real partial derivative along tracked variable `v`, one order lower.
    pub fn partial(&self, v: usize) -> Result<Jet<T>> {
        let order = self.space.order;
        if order == 0 {
            return Err(Error::InvalidArgument("cannot differentiate an order-0 jet".into()));
        }
        let lower = JetSpace::get(&self.space.vars, order - 1)?;
        let c = self.space.shift[v]
            .iter()
            .map(|&s| {
                let e = self.space.monomials[s as usize][v] as f64;
                self.c[s as usize].scale(e)
            })
            .collect::<Vec<_>>();
        debug_assert_eq!(c.len(), lower.len());
        Ok(Jet { space: lower, c })
    }

    fn coord_indices(&self, coord: Coord) -> Result<(usize, usize)> {
        let re = self.space.var_index(RealVar::new(coord, Part::Re));
        let im = self.space.var_index(RealVar::new(coord, Part::Im));
        match (re, im) {
            (Some(a), Some(b)) => Ok((a, b)),
            _ => Err(Error::Untracked(describe_coord(coord))),
        }
    }

    /// Wirtinger derivative `∂/∂ζ` (holo) or `∂/∂ζ̄` as a jet one order lower.
    pub fn wirtinger_d(&self, coord: Coord, holo: bool) -> Result<Jet<C64>> {
        let (a, b) = self.coord_indices(coord)?;
        let dx = self.partial(a)?.to_complex();
        let dy = self.partial(b)?.to_complex();
        let s = if holo { C64::new(0.0, -0.5) } else { C64::new(0.0, 0.5) };
        let c = dx.c.iter().zip(dy.c.iter()).map(|(&x, &y)| x * 0.5 + y * s).collect();
        Ok(Jet { space: dx.space, c })
    }

    /// First-order Wirtinger derivative at the expansion point.
    pub fn wirtinger1(&self, coord: Coord, holo: bool) -> Result<C64> {
        if self.space.order < 1 {
            return Err(Error::InvalidArgument("order-0 jet has no derivatives".into()));
        }
        let (a, b) = self.coord_indices(coord)?;
        let x = self.c[1 + a].to_c64();
        let y = self.c[1 + b].to_c64();
        let s = if holo { C64::new(0.0, -1.0) } else { C64::new(0.0, 1.0) };
        Ok((x + y * s) * 0.5)
    }
}

fn describe_coord(c: Coord) -> String {
    match c {
        Coord::Base(i) => format!("z{} is not tracked by this jet", i + 1),
        Coord::Fiber(i) => format!("xi{} is not tracked by this jet", i + 1),
    }
}

/// `∂^I ∂̄^J f` at the expansion point, with `I`, `J` multisets of coordinates.
pub fn wirtinger<T: Coeff>(f: &Jet<T>, holo: &[Coord], anti: &[Coord]) -> Result<C64> {
    let k = holo.len() + anti.len();
    if k > f.order() {
        return Err(Error::InvalidArgument(format!(
            "derivative of order {k} requested from a jet of order {}",
            f.order()
        )));
    }
    let space = &f.space;
    let mut factors = Vec::with_capacity(k);
    for (c, h) in holo.iter().map(|&c| (c, true)).chain(anti.iter().map(|&c| (c, false))) {
        let (a, b) = f.coord_indices(c)?;
        let sy = if h { C64::new(0.0, -0.5) } else { C64::new(0.0, 0.5) };
        factors.push([(a, C64::new(0.5, 0.0)), (b, sy)]);
    }
    let m = space.vars.len();
    let mut total = C64::new(0.0, 0.0);
    for mask in 0..(1usize << k) {
        let mut exps = [0u8; MAX_TRACKED];
        let mut w = C64::new(1.0, 0.0);
        for (bit, fac) in factors.iter().enumerate() {
            let (v, s) = fac[(mask >> bit) & 1];
            exps[v] += 1;
            w *= s;
        }
        let idx = space.index[&exps];
        let fact: f64 = exps[..m].iter().map(|&e| (1..=e as u64).product::<u64>() as f64).product();
        total += w * f.c[idx].to_c64() * fact;
    }
    Ok(total)
}

macro_rules! jet_binops {
    ($tr:ident, $m:ident, $body:expr) => {
        impl<T: Coeff> $tr<Jet<T>> for Jet<T> {
            type Output = Jet<T>;
            fn $m(self, rhs: Jet<T>) -> Jet<T> {
                let f: fn(&Jet<T>, &Jet<T>) -> Jet<T> = $body;
                f(&self, &rhs)
            }
        }
        impl<'a, T: Coeff> $tr<&'a Jet<T>> for &'a Jet<T> {
            type Output = Jet<T>;
            fn $m(self, rhs: &'a Jet<T>) -> Jet<T> {
                let f: fn(&Jet<T>, &Jet<T>) -> Jet<T> = $body;
                f(self, rhs)
            }
        }
    };
}

jet_binops!(Add, add, |a, b| a.add_ref(b, 1.0));
jet_binops!(Sub, sub, |a, b| a.add_ref(b, -1.0));
jet_binops!(Mul, mul, |a, b| a.mul_ref(b));
jet_binops!(Div, div, |a, b| a.mul_ref(&b.recip()));

impl<T: Coeff> Neg for Jet<T> {
    type Output = Jet<T>;
    fn neg(self) -> Jet<T> {
        self.map_coeffs(|x| -x)
    }
}

impl<T: Coeff> Add<T> for Jet<T> {
    type Output = Jet<T>;
    fn add(self, rhs: T) -> Jet<T> {
        self.add_scalar(rhs)
    }
}

impl<T: Coeff> Sub<T> for Jet<T> {
    type Output = Jet<T>;
    fn sub(self, rhs: T) -> Jet<T> {
        self.add_scalar(-rhs)
    }
}

impl<T: Coeff> Mul<T> for Jet<T> {
    type Output = Jet<T>;
    fn mul(self, rhs: T) -> Jet<T> {
        self.scale(rhs)
    }
}

impl<T: Coeff> Div<T> for Jet<T> {
    type Output = Jet<T>;
    fn div(self, rhs: T) -> Jet<T> {
        self.scale(T::one() / rhs)
    }
}

/// Real scalars that metric formulas are written over: plain `f64` or a real jet.
pub trait Scalar:
    Clone
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Add<f64, Output = Self>
    + Sub<f64, Output = Self>
    + Mul<f64, Output = Self>
    + Div<f64, Output = Self>
{
    fn sqrt(&self) -> Self;
    fn ln(&self) -> Self;
    fn exp(&self) -> Self;
    fn powf(&self, p: f64) -> Self;
    fn recip(&self) -> Self;
    fn value(&self) -> f64;
    /// A constant in the same space as `self`.
    fn lift(&self, v: f64) -> Self;
}

impl Scalar for f64 {
    fn sqrt(&self) -> Self {
        f64::sqrt(*self)
    }
    fn ln(&self) -> Self {
        f64::ln(*self)
    }
    fn exp(&self) -> Self {
        f64::exp(*self)
    }
    fn powf(&self, p: f64) -> Self {
        f64::powf(*self, p)
    }
    fn recip(&self) -> Self {
        1.0 / *self
    }
    fn value(&self) -> f64 {
        *self
    }
    fn lift(&self, v: f64) -> Self {
        v
    }
}

impl Scalar for Jet<f64> {
    fn sqrt(&self) -> Self {
        Jet::sqrt(self)
    }
    fn ln(&self) -> Self {
        Jet::ln(self)
    }
    fn exp(&self) -> Self {
        Jet::exp(self)
    }
    fn powf(&self, p: f64) -> Self {
        Jet::powf(self, p)
    }
    fn recip(&self) -> Self {
        Jet::recip(self)
    }
    fn value(&self) -> f64 {
        self.c[0]
    }
    fn lift(&self, v: f64) -> Self {
        Jet::constant(&self.space, v)
    }
}

/// A complex number over a real scalar type.
#[derive(Clone, Debug)]
pub struct Cx<S> {
    pub re: S,
    pub im: S,
}

impl<S: Scalar> Cx<S> {
    pub fn new(re: S, im: S) -> Self {
        Cx { re, im }
    }

    pub fn from_real(re: S) -> Self {
        let im = re.lift(0.0);
        Cx { re, im }
    }

    pub fn abs2(&self) -> S {
        self.re.clone() * self.re.clone() + self.im.clone() * self.im.clone()
    }

    pub fn conj(&self) -> Self {
        Cx { re: self.re.clone(), im: -self.im.clone() }
    }

    pub fn scale(&self, s: &S) -> Self {
        Cx { re: self.re.clone() * s.clone(), im: self.im.clone() * s.clone() }
    }

    pub fn scale_f(&self, s: f64) -> Self {
        Cx { re: self.re.clone() * s, im: self.im.clone() * s }
    }

    pub fn mul_c64(&self, c: C64) -> Self {
        Cx {
            re: self.re.clone() * c.re - self.im.clone() * c.im,
            im: self.re.clone() * c.im + self.im.clone() * c.re,
        }
    }

    pub fn add_c64(&self, c: C64) -> Self {
        Cx { re: self.re.clone() + c.re, im: self.im.clone() + c.im }
    }

    pub fn value(&self) -> C64 {
        C64::new(self.re.value(), self.im.value())
    }

    pub fn lift(&self, c: C64) -> Self {
        Cx { re: self.re.lift(c.re), im: self.re.lift(c.im) }
    }

    pub fn recip(&self) -> Self {
        let inv = self.abs2().recip();
        Cx { re: self.re.clone() * inv.clone(), im: -(self.im.clone() * inv) }
    }
}

impl<S: Scalar> Add for Cx<S> {
    type Output = Cx<S>;
    fn add(self, r: Cx<S>) -> Cx<S> {
        Cx { re: self.re + r.re, im: self.im + r.im }
    }
}

impl<S: Scalar> Sub for Cx<S> {
    type Output = Cx<S>;
    fn sub(self, r: Cx<S>) -> Cx<S> {
        Cx { re: self.re - r.re, im: self.im - r.im }
    }
}

impl<S: Scalar> Mul for Cx<S> {
    type Output = Cx<S>;
    fn mul(self, r: Cx<S>) -> Cx<S> {
        Cx {
            re: self.re.clone() * r.re.clone() - self.im.clone() * r.im.clone(),
            im: self.re * r.im + self.im * r.re,
        }
    }
}

impl<S: Scalar> Neg for Cx<S> {
    type Output = Cx<S>;
    fn neg(self) -> Cx<S> {
        Cx { re: -self.re, im: -self.im }
    }
}

impl Cx<Jet<f64>> {
    /// The complex-coefficient jet `re + i im`.
    pub fn to_jet(&self) -> Jet<C64> {
        let c = self
            .re
            .c
            .iter()
            .zip(&self.im.c)
            .map(|(&a, &b)| C64::new(a, b))
            .collect();
        Jet { space: self.re.common(&self.im), c }
    }
}

/// Seeded jet variables at a point of the total space.
#[derive(Clone, Debug)]
pub struct JetPoint {
    pub z: Vec<Cx<Jet<f64>>>,
    pub xi: Vec<Cx<Jet<f64>>>,
    space: Arc<JetSpace>,
}

impl JetPoint {
    pub fn space(&self) -> &Arc<JetSpace> {
        &self.space
    }

    pub fn order(&self) -> usize {
        self.space.order
    }
}

/// Lift `(z, ξ)` to jets tracking the listed real coordinates up to `order`.
pub fn seed(z: &[C64], xi: &[C64], order: usize, tracked: &[RealVar]) -> Result<JetPoint> {
    if xi.iter().all(|x| x.norm_sqr() == 0.0) {
        return Err(Error::InvalidArgument("fiber vector is zero".into()));
    }
    if order == 0 || order > MAX_ORDER {
        return Err(Error::InvalidArgument(format!(
            "jet order must lie in 1..={MAX_ORDER}, got {order}"
        )));
    }
    for v in tracked {
        let (i, n) = match v.coord {
            Coord::Base(i) => (i, z.len()),
            Coord::Fiber(i) => (i, xi.len()),
        };
        if i >= n {
            return Err(Error::InvalidArgument(format!("tracked variable {v} out of range")));
        }
    }
    let space = JetSpace::get(tracked, order)?;
    let lift = |coord: Coord, val: C64| -> Cx<Jet<f64>> {
        let part = |p: Part, x: f64| match tracked.iter().position(|&v| v == RealVar::new(coord, p)) {
            Some(k) => Jet::variable(&space, k, x),
            None => Jet::constant(&space, x),
        };
        Cx { re: part(Part::Re, val.re), im: part(Part::Im, val.im) }
    };
    let zj = z.iter().enumerate().map(|(i, &v)| lift(Coord::Base(i), v)).collect();
    let xj = xi.iter().enumerate().map(|(i, &v)| lift(Coord::Fiber(i), v)).collect();
    Ok(JetPoint { z: zj, xi: xj, space })
}

/// All 4n real coordinates of the total space, base first.
pub fn all_vars(n: usize) -> Vec<RealVar> {
    let mut coords: Vec<Coord> = (0..n).map(Coord::Base).collect();
    coords.extend((0..n).map(Coord::Fiber));
    real_vars(&coords)
}

/// The 2n real fiber coordinates.
pub fn fiber_vars(n: usize) -> Vec<RealVar> {
    real_vars(&(0..n).map(Coord::Fiber).collect::<Vec<_>>())
}

/// The 2n real base coordinates.
pub fn base_vars(n: usize) -> Vec<RealVar> {
    real_vars(&(0..n).map(Coord::Base).collect::<Vec<_>>())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn counts_match_binomials() {
        let s = JetSpace::get(&fiber_vars(1), 2).unwrap();
        assert_eq!(s.len(), 6);
        let s = JetSpace::get(&all_vars(2), 4).unwrap();
        assert_eq!(s.len(), 495);
        let pairs: usize = s.products.iter().map(|r| r.len()).sum();
        assert_eq!(pairs, 4845);
    }

    #[test]
    fn rejects_bad_seeds() {
        let t = fiber_vars(1);
        assert!(seed(&[c(0.0, 0.0)], &[c(0.0, 0.0)], 2, &t).is_err());
        assert!(seed(&[c(0.0, 0.0)], &[c(1.0, 0.0)], 5, &t).is_err());
        let dup = vec![t[0], t[0]];
        assert!(seed(&[c(0.0, 0.0)], &[c(1.0, 0.0)], 2, &dup).is_err());
    }

    #[test]
    fn modulus_squared_mixed_derivative() {
        let p = seed(&[c(0.0, 0.0)], &[c(2.0, 1.0)], 2, &fiber_vars(1)).unwrap();
        let f = p.xi[0].abs2();
        let x = Coord::Fiber(0);
        assert!((wirtinger(&f, &[x], &[x]).unwrap() - 1.0).norm() < 1e-14);
        let sq = (p.xi[0].clone() * p.xi[0].clone()).to_jet();
        assert!(wirtinger(&sq, &[], &[x]).unwrap().norm() < 1e-14);
        assert!((wirtinger(&sq, &[x], &[]).unwrap() - c(4.0, 2.0)).norm() < 1e-14);
    }

    #[test]
    fn quartic_fundamental_tensor_entry() {
        let p = seed(&[c(0.0, 0.0); 2], &[c(1.0, 0.0), c(1.0, 0.0)], 2, &fiber_vars(2)).unwrap();
        let a = p.xi[0].abs2();
        let b = p.xi[1].abs2();
        let g = (a.clone() * a + b.clone() * b).sqrt();
        let x = Coord::Fiber(0);
        let v = wirtinger(&g, &[x], &[x]).unwrap();
        assert!((v - 3.0 * 2f64.sqrt() / 4.0).norm() < 1e-14);
    }

    #[test]
    fn elementary_functions_match_closed_forms() {
        let s = JetSpace::get(&base_vars(1), 4).unwrap();
        let x = Jet::variable(&s, 0, 0.7);
        // third derivative in Re z is coefficient * 3!
        let checks: Vec<(Jet<f64>, f64)> = vec![
            (x.exp(), 0.7f64.exp()),
            (x.ln(), 2.0 / 0.7f64.powi(3)),
            (x.sqrt(), 0.375 * 0.7f64.powf(-2.5)),
            (x.recip(), -6.0 / 0.7f64.powi(4)),
            (x.powf(1.5), 1.5 * 0.5 * -0.5 * 0.7f64.powf(-1.5)),
        ];
        let i3 = s.monomial_index(&[3, 0]).unwrap();
        for (j, want) in checks {
            assert!((j.coefficients()[i3] * 6.0 - want).abs() < 1e-12 * want.abs().max(1.0));
        }
    }

    #[test]
    fn partial_lowers_order_consistently() {
        let s = JetSpace::get(&base_vars(1), 3).unwrap();
        let x = Jet::variable(&s, 0, 0.3);
        let y = Jet::variable(&s, 1, -0.2);
        let f = (x.clone() * y.clone()).exp() + x.clone() * x.clone() * y;
        let fx = f.partial(0).unwrap();
        assert_eq!(fx.order(), 2);
        let fxy = fx.partial(1).unwrap();
        let fyx = f.partial(1).unwrap().partial(0).unwrap();
        for (a, b) in fxy.coefficients().iter().zip(fyx.coefficients()) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn untracked_coordinate_is_reported() {
        let p = seed(&[c(0.1, 0.0)], &[c(1.0, 0.0)], 2, &fiber_vars(1)).unwrap();
        let f = p.xi[0].abs2();
        let err = wirtinger(&f, &[Coord::Base(0)], &[]).unwrap_err();
        assert!(err.to_string().contains("z1"));
    }

    #[test]
    fn mixed_order_arithmetic_truncates() {
        let p3 = seed(&[c(0.0, 0.0)], &[c(1.0, 1.0)], 3, &fiber_vars(1)).unwrap();
        let f = p3.xi[0].abs2();
        let g = f.truncate(1);
        let h = &f * &g;
        assert_eq!(h.order(), 1);
        assert!((h.value() - 4.0).abs() < 1e-15);
    }
}
