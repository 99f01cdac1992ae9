//! Holomorphic vector fields given chart by chart.

use std::fmt;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::jet::{Cx, Jet, Scalar};
use crate::linalg::{self, CMat};

type C64 = Complex64;

/// A zero of a field, stored in the chart whose coordinate ball is used around it.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FieldZero {
    pub chart: usize,
    pub z: Vec<[f64; 2]>,
}

impl FieldZero {
    pub fn point(&self) -> Vec<C64> {
        self.z.iter().map(|p| C64::new(p[0], p[1])).collect()
    }
}

pub trait HolomorphicField: Send + Sync + fmt::Debug {
    fn name(&self) -> String;
    fn dim(&self) -> usize;
    fn value(&self, chart: usize, z: &[C64]) -> Vec<C64>;
    /// `j[i][k] = ∂X^i/∂z^k`.
    fn jacobian(&self, chart: usize, z: &[C64]) -> CMat;
    fn value_jet(&self, chart: usize, z: &[Cx<Jet<f64>>]) -> Vec<Cx<Jet<f64>>>;
    fn zeros(&self) -> Vec<FieldZero>;
}

/// `X^i = P_{chart,i}(z^i)`: each component a polynomial in its own coordinate.
#[derive(Clone, Debug)]
pub struct DiagonalPolynomialField {
    pub name: String,
    /// `coeffs[chart][i]` lists the coefficients of `P_{chart,i}`, constant term first.
    pub coeffs: Vec<Vec<Vec<C64>>>,
    pub zeros: Vec<FieldZero>,
}

fn poly(c: &[C64], z: C64) -> (C64, C64) {
    let mut v = C64::new(0.0, 0.0);
    let mut d = C64::new(0.0, 0.0);
    for &a in c.iter().rev() {
        d = d * z + v;
        v = v * z + a;
    }
    (v, d)
}

fn poly_s<S: Scalar>(c: &[C64], z: &Cx<S>) -> Cx<S> {
    let mut v = z.lift(C64::new(0.0, 0.0));
    for &a in c.iter().rev() {
        v = (v * z.clone()).add_c64(a);
    }
    v
}

impl DiagonalPolynomialField {
    fn chart(&self, chart: usize) -> &Vec<Vec<C64>> {
        &self.coeffs[chart.min(self.coeffs.len() - 1)]
    }

    /// `X = Σ c_i ∂/∂z^i` on a single chart.
    pub fn constant(c: &[C64]) -> Self {
        DiagonalPolynomialField {
            name: "constant".into(),
            coeffs: vec![c.iter().map(|&a| vec![a]).collect()],
            zeros: vec![],
        }
    }

    /// `X = Σ z^i ∂/∂z^i` on `ℂⁿ` (one chart, zero at the origin).
    pub fn euler_plane(n: usize) -> Self {
        DiagonalPolynomialField {
            name: "euler".into(),
            coeffs: vec![vec![vec![C64::new(0.0, 0.0), C64::new(1.0, 0.0)]; n]],
            zeros: vec![FieldZero { chart: 0, z: vec![[0.0, 0.0]; n] }],
        }
    }

    /// `X = Σ z^i ∂/∂z^i` on `(CP¹)ⁿ`; chart bit `i` set means the `i`-th factor uses
    /// `w = 1/z`, where the field reads `−w ∂/∂w`. One zero at the origin of each chart.
    pub fn euler_projective(n: usize) -> Self {
        let charts = 1usize << n;
        let coeffs = (0..charts)
            .map(|c| {
                (0..n)
                    .map(|i| {
                        let s = if c >> i & 1 == 1 { -1.0 } else { 1.0 };
                        vec![C64::new(0.0, 0.0), C64::new(s, 0.0)]
                    })
                    .collect()
            })
            .collect();
        let zeros = (0..charts).map(|c| FieldZero { chart: c, z: vec![[0.0, 0.0]; n] }).collect();
        DiagonalPolynomialField { name: "euler".into(), coeffs, zeros }
    }

    /// `X = z² ∂/∂z` on `CP¹` (reads `−∂/∂w` in the second chart): one degenerate zero.
    pub fn z_squared_projective() -> Self {
        DiagonalPolynomialField {
            name: "z-squared".into(),
            coeffs: vec![
                vec![vec![C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(1.0, 0.0)]],
                vec![vec![C64::new(-1.0, 0.0)]],
            ],
            zeros: vec![FieldZero { chart: 0, z: vec![[0.0, 0.0]] }],
        }
    }
}

impl HolomorphicField for DiagonalPolynomialField {
    fn name(&self) -> String {
        self.name.clone()
    }
    fn dim(&self) -> usize {
        self.coeffs[0].len()
    }
    fn value(&self, chart: usize, z: &[C64]) -> Vec<C64> {
        self.chart(chart).iter().zip(z).map(|(c, &x)| poly(c, x).0).collect()
    }
    fn jacobian(&self, chart: usize, z: &[C64]) -> CMat {
        let n = z.len();
        let mut j = linalg::zeros(n);
        for (i, c) in self.chart(chart).iter().enumerate() {
            j[i][i] = poly(c, z[i]).1;
        }
        j
    }
    fn value_jet(&self, chart: usize, z: &[Cx<Jet<f64>>]) -> Vec<Cx<Jet<f64>>> {
        self.chart(chart).iter().zip(z).map(|(c, x)| poly_s(c, x)).collect()
    }
    fn zeros(&self) -> Vec<FieldZero> {
        self.zeros.clone()
    }
}

/// The field in linearly changed coordinates `w = A z`: `X'(w) = A X(A⁻¹ w)`.
#[derive(Debug)]
pub struct LinearChangeField<F> {
    pub inner: F,
    pub a: CMat,
    pub a_inv: CMat,
}

impl<F: HolomorphicField> LinearChangeField<F> {
    pub fn new(inner: F, a: CMat) -> Result<Self> {
        let a_inv = linalg::inverse(&a).ok_or_else(|| Error::InvalidArgument("singular coordinate change".into()))?;
        Ok(LinearChangeField { inner, a, a_inv })
    }
}

fn apply_s<S: Scalar>(m: &CMat, v: &[Cx<S>]) -> Vec<Cx<S>> {
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

impl<F: HolomorphicField> HolomorphicField for LinearChangeField<F> {
    fn name(&self) -> String {
        format!("linear-change({})", self.inner.name())
    }
    fn dim(&self) -> usize {
        self.inner.dim()
    }
    fn value(&self, chart: usize, w: &[C64]) -> Vec<C64> {
        let z = linalg::matvec(&self.a_inv, w);
        linalg::matvec(&self.a, &self.inner.value(chart, &z))
    }
    fn jacobian(&self, chart: usize, w: &[C64]) -> CMat {
        let z = linalg::matvec(&self.a_inv, w);
        linalg::matmul(&linalg::matmul(&self.a, &self.inner.jacobian(chart, &z)), &self.a_inv)
    }
    fn value_jet(&self, chart: usize, w: &[Cx<Jet<f64>>]) -> Vec<Cx<Jet<f64>>> {
        let z = apply_s(&self.a_inv, w);
        apply_s(&self.a, &self.inner.value_jet(chart, &z))
    }
    fn zeros(&self) -> Vec<FieldZero> {
        self.inner
            .zeros()
            .into_iter()
            .map(|zr| {
                let w = linalg::matvec(&self.a, &zr.point());
                FieldZero { chart: zr.chart, z: w.iter().map(|c| [c.re, c.im]).collect() }
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn euler_chart_values() {
        let f = DiagonalPolynomialField::euler_projective(2);
        let z = [C64::new(0.3, 0.1), C64::new(-0.2, 0.5)];
        let v = f.value(1, &z);
        assert_eq!(v[0], -z[0]);
        assert_eq!(v[1], z[1]);
        assert_eq!(f.jacobian(3, &z)[1][1], C64::new(-1.0, 0.0));
        assert_eq!(f.zeros().len(), 4);
    }
}
