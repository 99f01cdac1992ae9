//! One-dimensional rules, compensated summation and Richardson tableaux.

use std::f64::consts::PI;

/// Gauss–Legendre nodes and weights on `[a, b]`.
pub fn gauss_legendre(n: usize, a: f64, b: f64) -> Vec<(f64, f64)> {
    assert!(n >= 1);
    let half = (b - a) / 2.0;
    let mid = (b + a) / 2.0;
    if n == 1 {
        return vec![(mid, 2.0 * half)];
    }
    let mut out = vec![(0.0, 0.0); n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        out[i] = (mid - half * x, half * w);
        out[n - 1 - i] = (mid + half * x, half * w);
    }
    out
}

/// Equispaced periodic trapezoid nodes on `[0, period)` with a fractional offset.
pub fn periodic_trapezoid(n: usize, period: f64, offset: f64) -> Vec<(f64, f64)> {
    assert!(n >= 1);
    let h = period / n as f64;
    (0..n).map(|k| ((k as f64 + offset) * h, h)).collect()
}

/// Neumaier compensated sum, in the given order.
pub fn neumaier_sum<I: IntoIterator<Item = f64>>(it: I) -> f64 {
    let mut s = 0.0f64;
    let mut c = 0.0f64;
    for x in it {
        let t = s + x;
        if s.abs() >= x.abs() {
            c += (s - t) + x;
        } else {
            c += (x - t) + s;
        }
        s = t;
    }
    s + c
}

/// Complex Neumaier sum.
pub fn neumaier_sum_c<I: IntoIterator<Item = num_complex::Complex64>>(
    it: I,
) -> num_complex::Complex64 {
    let v: Vec<_> = it.into_iter().collect();
    num_complex::Complex64::new(
        neumaier_sum(v.iter().map(|z| z.re)),
        neumaier_sum(v.iter().map(|z| z.im)),
    )
}

/// A value with an error estimate.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

impl Estimate {
    pub fn new(value: f64, error: f64) -> Self {
        Estimate { value, error: error.abs() }
    }

    pub fn exact(value: f64) -> Self {
        Estimate { value, error: 0.0 }
    }
}

/// Richardson extrapolation to `h → 0` of samples `(h_k, f(h_k))`, assuming an error
/// expansion in integer powers `h^p, h^{p+1}, …` starting at `p`. The steps are assumed
/// to shrink by a fixed ratio.
/// Returns the extrapolated value and the difference between the last two diagonal entries.
pub fn richardson(samples: &[(f64, f64)], first_power: u32) -> Estimate {
    assert!(!samples.is_empty());
    let m = samples.len();
    let mut t: Vec<Vec<f64>> = vec![samples.iter().map(|s| s.1).collect()];
    for j in 1..m {
        let prev = &t[j - 1];
        let p = (first_power + j as u32 - 1) as i32;
        let row: Vec<f64> = (j..m)
            .map(|i| {
                let r = (samples[i - 1].0 / samples[i].0).powi(p);
                let a = prev[i - j + 1];
                let b = prev[i - j];
                (r * a - b) / (r - 1.0)
            })
            .collect();
        t.push(row);
    }
    let best = *t[m - 1].last().unwrap();
    let err = if m >= 2 { (best - *t[m - 2].last().unwrap()).abs() } else { f64::NAN };
    Estimate::new(best, err)
}
