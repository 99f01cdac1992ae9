//! Small dense complex matrices.

use num_complex::Complex64;

type C64 = Complex64;
pub type CMat = Vec<Vec<C64>>;

pub fn zeros(n: usize) -> CMat {
    vec![vec![C64::new(0.0, 0.0); n]; n]
}

pub fn identity(n: usize) -> CMat {
    let mut m = zeros(n);
    for (i, r) in m.iter_mut().enumerate() {
        r[i] = C64::new(1.0, 0.0);
    }
    m
}

pub fn matmul(a: &CMat, b: &CMat) -> CMat {
    let n = a.len();
    let k = b.len();
    let m = b[0].len();
    (0..n)
        .map(|i| (0..m).map(|j| (0..k).map(|l| a[i][l] * b[l][j]).sum()).collect())
        .collect()
}

pub fn matvec(a: &CMat, v: &[C64]) -> Vec<C64> {
    a.iter().map(|r| r.iter().zip(v).map(|(x, y)| x * y).sum()).collect()
}

pub fn transpose(a: &CMat) -> CMat {
    let n = a.len();
    (0..a[0].len()).map(|j| (0..n).map(|i| a[i][j]).collect()).collect()
}

pub fn conj(a: &CMat) -> CMat {
    a.iter().map(|r| r.iter().map(|x| x.conj()).collect()).collect()
}

pub fn sub(a: &CMat, b: &CMat) -> CMat {
    a.iter().zip(b).map(|(r, s)| r.iter().zip(s).map(|(x, y)| x - y).collect()).collect()
}

pub fn max_abs(a: &CMat) -> f64 {
    a.iter().flatten().map(|x| x.norm()).fold(0.0, f64::max)
}

/// LU with partial pivoting; returns `None` for an exactly singular matrix.
fn lu(a: &CMat) -> Option<(CMat, Vec<usize>, f64)> {
    let n = a.len();
    let mut m = a.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut sign = 1.0;
    for k in 0..n {
        let p = (k..n).max_by(|&i, &j| m[i][k].norm().total_cmp(&m[j][k].norm()))?;
        if m[p][k].norm() == 0.0 {
            return None;
        }
        if p != k {
            m.swap(p, k);
            perm.swap(p, k);
            sign = -sign;
        }
        for i in k + 1..n {
            let f = m[i][k] / m[k][k];
            m[i][k] = f;
            for j in k + 1..n {
                let t = m[k][j];
                m[i][j] -= f * t;
            }
        }
    }
    Some((m, perm, sign))
}

pub fn det(a: &CMat) -> C64 {
    match lu(a) {
        None => C64::new(0.0, 0.0),
        Some((m, _, s)) => (0..a.len()).map(|i| m[i][i]).product::<C64>() * s,
    }
}

pub fn inverse(a: &CMat) -> Option<CMat> {
    let n = a.len();
    let (m, perm, _) = lu(a)?;
    let mut inv = zeros(n);
    for col in 0..n {
        let mut x: Vec<C64> = (0..n)
            .map(|i| if perm[i] == col { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) })
            .collect();
        for i in 0..n {
            for j in 0..i {
                let t = x[j];
                x[i] -= m[i][j] * t;
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                let t = x[j];
                x[i] -= m[i][j] * t;
            }
            x[i] /= m[i][i];
        }
        for i in 0..n {
            inv[i][col] = x[i];
        }
    }
    Some(inv)
}

/// Eigenvalues of a Hermitian matrix, ascending (Jacobi on the real embedding).
pub fn hermitian_eigenvalues(a: &CMat) -> Vec<f64> {
    let n = a.len();
    let m = 2 * n;
    let mut s = vec![vec![0.0f64; m]; m];
    for i in 0..n {
        for j in 0..n {
            let h = (a[i][j] + a[j][i].conj()) * 0.5;
            s[i][j] = h.re;
            s[i + n][j + n] = h.re;
            s[i + n][j] = h.im;
            s[i][j + n] = -h.im;
        }
    }
    for _sweep in 0..100 {
        let off: f64 = (0..m).flat_map(|i| (0..m).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| s[i][j] * s[i][j])
            .sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..m {
            for q in p + 1..m {
                if s[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (s[q][q] - s[p][p]) / (2.0 * s[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * c;
                for k in 0..m {
                    let skp = s[k][p];
                    let skq = s[k][q];
                    s[k][p] = c * skp - sn * skq;
                    s[k][q] = sn * skp + c * skq;
                }
                for k in 0..m {
                    let spk = s[p][k];
                    let sqk = s[q][k];
                    s[p][k] = c * spk - sn * sqk;
                    s[q][k] = sn * spk + c * sqk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..m).map(|i| s[i][i]).collect();
    ev.sort_by(f64::total_cmp);
    // each eigenvalue appears twice in the embedding
    ev.chunks(2).map(|c| 0.5 * (c[0] + c[1])).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_and_det() {
        let a = vec![
            vec![C64::new(2.0, 0.0), C64::new(1.0, -1.0)],
            vec![C64::new(1.0, 1.0), C64::new(3.0, 0.0)],
        ];
        let inv = inverse(&a).unwrap();
        assert!(max_abs(&sub(&matmul(&a, &inv), &identity(2))) < 1e-15);
        assert!((det(&a) - C64::new(4.0, 0.0)).norm() < 1e-14);
        let ev = hermitian_eigenvalues(&a);
        // trace 5, det 4 -> 1 and 4
        assert!((ev[0] - 1.0).abs() < 1e-12 && (ev[1] - 4.0).abs() < 1e-12);
    }
}
