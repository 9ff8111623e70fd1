//! Small dense eigen-solvers for matrices too large for exact root isolation.

use alloc::vec;
use alloc::vec::Vec;

use crate::math;

pub type Matrix = Vec<Vec<f64>>;

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending.
pub fn symmetric_eigenvalues(mut a: Matrix) -> Vec<f64> {
    let n = a.len();
    let norm: f64 = a.iter().flatten().map(|x| x * x).sum();
    for _ in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        if off <= 1e-30 * norm.max(f64::MIN_POSITIVE) {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q] == 0.0 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (math::abs(theta) + math::sqrt(theta * theta + 1.0));
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / math::sqrt(t * t + 1.0);
                let s = t * c;
                for row in a.iter_mut() {
                    let (akp, akq) = (row[p], row[q]);
                    row[p] = c * akp - s * akq;
                    row[q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| a[i][i]).collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Symmetric matrix similar to `a` when `a` is tridiagonal with positive
/// products of mirrored off-diagonal entries.
pub fn symmetrize_tridiagonal(a: &Matrix) -> Option<Matrix> {
    let n = a.len();
    for i in 0..n {
        for j in 0..n {
            if i.abs_diff(j) > 1 && a[i][j] != 0.0 {
                return None;
            }
        }
    }
    let mut s = vec![vec![0.0; n]; n];
    for i in 0..n {
        s[i][i] = a[i][i];
        if i + 1 < n {
            let prod = a[i][i + 1] * a[i + 1][i];
            if prod < 0.0 || (prod == 0.0 && (a[i][i + 1] != 0.0 || a[i + 1][i] != 0.0)) {
                return None;
            }
            let off = math::sqrt(prod);
            s[i][i + 1] = off;
            s[i + 1][i] = off;
        }
    }
    Some(s)
}

/// Reduce to upper Hessenberg form by stabilised elimination.
fn hessenberg(a: &mut Matrix) {
    let n = a.len();
    for m in 1..n.saturating_sub(1) {
        let mut x = 0.0;
        let mut piv = m;
        for j in m..n {
            if math::abs(a[j][m - 1]) > math::abs(x) {
                x = a[j][m - 1];
                piv = j;
            }
        }
        if piv != m {
            a.swap(piv, m);
            for row in a.iter_mut() {
                row.swap(piv, m);
            }
        }
        if x != 0.0 {
            for i in m + 1..n {
                let y = a[i][m - 1] / x;
                if y != 0.0 {
                    for j in m - 1..n {
                        a[i][j] -= y * a[m][j];
                    }
                    for row in a.iter_mut() {
                        row[m] += y * row[i];
                    }
                }
            }
        }
    }
    for (i, row) in a.iter_mut().enumerate() {
        for x in row.iter_mut().take(i.saturating_sub(1)) {
            *x = 0.0;
        }
    }
}

/// Eigenvalues `(re, im)` of a general real matrix by Francis double-shift QR
/// on the Hessenberg form. `None` if the iteration fails to converge.
pub fn general_eigenvalues(mut a: Matrix) -> Option<Vec<(f64, f64)>> {
    let n = a.len();
    if n == 0 {
        return Some(Vec::new());
    }
    hessenberg(&mut a);
    let mut out: Vec<(f64, f64)> = Vec::with_capacity(n);
    let anorm: f64 = a.iter().flatten().map(|x| math::abs(*x)).sum();
    let mut t = 0.0;
    let mut nn = n as isize - 1;
    while nn >= 0 {
        let mut its = 0;
        loop {
            let nu = nn as usize;
            let mut l = nu;
            while l >= 1 {
                let mut s = math::abs(a[l - 1][l - 1]) + math::abs(a[l][l]);
                if s == 0.0 {
                    s = anorm;
                }
                if math::abs(a[l][l - 1]) + s == s {
                    a[l][l - 1] = 0.0;
                    break;
                }
                l -= 1;
            }
            let mut x = a[nu][nu];
            if l == nu {
                out.push((x + t, 0.0));
                nn -= 1;
                break;
            }
            let mut y = a[nu - 1][nu - 1];
            let mut w = a[nu][nu - 1] * a[nu - 1][nu];
            if l == nu - 1 {
                let p = 0.5 * (y - x);
                let q = p * p + w;
                let z = math::sqrt(math::abs(q));
                x += t;
                if q >= 0.0 {
                    let z = p + z.copysign(p);
                    out.push((x + z, 0.0));
                    out.push((if z != 0.0 { x - w / z } else { x + z }, 0.0));
                } else {
                    out.push((x + p, -z));
                    out.push((x + p, z));
                }
                nn -= 2;
                break;
            }
            if its == 60 {
                return None;
            }
            if its == 10 || its == 20 {
                t += x;
                for i in 0..=nu {
                    a[i][i] -= x;
                }
                let s = math::abs(a[nu][nu - 1]) + math::abs(a[nu - 1][nu - 2]);
                x = 0.75 * s;
                y = x;
                w = -0.4375 * s * s;
            }
            its += 1;
            let mut m = nu - 2;
            let (mut p, mut q, mut r);
            loop {
                let z = a[m][m];
                let rr = x - z;
                let ss = y - z;
                p = (rr * ss - w) / a[m + 1][m] + a[m][m + 1];
                q = a[m + 1][m + 1] - z - rr - ss;
                r = a[m + 2][m + 1];
                let s = math::abs(p) + math::abs(q) + math::abs(r);
                p /= s;
                q /= s;
                r /= s;
                if m == l {
                    break;
                }
                let u = math::abs(a[m][m - 1]) * (math::abs(q) + math::abs(r));
                let v = math::abs(p) * (math::abs(a[m - 1][m - 1]) + math::abs(z) + math::abs(a[m + 1][m + 1]));
                if u + v == v {
                    break;
                }
                m -= 1;
            }
            for i in m + 2..=nu {
                a[i][i - 2] = 0.0;
                if i != m + 2 {
                    a[i][i - 3] = 0.0;
                }
            }
            let mut k = m;
            while k < nu {
                if k != m {
                    p = a[k][k - 1];
                    q = a[k + 1][k - 1];
                    r = if k != nu - 1 { a[k + 2][k - 1] } else { 0.0 };
                    x = math::abs(p) + math::abs(q) + math::abs(r);
                    if x != 0.0 {
                        p /= x;
                        q /= x;
                        r /= x;
                    }
                }
                let s = math::sqrt(p * p + q * q + r * r).copysign(p);
                if s != 0.0 {
                    if k == m {
                        if l != m {
                            a[k][k - 1] = -a[k][k - 1];
                        }
                    } else {
                        a[k][k - 1] = -s * x;
                    }
                    p += s;
                    x = p / s;
                    y = q / s;
                    let z = r / s;
                    q /= p;
                    r /= p;
                    for j in k..=nu {
                        let mut pp = a[k][j] + q * a[k + 1][j];
                        if k != nu - 1 {
                            pp += r * a[k + 2][j];
                            a[k + 2][j] -= pp * z;
                        }
                        a[k + 1][j] -= pp * y;
                        a[k][j] -= pp * x;
                    }
                    let mmin = if nu < k + 3 { nu } else { k + 3 };
                    for row in a.iter_mut().take(mmin + 1).skip(l) {
                        let mut pp = x * row[k] + y * row[k + 1];
                        if k != nu - 1 {
                            pp += z * row[k + 2];
                            row[k + 2] -= pp * r;
                        }
                        row[k + 1] -= pp * q;
                        row[k] -= pp;
                    }
                }
                k += 1;
            }
            if l + 1 >= nu {
                break;
            }
        }
    }
    out.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    Some(out)
}

/// Solve `a x = b` by Gaussian elimination with partial pivoting.
pub fn solve(mut a: Matrix, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = a.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| math::abs(a[i][col]).total_cmp(&math::abs(a[j][col])))?;
        if a[piv][col] == 0.0 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for i in col + 1..n {
            let f = a[i][col] / a[col][col];
            if f != 0.0 {
                for j in col..n {
                    a[i][j] -= f * a[col][j];
                }
                b[i] -= f * b[col];
            }
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|j| a[i][j] * x[j]).sum();
        x[i] = (b[i] - s) / a[i][i];
    }
    Some(x)
}

/// Eigenvector for a known real eigenvalue by shifted inverse iteration,
/// normalised to unit max-norm with a positive largest entry.
pub fn eigenvector(a: &Matrix, lambda: f64) -> Vec<f64> {
    let n = a.len();
    if n == 1 {
        return vec![1.0];
    }
    let scale: f64 = a.iter().flatten().map(|x| math::abs(*x)).fold(1.0, f64::max);
    let shift = lambda + 1e-10 * scale;
    let shifted: Matrix = (0..n)
        .map(|i| (0..n).map(|j| a[i][j] - if i == j { shift } else { 0.0 }).collect())
        .collect();
    let mut v: Vec<f64> = (0..n).map(|i| 1.0 + 0.1 * i as f64).collect();
    for _ in 0..4 {
        let Some(next) = solve(shifted.clone(), v.clone()) else {
            break;
        };
        let big = next.iter().fold(0.0f64, |m, x| if math::abs(*x) > math::abs(m) { *x } else { m });
        if big == 0.0 || !big.is_finite() {
            break;
        }
        v = next.iter().map(|x| x / big).collect();
    }
    v
}
