//! Symmetric tridiagonal eigenproblems: implicit-shift QL and inverse
//! iteration.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::NumericsError;

const MAX_SWEEPS: usize = 60;

/// Eigen-decomposition of the symmetric tridiagonal matrix with diagonal `d`
/// and off-diagonal `e` (`e[i]` couples `i` and `i + 1`).
///
/// Returns ascending eigenvalues and, when requested, the eigenvectors as
/// columns of a row-major `n x n` matrix in the same order.
pub fn tridiagonal_eigen(d: &[f64], e: &[f64], vectors: bool) -> Result<(Vec<f64>, Option<Vec<f64>>), NumericsError> {
    let n = d.len();
    if n == 0 {
        return Ok((Vec::new(), vectors.then(Vec::new)));
    }
    assert!(e.len() + 1 >= n, "off-diagonal too short");
    let mut d = d.to_vec();
    let mut e: Vec<f64> = e.iter().take(n - 1).copied().chain(std::iter::once(0.0)).collect();
    let mut z = if vectors {
        let mut z = vec![0.0; n * n];
        for i in 0..n {
            z[i * n + i] = 1.0;
        }
        Some(z)
    } else {
        None
    };

    let eps = f64::EPSILON;
    let mut f = 0.0;
    let mut tst1: f64 = 0.0;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 && e[m].abs() > eps * tst1 {
            m += 1;
        }
        if m > l {
            let mut sweeps = 0;
            loop {
                sweeps += 1;
                if sweeps > MAX_SWEEPS {
                    return Err(NumericsError::Convergence(format!(
                        "tridiagonal QL stalled at index {l} of {n}"
                    )));
                }
                let g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let h = g - d[l];
                for di in d.iter_mut().skip(l + 2) {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let (mut c, mut c2, mut c3) = (1.0, 1.0, 1.0);
                let el1 = e[l + 1];
                let (mut s, mut s2) = (0.0, 0.0);
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    let g = c * e[i];
                    let h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    if let Some(z) = z.as_mut() {
                        for k in 0..n {
                            let row = k * n;
                            let h = z[row + i + 1];
                            z[row + i + 1] = s * z[row + i] + c * h;
                            z[row + i] = c * z[row + i] - s * h;
                        }
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].total_cmp(&d[b]));
    let values = order.iter().map(|&i| d[i]).collect();
    let z = z.map(|z| {
        let mut out = vec![0.0; n * n];
        for (col, &src) in order.iter().enumerate() {
            for k in 0..n {
                out[k * n + col] = z[k * n + src];
            }
        }
        out
    });
    Ok((values, z))
}

/// `y = T x`.
pub fn tridiagonal_apply(d: &[f64], e: &[f64], x: &[f64]) -> Vec<f64> {
    let n = d.len();
    (0..n)
        .map(|i| {
            let mut v = d[i] * x[i];
            if i > 0 {
                v += e[i - 1] * x[i - 1];
            }
            if i + 1 < n {
                v += e[i] * x[i + 1];
            }
            v
        })
        .collect()
}

/// Solves `(T - shift) x = b` by Gaussian elimination with partial pivoting.
/// Exactly singular pivots are nudged so inverse iteration can proceed.
fn shifted_solve(d: &[f64], e: &[f64], shift: f64, b: &[f64]) -> Vec<f64> {
    let n = d.len();
    // Upper factor rows hold up to three entries: u0 (diag), u1, u2.
    let mut u0: Vec<f64> = d.iter().map(|v| v - shift).collect();
    let mut u1: Vec<f64> = (0..n).map(|i| if i + 1 < n { e[i] } else { 0.0 }).collect();
    let mut u2 = vec![0.0; n];
    let mut x = b.to_vec();
    let tiny = f64::EPSILON * d.iter().chain(e.iter()).fold(1.0f64, |a, v| a.max(v.abs()));

    for i in 0..n.saturating_sub(1) {
        let sub = e[i];
        if sub.abs() > u0[i].abs() {
            // Swap rows i and i+1.
            let next_diag = d[i + 1] - shift;
            let next_sup = if i + 2 < n { e[i + 1] } else { 0.0 };
            let m = u0[i] / sub;
            let a1 = u1[i];
            u0[i] = sub;
            u1[i] = next_diag;
            u2[i] = next_sup;
            u0[i + 1] = a1 - m * next_diag;
            u1[i + 1] = -m * next_sup;
            x.swap(i, i + 1);
            x[i + 1] -= m * x[i];
        } else {
            let piv = if u0[i] == 0.0 { tiny } else { u0[i] };
            u0[i] = piv;
            let m = sub / piv;
            u0[i + 1] -= m * u1[i];
            x[i + 1] -= m * x[i];
        }
    }
    if u0[n - 1] == 0.0 {
        u0[n - 1] = tiny;
    }
    for i in (0..n).rev() {
        let mut v = x[i];
        if i + 1 < n {
            v -= u1[i] * x[i + 1];
        }
        if i + 2 < n {
            v -= u2[i] * x[i + 2];
        }
        x[i] = v / u0[i];
    }
    x
}

/// Eigenvector of `T` for the (already accurate) eigenvalue `theta`.
pub fn inverse_iteration(d: &[f64], e: &[f64], theta: f64, seed: u64) -> Vec<f64> {
    let n = d.len();
    let scale = d.iter().chain(e.iter()).fold(1.0f64, |a, v| a.max(v.abs()));
    let shift = theta + 1e3 * f64::EPSILON * scale;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x: Vec<f64> = (0..n).map(|_| rng.gen_range(0.5..1.5)).collect();
    for _ in 0..3 {
        x = shifted_solve(d, e, shift, &x);
        let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        x.iter_mut().for_each(|v| *v /= norm);
    }
    // Fix the overall sign so the largest component is positive.
    let big = x.iter().copied().fold(0.0f64, |a, v| if v.abs() > a.abs() { v } else { a });
    if big < 0.0 {
        x.iter_mut().for_each(|v| *v = -*v);
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn second_difference_spectrum() {
        let n = 50;
        let d = vec![2.0; n];
        let e = vec![-1.0; n - 1];
        let (vals, _) = tridiagonal_eigen(&d, &e, false).unwrap();
        for (k, v) in vals.iter().enumerate() {
            let exact = 2.0 - 2.0 * (std::f64::consts::PI * (k + 1) as f64 / (n + 1) as f64).cos();
            assert!((v - exact).abs() < 1e-12, "{k}: {v} vs {exact}");
        }
    }

    #[test]
    fn vectors_diagonalize() {
        let d = [4.0, -1.0, 3.0, 0.5, 2.0];
        let e = [1.0, 0.3, -2.0, 0.7];
        let (vals, z) = tridiagonal_eigen(&d, &e, true).unwrap();
        let z = z.unwrap();
        let n = d.len();
        for c in 0..n {
            let v: Vec<f64> = (0..n).map(|k| z[k * n + c]).collect();
            let tv = tridiagonal_apply(&d, &e, &v);
            let res: f64 = tv.iter().zip(&v).map(|(a, b)| (a - vals[c] * b).powi(2)).sum();
            assert!(res.sqrt() < 1e-12);
            let w = inverse_iteration(&d, &e, vals[c], 1);
            let dot: f64 = w.iter().zip(&v).map(|(a, b)| a * b).sum();
            assert!((dot.abs() - 1.0).abs() < 1e-10);
        }
    }
}
