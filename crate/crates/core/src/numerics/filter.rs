//! Lanczos on a Chebyshev polynomial of the operator.
//!
//! Grid Hamiltonians are stiff: the top of the spectrum sits orders of
//! magnitude above the levels of interest, so plain Lanczos needs a long,
//! expensive basis. Here the spectrum is first bracketed by a short Lanczos
//! run, then `[a, b]` (everything above the wanted levels) is mapped into
//! `[-1, 1]` and damped by `-T_d`, while values below `a` are pushed far
//! down. The lowest pairs of the filtered operator are the lowest pairs of
//! the original one. A final Rayleigh-Ritz step in the original operator
//! returns its own values and residuals.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::lanczos::{lanczos_with, LanczosOptions};
use super::tridiag::tridiagonal_eigen;
use super::{dot, norm, EigenResult, NumericsError};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FilterOptions {
    pub k: usize,
    /// Residual target in the original operator, relative to `|theta| + 1`.
    pub tol: f64,
    /// Lanczos steps used to bracket the spectrum.
    pub probe_steps: usize,
    /// Target amplification of the lowest value over the damped interval.
    pub gain: f64,
    pub max_degree: usize,
    pub max_matvecs: usize,
    pub seed: u64,
}

impl FilterOptions {
    pub fn new(k: usize, tol: f64) -> Self {
        Self {
            k,
            tol,
            probe_steps: 80,
            gain: 1e6,
            max_degree: 400,
            max_matvecs: 400_000,
            seed: 0x5EED,
        }
    }
}

/// Ritz values of a short Lanczos run, ascending, and an upper bound on the
/// largest eigenvalue.
fn probe<F>(apply: &F, dim: usize, steps: usize, seed: u64) -> Result<(Vec<f64>, f64), NumericsError>
where
    F: Fn(&[f64], &mut [f64]),
{
    let steps = steps.min(dim);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut q: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let nq = norm(&q);
    q.iter_mut().for_each(|x| *x /= nq);
    let mut basis = vec![q];
    let (mut alpha, mut beta) = (Vec::new(), Vec::new());
    let mut w = vec![0.0; dim];
    let mut last_b = 0.0;
    for j in 0..steps {
        apply(&basis[j], &mut w);
        alpha.push(dot(&w, &basis[j]));
        for _ in 0..2 {
            for v in &basis {
                let c = dot(&w, v);
                w.iter_mut().zip(v).for_each(|(x, y)| *x -= c * y);
            }
        }
        last_b = norm(&w);
        if j + 1 == steps || last_b <= 1e-12 * (alpha[j].abs() + 1.0) {
            break;
        }
        beta.push(last_b);
        basis.push(w.iter().map(|x| x / last_b).collect());
    }
    let (theta, s) = tridiagonal_eigen(&alpha, &beta, true)?;
    let s = s.expect("vectors requested");
    let m = theta.len();
    let top = theta[m - 1];
    let bound = top + (last_b * s[(m - 1) * m + m - 1]).abs() + 0.02 * top.abs() + 1e-12;
    Ok((theta, bound))
}

/// Lowest `k` eigenpairs of the symmetric operator `apply`.
pub fn filtered_lowest<F>(apply: F, dim: usize, opts: FilterOptions) -> Result<EigenResult, NumericsError>
where
    F: Fn(&[f64], &mut [f64]),
{
    let k = opts.k;
    if k > dim {
        return Err(NumericsError::TooManyEigenvalues { k, dim });
    }
    if k == 0 {
        return Ok(EigenResult::default());
    }
    let (theta, b) = probe(&apply, dim, opts.probe_steps.max(2 * k + 10), opts.seed ^ 0xB0)?;
    if theta.len() <= k + 2 {
        // Tiny problem: the probe already spans it.
        return super::lanczos::lanczos(apply, dim, k, opts.tol);
    }
    // Ritz values bound the eigenvalue of the same index from above.
    let a = theta[k + 1];
    let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
    let y0 = ((theta[0] - mid) / half).abs().max(1.0 + 1e-12);
    let degree = {
        let d = ((2.0 * opts.gain).ln() / y0.acosh()).ceil() as usize;
        (d.clamp(4, opts.max_degree) + 1) & !1
    };

    let cell = std::cell::Cell::new(0usize);
    let filtered = |u: &[f64], out: &mut [f64]| {
        // T_0 u = u, T_1 u = y u, T_{j+1} = 2 y T_j - T_{j-1}, y = (H - mid) / half.
        let mut prev = u.to_vec();
        let mut cur = vec![0.0; dim];
        apply(u, &mut cur);
        cur.iter_mut().zip(u).for_each(|(c, x)| *c = (*c - mid * x) / half);
        let mut next = vec![0.0; dim];
        for _ in 1..degree {
            apply(&cur, &mut next);
            for ((n, c), p) in next.iter_mut().zip(&cur).zip(&prev) {
                *n = 2.0 * (*n - mid * c) / half - p;
            }
            std::mem::swap(&mut prev, &mut cur);
            std::mem::swap(&mut cur, &mut next);
        }
        out.iter_mut().zip(&cur).for_each(|(o, c)| *o = -c);
        cell.set(cell.get() + degree);
    };
    let mut lopts = LanczosOptions::new(k, 1e-10);
    lopts.seed = opts.seed;
    lopts.max_matvecs = (opts.max_matvecs / degree).max(10);
    let res = lanczos_with(filtered, dim, lopts)?;
    let vectors = res.vectors.expect("lanczos returns vectors");

    // Rayleigh-Ritz in the original operator.
    let images: Vec<Vec<f64>> = vectors
        .iter()
        .map(|v| {
            let mut o = vec![0.0; dim];
            apply(v, &mut o);
            o
        })
        .collect();
    let n = vectors.len();
    let g = DMatrix::from_fn(n, n, |i, j| 0.5 * (dot(&vectors[i], &images[j]) + dot(&vectors[j], &images[i])));
    let eig = g.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let mut out = EigenResult::default();
    let mut vs = Vec::with_capacity(n);
    for c in order {
        let combine = |src: &[Vec<f64>]| {
            let mut v = vec![0.0; dim];
            for (i, s) in src.iter().enumerate() {
                let coef = eig.eigenvectors[(i, c)];
                v.iter_mut().zip(s).for_each(|(x, y)| *x += coef * y);
            }
            v
        };
        let v = combine(&vectors);
        let hv = combine(&images);
        let t = eig.eigenvalues[c];
        let r = norm(&hv.iter().zip(&v).map(|(a, b)| a - t * b).collect::<Vec<_>>());
        out.values.push(t);
        out.residuals.push(r);
        vs.push(v);
    }
    out.vectors = Some(vs);
    if let Some((t, r)) = out.values.iter().zip(&out.residuals).find(|(t, r)| **r > opts.tol * (t.abs() + 1.0)) {
        return Err(NumericsError::Convergence(format!(
            "filtered Lanczos (degree {degree}, {} products) left residual {r:.3e} at {t}",
            cell.get()
        )));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stiff_diagonal() {
        // Lowest values 1, 2, 2, 3 under a spectrum reaching 1e4.
        let mut d: Vec<f64> = (0..2000).map(|i| 4.0 + 5.0 * i as f64).collect();
        d[..4].copy_from_slice(&[1.0, 2.0, 2.0, 3.0]);
        let r = filtered_lowest(|u, o| o.iter_mut().zip(u).zip(&d).for_each(|((o, u), d)| *o = d * u), d.len(), FilterOptions::new(4, 1e-8)).unwrap();
        for (v, e) in r.values.iter().zip([1.0, 2.0, 2.0, 3.0]) {
            assert!((v - e).abs() < 1e-8, "{:?}", r.values);
        }
    }
}
