//! Lanczos iteration with full reorthogonalization, locking and restarts.
//!
//! Each restart builds a fresh Krylov basis from a seeded random vector kept
//! orthogonal to every locked Ritz vector. Converged Ritz pairs are locked.
//! A single Krylov space sees one copy of each eigenvalue, so restarts are
//! what recover degenerate multiplets. The run stops once a restart turns up
//! nothing below the current k-th locked value.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::tridiag::tridiagonal_eigen;
use super::{dot, norm, EigenResult, NumericsError};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LanczosOptions {
    pub k: usize,
    /// Residual target `||A v - theta v|| <= tol (|theta| + 1)`.
    pub tol: f64,
    pub max_matvecs: usize,
    /// Krylov basis size per restart; 0 picks a size from the problem.
    pub max_basis: usize,
    pub seed: u64,
}

impl LanczosOptions {
    pub fn new(k: usize, tol: f64) -> Self {
        Self {
            k,
            tol,
            max_matvecs: 5000,
            max_basis: 0,
            seed: 0x5EED,
        }
    }

    fn basis_size(&self, dim: usize) -> usize {
        let auto = if self.max_basis > 0 {
            self.max_basis
        } else {
            // Keep the basis near 40M doubles.
            (40_000_000 / dim.max(1)).clamp(3 * self.k + 20, 320)
        };
        auto.min(dim)
    }
}

/// Lowest `k` eigenpairs of the symmetric operator `apply` of size `dim`.
pub fn lanczos<F>(apply: F, dim: usize, k: usize, tol: f64) -> Result<EigenResult, NumericsError>
where
    F: Fn(&[f64], &mut [f64]),
{
    lanczos_with(apply, dim, LanczosOptions::new(k, tol))
}

pub fn lanczos_with<F>(apply: F, dim: usize, opts: LanczosOptions) -> Result<EigenResult, NumericsError>
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
    let cap = opts.basis_size(dim);
    let mut matvecs = 0usize;
    let mut locked: Vec<(f64, Vec<f64>)> = Vec::new();
    let mut scratch = vec![0.0; dim];

    for restart in 0u64.. {
        let room = dim - locked.len();
        if room == 0 {
            break;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed.wrapping_add(restart));
        let mut q: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
        orthogonalize(&mut q, locked.iter().map(|(_, v)| v.as_slice()));
        let nq = norm(&q);
        if nq == 0.0 {
            break;
        }
        q.iter_mut().for_each(|v| *v /= nq);

        let steps = cap.min(room);
        let mut basis: Vec<Vec<f64>> = vec![q];
        let mut alpha: Vec<f64> = Vec::new();
        let mut beta: Vec<f64> = Vec::new();
        let mut found: Vec<(f64, Vec<f64>)> = Vec::new();
        loop {
            let j = basis.len() - 1;
            apply(&basis[j], &mut scratch);
            matvecs += 1;
            let mut w = scratch.clone();
            let a = dot(&w, &basis[j]);
            alpha.push(a);
            for _ in 0..2 {
                orthogonalize(&mut w, basis.iter().map(|v| v.as_slice()));
                orthogonalize(&mut w, locked.iter().map(|(_, v)| v.as_slice()));
            }
            let b = norm(&w);
            let m = alpha.len();
            let at_end = m == steps || matvecs >= opts.max_matvecs;
            let invariant = b <= 1e-12 * (a.abs() + 1.0);
            if invariant || at_end || m % 20 == 0 {
                let (theta, s) = tridiagonal_eigen(&alpha, &beta, true)?;
                let s = s.expect("vectors requested");
                let want = (k + 2).min(m);
                let mut pairs = Vec::new();
                for c in 0..want {
                    let est = (b * s[(m - 1) * m + c]).abs();
                    if invariant || est <= opts.tol * (theta[c].abs() + 1.0) {
                        pairs.push(c);
                    }
                }
                let leading = pairs.iter().enumerate().take_while(|(i, c)| i == *c).count();
                let need = k.saturating_sub(locked.len()).max(1).min(want);
                if invariant || at_end || leading >= need {
                    for c in pairs {
                        let mut v = vec![0.0; dim];
                        for (i, bv) in basis.iter().enumerate() {
                            let coef = s[i * m + c];
                            for (x, y) in v.iter_mut().zip(bv) {
                                *x += coef * y;
                            }
                        }
                        orthogonalize(&mut v, locked.iter().map(|(_, v)| v.as_slice()));
                        let nv = norm(&v);
                        v.iter_mut().for_each(|x| *x /= nv);
                        found.push((theta[c], v));
                    }
                    break;
                }
            }
            beta.push(b);
            w.iter_mut().for_each(|x| *x /= b);
            basis.push(w);
        }

        let kth = kth_locked(&locked, k);
        let improved = found.iter().any(|(t, _)| kth.is_none_or(|e| *t < e - opts.tol * (e.abs() + 1.0)));
        for (t, v) in found {
            // Re-orthogonalize against pairs locked in this same pass.
            let mut v = v;
            orthogonalize(&mut v, locked.iter().map(|(_, v)| v.as_slice()));
            let nv = norm(&v);
            if nv < 0.5 {
                continue;
            }
            v.iter_mut().for_each(|x| *x /= nv);
            locked.push((t, v));
        }
        locked.sort_by(|a, b| a.0.total_cmp(&b.0));
        if locked.len() >= k && !improved {
            break;
        }
        if matvecs >= opts.max_matvecs {
            return Err(NumericsError::Convergence(format!(
                "Lanczos used {matvecs} matrix-vector products with {} of {k} pairs locked",
                locked.len()
            )));
        }
    }

    locked.truncate(k);
    let residuals = locked
        .iter()
        .map(|(t, v)| {
            apply(v, &mut scratch);
            norm(&scratch.iter().zip(v).map(|(a, b)| a - t * b).collect::<Vec<_>>())
        })
        .collect();
    let (values, vectors): (Vec<f64>, Vec<Vec<f64>>) = locked.into_iter().unzip();
    Ok(EigenResult {
        values,
        vectors: Some(vectors),
        residuals,
        sectors: None,
    })
}

fn kth_locked(locked: &[(f64, Vec<f64>)], k: usize) -> Option<f64> {
    (locked.len() >= k).then(|| locked[k - 1].0)
}

fn orthogonalize<'a>(w: &mut [f64], against: impl Iterator<Item = &'a [f64]>) {
    for v in against {
        let c = dot(w, v);
        for (x, y) in w.iter_mut().zip(v) {
            *x -= c * y;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_lowest() {
        let d = [1.0, 2.0, 3.0];
        let r = lanczos(|u, o| o.iter_mut().zip(u).zip(&d).for_each(|((o, u), d)| *o = d * u), 3, 1, 1e-10).unwrap();
        assert!((r.values[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn too_many_requested() {
        assert!(matches!(
            lanczos(|u, o| o.copy_from_slice(u), 3, 4, 1e-10),
            Err(NumericsError::TooManyEigenvalues { .. })
        ));
    }

    #[test]
    fn degenerate_multiplet_is_resolved() {
        // 1 (x3), 2, 5, ... on a diagonal of size 40.
        let d: Vec<f64> = (0..40).map(|i| if i < 3 { 1.0 } else { i as f64 }).collect();
        let r = lanczos(|u, o| o.iter_mut().zip(u).zip(&d).for_each(|((o, u), d)| *o = d * u), 40, 4, 1e-10).unwrap();
        assert_eq!(r.values.len(), 4);
        for v in &r.values[..3] {
            assert!((v - 1.0).abs() < 1e-9, "{:?}", r.values);
        }
        assert!((r.values[3] - 3.0).abs() < 1e-9, "{:?}", r.values);
    }
}
