//! Dense and analytic oracles for the eigensolvers.

use dynsym_core::algebra::{collect_invariants, rat, Lambda};
use dynsym_core::numerics::{lanczos, radial_eigen, radialize, GridSpec};
use dynsym_core::systems::{build, Family, LsqConvention, SystemSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending.
pub fn jacobi_eigenvalues(mut a: Vec<Vec<f64>>) -> Vec<f64> {
    let n = a.len();
    for _sweep in 0..100 {
        let off: f64 = (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j))).map(|(i, j)| a[i][j] * a[i][j]).sum();
        if off < 1e-26 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut d: Vec<f64> = (0..n).map(|i| a[i][i]).collect();
    d.sort_by(f64::total_cmp);
    d
}

pub fn random_symmetric(n: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut a = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i..n {
            let v: f64 = rng.gen_range(-1.0..1.0);
            a[i][j] = v;
            a[j][i] = v;
        }
    }
    a
}

/// Largest deviation of the lowest five Lanczos values from the dense oracle.
pub fn lanczos_vs_dense(seed: u64) -> f64 {
    let a = random_symmetric(100, seed);
    let exact = jacobi_eigenvalues(a.clone());
    let apply = |u: &[f64], o: &mut [f64]| {
        for (row, out) in a.iter().zip(o.iter_mut()) {
            *out = row.iter().zip(u).map(|(x, y)| x * y).sum();
        }
    };
    let res = lanczos(apply, 100, 5, 1e-12).expect("lanczos converges");
    res.values.iter().zip(&exact).map(|(v, e)| (v - e).abs()).fold(0.0, f64::max)
}

/// Error ratios `e(M) / e(2M)` of the 2-D oscillator ground state (exact 1)
/// for `M = 250, 500, 1000`.
pub fn oscillator_convergence() -> Vec<f64> {
    let spec = SystemSpec::new(Family::Oscillator, 2, Lambda::Value(rat(0, 1)), LsqConvention::Half).unwrap();
    let inv = collect_invariants(&build(&spec).unwrap().h).unwrap();
    let op = radialize(&inv, 0).unwrap();
    let err = |m: usize| {
        let g = GridSpec::radial(m, 20.0).unwrap();
        (radial_eigen(&op, &g, 1, false).unwrap().values[0] - 1.0).abs()
    };
    let errs: Vec<f64> = [250, 500, 1000, 2000].iter().map(|&m| err(m)).collect();
    errs.windows(2).map(|w| w[0] / w[1]).collect()
}
