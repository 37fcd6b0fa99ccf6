mod support;

use support::oracles::{jacobi_eigenvalues, lanczos_vs_dense, oscillator_convergence};

#[test]
fn jacobi_oracle_on_a_known_matrix() {
    // Tridiagonal 2, -1: eigenvalues 2 - 2 cos(k pi / (n + 1)).
    let n: usize = 8;
    let a: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 2.0 } else if i.abs_diff(j) == 1 { -1.0 } else { 0.0 }).collect())
        .collect();
    let got = jacobi_eigenvalues(a);
    for (k, v) in got.iter().enumerate() {
        let e = 2.0 - 2.0 * ((k + 1) as f64 * std::f64::consts::PI / (n + 1) as f64).cos();
        assert!((v - e).abs() < 1e-12, "{v} vs {e}");
    }
}

#[test]
fn lanczos_matches_dense_oracle() {
    for seed in [1, 2, 3] {
        let d = lanczos_vs_dense(seed);
        assert!(d < 1e-10, "seed {seed}: deviation {d:e}");
    }
}

#[test]
fn radial_grid_is_second_order() {
    for r in oscillator_convergence() {
        assert!((r - 4.0).abs() < 0.5, "ratio {r}");
    }
}
