//! Level degeneracies seen by the radial solver: the state of weight
//! `|m| = n - step*k` in level `n` is the `k`-th radial state of sector
//! `ell = |m|`.

use dynsym_core::algebra::{collect_invariants, rat, Lambda, Rational};
use dynsym_core::numerics::{radial_eigen, radial_eigen_on, radialize, stretched_faces, GridSpec};
use dynsym_core::systems::{build, Family, LsqConvention, SystemSpec};

enum Mesh {
    Uniform(f64),
    Stretched,
}

/// Energies of the states making up level `n`, one per weight `|m|`.
fn multiplet(family: Family, lam: Rational, n: u32, mesh: &Mesh) -> Vec<f64> {
    let spec = SystemSpec::new(family, 2, Lambda::Value(lam), LsqConvention::Half).unwrap();
    let inv = collect_invariants(&build(&spec).unwrap().h).unwrap();
    let step = match family {
        Family::Coulomb => 1,
        Family::Oscillator => 2,
    };
    (0..=n / step)
        .map(|k| {
            let op = radialize(&inv, (n - step * k) as i64).unwrap();
            let k = k as usize;
            let v = match mesh {
                Mesh::Uniform(r_max) => radial_eigen(&op, &GridSpec::radial(4000, *r_max).unwrap(), k + 1, false),
                Mesh::Stretched => radial_eigen_on(&op, &stretched_faces(16000, 4.0e4, 0.05), k + 1, false),
            };
            v.unwrap().values[k]
        })
        .collect()
}

fn width(v: &[f64]) -> f64 {
    v.iter().cloned().fold(f64::MIN, f64::max) - v.iter().cloned().fold(f64::MAX, f64::min)
}

#[test]
fn deformed_oscillator_levels_are_degenerate() {
    for n in 0..=4 {
        let e = multiplet(Family::Oscillator, rat(1, 10), n, &Mesh::Uniform(20.0));
        assert_eq!(e.len() as u32, n / 2 + 1);
        assert!(width(&e) < 1e-3, "n={n}: {e:?}");
    }
}

#[test]
fn hydrogen_levels_are_degenerate() {
    for n in 0..=2 {
        let e = multiplet(Family::Coulomb, rat(0, 1), n, &Mesh::Uniform(40.0));
        assert!(width(&e) < 1e-3, "n={n}: {e:?}");
    }
}

#[test]
fn deformed_coulomb_first_excited_level_is_degenerate() {
    // Level 2 and above lie in the continuum at lam = 1/10.
    let e = multiplet(Family::Coulomb, rat(1, 10), 1, &Mesh::Stretched);
    assert!(width(&e) < 1e-5, "{e:?}");
    assert!((e[0] + 29.0 / 90.0).abs() < 1e-5, "{e:?}");
}
