//! Level-by-level numerical energies. Level `n` is identified with the
//! lowest state of angular weight `|m| = n` (sector `ell = n` radially),
//! which is the top of the level's multiplet.

use crate::algebra::{collect_invariants, rational_to_f64, Rational};
use crate::systems::{build, Family, SystemSpec};

use super::cartesian::cartesian_hamiltonian;
use super::radial::{radial_eigen, radialize};
use super::sector::{sector_classify, SectorEstimate};
use super::{GridSpec, NumericsError};

/// Half-width of the Cartesian box used for level `n`.
///
/// Chosen from radial Dirichlet studies: the square contains the disc of
/// the same half-width, so the disc's truncation shift bounds the square's.
/// Coulomb levels spread out like `(2n+1)^2` and need wide boxes, but the
/// ground state needs a fine mesh near the singularity, so the box grows
/// with `n`. Oscillator levels at `lam > 0` decay by a power law.
pub fn default_box(family: Family, lam: &Rational, n: u32) -> f64 {
    match family {
        Family::Coulomb => match n {
            0 => 4.0,
            1 => 20.0,
            2 => 24.0,
            _ => 10.0 * n as f64,
        },
        Family::Oscillator => (6.0 + 60.0 * rational_to_f64(lam)).min(20.0),
    }
}

/// Default radial extent.
pub fn default_rmax(family: Family) -> f64 {
    match family {
        Family::Coulomb => 40.0,
        Family::Oscillator => 20.0,
    }
}

/// Lowest eigenvalue of the sector `ell = n` for each requested level.
pub fn radial_levels(spec: &SystemSpec, levels: &[u32], grid: &GridSpec) -> Result<Vec<f64>, NumericsError> {
    if levels.is_empty() {
        return Ok(Vec::new());
    }
    let gens = build(spec)?;
    let inv = collect_invariants(&gens.h)?;
    levels
        .iter()
        .map(|&n| {
            let op = radialize(&inv, n as i64)?;
            Ok(radial_eigen(&op, grid, 1, false)?.values[0])
        })
        .collect()
}

/// Grid splitting of the undeformed multiplets on the square lattice stays
/// well below this, and level spacings in the validated window well above.
const CLUSTER_TOL: f64 = 5e-3;

/// A Cartesian level energy with the sector estimate of the chosen state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CartesianLevel {
    pub n: u32,
    pub energy: f64,
    pub half_width: f64,
    pub sector: SectorEstimate,
}

/// States below and at level `n` in the parity sector holding `cos(n theta)`,
/// counted with the undeformed degeneracies: a safe request size.
fn states_needed(family: Family, n: u32) -> usize {
    let per_level = |level: u32| -> usize {
        let ms: Vec<u32> = match family {
            Family::Coulomb => (0..=level).collect(),
            Family::Oscillator => (0..=level).filter(|m| (level - m) % 2 == 0).collect(),
        };
        ms.into_iter().filter(|m| m % 2 == n % 2).count()
    };
    (0..=n).map(per_level).sum()
}

/// Cartesian energies on an `M x M` grid (N = 2 only). `half_width` maps a
/// level to its box. Levels sharing a box and a parity share one solve. A
/// level whose `|m| = n` state is not found among the computed states is
/// `None`.
pub fn cartesian_levels(
    spec: &SystemSpec,
    levels: &[u32],
    m: usize,
    half_width: impl Fn(u32) -> f64,
    tol: f64,
) -> Result<Vec<Option<CartesianLevel>>, NumericsError> {
    if spec.dim() != 2 {
        return Err(NumericsError::Grid(format!("level matching needs N = 2, got {}", spec.dim())));
    }
    let mut groups: Vec<(f64, bool, Vec<u32>)> = Vec::new();
    for &n in levels {
        let (b, odd) = (half_width(n), n % 2 == 1);
        match groups.iter_mut().find(|g| g.0 == b && g.1 == odd) {
            Some(g) => g.2.push(n),
            None => groups.push((b, odd, vec![n])),
        }
    }
    let mut found: Vec<Option<CartesianLevel>> = vec![None; levels.len()];
    for (b, odd, ns) in groups {
        let top = *ns.iter().max().expect("non-empty group");
        let k = states_needed(spec.family, top) + 2;
        let hm = cartesian_hamiltonian(spec, GridSpec::cartesian(m, b)?)?;
        let k = k.min(hm.sector_size());
        let res = hm.lowest_in(&[odd, false], k, tol)?;
        let vectors = res.vectors.as_ref().expect("vectors requested");
        let est = sector_classify(&res.values, vectors, |u, o| hm.apply_b(0, 1, u, o), CLUSTER_TOL);
        for n in ns {
            let hit = est.iter().find(|s| s.m_abs.round() as u32 == n && s.confidence < 0.25);
            if let Some(s) = hit {
                let slot = levels.iter().position(|&l| l == n).expect("requested level");
                found[slot] = Some(CartesianLevel {
                    n,
                    energy: s.energy,
                    half_width: b,
                    sector: *s,
                });
            }
        }
    }
    Ok(found)
}
