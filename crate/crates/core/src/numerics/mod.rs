//! Numerical ground truth: radial and Cartesian finite-volume eigensolvers,
//! a restarted Lanczos iteration and rotation-sector classification.

mod cartesian;
mod filter;
mod lanczos;
mod levels;
mod radial;
mod sector;
mod tridiag;

pub use cartesian::{cartesian_hamiltonian, inverse_distance_average, CartesianHamiltonian, Parity};
pub use filter::{filtered_lowest, FilterOptions};
pub use lanczos::{lanczos, lanczos_with, LanczosOptions};
pub use levels::{cartesian_levels, default_box, default_rmax, radial_levels, CartesianLevel};
pub use radial::{radial_eigen, radial_eigen_on, radialize, stretched_faces, RadialOperator};
pub use sector::{cluster_energies, sector_classify, SectorEstimate};
pub use tridiag::{inverse_iteration, tridiagonal_apply, tridiagonal_eigen};

use thiserror::Error;

use crate::algebra::AlgebraError;
use crate::systems::SystemError;

#[derive(Debug, Error)]
pub enum NumericsError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    System(#[from] SystemError),
    #[error("radial operator is not Hermitian: {0}")]
    HermiticityCheckFailed(String),
    #[error("negative sector label {0}")]
    NegativeSector(i64),
    #[error("a numeric lambda is required")]
    SymbolicLambda,
    #[error("invalid grid: {0}")]
    Grid(String),
    #[error("requested {k} eigenvalues of a {dim}-dimensional problem")]
    TooManyEigenvalues { k: usize, dim: usize },
    #[error("grid exceeds resource limits: {0}")]
    Resource(String),
    #[error("no convergence: {0}")]
    Convergence(String),
}

/// Uniform half-step offset grid with Dirichlet ends: points
/// `origin + (j + 1/2) h`, `h = extent / M`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec {
    pub m: usize,
    pub extent: f64,
    pub origin: f64,
}

impl GridSpec {
    pub const MIN_POINTS: usize = 16;

    /// `[0, r_max]`.
    pub fn radial(m: usize, r_max: f64) -> Result<Self, NumericsError> {
        Self::checked(m, r_max, 0.0)
    }

    /// `[-half_width, half_width]` per axis.
    pub fn cartesian(m: usize, half_width: f64) -> Result<Self, NumericsError> {
        Self::checked(m, 2.0 * half_width, -half_width)
    }

    fn checked(m: usize, extent: f64, origin: f64) -> Result<Self, NumericsError> {
        if m < Self::MIN_POINTS {
            return Err(NumericsError::Grid(format!("M = {m} < {}", Self::MIN_POINTS)));
        }
        if !(extent.is_finite() && extent > 0.0) {
            return Err(NumericsError::Grid(format!("extent {extent} must be positive")));
        }
        Ok(Self { m, extent, origin })
    }

    pub fn h(&self) -> f64 {
        self.extent / self.m as f64
    }

    pub fn point(&self, j: usize) -> f64 {
        self.origin + (j as f64 + 0.5) * self.h()
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.m).map(|j| self.point(j)).collect()
    }
}

/// Lowest eigenpairs of a discretized operator.
#[derive(Clone, Debug, Default)]
pub struct EigenResult {
    /// Ascending.
    pub values: Vec<f64>,
    /// Unit vectors in the solver's symmetric basis, one per value.
    pub vectors: Option<Vec<Vec<f64>>>,
    /// `||A v - theta v||`, one per value.
    pub residuals: Vec<f64>,
    /// Per-state rotation sector, filled by [`sector_classify`].
    pub sectors: Option<Vec<SectorEstimate>>,
}

impl EigenResult {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    // Four partial sums let the compiler vectorize.
    let mut acc = [0.0; 4];
    let (ca, cb) = (a.chunks_exact(4), b.chunks_exact(4));
    let tail: f64 = ca.remainder().iter().zip(cb.remainder()).map(|(x, y)| x * y).sum();
    for (x, y) in ca.zip(cb) {
        for l in 0..4 {
            acc[l] += x[l] * y[l];
        }
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}
