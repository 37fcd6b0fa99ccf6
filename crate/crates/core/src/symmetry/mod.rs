//! Ladder algebra, exact recovery of the structure functions `F` and `G`,
//! termination spectra and comparison with the printed formulas.

pub mod audit;
pub mod fit;
pub mod ladder;
pub mod spectrum;
pub mod termination;

pub use audit::{audit_conservation, audit_identities, IdentityCheck, STRUCTURAL_TAGS};
pub use fit::{fit_linear, fit_scalar, DegreeBounds, EmPoly, FitResult, FitTerm, LinearFit};
pub use ladder::{verify_ladder, verify_ladder_pair, verify_ladder_with, LadderReport};
pub use spectrum::{compare_spectra, paper_spectrum, undeformed, LevelInput, LevelRow, PaperValue, SpectrumComparison, Tolerances};
pub use termination::{select_level, solve_termination, Energy, TerminationSolution, TerminationWindow};

use thiserror::Error;

use crate::algebra::AlgebraError;
use crate::systems::SystemError;

#[derive(Debug, Error)]
pub enum SymmetryError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    System(#[from] SystemError),
    #[error("no fit within bounds: {0}")]
    NoFit(String),
    #[error("ladder relation violated: {0}")]
    LadderViolation(String),
    #[error("no termination solution: {0}")]
    NoSolution(String),
    #[error("extremal weights off the lattice: {0}")]
    NonLatticeWeights(String),
    #[error("ladder analysis requires N = 2, got {0}")]
    NotTwoDimensional(usize),
}
