//! Dynamical-symmetry engine: exact operator algebra for the deformed
//! Coulomb and oscillator systems, ladder/termination spectra, and
//! independent grid eigensolvers used as numerical ground truth.

pub mod algebra;
pub mod numerics;
pub mod symmetry;
pub mod systems;
