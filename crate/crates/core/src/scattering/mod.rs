//! Forward and inverse scattering for `U' = (i lambda sigma3 - Q) U`.
//!
//! `Q` is the antisymmetric off-diagonal matrix built from `rho`, with
//! opposite signs for the two chiralities. At `lambda = 0` the solution is
//! the rotation by `I(xi)`.

mod jost;
mod search;
mod spectrum;
mod synth;

pub use jost::{
    forward_scatter, jost_path, lambda_grid, monodromy, parity_check, parity_check_with,
    read_monodromy_csv, rotation_matrix, transfer_matrix, Mat2, MonodromyData, ScaledMatrix,
    ScatteringData, MAX_STEP_PHASE,
};
pub use search::{
    find_eigenvalues, jost_from_norming, jost_norming_constant, norming_from_jost, SearchSpec,
};
pub use spectrum::{DiscreteSpectrum, SpectrumRecord};
pub use synth::{synth_nsoliton, synth_nsoliton_with, ReflectionlessProfile};
