//! Numerical laboratory for infinite planar strings in (2+1)D.
//!
//! The internal degrees of freedom of the string are two chiral fields
//! `rho_+(xi_+)` and `rho_-(xi_-)`. This crate
//!
//! * synthesizes reflectionless N-soliton fields from discrete scattering data
//!   and recovers the data by forward scattering ([`scattering`]),
//! * reconstructs the world-sheet embedding, its fundamental forms and
//!   integral curvature ([`worldsheet`]),
//! * evaluates momentum, angular momentum, the Hamiltonian and the
//!   constraint linking them ([`charges`]),
//! * tracks the cusps of the string in time ([`cusps`]) and turns their
//!   world-lines into braid words ([`braid`]),
//! * drives all of the above from a JSON scenario ([`scenario`], [`pipeline`]).
//!
//! All quantities are dimensionless; the Minkowski metric is `diag(1, -1, -1)`
//! on `(X0, X1, X3)`.

pub mod braid;
pub mod charges;
pub mod cusps;
pub mod error;
pub mod export;
pub mod field;
pub mod grid;
mod linalg;
pub mod pipeline;
pub mod quad;
pub mod scattering;
pub mod scenario;
mod spline;
pub mod tol;
pub mod worldsheet;

pub use error::{Error, Result};
pub use field::{soliton_field, ChiralField, Chirality, ExternalVariables, FieldProfile, Soliton};
pub use grid::GridSpec;
pub use scattering::{synth_nsoliton, DiscreteSpectrum};
pub use tol::Tolerances;
pub use worldsheet::{StringModel, WorldSheet};
