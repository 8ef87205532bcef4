//! Focusing nonlinear Schrödinger equations with finite symmetry groups:
//! group actions on periodic grids, variational functionals, ground states,
//! scattering thresholds and a split-step evolution with a dichotomy
//! classifier.

pub mod error;
pub mod evolution;
pub mod experiment;
pub mod fields;
pub mod functionals;
pub mod ground_state;
pub mod ledger;
pub mod params;
pub mod symmetry;
pub mod thresholds;

pub use error::{Error, Result};
pub use fields::{ComplexField, Grid};
pub use params::NlsParameters;
