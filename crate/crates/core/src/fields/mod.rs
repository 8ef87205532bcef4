//! Periodic-box sampled complex fields standing in for functions on ℝ^d.

mod dilate;
mod field;
mod grid;
pub mod snapshot;
pub mod spectral;

pub use dilate::dilate;
pub use field::{ComplexField, BOUNDARY_DECAY_TOL};
pub(crate) use field::{gradient_norm_sq_of_spectrum, momentum_of_spectrum};
pub use grid::{Grid, MAX_DIM};
