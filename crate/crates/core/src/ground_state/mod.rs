//! Ground states `Q_ω` and symmetry-restricted minimal actions `l_ω^G`.

mod minimize;
mod ode;
mod profile;
mod shooting;

pub use minimize::{
    append_profile_ledger, default_seed, minimal_action, minimize_action, profile_ledger_row, Descent,
    MinimizationResult, MinimizeOptions, COLLAPSE_NORM, MAX_INCREASES, PROFILE_LEDGER_HEADER, STATIONARY_NOISE,
};
pub use profile::{closed_form_1d, RadialProfile};
pub use shooting::{shoot_radial, BRACKET, SHOOTING_RTOL};

use crate::error::Result;
use crate::params::NlsParameters;

/// Default bisection tolerance on `Q(0)`.
pub const SHOOTING_TOL: f64 = 1e-12;

/// Closed form in one dimension, shooting otherwise.
pub fn ground_state(params: &NlsParameters) -> Result<RadialProfile> {
    if params.dim == 1 {
        closed_form_1d(params)
    } else {
        shoot_radial(params, SHOOTING_TOL)
    }
}
