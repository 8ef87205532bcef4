//! Initial data for experiments.

use crate::error::{Error, Result};
use crate::fields::{ComplexField, Grid, BOUNDARY_DECAY_TOL};
use crate::functionals::galilean_boost;
use crate::ground_state::{ground_state, RadialProfile};
use crate::params::NlsParameters;
use crate::symmetry::{GroupAction, SymmetryGroup};
use crate::thresholds::INVARIANCE_TOL;

/// Relative mass below which symmetrization counts as annihilating the data.
const ANNIHILATED: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub enum BumpShape {
    GroundState,
    Gaussian { sigma: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub enum Recipe {
    /// `a·Q_ω`.
    ScaledGroundState { a: f64 },
    /// `Σ_k a_k·shape(x - y_k)`, averaged over the group.
    SymmetrizedBumps { shape: BumpShape, positions: Vec<Vec<f64>>, amplitudes: Vec<f64> },
    /// `a·(Q_ω(x - s/2) - Q_ω(x + s/2))` in one dimension; `separation` is
    /// the distance between the two centers.
    OddDipole { a: f64, separation: f64 },
    /// `e^{i x·ξ} u_0(x)` for the inner recipe's `u_0`. `ξ` must lie on the
    /// reciprocal lattice.
    Boosted { inner: Box<Recipe>, frequency: Vec<f64> },
}

impl Recipe {
    pub fn name(&self) -> &'static str {
        match self {
            Recipe::ScaledGroundState { .. } => "scaled_ground_state",
            Recipe::SymmetrizedBumps { .. } => "symmetrized_bumps",
            Recipe::OddDipole { .. } => "odd_dipole",
            Recipe::Boosted { .. } => "boosted",
        }
    }

    fn raw(&self, profile: &RadialProfile, params: &NlsParameters, grid: Grid) -> Result<ComplexField> {
        let invalid = |m: String| Err(Error::RecipeInvalid(m));
        match self {
            Recipe::ScaledGroundState { a } => {
                if !a.is_finite() || *a == 0.0 {
                    return invalid(format!("amplitude {a}"));
                }
                Ok(profile.to_field(grid)?.scaled_real(*a))
            }
            Recipe::OddDipole { a, separation } => {
                if params.dim != 1 {
                    return invalid("odd_dipole needs dim = 1".into());
                }
                if !a.is_finite() || *a == 0.0 || !separation.is_finite() || *separation <= 0.0 {
                    return invalid(format!("odd_dipole a = {a}, separation = {separation}"));
                }
                let c = 0.5 * separation;
                ComplexField::from_real_fn(grid, |x| {
                    a * (profile.value((x[0] - c).abs()) - profile.value((x[0] + c).abs()))
                })
            }
            Recipe::SymmetrizedBumps { shape, positions, amplitudes } => {
                if positions.is_empty() || positions.len() != amplitudes.len() {
                    return invalid(format!("{} positions, {} amplitudes", positions.len(), amplitudes.len()));
                }
                if let Some(y) = positions.iter().find(|y| y.len() != grid.dim()) {
                    return invalid(format!("position {y:?} in dimension {}", grid.dim()));
                }
                if let BumpShape::Gaussian { sigma } = shape {
                    if !(sigma.is_finite() && *sigma > 0.0) {
                        return invalid(format!("sigma {sigma}"));
                    }
                }
                ComplexField::from_real_fn(grid, |x| {
                    positions
                        .iter()
                        .zip(amplitudes)
                        .map(|(y, a)| {
                            let r2: f64 = x.iter().zip(y).map(|(xi, yi)| (xi - yi) * (xi - yi)).sum();
                            a * match shape {
                                BumpShape::GroundState => profile.value(r2.sqrt()),
                                BumpShape::Gaussian { sigma } => (-0.5 * r2 / (sigma * sigma)).exp(),
                            }
                        })
                        .sum()
                })
            }
            Recipe::Boosted { inner, frequency } => {
                let base = inner.raw(profile, params, grid)?;
                galilean_boost(&base, frequency)
            }
        }
    }

    fn is_symmetrizing(&self) -> bool {
        match self {
            Recipe::SymmetrizedBumps { .. } => true,
            Recipe::Boosted { inner, .. } => inner.is_symmetrizing(),
            _ => false,
        }
    }
}

/// Builds `u_0` from `recipe`, symmetrized under `group` and checked for
/// decay at the box boundary.
///
/// Bump recipes are projected onto the invariant subspace; every other recipe
/// must already be invariant to [`INVARIANCE_TOL`].
pub fn build_initial_data(
    recipe: &Recipe,
    params: &NlsParameters,
    grid: Grid,
    group: &SymmetryGroup,
) -> Result<ComplexField> {
    if params.dim != grid.dim() || group.dim() != grid.dim() {
        return Err(Error::DimensionMismatch { expected: grid.dim(), found: params.dim });
    }
    let profile = ground_state(params)?;
    let raw = recipe.raw(&profile, params, grid)?;
    if !raw.is_finite() {
        return Err(Error::RecipeInvalid("non-finite samples".into()));
    }
    let mass = raw.mass();
    if mass == 0.0 {
        return Err(Error::RecipeInvalid("zero field".into()));
    }
    let action = GroupAction::new(group, &grid)?;
    if !recipe.is_symmetrizing() {
        let residual = action.residual(&raw)?;
        if residual > INVARIANCE_TOL {
            return Err(Error::RecipeInvalid(format!(
                "{} is not invariant under {} (residual {residual:.3e})",
                recipe.name(),
                group.id()
            )));
        }
    }
    let u0 = action.symmetrize(&raw)?;
    if u0.mass() < ANNIHILATED * mass {
        return Err(Error::RecipeInvalid(format!("{} is annihilated by {}", recipe.name(), group.id())));
    }
    u0.check_decayed(BOUNDARY_DECAY_TOL)?;
    Ok(u0)
}
