//! Symmetry-restricted minimal action `l_ω^G` by descent on the surface `K = 0`.

use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fields::{spectral, ComplexField, Grid};
use crate::ledger::{append_rows, csv_line};
use crate::functionals::{evaluate, rescale_to_nehari, NormParts};
use crate::params::NlsParameters;
use crate::symmetry::{escaping_direction, GroupAction, SymmetryGroup};

/// Norm below which an iterate counts as having collapsed to zero.
pub const COLLAPSE_NORM: f64 = 1e-10;
/// Relative increases of `S_ω` this small end the descent as stationary
/// rather than counting as rejections.
pub const STATIONARY_NOISE: f64 = 1e-9;
/// Consecutive rejected steps tolerated before giving up.
pub const MAX_INCREASES: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Descent {
    /// Gradient of `S_ω` in `L²`.
    L2,
    /// Gradient preconditioned by `(-Δ + ω)^{-1}`.
    Sobolev,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinimizeOptions {
    pub max_iter: usize,
    pub step: f64,
    /// Stop once the relative size of the descent direction falls below this.
    pub tolerance: f64,
    pub descent: Descent,
}

impl Default for MinimizeOptions {
    fn default() -> Self {
        Self { max_iter: 2000, step: 0.5, tolerance: 1e-8, descent: Descent::Sobolev }
    }
}

#[derive(Debug, Clone)]
pub struct MinimizationResult {
    pub minimizer: ComplexField,
    /// `S_ω` of the minimizer.
    pub value: f64,
    pub iterations: usize,
    /// `‖direction‖_{L²} / ‖minimizer‖_{L²}` at the last iterate.
    pub residual: f64,
    /// Accepted `S_ω` values, one per iteration.
    pub history: Vec<f64>,
}

struct Descender<'a> {
    params: &'a NlsParameters,
    grid: Grid,
    k2: Vec<f64>,
    descent: Descent,
}

impl Descender<'_> {
    /// Descent direction for `S_ω` at `phi`.
    fn direction(&self, phi: &ComplexField) -> ComplexField {
        let mut spec = phi.spectrum();
        let nonlinear: Vec<Complex64> =
            phi.samples().iter().map(|z| z * self.params.nonlinear_factor(z.norm_sqr())).collect();
        let mut nl_spec = nonlinear;
        spectral::forward(&self.grid, &mut nl_spec);
        let omega = self.params.omega;
        for ((s, nl), k2) in spec.iter_mut().zip(&nl_spec).zip(&self.k2) {
            let symbol = k2 + omega;
            *s = match self.descent {
                Descent::L2 => *s * symbol - nl,
                Descent::Sobolev => *s - nl / symbol,
            };
        }
        spectral::inverse(&self.grid, &mut spec);
        ComplexField::from_raw(self.grid, spec)
    }
}

/// Minimizes `S_ω` over `G`-invariant fields on `K = 0` starting from `init`:
/// each iteration steps along the descent direction, symmetrizes and moves
/// back to `K = 0` along the scaling orbit. Rejected steps halve the step
/// size.
pub fn minimize_action(
    group: &SymmetryGroup,
    params: &NlsParameters,
    init: &ComplexField,
    options: &MinimizeOptions,
) -> Result<MinimizationResult> {
    let grid = *init.grid();
    if group.dim() != grid.dim() || params.dim != grid.dim() {
        return Err(Error::DimensionMismatch { expected: grid.dim(), found: group.dim() });
    }
    let action = GroupAction::new(group, &grid)?;
    let descender = Descender { params, grid, k2: grid.wavenumber_sq(), descent: options.descent };

    let seed = action.symmetrize(init)?;
    if seed.mass().sqrt() < COLLAPSE_NORM {
        return Err(Error::CollapseToZero);
    }
    let mut phi = onto_virial_surface_by_amplitude(&seed, params)?;
    let mut value = evaluate(&phi, params).action;
    let mut history = vec![value];
    let mut tau = options.step;
    let mut increases = 0usize;
    let mut residual = f64::INFINITY;
    let mut iterations = 0;

    while iterations < options.max_iter {
        let dir = descender.direction(&phi);
        residual = (dir.mass() / phi.mass()).sqrt();
        if residual < options.tolerance {
            break;
        }
        iterations += 1;
        loop {
            let trial = action.symmetrize(&phi.combine(1.0, &dir, -tau)?)?;
            if trial.mass().sqrt() < COLLAPSE_NORM {
                return Err(Error::CollapseToZero);
            }
            let candidate = match rescale_to_nehari(&trial, params) {
                Ok((f, _)) => Some(f),
                Err(Error::UnresolvedAfterScaling(_)) => None,
                Err(e) => return Err(e),
            };
            if let Some(candidate) = candidate {
                let new_value = evaluate(&candidate, params).action;
                if new_value <= value {
                    phi = candidate;
                    value = new_value;
                    increases = 0;
                    tau = (tau * 1.25).min(options.step);
                    break;
                }
                if new_value - value <= STATIONARY_NOISE * value.abs() {
                    // The increase is at the level of interpolation noise.
                    history.push(value);
                    return Ok(MinimizationResult { minimizer: phi, value, iterations, residual, history });
                }
            }
            increases += 1;
            if increases >= MAX_INCREASES {
                return Err(Error::NoDescent(iterations));
            }
            tau *= 0.5;
        }
        history.push(value);
    }
    Ok(MinimizationResult { minimizer: phi, value, iterations, residual, history })
}

/// `c·f` with `c > 0` chosen so that `K(c·f) = 0`.
fn onto_virial_surface_by_amplitude(f: &ComplexField, params: &NlsParameters) -> Result<ComplexField> {
    let parts = NormParts::of(f, params);
    if parts.potential <= 0.0 {
        return Err(Error::ZeroPotentialTerm);
    }
    let kinetic = 2.0 / params.d() * parts.grad_sq;
    let pot = (params.p - 1.0) / (params.p + 1.0) * parts.potential;
    Ok(f.scaled_real((kinetic / pot).powf(1.0 / (params.p - 1.0))))
}

/// A Gaussian with the curvature of the ground state at its peak, translated
/// by `separation` along a direction moved by every non-identity element,
/// symmetrized, then scaled to the ground-state peak height. `separation = 0`
/// gives the centered Gaussian.
pub fn default_seed(
    group: &SymmetryGroup,
    params: &NlsParameters,
    grid: Grid,
    separation: f64,
) -> Result<ComplexField> {
    let peak = ((params.p + 1.0) * params.omega / 2.0).powf(1.0 / (params.p - 1.0));
    let sigma2 = 2.0 / ((params.p - 1.0) * params.omega);
    let bump = ComplexField::from_real_fn(grid, |x| (-0.5 * x.iter().map(|v| v * v).sum::<f64>() / sigma2).exp())?;
    let x0 = if separation == 0.0 {
        vec![0.0; grid.dim()]
    } else {
        let trivial = SymmetryGroup::trivial(grid.dim());
        let dir = escaping_direction(group, &trivial)?
            .ok_or_else(|| Error::InvalidParameters("no escaping direction".into()))?;
        let h = grid.spacing();
        dir.iter().map(|v| (separation * v / h).round() * h).collect()
    };
    let seed = GroupAction::new(group, &grid)?.symmetrize(&bump.translate(&x0)?)?;
    let height = seed.max_abs();
    if height < COLLAPSE_NORM {
        return Err(Error::CollapseToZero);
    }
    Ok(seed.scaled_real(peak / height))
}

/// Minimum of [`minimize_action`] over default seeds at several separations;
/// seeds the group annihilates are skipped. Fails with the last error when
/// every seed fails.
pub fn minimal_action(
    group: &SymmetryGroup,
    params: &NlsParameters,
    grid: Grid,
    separations: &[f64],
    options: &MinimizeOptions,
) -> Result<MinimizationResult> {
    let mut best: Option<MinimizationResult> = None;
    let mut last_err = Error::CollapseToZero;
    for &sep in separations {
        let run = default_seed(group, params, grid, sep).and_then(|seed| minimize_action(group, params, &seed, options));
        match run {
            Ok(r) if best.as_ref().is_none_or(|b| r.value < b.value) => best = Some(r),
            Ok(_) => {}
            Err(e) => last_err = e,
        }
    }
    best.ok_or(last_err)
}

pub const PROFILE_LEDGER_HEADER: &str = "group_id,omega,l_value,residual,iterations,box_L,N";

pub fn profile_ledger_row(group: &SymmetryGroup, params: &NlsParameters, result: &MinimizationResult) -> String {
    let grid = result.minimizer.grid();
    csv_line(&[
        group.id(),
        params.omega.to_string(),
        format!("{:.17e}", result.value),
        format!("{:.6e}", result.residual),
        result.iterations.to_string(),
        grid.length().to_string(),
        grid.n().to_string(),
    ])
}

/// Appends rows, writing the header first when the file is new or empty.
pub fn append_profile_ledger(path: &Path, rows: &[String]) -> Result<()> {
    append_rows(path, PROFILE_LEDGER_HEADER, rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ground_state::closed_form_1d;
    use crate::symmetry::catalog;

    fn setup() -> (NlsParameters, Grid) {
        (NlsParameters::new(1, 7.0, 1.0).unwrap(), Grid::new(1, 1024, 80.0).unwrap())
    }

    #[test]
    fn ground_state_is_stationary() {
        let (p, g) = setup();
        let q = closed_form_1d(&p).unwrap().to_field(g).unwrap();
        let d = Descender { params: &p, grid: g, k2: g.wavenumber_sq(), descent: Descent::Sobolev };
        assert!(d.direction(&q).max_abs() < 1e-9);
        let d = Descender { descent: Descent::L2, ..d };
        assert!(d.direction(&q).max_abs() < 1e-7);
    }

    #[test]
    fn recovers_ground_state_action() {
        let (p, g) = setup();
        let q = closed_form_1d(&p).unwrap();
        let init = default_seed(&SymmetryGroup::trivial(1), &p, g, 0.0).unwrap();
        let r = minimize_action(&SymmetryGroup::trivial(1), &p, &init, &MinimizeOptions::default()).unwrap();
        assert!((r.value - q.action()).abs() < 1e-6 * q.action(), "{} vs {}", r.value, q.action());
        assert!(r.history.windows(2).all(|w| w[1] <= w[0]));
        let rep = evaluate(&r.minimizer, &p);
        assert!(rep.virial.abs() < 1e-6 * rep.grad_sq);
    }

    #[test]
    fn odd_projector_kills_centered_seed() {
        let (p, g) = setup();
        assert!(matches!(default_seed(&catalog::odd(), &p, g, 0.0), Err(Error::CollapseToZero)));
        let even = default_seed(&SymmetryGroup::trivial(1), &p, g, 0.0).unwrap();
        assert!(matches!(
            minimize_action(&catalog::odd(), &p, &even, &MinimizeOptions::default()),
            Err(Error::CollapseToZero)
        ));
    }

    #[test]
    fn ledger_has_header_once() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("l.csv");
        append_profile_ledger(&path, &["a".into()]).unwrap();
        append_profile_ledger(&path, &["b".into()]).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text, format!("{PROFILE_LEDGER_HEADER}\na\nb\n"));
    }
}
