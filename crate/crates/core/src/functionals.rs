//! Conserved quantities, the action `S_ω`, the virial functional `K`, the
//! L²-invariant scaling `φ^λ(x) = e^λ φ(e^{2λ/d} x)`, Nehari rescaling and
//! the Galilean boost.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fields::{self, dilate, ComplexField, BOUNDARY_DECAY_TOL};
use crate::params::NlsParameters;

/// The three norms every functional is built from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormParts {
    /// `‖∇f‖²_{L²}`
    pub grad_sq: f64,
    /// `‖f‖²_{L²}`
    pub mass: f64,
    /// `‖f‖^{p+1}_{L^{p+1}}`
    pub potential: f64,
}

impl NormParts {
    pub fn of(f: &ComplexField, params: &NlsParameters) -> Self {
        Self {
            grad_sq: f.gradient_norm_sq(),
            mass: f.mass(),
            potential: f.lp_power(params.p + 1.0),
        }
    }

    pub fn energy(&self, params: &NlsParameters) -> f64 {
        0.5 * self.grad_sq - self.potential / (params.p + 1.0)
    }

    pub fn action(&self, params: &NlsParameters) -> f64 {
        self.energy(params) + 0.5 * params.omega * self.mass
    }

    pub fn virial(&self, params: &NlsParameters) -> f64 {
        2.0 / params.d() * self.grad_sq - (params.p - 1.0) / (params.p + 1.0) * self.potential
    }

    /// Norm parts of `φ^λ`, from the exact scaling laws.
    pub fn scaled(&self, lambda: f64, params: &NlsParameters) -> Self {
        Self {
            grad_sq: (4.0 / params.d() * lambda).exp() * self.grad_sq,
            mass: self.mass,
            potential: ((params.p - 1.0) * lambda).exp() * self.potential,
        }
    }
}

/// Mass, energy, momentum, action, virial functional and `J_ω = S_ω - dK/4`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FunctionalReport {
    pub mass: f64,
    pub energy: f64,
    pub momentum: Vec<f64>,
    pub action: f64,
    pub virial: f64,
    pub positive_part: f64,
    pub grad_sq: f64,
    pub potential: f64,
}

impl FunctionalReport {
    pub fn from_parts(parts: NormParts, momentum: Vec<f64>, params: &NlsParameters) -> Self {
        let action = parts.action(params);
        let virial = parts.virial(params);
        Self {
            mass: parts.mass,
            energy: parts.energy(params),
            momentum,
            action,
            virial,
            positive_part: action - params.d() / 4.0 * virial,
            grad_sq: parts.grad_sq,
            potential: parts.potential,
        }
    }

    pub fn parts(&self) -> NormParts {
        NormParts { grad_sq: self.grad_sq, mass: self.mass, potential: self.potential }
    }

    pub fn csv_header(dim: usize) -> String {
        let p: Vec<&str> = ["Px", "Py", "Pz"][..dim].to_vec();
        format!("t,M,E,{},S_omega,K,J_omega", p.join(","))
    }

    /// `t, M, E, Px[,Py,Pz], S_omega, K, J_omega`.
    pub fn csv_row(&self, t: f64) -> String {
        let p: Vec<String> = self.momentum.iter().map(|v| format!("{v:.17e}")).collect();
        format!(
            "{t:.17e},{:.17e},{:.17e},{},{:.17e},{:.17e},{:.17e}",
            self.mass,
            self.energy,
            p.join(","),
            self.action,
            self.virial,
            self.positive_part
        )
    }
}

/// `(λ₀, δ)`: the Nehari rescaling exponent of a field and the gap constant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingParameters {
    pub lambda0: f64,
    pub delta: f64,
}

pub fn evaluate(f: &ComplexField, params: &NlsParameters) -> FunctionalReport {
    let spectrum = f.spectrum();
    let parts = NormParts {
        grad_sq: fields::gradient_norm_sq_of_spectrum(f.grid(), &spectrum),
        mass: f.mass(),
        potential: f.lp_power(params.p + 1.0),
    };
    let momentum = fields::momentum_of_spectrum(f.grid(), &spectrum);
    FunctionalReport::from_parts(parts, momentum, params)
}

/// `φ^λ(x) = e^λ φ(e^{2λ/d} x)` by spectral interpolation. Fails when the
/// dilation pushes the field out to the boundary or, for contractions, into
/// the top of the frequency band (the relevant ratio above
/// [`BOUNDARY_DECAY_TOL`] and more than twice that of `f`).
pub fn scale(f: &ComplexField, lambda: f64, params: &NlsParameters) -> Result<ComplexField> {
    if lambda == 0.0 {
        return Ok(f.clone());
    }
    let c = (2.0 / params.d() * lambda).exp();
    let out = dilate(f, c).scaled_real(lambda.exp());
    let ratio = out.boundary_ratio();
    if ratio > BOUNDARY_DECAY_TOL && ratio > 2.0 * f.boundary_ratio() {
        return Err(Error::UnresolvedAfterScaling(ratio));
    }
    if lambda > 0.0 {
        let tail = out.spectral_tail_ratio();
        if tail > BOUNDARY_DECAY_TOL && tail > 2.0 * f.spectral_tail_ratio() {
            return Err(Error::UnresolvedAfterScaling(tail));
        }
    }
    Ok(out)
}

/// `λ₀ = (p-1-4/d)⁻¹ log( (2/d)‖∇φ‖² / ((p-1)/(p+1))‖φ‖^{p+1}_{p+1} )`, the
/// scaling exponent that puts `φ^{λ₀}` on `K = 0`.
pub fn nehari_exponent(parts: &NormParts, params: &NlsParameters) -> Result<f64> {
    if parts.mass == 0.0 {
        return Err(Error::ZeroField);
    }
    if parts.potential <= 0.0 {
        return Err(Error::ZeroPotentialTerm);
    }
    if parts.grad_sq <= 0.0 {
        return Err(Error::InvalidParameters("field has no gradient, so no Nehari point".into()));
    }
    let d = params.d();
    let kinetic = 2.0 / d * parts.grad_sq;
    let pot = (params.p - 1.0) / (params.p + 1.0) * parts.potential;
    Ok((kinetic / pot).ln() / (params.p - 1.0 - 4.0 / d))
}

pub fn scaling_parameters(f: &ComplexField, params: &NlsParameters) -> Result<ScalingParameters> {
    Ok(ScalingParameters {
        lambda0: nehari_exponent(&NormParts::of(f, params), params)?,
        delta: params.delta(),
    })
}

/// Moves `f` along its scaling orbit onto the Nehari-type surface `K = 0`.
pub fn rescale_to_nehari(f: &ComplexField, params: &NlsParameters) -> Result<(ComplexField, f64)> {
    let lambda0 = nehari_exponent(&NormParts::of(f, params), params)?;
    Ok((scale(f, lambda0, params)?, lambda0))
}

/// `e^{i x·ξ₀} f(x)`, the Galilean transform at `t = 0`. `ξ₀` must lie on the
/// reciprocal lattice `2π/L · ℤ^d` so the result stays periodic.
pub fn galilean_boost(f: &ComplexField, xi0: &[f64]) -> Result<ComplexField> {
    let grid = *f.grid();
    if xi0.len() != grid.dim() {
        return Err(Error::DimensionMismatch { expected: grid.dim(), found: xi0.len() });
    }
    let unit = 2.0 * std::f64::consts::PI / grid.length();
    for &k in xi0 {
        let m = k / unit;
        if !k.is_finite() || (m - m.round()).abs() > 1e-9 * m.abs().max(1.0) {
            return Err(Error::OffLatticeFrequency(xi0.to_vec()));
        }
    }
    let data = f
        .samples()
        .iter()
        .enumerate()
        .map(|(i, z)| {
            let x = grid.point(i);
            let phase: f64 = xi0.iter().zip(&x).map(|(k, xa)| k * xa).sum();
            z * Complex64::from_polar(1.0, phase)
        })
        .collect();
    Ok(ComplexField::from_raw(grid, data))
}

/// `ξ₀ = -P(f)/M(f)` snapped to the reciprocal lattice.
pub fn default_boost_frequency(f: &ComplexField) -> Result<Vec<f64>> {
    let m = f.mass();
    if m == 0.0 {
        return Err(Error::ZeroMass);
    }
    let unit = 2.0 * std::f64::consts::PI / f.grid().length();
    Ok(f.momentum().iter().map(|p| (-p / m / unit).round() * unit).collect())
}

/// Boost by the default frequency, removing the momentum up to lattice snapping.
pub fn zero_momentum_boost(f: &ComplexField) -> Result<ComplexField> {
    galilean_boost(f, &default_boost_frequency(f)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::Grid;

    fn params() -> NlsParameters {
        NlsParameters::new(1, 7.0, 1.0).unwrap()
    }

    fn gaussian(grid: Grid, amp: f64) -> ComplexField {
        ComplexField::from_real_fn(grid, |x| amp * (-x.iter().map(|v| v * v).sum::<f64>()).exp()).unwrap()
    }

    #[test]
    fn zero_field_report() {
        let g = Grid::new(1, 64, 20.0).unwrap();
        let r = evaluate(&ComplexField::zeros(g), &params());
        assert_eq!(r.mass, 0.0);
        assert_eq!(r.energy, 0.0);
        assert_eq!(r.action, 0.0);
        assert_eq!(r.virial, 0.0);
        assert_eq!(r.momentum, vec![0.0]);
    }

    #[test]
    fn positive_part_identity() {
        let g = Grid::new(1, 256, 20.0).unwrap();
        let p = params();
        let r = evaluate(&gaussian(g, 1.7), &p);
        let d = 1.0;
        let expected = 0.5 * p.omega * r.mass + (d * (p.p - 1.0) - 4.0) / (4.0 * (p.p + 1.0)) * r.potential;
        assert!((r.positive_part - expected).abs() < 1e-12 * expected);
        assert!((r.action - r.energy - 0.5 * p.omega * r.mass).abs() < 1e-14);
    }

    #[test]
    fn scale_preserves_mass_and_zero_is_identity() {
        let g = Grid::new(1, 512, 40.0).unwrap();
        let f = gaussian(g, 1.0);
        assert_eq!(scale(&f, 0.0, &params()).unwrap(), f);
        let s = scale(&f, 0.3, &params()).unwrap();
        assert!((s.mass() - f.mass()).abs() < 1e-8 * f.mass());
        let s = scale(&f, -0.3, &params()).unwrap();
        assert!((s.mass() - f.mass()).abs() < 1e-8 * f.mass());
    }

    #[test]
    fn scale_rejects_unresolved_dilation() {
        let g = Grid::new(1, 256, 16.0).unwrap();
        let f = gaussian(g, 1.0);
        assert!(matches!(scale(&f, -2.0, &params()), Err(Error::UnresolvedAfterScaling(_))));
    }

    #[test]
    fn nehari_rescale_sign_and_zero_errors() {
        let g = Grid::new(1, 512, 40.0).unwrap();
        let p = params();
        let big = gaussian(g, 1.5);
        assert!(evaluate(&big, &p).virial < 0.0);
        let (out, l0) = rescale_to_nehari(&big, &p).unwrap();
        assert!(l0 < 0.0);
        let r = evaluate(&out, &p);
        assert!(r.virial.abs() < 1e-6 * r.grad_sq);
        let small = gaussian(g, 0.5);
        assert!(nehari_exponent(&NormParts::of(&small, &p), &p).unwrap() > 0.0);
        assert!(matches!(rescale_to_nehari(&ComplexField::zeros(g), &p), Err(Error::ZeroField)));
    }

    #[test]
    fn boost_shifts_momentum() {
        let g = Grid::new(1, 512, 40.0).unwrap();
        let f = gaussian(g, 1.0);
        let unit = 2.0 * std::f64::consts::PI / 40.0;
        let k = 3.0 * unit;
        let b = galilean_boost(&f, &[k]).unwrap();
        assert!((b.momentum()[0] - (f.momentum()[0] + f.mass() * k)).abs() < 1e-8 * f.mass() * k);
        assert_eq!(b.lp_power(8.0), f.lp_power(8.0));
        assert_eq!(galilean_boost(&f, &[0.0]).unwrap(), f);
        assert!(matches!(galilean_boost(&f, &[0.1]), Err(Error::OffLatticeFrequency(_))));
        let z = zero_momentum_boost(&b).unwrap();
        assert!(z.momentum()[0].abs() < 1e-8);
        assert!(matches!(default_boost_frequency(&ComplexField::zeros(g)), Err(Error::ZeroMass)));
    }

    #[test]
    fn csv_row_shape() {
        let g = Grid::new(2, 16, 10.0).unwrap();
        let p = NlsParameters::new(2, 5.0, 1.0).unwrap();
        let r = evaluate(&gaussian(g, 1.0), &p);
        assert_eq!(FunctionalReport::csv_header(2), "t,M,E,Px,Py,S_omega,K,J_omega");
        assert_eq!(r.csv_row(0.5).split(',').count(), 8);
    }
}
