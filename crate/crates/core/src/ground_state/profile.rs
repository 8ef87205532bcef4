use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::fields::{ComplexField, Grid};
use crate::functionals::NormParts;
use crate::params::NlsParameters;

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Shape {
    /// `amp · sech^power(rate · r)`
    Sech { amp: f64, rate: f64, power: f64 },
    /// Tabulated with cubic Hermite interpolation up to `cut`, then
    /// `tail_amp · r^{-ν} K_ν(√ω r)` beyond.
    Shot { cut: f64, tail_amp: f64 },
}

/// A positive, radially decreasing profile `Q(r)` together with its norms.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialProfile {
    radii: Vec<f64>,
    values: Vec<f64>,
    slopes: Vec<f64>,
    params: NlsParameters,
    shape: Shape,
    norms: NormParts,
}

impl RadialProfile {
    pub(crate) fn new(
        radii: Vec<f64>,
        values: Vec<f64>,
        slopes: Vec<f64>,
        params: NlsParameters,
        shape: Shape,
        norms: NormParts,
    ) -> Self {
        Self { radii, values, slopes, params, shape, norms }
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn params(&self) -> &NlsParameters {
        &self.params
    }

    pub fn peak(&self) -> f64 {
        self.value(0.0)
    }

    pub fn max_radius(&self) -> f64 {
        *self.radii.last().expect("profiles are never empty")
    }

    /// Norms by one-dimensional radial quadrature, independent of any grid.
    pub fn norms(&self) -> NormParts {
        self.norms
    }

    /// `S_ω(Q)` from the radial norms.
    pub fn action(&self) -> f64 {
        self.norms.action(&self.params)
    }

    pub fn virial(&self) -> f64 {
        self.norms.virial(&self.params)
    }

    pub fn value(&self, r: f64) -> f64 {
        let r = r.abs();
        match self.shape {
            Shape::Sech { amp, rate, power } => amp * sech(rate * r).powf(power),
            Shape::Shot { cut, tail_amp } => {
                if r >= cut {
                    return tail_amp * bessel_tail(r, &self.params);
                }
                let i = self.radii.partition_point(|&x| x <= r).clamp(1, self.radii.len() - 1) - 1;
                hermite(
                    r,
                    self.radii[i],
                    self.radii[i + 1],
                    self.values[i],
                    self.values[i + 1],
                    self.slopes[i],
                    self.slopes[i + 1],
                )
            }
        }
    }

    pub fn derivative(&self, r: f64) -> f64 {
        match self.shape {
            Shape::Sech { amp, rate, power } => {
                let z = rate * r;
                -amp * power * rate * sech(z).powf(power) * z.tanh()
            }
            Shape::Shot { .. } => {
                let h = 1e-6 * r.abs().max(1e-3);
                (self.value(r + h) - self.value(r - h)) / (2.0 * h)
            }
        }
    }

    /// Samples `Q(|x|)` on a grid.
    pub fn to_field(&self, grid: Grid) -> Result<ComplexField> {
        if grid.dim() != self.params.dim {
            return Err(Error::DimensionMismatch { expected: self.params.dim, found: grid.dim() });
        }
        ComplexField::from_real_fn(grid, |x| self.value(x.iter().map(|v| v * v).sum::<f64>().sqrt()))
    }
}

/// Overflow-free `sech`.
pub(crate) fn sech(z: f64) -> f64 {
    let e = (-z.abs()).exp();
    2.0 * e / (1.0 + e * e)
}

fn hermite(r: f64, r0: f64, r1: f64, y0: f64, y1: f64, m0: f64, m1: f64) -> f64 {
    let h = r1 - r0;
    let t = (r - r0) / h;
    let t2 = t * t;
    let t3 = t2 * t;
    (2.0 * t3 - 3.0 * t2 + 1.0) * y0
        + (t3 - 2.0 * t2 + t) * h * m0
        + (-2.0 * t3 + 3.0 * t2) * y1
        + (t3 - t2) * h * m1
}

/// `K_ν(z)` for `z > 0` from `∫₀^∞ e^{-z cosh t} cosh(νt) dt`, trapezoidal in
/// `t` (spectrally accurate for this even, doubly decaying integrand).
pub(crate) fn bessel_k(nu: f64, z: f64) -> f64 {
    let t_max = (1.0 + 60.0 / z).acosh() + 0.5;
    let n = 400usize;
    let h = t_max / n as f64;
    let mut sum = 0.5 * (-z).exp();
    for i in 1..=n {
        let t = i as f64 * h;
        sum += (-z * t.cosh()).exp() * (nu * t).cosh();
    }
    sum * h
}

/// Decaying solution of the linearized radial equation, `r^{-ν} K_ν(√ω r)`
/// with `ν = (d-2)/2`.
pub(crate) fn bessel_tail(r: f64, params: &NlsParameters) -> f64 {
    let nu = (params.d() - 2.0) / 2.0;
    r.powf(-nu) * bessel_k(nu, params.omega.sqrt() * r)
}

/// Surface area of the unit sphere in `ℝ^d`, with `d = 1` counting the two
/// endpoints.
pub(crate) fn sphere_area(dim: usize) -> f64 {
    match dim {
        1 => 2.0,
        2 => 2.0 * PI,
        _ => 4.0 * PI,
    }
}

/// The 1D ground state `((p+1)ω/2)^{1/(p-1)} sech^{2/(p-1)}((p-1)√ω x/2)`.
pub fn closed_form_1d(params: &NlsParameters) -> Result<RadialProfile> {
    if params.dim != 1 {
        return Err(Error::WrongDimension { expected: "1".into(), found: params.dim });
    }
    let p = params.p;
    let amp = ((p + 1.0) * params.omega / 2.0).powf(1.0 / (p - 1.0));
    let rate = (p - 1.0) * params.omega.sqrt() / 2.0;
    let power = 2.0 / (p - 1.0);
    let shape = Shape::Sech { amp, rate, power };

    // sech^power(z) < 1e-12 once z > (ln 2 + 12 ln 10 / power).
    let z_max = 2f64.ln() + 12.0 * 10f64.ln() / power;
    let r_max = z_max / rate;
    let n = 4096;
    let h = r_max / n as f64;
    let mut profile = RadialProfile::new(
        Vec::new(),
        Vec::new(),
        Vec::new(),
        *params,
        shape,
        NormParts { grad_sq: 0.0, mass: 0.0, potential: 0.0 },
    );
    let (mut radii, mut values, mut slopes) = (Vec::new(), Vec::new(), Vec::new());
    for i in 0..=n {
        let r = i as f64 * h;
        radii.push(r);
        values.push(profile.value(r));
        slopes.push(profile.derivative(r));
    }
    // Trapezoid over ℝ is spectrally accurate for this analytic decaying profile.
    let mut norms = NormParts { grad_sq: 0.0, mass: 0.0, potential: 0.0 };
    for i in 0..=n {
        let w = if i == 0 { h } else { 2.0 * h };
        norms.grad_sq += w * slopes[i] * slopes[i];
        norms.mass += w * values[i] * values[i];
        norms.potential += w * values[i].powf(p + 1.0);
    }
    profile.radii = radii;
    profile.values = values;
    profile.slopes = slopes;
    profile.norms = norms;
    Ok(profile)
}
