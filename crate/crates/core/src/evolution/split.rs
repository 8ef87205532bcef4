//! Strang splitting with exact substeps.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fields::{spectral, ComplexField, Grid};
use crate::params::NlsParameters;

/// Cached linear propagator `e^{-i dt |ξ|²}` for one grid and time step.
#[derive(Debug, Clone)]
pub(crate) struct Splitter {
    grid: Grid,
    k2: Vec<f64>,
    dt: f64,
    phases: Vec<Complex64>,
    linear: bool,
}

impl Splitter {
    pub(crate) fn new(grid: Grid, linear: bool) -> Self {
        Self { grid, k2: grid.wavenumber_sq(), dt: f64::NAN, phases: Vec::new(), linear }
    }

    fn set_dt(&mut self, dt: f64) {
        if dt != self.dt {
            self.phases = self.k2.iter().map(|k2| Complex64::from_polar(1.0, -dt * k2)).collect();
            self.dt = dt;
        }
    }

    fn nonlinear_half(&self, data: &mut [Complex64], dt: f64, params: &NlsParameters) {
        if self.linear {
            return;
        }
        let half = 0.5 * dt;
        for z in data.iter_mut() {
            *z *= Complex64::from_polar(1.0, half * params.nonlinear_factor(z.norm_sqr()));
        }
    }

    pub(crate) fn step(&mut self, u: &ComplexField, dt: f64, params: &NlsParameters) -> Result<ComplexField> {
        self.set_dt(dt);
        let mut data = u.samples().to_vec();
        self.nonlinear_half(&mut data, dt, params);
        spectral::forward(&self.grid, &mut data);
        for (z, ph) in data.iter_mut().zip(&self.phases) {
            *z *= ph;
        }
        spectral::inverse(&self.grid, &mut data);
        self.nonlinear_half(&mut data, dt, params);
        if data.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::NonFinite);
        }
        Ok(ComplexField::from_raw(self.grid, data))
    }
}

/// One Strang step: half nonlinear phase, exact free propagation over `dt`,
/// half nonlinear phase. Negative `dt` steps backward.
pub fn step(u: &ComplexField, dt: f64, params: &NlsParameters) -> Result<ComplexField> {
    if !dt.is_finite() {
        return Err(Error::InvalidParameters(format!("time step {dt}")));
    }
    Splitter::new(*u.grid(), false).step(u, dt, params)
}

/// Free propagation `e^{i dt Δ}` alone.
pub fn linear_step(u: &ComplexField, dt: f64) -> Result<ComplexField> {
    let params = NlsParameters { dim: u.grid().dim(), p: 3.0, omega: 1.0 };
    Splitter::new(*u.grid(), true).step(u, dt, &params)
}
