//! The angular-sector reduction `u = e^{imφ} g(r)` in two dimensions.
//!
//! The radial operator `g'' + g'/r - m²g/r²` is discretized in flux form on
//! cell centers `r_j = (j + ½)h` with `g = 0` past the outer edge, which is
//! self-adjoint for the weight `r_j h`. Crank-Nicolson is then unitary for
//! the discrete mass.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::{drive, EvolveConfig, Scheme, TrajectoryRecord};
use crate::error::{Error, Result};
use crate::fields::{ComplexField, Grid};
use crate::functionals::{FunctionalReport, NormParts};
use crate::params::NlsParameters;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialGrid {
    n: usize,
    r_max: f64,
}

impl RadialGrid {
    pub fn new(n: usize, r_max: f64) -> Result<Self> {
        if n < 4 || !(r_max.is_finite() && r_max > 0.0) {
            return Err(Error::InvalidGrid(format!("radial grid with {n} cells on [0, {r_max}]")));
        }
        Ok(Self { n, r_max })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    pub fn spacing(&self) -> f64 {
        self.r_max / self.n as f64
    }

    pub fn radius(&self, j: usize) -> f64 {
        (j as f64 + 0.5) * self.spacing()
    }
}

/// Cell-centered samples of the radial profile `g`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialField {
    grid: RadialGrid,
    values: Vec<Complex64>,
}

impl RadialField {
    pub fn from_fn(grid: RadialGrid, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        let values: Vec<Complex64> = (0..grid.n).map(|j| f(grid.radius(j))).collect();
        if values.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::NonFinite);
        }
        Ok(Self { grid, values })
    }

    pub fn grid(&self) -> &RadialGrid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// Linear interpolation, vanishing at the origin and beyond the outer edge.
    pub fn value_at(&self, r: f64) -> Complex64 {
        let h = self.grid.spacing();
        let s = r / h - 0.5;
        if s < 0.0 {
            return self.values[0] * (r / (0.5 * h));
        }
        let j = s.floor() as usize;
        if j + 1 >= self.grid.n {
            let last = self.grid.n - 1;
            let w = ((r - self.grid.radius(last)) / h).clamp(0.0, 1.0);
            return self.values[last] * (1.0 - w);
        }
        let w = s - j as f64;
        self.values[j] * (1.0 - w) + self.values[j + 1] * w
    }

    /// `e^{imφ} g(|x|)` on a two-dimensional grid.
    pub fn to_field(&self, grid: Grid, m: u32) -> Result<ComplexField> {
        if grid.dim() != 2 {
            return Err(Error::WrongDimension { expected: "2".into(), found: grid.dim() });
        }
        ComplexField::from_fn(grid, |x| {
            let r = x[0].hypot(x[1]);
            if r == 0.0 {
                return Complex64::default();
            }
            self.value_at(r) * Complex64::from_polar(1.0, m as f64 * x[1].atan2(x[0]))
        })
    }
}

struct RadialScheme {
    grid: RadialGrid,
    m2: f64,
    params: NlsParameters,
    linear: bool,
    /// Off-diagonals and diagonal of the discrete radial operator.
    lower: Vec<f64>,
    upper: Vec<f64>,
    diag: Vec<f64>,
}

impl RadialScheme {
    fn new(grid: RadialGrid, m: u32, params: NlsParameters, linear: bool) -> Self {
        let h = grid.spacing();
        let m2 = (m as f64).powi(2);
        let n = grid.n;
        let (mut lower, mut upper, mut diag) = (vec![0.0; n], vec![0.0; n], vec![0.0; n]);
        for j in 0..n {
            let r = grid.radius(j);
            let inner = j as f64 * h;
            let outer = (j + 1) as f64 * h;
            lower[j] = inner / (r * h * h);
            upper[j] = outer / (r * h * h);
            diag[j] = -(inner + outer) / (r * h * h) - m2 / (r * r);
        }
        Self { grid, m2, params, linear, lower, upper, diag }
    }

    fn nonlinear_half(&self, g: &mut [Complex64], dt: f64) {
        if self.linear {
            return;
        }
        for z in g.iter_mut() {
            *z *= Complex64::from_polar(1.0, 0.5 * dt * self.params.nonlinear_factor(z.norm_sqr()));
        }
    }

    /// `(I - i dt/2 L) g⁺ = (I + i dt/2 L) g` by the Thomas algorithm.
    fn crank_nicolson(&self, g: &[Complex64], dt: f64) -> Vec<Complex64> {
        let n = g.len();
        let a = Complex64::new(0.0, 0.5 * dt);
        let mut rhs: Vec<Complex64> = (0..n)
            .map(|j| {
                let mut lg = self.diag[j] * g[j];
                if j > 0 {
                    lg += self.lower[j] * g[j - 1];
                }
                if j + 1 < n {
                    lg += self.upper[j] * g[j + 1];
                }
                g[j] + a * lg
            })
            .collect();
        let mut c_prime = vec![Complex64::default(); n];
        let mut b = Complex64::new(1.0, 0.0) - a * self.diag[0];
        c_prime[0] = -a * self.upper[0] / b;
        rhs[0] /= b;
        for j in 1..n {
            let lo = -a * self.lower[j];
            b = Complex64::new(1.0, 0.0) - a * self.diag[j] - lo * c_prime[j - 1];
            c_prime[j] = -a * self.upper[j] / b;
            rhs[j] = (rhs[j] - lo * rhs[j - 1]) / b;
        }
        for j in (0..n - 1).rev() {
            let next = rhs[j + 1];
            rhs[j] -= c_prime[j] * next;
        }
        rhs
    }
}

impl Scheme for RadialScheme {
    type State = RadialField;

    fn step(&mut self, u: &RadialField, dt: f64) -> Result<RadialField> {
        let mut g = u.values.clone();
        self.nonlinear_half(&mut g, dt);
        let mut g = self.crank_nicolson(&g, dt);
        self.nonlinear_half(&mut g, dt);
        if g.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::NonFinite);
        }
        Ok(RadialField { grid: self.grid, values: g })
    }

    fn report(&self, u: &RadialField) -> FunctionalReport {
        let h = self.grid.spacing();
        let g = &u.values;
        let n = g.len();
        let (mut mass, mut grad, mut pot) = (0.0, 0.0, 0.0);
        for j in 0..n {
            let r = self.grid.radius(j);
            let m2 = g[j].norm_sqr();
            mass += r * m2;
            pot += r * self.params.nonlinear_factor(m2) * m2;
            grad += self.m2 * m2 / r;
            let next = if j + 1 < n { g[j + 1] } else { Complex64::default() };
            grad += (j + 1) as f64 * (next - g[j]).norm_sqr() / h;
        }
        let w = 2.0 * PI * h;
        let parts = NormParts { grad_sq: w * grad, mass: w * mass, potential: w * pot };
        FunctionalReport::from_parts(parts, vec![0.0, 0.0], &self.params)
    }

    fn max_modulus_sq(&self, u: &RadialField) -> f64 {
        u.values.iter().map(|z| z.norm_sqr()).fold(0.0, f64::max)
    }

    fn extras(&self, u: &RadialField) -> Result<(f64, f64, f64)> {
        let (mut var, mut total, mut edge) = (0.0, 0.0, 0.0);
        for (j, z) in u.values.iter().enumerate() {
            let r = self.grid.radius(j);
            let w = r * z.norm_sqr();
            var += r * r * w;
            total += w;
            if j + 2 >= u.values.len() {
                edge += w;
            }
        }
        let h = self.grid.spacing();
        let boundary = if total > 0.0 { edge / total } else { 0.0 };
        Ok((2.0 * PI * h * var, 0.0, boundary))
    }
}

/// [`angular_sector_evolve_observed`] without an observer.
pub fn angular_sector_evolve(
    g0: &RadialField,
    m: u32,
    params: &NlsParameters,
    config: &EvolveConfig,
) -> Result<TrajectoryRecord> {
    angular_sector_evolve_observed(g0, m, params, config, |_, _| {})
}

/// Evolves `u = e^{imφ} g(r)` in two dimensions through
/// `i g_t + g'' + g'/r - m²g/r² + |g|^{p-1}g = 0`, with the same step control
/// and triggers as [`evolve`](super::evolve).
pub fn angular_sector_evolve_observed(
    g0: &RadialField,
    m: u32,
    params: &NlsParameters,
    config: &EvolveConfig,
    observer: impl FnMut(f64, &RadialField),
) -> Result<TrajectoryRecord> {
    config.validate()?;
    if params.dim != 2 {
        return Err(Error::WrongDimension { expected: "2".into(), found: params.dim });
    }
    if m == 0 {
        return Err(Error::InvalidParameters("angular sector needs m >= 1".into()));
    }
    let scheme = RadialScheme::new(g0.grid, m, *params, config.linear);
    drive(scheme, g0.clone(), params, config, TrajectoryRecord::new(2, None), observer)
}
