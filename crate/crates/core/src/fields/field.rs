use num_complex::Complex64;

use super::grid::{Grid, MAX_DIM};
use super::spectral;
use crate::error::{Error, Result};

/// Fields meant to approximate H¹(ℝ^d) data must decay below this fraction
/// of their peak on the box boundary.
pub const BOUNDARY_DECAY_TOL: f64 = 1e-8;

/// Complex samples of a function on a periodic [`Grid`].
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexField {
    grid: Grid,
    data: Vec<Complex64>,
}

impl ComplexField {
    pub fn new(grid: Grid, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != grid.len() {
            return Err(Error::DimensionMismatch { expected: grid.len(), found: data.len() });
        }
        if data.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::NonFinite);
        }
        Ok(Self { grid, data })
    }

    /// Skips the finiteness scan; callers guarantee the samples are finite.
    pub(crate) fn from_raw(grid: Grid, data: Vec<Complex64>) -> Self {
        debug_assert_eq!(data.len(), grid.len());
        Self { grid, data }
    }

    pub fn zeros(grid: Grid) -> Self {
        Self { grid, data: vec![Complex64::default(); grid.len()] }
    }

    pub fn from_fn(grid: Grid, f: impl Fn(&[f64]) -> Complex64) -> Result<Self> {
        let data = (0..grid.len()).map(|i| f(&grid.point(i)[..grid.dim()])).collect();
        Self::new(grid, data)
    }

    pub fn from_real_fn(grid: Grid, f: impl Fn(&[f64]) -> f64) -> Result<Self> {
        Self::from_fn(grid, |x| Complex64::new(f(x), 0.0))
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.data
    }

    pub fn into_samples(self) -> Vec<Complex64> {
        self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        Self::from_raw(self.grid, self.data.iter().map(|z| z * c).collect())
    }

    pub fn scaled_real(&self, c: f64) -> Self {
        self.scaled(Complex64::new(c, 0.0))
    }

    pub fn conj(&self) -> Self {
        Self::from_raw(self.grid, self.data.iter().map(|z| z.conj()).collect())
    }

    /// `a·self + b·other`.
    pub fn combine(&self, a: f64, other: &Self, b: f64) -> Result<Self> {
        self.check_same_grid(other)?;
        Ok(Self::from_raw(
            self.grid,
            self.data.iter().zip(&other.data).map(|(x, y)| x * a + y * b).collect(),
        ))
    }

    pub fn check_same_grid(&self, other: &Self) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::InvalidGrid("fields live on different grids".into()));
        }
        Ok(())
    }

    /// Unnormalized forward FFT of the samples.
    pub fn spectrum(&self) -> Vec<Complex64> {
        let mut s = self.data.clone();
        spectral::forward(&self.grid, &mut s);
        s
    }

    pub fn from_spectrum(grid: Grid, mut spectrum: Vec<Complex64>) -> Result<Self> {
        spectral::inverse(&grid, &mut spectrum);
        Self::new(grid, spectrum)
    }

    /// `h^d Σ |f|^q`.
    pub fn lp_power(&self, q: f64) -> f64 {
        let sum: f64 = if q == 2.0 {
            self.data.iter().map(|z| z.norm_sqr()).sum()
        } else if (q / 2.0).fract() == 0.0 {
            let k = (q / 2.0) as i32;
            self.data.iter().map(|z| z.norm_sqr().powi(k)).sum()
        } else {
            self.data.iter().map(|z| z.norm().powf(q)).sum()
        };
        sum * self.grid.cell_volume()
    }

    /// `‖f‖_{L^q}` by equal-weight quadrature.
    pub fn lp_norm(&self, q: f64) -> f64 {
        self.lp_power(q).powf(1.0 / q)
    }

    /// `M(f) = ‖f‖²_{L²}`.
    pub fn mass(&self) -> f64 {
        self.lp_power(2.0)
    }

    /// `‖f‖²_{L²}` computed from the spectrum (Parseval).
    pub fn spectral_mass(&self) -> f64 {
        let s = self.spectrum();
        self.grid.cell_volume() / self.grid.len() as f64 * s.iter().map(|z| z.norm_sqr()).sum::<f64>()
    }

    /// `‖∇f‖²_{L²}` through the spectral multiplier `|ξ|²`.
    pub fn gradient_norm_sq(&self) -> f64 {
        gradient_norm_sq_of_spectrum(&self.grid, &self.spectrum())
    }

    /// `P(f) = Im ∫ f̄ ∇f`, one component per axis.
    pub fn momentum(&self) -> Vec<f64> {
        momentum_of_spectrum(&self.grid, &self.spectrum())
    }

    pub fn laplacian(&self) -> Self {
        let ksq = self.grid.wavenumber_sq();
        let mut s = self.spectrum();
        for (z, k) in s.iter_mut().zip(&ksq) {
            *z *= -k;
        }
        spectral::inverse(&self.grid, &mut s);
        Self::from_raw(self.grid, s)
    }

    /// Exact cyclic shift `τ_y f(x) = f(x - y)` for a lattice vector `y`.
    pub fn translate(&self, y: &[f64]) -> Result<Self> {
        let steps = self.grid.lattice_steps(y)?;
        let n = self.grid.n() as i64;
        let mut out = vec![Complex64::default(); self.data.len()];
        for (i, slot) in out.iter_mut().enumerate() {
            let m = self.grid.unravel(i);
            let mut src = [0usize; MAX_DIM];
            for axis in 0..self.grid.dim() {
                src[axis] = (m[axis] as i64 - steps[axis]).rem_euclid(n) as usize;
            }
            *slot = self.data[self.grid.ravel(&src)];
        }
        Ok(Self::from_raw(self.grid, out))
    }

    /// `‖x f‖²_{L²}` with the signed centered coordinate.
    pub fn variance(&self) -> f64 {
        let g = &self.grid;
        let sum: f64 = self
            .data
            .iter()
            .enumerate()
            .map(|(i, z)| {
                let x = g.point(i);
                let r2: f64 = x[..g.dim()].iter().map(|v| v * v).sum();
                r2 * z.norm_sqr()
            })
            .sum();
        sum * g.cell_volume()
    }

    /// `∫ x |f|²`.
    pub fn first_moment(&self) -> Vec<f64> {
        let g = &self.grid;
        let mut acc = vec![0.0; g.dim()];
        for (i, z) in self.data.iter().enumerate() {
            let x = g.point(i);
            let w = z.norm_sqr();
            for (a, slot) in acc.iter_mut().enumerate() {
                *slot += x[a] * w;
            }
        }
        acc.iter().map(|v| v * g.cell_volume()).collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest modulus within two cells of the box boundary, relative to the
    /// field maximum. Zero for the zero field.
    pub fn boundary_ratio(&self) -> f64 {
        let peak = self.max_abs();
        if peak == 0.0 {
            return 0.0;
        }
        let n = self.grid.n();
        let near = |j: usize| j <= 1 || j + 2 >= n;
        let edge = self
            .data
            .iter()
            .enumerate()
            .filter(|(i, _)| {
                let m = self.grid.unravel(*i);
                m[..self.grid.dim()].iter().any(|&j| near(j))
            })
            .map(|(_, z)| z.norm())
            .fold(0.0, f64::max);
        edge / peak
    }

    /// Largest Fourier amplitude in the outer quarter of the band (any axis
    /// with `|k| > 3N/8`) relative to the largest overall; small when the
    /// field is resolved by the grid.
    pub fn spectral_tail_ratio(&self) -> f64 {
        let spec = self.spectrum();
        let n = self.grid.n();
        let peak = spec.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if peak == 0.0 {
            return 0.0;
        }
        let high = |j: usize| {
            let signed = if j < n / 2 { j } else { n - j };
            8 * signed > 3 * n
        };
        let tail = spec
            .iter()
            .enumerate()
            .filter(|(i, _)| self.grid.unravel(*i)[..self.grid.dim()].iter().any(|&j| high(j)))
            .map(|(_, z)| z.norm())
            .fold(0.0, f64::max);
        tail / peak
    }

    /// Fraction of the mass sitting within two cells of the boundary.
    pub fn boundary_mass_fraction(&self) -> f64 {
        let total = self.mass();
        if total == 0.0 {
            return 0.0;
        }
        let n = self.grid.n();
        let near = |j: usize| j <= 1 || j + 2 >= n;
        let edge: f64 = self
            .data
            .iter()
            .enumerate()
            .filter(|(i, _)| {
                let m = self.grid.unravel(*i);
                m[..self.grid.dim()].iter().any(|&j| near(j))
            })
            .map(|(_, z)| z.norm_sqr())
            .sum();
        edge * self.grid.cell_volume() / total
    }

    pub fn check_decayed(&self, tol: f64) -> Result<()> {
        let r = self.boundary_ratio();
        if r > tol {
            return Err(Error::NotDecayedAtBoundary(r));
        }
        Ok(())
    }

    /// `Re ∫ f̄ g`.
    pub fn real_inner(&self, other: &Self) -> f64 {
        let s: f64 = self.data.iter().zip(&other.data).map(|(a, b)| (a.conj() * b).re).sum();
        s * self.grid.cell_volume()
    }

    pub fn l2_distance(&self, other: &Self) -> f64 {
        let s: f64 = self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm_sqr()).sum();
        (s * self.grid.cell_volume()).sqrt()
    }

    pub fn sup_distance(&self, other: &Self) -> f64 {
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }
}

pub(crate) fn gradient_norm_sq_of_spectrum(grid: &Grid, spectrum: &[Complex64]) -> f64 {
    let per_axis: Vec<f64> = (0..grid.n()).map(|k| grid.wavenumber(k).powi(2)).collect();
    let mut sum = 0.0;
    for (i, z) in spectrum.iter().enumerate() {
        let m = grid.unravel(i);
        let k2: f64 = (0..grid.dim()).map(|a| per_axis[m[a]]).sum();
        sum += k2 * z.norm_sqr();
    }
    sum * grid.cell_volume() / grid.len() as f64
}

pub(crate) fn momentum_of_spectrum(grid: &Grid, spectrum: &[Complex64]) -> Vec<f64> {
    let per_axis: Vec<f64> = (0..grid.n()).map(|k| grid.odd_wavenumber(k)).collect();
    let mut p = vec![0.0; grid.dim()];
    for (i, z) in spectrum.iter().enumerate() {
        let m = grid.unravel(i);
        let w = z.norm_sqr();
        for (a, slot) in p.iter_mut().enumerate() {
            *slot += per_axis[m[a]] * w;
        }
    }
    let c = grid.cell_volume() / grid.len() as f64;
    p.iter().map(|v| v * c).collect()
}
