use std::f64::consts::PI;

use crate::error::{Error, Result};

pub const MAX_DIM: usize = 3;

/// Uniform periodic box `[-L/2, L/2)^d` with `N` points per axis.
///
/// Sample `j` along an axis sits at `x_j = -L/2 + j h`, so `x = 0` is the
/// sample `j = N/2` and `x ↦ -x` maps the lattice to itself (`j ↦ N - j mod N`).
/// Samples are stored row-major with the last axis fastest.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    dim: usize,
    n: usize,
    length: f64,
}

impl Grid {
    pub fn new(dim: usize, n: usize, length: f64) -> Result<Self> {
        if !(1..=MAX_DIM).contains(&dim) {
            return Err(Error::InvalidGrid(format!("dimension {dim} not in 1..=3")));
        }
        if n < 4 || !n.is_power_of_two() {
            return Err(Error::InvalidGrid(format!("points per axis {n} must be a power of two >= 4")));
        }
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::InvalidGrid(format!("box length {length} must be positive")));
        }
        Ok(Self { dim, n, length })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn spacing(&self) -> f64 {
        self.length / self.n as f64
    }

    /// Total number of samples `N^d`.
    pub fn len(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Quadrature weight `h^d`.
    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dim as i32)
    }

    pub fn coordinate(&self, j: usize) -> f64 {
        -0.5 * self.length + j as f64 * self.spacing()
    }

    /// Angular wavenumber of FFT bin `k`, in `[-N/2, N/2) · 2π/L`.
    pub fn wavenumber(&self, k: usize) -> f64 {
        let n = self.n as i64;
        let k = k as i64;
        let signed = if k < n / 2 { k } else { k - n };
        2.0 * PI * signed as f64 / self.length
    }

    /// Wavenumber with the Nyquist bin zeroed, for odd-order derivatives.
    pub fn odd_wavenumber(&self, k: usize) -> f64 {
        if k == self.n / 2 {
            0.0
        } else {
            self.wavenumber(k)
        }
    }

    pub fn stride(&self, axis: usize) -> usize {
        self.n.pow((self.dim - 1 - axis) as u32)
    }

    pub fn unravel(&self, mut index: usize) -> [usize; MAX_DIM] {
        let mut out = [0; MAX_DIM];
        for axis in (0..self.dim).rev() {
            out[axis] = index % self.n;
            index /= self.n;
        }
        out
    }

    pub fn ravel(&self, multi: &[usize; MAX_DIM]) -> usize {
        multi[..self.dim].iter().fold(0, |acc, &j| acc * self.n + j)
    }

    pub fn point(&self, index: usize) -> [f64; MAX_DIM] {
        let multi = self.unravel(index);
        let mut x = [0.0; MAX_DIM];
        for axis in 0..self.dim {
            x[axis] = self.coordinate(multi[axis]);
        }
        x
    }

    pub fn wavevector(&self, index: usize) -> [f64; MAX_DIM] {
        let multi = self.unravel(index);
        let mut k = [0.0; MAX_DIM];
        for axis in 0..self.dim {
            k[axis] = self.wavenumber(multi[axis]);
        }
        k
    }

    /// `|ξ|²` for every FFT bin, in storage order.
    pub fn wavenumber_sq(&self) -> Vec<f64> {
        let per_axis: Vec<f64> = (0..self.n).map(|k| self.wavenumber(k).powi(2)).collect();
        (0..self.len())
            .map(|i| {
                let m = self.unravel(i);
                (0..self.dim).map(|a| per_axis[m[a]]).sum()
            })
            .collect()
    }

    /// Integer number of grid steps for a displacement, if it is on the lattice.
    pub fn lattice_steps(&self, y: &[f64]) -> Result<[i64; MAX_DIM]> {
        if y.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: y.len() });
        }
        let h = self.spacing();
        let mut steps = [0; MAX_DIM];
        for (axis, &ya) in y.iter().enumerate() {
            let s = ya / h;
            let r = s.round();
            if !ya.is_finite() || (s - r).abs() > 1e-9 * s.abs().max(1.0) {
                return Err(Error::OffLatticeTranslation(y.to_vec()));
            }
            steps[axis] = r as i64;
        }
        Ok(steps)
    }
}
