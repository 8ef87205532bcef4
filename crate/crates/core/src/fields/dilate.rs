//! Trigonometric interpolation of a sampled field at dilated coordinates.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::field::ComplexField;
use super::grid::Grid;

const RESYNC: usize = 64;
const NEAR_SINGULAR: f64 = 1e-7;

/// `g(x) = f(c x)` by evaluating the trigonometric interpolant of `f` at the
/// points `c x_j`, axis by axis. Points that land outside the box are set to
/// zero: the interpolant there would be a periodic image, not the decayed
/// ℝ^d function the field stands for.
pub fn dilate(f: &ComplexField, c: f64) -> ComplexField {
    let grid = *f.grid();
    if c == 1.0 {
        return f.clone();
    }
    let matrix = interpolation_matrix(&grid, c);
    let n = grid.n();
    let mut data = f.samples().to_vec();
    let mut line = vec![Complex64::default(); n];
    let mut out = vec![Complex64::default(); n];
    for axis in 0..grid.dim() {
        let stride = grid.stride(axis);
        let block = stride * n;
        for base in (0..data.len()).step_by(block) {
            for offset in 0..stride {
                let start = base + offset;
                for (j, slot) in line.iter_mut().enumerate() {
                    *slot = data[start + j * stride];
                }
                for (i, o) in out.iter_mut().enumerate() {
                    *o = match &matrix[i] {
                        Some(row) => row.iter().zip(&line).map(|(w, v)| v * *w).sum(),
                        None => Complex64::default(),
                    };
                }
                for (j, value) in out.iter().enumerate() {
                    data[start + j * stride] = *value;
                }
            }
        }
    }
    ComplexField::from_raw(grid, data)
}

/// Rows of the 1D interpolation operator; `None` marks targets outside the box.
fn interpolation_matrix(grid: &Grid, c: f64) -> Vec<Option<Vec<f64>>> {
    let n = grid.n();
    let half = 0.5 * grid.length();
    (0..n)
        .map(|i| {
            let target = c * grid.coordinate(i);
            if target < -half * (1.0 + 1e-12) || target >= half {
                None
            } else {
                Some(kernel_row(grid, target - grid.coordinate(0)))
            }
        })
        .collect()
}

/// `D(a - j h)` for `j = 0..N`, where `D` is the band-limited periodic delta
/// (symmetric treatment of the Nyquist mode):
/// `D(s) = (1/N) [sin((m+½)θ)/sin(θ/2) + cos(Nθ/2)]`, `θ = 2πs/L`, `m = N/2 - 1`.
fn kernel_row(grid: &Grid, a: f64) -> Vec<f64> {
    let n = grid.n();
    let nf = n as f64;
    let m_half = 0.5 * (nf - 1.0); // m + 1/2
    let theta_a = 2.0 * PI * a / grid.length();
    let step_half = Complex64::from_polar(1.0, -PI / nf);
    let step_m = Complex64::from_polar(1.0, -(nf - 1.0) * PI / nf);
    let nyquist = (0.5 * nf * theta_a).cos();

    let mut row = vec![0.0; n];
    let mut half = Complex64::default();
    let mut wide = Complex64::default();
    for (j, slot) in row.iter_mut().enumerate() {
        if j % RESYNC == 0 {
            let theta = theta_a - 2.0 * PI * j as f64 / nf;
            half = Complex64::from_polar(1.0, 0.5 * theta);
            wide = Complex64::from_polar(1.0, m_half * theta);
        }
        let denom = half.im;
        let ratio = if denom.abs() < NEAR_SINGULAR {
            let theta = theta_a - 2.0 * PI * j as f64 / nf;
            let delta = 0.5 * theta - (theta / (2.0 * PI)).round() * PI;
            let k = 2.0 * m_half;
            k * (1.0 - (k * k - 1.0) * delta * delta / 6.0)
        } else {
            wide.im / denom
        };
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        *slot = (ratio + sign * nyquist) / nf;
        half *= step_half;
        wide *= step_m;
    }
    row
}
