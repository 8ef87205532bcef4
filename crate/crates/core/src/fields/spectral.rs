//! Multi-dimensional FFT on a [`Grid`], axis by axis.
//!
//! Forward transforms are unnormalized; inverse transforms divide by `N^d`
//! so that `inverse(forward(f)) = f`.

use std::cell::RefCell;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::grid::Grid;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn plans(n: usize) -> (Arc<dyn Fft<f64>>, Arc<dyn Fft<f64>>) {
    PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        (p.plan_fft_forward(n), p.plan_fft_inverse(n))
    })
}

fn transform(grid: &Grid, data: &mut [Complex64], plan: &Arc<dyn Fft<f64>>) {
    let n = grid.n();
    debug_assert_eq!(data.len(), grid.len());
    let mut scratch = vec![Complex64::default(); plan.get_inplace_scratch_len()];
    // Last axis is contiguous: one batched call.
    plan.process_with_scratch(data, &mut scratch);
    if grid.dim() == 1 {
        return;
    }
    let mut line = vec![Complex64::default(); n];
    for axis in 0..grid.dim() - 1 {
        let stride = grid.stride(axis);
        let block = stride * n;
        for base in (0..data.len()).step_by(block) {
            for offset in 0..stride {
                let start = base + offset;
                for (j, slot) in line.iter_mut().enumerate() {
                    *slot = data[start + j * stride];
                }
                plan.process_with_scratch(&mut line, &mut scratch);
                for (j, value) in line.iter().enumerate() {
                    data[start + j * stride] = *value;
                }
            }
        }
    }
}

pub fn forward(grid: &Grid, data: &mut [Complex64]) {
    let (fwd, _) = plans(grid.n());
    transform(grid, data, &fwd);
}

pub fn inverse(grid: &Grid, data: &mut [Complex64]) {
    let (_, inv) = plans(grid.n());
    transform(grid, data, &inv);
    let scale = 1.0 / grid.len() as f64;
    for v in data.iter_mut() {
        *v *= scale;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip_3d() {
        let g = Grid::new(3, 8, 2.0).unwrap();
        let orig: Vec<Complex64> = (0..g.len())
            .map(|i| Complex64::new((i as f64 * 0.37).sin(), (i as f64 * 0.11).cos()))
            .collect();
        let mut data = orig.clone();
        forward(&g, &mut data);
        inverse(&g, &mut data);
        for (a, b) in orig.iter().zip(&data) {
            assert!((a - b).norm() < 1e-13);
        }
    }

    #[test]
    fn single_mode_2d() {
        let g = Grid::new(2, 8, 1.0).unwrap();
        // e^{i 2π (x + 2y)}: bin (1, 2) holds N^2.
        let mut data: Vec<Complex64> = (0..g.len())
            .map(|i| {
                let x = g.point(i);
                Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * (x[0] + 2.0 * x[1]))
            })
            .collect();
        forward(&g, &mut data);
        let peak = g.ravel(&[1, 2, 0]);
        for (i, v) in data.iter().enumerate() {
            if i == peak {
                assert!((v.norm() - 64.0).abs() < 1e-10);
            } else {
                assert!(v.norm() < 1e-10);
            }
        }
    }
}
