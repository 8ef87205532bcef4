//! Adaptive Dormand-Prince 5(4) integration of small autonomous-in-form
//! systems `y' = f(r, y)`.

use crate::error::{Error, Result};

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B_LOW: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

#[derive(Debug, Clone, Copy)]
pub(crate) struct Tolerance {
    pub rtol: f64,
    pub atol: f64,
    /// Only the first `controlled` components enter the error estimate.
    pub controlled: usize,
    pub max_step: f64,
}

/// Integrates from `(r0, y0)` until `r_end` or until `stop` returns true
/// after an accepted step. Returns every accepted `(r, y)` including the
/// start.
pub(crate) fn integrate<const N: usize>(
    f: impl Fn(f64, &[f64; N]) -> [f64; N],
    r0: f64,
    y0: [f64; N],
    r_end: f64,
    h0: f64,
    tol: Tolerance,
    mut stop: impl FnMut(f64, &[f64; N]) -> bool,
) -> Result<Vec<(f64, [f64; N])>> {
    let mut out = vec![(r0, y0)];
    let (mut r, mut y) = (r0, y0);
    let mut h = h0;
    let mut k = [[0.0; N]; 7];
    k[0] = f(r, &y);
    let mut rejected = 0usize;
    while r < r_end {
        h = h.min(r_end - r).min(tol.max_step);
        if h < 1e-14 * r.abs().max(1.0) {
            return Err(Error::NoConvergence(format!("step size underflow at r = {r}")));
        }
        for s in 1..7 {
            let mut ys = y;
            for (i, v) in ys.iter_mut().enumerate() {
                for j in 0..s {
                    *v += h * A[s][j] * k[j][i];
                }
            }
            k[s] = f(r + C[s] * h, &ys);
        }
        let mut y_new = y;
        let mut err = 0.0f64;
        for i in 0..N {
            let mut hi = 0.0;
            let mut lo = 0.0;
            for s in 0..7 {
                hi += B[s] * k[s][i];
                lo += B_LOW[s] * k[s][i];
            }
            y_new[i] = y[i] + h * hi;
            if i < tol.controlled {
                let scale = tol.atol + tol.rtol * y[i].abs().max(y_new[i].abs());
                err = err.max((h * (hi - lo)).abs() / scale);
            }
        }
        if !err.is_finite() {
            return Err(Error::NonFinite);
        }
        if err <= 1.0 {
            r += h;
            y = y_new;
            // FSAL: the seventh stage is f at the new point.
            k[0] = k[6];
            out.push((r, y));
            rejected = 0;
            if stop(r, &y) {
                break;
            }
        } else {
            rejected += 1;
            if rejected > 100 {
                return Err(Error::NoConvergence(format!("step rejected repeatedly at r = {r}")));
            }
        }
        let factor = if err == 0.0 { 5.0 } else { 0.9 * err.powf(-0.2) };
        h *= factor.clamp(0.2, 5.0);
    }
    Ok(out)
}
