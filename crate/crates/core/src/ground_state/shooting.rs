//! Radial ground states in `d ∈ {2, 3}` by bisection on `Q(0)`.

use super::ode::{integrate, Tolerance};
use super::profile::{bessel_k, bessel_tail, sphere_area, RadialProfile, Shape};
use crate::error::{Error, Result};
use crate::functionals::NormParts;
use crate::params::NlsParameters;

pub const SHOOTING_RTOL: f64 = 1e-12;
pub const BRACKET: (f64, f64) = (0.1, 50.0);

/// Below this fraction of the peak the tabulated solution hands over to the
/// linear tail.
const HANDOVER: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Outcome {
    Overshoot,
    Undershoot,
}

type State = [f64; 5];

fn rhs(params: &NlsParameters) -> impl Fn(f64, &State) -> State + '_ {
    let dm1 = params.d() - 1.0;
    move |r, y| {
        let q = y[0];
        let w = r.powf(dm1);
        [
            y[1],
            -dm1 / r * y[1] + params.omega * q - q.abs().powf(params.p - 1.0) * q,
            w * y[1] * y[1],
            w * q.abs().powf(params.p + 1.0),
            w * q * q,
        ]
    }
}

fn shoot(q0: f64, params: &NlsParameters) -> Result<(Outcome, Vec<(f64, State)>)> {
    let d = params.d();
    let width = params.width();
    let r0 = 1e-4 * width;
    let a = (params.omega * q0 - q0.powf(params.p)) / (2.0 * d);
    let y0 = [
        q0 + a * r0 * r0,
        2.0 * a * r0,
        4.0 * a * a * r0.powf(d + 2.0) / (d + 2.0),
        q0.powf(params.p + 1.0) * r0.powf(d) / d,
        q0 * q0 * r0.powf(d) / d,
    ];
    let tol = Tolerance { rtol: SHOOTING_RTOL, atol: 1e-14 * q0, controlled: 2, max_step: 0.02 * width };
    let path = integrate(rhs(params), r0, y0, 200.0 * width, 1e-3 * width, tol, |_, y| y[0] < 0.0 || y[1] > 0.0)?;
    let last = path.last().expect("integration keeps the start point").1;
    // Ties go to overshoot.
    let outcome = if last[0] < 0.0 { Outcome::Overshoot } else { Outcome::Undershoot };
    Ok((outcome, path))
}

/// Integrates `Q'' + ((d-1)/r)Q' - ωQ + Q^p = 0` from a series start near
/// `r = 0`, bisecting on `Q(0)` until the bracket is narrower than `tol`.
pub fn shoot_radial(params: &NlsParameters, tol: f64) -> Result<RadialProfile> {
    if !(2..=3).contains(&params.dim) {
        return Err(Error::WrongDimension { expected: "2 or 3".into(), found: params.dim });
    }
    let (mut lo, mut hi) = BRACKET;
    if shoot(lo, params)?.0 != Outcome::Undershoot || shoot(hi, params)?.0 != Outcome::Overshoot {
        return Err(Error::BracketNotFound(lo, hi));
    }
    let mut iterations = 0;
    while hi - lo >= tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        match shoot(mid, params)?.0 {
            Outcome::Overshoot => hi = mid,
            Outcome::Undershoot => lo = mid,
        }
        iterations += 1;
        if iterations > 200 {
            return Err(Error::NoConvergence("bisection on Q(0) did not narrow".into()));
        }
    }
    let (_, path) = shoot(lo, params)?;
    let q0 = lo;
    let cut_index = path
        .iter()
        .position(|(_, y)| y[0] < HANDOVER * q0)
        .ok_or_else(|| Error::NoConvergence("profile never decayed below the handover level".into()))?;
    if path[1..=cut_index].iter().any(|(_, y)| y[1] >= 0.0) {
        return Err(Error::NoConvergence("profile is not monotone before the handover".into()));
    }
    let (cut, at_cut) = path[cut_index];
    let tail_amp = at_cut[0] / bessel_tail(cut, params);

    let mut radii = vec![0.0];
    let mut values = vec![q0];
    let mut slopes = vec![0.0];
    for (r, y) in &path[..=cut_index] {
        radii.push(*r);
        values.push(y[0]);
        slopes.push(y[1]);
    }

    let k = params.omega.sqrt();
    let nu = (params.d() - 2.0) / 2.0;
    let tail = |r: f64| tail_amp * bessel_tail(r, params);
    let tail_slope = |r: f64| -tail_amp * k * r.powf(-nu) * bessel_k(nu + 1.0, k * r);

    let dr = 0.05 * params.width();
    let mut r = cut;
    while tail(r) > 1e-10 * q0 {
        r += dr;
        radii.push(r);
        values.push(tail(r));
        slopes.push(tail_slope(r));
    }

    // Tail norms by Simpson's rule out to where the tail is below 1e-16 of the peak.
    let mut end = r;
    while tail(end) > 1e-16 * q0 {
        end += 1.0 * params.width();
    }
    let n = (((end - cut) / (0.01 * params.width())).ceil() as usize).max(2) & !1usize;
    let h = (end - cut) / n as f64;
    let d = params.d();
    let mut tail_norms = [0.0; 3];
    for i in 0..=n {
        let ri = cut + i as f64 * h;
        let w = if i == 0 || i == n { 1.0 } else if i % 2 == 1 { 4.0 } else { 2.0 };
        let jac = ri.powf(d - 1.0);
        let (q, dq) = (tail(ri), tail_slope(ri));
        tail_norms[0] += w * jac * dq * dq;
        tail_norms[1] += w * jac * q.powf(params.p + 1.0);
        tail_norms[2] += w * jac * q * q;
    }
    let area = sphere_area(params.dim);
    let norms = NormParts {
        grad_sq: area * (at_cut[2] + tail_norms[0] * h / 3.0),
        potential: area * (at_cut[3] + tail_norms[1] * h / 3.0),
        mass: area * (at_cut[4] + tail_norms[2] * h / 3.0),
    };
    Ok(RadialProfile::new(radii, values, slopes, *params, Shape::Shot { cut, tail_amp }, norms))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cubic_three_dimensional_ground_state() {
        let p = NlsParameters::new(3, 3.0, 1.0).unwrap();
        let q = shoot_radial(&p, 1e-12).unwrap();
        // Classical value of Q(0) for the cubic ground state in 3D.
        assert!((q.peak() - 4.337_387).abs() < 1e-5, "peak {}", q.peak());
        let n = q.norms();
        assert!(q.virial().abs() < 1e-8 * n.grad_sq, "K = {}", q.virial());
        let vals = q.values();
        assert!(vals.windows(2).all(|w| w[1] < w[0]));
        assert!(*vals.last().unwrap() < 1e-8 * q.peak());
    }

    #[test]
    fn rejects_one_dimension() {
        let p = NlsParameters::new(1, 7.0, 1.0).unwrap();
        assert!(matches!(shoot_radial(&p, 1e-10), Err(Error::WrongDimension { .. })));
    }
}
