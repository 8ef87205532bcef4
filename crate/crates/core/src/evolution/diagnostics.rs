use std::io::Write;

use super::{TrajectoryRecord, BOUNDARY_GUARD};
use crate::error::{Error, Result};
use crate::functionals::FunctionalReport;
use crate::params::NlsParameters;
use crate::symmetry::SymmetryGroup;

/// Samples needed for at least three interior second differences.
const MIN_SAMPLES: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VirialReport {
    /// `max |V'' - 4dK|` over interior samples divided by `max(max |4dK|, 1e-12)`.
    pub max_relative: f64,
    pub max_absolute: f64,
    /// Samples in the window used.
    pub samples: usize,
    pub spacing: f64,
}

/// Compares the centered second difference of the variance with `4dK` on the
/// longest run of uniformly spaced samples taken before the boundary guard
/// was exceeded.
pub fn virial_report(trajectory: &TrajectoryRecord, params: &NlsParameters) -> Result<VirialReport> {
    let clean = trajectory.boundary_mass.iter().position(|&b| b > BOUNDARY_GUARD).unwrap_or(trajectory.len());
    let times = &trajectory.times[..clean];
    let (start, len) = longest_uniform_run(times);
    if len < MIN_SAMPLES {
        return Err(Error::TooFewSamples { needed: MIN_SAMPLES, have: len });
    }
    let v = &trajectory.variance[start..start + len];
    let k = &trajectory.reports[start..start + len];
    let spacing = times[start + 1] - times[start];
    let four_d = 4.0 * params.d();
    let mut max_abs: f64 = 0.0;
    let mut max_rhs: f64 = 0.0;
    for i in 1..len - 1 {
        let lhs = (v[i + 1] - 2.0 * v[i] + v[i - 1]) / (spacing * spacing);
        let rhs = four_d * k[i].virial;
        max_abs = max_abs.max((lhs - rhs).abs());
        max_rhs = max_rhs.max(rhs.abs());
    }
    Ok(VirialReport { max_relative: max_abs / max_rhs.max(1e-12), max_absolute: max_abs, samples: len, spacing })
}

/// `(start, length)` of the longest run of equally spaced times; ties go to
/// the earliest run.
fn longest_uniform_run(times: &[f64]) -> (usize, usize) {
    if times.len() < 2 {
        return (0, times.len());
    }
    let same = |a: f64, b: f64| (a - b).abs() <= 1e-9 * a.abs().max(b.abs());
    let mut best = (0, 1);
    let mut start = 0;
    for i in 1..times.len() {
        let extends = i - start < 2 || same(times[i] - times[i - 1], times[start + 1] - times[start]);
        if !extends {
            start = i - 1;
        }
        if i + 1 - start > best.1 {
            best = (start, i + 1 - start);
        }
    }
    best
}

/// Largest recorded `‖u - symmetrize(u)‖/‖u‖`. Zero for the trivial group;
/// other groups must be the one the trajectory was recorded under.
pub fn symmetry_drift(trajectory: &TrajectoryRecord, group: &SymmetryGroup) -> Result<f64> {
    if group.is_trivial() {
        return Ok(0.0);
    }
    if trajectory.group_key.as_deref() != Some(group.canonical_key().as_str()) {
        return Err(Error::Config(format!("trajectory was not recorded under group {}", group.id())));
    }
    Ok(trajectory.sym_residual.iter().copied().fold(0.0, f64::max))
}

pub fn trajectory_csv_header(dim: usize) -> String {
    let p: Vec<&str> = ["Px", "Py", "Pz"][..dim].to_vec();
    format!("t,M,E,{},S_omega,K,variance,scatter_norm_accum,sym_residual,dt", p.join(","))
}

/// `t, M, E, P…, S_omega, K, variance, scatter_norm_accum, sym_residual, dt`.
pub fn write_trajectory_csv<W: Write>(trajectory: &TrajectoryRecord, mut w: W) -> Result<()> {
    writeln!(w, "{}", trajectory_csv_header(trajectory.dim))?;
    for i in 0..trajectory.len() {
        let r: &FunctionalReport = &trajectory.reports[i];
        write!(w, "{:.17e},{:.17e},{:.17e}", trajectory.times[i], r.mass, r.energy)?;
        for p in &r.momentum {
            write!(w, ",{p:.17e}")?;
        }
        writeln!(
            w,
            ",{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e}",
            r.action,
            r.virial,
            trajectory.variance[i],
            trajectory.scatter_accum[i],
            trajectory.sym_residual[i],
            trajectory.dt[i]
        )?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_runs() {
        assert_eq!(longest_uniform_run(&[0.0, 1.0, 2.0, 3.0, 3.5, 4.0, 4.5, 5.0, 5.5]), (3, 6));
        assert_eq!(longest_uniform_run(&[0.0, 0.1, 0.2]), (0, 3));
        assert_eq!(longest_uniform_run(&[1.0]), (0, 1));
    }
}
