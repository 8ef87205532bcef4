use std::f64::consts::{PI, TAU};
use std::fmt;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Tolerance for comparing phases (mod 2π) and matrix entries.
pub const GROUP_TOL: f64 = 1e-12;

/// An element `(θ, R)` of `ℝ/2πℤ × O(d)`, acting on functions by
/// `(θ, R)φ(x) = e^{-iθ} φ(R⁻¹ x)`.
#[derive(Debug, Clone)]
pub struct GroupElement {
    phase: f64,
    matrix: DMatrix<f64>,
}

impl GroupElement {
    pub fn new(phase: f64, matrix: DMatrix<f64>) -> Result<Self> {
        if !matrix.is_square() || matrix.nrows() == 0 {
            return Err(Error::InvalidParameters("group matrix must be square and nonempty".into()));
        }
        if !phase.is_finite() || matrix.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        let d = matrix.nrows();
        let dev = (matrix.transpose() * &matrix - DMatrix::identity(d, d)).amax();
        if dev > GROUP_TOL {
            return Err(Error::NotOrthogonal(dev));
        }
        Ok(Self { phase: normalize_phase(phase), matrix })
    }

    /// Row-major matrix entries.
    pub fn from_rows(phase: f64, dim: usize, entries: &[f64]) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch { expected: dim * dim, found: entries.len() });
        }
        Self::new(phase, DMatrix::from_row_slice(dim, dim, entries))
    }

    pub fn identity(dim: usize) -> Self {
        Self { phase: 0.0, matrix: DMatrix::identity(dim, dim) }
    }

    pub fn phase(&self) -> f64 {
        self.phase
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn compose(&self, other: &Self) -> Result<Self> {
        compose(self, other)
    }

    pub fn inverse(&self) -> Self {
        Self { phase: normalize_phase(-self.phase), matrix: self.matrix.transpose() }
    }

    pub fn same_matrix(&self, other: &Self) -> bool {
        self.dim() == other.dim() && (&self.matrix - &other.matrix).amax() <= GROUP_TOL
    }

    pub fn same_phase(&self, other: &Self) -> bool {
        let diff = (self.phase - other.phase).rem_euclid(TAU);
        diff <= GROUP_TOL || TAU - diff <= GROUP_TOL
    }

    pub fn approx_eq(&self, other: &Self) -> bool {
        self.same_matrix(other) && self.same_phase(other)
    }

    pub fn is_identity(&self) -> bool {
        self.approx_eq(&Self::identity(self.dim()))
    }

    /// For a signed permutation matrix, `(axis, sign)` per row of `R⁻¹ = Rᵀ`:
    /// `(R⁻¹x)_a = sign_a · x_{axis_a}`.
    pub fn inverse_signed_permutation(&self) -> Result<Vec<(usize, f64)>> {
        let d = self.dim();
        let inv = self.matrix.transpose();
        let mut out = Vec::with_capacity(d);
        let mut used = vec![false; d];
        for a in 0..d {
            let mut hit = None;
            for b in 0..d {
                let v = inv[(a, b)];
                if (v.abs() - 1.0).abs() <= GROUP_TOL {
                    if hit.is_some() {
                        return Err(Error::NonGridCompatibleMatrix);
                    }
                    hit = Some((b, v.signum()));
                } else if v.abs() > GROUP_TOL {
                    return Err(Error::NonGridCompatibleMatrix);
                }
            }
            let (b, s) = hit.ok_or(Error::NonGridCompatibleMatrix)?;
            if used[b] {
                return Err(Error::NonGridCompatibleMatrix);
            }
            used[b] = true;
            out.push((b, s));
        }
        Ok(out)
    }

    /// Sort key: rounded matrix entries, then phase.
    pub(crate) fn sort_key(&self) -> (Vec<i64>, i64) {
        let m = self.matrix.transpose().iter().map(|v| (v * 1e9).round() as i64).collect();
        (m, (self.phase / PI * 1e9).round() as i64)
    }
}

impl fmt::Display for GroupElement {
    /// Group-file line: phase in units of π, then the matrix row-major.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", fmt_num(self.phase / PI))?;
        let d = self.dim();
        for r in 0..d {
            for c in 0..d {
                write!(f, " {}", fmt_num(self.matrix[(r, c)]))?;
            }
        }
        Ok(())
    }
}

fn fmt_num(v: f64) -> String {
    let r = v.round();
    if (v - r).abs() < 1e-12 {
        format!("{}", r as i64)
    } else {
        format!("{v}")
    }
}

pub(crate) fn normalize_phase(phase: f64) -> f64 {
    let p = phase.rem_euclid(TAU);
    if TAU - p <= GROUP_TOL {
        0.0
    } else {
        p
    }
}

/// `(θ₁, R₁)∘(θ₂, R₂) = (θ₁ + θ₂ mod 2π, R₁R₂)`.
pub fn compose(g1: &GroupElement, g2: &GroupElement) -> Result<GroupElement> {
    if g1.dim() != g2.dim() {
        return Err(Error::DimensionMismatch { expected: g1.dim(), found: g2.dim() });
    }
    Ok(GroupElement {
        phase: normalize_phase(g1.phase + g2.phase),
        matrix: &g1.matrix * &g2.matrix,
    })
}
