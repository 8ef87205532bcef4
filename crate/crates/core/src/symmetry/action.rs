use num_complex::Complex64;

use super::element::GroupElement;
use super::group::SymmetryGroup;
use crate::error::{Error, Result};
use crate::fields::{ComplexField, Grid};

/// Index permutation and unit phase realizing one group element on a grid.
#[derive(Debug, Clone)]
struct ElementMap {
    source: Vec<usize>,
    factor: Complex64,
}

impl ElementMap {
    fn new(g: &GroupElement, grid: &Grid) -> Result<Self> {
        if g.dim() != grid.dim() {
            return Err(Error::DimensionMismatch { expected: grid.dim(), found: g.dim() });
        }
        let perm = g.inverse_signed_permutation()?;
        let n = grid.n();
        let source = (0..grid.len())
            .map(|i| {
                let m = grid.unravel(i);
                let mut src = [0usize; crate::fields::MAX_DIM];
                for (a, &(b, s)) in perm.iter().enumerate() {
                    src[a] = if s > 0.0 { m[b] } else { (n - m[b]) % n };
                }
                grid.ravel(&src)
            })
            .collect();
        Ok(Self { source, factor: Complex64::from_polar(1.0, -g.phase()) })
    }

    fn apply_into(&self, input: &[Complex64], out: &mut [Complex64]) {
        for (o, &s) in out.iter_mut().zip(&self.source) {
            *o = input[s] * self.factor;
        }
    }

    fn accumulate(&self, input: &[Complex64], acc: &mut [Complex64]) {
        for (o, &s) in acc.iter_mut().zip(&self.source) {
            *o += input[s] * self.factor;
        }
    }
}

/// A finite group realized as exact index permutations on one grid.
#[derive(Debug, Clone)]
pub struct GroupAction {
    grid: Grid,
    maps: Vec<ElementMap>,
}

impl GroupAction {
    pub fn new(group: &SymmetryGroup, grid: &Grid) -> Result<Self> {
        let maps = group.elements().iter().map(|g| ElementMap::new(g, grid)).collect::<Result<_>>()?;
        Ok(Self { grid: *grid, maps })
    }

    fn check(&self, f: &ComplexField) -> Result<()> {
        if *f.grid() != self.grid {
            return Err(Error::InvalidGrid("field grid differs from the action grid".into()));
        }
        Ok(())
    }

    /// `(1/#G) Σ_g g·f`.
    pub fn symmetrize(&self, f: &ComplexField) -> Result<ComplexField> {
        self.check(f)?;
        let mut acc = vec![Complex64::default(); f.samples().len()];
        for m in &self.maps {
            m.accumulate(f.samples(), &mut acc);
        }
        let inv = 1.0 / self.maps.len() as f64;
        for v in &mut acc {
            *v *= inv;
        }
        Ok(ComplexField::from_raw(self.grid, acc))
    }

    /// `‖f - symmetrize(f)‖_{L²} / ‖f‖_{L²}` (0 for the zero field).
    pub fn residual(&self, f: &ComplexField) -> Result<f64> {
        let norm = f.mass().sqrt();
        if norm == 0.0 {
            return Ok(0.0);
        }
        Ok(f.l2_distance(&self.symmetrize(f)?) / norm)
    }

    pub fn apply_element(&self, index: usize, f: &ComplexField) -> Result<ComplexField> {
        self.check(f)?;
        let mut out = vec![Complex64::default(); f.samples().len()];
        self.maps[index].apply_into(f.samples(), &mut out);
        Ok(ComplexField::from_raw(self.grid, out))
    }
}

/// `(θ, R)f(x) = e^{-iθ} f(R⁻¹x)` as an exact index permutation.
pub fn apply(g: &GroupElement, f: &ComplexField) -> Result<ComplexField> {
    let map = ElementMap::new(g, f.grid())?;
    let mut out = vec![Complex64::default(); f.samples().len()];
    map.apply_into(f.samples(), &mut out);
    Ok(ComplexField::from_raw(*f.grid(), out))
}

pub fn symmetrize(f: &ComplexField, group: &SymmetryGroup) -> Result<ComplexField> {
    GroupAction::new(group, f.grid())?.symmetrize(f)
}

/// `(1/#G) Σ_g g·τ_{x0} f`.
pub fn symmetrized_translate(f: &ComplexField, x0: &[f64], group: &SymmetryGroup) -> Result<ComplexField> {
    symmetrize(&f.translate(x0)?, group)
}

pub fn symmetrization_residual(f: &ComplexField, group: &SymmetryGroup) -> Result<f64> {
    GroupAction::new(group, f.grid())?.residual(f)
}
