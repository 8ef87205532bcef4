use nalgebra::DMatrix;

use super::element::GroupElement;
use super::group::SymmetryGroup;
use crate::error::{Error, Result};

/// Singular values below this are treated as zero when deciding rank.
pub const RANK_TOL: f64 = 1e-10;

/// Orthonormal basis (as columns of a `d × k` matrix) of
/// `{x ∈ ℝ^d : R x = x for every element}`.
///
/// Computed from the SVD of the stacked matrix `[R₁ - I; R₂ - I; …]`.
pub fn fixed_subspace(dim: usize, elements: &[GroupElement]) -> DMatrix<f64> {
    if elements.is_empty() {
        return DMatrix::identity(dim, dim);
    }
    let rows = elements.len() * dim;
    let mut stacked = DMatrix::zeros(rows, dim);
    for (k, e) in elements.iter().enumerate() {
        let block = e.matrix() - DMatrix::identity(dim, dim);
        stacked.view_mut((k * dim, 0), (dim, dim)).copy_from(&block);
    }
    let svd = stacked.svd(false, true);
    let v_t = svd.v_t.expect("requested V^T");
    let null: Vec<usize> = (0..dim).filter(|&i| svd.singular_values[i] < RANK_TOL).collect();
    let mut basis = DMatrix::zeros(dim, null.len());
    for (c, &i) in null.iter().enumerate() {
        basis.set_column(c, &v_t.row(i).transpose());
    }
    basis
}

pub fn fixed_dimension(dim: usize, elements: &[GroupElement]) -> usize {
    fixed_subspace(dim, elements).ncols()
}

/// Decides condition (*) for `sub ⊂ group`: some sequence `x_n` has bounded
/// displacement under every element of `sub` while `|x_n - g x_n| → ∞` for
/// every other `g`.
///
/// Bounded displacement under `sub` means `x_n` stays within bounded distance
/// of `Fix(sub)`; the sequence exists exactly when no `g ∉ sub` fixes all of
/// `Fix(sub)`, i.e. when every `Fix(sub ∪ {g})` is a proper subspace of
/// `Fix(sub)` (a finite union of proper subspaces cannot cover it).
pub fn satisfies_star(group: &SymmetryGroup, sub: &SymmetryGroup) -> Result<bool> {
    if !sub.is_subgroup_of(group) {
        return Err(Error::NotASubgroup);
    }
    let base = fixed_dimension(group.dim(), sub.elements());
    for g in group.elements() {
        if sub.contains(g) {
            continue;
        }
        let mut with_g = sub.elements().to_vec();
        with_g.push(g.clone());
        if fixed_dimension(group.dim(), &with_g) >= base {
            return Ok(false);
        }
    }
    Ok(true)
}

/// A point of `Fix(sub)` moved by every `g ∉ sub`, scaled to unit length;
/// `None` when (*) fails. Used to seed symmetrized-translate initial data.
pub fn escaping_direction(group: &SymmetryGroup, sub: &SymmetryGroup) -> Result<Option<Vec<f64>>> {
    if !satisfies_star(group, sub)? {
        return Ok(None);
    }
    let basis = fixed_subspace(group.dim(), sub.elements());
    if basis.ncols() == 0 {
        return Ok(None);
    }
    // Deterministic irrational-ish coefficients avoid every proper subspace
    // generically; verify and perturb if unlucky.
    for attempt in 0..32u32 {
        let coeffs: Vec<f64> = (0..basis.ncols())
            .map(|k| 1.0 + ((k as f64 + 1.0) * (0.754_877_666 + attempt as f64 * 0.318_309_886)).fract())
            .collect();
        let x = &basis * nalgebra::DVector::from_vec(coeffs);
        let escapes = group
            .elements()
            .iter()
            .filter(|g| !sub.contains(g))
            .all(|g| (g.matrix() * &x - &x).norm() > 1e-6 * x.norm());
        if escapes {
            let n = x.norm();
            return Ok(Some(x.iter().map(|v| v / n).collect()));
        }
    }
    Ok(None)
}
