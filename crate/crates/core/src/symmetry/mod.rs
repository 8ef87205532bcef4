//! Finite subgroups of `ℝ/2πℤ × O(d)`, their exact action on grids, and
//! condition (*).

mod action;
pub mod catalog;
mod element;
pub mod file;
mod fixed;
mod group;

pub use action::{apply, symmetrization_residual, symmetrize, symmetrized_translate, GroupAction};
pub use element::{compose, GroupElement, GROUP_TOL};
pub use fixed::{escaping_direction, fixed_dimension, fixed_subspace, satisfies_star, RANK_TOL};
pub use group::{proper_subgroups, verify_group, SubgroupRelation, SymmetryGroup, MAX_ENUMERATION_ORDER};
