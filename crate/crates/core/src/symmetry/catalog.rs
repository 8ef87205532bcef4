//! Named groups used in the worked examples.

use std::f64::consts::PI;

use super::element::GroupElement;
use super::group::{verify_group, SymmetryGroup};
use crate::error::{Error, Result};

fn build(name: &str, dim: usize, rows: &[(f64, &[f64])]) -> SymmetryGroup {
    let els: Vec<GroupElement> = rows
        .iter()
        .map(|(phase, m)| GroupElement::from_rows(*phase, dim, m).expect("catalog element"))
        .collect();
    verify_group(&els, dim).expect("catalog group").with_name(name)
}

/// `G_even = {(0, 1), (0, -1)}` in one dimension.
pub fn even() -> SymmetryGroup {
    build("even", 1, &[(0.0, &[1.0]), (0.0, &[-1.0])])
}

/// `G_odd = {(0, 1), (π, -1)}` in one dimension.
pub fn odd() -> SymmetryGroup {
    build("odd", 1, &[(0.0, &[1.0]), (PI, &[-1.0])])
}

/// The order-4 planar group generated by `(π, R_{π/2})`.
pub fn quarter_turn() -> SymmetryGroup {
    build(
        "quarter_turn",
        2,
        &[
            (0.0, &[1.0, 0.0, 0.0, 1.0]),
            (PI, &[0.0, -1.0, 1.0, 0.0]),
            (PI, &[0.0, 1.0, -1.0, 0.0]),
            (0.0, &[-1.0, 0.0, 0.0, -1.0]),
        ],
    )
}

/// `{(0, I), (0, -I)}`, the index-2 subgroup of [`quarter_turn`].
pub fn quarter_turn_g1() -> SymmetryGroup {
    build("quarter_turn_g1", 2, &[(0.0, &[1.0, 0.0, 0.0, 1.0]), (0.0, &[-1.0, 0.0, 0.0, -1.0])])
}

/// `{(0, I), (π, diag(-1, 1))}`: odd in the first coordinate.
pub fn mirror_odd() -> SymmetryGroup {
    build("mirror_odd", 2, &[(0.0, &[1.0, 0.0, 0.0, 1.0]), (PI, &[-1.0, 0.0, 0.0, 1.0])])
}

pub fn all_finite() -> Vec<SymmetryGroup> {
    vec![
        SymmetryGroup::trivial(1),
        even(),
        odd(),
        SymmetryGroup::trivial(2),
        quarter_turn(),
        quarter_turn_g1(),
        mirror_odd(),
        SymmetryGroup::trivial(3),
    ]
}

/// The catalog name of a group with the same elements, if any.
pub fn identify(group: &SymmetryGroup) -> Option<String> {
    let key = group.canonical_key();
    all_finite()
        .into_iter()
        .find(|g| g.canonical_key() == key)
        .and_then(|g| g.name().map(str::to_owned))
}

/// `group` carrying its catalog name when it has none of its own.
pub fn labelled(group: SymmetryGroup) -> SymmetryGroup {
    match (group.name(), identify(&group)) {
        (None, Some(name)) => group.with_name(name),
        _ => group,
    }
}

pub fn by_name(name: &str) -> Result<SymmetryGroup> {
    match name {
        "trivial1" => Ok(SymmetryGroup::trivial(1)),
        "trivial2" => Ok(SymmetryGroup::trivial(2)),
        "trivial3" => Ok(SymmetryGroup::trivial(3)),
        "even" => Ok(even()),
        "odd" => Ok(odd()),
        "quarter_turn" => Ok(quarter_turn()),
        "quarter_turn_g1" => Ok(quarter_turn_g1()),
        "mirror_odd" => Ok(mirror_odd()),
        other => Err(Error::Config(format!("unknown group name '{other}'"))),
    }
}
