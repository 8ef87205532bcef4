use std::fmt;

use super::element::{compose, GroupElement};
use crate::error::{Error, Result};

/// Largest group order accepted by the exhaustive subgroup enumeration.
pub const MAX_ENUMERATION_ORDER: usize = 16;

/// A finite subgroup of `ℝ/2πℤ × O(d)` satisfying assumption (A).
///
/// Element 0 is always the identity.
#[derive(Debug, Clone)]
pub struct SymmetryGroup {
    dim: usize,
    elements: Vec<GroupElement>,
    name: Option<String>,
}

impl SymmetryGroup {
    pub fn trivial(dim: usize) -> Self {
        Self { dim, elements: vec![GroupElement::identity(dim)], name: Some(format!("trivial{dim}")) }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn elements(&self) -> &[GroupElement] {
        &self.elements
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.order() == 1
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn contains(&self, g: &GroupElement) -> bool {
        self.position(g).is_some()
    }

    pub fn position(&self, g: &GroupElement) -> Option<usize> {
        self.elements.iter().position(|e| e.approx_eq(g))
    }

    /// Order-independent identifier built from the sorted element list.
    pub fn canonical_key(&self) -> String {
        let mut lines: Vec<(_, String)> = self.elements.iter().map(|e| (e.sort_key(), e.to_string())).collect();
        lines.sort_by(|a, b| a.0.cmp(&b.0));
        let body: Vec<String> = lines.into_iter().map(|(_, s)| s.replace(' ', ",")).collect();
        format!("d{}[{}]", self.dim, body.join(";"))
    }

    /// Human-readable id: the name when present, otherwise the canonical key.
    pub fn id(&self) -> String {
        self.name.clone().unwrap_or_else(|| self.canonical_key())
    }

    /// `table[i][j]` is the index of `elements[i] ∘ elements[j]`.
    pub fn product_table(&self) -> Vec<Vec<usize>> {
        self.elements
            .iter()
            .map(|a| {
                self.elements
                    .iter()
                    .map(|b| {
                        let c = compose(a, b).expect("same dimension");
                        self.position(&c).expect("validated group is closed")
                    })
                    .collect()
            })
            .collect()
    }

    pub fn is_subgroup_of(&self, parent: &Self) -> bool {
        self.dim == parent.dim && self.elements.iter().all(|g| parent.contains(g))
    }

    /// Smallest `k ≥ 1` with `g^k = e`.
    pub fn element_order(&self, index: usize) -> usize {
        let g = &self.elements[index];
        let mut acc = g.clone();
        let mut k = 1;
        while !acc.is_identity() {
            acc = compose(&acc, g).expect("same dimension");
            k += 1;
            if k > self.order() {
                break;
            }
        }
        k
    }
}

impl fmt::Display for SymmetryGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(name) = &self.name {
            writeln!(f, "# {name}")?;
        }
        for e in &self.elements {
            writeln!(f, "{e}")?;
        }
        Ok(())
    }
}

/// Validates a candidate element set as a group obeying assumption (A).
///
/// Duplicate elements are merged. The identity is moved to position 0.
pub fn verify_group(elements: &[GroupElement], dim: usize) -> Result<SymmetryGroup> {
    if elements.is_empty() {
        return Err(Error::EmptyGroup);
    }
    let mut uniq: Vec<GroupElement> = Vec::with_capacity(elements.len());
    for e in elements {
        if e.dim() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: e.dim() });
        }
        if !uniq.iter().any(|u| u.approx_eq(e)) {
            uniq.push(e.clone());
        }
    }
    for (i, a) in uniq.iter().enumerate() {
        if uniq[..i].iter().any(|b| b.same_matrix(a)) {
            return Err(Error::AssumptionAViolated(i));
        }
    }
    let id = uniq.iter().position(|e| e.is_identity()).ok_or(Error::MissingIdentity)?;
    uniq.swap(0, id);
    for (i, a) in uniq.iter().enumerate() {
        for (j, b) in uniq.iter().enumerate() {
            let c = compose(a, b)?;
            if !uniq.iter().any(|u| u.approx_eq(&c)) {
                return Err(Error::NotClosed(i, j));
            }
        }
        let inv = a.inverse();
        if !uniq.iter().any(|u| u.approx_eq(&inv)) {
            return Err(Error::MissingInverse(i));
        }
    }
    Ok(SymmetryGroup { dim, elements: uniq, name: None })
}

/// All strict subgroups of `group`, ordered by size and then by element
/// index, found by exhaustive search over subsets containing the identity.
pub fn proper_subgroups(group: &SymmetryGroup) -> Result<Vec<SymmetryGroup>> {
    let n = group.order();
    if n > MAX_ENUMERATION_ORDER {
        return Err(Error::GroupTooLarge(n));
    }
    let table = group.product_table();
    let inverse: Vec<usize> = group
        .elements
        .iter()
        .map(|g| group.position(&g.inverse()).expect("closed under inverse"))
        .collect();
    let full: u32 = (1u32 << n) - 1;
    let mut found: Vec<u32> = Vec::new();
    // Bit 0 (identity) is always set.
    for rest in 0..(1u32 << (n - 1)) {
        let mask = (rest << 1) | 1;
        if mask == full {
            continue;
        }
        let members: Vec<usize> = (0..n).filter(|&i| mask & (1 << i) != 0).collect();
        let closed = members.iter().all(|&i| {
            mask & (1 << inverse[i]) != 0 && members.iter().all(|&j| mask & (1 << table[i][j]) != 0)
        });
        if closed {
            found.push(mask);
        }
    }
    found.sort_by_key(|m| (m.count_ones(), m.reverse_bits()));
    Ok(found
        .into_iter()
        .map(|mask| SymmetryGroup {
            dim: group.dim,
            elements: (0..n).filter(|&i| mask & (1 << i) != 0).map(|i| group.elements[i].clone()).collect(),
            name: None,
        })
        .collect())
}

/// A subgroup together with left coset representatives `{𝒢_k}` of the parent.
#[derive(Debug, Clone)]
pub struct SubgroupRelation {
    pub parent: SymmetryGroup,
    pub child: SymmetryGroup,
    pub cosets: Vec<GroupElement>,
}

impl SubgroupRelation {
    pub fn new(parent: &SymmetryGroup, child: &SymmetryGroup) -> Result<Self> {
        if !child.is_subgroup_of(parent) || parent.order() % child.order() != 0 {
            return Err(Error::NotASubgroup);
        }
        let mut covered = vec![false; parent.order()];
        let mut cosets = Vec::new();
        for (i, g) in parent.elements.iter().enumerate() {
            if covered[i] {
                continue;
            }
            for h in &child.elements {
                let gh = compose(g, h)?;
                let k = parent.position(&gh).ok_or(Error::NotASubgroup)?;
                covered[k] = true;
            }
            cosets.push(g.clone());
        }
        Ok(Self { parent: parent.clone(), child: child.clone(), cosets })
    }

    /// `#G / #G'`.
    pub fn index(&self) -> usize {
        self.parent.order() / self.child.order()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symmetry::catalog;
    use std::f64::consts::PI;

    #[test]
    fn odd_group_is_valid() {
        let g = catalog::odd();
        assert_eq!(g.order(), 2);
        assert!(g.elements()[0].is_identity());
    }

    #[test]
    fn assumption_a_violation() {
        let els = vec![
            GroupElement::from_rows(0.0, 1, &[1.0]).unwrap(),
            GroupElement::from_rows(PI, 1, &[-1.0]).unwrap(),
            GroupElement::from_rows(PI / 2.0, 1, &[-1.0]).unwrap(),
        ];
        assert!(matches!(verify_group(&els, 1), Err(Error::AssumptionAViolated(2))));
    }

    #[test]
    fn missing_identity_and_not_closed() {
        let els = vec![GroupElement::from_rows(PI, 1, &[-1.0]).unwrap()];
        assert!(matches!(verify_group(&els, 1), Err(Error::MissingIdentity)));
        let els = vec![
            GroupElement::identity(2),
            GroupElement::from_rows(0.0, 2, &[0.0, -1.0, 1.0, 0.0]).unwrap(),
        ];
        assert!(matches!(verify_group(&els, 2), Err(Error::NotClosed(..))));
        assert!(matches!(verify_group(&[], 1), Err(Error::EmptyGroup)));
    }

    #[test]
    fn subgroups_of_small_groups() {
        assert_eq!(proper_subgroups(&catalog::odd()).unwrap().len(), 1);
        assert!(proper_subgroups(&SymmetryGroup::trivial(2)).unwrap().is_empty());
        let subs = proper_subgroups(&catalog::quarter_turn()).unwrap();
        assert_eq!(subs.len(), 2);
        assert!(subs[0].is_trivial());
        assert_eq!(subs[1].canonical_key(), catalog::quarter_turn_g1().canonical_key());
    }

    #[test]
    fn cosets_partition_parent() {
        let g = catalog::quarter_turn();
        let rel = SubgroupRelation::new(&g, &catalog::quarter_turn_g1()).unwrap();
        assert_eq!(rel.index(), 2);
        assert_eq!(rel.cosets.len(), 2);
        let odd = catalog::odd();
        assert!(matches!(SubgroupRelation::new(&catalog::even(), &odd), Err(Error::NotASubgroup)));
    }

    #[test]
    fn element_orders_divide_group_order() {
        for g in catalog::all_finite() {
            for i in 0..g.order() {
                assert_eq!(g.order() % g.element_order(i), 0);
            }
        }
    }

    #[test]
    fn canonical_key_ignores_order() {
        let g = catalog::quarter_turn();
        let mut els = g.elements().to_vec();
        els.reverse();
        let h = verify_group(&els, 2).unwrap();
        assert_eq!(g.canonical_key(), h.canonical_key());
    }
}
