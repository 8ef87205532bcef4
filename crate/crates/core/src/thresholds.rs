//! Scattering thresholds `𝐒_ω^G = min{m_ω^G, l_ω^G}` built recursively from
//! the subgroup lattice, and the dichotomy prediction for group-invariant data.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use crate::error::{Error, Result};
use crate::fields::ComplexField;
use crate::functionals::{evaluate, FunctionalReport};
use crate::ledger::{append_rows, csv_line};
use crate::params::NlsParameters;
use crate::symmetry::{catalog, proper_subgroups, satisfies_star, symmetrization_residual, SymmetryGroup};

/// Largest symmetrization residual accepted as group invariance.
pub const INVARIANCE_TOL: f64 = 1e-8;
/// Relative margin by which the action must sit below a threshold.
pub const ACTION_MARGIN: f64 = 1e-6;
/// Relative slack, in units of `‖∇u‖²`, on sampled signs of `K`.
pub const TRAPPING_TOL: f64 = 1e-6;
/// Profile-ledger residual above which an l-value is only an upper bound.
pub const CONVERGED_RESIDUAL: f64 = 1e-3;

pub const THRESHOLD_LEDGER_HEADER: &str = "group_id,omega,l,m,s,chain,flags";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LValue {
    pub value: f64,
    pub converged: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Flag {
    /// `l_ω^G` did not converge; the stored value is the best found.
    LUnconverged,
    /// The threshold is attained on the subgroup branch.
    MBranch,
    /// Infinite group treated as a leaf with `𝐒 = l`.
    InfiniteLeaf,
}

impl Flag {
    pub fn as_str(self) -> &'static str {
        match self {
            Flag::LUnconverged => "l_unconverged",
            Flag::MBranch => "m_branch",
            Flag::InfiniteLeaf => "infinite_leaf",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        [Flag::LUnconverged, Flag::MBranch, Flag::InfiniteLeaf].into_iter().find(|f| f.as_str() == s)
    }
}

/// One group in a threshold chain `G = G_0 ⊋ G_1 ⊋ … ⊋ G_k`, where the last
/// group's threshold is its own l-value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainLink {
    pub label: String,
    pub key: String,
    pub order: usize,
}

impl fmt::Display for ChainLink {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", self.label, self.order)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Threshold {
    pub group_id: String,
    pub omega: f64,
    pub l: f64,
    /// `m_ω^G`; absent for the trivial group.
    pub m: Option<f64>,
    pub s: f64,
    pub chain: Vec<ChainLink>,
    pub flags: Vec<Flag>,
}

impl Threshold {
    pub fn has(&self, flag: Flag) -> bool {
        self.flags.contains(&flag)
    }

    pub fn ledger_row(&self) -> String {
        let chain: Vec<String> = self.chain.iter().map(ToString::to_string).collect();
        let flags: Vec<&str> = self.flags.iter().map(|f| f.as_str()).collect();
        csv_line(&[
            self.group_id.clone(),
            self.omega.to_string(),
            format!("{:.17e}", self.l),
            self.m.map(|m| format!("{m:.17e}")).unwrap_or_default(),
            format!("{:.17e}", self.s),
            chain.join(">"),
            flags.join("|"),
        ])
    }
}

type Key = (String, u64);

fn key_of(group_key: &str, omega: f64) -> Key {
    (group_key.to_owned(), omega.to_bits())
}

/// Resolves a ledger id to a lookup key: catalog names map to their
/// canonical key, anything else is taken literally.
fn resolve(id: &str) -> String {
    catalog::by_name(id).map(|g| g.canonical_key()).unwrap_or_else(|_| id.to_owned())
}

fn label(group: &SymmetryGroup) -> String {
    group.name().map(str::to_owned).or_else(|| catalog::identify(group)).unwrap_or_else(|| group.canonical_key())
}

/// l-values by `(group, ω)` and memoized thresholds.
#[derive(Debug, Clone, Default)]
pub struct ThresholdTable {
    l_values: BTreeMap<Key, LValue>,
    memo: BTreeMap<Key, Threshold>,
}

impl ThresholdTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Records an l-value; a smaller value for the same key replaces a larger
    /// one since every computed value is an upper bound on the infimum.
    pub fn insert_l(&mut self, group: &SymmetryGroup, omega: f64, value: f64, converged: bool) {
        self.insert_l_by_id(&group.canonical_key(), omega, value, converged);
    }

    /// As [`insert_l`](Self::insert_l) for an id that is a catalog name, a
    /// canonical key or the name of an infinite group.
    pub fn insert_l_by_id(&mut self, id: &str, omega: f64, value: f64, converged: bool) {
        let key = key_of(&resolve(id), omega);
        let new = LValue { value, converged };
        let entry = self.l_values.entry(key).or_insert(new);
        if value < entry.value || (value == entry.value && converged) {
            *entry = new;
        }
        self.memo.clear();
    }

    pub fn l_value(&self, group: &SymmetryGroup, omega: f64) -> Option<LValue> {
        self.l_values.get(&key_of(&group.canonical_key(), omega)).copied()
    }

    pub fn l_value_by_id(&self, id: &str, omega: f64) -> Option<LValue> {
        self.l_values.get(&key_of(&resolve(id), omega)).copied()
    }

    /// Memoized thresholds in key order.
    pub fn thresholds(&self) -> impl Iterator<Item = &Threshold> {
        self.memo.values()
    }

    /// Reads l-values from a profile ledger or a threshold ledger, told apart
    /// by the header.
    pub fn load(&mut self, path: &Path) -> Result<()> {
        let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_path(path)?;
        let headers = reader.headers()?.clone();
        let col = |name: &str| {
            headers
                .iter()
                .position(|h| h == name)
                .ok_or_else(|| Error::Config(format!("{}: missing column '{name}'", path.display())))
        };
        let (id_col, omega_col) = (col("group_id")?, col("omega")?);
        let profile = headers.iter().any(|h| h == "l_value");
        let (value_col, extra_col) = if profile { (col("l_value")?, col("residual")?) } else { (col("l")?, col("flags")?) };
        for (i, record) in reader.records().enumerate() {
            let record = record?;
            let line = i + 2;
            let num = |c: usize| -> Result<f64> {
                record
                    .get(c)
                    .unwrap_or("")
                    .parse()
                    .map_err(|_| Error::Parse { line, message: format!("column {c} is not a number") })
            };
            let (omega, value) = (num(omega_col)?, num(value_col)?);
            let converged = if profile {
                num(extra_col)? < CONVERGED_RESIDUAL
            } else {
                !record.get(extra_col).unwrap_or("").split('|').any(|f| Flag::parse(f) == Some(Flag::LUnconverged))
            };
            self.insert_l_by_id(record.get(id_col).unwrap_or(""), omega, value, converged);
        }
        Ok(())
    }

    /// Appends every memoized threshold to a threshold ledger.
    pub fn append_ledger(&self, path: &Path) -> Result<()> {
        let rows: Vec<String> = self.memo.values().map(Threshold::ledger_row).collect();
        append_rows(path, THRESHOLD_LEDGER_HEADER, &rows)
    }
}

/// `𝐒_ω^G`: `l_ω` for the trivial group, otherwise the smaller of `l_ω^G` and
/// `m_ω^G = min (#G/#G')·𝐒_ω^{G'}` over proper subgroups `G'` satisfying (*).
pub fn scattering_threshold(group: &SymmetryGroup, params: &NlsParameters, table: &mut ThresholdTable) -> Result<f64> {
    Ok(threshold(group, params, table)?.s)
}

/// The full threshold record behind [`scattering_threshold`].
pub fn threshold(group: &SymmetryGroup, params: &NlsParameters, table: &mut ThresholdTable) -> Result<Threshold> {
    let omega = params.omega;
    let gkey = group.canonical_key();
    let key = key_of(&gkey, omega);
    if let Some(t) = table.memo.get(&key) {
        return Ok(t.clone());
    }
    let own = ChainLink { label: label(group), key: gkey.clone(), order: group.order() };
    let l = table.l_values.get(&key).copied();

    let mut best: Option<(f64, Vec<ChainLink>)> = None;
    if !group.is_trivial() {
        for sub in proper_subgroups(group)? {
            if !satisfies_star(group, &sub)? {
                continue;
            }
            let t = threshold(&sub, params, table)?;
            let value = (group.order() / sub.order()) as f64 * t.s;
            // Ties go to the lexicographically smaller chain so the result
            // does not depend on enumeration order.
            let better = match &best {
                None => true,
                Some((v, chain)) => value < *v || (value == *v && t.chain[0].key < chain[1].key),
            };
            if better {
                let mut chain = vec![own.clone()];
                chain.extend(t.chain);
                best = Some((value, chain));
            }
        }
    }

    let mut flags = Vec::new();
    let l = match (l, &best) {
        (Some(l), _) => l,
        (None, None) if group.is_trivial() => return Err(Error::MissingThreshold(own.label)),
        (None, None) => return Err(Error::NoStarSubgroup(own.label)),
        (None, Some(_)) => return Err(Error::MissingThreshold(own.label)),
    };
    if !l.converged {
        flags.push(Flag::LUnconverged);
    }
    let m = best.as_ref().map(|b| b.0);
    let (s, chain) = match best {
        Some((m, chain)) if m < l.value => {
            flags.push(Flag::MBranch);
            (m, chain)
        }
        _ => (l.value, vec![own.clone()]),
    };
    let t = Threshold { group_id: own.label, omega, l: l.value, m, s, chain, flags };
    table.memo.insert(key, t.clone());
    Ok(t)
}

/// Threshold of an infinite group, which has no subgroup branch.
pub fn leaf_threshold(id: &str, omega: f64, table: &ThresholdTable) -> Result<Threshold> {
    let l = table.l_value_by_id(id, omega).ok_or_else(|| Error::MissingThreshold(id.to_owned()))?;
    let mut flags = vec![Flag::InfiniteLeaf];
    if !l.converged {
        flags.push(Flag::LUnconverged);
    }
    let chain = vec![ChainLink { label: id.to_owned(), key: resolve(id), order: 0 }];
    Ok(Threshold { group_id: id.to_owned(), omega, l: l.value, m: None, s: l.value, chain, flags })
}

/// Recomputes `𝐒` from the stored chain and the l-value of its last group,
/// with the same floating-point operations as the recursion.
pub fn recompute_from_chain(t: &Threshold, table: &ThresholdTable) -> Result<f64> {
    let last = t.chain.last().ok_or_else(|| Error::MissingThreshold(t.group_id.clone()))?;
    let mut s = table
        .l_values
        .get(&key_of(&last.key, t.omega))
        .ok_or_else(|| Error::MissingThreshold(last.label.clone()))?
        .value;
    for pair in t.chain.windows(2).rev() {
        s = (pair[0].order / pair[1].order) as f64 * s;
    }
    Ok(s)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Prediction {
    Scatter,
    BlowupOrGrowup,
    OutOfTheory,
}

impl Prediction {
    pub fn as_str(self) -> &'static str {
        match self {
            Prediction::Scatter => "SCATTER",
            Prediction::BlowupOrGrowup => "BLOWUP_OR_GROWUP",
            Prediction::OutOfTheory => "OUT_OF_THEORY",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        [Prediction::Scatter, Prediction::BlowupOrGrowup, Prediction::OutOfTheory].into_iter().find(|p| p.as_str() == s)
    }
}

impl fmt::Display for Prediction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PredictionRecord {
    pub prediction: Prediction,
    pub group_id: String,
    pub report: FunctionalReport,
    /// `𝐒_ω^G`, compared against on the `K ≥ 0` side.
    pub scattering_threshold: f64,
    /// The l-value compared against on the `K < 0` side: `l_ω^G`, or `l_ω`
    /// when `l_ω^G` is unconverged.
    pub blowup_threshold: f64,
    pub symmetry_residual: f64,
    pub flags: Vec<Flag>,
}

/// Classifies `f` by the signs of `K` and the position of `S_ω` relative to
/// the thresholds of `group`.
pub fn predict(
    f: &ComplexField,
    group: &SymmetryGroup,
    params: &NlsParameters,
    table: &mut ThresholdTable,
) -> Result<PredictionRecord> {
    let residual = symmetrization_residual(f, group)?;
    if residual > INVARIANCE_TOL {
        return Err(Error::NotGroupInvariant(residual));
    }
    let t = threshold(group, params, table)?;
    let blowup_threshold = if t.has(Flag::LUnconverged) {
        let trivial = SymmetryGroup::trivial(group.dim());
        table.l_value(&trivial, params.omega).ok_or_else(|| Error::MissingThreshold(trivial.id()))?.value
    } else {
        t.l
    };
    let report = evaluate(f, params);
    let below = |thr: f64| report.action < thr * (1.0 - ACTION_MARGIN);
    let prediction = if report.virial >= 0.0 && below(t.s) {
        Prediction::Scatter
    } else if report.virial < 0.0 && below(blowup_threshold) {
        Prediction::BlowupOrGrowup
    } else {
        Prediction::OutOfTheory
    };
    Ok(PredictionRecord {
        prediction,
        group_id: t.group_id.clone(),
        report,
        scattering_threshold: t.s,
        blowup_threshold,
        symmetry_residual: residual,
        flags: t.flags,
    })
}

/// Whether the sign of `K` stays fixed along `trajectory`, and on the `K < 0`
/// branch whether `K ≤ -4(threshold - S_ω)/d` at every sample. Trajectories
/// that start at or above `threshold` are not covered and return `false`.
pub fn trapping_check(trajectory: &[FunctionalReport], threshold: f64, params: &NlsParameters) -> bool {
    let Some(first) = trajectory.first() else {
        return true;
    };
    let s0 = first.action;
    if s0 >= threshold {
        return false;
    }
    let slack = |r: &FunctionalReport| TRAPPING_TOL * r.grad_sq;
    if first.virial >= -slack(first) {
        trajectory.iter().all(|r| r.virial >= -slack(r))
    } else {
        let gap = 4.0 * (threshold - s0) / params.d();
        trajectory.iter().all(|r| r.virial <= -gap + slack(r))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symmetry::SymmetryGroup;

    fn p1() -> NlsParameters {
        NlsParameters::new(1, 7.0, 1.0).unwrap()
    }

    fn p2() -> NlsParameters {
        NlsParameters::new(2, 5.0, 1.0).unwrap()
    }

    #[test]
    fn trivial_group_is_ground_state_level() {
        let mut t = ThresholdTable::new();
        t.insert_l(&SymmetryGroup::trivial(1), 1.0, 1.3, true);
        let th = threshold(&SymmetryGroup::trivial(1), &p1(), &mut t).unwrap();
        assert_eq!(th.s, 1.3);
        assert_eq!(th.m, None);
        assert_eq!(th.chain.len(), 1);
    }

    #[test]
    fn odd_group_doubles() {
        let mut t = ThresholdTable::new();
        t.insert_l(&SymmetryGroup::trivial(1), 1.0, 1.3, true);
        t.insert_l(&catalog::odd(), 1.0, 2.7, true);
        let th = threshold(&catalog::odd(), &p1(), &mut t).unwrap();
        assert_eq!(th.s, 2.6);
        assert_eq!(th.m, Some(2.6));
        assert!(th.has(Flag::MBranch));
        assert_eq!(th.chain.iter().map(|c| c.label.as_str()).collect::<Vec<_>>(), ["odd", "trivial1"]);
        assert_eq!(recompute_from_chain(&th, &t).unwrap(), th.s);
    }

    #[test]
    fn quarter_turn_excludes_g1() {
        let mut t = ThresholdTable::new();
        t.insert_l(&SymmetryGroup::trivial(2), 1.0, 1.0, true);
        // A tiny l-value on G_1 would win if G_1 were admitted.
        t.insert_l(&catalog::quarter_turn_g1(), 1.0, 0.1, true);
        t.insert_l(&catalog::quarter_turn(), 1.0, 3.9, true);
        let th = threshold(&catalog::quarter_turn(), &p2(), &mut t).unwrap();
        assert_eq!(th.s, 3.9);
        assert_eq!(th.m, Some(4.0));
        assert!(th.chain.len() == 1 && !th.has(Flag::MBranch));
        t.insert_l(&catalog::quarter_turn(), 1.0, 3.9, true);
        t.insert_l_by_id("quarter_turn", 1.0, 4.5, true);
        assert_eq!(scattering_threshold(&catalog::quarter_turn(), &p2(), &mut t).unwrap(), 3.9);
    }

    #[test]
    fn missing_values_are_errors() {
        let mut t = ThresholdTable::new();
        assert!(matches!(threshold(&SymmetryGroup::trivial(1), &p1(), &mut t), Err(Error::MissingThreshold(_))));
        t.insert_l(&SymmetryGroup::trivial(1), 1.0, 1.3, true);
        assert!(matches!(threshold(&catalog::odd(), &p1(), &mut t), Err(Error::MissingThreshold(_))));
        t.insert_l(&catalog::even(), 1.0, 1.3, false);
        let th = threshold(&catalog::even(), &p1(), &mut t).unwrap();
        assert_eq!((th.s, th.m), (1.3, Some(2.6)));
        assert!(th.has(Flag::LUnconverged) && !th.has(Flag::MBranch));
    }

    #[test]
    fn ledger_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("thresholds.csv");
        let mut t = ThresholdTable::new();
        t.insert_l(&SymmetryGroup::trivial(1), 1.0, 1.3, true);
        t.insert_l(&catalog::odd(), 1.0, 2.7, false);
        threshold(&catalog::odd(), &p1(), &mut t).unwrap();
        t.append_ledger(&path).unwrap();
        let mut back = ThresholdTable::new();
        back.load(&path).unwrap();
        assert_eq!(back.l_value(&catalog::odd(), 1.0), Some(LValue { value: 2.7, converged: false }));
        assert_eq!(back.l_value_by_id("trivial1", 1.0).unwrap().value, 1.3);
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with(THRESHOLD_LEDGER_HEADER));
        assert!(text.contains("odd(2)>trivial1(1)"));
    }

    #[test]
    fn leaf_threshold_is_l() {
        let mut t = ThresholdTable::new();
        t.insert_l_by_id("rotation_phase", 1.0, 12.5, true);
        let th = leaf_threshold("rotation_phase", 1.0, &t).unwrap();
        assert_eq!(th.s, 12.5);
        assert!(th.has(Flag::InfiniteLeaf));
    }

    fn report(action: f64, virial: f64) -> FunctionalReport {
        FunctionalReport { action, virial, grad_sq: 1.0, ..FunctionalReport::default() }
    }

    #[test]
    fn trapping_branches() {
        let p = p1();
        assert!(trapping_check(&[report(1.0, 0.0), report(1.0, 1e-9)], 1.3, &p));
        assert!(!trapping_check(&[report(1.0, 0.5), report(1.0, -0.5)], 1.3, &p));
        // gap = 4·0.3/1
        assert!(trapping_check(&[report(1.0, -1.3), report(1.0, -5.0)], 1.3, &p));
        assert!(!trapping_check(&[report(1.0, -1.3), report(1.0, -1.0)], 1.3, &p));
        assert!(!trapping_check(&[report(1.4, 0.5)], 1.3, &p));
    }
}
