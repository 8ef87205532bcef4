//! Predict-then-verify experiments: build initial data, predict its fate from
//! the thresholds, evolve, compare and persist everything needed to check the
//! verdict later.

mod config;
mod recipe;
mod sweep;

pub use config::{
    default_grid, load_config, parse_config, parse_values, render_config, set, Config, ExperimentSpec, KNOWN_KEYS,
};
pub use recipe::{build_initial_data, BumpShape, Recipe};
pub use sweep::{sweep, SweepRow, PHASE_FILE};

use std::collections::BTreeSet;
use std::fmt;
use std::fs::{self, File, OpenOptions};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::evolution::{evolve_backward, evolve_observed, write_trajectory_csv, Outcome, TrajectoryRecord};
use crate::fields::{snapshot, ComplexField, Grid};
use crate::ground_state::{append_profile_ledger, ground_state, minimal_action, profile_ledger_row, MinimizeOptions};
use crate::ledger::{append_rows, csv_line};
use crate::params::NlsParameters;
use crate::symmetry::{proper_subgroups, satisfies_star, SymmetryGroup};
use crate::thresholds::{predict, Prediction, PredictionRecord, ThresholdTable, CONVERGED_RESIDUAL};

pub const MANIFEST_FILE: &str = "manifest.txt";
pub const RESULTS_FILE: &str = "results.csv";
pub const PROFILES_FILE: &str = "profiles.csv";
pub const THRESHOLDS_FILE: &str = "thresholds.csv";
pub const RESULTS_HEADER: &str =
    "group_id,S_omega,K,scattering_threshold,blowup_threshold,prediction,outcome_forward,outcome_backward,agreement";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Agreement {
    Confirmed,
    Contradicted,
    Inconclusive,
}

impl Agreement {
    pub fn as_str(self) -> &'static str {
        match self {
            Agreement::Confirmed => "CONFIRMED",
            Agreement::Contradicted => "CONTRADICTED",
            Agreement::Inconclusive => "INCONCLUSIVE",
        }
    }

    /// Compares one prediction with one observed outcome.
    pub fn of(prediction: Prediction, outcome: Outcome) -> Self {
        match (prediction, outcome) {
            (Prediction::Scatter, Outcome::ScatterLike) | (Prediction::BlowupOrGrowup, Outcome::BlowupLike) => {
                Agreement::Confirmed
            }
            (Prediction::Scatter, Outcome::BlowupLike) | (Prediction::BlowupOrGrowup, Outcome::ScatterLike) => {
                Agreement::Contradicted
            }
            _ => Agreement::Inconclusive,
        }
    }

    /// Contradicted if any direction contradicts, confirmed if all confirm.
    pub fn combine(verdicts: &[Agreement]) -> Self {
        if verdicts.contains(&Agreement::Contradicted) {
            Agreement::Contradicted
        } else if !verdicts.is_empty() && verdicts.iter().all(|v| *v == Agreement::Confirmed) {
            Agreement::Confirmed
        } else {
            Agreement::Inconclusive
        }
    }
}

impl fmt::Display for Agreement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentResult {
    pub prediction: PredictionRecord,
    pub forward: TrajectoryRecord,
    pub backward: Option<TrajectoryRecord>,
    pub agreement: Agreement,
    pub artifacts: Vec<PathBuf>,
}

/// Grid on which missing l-values are minimized.
pub fn threshold_grid(params: &NlsParameters) -> Result<Grid> {
    let (n, l) = match params.dim {
        1 => (1024, 80.0),
        2 => (256, 40.0),
        _ => (64, 12.8),
    };
    Grid::new(params.dim, n, l * params.width())
}

/// `group` followed by every subgroup the threshold recursion visits.
pub fn required_groups(group: &SymmetryGroup) -> Result<Vec<SymmetryGroup>> {
    fn visit(g: &SymmetryGroup, seen: &mut BTreeSet<String>, out: &mut Vec<SymmetryGroup>) -> Result<()> {
        if !seen.insert(g.canonical_key()) {
            return Ok(());
        }
        out.push(g.clone());
        if g.is_trivial() {
            return Ok(());
        }
        for sub in proper_subgroups(g)? {
            if satisfies_star(g, &sub)? {
                visit(&sub, seen, out)?;
            }
        }
        Ok(())
    }
    let mut out = Vec::new();
    visit(group, &mut BTreeSet::new(), &mut out)?;
    Ok(out)
}

/// Computes every l-value the threshold of `group` needs and `table` lacks:
/// the ground-state action for the trivial group, constrained minimization
/// otherwise. Minimizations are appended to the profile ledger at
/// `profile_ledger` when given. Returns the number of values computed.
pub fn ensure_thresholds(
    group: &SymmetryGroup,
    params: &NlsParameters,
    table: &mut ThresholdTable,
    profile_ledger: Option<&Path>,
) -> Result<usize> {
    let mut computed = 0;
    for g in required_groups(group)? {
        if table.l_value(&g, params.omega).is_some() {
            continue;
        }
        if g.is_trivial() {
            table.insert_l(&g, params.omega, ground_state(params)?.action(), true);
        } else {
            let grid = threshold_grid(params)?;
            let l = grid.length();
            let r = minimal_action(&g, params, grid, &[0.0, l / 8.0, l / 4.0], &MinimizeOptions::default())?;
            table.insert_l(&g, params.omega, r.value, r.residual < CONVERGED_RESIDUAL);
            if let Some(path) = profile_ledger {
                append_profile_ledger(path, &[profile_ledger_row(&g, params, &r)])?;
            }
        }
        computed += 1;
    }
    Ok(computed)
}

struct Manifest(Vec<(String, String)>);

impl Manifest {
    fn push(&mut self, key: &str, value: impl ToString) {
        self.0.push((key.to_owned(), value.to_string()));
    }

    fn append(&self, path: &Path) -> Result<()> {
        let mut w = BufWriter::new(OpenOptions::new().create(true).append(true).open(path)?);
        writeln!(w, "[run]")?;
        for (k, v) in &self.0 {
            writeln!(w, "{k} = {v}")?;
        }
        writeln!(w)?;
        w.flush()?;
        Ok(())
    }
}

/// Runs one experiment in `spec.out_dir`, appending a section to its
/// manifest whether or not the run succeeds.
pub fn run_experiment(spec: &ExperimentSpec, table: &mut ThresholdTable) -> Result<ExperimentResult> {
    fs::create_dir_all(&spec.out_dir)?;
    let mut manifest = Manifest(Vec::new());
    manifest.push("code_version", env!("CARGO_PKG_VERSION"));
    for (k, v) in &spec.config {
        manifest.push(&format!("config.{k}"), v);
    }
    let result = execute(spec, table, &mut manifest);
    match &result {
        Ok(r) => manifest.push("status", r.agreement),
        Err(e) => {
            manifest.push("status", "FAILED");
            manifest.push("error", e);
        }
    }
    manifest.append(&spec.out_dir.join(MANIFEST_FILE))?;
    result
}

fn execute(spec: &ExperimentSpec, table: &mut ThresholdTable, manifest: &mut Manifest) -> Result<ExperimentResult> {
    let out = &spec.out_dir;
    let (params, grid) = (&spec.params, spec.grid);
    manifest.push("dim", params.dim);
    manifest.push("p", params.p);
    manifest.push("omega", params.omega);
    manifest.push("grid_n", grid.n());
    manifest.push("box_l", grid.length());
    manifest.push("group_source", &spec.group_source);
    manifest.push("group_id", spec.group.id());
    manifest.push("group_key", spec.group.canonical_key());
    manifest.push("recipe", format!("{:?}", spec.recipe));
    manifest.push("evolve", format!("{:?}", spec.evolve));
    let mut artifacts = Vec::new();

    let u0 = build_initial_data(&spec.recipe, params, grid, &spec.group)?;
    let initial = out.join("initial.nlsf");
    snapshot::save(&u0, &initial)?;
    artifacts.push(initial);

    if let Some(ledger) = &spec.ledger {
        table.load(ledger)?;
        manifest.push("ledger", ledger.display());
    }
    if spec.compute_thresholds {
        let profiles = out.join(PROFILES_FILE);
        let n = ensure_thresholds(&spec.group, params, table, Some(&profiles))?;
        if n > 0 && profiles.exists() {
            artifacts.push(profiles);
        }
    }
    let prediction = predict(&u0, &spec.group, params, table)?;
    let thresholds = out.join(THRESHOLDS_FILE);
    table.append_ledger(&thresholds)?;
    artifacts.push(thresholds);
    for t in table.thresholds() {
        let chain: Vec<String> = t.chain.iter().map(ToString::to_string).collect();
        manifest.push(&format!("threshold.{}", t.group_id), format!("l={:.17e} s={:.17e} chain={}", t.l, t.s, chain.join(">")));
    }
    let rep = &prediction.report;
    manifest.push("M", format!("{:.17e}", rep.mass));
    manifest.push("E", format!("{:.17e}", rep.energy));
    manifest.push("S_omega", format!("{:.17e}", rep.action));
    manifest.push("K", format!("{:.17e}", rep.virial));
    manifest.push("scattering_threshold", format!("{:.17e}", prediction.scattering_threshold));
    manifest.push("blowup_threshold", format!("{:.17e}", prediction.blowup_threshold));
    manifest.push("symmetry_residual", format!("{:.3e}", prediction.symmetry_residual));
    let flags: Vec<&str> = prediction.flags.iter().map(|f| f.as_str()).collect();
    manifest.push("flags", flags.join("|"));
    manifest.push("prediction", prediction.prediction);

    let forward = run_direction(spec, &u0, "forward", &mut artifacts, manifest)?;
    let backward =
        if spec.both_directions { Some(run_direction(spec, &u0, "backward", &mut artifacts, manifest)?) } else { None };

    let mut verdicts = vec![Agreement::of(prediction.prediction, forward.outcome)];
    if let Some(b) = &backward {
        verdicts.push(Agreement::of(prediction.prediction, b.outcome));
    }
    let agreement = Agreement::combine(&verdicts);

    let results = out.join(RESULTS_FILE);
    let row = csv_line(&[
        prediction.group_id.clone(),
        format!("{:.17e}", rep.action),
        format!("{:.17e}", rep.virial),
        format!("{:.17e}", prediction.scattering_threshold),
        format!("{:.17e}", prediction.blowup_threshold),
        prediction.prediction.to_string(),
        forward.outcome.to_string(),
        backward.as_ref().map(|b| b.outcome.to_string()).unwrap_or_default(),
        agreement.to_string(),
    ]);
    append_rows(&results, RESULTS_HEADER, &[row])?;
    artifacts.push(results);

    Ok(ExperimentResult { prediction, forward, backward, agreement, artifacts })
}

fn run_direction(
    spec: &ExperimentSpec,
    u0: &ComplexField,
    direction: &str,
    artifacts: &mut Vec<PathBuf>,
    manifest: &mut Manifest,
) -> Result<TrajectoryRecord> {
    let backward = direction == "backward";
    let targets: Vec<f64> = if backward { Vec::new() } else { spec.snapshot_times.clone() };
    let mut taken: Vec<(f64, ComplexField)> = Vec::new();
    let mut last: Option<ComplexField> = None;
    let observer = |t: f64, u: &ComplexField| {
        if taken.len() < targets.len() && t.abs() >= targets[taken.len()] {
            taken.push((t, u.clone()));
        }
        last = Some(u.clone());
    };
    let group = Some(&spec.group);
    let record = if backward {
        evolve_backward(u0, &spec.params, &spec.evolve, group, observer)?
    } else {
        evolve_observed(u0, &spec.params, &spec.evolve, group, observer)?
    };

    let csv_path = spec.out_dir.join(format!("trajectory_{direction}.csv"));
    let mut w = BufWriter::new(File::create(&csv_path)?);
    write_trajectory_csv(&record, &mut w)?;
    w.flush()?;
    artifacts.push(csv_path);
    for (k, (t, u)) in taken.iter().enumerate() {
        let path = spec.out_dir.join(format!("snapshot_{direction}_{k}.nlsf"));
        snapshot::save(u, &path)?;
        manifest.push(&format!("snapshot.{direction}.{k}"), format!("{t:.17e}"));
        artifacts.push(path);
    }
    let u_final = last.ok_or_else(|| Error::TooFewSamples { needed: 1, have: 0 })?;
    let path = spec.out_dir.join(format!("final_{direction}.nlsf"));
    snapshot::save(&u_final, &path)?;
    artifacts.push(path);
    manifest.push(&format!("{direction}.outcome"), record.outcome);
    manifest.push(&format!("{direction}.reason"), record.reason);
    manifest.push(&format!("{direction}.final_time"), format!("{:.17e}", record.final_time()));
    manifest.push(&format!("{direction}.steps"), record.steps);
    Ok(record)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symmetry::catalog;

    #[test]
    fn agreement_rules() {
        use Agreement::*;
        assert_eq!(Agreement::of(Prediction::Scatter, Outcome::ScatterLike), Confirmed);
        assert_eq!(Agreement::of(Prediction::Scatter, Outcome::BlowupLike), Contradicted);
        assert_eq!(Agreement::of(Prediction::OutOfTheory, Outcome::BlowupLike), Inconclusive);
        assert_eq!(Agreement::of(Prediction::BlowupOrGrowup, Outcome::Undecided), Inconclusive);
        assert_eq!(Agreement::combine(&[Confirmed, Confirmed]), Confirmed);
        assert_eq!(Agreement::combine(&[Confirmed, Inconclusive]), Inconclusive);
        assert_eq!(Agreement::combine(&[Inconclusive, Contradicted]), Contradicted);
    }

    #[test]
    fn recursion_visits_star_subgroups() {
        let keys: Vec<String> = required_groups(&catalog::quarter_turn()).unwrap().iter().map(|g| g.canonical_key()).collect();
        assert_eq!(keys.len(), 2);
        assert!(keys.contains(&SymmetryGroup::trivial(2).canonical_key()));
        assert!(!keys.contains(&catalog::quarter_turn_g1().canonical_key()));
        assert_eq!(required_groups(&SymmetryGroup::trivial(1)).unwrap().len(), 1);
    }

    #[test]
    fn failed_run_is_recorded() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = parse_config(&format!("recipe = odd_dipole\nseparation = 8\nout = {}", dir.path().display())).unwrap();
        let spec = ExperimentSpec::from_config(&cfg).unwrap();
        // Odd data under the even group.
        let spec = ExperimentSpec { group: catalog::even(), ..spec };
        assert!(matches!(run_experiment(&spec, &mut ThresholdTable::new()), Err(Error::RecipeInvalid(_))));
        let text = fs::read_to_string(dir.path().join(MANIFEST_FILE)).unwrap();
        assert!(text.contains("status = FAILED"));
        assert!(text.contains("config.recipe = odd_dipole"));
    }

    #[test]
    fn scattering_run_persists_artifacts() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = parse_config(&format!(
            "a = 0.8\ngrid_n = 1024\nbox_l = 240\nt_max = 6\nblowup_gradient_factor = 10\nsnapshot_times = 0.5\nboth_directions = true\nout = {}",
            dir.path().display()
        ))
        .unwrap();
        let spec = ExperimentSpec::from_config(&cfg).unwrap();
        let r = run_experiment(&spec, &mut ThresholdTable::new()).unwrap();
        assert_eq!(r.prediction.prediction, Prediction::Scatter);
        assert_eq!(r.forward.outcome, Outcome::ScatterLike);
        assert_eq!(r.agreement, Agreement::Confirmed);
        for a in &r.artifacts {
            assert!(a.starts_with(dir.path()) && a.exists(), "{}", a.display());
        }
        let first = fs::read(dir.path().join("trajectory_forward.csv")).unwrap();
        // Same spec, same bytes.
        let again = tempfile::tempdir().unwrap();
        let spec2 = ExperimentSpec { out_dir: again.path().to_path_buf(), ..spec };
        run_experiment(&spec2, &mut ThresholdTable::new()).unwrap();
        assert_eq!(first, fs::read(again.path().join("trajectory_forward.csv")).unwrap());
        // Backward data is the conjugate, so both directions agree.
        assert_eq!(r.backward.unwrap().outcome, Outcome::ScatterLike);
    }
}
