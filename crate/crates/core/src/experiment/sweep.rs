//! Parameter sweeps over experiment templates.

use std::path::Path;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use super::config::{Config, ExperimentSpec};
use super::{ensure_thresholds, run_experiment, Agreement};
use crate::error::{Error, Result};
use crate::evolution::Outcome;
use crate::ledger::{append_rows, csv_line};
use crate::thresholds::{Prediction, ThresholdTable};

pub const PHASE_FILE: &str = "phase.csv";

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    /// Values of the varied keys, in the order given.
    pub values: Vec<String>,
    pub action: Option<f64>,
    pub virial: Option<f64>,
    pub prediction: Option<Prediction>,
    pub outcome: Option<Outcome>,
    pub agreement: Option<Agreement>,
    pub error: Option<String>,
}

impl SweepRow {
    fn failed(values: Vec<String>, e: &Error) -> Self {
        Self {
            values,
            action: None,
            virial: None,
            prediction: None,
            outcome: None,
            agreement: None,
            error: Some(e.to_string()),
        }
    }

    fn csv(&self) -> String {
        let mut fields = self.values.clone();
        let num = |v: Option<f64>| v.map(|x| format!("{x:.17e}")).unwrap_or_default();
        fields.push(num(self.action));
        fields.push(num(self.virial));
        match &self.error {
            Some(_) => fields.push("FAILED".into()),
            None => fields.push(self.prediction.map(|p| p.to_string()).unwrap_or_default()),
        }
        fields.push(self.outcome.map(|o| o.to_string()).unwrap_or_default());
        fields.push(self.agreement.map(|a| a.to_string()).unwrap_or_default());
        csv_line(&fields)
    }
}

/// Cartesian product of the value lists, first key slowest.
fn combinations(vary: &[(String, Vec<String>)]) -> Vec<Vec<String>> {
    vary.iter().fold(vec![Vec::new()], |acc, (_, values)| {
        acc.iter()
            .flat_map(|prefix| {
                values.iter().map(move |v| {
                    let mut next = prefix.clone();
                    next.push(v.clone());
                    next
                })
            })
            .collect()
    })
}

/// Runs `template` once per combination of `vary`, each in its own
/// subdirectory `run_NNNN` of `out_dir`, and writes the phase table to
/// [`PHASE_FILE`]. Failed runs become `FAILED` rows; the sweep itself fails
/// only on I/O errors in `out_dir`.
pub fn sweep(
    template: &Config,
    vary: &[(String, Vec<String>)],
    out_dir: &Path,
    table: &ThresholdTable,
) -> Result<Vec<SweepRow>> {
    if vary.is_empty() || vary.iter().any(|(_, v)| v.is_empty()) {
        return Err(Error::Config("sweep needs at least one value per varied key".into()));
    }
    std::fs::create_dir_all(out_dir)?;
    let combos = combinations(vary);
    let specs: Vec<Result<ExperimentSpec>> = combos
        .iter()
        .enumerate()
        .map(|(i, values)| {
            let mut cfg = template.clone();
            for ((key, _), v) in vary.iter().zip(values) {
                super::config::set(&mut cfg, key, v.clone());
            }
            super::config::set(&mut cfg, "out", out_dir.join(format!("run_{i:04}")).display().to_string());
            ExperimentSpec::from_config(&cfg)
        })
        .collect();

    // Thresholds are shared, so compute them once before fanning out.
    let mut shared = table.clone();
    for spec in specs.iter().flatten() {
        if let Some(ledger) = &spec.ledger {
            let _ = shared.load(ledger);
        }
        if spec.compute_thresholds {
            let _ = ensure_thresholds(&spec.group, &spec.params, &mut shared, None);
        }
    }

    let run = |(values, spec): (&Vec<String>, &Result<ExperimentSpec>)| -> SweepRow {
        let spec = match spec {
            Ok(s) => s,
            Err(e) => return SweepRow::failed(values.clone(), e),
        };
        let mut local = shared.clone();
        match run_experiment(spec, &mut local) {
            Ok(r) => SweepRow {
                values: values.clone(),
                action: Some(r.prediction.report.action),
                virial: Some(r.prediction.report.virial),
                prediction: Some(r.prediction.prediction),
                outcome: Some(r.forward.outcome),
                agreement: Some(r.agreement),
                error: None,
            },
            Err(e) => SweepRow::failed(values.clone(), &e),
        }
    };
    #[cfg(feature = "parallel")]
    let rows: Vec<SweepRow> = combos.par_iter().zip(specs.par_iter()).map(run).collect();
    #[cfg(not(feature = "parallel"))]
    let rows: Vec<SweepRow> = combos.iter().zip(specs.iter()).map(run).collect();

    let mut header: Vec<String> = vary.iter().map(|(k, _)| k.clone()).collect();
    header.extend(["S_omega", "K", "prediction", "outcome", "agreement"].map(String::from));
    let lines: Vec<String> = rows.iter().map(SweepRow::csv).collect();
    append_rows(&out_dir.join(PHASE_FILE), &csv_line(&header), &lines)?;
    Ok(rows)
}
