//! `gnls`: group actions, ground states, thresholds, classification and
//! predict-then-verify experiments from the command line.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use gnls_core::evolution::{evolve, write_trajectory_csv};
use gnls_core::experiment::{
    build_initial_data, ensure_thresholds, load_config, parse_values, run_experiment, set, sweep, threshold_grid,
    Agreement, Config, ExperimentSpec,
};
use gnls_core::fields::snapshot;
use gnls_core::functionals::evaluate;
use gnls_core::ground_state::{append_profile_ledger, ground_state, minimal_action, profile_ledger_row, MinimizeOptions};
use gnls_core::symmetry::file::load_group;
use gnls_core::symmetry::{catalog, fixed_dimension, proper_subgroups, satisfies_star, SymmetryGroup};
use gnls_core::thresholds::{predict, threshold, ThresholdTable};
use gnls_core::Result;

const EXIT_CONTRADICTED: u8 = 2;
const EXIT_FAILURE: u8 = 3;

#[derive(Parser)]
#[command(name = "gnls", version, about = "Group-invariant focusing NLS: thresholds, classification and evolution")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

/// Flags shared by every subcommand. Each one mirrors a key of the
/// `key = value` config file and overrides it.
#[derive(Args, Debug, Default)]
struct Common {
    /// `key = value` configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    dim: Option<usize>,
    #[arg(long, global = true)]
    p: Option<f64>,
    #[arg(long, global = true)]
    omega: Option<f64>,
    #[arg(long, global = true)]
    grid_n: Option<usize>,
    #[arg(long, global = true)]
    box_l: Option<f64>,
    /// Group definition file, one element per line.
    #[arg(long, global = true)]
    group_file: Option<PathBuf>,
    /// Catalog group: trivial1|trivial2|trivial3|even|odd|quarter_turn|quarter_turn_g1|mirror_odd.
    #[arg(long, global = true)]
    group: Option<String>,
    /// Output directory for runs, output file otherwise.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Profile or threshold ledger with known l-values.
    #[arg(long, global = true)]
    ledger: Option<PathBuf>,
    #[arg(long, global = true)]
    recipe: Option<String>,
    #[arg(long, global = true)]
    a: Option<f64>,
    #[arg(long, global = true)]
    separation: Option<f64>,
    #[arg(long, global = true)]
    dt: Option<f64>,
    #[arg(long, global = true)]
    t_max: Option<f64>,
    /// Any other config key, as `key=value`.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    sets: Vec<String>,
}

impl Common {
    fn config(&self) -> Result<Config> {
        let mut cfg = match &self.config {
            Some(path) => load_config(path)?,
            None => Config::new(),
        };
        let flags: [(&str, Option<String>); 14] = [
            ("dim", self.dim.map(|v| v.to_string())),
            ("p", self.p.map(|v| v.to_string())),
            ("omega", self.omega.map(|v| v.to_string())),
            ("grid_n", self.grid_n.map(|v| v.to_string())),
            ("box_l", self.box_l.map(|v| v.to_string())),
            ("group_file", self.group_file.as_ref().map(|v| v.display().to_string())),
            ("group", self.group.clone()),
            ("out", self.out.as_ref().map(|v| v.display().to_string())),
            ("ledger", self.ledger.as_ref().map(|v| v.display().to_string())),
            ("recipe", self.recipe.clone()),
            ("a", self.a.map(|v| v.to_string())),
            ("separation", self.separation.map(|v| v.to_string())),
            ("dt", self.dt.map(|v| v.to_string())),
            ("t_max", self.t_max.map(|v| v.to_string())),
        ];
        for (key, value) in flags {
            if let Some(v) = value {
                if key == "group" {
                    cfg.remove("group_file");
                }
                if key == "group_file" {
                    cfg.remove("group");
                }
                set(&mut cfg, key, v);
            }
        }
        for kv in &self.sets {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| gnls_core::Error::Config(format!("--set expects key=value, got {kv:?}")))?;
            set(&mut cfg, k.trim(), v.trim());
        }
        Ok(cfg)
    }

    fn spec(&self) -> Result<ExperimentSpec> {
        ExperimentSpec::from_config(&self.config()?)
    }

    fn table(&self) -> Result<ThresholdTable> {
        let mut table = ThresholdTable::new();
        if let Some(path) = &self.ledger {
            table.load(path)?;
        }
        Ok(table)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Group definitions and the subgroup condition.
    Group {
        #[command(subcommand)]
        action: GroupCommand,
    },
    /// Ground state `Q_ω`, or with `--minimize` the minimal action under the group.
    GroundState {
        #[arg(long)]
        minimize: bool,
    },
    /// Scattering threshold of the group, appended to the threshold ledger at `--out`.
    Threshold {
        /// Compute missing l-values instead of failing.
        #[arg(long)]
        compute: bool,
    },
    /// Predicts the fate of a saved field.
    Classify {
        #[arg(long)]
        snapshot: PathBuf,
        #[arg(long)]
        compute: bool,
    },
    /// Evolves a saved field, or the configured recipe, into `--out`.
    Evolve {
        #[arg(long)]
        snapshot: Option<PathBuf>,
    },
    /// Predict, evolve both ways if asked, compare and persist.
    Experiment,
    /// Runs every combination of the varied keys and writes a phase table.
    Sweep {
        /// `key=v1,v2,…` or `key=start:stop:step`; repeatable.
        #[arg(long, required = true, value_name = "KEY=VALUES")]
        vary: Vec<String>,
    },
}

#[derive(Subcommand)]
enum GroupCommand {
    /// Checks closure, inverses and orthogonality and prints the group.
    Verify,
    /// Whether a subgroup satisfies the fixed-subspace condition.
    Star {
        /// Subgroup definition file.
        #[arg(long, conflicts_with = "sub")]
        sub_file: Option<PathBuf>,
        /// Catalog subgroup.
        #[arg(long)]
        sub: Option<String>,
    },
    /// Lists proper subgroups with the condition and fixed dimensions.
    Subgroups,
}

fn group_of(common: &Common) -> Result<SymmetryGroup> {
    match (&common.group_file, &common.group) {
        (Some(path), _) => Ok(catalog::labelled(load_group(path)?)),
        (None, Some(name)) => catalog::by_name(name),
        (None, None) => Ok(common.spec()?.group),
    }
}

fn label(g: &SymmetryGroup) -> String {
    g.name().map(str::to_owned).or_else(|| catalog::identify(g)).unwrap_or_else(|| g.canonical_key())
}

fn run_group(action: &GroupCommand, common: &Common) -> Result<u8> {
    let group = group_of(common)?;
    match action {
        GroupCommand::Verify => {
            println!("group: {}", label(&group));
            println!("order: {}", group.order());
            println!("dim: {}", group.dim());
            println!("fixed_dim: {}", fixed_dimension(group.dim(), group.elements()));
            for e in group.elements() {
                println!("  {e}");
            }
        }
        GroupCommand::Star { sub_file, sub } => {
            let sub = match (sub_file, sub) {
                (Some(path), _) => load_group(path)?,
                (None, Some(name)) => catalog::by_name(name)?,
                (None, None) => SymmetryGroup::trivial(group.dim()),
            };
            println!("{}", satisfies_star(&group, &sub)?);
        }
        GroupCommand::Subgroups => {
            println!("label,order,fixed_dim,star");
            for sub in proper_subgroups(&group)? {
                println!(
                    "{},{},{},{}",
                    label(&sub),
                    sub.order(),
                    fixed_dimension(sub.dim(), sub.elements()),
                    satisfies_star(&group, &sub)?
                );
            }
        }
    }
    Ok(0)
}

fn minimization_grid(common: &Common, spec: &ExperimentSpec) -> Result<gnls_core::Grid> {
    let cfg = common.config()?;
    if cfg.contains_key("grid_n") || cfg.contains_key("box_l") {
        Ok(spec.grid)
    } else {
        threshold_grid(&spec.params)
    }
}

fn run_ground_state(minimize: bool, common: &Common) -> Result<u8> {
    let spec = common.spec()?;
    let params = &spec.params;
    let q = ground_state(params)?;
    println!("S_omega(Q): {:.12}", q.action());
    println!("K(Q): {:.3e}", q.virial());
    println!("Q(0): {:.12}", q.peak());
    println!("scaling_exponent: {}", params.action_scaling_exponent());
    if minimize {
        let grid = minimization_grid(common, &spec)?;
        let l = grid.length();
        let r = minimal_action(&spec.group, params, grid, &[0.0, l / 8.0, l / 4.0], &MinimizeOptions::default())?;
        println!("group: {}", label(&spec.group));
        println!("l: {:.12}", r.value);
        println!("l / S_omega(Q): {:.9}", r.value / q.action());
        println!("residual: {:.3e}", r.residual);
        println!("iterations: {}", r.iterations);
        if let Some(path) = &common.out {
            append_profile_ledger(path, &[profile_ledger_row(&spec.group, params, &r)])?;
        }
    } else if let Some(path) = &common.out {
        let mut w = BufWriter::new(File::create(path)?);
        writeln!(w, "r,Q")?;
        for (r, v) in q.radii().iter().zip(q.values()) {
            writeln!(w, "{r:.17e},{v:.17e}")?;
        }
        w.flush()?;
    }
    Ok(0)
}

fn run_threshold(compute: bool, common: &Common) -> Result<u8> {
    let spec = common.spec()?;
    let mut table = common.table()?;
    if compute {
        ensure_thresholds(&spec.group, &spec.params, &mut table, common.ledger.as_deref())?;
    }
    let t = threshold(&spec.group, &spec.params, &mut table)?;
    let chain: Vec<String> = t.chain.iter().map(ToString::to_string).collect();
    let flags: Vec<&str> = t.flags.iter().map(|f| f.as_str()).collect();
    println!("group: {}", t.group_id);
    println!("l: {:.12}", t.l);
    match t.m {
        Some(m) => println!("m: {m:.12}"),
        None => println!("m: none"),
    }
    println!("threshold: {:.12}", t.s);
    println!("chain: {}", chain.join(" > "));
    println!("flags: {}", flags.join("|"));
    if let Some(path) = &common.out {
        table.append_ledger(path)?;
    }
    Ok(0)
}

fn run_classify(snapshot_path: &Path, compute: bool, common: &Common) -> Result<u8> {
    let spec = common.spec()?;
    let f = snapshot::load(snapshot_path)?;
    let mut table = common.table()?;
    if compute {
        ensure_thresholds(&spec.group, &spec.params, &mut table, None)?;
    }
    let r = predict(&f, &spec.group, &spec.params, &mut table)?;
    println!("prediction: {}", r.prediction);
    println!("group: {}", r.group_id);
    println!("S_omega: {:.12}", r.report.action);
    println!("K: {:.6e}", r.report.virial);
    println!("scattering_threshold: {:.12}", r.scattering_threshold);
    println!("blowup_threshold: {:.12}", r.blowup_threshold);
    println!("symmetry_residual: {:.3e}", r.symmetry_residual);
    Ok(0)
}

fn run_evolve(snapshot_path: Option<&Path>, common: &Common) -> Result<u8> {
    let spec = common.spec()?;
    let u0 = match snapshot_path {
        Some(path) => snapshot::load(path)?,
        None => build_initial_data(&spec.recipe, &spec.params, spec.grid, &spec.group)?,
    };
    let report = evaluate(&u0, &spec.params);
    println!("S_omega: {:.12}", report.action);
    println!("K: {:.6e}", report.virial);
    let record = evolve(&u0, &spec.params, &spec.evolve, Some(&spec.group))?;
    println!("outcome: {}", record.outcome);
    println!("reason: {}", record.reason);
    println!("final_time: {:.6}", record.final_time());
    println!("steps: {}", record.steps);
    std::fs::create_dir_all(&spec.out_dir)?;
    let path = spec.out_dir.join("trajectory.csv");
    let mut w = BufWriter::new(File::create(&path)?);
    write_trajectory_csv(&record, &mut w)?;
    w.flush()?;
    println!("trajectory: {}", path.display());
    Ok(0)
}

fn run_one(common: &Common) -> Result<u8> {
    let spec = common.spec()?;
    let mut table = ThresholdTable::new();
    let r = run_experiment(&spec, &mut table)?;
    println!("prediction: {}", r.prediction.prediction);
    println!("S_omega: {:.12}", r.prediction.report.action);
    println!("K: {:.6e}", r.prediction.report.virial);
    println!("threshold: {:.12}", r.prediction.scattering_threshold);
    println!("forward: {} ({}, t = {:.4})", r.forward.outcome, r.forward.reason, r.forward.final_time());
    if let Some(b) = &r.backward {
        println!("backward: {} ({}, t = {:.4})", b.outcome, b.reason, -b.final_time());
    }
    println!("agreement: {}", r.agreement);
    Ok(if r.agreement == Agreement::Contradicted { EXIT_CONTRADICTED } else { 0 })
}

fn run_sweep(vary: &[String], common: &Common) -> Result<u8> {
    let template = common.config()?;
    let mut axes = Vec::new();
    for v in vary {
        let (k, values) = v
            .split_once('=')
            .ok_or_else(|| gnls_core::Error::Config(format!("--vary expects key=values, got {v:?}")))?;
        axes.push((k.trim().replace('-', "_"), parse_values(values)?));
    }
    let out = common.out.clone().unwrap_or_else(|| PathBuf::from("sweep"));
    let rows = sweep(&template, &axes, &out, &common.table()?)?;
    let mut contradicted = false;
    for row in &rows {
        let verdict = match (&row.error, row.agreement) {
            (Some(e), _) => format!("FAILED: {e}"),
            (None, Some(a)) => {
                contradicted |= a == Agreement::Contradicted;
                format!(
                    "{} {} {}",
                    row.prediction.map(|p| p.to_string()).unwrap_or_default(),
                    row.outcome.map(|o| o.to_string()).unwrap_or_default(),
                    a
                )
            }
            (None, None) => String::new(),
        };
        println!("{}: {verdict}", row.values.join(","));
    }
    Ok(if contradicted { EXIT_CONTRADICTED } else { 0 })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let common = &cli.common;
    let result = match &cli.command {
        Command::Group { action } => run_group(action, common),
        Command::GroundState { minimize } => run_ground_state(*minimize, common),
        Command::Threshold { compute } => run_threshold(*compute, common),
        Command::Classify { snapshot, compute } => run_classify(snapshot, *compute, common),
        Command::Evolve { snapshot } => run_evolve(snapshot.as_deref(), common),
        Command::Experiment => run_one(common),
        Command::Sweep { vary } => run_sweep(vary, common),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_FAILURE)
        }
    }
}
