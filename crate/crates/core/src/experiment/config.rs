//! Plain `key = value` configuration and its translation into an
//! [`ExperimentSpec`].

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use super::recipe::{BumpShape, Recipe};
use crate::error::{Error, Result};
use crate::evolution::EvolveConfig;
use crate::fields::Grid;
use crate::params::NlsParameters;
use crate::symmetry::file::load_group;
use crate::symmetry::{catalog, SymmetryGroup};

/// Keys in file order do not matter; later duplicates win.
pub type Config = BTreeMap<String, String>;

pub const KNOWN_KEYS: &[&str] = &[
    "dim",
    "p",
    "omega",
    "grid_n",
    "box_l",
    "group",
    "group_file",
    "recipe",
    "a",
    "separation",
    "shape",
    "sigma",
    "positions",
    "amplitudes",
    "boost",
    "dt",
    "t_max",
    "cfl_safety",
    "blowup_gradient_factor",
    "scatter_window",
    "scatter_decay_factor",
    "sample_stride",
    "energy_drift_tol",
    "linear",
    "both_directions",
    "ledger",
    "compute_thresholds",
    "snapshot_times",
    "out",
];

fn normalize_key(k: &str) -> String {
    k.trim().replace('-', "_")
}

/// Parses `key = value` lines; `#` starts a comment.
pub fn parse_config(text: &str) -> Result<Config> {
    let mut cfg = Config::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Parse { line: i + 1, message: format!("expected key = value, got {line:?}") })?;
        let key = normalize_key(k);
        if key.is_empty() {
            return Err(Error::Parse { line: i + 1, message: "empty key".into() });
        }
        cfg.insert(key, v.trim().to_owned());
    }
    Ok(cfg)
}

pub fn load_config(path: &Path) -> Result<Config> {
    parse_config(&std::fs::read_to_string(path)?)
}

/// Renders a configuration so that [`parse_config`] reads it back unchanged.
pub fn render_config(cfg: &Config) -> String {
    cfg.iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
}

/// Sets `key` to `value`, normalizing dashes in the key.
pub fn set(cfg: &mut Config, key: &str, value: impl Into<String>) {
    cfg.insert(normalize_key(key), value.into());
}

struct Reader<'a>(&'a Config);

impl Reader<'_> {
    fn str(&self, key: &str) -> Option<&str> {
        self.0.get(key).map(String::as_str).filter(|s| !s.is_empty())
    }

    fn f64_or(&self, key: &str, default: f64) -> Result<f64> {
        self.str(key).map_or(Ok(default), |s| parse_f64(key, s))
    }

    fn f64(&self, key: &str) -> Result<f64> {
        parse_f64(key, self.str(key).ok_or_else(|| Error::Config(format!("missing {key}")))?)
    }

    fn usize_or(&self, key: &str, default: usize) -> Result<usize> {
        self.str(key).map_or(Ok(default), |s| {
            s.parse().map_err(|_| Error::Config(format!("{key}: expected a non-negative integer, got {s:?}")))
        })
    }

    fn bool_or(&self, key: &str, default: bool) -> Result<bool> {
        match self.str(key) {
            None => Ok(default),
            Some("true" | "yes" | "1") => Ok(true),
            Some("false" | "no" | "0") => Ok(false),
            Some(s) => Err(Error::Config(format!("{key}: expected true or false, got {s:?}"))),
        }
    }

    fn list(&self, key: &str) -> Result<Vec<f64>> {
        self.str(key).map_or(Ok(Vec::new()), |s| parse_list(key, s))
    }
}

fn parse_f64(key: &str, s: &str) -> Result<f64> {
    s.trim().parse().map_err(|_| Error::Config(format!("{key}: expected a number, got {s:?}")))
}

fn parse_list(key: &str, s: &str) -> Result<Vec<f64>> {
    s.split(',').filter(|t| !t.trim().is_empty()).map(|t| parse_f64(key, t)).collect()
}

/// Parses a sweep value list: `v1,v2,…` or an inclusive range
/// `start:stop:step`.
pub fn parse_values(s: &str) -> Result<Vec<String>> {
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        [start, stop, step] => {
            let (a, b, h) = (parse_f64("range", start)?, parse_f64("range", stop)?, parse_f64("range", step)?);
            if !(h > 0.0) || b < a {
                return Err(Error::Config(format!("bad range {s:?}")));
            }
            let n = ((b - a) / h + 1e-9).floor() as usize;
            // Rounded to the step's decimals so that 0.8:1.2:0.05 gives 0.85, not 0.8500000000000001.
            let decimals = step.trim().split_once('.').map_or(0, |(_, f)| f.len());
            Ok((0..=n).map(|k| format!("{:.*}", decimals, a + k as f64 * h)).collect())
        }
        [_] => Ok(s.split(',').map(|t| t.trim().to_owned()).filter(|t| !t.is_empty()).collect()),
        _ => Err(Error::Config(format!("bad value list {s:?}"))),
    }
}

/// Box defaults per dimension for `ω = 1`, scaled by the soliton width.
pub fn default_grid(params: &NlsParameters) -> (usize, f64) {
    let (n, l) = match params.dim {
        1 => (2048, 240.0),
        2 => (256, 40.0),
        _ => (64, 12.8),
    };
    (n, l * params.width())
}

#[derive(Debug, Clone)]
pub struct ExperimentSpec {
    pub params: NlsParameters,
    pub grid: Grid,
    pub group: SymmetryGroup,
    /// Catalog name or file path the group came from.
    pub group_source: String,
    pub recipe: Recipe,
    pub evolve: EvolveConfig,
    pub out_dir: PathBuf,
    /// Also evolve backward in time.
    pub both_directions: bool,
    /// Threshold or profile ledger read before computing missing l-values.
    pub ledger: Option<PathBuf>,
    pub compute_thresholds: bool,
    /// Times at which forward snapshots are saved, besides the final state.
    pub snapshot_times: Vec<f64>,
    /// The configuration this spec was built from.
    pub config: Config,
}

impl ExperimentSpec {
    pub fn from_config(cfg: &Config) -> Result<Self> {
        if let Some(k) = cfg.keys().find(|k| !KNOWN_KEYS.contains(&k.as_str())) {
            return Err(Error::Config(format!("unknown key {k:?}")));
        }
        let r = Reader(cfg);
        let dim = r.usize_or("dim", 1)?;
        let default_p = match dim {
            1 => 7.0,
            2 => 5.0,
            _ => 3.0,
        };
        let params = NlsParameters::new(dim, r.f64_or("p", default_p)?, r.f64_or("omega", 1.0)?)?;
        let (n0, l0) = default_grid(&params);
        let grid = Grid::new(dim, r.usize_or("grid_n", n0)?, r.f64_or("box_l", l0)?)?;

        let (group, group_source) = match (r.str("group_file"), r.str("group")) {
            (Some(_), Some(_)) => return Err(Error::Config("give group or group_file, not both".into())),
            (Some(path), None) => (catalog::labelled(load_group(Path::new(path))?), path.to_owned()),
            (None, Some(name)) => (catalog::by_name(name)?, name.to_owned()),
            (None, None) => (SymmetryGroup::trivial(dim), format!("trivial{dim}")),
        };
        if group.dim() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: group.dim() });
        }

        let mut recipe = match r.str("recipe").unwrap_or("scaled_ground_state") {
            "scaled_ground_state" => Recipe::ScaledGroundState { a: r.f64_or("a", 1.0)? },
            "odd_dipole" => Recipe::OddDipole { a: r.f64_or("a", 1.0)?, separation: r.f64("separation")? },
            "symmetrized_bumps" => {
                let shape = match r.str("shape").unwrap_or("ground_state") {
                    "ground_state" => BumpShape::GroundState,
                    "gaussian" => BumpShape::Gaussian { sigma: r.f64_or("sigma", params.width())? },
                    other => return Err(Error::Config(format!("unknown shape {other:?}"))),
                };
                let positions = r
                    .str("positions")
                    .ok_or_else(|| Error::Config("missing positions".into()))?
                    .split(';')
                    .map(|p| parse_list("positions", p))
                    .collect::<Result<Vec<_>>>()?;
                let amplitudes = r.list("amplitudes")?;
                let amplitudes = if amplitudes.is_empty() { vec![1.0; positions.len()] } else { amplitudes };
                Recipe::SymmetrizedBumps { shape, positions, amplitudes }
            }
            other => return Err(Error::Config(format!("unknown recipe {other:?}"))),
        };
        let boost = r.list("boost")?;
        if !boost.is_empty() {
            recipe = Recipe::Boosted { inner: Box::new(recipe), frequency: boost };
        }

        let d = EvolveConfig::default();
        let evolve = EvolveConfig {
            dt_initial: r.f64_or("dt", d.dt_initial)?,
            t_max: r.f64_or("t_max", d.t_max)?,
            cfl_safety: r.f64_or("cfl_safety", d.cfl_safety)?,
            blowup_gradient_factor: r.f64_or("blowup_gradient_factor", d.blowup_gradient_factor)?,
            scatter_window: r.f64_or("scatter_window", d.scatter_window)?,
            scatter_decay_factor: r.f64_or("scatter_decay_factor", d.scatter_decay_factor)?,
            sample_stride: r.usize_or("sample_stride", d.sample_stride)?,
            energy_drift_tol: r.f64_or("energy_drift_tol", d.energy_drift_tol)?,
            linear: r.bool_or("linear", d.linear)?,
        };
        evolve.validate()?;

        let mut snapshot_times = r.list("snapshot_times")?;
        snapshot_times.sort_by(f64::total_cmp);

        Ok(Self {
            params,
            grid,
            group,
            group_source,
            recipe,
            evolve,
            out_dir: PathBuf::from(r.str("out").unwrap_or("out")),
            both_directions: r.bool_or("both_directions", false)?,
            ledger: r.str("ledger").map(PathBuf::from),
            compute_thresholds: r.bool_or("compute_thresholds", true)?,
            snapshot_times,
            config: cfg.clone(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_round_trips() {
        let text = "# run\ndim = 1\ngrid-n = 512 # small\nbox_l=60\nrecipe = odd_dipole\nseparation = 8\na = 0.9\n";
        let cfg = parse_config(text).unwrap();
        assert_eq!(cfg["grid_n"], "512");
        assert_eq!(parse_config(&render_config(&cfg)).unwrap(), cfg);
        let spec = ExperimentSpec::from_config(&cfg).unwrap();
        assert_eq!(spec.grid.n(), 512);
        assert_eq!(spec.recipe, Recipe::OddDipole { a: 0.9, separation: 8.0 });
        assert_eq!(spec.params.p, 7.0);
        assert!(spec.group.is_trivial());
    }

    #[test]
    fn rejects_unknown_and_malformed() {
        assert!(matches!(parse_config("dim 1"), Err(Error::Parse { line: 1, .. })));
        let mut cfg = Config::new();
        set(&mut cfg, "grid-size", "4");
        assert!(matches!(ExperimentSpec::from_config(&cfg), Err(Error::Config(_))));
        let cfg = parse_config("a = many").unwrap();
        assert!(ExperimentSpec::from_config(&cfg).is_err());
        let cfg = parse_config("group = odd\ngroup_file = g.txt").unwrap();
        assert!(ExperimentSpec::from_config(&cfg).is_err());
    }

    #[test]
    fn bumps_and_boost() {
        let cfg = parse_config(
            "dim = 2\ngroup = quarter_turn\nrecipe = symmetrized_bumps\nshape = gaussian\npositions = 5,2; 1,1\nboost = 0,0",
        )
        .unwrap();
        let spec = ExperimentSpec::from_config(&cfg).unwrap();
        let Recipe::Boosted { inner, frequency } = spec.recipe else { panic!() };
        assert_eq!(frequency, vec![0.0, 0.0]);
        let Recipe::SymmetrizedBumps { positions, amplitudes, .. } = *inner else { panic!() };
        assert_eq!(positions, vec![vec![5.0, 2.0], vec![1.0, 1.0]]);
        assert_eq!(amplitudes, vec![1.0, 1.0]);
        assert_eq!(spec.group.order(), 4);
    }

    #[test]
    fn value_lists() {
        let v = parse_values("0.80:1.20:0.05").unwrap();
        assert_eq!(v.len(), 9);
        assert_eq!(v[1], "0.85");
        assert_eq!(v[8], "1.20");
        assert_eq!(parse_values("8, 10,12").unwrap(), vec!["8", "10", "12"]);
        assert!(parse_values("1:0:0.1").is_err());
    }
}
