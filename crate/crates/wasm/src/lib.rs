//! Browser bindings: ground-state profiles, threshold classification of
//! one-dimensional data and a steppable evolution for the demo page.

use gnls_core::evolution::step;
use gnls_core::experiment::{build_initial_data, Recipe};
use gnls_core::functionals::{evaluate, FunctionalReport};
use gnls_core::ground_state::ground_state;
use gnls_core::symmetry::{catalog, SymmetryGroup};
use gnls_core::thresholds::{predict, ThresholdTable};
use gnls_core::{ComplexField, Grid, NlsParameters};
use wasm_bindgen::prelude::*;

const DEMO_N: usize = 1024;
const DEMO_L: f64 = 80.0;

fn js(e: gnls_core::Error) -> JsError {
    JsError::new(&e.to_string())
}

#[wasm_bindgen]
pub struct Profile {
    radii: Vec<f64>,
    values: Vec<f64>,
    action: f64,
    virial: f64,
}

#[wasm_bindgen]
impl Profile {
    #[wasm_bindgen(getter)]
    pub fn radii(&self) -> Vec<f64> {
        self.radii.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn values(&self) -> Vec<f64> {
        self.values.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn action(&self) -> f64 {
        self.action
    }

    #[wasm_bindgen(getter)]
    pub fn virial(&self) -> f64 {
        self.virial
    }
}

fn profile(dim: usize, p: f64, omega: f64, r_max: f64, samples: usize) -> gnls_core::Result<Profile> {
    let q = ground_state(&NlsParameters::new(dim, p, omega)?)?;
    let samples = samples.max(2);
    let radii: Vec<f64> = (0..samples).map(|k| r_max * k as f64 / (samples - 1) as f64).collect();
    let values = radii.iter().map(|&r| q.value(r)).collect();
    Ok(Profile { radii, values, action: q.action(), virial: q.virial() })
}

/// `Q_ω(r)` at `samples` equally spaced radii in `[0, r_max]`.
#[wasm_bindgen(js_name = groundStateProfile)]
pub fn ground_state_profile(dim: usize, p: f64, omega: f64, r_max: f64, samples: usize) -> Result<Profile, JsError> {
    profile(dim, p, omega, r_max, samples).map_err(js)
}

#[wasm_bindgen]
pub struct Classification {
    prediction: String,
    action: f64,
    virial: f64,
    ground_level: f64,
    threshold: f64,
}

#[wasm_bindgen]
impl Classification {
    #[wasm_bindgen(getter)]
    pub fn prediction(&self) -> String {
        self.prediction.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn action(&self) -> f64 {
        self.action
    }

    #[wasm_bindgen(getter)]
    pub fn virial(&self) -> f64 {
        self.virial
    }

    /// `l_ω`.
    #[wasm_bindgen(getter, js_name = groundLevel)]
    pub fn ground_level(&self) -> f64 {
        self.ground_level
    }

    /// Scattering threshold of the chosen group.
    #[wasm_bindgen(getter)]
    pub fn threshold(&self) -> f64 {
        self.threshold
    }
}

fn demo_setup(p: f64) -> gnls_core::Result<(NlsParameters, Grid)> {
    Ok((NlsParameters::new(1, p, 1.0)?, Grid::new(1, DEMO_N, DEMO_L)?))
}

fn demo_recipe(shape: &str, a: f64, separation: f64) -> gnls_core::Result<Recipe> {
    match shape {
        "scaled" => Ok(Recipe::ScaledGroundState { a }),
        "dipole" => Ok(Recipe::OddDipole { a, separation }),
        other => Err(gnls_core::Error::RecipeInvalid(format!("unknown shape {other:?}"))),
    }
}

/// Only `l_ω` is known in the browser; the odd group's own minimal action is
/// left unbounded, so its threshold comes from the subgroup branch.
fn table_for(params: &NlsParameters) -> gnls_core::Result<ThresholdTable> {
    let mut table = ThresholdTable::new();
    table.insert_l(&SymmetryGroup::trivial(1), params.omega, ground_state(params)?.action(), true);
    table.insert_l(&catalog::odd(), params.omega, f64::INFINITY, false);
    Ok(table)
}

fn classify_inner(p: f64, shape: &str, a: f64, separation: f64, odd: bool) -> gnls_core::Result<Classification> {
    let (params, grid) = demo_setup(p)?;
    let group = if odd { catalog::odd() } else { SymmetryGroup::trivial(1) };
    let u0 = build_initial_data(&demo_recipe(shape, a, separation)?, &params, grid, &group)?;
    let mut table = table_for(&params)?;
    let r = predict(&u0, &group, &params, &mut table)?;
    let ground_level = table.l_value(&SymmetryGroup::trivial(1), params.omega).map_or(f64::NAN, |l| l.value);
    Ok(Classification {
        prediction: r.prediction.to_string(),
        action: r.report.action,
        virial: r.report.virial,
        ground_level,
        threshold: r.scattering_threshold,
    })
}

/// Predicts the fate of one-dimensional data: `shape` is `"scaled"` for
/// `a·Q` or `"dipole"` for an odd pair of ground states `separation` apart.
#[wasm_bindgen]
pub fn classify(p: f64, shape: &str, a: f64, separation: f64, odd: bool) -> Result<Classification, JsError> {
    classify_inner(p, shape, a, separation, odd).map_err(js)
}

/// A one-dimensional run advanced a few fixed steps per animation frame.
#[wasm_bindgen]
pub struct Evolution {
    params: NlsParameters,
    u: ComplexField,
    t: f64,
    dt: f64,
    grad0: f64,
    report: FunctionalReport,
}

impl Evolution {
    fn create(p: f64, shape: &str, a: f64, separation: f64) -> gnls_core::Result<Self> {
        let (params, grid) = demo_setup(p)?;
        let group = if shape == "dipole" { catalog::odd() } else { SymmetryGroup::trivial(1) };
        let u = build_initial_data(&demo_recipe(shape, a, separation)?, &params, grid, &group)?;
        let report = evaluate(&u, &params);
        Ok(Self { params, u, t: 0.0, dt: 1e-3, grad0: report.grad_sq, report })
    }

    fn advance_inner(&mut self, steps: usize) -> gnls_core::Result<()> {
        for _ in 0..steps {
            // Keep the nonlinear phase per step small as the peak grows.
            let peak = self.params.nonlinear_factor(self.u.max_abs().powi(2));
            let dt = self.dt.min(0.2 / peak.max(1e-12));
            self.u = step(&self.u, dt, &self.params)?;
            self.t += dt;
        }
        self.report = evaluate(&self.u, &self.params);
        Ok(())
    }
}

#[wasm_bindgen]
impl Evolution {
    #[wasm_bindgen(constructor)]
    pub fn new(p: f64, shape: &str, a: f64, separation: f64) -> Result<Evolution, JsError> {
        Self::create(p, shape, a, separation).map_err(js)
    }

    pub fn advance(&mut self, steps: usize) -> Result<(), JsError> {
        self.advance_inner(steps).map_err(js)
    }

    /// `|u(t, x)|` on the grid.
    pub fn modulus(&self) -> Vec<f64> {
        self.u.samples().iter().map(|z| z.norm()).collect()
    }

    pub fn positions(&self) -> Vec<f64> {
        let g = *self.u.grid();
        (0..g.n()).map(|j| g.coordinate(j)).collect()
    }

    #[wasm_bindgen(getter)]
    pub fn time(&self) -> f64 {
        self.t
    }

    #[wasm_bindgen(getter)]
    pub fn action(&self) -> f64 {
        self.report.action
    }

    #[wasm_bindgen(getter)]
    pub fn virial(&self) -> f64 {
        self.report.virial
    }

    /// `‖∇u(t)‖ / ‖∇u(0)‖`.
    #[wasm_bindgen(getter, js_name = gradientRatio)]
    pub fn gradient_ratio(&self) -> f64 {
        (self.report.grad_sq / self.grad0).sqrt()
    }
}
