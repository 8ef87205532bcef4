//! Randomized checks of the structural invariants.

use gnls_core::evolution::step;
use gnls_core::experiment::{parse_config, render_config, Config};
use gnls_core::functionals::{evaluate, scale};
use gnls_core::ground_state::ground_state;
use gnls_core::symmetry::{apply, catalog, proper_subgroups, symmetrization_residual, symmetrize, SymmetryGroup};
use gnls_core::thresholds::{recompute_from_chain, threshold, ThresholdTable};
use gnls_core::{ComplexField, Grid, NlsParameters};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{RngExt, SeedableRng};

fn grid_for(dim: usize) -> Grid {
    match dim {
        1 => Grid::new(1, 128, 20.0).unwrap(),
        _ => Grid::new(2, 32, 16.0).unwrap(),
    }
}

/// A sum of three complex Gaussians of width at least 0.7 near the origin.
fn bumps(grid: Grid, seed: u64) -> ComplexField {
    let mut rng = StdRng::seed_from_u64(seed);
    let d = grid.dim();
    let terms: Vec<(Vec<f64>, Complex64, f64)> = (0..3)
        .map(|_| {
            let c = (0..d).map(|_| rng.random_range(-2.0..2.0)).collect();
            let a = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            (c, a, rng.random_range(0.7..1.2))
        })
        .collect();
    ComplexField::from_fn(grid, |x| {
        terms
            .iter()
            .map(|(c, a, s)| {
                let r2: f64 = x.iter().zip(c).map(|(u, v)| (u - v) * (u - v)).sum();
                a * (-r2 / (s * s)).exp()
            })
            .sum()
    })
    .unwrap()
}

fn groups() -> Vec<SymmetryGroup> {
    vec![catalog::even(), catalog::odd(), catalog::quarter_turn(), catalog::mirror_odd()]
}

fn relative(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 32, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn symmetrize_is_an_idempotent_projector(which in 0usize..4, seed in any::<u64>()) {
        let g = &groups()[which];
        let f = bumps(grid_for(g.dim()), seed);
        let once = symmetrize(&f, g).unwrap();
        let twice = symmetrize(&once, g).unwrap();
        prop_assert!(twice.l2_distance(&once) <= 1e-12 * once.mass().sqrt().max(1e-300));
        prop_assert!(symmetrization_residual(&once, g).unwrap() < 1e-12);
    }

    #[test]
    fn apply_preserves_every_norm(which in 0usize..4, seed in any::<u64>()) {
        let g = &groups()[which];
        let f = bumps(grid_for(g.dim()), seed);
        for el in g.elements() {
            let h = apply(el, &f).unwrap();
            prop_assert!(relative(h.mass(), f.mass()) < 1e-14);
            prop_assert!(relative(h.gradient_norm_sq(), f.gradient_norm_sq()) < 1e-12);
        }
    }

    #[test]
    fn momentum_is_equivariant(which in 0usize..4, seed in any::<u64>()) {
        let g = &groups()[which];
        let f = bumps(grid_for(g.dim()), seed);
        let p = f.momentum();
        for el in g.elements() {
            let q = apply(el, &f).unwrap().momentum();
            for i in 0..g.dim() {
                let rotated: f64 = (0..g.dim()).map(|j| el.matrix()[(i, j)] * p[j]).sum();
                prop_assert!((q[i] - rotated).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn j_functional_is_nonnegative(seed in any::<u64>(), amp in 0.1f64..4.0) {
        let params = NlsParameters::new(1, 7.0, 1.0).unwrap();
        let r = evaluate(&bumps(grid_for(1), seed).scaled_real(amp), &params);
        prop_assert!(r.action - r.virial / 4.0 >= 0.0);
    }

    #[test]
    fn sandwich_holds_below_the_nehari_point(seed in any::<u64>(), margin in 0.5f64..0.999) {
        let params = NlsParameters::new(1, 7.0, 1.0).unwrap();
        let f = bumps(grid_for(1), seed);
        let r = evaluate(&f, &params);
        // K(cf) = 0 at c^{p-1} = (2/d)‖∇f‖²(p+1) / ((p-1)‖f‖^{p+1}).
        let c0 = (2.0 * r.grad_sq * 8.0 / (6.0 * r.potential)).powf(1.0 / 6.0);
        let g = evaluate(&f.scaled_real(margin * c0), &params);
        prop_assert!(g.virial >= 0.0);
        let middle = 0.5 * g.grad_sq + 0.5 * g.mass;
        prop_assert!(g.action <= middle * (1.0 + 1e-12));
        prop_assert!(middle <= params.sandwich_constant() * g.action * (1.0 + 1e-12));
    }

    #[test]
    fn virial_gap_below_the_ground_level(seed in any::<u64>(), amp in 0.05f64..3.0) {
        let params = NlsParameters::new(1, 7.0, 1.0).unwrap();
        let l = ground_state(&params).unwrap().action();
        let r = evaluate(&bumps(grid_for(1), seed).scaled_real(amp), &params);
        prop_assume!(r.action < l);
        let gap = 4.0 * (l - r.action);
        let scatter_side = r.virial >= gap.min(params.delta() * r.grad_sq) * (1.0 - 1e-9);
        prop_assert!(scatter_side || r.virial <= -gap * (1.0 - 1e-9));
    }

    #[test]
    fn scaling_preserves_mass(seed in any::<u64>(), lambda in -0.3f64..0.3) {
        let params = NlsParameters::new(1, 7.0, 1.0).unwrap();
        // Room on both sides of the spectrum for a factor e^{0.6} either way.
        let f = bumps(Grid::new(1, 512, 40.0).unwrap(), seed);
        let h = scale(&f, lambda, &params).unwrap();
        prop_assert!(relative(h.mass(), f.mass()) < 1e-8);
    }

    #[test]
    fn split_step_conserves_mass(seed in any::<u64>(), dt in 1e-4f64..1e-2) {
        let params = NlsParameters::new(1, 7.0, 1.0).unwrap();
        let f = bumps(grid_for(1), seed);
        let mut u = f.clone();
        for _ in 0..20 {
            u = step(&u, dt, &params).unwrap();
        }
        prop_assert!(relative(u.mass(), f.mass()) < 1e-12);
    }

    #[test]
    fn thresholds_dominate_the_ground_level(
        levels in proptest::collection::vec(1.0f64..8.0, 4),
        converged in proptest::collection::vec(any::<bool>(), 4),
        reversed in any::<bool>(),
    ) {
        let params = NlsParameters::new(2, 5.0, 1.0).unwrap();
        let l0 = 1.0;
        for top in [catalog::quarter_turn(), catalog::mirror_odd()] {
            let mut family = proper_subgroups(&top).unwrap();
            family.push(top.clone());
            if reversed {
                family.reverse();
            }
            let mut table = ThresholdTable::new();
            for (k, g) in family.iter().enumerate() {
                let value = if g.is_trivial() { l0 } else { l0 * levels[k % 4] };
                table.insert_l(g, 1.0, value, converged[k % 4] || g.is_trivial());
            }
            let mut fresh = table.clone();
            let t = threshold(&top, &params, &mut table).unwrap();
            prop_assert!(t.s >= l0);
            prop_assert!(t.s <= t.l);
            prop_assert_eq!(recompute_from_chain(&t, &table).unwrap(), t.s);
            // Warming the memo through the subgroups first changes nothing.
            for g in &family {
                threshold(g, &params, &mut fresh).unwrap();
            }
            prop_assert_eq!(threshold(&top, &params, &mut fresh).unwrap(), t);
        }
    }

    #[test]
    fn config_round_trips(entries in proptest::collection::btree_map("[a-z][a-z_]{0,8}", "[A-Za-z0-9.,:;/ -]{0,12}", 0..6)) {
        let cfg: Config = entries.into_iter().map(|(k, v)| (k, v.trim().to_owned())).collect();
        prop_assert_eq!(parse_config(&render_config(&cfg)).unwrap(), cfg);
    }
}
