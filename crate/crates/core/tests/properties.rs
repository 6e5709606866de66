//! Property tests for the structural invariants of each module.

use bolab_core::dynamics::{solve, EquationParams, SolverConfig};
use bolab_core::energy::{correction_integral, energy_pair, EnergyCalibration};
use bolab_core::io::{
    parse_config, parse_config_with, serialize_config, trajectory_from_text, trajectory_to_text,
};
use bolab_core::lab::{freq_est_holds, identity_sweep, LabCorpus};
use bolab_core::spectral::{bessel_inverse, dx, fractional_derivative, hilbert, mollify, multiply};
use bolab_core::{MollifierSpec, ProductMode, SpectralField};
use num_complex::Complex64;
use proptest::prelude::*;

fn field(max_mode: usize) -> impl Strategy<Value = SpectralField> {
    (
        -1.0..1.0f64,
        prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), max_mode),
    )
        .prop_map(|(mean, rest)| {
            let mut coeffs = vec![Complex64::new(mean, 0.0)];
            coeffs.extend(rest.into_iter().map(|(re, im)| Complex64::new(re, im)));
            SpectralField::from_coeffs(coeffs).unwrap()
        })
}

fn any_field() -> impl Strategy<Value = SpectralField> {
    (1usize..=16).prop_flat_map(field)
}

/// Largest coefficient gap relative to the larger field's largest coefficient.
fn gap(a: &SpectralField, b: &SpectralField) -> f64 {
    let k = a.max_mode().max(b.max_mode());
    let (a, b) = (a.resized(k), b.resized(k));
    let scale = a
        .coeffs()
        .iter()
        .chain(b.coeffs())
        .map(|c| c.norm())
        .fold(1.0, f64::max);
    a.coeffs()
        .iter()
        .zip(b.coeffs())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
        / scale
}

/// `Σ_{j+l=k} f̂_j ĝ_l / √(2π)` over both signs of every index.
fn convolution_oracle(f: &SpectralField, g: &SpectralField) -> SpectralField {
    let (kf, kg) = (f.max_mode() as i64, g.max_mode() as i64);
    let coeffs = (0..=kf + kg)
        .map(|k| {
            let mut sum = Complex64::new(0.0, 0.0);
            for j in -kf..=kf {
                if (k - j).abs() <= kg {
                    sum += f.coeff(j) * g.coeff(k - j);
                }
            }
            sum / (2.0 * std::f64::consts::PI).sqrt()
        })
        .collect();
    SpectralField::from_coeffs(coeffs).unwrap()
}

type Multiplier = fn(&SpectralField) -> SpectralField;

const MULTIPLIERS: [Multiplier; 5] = [
    hilbert,
    |f| fractional_derivative(f, 1.5).unwrap(),
    |f| dx(f, 1),
    bessel_inverse,
    |f| mollify(f, &MollifierSpec::new(0.25).unwrap()),
];

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn multipliers_commute(f in any_field()) {
        for a in MULTIPLIERS {
            for b in MULTIPLIERS {
                prop_assert!(gap(&a(&b(&f)), &b(&a(&f))) <= 1e-13);
            }
        }
    }

    #[test]
    fn hilbert_squares_to_minus_the_mean_free_part(f in any_field()) {
        let mut coeffs = f.coeffs().to_vec();
        coeffs[0] = Complex64::new(0.0, 0.0);
        let mean_free = SpectralField::from_coeffs(coeffs).unwrap();
        prop_assert_eq!(hilbert(&hilbert(&f)), -&mean_free);
    }

    #[test]
    fn first_fractional_derivative_is_hilbert_of_dx(f in any_field()) {
        prop_assert_eq!(fractional_derivative(&f, 1.0).unwrap(), hilbert(&dx(&f, 1)));
    }

    #[test]
    fn outputs_have_a_real_mean(f in any_field(), g in any_field()) {
        let mut outputs: Vec<SpectralField> = MULTIPLIERS.iter().map(|m| m(&f)).collect();
        outputs.push(multiply(&f, &g, ProductMode::Exact));
        outputs.push(multiply(&f, &g, ProductMode::Truncated));
        for out in outputs {
            prop_assert_eq!(out.coeffs()[0].im, 0.0);
        }
    }

    #[test]
    fn exact_product_matches_the_convolution(f in any_field(), g in any_field(), h in any_field()) {
        let fg = multiply(&f, &g, ProductMode::Exact);
        prop_assert!(gap(&fg, &convolution_oracle(&f, &g)) <= 1e-13);
        prop_assert!(gap(&fg, &multiply(&g, &f, ProductMode::Exact)) <= 1e-13);
        let left = multiply(&fg, &h, ProductMode::Exact);
        let right = multiply(&f, &multiply(&g, &h, ProductMode::Exact), ProductMode::Exact);
        prop_assert!(gap(&left, &right) <= 1e-12);
        let sum = multiply(&f, &(&g + &h.resized(g.max_mode())), ProductMode::Exact);
        let split = &fg + &multiply(&f, &h.resized(g.max_mode()), ProductMode::Exact);
        prop_assert!(gap(&sum, &split) <= 1e-13);
    }

    #[test]
    fn truncated_product_is_the_projection(f in any_field(), g in any_field()) {
        let keep = f.max_mode().max(g.max_mode());
        let exact = multiply(&f, &g, ProductMode::Exact).resized(keep);
        prop_assert!(gap(&multiply(&f, &g, ProductMode::Truncated), &exact) <= 1e-13);
    }

    #[test]
    fn bump_profile_bounds(x in -4.0..4.0f64, gamma in 0.01..1.0f64) {
        let spec = MollifierSpec::new(gamma).unwrap();
        let rho = spec.rho(x);
        prop_assert!((0.0..=1.0).contains(&rho));
        prop_assert_eq!(rho, spec.rho(-x));
        if x.abs() <= 1.0 {
            prop_assert_eq!(rho, 1.0);
        }
        if x.abs() >= 2.0 {
            prop_assert_eq!(rho, 0.0);
        }
    }

    #[test]
    fn frequency_inequality_holds(k in -(1i64 << 20)..(1i64 << 20)) {
        prop_assert!(freq_est_holds(k));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn pair_energy_swap_changes_only_the_weight(f in field(12), g in field(12)) {
        let h = 3f64.sqrt() / 2.0;
        let cal = EnergyCalibration::with_constants(3.0, 2.6, h, h, 2.0, 1.0, 1.0, 1.0).unwrap();
        let (fg, gf) = (energy_pair(&f, &g, &cal).unwrap(), energy_pair(&g, &f, &cal).unwrap());
        prop_assert_eq!((fg.l2_sq, fg.ds_sq), (gf.l2_sq, gf.ds_sq));
        // the correction is linear in the weight and even in w
        let w = &f - &g;
        let expected = cal.lambda_s * correction_integral(&w, &w, 3.0);
        let scale = fg.correction.abs().max(gf.correction.abs()).max(1.0);
        prop_assert!((fg.correction - gf.correction - expected).abs() <= 1e-11 * scale);
    }

    #[test]
    fn identities_hold_on_random_corpora(seed in any::<u64>(), max_mode in 4usize..=24) {
        for record in identity_sweep(&LabCorpus::generate(seed, 4, max_mode, 3.0)) {
            prop_assert!(record.max_relative_residual <= 1e-12, "{}: {:e}", record.name, record.max_relative_residual);
        }
    }

    #[test]
    fn dissipation_never_raises_the_l2_norm(f in field(16), gamma in 0.05..0.9f64) {
        let p = EquationParams { gamma, ..EquationParams::default() };
        let cfg = SolverConfig::new(16, 1e-3, 0.05).unwrap().with_stride(5);
        let traj = solve(&f.scale(0.3), &p, &cfg).unwrap();
        prop_assert!(traj.completed());
        prop_assert!(traj.times.windows(2).all(|w| w[1] > w[0]));
        for pair in traj.snapshots.windows(2) {
            prop_assert!(pair[1].norm() <= pair[0].norm() * (1.0 + 1e-10));
        }
        prop_assert!(traj.snapshots.iter().all(|u| u.coeffs()[0].im == 0.0));
    }

    #[test]
    fn trajectories_round_trip_through_text(f in field(8), gamma in 0.0..0.9f64) {
        let p = EquationParams { gamma, ..EquationParams::default() };
        let cfg = SolverConfig::new(8, 1e-3, 0.01).unwrap().with_stride(3);
        let traj = solve(&f.scale(0.3), &p, &cfg).unwrap();
        let path = std::path::Path::new("trajectory.txt");
        let back = trajectory_from_text(&trajectory_to_text(&traj), path).unwrap();
        prop_assert_eq!(back.times, traj.times);
        prop_assert_eq!(back.snapshots, traj.snapshots);
    }

    #[test]
    fn configs_round_trip(
        dt in 1e-6..1e-2f64,
        gamma in 0.0..0.99f64,
        c1 in -2.0..2.0f64,
        seed in 0..=i64::MAX as u64,
        max_mode in 4usize..512,
    ) {
        let overrides = [
            format!("solver.dt={dt:e}"),
            format!("equation.gamma={gamma:e}"),
            format!("equation.c1={c1:e}"),
            format!("run.seed={seed}"),
            format!("solver.max_mode={max_mode}"),
        ];
        let cfg = parse_config_with("", &overrides).unwrap();
        prop_assert_eq!((cfg.solver.dt, cfg.params.gamma, cfg.params.c1, cfg.seed), (dt, gamma, c1, seed));
        let text = serialize_config(&cfg);
        let again = parse_config(&text).unwrap();
        prop_assert_eq!(serialize_config(&again), text);
    }
}
