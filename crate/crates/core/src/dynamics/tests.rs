use std::f64::consts::PI;

use super::*;
use crate::spectral::hs;

fn integrable() -> EquationParams {
    EquationParams::default()
}

fn smooth_data(k: usize, amp: f64) -> SpectralField {
    let f = crate::random::power_law_field(k, 4.0, 0.1, 77);
    f.scale(amp / f.sup_norm(8))
}

fn dist(a: &SpectralField, b: &SpectralField) -> f64 {
    (a - b).norm()
}

#[test]
fn rhs_of_zero_is_zero() {
    assert!(rhs(&SpectralField::zeros(8), &integrable()).is_zero());
}

#[test]
fn rhs_of_cosine_matches_trigonometric_expansion() {
    let (c1, c2) = (0.7, 1.3);
    let p = EquationParams::new(c1, c2, 0.0).unwrap();
    let got = rhs(&SpectralField::cos_mode(8, 1, 1.0), &p);
    let expect = SpectralField::from_fn(8, |x| {
        x.sin() + x.cos().powi(2) * x.sin() + (c1 + c2) * (2.0 * x).sin()
    });
    assert!(dist(&got, &expect) < 1e-13);

    let p = EquationParams::new(0.0, 0.0, 0.5).unwrap();
    let got = rhs(&SpectralField::cos_mode(8, 1, 1.0), &p);
    let expect = SpectralField::from_fn(8, |x| x.sin() + x.cos().powi(2) * x.sin() - 0.5 * x.cos());
    assert!(dist(&got, &expect) < 1e-13);
}

#[test]
fn backward_rhs_flips_only_the_dissipation() {
    let p = EquationParams::new(0.4, 0.9, 0.3).unwrap();
    let u = crate::random::power_law_field(8, 3.0, 0.2, 4);
    let fwd = rhs(&u, &p);
    let bwd = rhs(&u, &p.with_direction(TimeDirection::Backward));
    let flip = dissipation(&u, 2.0 * p.gamma);
    assert!(dist(&(&fwd + &flip), &bwd) < 1e-12);
}

#[test]
fn propagator_examples() {
    let p = EquationParams::new(0.0, 0.0, 0.3).unwrap();
    let phi = crate::random::power_law_field(16, 2.0, 0.5, 8);
    assert_eq!(propagator(&phi, 0.0, &p).unwrap(), phi);
    assert!(propagator(&phi, -0.1, &p).is_err());

    let p0 = EquationParams::new(0.0, 0.0, 0.0).unwrap();
    let u = propagator(&phi, 0.37, &p0).unwrap();
    for (a, b) in u.coeffs().iter().zip(phi.coeffs()) {
        assert!((a.norm() - b.norm()).abs() < 1e-15);
    }
    assert!(propagator(&phi, -0.37, &p0).is_ok());

    let t = 0.8;
    let e1 = SpectralField::from_coeffs(vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)])
        .unwrap();
    let got = propagator(&e1, t, &p).unwrap().coeff(1);
    let expect = Complex64::new(-p.gamma * t, -t).exp();
    assert!((got - expect).norm() < 1e-15);
}

#[test]
fn linear_step_is_the_propagator() {
    let p = EquationParams::new(0.0, 0.0, 0.2).unwrap().linear_only();
    let phi = crate::random::power_law_field(16, 2.0, 0.5, 9);
    for stepper in [Stepper::Ifrk4, Stepper::Etdrk4] {
        let stepped = step(&phi, 1e-3, &p, stepper).unwrap();
        let exact = propagator(&phi, 1e-3, &p).unwrap();
        assert_eq!(stepped, exact);
    }
}

#[test]
fn richardson_ratio_shows_fourth_order() {
    let p = EquationParams::new(0.8, 0.5, 0.0).unwrap();
    let phi = smooth_data(16, 1.0);
    // ETDRK4 reaches its asymptotic order only once k³·dt is moderate
    for (stepper, dt) in [(Stepper::Ifrk4, 4e-3), (Stepper::Etdrk4, 1e-3)] {
        let defect = |dt: f64| {
            let one = step(&phi, dt, &p, stepper).unwrap();
            let half = step(&phi, dt / 2.0, &p, stepper).unwrap();
            let two = step(&half, dt / 2.0, &p, stepper).unwrap();
            dist(&one, &two)
        };
        let ratio = defect(dt) / defect(dt / 2.0);
        assert!(ratio >= 16.0, "{stepper:?}: ratio {ratio}");
    }
}

#[test]
fn l2_drift_per_step_is_tiny_when_coefficients_match() {
    let phi = smooth_data(64, 0.5);
    let n0 = phi.norm();
    for stepper in [Stepper::Ifrk4, Stepper::Etdrk4] {
        let mut u = phi.clone();
        for _ in 0..20 {
            u = step(&u, 1e-4, &integrable(), stepper).unwrap();
            assert!(((u.norm() - n0) / n0).abs() <= 1e-12 + 1e-13);
        }
    }
}

#[test]
fn etdrk4_stays_stable_where_ifrk4_resonates() {
    let phi = smooth_data(256, 0.1);
    let cfg = SolverConfig::new(256, 1e-4, 0.05).unwrap();
    let etd = solve(&phi, &integrable(), &cfg).unwrap();
    assert!(etd.completed());
    assert!(((etd.final_state().norm() - phi.norm()) / phi.norm()).abs() < 1e-10);
    let lawson = solve(&phi, &integrable(), &cfg.with_stepper(Stepper::Ifrk4)).unwrap();
    assert!(!lawson.completed());
}

#[test]
fn dissipation_does_not_increase_l2() {
    let p = EquationParams::new(0.5, 0.5, 0.3).unwrap();
    let cfg = SolverConfig::new(32, 1e-3, 0.2).unwrap().with_stride(10);
    let traj = solve(&smooth_data(32, 0.8), &p, &cfg).unwrap();
    assert!(traj.completed());
    for w in traj.snapshots.windows(2) {
        assert!(w[1].norm() <= w[0].norm() * (1.0 + 1e-12));
    }
}

#[test]
fn temporal_convergence_slope_is_four() {
    let p = EquationParams::new(0.8, 0.5, 0.0).unwrap();
    let phi = smooth_data(16, 1.0);
    let horizon = 0.1;
    let end = |dt: f64| {
        let cfg = SolverConfig::new(16, dt, horizon)
            .unwrap()
            .with_stride(1_000_000);
        solve(&phi, &p, &cfg).unwrap().final_state().clone()
    };
    let reference = end(1.25e-4 / 8.0);
    let dts = [1e-3, 5e-4, 2.5e-4, 1.25e-4];
    let errs: Vec<f64> = dts.iter().map(|&dt| dist(&end(dt), &reference)).collect();
    let slope = crate::stats::loglog_slope(&dts, &errs);
    assert!((slope - 4.0).abs() <= 0.3, "slope {slope}, errors {errs:?}");
}

#[test]
fn ifrk4_agrees_with_etdrk4() {
    let p = EquationParams::new(0.8, 0.5, 0.1).unwrap();
    let phi = smooth_data(32, 1.0);
    let cfg = SolverConfig::new(32, 2.5e-4, 0.05).unwrap();
    let a = solve(&phi, &p, &cfg).unwrap();
    let b = solve(&phi, &p, &cfg.with_stepper(Stepper::Ifrk4)).unwrap();
    assert!(dist(a.final_state(), b.final_state()) < 1e-9 * phi.norm());
}

#[test]
fn zero_data_stays_zero() {
    let cfg = SolverConfig::new(16, 1e-3, 0.1).unwrap().with_stride(10);
    let traj = solve(&SpectralField::zeros(16), &integrable(), &cfg).unwrap();
    assert!(traj.completed());
    assert_eq!(traj.len(), 11);
    assert!(traj.snapshots.iter().all(|u| u.is_zero()));
}

#[test]
fn tiny_data_follows_the_linear_flow() {
    let f = crate::random::power_law_field(32, 3.0, 0.0, 12);
    let phi = f.scale(1e-6 / hs(&f, 2.0));
    let cfg = SolverConfig::new(32, 1e-3, 1.0).unwrap().with_stride(100);
    let traj = solve(&phi, &integrable(), &cfg).unwrap();
    for (t, u) in traj.times.iter().zip(&traj.snapshots) {
        let lin = propagator(&phi, *t, &integrable()).unwrap();
        let ratio = hs(u, 2.0) / hs(&lin, 2.0);
        assert!((0.5..=2.0).contains(&ratio));
        assert!(dist(u, &lin) <= 1e-3 * lin.norm());
    }
}

#[test]
fn semigroup_property() {
    let p = EquationParams::new(0.8, 0.5, 0.05).unwrap();
    let phi = smooth_data(32, 1.0);
    let cfg = SolverConfig::new(32, 5e-4, 0.2).unwrap().with_stride(200);
    let full = solve(&phi, &p, &cfg).unwrap();
    assert_eq!(full.times, vec![0.0, 0.1, 0.2]);
    let half_cfg = SolverConfig {
        horizon: 0.1,
        ..cfg
    };
    let restarted = solve(&full.snapshots[1], &p, &half_cfg).unwrap();
    assert!(dist(restarted.final_state(), full.final_state()) < 1e-12 * phi.norm());
}

#[test]
fn backward_run_undoes_forward_run() {
    let p = integrable();
    let phi = smooth_data(32, 1.0);
    let cfg = SolverConfig::new(32, 6.25e-5, 0.1).unwrap();
    let fwd = solve(&phi, &p, &cfg).unwrap();
    let back = solve(
        fwd.final_state(),
        &p.with_direction(TimeDirection::Backward),
        &cfg,
    )
    .unwrap();
    let gap = dist(back.final_state(), &phi) / phi.norm();
    assert!(gap < 1e-6, "gap {gap}");
}

#[test]
fn blowup_is_reported_as_status() {
    let phi = smooth_data(16, 1.0);
    let threshold = 0.5 * hs(&phi, 2.0);
    let cfg = SolverConfig {
        blowup_threshold: threshold,
        ..SolverConfig::new(16, 1e-3, 1.0).unwrap()
    };
    let p = EquationParams::new(0.8, 0.5, 0.0).unwrap();
    let traj = solve(&phi, &p, &cfg).unwrap();
    match traj.status {
        TrajectoryStatus::BlowupDetected { time } => assert_eq!(time, 1e-3),
        TrajectoryStatus::Completed => panic!("threshold never crossed"),
    }
}

#[test]
fn picard_agrees_with_time_stepping() {
    let p = EquationParams::new(3f64.sqrt() / 2.0, 3f64.sqrt() / 2.0, 0.5).unwrap();
    let phi = smooth_data(32, 1.0);
    let cfg = SolverConfig::new(32, 1e-4, 0.01).unwrap();
    let stepped = solve(&phi, &p, &cfg).unwrap();
    let picard = picard_solve(&phi, &p, &cfg).unwrap();
    assert!(picard.converged);
    let rel =
        dist(stepped.final_state(), picard.trajectory.final_state()) / stepped.final_state().norm();
    assert!(rel < 1e-4, "relative gap {rel}");
}

#[test]
fn step_plan_absorbs_remainder() {
    let cfg = SolverConfig::new(8, 0.3, 1.0).unwrap();
    let (n, last) = cfg.step_plan();
    assert_eq!(n, 4);
    assert!((last - 0.1).abs() < 1e-12);
    let cfg = SolverConfig::new(8, 1e-4, 0.5).unwrap();
    assert_eq!(cfg.step_plan(), (5000, 1e-4));
    assert!(SolverConfig::new(3, 1e-3, 1.0).is_err());
    assert!(SolverConfig::new(8, 2.0, 1.0).is_err());
}

#[test]
fn mean_is_conserved_exactly() {
    let phi = smooth_data(16, 1.0);
    let cfg = SolverConfig::new(16, 1e-3, 0.1).unwrap();
    let p = EquationParams::new(0.3, 1.1, 0.2).unwrap();
    let u = solve(&phi, &p, &cfg).unwrap();
    assert!((u.final_state().mean() - phi.mean()).abs() < 1e-14 * (2.0 * PI));
}
