mod common;

use common::{trig, TWO_PI};
use mclm_core::flows::{
    convergence_study, cross_validate, eulerian_rhs, omega_rhs, spray_at_identity, FlowState, Formulation, Inertia,
    ModelParams, OrderEstimate, Solver, SolverConfig, Termination,
};
use mclm_core::SpectralFunction;
use proptest::prelude::*;

fn params(a: f64) -> ModelParams {
    ModelParams::new(a, Inertia::Hd).unwrap()
}

fn relative_range(xs: &[f64]) -> f64 {
    let (lo, hi) = xs.iter().fold((f64::MAX, f64::MIN), |(l, h), &x| (l.min(x), h.max(x)));
    (hi - lo) / xs[0].abs()
}

fn small_data(n: usize) -> SpectralFunction {
    trig(n, &[(0.0, 0.05), (0.01, 0.02)]).to_chart()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn omega_rhs_is_lambda_of_eulerian_rhs(u in common::chart_function(64, 5, 0.3), a in -3.0..3.0f64) {
        let p = params(a);
        let du = eulerian_rhs(&u, &p, true).unwrap();
        let dw = omega_rhs(&u.lambda_apply(), &p, true).unwrap();
        prop_assert!((&du.lambda_apply() - &dw).sup_norm() < 1e-11 * dw.sup_norm().max(1.0));
    }

    #[test]
    fn spray_differs_from_eulerian_rhs_by_advection(u in common::chart_function(64, 5, 0.3), a in -3.0..3.0f64) {
        let p = params(a);
        let s = spray_at_identity(&u, &p, false).unwrap();
        let adv = u.product(&u.derivative(), false).unwrap();
        let d = &(&s - &adv) - &eulerian_rhs(&u, &p, false).unwrap();
        let d = d.mean_free();
        prop_assert!(d.sup_norm() < 1e-11 * s.sup_norm().max(1.0));
    }

    #[test]
    fn rhs_outputs_respect_chart_and_mean(u in common::chart_function(64, 5, 0.3), a in -3.0..3.0f64) {
        let p = params(a);
        prop_assert!(eulerian_rhs(&u, &p, true).unwrap().value_at_origin().abs() < 1e-13);
        prop_assert!(omega_rhs(&u.lambda_apply(), &p, true).unwrap().mean().abs() < 1e-13);
        prop_assert!(spray_at_identity(&u, &p, true).unwrap().value_at_origin().abs() < 1e-13);
    }
}

#[test]
fn eulerian_rhs_against_dense_quadrature() {
    // oracle: the bracket evaluated by finite-difference-free closed forms on a fine grid
    let n = 64;
    let a = 0.6;
    let u = SpectralFunction::from_fn(n, |x| (TWO_PI * x).sin()).unwrap();
    let got = eulerian_rhs(&u, &params(a), true).unwrap();
    for (j, x) in mclm_core::spectral::grid_points(n).iter().enumerate() {
        let expect = -std::f64::consts::PI * (1.0 + a) / 2.0 * (2.0 * TWO_PI * x).sin();
        assert!((got.samples()[j] - expect).abs() < 1e-12);
    }
}

#[test]
fn metric_case_conserves_energy_in_both_formulations() {
    let n = 128;
    let mut cfg = SolverConfig::new(n, 1e-3, 1.0);
    cfg.output_stride = 50;
    for f in [Formulation::EulerianU, Formulation::Lagrangian] {
        let s = Solver::new(f, params(2.0), cfg.clone()).unwrap();
        let traj = s.integrate(s.initial_state(&small_data(n)).unwrap()).unwrap();
        assert_eq!(traj.termination, Termination::TEnd);
        let e: Vec<f64> = traj.rows.iter().map(|r| r.h_half_sq).collect();
        assert!(relative_range(&e) < 1e-8, "{f:?}: {:e}", relative_range(&e));
        if f.is_lagrangian() {
            let el: Vec<f64> = traj.rows.iter().map(|r| r.energy_lagrangian.unwrap()).collect();
            assert!(relative_range(&el) < 1e-8);
            assert!((el[0] - e[0]).abs() < 1e-12 * e[0]);
        }
    }
}

#[test]
fn hunter_saxton_energy_is_conserved() {
    let n = 128;
    let p = ModelParams::new(2.0, Inertia::D2).unwrap();
    let s = Solver::new(Formulation::EulerianU, p, SolverConfig::new(n, 1e-3, 0.5)).unwrap();
    let s0 = s.initial_state(&small_data(n)).unwrap();
    let e0 = Inertia::D2.energy(&s.velocity(&s0).unwrap());
    let traj = s.integrate(s0).unwrap();
    let e1 = Inertia::D2.energy(&s.velocity(&traj.final_state).unwrap());
    assert!((e1 - e0).abs() < 1e-6 * e0);
}

#[test]
fn mean_and_chart_are_preserved_along_trajectories() {
    let n = 64;
    let u0 = trig(n, &[(0.1, 0.2), (0.0, 0.05)]).to_chart();
    for (f, a) in [(Formulation::EulerianOmega, 0.5), (Formulation::EulerianU, -2.0), (Formulation::Lagrangian, 1.0)] {
        let s = Solver::new(f, params(a), SolverConfig::new(n, 2e-3, 0.4)).unwrap();
        let mut state = s.initial_state(&u0).unwrap();
        for _ in 0..200 {
            state = s.step(&state, 2e-3).unwrap();
            let w = s.vorticity(&state).unwrap();
            assert!(w.mean().abs() < 1e-10);
            match &state {
                FlowState::Eulerian(e) => assert!(e.velocity().value_at_origin().abs() < 1e-9),
                FlowState::Lagrangian(l) => {
                    assert!(l.phi.displacement().value_at_origin().abs() < 1e-9);
                    assert!(l.v.function().value_at_origin().abs() < 1e-9);
                }
            }
        }
    }
}

#[test]
fn single_mode_is_stationary_at_a_minus_one() {
    let n = 128;
    let u0 = SpectralFunction::from_fn(n, |x| 0.1 * (TWO_PI * x).sin()).unwrap();
    let s = Solver::new(Formulation::EulerianU, params(-1.0), SolverConfig::new(n, 1e-3, 1.0)).unwrap();
    let traj = s.integrate(s.initial_state(&u0).unwrap()).unwrap();
    assert!(s.velocity(&traj.final_state).unwrap().max_abs_diff(&u0) < 1e-8);
}

#[test]
fn generalized_model_at_alpha_minus_one_matches_a_equals_one() {
    let n = 128;
    let omega0 = trig(n, &[(0.3, 0.4), (0.0, 0.2)]);
    let cfg = SolverConfig::new(n, 1e-3, 0.3);
    let g = Solver::new(Formulation::GeneralizedOmega { alpha: -1.0 }, params(1.0), cfg.clone()).unwrap();
    let m = Solver::new(Formulation::EulerianOmega, params(1.0), cfg).unwrap();
    let tg = g.integrate(g.initial_state_from_vorticity(&omega0).unwrap()).unwrap();
    let tm = m.integrate(m.initial_state_from_vorticity(&omega0).unwrap()).unwrap();
    let wg = g.vorticity(&tg.final_state).unwrap();
    let wm = m.vorticity(&tm.final_state).unwrap();
    assert!(wg.max_abs_diff(&wm) < 1e-7);
    // the velocities differ by sign: u_x = Hω against ω = Λu
    let ug = g.velocity(&tg.final_state).unwrap();
    let um = m.velocity(&tm.final_state).unwrap();
    assert!((&ug + &um).sup_norm() < 1e-7);
}

#[test]
fn vorticity_form_is_time_reversible() {
    let n = 64;
    let omega0 = trig(n, &[(0.2, 0.5), (0.1, 0.0)]);
    let s = Solver::new(Formulation::EulerianOmega, params(2.0), SolverConfig::new(n, 1e-3, 0.2)).unwrap();
    let fwd = s.integrate(s.initial_state_from_vorticity(&omega0).unwrap()).unwrap();
    let back = -&s.vorticity(&fwd.final_state).unwrap();
    let rev = s.integrate(s.initial_state_from_vorticity(&back).unwrap()).unwrap();
    let w = s.vorticity(&rev.final_state).unwrap();
    assert!((&w + &omega0).sup_norm() < 1e-9);
}

#[test]
fn global_error_is_fourth_order() {
    let n = 128;
    let u0 = trig(n, &[(0.0, 0.2), (0.0, 0.05)]);
    let report =
        convergence_study(Formulation::EulerianU, &params(2.0), &SolverConfig::new(n, 1e-3, 0.5), &u0, &[4e-3, 2e-3, 1e-3])
            .unwrap();
    for w in report.errors.windows(2) {
        let ratio = w[0] / w[1];
        assert!((8.0..=32.0).contains(&ratio), "ratio {ratio}");
    }
    let OrderEstimate::Fitted(order) = report.order else { panic!("{:?}", report.order) };
    assert!((3.7..=4.3).contains(&order));
}

#[test]
fn eulerian_and_lagrangian_agree_on_asymmetric_data() {
    let n = 128;
    let u0 = SpectralFunction::from_fn(n, |x| 0.05 * (TWO_PI * x).sin() + 0.02 * (2.0 * TWO_PI * x).sin()).unwrap();
    let mut cfg = SolverConfig::new(n, 1e-3, 0.5);
    cfg.output_stride = 25;
    let dev = cross_validate(&u0, &params(1.0), &cfg).unwrap();
    assert!(dev < 1e-6, "{dev:e}");
}

#[test]
fn large_data_triggers_the_monitor() {
    let n = 128;
    let u0 = SpectralFunction::from_fn(n, |x| 0.5 * (TWO_PI * x).sin()).unwrap();
    let mut cfg = SolverConfig::new(n, 1e-4, 1.0);
    cfg.amplitude_cap = None;
    let s = Solver::new(Formulation::EulerianOmega, params(2.0), cfg).unwrap();
    let traj = s.integrate(s.initial_state(&u0).unwrap()).unwrap();
    assert!(matches!(traj.termination, Termination::Blowup { .. }));
    let last = traj.rows.last().unwrap();
    assert!(last.sup_ux > 50.0 || last.tail_ratio > 1e-3);
    let ts: Vec<f64> = traj.rows.iter().map(|r| r.t).collect();
    assert!(ts.windows(2).all(|w| w[1] > w[0]));
}
