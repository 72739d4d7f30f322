use std::path::{Path, PathBuf};

use wecs_core::drivetrain::two_mass_step;
use wecs_core::engine::{integrate, load_scenario, Mode, Scenario, Simulation, TimeSeriesOutput};
use wecs_core::geometry::wrap_angle;
use wecs_core::{Error, InertiaState};

fn scenario_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios")
}

fn v27(duration: f64) -> Scenario {
    let mut s = Scenario::from_file(&scenario_dir().join("v27_like.json")).unwrap();
    s.integrator.duration = duration;
    s
}

fn inertia_only(theta: f64, friction: f64, torque: f64, dt: f64, duration: f64) -> Scenario {
    load_scenario(&format!(
        r#"{{
            "name": "inertia",
            "integrator": {{"dt_s": {dt}, "duration_s": {duration}, "output_interval_s": {duration}}},
            "drivetrain": {{
                "theta_rotor_kgm2": {theta},
                "theta_generator_kgm2": 1.0,
                "friction_rotor_nms": {friction},
                "stiffness_nm_per_rad": 0.0,
                "external_torque_rotor_nm": {torque}
            }},
            "initial": {{"rotor_speed_rad_s": 0.5}},
            "outputs": ["omega_rotor_rad_s", "delta_rotor_rad"]
        }}"#
    ))
    .unwrap()
}

fn two_mass(dt: f64) -> Scenario {
    load_scenario(&format!(
        r#"{{
            "name": "two_mass",
            "integrator": {{"dt_s": {dt}, "duration_s": 2.0}},
            "drivetrain": {{
                "theta_rotor_kgm2": 2.0,
                "theta_generator_kgm2": 0.5,
                "friction_rotor_nms": 0.3,
                "friction_generator_nms": 0.1,
                "stiffness_nm_per_rad": 150.0,
                "damping_nms_per_rad": 0.4,
                "gear_ratio": 2.0,
                "external_torque_rotor_nm": 5.0,
                "external_torque_generator_nm": -1.0
            }},
            "initial": {{"rotor_speed_rad_s": 1.0}}
        }}"#
    ))
    .unwrap()
}

fn col(out: &TimeSeriesOutput, name: &str) -> Vec<f64> {
    out.column(name)
        .unwrap_or_else(|| panic!("missing column {name}"))
}

#[test]
fn golden_minimal_scenario_loads_with_defaults() {
    let s = Scenario::from_file(&scenario_dir().join("minimal.json")).unwrap();
    assert_eq!(s.name, "minimal");
    assert_eq!(s.mode, Mode::Transient);
    assert!(s.wind.is_none() && s.machine.is_none() && s.grid.is_none());
    assert_eq!(s.drivetrain.gearbox.ratio(), 1.0);
    assert_eq!(s.outputs, vec!["omega_rotor_rad_s".to_string()]);
    let r = integrate(&s).unwrap();
    // constant torque on a frictionless inertia: linear speed ramp
    let w = col(&r.output, "omega_rotor_rad_s");
    assert!((w.last().unwrap() - 50.0 / 100.0 * 1.0).abs() < 1e-12);
}

#[test]
fn constant_torque_matches_exponential_closed_form() {
    let (theta, kf, torque) = (100.0, 10.0, 50.0);
    let t_end = 5.0 * theta / kf;
    let r = integrate(&inertia_only(theta, kf, torque, 0.01, t_end)).unwrap();
    let w = *col(&r.output, "omega_rotor_rad_s").last().unwrap();
    let w_inf = torque / kf;
    let exact = w_inf + (0.5 - w_inf) * (-kf * t_end / theta).exp();
    assert!(((w - exact) / exact).abs() <= 1e-6, "{w} vs {exact}");
}

#[test]
fn rk4_converges_with_fourth_order() {
    let finals: Vec<Vec<f64>> = [0.02, 0.01, 0.005]
        .iter()
        .map(|&dt| integrate(&two_mass(dt)).unwrap().final_state)
        .collect();
    let diff = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    let order = (diff(&finals[0], &finals[1]) / diff(&finals[1], &finals[2])).log2();
    assert!((order - 4.0).abs() <= 0.2, "order {order}");
}

#[test]
fn decoupled_derivative_is_the_two_mass_step() {
    let s = two_mass(0.01);
    let sim = Simulation::new(&s).unwrap();
    let x = [0.3, 1.2, -0.4, 2.1];
    let mut dx = [0.0; 4];
    sim.derivative(0.7, &x, &mut dx).unwrap();
    let d = &s.drivetrain;
    let expect = two_mass_step(
        [
            InertiaState {
                delta: x[0],
                omega: x[1],
            },
            InertiaState {
                delta: x[2],
                omega: x[3],
            },
        ],
        [&d.rotor, &d.generator],
        &d.gearbox,
        d.external_torque,
    );
    assert_eq!(
        dx,
        [expect.first.0, expect.first.1, expect.second.0, expect.second.1]
    );
}

#[test]
fn finite_difference_jacobian_matches_linear_drivetrain() {
    let s = two_mass(0.01);
    let sim = Simulation::new(&s).unwrap();
    let d = &s.drivetrain;
    let (t1, t2) = (d.rotor.theta(), d.generator.theta());
    let (k, c, n) = (d.gearbox.stiffness(), d.gearbox.damping(), d.gearbox.ratio());
    let (f1, f2) = (d.rotor.friction(), d.generator.friction());
    // torsion eps = delta1 - delta2 / n
    let analytic = [
        [0.0, 1.0, 0.0, 0.0],
        [-k / t1, -(f1 + c) / t1, k / (n * t1), c / (n * t1)],
        [0.0, 0.0, 0.0, 1.0],
        [
            k / (n * t2),
            c / (n * t2),
            -k / (n * n * t2),
            -(f2 + c / (n * n)) / t2,
        ],
    ];
    let x0 = [0.1, 0.9, 0.05, 1.7];
    let h = 1e-5;
    for j in 0..4 {
        let (mut xp, mut xm) = (x0, x0);
        xp[j] += h;
        xm[j] -= h;
        let (mut fp, mut fm) = ([0.0; 4], [0.0; 4]);
        sim.derivative(0.0, &xp, &mut fp).unwrap();
        sim.derivative(0.0, &xm, &mut fm).unwrap();
        for i in 0..4 {
            let fd = (fp[i] - fm[i]) / (2.0 * h);
            assert!(
                (fd - analytic[i][j]).abs() <= 1e-6 * (1.0 + analytic[i][j].abs()),
                "J[{i}][{j}] {fd}"
            );
        }
    }
}

#[test]
fn zero_state_zero_wind_zero_source_is_an_equilibrium() {
    let mut s = v27(0.01);
    s.drivetrain.external_torque = [0.0, 0.0];
    s.grid.as_mut().unwrap().source = [num_complex::Complex::new(0.0, 0.0); 3];
    let w = s.wind.as_mut().unwrap();
    w.nacelle_wind = 0.0;
    let sim = Simulation::new(&s).unwrap();
    let x = vec![0.0; sim.layout().len()];
    let mut dx = vec![1.0; x.len()];
    sim.derivative(0.0, &x, &mut dx).unwrap();
    assert!(dx.iter().all(|&v| v == 0.0), "{dx:?}");
}

#[test]
fn state_layout_names_components() {
    let sim = Simulation::new(&v27(0.01)).unwrap();
    let layout = sim.layout();
    assert_eq!(layout.len(), 14);
    assert_eq!(layout.index_of("machine.psi_r_beta"), Some(7));
    assert_eq!(layout.component(8), "grid");
    assert_eq!(layout.count("grid"), 6);

    let mut rms = v27(0.01);
    rms.mode = Mode::Rms;
    let sim = Simulation::new(&rms).unwrap();
    assert_eq!(sim.layout().len(), 6);
    assert!(sim.layout().names().all(|n| !n.starts_with("grid")));
}

#[test]
fn azimuth_is_the_wrapped_rotor_angle() {
    let mut s = v27(2.0);
    s.integrator.dt = 2e-4;
    s.outputs = vec!["azimuth_rad".into(), "delta_rotor_rad".into()];
    let r = integrate(&s).unwrap();
    let az = col(&r.output, "azimuth_rad");
    let delta = col(&r.output, "delta_rotor_rad");
    assert!(
        delta.last().unwrap() > &std::f64::consts::PI,
        "rotor must turn past one half revolution"
    );
    for (a, d) in az.iter().zip(&delta) {
        assert!((a - wrap_angle(*d)).abs() <= 1e-12);
    }
}

#[test]
fn repeated_runs_are_bit_identical() {
    let s = v27(1.0);
    let a = integrate(&s).unwrap();
    let b = integrate(&s).unwrap();
    assert_eq!(a.output.to_csv(), b.output.to_csv());
    assert_eq!(a.final_state, b.final_state);
    let sim = Simulation::new(&s).unwrap();
    assert_eq!(sim.run().unwrap().final_state, sim.run().unwrap().final_state);
}

#[test]
fn different_seed_changes_the_wind() {
    let mut s = v27(0.5);
    let a = integrate(&s).unwrap();
    s.seed += 1;
    s.wind.as_mut().unwrap().seed += 1;
    let b = integrate(&s).unwrap();
    assert_ne!(col(&a.output, "wind_m_s"), col(&b.output, "wind_m_s"));
}

#[test]
fn rms_and_transient_drivetrains_agree() {
    let t = v27(6.0);
    let mut r = t.clone();
    r.mode = Mode::Rms;
    let a = integrate(&t).unwrap();
    let b = integrate(&r).unwrap();
    let wa = col(&a.output, "omega_generator_rad_s");
    let wb = col(&b.output, "omega_generator_rad_s");
    let ta = col(&a.output, "torque_shaft_nm");
    let tb = col(&b.output, "torque_shaft_nm");
    let times = col(&a.output, "t");
    let scale = tb.iter().map(|v| v.abs()).fold(0.0, f64::max);
    for k in 0..times.len() {
        if times[k] < 1.0 {
            continue;
        }
        assert!(
            (wa[k] - wb[k]).abs() <= 0.02 * wb[k].abs(),
            "speed at t={}",
            times[k]
        );
        assert!(
            (ta[k] - tb[k]).abs() <= 0.02 * scale,
            "shaft torque at t={}",
            times[k]
        );
    }
}

#[test]
fn energy_audit_closes_on_the_full_chain() {
    let r = integrate(&v27(3.0)).unwrap();
    assert!(r.audit.relative_residual() < 1e-6, "{:?}", r.audit);
    let m = r.machine_audit.unwrap();
    assert!(m.relative_residual() < 1e-6, "{m:?}");
}

#[test]
fn theta_zero_names_the_key() {
    let err = load_scenario(r#"{"drivetrain": {"theta_rotor_kgm2": 0.0, "theta_generator_kgm2": 1.0}}"#)
        .unwrap_err();
    assert!(err.to_string().contains("drivetrain.theta"), "{err}");
}

#[test]
fn unstable_step_reports_numerical_abort() {
    let mut s = two_mass(0.01);
    s.integrator.dt = 5.0;
    s.integrator.duration = 2000.0;
    match integrate(&s) {
        Err(Error::NumericalAbort { component, step, .. }) => {
            assert!(component.starts_with("drivetrain"), "{component}");
            assert!(step > 0);
        }
        other => panic!("expected abort, got {other:?}"),
    }
}

#[test]
fn output_rows_follow_the_interval() {
    let mut s = two_mass(0.01);
    s.integrator.output_interval = 0.1;
    let r = integrate(&s).unwrap();
    assert_eq!(r.output.rows.len(), 21);
    let t = col(&r.output, "t");
    assert!((t[20] - 2.0).abs() < 1e-12);
    let text = r.output.to_csv();
    assert!(!text.contains('\r'));
    assert_eq!(TimeSeriesOutput::parse_csv(&text).unwrap().to_csv(), text);
}
