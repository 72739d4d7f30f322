//! State layout and the assembled right-hand side.
//!
//! Evaluation order inside one derivative call: wind sample (zero-order
//! hold), aerodynamic torque, gearbox port torques, machine, grid, and
//! finally the two inertias.

use num_complex::Complex;

use super::scenario::{Mode, Scenario};
use crate::aero::aerodynamic_torque;
use crate::drivetrain::{
    gearbox_torques, shaft_dissipation, shaft_energy, two_mass_step, InertiaState, ShaftPortState,
};
use crate::geometry::{turbine_to_disc, wind_to_turbine, FrameAngles, Vec3};
use crate::grid::{
    dot3, from_sequence, instantaneous, rms_solve_sequences, sequence_network, to_sequence, LineSegmentState,
    SegmentModel,
};
use crate::machine::{
    abc_to_space_vector, currents_from_flux, electromagnetic_torque, equivalent_impedance,
    machine_derivative, machine_power, magnetic_energy, quasi_stationary_rotor, space_vector_to_abc,
    steady_state, transient_source, MachineInputs, MachineState,
};
use crate::windfield::generate;
use crate::{Error, Result};

type C64 = Complex<f64>;

/// Ordered state vector description: `(component, name)` per entry.
#[derive(Debug, Clone, PartialEq)]
pub struct StateLayout {
    entries: Vec<(&'static str, &'static str)>,
}

impl StateLayout {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Index of `component.name`.
    pub fn index_of(&self, qualified: &str) -> Option<usize> {
        self.entries
            .iter()
            .position(|(c, n)| qualified.strip_prefix(c).and_then(|r| r.strip_prefix('.')) == Some(n))
    }

    pub fn component(&self, index: usize) -> &'static str {
        self.entries[index].0
    }

    pub fn names(&self) -> impl Iterator<Item = String> + '_ {
        self.entries.iter().map(|(c, n)| format!("{c}.{n}"))
    }

    pub fn count(&self, component: &str) -> usize {
        self.entries.iter().filter(|(c, _)| *c == component).count()
    }
}

/// Signals computed alongside every derivative evaluation. The names double
/// as output column names.
pub const SIGNALS: [&str; 24] = [
    "wind_m_s",
    "azimuth_rad",
    "delta_rotor_rad",
    "omega_rotor_rad_s",
    "delta_generator_rad",
    "omega_generator_rad_s",
    "torsion_rad",
    "torque_shaft_nm",
    "torque_aero_nm",
    "power_aero_w",
    "tip_speed_ratio",
    "cp",
    "torque_em_nm",
    "slip",
    "stator_current_a",
    "power_stator_w",
    "node_voltage_v",
    "u_a_v",
    "u_b_v",
    "u_c_v",
    "i_line_a_a",
    "i_line_b_a",
    "i_line_c_a",
    "energy_residual_j",
];

pub(crate) const SIG_RESIDUAL: usize = 23;

/// Power flows used by the energy audits, in watts.
pub(crate) mod flow {
    pub const AERO: usize = 0;
    pub const EXTERNAL: usize = 1;
    pub const SOURCE: usize = 2;
    pub const LOSS: usize = 3;
    pub const MACHINE_ELECTRICAL: usize = 4;
    pub const MACHINE_COPPER: usize = 5;
    pub const MACHINE_MECHANICAL: usize = 6;
    pub const COUNT: usize = 7;
}

pub(crate) struct Eval {
    pub flows: [f64; flow::COUNT],
    pub signals: [f64; SIGNALS.len()],
    /// Total stored energy (kinetic, spring, magnetic, line).
    pub stored: f64,
    pub magnetic: f64,
}

/// Columns this scenario can produce.
pub fn available_columns(s: &Scenario) -> Vec<&'static str> {
    SIGNALS
        .iter()
        .copied()
        .filter(|c| match *c {
            "wind_m_s" | "torque_aero_nm" | "power_aero_w" | "tip_speed_ratio" | "cp" => s.turbine.is_some(),
            "torque_em_nm" | "slip" | "stator_current_a" | "power_stator_w" | "node_voltage_v" => {
                s.machine.is_some()
            }
            "u_a_v" | "u_b_v" | "u_c_v" | "i_line_a_a" | "i_line_b_a" | "i_line_c_a" => {
                s.machine.is_some() && s.mode == Mode::Transient
            }
            _ => true,
        })
        .collect()
}

/// Columns written when the scenario has no `outputs` list.
pub fn default_columns(s: &Scenario) -> Vec<String> {
    available_columns(s).into_iter().map(String::from).collect()
}

struct EffectiveWind {
    dt: f64,
    speed: Vec<f64>,
}

impl EffectiveWind {
    fn at(&self, t: f64) -> Result<f64> {
        let end = self.dt * self.speed.len() as f64;
        if !(t >= 0.0) || t > end * (1.0 + 1e-12) {
            return Err(Error::domain(format!(
                "time {t} s is outside the wind series [0, {end}] s"
            )));
        }
        // the small offset keeps step-start times on a sample boundary from
        // rounding into the previous sample
        let k = (t / self.dt + 1e-9).floor() as usize;
        Ok(self.speed[k.min(self.speed.len() - 1)])
    }
}

#[derive(Debug, Clone, Copy)]
struct Offsets {
    machine: Option<usize>,
    grid: Option<usize>,
    load: Option<usize>,
}

/// A scenario prepared for integration: wind synthesized, matrices cached,
/// state layout fixed.
pub struct Simulation {
    pub(crate) scenario: Scenario,
    layout: StateLayout,
    offsets: Offsets,
    wind: Option<EffectiveWind>,
    segment: Option<SegmentModel<f64>>,
    load_inductance: Option<f64>,
}

impl Simulation {
    pub fn new(scenario: &Scenario) -> Result<Simulation> {
        let mut entries = vec![
            ("drivetrain", "delta_rotor"),
            ("drivetrain", "omega_rotor"),
            ("drivetrain", "delta_generator"),
            ("drivetrain", "omega_generator"),
        ];
        let mut offsets = Offsets {
            machine: None,
            grid: None,
            load: None,
        };
        let mut segment = None;
        let mut load_inductance = None;
        if let (Some(_), Some(grid)) = (&scenario.machine, &scenario.grid) {
            offsets.machine = Some(entries.len());
            match scenario.mode {
                Mode::Transient => {
                    entries.extend([
                        ("machine", "psi_s_alpha"),
                        ("machine", "psi_s_beta"),
                        ("machine", "psi_r_alpha"),
                        ("machine", "psi_r_beta"),
                    ]);
                    offsets.grid = Some(entries.len());
                    entries.extend([
                        ("grid", "i_a"),
                        ("grid", "i_b"),
                        ("grid", "i_c"),
                        ("grid", "u_a"),
                        ("grid", "u_b"),
                        ("grid", "u_c"),
                    ]);
                    let w = grid.omega();
                    let b = grid.load.im;
                    let shunt_c = if b > 0.0 { b / w } else { 0.0 };
                    segment = Some(SegmentModel::with_node_shunt(grid.line, grid.load.re, shunt_c)?);
                    if b < 0.0 {
                        load_inductance = Some(-1.0 / (w * b));
                        offsets.load = Some(entries.len());
                        entries.extend([("load", "i_a"), ("load", "i_b"), ("load", "i_c")]);
                    }
                }
                Mode::Rms => {
                    entries.extend([("machine", "psi_r_d"), ("machine", "psi_r_q")]);
                }
            }
        }

        let wind = match (&scenario.wind, &scenario.turbine) {
            (Some(spec), Some(turbine)) => {
                let series = generate(spec)?;
                // points whose disc-frame position lies inside the swept
                // circle; all points when none does
                let radius = turbine.rotor.radius();
                let inside: Vec<usize> = spec
                    .points
                    .iter()
                    .enumerate()
                    .filter(|(_, p)| {
                        let (_, pos_t) = wind_to_turbine(Vec3::zero(), p.position, turbine.position_xy);
                        let d = turbine_to_disc(pos_t, spec.nacelle_height);
                        (d.x * d.x + d.z * d.z).sqrt() <= radius
                    })
                    .map(|(k, _)| k)
                    .collect();
                let used: Vec<usize> = if inside.is_empty() {
                    (0..spec.points.len()).collect()
                } else {
                    inside
                };
                let speed = (0..series.n_steps())
                    .map(|k| used.iter().map(|&p| series.samples[p][k]).sum::<f64>() / used.len() as f64)
                    .collect();
                Some(EffectiveWind { dt: series.dt, speed })
            }
            _ => None,
        };

        Ok(Simulation {
            scenario: scenario.clone(),
            layout: StateLayout { entries },
            offsets,
            wind,
            segment,
            load_inductance,
        })
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn layout(&self) -> &StateLayout {
        &self.layout
    }

    /// Rotor-effective wind series (zero-order hold samples) and its step.
    pub fn effective_wind(&self) -> Option<(f64, &[f64])> {
        self.wind.as_ref().map(|w| (w.dt, w.speed.as_slice()))
    }

    /// Initial state: the drivetrain spins at the configured speed with the
    /// shaft pre-twisted against the rotor-side torques, and the electrical
    /// states sit in the sinusoidal steady state of the initial slip.
    pub fn initial_state(&self) -> Result<Vec<f64>> {
        let s = &self.scenario;
        let mut x = vec![0.0; self.layout.len()];
        let gear = &s.drivetrain.gearbox;
        let n = gear.ratio();
        let (omega1, omega2) = match (&s.machine, &s.grid) {
            (Some(m), Some(g)) => {
                let slip = s.initial.slip.unwrap_or(0.0);
                let w2 = (1.0 - slip) * g.omega() / m.pole_pairs() as f64;
                (w2 / n, w2)
            }
            _ => {
                let w1 = s.initial.rotor_speed.unwrap_or(0.0);
                (w1, n * w1)
            }
        };
        let aero = match (&self.wind, &s.turbine) {
            (Some(w), Some(t)) => aerodynamic_torque(w.at(0.0)?.max(0.0), omega1.max(0.0), &t.rotor)?,
            _ => 0.0,
        };
        let rotor_side = aero + s.drivetrain.external_torque[0] - s.drivetrain.rotor.friction() * omega1;
        x[0] = if gear.stiffness() > 0.0 {
            rotor_side / gear.stiffness()
        } else {
            0.0
        };
        x[1] = omega1;
        x[3] = omega2;

        if let (Some(m), Some(g), Some(mo)) = (&s.machine, &s.grid, self.offsets.machine) {
            let slip = s.initial.slip.unwrap_or(0.0);
            let ws = g.omega();
            let y_pos = C64::new(1.0, 0.0) / equivalent_impedance(slip, ws, m);
            let y_neg = C64::new(1.0, 0.0) / equivalent_impedance(2.0 - slip, ws, m);
            let zero = C64::new(0.0, 0.0);
            let (vr, il) = rms_solve_sequences(
                &g.source,
                &g.line,
                g.frequency,
                [g.load, g.load + y_pos, g.load + y_neg],
                [zero; 3],
            )?;
            let ss = steady_state(slip, vr[1], ws, m)?;
            match s.mode {
                Mode::Transient => {
                    x[mo] = ss.psi_s.re;
                    x[mo + 1] = ss.psi_s.im;
                    x[mo + 2] = ss.psi_r.re;
                    x[mo + 3] = ss.psi_r.im;
                    let go = self.offsets.grid.expect("transient grid offset");
                    let v_node = from_sequence(&vr);
                    let i_line = from_sequence(&il);
                    let u = instantaneous(&v_node, ws, 0.0);
                    let i = instantaneous(&i_line, ws, 0.0);
                    for k in 0..3 {
                        // line current state runs from the node towards the source
                        x[go + k] = -i[k];
                        x[go + 3 + k] = u[k];
                    }
                    if let Some(lo) = self.offsets.load {
                        let y_l = C64::new(0.0, g.load.im);
                        let il = instantaneous(&v_node.map(|v| v * y_l), ws, 0.0);
                        x[lo..lo + 3].copy_from_slice(&il);
                    }
                }
                Mode::Rms => {
                    x[mo] = ss.psi_r.re;
                    x[mo + 1] = ss.psi_r.im;
                }
            }
        }
        Ok(x)
    }

    /// Right-hand side `dx/dt` at time `t` with the wind held at its sample for `t`.
    pub fn derivative(&self, t: f64, x: &[f64], dx: &mut [f64]) -> Result<()> {
        self.eval(t, t, x, dx).map(|_| ())
    }

    /// Evaluates the right-hand side with the environment sampled at `t_env`.
    pub(crate) fn eval(&self, t: f64, t_env: f64, x: &[f64], dx: &mut [f64]) -> Result<Eval> {
        let s = &self.scenario;
        if x.len() != self.layout.len() || dx.len() != self.layout.len() {
            return Err(Error::domain(format!(
                "state has {} entries, layout expects {}",
                x.len(),
                self.layout.len()
            )));
        }
        let mut flows = [0.0; flow::COUNT];
        let mut sig = [0.0; SIGNALS.len()];
        let dt = &s.drivetrain;
        let states = [
            InertiaState {
                delta: x[0],
                omega: x[1],
            },
            InertiaState {
                delta: x[2],
                omega: x[3],
            },
        ];
        let ports = ShaftPortState::from_inertias(states[0], states[1]);

        // wind and aerodynamics
        let mut t_aero = 0.0;
        if let (Some(w), Some(turbine)) = (&self.wind, &s.turbine) {
            // reversed flow is treated as calm, reverse rotation as standstill
            let v = w.at(t_env)?.max(0.0);
            let omega = x[1].max(0.0);
            t_aero = aerodynamic_torque(v, omega, &turbine.rotor)?;
            let lambda = if v > 0.0 {
                omega * turbine.rotor.radius() / v
            } else {
                0.0
            };
            sig[0] = v;
            sig[8] = t_aero;
            sig[9] = t_aero * x[1];
            sig[10] = lambda;
            sig[11] = if v > 0.0 { turbine.rotor.cp(lambda) } else { 0.0 };
        }

        // gearbox
        let (m1, _) = gearbox_torques(&ports, &dt.gearbox);

        let mut stored = two_mass_kinetic(s, x) + shaft_energy(&ports, &dt.gearbox);
        let mut magnetic = 0.0;
        let mut t_em = 0.0;

        // machine and grid
        if let (Some(mp), Some(g), Some(mo)) = (&s.machine, &s.grid, self.offsets.machine) {
            let ws = g.omega();
            let omega_el = mp.pole_pairs() as f64 * x[3];
            sig[13] = (ws - omega_el) / ws;
            match s.mode {
                Mode::Transient => {
                    let go = self.offsets.grid.expect("transient grid offset");
                    let seg = self.segment.as_ref().expect("transient segment");
                    let state = MachineState {
                        psi_s: C64::new(x[mo], x[mo + 1]),
                        psi_r: C64::new(x[mo + 2], x[mo + 3]),
                    };
                    let line = LineSegmentState {
                        i_abc: [x[go], x[go + 1], x[go + 2]],
                        u_abc: [x[go + 3], x[go + 4], x[go + 5]],
                    };
                    let inputs = MachineInputs {
                        u_s: abc_to_space_vector(line.u_abc),
                        u_r: C64::new(0.0, 0.0),
                        omega_el,
                    };
                    let d = machine_derivative(&state, &inputs, mp);
                    dx[mo] = d.psi_s.re;
                    dx[mo + 1] = d.psi_s.im;
                    dx[mo + 2] = d.psi_r.re;
                    dx[mo + 3] = d.psi_r.im;
                    let c = currents_from_flux(&state, mp);
                    t_em = electromagnetic_torque(&state, mp);
                    let pw = machine_power(&state, &inputs, mp);
                    flows[flow::MACHINE_ELECTRICAL] = pw.electrical_in;
                    flows[flow::MACHINE_COPPER] = pw.copper_loss;
                    flows[flow::MACHINE_MECHANICAL] = pw.mechanical_out;
                    magnetic = magnetic_energy(&state, mp);

                    let i_machine = space_vector_to_abc(c.i_s);
                    let mut inject = [0.0; 3];
                    let mut load_energy = 0.0;
                    for k in 0..3 {
                        inject[k] = -i_machine[k];
                    }
                    if let (Some(lo), Some(l)) = (self.offsets.load, self.load_inductance) {
                        for k in 0..3 {
                            inject[k] -= x[lo + k];
                            dx[lo + k] = line.u_abc[k] / l;
                            load_energy += 0.5 * l * x[lo + k] * x[lo + k];
                        }
                    }
                    let u_far = instantaneous(&g.source, ws, t);
                    let (di, du) = seg.derivative(&line, u_far, inject);
                    dx[go..go + 3].copy_from_slice(&di);
                    dx[go + 3..go + 6].copy_from_slice(&du);

                    flows[flow::SOURCE] = -dot3(u_far, line.i_abc);
                    flows[flow::LOSS] += pw.copper_loss + seg.losses(&line);
                    stored += magnetic + seg.stored_energy(&line) + load_energy;

                    sig[14] = c.i_s.norm();
                    sig[15] = pw.electrical_in;
                    sig[16] = inputs.u_s.norm();
                    sig[17..20].copy_from_slice(&line.u_abc);
                    for k in 0..3 {
                        sig[20 + k] = -line.i_abc[k];
                    }
                }
                Mode::Rms => {
                    let psi_r = C64::new(x[mo], x[mo + 1]);
                    let slip = sig[13];
                    let src = transient_source(psi_r, ws, mp);
                    let one = C64::new(1.0, 0.0);
                    let y_t = one / src.z;
                    let z_neg = equivalent_impedance(2.0 - slip, ws, mp);
                    let zero = C64::new(0.0, 0.0);
                    let (vr, il) = rms_solve_sequences(
                        &g.source,
                        &g.line,
                        g.frequency,
                        [g.load, g.load + y_t, g.load + one / z_neg],
                        [zero, src.e * y_t, zero],
                    )?;
                    let (d_psi_r, t_pos, i_s) = quasi_stationary_rotor(psi_r, vr[1], ws, omega_el, mp);
                    dx[mo] = d_psi_r.re;
                    dx[mo + 1] = d_psi_r.im;
                    let neg = steady_state(2.0 - slip, vr[2], ws, mp)?;
                    t_em = t_pos - neg.torque;

                    let k = 1.5;
                    let (rs, rr) = (mp.stator_resistance(), mp.rotor_resistance());
                    let i_r = (psi_r - i_s * mp.mutual_inductance()) / mp.rotor_inductance();
                    let psi_s = i_s * mp.stator_inductance() + i_r * mp.mutual_inductance();
                    let copper = k * (rs * i_s.norm_sqr() + rr * i_r.norm_sqr())
                        + k * (rs * neg.i_s.norm_sqr() + rr * neg.i_r.norm_sqr());
                    let elec = k * ((vr[1] * i_s.conj()).re + (vr[2] * neg.i_s.conj()).re);
                    flows[flow::MACHINE_ELECTRICAL] = elec;
                    flows[flow::MACHINE_COPPER] = copper;
                    flows[flow::MACHINE_MECHANICAL] = t_em * x[3];
                    magnetic = 0.75 * ((psi_s * i_s.conj()).re + (psi_r * i_r.conj()).re);

                    let vs = to_sequence(&g.source);
                    let (z, y_line) = sequence_network(&g.line, g.frequency);
                    let mut source = 0.0;
                    let mut line_loss = 0.0;
                    for q in 0..3 {
                        source += k * (vs[q] * il[q].conj()).re;
                        line_loss += k * z[q].re * il[q].norm_sqr()
                            + k * (y_line[q].re + g.load.re) * vr[q].norm_sqr();
                    }
                    flows[flow::SOURCE] = source;
                    flows[flow::LOSS] += copper + line_loss;
                    stored += magnetic;

                    sig[14] = i_s.norm();
                    sig[15] = elec;
                    sig[16] = vr[1].norm();
                }
            }
            sig[12] = t_em;
        }

        // inertias
        let ext = dt.external_torque;
        let d = two_mass_step(
            states,
            [&dt.rotor, &dt.generator],
            &dt.gearbox,
            [t_aero + ext[0], t_em + ext[1]],
        );
        dx[0] = d.first.0;
        dx[1] = d.first.1;
        dx[2] = d.second.0;
        dx[3] = d.second.1;

        flows[flow::AERO] = t_aero * x[1];
        flows[flow::EXTERNAL] = ext[0] * x[1] + ext[1] * x[3];
        flows[flow::LOSS] += dt.rotor.friction() * x[1] * x[1]
            + dt.generator.friction() * x[3] * x[3]
            + shaft_dissipation(&ports, &dt.gearbox);

        let elevation = s.turbine.as_ref().map_or(0.0, |t| t.elevation);
        sig[1] = FrameAngles::new(elevation, x[0])?.azimuth();
        sig[2] = x[0];
        sig[3] = x[1];
        sig[4] = x[2];
        sig[5] = x[3];
        sig[6] = ports.torsion(dt.gearbox.ratio());
        sig[7] = -m1;
        Ok(Eval {
            flows,
            signals: sig,
            stored,
            magnetic,
        })
    }
}

fn two_mass_kinetic(s: &Scenario, x: &[f64]) -> f64 {
    0.5 * s.drivetrain.rotor.theta() * x[1] * x[1] + 0.5 * s.drivetrain.generator.theta() * x[3] * x[3]
}
