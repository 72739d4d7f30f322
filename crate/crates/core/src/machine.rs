//! Single-cage asynchronous machine in a stator-fixed two-axis frame.
//!
//! Space vectors are complex numbers `alpha + j beta` built with the
//! amplitude-invariant Clarke transform, so a balanced set of phase
//! amplitude `U` maps to a vector of magnitude `U` and three-phase power is
//! `3/2 Re(u conj(i))`. Rotor quantities are referred to the stator.
//!
//! State is the pair of flux linkages. Currents follow from the inverse of
//! the inductance matrix `[L_S, L_M; L_M, L_R]`, and the rotor voltage
//! equation carries the rotational EMF `j omega_el psi_R` that appears once
//! rotor quantities are expressed in the stator frame. Torque uses the motor
//! sign convention: positive torque accelerates the rotor, negative torque
//! (super-synchronous operation) means the machine is generating.

use num_complex::Complex;

use crate::scalar::Real;
use crate::{Error, Result};

/// Complex space vector in the stator-fixed frame.
pub type SpaceVector<T> = Complex<T>;

/// Largest accepted condition number of the per-axis inductance matrix.
pub const MAX_INDUCTANCE_CONDITION: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MachineParams<T> {
    stator_resistance: T,
    rotor_resistance: T,
    stator_inductance: T,
    rotor_inductance: T,
    mutual_inductance: T,
    pole_pairs: u32,
}

impl<T: Real> MachineParams<T> {
    /// Resistances in ohm, inductances in henry, all stator-referred.
    pub fn new(
        stator_resistance: T,
        rotor_resistance: T,
        stator_inductance: T,
        rotor_inductance: T,
        mutual_inductance: T,
        pole_pairs: u32,
    ) -> Result<Self> {
        let mut issues = Vec::new();
        if !(stator_resistance > T::zero()) {
            issues.push(format!("stator resistance must be > 0, got {stator_resistance}"));
        }
        if !(rotor_resistance > T::zero()) {
            issues.push(format!("rotor resistance must be > 0, got {rotor_resistance}"));
        }
        if !(stator_inductance > T::zero()) || !(rotor_inductance > T::zero()) {
            issues.push("self inductances must be > 0".into());
        }
        if !(mutual_inductance >= T::zero()) {
            issues.push(format!("mutual inductance must be >= 0, got {mutual_inductance}"));
        }
        if pole_pairs == 0 {
            issues.push("pole pairs must be >= 1".into());
        }
        let det = stator_inductance * rotor_inductance - mutual_inductance * mutual_inductance;
        if !(det > T::zero()) {
            issues.push("inductance matrix must be positive definite (L_S L_R > L_M^2)".into());
        } else {
            // eigenvalues of the symmetric 2x2 block
            let mean = T::lit(0.5) * (stator_inductance + rotor_inductance);
            let half_diff = T::lit(0.5) * (stator_inductance - rotor_inductance);
            let r = (half_diff * half_diff + mutual_inductance * mutual_inductance).sqrt();
            let cond = (mean + r) / (mean - r);
            if !(cond <= T::lit(MAX_INDUCTANCE_CONDITION)) {
                issues.push(format!("inductance matrix is near-singular (condition {cond})"));
            }
        }
        if issues.is_empty() {
            Ok(MachineParams {
                stator_resistance,
                rotor_resistance,
                stator_inductance,
                rotor_inductance,
                mutual_inductance,
                pole_pairs,
            })
        } else {
            Err(Error::Validation(issues))
        }
    }

    pub fn stator_resistance(&self) -> T {
        self.stator_resistance
    }
    pub fn rotor_resistance(&self) -> T {
        self.rotor_resistance
    }
    pub fn stator_inductance(&self) -> T {
        self.stator_inductance
    }
    pub fn rotor_inductance(&self) -> T {
        self.rotor_inductance
    }
    pub fn mutual_inductance(&self) -> T {
        self.mutual_inductance
    }
    pub fn pole_pairs(&self) -> u32 {
        self.pole_pairs
    }

    fn p(&self) -> T {
        T::from_u32(self.pole_pairs).unwrap()
    }

    fn det(&self) -> T {
        self.stator_inductance * self.rotor_inductance - self.mutual_inductance * self.mutual_inductance
    }

    /// Stator transient inductance `L_S - L_M^2 / L_R`.
    pub fn transient_inductance(&self) -> T {
        self.det() / self.rotor_inductance
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MachineState<T> {
    pub psi_s: SpaceVector<T>,
    pub psi_r: SpaceVector<T>,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MachineInputs<T> {
    pub u_s: SpaceVector<T>,
    /// Zero for a cage rotor.
    pub u_r: SpaceVector<T>,
    /// Electrical rotor speed `p * omega_mech`.
    pub omega_el: T,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MachineCurrents<T> {
    pub i_s: SpaceVector<T>,
    pub i_r: SpaceVector<T>,
}

pub fn currents_from_flux<T: Real>(state: &MachineState<T>, params: &MachineParams<T>) -> MachineCurrents<T> {
    let det = params.det();
    MachineCurrents {
        i_s: (state.psi_s * params.rotor_inductance - state.psi_r * params.mutual_inductance) / det,
        i_r: (state.psi_r * params.stator_inductance - state.psi_s * params.mutual_inductance) / det,
    }
}

/// Forward flux linkage relation `psi = L i`.
pub fn flux_from_currents<T: Real>(
    currents: &MachineCurrents<T>,
    params: &MachineParams<T>,
) -> MachineState<T> {
    MachineState {
        psi_s: currents.i_s * params.stator_inductance + currents.i_r * params.mutual_inductance,
        psi_r: currents.i_s * params.mutual_inductance + currents.i_r * params.rotor_inductance,
    }
}

pub fn machine_derivative<T: Real>(
    state: &MachineState<T>,
    inputs: &MachineInputs<T>,
    params: &MachineParams<T>,
) -> MachineState<T> {
    let c = currents_from_flux(state, params);
    let j = Complex::<T>::i();
    MachineState {
        psi_s: inputs.u_s - c.i_s * params.stator_resistance,
        psi_r: inputs.u_r - c.i_r * params.rotor_resistance + j * state.psi_r * inputs.omega_el,
    }
}

/// Electromagnetic torque `3/2 p (psi_S x i_S)`.
pub fn electromagnetic_torque<T: Real>(state: &MachineState<T>, params: &MachineParams<T>) -> T {
    let i_s = currents_from_flux(state, params).i_s;
    T::lit(1.5) * params.p() * cross(state.psi_s, i_s)
}

/// 2D cross product `a.re b.im - a.im b.re`.
pub fn cross<T: Real>(a: SpaceVector<T>, b: SpaceVector<T>) -> T {
    a.re * b.im - a.im * b.re
}

/// Instantaneous power flows of the machine, all in watts.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MachinePower<T> {
    /// Electrical power into the stator and rotor terminals.
    pub electrical_in: T,
    pub copper_loss: T,
    /// Mechanical power delivered to the shaft, `m * omega_mech`.
    pub mechanical_out: T,
}

pub fn machine_power<T: Real>(
    state: &MachineState<T>,
    inputs: &MachineInputs<T>,
    params: &MachineParams<T>,
) -> MachinePower<T> {
    let c = currents_from_flux(state, params);
    let k = T::lit(1.5);
    let torque = T::lit(1.5) * params.p() * cross(state.psi_s, c.i_s);
    MachinePower {
        electrical_in: k * ((inputs.u_s * c.i_s.conj()).re + (inputs.u_r * c.i_r.conj()).re),
        copper_loss: k
            * (params.stator_resistance * c.i_s.norm_sqr() + params.rotor_resistance * c.i_r.norm_sqr()),
        mechanical_out: torque * inputs.omega_el / params.p(),
    }
}

/// Magnetic energy `3/4 (psi_S . i_S + psi_R . i_R)`.
pub fn magnetic_energy<T: Real>(state: &MachineState<T>, params: &MachineParams<T>) -> T {
    let c = currents_from_flux(state, params);
    T::lit(0.75) * ((state.psi_s * c.i_s.conj()).re + (state.psi_r * c.i_r.conj()).re)
}

/// Amplitude-invariant Clarke transform; the zero-sequence part is dropped.
pub fn abc_to_space_vector<T: Real>(abc: [T; 3]) -> SpaceVector<T> {
    let two_thirds = T::lit(2.0 / 3.0);
    let half = T::lit(0.5);
    let s3 = T::lit(3.0f64.sqrt() / 2.0);
    Complex::new(
        two_thirds * (abc[0] - half * (abc[1] + abc[2])),
        two_thirds * s3 * (abc[1] - abc[2]),
    )
}

/// Inverse Clarke transform producing a zero-sequence-free phase set.
pub fn space_vector_to_abc<T: Real>(v: SpaceVector<T>) -> [T; 3] {
    let half = T::lit(0.5);
    let s3 = T::lit(3.0f64.sqrt() / 2.0);
    [v.re, -half * v.re + s3 * v.im, -half * v.re - s3 * v.im]
}

/// Slip `(omega_s - omega_el) / omega_s`.
pub fn slip<T: Real>(omega_sync_el: T, omega_el: T) -> T {
    (omega_sync_el - omega_el) / omega_sync_el
}

/// Sinusoidal steady state of the machine fed by a positive-sequence
/// voltage phasor (peak amplitude, phase-a reference).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteadyState<T> {
    pub i_s: Complex<T>,
    pub i_r: Complex<T>,
    pub psi_s: Complex<T>,
    pub psi_r: Complex<T>,
    pub torque: T,
}

/// Input impedance of the per-phase equivalent circuit at `slip`.
pub fn equivalent_impedance<T: Real>(slip: T, omega_s: T, params: &MachineParams<T>) -> Complex<T> {
    let j = Complex::<T>::i();
    let xm = omega_s * params.mutual_inductance;
    let rotor = Complex::new(params.rotor_resistance, slip * omega_s * params.rotor_inductance);
    // slip-multiplied form stays finite at slip = 0
    Complex::new(params.stator_resistance, T::zero())
        + j * omega_s * params.stator_inductance
        + Complex::new(xm * xm * slip, T::zero()) / rotor
}

pub fn steady_state<T: Real>(
    slip: T,
    voltage: Complex<T>,
    omega_s: T,
    params: &MachineParams<T>,
) -> Result<SteadyState<T>> {
    if !(omega_s > T::zero()) {
        return Err(Error::domain("grid frequency must be > 0"));
    }
    let j = Complex::<T>::i();
    let z = equivalent_impedance(slip, omega_s, params);
    let i_s = voltage / z;
    let rotor = Complex::new(params.rotor_resistance, slip * omega_s * params.rotor_inductance);
    let i_r = -(j * omega_s * params.mutual_inductance * slip) * i_s / rotor;
    let psi_s = i_s * params.stator_inductance + i_r * params.mutual_inductance;
    let psi_r = i_s * params.mutual_inductance + i_r * params.rotor_inductance;
    let torque = if slip == T::zero() {
        T::zero()
    } else {
        T::lit(1.5) * params.p() * i_r.norm_sqr() * params.rotor_resistance / (slip * omega_s)
    };
    Ok(SteadyState {
        i_s,
        i_r,
        psi_s,
        psi_r,
        torque,
    })
}

/// Steady-state torque from the per-phase equivalent circuit. `u_mag` is the
/// phase voltage amplitude.
pub fn steady_state_torque<T: Real>(slip: T, u_mag: T, f_grid: T, params: &MachineParams<T>) -> Result<T> {
    if !(slip >= -T::one() && slip <= T::one()) {
        return Err(Error::domain(format!("slip must lie in [-1, 1], got {slip}")));
    }
    if !(f_grid > T::zero()) {
        return Err(Error::domain("grid frequency must be > 0"));
    }
    let omega_s = T::lit(2.0) * T::PI() * f_grid;
    Ok(steady_state(slip, Complex::new(u_mag, T::zero()), omega_s, params)?.torque)
}

/// Machine seen from the grid with the stator transients neglected: a voltage
/// `e` behind the impedance `z`, in a frame rotating at the grid frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransientSource<T> {
    pub e: Complex<T>,
    pub z: Complex<T>,
}

/// Source behind transient impedance for the rotor flux `psi_r` (synchronous frame).
pub fn transient_source<T: Real>(
    psi_r: Complex<T>,
    omega_s: T,
    params: &MachineParams<T>,
) -> TransientSource<T> {
    let j = Complex::<T>::i();
    let kr = params.mutual_inductance / params.rotor_inductance;
    TransientSource {
        e: j * psi_r * (omega_s * kr),
        z: Complex::new(params.stator_resistance, omega_s * params.transient_inductance()),
    }
}

/// Rotor flux dynamics with algebraic stator, synchronous frame. Returns
/// `(d psi_r/dt, torque, stator current)` for the stator voltage phasor `u_s`.
pub fn quasi_stationary_rotor<T: Real>(
    psi_r: Complex<T>,
    u_s: Complex<T>,
    omega_s: T,
    omega_el: T,
    params: &MachineParams<T>,
) -> (Complex<T>, T, Complex<T>) {
    let j = Complex::<T>::i();
    let src = transient_source(psi_r, omega_s, params);
    let i_s = (u_s - src.e) / src.z;
    let i_r = (psi_r - i_s * params.mutual_inductance) / params.rotor_inductance;
    let psi_s = i_s * params.stator_inductance + i_r * params.mutual_inductance;
    let d_psi_r = -i_r * params.rotor_resistance - j * psi_r * (omega_s - omega_el);
    let torque = T::lit(1.5) * params.p() * cross(psi_s, i_s);
    (d_psi_r, torque, i_s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn params() -> MachineParams<f64> {
        MachineParams::new(0.0212, 0.0212, 0.02088, 0.02088, 0.0202, 2).unwrap()
    }

    #[test]
    fn zero_flux_zero_current() {
        let c = currents_from_flux(&MachineState::default(), &params());
        assert_eq!(c.i_s, Complex::new(0.0, 0.0));
        assert_eq!(c.i_r, Complex::new(0.0, 0.0));
    }

    #[test]
    fn decoupled_windings() {
        let p = MachineParams::new(0.1, 0.1, 0.2, 0.3, 0.0, 1).unwrap();
        let s = MachineState {
            psi_s: Complex::new(1.0, -2.0),
            psi_r: Complex::new(0.6, 0.3),
        };
        let c = currents_from_flux(&s, &p);
        assert!((c.i_s - s.psi_s / 0.2).norm() < 1e-12);
        assert!((c.i_r - s.psi_r / 0.3).norm() < 1e-12);
    }

    #[test]
    fn per_axis_linear_solve() {
        let p = MachineParams::new(0.1, 0.1, 0.21, 0.21, 0.20, 1).unwrap();
        let s = MachineState {
            psi_s: Complex::new(1.0, 0.0),
            psi_r: Complex::new(0.9, 0.0),
        };
        // [0.21 0.20; 0.20 0.21] i = [1; 0.9], det = 0.0041
        let i_s: f64 = (0.21 * 1.0 - 0.20 * 0.9) / 0.0041;
        let i_r: f64 = (0.21 * 0.9 - 0.20 * 1.0) / 0.0041;
        let c = currents_from_flux(&s, &p);
        assert!((c.i_s.re - i_s).abs() < 1e-10);
        assert!((c.i_r.re - i_r).abs() < 1e-10);
        assert_eq!(c.i_s.im, 0.0);
    }

    #[test]
    fn derivative_cases() {
        let p = params();
        let zero = machine_derivative(&MachineState::default(), &MachineInputs::default(), &p);
        assert_eq!(zero, MachineState::default());
        let inputs = MachineInputs {
            u_s: Complex::new(100.0, 0.0),
            ..Default::default()
        };
        let d = machine_derivative(&MachineState::default(), &inputs, &p);
        assert_eq!(d.psi_s, Complex::new(100.0, 0.0));
    }

    #[test]
    fn locked_rotor_dc_steady_state() {
        // with omega_el = 0 and DC stator voltage the rotor current vanishes and
        // the stator current settles at u / R_S: derivative is zero there
        let p = params();
        let u = Complex::new(5.0, -2.0);
        let i_s = u / p.stator_resistance();
        let state = flux_from_currents(
            &MachineCurrents {
                i_s,
                i_r: Complex::new(0.0, 0.0),
            },
            &p,
        );
        let inputs = MachineInputs {
            u_s: u,
            ..Default::default()
        };
        let d = machine_derivative(&state, &inputs, &p);
        assert!(d.psi_s.norm() < 1e-12 && d.psi_r.norm() < 1e-12);
        // the stator flux is parallel to the stator current: no torque
        assert!(electromagnetic_torque(&state, &p).abs() < 1e-9);
    }

    #[test]
    fn torque_cases() {
        // psi_S = (1, 0), i_S = (0, 10), p = 2  ->  3/2 * 2 * 10 = 30
        let p = MachineParams::new(0.1, 0.1, 1.0, 1.0, 0.0, 2).unwrap();
        let s = MachineState {
            psi_s: Complex::new(1.0, 0.0),
            psi_r: Complex::new(0.0, 0.0),
        };
        // with L_M = 0, i_S = psi_S / L_S is parallel to psi_S
        assert_eq!(electromagnetic_torque(&s, &p), 0.0);
        assert_eq!(cross(Complex::new(1.0, 0.0), Complex::new(0.0, 10.0)), 10.0);
        let pm = params();
        let st = MachineState {
            psi_s: Complex::new(1.0, 0.0),
            psi_r: Complex::new(0.0, 0.95),
        };
        let t = electromagnetic_torque(&st, &pm);
        let neg = MachineState {
            psi_s: -st.psi_s,
            psi_r: -st.psi_r,
        };
        // negating both fluxes negates the currents: torque is quadratic, unchanged
        assert!((electromagnetic_torque(&neg, &pm) - t).abs() < 1e-9 * t.abs());
        assert!(t != 0.0);
    }

    #[test]
    fn torque_value_from_known_current() {
        let p = MachineParams::new(0.1, 0.1, 0.3, 0.3, 0.2, 2).unwrap();
        // choose currents, derive fluxes, compare with the closed form
        let c = MachineCurrents {
            i_s: Complex::new(0.0, 10.0),
            i_r: Complex::new(5.0, 0.0),
        };
        let s = flux_from_currents(&c, &p);
        let expect: f64 = 1.5 * 2.0 * cross(s.psi_s, c.i_s);
        assert!((electromagnetic_torque(&s, &p) - expect).abs() < 1e-9);
        // negated stator current at the same stator flux flips the sign
        assert_eq!(cross(s.psi_s, -c.i_s), -cross(s.psi_s, c.i_s));
    }

    #[test]
    fn rejects_bad_params() {
        assert!(MachineParams::new(0.0, 0.1, 0.2, 0.2, 0.1, 1).is_err());
        assert!(MachineParams::new(0.1, 0.1, 0.2, 0.2, 0.2, 1).is_err());
        assert!(MachineParams::new(0.1, 0.1, 0.2, 0.2, 0.1, 0).is_err());
        // condition number beyond 1e12
        assert!(MachineParams::new(0.1, 0.1, 1.0, 1.0, 1.0 - 1e-13, 1).is_err());
    }

    #[test]
    fn clarke_round_trip_and_power() {
        let abc = [3.0f64, -1.0, -2.0];
        let v = abc_to_space_vector(abc);
        let back = space_vector_to_abc(v);
        for k in 0..3 {
            assert!((back[k] - abc[k]).abs() < 1e-12);
        }
        let i_abc = [1.5, 0.5, -2.0];
        let i = abc_to_space_vector(i_abc);
        let p_abc: f64 = abc.iter().zip(i_abc).map(|(u, i)| u * i).sum();
        assert!((1.5 * (v * i.conj()).re - p_abc).abs() < 1e-12);
    }

    #[test]
    fn balanced_set_has_phase_amplitude() {
        let amp = 563.0;
        for k in 0..12 {
            let th = k as f64 * 0.5;
            let abc = [
                amp * th.cos(),
                amp * (th - 2.0 * std::f64::consts::PI / 3.0).cos(),
                amp * (th + 2.0 * std::f64::consts::PI / 3.0).cos(),
            ];
            let v = abc_to_space_vector(abc);
            assert!((v.norm() - amp).abs() < 1e-9);
            assert!((v.arg() - crate::geometry::wrap_angle(th)).abs() < 1e-9);
        }
    }

    #[test]
    fn steady_state_torque_cases() {
        let p = params();
        assert_eq!(steady_state_torque(0.0, 563.0, 50.0, &p).unwrap(), 0.0);
        let t1 = steady_state_torque(1e-4, 563.0, 50.0, &p).unwrap();
        let t2 = steady_state_torque(-1e-4, 563.0, 50.0, &p).unwrap();
        assert!(t1 > 0.0 && t2 < 0.0);
        assert!((t1 + t2).abs() < 1e-3 * t1);
        assert!(steady_state_torque(1.5, 563.0, 50.0, &p).is_err());
        assert!(steady_state_torque(0.1, 563.0, 0.0, &p).is_err());
    }

    #[test]
    fn steady_state_is_a_fixed_point_of_the_dynamics() {
        // rotate the steady phasors into the stator frame and check the
        // derivative equals j omega_s psi
        let p = params();
        let omega_s = 2.0 * std::f64::consts::PI * 50.0;
        let s = 0.02;
        let u = Complex::new(563.0, 0.0);
        let ss = steady_state(s, u, omega_s, &p).unwrap();
        let state = MachineState {
            psi_s: ss.psi_s,
            psi_r: ss.psi_r,
        };
        let inputs = MachineInputs {
            u_s: u,
            u_r: Complex::new(0.0, 0.0),
            omega_el: (1.0 - s) * omega_s,
        };
        let d = machine_derivative(&state, &inputs, &p);
        let j = Complex::<f64>::i();
        assert!((d.psi_s - j * omega_s * ss.psi_s).norm() < 1e-9 * ss.psi_s.norm() * omega_s);
        assert!((d.psi_r - j * omega_s * ss.psi_r).norm() < 1e-9 * ss.psi_r.norm() * omega_s);
        assert!((electromagnetic_torque(&state, &p) - ss.torque).abs() < 1e-9 * ss.torque.abs());
        // quasi-stationary rotor model is at rest in its frame
        let (dpsi, torque, i_s) = quasi_stationary_rotor(ss.psi_r, u, omega_s, inputs.omega_el, &p);
        assert!(dpsi.norm() < 1e-9 * ss.psi_r.norm() * omega_s);
        assert!((torque - ss.torque).abs() < 1e-9 * ss.torque.abs());
        assert!((i_s - ss.i_s).norm() < 1e-9 * ss.i_s.norm());
    }

    proptest! {
        #[test]
        fn flux_current_bijection(
            a in -5.0..5.0f64, b in -5.0..5.0f64, c in -5.0..5.0f64, d in -5.0..5.0f64,
        ) {
            let p = params();
            let s = MachineState { psi_s: Complex::new(a, b), psi_r: Complex::new(c, d) };
            let back = flux_from_currents(&currents_from_flux(&s, &p), &p);
            let scale = s.psi_s.norm().max(s.psi_r.norm()).max(1e-12);
            prop_assert!((back.psi_s - s.psi_s).norm() <= 1e-10 * scale);
            prop_assert!((back.psi_r - s.psi_r).norm() <= 1e-10 * scale);
        }

        #[test]
        fn power_balance_is_instantaneous(
            a in -2.0..2.0f64, b in -2.0..2.0f64, c in -2.0..2.0f64, d in -2.0..2.0f64,
            ua in -600.0..600.0f64, ub in -600.0..600.0f64, w in -400.0..400.0f64,
        ) {
            // u.i - losses - dW/dt = m omega_mech exactly
            let p = params();
            let s = MachineState { psi_s: Complex::new(a, b), psi_r: Complex::new(c, d) };
            let inputs = MachineInputs { u_s: Complex::new(ua, ub), u_r: Complex::new(0.0, 0.0), omega_el: w };
            let pw = machine_power(&s, &inputs, &p);
            let ds = machine_derivative(&s, &inputs, &p);
            let cur = currents_from_flux(&s, &p);
            let dw = 1.5 * ((ds.psi_s * cur.i_s.conj()).re + (ds.psi_r * cur.i_r.conj()).re);
            let resid = pw.electrical_in - pw.copper_loss - dw - pw.mechanical_out;
            let scale = pw.electrical_in.abs() + pw.copper_loss + dw.abs() + pw.mechanical_out.abs();
            prop_assert!(resid.abs() <= 1e-9 * scale.max(1.0));
        }
    }
}
