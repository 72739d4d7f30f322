//! Rigid rotating inertias with viscous friction, coupled by an elastic
//! shaft/gearbox.
//!
//! Gearbox coupling: with torsion `eps = delta1 - delta2 / n` the port torques
//! are `m1 = -(c eps + d eps')` and `m2 = -m1 / n`. This is the symmetric
//! (power-consistent) coupling matrix `[-1, 1/n; 1/n, -1/n^2]`. An ideal
//! gear (`d = 0`) therefore only exchanges power with its spring.

use crate::scalar::Real;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InertiaParams<T> {
    theta: T,
    friction: T,
}

impl<T: Real> InertiaParams<T> {
    /// `theta` in kg m^2 (> 0), `friction` in Nm/(rad/s) (>= 0).
    pub fn new(theta: T, friction: T) -> Result<Self> {
        let mut issues = Vec::new();
        if !(theta > T::zero()) || !theta.is_finite() {
            issues.push(format!("theta must be > 0, got {theta}"));
        }
        if !(friction >= T::zero()) || !friction.is_finite() {
            issues.push(format!("friction factor must be >= 0, got {friction}"));
        }
        if issues.is_empty() {
            Ok(InertiaParams { theta, friction })
        } else {
            Err(Error::Validation(issues))
        }
    }

    pub fn theta(&self) -> T {
        self.theta
    }

    pub fn friction(&self) -> T {
        self.friction
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct InertiaState<T> {
    pub delta: T,
    pub omega: T,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GearboxParams<T> {
    stiffness: T,
    damping: T,
    ratio: T,
}

impl<T: Real> GearboxParams<T> {
    /// `stiffness` Nm/rad (>= 0), `damping` Nm/(rad/s) (>= 0), `ratio` (!= 0).
    pub fn new(stiffness: T, damping: T, ratio: T) -> Result<Self> {
        let mut issues = Vec::new();
        if !(stiffness >= T::zero()) || !stiffness.is_finite() {
            issues.push(format!("stiffness must be >= 0, got {stiffness}"));
        }
        if !(damping >= T::zero()) || !damping.is_finite() {
            issues.push(format!("damping must be >= 0, got {damping}"));
        }
        if ratio == T::zero() || !ratio.is_finite() {
            issues.push(format!("transformation ratio must be non-zero, got {ratio}"));
        }
        if issues.is_empty() {
            Ok(GearboxParams {
                stiffness,
                damping,
                ratio,
            })
        } else {
            Err(Error::Validation(issues))
        }
    }

    pub fn stiffness(&self) -> T {
        self.stiffness
    }

    pub fn damping(&self) -> T {
        self.damping
    }

    pub fn ratio(&self) -> T {
        self.ratio
    }
}

/// Angles and speeds at the two gearbox ports.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ShaftPortState<T> {
    pub delta1: T,
    pub delta2: T,
    pub omega1: T,
    pub omega2: T,
}

impl<T: Real> ShaftPortState<T> {
    pub fn from_inertias(a: InertiaState<T>, b: InertiaState<T>) -> Self {
        ShaftPortState {
            delta1: a.delta,
            delta2: b.delta,
            omega1: a.omega,
            omega2: b.omega,
        }
    }

    pub fn torsion(&self, ratio: T) -> T {
        self.delta1 - self.delta2 / ratio
    }

    pub fn torsion_rate(&self, ratio: T) -> T {
        self.omega1 - self.omega2 / ratio
    }
}

/// `(d delta/dt, d omega/dt)` of a single inertia under the summed external torque.
pub fn inertia_derivative<T: Real>(
    state: InertiaState<T>,
    torque_sum: T,
    params: &InertiaParams<T>,
) -> (T, T) {
    (
        state.omega,
        (torque_sum - params.friction * state.omega) / params.theta,
    )
}

/// Port torques `(m1, m2)` of the shaft/gearbox; they satisfy `m1 + n m2 = 0`.
pub fn gearbox_torques<T: Real>(state: &ShaftPortState<T>, params: &GearboxParams<T>) -> (T, T) {
    let eps = state.torsion(params.ratio);
    let eps_dot = state.torsion_rate(params.ratio);
    let m1 = -(params.stiffness * eps + params.damping * eps_dot);
    (m1, -m1 / params.ratio)
}

/// Spring energy stored in the shaft.
pub fn shaft_energy<T: Real>(state: &ShaftPortState<T>, params: &GearboxParams<T>) -> T {
    let eps = state.torsion(params.ratio);
    T::lit(0.5) * params.stiffness * eps * eps
}

/// Power dissipated by the shaft damper, `d eps'^2`.
pub fn shaft_dissipation<T: Real>(state: &ShaftPortState<T>, params: &GearboxParams<T>) -> T {
    let r = state.torsion_rate(params.ratio);
    params.damping * r * r
}

/// Derivatives of a two-inertia drivetrain. Inertia 1 is on the low-speed
/// side of the gearbox, inertia 2 on the high-speed side.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoMassDerivative<T> {
    pub first: (T, T),
    pub second: (T, T),
}

pub fn two_mass_step<T: Real>(
    states: [InertiaState<T>; 2],
    inertias: [&InertiaParams<T>; 2],
    shaft: &GearboxParams<T>,
    external: [T; 2],
) -> TwoMassDerivative<T> {
    let ports = ShaftPortState::from_inertias(states[0], states[1]);
    let (m1, m2) = gearbox_torques(&ports, shaft);
    TwoMassDerivative {
        first: inertia_derivative(states[0], external[0] + m1, inertias[0]),
        second: inertia_derivative(states[1], external[1] + m2, inertias[1]),
    }
}

/// Kinetic plus spring energy of the two-mass system.
pub fn two_mass_energy<T: Real>(
    states: [InertiaState<T>; 2],
    inertias: [&InertiaParams<T>; 2],
    shaft: &GearboxParams<T>,
) -> T {
    let half = T::lit(0.5);
    let kinetic = half * inertias[0].theta * states[0].omega * states[0].omega
        + half * inertias[1].theta * states[1].omega * states[1].omega;
    kinetic + shaft_energy(&ShaftPortState::from_inertias(states[0], states[1]), shaft)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn equilibrium_and_division() {
        let p = InertiaParams::new(100.0, 0.0).unwrap();
        assert_eq!(inertia_derivative(InertiaState::default(), 0.0, &p), (0.0, 0.0));
        let s = InertiaState {
            delta: 1.0,
            omega: 2.0,
        };
        assert_eq!(inertia_derivative(s, 50.0, &p), (2.0, 0.5));
    }

    #[test]
    fn parameter_validation() {
        assert!(InertiaParams::new(0.0, 1.0).is_err());
        assert!(InertiaParams::new(1.0, -1.0).is_err());
        let e = GearboxParams::new(-1.0, -1.0, 0.0).unwrap_err();
        assert_eq!(e.issues().len(), 3);
    }

    #[test]
    fn unstrained_shaft_carries_no_torque() {
        let g = GearboxParams::new(1e5, 10.0, 35.0).unwrap();
        let s = ShaftPortState {
            delta1: 0.2,
            delta2: 7.0,
            omega1: 4.0,
            omega2: 140.0,
        };
        assert_eq!(gearbox_torques(&s, &g), (0.0, 0.0));
    }

    #[test]
    fn unit_ratio_spring() {
        let g = GearboxParams::<f64>::new(1000.0, 0.0, 1.0).unwrap();
        let s = ShaftPortState {
            delta1: 0.01,
            ..Default::default()
        };
        let (m1, m2) = gearbox_torques(&s, &g);
        assert!((m1 + 10.0).abs() < 1e-12);
        assert!((m2 - 10.0).abs() < 1e-12);
    }

    #[test]
    fn symmetric_rest_state() {
        let p = InertiaParams::new(10.0, 0.1).unwrap();
        let g = GearboxParams::new(100.0, 1.0, 2.0).unwrap();
        let d = two_mass_step([InertiaState::default(); 2], [&p, &p], &g, [0.0, 0.0]);
        assert_eq!(d.first, (0.0, 0.0));
        assert_eq!(d.second, (0.0, 0.0));
    }

    proptest! {
        #[test]
        fn gearbox_torque_balance(
            d1 in -10.0..10.0f64, d2 in -300.0..300.0f64, w1 in -5.0..5.0f64, w2 in -200.0..200.0f64,
            c in 0.0..1e6f64, d in 0.0..1e4f64, n in prop_oneof![-50.0..-0.1f64, 0.1..50.0f64],
        ) {
            let g = GearboxParams::new(c, d, n).unwrap();
            let s = ShaftPortState { delta1: d1, delta2: d2, omega1: w1, omega2: w2 };
            let (m1, m2) = gearbox_torques(&s, &g);
            prop_assert!((m1 + n * m2).abs() <= 1e-12 * m1.abs().max(1.0));
            // port power = -(spring power) - damper dissipation
            let eps = s.torsion(n);
            let rate = s.torsion_rate(n);
            let port = m1 * w1 + m2 * w2;
            let expect = -c * eps * rate - d * rate * rate;
            prop_assert!((port - expect).abs() <= 1e-9 * (port.abs() + expect.abs()).max(1.0));
            prop_assert!(port + c * eps * rate <= 1e-9 * port.abs().max(1.0));
        }

        #[test]
        fn inertia_derivative_is_linear(
            w_a in -10.0..10.0f64, w_b in -10.0..10.0f64, m_a in -1e3..1e3f64, m_b in -1e3..1e3f64,
            k in 0.0..5.0f64, a in -3.0..3.0f64,
        ) {
            let p = InertiaParams::new(7.5, k).unwrap();
            let f = |w: f64, m: f64| inertia_derivative(InertiaState { delta: 0.0, omega: w }, m, &p).1;
            let lhs = f(a * w_a + w_b, a * m_a + m_b);
            let rhs = a * f(w_a, m_a) + f(w_b, m_b);
            prop_assert!((lhs - rhs).abs() <= 1e-12 * (lhs.abs() + rhs.abs()).max(1.0));
        }
    }
}
