//! Rotor aerodynamics from a tabulated power coefficient characteristic.
//!
//! Power follows the actuator-disc relation `P = 1/2 rho pi R^2 cp(lambda) v^3`
//! with tip-speed ratio `lambda = omega R / v`. The cp curve is a user input;
//! it is interpolated linearly and taken as zero outside the table (stall on
//! the low side, overspeed on the high side).

use crate::scalar::Real;
use crate::table::Table;
use crate::{Error, Result};

/// Betz limit as enforced on cp tables.
pub const BETZ_LIMIT: f64 = 0.593;

#[derive(Debug, Clone, PartialEq)]
pub struct RotorParams<T> {
    radius: T,
    air_density: T,
    cp: Table<T>,
}

impl<T: Real> RotorParams<T> {
    pub fn new(radius: T, air_density: T, cp_table: &[(T, T)]) -> Result<Self> {
        let mut issues = Vec::new();
        if !(radius > T::zero()) {
            issues.push(format!("rotor radius must be > 0, got {radius}"));
        }
        if !(air_density > T::zero()) {
            issues.push(format!("air density must be > 0, got {air_density}"));
        }
        match Table::new(cp_table) {
            Ok(t) => {
                if t.first_x() < T::zero() {
                    issues.push("cp table tip-speed ratios must be >= 0".into());
                }
                for (lambda, cp) in t.knots() {
                    if cp < T::zero() || cp > T::lit(BETZ_LIMIT) {
                        issues.push(format!(
                            "cp = {cp} at lambda = {lambda} outside [0, {BETZ_LIMIT}]"
                        ));
                    }
                }
                if issues.is_empty() {
                    return Ok(RotorParams {
                        radius,
                        air_density,
                        cp: t,
                    });
                }
            }
            Err(e) => issues.push(format!("cp table: {e}")),
        }
        Err(Error::Validation(issues))
    }

    pub fn radius(&self) -> T {
        self.radius
    }

    pub fn air_density(&self) -> T {
        self.air_density
    }

    pub fn cp_table(&self) -> &Table<T> {
        &self.cp
    }

    /// Power coefficient at `lambda`; zero outside the table.
    pub fn cp(&self, lambda: T) -> T {
        self.cp.eval_inside(lambda).unwrap_or_else(T::zero)
    }

    fn half_rho_area(&self) -> T {
        T::lit(0.5) * self.air_density * T::PI() * self.radius * self.radius
    }

    /// Limit of cp/lambda as lambda -> 0, taken from the first knot with a
    /// positive tip-speed ratio.
    fn standstill_ratio(&self) -> T {
        self.cp
            .knots()
            .find(|(l, _)| *l > T::zero())
            .map(|(l, cp)| cp / l)
            .unwrap_or_else(T::zero)
    }
}

/// Tip-speed ratio, or `None` for zero wind (infinite ratio).
pub fn tip_speed_ratio<T: Real>(omega: T, v: T, params: &RotorParams<T>) -> Result<Option<T>> {
    if v < T::zero() || omega < T::zero() {
        return Err(Error::domain(format!(
            "tip-speed ratio needs v >= 0 and omega >= 0, got v = {v}, omega = {omega}"
        )));
    }
    if v == T::zero() {
        return Ok(None);
    }
    Ok(Some(omega * params.radius / v))
}

/// Aerodynamic power extracted from wind speed `v` at rotor speed `omega`.
pub fn aerodynamic_power<T: Real>(v: T, omega: T, params: &RotorParams<T>) -> Result<T> {
    match tip_speed_ratio(omega, v, params)? {
        None => Ok(T::zero()),
        Some(lambda) => Ok(params.half_rho_area() * params.cp(lambda) * v * v * v),
    }
}

/// Aerodynamic shaft torque. At standstill the torque is the low-lambda limit
/// `1/2 rho pi R^3 (cp/lambda) v^2`.
pub fn aerodynamic_torque<T: Real>(v: T, omega: T, params: &RotorParams<T>) -> Result<T> {
    if v < T::zero() {
        return Err(Error::domain(format!("wind speed must be >= 0, got {v}")));
    }
    if v == T::zero() {
        return Ok(T::zero());
    }
    if omega == T::zero() {
        return Ok(params.half_rho_area() * params.radius * params.standstill_ratio() * v * v);
    }
    Ok(aerodynamic_power(v, omega, params)? / omega)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn v27_like() -> RotorParams<f64> {
        RotorParams::new(
            13.5,
            1.225,
            &[
                (0.0, 0.0),
                (2.0, 0.05),
                (4.0, 0.30),
                (6.0, 0.44),
                (8.0, 0.40),
                (10.0, 0.28),
                (12.0, 0.10),
                (14.0, 0.0),
            ],
        )
        .unwrap()
    }

    #[test]
    fn tip_speed_ratio_cases() {
        let p = v27_like();
        assert_eq!(tip_speed_ratio(0.0, 10.0, &p).unwrap(), Some(0.0));
        let l = tip_speed_ratio(3.0, 10.0, &p).unwrap().unwrap();
        assert!((l - 4.05).abs() < 1e-12);
        assert_eq!(tip_speed_ratio(3.0, 0.0, &p).unwrap(), None);
        assert!(tip_speed_ratio(-1.0, 3.0, &p).is_err());
    }

    #[test]
    fn no_wind_no_torque() {
        let p = v27_like();
        assert_eq!(aerodynamic_torque(0.0, 4.0, &p).unwrap(), 0.0);
        assert_eq!(aerodynamic_torque(0.0, 0.0, &p).unwrap(), 0.0);
    }

    #[test]
    fn zero_cp_table_gives_zero_torque() {
        let p = RotorParams::new(13.5, 1.225, &[(0.0, 0.0), (15.0, 0.0)]).unwrap();
        for (v, w) in [(5.0, 1.0), (12.0, 0.0), (25.0, 7.0)] {
            assert_eq!(aerodynamic_torque(v, w, &p).unwrap(), 0.0);
        }
    }

    #[test]
    fn torque_at_knot() {
        let p = v27_like();
        // lambda = 6 at v = 10 needs omega = 60 / 13.5
        let omega = 6.0 * 10.0 / 13.5;
        let expect = 0.5 * 1.225 * std::f64::consts::PI * 13.5f64.powi(2) * 0.44 * 1000.0 / omega;
        let got = aerodynamic_torque(10.0, omega, &p).unwrap();
        assert!((got - expect).abs() <= 1e-12 * expect);
    }

    #[test]
    fn standstill_torque_uses_first_positive_knot() {
        let p = v27_like();
        let expect = 0.5 * 1.225 * std::f64::consts::PI * 13.5f64.powi(3) * (0.05 / 2.0) * 64.0;
        let got = aerodynamic_torque(8.0, 0.0, &p).unwrap();
        assert!((got - expect).abs() <= 1e-12 * expect);
        // continuity with the small-omega branch on the first segment
        let small = aerodynamic_torque(8.0, 1e-9, &p).unwrap();
        assert!((small - got).abs() <= 1e-6 * got);
    }

    #[test]
    fn outside_table_is_clamped_to_zero() {
        let p = RotorParams::<f64>::new(10.0, 1.2, &[(3.0, 0.2), (9.0, 0.4)]).unwrap();
        assert_eq!(p.cp(2.0), 0.0);
        assert_eq!(p.cp(9.5), 0.0);
        assert!((p.cp(6.0) - 0.3).abs() < 1e-15);
    }

    #[test]
    fn rejects_invalid_rotor() {
        let e = RotorParams::new(-1.0, 0.0, &[(0.0, 0.7), (1.0, 0.1)]).unwrap_err();
        assert_eq!(e.issues().len(), 3);
        assert!(RotorParams::new(1.0, 1.0, &[(-1.0, 0.1), (1.0, 0.1)]).is_err());
    }

    proptest! {
        #[test]
        fn betz_and_power_identity(v in 0.0..30.0f64, omega in 0.0..8.0f64) {
            let p = v27_like();
            let power = aerodynamic_power(v, omega, &p).unwrap();
            let betz = BETZ_LIMIT * 0.5 * 1.225 * std::f64::consts::PI * 13.5f64.powi(2) * v.powi(3);
            prop_assert!(power <= betz + 1e-9);
            if omega > 0.0 {
                let torque = aerodynamic_torque(v, omega, &p).unwrap();
                prop_assert!((torque * omega - power).abs() <= 1e-12 * power.abs().max(1.0));
            }
        }

        #[test]
        fn interpolation_hits_knots(i in 0usize..8) {
            let p = v27_like();
            let (l, cp) = p.cp_table().knots().nth(i).unwrap();
            prop_assert_eq!(p.cp(l), cp);
        }
    }
}
