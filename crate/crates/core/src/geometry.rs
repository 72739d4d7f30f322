//! Coordinate frames of a turbine in a wind park.
//!
//! Four frames are chained: wind park (X east, Y downwind, Z up), turbine
//! (park frame translated to the tower foot), turbine disc (turbine frame
//! translated to the hub) and rotor (disc frame turned by the azimuth and
//! elevation rotations). Velocities are unaffected by the two translations.

use std::ops::{Add, Mul, Neg, Sub};

use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec3<T> {
    pub x: T,
    pub y: T,
    pub z: T,
}

impl<T: Real> Vec3<T> {
    pub const fn new(x: T, y: T, z: T) -> Self {
        Vec3 { x, y, z }
    }

    pub fn zero() -> Self {
        Vec3::new(T::zero(), T::zero(), T::zero())
    }

    pub fn dot(self, o: Self) -> T {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn norm(self) -> T {
        self.dot(self).sqrt()
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    pub fn distance(self, o: Self) -> T {
        (self - o).norm()
    }
}

impl<T: Real> Add for Vec3<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Vec3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl<T: Real> Sub for Vec3<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Vec3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl<T: Real> Neg for Vec3<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Vec3::new(-self.x, -self.y, -self.z)
    }
}

impl<T: Real> Mul<T> for Vec3<T> {
    type Output = Self;
    fn mul(self, s: T) -> Self {
        Vec3::new(self.x * s, self.y * s, self.z * s)
    }
}

/// Row-major 3x3 matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat3<T> {
    pub m: [[T; 3]; 3],
}

impl<T: Real> Mat3<T> {
    pub const fn from_rows(m: [[T; 3]; 3]) -> Self {
        Mat3 { m }
    }

    pub fn identity() -> Self {
        Self::diag(T::one(), T::one(), T::one())
    }

    pub fn diag(a: T, b: T, c: T) -> Self {
        let z = T::zero();
        Mat3::from_rows([[a, z, z], [z, b, z], [z, z, c]])
    }

    pub fn transpose(&self) -> Self {
        let m = &self.m;
        Mat3::from_rows([
            [m[0][0], m[1][0], m[2][0]],
            [m[0][1], m[1][1], m[2][1]],
            [m[0][2], m[1][2], m[2][2]],
        ])
    }

    pub fn det(&self) -> T {
        let m = &self.m;
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }

    /// Inverse by cofactors; `None` when the determinant vanishes.
    pub fn inverse(&self) -> Option<Self> {
        let d = self.det();
        if d == T::zero() || !d.is_finite() {
            return None;
        }
        let m = &self.m;
        let c = |r0: usize, r1: usize, c0: usize, c1: usize| m[r0][c0] * m[r1][c1] - m[r0][c1] * m[r1][c0];
        let adj = [
            [c(1, 2, 1, 2), -c(0, 2, 1, 2), c(0, 1, 1, 2)],
            [-c(1, 2, 0, 2), c(0, 2, 0, 2), -c(0, 1, 0, 2)],
            [c(1, 2, 0, 1), -c(0, 2, 0, 1), c(0, 1, 0, 1)],
        ];
        let mut out = Mat3::from_rows(adj);
        for row in out.m.iter_mut() {
            for v in row.iter_mut() {
                *v /= d;
            }
        }
        Some(out)
    }

    pub fn mul_vec(&self, v: Vec3<T>) -> Vec3<T> {
        let m = &self.m;
        Vec3::new(
            m[0][0] * v.x + m[0][1] * v.y + m[0][2] * v.z,
            m[1][0] * v.x + m[1][1] * v.y + m[1][2] * v.z,
            m[2][0] * v.x + m[2][1] * v.y + m[2][2] * v.z,
        )
    }

    pub fn mul_arr(&self, v: [T; 3]) -> [T; 3] {
        let r = self.mul_vec(Vec3::new(v[0], v[1], v[2]));
        [r.x, r.y, r.z]
    }

    pub fn matmul(&self, o: &Self) -> Self {
        let mut out = [[T::zero(); 3]; 3];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = (0..3).map(|k| self.m[i][k] * o.m[k][j]).sum();
            }
        }
        Mat3::from_rows(out)
    }

    /// Largest absolute entry-wise difference.
    pub fn max_abs_diff(&self, o: &Self) -> T {
        let mut worst = T::zero();
        for i in 0..3 {
            for j in 0..3 {
                worst = worst.max((self.m[i][j] - o.m[i][j]).abs());
            }
        }
        worst
    }
}

/// Rotor elevation (cone) angle `A_K` and azimuth angle `A_Z`, in radians,
/// each normalized into (-pi, pi].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameAngles<T> {
    elevation: T,
    azimuth: T,
}

impl<T: Real> FrameAngles<T> {
    pub fn new(elevation: T, azimuth: T) -> Result<Self, crate::Error> {
        if !elevation.is_finite() || !azimuth.is_finite() {
            return Err(crate::Error::domain("frame angles must be finite"));
        }
        Ok(FrameAngles {
            elevation: wrap_angle(elevation),
            azimuth: wrap_angle(azimuth),
        })
    }

    pub fn elevation(&self) -> T {
        self.elevation
    }

    pub fn azimuth(&self) -> T {
        self.azimuth
    }
}

/// Maps an angle into (-pi, pi].
pub fn wrap_angle<T: Real>(a: T) -> T {
    let two_pi = T::PI() + T::PI();
    let mut r = a % two_pi;
    if r <= -T::PI() {
        r += two_pi;
    } else if r > T::PI() {
        r -= two_pi;
    }
    r
}

/// Rotation about the x axis by the elevation angle `A_K`.
pub fn elevation_matrix<T: Real>(a_k: T) -> Mat3<T> {
    let (s, c) = a_k.sin_cos();
    let (o, z) = (T::one(), T::zero());
    Mat3::from_rows([[o, z, z], [z, c, -s], [z, s, c]])
}

/// Rotation about the z axis by the azimuth angle `A_Z`.
pub fn azimuth_matrix<T: Real>(a_z: T) -> Mat3<T> {
    let (s, c) = a_z.sin_cos();
    let (o, z) = (T::one(), T::zero());
    Mat3::from_rows([[c, -s, z], [s, c, z], [z, z, o]])
}

/// Composite park-to-rotor rotation `T_EL * T_AZ` (azimuth applied first).
pub fn rotor_rotation<T: Real>(angles: FrameAngles<T>) -> Mat3<T> {
    elevation_matrix(angles.elevation()).matmul(&azimuth_matrix(angles.azimuth()))
}

/// Wind park frame to turbine frame: velocity passes through, the position
/// is shifted by the turbine's ground coordinates.
pub fn wind_to_turbine<T: Real>(
    velocity: Vec3<T>,
    position: Vec3<T>,
    turbine_xy: (T, T),
) -> (Vec3<T>, Vec3<T>) {
    (
        velocity,
        position - Vec3::new(turbine_xy.0, turbine_xy.1, T::zero()),
    )
}

/// Turbine frame to disc frame: lowers the origin to hub height.
pub fn turbine_to_disc<T: Real>(position: Vec3<T>, nacelle_height: T) -> Vec3<T> {
    position - Vec3::new(T::zero(), T::zero(), nacelle_height)
}

/// Disc frame to rotor frame.
pub fn disc_to_rotor<T: Real>(
    velocity: Vec3<T>,
    position: Vec3<T>,
    angles: FrameAngles<T>,
) -> (Vec3<T>, Vec3<T>) {
    let rot = rotor_rotation(angles);
    (rot.mul_vec(velocity), rot.mul_vec(position))
}

/// Full chain from park coordinates to rotor coordinates.
pub fn park_to_rotor<T: Real>(
    velocity: Vec3<T>,
    position: Vec3<T>,
    turbine_xy: (T, T),
    nacelle_height: T,
    angles: FrameAngles<T>,
) -> (Vec3<T>, Vec3<T>) {
    let (v_t, p_t) = wind_to_turbine(velocity, position, turbine_xy);
    let p_d = turbine_to_disc(p_t, nacelle_height);
    disc_to_rotor(v_t, p_d, angles)
}
