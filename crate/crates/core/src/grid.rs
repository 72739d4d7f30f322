//! Three-phase line segment with concentrated parameters.
//!
//! Series branch (per meter): `L di/dt + R i = (u - u_far) / dx`, where `i`
//! flows from the segment node towards the far end. Node (per meter):
//! `C du/dt + G u = i_net / dx` with `i_net` the net current injected into
//! the node (external injection minus the series current leaving it).
//! `L` and `R` are built from sequence values through the symmetric
//! components transform; `C` and `G` follow the earth/line pattern
//! (diagonal `E + 2L`, off-diagonal `-L`).
//!
//! The phasor (RMS) solution uses peak-amplitude phasors and solves the three
//! sequence networks independently.

use num_complex::Complex;

use crate::geometry::Mat3;
use crate::scalar::Real;
use crate::{Error, Result};

pub type CMat3<T> = [[Complex<T>; 3]; 3];
pub type Phasors<T> = [Complex<T>; 3];

/// Names of the sequence networks, in transform order.
pub const SEQUENCE_NAMES: [&str; 3] = ["zero", "positive", "negative"];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineSegmentParams<T> {
    pub r0: T,
    pub r1: T,
    pub l0: T,
    pub l1: T,
    pub c_earth: T,
    pub c_line: T,
    pub g_earth: T,
    pub g_line: T,
    pub dx: T,
}

impl<T: Real> LineSegmentParams<T> {
    /// Checks the parameter invariants; warnings (such as `R0 < R1`) are
    /// returned separately and do not fail validation.
    pub fn validate(&self) -> Result<Vec<String>> {
        let mut issues = Vec::new();
        let all = [
            self.r0,
            self.r1,
            self.l0,
            self.l1,
            self.c_earth,
            self.c_line,
            self.g_earth,
            self.g_line,
            self.dx,
        ];
        if all.iter().any(|v| !v.is_finite()) {
            issues.push("line parameters must be finite".to_string());
        }
        if !(self.dx > T::zero()) {
            issues.push(format!("segment length must be > 0, got {}", self.dx));
        }
        if !(self.r1 > T::zero()) {
            issues.push(format!(
                "positive-sequence resistance must be > 0, got {}",
                self.r1
            ));
        }
        if !(self.l1 > T::zero()) {
            issues.push(format!(
                "positive-sequence inductance must be > 0, got {}",
                self.l1
            ));
        }
        if !(self.r0 >= T::zero()) || !(self.l0 > T::zero()) {
            issues.push("zero-sequence resistance must be >= 0 and inductance > 0".into());
        }
        for (name, v) in [
            ("earth capacitance", self.c_earth),
            ("line capacitance", self.c_line),
            ("earth conductance", self.g_earth),
            ("line conductance", self.g_line),
        ] {
            if !(v >= T::zero()) {
                issues.push(format!("{name} must be >= 0, got {v}"));
            }
        }
        if !issues.is_empty() {
            return Err(Error::Validation(issues));
        }
        let mut warnings = Vec::new();
        if self.r0 < self.r1 {
            warnings.push("zero-sequence resistance below positive-sequence resistance".into());
        }
        Ok(warnings)
    }

    /// Shunt capacitance per meter of each sequence network.
    pub fn sequence_capacitance(&self) -> [T; 3] {
        let three = T::lit(3.0);
        let pos = self.c_earth + three * self.c_line;
        [self.c_earth, pos, pos]
    }

    pub fn sequence_conductance(&self) -> [T; 3] {
        let three = T::lit(3.0);
        let pos = self.g_earth + three * self.g_line;
        [self.g_earth, pos, pos]
    }
}

fn czero<T: Real>() -> Complex<T> {
    Complex::new(T::zero(), T::zero())
}

/// `a = exp(j 2 pi / 3)`.
fn op_a<T: Real>() -> Complex<T> {
    Complex::from_polar(T::one(), T::lit(2.0) * T::PI() / T::lit(3.0))
}

/// Symmetric components transform `T` (phase to sequence, with the 1/3
/// factor) and its inverse (sequence to phase).
pub fn sequence_transform<T: Real>() -> (CMat3<T>, CMat3<T>) {
    let a = op_a::<T>();
    let a2 = a * a;
    let one = Complex::new(T::one(), T::zero());
    let third = T::lit(1.0 / 3.0);
    let fwd = [
        [one * third, one * third, one * third],
        [one * third, a * third, a2 * third],
        [one * third, a2 * third, a * third],
    ];
    let inv = [[one, one, one], [one, a2, a], [one, a, a2]];
    (fwd, inv)
}

pub fn cmat_mul<T: Real>(x: &CMat3<T>, y: &CMat3<T>) -> CMat3<T> {
    let mut out = [[czero(); 3]; 3];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = (0..3).fold(czero(), |acc, k| acc + x[i][k] * y[k][j]);
        }
    }
    out
}

pub fn cmat_vec<T: Real>(m: &CMat3<T>, v: &Phasors<T>) -> Phasors<T> {
    let mut out = [czero(); 3];
    for (i, o) in out.iter_mut().enumerate() {
        *o = (0..3).fold(czero(), |acc, k| acc + m[i][k] * v[k]);
    }
    out
}

/// Phase to sequence components `(0, 1, 2)`.
pub fn to_sequence<T: Real>(phases: &Phasors<T>) -> Phasors<T> {
    cmat_vec(&sequence_transform().0, phases)
}

/// Sequence components `(0, 1, 2)` to phases.
pub fn from_sequence<T: Real>(seq: &Phasors<T>) -> Phasors<T> {
    cmat_vec(&sequence_transform().1, seq)
}

/// Phase-domain matrix `T^-1 diag(x0, x1, x1) T`. Fails when the
/// similarity transform leaves an imaginary residue above rounding level.
pub fn phase_matrix_from_sequence<T: Real>(x0: T, x1: T) -> Result<Mat3<T>> {
    let (fwd, inv) = sequence_transform::<T>();
    let mut d = [[czero(); 3]; 3];
    d[0][0] = Complex::new(x0, T::zero());
    d[1][1] = Complex::new(x1, T::zero());
    d[2][2] = Complex::new(x1, T::zero());
    let full = cmat_mul(&cmat_mul(&inv, &d), &fwd);
    let scale = x0.abs().max(x1.abs());
    let tol = T::lit(64.0) * T::epsilon() * scale;
    let mut out = [[T::zero(); 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            if full[i][j].im.abs() > tol {
                return Err(Error::Domain(format!(
                    "imaginary residue {} in phase matrix entry ({i},{j})",
                    full[i][j].im
                )));
            }
            out[i][j] = full[i][j].re;
        }
    }
    Ok(Mat3::from_rows(out))
}

/// Earth/line pattern matrix: diagonal `e + 2 l`, off-diagonal `-l`.
pub fn shunt_pattern<T: Real>(earth: T, line: T) -> Mat3<T> {
    let d = earth + T::lit(2.0) * line;
    let o = -line;
    Mat3::from_rows([[d, o, o], [o, d, o], [o, o, d]])
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseMatrices<T> {
    pub inductance: Mat3<T>,
    pub resistance: Mat3<T>,
    pub capacitance: Mat3<T>,
    pub conductance: Mat3<T>,
}

pub fn phase_matrices<T: Real>(params: &LineSegmentParams<T>) -> Result<PhaseMatrices<T>> {
    params.validate()?;
    Ok(PhaseMatrices {
        inductance: phase_matrix_from_sequence(params.l0, params.l1)?,
        resistance: phase_matrix_from_sequence(params.r0, params.r1)?,
        capacitance: shunt_pattern(params.c_earth, params.c_line),
        conductance: shunt_pattern(params.g_earth, params.g_line),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LineSegmentState<T> {
    /// Series currents, node towards far end.
    pub i_abc: [T; 3],
    /// Node voltages.
    pub u_abc: [T; 3],
}

/// Segment with cached matrices for time-domain integration. The node may
/// carry an extra per-phase shunt (a local load) on top of the line shunt.
#[derive(Debug, Clone, PartialEq)]
pub struct SegmentModel<T> {
    params: LineSegmentParams<T>,
    matrices: PhaseMatrices<T>,
    inductance_inv: Mat3<T>,
    node_capacitance: Mat3<T>,
    node_capacitance_inv: Mat3<T>,
    node_conductance: Mat3<T>,
}

impl<T: Real> SegmentModel<T> {
    pub fn new(params: LineSegmentParams<T>) -> Result<Self> {
        Self::with_node_shunt(params, T::zero(), T::zero())
    }

    /// `shunt_conductance` in S and `shunt_capacitance` in F per phase to
    /// ground at the node.
    pub fn with_node_shunt(
        params: LineSegmentParams<T>,
        shunt_conductance: T,
        shunt_capacitance: T,
    ) -> Result<Self> {
        let matrices = phase_matrices(&params)?;
        let inductance_inv = matrices
            .inductance
            .inverse()
            .ok_or_else(|| Error::Singular("phase inductance matrix".into()))?;
        let dx = params.dx;
        let scale = |m: &Mat3<T>, s: T| {
            let mut out = *m;
            out.m.iter_mut().flatten().for_each(|v| *v *= s);
            out
        };
        let add_diag = |m: Mat3<T>, d: T| {
            let mut out = m;
            for k in 0..3 {
                out.m[k][k] += d;
            }
            out
        };
        let node_capacitance = add_diag(scale(&matrices.capacitance, dx), shunt_capacitance);
        let node_conductance = add_diag(scale(&matrices.conductance, dx), shunt_conductance);
        let cap_seq = params.sequence_capacitance();
        if !(cap_seq[0] * dx + shunt_capacitance > T::zero())
            || !(cap_seq[1] * dx + shunt_capacitance > T::zero())
        {
            return Err(Error::Validation(vec![
                "zero node capacitance makes the node equation algebraic; use RMS mode".into(),
            ]));
        }
        let node_capacitance_inv = node_capacitance
            .inverse()
            .ok_or_else(|| Error::Singular("node capacitance matrix".into()))?;
        Ok(SegmentModel {
            params,
            matrices,
            inductance_inv,
            node_capacitance,
            node_capacitance_inv,
            node_conductance,
        })
    }

    pub fn params(&self) -> &LineSegmentParams<T> {
        &self.params
    }

    pub fn matrices(&self) -> &PhaseMatrices<T> {
        &self.matrices
    }

    /// `(di/dt, du/dt)` for far-end voltages `u_far` and the external current
    /// `i_inject` flowing into the node.
    pub fn derivative(
        &self,
        state: &LineSegmentState<T>,
        u_far: [T; 3],
        i_inject: [T; 3],
    ) -> ([T; 3], [T; 3]) {
        let dx = self.params.dx;
        let r_i = self.matrices.resistance.mul_arr(state.i_abc);
        let mut drive = [T::zero(); 3];
        for k in 0..3 {
            drive[k] = (state.u_abc[k] - u_far[k]) / dx - r_i[k];
        }
        let di = self.inductance_inv.mul_arr(drive);
        let g_u = self.node_conductance.mul_arr(state.u_abc);
        let mut net = [T::zero(); 3];
        for k in 0..3 {
            net[k] = i_inject[k] - state.i_abc[k] - g_u[k];
        }
        let du = self.node_capacitance_inv.mul_arr(net);
        (di, du)
    }

    /// Magnetic plus electric energy stored in the segment.
    pub fn stored_energy(&self, state: &LineSegmentState<T>) -> T {
        let half = T::lit(0.5);
        let li = self.matrices.inductance.mul_arr(state.i_abc);
        let cu = self.node_capacitance.mul_arr(state.u_abc);
        half * self.params.dx * dot3(state.i_abc, li) + half * dot3(state.u_abc, cu)
    }

    /// Resistive plus shunt conductance losses.
    pub fn losses(&self, state: &LineSegmentState<T>) -> T {
        let ri = self.matrices.resistance.mul_arr(state.i_abc);
        let gu = self.node_conductance.mul_arr(state.u_abc);
        self.params.dx * dot3(state.i_abc, ri) + dot3(state.u_abc, gu)
    }
}

pub fn dot3<T: Real>(a: [T; 3], b: [T; 3]) -> T {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Free-function form of [`SegmentModel::derivative`] for a bare segment.
pub fn segment_derivative<T: Real>(
    state: &LineSegmentState<T>,
    u_far: [T; 3],
    i_inject: [T; 3],
    model: &SegmentModel<T>,
) -> ([T; 3], [T; 3]) {
    model.derivative(state, u_far, i_inject)
}

/// Phasor solution at the receiving node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RmsSolution<T> {
    pub receiving: Phasors<T>,
    /// Line currents from the sending end into the receiving node.
    pub current: Phasors<T>,
}

/// Series impedance and line shunt admittance of each sequence network.
pub fn sequence_network<T: Real>(
    params: &LineSegmentParams<T>,
    f_grid: T,
) -> ([Complex<T>; 3], [Complex<T>; 3]) {
    let w = T::lit(2.0) * T::PI() * f_grid;
    let dx = params.dx;
    let r = [params.r0, params.r1, params.r1];
    let l = [params.l0, params.l1, params.l1];
    let c = params.sequence_capacitance();
    let g = params.sequence_conductance();
    let mut z = [czero(); 3];
    let mut y = [czero(); 3];
    for k in 0..3 {
        z[k] = Complex::new(r[k] * dx, w * l[k] * dx);
        y[k] = Complex::new(g[k] * dx, w * c[k] * dx);
    }
    (z, y)
}

/// Sending-end phasors through the segment into a receiving node that holds
/// the line shunt, a per-phase load admittance, plus optional extra
/// per-sequence admittances and current injections.
pub fn rms_solve_sequences<T: Real>(
    sending: &Phasors<T>,
    params: &LineSegmentParams<T>,
    f_grid: T,
    extra_admittance: [Complex<T>; 3],
    injection: [Complex<T>; 3],
) -> Result<(Phasors<T>, Phasors<T>)> {
    if !(f_grid > T::zero()) {
        return Err(Error::domain("grid frequency must be > 0"));
    }
    let (z, y_line) = sequence_network(params, f_grid);
    let vs = to_sequence(sending);
    let mut vr = [czero(); 3];
    let mut il = [czero(); 3];
    for k in 0..3 {
        let y = y_line[k] + extra_admittance[k];
        let den = Complex::new(T::one(), T::zero()) + z[k] * y;
        if den.norm() <= T::lit(1e3) * T::epsilon() {
            return Err(Error::Singular(format!("{} sequence network", SEQUENCE_NAMES[k])));
        }
        vr[k] = (vs[k] + z[k] * injection[k]) / den;
        il[k] = y * vr[k] - injection[k];
    }
    Ok((vr, il))
}

/// Algebraic phasor solution of the segment feeding a per-phase load.
pub fn rms_phasor_solve<T: Real>(
    sending: &Phasors<T>,
    load: Complex<T>,
    params: &LineSegmentParams<T>,
    f_grid: T,
) -> Result<RmsSolution<T>> {
    params.validate()?;
    let (vr, il) = rms_solve_sequences(sending, params, f_grid, [load; 3], [czero(); 3])?;
    Ok(RmsSolution {
        receiving: from_sequence(&vr),
        current: from_sequence(&il),
    })
}

/// Instantaneous phase values `Re(V e^{j w t})` of a phasor set.
pub fn instantaneous<T: Real>(phasors: &Phasors<T>, omega: T, t: T) -> [T; 3] {
    let rot = Complex::from_polar(T::one(), omega * t);
    [
        (phasors[0] * rot).re,
        (phasors[1] * rot).re,
        (phasors[2] * rot).re,
    ]
}

/// Balanced positive-sequence phase set with phase-a phasor `va`.
pub fn balanced<T: Real>(va: Complex<T>) -> Phasors<T> {
    let a = op_a::<T>();
    [va, va * a * a, va * a]
}
