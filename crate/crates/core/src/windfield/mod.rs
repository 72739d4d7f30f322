//! Stationary, spatially correlated wind-speed series on a grid of points.
//!
//! Each point has a Gaussian marginal with mean from the power-law height
//! profile and a standard deviation from either a turbulence intensity or
//! the roughness-length (Panowsky) relation. Pairs of points are linked by a
//! cross-spectral density built from a magnitude-squared coherence and a
//! phase (the angle of the transfer function between the points).
//!
//! One-sided target spectra are normalized so that their integral over
//! `[0, Nyquist]` equals the point variance.

mod synth;
mod verify;
mod welch;

use std::collections::HashSet;
use std::io::{BufRead, Write};
use std::path::Path;

use crate::geometry::Vec3;
use crate::scalar::Real;
use crate::table::Table;
use crate::{Error, Result};

pub use synth::{bin_variances, generate, synthesis_frequencies, MIN_STEPS as MIN_WIND_STEPS};
pub use verify::{format_report, verify_series, Check, WindTolerances};
pub use welch::{estimate_statistics, PairStats, PointStats, StatisticsReport, WelchConfig};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridPoint<T> {
    pub id: i64,
    /// Wind park coordinates; `z` is the height above ground.
    pub position: Vec3<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Turbulence<T> {
    /// `sigma = mu * intensity`.
    Direct { intensity: T },
    /// `sigma = mu / ln(z / z0)`.
    Panowsky { roughness_length: T },
}

#[derive(Debug, Clone, PartialEq)]
pub enum PsdModel<T> {
    /// `f S(f) / sigma^2 = 4 n / (1 + 6 n)^(5/3)` with `n = f L / mu`.
    Kaimal { length_scale: T },
    /// Spectral shape `(frequency [Hz], density)`; rescaled to the point variance.
    Tabulated(Table<T>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum CoherenceModel<T> {
    /// `exp(-a f d / mu)` with `d` the point distance and `mu` the mean of the
    /// two point means.
    Davenport { decay: T },
    /// Coherence against frequency, shared by every pair of distinct points.
    Tabulated(Table<T>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum AngleModel<T> {
    Zero,
    /// Phase `(frequency [Hz], angle [rad])` of point `i` relative to point
    /// `j` for `i < j` in list order; reversed pairs get the negated angle.
    Tabulated(Table<T>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct WindFieldSpec<T> {
    pub points: Vec<GridPoint<T>>,
    pub nacelle_height: T,
    /// Mean wind speed at nacelle height.
    pub nacelle_wind: T,
    pub shear_exponent: T,
    pub turbulence: Turbulence<T>,
    pub psd: PsdModel<T>,
    pub coherence: CoherenceModel<T>,
    pub angle_tf: AngleModel<T>,
    pub sample_rate: T,
    pub duration: T,
    pub seed: u64,
}

/// Gaussian probability density.
pub fn gaussian_pdf<T: Real>(v: T, mu: T, sigma: T) -> Result<T> {
    if !(sigma > T::zero()) {
        return Err(Error::domain(format!("sigma must be > 0, got {sigma}")));
    }
    let z = (v - mu) / sigma;
    let two_pi = T::lit(2.0) * T::PI();
    Ok((-(z * z) / T::lit(2.0)).exp() / (two_pi * sigma * sigma).sqrt())
}

impl<T: Real> WindFieldSpec<T> {
    /// All violated invariants, each naming the offending field.
    pub fn validation_issues(&self) -> Vec<String> {
        let mut issues = Vec::new();
        let mut check = |ok: bool, msg: String| {
            if !ok {
                issues.push(msg);
            }
        };
        check(
            self.sample_rate > T::zero() && self.sample_rate.is_finite(),
            format!("wind.sample_rate_hz must be > 0, got {}", self.sample_rate),
        );
        check(
            self.duration > T::zero() && self.duration.is_finite(),
            format!("wind.duration_s must be > 0, got {}", self.duration),
        );
        check(
            self.shear_exponent >= T::zero(),
            format!("wind.shear_exponent must be >= 0, got {}", self.shear_exponent),
        );
        check(
            self.nacelle_height > T::zero(),
            format!("wind.nacelle_height_m must be > 0, got {}", self.nacelle_height),
        );
        check(
            self.nacelle_wind >= T::zero() && self.nacelle_wind.is_finite(),
            format!("wind.nacelle_wind_m_s must be >= 0, got {}", self.nacelle_wind),
        );
        check(!self.points.is_empty(), "wind.points must not be empty".into());
        let mut ids = HashSet::new();
        for p in &self.points {
            check(ids.insert(p.id), format!("wind.points: duplicate id {}", p.id));
            check(
                p.position.is_finite() && p.position.z > T::zero(),
                format!("wind.points[id={}]: height must be > 0", p.id),
            );
        }
        match &self.turbulence {
            Turbulence::Direct { intensity } => check(
                *intensity >= T::zero() && intensity.is_finite(),
                format!("wind.turbulence.direct.intensity must be >= 0, got {intensity}"),
            ),
            Turbulence::Panowsky { roughness_length } => {
                check(
                    *roughness_length > T::zero(),
                    format!(
                        "wind.turbulence.panowsky.roughness_length_m must be > 0, got {roughness_length}"
                    ),
                );
                for p in &self.points {
                    check(
                        p.position.z > *roughness_length,
                        format!(
                            "wind.points[id={}]: height must exceed the roughness length",
                            p.id
                        ),
                    );
                }
            }
        }
        match &self.psd {
            PsdModel::Kaimal { length_scale } => check(
                *length_scale > T::zero() && length_scale.is_finite(),
                format!("wind.psd.kaimal.length_scale_m must be > 0, got {length_scale}"),
            ),
            PsdModel::Tabulated(t) => {
                check(
                    t.first_x() >= T::zero() && t.ys().iter().all(|&y| y >= T::zero()),
                    "wind.psd.tabulated: frequencies and densities must be >= 0".into(),
                );
                if self.sample_rate > T::zero() {
                    check(
                        t.integral(T::zero(), self.nyquist()) > T::zero(),
                        "wind.psd.tabulated: spectrum has no power below Nyquist".into(),
                    );
                }
            }
        }
        match &self.coherence {
            CoherenceModel::Davenport { decay } => check(
                *decay >= T::zero() && decay.is_finite(),
                format!("wind.coherence.davenport.decay must be >= 0, got {decay}"),
            ),
            CoherenceModel::Tabulated(t) => check(
                t.first_x() >= T::zero() && t.ys().iter().all(|&y| y >= T::zero() && y <= T::one()),
                "wind.coherence.tabulated: frequencies >= 0 and coherence in [0, 1]".into(),
            ),
        }
        if let AngleModel::Tabulated(t) = &self.angle_tf {
            check(
                t.first_x() >= T::zero(),
                "wind.angle_tf.tabulated: frequencies must be >= 0".into(),
            );
        }
        issues
    }

    pub fn validate(&self) -> Result<()> {
        let issues = self.validation_issues();
        if issues.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(issues))
        }
    }

    pub fn nyquist(&self) -> T {
        self.sample_rate / T::lit(2.0)
    }

    pub fn n_steps(&self) -> usize {
        (self.duration * self.sample_rate).round().to_usize().unwrap_or(0)
    }

    fn point_index(&self, point: &GridPoint<T>) -> Option<usize> {
        self.points.iter().position(|p| p.id == point.id)
    }
}

/// Power-law mean speed at height `z`.
pub fn mean_velocity_at_height<T: Real>(spec: &WindFieldSpec<T>, z: T) -> Result<T> {
    if !(z >= T::zero()) {
        return Err(Error::domain(format!("height must be >= 0, got {z}")));
    }
    if !(spec.nacelle_height > T::zero()) {
        return Err(Error::domain("nacelle height must be > 0"));
    }
    if z == T::zero() {
        return Ok(if spec.shear_exponent == T::zero() {
            spec.nacelle_wind
        } else {
            T::zero()
        });
    }
    Ok(spec.nacelle_wind * (z / spec.nacelle_height).powf(spec.shear_exponent))
}

/// Standard deviation of the wind speed for mean `mu` at height `z`.
pub fn turbulence_sigma<T: Real>(spec: &WindFieldSpec<T>, mu: T, z: T) -> Result<T> {
    if !(mu >= T::zero()) {
        return Err(Error::domain(format!("mean speed must be >= 0, got {mu}")));
    }
    match spec.turbulence {
        Turbulence::Direct { intensity } => Ok(mu * intensity),
        Turbulence::Panowsky { roughness_length } => {
            if !(z > roughness_length) {
                return Err(Error::domain(format!(
                    "Panowsky model needs height {z} above roughness length {roughness_length}"
                )));
            }
            Ok(mu / (z / roughness_length).ln())
        }
    }
}

/// Mean and standard deviation at a point.
pub fn point_moments<T: Real>(spec: &WindFieldSpec<T>, point: &GridPoint<T>) -> Result<(T, T)> {
    let mu = mean_velocity_at_height(spec, point.position.z)?;
    Ok((mu, turbulence_sigma(spec, mu, point.position.z)?))
}

fn kaimal_unit<T: Real>(f: T, length_scale: T, mu: T) -> T {
    // density for unit variance, integrating to 1 over [0, inf)
    let t = length_scale / mu;
    T::lit(4.0) * t / (T::one() + T::lit(6.0) * f * t).powf(T::lit(5.0 / 3.0))
}

fn kaimal_cumulative<T: Real>(f: T, length_scale: T, mu: T) -> T {
    let t = length_scale / mu;
    T::one() - (T::one() + T::lit(6.0) * f * t).powf(T::lit(-2.0 / 3.0))
}

/// One-sided target PSD at frequency `f` for `point`. Tabulated spectra are
/// clamped to their end values outside the knot range.
pub fn target_psd<T: Real>(spec: &WindFieldSpec<T>, point: &GridPoint<T>, f: T) -> Result<T> {
    if !(f >= T::zero()) {
        return Err(Error::domain(format!("frequency must be >= 0, got {f}")));
    }
    let (mu, sigma) = point_moments(spec, point)?;
    let var = sigma * sigma;
    if var == T::zero() {
        return Ok(T::zero());
    }
    let nyquist = spec.nyquist();
    match &spec.psd {
        PsdModel::Kaimal { length_scale } => {
            Ok(var * kaimal_unit(f, *length_scale, mu) / kaimal_cumulative(nyquist, *length_scale, mu))
        }
        PsdModel::Tabulated(t) => {
            let area = t.integral(T::zero(), nyquist);
            if !(area > T::zero()) {
                return Err(Error::domain("tabulated PSD has no power below Nyquist"));
            }
            Ok(var * t.eval(f) / area)
        }
    }
}

/// Magnitude-squared coherence between two points.
pub fn target_coherence<T: Real>(
    spec: &WindFieldSpec<T>,
    i: &GridPoint<T>,
    j: &GridPoint<T>,
    f: T,
) -> Result<T> {
    if !(f >= T::zero()) {
        return Err(Error::domain(format!("frequency must be >= 0, got {f}")));
    }
    if i.id == j.id {
        return Ok(T::one());
    }
    match &spec.coherence {
        CoherenceModel::Davenport { decay } => {
            let d = i.position.distance(j.position);
            if d == T::zero() {
                return Ok(T::one());
            }
            let mu = (mean_velocity_at_height(spec, i.position.z)?
                + mean_velocity_at_height(spec, j.position.z)?)
                / T::lit(2.0);
            if mu == T::zero() {
                return Ok(T::zero());
            }
            Ok((-*decay * f * d / mu).exp())
        }
        CoherenceModel::Tabulated(t) => Ok(t.eval(f)),
    }
}

/// Cross-spectral phase of `i` relative to `j`.
pub fn target_angle<T: Real>(spec: &WindFieldSpec<T>, i: &GridPoint<T>, j: &GridPoint<T>, f: T) -> T {
    match &spec.angle_tf {
        AngleModel::Zero => T::zero(),
        AngleModel::Tabulated(t) => {
            let (a, b) = (spec.point_index(i), spec.point_index(j));
            match (a, b) {
                (Some(a), Some(b)) if a < b => t.eval(f),
                (Some(a), Some(b)) if a > b => -t.eval(f),
                _ => T::zero(),
            }
        }
    }
}

/// Synthesized series: one row per grid point, `samples[p][k]` at `t = k dt`.
#[derive(Debug, Clone, PartialEq)]
pub struct WindSeries<T> {
    pub dt: T,
    pub point_ids: Vec<i64>,
    pub samples: Vec<Vec<T>>,
}

impl<T: Real> WindSeries<T> {
    pub fn n_points(&self) -> usize {
        self.samples.len()
    }

    pub fn n_steps(&self) -> usize {
        self.samples.first().map_or(0, Vec::len)
    }

    pub fn duration(&self) -> T {
        self.dt * T::from_usize(self.n_steps()).unwrap()
    }

    /// Sample held at time `t` (zero-order hold), `None` past the end.
    pub fn sample_index(&self, t: T) -> Option<usize> {
        if t < T::zero() {
            return None;
        }
        let k = (t / self.dt).floor().to_usize()?;
        (k < self.n_steps()).then_some(k)
    }

    /// CSV with header `t,v_p<id>,...`, 9 significant digits.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        let mut header = String::from("t");
        for id in &self.point_ids {
            header.push_str(&format!(",v_p{id}"));
        }
        writeln!(w, "{header}")?;
        let dt = self.dt.to_f64_lossless();
        let mut line = String::new();
        for k in 0..self.n_steps() {
            line.clear();
            line.push_str(&crate::csvfmt::sig9(k as f64 * dt));
            for row in &self.samples {
                line.push(',');
                line.push_str(&crate::csvfmt::sig9(row[k].to_f64_lossless()));
            }
            writeln!(w, "{line}")?;
        }
        Ok(())
    }

    pub fn save_csv(&self, path: &Path) -> Result<()> {
        let f = std::fs::File::create(path)?;
        let mut w = std::io::BufWriter::new(f);
        self.write_csv(&mut w)?;
        w.flush()?;
        Ok(())
    }

    /// Reads a series written by [`WindSeries::write_csv`].
    pub fn read_csv<R: BufRead>(r: R) -> Result<Self> {
        let mut reader = csv::Reader::from_reader(r);
        let headers = reader
            .headers()
            .map_err(|e| Error::Parse(format!("wind CSV header: {e}")))?
            .clone();
        if headers.get(0) != Some("t") || headers.len() < 2 {
            return Err(Error::Parse("wind CSV must start with columns t,v_p<id>".into()));
        }
        let mut point_ids = Vec::new();
        for h in headers.iter().skip(1) {
            let id = h
                .strip_prefix("v_p")
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| Error::Parse(format!("bad wind CSV column {h:?}")))?;
            point_ids.push(id);
        }
        let mut times = Vec::new();
        let mut samples = vec![Vec::new(); point_ids.len()];
        for (line, rec) in reader.records().enumerate() {
            let rec = rec.map_err(|e| Error::Parse(format!("wind CSV row {}: {e}", line + 2)))?;
            let mut values = rec.iter().map(|s| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::Parse(format!("wind CSV row {}: {e}", line + 2)))
            });
            times.push(values.next().transpose()?.unwrap_or(0.0));
            for row in samples.iter_mut() {
                let v = values
                    .next()
                    .transpose()?
                    .ok_or_else(|| Error::Parse(format!("wind CSV row {} is short", line + 2)))?;
                row.push(T::lit(v));
            }
        }
        if times.len() < 2 {
            return Err(Error::Parse("wind CSV needs at least two rows".into()));
        }
        Ok(WindSeries {
            dt: T::lit(times[1] - times[0]),
            point_ids,
            samples,
        })
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    pub(crate) fn base_spec() -> WindFieldSpec<f64> {
        WindFieldSpec {
            points: vec![
                GridPoint {
                    id: 0,
                    position: Vec3::new(0.0, 0.0, 30.0),
                },
                GridPoint {
                    id: 1,
                    position: Vec3::new(10.0, 0.0, 30.0),
                },
            ],
            nacelle_height: 30.0,
            nacelle_wind: 10.0,
            shear_exponent: 0.2,
            turbulence: Turbulence::Direct { intensity: 0.15 },
            psd: PsdModel::Kaimal { length_scale: 10.0 },
            coherence: CoherenceModel::Davenport { decay: 7.5 },
            angle_tf: AngleModel::Zero,
            sample_rate: 20.0,
            duration: 204.8,
            seed: 7,
        }
    }

    /// Adaptive Simpson quadrature, the independent oracle for normalization checks.
    pub(crate) fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
        fn rec(
            f: &dyn Fn(f64) -> f64,
            a: f64,
            b: f64,
            fa: f64,
            fm: f64,
            fb: f64,
            whole: f64,
            tol: f64,
            depth: u32,
        ) -> f64 {
            let m = 0.5 * (a + b);
            let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
            let (flm, frm) = (f(lm), f(rm));
            let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
            let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
            if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
                return left + right + (left + right - whole) / 15.0;
            }
            rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
                + rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
        }
        let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
        let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
        rec(f, a, b, fa, fm, fb, whole, tol, 50)
    }

    #[test]
    fn gaussian_pdf_values() {
        let peak: f64 = gaussian_pdf(10.0, 10.0, 2.0).unwrap();
        assert!((peak - 0.199_471_140_200_716_35).abs() < 1e-12);
        for x in [0.1, 1.0, 3.7] {
            assert_eq!(
                gaussian_pdf(x, 0.0, 2.0).unwrap(),
                gaussian_pdf(-x, 0.0, 2.0).unwrap()
            );
            let (a, b) = (
                gaussian_pdf(10.0f64 + x, 10.0, 2.0).unwrap(),
                gaussian_pdf(10.0 - x, 10.0, 2.0).unwrap(),
            );
            assert!((a - b).abs() <= 1e-14 * a);
        }
        assert!(gaussian_pdf(1.0, 1.0, 0.0).is_err());
        assert!(gaussian_pdf(1.0, 1.0, -1.0).is_err());
    }

    #[test]
    fn gaussian_pdf_normalization() {
        // tails beyond 40 sigma are below double precision
        let f = |v: f64| gaussian_pdf(v, 10.0, 2.0).unwrap();
        let total = simpson(&f, 10.0 - 80.0, 10.0 + 80.0, 1e-12);
        assert!((total - 1.0).abs() < 1e-8, "{total}");
    }

    #[test]
    fn height_profile() {
        let s = base_spec();
        assert_eq!(mean_velocity_at_height(&s, 30.0).unwrap(), 10.0);
        assert!((mean_velocity_at_height(&s, 60.0).unwrap() - 11.486_983_549_970_35).abs() < 1e-10);
        assert_eq!(mean_velocity_at_height(&s, 0.0).unwrap(), 0.0);
        assert!(mean_velocity_at_height(&s, -1.0).is_err());
    }

    #[test]
    fn turbulence_models() {
        let mut s = base_spec();
        assert!((turbulence_sigma(&s, 10.0, 30.0).unwrap() - 1.5).abs() < 1e-15);
        s.turbulence = Turbulence::Direct { intensity: 0.0 };
        assert_eq!(turbulence_sigma(&s, 10.0, 30.0).unwrap(), 0.0);
        s.turbulence = Turbulence::Panowsky {
            roughness_length: 0.05,
        };
        let z = std::f64::consts::E * 0.05;
        assert!((turbulence_sigma(&s, 10.0, z).unwrap() - 10.0).abs() < 1e-12);
        assert!(turbulence_sigma(&s, 10.0, 0.05).is_err());
        assert!(turbulence_sigma(&s, 10.0, 0.01).is_err());
    }

    #[test]
    fn psd_integrates_to_variance_over_nyquist_band() {
        let s = base_spec();
        for psd in [
            PsdModel::Kaimal { length_scale: 10.0 },
            PsdModel::Kaimal { length_scale: 340.2 },
            PsdModel::Tabulated(Table::new(&[(0.0, 3.0), (0.5, 1.0), (4.0, 0.01)]).unwrap()),
        ] {
            let spec = WindFieldSpec { psd, ..s.clone() };
            let p = spec.points[0];
            let f = |x: f64| target_psd(&spec, &p, x).unwrap();
            // trapezoid oracle on a log-refined grid
            let n = 200_000;
            let mut total = 0.0;
            let mut prev = (0.0, f(0.0));
            for k in 1..=n {
                let x = 10.0 * (k as f64 / n as f64).powi(3);
                let y = f(x);
                total += 0.5 * (prev.1 + y) * (x - prev.0);
                prev = (x, y);
            }
            assert!((total / 2.25 - 1.0).abs() < 0.02, "{total}");
        }
    }

    #[test]
    fn tabulated_flat_band_and_kaimal_decay() {
        let mut s = base_spec();
        s.psd = PsdModel::Tabulated(Table::new(&[(1.0, 2.0), (3.0, 2.0)]).unwrap());
        let p = s.points[0];
        let a = target_psd(&s, &p, 1.5).unwrap();
        assert_eq!(a, target_psd(&s, &p, 2.5).unwrap());
        // clamped outside the knots, so flat everywhere: variance / nyquist
        assert!((a - 2.25 / 10.0).abs() < 1e-12);
        let k = base_spec();
        let mut prev = f64::INFINITY;
        for f in [0.5, 1.0, 5.0, 50.0, 500.0, 5e4] {
            let v = target_psd(&k, &p, f).unwrap();
            assert!(v < prev && v > 0.0);
            prev = v;
        }
        assert!(prev < 1e-6);
    }

    #[test]
    fn coherence_cases() {
        let s = base_spec();
        let (a, b) = (s.points[0], s.points[1]);
        assert_eq!(target_coherence(&s, &a, &a, 3.0).unwrap(), 1.0);
        assert_eq!(target_coherence(&s, &a, &b, 0.0).unwrap(), 1.0);
        let far = GridPoint {
            id: 9,
            position: Vec3::new(50.0, 0.0, 30.0),
        };
        let c = target_coherence(&s, &a, &far, 0.5).unwrap();
        assert!((c - (-18.75f64).exp()).abs() < 1e-20);
        assert!((c - 7.2e-9).abs() < 0.05e-9);
        assert_eq!(
            target_coherence(&s, &a, &b, 0.3).unwrap(),
            target_coherence(&s, &b, &a, 0.3).unwrap()
        );
    }

    #[test]
    fn angle_is_antisymmetric() {
        let mut s = base_spec();
        s.angle_tf = AngleModel::Tabulated(Table::new(&[(0.0, 0.2), (10.0, 1.2)]).unwrap());
        let (a, b) = (s.points[0], s.points[1]);
        assert!((target_angle(&s, &a, &b, 5.0) - 0.7).abs() < 1e-12);
        assert_eq!(target_angle(&s, &b, &a, 5.0), -target_angle(&s, &a, &b, 5.0));
        assert_eq!(target_angle(&s, &a, &a, 5.0), 0.0);
    }

    #[test]
    fn validation_lists_every_issue() {
        let mut s = base_spec();
        s.sample_rate = 0.0;
        s.duration = -1.0;
        s.shear_exponent = -0.1;
        s.points[1].id = 0;
        let issues = s.validation_issues();
        assert_eq!(issues.len(), 4, "{issues:?}");
        assert!(issues.iter().any(|m| m.contains("sample_rate")));
        assert!(issues.iter().any(|m| m.contains("duplicate id")));
    }

    #[test]
    fn csv_round_trip() {
        let series = WindSeries {
            dt: 0.05,
            point_ids: vec![3, 8],
            samples: vec![vec![10.0, 10.5, 9.25], vec![1.0 / 3.0, 2.0, 7.0]],
        };
        let mut buf = Vec::new();
        series.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("t,v_p3,v_p8\n0,10,0.333333333\n"));
        let back = WindSeries::<f64>::read_csv(&buf[..]).unwrap();
        assert_eq!(back.point_ids, series.point_ids);
        assert!((back.samples[1][0] - 0.333333333).abs() < 1e-15);
        let mut again = Vec::new();
        back.write_csv(&mut again).unwrap();
        assert_eq!(again, buf);
    }
}
