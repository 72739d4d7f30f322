//! Strict reader for the scenario document.
//!
//! The document is a JSON tree. Quantities carry their unit in the key name
//! (`theta_rotor_kgm2`, `dt_s`, `elevation_deg`). Unknown keys are errors, and
//! every problem found is collected before reporting.

use std::path::Path;

use num_complex::Complex;
use serde_json::{Map, Value};

use crate::aero::RotorParams;
use crate::drivetrain::{GearboxParams, InertiaParams};
use crate::geometry::Vec3;
use crate::grid::{balanced, LineSegmentParams, Phasors, SegmentModel};
use crate::machine::MachineParams;
use crate::table::Table;
use crate::windfield::{
    AngleModel, CoherenceModel, GridPoint, PsdModel, Turbulence, WindFieldSpec, MIN_WIND_STEPS,
};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Instantaneous phase quantities; the line segment is differential.
    Transient,
    /// Algebraic phasor grid; only mechanical and rotor flux states integrate.
    Rms,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntegratorConfig {
    pub dt: f64,
    pub duration: f64,
    pub output_interval: f64,
}

impl IntegratorConfig {
    pub fn n_steps(&self) -> usize {
        (self.duration / self.dt).round() as usize
    }

    /// Steps between written rows.
    pub fn output_every(&self) -> usize {
        ((self.output_interval / self.dt).round() as usize).max(1)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TurbineConfig {
    pub position_xy: (f64, f64),
    /// Elevation (cone) angle of the rotor frame, radians.
    pub elevation: f64,
    pub rotor: RotorParams<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DrivetrainConfig {
    /// Low-speed side inertia (turbine rotor).
    pub rotor: InertiaParams<f64>,
    /// High-speed side inertia (generator).
    pub generator: InertiaParams<f64>,
    pub gearbox: GearboxParams<f64>,
    /// Constant extra torques on `[rotor, generator]`.
    pub external_torque: [f64; 2],
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridConfig {
    pub frequency: f64,
    /// Far-end source phasors (peak values, phase a reference).
    pub source: Phasors<f64>,
    pub line: LineSegmentParams<f64>,
    /// Per-phase load admittance to ground at the machine node.
    pub load: Complex<f64>,
}

impl GridConfig {
    pub fn omega(&self) -> f64 {
        2.0 * std::f64::consts::PI * self.frequency
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct InitialConfig {
    /// Machine slip at `t = 0`; the electrical state starts in the matching
    /// sinusoidal steady state.
    pub slip: Option<f64>,
    /// Low-speed shaft speed at `t = 0` when no machine is present.
    pub rotor_speed: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub mode: Mode,
    pub seed: u64,
    pub integrator: IntegratorConfig,
    pub wind: Option<WindFieldSpec<f64>>,
    pub turbine: Option<TurbineConfig>,
    pub drivetrain: DrivetrainConfig,
    pub machine: Option<MachineParams<f64>>,
    pub grid: Option<GridConfig>,
    pub initial: InitialConfig,
    /// Output columns after the time column.
    pub outputs: Vec<String>,
}

impl Scenario {
    pub fn from_file(path: &Path) -> Result<Scenario> {
        let text = std::fs::read_to_string(path)?;
        load_scenario_with_base(&text, path.parent())
    }
}

/// Parses and validates a scenario document.
pub fn load_scenario(text: &str) -> Result<Scenario> {
    load_scenario_with_base(text, None)
}

/// As [`load_scenario`]; relative file references resolve against `base`.
pub fn load_scenario_with_base(text: &str, base: Option<&Path>) -> Result<Scenario> {
    let value: Value =
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("scenario is not valid JSON: {e}")))?;
    scenario_from_value(&value, base)
}

/// Parses a stand-alone wind field document: `{"seed", "duration_s", "wind"}`
/// with the `wind` block laid out as in a scenario.
pub fn load_wind_spec(text: &str) -> Result<WindFieldSpec<f64>> {
    let value: Value =
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("wind spec is not valid JSON: {e}")))?;
    let mut r = Reader {
        issues: Vec::new(),
        base: None,
    };
    let Some(top) = r.object(&value, "") else {
        return Err(Error::Validation(r.issues));
    };
    r.allow(&top, &["seed", "duration_s", "wind"]);
    let seed = match top.map.get("seed") {
        None => 0,
        Some(v) => v.as_u64().unwrap_or_else(|| {
            r.issue("seed: expected a non-negative integer".into());
            0
        }),
    };
    let duration = r.num(&top, "duration_s");
    let spec = match (top.map.get("wind"), duration) {
        (Some(v), Some(d)) => read_wind(&mut r, v, seed, Some(d)),
        (None, _) => {
            r.issue("wind: required".into());
            None
        }
        _ => None,
    };
    match spec {
        Some(spec) if r.issues.is_empty() => {
            // the reader rounds the duration up to whole samples; a stand-alone
            // field takes it literally
            let spec = WindFieldSpec {
                duration: duration.unwrap_or(spec.duration),
                ..spec
            };
            spec.validate()?;
            Ok(spec)
        }
        _ => Err(Error::Validation(r.issues)),
    }
}

/// Sets the dotted `path` in a scenario tree. `raw` is read as JSON when it
/// parses, otherwise as a string. Missing intermediate objects are created.
pub fn set_path(root: &mut Value, path: &str, raw: &str) -> Result<()> {
    let new: Value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
    let mut node = root;
    let parts: Vec<&str> = path.split('.').collect();
    for (k, part) in parts.iter().enumerate() {
        if part.is_empty() {
            return Err(Error::Parse(format!("bad key path {path:?}")));
        }
        let map = node
            .as_object_mut()
            .ok_or_else(|| Error::Parse(format!("{path}: {} is not an object", parts[..k].join("."))))?;
        if k + 1 == parts.len() {
            map.insert(part.to_string(), new);
            return Ok(());
        }
        node = map
            .entry(part.to_string())
            .or_insert_with(|| Value::Object(Map::new()));
    }
    unreachable!()
}

struct Reader<'a> {
    issues: Vec<String>,
    base: Option<&'a Path>,
}

/// One object in the tree together with the keys it may hold.
struct Obj<'v> {
    path: String,
    map: &'v Map<String, Value>,
}

fn join(path: &str, key: &str) -> String {
    if path.is_empty() {
        key.to_string()
    } else {
        format!("{path}.{key}")
    }
}

impl<'a> Reader<'a> {
    fn issue(&mut self, msg: String) {
        self.issues.push(msg);
    }

    fn object<'v>(&mut self, v: &'v Value, path: &str) -> Option<Obj<'v>> {
        match v.as_object() {
            Some(map) => Some(Obj {
                path: path.to_string(),
                map,
            }),
            None => {
                self.issue(format!("{path}: expected an object"));
                None
            }
        }
    }

    /// Reports keys outside `allowed`. A key whose stem matches an allowed key
    /// but whose unit suffix differs is reported as a unit mismatch.
    fn allow(&mut self, o: &Obj, allowed: &[&str]) {
        for key in o.map.keys() {
            if allowed.contains(&key.as_str()) {
                continue;
            }
            let stem_match = allowed.iter().find(|a| {
                let stem = stem(a);
                stem != **a && (key == stem || key.starts_with(&format!("{stem}_")))
            });
            match stem_match {
                Some(expected) => self.issue(format!(
                    "{}: unit suffix mismatch, expected {}",
                    join(&o.path, key),
                    join(&o.path, expected)
                )),
                None => self.issue(format!("{}: unknown key", join(&o.path, key))),
            }
        }
    }

    fn num_value(&mut self, v: &Value, path: &str) -> Option<f64> {
        match v.as_f64() {
            Some(x) if x.is_finite() => Some(x),
            _ => {
                self.issue(format!("{path}: expected a finite number"));
                None
            }
        }
    }

    fn opt_num(&mut self, o: &Obj, key: &str) -> Option<f64> {
        let v = o.map.get(key)?;
        self.num_value(v, &join(&o.path, key))
    }

    fn num(&mut self, o: &Obj, key: &str) -> Option<f64> {
        if !o.map.contains_key(key) {
            self.issue(format!("{}: required", join(&o.path, key)));
            return None;
        }
        self.opt_num(o, key)
    }

    fn num_or(&mut self, o: &Obj, key: &str, default: f64) -> f64 {
        if o.map.contains_key(key) {
            self.opt_num(o, key).unwrap_or(default)
        } else {
            default
        }
    }

    /// Angle given as exactly one of `<stem>_deg` or `<stem>_rad`, in radians.
    fn angle(&mut self, o: &Obj, stem: &str, default: Option<f64>) -> Option<f64> {
        let deg = format!("{stem}_deg");
        let rad = format!("{stem}_rad");
        match (o.map.contains_key(&deg), o.map.contains_key(&rad)) {
            (true, true) => {
                self.issue(format!(
                    "{}: give either {deg} or {rad}, not both",
                    join(&o.path, stem)
                ));
                None
            }
            (true, false) => self.opt_num(o, &deg).map(f64::to_radians),
            (false, true) => self.opt_num(o, &rad),
            (false, false) => {
                if default.is_none() {
                    self.issue(format!("{}: required", join(&o.path, &deg)));
                }
                default
            }
        }
    }

    fn pairs(&mut self, v: &Value, path: &str) -> Option<Vec<(f64, f64)>> {
        let Some(list) = v.as_array() else {
            self.issue(format!("{path}: expected a list of [x, y] pairs"));
            return None;
        };
        let mut out = Vec::with_capacity(list.len());
        for (k, item) in list.iter().enumerate() {
            match item.as_array().map(|a| a.as_slice()) {
                Some([x, y]) => match (x.as_f64(), y.as_f64()) {
                    (Some(x), Some(y)) => out.push((x, y)),
                    _ => {
                        self.issue(format!("{path}[{k}]: expected two numbers"));
                        return None;
                    }
                },
                _ => {
                    self.issue(format!("{path}[{k}]: expected a [x, y] pair"));
                    return None;
                }
            }
        }
        Some(out)
    }

    fn table(&mut self, v: &Value, path: &str) -> Option<Table<f64>> {
        let pairs = self.pairs(v, path)?;
        match Table::new(&pairs) {
            Ok(t) => Some(t),
            Err(e) => {
                self.issue(format!("{path}: {e}"));
                None
            }
        }
    }

    /// Exactly one of the named variants must be present; returns its index.
    fn one_of<'v>(
        &mut self,
        o: &Obj<'v>,
        what: &str,
        variants: &[&str],
    ) -> Option<(usize, &'v Value, String)> {
        let present: Vec<usize> = (0..variants.len())
            .filter(|&k| o.map.contains_key(variants[k]))
            .collect();
        match present.as_slice() {
            [k] => Some((*k, &o.map[variants[*k]], join(&o.path, variants[*k]))),
            [] => {
                self.issue(format!(
                    "{}: exactly one {what} model required ({})",
                    o.path,
                    variants.join(" or ")
                ));
                None
            }
            _ => {
                let names: Vec<&str> = present.iter().map(|&k| variants[k]).collect();
                self.issue(format!(
                    "{}: exactly one {what} model allowed, found {}",
                    o.path,
                    names.join(" and ")
                ));
                None
            }
        }
    }
}

fn stem(key: &str) -> &str {
    const SUFFIXES: [&str; 17] = [
        "_kgm2",
        "_nms_per_rad",
        "_nm_per_rad",
        "_nms",
        "_nm",
        "_ohm_per_m",
        "_h_per_m",
        "_f_per_m",
        "_s_per_m",
        "_m_s",
        "_kg_m3",
        "_ohm",
        "_hz",
        "_deg",
        "_rad_s",
        "_rad",
        "_m",
    ];
    for s in SUFFIXES {
        if let Some(st) = key.strip_suffix(s) {
            return st;
        }
    }
    for s in ["_h", "_s", "_v"] {
        if let Some(st) = key.strip_suffix(s) {
            return st;
        }
    }
    key
}

fn scenario_from_value(root: &Value, base: Option<&Path>) -> Result<Scenario> {
    let mut r = Reader {
        issues: Vec::new(),
        base,
    };
    let Some(top) = r.object(root, "") else {
        return Err(Error::Validation(std::mem::take(&mut r.issues)));
    };
    r.allow(
        &top,
        &[
            "name",
            "mode",
            "seed",
            "integrator",
            "wind",
            "turbine",
            "drivetrain",
            "machine",
            "grid",
            "initial",
            "outputs",
        ],
    );

    let name = match top.map.get("name") {
        None => "scenario".to_string(),
        Some(Value::String(s))
            if !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || "-_.".contains(c)) =>
        {
            s.clone()
        }
        Some(_) => {
            r.issue("name: expected a non-empty string of letters, digits, '-', '_' or '.'".into());
            "scenario".to_string()
        }
    };
    let mode = match top.map.get("mode").map(|v| v.as_str()) {
        None | Some(Some("transient")) => Mode::Transient,
        Some(Some("rms")) => Mode::Rms,
        _ => {
            r.issue("mode: expected \"transient\" or \"rms\"".into());
            Mode::Transient
        }
    };
    let seed = match top.map.get("seed") {
        None => 0,
        Some(v) => v.as_u64().unwrap_or_else(|| {
            r.issue("seed: expected a non-negative integer".into());
            0
        }),
    };

    let integrator = read_integrator(&mut r, top.map.get("integrator"));
    let duration = integrator.as_ref().map(|i| i.duration);
    let wind = top
        .map
        .get("wind")
        .and_then(|v| read_wind(&mut r, v, seed, duration));
    let turbine = top.map.get("turbine").and_then(|v| read_turbine(&mut r, v));
    let drivetrain = match top.map.get("drivetrain") {
        Some(v) => read_drivetrain(&mut r, v),
        None => {
            r.issue("drivetrain: required".into());
            None
        }
    };
    let machine = top.map.get("machine").and_then(|v| read_machine(&mut r, v));
    let grid = top.map.get("grid").and_then(|v| read_grid(&mut r, v));
    let initial = top
        .map
        .get("initial")
        .map(|v| read_initial(&mut r, v))
        .unwrap_or_default();

    // cross-component rules
    if top.map.contains_key("turbine") && !top.map.contains_key("wind") {
        r.issue("turbine: a wind block is required to drive the rotor".into());
    }
    if top.map.contains_key("wind") && !top.map.contains_key("turbine") {
        r.issue("wind: a turbine block is required to use the wind field".into());
    }
    if top.map.contains_key("machine") != top.map.contains_key("grid") {
        r.issue("machine and grid must be given together (the stator connects to the grid node)".into());
    }
    if top.map.contains_key("machine") && initial.rotor_speed.is_some() {
        r.issue("initial.rotor_speed_rad_s: with a machine present, give initial.slip instead".into());
    }
    if !top.map.contains_key("machine") && initial.slip.is_some() {
        r.issue("initial.slip: only meaningful with a machine".into());
    }
    if let (Mode::Transient, Some(g)) = (mode, &grid) {
        let shunt_c = if g.load.im > 0.0 {
            g.load.im / g.omega()
        } else {
            0.0
        };
        if let Err(Error::Validation(_)) = SegmentModel::with_node_shunt(g.line, g.load.re, shunt_c) {
            r.issue(
                "grid.line.c_earth_f_per_m: zero node capacitance makes the transient node equation algebraic; \
                 add line capacitance or use mode \"rms\""
                    .into(),
            );
        }
    }

    let mut scenario = match (integrator, drivetrain) {
        (Some(integrator), Some(drivetrain)) if r.issues.is_empty() => Scenario {
            name,
            mode,
            seed,
            integrator,
            wind,
            turbine,
            drivetrain,
            machine,
            grid,
            initial,
            outputs: Vec::new(),
        },
        _ => return Err(Error::Validation(r.issues)),
    };

    let available = super::system::available_columns(&scenario);
    scenario.outputs = match top.map.get("outputs") {
        None => super::system::default_columns(&scenario),
        Some(Value::Array(list)) => {
            let mut cols = Vec::new();
            for (k, item) in list.iter().enumerate() {
                match item.as_str() {
                    Some(c) if available.contains(&c) => {
                        if cols.iter().any(|x: &String| x == c) {
                            r.issue(format!("outputs[{k}]: duplicate column {c}"));
                        }
                        cols.push(c.to_string());
                    }
                    Some(c) => r.issue(format!(
                        "outputs[{k}]: column {c:?} is not available in this scenario (available: {})",
                        available.join(", ")
                    )),
                    None => r.issue(format!("outputs[{k}]: expected a column name")),
                }
            }
            cols
        }
        Some(_) => {
            r.issue("outputs: expected a list of column names".into());
            Vec::new()
        }
    };
    if r.issues.is_empty() {
        Ok(scenario)
    } else {
        Err(Error::Validation(r.issues))
    }
}

fn read_integrator(r: &mut Reader, v: Option<&Value>) -> Option<IntegratorConfig> {
    let Some(v) = v else {
        r.issue("integrator: required".into());
        return None;
    };
    let o = r.object(v, "integrator")?;
    r.allow(&o, &["method", "dt_s", "duration_s", "output_interval_s"]);
    match o.map.get("method").map(|m| m.as_str()) {
        None | Some(Some("rk4")) => {}
        _ => r.issue("integrator.method: only \"rk4\" is supported".into()),
    }
    let dt = r.num(&o, "dt_s");
    let duration = r.num(&o, "duration_s");
    let output = r.opt_num(&o, "output_interval_s");
    let (dt, duration) = (dt?, duration?);
    let mut ok = true;
    if !(dt > 0.0) {
        r.issue(format!("integrator.dt_s must be > 0, got {dt}"));
        ok = false;
    }
    if ok && !(duration >= dt) {
        r.issue(format!("integrator.duration_s must be >= dt_s, got {duration}"));
        ok = false;
    }
    let multiple = |x: f64| {
        let k = (x / dt).round();
        k >= 1.0 && (k * dt - x).abs() <= 1e-9 * x
    };
    if ok && !multiple(duration) {
        r.issue("integrator.duration_s must be an integer multiple of dt_s".into());
        ok = false;
    }
    let output_interval = output.unwrap_or(dt);
    if ok && !multiple(output_interval) {
        r.issue("integrator.output_interval_s must be a positive integer multiple of dt_s".into());
        ok = false;
    }
    ok.then_some(IntegratorConfig {
        dt,
        duration,
        output_interval,
    })
}

fn read_wind(r: &mut Reader, v: &Value, seed: u64, duration: Option<f64>) -> Option<WindFieldSpec<f64>> {
    let o = r.object(v, "wind")?;
    r.allow(
        &o,
        &[
            "nacelle_height_m",
            "nacelle_wind_m_s",
            "shear_exponent",
            "sample_rate_hz",
            "turbulence",
            "psd",
            "coherence",
            "angle_tf",
            "points",
        ],
    );
    let nacelle_height = r.num(&o, "nacelle_height_m");
    let nacelle_wind = r.num(&o, "nacelle_wind_m_s");
    let shear_exponent = r.num_or(&o, "shear_exponent", 0.0);
    let sample_rate = r.num(&o, "sample_rate_hz");

    let turbulence = match o.map.get("turbulence") {
        None => {
            r.issue("wind.turbulence: required".into());
            None
        }
        Some(tv) => r.object(tv, "wind.turbulence").and_then(|t| {
            let (kind, body, path) = r.one_of(&t, "turbulence", &["direct", "panowsky"])?;
            r.allow(&t, &["direct", "panowsky"]);
            let b = r.object(body, &path)?;
            if kind == 0 {
                r.allow(&b, &["intensity"]);
                r.num(&b, "intensity")
                    .map(|intensity| Turbulence::Direct { intensity })
            } else {
                r.allow(&b, &["roughness_length_m"]);
                r.num(&b, "roughness_length_m")
                    .map(|roughness_length| Turbulence::Panowsky { roughness_length })
            }
        }),
    };

    let psd = match o.map.get("psd") {
        None => {
            r.issue("wind.psd: required".into());
            None
        }
        Some(pv) => r.object(pv, "wind.psd").and_then(|p| {
            r.allow(&p, &["kaimal", "tabulated"]);
            let (kind, body, path) = r.one_of(&p, "psd", &["kaimal", "tabulated"])?;
            if kind == 0 {
                let b = r.object(body, &path)?;
                r.allow(&b, &["length_scale_m"]);
                r.num(&b, "length_scale_m")
                    .map(|length_scale| PsdModel::Kaimal { length_scale })
            } else {
                r.table(body, &path).map(PsdModel::Tabulated)
            }
        }),
    };

    let coherence = match o.map.get("coherence") {
        None => {
            r.issue("wind.coherence: required".into());
            None
        }
        Some(cv) => r.object(cv, "wind.coherence").and_then(|c| {
            r.allow(&c, &["davenport", "tabulated"]);
            let (kind, body, path) = r.one_of(&c, "coherence", &["davenport", "tabulated"])?;
            if kind == 0 {
                let b = r.object(body, &path)?;
                r.allow(&b, &["decay"]);
                r.num(&b, "decay")
                    .map(|decay| CoherenceModel::Davenport { decay })
            } else {
                r.table(body, &path).map(CoherenceModel::Tabulated)
            }
        }),
    };

    let angle_tf = match o.map.get("angle_tf") {
        None => Some(AngleModel::Zero),
        Some(Value::String(s)) if s == "zero" => Some(AngleModel::Zero),
        Some(av @ Value::Object(_)) => r.object(av, "wind.angle_tf").and_then(|a| {
            r.allow(&a, &["tabulated_rad"]);
            match a.map.get("tabulated_rad") {
                Some(t) => r
                    .table(t, "wind.angle_tf.tabulated_rad")
                    .map(AngleModel::Tabulated),
                None => {
                    r.issue(
                        "wind.angle_tf: expected \"zero\" or {\"tabulated_rad\": [[f, angle], ...]}".into(),
                    );
                    None
                }
            }
        }),
        Some(_) => {
            r.issue("wind.angle_tf: expected \"zero\" or {\"tabulated_rad\": [[f, angle], ...]}".into());
            None
        }
    };

    let points = match o.map.get("points") {
        Some(Value::Array(list)) => {
            let mut pts = Vec::new();
            for (k, item) in list.iter().enumerate() {
                let path = format!("wind.points[{k}]");
                let Some(p) = r.object(item, &path) else { continue };
                r.allow(&p, &["id", "x_m", "y_m", "z_m"]);
                let id = match p.map.get("id").and_then(Value::as_i64) {
                    Some(id) => Some(id),
                    None => {
                        r.issue(format!("{path}.id: expected an integer"));
                        None
                    }
                };
                let x = r.num_or(&p, "x_m", 0.0);
                let y = r.num_or(&p, "y_m", 0.0);
                let z = r.num(&p, "z_m");
                if let (Some(id), Some(z)) = (id, z) {
                    pts.push(GridPoint {
                        id,
                        position: Vec3::new(x, y, z),
                    });
                }
            }
            Some(pts)
        }
        _ => {
            r.issue("wind.points: expected a list of points".into());
            None
        }
    };

    let spec = WindFieldSpec {
        points: points?,
        nacelle_height: nacelle_height?,
        nacelle_wind: nacelle_wind?,
        shear_exponent,
        turbulence: turbulence?,
        psd: psd?,
        coherence: coherence?,
        angle_tf: angle_tf?,
        sample_rate: sample_rate?,
        duration: 1.0,
        seed,
    };
    let fs = spec.sample_rate;
    let spec = WindFieldSpec {
        duration: match duration {
            Some(d) if fs > 0.0 => ((d * fs).ceil().max(MIN_WIND_STEPS as f64)) / fs,
            _ => 1.0,
        },
        ..spec
    };
    let issues = spec.validation_issues();
    // the duration is derived here, so its message would only repeat the integrator's
    let issues: Vec<String> = issues.into_iter().filter(|m| !m.contains("duration_s")).collect();
    if issues.is_empty() {
        Some(spec)
    } else {
        r.issues.extend(issues);
        None
    }
}

fn read_turbine(r: &mut Reader, v: &Value) -> Option<TurbineConfig> {
    let o = r.object(v, "turbine")?;
    r.allow(&o, &["x_m", "y_m", "elevation_deg", "elevation_rad", "rotor"]);
    let x = r.num_or(&o, "x_m", 0.0);
    let y = r.num_or(&o, "y_m", 0.0);
    let elevation = r.angle(&o, "elevation", Some(0.0));
    let rotor = match o.map.get("rotor") {
        None => {
            r.issue("turbine.rotor: required".into());
            None
        }
        Some(rv) => r.object(rv, "turbine.rotor").and_then(|ro| {
            r.allow(
                &ro,
                &["radius_m", "air_density_kg_m3", "cp_table", "cp_table_csv"],
            );
            let radius = r.num(&ro, "radius_m");
            let rho = r.num_or(&ro, "air_density_kg_m3", 1.225);
            let table = match (ro.map.get("cp_table"), ro.map.get("cp_table_csv")) {
                (Some(t), None) => r.pairs(t, "turbine.rotor.cp_table"),
                (None, Some(Value::String(file))) => read_cp_csv(r, file),
                (None, Some(_)) => {
                    r.issue("turbine.rotor.cp_table_csv: expected a file name".into());
                    None
                }
                (Some(_), Some(_)) => {
                    r.issue("turbine.rotor: give either cp_table or cp_table_csv, not both".into());
                    None
                }
                (None, None) => {
                    r.issue("turbine.rotor.cp_table: required".into());
                    None
                }
            };
            match RotorParams::new(radius?, rho, &table?) {
                Ok(p) => Some(p),
                Err(e) => {
                    r.issues.extend(prefixed("turbine.rotor", e));
                    None
                }
            }
        }),
    };
    Some(TurbineConfig {
        position_xy: (x, y),
        elevation: elevation?,
        rotor: rotor?,
    })
}

fn read_cp_csv(r: &mut Reader, file: &str) -> Option<Vec<(f64, f64)>> {
    let path = match r.base {
        Some(b) => b.join(file),
        None => Path::new(file).to_path_buf(),
    };
    let text = match std::fs::read_to_string(&path) {
        Ok(t) => t,
        Err(e) => {
            r.issue(format!(
                "turbine.rotor.cp_table_csv: cannot read {}: {e}",
                path.display()
            ));
            return None;
        }
    };
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .from_reader(text.as_bytes());
    let mut out = Vec::new();
    for (k, rec) in rdr.records().enumerate() {
        let Ok(rec) = rec else {
            r.issue(format!("turbine.rotor.cp_table_csv: line {} is malformed", k + 1));
            return None;
        };
        let vals: Vec<Option<f64>> = rec.iter().map(|s| s.trim().parse().ok()).collect();
        match vals.as_slice() {
            [Some(l), Some(c)] => out.push((*l, *c)),
            // a header line is allowed
            _ if k == 0 => {}
            _ => {
                r.issue(format!(
                    "turbine.rotor.cp_table_csv: line {} needs two numbers",
                    k + 1
                ));
                return None;
            }
        }
    }
    Some(out)
}

fn prefixed(prefix: &str, e: Error) -> Vec<String> {
    match e {
        Error::Validation(list) => list.into_iter().map(|m| format!("{prefix}: {m}")).collect(),
        other => vec![format!("{prefix}: {other}")],
    }
}

fn read_drivetrain(r: &mut Reader, v: &Value) -> Option<DrivetrainConfig> {
    let o = r.object(v, "drivetrain")?;
    r.allow(
        &o,
        &[
            "theta_rotor_kgm2",
            "theta_generator_kgm2",
            "friction_rotor_nms",
            "friction_generator_nms",
            "stiffness_nm_per_rad",
            "damping_nms_per_rad",
            "gear_ratio",
            "external_torque_rotor_nm",
            "external_torque_generator_nm",
        ],
    );
    let th1 = r.num(&o, "theta_rotor_kgm2");
    let th2 = r.num(&o, "theta_generator_kgm2");
    let f1 = r.num_or(&o, "friction_rotor_nms", 0.0);
    let f2 = r.num_or(&o, "friction_generator_nms", 0.0);
    let c = r.num(&o, "stiffness_nm_per_rad");
    let d = r.num_or(&o, "damping_nms_per_rad", 0.0);
    let n = r.num_or(&o, "gear_ratio", 1.0);
    let e1 = r.num_or(&o, "external_torque_rotor_nm", 0.0);
    let e2 = r.num_or(&o, "external_torque_generator_nm", 0.0);
    let mut inertia = |theta: Option<f64>, fr: f64, side: &str| {
        let theta = theta?;
        let mut ok = true;
        if !(theta > 0.0) {
            r.issue(format!("drivetrain.theta_{side}_kgm2 must be > 0, got {theta}"));
            ok = false;
        }
        if !(fr >= 0.0) {
            r.issue(format!("drivetrain.friction_{side}_nms must be >= 0, got {fr}"));
            ok = false;
        }
        if ok {
            InertiaParams::new(theta, fr).ok()
        } else {
            None
        }
    };
    let rotor = inertia(th1, f1, "rotor");
    let generator = inertia(th2, f2, "generator");
    let c = c?;
    let mut ok = true;
    if !(c >= 0.0) {
        r.issue(format!("drivetrain.stiffness_nm_per_rad must be >= 0, got {c}"));
        ok = false;
    }
    if !(d >= 0.0) {
        r.issue(format!("drivetrain.damping_nms_per_rad must be >= 0, got {d}"));
        ok = false;
    }
    if n == 0.0 {
        r.issue("drivetrain.gear_ratio must be nonzero".into());
        ok = false;
    }
    let gearbox = if ok {
        GearboxParams::new(c, d, n).ok()
    } else {
        None
    };
    Some(DrivetrainConfig {
        rotor: rotor?,
        generator: generator?,
        gearbox: gearbox?,
        external_torque: [e1, e2],
    })
}

fn read_machine(r: &mut Reader, v: &Value) -> Option<MachineParams<f64>> {
    let o = r.object(v, "machine")?;
    r.allow(&o, &["rs_ohm", "rr_ohm", "ls_h", "lr_h", "lm_h", "pole_pairs"]);
    let rs = r.num(&o, "rs_ohm");
    let rr = r.num(&o, "rr_ohm");
    let ls = r.num(&o, "ls_h");
    let lr = r.num(&o, "lr_h");
    let lm = r.num(&o, "lm_h");
    let p = match o.map.get("pole_pairs").map(Value::as_u64) {
        Some(Some(p)) if p >= 1 && p <= u32::MAX as u64 => Some(p as u32),
        Some(_) => {
            r.issue("machine.pole_pairs: expected an integer >= 1".into());
            None
        }
        None => {
            r.issue("machine.pole_pairs: required".into());
            None
        }
    };
    match MachineParams::new(rs?, rr?, ls?, lr?, lm?, p?) {
        Ok(m) => Some(m),
        Err(e) => {
            r.issues.extend(prefixed("machine", e));
            None
        }
    }
}

fn read_grid(r: &mut Reader, v: &Value) -> Option<GridConfig> {
    let o = r.object(v, "grid")?;
    r.allow(&o, &["frequency_hz", "source", "line", "load"]);
    let frequency = r.num(&o, "frequency_hz");
    if let Some(f) = frequency {
        if !(f > 0.0) {
            r.issue(format!("grid.frequency_hz must be > 0, got {f}"));
        }
    }
    let source = match o.map.get("source") {
        None => {
            r.issue("grid.source: required".into());
            None
        }
        Some(sv) => r.object(sv, "grid.source").and_then(|s| {
            r.allow(&s, &["voltage_peak_v", "angle_deg", "angle_rad", "phases"]);
            if let Some(pv) = s.map.get("phases") {
                if s.map.contains_key("voltage_peak_v") {
                    r.issue("grid.source: give either voltage_peak_v or phases, not both".into());
                    return None;
                }
                // explicit per-phase [peak_v, angle_deg] for unbalanced sources
                let pairs = r.pairs(pv, "grid.source.phases")?;
                if pairs.len() != 3 {
                    r.issue("grid.source.phases: expected three [peak_v, angle_deg] pairs".into());
                    return None;
                }
                let mut ph = [Complex::new(0.0, 0.0); 3];
                for (k, (m, a)) in pairs.into_iter().enumerate() {
                    ph[k] = Complex::from_polar(m, a.to_radians());
                }
                Some(ph)
            } else {
                let mag = r.num(&s, "voltage_peak_v");
                let ang = r.angle(&s, "angle", Some(0.0));
                if let Some(m) = mag {
                    if !(m >= 0.0) {
                        r.issue(format!("grid.source.voltage_peak_v must be >= 0, got {m}"));
                    }
                }
                Some(balanced(Complex::from_polar(mag?, ang?)))
            }
        }),
    };
    let line = match o.map.get("line") {
        None => {
            r.issue("grid.line: required".into());
            None
        }
        Some(lv) => r.object(lv, "grid.line").and_then(|l| {
            r.allow(
                &l,
                &[
                    "r0_ohm_per_m",
                    "r1_ohm_per_m",
                    "l0_h_per_m",
                    "l1_h_per_m",
                    "c_earth_f_per_m",
                    "c_line_f_per_m",
                    "g_earth_s_per_m",
                    "g_line_s_per_m",
                    "length_m",
                ],
            );
            let p = LineSegmentParams {
                r0: r.num(&l, "r0_ohm_per_m")?,
                r1: r.num(&l, "r1_ohm_per_m")?,
                l0: r.num(&l, "l0_h_per_m")?,
                l1: r.num(&l, "l1_h_per_m")?,
                c_earth: r.num_or(&l, "c_earth_f_per_m", 0.0),
                c_line: r.num_or(&l, "c_line_f_per_m", 0.0),
                g_earth: r.num_or(&l, "g_earth_s_per_m", 0.0),
                g_line: r.num_or(&l, "g_line_s_per_m", 0.0),
                dx: r.num(&l, "length_m")?,
            };
            match p.validate() {
                Ok(_) => Some(p),
                Err(e) => {
                    r.issues.extend(prefixed("grid.line", e));
                    None
                }
            }
        }),
    };
    let load = match o.map.get("load") {
        None => Some(Complex::new(0.0, 0.0)),
        Some(lv) => r.object(lv, "grid.load").and_then(|l| {
            r.allow(&l, &["conductance_s", "susceptance_s"]);
            let g = r.num_or(&l, "conductance_s", 0.0);
            let b = r.num_or(&l, "susceptance_s", 0.0);
            if !(g >= 0.0) {
                r.issue(format!("grid.load.conductance_s must be >= 0, got {g}"));
                return None;
            }
            Some(Complex::new(g, b))
        }),
    };
    Some(GridConfig {
        frequency: frequency?,
        source: source?,
        line: line?,
        load: load?,
    })
}

fn read_initial(r: &mut Reader, v: &Value) -> InitialConfig {
    let Some(o) = r.object(v, "initial") else {
        return InitialConfig::default();
    };
    r.allow(&o, &["slip", "rotor_speed_rad_s"]);
    let slip = r.opt_num(&o, "slip");
    if let Some(s) = slip {
        if !(-1.0..=1.0).contains(&s) {
            r.issue(format!("initial.slip must lie in [-1, 1], got {s}"));
        }
    }
    InitialConfig {
        slip,
        rotor_speed: r.opt_num(&o, "rotor_speed_rad_s"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) const MINIMAL: &str = r#"{
        "integrator": {"dt_s": 0.001, "duration_s": 1.0},
        "drivetrain": {"theta_rotor_kgm2": 100, "theta_generator_kgm2": 1, "stiffness_nm_per_rad": 0}
    }"#;

    fn issues(text: &str) -> Vec<String> {
        match load_scenario(text) {
            Err(Error::Validation(v)) => v,
            other => panic!("expected validation error, got {other:?}"),
        }
    }

    #[test]
    fn minimal_defaults() {
        let s = load_scenario(MINIMAL).unwrap();
        assert_eq!(s.name, "scenario");
        assert_eq!(s.mode, Mode::Transient);
        assert_eq!(s.seed, 0);
        assert_eq!(s.integrator.n_steps(), 1000);
        assert_eq!(s.integrator.output_every(), 1);
        assert_eq!(s.drivetrain.gearbox.ratio(), 1.0);
        assert_eq!(s.drivetrain.external_torque, [0.0, 0.0]);
        assert!(s.wind.is_none() && s.machine.is_none());
        assert!(!s.outputs.is_empty());
    }

    #[test]
    fn zero_inertia_names_key() {
        let text = MINIMAL.replace("\"theta_rotor_kgm2\": 100", "\"theta_rotor_kgm2\": 0");
        let v = issues(&text);
        assert!(v.iter().any(|m| m.contains("drivetrain.theta")), "{v:?}");
    }

    #[test]
    fn unknown_and_mismatched_keys() {
        let text = MINIMAL.replace("\"dt_s\"", "\"dt_ms\"").replace(
            "\"stiffness_nm_per_rad\": 0",
            "\"stiffness_nm_per_rad\": 0, \"colour\": 1",
        );
        let v = issues(&text);
        assert!(
            v.iter()
                .any(|m| m.contains("integrator.dt_ms: unit suffix mismatch")),
            "{v:?}"
        );
        assert!(
            v.iter().any(|m| m.contains("drivetrain.colour: unknown key")),
            "{v:?}"
        );
        assert!(v.iter().any(|m| m.contains("integrator.dt_s: required")), "{v:?}");
    }

    #[test]
    fn errors_are_aggregated() {
        let text = r#"{
            "integrator": {"dt_s": -1, "duration_s": 1},
            "drivetrain": {"theta_rotor_kgm2": -5, "theta_generator_kgm2": 0, "stiffness_nm_per_rad": -1}
        }"#;
        let v = issues(text);
        assert!(v.len() >= 4, "{v:?}");
    }

    #[test]
    fn duration_must_be_multiple_of_step() {
        let v = issues(&MINIMAL.replace("\"duration_s\": 1.0", "\"duration_s\": 1.0005"));
        assert!(v.iter().any(|m| m.contains("integer multiple")), "{v:?}");
    }

    #[test]
    fn set_path_creates_and_overrides() {
        let mut v: Value = serde_json::from_str(MINIMAL).unwrap();
        set_path(&mut v, "drivetrain.gear_ratio", "35").unwrap();
        set_path(&mut v, "name", "run_a").unwrap();
        set_path(&mut v, "initial.rotor_speed_rad_s", "2.5").unwrap();
        let s = scenario_from_value(&v, None).unwrap();
        assert_eq!(s.drivetrain.gearbox.ratio(), 35.0);
        assert_eq!(s.name, "run_a");
        assert_eq!(s.initial.rotor_speed, Some(2.5));
        assert!(set_path(&mut v, "name.x", "1").is_err());
    }

    #[test]
    fn machine_requires_grid() {
        let text = MINIMAL.replace(
            "\"drivetrain\"",
            "\"machine\": {\"rs_ohm\": 0.02, \"rr_ohm\": 0.02, \"ls_h\": 0.021, \"lr_h\": 0.021, \"lm_h\": 0.02, \"pole_pairs\": 2}, \"drivetrain\"",
        );
        let v = issues(&text);
        assert!(v.iter().any(|m| m.contains("machine and grid")), "{v:?}");
    }
}
