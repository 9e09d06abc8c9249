//! Flat `key = value unit` run configuration.
//!
//! One assignment per line, `#` starts a comment, values may be quoted.
//! Dimensional values carry a unit suffix (`220 MHz`, `21 MW/cm2`,
//! `130 C`); frequencies are ordinary frequencies and are stored as angular
//! frequencies (×2π). Unknown keys are rejected.

use std::f64::consts::{PI, TAU};
use std::fmt::Write as _;
use std::path::Path;

use rydberg_core::constants::ATOMIC_MASS_UNIT;
use rydberg_core::doppler::GridSettings;
use rydberg_core::experiments::{linspace, ExperimentConfig, InitialState};
use rydberg_core::model::{PulseShape, RabiCalibration};
use rydberg_core::optimize::{OptimizerSettings, PulseBounds, PulsePair};

use crate::error::{Result, SimError};
use crate::output::fmt_g;

/// Inclusive, evenly spaced scan axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisSpec {
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

impl AxisSpec {
    pub fn values(&self) -> Vec<f64> {
        linspace(self.min, self.max, self.steps)
    }
}

/// Everything a CLI run needs besides output location and format.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub experiment: ExperimentConfig,
    /// Intensity of the calibration anchor, W/m².
    pub calibration_intensity: f64,
    /// W/m².
    pub intensity_axis: AxisSpec,
    /// rad/s.
    pub detuning_axis: AxisSpec,
    pub bounds: PulseBounds,
    pub optimizer: OptimizerSettings,
}

impl Default for RunConfig {
    fn default() -> Self {
        let ghz = |f: f64| TAU * f * 1e9;
        let lo = PulsePair {
            probe_fwhm: 0.1e-9,
            coupling_fwhm: 0.1e-9,
            probe_rabi: ghz(0.5),
            coupling_rabi: ghz(0.5),
            delay: -1e-9,
        };
        let hi = PulsePair {
            probe_fwhm: 1e-9,
            coupling_fwhm: 1e-9,
            probe_rabi: ghz(10.0),
            coupling_rabi: ghz(10.0),
            delay: 1e-9,
        };
        Self {
            experiment: ExperimentConfig::default(),
            calibration_intensity: 21e10,
            intensity_axis: AxisSpec { min: 0.0, max: 21e10, steps: 64 },
            detuning_axis: AxisSpec { min: -ghz(2.0), max: ghz(2.0), steps: 81 },
            bounds: PulseBounds { lo, hi },
            optimizer: OptimizerSettings {
                grid_points: 8,
                iterations: 200,
                search_grid: Some(GridSettings { n_points: 21, span: 3.0 }),
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Frequency,
    Time,
    Length,
    Intensity,
    Temperature,
    Mass,
    Angle,
    Density,
    Number,
    Count,
    Text,
}

const FREQUENCY: &[(&str, f64)] =
    &[("Hz", TAU), ("kHz", TAU * 1e3), ("MHz", TAU * 1e6), ("GHz", TAU * 1e9), ("rad/s", 1.0)];
const TIME: &[(&str, f64)] =
    &[("s", 1.0), ("ms", 1e-3), ("us", 1e-6), ("µs", 1e-6), ("ns", 1e-9), ("ps", 1e-12), ("fs", 1e-15)];
const LENGTH: &[(&str, f64)] = &[("m", 1.0), ("mm", 1e-3), ("um", 1e-6), ("µm", 1e-6), ("nm", 1e-9)];
const INTENSITY: &[(&str, f64)] = &[("W/m2", 1.0), ("W/cm2", 1e4), ("kW/cm2", 1e7), ("MW/cm2", 1e10)];
const MASS: &[(&str, f64)] = &[("kg", 1.0), ("u", ATOMIC_MASS_UNIT)];
const ANGLE: &[(&str, f64)] = &[("deg", PI / 180.0), ("rad", 1.0)];
const DENSITY: &[(&str, f64)] = &[("m-3", 1.0), ("cm-3", 1e6)];

/// Every accepted key with its value kind, in echo order.
const KEYS: &[(&str, Kind)] = &[
    ("temperature", Kind::Temperature),
    ("atomic_mass", Kind::Mass),
    ("number_density", Kind::Density),
    ("isotope", Kind::Text),
    ("omega_780", Kind::Frequency),
    ("delta_780", Kind::Frequency),
    ("wavelength_780", Kind::Length),
    ("theta_780", Kind::Angle),
    ("omega_480_peak", Kind::Frequency),
    ("intensity_480_peak", Kind::Intensity),
    ("delta_480", Kind::Frequency),
    ("wavelength_480", Kind::Length),
    ("theta", Kind::Angle),
    ("pulse_shape", Kind::Text),
    ("pulse_center", Kind::Time),
    ("pulse_fwhm", Kind::Time),
    ("peak_scale", Kind::Number),
    ("calibration_intensity", Kind::Intensity),
    ("calibration_rabi", Kind::Frequency),
    ("gamma_12", Kind::Frequency),
    ("gamma_23", Kind::Frequency),
    ("velocity_points", Kind::Count),
    ("velocity_span", Kind::Number),
    ("t_start", Kind::Time),
    ("t_end", Kind::Time),
    ("sample_step", Kind::Time),
    ("max_step", Kind::Time),
    ("atol", Kind::Number),
    ("rtol", Kind::Number),
    ("initial_state", Kind::Text),
    ("intensity_min", Kind::Intensity),
    ("intensity_max", Kind::Intensity),
    ("intensity_steps", Kind::Count),
    ("detuning_min", Kind::Frequency),
    ("detuning_max", Kind::Frequency),
    ("detuning_steps", Kind::Count),
    ("opt_probe_fwhm_min", Kind::Time),
    ("opt_probe_fwhm_max", Kind::Time),
    ("opt_coupling_fwhm_min", Kind::Time),
    ("opt_coupling_fwhm_max", Kind::Time),
    ("opt_probe_rabi_min", Kind::Frequency),
    ("opt_probe_rabi_max", Kind::Frequency),
    ("opt_coupling_rabi_min", Kind::Frequency),
    ("opt_coupling_rabi_max", Kind::Frequency),
    ("opt_delay_min", Kind::Time),
    ("opt_delay_max", Kind::Time),
    ("opt_grid_points", Kind::Count),
    ("opt_iterations", Kind::Count),
    ("opt_search_points", Kind::Count),
    ("opt_search_span", Kind::Number),
];

/// One `key = value` assignment and where it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct Entry {
    pub key: String,
    pub value: String,
    pub origin: String,
    pub line: usize,
}

enum Value {
    Real(f64),
    Count(usize),
    Text(String),
}

fn strip_comment(line: &str) -> &str {
    let mut quoted = false;
    for (i, c) in line.char_indices() {
        match c {
            '"' => quoted = !quoted,
            '#' if !quoted => return &line[..i],
            _ => {}
        }
    }
    line
}

/// Splits a config text into entries; rejects malformed lines and duplicates.
pub fn parse_entries(text: &str, origin: &str) -> Result<Vec<Entry>> {
    let mut out: Vec<Entry> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = strip_comment(raw).trim();
        if body.is_empty() {
            continue;
        }
        let entry = parse_assignment(body, origin, line)?;
        if out.iter().any(|e| e.key == entry.key) {
            return Err(SimError::Parse { origin: origin.into(), line, msg: format!("duplicate key `{}`", entry.key) });
        }
        out.push(entry);
    }
    Ok(out)
}

fn parse_assignment(body: &str, origin: &str, line: usize) -> Result<Entry> {
    let err = |msg: String| SimError::Parse { origin: origin.into(), line, msg };
    let (key, value) = body.split_once('=').ok_or_else(|| err(format!("expected `key = value`, found `{body}`")))?;
    let key = key.trim();
    if key.is_empty() || !key.chars().all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_') {
        return Err(err(format!("invalid key `{key}`")));
    }
    let mut value = value.trim();
    if let Some(inner) = value.strip_prefix('"') {
        value = inner.strip_suffix('"').ok_or_else(|| err("unterminated quoted value".into()))?;
        if value.contains('"') {
            return Err(err("stray quote in value".into()));
        }
    } else if value.contains('"') {
        return Err(err("stray quote in value".into()));
    }
    let value = value.trim();
    if value.is_empty() {
        return Err(err(format!("missing value for `{key}`")));
    }
    Ok(Entry { key: key.into(), value: value.into(), origin: origin.into(), line })
}

/// Parses a `--set key=value` override.
pub fn parse_override(text: &str, index: usize) -> Result<Entry> {
    parse_assignment(text.trim(), "--set", index + 1)
}

fn split_number(value: &str) -> (&str, &str) {
    if let Some((n, u)) = value.split_once(char::is_whitespace) {
        return (n, u.trim());
    }
    // no space: the unit starts at the first letter that is not an exponent
    let bytes = value.as_bytes();
    for (i, c) in value.char_indices() {
        if c.is_alphabetic() || c == 'µ' {
            let exponent = (c == 'e' || c == 'E')
                && i > 0
                && bytes.get(i + 1).is_some_and(|b| b.is_ascii_digit() || *b == b'-' || *b == b'+');
            if !exponent {
                return (&value[..i], &value[i..]);
            }
        }
    }
    (value, "")
}

fn parse_value(e: &Entry, kind: Kind) -> Result<Value> {
    let unit_err = |msg: String| SimError::Unit { origin: e.origin.clone(), line: e.line, msg };
    let parse_err = |msg: String| SimError::Parse { origin: e.origin.clone(), line: e.line, msg };
    let table = match kind {
        Kind::Text => return Ok(Value::Text(e.value.clone())),
        Kind::Count => {
            return e
                .value
                .parse::<usize>()
                .map(Value::Count)
                .map_err(|_| parse_err(format!("`{}` expects a nonnegative integer, found `{}`", e.key, e.value)));
        }
        Kind::Frequency => FREQUENCY,
        Kind::Time => TIME,
        Kind::Length => LENGTH,
        Kind::Intensity => INTENSITY,
        Kind::Mass => MASS,
        Kind::Angle => ANGLE,
        Kind::Density => DENSITY,
        Kind::Temperature | Kind::Number => &[],
    };
    let (num, unit) = split_number(&e.value);
    let x: f64 = num.parse().map_err(|_| parse_err(format!("`{}` is not a number", num)))?;
    if !x.is_finite() {
        return Err(parse_err(format!("`{}` must be finite", e.key)));
    }
    match kind {
        Kind::Number if unit.is_empty() => Ok(Value::Real(x)),
        Kind::Number => Err(unit_err(format!("`{}` is dimensionless, found unit `{unit}`", e.key))),
        Kind::Temperature => match unit {
            "K" => Ok(Value::Real(x)),
            "C" => Ok(Value::Real(x + 273.15)),
            "" => Err(unit_err(format!("`{}` needs a unit (K or C)", e.key))),
            _ => Err(unit_err(format!("unknown temperature unit `{unit}` (K or C)"))),
        },
        _ => {
            let names: Vec<&str> = table.iter().map(|u| u.0).collect();
            if unit.is_empty() {
                return Err(unit_err(format!("`{}` needs a unit ({})", e.key, names.join(", "))));
            }
            table
                .iter()
                .find(|u| u.0 == unit)
                .map(|u| Value::Real(x * u.1))
                .ok_or_else(|| unit_err(format!("unit `{unit}` not valid for `{}` ({})", e.key, names.join(", "))))
        }
    }
}

fn invalid(e: &Entry, msg: impl Into<String>) -> SimError {
    SimError::Invalid { origin: e.origin.clone(), line: e.line, key: e.key.clone(), msg: msg.into() }
}

impl RunConfig {
    /// Defaults overridden by `entries` in order; later entries win.
    pub fn from_entries(entries: &[Entry]) -> Result<Self> {
        let mut cfg = RunConfig::default();
        let mut rabi_480: Option<&Entry> = None;
        let mut intensity_480: Option<(&Entry, f64)> = None;
        let mut calibration_rabi: Option<f64> = None;
        for e in entries {
            let kind = KEYS.iter().find(|k| k.0 == e.key).map(|k| k.1).ok_or_else(|| SimError::Parse {
                origin: e.origin.clone(),
                line: e.line,
                msg: format!("unknown key `{}`", e.key),
            })?;
            let v = parse_value(e, kind)?;
            let (real, count, text) = match &v {
                Value::Real(x) => (*x, 0, ""),
                Value::Count(n) => (0.0, *n, ""),
                Value::Text(s) => (0.0, 0, s.as_str()),
            };
            let x = &mut cfg.experiment;
            let positive = |val: f64| if val > 0.0 { Ok(val) } else { Err(invalid(e, "must be positive")) };
            let nonnegative = |val: f64| if val >= 0.0 { Ok(val) } else { Err(invalid(e, "must be nonnegative")) };
            match e.key.as_str() {
                "temperature" => {
                    if real <= 0.0 {
                        return Err(invalid(e, "temperature must be above absolute zero"));
                    }
                    x.vapor.temperature = real;
                }
                "atomic_mass" => x.vapor.atomic_mass = positive(real)?,
                "number_density" => x.vapor.number_density = nonnegative(real)?,
                "isotope" => x.vapor.isotope = text.into(),
                "omega_780" => x.probe.rabi_peak = nonnegative(real)?,
                "delta_780" => x.probe.detuning = real,
                "wavelength_780" => x.probe.wavelength = positive(real)?,
                "theta_780" => x.probe.propagation_angle = real,
                "omega_480_peak" => {
                    x.coupling.rabi_peak = nonnegative(real)?;
                    rabi_480 = Some(e);
                }
                "intensity_480_peak" => intensity_480 = Some((e, nonnegative(real)?)),
                "delta_480" => x.coupling.detuning = real,
                "wavelength_480" => x.coupling.wavelength = positive(real)?,
                "theta" => x.coupling.propagation_angle = real,
                "pulse_shape" => {
                    x.coupling_envelope.shape = match text {
                        "gaussian" => PulseShape::Gaussian,
                        "flat_top" => PulseShape::FlatTop,
                        _ => return Err(invalid(e, "expected `gaussian` or `flat_top`")),
                    }
                }
                "pulse_center" => x.coupling_envelope.center_time = real,
                "pulse_fwhm" => x.coupling_envelope.intensity_fwhm = positive(real)?,
                "peak_scale" => x.coupling_envelope.peak_scale = nonnegative(real)?,
                "calibration_intensity" => cfg.calibration_intensity = positive(real)?,
                "calibration_rabi" => calibration_rabi = Some(positive(real)?),
                "gamma_12" => x.decay.gamma_12 = nonnegative(real)?,
                "gamma_23" => x.decay.gamma_23 = nonnegative(real)?,
                "velocity_points" => {
                    if count < 3 || count % 2 == 0 {
                        return Err(invalid(e, "must be odd and at least 3"));
                    }
                    x.grid.n_points = count;
                }
                "velocity_span" => x.grid.span = positive(real)?,
                "t_start" => x.t_start = real,
                "t_end" => x.t_end = real,
                "sample_step" => x.solver.sample_step = positive(real)?,
                "max_step" => x.solver.max_step = positive(real)?,
                "atol" => x.solver.atol = positive(real)?,
                "rtol" => x.solver.rtol = positive(real)?,
                "initial_state" => {
                    x.initial = match text {
                        "steady_state" => InitialState::SteadyState,
                        "ground" => InitialState::Ground,
                        _ => return Err(invalid(e, "expected `steady_state` or `ground`")),
                    }
                }
                "intensity_min" => cfg.intensity_axis.min = nonnegative(real)?,
                "intensity_max" => cfg.intensity_axis.max = nonnegative(real)?,
                "intensity_steps" => cfg.intensity_axis.steps = count,
                "detuning_min" => cfg.detuning_axis.min = real,
                "detuning_max" => cfg.detuning_axis.max = real,
                "detuning_steps" => cfg.detuning_axis.steps = count,
                "opt_probe_fwhm_min" => cfg.bounds.lo.probe_fwhm = positive(real)?,
                "opt_probe_fwhm_max" => cfg.bounds.hi.probe_fwhm = positive(real)?,
                "opt_coupling_fwhm_min" => cfg.bounds.lo.coupling_fwhm = positive(real)?,
                "opt_coupling_fwhm_max" => cfg.bounds.hi.coupling_fwhm = positive(real)?,
                "opt_probe_rabi_min" => cfg.bounds.lo.probe_rabi = nonnegative(real)?,
                "opt_probe_rabi_max" => cfg.bounds.hi.probe_rabi = nonnegative(real)?,
                "opt_coupling_rabi_min" => cfg.bounds.lo.coupling_rabi = nonnegative(real)?,
                "opt_coupling_rabi_max" => cfg.bounds.hi.coupling_rabi = nonnegative(real)?,
                "opt_delay_min" => cfg.bounds.lo.delay = real,
                "opt_delay_max" => cfg.bounds.hi.delay = real,
                "opt_grid_points" => cfg.optimizer.grid_points = count,
                "opt_iterations" => cfg.optimizer.iterations = count,
                "opt_search_points" => {
                    if count == 0 {
                        cfg.optimizer.search_grid = None;
                    } else if count < 3 || count % 2 == 0 {
                        return Err(invalid(e, "must be 0 (use the full grid) or odd and at least 3"));
                    } else {
                        let span = cfg.optimizer.search_grid.map_or(3.0, |g| g.span);
                        cfg.optimizer.search_grid = Some(GridSettings { n_points: count, span });
                    }
                }
                "opt_search_span" => {
                    let span = positive(real)?;
                    if let Some(g) = cfg.optimizer.search_grid.as_mut() {
                        g.span = span;
                    }
                }
                _ => unreachable!("key table and match disagree"),
            }
        }
        let anchor_rabi = calibration_rabi
            .unwrap_or_else(|| RabiCalibration::rb85_480nm().rabi(cfg.calibration_intensity).unwrap_or(0.0));
        cfg.experiment.calibration = RabiCalibration::from_anchor(cfg.calibration_intensity, anchor_rabi)?;
        if let Some((e, intensity)) = intensity_480 {
            if let Some(other) = rabi_480 {
                return Err(invalid(e, format!("conflicts with `omega_480_peak` ({}:{})", other.origin, other.line)));
            }
            cfg.experiment.coupling.rabi_peak = cfg.experiment.calibration.rabi(intensity)?;
        }
        for (axis, name) in [(&cfg.intensity_axis, "intensity"), (&cfg.detuning_axis, "detuning")] {
            if axis.steps == 0 || axis.max < axis.min {
                return Err(SimError::Domain(rydberg_core::Error::Domain(format!(
                    "{name} axis needs steps ≥ 1 and max ≥ min"
                ))));
            }
        }
        cfg.experiment.validate()?;
        Ok(cfg)
    }

    /// Every setting in canonical units, in a fixed order. Parsing the
    /// echoed entries reproduces the configuration.
    pub fn echo(&self) -> Vec<(String, String)> {
        let x = &self.experiment;
        let mhz = |w: f64| format!("{} MHz", fmt_g(w / TAU / 1e6));
        let ghz = |w: f64| format!("{} GHz", fmt_g(w / TAU / 1e9));
        let ns = |t: f64| format!("{} ns", fmt_g(t * 1e9));
        let nm = |l: f64| format!("{} nm", fmt_g(l * 1e9));
        let mw = |i: f64| format!("{} MW/cm2", fmt_g(i / 1e10));
        let deg = |a: f64| format!("{} deg", fmt_g(a * 180.0 / PI));
        let num = |v: f64| fmt_g(v);
        let (lo, hi) = (&self.bounds.lo, &self.bounds.hi);
        let search = self.optimizer.search_grid;
        let mut out: Vec<(&str, String)> = vec![
            ("temperature", format!("{} K", fmt_g(x.vapor.temperature))),
            ("atomic_mass", format!("{} u", fmt_g(x.vapor.atomic_mass / ATOMIC_MASS_UNIT))),
            ("number_density", format!("{} cm-3", fmt_g(x.vapor.number_density / 1e6))),
            ("isotope", format!("\"{}\"", x.vapor.isotope)),
            ("omega_780", mhz(x.probe.rabi_peak)),
            ("delta_780", mhz(x.probe.detuning)),
            ("wavelength_780", nm(x.probe.wavelength)),
            ("theta_780", deg(x.probe.propagation_angle)),
            ("omega_480_peak", ghz(x.coupling.rabi_peak)),
            ("delta_480", ghz(x.coupling.detuning)),
            ("wavelength_480", nm(x.coupling.wavelength)),
            ("theta", deg(x.coupling.propagation_angle)),
            (
                "pulse_shape",
                match x.coupling_envelope.shape {
                    PulseShape::Gaussian => "gaussian".into(),
                    PulseShape::FlatTop => "flat_top".into(),
                },
            ),
            ("pulse_center", ns(x.coupling_envelope.center_time)),
            ("pulse_fwhm", ns(x.coupling_envelope.intensity_fwhm)),
            ("peak_scale", num(x.coupling_envelope.peak_scale)),
            ("calibration_intensity", mw(self.calibration_intensity)),
            ("calibration_rabi", ghz(x.calibration.rabi(self.calibration_intensity).unwrap_or(f64::NAN))),
            ("gamma_12", mhz(x.decay.gamma_12)),
            ("gamma_23", mhz(x.decay.gamma_23)),
            ("velocity_points", x.grid.n_points.to_string()),
            ("velocity_span", num(x.grid.span)),
            ("t_start", ns(x.t_start)),
            ("t_end", ns(x.t_end)),
            ("sample_step", format!("{} ps", fmt_g(x.solver.sample_step * 1e12))),
            ("max_step", format!("{} ps", fmt_g(x.solver.max_step * 1e12))),
            ("atol", num(x.solver.atol)),
            ("rtol", num(x.solver.rtol)),
            (
                "initial_state",
                match x.initial {
                    InitialState::SteadyState => "steady_state".into(),
                    InitialState::Ground => "ground".into(),
                },
            ),
            ("intensity_min", mw(self.intensity_axis.min)),
            ("intensity_max", mw(self.intensity_axis.max)),
            ("intensity_steps", self.intensity_axis.steps.to_string()),
            ("detuning_min", ghz(self.detuning_axis.min)),
            ("detuning_max", ghz(self.detuning_axis.max)),
            ("detuning_steps", self.detuning_axis.steps.to_string()),
            ("opt_probe_fwhm_min", ns(lo.probe_fwhm)),
            ("opt_probe_fwhm_max", ns(hi.probe_fwhm)),
            ("opt_coupling_fwhm_min", ns(lo.coupling_fwhm)),
            ("opt_coupling_fwhm_max", ns(hi.coupling_fwhm)),
            ("opt_probe_rabi_min", ghz(lo.probe_rabi)),
            ("opt_probe_rabi_max", ghz(hi.probe_rabi)),
            ("opt_coupling_rabi_min", ghz(lo.coupling_rabi)),
            ("opt_coupling_rabi_max", ghz(hi.coupling_rabi)),
            ("opt_delay_min", ns(lo.delay)),
            ("opt_delay_max", ns(hi.delay)),
            ("opt_grid_points", self.optimizer.grid_points.to_string()),
            ("opt_iterations", self.optimizer.iterations.to_string()),
            ("opt_search_points", search.map_or(0, |g| g.n_points).to_string()),
        ];
        if let Some(g) = search {
            out.push(("opt_search_span", num(g.span)));
        }
        out.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
    }

    /// The echo as config-file text.
    pub fn to_config_text(&self) -> String {
        let mut s = String::new();
        for (k, v) in self.echo() {
            let _ = writeln!(s, "{k} = {v}");
        }
        s
    }
}

/// Parses config text (`origin` names it in error messages) and applies
/// `overrides` on top.
pub fn parse_config(text: &str, origin: &str, overrides: &[String]) -> Result<RunConfig> {
    let mut entries = parse_entries(text, origin)?;
    for (i, o) in overrides.iter().enumerate() {
        let e = parse_override(o, i)?;
        entries.retain(|old| old.key != e.key);
        entries.push(e);
    }
    RunConfig::from_entries(&entries)
}

/// Reads and parses a config file; `None` uses the defaults.
pub fn load_config(path: Option<&Path>, overrides: &[String]) -> Result<RunConfig> {
    match path {
        None => parse_config("", "<defaults>", overrides),
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| match e.kind() {
                std::io::ErrorKind::NotFound => SimError::MissingFile { path: p.to_path_buf() },
                _ => SimError::io(p, e),
            })?;
            parse_config(&text, &p.display().to_string(), overrides)
        }
    }
}
