//! CSV and JSON writers and readers for trajectories, scan maps and small
//! result tables.
//!
//! CSV files start with `# key = value` metadata lines (when metadata is
//! given) followed by a header row; numbers carry 12 significant digits.
//! JSON files hold the same data with full precision.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use rydberg_core::experiments::{ScanAxis, ScanResult};
use rydberg_core::liouville::Trajectory;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SimError};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Significant digits of CSV numbers.
pub const SIGNIFICANT_DIGITS: usize = 12;

pub const TIMESERIES_COLUMNS: [&str; 5] = ["time_ns", "im_rho21", "rho11", "rho22", "rho33"];
pub const MAP_COLUMNS: [&str; 4] = ["param", "time_ns", "im_rho21", "rho33"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

/// Shortest `%g`-style rendering with 12 significant digits.
pub fn fmt_g(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let p = SIGNIFICANT_DIGITS;
    let sci = format!("{:.*e}", p - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent in scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -5 || exp >= p as i32 {
        let m = mantissa.trim_end_matches('0').trim_end_matches('.');
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (p as i32 - 1 - exp).max(0) as usize;
        let s = format!("{:.*}", decimals, x);
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    }
}

/// Provenance written alongside every result: artifact version, the command
/// and the fully resolved configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct Metadata {
    pub version: String,
    pub command: String,
    pub config: Vec<(String, String)>,
    /// Extra result-specific notes.
    #[serde(default)]
    pub notes: Vec<(String, String)>,
}

impl Metadata {
    pub fn new(command: &str, config: Vec<(String, String)>) -> Self {
        Self { version: VERSION.into(), command: command.into(), config, notes: Vec::new() }
    }

    pub fn note(mut self, key: &str, value: impl Into<String>) -> Self {
        self.notes.push((key.into(), value.into()));
        self
    }

    fn write_comments(&self, w: &mut impl Write) -> std::io::Result<()> {
        writeln!(w, "# version = {}", self.version)?;
        writeln!(w, "# command = {}", self.command)?;
        for (k, v) in self.config.iter().chain(&self.notes) {
            writeln!(w, "# {k} = {v}")?;
        }
        Ok(())
    }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| SimError::io(dir, e))?;
    }
    File::create(path).map(BufWriter::new).map_err(|e| SimError::io(path, e))
}

fn csv_error(path: &Path, e: csv::Error) -> SimError {
    if e.is_io_error() {
        match e.into_kind() {
            csv::ErrorKind::Io(io) => SimError::io(path, io),
            _ => unreachable!(),
        }
    } else {
        SimError::Format { path: path.into(), msg: e.to_string() }
    }
}

/// Writes a numeric table as CSV.
pub fn write_csv_table(path: &Path, meta: Option<&Metadata>, columns: &[&str], rows: &[Vec<f64>]) -> Result<()> {
    let mut file = create(path)?;
    if let Some(m) = meta {
        m.write_comments(&mut file).map_err(|e| SimError::io(path, e))?;
    }
    let mut w = csv::Writer::from_writer(file);
    w.write_record(columns).map_err(|e| csv_error(path, e))?;
    for row in rows {
        w.write_record(row.iter().map(|x| fmt_g(*x))).map_err(|e| csv_error(path, e))?;
    }
    w.flush().map_err(|e| SimError::io(path, e))
}

/// Reads a CSV table, skipping `#` lines; checks the header.
pub fn read_csv_table(path: &Path, columns: &[&str]) -> Result<Vec<Vec<f64>>> {
    let file = File::open(path).map_err(|e| SimError::io(path, e))?;
    let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(file);
    let header = r.headers().map_err(|e| csv_error(path, e))?.clone();
    if header.iter().ne(columns.iter().copied()) {
        return Err(SimError::Format { path: path.into(), msg: format!("expected columns {columns:?}") });
    }
    let mut out = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(|e| csv_error(path, e))?;
        let row = rec
            .iter()
            .map(|f| f.parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| SimError::Format { path: path.into(), msg: e.to_string() })?;
        out.push(row);
    }
    Ok(out)
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut file = create(path)?;
    serde_json::to_writer_pretty(&mut file, value)
        .map_err(|e| SimError::Format { path: path.into(), msg: e.to_string() })?;
    writeln!(file).and_then(|_| file.flush()).map_err(|e| SimError::io(path, e))
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let file = File::open(path).map_err(|e| SimError::io(path, e))?;
    serde_json::from_reader(std::io::BufReader::new(file))
        .map_err(|e| SimError::Format { path: path.into(), msg: e.to_string() })
}

#[derive(Serialize, Deserialize)]
struct TimeseriesJson {
    #[serde(flatten)]
    meta: Metadata,
    time_ns: Vec<f64>,
    im_rho21: Vec<f64>,
    rho11: Vec<f64>,
    rho22: Vec<f64>,
    rho33: Vec<f64>,
}

/// Writes the observables of `traj`.
pub fn write_timeseries(traj: &Trajectory, path: &Path, format: Format, meta: Option<&Metadata>) -> Result<()> {
    let time_ns: Vec<f64> = traj.times.iter().map(|t| t * 1e9).collect();
    match format {
        Format::Csv => {
            let rows: Vec<Vec<f64>> = (0..traj.len())
                .map(|k| vec![time_ns[k], traj.im_rho21[k], traj.rho11[k], traj.rho22[k], traj.rho33[k]])
                .collect();
            write_csv_table(path, meta, &TIMESERIES_COLUMNS, &rows)
        }
        Format::Json => write_json(
            path,
            &TimeseriesJson {
                meta: meta.cloned().unwrap_or_else(|| Metadata::new("", Vec::new())),
                time_ns,
                im_rho21: traj.im_rho21.clone(),
                rho11: traj.rho11.clone(),
                rho22: traj.rho22.clone(),
                rho33: traj.rho33.clone(),
            },
        ),
    }
}

/// Reads a file written by [`write_timeseries`] (times back in seconds).
pub fn read_timeseries(path: &Path, format: Format) -> Result<Trajectory> {
    let mut traj = Trajectory::default();
    match format {
        Format::Csv => {
            for row in read_csv_table(path, &TIMESERIES_COLUMNS)? {
                traj.times.push(row[0] * 1e-9);
                traj.im_rho21.push(row[1]);
                traj.rho11.push(row[2]);
                traj.rho22.push(row[3]);
                traj.rho33.push(row[4]);
            }
        }
        Format::Json => {
            let j: TimeseriesJson = read_json(path)?;
            traj.times = j.time_ns.iter().map(|t| t * 1e-9).collect();
            traj.im_rho21 = j.im_rho21;
            traj.rho11 = j.rho11;
            traj.rho22 = j.rho22;
            traj.rho33 = j.rho33;
        }
    }
    Ok(traj)
}

fn axis_name(axis: ScanAxis) -> &'static str {
    match axis {
        ScanAxis::Intensity => "intensity_w_per_m2",
        ScanAxis::Detuning => "detuning_480_rad_per_s",
    }
}

fn axis_from_name(name: &str) -> Option<ScanAxis> {
    match name {
        "intensity_w_per_m2" => Some(ScanAxis::Intensity),
        "detuning_480_rad_per_s" => Some(ScanAxis::Detuning),
        _ => None,
    }
}

#[derive(Serialize, Deserialize)]
struct MapJson {
    #[serde(flatten)]
    meta: Metadata,
    axis: String,
    params: Vec<f64>,
    time_ns: Vec<f64>,
    im_rho21: Vec<Vec<f64>>,
    rho33: Vec<Vec<f64>>,
}

/// Writes a scan map: long-format CSV (one row per parameter and time) or
/// nested JSON arrays with the axis vectors. The parameter is in SI units
/// (W/m² or rad/s); the CSV names the axis in its `# axis` line.
pub fn write_map(scan: &ScanResult, path: &Path, format: Format, meta: Option<&Metadata>) -> Result<()> {
    scan.validate()?;
    let axis = axis_name(scan.axis);
    match format {
        Format::Csv => {
            let rows: Vec<Vec<f64>> = scan
                .params
                .iter()
                .enumerate()
                .flat_map(|(i, &p)| {
                    (0..scan.times.len())
                        .map(move |k| vec![p, scan.times[k] * 1e9, scan.im_rho21[i][k], scan.rho33[i][k]])
                })
                .collect();
            // the axis line is needed to read the map back
            let mut m = meta.cloned().unwrap_or_else(|| Metadata::new("", Vec::new()));
            m.notes.insert(0, ("axis".into(), axis.into()));
            write_csv_table(path, Some(&m), &MAP_COLUMNS, &rows)
        }
        Format::Json => write_json(
            path,
            &MapJson {
                meta: meta.cloned().unwrap_or_else(|| Metadata::new("", Vec::new())),
                axis: axis.into(),
                params: scan.params.clone(),
                time_ns: scan.times.iter().map(|t| t * 1e9).collect(),
                im_rho21: scan.im_rho21.clone(),
                rho33: scan.rho33.clone(),
            },
        ),
    }
}

fn read_axis_comment(path: &Path) -> Result<ScanAxis> {
    let text = std::fs::read_to_string(path).map_err(|e| SimError::io(path, e))?;
    text.lines()
        .take_while(|l| l.starts_with('#'))
        .find_map(|l| l.strip_prefix("# axis = ").and_then(axis_from_name))
        .ok_or_else(|| SimError::Format { path: path.into(), msg: "missing `# axis` line".into() })
}

/// Reads a file written by [`write_map`].
pub fn read_map(path: &Path, format: Format) -> Result<ScanResult> {
    let bad = |msg: &str| SimError::Format { path: path.into(), msg: msg.into() };
    match format {
        Format::Csv => {
            let axis = read_axis_comment(path)?;
            let rows = read_csv_table(path, &MAP_COLUMNS)?;
            let mut scan =
                ScanResult { axis, params: vec![], times: vec![], im_rho21: vec![], rho33: vec![], invariants: None };
            for row in rows {
                if scan.params.last() != Some(&row[0]) {
                    scan.params.push(row[0]);
                    scan.im_rho21.push(Vec::new());
                    scan.rho33.push(Vec::new());
                }
                if scan.params.len() == 1 {
                    scan.times.push(row[1] * 1e-9);
                }
                scan.im_rho21.last_mut().unwrap().push(row[2]);
                scan.rho33.last_mut().unwrap().push(row[3]);
            }
            scan.validate().map_err(|_| bad("rows do not form a rectangular map"))?;
            Ok(scan)
        }
        Format::Json => {
            let j: MapJson = read_json(path)?;
            let scan = ScanResult {
                axis: axis_from_name(&j.axis).ok_or_else(|| bad("unknown axis"))?,
                params: j.params,
                times: j.time_ns.iter().map(|t| t * 1e-9).collect(),
                im_rho21: j.im_rho21,
                rho33: j.rho33,
                invariants: None,
            };
            scan.validate().map_err(|_| bad("map does not match its axes"))?;
            Ok(scan)
        }
    }
}

#[derive(Serialize, Deserialize)]
struct TableJson {
    #[serde(flatten)]
    meta: Metadata,
    columns: Vec<String>,
    rows: Vec<Vec<f64>>,
}

/// Writes a small numeric table in either format.
pub fn write_table(path: &Path, format: Format, meta: &Metadata, columns: &[&str], rows: &[Vec<f64>]) -> Result<()> {
    match format {
        Format::Csv => write_csv_table(path, Some(meta), columns, rows),
        Format::Json => write_json(
            path,
            &TableJson {
                meta: meta.clone(),
                columns: columns.iter().map(|c| c.to_string()).collect(),
                rows: rows.to_vec(),
            },
        ),
    }
}

/// Reads a table written by [`write_table`].
pub fn read_table(path: &Path, format: Format, columns: &[&str]) -> Result<Vec<Vec<f64>>> {
    match format {
        Format::Csv => read_csv_table(path, columns),
        Format::Json => {
            let j: TableJson = read_json(path)?;
            if j.columns.iter().map(String::as_str).ne(columns.iter().copied()) {
                return Err(SimError::Format { path: path.into(), msg: format!("expected columns {columns:?}") });
            }
            Ok(j.rows)
        }
    }
}
