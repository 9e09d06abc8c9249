//! The CLI subcommands as library functions: run, write result files,
//! return a short summary.

use std::f64::consts::TAU;
use std::path::{Path, PathBuf};

use rydberg_core::analysis::{autler_townes_modes, fit_sqrt_scaling};
use rydberg_core::exec::Executor;
use rydberg_core::experiments::{
    detuning_scan, intensity_scan, pulse_cycles, run_trace, rydberg_retention, single_velocity_scan, ScanResult,
};
use rydberg_core::liouville::steady_state;
use rydberg_core::optimize::optimize_simultaneous_pulses;

use crate::config::RunConfig;
use crate::error::Result;
use crate::heatmap::render_heatmap;
use crate::output::{fmt_g, write_map, write_table, write_timeseries, Format, Metadata};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    Trace,
    IntensityScan,
    DetuningScan,
    SingleVelocityScan,
    SteadyState,
    Modes,
    FitScaling,
    OptimizePulses,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Trace => "trace",
            Command::IntensityScan => "intensity-scan",
            Command::DetuningScan => "detuning-scan",
            Command::SingleVelocityScan => "single-velocity-scan",
            Command::SteadyState => "steady-state",
            Command::Modes => "modes",
            Command::FitScaling => "fit-scaling",
            Command::OptimizePulses => "optimize-pulses",
        }
    }

    fn stem(self) -> String {
        self.name().replace('-', "_")
    }
}

/// Where and how results are written.
#[derive(Debug, Clone, PartialEq)]
pub struct OutputOptions {
    pub dir: PathBuf,
    pub format: Format,
    pub heatmap: bool,
}

/// Files written by a command and `key: value` summary lines.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Report {
    pub files: Vec<PathBuf>,
    pub summary: Vec<(String, String)>,
}

impl Report {
    fn add(&mut self, key: &str, value: impl Into<String>) {
        self.summary.push((key.into(), value.into()));
    }
}

fn ghz(w: f64) -> f64 {
    w / TAU / 1e9
}

fn result_path(out: &OutputOptions, stem: &str) -> PathBuf {
    out.dir.join(format!("{stem}.{}", out.format.extension()))
}

fn write_scan(scan: &ScanResult, stem: &str, meta: &Metadata, out: &OutputOptions, report: &mut Report) -> Result<()> {
    let path = result_path(out, stem);
    write_map(scan, &path, out.format, Some(meta))?;
    report.files.push(path);
    if out.heatmap {
        for obs in ["rho33", "im_rho21"] {
            let p = out.dir.join(format!("{stem}_{obs}.svg"));
            render_heatmap(scan, obs, &p)?;
            report.files.push(p);
        }
    }
    report.add("rows", scan.params.len().to_string());
    report.add("samples_per_row", scan.times.len().to_string());
    Ok(())
}

/// Runs `cmd` under `cfg` and writes its results below `out.dir`.
pub fn run<E: Executor>(cmd: Command, cfg: &RunConfig, out: &OutputOptions, exec: &E) -> Result<Report> {
    let x = &cfg.experiment;
    let meta = Metadata::new(cmd.name(), cfg.echo());
    let mut report = Report::default();
    let stem = cmd.stem();
    match cmd {
        Command::Trace => {
            let traj = run_trace(x, exec)?;
            let (a, b) = x.pulse_window();
            let mut meta = meta.note("pulse_window_ns", format!("{} {}", fmt_g(a * 1e9), fmt_g(b * 1e9)));
            match pulse_cycles(&traj, x) {
                Ok((cycles, phase)) => {
                    meta = meta.note("rabi_cycles", fmt_g(cycles)).note("phase_rad", fmt_g(phase));
                    report.add("rabi_cycles", fmt_g(cycles));
                    report.add("phase_over_pi", fmt_g(phase / std::f64::consts::PI));
                }
                Err(e) => report.add("rabi_cycles", format!("unavailable ({e})")),
            }
            match rydberg_retention(&traj, x.pulse_end()) {
                Ok(r) => {
                    meta = meta.note("retention", fmt_g(r));
                    report.add("retention", fmt_g(r));
                }
                Err(e) => report.add("retention", format!("unavailable ({e})")),
            }
            let peak = traj.rho33.iter().cloned().fold(0.0, f64::max);
            report.add("peak_rho33", fmt_g(peak));
            let path = result_path(out, &stem);
            write_timeseries(&traj, &path, out.format, Some(&meta))?;
            report.files.push(path);
        }
        Command::IntensityScan => {
            let scan = intensity_scan(x, &cfg.intensity_axis.values(), exec)?;
            write_scan(&scan, &stem, &meta, out, &mut report)?;
        }
        Command::DetuningScan => {
            let scan = detuning_scan(x, &cfg.detuning_axis.values(), exec)?;
            write_scan(&scan, &stem, &meta, out, &mut report)?;
        }
        Command::SingleVelocityScan => {
            let scan = single_velocity_scan(x, &cfg.detuning_axis.values(), exec)?;
            write_scan(&scan, &stem, &meta, out, &mut report)?;
        }
        Command::SteadyState => {
            let rho = steady_state(x.probe.rabi_peak, x.probe.detuning, &x.decay)?;
            let rows: Vec<Vec<f64>> = (1..=3)
                .flat_map(|i| (1..=3).map(move |j| (i, j)))
                .map(|(i, j)| {
                    let z = rho.element(i, j);
                    vec![i as f64, j as f64, z.re, z.im]
                })
                .collect();
            let p = rho.populations();
            report.add("rho11", fmt_g(p[0]));
            report.add("rho22", fmt_g(p[1]));
            report.add("rho33", fmt_g(p[2]));
            report.add("im_rho21", fmt_g(rho.im_rho21()));
            let path = result_path(out, &stem);
            write_table(&path, out.format, &meta, &["row", "col", "re", "im"], &rows)?;
            report.files.push(path);
        }
        Command::Modes => {
            let om = x.coupling.rabi_peak;
            let rows: Vec<Vec<f64>> = cfg
                .detuning_axis
                .values()
                .into_iter()
                .map(|d| {
                    let (slow, fast) = autler_townes_modes(om, d);
                    vec![ghz(d), ghz(slow), ghz(fast)]
                })
                .collect();
            let meta = meta.note("units", "ordinary frequency in GHz (angular / 2π)");
            report.add("omega_480_peak_ghz", fmt_g(ghz(om)));
            report.add("rows", rows.len().to_string());
            let path = result_path(out, &stem);
            write_table(&path, out.format, &meta, &["delta_480_ghz", "slow_ghz", "fast_ghz"], &rows)?;
            report.files.push(path);
        }
        Command::FitScaling => {
            let scan = intensity_scan(x, &cfg.intensity_axis.values(), exec)?;
            let fit = fit_sqrt_scaling(&scan, x.probe.rabi_peak, &x.calibration, x.pulse_window())?;
            let rows: Vec<Vec<f64>> = fit
                .residuals
                .iter()
                .map(|&(i, measured, residual)| vec![i / 1e10, ghz(measured), ghz(measured - residual), ghz(residual)])
                .collect();
            let meta = meta
                .note("r_squared", fmt_g(fit.r_squared))
                .note("amplitude", fmt_g(fit.amplitude))
                .note("excluded_rows", fit.excluded.len().to_string())
                .note("units", "dominant rho33 frequency, ordinary GHz");
            report.add("r_squared", fmt_g(fit.r_squared));
            report.add("amplitude", fmt_g(fit.amplitude));
            report.add("fitted_rows", fit.residuals.len().to_string());
            report.add("excluded_rows", fit.excluded.len().to_string());
            let path = result_path(out, &stem);
            let cols = ["intensity_mw_per_cm2", "measured_ghz", "predicted_ghz", "residual_ghz"];
            write_table(&path, out.format, &meta, &cols, &rows)?;
            report.files.push(path);
        }
        Command::OptimizePulses => {
            let r = optimize_simultaneous_pulses(x, &cfg.bounds, &cfg.optimizer, exec)?;
            let b = r.best;
            let row = vec![
                b.probe_fwhm * 1e9,
                b.coupling_fwhm * 1e9,
                ghz(b.probe_rabi),
                ghz(b.coupling_rabi),
                b.delay * 1e9,
                r.rydberg_population,
                r.search_population,
                r.evaluations as f64,
            ];
            report.add("rho33", fmt_g(r.rydberg_population));
            report.add("probe_fwhm_ns", fmt_g(row[0]));
            report.add("coupling_fwhm_ns", fmt_g(row[1]));
            report.add("probe_rabi_ghz", fmt_g(row[2]));
            report.add("coupling_rabi_ghz", fmt_g(row[3]));
            report.add("delay_ns", fmt_g(row[4]));
            report.add("evaluations", r.evaluations.to_string());
            let cols = [
                "probe_fwhm_ns",
                "coupling_fwhm_ns",
                "probe_rabi_ghz",
                "coupling_rabi_ghz",
                "delay_ns",
                "rho33",
                "search_rho33",
                "evaluations",
            ];
            let path = result_path(out, &stem);
            write_table(&path, out.format, &meta, &cols, &[row])?;
            report.files.push(path);
        }
    }
    Ok(report)
}

/// Relative path of `p` under `base` for display.
pub fn display_path(p: &Path, base: &Path) -> String {
    p.strip_prefix(base).unwrap_or(p).display().to_string()
}
