//! Scenario drivers: Doppler-averaged traces, intensity and detuning scans,
//! Rydberg retention and Rabi-cycle counting.

use alloc::vec::Vec;

use crate::constants::TAU;
use crate::doppler::{ensemble_average, shifted_detunings, velocity_grid, GridSettings, VelocityGrid};
use crate::error::{Error, Result};
use crate::exec::Executor;
use crate::integrate::SolverOptions;
use crate::liouville::{propagate, steady_state, ClassDrive, Trajectory};
use crate::model::{
    DecayRates, DensityMatrix, InvariantReport, LaserField, PulseEnvelope, RabiCalibration, VaporParams,
};

/// State of every velocity class at the start of the integration window.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitialState {
    /// Stationary state under the probe alone.
    SteadyState,
    /// All population in |1⟩.
    Ground,
}

/// Everything needed to simulate one Doppler-averaged trace.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub vapor: VaporParams,
    pub probe: LaserField,
    /// `None` for a cw probe.
    pub probe_envelope: Option<PulseEnvelope>,
    pub coupling: LaserField,
    pub coupling_envelope: PulseEnvelope,
    pub calibration: RabiCalibration,
    pub decay: DecayRates,
    pub grid: GridSettings,
    pub solver: SolverOptions,
    pub t_start: f64,
    pub t_end: f64,
    pub initial: InitialState,
}

impl Default for ExperimentConfig {
    /// ⁸⁵Rb at 130 °C, cw probe at 2π·220 MHz, 2.5 ns Gaussian coupling pulse
    /// at 2π·2.2 GHz centred at 2 ns, window −1…8 ns.
    fn default() -> Self {
        Self {
            vapor: VaporParams::rb85_default(),
            probe: LaserField::probe_default(),
            probe_envelope: None,
            coupling: LaserField::coupling_default(),
            coupling_envelope: PulseEnvelope::gaussian(2e-9, 2.5e-9),
            calibration: RabiCalibration::rb85_480nm(),
            decay: DecayRates::rb85_default(),
            grid: GridSettings::default(),
            solver: SolverOptions::default(),
            t_start: -1e-9,
            t_end: 8e-9,
            initial: InitialState::SteadyState,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        self.vapor.validate()?;
        self.probe.validate()?;
        self.coupling.validate()?;
        self.coupling_envelope.validate()?;
        if let Some(e) = &self.probe_envelope {
            e.validate()?;
        }
        self.decay.validate()?;
        self.solver.validate()?;
        if !(self.t_end > self.t_start) {
            return Err(Error::domain("time window needs t_end > t_start"));
        }
        Ok(())
    }

    pub fn velocity_grid(&self) -> Result<VelocityGrid> {
        velocity_grid(&self.vapor, self.grid.n_points, self.grid.span)
    }

    /// Drive seen by atoms with velocity `v` along the probe axis.
    pub fn class_drive(&self, v: f64) -> ClassDrive {
        let (delta_780, delta_480) = shifted_detunings(v, &self.probe, &self.coupling);
        ClassDrive {
            omega_780: self.probe.rabi_peak,
            delta_780,
            omega_480_peak: self.coupling.rabi_peak,
            delta_480,
            probe_envelope: self.probe_envelope,
            coupling_envelope: Some(self.coupling_envelope),
        }
    }

    /// Interval in which the coupling pulse dominates.
    pub fn pulse_window(&self) -> (f64, f64) {
        self.coupling_envelope.active_window()
    }

    /// Time after which the coupling pulse is off.
    pub fn pulse_end(&self) -> f64 {
        self.coupling_envelope.end_time()
    }

    fn initial_state(&self, drive: &ClassDrive) -> Result<DensityMatrix> {
        match self.initial {
            InitialState::Ground => Ok(DensityMatrix::ground()),
            InitialState::SteadyState => steady_state(drive.initial_probe(self.t_start), drive.delta_780, &self.decay),
        }
    }

    /// Propagates the class with velocity `v` through the window.
    pub fn run_class(&self, v: f64) -> Result<Trajectory> {
        let drive = self.class_drive(v);
        let rho0 = self.initial_state(&drive)?;
        propagate(&rho0, self.t_start, self.t_end, &drive, &self.decay, &self.solver)
    }
}

/// Doppler average over an explicit velocity grid.
pub fn ensemble_trace<E: Executor>(cfg: &ExperimentConfig, grid: &VelocityGrid, exec: &E) -> Result<Trajectory> {
    cfg.validate()?;
    let classes: Vec<Trajectory> =
        exec.map(grid.len(), |i| cfg.run_class(grid.nodes[i])).into_iter().collect::<Result<_>>()?;
    ensemble_average(&classes, grid)
}

/// Doppler-averaged trace on the configured thermal grid.
pub fn run_trace<E: Executor>(cfg: &ExperimentConfig, exec: &E) -> Result<Trajectory> {
    ensemble_trace(cfg, &cfg.velocity_grid()?, exec)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScanAxis {
    /// Peak coupling intensity, W/m².
    Intensity,
    /// Lab-frame coupling detuning, rad/s.
    Detuning,
}

/// Observable maps over a scan parameter and time.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanResult {
    pub axis: ScanAxis,
    pub params: Vec<f64>,
    /// s.
    pub times: Vec<f64>,
    /// `im_rho21[param][time]`.
    pub im_rho21: Vec<Vec<f64>>,
    /// `rho33[param][time]`.
    pub rho33: Vec<Vec<f64>>,
    /// Worst invariant deviations over every class and sample, when tracked.
    pub invariants: Option<InvariantReport>,
}

impl ScanResult {
    pub fn index_range(&self, t0: f64, t1: f64) -> core::ops::Range<usize> {
        let a = self.times.partition_point(|&t| t < t0);
        let b = self.times.partition_point(|&t| t <= t1);
        a..b.max(a)
    }

    /// Checks that the maps match the axes and that populations are in [0, 1].
    pub fn validate(&self) -> Result<()> {
        let rows_ok = self.im_rho21.len() == self.params.len() && self.rho33.len() == self.params.len();
        let cols_ok = self.im_rho21.iter().chain(self.rho33.iter()).all(|r| r.len() == self.times.len());
        if !(rows_ok && cols_ok) {
            return Err(Error::Shape("scan maps do not match their axes".into()));
        }
        if self.rho33.iter().flatten().any(|&p| !(-1e-9..=1.0 + 1e-9).contains(&p)) {
            return Err(Error::Range("Rydberg population outside [0, 1]".into()));
        }
        Ok(())
    }

    /// Row of a scan as a trajectory-like pair of series.
    pub fn row(&self, k: usize) -> (&[f64], &[f64]) {
        (&self.im_rho21[k], &self.rho33[k])
    }
}

fn ensure_sorted(values: &[f64], what: &str) -> Result<()> {
    if values.is_empty() {
        return Err(Error::domain(alloc::format!("{what} list is empty")));
    }
    if values.iter().any(|v| !v.is_finite()) || values.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::domain(alloc::format!("{what} values must be finite and sorted")));
    }
    Ok(())
}

fn scan<E, F>(
    cfg: &ExperimentConfig,
    axis: ScanAxis,
    params: &[f64],
    grid: &VelocityGrid,
    exec: &E,
    configure: F,
) -> Result<ScanResult>
where
    E: Executor,
    F: Fn(&mut ExperimentConfig, f64) -> Result<()>,
{
    let mut out = ScanResult {
        axis,
        params: params.to_vec(),
        times: Vec::new(),
        im_rho21: Vec::with_capacity(params.len()),
        rho33: Vec::with_capacity(params.len()),
        invariants: None,
    };
    for &p in params {
        let mut c = cfg.clone();
        configure(&mut c, p)?;
        let traj = ensemble_trace(&c, grid, exec)?;
        if out.times.is_empty() {
            out.times = traj.times.clone();
        }
        if let Some(r) = traj.invariants {
            out.invariants = Some(out.invariants.map_or(r, |acc| acc.merge(&r)));
        }
        out.im_rho21.push(traj.im_rho21);
        out.rho33.push(traj.rho33);
    }
    Ok(out)
}

/// Doppler-averaged maps versus peak coupling intensity (W/m²), using the
/// configured calibration.
pub fn intensity_scan<E: Executor>(cfg: &ExperimentConfig, intensities: &[f64], exec: &E) -> Result<ScanResult> {
    ensure_sorted(intensities, "intensity")?;
    if intensities[0] < 0.0 {
        return Err(Error::domain("intensities must be nonnegative"));
    }
    let grid = cfg.velocity_grid()?;
    scan(cfg, ScanAxis::Intensity, intensities, &grid, exec, |c, i| {
        c.coupling.rabi_peak = c.calibration.rabi(i)?;
        Ok(())
    })
}

fn detuning_scan_on<E: Executor>(
    cfg: &ExperimentConfig,
    detunings_480: &[f64],
    grid: &VelocityGrid,
    exec: &E,
) -> Result<ScanResult> {
    ensure_sorted(detunings_480, "detuning")?;
    if cfg.probe.detuning != 0.0 {
        return Err(Error::domain("detuning scans require a resonant probe"));
    }
    scan(cfg, ScanAxis::Detuning, detunings_480, grid, exec, |c, d| {
        c.coupling.detuning = d;
        Ok(())
    })
}

/// Doppler-averaged maps versus lab-frame coupling detuning (rad/s).
pub fn detuning_scan<E: Executor>(cfg: &ExperimentConfig, detunings_480: &[f64], exec: &E) -> Result<ScanResult> {
    detuning_scan_on(cfg, detunings_480, &cfg.velocity_grid()?, exec)
}

/// Detuning scan for atoms at rest only.
pub fn single_velocity_scan<E: Executor>(
    cfg: &ExperimentConfig,
    detunings_480: &[f64],
    exec: &E,
) -> Result<ScanResult> {
    detuning_scan_on(cfg, detunings_480, &VelocityGrid::at_rest(), exec)
}

/// `n` evenly spaced values from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => alloc::vec![lo],
        _ => (0..n).map(|k| if k == n - 1 { hi } else { lo + (hi - lo) * k as f64 / (n - 1) as f64 }).collect(),
    }
}

/// Default intensity axis: 64 points from 0 to 21 MW/cm² (W/m²).
pub fn default_intensities() -> Vec<f64> {
    linspace(0.0, 21e10, 64)
}

/// Default detuning axis: 81 points over ±2π·2 GHz (rad/s).
pub fn default_detunings() -> Vec<f64> {
    linspace(-TAU * 2e9, TAU * 2e9, 81)
}

/// Length of the averaging window of [`rydberg_retention`], s.
pub const RETENTION_WINDOW: f64 = 1e-9;

/// Mean Rydberg population over `[pulse_end, pulse_end + window]`.
pub fn rydberg_retention_over(traj: &Trajectory, pulse_end: f64, window: f64) -> Result<f64> {
    let (first, last) = match (traj.times.first(), traj.times.last()) {
        (Some(&a), Some(&b)) => (a, b),
        _ => return Err(Error::Range("empty trajectory".into())),
    };
    let slack = 1e-6 * window;
    if pulse_end < first - slack || pulse_end + window > last + slack {
        return Err(Error::Range(alloc::format!(
            "retention window [{pulse_end:e}, {:e}] s outside trajectory [{first:e}, {last:e}] s",
            pulse_end + window
        )));
    }
    let r = traj.index_range(pulse_end - slack, pulse_end + window + slack);
    let vals = &traj.rho33[r];
    if vals.is_empty() {
        return Err(Error::Range("no samples inside the retention window".into()));
    }
    Ok(vals.iter().sum::<f64>() / vals.len() as f64)
}

/// Mean Rydberg population over the nanosecond after `pulse_end`.
pub fn rydberg_retention(traj: &Trajectory, pulse_end: f64) -> Result<f64> {
    rydberg_retention_over(traj, pulse_end, RETENTION_WINDOW)
}

/// Minimum prominence of a counted ρ₃₃ maximum.
pub const CYCLE_PROMINENCE: f64 = 0.02;
/// Minimum samples per counted cycle.
pub const MIN_SAMPLES_PER_CYCLE: usize = 20;

/// Indices of local maxima with topographic prominence ≥ `min_prominence`.
pub fn prominent_maxima(series: &[f64], min_prominence: f64) -> Vec<usize> {
    let n = series.len();
    let mut out = Vec::new();
    let mut i = 1;
    while i + 1 < n {
        if series[i] > series[i - 1] {
            // walk over a plateau
            let mut j = i;
            while j + 1 < n && series[j + 1] == series[i] {
                j += 1;
            }
            if j + 1 < n && series[j + 1] < series[i] {
                let peak = (i + j) / 2;
                let h = series[i];
                let mut left_min = h;
                for k in (0..i).rev() {
                    if series[k] > h {
                        break;
                    }
                    left_min = left_min.min(series[k]);
                }
                let mut right_min = h;
                for &v in &series[j + 1..] {
                    if v > h {
                        break;
                    }
                    right_min = right_min.min(v);
                }
                if h - left_min.max(right_min) >= min_prominence {
                    out.push(peak);
                }
            }
            i = j + 1;
        } else {
            i += 1;
        }
    }
    out
}

/// Counts ρ₃₃ maxima (prominence ≥ 0.02) in a series covering the pulse;
/// returns `(cycles, phase = 2π·cycles)`.
pub fn count_rabi_cycles(rho33: &[f64]) -> Result<(f64, f64)> {
    let peaks = prominent_maxima(rho33, CYCLE_PROMINENCE);
    if peaks.windows(2).any(|w| w[1] - w[0] < MIN_SAMPLES_PER_CYCLE) {
        return Err(Error::Resolution(alloc::format!("fewer than {MIN_SAMPLES_PER_CYCLE} samples per Rabi cycle")));
    }
    let cycles = peaks.len() as f64;
    Ok((cycles, TAU * cycles))
}

/// Cycles of the Rydberg population inside the pulse window of `cfg`.
pub fn pulse_cycles(traj: &Trajectory, cfg: &ExperimentConfig) -> Result<(f64, f64)> {
    let (a, b) = cfg.pulse_window();
    let r = traj.index_range(a, b);
    count_rabi_cycles(&traj.rho33[r])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exec::Sequential;

    #[test]
    fn flat_series_has_no_cycles() {
        assert_eq!(count_rabi_cycles(&[0.3; 500]).unwrap(), (0.0, 0.0));
    }

    #[test]
    fn three_periods_of_sin_squared() {
        let w = 1.0;
        let period = TAU / w;
        let n = 3 * 100;
        let s: Vec<f64> = (0..=n).map(|k| (0.5 * w * (3.0 * period) * k as f64 / n as f64).sin().powi(2)).collect();
        let (c, phase) = count_rabi_cycles(&s).unwrap();
        assert_eq!(c, 3.0);
        assert!((phase - 6.0 * core::f64::consts::PI).abs() < 1e-12);
    }

    #[test]
    fn undersampled_series_is_rejected() {
        let s: Vec<f64> = (0..200).map(|k| (k as f64 * 0.7).sin().powi(2)).collect();
        assert!(matches!(count_rabi_cycles(&s), Err(Error::Resolution(_))));
    }

    #[test]
    fn small_ripples_are_not_counted() {
        let s: Vec<f64> = (0..1000)
            .map(|k| {
                let x = k as f64 / 1000.0;
                (core::f64::consts::PI * x).sin() + 0.005 * (60.0 * x).sin()
            })
            .collect();
        assert_eq!(count_rabi_cycles(&s).unwrap().0, 1.0);
    }

    #[test]
    fn plateau_maximum_counts_once() {
        let s = [0.0, 0.5, 1.0, 1.0, 1.0, 0.5, 0.0];
        assert_eq!(prominent_maxima(&s, 0.02), alloc::vec![3]);
    }

    #[test]
    fn retention_window_checks_range() {
        let traj = Trajectory { times: linspace(0.0, 3e-9, 301), rho33: alloc::vec![0.25; 301], ..Default::default() };
        assert!((rydberg_retention(&traj, 1e-9).unwrap() - 0.25).abs() < 1e-15);
        assert!(matches!(rydberg_retention(&traj, 2.5e-9), Err(Error::Range(_))));
        assert!(matches!(rydberg_retention(&traj, -1e-9), Err(Error::Range(_))));
    }

    #[test]
    fn linspace_endpoints() {
        let v = linspace(-2.0, 2.0, 81);
        assert_eq!(v.len(), 81);
        assert_eq!(v[0], -2.0);
        assert_eq!(v[40], 0.0);
        assert_eq!(v[80], 2.0);
        assert_eq!(default_intensities().len(), 64);
        assert_eq!(*default_intensities().last().unwrap(), 21e10);
    }

    #[test]
    fn no_pulse_trace_is_flat() {
        let mut cfg = ExperimentConfig::default();
        cfg.coupling.rabi_peak = 0.0;
        cfg.grid = GridSettings { n_points: 5, span: 2.0 };
        cfg.solver.sample_step = 10e-12;
        let traj = run_trace(&cfg, &Sequential).unwrap();
        let first = (traj.im_rho21[0], traj.rho22[0]);
        for k in 0..traj.len() {
            assert!((traj.im_rho21[k] - first.0).abs() < 1e-8);
            assert!((traj.rho22[k] - first.1).abs() < 1e-8);
            assert!(traj.rho33[k].abs() < 1e-12);
        }
        let ret = rydberg_retention(&traj, cfg.pulse_end()).unwrap();
        assert!(ret.abs() < 1e-12);
    }

    #[test]
    fn scans_validate_axes() {
        let cfg = ExperimentConfig::default();
        assert!(intensity_scan(&cfg, &[1.0, 0.5], &Sequential).is_err());
        assert!(intensity_scan(&cfg, &[-1.0, 0.5], &Sequential).is_err());
        assert!(detuning_scan(&cfg, &[], &Sequential).is_err());
        let mut off = cfg.clone();
        off.probe.detuning = 1.0;
        assert!(single_velocity_scan(&off, &[0.0], &Sequential).is_err());
    }

    #[test]
    fn flat_top_ladder_oscillates_at_generalized_rabi_frequency() {
        // ρ22 = (Ωp/W)² sin²(Wt/2) with W = √(Ωp² + Ωc²): the spectral line sits at W
        let mut cfg = ExperimentConfig::default();
        cfg.decay = DecayRates::none();
        cfg.initial = InitialState::Ground;
        cfg.coupling_envelope = PulseEnvelope::flat_top(4e-9, 8.5e-9);
        cfg.t_start = 0.0;
        cfg.t_end = 8e-9;
        let traj = ensemble_trace(&cfg, &VelocityGrid::at_rest(), &Sequential).unwrap();
        let w = cfg.probe.rabi_peak.hypot(cfg.coupling.rabi_peak);
        let m = crate::analysis::dominant_frequencies(&traj.rho22, &traj.times, 1).unwrap();
        assert!((m.dominant().unwrap() - w).abs() < m.resolution, "{} vs {w}", m.dominant().unwrap());
        let amp = (cfg.probe.rabi_peak / w).powi(2);
        let peak = traj.rho22.iter().cloned().fold(0.0, f64::max);
        assert!((peak - amp).abs() < 1e-4 * amp);
    }
}
