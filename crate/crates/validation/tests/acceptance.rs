//! End-to-end acceptance checks at desk scale. Each criterion prints one
//! PASS/FAIL line; the process fails if any criterion does.

use std::f64::consts::{PI, TAU};
use std::time::{Duration, Instant};

use rydberg_core::analysis::{
    autler_townes_modes, dominant_frequencies, fit_sqrt_scaling, frequency_ratio, ModeSpectrum,
};
use rydberg_core::exec::Executor;
use rydberg_core::experiments::{
    count_rabi_cycles, default_detunings, default_intensities, detuning_scan, intensity_scan, pulse_cycles, run_trace,
    rydberg_retention, single_velocity_scan, ExperimentConfig, InitialState, ScanResult,
};
use rydberg_core::integrate::SolverOptions;
use rydberg_core::liouville::{propagate, rhs_at, steady_state, HamiltonianParams, Trajectory};
use rydberg_core::model::{DecayRates, DensityMatrix, InvariantReport, PulseEnvelope};
use rydberg_core::optimize::optimize_simultaneous_pulses;
use rydberg_core::oracle::oracle_states;
use rydberg_sim::{RunConfig, ThreadPool};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn ghz(w: f64) -> f64 {
    w / TAU / 1e9
}

fn secs(d: Duration) -> String {
    format!("{:.1} s", d.as_secs_f64())
}

fn spectrum(series: &[f64], times: &[f64], modes: usize) -> ModeSpectrum {
    dominant_frequencies(series, times, modes).expect("spectrum")
}

/// Every simulated output that criteria 5 to 9 are computed from.
struct Outputs {
    trace: Trajectory,
    trace_time: Duration,
    intensity: ScanResult,
    detuning: ScanResult,
    at_rest: ScanResult,
    at_rest_flat: ScanResult,
}

impl Outputs {
    /// Bit patterns of every sampled value, for determinism comparisons.
    fn bits(&self) -> Vec<u64> {
        let mut out = Vec::new();
        let mut push = |xs: &[f64]| out.extend(xs.iter().map(|x| x.to_bits()));
        let t = &self.trace;
        for s in [&t.times, &t.im_rho21, &t.rho11, &t.rho22, &t.rho33] {
            push(s);
        }
        for scan in [&self.intensity, &self.detuning, &self.at_rest, &self.at_rest_flat] {
            push(&scan.params);
            push(&scan.times);
            for r in scan.im_rho21.iter().chain(&scan.rho33) {
                push(r);
            }
        }
        out
    }
}

fn base_config() -> ExperimentConfig {
    ExperimentConfig::default()
}

/// Constant coupling over the same 4 ns as the active window of the default
/// pulse, so the dressed-state frequencies are sharply defined.
fn flat_top_config() -> ExperimentConfig {
    let mut cfg = ExperimentConfig::default();
    cfg.coupling_envelope = PulseEnvelope::flat_top(2e-9, 4e-9);
    cfg
}

fn resonant_detunings() -> Vec<f64> {
    default_detunings().into_iter().filter(|d| d.abs() <= TAU * 1e9 * (1.0 + 1e-12)).collect()
}

/// Invariant tracking only adds checks; the simulated values do not depend on it.
fn simulate<E: Executor>(exec: &E, track_invariants: bool) -> Outputs {
    let mut cfg = base_config();
    cfg.solver.track_invariants = track_invariants;
    let t0 = Instant::now();
    let trace = run_trace(&cfg, exec).expect("trace");
    let trace_time = t0.elapsed();
    let intensity = intensity_scan(&cfg, &default_intensities(), exec).expect("intensity scan");
    let detuning = detuning_scan(&cfg, &default_detunings(), exec).expect("detuning scan");
    let at_rest = single_velocity_scan(&cfg, &resonant_detunings(), exec).expect("v=0 scan");
    let mut flat = flat_top_config();
    flat.solver.track_invariants = track_invariants;
    let at_rest_flat = single_velocity_scan(&flat, &resonant_detunings(), exec).expect("flat v=0 scan");
    Outputs { trace, trace_time, intensity, detuning, at_rest, at_rest_flat }
}

fn oracle_equivalence() -> Outcome {
    let mut cfg = ExperimentConfig::default();
    cfg.solver = SolverOptions { keep_snapshots: true, ..SolverOptions::reference() };
    let t0 = Instant::now();
    let traj = cfg.run_class(0.0).expect("propagate");
    let elapsed = t0.elapsed();
    let snaps = traj.snapshots.as_ref().unwrap();
    let mut idx: Vec<usize> = (0..traj.len()).step_by(100).chain([traj.len() - 1]).collect();
    idx.dedup();
    let times: Vec<f64> = idx.iter().map(|&k| traj.times[k]).collect();
    let t1 = Instant::now();
    let oracle = oracle_states(&snaps[0], &times, &cfg.class_drive(0.0), &cfg.decay, 1e-12).expect("oracle");
    let oracle_time = t1.elapsed();
    let mut worst = 0.0f64;
    for (&k, o) in idx.iter().zip(&oracle) {
        for i in 1..=3 {
            for j in 1..=3 {
                worst = worst.max((snaps[k].element(i, j) - o.element(i, j)).norm());
            }
        }
    }
    outcome(
        worst <= 1e-8 && elapsed.as_secs_f64() < 10.0,
        format!(
            "max |Δρ| = {worst:.2e} over {} checkpoints (≤ 1e-8); propagate {} (< 10 s), oracle {}",
            times.len(),
            secs(elapsed),
            secs(oracle_time)
        ),
    )
}

/// Worst |Tr ρ² − 1| over every class and sample of the default sweep with
/// Γ = 0, starting from the ground state.
fn purity_sweep<E: Executor>(exec: &E) -> f64 {
    let mut base = ExperimentConfig::default();
    base.decay = DecayRates::none();
    base.initial = InitialState::Ground;
    base.solver.keep_snapshots = true;
    let mut rows = Vec::new();
    for i in default_intensities() {
        let mut c = base.clone();
        c.coupling.rabi_peak = c.calibration.rabi(i).unwrap();
        rows.push(c);
    }
    for d in default_detunings() {
        let mut c = base.clone();
        c.coupling.detuning = d;
        rows.push(c);
    }
    let grid = base.velocity_grid().unwrap();
    let mut worst = 0.0f64;
    for c in &rows {
        let per_class = exec.map(grid.len(), |k| {
            let drive = c.class_drive(grid.nodes[k]);
            let traj = propagate(&DensityMatrix::ground(), c.t_start, c.t_end, &drive, &c.decay, &c.solver).unwrap();
            traj.snapshots.unwrap().iter().map(|r| (r.purity() - 1.0).abs()).fold(0.0, f64::max)
        });
        worst = per_class.into_iter().fold(worst, f64::max);
    }
    worst
}

fn physics_invariants<E: Executor>(out: &Outputs, exec: &E) -> Outcome {
    let report: InvariantReport = out.intensity.invariants.unwrap().merge(&out.detuning.invariants.unwrap());
    let t0 = Instant::now();
    let purity = purity_sweep(exec);
    let ok = report.trace_error <= 1e-9
        && report.hermiticity_error <= 1e-10
        && report.min_eigenvalue >= -1e-8
        && purity <= 1e-7;
    outcome(
        ok,
        format!(
            "{} rows × 201 classes: trace {:.1e} (≤ 1e-9), hermiticity {:.1e} (≤ 1e-10), min eigenvalue {:.1e} (≥ -1e-8); Γ=0 purity drift {:.1e} (≤ 1e-7, {})",
            out.intensity.params.len() + out.detuning.params.len(),
            report.trace_error,
            report.hermiticity_error,
            report.min_eigenvalue,
            purity,
            secs(t0.elapsed())
        ),
    )
}

fn two_level_oracle() -> Outcome {
    let omega = TAU * 220e6;
    let drive = HamiltonianParams { omega_780: omega, omega_480: 0.0, delta_780: 0.0, delta_480: 0.0 };
    let t_end = 10.0 * TAU / omega;
    let traj = propagate(&DensityMatrix::ground(), 0.0, t_end, &drive, &DecayRates::none(), &SolverOptions::default())
        .expect("propagate");
    let worst = traj
        .times
        .iter()
        .zip(&traj.rho22)
        .map(|(&t, &p)| (p - (0.5 * omega * t).sin().powi(2)).abs())
        .fold(0.0, f64::max);
    outcome(worst <= 1e-6, format!("max |ρ22 − sin²(Ωt/2)| = {worst:.2e} over 10 periods (≤ 1e-6)"))
}

fn steady_state_check() -> Outcome {
    let decay = DecayRates::rb85_default();
    let omega = TAU * 220e6;
    let rho = steady_state(omega, 0.0, &decay).expect("steady state");
    let p = HamiltonianParams { omega_780: omega, omega_480: 0.0, delta_780: 0.0, delta_480: 0.0 };
    let r = rhs_at(&p, rho.matrix(), &decay);
    let mut residual = 0.0f64;
    for i in 0..3 {
        for j in 0..3 {
            residual = residual.max(r[(i, j)].norm());
        }
    }
    let rho22 = rho.populations()[1];
    outcome(
        (rho22 - 0.4998).abs() <= 1e-4 && residual <= 1e-10 * decay.gamma_12,
        format!("ρ22 = {rho22:.6} (0.4998 ± 1e-4); residual {residual:.2e} rad/s (≤ {:.2e})", 1e-10 * decay.gamma_12),
    )
}

fn cycle_count(out: &Outputs) -> Outcome {
    match pulse_cycles(&out.trace, &base_config()) {
        Ok((cycles, phase)) => outcome(
            (5.0..=7.0).contains(&cycles) && (10.0 * PI..=14.0 * PI).contains(&phase) && out.trace_time.as_secs() < 120,
            format!(
                "{cycles} cycles (5..7), phase {:.1}π (10π..14π), trace {} (< 120 s)",
                phase / PI,
                secs(out.trace_time)
            ),
        ),
        Err(e) => outcome(false, format!("cycle count failed: {e}")),
    }
}

fn retention(out: &Outputs) -> Outcome {
    let r = rydberg_retention(&out.trace, base_config().pulse_end()).expect("retention");
    outcome((r - 0.35).abs() <= 0.10, format!("post-pulse ρ33 = {r:.4} (0.35 ± 0.10)"))
}

fn sqrt_scaling(out: &Outputs) -> Outcome {
    let cfg = base_config();
    match fit_sqrt_scaling(&out.intensity, cfg.probe.rabi_peak, &cfg.calibration, cfg.pulse_window()) {
        Ok(fit) => outcome(
            fit.r_squared >= 0.98,
            format!(
                "R² = {:.4} (≥ 0.98) over {} rows, {} without a full cycle excluded, amplitude {:.4}",
                fit.r_squared,
                fit.residuals.len(),
                fit.excluded.len(),
                fit.amplitude
            ),
        ),
        Err(e) => outcome(false, format!("fit failed: {e}")),
    }
}

fn frequency_doubling(out: &Outputs) -> Outcome {
    let (a, b) = base_config().pulse_window();
    let scan = &out.intensity;
    let r = scan.index_range(a, b);
    let times = &scan.times[r.clone()];
    let mut ratios = Vec::new();
    for row in 0..scan.params.len() {
        let rho33 = &scan.rho33[row][r.clone()];
        if !matches!(count_rabi_cycles(rho33), Ok((c, _)) if c >= 2.0) {
            continue;
        }
        let f33 = spectrum(rho33, times, 1).dominant().unwrap();
        let f21 = spectrum(&scan.im_rho21[row][r.clone()], times, 1).dominant().unwrap();
        ratios.push((row, frequency_ratio(f33, f21)));
    }
    let bad: Vec<&(usize, f64)> = ratios.iter().filter(|(_, q)| (q - 2.0).abs() > 0.1).collect();
    let (lo, hi) = ratios.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &(_, q)| (l.min(q), h.max(q)));
    outcome(
        !ratios.is_empty() && bad.is_empty(),
        format!(
            "{} rows with ≥ 2 cycles, ratio range {lo:.3}..{hi:.3}, {} outside 2.0 ± 0.1{}",
            ratios.len(),
            bad.len(),
            if bad.is_empty() {
                String::new()
            } else {
                format!(" ({})", bad.iter().map(|(k, q)| format!("row {k}: {q:.3}")).collect::<Vec<_>>().join(", "))
            }
        ),
    )
}

fn detuning_behavior(out: &Outputs) -> Outcome {
    let cfg = base_config();
    let (a, b) = cfg.pulse_window();
    let scan = &out.detuning;
    let r = scan.index_range(a, b);
    let times = &scan.times[r.clone()];

    // Doppler-averaged dominant coherence frequency, walking outwards from Δ = 0
    let limit = TAU * 1e9 * (1.0 + 1e-12);
    let centre = scan.params.iter().position(|&d| d == 0.0).expect("Δ = 0 row");
    let freq = |row: usize| spectrum(&scan.im_rho21[row][r.clone()], times, 2).dominant().unwrap();
    let mut worst_rise = 0.0f64;
    for dir in [-1isize, 1] {
        let mut prev = freq(centre);
        let mut k = centre as isize + dir;
        while k >= 0 && (k as usize) < scan.params.len() && scan.params[k as usize].abs() <= limit {
            let f = freq(k as usize);
            worst_rise = worst_rise.max(f - prev);
            prev = f;
            k += dir;
        }
    }
    let resolution = spectrum(&scan.im_rho21[centre][r.clone()], times, 1).resolution;
    let monotone = worst_rise <= 0.0;

    // v = 0 under constant coupling: both dressed branches appear in the spectrum
    let flat = &out.at_rest_flat;
    let fc = flat_top_config();
    let (fa, fb) = fc.pulse_window();
    let fr = flat.index_range(fa, fb);
    let mut worst_branch = 0.0f64;
    let mut flat_res = 0.0;
    for (row, &d) in flat.params.iter().enumerate() {
        let m = spectrum(&flat.im_rho21[row][fr.clone()], &flat.times[fr.clone()], 2);
        flat_res = m.resolution;
        let (slow, fast) = autler_townes_modes(fc.coupling.rabi_peak, d);
        for branch in [slow, fast] {
            let miss = m.frequencies.iter().map(|f| (f - branch).abs()).fold(f64::INFINITY, f64::min);
            worst_branch = worst_branch.max(miss / m.resolution);
        }
    }
    let branches = worst_branch <= 2.0;

    // mirror symmetry of the v = 0 frequency sets under Δ → −Δ
    let mut worst_mirror = 0.0f64;
    for scan in [&out.at_rest, &out.at_rest_flat] {
        let n = scan.params.len();
        for row in 0..n / 2 {
            let m = spectrum(&scan.im_rho21[row][r.clone()], times, 2);
            let w = spectrum(&scan.im_rho21[n - 1 - row][r.clone()], times, 2);
            assert!((scan.params[row] + scan.params[n - 1 - row]).abs() < 1.0);
            let diff = m
                .frequencies
                .iter()
                .zip(&w.frequencies)
                .map(|(x, y)| (x - y).abs())
                .fold(if m.frequencies.len() == w.frequencies.len() { 0.0 } else { f64::INFINITY }, f64::max);
            worst_mirror = worst_mirror.max(diff / m.resolution);
        }
    }
    let symmetric = worst_mirror <= 1.0;

    outcome(
        monotone && branches && symmetric,
        format!(
            "Doppler-averaged dominant frequency {} in |Δ| ≤ 1 GHz (largest rise {:.3} GHz, resolution {:.3} GHz); v=0 branches within {:.2}× resolution (≤ 2, resolution {:.3} GHz); mirror mismatch {:.2}× resolution (≤ 1)",
            if monotone { "non-increasing" } else { "rises" },
            ghz(worst_rise),
            ghz(resolution),
            worst_branch,
            ghz(flat_res),
            worst_mirror
        ),
    )
}

fn optimizer<E: Executor>(exec: &E) -> Outcome {
    let run = RunConfig::default();
    let t0 = Instant::now();
    match optimize_simultaneous_pulses(&run.experiment, &run.bounds, &run.optimizer, exec) {
        Ok(r) => {
            let elapsed = t0.elapsed();
            let b = r.best;
            outcome(
                r.rydberg_population > 0.9 && elapsed.as_secs() < 600,
                format!(
                    "ρ33 = {:.4} (> 0.9) with probe {:.3} ns / {:.2} GHz, coupling {:.3} ns / {:.2} GHz, delay {:.3} ns; {} evaluations in {} (< 600 s)",
                    r.rydberg_population,
                    b.probe_fwhm * 1e9,
                    ghz(b.probe_rabi),
                    b.coupling_fwhm * 1e9,
                    ghz(b.coupling_rabi),
                    b.delay * 1e9,
                    r.evaluations,
                    secs(elapsed)
                ),
            )
        }
        Err(e) => outcome(false, format!("optimizer failed: {e}")),
    }
}

fn determinism(reference: &Outputs) -> Outcome {
    let bits = reference.bits();
    let mut detail = Vec::new();
    let mut ok = true;
    for threads in [1, 4] {
        let pool = ThreadPool::new(threads).unwrap();
        let again = simulate(&pool, false);
        let same = again.bits() == bits;
        ok &= same;
        detail.push(format!("{threads} thread(s): {}", if same { "identical" } else { "differs" }));
    }
    outcome(ok, format!("{} values compared against the first run; {}", bits.len(), detail.join(", ")))
}

fn example_peak(out: &Outputs) -> Outcome {
    let (a, b) = base_config().pulse_window();
    let r = out.trace.index_range(a, b);
    let peak = out.trace.rho33[r].iter().cloned().fold(0.0, f64::max);
    outcome(peak >= 0.3, format!("peak ρ33 during the pulse = {peak:.4} (≥ 0.3)"))
}

fn example_consistency(out: &Outputs) -> Outcome {
    let row = out.detuning.params.iter().position(|&d| d == 0.0).unwrap();
    let same_detuning = out.detuning.rho33[row] == out.trace.rho33 && out.detuning.im_rho21[row] == out.trace.im_rho21;
    let last = out.intensity.params.len() - 1;
    // constant in time to 1e-8, the tolerance for an undriven steady state
    let drift = |row: &[f64]| row.iter().map(|x| (x - row[0]).abs()).fold(0.0, f64::max);
    let zero_drift = drift(&out.intensity.rho33[0]).max(drift(&out.intensity.im_rho21[0]));
    let flat = zero_drift <= 1e-8;
    outcome(
        same_detuning && flat,
        format!(
            "Δ480 = 0 row bit-identical to the default trace: {same_detuning}; zero-intensity row drift {zero_drift:.1e} (≤ 1e-8; top row {:.3e} W/m²)",
            out.intensity.params[last]
        ),
    )
}

fn example_transient(out: &Outputs) -> Outcome {
    let cfg = base_config();
    let (a, b) = cfg.pulse_window();
    let end = cfg.pulse_end();
    let span = |t0: f64, t1: f64| {
        let r = out.trace.index_range(t0, t1);
        let s = &out.trace.im_rho21[r];
        s.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - s.iter().cloned().fold(f64::INFINITY, f64::min)
    };
    let (during, after) = (span(a, b), span(end - 1e-9, end));
    let before = span(cfg.t_start, cfg.t_start + 0.5e-9);
    outcome(
        during > after && after > before,
        format!("Im ρ21 peak-to-peak: before {before:.2e}, during {during:.2e}, final ns {after:.2e}"),
    )
}

fn example_amplitude(out: &Outputs) -> Outcome {
    let (a, b) = base_config().pulse_window();
    let scan = &out.at_rest;
    let r = scan.index_range(a, b);
    let amp = |row: usize| {
        let m = spectrum(&scan.im_rho21[row][r.clone()], &scan.times[r.clone()], 1);
        m.amplitudes[0]
    };
    let best = (0..scan.params.len()).max_by(|&i, &j| amp(i).total_cmp(&amp(j))).unwrap();
    outcome(
        scan.params[best] == 0.0,
        format!("v=0 strongest coherence oscillation at Δ480 = {:.3} GHz ({:.4})", ghz(scan.params[best]), amp(best)),
    )
}

fn main() {
    let started = Instant::now();
    let pool = ThreadPool::new(0).expect("thread pool");
    let mut results: Vec<(&str, Outcome)> = Vec::new();
    let mut report = |name: &'static str, o: Outcome| {
        println!("{} {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        results.push((name, o));
    };

    report("1 oracle equivalence", oracle_equivalence());
    let t0 = Instant::now();
    let out = simulate(&pool, true);
    println!("     (default trace and scans simulated in {})", secs(t0.elapsed()));
    report("2 physics invariants", physics_invariants(&out, &pool));
    report("3 two-level oracle", two_level_oracle());
    report("4 steady state", steady_state_check());
    report("5 cycle count", cycle_count(&out));
    report("6 retention", retention(&out));
    report("7 sqrt scaling", sqrt_scaling(&out));
    report("8 frequency doubling", frequency_doubling(&out));
    report("9 detuning behavior", detuning_behavior(&out));
    report("10 optimizer", optimizer(&pool));
    report("11 determinism", determinism(&out));
    report("example trace peak", example_peak(&out));
    report("example scan consistency", example_consistency(&out));
    report("example transient", example_transient(&out));
    report("example v=0 amplitude", example_amplitude(&out));

    let failed: Vec<&str> = results.iter().filter(|(_, o)| !o.pass).map(|(n, _)| *n).collect();
    println!(
        "acceptance: {} passed, {} failed in {}",
        results.len() - failed.len(),
        failed.len(),
        secs(started.elapsed())
    );
    if !failed.is_empty() {
        std::process::exit(1);
    }
}
