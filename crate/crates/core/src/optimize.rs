//! Search for simultaneous probe and coupling pulses that maximize the final
//! Rydberg population.

use alloc::vec::Vec;

use crate::doppler::shifted_detunings;
use crate::doppler::{velocity_grid, GridSettings, VelocityGrid};
use crate::error::{Error, Result};
use crate::exec::Executor;
use crate::experiments::ExperimentConfig;
use crate::liouville::{propagate_final, ClassDrive};
use crate::model::{DensityMatrix, PulseEnvelope, RYDBERG};

/// Time after the later pulse ends at which ρ₃₃ is read out, s.
pub const READOUT_DELAY: f64 = 200e-12;

/// Both pulses: intensity FWHM (s), peak Rabi frequency (rad/s) and the
/// coupling delay relative to the probe (s).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulsePair {
    pub probe_fwhm: f64,
    pub coupling_fwhm: f64,
    pub probe_rabi: f64,
    pub coupling_rabi: f64,
    pub delay: f64,
}

impl PulsePair {
    fn from_array(x: &[f64; 5]) -> Self {
        Self { probe_fwhm: x[0], coupling_fwhm: x[1], probe_rabi: x[2], coupling_rabi: x[3], delay: x[4] }
    }

    fn to_array(self) -> [f64; 5] {
        [self.probe_fwhm, self.coupling_fwhm, self.probe_rabi, self.coupling_rabi, self.delay]
    }

    pub fn probe_envelope(&self) -> PulseEnvelope {
        PulseEnvelope::gaussian(0.0, self.probe_fwhm)
    }

    pub fn coupling_envelope(&self) -> PulseEnvelope {
        PulseEnvelope::gaussian(self.delay, self.coupling_fwhm)
    }

    /// Integration interval: from the earlier pulse start to
    /// [`READOUT_DELAY`] after the later pulse end.
    pub fn window(&self) -> (f64, f64) {
        let (p, c) = (self.probe_envelope(), self.coupling_envelope());
        (p.start_time().min(c.start_time()), p.end_time().max(c.end_time()) + READOUT_DELAY)
    }
}

/// Closed interval per parameter; `lo == hi` pins a parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseBounds {
    pub lo: PulsePair,
    pub hi: PulsePair,
}

impl PulseBounds {
    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = (self.lo.to_array(), self.hi.to_array());
        for k in 0..5 {
            if !(lo[k].is_finite() && hi[k].is_finite()) {
                return Err(Error::domain("optimizer bounds must be finite"));
            }
            if lo[k] > hi[k] {
                return Err(Error::domain("empty optimizer search volume"));
            }
        }
        if lo[0] <= 0.0 || lo[1] <= 0.0 {
            return Err(Error::domain("pulse durations must be positive"));
        }
        if lo[2] < 0.0 || lo[3] < 0.0 {
            return Err(Error::domain("Rabi frequencies must be nonnegative"));
        }
        Ok(())
    }

    fn free_dims(&self) -> Vec<usize> {
        let (lo, hi) = (self.lo.to_array(), self.hi.to_array());
        (0..5).filter(|&k| hi[k] > lo[k]).collect()
    }

    /// Maps normalized coordinates of the free dimensions into the box.
    fn point(&self, dims: &[usize], u: &[f64]) -> PulsePair {
        let (lo, hi) = (self.lo.to_array(), self.hi.to_array());
        let mut x = lo;
        for (&d, &s) in dims.iter().zip(u) {
            x[d] = lo[d] + (hi[d] - lo[d]) * s.clamp(0.0, 1.0);
        }
        PulsePair::from_array(&x)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizerSettings {
    /// Grid points per free dimension.
    pub grid_points: usize,
    /// Simplex iterations after the grid search.
    pub iterations: usize,
    /// Velocity grid used while searching; `None` uses the configured grid.
    /// The reported population is always evaluated on the configured grid.
    pub search_grid: Option<GridSettings>,
}

impl Default for OptimizerSettings {
    fn default() -> Self {
        Self { grid_points: 8, iterations: 200, search_grid: None }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizationResult {
    pub best: PulsePair,
    /// Doppler-averaged final ρ₃₃ at `best` on the configured grid.
    pub rydberg_population: f64,
    /// Objective at `best` on the search grid.
    pub search_population: f64,
    pub evaluations: usize,
}

/// Final ρ₃₃ of the class with velocity `v`, starting in the ground state.
pub fn class_population(cfg: &ExperimentConfig, pair: &PulsePair, v: f64) -> Result<f64> {
    let (delta_780, delta_480) = shifted_detunings(v, &cfg.probe, &cfg.coupling);
    let drive = ClassDrive {
        omega_780: pair.probe_rabi,
        delta_780,
        omega_480_peak: pair.coupling_rabi,
        delta_480,
        probe_envelope: Some(pair.probe_envelope()),
        coupling_envelope: Some(pair.coupling_envelope()),
    };
    let (t0, t1) = pair.window();
    let rho = propagate_final(&DensityMatrix::ground(), t0, t1, &drive, &cfg.decay, &cfg.solver)?;
    Ok(rho.populations()[RYDBERG])
}

fn average<I: IntoIterator<Item = Result<f64>>>(values: I, grid: &VelocityGrid) -> Result<f64> {
    let mut acc = 0.0;
    for (w, x) in grid.weights.iter().zip(values) {
        acc += w * x?;
    }
    Ok(acc)
}

/// Weighted final ρ₃₃ over `grid`, classes evaluated through `exec`.
pub fn pair_population<E: Executor>(
    cfg: &ExperimentConfig,
    pair: &PulsePair,
    grid: &VelocityGrid,
    exec: &E,
) -> Result<f64> {
    average(exec.map(grid.len(), |i| class_population(cfg, pair, grid.nodes[i])), grid)
}

fn pair_population_seq(cfg: &ExperimentConfig, pair: &PulsePair, grid: &VelocityGrid) -> Result<f64> {
    average(grid.nodes.iter().map(|&v| class_population(cfg, pair, v)), grid)
}

/// Minimizes `f` over the unit cube from `x0` with an axis-aligned initial
/// simplex of edge `step`; points are clamped into the cube. Returns the best
/// vertex and its value.
pub fn nelder_mead<F>(mut f: F, x0: &[f64], step: f64, iterations: usize) -> Result<(Vec<f64>, f64)>
where
    F: FnMut(&[f64]) -> Result<f64>,
{
    let n = x0.len();
    let clamp = |x: Vec<f64>| -> Vec<f64> { x.into_iter().map(|v| v.clamp(0.0, 1.0)).collect() };
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    let start = clamp(x0.to_vec());
    let f0 = f(&start)?;
    simplex.push((start.clone(), f0));
    for d in 0..n {
        let mut x = start.clone();
        // step inwards when the start sits on the upper face
        x[d] = if x[d] + step <= 1.0 { x[d] + step } else { x[d] - step };
        let fx = f(&x)?;
        simplex.push((x, fx));
    }
    let combine =
        |a: &[f64], b: &[f64], t: f64| -> Vec<f64> { clamp(a.iter().zip(b).map(|(p, q)| p + t * (q - p)).collect()) };
    for _ in 0..iterations {
        if n == 0 {
            break;
        }
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let centroid: Vec<f64> = (0..n).map(|d| simplex[..n].iter().map(|v| v.0[d]).sum::<f64>() / n as f64).collect();
        let worst = simplex[n].clone();
        let reflected = combine(&centroid, &worst.0, -1.0);
        let fr = f(&reflected)?;
        if fr < simplex[0].1 {
            let expanded = combine(&centroid, &worst.0, -2.0);
            let fe = f(&expanded)?;
            simplex[n] = if fe < fr { (expanded, fe) } else { (reflected, fr) };
        } else if fr < simplex[n - 1].1 {
            simplex[n] = (reflected, fr);
        } else {
            let (target, ft) = if fr < worst.1 { (&reflected, fr) } else { (&worst.0, worst.1) };
            let contracted = combine(&centroid, target, 0.5);
            let fc = f(&contracted)?;
            if fc < ft {
                simplex[n] = (contracted, fc);
            } else {
                let best = simplex[0].0.clone();
                for v in simplex.iter_mut().skip(1) {
                    let x = combine(&best, &v.0, 0.5);
                    let fx = f(&x)?;
                    *v = (x, fx);
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (x, fx) = simplex.swap_remove(0);
    Ok((x, fx))
}

/// Grid search over `bounds` followed by simplex refinement of the best grid
/// point. Pulses start from the undriven ground state; the probe and
/// coupling detunings and wavelengths come from `cfg`.
pub fn optimize_simultaneous_pulses<E: Executor>(
    cfg: &ExperimentConfig,
    bounds: &PulseBounds,
    settings: &OptimizerSettings,
    exec: &E,
) -> Result<OptimizationResult> {
    bounds.validate()?;
    cfg.decay.validate()?;
    cfg.solver.validate()?;
    if settings.grid_points == 0 {
        return Err(Error::domain("optimizer grid needs at least one point per dimension"));
    }
    let full = cfg.velocity_grid()?;
    let search = match settings.search_grid {
        Some(g) => velocity_grid(&cfg.vapor, g.n_points, g.span)?,
        None => full.clone(),
    };
    let dims = bounds.free_dims();
    let m = settings.grid_points;
    let axis = |k: usize| if m == 1 { 0.5 } else { k as f64 / (m - 1) as f64 };
    let total = m.pow(dims.len() as u32);
    let unit_point = |mut idx: usize| -> Vec<f64> {
        let mut u = Vec::with_capacity(dims.len());
        for _ in 0..dims.len() {
            u.push(axis(idx % m));
            idx /= m;
        }
        u
    };

    // grid points run concurrently, each averaging its classes in order
    let scores: Vec<Result<f64>> =
        exec.map(total, |i| pair_population_seq(cfg, &bounds.point(&dims, &unit_point(i)), &search));
    let mut best_i = 0;
    let mut best_f = f64::NEG_INFINITY;
    for (i, s) in scores.into_iter().enumerate() {
        let s = s?;
        if s > best_f {
            best_f = s;
            best_i = i;
        }
    }
    let mut evaluations = total;

    let step = if m > 1 { 1.0 / (m - 1) as f64 } else { 0.25 };
    let (u, neg) = nelder_mead(
        |u| {
            evaluations += 1;
            pair_population(cfg, &bounds.point(&dims, u), &search, exec).map(|p| -p)
        },
        &unit_point(best_i),
        step,
        settings.iterations,
    )?;
    let (u, search_population) = if -neg >= best_f { (u, -neg) } else { (unit_point(best_i), best_f) };
    let best = bounds.point(&dims, &u);
    let rydberg_population =
        if settings.search_grid.is_some() { pair_population(cfg, &best, &full, exec)? } else { search_population };
    Ok(OptimizationResult { best, rydberg_population, search_population, evaluations })
}
