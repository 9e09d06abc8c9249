//! Master equation of the ladder in the rotating frame.
//!
//! ```text
//! dρ/dt = -i[H, ρ] + L(ρ)
//!
//!     ⎡ 0      Ω₇₈₀/2          0             ⎤
//! H = ⎢ Ω₇₈₀/2 −Δ₇₈₀           Ω₄₈₀(t)/2     ⎥
//!     ⎣ 0      Ω₄₈₀(t)/2       −Δ₇₈₀ − Δ₄₈₀  ⎦
//! ```
//!
//! with `H` in angular-frequency units (ħ = 1) and `L` the spontaneous decay
//! |2⟩ → |1⟩ at Γ₁₂ and |3⟩ → |2⟩ at Γ₂₃.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)] // unused whenever std is linked into the build
use num_traits::Float;

use crate::error::{Error, Result};
use crate::integrate::{integrate, SolverOptions, StepStats};
use crate::linalg::{c64, DenseMatrix, Mat3, C64, MINUS_I};
use crate::model::{DecayRates, DensityMatrix, InvariantReport, PulseEnvelope};

/// Instantaneous drive parameters entering the Hamiltonian, rad/s.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct HamiltonianParams {
    pub omega_780: f64,
    /// Envelope already applied.
    pub omega_480: f64,
    pub delta_780: f64,
    pub delta_480: f64,
}

impl HamiltonianParams {
    /// Real symmetric entries `(diag, upper)`: diagonal and (01, 12) couplings.
    #[inline]
    fn tridiagonal(&self) -> ([f64; 3], [f64; 2]) {
        ([0.0, -self.delta_780, -self.delta_780 - self.delta_480], [0.5 * self.omega_780, 0.5 * self.omega_480])
    }
}

/// Rotating-wave Hamiltonian divided by ħ.
pub fn build_hamiltonian(p: &HamiltonianParams) -> Mat3 {
    let (d, o) = p.tridiagonal();
    let mut h = Mat3::zeros();
    for k in 0..3 {
        h[(k, k)] = c64(d[k], 0.0);
    }
    h[(0, 1)] = c64(o[0], 0.0);
    h[(1, 0)] = c64(o[0], 0.0);
    h[(1, 2)] = c64(o[1], 0.0);
    h[(2, 1)] = c64(o[1], 0.0);
    h
}

/// Dissipative part of dρ/dt, written out term by term.
pub fn lindblad_apply(rho: &Mat3, g: &DecayRates) -> Mat3 {
    let (g12, g23) = (g.gamma_12, g.gamma_23);
    let r = |i: usize, j: usize| rho[(i, j)];
    let mut out = Mat3::zeros();
    // Γ₁₂ block
    out[(0, 0)] = r(1, 1) * g12;
    out[(0, 1)] = r(0, 1) * (-0.5 * g12);
    out[(1, 0)] = r(1, 0) * (-0.5 * g12);
    out[(1, 1)] = r(1, 1) * (-g12);
    out[(1, 2)] = r(1, 2) * (-0.5 * g12);
    out[(2, 1)] = r(2, 1) * (-0.5 * g12);
    // Γ₂₃ block
    out[(0, 2)] = r(0, 2) * (-0.5 * g23);
    out[(2, 0)] = r(2, 0) * (-0.5 * g23);
    out[(1, 1)] += r(2, 2) * g23;
    out[(1, 2)] += r(1, 2) * (-0.5 * g23);
    out[(2, 1)] += r(2, 1) * (-0.5 * g23);
    out[(2, 2)] = r(2, 2) * (-g23);
    out
}

/// `-i[H, ρ] + L(ρ)` for a given set of instantaneous parameters.
#[inline]
pub fn rhs_at(p: &HamiltonianParams, rho: &Mat3, g: &DecayRates) -> Mat3 {
    let (d, o) = p.tridiagonal();
    let r = &rho.0;
    // H ρ for the real tridiagonal H
    let mut hr = [C64::new(0.0, 0.0); 9];
    for j in 0..3 {
        hr[j] = r[j] * d[0] + r[3 + j] * o[0];
        hr[3 + j] = r[j] * o[0] + r[3 + j] * d[1] + r[6 + j] * o[1];
        hr[6 + j] = r[3 + j] * o[1] + r[6 + j] * d[2];
    }
    // ρ H
    let mut rh = [C64::new(0.0, 0.0); 9];
    for i in 0..3 {
        let row = &r[3 * i..3 * i + 3];
        rh[3 * i] = row[0] * d[0] + row[1] * o[0];
        rh[3 * i + 1] = row[0] * o[0] + row[1] * d[1] + row[2] * o[1];
        rh[3 * i + 2] = row[1] * o[1] + row[2] * d[2];
    }
    let mut out = lindblad_apply(rho, g);
    for k in 0..9 {
        out.0[k] += MINUS_I * (hr[k] - rh[k]);
    }
    out
}

/// Time-dependent drive seen by one velocity class.
pub trait Drive {
    fn params_at(&self, t: f64) -> HamiltonianParams;

    /// Times where the drive is discontinuous.
    fn breakpoints(&self) -> Vec<f64> {
        Vec::new()
    }
}

impl Drive for HamiltonianParams {
    fn params_at(&self, _t: f64) -> HamiltonianParams {
        *self
    }
}

/// Probe and coupling as seen by atoms of one velocity class: Doppler-shifted
/// detunings, peak Rabi frequencies, and optional envelopes (`None` = cw).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassDrive {
    pub omega_780: f64,
    pub delta_780: f64,
    pub omega_480_peak: f64,
    pub delta_480: f64,
    pub probe_envelope: Option<PulseEnvelope>,
    pub coupling_envelope: Option<PulseEnvelope>,
}

impl ClassDrive {
    /// Probe Rabi frequency before the pulse sequence starts.
    pub fn initial_probe(&self, t: f64) -> f64 {
        self.omega_780 * self.probe_envelope.map_or(1.0, |e| e.value(t))
    }
}

impl Drive for ClassDrive {
    #[inline]
    fn params_at(&self, t: f64) -> HamiltonianParams {
        HamiltonianParams {
            omega_780: self.omega_780 * self.probe_envelope.map_or(1.0, |e| e.value(t)),
            omega_480: self.omega_480_peak * self.coupling_envelope.map_or(1.0, |e| e.value(t)),
            delta_780: self.delta_780,
            delta_480: self.delta_480,
        }
    }

    fn breakpoints(&self) -> Vec<f64> {
        let mut out: Vec<f64> = [self.probe_envelope, self.coupling_envelope]
            .iter()
            .flatten()
            .flat_map(|e| e.breakpoints())
            .flatten()
            .collect();
        out.sort_by(|a, b| a.total_cmp(b));
        out.dedup();
        out
    }
}

/// `dρ/dt` at time `t`.
pub fn rhs<D: Drive + ?Sized>(t: f64, rho: &DensityMatrix, drive: &D, g: &DecayRates) -> Mat3 {
    rhs_at(&drive.params_at(t), rho.matrix(), g)
}

/// Liouville superoperator for constant parameters, acting on row-major
/// vectorized ρ. Built column by column from [`rhs_at`] applied to matrix
/// units, so it agrees with the propagated equation by construction.
pub fn superoperator(p: &HamiltonianParams, g: &DecayRates) -> DenseMatrix {
    let mut l = DenseMatrix::zeros(9);
    for col in 0..9 {
        let out = rhs_at(p, &Mat3::unit(col / 3, col % 3), g);
        for row in 0..9 {
            l[(row, col)] = out.0[row];
        }
    }
    l
}

/// Stationary state of the cw-driven ladder with the coupling laser off.
///
/// The vectorized equation `L·vec(ρ) = 0` is solved with the ρ₁₁ row replaced
/// by the trace condition. When Γ₂₃ = 0 the Rydberg level is decoupled and its
/// populations and coherences are undetermined; they are fixed to the
/// Γ₂₃ → 0⁺ limit, which is zero.
pub fn steady_state(omega_780: f64, delta_780: f64, g: &DecayRates) -> Result<DensityMatrix> {
    if !(omega_780 >= 0.0) || !omega_780.is_finite() || !delta_780.is_finite() {
        return Err(Error::domain("probe Rabi frequency must be finite and nonnegative"));
    }
    g.validate()?;
    let p = HamiltonianParams { omega_780, omega_480: 0.0, delta_780, delta_480: 0.0 };
    let mut a = superoperator(&p, g);
    let mut b = vec![c64(0.0, 0.0); 9];
    for j in 0..9 {
        a[(0, j)] = c64(0.0, 0.0);
    }
    for k in [0, 4, 8] {
        a[(0, k)] = c64(1.0, 0.0);
    }
    b[0] = c64(1.0, 0.0);
    if g.gamma_23 == 0.0 {
        for row in [2, 5, 6, 7, 8] {
            for j in 0..9 {
                a[(row, j)] = c64(0.0, 0.0);
            }
            a[(row, row)] = c64(1.0, 0.0);
        }
    }
    let x = a.solve(&b)?;
    Ok(DensityMatrix::from_raw(Mat3::from_vec9(&x)))
}

/// Observables sampled along a propagation (or an ensemble average of them).
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Trajectory {
    /// s, strictly increasing.
    pub times: Vec<f64>,
    pub im_rho21: Vec<f64>,
    pub rho11: Vec<f64>,
    pub rho22: Vec<f64>,
    pub rho33: Vec<f64>,
    /// Full states at every sample when requested.
    pub snapshots: Option<Vec<DensityMatrix>>,
    /// Worst invariant deviations over the samples when tracked.
    pub invariants: Option<InvariantReport>,
    pub stats: StepStats,
}

impl Trajectory {
    pub fn with_capacity(n: usize, snapshots: bool) -> Self {
        Self {
            times: Vec::with_capacity(n),
            im_rho21: Vec::with_capacity(n),
            rho11: Vec::with_capacity(n),
            rho22: Vec::with_capacity(n),
            rho33: Vec::with_capacity(n),
            snapshots: snapshots.then(|| Vec::with_capacity(n)),
            invariants: None,
            stats: StepStats::default(),
        }
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn push(&mut self, t: f64, rho: &DensityMatrix) {
        let [p1, p2, p3] = rho.populations();
        self.times.push(t);
        self.im_rho21.push(rho.im_rho21());
        self.rho11.push(p1);
        self.rho22.push(p2);
        self.rho33.push(p3);
        if let Some(s) = self.snapshots.as_mut() {
            s.push(*rho);
        }
    }

    /// Index range of samples with `t0 ≤ t ≤ t1`.
    pub fn index_range(&self, t0: f64, t1: f64) -> core::ops::Range<usize> {
        let a = self.times.partition_point(|&t| t < t0);
        let b = self.times.partition_point(|&t| t <= t1);
        a..b.max(a)
    }

    /// Copy of the samples within `[t0, t1]`.
    pub fn window(&self, t0: f64, t1: f64) -> Trajectory {
        let r = self.index_range(t0, t1);
        Trajectory {
            times: self.times[r.clone()].to_vec(),
            im_rho21: self.im_rho21[r.clone()].to_vec(),
            rho11: self.rho11[r.clone()].to_vec(),
            rho22: self.rho22[r.clone()].to_vec(),
            rho33: self.rho33[r.clone()].to_vec(),
            snapshots: self.snapshots.as_ref().map(|s| s[r].to_vec()),
            invariants: self.invariants,
            stats: self.stats,
        }
    }

    /// Time step if the sampling is uniform to within 1e-9 relative.
    pub fn uniform_step(&self) -> Option<f64> {
        uniform_step(&self.times)
    }
}

pub(crate) fn uniform_step(times: &[f64]) -> Option<f64> {
    if times.len() < 2 {
        return None;
    }
    let dt = (times[times.len() - 1] - times[0]) / (times.len() - 1) as f64;
    let ok = dt > 0.0 && times.windows(2).all(|w| ((w[1] - w[0]) - dt).abs() <= 1e-6 * dt);
    ok.then_some(dt)
}

/// Sample times `t_start + k·step` up to `t_end`, with `t_end` appended when
/// it does not fall on the grid.
pub fn sample_times(t_start: f64, t_end: f64, step: f64) -> Vec<f64> {
    let n = ((t_end - t_start) / step + 1e-9).floor() as usize;
    let mut out: Vec<f64> = (0..=n).map(|k| t_start + k as f64 * step).collect();
    if let Some(&last) = out.last() {
        if t_end - last > 1e-9 * step {
            out.push(t_end);
        } else {
            *out.last_mut().unwrap() = t_end;
        }
    }
    out
}

/// Integrates the master equation from `t_start` to `t_end`, sampling the
/// observables every `solver.sample_step`.
///
/// ρ is neither re-normalized nor re-Hermitized; drift shows up in the
/// tracked invariants.
pub fn propagate<D: Drive + ?Sized>(
    rho0: &DensityMatrix,
    t_start: f64,
    t_end: f64,
    drive: &D,
    g: &DecayRates,
    solver: &SolverOptions,
) -> Result<Trajectory> {
    let times = sample_times(t_start, t_end, solver.sample_step);
    propagate_sampled(rho0, &times, drive, g, solver)
}

/// As [`propagate`], with explicit sample times (ascending; the first one is
/// the start of the integration, the last one its end).
pub fn propagate_sampled<D: Drive + ?Sized>(
    rho0: &DensityMatrix,
    times: &[f64],
    drive: &D,
    g: &DecayRates,
    solver: &SolverOptions,
) -> Result<Trajectory> {
    solver.validate()?;
    let (t_start, t_end) = match (times.first(), times.last()) {
        (Some(&a), Some(&b)) if b > a => (a, b),
        _ => return Err(Error::domain("propagation needs t_end > t_start")),
    };
    if times.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Shape("sample times must be strictly increasing".into()));
    }
    let mut traj = Trajectory::with_capacity(times.len(), solver.keep_snapshots);
    let mut report = InvariantReport::default();
    let mut record = |traj: &mut Trajectory, t: f64, m: &Mat3| {
        let rho = DensityMatrix::from_raw(*m);
        if solver.track_invariants {
            report = report.merge(&rho.invariants());
        }
        traj.push(t, &rho);
    };
    record(&mut traj, t_start, rho0.matrix());

    let mut edges: Vec<f64> = drive.breakpoints().into_iter().filter(|&b| b > t_start && b < t_end).collect();
    edges.push(t_end);

    let f = |t: f64, y: &Mat3| rhs_at(&drive.params_at(t), y, g);
    let mut y = *rho0.matrix();
    let mut seg_start = t_start;
    let mut h = None;
    let mut next = 1usize;
    for &seg_end in &edges {
        let hi = next + times[next..].partition_point(|&t| t <= seg_end);
        let seg_samples = &times[next..hi];
        let (y_end, h_last, stats) =
            integrate(f, y, seg_start, seg_end, h, solver, seg_samples, |k, m| record(&mut traj, seg_samples[k], m))?;
        traj.stats.add(&stats);
        y = y_end;
        // restart with a fresh step estimate after a discontinuity
        h = if seg_end < t_end { None } else { Some(h_last) };
        seg_start = seg_end;
        next = hi;
    }
    if solver.track_invariants {
        traj.invariants = Some(report);
    }
    Ok(traj)
}

/// Integrates without sampling and returns only the final state.
pub fn propagate_final<D: Drive + ?Sized>(
    rho0: &DensityMatrix,
    t_start: f64,
    t_end: f64,
    drive: &D,
    g: &DecayRates,
    solver: &SolverOptions,
) -> Result<DensityMatrix> {
    solver.validate()?;
    if !(t_end > t_start) {
        return Err(Error::domain("propagation needs t_end > t_start"));
    }
    let mut edges: Vec<f64> = drive.breakpoints().into_iter().filter(|&b| b > t_start && b < t_end).collect();
    edges.push(t_end);
    let f = |t: f64, y: &Mat3| rhs_at(&drive.params_at(t), y, g);
    let mut y = *rho0.matrix();
    let mut seg_start = t_start;
    for &seg_end in &edges {
        let (y_end, _, _) = integrate(f, y, seg_start, seg_end, None, solver, &[], |_, _| {})?;
        y = y_end;
        seg_start = seg_end;
    }
    Ok(DensityMatrix::from_raw(y))
}
