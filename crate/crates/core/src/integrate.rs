//! Dormand–Prince 5(4) integrator with the 4th-order continuous extension,
//! specialised to a 3×3 complex matrix state.

#[allow(unused_imports)] // unused whenever std is linked into the build
use num_traits::Float;

use crate::error::{Error, Result};
use crate::linalg::Mat3;

/// Tolerances and sampling for [`integrate`] and the propagators built on it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Absolute tolerance per real component.
    pub atol: f64,
    /// Relative tolerance per real component.
    pub rtol: f64,
    /// Spacing of the output samples, s.
    pub sample_step: f64,
    /// Upper bound on the internal step, s.
    pub max_step: f64,
    /// Hard cap on accepted plus rejected steps per call.
    pub max_steps: usize,
    /// Record full density matrices at every sample.
    pub keep_snapshots: bool,
    /// Evaluate the density-matrix invariants at every sample.
    pub track_invariants: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            atol: 1e-10,
            rtol: 1e-8,
            sample_step: 1e-12,
            max_step: 50e-12,
            max_steps: 5_000_000,
            keep_snapshots: false,
            track_invariants: false,
        }
    }
}

impl SolverOptions {
    /// Tight tolerances used when comparing against an independent propagator.
    pub fn reference() -> Self {
        Self { atol: 1e-13, rtol: 1e-12, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.atol > 0.0 && self.rtol > 0.0) {
            return Err(Error::domain("solver tolerances must be positive"));
        }
        if !(self.sample_step > 0.0 && self.max_step > 0.0) {
            return Err(Error::domain("sample step and max step must be positive"));
        }
        Ok(())
    }
}

/// Work counters of one integration.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct StepStats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
}

impl StepStats {
    pub fn add(&mut self, other: &StepStats) {
        self.accepted += other.accepted;
        self.rejected += other.rejected;
        self.evaluations += other.evaluations;
    }
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

fn lin(terms: &[(f64, &Mat3)]) -> Mat3 {
    let mut out = Mat3::zeros();
    for (c, m) in terms {
        if *c != 0.0 {
            out = out.axpy(*c, m);
        }
    }
    out
}

/// RMS of the componentwise scaled error over the 18 real components.
fn error_norm(err: &Mat3, y0: &Mat3, y1: &Mat3, atol: f64, rtol: f64) -> f64 {
    let mut acc = 0.0;
    for k in 0..9 {
        let (e, a, b) = (err.0[k], y0.0[k], y1.0[k]);
        let sr = atol + rtol * a.re.abs().max(b.re.abs());
        let si = atol + rtol * a.im.abs().max(b.im.abs());
        acc += (e.re / sr).powi(2) + (e.im / si).powi(2);
    }
    (acc / 18.0).sqrt()
}

/// Coefficients of the continuous extension over one accepted step.
struct Dense {
    t: f64,
    h: f64,
    r: [Mat3; 5],
}

impl Dense {
    fn eval(&self, t: f64) -> Mat3 {
        let th = (t - self.t) / self.h;
        let th1 = 1.0 - th;
        // r0 + θ(r1 + (1−θ)(r2 + θ(r3 + (1−θ) r4)))
        let inner = self.r[3].axpy(th1, &self.r[4]);
        let inner = self.r[2].axpy(th, &inner);
        let inner = self.r[1].axpy(th1, &inner);
        self.r[0].axpy(th, &inner)
    }
}

/// Integrates `dy/dt = f(t, y)` from `t0` to `t1` (with `t1 > t0`).
///
/// `samples` must be ascending and lie in `(t0, t1]`; `on_sample(k, y)` is
/// called once per sample in order with the interpolated state. `h_start` is
/// an optional initial step. Returns the state at `t1`, the last accepted
/// step size, and the work counters.
pub fn integrate<F, S>(
    mut f: F,
    y0: Mat3,
    t0: f64,
    t1: f64,
    h_start: Option<f64>,
    opts: &SolverOptions,
    samples: &[f64],
    mut on_sample: S,
) -> Result<(Mat3, f64, StepStats)>
where
    F: FnMut(f64, &Mat3) -> Mat3,
    S: FnMut(usize, &Mat3),
{
    let span = t1 - t0;
    if !(span > 0.0) {
        return Err(Error::domain("integration interval must have t1 > t0"));
    }
    let mut stats = StepStats::default();
    let mut t = t0;
    let mut y = y0;
    let mut k1 = f(t, &y);
    stats.evaluations += 1;
    let h_max = opts.max_step.min(span);
    let mut h = match h_start {
        Some(h) if h > 0.0 => h.min(h_max),
        _ => initial_step(&mut f, t, &y, &k1, h_max, opts, &mut stats),
    };
    let h_min = 16.0 * f64::EPSILON * t0.abs().max(t1.abs()).max(span);
    let mut next_sample = 0usize;
    let mut last_rejected = false;

    while t < t1 {
        if stats.accepted + stats.rejected >= opts.max_steps {
            return Err(Error::StepSizeUnderflow { time: t, step: h });
        }
        if h < h_min {
            return Err(Error::StepSizeUnderflow { time: t, step: h });
        }
        let last = t + h >= t1 || t1 - (t + h) < h_min;
        if last {
            h = t1 - t;
        }

        let k2 = f(t + C2 * h, &y.axpy(h * A21, &k1));
        let k3 = f(t + C3 * h, &y.axpy(h, &lin(&[(A31, &k1), (A32, &k2)])));
        let k4 = f(t + C4 * h, &y.axpy(h, &lin(&[(A41, &k1), (A42, &k2), (A43, &k3)])));
        let k5 = f(t + C5 * h, &y.axpy(h, &lin(&[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)])));
        let k6 = f(t + h, &y.axpy(h, &lin(&[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)])));
        let y_new = y.axpy(h, &lin(&[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)]));
        let t_new = if last { t1 } else { t + h };
        let k7 = f(t_new, &y_new);
        stats.evaluations += 6;

        let err = lin(&[(E1, &k1), (E3, &k3), (E4, &k4), (E5, &k5), (E6, &k6), (E7, &k7)]).scale_re(h);
        let en = error_norm(&err, &y, &y_new, opts.atol, opts.rtol);

        if en <= 1.0 {
            stats.accepted += 1;
            // dense output only when a sample falls inside this step
            if next_sample < samples.len() && samples[next_sample] <= t_new {
                let r1 = y_new - y;
                let r2 = k1.scale_re(h) - r1;
                let r3 = r1 - k7.scale_re(h) - r2;
                let r4 = lin(&[(D1, &k1), (D3, &k3), (D4, &k4), (D5, &k5), (D6, &k6), (D7, &k7)]).scale_re(h);
                let dense = Dense { t, h, r: [y, r1, r2, r3, r4] };
                while next_sample < samples.len() && samples[next_sample] <= t_new {
                    let ts = samples[next_sample];
                    let ys = if ts == t_new { y_new } else { dense.eval(ts) };
                    on_sample(next_sample, &ys);
                    next_sample += 1;
                }
            }
            y = y_new;
            k1 = k7;
            t = t_new;
            let mut fac = 0.9 * en.max(1e-10).powf(-0.2);
            fac = fac.clamp(0.2, if last_rejected { 1.0 } else { 10.0 });
            h = (h * fac).min(h_max);
            last_rejected = false;
        } else {
            stats.rejected += 1;
            let fac = if en.is_finite() { (0.9 * en.powf(-0.2)).clamp(0.2, 1.0) } else { 0.2 };
            h *= fac;
            last_rejected = true;
        }
    }
    // samples that coincide with t1 up to rounding
    while next_sample < samples.len() {
        on_sample(next_sample, &y);
        next_sample += 1;
    }
    Ok((y, h, stats))
}

fn scaled_norm(v: &Mat3, y: &Mat3, opts: &SolverOptions) -> f64 {
    error_norm(v, y, y, opts.atol, opts.rtol)
}

fn initial_step<F>(
    f: &mut F,
    t: f64,
    y: &Mat3,
    f0: &Mat3,
    h_max: f64,
    opts: &SolverOptions,
    stats: &mut StepStats,
) -> f64
where
    F: FnMut(f64, &Mat3) -> Mat3,
{
    let d0 = scaled_norm(y, y, opts);
    let d1 = scaled_norm(f0, y, opts);
    let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 * h_max } else { (0.01 * d0 / d1).min(h_max) };
    let y1 = y.axpy(h0, f0);
    let f1 = f(t + h0, &y1);
    stats.evaluations += 1;
    let d2 = scaled_norm(&(f1 - *f0), y, opts) / h0;
    let h1 = if d1.max(d2) <= 1e-15 { (h0 * 1e-3).max(1e-6 * h_max) } else { (0.01 / d1.max(d2)).powf(0.2) };
    (100.0 * h0).min(h1).min(h_max)
}
