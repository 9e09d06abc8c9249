//! Spectral mode extraction, dressed-state mode prediction and the
//! square-root scaling fit of the resonant Rabi frequency.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)] // unused whenever std is linked into the build
use num_traits::Float;

use crate::constants::TAU;
use crate::error::{Error, Result};
use crate::experiments::{count_rabi_cycles, ScanResult};
use crate::linalg::{c64, C64};
use crate::liouville::uniform_step;
use crate::model::RabiCalibration;

/// Peaks of a windowed spectrum.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ModeSpectrum {
    /// rad/s, ascending.
    pub frequencies: Vec<f64>,
    /// Cosine amplitude of each peak in the units of the series.
    pub amplitudes: Vec<f64>,
    /// 2π / record length, rad/s.
    pub resolution: f64,
}

impl ModeSpectrum {
    /// Frequency of the strongest peak.
    pub fn dominant(&self) -> Option<f64> {
        self.frequencies
            .iter()
            .zip(&self.amplitudes)
            .fold(None, |best: Option<(f64, f64)>, (&f, &a)| match best {
                Some((_, ba)) if ba >= a => best,
                _ => Some((f, a)),
            })
            .map(|(f, _)| f)
    }

    /// Lowest-frequency peak.
    pub fn slowest(&self) -> Option<f64> {
        self.frequencies.first().copied()
    }
}

/// In-place radix-2 FFT; `data.len()` must be a power of two.
pub fn fft_in_place(data: &mut [C64]) {
    let n = data.len();
    debug_assert!(n.is_power_of_two());
    let mut j = 0usize;
    for i in 1..n {
        let mut bit = n >> 1;
        while j & bit != 0 {
            j ^= bit;
            bit >>= 1;
        }
        j |= bit;
        if i < j {
            data.swap(i, j);
        }
    }
    let mut len = 2;
    while len <= n {
        let ang = -TAU / len as f64;
        let half = len / 2;
        let twiddles: Vec<C64> = (0..half).map(|k| c64(0.0, ang * k as f64).exp()).collect();
        for start in (0..n).step_by(len) {
            for k in 0..half {
                let a = data[start + k];
                let b = data[start + k + half] * twiddles[k];
                data[start + k] = a + b;
                data[start + k + half] = a - b;
            }
        }
        len <<= 1;
    }
}

/// Zero-padding factor applied before the FFT, so that the parabolic peak
/// interpolation works on a finely sampled spectrum.
const PAD_FACTOR: usize = 8;
/// Peaks weaker than this fraction of the strongest one are dropped.
const PEAK_THRESHOLD: f64 = 0.1;

/// Oscillation frequencies of a uniformly sampled series.
///
/// The mean is removed, a Hann window applied and the series zero-padded;
/// local maxima of the magnitude spectrum above 10 % of the strongest are
/// refined by parabolic interpolation. Up to `max_modes` of the strongest
/// peaks are returned in ascending frequency.
pub fn dominant_frequencies(series: &[f64], times: &[f64], max_modes: usize) -> Result<ModeSpectrum> {
    if series.len() != times.len() {
        return Err(Error::Shape("series and time axis differ in length".into()));
    }
    if series.len() < 32 {
        return Err(Error::Shape("spectral analysis needs at least 32 samples".into()));
    }
    let dt = uniform_step(times).ok_or_else(|| Error::Shape("time samples are not uniform".into()))?;
    let n = series.len();
    let resolution = TAU / (n as f64 * dt);
    let mean = series.iter().sum::<f64>() / n as f64;
    let scale = series.iter().fold(0.0f64, |m, x| m.max(x.abs())).max(1.0);
    if series.iter().all(|x| (x - mean).abs() <= 1e-12 * scale) {
        return Ok(ModeSpectrum { resolution, ..Default::default() });
    }
    let window: Vec<f64> = (0..n).map(|k| 0.5 - 0.5 * (TAU * k as f64 / (n - 1) as f64).cos()).collect();
    let wsum: f64 = window.iter().sum();
    let m = (n * PAD_FACTOR).next_power_of_two();
    let mut buf = vec![c64(0.0, 0.0); m];
    for k in 0..n {
        buf[k] = c64((series[k] - mean) * window[k], 0.0);
    }
    fft_in_place(&mut buf);
    let half = m / 2;
    let mag: Vec<f64> = buf[..=half].iter().map(|z| 2.0 * z.norm() / wsum).collect();
    let strongest = mag[1..].iter().fold(0.0f64, |a, &b| a.max(b));

    let mut peaks: Vec<(f64, f64)> = Vec::new();
    for k in 1..half {
        let (l, c, r) = (mag[k - 1], mag[k], mag[k + 1]);
        if c > l && c >= r && c >= PEAK_THRESHOLD * strongest {
            let denom = l - 2.0 * c + r;
            let shift = if denom != 0.0 { (0.5 * (l - r) / denom).clamp(-0.5, 0.5) } else { 0.0 };
            let amp = c - 0.25 * (l - r) * shift;
            let freq = (k as f64 + shift) * TAU / (m as f64 * dt);
            peaks.push((freq, amp));
        }
    }
    peaks.sort_by(|a, b| b.1.total_cmp(&a.1));
    peaks.truncate(max_modes);
    peaks.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(ModeSpectrum {
        frequencies: peaks.iter().map(|p| p.0).collect(),
        amplitudes: peaks.iter().map(|p| p.1).collect(),
        resolution,
    })
}

/// Oscillation frequencies of the probe coherence produced by the dynamic
/// Autler–Townes splitting of |2⟩ and |3⟩ under a coupling Rabi frequency
/// `omega_480` at detuning `delta_480`.
///
/// The dressed energies are E± = (−Δ ± √(Δ² + Ω²))/2; the function returns
/// `(slow, fast) = (min |E±|, max |E±|)`. The slow mode is evaluated as
/// Ω²/(4·fast), which is free of cancellation for |Δ| ≫ Ω.
pub fn autler_townes_modes(omega_480: f64, delta_480: f64) -> (f64, f64) {
    let root = delta_480.hypot(omega_480);
    let fast = 0.5 * (root + delta_480.abs());
    if fast == 0.0 {
        return (0.0, 0.0);
    }
    let slow = 0.25 * omega_480 * omega_480 / fast;
    (slow, fast)
}

/// Result of fitting `f = a·√(Ω₇₈₀² + Ω₄₈₀²)` to per-row ρ₃₃ frequencies.
#[derive(Debug, Clone, PartialEq)]
pub struct SqrtFit {
    /// Fitted proportionality constant `a`.
    pub amplitude: f64,
    pub r_squared: f64,
    /// Rows used in the fit: `(parameter, measured rad/s, residual rad/s)`.
    pub residuals: Vec<(f64, f64, f64)>,
    /// Parameters of rows left out for lack of oscillation.
    pub excluded: Vec<f64>,
}

/// Minimum number of oscillating rows for [`fit_sqrt_scaling`].
pub const MIN_FIT_ROWS: usize = 8;

/// Least-squares fit through the origin of `f_row = a·√(Ω₇₈₀² + Ω₄₈₀(I)²)`,
/// with `f_row` the dominant ρ₃₃ frequency inside `window` and `Ω₄₈₀(I)` the
/// calibrated peak Rabi frequency of the row intensity. Rows with less than
/// one ρ₃₃ cycle are excluded.
pub fn fit_sqrt_scaling(
    scan: &ScanResult,
    omega_780: f64,
    calibration: &RabiCalibration,
    window: (f64, f64),
) -> Result<SqrtFit> {
    let range = scan.index_range(window.0, window.1);
    let times = &scan.times[range.clone()];
    let mut pts: Vec<(f64, f64, f64)> = Vec::new();
    let mut excluded = Vec::new();
    for (row, &param) in scan.params.iter().enumerate() {
        let rho33 = &scan.rho33[row][range.clone()];
        let cycles = match count_rabi_cycles(rho33) {
            Ok((c, _)) => c,
            Err(_) => 0.0,
        };
        let freq = if cycles >= 1.0 { dominant_frequencies(rho33, times, 1)?.dominant() } else { None };
        match freq {
            Some(f) => {
                let w480 = calibration.rabi(param)?;
                pts.push((param, f, omega_780.hypot(w480)));
            }
            None => excluded.push(param),
        }
    }
    fit_through_origin(&pts, excluded)
}

/// Fits `y = a·x` to `(param, y, x)` triples.
pub fn fit_through_origin(pts: &[(f64, f64, f64)], excluded: Vec<f64>) -> Result<SqrtFit> {
    if pts.len() < MIN_FIT_ROWS {
        return Err(Error::Fit(alloc::format!("only {} oscillating rows, need at least {MIN_FIT_ROWS}", pts.len())));
    }
    let sxy: f64 = pts.iter().map(|p| p.1 * p.2).sum();
    let sxx: f64 = pts.iter().map(|p| p.2 * p.2).sum();
    let a = sxy / sxx;
    let mean = pts.iter().map(|p| p.1).sum::<f64>() / pts.len() as f64;
    let ss_tot: f64 = pts.iter().map(|p| (p.1 - mean).powi(2)).sum();
    let residuals: Vec<(f64, f64, f64)> = pts.iter().map(|p| (p.0, p.1, p.1 - a * p.2)).collect();
    let ss_res: f64 = residuals.iter().map(|r| r.2 * r.2).sum();
    let r_squared = if ss_tot > 0.0 {
        1.0 - ss_res / ss_tot
    } else if ss_res == 0.0 {
        1.0
    } else {
        0.0
    };
    Ok(SqrtFit { amplitude: a, r_squared, residuals, excluded })
}

/// Ratio used to compare population and coherence oscillations.
pub fn frequency_ratio(numerator: f64, denominator: f64) -> f64 {
    if denominator == 0.0 {
        f64::INFINITY
    } else {
        numerator / denominator
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::angular;

    fn grid(n: usize, dt: f64) -> Vec<f64> {
        (0..n).map(|k| k as f64 * dt).collect()
    }

    #[test]
    fn fft_matches_direct_dft() {
        let x: Vec<C64> = (0..16).map(|k| c64((k as f64 * 0.7).sin(), (k as f64 * 0.3).cos())).collect();
        let mut y = x.clone();
        fft_in_place(&mut y);
        for (f, yf) in y.iter().enumerate() {
            let direct = x
                .iter()
                .enumerate()
                .fold(c64(0.0, 0.0), |acc, (k, v)| acc + v * c64(0.0, -TAU * (f * k) as f64 / 16.0).exp());
            assert!((direct - yf).norm() < 1e-12);
        }
    }

    #[test]
    fn single_cosine_at_one_ghz() {
        let t = grid(8000, 1e-12);
        let s: Vec<f64> = t.iter().map(|t| (angular(1e9) * t).cos()).collect();
        let spec = dominant_frequencies(&s, &t, 4).unwrap();
        assert_eq!(spec.frequencies.len(), 1);
        assert!((spec.frequencies[0] - angular(1e9)).abs() < spec.resolution);
        assert!((spec.amplitudes[0] - 1.0).abs() < 0.05, "{}", spec.amplitudes[0]);
    }

    #[test]
    fn constant_series_has_no_modes() {
        let t = grid(100, 1e-12);
        let spec = dominant_frequencies(&[0.3; 100], &t, 3).unwrap();
        assert!(spec.frequencies.is_empty());
        assert!(spec.dominant().is_none());
    }

    #[test]
    fn two_cosines_are_separated() {
        let t = grid(8000, 1e-12);
        let s: Vec<f64> = t.iter().map(|t| (angular(0.5e9) * t).cos() + (angular(1.5e9) * t).cos()).collect();
        let spec = dominant_frequencies(&s, &t, 4).unwrap();
        assert_eq!(spec.frequencies.len(), 2);
        assert!((spec.frequencies[0] - angular(0.5e9)).abs() < spec.resolution);
        assert!((spec.frequencies[1] - angular(1.5e9)).abs() < spec.resolution);
    }

    #[test]
    fn non_uniform_or_short_series_rejected() {
        let mut t = grid(64, 1.0);
        t[10] += 0.3;
        assert!(matches!(dominant_frequencies(&[0.0; 64], &t, 1), Err(Error::Shape(_))));
        assert!(matches!(dominant_frequencies(&[0.0; 16], &grid(16, 1.0), 1), Err(Error::Shape(_))));
    }

    #[test]
    fn autler_townes_resonant_and_detuned() {
        let om = angular(2.3e9);
        let (s, f) = autler_townes_modes(om, 0.0);
        assert!((s - f).abs() < 1e-12 * om);
        assert!((s - om / 2.0).abs() < 1e-6 * om);

        let (s, f) = autler_townes_modes(om, angular(1e9));
        assert!((s / TAU / 1e9 - 0.7539936204).abs() < 1e-9);
        assert!((f / TAU / 1e9 - 1.7539936204).abs() < 1e-9);
    }

    #[test]
    fn autler_townes_light_shift_limit() {
        let (om, de) = (1.0, 1e4);
        let (s, f) = autler_townes_modes(om, de);
        assert!((s - om * om / (4.0 * de)).abs() < 1e-8 * s);
        assert!((f - (de + om * om / (4.0 * de))).abs() < 1e-10 * f);
    }

    #[test]
    fn sqrt_fit_recovers_synthetic_law() {
        let wp = angular(220e6);
        let cal = RabiCalibration::rb85_480nm();
        let a = 0.73;
        let pts: Vec<(f64, f64, f64)> = (1..=12)
            .map(|k| {
                let i = k as f64 * 1.75e10;
                let x = wp.hypot(cal.rabi(i).unwrap());
                (i, a * x, x)
            })
            .collect();
        let fit = fit_through_origin(&pts, Vec::new()).unwrap();
        assert!((fit.amplitude - a).abs() < 1e-6);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sqrt_fit_needs_enough_rows() {
        let pts = [(1.0, 1.0, 1.0); 3];
        assert!(matches!(fit_through_origin(&pts, Vec::new()), Err(Error::Fit(_))));
    }
}
