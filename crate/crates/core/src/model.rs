//! Domain types shared by every stage of the simulation: the density matrix,
//! laser fields, pulse envelopes, vapor and decay parameters, and the
//! intensity → Rabi-frequency calibration.
//!
//! Frequencies are angular (rad/s) throughout; times are in seconds.

use alloc::string::String;

#[allow(unused_imports)] // unused whenever std is linked into the build
use num_traits::Float;

use crate::constants::{angular, ATOMIC_MASS_UNIT, RB85_MASS_U, ZERO_CELSIUS};
use crate::error::{Error, Result};
use crate::linalg::{c64, Mat3, C64};

/// Level indices (zero-based) of the ladder: |1⟩ = 5S₁/₂, |2⟩ = 5P₃/₂, |3⟩ = 30S₁/₂.
pub const GROUND: usize = 0;
pub const INTERMEDIATE: usize = 1;
pub const RYDBERG: usize = 2;

/// Tolerances for the density-matrix invariants.
pub const HERMITICITY_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-9;
pub const POSITIVITY_TOL: f64 = 1e-8;

/// State of the three-level atom.
///
/// Construction through [`DensityMatrix::new`] checks the invariants; the
/// integrator uses [`DensityMatrix::from_raw`] so that drift is observed
/// rather than corrected.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix(Mat3);

/// Deviations of a matrix from a valid density matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InvariantReport {
    pub trace_error: f64,
    pub hermiticity_error: f64,
    pub min_eigenvalue: f64,
}

impl InvariantReport {
    pub fn is_valid(&self) -> bool {
        self.trace_error <= TRACE_TOL
            && self.hermiticity_error <= HERMITICITY_TOL
            && self.min_eigenvalue >= -POSITIVITY_TOL
    }

    /// Worst case of two reports.
    pub fn merge(&self, other: &Self) -> Self {
        Self {
            trace_error: self.trace_error.max(other.trace_error),
            hermiticity_error: self.hermiticity_error.max(other.hermiticity_error),
            min_eigenvalue: self.min_eigenvalue.min(other.min_eigenvalue),
        }
    }
}

impl Default for InvariantReport {
    fn default() -> Self {
        Self { trace_error: 0.0, hermiticity_error: 0.0, min_eigenvalue: f64::INFINITY }
    }
}

impl DensityMatrix {
    pub fn new(m: Mat3) -> Result<Self> {
        let rho = Self(m);
        let report = rho.invariants();
        if report.is_valid() {
            Ok(rho)
        } else {
            Err(Error::domain(alloc::format!("not a density matrix: {report:?}")))
        }
    }

    pub const fn from_raw(m: Mat3) -> Self {
        Self(m)
    }

    /// Pure state |k⟩⟨k|.
    pub fn pure_level(k: usize) -> Self {
        Self(Mat3::projector(k))
    }

    pub fn ground() -> Self {
        Self::pure_level(GROUND)
    }

    /// |ψ⟩⟨ψ| for a normalized amplitude vector.
    pub fn from_pure(psi: [C64; 3]) -> Result<Self> {
        let norm: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
        if (norm - 1.0).abs() > TRACE_TOL {
            return Err(Error::domain("state vector is not normalized"));
        }
        Ok(Self(Mat3::from_fn(|i, j| psi[i] * psi[j].conj())))
    }

    pub fn matrix(&self) -> &Mat3 {
        &self.0
    }

    /// Element ρ_ij with one-based level labels as in the physics notation.
    pub fn element(&self, i: usize, j: usize) -> C64 {
        self.0[(i - 1, j - 1)]
    }

    pub fn populations(&self) -> [f64; 3] {
        [self.0[(0, 0)].re, self.0[(1, 1)].re, self.0[(2, 2)].re]
    }

    /// Im ρ₂₁, the quantity proportional to probe absorption.
    pub fn im_rho21(&self) -> f64 {
        self.0[(INTERMEDIATE, GROUND)].im
    }

    pub fn purity(&self) -> f64 {
        (self.0 * self.0).trace().re
    }

    pub fn invariants(&self) -> InvariantReport {
        InvariantReport {
            trace_error: (self.0.trace() - c64(1.0, 0.0)).norm(),
            hermiticity_error: self.0.hermiticity_error(),
            min_eigenvalue: self.0.hermitian_eigenvalues()[0],
        }
    }
}

/// A monochromatic laser beam.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaserField {
    /// Peak Rabi frequency, rad/s.
    pub rabi_peak: f64,
    /// Laser minus transition frequency, rad/s.
    pub detuning: f64,
    /// Vacuum wavelength, m.
    pub wavelength: f64,
    /// Angle between the beam and the probe axis, rad. Zero for the probe itself.
    pub propagation_angle: f64,
}

impl LaserField {
    pub fn new(rabi_peak: f64, detuning: f64, wavelength: f64, propagation_angle: f64) -> Result<Self> {
        let f = Self { rabi_peak, detuning, wavelength, propagation_angle };
        f.validate()?;
        Ok(f)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rabi_peak >= 0.0 && self.rabi_peak.is_finite()) {
            return Err(Error::domain("Rabi frequency must be finite and nonnegative"));
        }
        if !(self.wavelength > 0.0 && self.wavelength.is_finite()) {
            return Err(Error::domain("wavelength must be positive"));
        }
        if !self.detuning.is_finite() || !self.propagation_angle.is_finite() {
            return Err(Error::domain("detuning and angle must be finite"));
        }
        Ok(())
    }

    /// Default 780 nm probe: Ω = 2π·220 MHz, resonant, along the probe axis.
    pub fn probe_default() -> Self {
        Self { rabi_peak: angular(220e6), detuning: 0.0, wavelength: 780e-9, propagation_angle: 0.0 }
    }

    /// Default 480 nm coupling pulse: Ω_peak = 2π·2.2 GHz, resonant, θ = 171.5°.
    pub fn coupling_default() -> Self {
        Self { rabi_peak: angular(2.2e9), detuning: 0.0, wavelength: 480e-9, propagation_angle: 171.5_f64.to_radians() }
    }

    /// Wavenumber 2π/λ, rad/m.
    pub fn wavenumber(&self) -> f64 {
        crate::constants::TAU / self.wavelength
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PulseShape {
    Gaussian,
    FlatTop,
}

/// Temporal envelope of a pulsed Rabi frequency.
///
/// `intensity_fwhm` is the full width at half maximum of the *intensity*.
/// The Rabi frequency scales with the field amplitude, so for a Gaussian the
/// amplitude envelope is √2 wider. For a flat-top pulse the width is the full
/// duration of the plateau.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseEnvelope {
    pub shape: PulseShape,
    pub center_time: f64,
    pub intensity_fwhm: f64,
    pub peak_scale: f64,
}

impl PulseEnvelope {
    pub fn gaussian(center_time: f64, intensity_fwhm: f64) -> Self {
        Self { shape: PulseShape::Gaussian, center_time, intensity_fwhm, peak_scale: 1.0 }
    }

    pub fn flat_top(center_time: f64, duration: f64) -> Self {
        Self { shape: PulseShape::FlatTop, center_time, intensity_fwhm: duration, peak_scale: 1.0 }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.intensity_fwhm > 0.0 && self.intensity_fwhm.is_finite()) {
            return Err(Error::domain("pulse width must be positive"));
        }
        if !(0.0..=1.0).contains(&self.peak_scale) {
            return Err(Error::domain("pulse peak scale must lie in [0, 1]"));
        }
        if !self.center_time.is_finite() {
            return Err(Error::domain("pulse center must be finite"));
        }
        Ok(())
    }

    /// FWHM of the Rabi-frequency (amplitude) envelope.
    pub fn amplitude_fwhm(&self) -> f64 {
        match self.shape {
            PulseShape::Gaussian => core::f64::consts::SQRT_2 * self.intensity_fwhm,
            PulseShape::FlatTop => self.intensity_fwhm,
        }
    }

    /// Amplitude envelope, `peak_scale` at the center.
    pub fn value(&self, t: f64) -> f64 {
        let dt = t - self.center_time;
        match self.shape {
            PulseShape::Gaussian => {
                let tau = self.amplitude_fwhm();
                self.peak_scale * (-4.0 * core::f64::consts::LN_2 * dt * dt / (tau * tau)).exp()
            }
            PulseShape::FlatTop => {
                if dt.abs() <= 0.5 * self.intensity_fwhm {
                    self.peak_scale
                } else {
                    0.0
                }
            }
        }
    }

    /// Interval where the pulse dominates the dynamics: the 1/e² full width of
    /// the intensity for a Gaussian, the plateau for a flat-top pulse.
    pub fn active_window(&self) -> (f64, f64) {
        let half = match self.shape {
            PulseShape::Gaussian => self.intensity_fwhm * (1.0 / (2.0 * core::f64::consts::LN_2)).sqrt(),
            PulseShape::FlatTop => 0.5 * self.intensity_fwhm,
        };
        (self.center_time - half, self.center_time + half)
    }

    /// Time after which the drive is negligible: two intensity widths past the
    /// center for a Gaussian (amplitude below 0.4 % of peak), the trailing
    /// edge for a flat-top pulse.
    pub fn end_time(&self) -> f64 {
        match self.shape {
            PulseShape::Gaussian => self.center_time + 2.0 * self.intensity_fwhm,
            PulseShape::FlatTop => self.center_time + 0.5 * self.intensity_fwhm,
        }
    }

    /// Mirror image of [`Self::end_time`].
    pub fn start_time(&self) -> f64 {
        2.0 * self.center_time - self.end_time()
    }

    /// Discontinuities of the envelope, where the integrator must restart.
    pub fn breakpoints(&self) -> [Option<f64>; 2] {
        match self.shape {
            PulseShape::Gaussian => [None, None],
            PulseShape::FlatTop => {
                let h = 0.5 * self.intensity_fwhm;
                [Some(self.center_time - h), Some(self.center_time + h)]
            }
        }
    }
}

/// Amplitude envelope value of `env` at time `t`.
pub fn envelope_value(t: f64, env: &PulseEnvelope) -> f64 {
    env.value(t)
}

/// Thermal vapor.
#[derive(Debug, Clone, PartialEq)]
pub struct VaporParams {
    /// K.
    pub temperature: f64,
    /// kg.
    pub atomic_mass: f64,
    /// m⁻³; carried as metadata only.
    pub number_density: f64,
    pub isotope: String,
}

impl VaporParams {
    pub fn new(temperature: f64, atomic_mass: f64, number_density: f64, isotope: impl Into<String>) -> Result<Self> {
        let v = Self { temperature, atomic_mass, number_density, isotope: isotope.into() };
        v.validate()?;
        Ok(v)
    }

    /// ⁸⁵Rb at 130 °C with 7.4·10¹² cm⁻³.
    pub fn rb85_default() -> Self {
        Self {
            temperature: ZERO_CELSIUS + 130.0,
            atomic_mass: RB85_MASS_U * ATOMIC_MASS_UNIT,
            number_density: 7.4e12 * 1e6,
            isotope: String::from("85Rb"),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.temperature > 0.0 && self.temperature.is_finite()) {
            return Err(Error::domain("temperature must be positive (kelvin)"));
        }
        if !(self.atomic_mass > 0.0 && self.atomic_mass.is_finite()) {
            return Err(Error::domain("atomic mass must be positive"));
        }
        if !(self.number_density >= 0.0) {
            return Err(Error::domain("number density must be nonnegative"));
        }
        Ok(())
    }

    /// Most probable speed √(2 k_B T / m), m/s.
    pub fn most_probable_speed(&self) -> f64 {
        (2.0 * crate::constants::BOLTZMANN * self.temperature / self.atomic_mass).sqrt()
    }
}

/// Spontaneous decay rates of the ladder, rad/s.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayRates {
    /// |2⟩ → |1⟩.
    pub gamma_12: f64,
    /// |3⟩ → |2⟩.
    pub gamma_23: f64,
}

impl DecayRates {
    pub fn new(gamma_12: f64, gamma_23: f64) -> Result<Self> {
        let g = Self { gamma_12, gamma_23 };
        g.validate()?;
        Ok(g)
    }

    /// Γ₁₂ = 2π·6 MHz, Γ₂₃ = 2π·8 kHz.
    pub fn rb85_default() -> Self {
        Self { gamma_12: angular(6e6), gamma_23: angular(8e3) }
    }

    pub fn none() -> Self {
        Self { gamma_12: 0.0, gamma_23: 0.0 }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma_12 >= 0.0 && self.gamma_23 >= 0.0) || !self.gamma_12.is_finite() || !self.gamma_23.is_finite() {
            return Err(Error::domain("decay rates must be finite and nonnegative"));
        }
        Ok(())
    }
}

/// Proportionality Ω = c·√I between intensity and Rabi frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RabiCalibration {
    /// (rad/s)/√(W/m²).
    pub coefficient: f64,
}

impl RabiCalibration {
    /// Calibration through a single (intensity, Rabi frequency) pair.
    pub fn from_anchor(intensity: f64, rabi: f64) -> Result<Self> {
        if !(intensity > 0.0) || !(rabi > 0.0) {
            return Err(Error::domain("calibration anchor must have positive intensity and Rabi frequency"));
        }
        Ok(Self { coefficient: rabi / intensity.sqrt() })
    }

    /// 21 MW/cm² ↔ 2π·2.3 GHz for the 480 nm transition.
    pub fn rb85_480nm() -> Self {
        Self { coefficient: angular(2.3e9) / (21e6 * 1e4_f64).sqrt() }
    }

    pub fn rabi(&self, intensity: f64) -> Result<f64> {
        rabi_from_intensity(intensity, self.coefficient)
    }

    /// Inverse map, W/m².
    pub fn intensity(&self, rabi: f64) -> f64 {
        let x = rabi / self.coefficient;
        x * x
    }
}

/// Ω = calibration·√intensity.
pub fn rabi_from_intensity(intensity: f64, calibration: f64) -> Result<f64> {
    if !(intensity >= 0.0) || !intensity.is_finite() {
        return Err(Error::domain("intensity must be finite and nonnegative"));
    }
    if !(calibration > 0.0) {
        return Err(Error::domain("calibration must be positive"));
    }
    Ok(calibration * intensity.sqrt())
}
