//! Planar array geometry, operating bands and the per-element RIS profiles.
//!
//! The steering model follows the planar-array response used throughout the
//! crate: an x-axis progression driven by `cos(theta)` and a y-axis
//! progression driven by `sin(phi)`, combined with a Kronecker product so
//! that element `n = k * ny + m` sits at column `k` and row `m`.

use std::f64::consts::{PI, TAU};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{invalid, Result};

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Upper operating frequency of the dual-band panel (inner sub-element only).
pub const F1_HZ: f64 = 27.96e9;

/// Lower operating frequency of the dual-band panel (both sub-elements active).
pub const F2_HZ: f64 = 21.28e9;

/// Fabricated spacing of the reference panel, in units of the `F1_HZ` wavelength.
pub const REFERENCE_SPACING_OVER_LAMBDA1: f64 = 0.56;

/// Direction cosines smaller than this are treated as exact zeros.
///
/// `cos(PI / 2)` evaluates to ~6e-17 rather than 0; the angle itself carries
/// more representation error than that.
const DIRECTION_COSINE_FLOOR: f64 = 4.0 * f64::EPSILON;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArrayGeometry {
    nx: usize,
    ny: usize,
    spacing_m: f64,
}

impl ArrayGeometry {
    pub fn new(nx: usize, ny: usize, spacing_m: f64) -> Result<Self> {
        if nx == 0 || ny == 0 {
            return Err(invalid(format!("array dimensions must be positive, got {nx}x{ny}")));
        }
        if !(spacing_m.is_finite() && spacing_m > 0.0) {
            return Err(invalid(format!("spacing must be positive, got {spacing_m}")));
        }
        Ok(Self { nx, ny, spacing_m })
    }

    /// Square `side x side` panel.
    pub fn square(side: usize, spacing_m: f64) -> Result<Self> {
        Self::new(side, side, spacing_m)
    }

    /// The reference dual-band panel: `side x side` elements spaced `0.56 * lambda(F1)`.
    pub fn reference(side: usize) -> Result<Self> {
        let lambda1 = OperatingBand::from_frequency(F1_HZ)?.wavelength_m();
        Self::square(side, REFERENCE_SPACING_OVER_LAMBDA1 * lambda1)
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn spacing_m(&self) -> f64 {
        self.spacing_m
    }

    /// Total element count `nx * ny`.
    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperatingBand {
    frequency_hz: f64,
    wavelength_m: f64,
}

impl OperatingBand {
    pub fn from_frequency(frequency_hz: f64) -> Result<Self> {
        if !(frequency_hz.is_finite() && frequency_hz > 0.0) {
            return Err(invalid(format!("frequency must be positive, got {frequency_hz}")));
        }
        Ok(Self { frequency_hz, wavelength_m: SPEED_OF_LIGHT / frequency_hz })
    }

    pub fn from_wavelength(wavelength_m: f64) -> Result<Self> {
        if !(wavelength_m.is_finite() && wavelength_m > 0.0) {
            return Err(invalid(format!("wavelength must be positive, got {wavelength_m}")));
        }
        Ok(Self { frequency_hz: SPEED_OF_LIGHT / wavelength_m, wavelength_m })
    }

    pub fn f1() -> Self {
        Self::from_frequency(F1_HZ).expect("F1 is positive")
    }

    pub fn f2() -> Self {
        Self::from_frequency(F2_HZ).expect("F2 is positive")
    }

    pub fn frequency_hz(&self) -> f64 {
        self.frequency_hz
    }

    pub fn wavelength_m(&self) -> f64 {
        self.wavelength_m
    }
}

/// Azimuth `theta` and elevation `phi`, radians.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteeringAngles {
    pub theta_rad: f64,
    pub phi_rad: f64,
}

impl SteeringAngles {
    pub fn new(theta_rad: f64, phi_rad: f64) -> Self {
        Self { theta_rad, phi_rad }
    }

    pub fn from_degrees(theta_deg: f64, phi_deg: f64) -> Self {
        Self::new(theta_deg.to_radians(), phi_deg.to_radians())
    }

    /// `(cos theta, sin phi)`: the two direction cosines the array response depends on.
    pub fn direction_cosines(&self) -> (f64, f64) {
        (snap_zero(self.theta_rad.cos()), snap_zero(self.phi_rad.sin()))
    }
}

fn snap_zero(x: f64) -> f64 {
    if x.abs() < DIRECTION_COSINE_FLOOR {
        0.0
    } else {
        x
    }
}

/// Binary element activation. `true` reflects, `false` absorbs into the matched load.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ActivationProfile {
    alpha: Vec<bool>,
}

impl ActivationProfile {
    pub fn new(alpha: Vec<bool>) -> Self {
        Self { alpha }
    }

    pub fn all_on(n: usize) -> Self {
        Self { alpha: vec![true; n] }
    }

    pub fn all_off(n: usize) -> Self {
        Self { alpha: vec![false; n] }
    }

    /// Builds a profile from 0/1 values; anything else is rejected.
    pub fn from_bits(bits: &[u8]) -> Result<Self> {
        bits.iter()
            .map(|&b| match b {
                0 => Ok(false),
                1 => Ok(true),
                other => Err(invalid(format!("activation entries must be 0 or 1, got {other}"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(Self::new)
    }

    pub fn len(&self) -> usize {
        self.alpha.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alpha.is_empty()
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.alpha
    }

    pub fn is_active(&self, n: usize) -> bool {
        self.alpha[n]
    }

    pub fn active_count(&self) -> usize {
        self.alpha.iter().filter(|&&a| a).count()
    }

    /// Entries as 0.0 / 1.0.
    pub fn weights(&self) -> Vec<f64> {
        self.alpha.iter().map(|&a| if a { 1.0 } else { 0.0 }).collect()
    }

    pub fn bits(&self) -> Vec<u8> {
        self.alpha.iter().map(|&a| a as u8).collect()
    }
}

/// Per-element reflection phases, stored wrapped into `[0, 2pi)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseProfile {
    phases: Vec<f64>,
}

impl PhaseProfile {
    /// Wraps each input into `[0, 2pi)`. Non-finite phases are rejected.
    pub fn from_radians(phases: impl IntoIterator<Item = f64>) -> Result<Self> {
        let phases = phases
            .into_iter()
            .map(|p| {
                if p.is_finite() {
                    Ok(wrap_phase(p))
                } else {
                    Err(invalid(format!("phase must be finite, got {p}")))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { phases })
    }

    pub fn zeros(n: usize) -> Self {
        Self { phases: vec![0.0; n] }
    }

    pub fn len(&self) -> usize {
        self.phases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phases.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.phases
    }

    /// Unit-modulus reflection coefficients `e^{j phi_n}`.
    pub fn coefficients(&self) -> Vec<Complex64> {
        self.phases.iter().map(|&p| Complex64::from_polar(1.0, p)).collect()
    }
}

/// Wraps an angle into `[0, 2pi)`.
pub fn wrap_phase(p: f64) -> f64 {
    let w = p.rem_euclid(TAU);
    // rem_euclid can round up to exactly TAU for tiny negative inputs
    if w >= TAU {
        0.0
    } else {
        w
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RisConfiguration {
    phases: PhaseProfile,
    activation: ActivationProfile,
}

impl RisConfiguration {
    pub fn new(phases: PhaseProfile, activation: ActivationProfile) -> Result<Self> {
        if phases.len() != activation.len() {
            return Err(invalid(format!(
                "phase profile has {} entries but activation profile has {}",
                phases.len(),
                activation.len()
            )));
        }
        Ok(Self { phases, activation })
    }

    pub fn phases(&self) -> &PhaseProfile {
        &self.phases
    }

    pub fn activation(&self) -> &ActivationProfile {
        &self.activation
    }

    pub fn len(&self) -> usize {
        self.phases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phases.is_empty()
    }

    /// Effective per-element weights `alpha_n * e^{j phi_n}`.
    pub fn weights(&self) -> Vec<Complex64> {
        self.phases
            .as_slice()
            .iter()
            .zip(self.activation.as_slice())
            .map(|(&p, &a)| if a { Complex64::from_polar(1.0, p) } else { Complex64::new(0.0, 0.0) })
            .collect()
    }
}

/// Single-axis progression `e^{-j 2 pi (d/lambda) k u}` for `k = 0..count`.
fn axis_response(count: usize, spacing_ratio: f64, direction_cosine: f64) -> Vec<Complex64> {
    let step = -2.0 * PI * spacing_ratio * direction_cosine;
    (0..count).map(|k| Complex64::from_polar(1.0, step * k as f64)).collect()
}

/// Planar-array response `a(theta, phi, lambda)` of length `nx * ny`.
pub fn steering_vector(
    geom: &ArrayGeometry,
    angles: SteeringAngles,
    wavelength_m: f64,
) -> Result<Vec<Complex64>> {
    if !(wavelength_m.is_finite() && wavelength_m > 0.0) {
        return Err(invalid(format!("wavelength must be positive, got {wavelength_m}")));
    }
    let ratio = geom.spacing_m / wavelength_m;
    let (ux, uy) = angles.direction_cosines();
    let ax = axis_response(geom.nx, ratio, ux);
    let ay = axis_response(geom.ny, ratio, uy);
    Ok(kron(&ax, &ay))
}

/// Kronecker product of two vectors, `a` as the slow index.
pub fn kron(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    a.iter().flat_map(|&x| b.iter().map(move |&y| x * y)).collect()
}

/// Phases whose weights `e^{-j phi_n}` match the array response towards `angles`.
///
/// With every element active, the array factor of these phases peaks at
/// `angles` with power `N^2`.
pub fn matched_phases(
    geom: &ArrayGeometry,
    angles: SteeringAngles,
    wavelength_m: f64,
) -> Result<PhaseProfile> {
    let a = steering_vector(geom, angles, wavelength_m)?;
    PhaseProfile::from_radians(a.iter().map(|z| -z.arg()))
}

pub fn spacing_ratio(geom: &ArrayGeometry, band: &OperatingBand) -> f64 {
    geom.spacing_m / band.wavelength_m
}

/// Length of the microstrip delay line that produces `phase_rad` at `frequency_hz`.
pub fn microstrip_length(phase_rad: f64, velocity_factor: f64, frequency_hz: f64) -> Result<f64> {
    if !(0.0..TAU).contains(&phase_rad) {
        return Err(invalid(format!("phase must lie in [0, 2pi), got {phase_rad}")));
    }
    if !(velocity_factor > 0.0 && velocity_factor <= 1.0) {
        return Err(invalid(format!("velocity factor must lie in (0, 1], got {velocity_factor}")));
    }
    if !(frequency_hz.is_finite() && frequency_hz > 0.0) {
        return Err(invalid(format!("frequency must be positive, got {frequency_hz}")));
    }
    Ok(phase_rad / 2.0 * velocity_factor * SPEED_OF_LIGHT / (TAU * frequency_hz))
}

/// `diag(alpha)` as a dense real matrix.
pub fn activation_matrix(activation: &ActivationProfile) -> DMatrix<f64> {
    DMatrix::from_diagonal(&nalgebra::DVector::from_vec(activation.weights()))
}
