//! Line-of-sight channel synthesis for the BS -> RIS -> UE geometry.
//!
//! The BS sits at the origin. Every RIS-side channel is a path gain times
//! the planar-array response towards the far end of the link; direct links
//! carry a free-space phase `2 pi |p| / lambda`.

use std::f64::consts::TAU;
use std::ops::Sub;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::array::{
    steering_vector, ArrayGeometry, OperatingBand, RisConfiguration, SteeringAngles,
};
use crate::error::{invalid, Error, Result};

/// Default reference gain at 1 m: -30 dB.
pub const DEFAULT_BETA0_DB: f64 = -30.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Position3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Position3 {
    pub const ORIGIN: Position3 = Position3 { x: 0.0, y: 0.0, z: 0.0 };

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.x * self.x + self.y * self.y + self.z * self.z
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }
}

impl Sub for Position3 {
    type Output = Position3;

    fn sub(self, rhs: Self) -> Self {
        Position3::new(self.x - rhs.x, self.y - rhs.y, self.z - rhs.z)
    }
}

impl From<[f64; 3]> for Position3 {
    fn from(v: [f64; 3]) -> Self {
        Position3::new(v[0], v[1], v[2])
    }
}

/// Positions, link budget and RIS panel of one deployment.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioLayout {
    pub p_ris: Position3,
    pub p_ue: Position3,
    pub nonintended: Vec<Position3>,
    pub beta0: f64,
    pub tx_power_w: f64,
    pub noise_power_w: f64,
    pub ris_geometry: ArrayGeometry,
    pub band: OperatingBand,
}

impl ScenarioLayout {
    pub fn validate(&self) -> Result<()> {
        let all = [self.p_ris, self.p_ue].into_iter().chain(self.nonintended.iter().copied());
        for p in all {
            if !p.is_finite() {
                return Err(invalid(format!("non-finite position {p:?}")));
            }
        }
        if self.p_ris.norm_sqr() == 0.0 {
            return Err(Error::DegenerateGeometry("RIS is co-located with the BS".into()));
        }
        if (self.p_ue - self.p_ris).norm_sqr() == 0.0 {
            return Err(Error::DegenerateGeometry("UE is co-located with the RIS".into()));
        }
        for (name, v) in [
            ("beta0", self.beta0),
            ("tx_power_w", self.tx_power_w),
            ("noise_power_w", self.noise_power_w),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(invalid(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }

    /// `sigma^2 / P`.
    pub fn noise_over_power(&self) -> f64 {
        self.noise_power_w / self.tx_power_w
    }
}

/// Every channel the SLNR objective needs, at one wavelength.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSet {
    /// RIS -> target UE.
    pub h: Vec<Complex64>,
    /// BS -> RIS.
    pub g: Vec<Complex64>,
    /// BS -> target UE.
    pub h_d: Complex64,
    /// RIS -> non-intended UEs.
    pub h_t: Vec<Vec<Complex64>>,
    /// BS -> non-intended UEs.
    pub h_dt: Vec<Complex64>,
}

impl ChannelSet {
    pub fn len(&self) -> usize {
        self.h.len()
    }

    pub fn is_empty(&self) -> bool {
        self.h.is_empty()
    }

    pub fn leakage_count(&self) -> usize {
        self.h_t.len()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.h.len();
        if self.g.len() != n {
            return Err(invalid(format!("g has {} entries, h has {n}", self.g.len())));
        }
        if self.h_t.len() != self.h_dt.len() {
            return Err(invalid(format!(
                "{} RIS leakage channels but {} direct leakage channels",
                self.h_t.len(),
                self.h_dt.len()
            )));
        }
        if let Some(bad) = self.h_t.iter().position(|v| v.len() != n) {
            return Err(invalid(format!("leakage channel {bad} has wrong length")));
        }
        Ok(())
    }

    /// Cascaded per-element gains `conj(h_n) g_n`.
    pub fn cascade(&self) -> Vec<Complex64> {
        cascade_of(&self.h, &self.g)
    }

    /// Cascaded per-element gains towards non-intended UE `t`.
    pub fn leakage_cascade(&self, t: usize) -> Vec<Complex64> {
        cascade_of(&self.h_t[t], &self.g)
    }
}

pub(crate) fn cascade_of(h: &[Complex64], g: &[Complex64]) -> Vec<Complex64> {
    h.iter().zip(g).map(|(hn, gn)| hn.conj() * gn).collect()
}

fn coincident(src: Position3, dst: Position3) -> Error {
    Error::DegenerateGeometry(format!("coincident positions {src:?} and {dst:?}"))
}

/// Free-space power gain `beta0 / |dst - src|^2`.
pub fn path_gain(src: Position3, dst: Position3, beta0: f64) -> Result<f64> {
    let d2 = (dst - src).norm_sqr();
    if d2 == 0.0 {
        return Err(coincident(src, dst));
    }
    Ok(beta0 / d2)
}

/// Azimuth `atan2(dy, dx)` and elevation `asin(dz / |d|)` of `target` seen from `p_ris`.
pub fn angles_from_positions(p_ris: Position3, target: Position3) -> Result<SteeringAngles> {
    let d = target - p_ris;
    let r = d.norm();
    if r == 0.0 {
        return Err(coincident(p_ris, target));
    }
    Ok(SteeringAngles::new(d.y.atan2(d.x), (d.z / r).clamp(-1.0, 1.0).asin()))
}

/// `sqrt(gamma) * a(theta, phi, lambda)` for the RIS link towards `target`.
pub fn ris_link_channel(scenario: &ScenarioLayout, target: Position3) -> Result<Vec<Complex64>> {
    let gain = path_gain(scenario.p_ris, target, scenario.beta0)?;
    let angles = angles_from_positions(scenario.p_ris, target)?;
    let amp = gain.sqrt();
    let a = steering_vector(&scenario.ris_geometry, angles, scenario.band.wavelength_m())?;
    Ok(a.into_iter().map(|z| z * amp).collect())
}

/// BS (origin) -> `p_ue` direct link.
pub fn direct_channel(p_ue: Position3, band: &OperatingBand, beta0: f64) -> Result<Complex64> {
    let dist = p_ue.norm();
    if dist == 0.0 {
        return Err(coincident(Position3::ORIGIN, p_ue));
    }
    let phase = (TAU * dist / band.wavelength_m()).rem_euclid(TAU);
    Ok(Complex64::from_polar(beta0.sqrt() / dist, phase))
}

pub fn build_channel_set(scenario: &ScenarioLayout) -> Result<ChannelSet> {
    scenario.validate()?;
    let h = ris_link_channel(scenario, scenario.p_ue)?;
    // the BS -> RIS link uses the BS direction as seen from the panel
    let g = ris_link_channel(scenario, Position3::ORIGIN)?;
    let h_d = direct_channel(scenario.p_ue, &scenario.band, scenario.beta0)?;
    let h_t = scenario
        .nonintended
        .iter()
        .map(|&p| ris_link_channel(scenario, p))
        .collect::<Result<Vec<_>>>()?;
    let h_dt = scenario
        .nonintended
        .iter()
        .map(|&p| direct_channel(p, &scenario.band, scenario.beta0))
        .collect::<Result<Vec<_>>>()?;
    Ok(ChannelSet { h, g, h_d, h_t, h_dt })
}

/// `(h^H A Phi g + h_d) s + n`.
pub fn receive_signal(
    ch: &ChannelSet,
    cfg: &RisConfiguration,
    symbol: Complex64,
    noise: Complex64,
) -> Result<Complex64> {
    Ok(crate::slnr::cascaded_gain(ch, cfg)? * symbol + noise)
}

/// dBm to watts.
pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

/// dB to linear power ratio.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}
