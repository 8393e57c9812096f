//! SLNR objective, the closed-form phase profile and the lifted binary problem.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::array::{ActivationProfile, PhaseProfile, RisConfiguration};
use crate::channel::{cascade_of, ChannelSet};
use crate::error::{invalid, Error, Result};

fn check_dims(ch: &ChannelSet, n: usize) -> Result<()> {
    ch.validate()?;
    if ch.len() != n {
        return Err(invalid(format!(
            "configuration has {n} elements but the channel set has {}",
            ch.len()
        )));
    }
    Ok(())
}

fn effective_gain(h: &[Complex64], g: &[Complex64], direct: Complex64, weights: &[Complex64]) -> Complex64 {
    h.iter()
        .zip(g)
        .zip(weights)
        .map(|((hn, gn), w)| hn.conj() * w * gn)
        .sum::<Complex64>()
        + direct
}

/// `h^H A(alpha) Phi g + h_d`.
pub fn cascaded_gain(ch: &ChannelSet, cfg: &RisConfiguration) -> Result<Complex64> {
    check_dims(ch, cfg.len())?;
    Ok(effective_gain(&ch.h, &ch.g, ch.h_d, &cfg.weights()))
}

/// Signal-to-leakage-plus-noise ratio at the target UE (linear).
pub fn slnr(ch: &ChannelSet, cfg: &RisConfiguration, tx_power_w: f64, noise_power_w: f64) -> Result<f64> {
    check_dims(ch, cfg.len())?;
    if !(tx_power_w > 0.0 && noise_power_w > 0.0) {
        return Err(invalid("transmit and noise powers must be positive"));
    }
    let w = cfg.weights();
    let signal = effective_gain(&ch.h, &ch.g, ch.h_d, &w).norm_sqr();
    let leakage: f64 = ch
        .h_t
        .iter()
        .zip(&ch.h_dt)
        .map(|(ht, hdt)| effective_gain(ht, &ch.g, *hdt, &w).norm_sqr())
        .sum();
    Ok(signal / (noise_power_w / tx_power_w + leakage))
}

/// Phases that co-phase every cascaded term `conj(h_n) g_n` with the direct link.
pub fn optimal_phase_profile(ch: &ChannelSet) -> Result<PhaseProfile> {
    ch.validate()?;
    if ch.h_d.norm_sqr() == 0.0 {
        return Err(Error::DegenerateChannel("direct link is zero, its phase is undefined".into()));
    }
    let cascade = ch.cascade();
    if let Some(n) = cascade.iter().position(|c| c.norm_sqr() == 0.0) {
        return Err(Error::DegenerateChannel(format!("cascaded gain of element {n} is zero")));
    }
    let anchor = ch.h_d.arg();
    PhaseProfile::from_radians(cascade.iter().map(|c| anchor - c.arg()))
}

/// The activation problem lifted to `alpha_bar = [alpha; 1]`.
///
/// `big_h` holds the per-element cascaded gains of the target link (with the
/// phases applied) followed by `h_d`; column `t` of `big_g` holds the same for
/// non-intended UE `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct LiftedProblem {
    pub big_h: Vec<Complex64>,
    pub big_g: Vec<Vec<Complex64>>,
    pub noise_over_power: f64,
}

pub fn lift(
    ch: &ChannelSet,
    phases: &PhaseProfile,
    tx_power_w: f64,
    noise_power_w: f64,
) -> Result<LiftedProblem> {
    check_dims(ch, phases.len())?;
    if !(tx_power_w > 0.0 && noise_power_w > 0.0) {
        return Err(invalid("transmit and noise powers must be positive"));
    }
    let coeffs = phases.coefficients();
    let column = |h: &[Complex64], direct: Complex64| -> Vec<Complex64> {
        cascade_of(h, &ch.g)
            .into_iter()
            .zip(&coeffs)
            .map(|(c, e)| c * e)
            .chain(std::iter::once(direct))
            .collect()
    };
    Ok(LiftedProblem {
        big_h: column(&ch.h, ch.h_d),
        big_g: ch.h_t.iter().zip(&ch.h_dt).map(|(ht, &hdt)| column(ht, hdt)).collect(),
        noise_over_power: noise_power_w / tx_power_w,
    })
}

impl LiftedProblem {
    /// Number of RIS elements (the lifted dimension is one more).
    pub fn elements(&self) -> usize {
        self.big_h.len() - 1
    }

    pub fn leakage_count(&self) -> usize {
        self.big_g.len()
    }

    /// `Re(H H^H)`.
    pub fn signal_matrix(&self) -> DMatrix<f64> {
        real_outer(&self.big_h)
    }

    /// `Re(G G^H) = sum_t Re(G_t G_t^H)`.
    pub fn leakage_matrix(&self) -> DMatrix<f64> {
        let dim = self.big_h.len();
        self.big_g
            .iter()
            .fold(DMatrix::zeros(dim, dim), |acc, col| acc + real_outer(col))
    }

    /// `|H^H alpha_bar|^2` for real weights `alpha_bar` of length N+1.
    pub fn signal_power(&self, alpha_bar: &[f64]) -> f64 {
        weighted_sum(&self.big_h, alpha_bar).norm_sqr()
    }

    /// `sum_t |G_t^H alpha_bar|^2`.
    pub fn leakage_power(&self, alpha_bar: &[f64]) -> f64 {
        self.big_g.iter().map(|col| weighted_sum(col, alpha_bar).norm_sqr()).sum()
    }

    /// Lifted fractional objective for real weights `alpha_bar` of length N+1.
    pub fn ratio(&self, alpha_bar: &[f64]) -> f64 {
        self.signal_power(alpha_bar) / (self.leakage_power(alpha_bar) + self.noise_over_power)
    }

    /// Lifted objective for a binary activation profile.
    pub fn profile_ratio(&self, activation: &ActivationProfile) -> f64 {
        self.ratio(&homogenize(activation))
    }
}

/// `[alpha; 1]` as real weights.
pub fn homogenize(activation: &ActivationProfile) -> Vec<f64> {
    let mut w = activation.weights();
    w.push(1.0);
    w
}

fn weighted_sum(v: &[Complex64], w: &[f64]) -> Complex64 {
    v.iter().zip(w).map(|(z, &a)| z * a).sum()
}

fn real_outer(v: &[Complex64]) -> DMatrix<f64> {
    let n = v.len();
    DMatrix::from_fn(n, n, |i, j| (v[i] * v[j].conj()).re)
}
