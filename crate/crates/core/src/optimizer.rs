//! End-to-end phase + activation optimization, the exhaustive oracle and the naive baseline.

use crate::array::{ActivationProfile, PhaseProfile, RisConfiguration};
use crate::channel::ChannelSet;
use crate::error::{invalid, Error, Result};
use crate::sdp::{better_candidate, bracket_and_bisect, gaussian_randomization, SdrOptions};
use crate::slnr::{lift, optimal_phase_profile, slnr};

/// Largest element count `brute_force` accepts.
pub const BRUTE_FORCE_LIMIT: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizerOptions {
    pub sdr: SdrOptions,
    /// Seed of the Gaussian randomization stream.
    pub seed: u64,
    /// Outer phase/activation passes. The closed-form phases do not depend on
    /// the activation, so passes after the first reproduce the same result.
    pub outer_iterations: usize,
}

impl Default for OptimizerOptions {
    fn default() -> Self {
        Self { sdr: SdrOptions::default(), seed: 0, outer_iterations: 1 }
    }
}

#[derive(Debug, Clone)]
pub struct Optimized {
    pub config: RisConfiguration,
    /// SLNR of `config`, linear.
    pub slnr: f64,
    /// Relaxation value found by bisection (an upper bound on any binary profile's SLNR).
    pub relaxation_bound: f64,
    /// Bisection levels that hit the iteration cap.
    pub unconverged_steps: usize,
}

/// Co-phased profile followed by SDR activation selection.
pub fn optimize(
    ch: &ChannelSet,
    tx_power_w: f64,
    noise_power_w: f64,
    opts: &OptimizerOptions,
) -> Result<Optimized> {
    if opts.outer_iterations == 0 {
        return Err(invalid("at least one outer iteration is required"));
    }
    let n = ch.len();
    let mut result = None;
    for _ in 0..opts.outer_iterations {
        // the phase step ignores the activation, so each pass starts from the same phases
        let phases = optimal_phase_profile(ch)?;
        let lp = lift(ch, &phases, tx_power_w, noise_power_w)?;
        let start = ActivationProfile::all_on(n);
        let outcome = bracket_and_bisect(&lp, &start, &opts.sdr)?;
        let activation = gaussian_randomization(&outcome.v_star, &lp, opts.sdr.num_samples, opts.seed)?;
        let config = RisConfiguration::new(phases, activation)?;
        let value = slnr(ch, &config, tx_power_w, noise_power_w)?;
        result = Some(Optimized {
            config,
            slnr: value,
            relaxation_bound: outcome.t_hi,
            unconverged_steps: outcome.unconverged_steps,
        });
    }
    Ok(result.expect("at least one pass ran"))
}

/// All elements on.
pub fn naive(n: usize) -> Result<ActivationProfile> {
    if n == 0 {
        return Err(invalid("naive profile needs at least one element"));
    }
    Ok(ActivationProfile::all_on(n))
}

/// Naive baseline configuration: all elements on with the co-phased profile.
pub fn naive_configuration(ch: &ChannelSet) -> Result<RisConfiguration> {
    RisConfiguration::new(optimal_phase_profile(ch)?, naive(ch.len())?)
}

/// Exact argmax of the SLNR over every activation profile for fixed phases.
///
/// Profiles are visited in Gray-code order so each step flips one element
/// and updates the running sums in `O(1 + T)`.
pub fn brute_force(
    ch: &ChannelSet,
    phases: &PhaseProfile,
    tx_power_w: f64,
    noise_power_w: f64,
) -> Result<(ActivationProfile, f64)> {
    let n = phases.len();
    if n > BRUTE_FORCE_LIMIT {
        return Err(Error::TooLarge { elements: n, limit: BRUTE_FORCE_LIMIT });
    }
    let lp = lift(ch, phases, tx_power_w, noise_power_w)?;
    let t = lp.leakage_count();

    let mut signal = lp.big_h[n];
    let mut leaks: Vec<_> = lp.big_g.iter().map(|col| col[n]).collect();
    let mut profile = vec![false; n];
    let ratio_of = |signal: num_complex::Complex64, leaks: &[num_complex::Complex64]| {
        signal.norm_sqr() / (leaks.iter().map(|z| z.norm_sqr()).sum::<f64>() + lp.noise_over_power)
    };

    let mut best = profile.clone();
    let mut best_ratio = ratio_of(signal, &leaks);
    for step in 1u64..(1u64 << n) {
        let bit = step.trailing_zeros() as usize;
        let sign = if profile[bit] { -1.0 } else { 1.0 };
        profile[bit] = !profile[bit];
        signal += lp.big_h[bit] * sign;
        for k in 0..t {
            leaks[k] += lp.big_g[k][bit] * sign;
        }
        let ratio = ratio_of(signal, &leaks);
        if better_candidate(ratio, &profile, best_ratio, &best) {
            best_ratio = ratio;
            best.clone_from(&profile);
        }
    }
    let best = ActivationProfile::new(best);
    // report the exact objective rather than the incrementally accumulated one
    let value = slnr(ch, &RisConfiguration::new(phases.clone(), best.clone())?, tx_power_w, noise_power_w)?;
    Ok((best, value))
}
