//! Monte Carlo over random placements of non-intended users.
//!
//! Each trial draws its own placement stream from `(seed, trial)` through
//! ChaCha's stream selector, so trials can run in any order (or in parallel)
//! without changing a single value of the report.

use std::f64::consts::TAU;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::array::{ArrayGeometry, OperatingBand};
use crate::channel::{build_channel_set, Position3, ScenarioLayout};
use crate::error::{invalid, Error, Result};
use crate::optimizer::{brute_force, naive_configuration, optimize, OptimizerOptions};
use crate::slnr::{optimal_phase_profile, slnr};

/// Plane containing the circle of non-intended users, through the target UE.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CirclePlane {
    /// `p_ue + r (cos psi, 0, sin psi)`.
    #[default]
    Xz,
    /// `p_ue + r (cos psi, sin psi, 0)`.
    Xy,
    /// `p_ue + r (0, cos psi, sin psi)`.
    Yz,
}

/// Whether users sit on the circumference or uniformly inside the disk.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Placement {
    #[default]
    Circle,
    Disk,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Fabris,
    Naive,
    BruteForce,
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::Fabris => "fabris",
            Method::Naive => "naive",
            Method::BruteForce => "brute_force",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Scenario without the non-intended users.
#[derive(Debug, Clone, PartialEq)]
pub struct BaseScenario {
    pub p_ris: Position3,
    pub p_ue: Position3,
    pub beta0: f64,
    pub tx_power_w: f64,
    pub noise_power_w: f64,
    pub ris_geometry: ArrayGeometry,
    pub band: OperatingBand,
}

impl BaseScenario {
    pub fn with_nonintended(&self, nonintended: Vec<Position3>) -> ScenarioLayout {
        ScenarioLayout {
            p_ris: self.p_ris,
            p_ue: self.p_ue,
            nonintended,
            beta0: self.beta0,
            tx_power_w: self.tx_power_w,
            noise_power_w: self.noise_power_w,
            ris_geometry: self.ris_geometry,
            band: self.band,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub base: BaseScenario,
    pub radius_m: f64,
    pub num_nonintended: usize,
    pub num_trials: usize,
    pub seed: u64,
    pub methods: Vec<Method>,
    pub optimizer: OptimizerOptions,
    pub plane: CirclePlane,
    pub placement: Placement,
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<()> {
        if self.num_trials == 0 {
            return Err(invalid("at least one trial is required"));
        }
        if !(self.radius_m.is_finite() && self.radius_m >= 0.0) {
            return Err(invalid(format!("radius must be non-negative, got {}", self.radius_m)));
        }
        if self.methods.is_empty() {
            return Err(invalid("no methods requested"));
        }
        Ok(())
    }

    /// Short digest identifying the experiment.
    pub fn digest(&self) -> String {
        let digest = Sha256::digest(format!("{self:?}").as_bytes());
        digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }
}

fn point_on(p_ue: Position3, plane: CirclePlane, radius: f64, psi: f64) -> Position3 {
    let (c, s) = (radius * psi.cos(), radius * psi.sin());
    match plane {
        CirclePlane::Xz => Position3::new(p_ue.x + c, p_ue.y, p_ue.z + s),
        CirclePlane::Xy => Position3::new(p_ue.x + c, p_ue.y + s, p_ue.z),
        CirclePlane::Yz => Position3::new(p_ue.x, p_ue.y + c, p_ue.z + s),
    }
}

/// Draws `t_count` users around `p_ue` from an explicit generator.
pub fn sample_nonintended<R: Rng + ?Sized>(
    rng: &mut R,
    p_ue: Position3,
    radius: f64,
    t_count: usize,
    plane: CirclePlane,
    placement: Placement,
) -> Vec<Position3> {
    (0..t_count)
        .map(|_| {
            let psi = rng.random_range(0.0..TAU);
            let r = match placement {
                Placement::Circle => radius,
                Placement::Disk => radius * rng.random::<f64>().sqrt(),
            };
            point_on(p_ue, plane, r, psi)
        })
        .collect()
}

/// `t_count` users at distance `r` from `p_ue` in the vertical x-z plane, uniform in angle.
pub fn place_nonintended(p_ue: Position3, r: f64, t_count: usize, rng_seed: u64) -> Result<Vec<Position3>> {
    if !(r.is_finite() && r >= 0.0) {
        return Err(invalid(format!("radius must be non-negative, got {r}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    Ok(sample_nonintended(&mut rng, p_ue, r, t_count, CirclePlane::Xz, Placement::Circle))
}

/// Generator for trial `trial` of an experiment seeded with `seed`.
pub fn trial_rng(seed: u64, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    rng
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialResult {
    pub trial: usize,
    /// Linear SLNR per requested method, in request order.
    pub values: Vec<(Method, f64)>,
}

impl TrialResult {
    pub fn value(&self, method: Method) -> Option<f64> {
        self.values.iter().find(|(m, _)| *m == method).map(|&(_, v)| v)
    }
}

/// Layout of trial `trial_index` and the seed its randomization step uses.
pub fn trial_scenario(spec: &ExperimentSpec, trial_index: usize) -> (ScenarioLayout, u64) {
    let mut rng = trial_rng(spec.seed, trial_index);
    let users = sample_nonintended(
        &mut rng,
        spec.base.p_ue,
        spec.radius_m,
        spec.num_nonintended,
        spec.plane,
        spec.placement,
    );
    let randomization_seed: u64 = rng.random();
    (spec.base.with_nonintended(users), randomization_seed)
}

pub fn run_trial(spec: &ExperimentSpec, trial_index: usize) -> Result<TrialResult> {
    let wrap = |e: Error| Error::Trial { trial: trial_index, source: Box::new(e) };
    let (scenario, randomization_seed) = trial_scenario(spec, trial_index);
    let ch = build_channel_set(&scenario).map_err(wrap)?;
    let (p, s2) = (scenario.tx_power_w, scenario.noise_power_w);

    let values = spec
        .methods
        .iter()
        .map(|&method| {
            let v = match method {
                Method::Naive => slnr(&ch, &naive_configuration(&ch)?, p, s2)?,
                Method::Fabris => {
                    let opts = OptimizerOptions { seed: randomization_seed, ..spec.optimizer };
                    optimize(&ch, p, s2, &opts)?.slnr
                }
                Method::BruteForce => brute_force(&ch, &optimal_phase_profile(&ch)?, p, s2)?.1,
            };
            Ok((method, v))
        })
        .collect::<Result<Vec<_>>>()
        .map_err(wrap)?;
    Ok(TrialResult { trial: trial_index, values })
}

/// Sorted distinct values with cumulative probabilities `k / n`.
pub fn empirical_cdf(samples: &[f64]) -> Result<Vec<(f64, f64)>> {
    if samples.is_empty() {
        return Err(invalid("empirical CDF of an empty sample"));
    }
    if samples.iter().any(|v| v.is_nan()) {
        return Err(invalid("NaN in CDF samples"));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let mut out: Vec<(f64, f64)> = Vec::new();
    for (k, &v) in sorted.iter().enumerate() {
        let prob = if k + 1 == n { 1.0 } else { (k + 1) as f64 / n as f64 };
        match out.last_mut() {
            Some(last) if last.0 == v => last.1 = prob,
            _ => out.push((v, prob)),
        }
    }
    Ok(out)
}

/// Linear-interpolated percentile (`q` in `[0, 100]`) of sorted data.
fn percentile(sorted: &[f64], q: f64) -> f64 {
    let pos = q / 100.0 * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

/// Statistics of one method's SLNR values, all in dB.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlnrSummary {
    pub median_db: f64,
    pub mean_db: f64,
    pub p05_db: f64,
    pub p95_db: f64,
}

impl SlnrSummary {
    pub fn from_db(values: &[f64]) -> Result<Self> {
        if values.is_empty() {
            return Err(invalid("summary of an empty sample"));
        }
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        Ok(Self {
            median_db: percentile(&sorted, 50.0),
            mean_db: sorted.iter().sum::<f64>() / sorted.len() as f64,
            p05_db: percentile(&sorted, 5.0),
            p95_db: percentile(&sorted, 95.0),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MethodReport {
    pub method: Method,
    pub linear: Vec<f64>,
    pub db: Vec<f64>,
    pub cdf_db: Vec<(f64, f64)>,
    pub summary: SlnrSummary,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SlnrReport {
    pub methods: Vec<MethodReport>,
    pub seed: u64,
    pub spec_digest: String,
    pub num_trials: usize,
}

impl SlnrReport {
    pub fn method(&self, method: Method) -> Option<&MethodReport> {
        self.methods.iter().find(|m| m.method == method)
    }

    /// Median dB gap `a - b`, if both methods were run.
    pub fn median_gap_db(&self, a: Method, b: Method) -> Option<f64> {
        Some(self.method(a)?.summary.median_db - self.method(b)?.summary.median_db)
    }
}

pub fn to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}

/// Runs every trial (in parallel) and assembles the per-method report.
pub fn monte_carlo(spec: &ExperimentSpec) -> Result<SlnrReport> {
    spec.validate()?;
    let trials = (0..spec.num_trials)
        .into_par_iter()
        .map(|i| run_trial(spec, i))
        .collect::<Result<Vec<_>>>()?;
    assemble(spec, &trials)
}

/// Folds trial results (in trial order) into a report.
pub fn assemble(spec: &ExperimentSpec, trials: &[TrialResult]) -> Result<SlnrReport> {
    let mut ordered: Vec<&TrialResult> = trials.iter().collect();
    ordered.sort_by_key(|t| t.trial);
    let methods = spec
        .methods
        .iter()
        .map(|&method| {
            let linear: Vec<f64> = ordered
                .iter()
                .map(|t| t.value(method).ok_or_else(|| invalid(format!("trial {} lacks {method}", t.trial))))
                .collect::<Result<_>>()?;
            let db: Vec<f64> = linear.iter().map(|&v| to_db(v)).collect();
            Ok(MethodReport {
                method,
                cdf_db: empirical_cdf(&db)?,
                summary: SlnrSummary::from_db(&db)?,
                linear,
                db,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SlnrReport { methods, seed: spec.seed, spec_digest: spec.digest(), num_trials: trials.len() })
}
