//! TOML scenario files.
//!
//! ```toml
//! [geometry]
//! nx = 10
//! ny = 10
//! spacing_over_lambda1 = 0.56   # or spacing_mm = 6.0
//!
//! [band]
//! frequency_ghz = 21.28
//!
//! [scenario]                    # needed by optimize and montecarlo
//! p_ris = [10.0, 20.0, 0.0]
//! p_ue = [10.0, 0.0, -10.0]
//! beta0_db = -30.0              # optional
//! tx_power_dbm = 24.0
//! noise_power_dbm = -80.0
//! t_count = 20
//! radius_m = 5.0
//! plane = "xz"                  # optional: xz, xy, yz
//! placement = "circle"          # optional: circle, disk
//!
//! [optimizer]                   # optional, every key defaults
//! num_samples = 1000
//! bisection_tol = 1e-3
//! feasibility_tol = 1e-6
//! max_iter = 5000
//! outer_iterations = 1
//! ```
//!
//! Angles are degrees, powers dBm and lengths meters unless the key says otherwise.

use std::path::Path;

use serde::Deserialize;

use crate::array::{ArrayGeometry, OperatingBand, F1_HZ, SPEED_OF_LIGHT};
use crate::channel::{db_to_linear, dbm_to_watts, Position3, DEFAULT_BETA0_DB};
use crate::error::{Error, Result};
use crate::optimizer::OptimizerOptions;
use crate::sdp::SdrOptions;
use crate::sim::{BaseScenario, CirclePlane, ExperimentSpec, Method, Placement};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    geometry: RawGeometry,
    band: RawBand,
    scenario: Option<RawScenario>,
    optimizer: Option<RawOptimizer>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGeometry {
    nx: usize,
    ny: usize,
    spacing_mm: Option<f64>,
    spacing_over_lambda1: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBand {
    frequency_ghz: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    p_ris: [f64; 3],
    p_ue: [f64; 3],
    beta0_db: Option<f64>,
    tx_power_dbm: f64,
    noise_power_dbm: f64,
    t_count: usize,
    radius_m: f64,
    #[serde(default)]
    plane: CirclePlane,
    #[serde(default)]
    placement: Placement,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOptimizer {
    num_samples: Option<usize>,
    bisection_tol: Option<f64>,
    feasibility_tol: Option<f64>,
    max_iter: Option<usize>,
    outer_iterations: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub p_ris: Position3,
    pub p_ue: Position3,
    pub beta0: f64,
    pub tx_power_w: f64,
    pub noise_power_w: f64,
    pub t_count: usize,
    pub radius_m: f64,
    pub plane: CirclePlane,
    pub placement: Placement,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    pub geometry: ArrayGeometry,
    pub band: OperatingBand,
    pub scenario: Option<ScenarioConfig>,
    pub optimizer: OptimizerOptions,
}

fn field_error(field: &str, msg: impl std::fmt::Display) -> Error {
    Error::Config(format!("`{field}`: {msg}"))
}

fn positive(field: &str, v: f64) -> Result<f64> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(field_error(field, format!("must be positive, got {v}")))
    }
}

fn finite(field: &str, v: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(field_error(field, format!("must be finite, got {v}")))
    }
}

fn position(field: &str, p: [f64; 3]) -> Result<Position3> {
    for v in p {
        finite(field, v)?;
    }
    Ok(p.into())
}

impl Config {
    pub fn parse(text: &str) -> Result<Self> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| Error::Config(e.message().to_string()))?;
        Self::from_raw(raw)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    fn from_raw(raw: RawConfig) -> Result<Self> {
        let g = raw.geometry;
        let spacing_m = match (g.spacing_mm, g.spacing_over_lambda1) {
            (Some(mm), None) => positive("spacing_mm", mm)? * 1e-3,
            (None, Some(r)) => positive("spacing_over_lambda1", r)? * SPEED_OF_LIGHT / F1_HZ,
            _ => return Err(field_error("spacing_mm", "exactly one of spacing_mm and spacing_over_lambda1 is required")),
        };
        if g.nx == 0 {
            return Err(field_error("nx", "must be at least 1"));
        }
        if g.ny == 0 {
            return Err(field_error("ny", "must be at least 1"));
        }
        let geometry = ArrayGeometry::new(g.nx, g.ny, spacing_m).map_err(|e| field_error("geometry", e))?;
        let band = OperatingBand::from_frequency(positive("frequency_ghz", raw.band.frequency_ghz)? * 1e9)?;

        let scenario = match raw.scenario {
            None => None,
            Some(s) => {
                let radius_m = finite("radius_m", s.radius_m)?;
                if radius_m < 0.0 {
                    return Err(field_error("radius_m", "must be non-negative"));
                }
                Some(ScenarioConfig {
                    p_ris: position("p_ris", s.p_ris)?,
                    p_ue: position("p_ue", s.p_ue)?,
                    beta0: db_to_linear(finite("beta0_db", s.beta0_db.unwrap_or(DEFAULT_BETA0_DB))?),
                    tx_power_w: dbm_to_watts(finite("tx_power_dbm", s.tx_power_dbm)?),
                    noise_power_w: dbm_to_watts(finite("noise_power_dbm", s.noise_power_dbm)?),
                    t_count: s.t_count,
                    radius_m,
                    plane: s.plane,
                    placement: s.placement,
                })
            }
        };

        let o = raw.optimizer.unwrap_or_default();
        let d = SdrOptions::default();
        let sdr = SdrOptions {
            num_samples: o.num_samples.unwrap_or(d.num_samples),
            bisection_tol: positive("bisection_tol", o.bisection_tol.unwrap_or(d.bisection_tol))?,
            feasibility_tol: positive("feasibility_tol", o.feasibility_tol.unwrap_or(d.feasibility_tol))?,
            max_iter: o.max_iter.unwrap_or(d.max_iter),
        };
        if sdr.max_iter == 0 {
            return Err(field_error("max_iter", "must be at least 1"));
        }
        let outer_iterations = o.outer_iterations.unwrap_or(1);
        if outer_iterations == 0 {
            return Err(field_error("outer_iterations", "must be at least 1"));
        }
        Ok(Config {
            geometry,
            band,
            scenario,
            optimizer: OptimizerOptions { sdr, seed: 0, outer_iterations },
        })
    }

    /// The `[scenario]` section, or a config error naming it.
    pub fn scenario(&self) -> Result<&ScenarioConfig> {
        self.scenario.as_ref().ok_or_else(|| Error::Config("missing section `scenario`".into()))
    }

    pub fn base_scenario(&self) -> Result<BaseScenario> {
        let s = self.scenario()?;
        Ok(BaseScenario {
            p_ris: s.p_ris,
            p_ue: s.p_ue,
            beta0: s.beta0,
            tx_power_w: s.tx_power_w,
            noise_power_w: s.noise_power_w,
            ris_geometry: self.geometry,
            band: self.band,
        })
    }

    pub fn experiment(&self, num_trials: usize, seed: u64, methods: Vec<Method>) -> Result<ExperimentSpec> {
        let s = self.scenario()?;
        Ok(ExperimentSpec {
            base: self.base_scenario()?,
            radius_m: s.radius_m,
            num_nonintended: s.t_count,
            num_trials,
            seed,
            methods,
            optimizer: OptimizerOptions { seed, ..self.optimizer },
            plane: s.plane,
            placement: s.placement,
        })
    }
}
