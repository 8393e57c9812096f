//! Lobe metrics of the naive and optimized configurations of one deployment,
//! plus a uniform half-wavelength panel for reference.

use fabris::array::{ActivationProfile, ArrayGeometry, OperatingBand, PhaseProfile, RisConfiguration};
use fabris::beampattern::{grid_deg, lobe_metrics, synthesize, LobeMetrics};
use fabris::channel::{build_channel_set, db_to_linear, dbm_to_watts, Position3, ScenarioLayout};
use fabris::optimizer::{naive_configuration, optimize, OptimizerOptions};
use fabris::sim::place_nonintended;

fn row(name: &str, m: &LobeMetrics) {
    println!("{name:<8} {:>10.2} {:>10.2} {:>10.2}", m.main_lobe_db, m.width_3db_deg, m.sll_db);
}

fn main() -> fabris::Result<()> {
    let thetas = grid_deg(0.0, 180.0, 0.25)?;
    let phis = grid_deg(-90.0, 90.0, 0.25)?;
    println!("{:<8} {:>10} {:>10} {:>10}", "", "main [dB]", "3dB [deg]", "SLL [dB]");

    let half_wave = ArrayGeometry::square(10, 0.005)?;
    let band = OperatingBand::from_wavelength(0.01)?;
    let uniform = RisConfiguration::new(PhaseProfile::zeros(100), ActivationProfile::all_on(100))?;
    row("uniform", &lobe_metrics(&synthesize(&half_wave, &band, &uniform, &thetas, &phis)?)?);

    let p_ue = Position3::new(10.0, 0.0, -10.0);
    let scenario = ScenarioLayout {
        p_ris: Position3::new(10.0, 20.0, 0.0),
        p_ue,
        nonintended: place_nonintended(p_ue, 5.0, 20, 11)?,
        beta0: db_to_linear(0.0),
        tx_power_w: dbm_to_watts(24.0),
        noise_power_w: dbm_to_watts(-80.0),
        ris_geometry: ArrayGeometry::reference(10)?,
        band: OperatingBand::f2(),
    };
    let ch = build_channel_set(&scenario)?;
    let naive = naive_configuration(&ch)?;
    let fabris = optimize(&ch, scenario.tx_power_w, scenario.noise_power_w, &OptimizerOptions::default())?.config;
    for (name, cfg) in [("naive", &naive), ("fabris", &fabris)] {
        let p = synthesize(&scenario.ris_geometry, &scenario.band, cfg, &thetas, &phis)?;
        row(name, &lobe_metrics(&p)?);
    }
    Ok(())
}
