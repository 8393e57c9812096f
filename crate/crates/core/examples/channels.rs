//! Line-of-sight channels of the reference deployment and the size of the
//! RIS path against the direct link for two reference gains.

use fabris::array::{ArrayGeometry, OperatingBand};
use fabris::channel::{build_channel_set, db_to_linear, dbm_to_watts, Position3, ScenarioLayout};
use fabris::sim::place_nonintended;

fn main() -> fabris::Result<()> {
    let p_ue = Position3::new(10.0, 0.0, -10.0);
    for beta0_db in [-30.0, 0.0] {
        let scenario = ScenarioLayout {
            p_ris: Position3::new(10.0, 20.0, 0.0),
            p_ue,
            nonintended: place_nonintended(p_ue, 5.0, 20, 7)?,
            beta0: db_to_linear(beta0_db),
            tx_power_w: dbm_to_watts(24.0),
            noise_power_w: dbm_to_watts(-80.0),
            ris_geometry: ArrayGeometry::reference(10)?,
            band: OperatingBand::f2(),
        };
        let ch = build_channel_set(&scenario)?;
        let coherent: f64 = ch.cascade().iter().map(|z| z.norm()).sum();
        let leak_direct: f64 = ch.h_dt.iter().map(|z| z.norm_sqr()).sum();
        println!("beta0 = {beta0_db} dB");
        println!("  |h_d|                = {:.3e}", ch.h_d.norm());
        println!("  co-phased RIS path   = {coherent:.3e}");
        println!("  direct leakage power = {leak_direct:.3e}");
    }
    Ok(())
}
