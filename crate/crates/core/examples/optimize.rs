//! One deployment end to end: co-phasing, SDR activation selection and the
//! all-on baseline. Pass a reference gain in dB as the first argument
//! (default 0, where the RIS path dominates).

use fabris::array::{ArrayGeometry, OperatingBand};
use fabris::channel::{build_channel_set, db_to_linear, dbm_to_watts, Position3, ScenarioLayout};
use fabris::optimizer::{naive_configuration, optimize, OptimizerOptions};
use fabris::sim::{place_nonintended, to_db};
use fabris::slnr::slnr;

fn main() -> fabris::Result<()> {
    let beta0_db: f64 = std::env::args().nth(1).map_or(0.0, |s| s.parse().expect("beta0 in dB"));
    let p_ue = Position3::new(10.0, 0.0, -10.0);
    let scenario = ScenarioLayout {
        p_ris: Position3::new(10.0, 20.0, 0.0),
        p_ue,
        nonintended: place_nonintended(p_ue, 5.0, 20, 11)?,
        beta0: db_to_linear(beta0_db),
        tx_power_w: dbm_to_watts(24.0),
        noise_power_w: dbm_to_watts(-80.0),
        ris_geometry: ArrayGeometry::reference(10)?,
        band: OperatingBand::f2(),
    };
    let ch = build_channel_set(&scenario)?;
    let (p, s2) = (scenario.tx_power_w, scenario.noise_power_w);

    let start = std::time::Instant::now();
    let out = optimize(&ch, p, s2, &OptimizerOptions { seed: 5, ..Default::default() })?;
    let naive = slnr(&ch, &naive_configuration(&ch)?, p, s2)?;

    println!("naive  SLNR {:8.4} dB (100/100 active)", to_db(naive));
    println!(
        "fabris SLNR {:8.4} dB ({}/100 active, {:.2?})",
        to_db(out.slnr),
        out.config.activation().active_count(),
        start.elapsed()
    );
    println!("relaxation bound {:8.4} dB", to_db(out.relaxation_bound));
    let bits: String = out.config.activation().bits().iter().map(|b| if *b == 1 { '#' } else { '.' }).collect();
    for row in bits.as_bytes().chunks(10) {
        println!("  {}", std::str::from_utf8(row).unwrap());
    }
    Ok(())
}
