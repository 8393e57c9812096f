//! SLNR statistics over random placements of the non-intended users.
//!
//! Usage: `monte_carlo [trials] [beta0_db]` (defaults 50 and -30).

use fabris::array::{ArrayGeometry, OperatingBand};
use fabris::channel::{db_to_linear, dbm_to_watts, Position3};
use fabris::sim::{monte_carlo, BaseScenario, ExperimentSpec, Method};

fn main() -> fabris::Result<()> {
    let mut args = std::env::args().skip(1);
    let trials: usize = args.next().map_or(50, |s| s.parse().expect("trial count"));
    let beta0_db: f64 = args.next().map_or(-30.0, |s| s.parse().expect("beta0 in dB"));

    let base = BaseScenario {
        p_ris: Position3::new(10.0, 20.0, 0.0),
        p_ue: Position3::new(10.0, 0.0, -10.0),
        beta0: db_to_linear(beta0_db),
        tx_power_w: dbm_to_watts(24.0),
        noise_power_w: dbm_to_watts(-80.0),
        ris_geometry: ArrayGeometry::reference(10)?,
        band: OperatingBand::f2(),
    };
    println!("{trials} trials, beta0 = {beta0_db} dB");
    for radius_m in [5.0, 10.0] {
        let spec = ExperimentSpec {
            base: base.clone(),
            radius_m,
            num_nonintended: 20,
            num_trials: trials,
            seed: 1,
            methods: vec![Method::Fabris, Method::Naive],
            optimizer: Default::default(),
            plane: Default::default(),
            placement: Default::default(),
        };
        let report = monte_carlo(&spec)?;
        for m in &report.methods {
            let s = &m.summary;
            println!(
                "r = {radius_m:>4} m {:<7} median {:8.3} dB  [p05 {:8.3}, p95 {:8.3}]",
                m.method.name(),
                s.median_db,
                s.p05_db,
                s.p95_db
            );
        }
        println!("  median gap {:.4} dB", report.median_gap_db(Method::Fabris, Method::Naive).unwrap());
    }
    Ok(())
}
