//! Spacing ratios, steering vectors and microstrip phase lines for a panel
//! fabricated for one band and operated at another.

use fabris::array::{
    matched_phases, microstrip_length, spacing_ratio, steering_vector, ArrayGeometry, OperatingBand, SteeringAngles,
};

fn main() -> fabris::Result<()> {
    let geom = ArrayGeometry::reference(10)?;
    for (name, band) in [("f1", OperatingBand::f1()), ("f2", OperatingBand::f2())] {
        println!(
            "{name}: {:.2} GHz, d/lambda = {:.4}",
            band.frequency_hz() / 1e9,
            spacing_ratio(&geom, &band)
        );
    }

    let band = OperatingBand::f2();
    let target = SteeringAngles::from_degrees(60.0, 15.0);
    let a = steering_vector(&geom, target, band.wavelength_m())?;
    println!("\nfirst steering entries towards (60, 15) deg:");
    for (n, z) in a.iter().take(4).enumerate() {
        println!("  a[{n}] = {:+.4} {:+.4}j", z.re, z.im);
    }

    // phase lines realising the matched profile on a substrate with v_f = 0.7
    let phases = matched_phases(&geom, target, band.wavelength_m())?;
    println!("\nmicrostrip lengths for the matched profile:");
    for (n, &p) in phases.as_slice().iter().take(4).enumerate() {
        let len = microstrip_length(p, 0.7, band.frequency_hz())?;
        println!("  element {n}: phase {p:.4} rad -> {:.3} mm", len * 1e3);
    }
    Ok(())
}
