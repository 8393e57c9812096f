//! Seeded random problem instances for tests, examples and benchmarks.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::channel::ChannelSet;

/// Circularly-symmetric complex Gaussian sample with unit variance.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Channel set with i.i.d. unit-variance complex Gaussian entries.
///
/// Each RIS-side link is scaled by `n^(-1/4)`, so a co-phased cascade grows
/// like `sqrt(n)` against a unit-variance direct link.
pub fn random_channel_set<R: Rng + ?Sized>(rng: &mut R, n: usize, t: usize) -> ChannelSet {
    let scale = 1.0 / (n.max(1) as f64).sqrt();
    let vec = |rng: &mut R| (0..n).map(|_| complex_gaussian(rng) * scale.sqrt()).collect::<Vec<_>>();
    let h = vec(rng);
    let g = vec(rng);
    let h_t = (0..t).map(|_| vec(rng)).collect();
    let h_d = complex_gaussian(rng);
    let h_dt = (0..t).map(|_| complex_gaussian(rng)).collect();
    ChannelSet { h, g, h_d, h_t, h_dt }
}
