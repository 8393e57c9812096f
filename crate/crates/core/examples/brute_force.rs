//! The relaxation pipeline against exhaustive search on small random instances.

use fabris::instances::random_channel_set;
use fabris::optimizer::{brute_force, optimize, OptimizerOptions};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> fabris::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    println!("{:>3} {:>2} {:>10} {:>10} {:>10} {:>6}", "N", "T", "sdr", "optimum", "bound", "ratio");
    for n in [6, 8, 10, 12] {
        for t in [1, 3] {
            let ch = random_channel_set(&mut rng, n, t);
            let out = optimize(&ch, 1.0, 0.1, &OptimizerOptions::default())?;
            let (_, best) = brute_force(&ch, out.config.phases(), 1.0, 0.1)?;
            println!(
                "{n:>3} {t:>2} {:>10.5} {best:>10.5} {:>10.5} {:>6.3}",
                out.slnr,
                out.relaxation_bound,
                out.slnr / best
            );
        }
    }
    Ok(())
}
