//! The pieces under the optimizer: lifting, one feasibility level, the
//! bisection on the ratio and Gaussian randomization.

use fabris::array::ActivationProfile;
use fabris::instances::random_channel_set;
use fabris::sdp::{bracket_and_bisect, gaussian_randomization, solve_feasibility_step, SdpInstance, SdrOptions};
use fabris::slnr::{lift, optimal_phase_profile};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> fabris::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let ch = random_channel_set(&mut rng, 12, 4);
    let lp = lift(&ch, &optimal_phase_profile(&ch)?, 1.0, 0.1)?;
    let all_on = lp.profile_ratio(&ActivationProfile::all_on(12));
    println!("all-on ratio      {all_on:.6}");

    for level in [all_on, 2.0 * all_on, 10.0 * all_on] {
        let inst = SdpInstance::new(&lp.signal_matrix(), &lp.leakage_matrix(), level, lp.noise_over_power)?;
        let sol = solve_feasibility_step(&inst, 1e-6, 5000)?;
        println!("level {level:>10.5}: {:?} after {} iterations", sol.status, sol.iterations);
    }

    let opts = SdrOptions::default();
    let out = bracket_and_bisect(&lp, &ActivationProfile::all_on(12), &opts)?;
    println!("bisection: t in [{:.6}, {:.6}] after {} steps", out.t_lo, out.t_hi, out.iterations);
    let rounded = gaussian_randomization(&out.v_star, &lp, opts.num_samples, 1)?;
    println!("randomized profile {:?} -> ratio {:.6}", rounded.bits(), lp.profile_ratio(&rounded));
    Ok(())
}
