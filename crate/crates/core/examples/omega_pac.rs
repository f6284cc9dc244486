//! Model-based learning with a PAC guarantee: sample every pair of the
//! product enough times, solve the estimate exactly, lift the policy.
//!
//! cargo run --example omega_pac

use omega_rm::components::CoveringMode;
use omega_rm::fixtures::{running_dra, running_mdp};
use omega_rm::learn::{gain_on_hidden, omega_pac, Simulator};
use omega_rm::translate::{translate_known_support, SupportSet};

fn main() -> omega_rm::Result<()> {
    let m = running_mdp();
    let r = translate_known_support(
        &m.skeleton(),
        &running_dra(),
        &SupportSet::of(&m),
        CoveringMode::Efficient,
    )?;
    let (beta, eps, delta) = (0.5, 0.2, 0.2);
    let mut good = 0;
    for seed in 0..5 {
        let mut sim = Simulator::new(m.clone(), seed);
        let out = omega_pac(&mut sim, &r, beta, eps, delta)?;
        let gain = gain_on_hidden(&m, &r, &out.product_policy, &out.estimate.product)?;
        good += (gain >= 1.0 - delta) as usize;
        println!(
            "seed {seed}: accuracy {:.3e}, {} draws per pair, true gain {gain}",
            out.accuracy, out.samples_per_pair
        );
    }
    println!("{good}/5 within {delta} of optimal");
    Ok(())
}
