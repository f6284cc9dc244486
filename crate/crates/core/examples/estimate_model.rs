//! How many draws per pair make an empirical model entrywise accurate.
//!
//! cargo run --example estimate_model

use omega_rm::learn::{estimate_mdp, required_samples, Simulator};
use omega_rm::random::{random_mdp, rng, MdpShape};

fn main() -> omega_rm::Result<()> {
    let shape = MdpShape {
        states: 4,
        actions: 2,
        ap: Vec::new(),
        max_successors: 3,
    };
    let hidden = random_mdp(&mut rng(5), &shape);
    let (delta, eps) = (0.05, 0.1);
    let n = required_samples(
        delta,
        eps,
        hidden.p_min(),
        hidden.num_states(),
        hidden.num_actions(),
    );
    println!("p_min {:.3}, {n} draws per pair", hidden.p_min());

    let trials = 50;
    let mut good = 0;
    for seed in 0..trials {
        let mut sim = Simulator::new(hidden.clone(), seed);
        let est = estimate_mdp(&mut sim, n)?;
        good += est.is_estimate_of(&hidden, delta) as usize;
        if seed == 0 {
            println!("largest error in trial 0: {:?}", est.max_error(&hidden));
        }
    }
    println!(
        "{good}/{trials} estimates within {delta} (target at least {:.0}%)",
        100.0 * (1.0 - eps)
    );
    Ok(())
}
