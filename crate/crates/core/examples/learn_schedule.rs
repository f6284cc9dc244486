//! The discount schedule on a multichain model whose discounted optimum
//! differs from the limit-average one until the discount is close to 1.
//!
//! cargo run --release --example learn_schedule

use omega_rm::fixtures::multichain_mdp;
use omega_rm::learn::{run_algorithm1, Simulator};
use omega_rm::model::reward_function_machine;

fn main() -> omega_rm::Result<()> {
    let m = multichain_mdp();
    let r = reward_function_machine(&m);
    let mut sim = Simulator::new(m.clone(), 0);
    let rep = run_algorithm1(&mut sim, &r, 20)?;
    println!("J* = {}", rep.j_star);
    for it in &rep.iterations {
        println!(
            "k={:>2} gamma={:.3} samples/pair={:>8} gain={:.3}{}",
            it.k,
            it.gamma,
            it.samples_per_pair,
            it.gain,
            if it.gain_optimal { "  optimal" } else { "" }
        );
    }
    println!(
        "stable from k0 = {:?}; discounted misses {}",
        rep.k0, rep.discounted_misses
    );
    Ok(())
}
