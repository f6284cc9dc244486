//! Exact limit-average and discounted evaluation of every policy of a
//! multichain model, and the optimum found by enumeration.
//!
//! cargo run --example evaluate_policies

use omega_rm::evaluate::{
    brute_force_optimal_average, discounted_value, enumerate_policies, limit_average,
    EnumerationMode,
};
use omega_rm::fixtures::multichain_mdp;

fn main() -> omega_rm::Result<()> {
    let m = multichain_mdp();
    enumerate_policies(&m, EnumerationMode::Full, 1_000, |p| {
        let g = limit_average(&m, p)?;
        let names: Vec<String> = (0..m.num_states())
            .filter_map(|s| {
                p.action(s)
                    .map(|a| format!("{}={}", m.states[s], m.actions[a]))
            })
            .collect();
        println!("policy {}", names.join(" "));
        println!("  gain {:.4}", g.gain);
        for c in &g.components {
            println!(
                "    class {:?} reached w.p. {:.3}, gain {:.3}",
                c.states, c.reach, c.gain
            );
        }
        for gamma in [0.9, 0.99, 0.999] {
            let v = discounted_value(&m, p, gamma)?[m.initial];
            println!("  (1-γ)V at γ={gamma}: {:.4}", (1.0 - gamma) * v);
        }
        Ok(())
    })?;
    let best = brute_force_optimal_average(&m)?;
    println!(
        "optimal gain {} attained by {} policies",
        best.j_star,
        best.optimal_set.len()
    );
    Ok(())
}
