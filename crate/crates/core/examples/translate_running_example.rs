//! Translates the running example's automaton into a reward machine and
//! checks that the best policy of the product earns 1 per step.
//!
//! cargo run --example translate_running_example

use omega_rm::components::CoveringMode;
use omega_rm::evaluate::brute_force_optimal_average;
use omega_rm::fixtures::{running_dra, running_mdp};
use omega_rm::io::{to_json, RmFile};
use omega_rm::model::RewardMachine;
use omega_rm::product::build_rm_product;
use omega_rm::translate::{translate_known_support, SupportSet};

fn main() -> omega_rm::Result<()> {
    let m = running_mdp();
    let d = running_dra();
    let sk = m.skeleton();
    let r = translate_known_support(&sk, &d, &SupportSet::of(&m), CoveringMode::Efficient)?;

    println!(
        "machine states: {:?}",
        (0..r.num_states())
            .map(|u| r.state_name(u))
            .collect::<Vec<_>>()
    );
    for ((u, e), (v, x)) in r.sorted_rules() {
        if m.prob(e) > 0.0 && (u != v || x != 0.0) {
            println!(
                "  {} --{}/{x}--> {}",
                r.state_name(u),
                m.edge_name(e),
                r.state_name(v)
            );
        }
    }

    let product = build_rm_product(&m, &r, false)?;
    let best = brute_force_optimal_average(&product.mdp)?;
    println!(
        "J* = {} over {} policies",
        best.j_star, best.enumerated_count
    );

    print!("{}", to_json(&RmFile::from_machine(&r, &sk, None))?);
    Ok(())
}
