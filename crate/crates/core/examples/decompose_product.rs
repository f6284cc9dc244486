//! End components of `M ⊗ A` and the simple accepting components that the
//! translation commits to.
//!
//! cargo run --example decompose_product

use std::collections::{BTreeMap, BTreeSet};

use omega_rm::components::{
    covering_asecs, extract_asec, mec_decomposition, CoveringMode, EndComponent,
};
use omega_rm::fixtures::{running_dra, running_mdp, self_loop_trap_product};
use omega_rm::model::Mdp;
use omega_rm::product::build_product;

fn describe(m: &Mdp, c: &EndComponent) -> String {
    c.act
        .iter()
        .map(|(&v, acts)| {
            let names: Vec<&str> = acts.iter().map(|&a| m.actions[a].as_str()).collect();
            format!("{}:{}", m.states[v], names.join("|"))
        })
        .collect::<Vec<_>>()
        .join(" ")
}

fn main() -> omega_rm::Result<()> {
    let p = build_product(&running_mdp(), &running_dra(), true)?;
    println!("product states: {:?}", p.mdp.states);
    for c in mec_decomposition(&p.mdp) {
        println!("MEC   {}", describe(&p.mdp, &c));
    }
    for c in covering_asecs(&p, CoveringMode::Efficient)?.asecs {
        println!("ASEC  {}", describe(&p.mdp, &c));
    }

    // A component whose self-loop never sees the goal; extraction drops it.
    let trap = self_loop_trap_product();
    let whole = EndComponent::new(BTreeMap::from([
        (0, BTreeSet::from([0, 1])),
        (1, BTreeSet::from([0])),
    ]));
    let asec = extract_asec(&trap.mdp, &trap.pairs, &whole)?;
    println!(
        "trap: {}  =>  {}",
        describe(&trap.mdp, &whole),
        describe(&trap.mdp, &asec)
    );
    Ok(())
}
