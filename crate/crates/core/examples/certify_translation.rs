//! Certification by enumeration: a correct translation and a wrong one.
//!
//! cargo run --example certify_translation

use omega_rm::components::CoveringMode;
use omega_rm::fixtures::{
    prefix_independent_dra, prefix_independent_mdp, running_dra, running_mdp,
};
use omega_rm::model::{constant_machine, Dra, Mdp, RewardMachine};
use omega_rm::translate::{
    certify_translation, translate_known_support, CertifyOptions, SupportSet,
};

fn show(label: &str, m: &Mdp, d: &Dra, r: &dyn RewardMachine) -> omega_rm::Result<()> {
    let rep = certify_translation(m, d, r, CertifyOptions::default())?;
    println!("{label}: certified = {}", rep.certified);
    for c in &rep.checks {
        println!(
            "  [{}] {}: {}",
            if c.pass { "ok" } else { "no" },
            c.name,
            c.detail
        );
    }
    Ok(())
}

fn main() -> omega_rm::Result<()> {
    let m = running_mdp();
    let d = running_dra();
    let r = translate_known_support(
        &m.skeleton(),
        &d,
        &SupportSet::of(&m),
        CoveringMode::Efficient,
    )?;
    show("running example, translated", &m, &d, &r)?;

    let zero = constant_machine(&m.support_edges(), 0.0);
    show("running example, all-zero machine", &m, &d, &zero)?;

    let m = prefix_independent_mdp(0.9, 0.5, (0.0, 1.0, 1.0));
    let d = prefix_independent_dra();
    let r = translate_known_support(
        &m.skeleton(),
        &d,
        &SupportSet::of(&m),
        CoveringMode::Efficient,
    )?;
    show("prefix-independent objective, translated", &m, &d, &r)?;
    Ok(())
}
