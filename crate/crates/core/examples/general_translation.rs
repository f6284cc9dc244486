//! The translation that does not need the support: the machine remembers
//! which transitions it has seen and recomputes its covering as they grow.
//!
//! cargo run --example general_translation

use omega_rm::fixtures::{running_dra, running_mdp};
use omega_rm::model::{Edge, RewardMachine};
use omega_rm::translate::{certify_translation, translate_general, CertifyOptions};

fn main() -> omega_rm::Result<()> {
    let m = running_mdp();
    let d = running_dra();
    let r = translate_general(&m.skeleton(), &d);

    // Walk the optimal run: b once, then a forever.
    let (a, b) = (0, 1);
    let run = [
        Edge::new(0, b, 1),
        Edge::new(1, b, 0),
        Edge::new(0, a, 0),
        Edge::new(0, a, 0),
    ];
    let mut u = r.initial();
    for e in run {
        let (v, x) = r.step(u, e)?;
        println!(
            "{:>12} on {:<12} reward {x} -> {}",
            r.state_name(u),
            m.edge_name(e),
            r.state_name(v)
        );
        u = v;
    }

    let table = r.materialize(&m.support_edges(), 10_000)?;
    println!(
        "materialized over the support: {} states",
        table.num_states()
    );
    println!("coverings computed: {}", r.memoized_coverings());

    // The product is larger than the default cap of 14 states.
    let opts = CertifyOptions {
        state_cap: 1_000,
        ..CertifyOptions::default()
    };
    let rep = certify_translation(&m, &d, &r, opts)?;
    println!(
        "certified {} with {} product states, max gain {}",
        rep.certified, rep.rm_product_states, rep.max_gain
    );
    Ok(())
}
