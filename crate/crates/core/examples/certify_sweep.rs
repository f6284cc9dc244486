//! Certifies both translations on a handful of random instances.
//!
//! cargo run --release --example certify_sweep [instances]

use omega_rm::components::CoveringMode;
use omega_rm::model::RewardMachine;
use omega_rm::random::{random_dra, random_mdp, rng, MdpShape};
use omega_rm::translate::{
    certify_translation, translate_known_support, CertifyOptions, GeneralRewardMachine, SupportSet,
};
use omega_rm::Error;
use rand::Rng;

fn main() -> omega_rm::Result<()> {
    let wanted: usize = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(10);
    let opts = CertifyOptions {
        state_cap: 100_000,
        policy_cap: 20_000,
    };
    let (mut done, mut certified) = (0, 0);
    for seed in 0.. {
        if done == wanted {
            break;
        }
        let mut r = rng(seed);
        let shape = MdpShape {
            states: r.random_range(1..=3),
            actions: r.random_range(1..=2),
            ap: vec!["p".into()],
            max_successors: 2,
        };
        let m = random_mdp(&mut r, &shape);
        let (nq, np) = (r.random_range(1..=3), r.random_range(1..=2));
        let d = random_dra(&mut r, &shape.ap, nq, np);
        let known = translate_known_support(
            &m.skeleton(),
            &d,
            &SupportSet::of(&m),
            CoveringMode::Efficient,
        )?;
        let general =
            GeneralRewardMachine::new(m.skeleton(), d.clone(), CoveringMode::Efficient, 2_000);
        let mut line = format!("seed {seed:>3}: |S|={} |Q|={nq}", m.num_states());
        let mut ok = true;
        for (name, rm) in [
            ("known", &known as &dyn RewardMachine),
            ("general", &general),
        ] {
            match certify_translation(&m, &d, rm, opts) {
                Ok(rep) => {
                    ok &= rep.certified;
                    line += &format!(
                        "  {name}: {} ({} states)",
                        rep.certified, rep.rm_product_states
                    );
                }
                // Too large to enumerate; try the next seed.
                Err(Error::CapExceeded { .. }) => {
                    ok = false;
                    line.clear();
                    break;
                }
                Err(e) => return Err(e),
            }
        }
        if line.is_empty() {
            continue;
        }
        println!("{line}");
        done += 1;
        certified += ok as usize;
    }
    println!("{certified}/{done} instances certified for both constructions");
    Ok(())
}
