use std::collections::BTreeSet;

use super::{sccs, EndComponent};
use crate::model::{Mdp, MemorylessPolicy};

/// Recurrent classes of the chain induced by `p`, as simple end components.
///
/// States where `p` is undefined or picks a disabled action are treated as
/// dead ends and never belong to a class.
pub fn induced_chain_ecs(m: &Mdp, p: &MemorylessPolicy) -> Vec<EndComponent> {
    let n = m.num_states();
    let valid: Vec<Option<usize>> = (0..n)
        .map(|v| p.action(v).filter(|&a| m.is_enabled(v, a)))
        .collect();
    let succ = |v: usize| -> Vec<usize> {
        valid[v]
            .map(|a| {
                m.choice(v, a)
                    .unwrap()
                    .support()
                    .map(|t| t.target)
                    .collect()
            })
            .unwrap_or_default()
    };
    let nodes: Vec<usize> = (0..n).collect();
    let mut out: Vec<EndComponent> = sccs(&nodes, succ)
        .into_iter()
        .filter(|comp| {
            let members: BTreeSet<usize> = comp.iter().copied().collect();
            comp.iter()
                .all(|&v| valid[v].is_some() && succ(v).iter().all(|t| members.contains(t)))
        })
        .map(|comp| EndComponent::simple(comp.into_iter().map(|v| (v, valid[v].unwrap()))))
        .collect();
    out.sort_by_key(|c| *c.states.iter().next().unwrap());
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::product::build_rm_product;

    #[test]
    fn always_a_stays_in_the_initial_state() {
        let m = fixtures::running_mdp();
        let p = build_rm_product(&m, &fixtures::counting_rm(&m), false).unwrap();
        let pol = MemorylessPolicy::constant(&p.mdp, 0);
        let ecs = induced_chain_ecs(&p.mdp, &pol);
        let init: Vec<_> = ecs.iter().filter(|c| c.contains(p.mdp.initial)).collect();
        assert_eq!(init.len(), 1);
        assert_eq!(init[0].states.len(), 1);
    }

    #[test]
    fn detour_once_then_loop() {
        let m = fixtures::running_mdp();
        let p = build_rm_product(&m, &fixtures::counting_rm(&m), false).unwrap();
        let idx = |name: &str| p.mdp.state_index(name).unwrap();
        let mut choice = vec![Some(1); p.mdp.num_states()];
        choice[idx("s0@u1")] = Some(0);
        let ecs = induced_chain_ecs(&p.mdp, &MemorylessPolicy::new(choice));
        let target = EndComponent::simple([(idx("s0@u1"), 0)]);
        assert!(ecs.contains(&target));
        // Under this policy the s0@u2 / s1@u2 cycle is also recurrent but unreachable.
        assert!(ecs.iter().all(|c| c.is_simple()));
    }
}
