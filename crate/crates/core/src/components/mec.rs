use std::collections::{BTreeMap, BTreeSet};

use super::{sccs, EndComponent};
use crate::model::Mdp;

/// Maximal end components, ordered by their smallest state.
pub fn mec_decomposition(m: &Mdp) -> Vec<EndComponent> {
    mec_decomposition_within(m, &vec![true; m.num_states()])
}

/// Maximal end components of the sub-MDP induced by `allowed` states.
///
/// Repeats SCC decomposition and removal of actions that can leave their SCC
/// until nothing changes.
pub fn mec_decomposition_within(m: &Mdp, allowed: &[bool]) -> Vec<EndComponent> {
    let n = m.num_states();
    let mut alive: Vec<bool> = allowed.to_vec();
    let mut act: Vec<BTreeSet<usize>> = (0..n)
        .map(|v| {
            if alive[v] {
                m.enabled(v).collect()
            } else {
                BTreeSet::new()
            }
        })
        .collect();
    let mut comp_of = vec![usize::MAX; n];
    loop {
        // Drop actions that can leave the live region, then dead states.
        let mut changed = true;
        while changed {
            changed = false;
            for v in 0..n {
                if !alive[v] {
                    continue;
                }
                let before = act[v].len();
                act[v].retain(|&a| {
                    m.choice(v, a)
                        .is_some_and(|c| c.support().all(|t| alive[t.target]))
                });
                if act[v].is_empty() {
                    alive[v] = false;
                    changed = true;
                } else if act[v].len() != before {
                    changed = true;
                }
            }
        }

        let nodes: Vec<usize> = (0..n).filter(|&v| alive[v]).collect();
        let comps = sccs(&nodes, |v| {
            act[v]
                .iter()
                .flat_map(|&a| m.choice(v, a).unwrap().support())
                .map(|t| t.target)
                .collect()
        });
        for (i, c) in comps.iter().enumerate() {
            for &v in c {
                comp_of[v] = i;
            }
        }
        let mut pruned = false;
        for &v in &nodes {
            let before = act[v].len();
            act[v].retain(|&a| {
                m.choice(v, a)
                    .unwrap()
                    .support()
                    .all(|t| alive[t.target] && comp_of[t.target] == comp_of[v])
            });
            if act[v].len() != before {
                pruned = true;
            }
            if act[v].is_empty() {
                alive[v] = false;
            }
        }
        if !pruned {
            let mut out: Vec<EndComponent> = comps
                .into_iter()
                .filter(|c| c.iter().all(|&v| alive[v]))
                .map(|c| {
                    EndComponent::new(
                        c.into_iter()
                            .map(|v| (v, act[v].clone()))
                            .collect::<BTreeMap<_, _>>(),
                    )
                })
                .collect();
            out.sort_by_key(|c| *c.states.iter().next().unwrap());
            return out;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::components::is_end_component;
    use crate::fixtures;
    use crate::product::build_product;

    #[test]
    fn running_product_mecs() {
        let p = build_product(&fixtures::running_mdp(), &fixtures::running_dra(), true).unwrap();
        let mecs = mec_decomposition(&p.mdp);
        let listed: Vec<Vec<(usize, Vec<usize>)>> = mecs
            .iter()
            .map(|c| {
                c.act
                    .iter()
                    .map(|(&v, a)| (v, a.iter().copied().collect()))
                    .collect()
            })
            .collect();
        // (s0,q2) keeps both actions together with (s1,q2) reached through b.
        assert_eq!(
            listed,
            vec![
                vec![(0, vec![0])],
                vec![(1, vec![0])],
                vec![(2, vec![0, 1]), (5, vec![1])],
            ]
        );
        assert!(mecs.iter().all(|c| is_end_component(&p.mdp, c)));
    }

    #[test]
    fn single_recurrent_class_is_one_mec() {
        let m = crate::model::MdpBuilder::new(&[] as &[&str])
            .transition("x", "a", "x", 0.5, &[])
            .transition("x", "a", "y", 0.5, &[])
            .transition("x", "b", "y", 1.0, &[])
            .transition("y", "a", "x", 1.0, &[])
            .build()
            .unwrap();
        let mecs = mec_decomposition(&m);
        assert_eq!(mecs.len(), 1);
        assert_eq!(mecs[0].size(), 3);
    }

    #[test]
    fn restriction_excludes_states() {
        let p = build_product(&fixtures::running_mdp(), &fixtures::running_dra(), true).unwrap();
        let mut allowed = vec![true; p.num_states()];
        allowed[5] = false;
        let mecs = mec_decomposition_within(&p.mdp, &allowed);
        let q2 = mecs.iter().find(|c| c.contains(2)).unwrap();
        assert_eq!(q2.act[&2], BTreeSet::from([0]));
    }
}
