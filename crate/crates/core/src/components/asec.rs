use std::collections::{BTreeSet, VecDeque};

use super::{is_accepting, EndComponent};
use crate::error::{Error, Result};
use crate::model::{Mdp, RabinPair};

/// Shrinks an accepting end component to a simple accepting one inside it.
///
/// While some state `v` keeps several actions, find by BFS the first action
/// of a shortest path from `v` to an accepting state (a path that does not
/// return to `v` early), drop the largest other action at `v`, and discard
/// whatever is no longer reachable from `v`.
pub fn extract_asec(m: &Mdp, pairs: &[RabinPair], c: &EndComponent) -> Result<EndComponent> {
    let pair = is_accepting(c, pairs).ok_or(Error::NotAccepting)?;
    let goal = &pairs[pair].accept;
    let mut cur = c.clone();
    while let Some((&v, _)) = cur.act.iter().find(|(_, a)| a.len() > 1) {
        let keep = if goal.contains(&v) {
            None
        } else {
            first_action_towards(m, &cur, v, goal)
        };
        let acts = &cur.act[&v];
        let drop = acts
            .iter()
            .rev()
            .copied()
            .find(|&a| Some(a) != keep)
            .expect("at least two actions");
        cur.act.get_mut(&v).unwrap().remove(&drop);
        prune_unreachable(m, &mut cur, v);
    }
    // A smaller component may also satisfy an earlier pair.
    cur.witness_pair = is_accepting(&cur, pairs);
    debug_assert!(cur.witness_pair.is_some_and(|w| w <= pair));
    Ok(cur)
}

fn first_action_towards(
    m: &Mdp,
    c: &EndComponent,
    v: usize,
    goal: &BTreeSet<usize>,
) -> Option<usize> {
    let mut first = std::collections::BTreeMap::new();
    let mut queue = VecDeque::new();
    for &a in &c.act[&v] {
        for t in m.choice(v, a)?.support() {
            if t.target != v && c.contains(t.target) && !first.contains_key(&t.target) {
                first.insert(t.target, a);
                queue.push_back(t.target);
            }
        }
    }
    while let Some(x) = queue.pop_front() {
        if goal.contains(&x) {
            return first.get(&x).copied();
        }
        let fa = first[&x];
        for &a in &c.act[&x] {
            for t in m.choice(x, a)?.support() {
                if t.target != v && c.contains(t.target) && !first.contains_key(&t.target) {
                    first.insert(t.target, fa);
                    queue.push_back(t.target);
                }
            }
        }
    }
    None
}

fn prune_unreachable(m: &Mdp, c: &mut EndComponent, from: usize) {
    let mut seen = BTreeSet::from([from]);
    let mut stack = vec![from];
    while let Some(x) = stack.pop() {
        for &a in &c.act[&x] {
            for t in m
                .choice(x, a)
                .expect("retained action is enabled")
                .support()
            {
                if c.contains(t.target) && seen.insert(t.target) {
                    stack.push(t.target);
                }
            }
        }
    }
    c.act.retain(|v, _| seen.contains(v));
    c.states = seen;
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::components::{is_end_component, mec_decomposition};
    use crate::fixtures;

    #[test]
    fn self_loop_trap_keeps_the_alternation() {
        let p = fixtures::self_loop_trap_product();
        let mecs = mec_decomposition(&p.mdp);
        assert_eq!(mecs.len(), 1);
        let out = extract_asec(&p.mdp, &p.pairs, &mecs[0]).unwrap();
        assert_eq!(
            out,
            EndComponent {
                witness_pair: Some(0),
                ..EndComponent::simple([(0, 0), (1, 0)])
            }
        );
    }

    #[test]
    fn simple_input_is_returned_unchanged() {
        let p = fixtures::self_loop_trap_product();
        let c = EndComponent::simple([(0, 0), (1, 0)]);
        let out = extract_asec(&p.mdp, &p.pairs, &c).unwrap();
        assert_eq!(out.act, c.act);
        assert!(is_end_component(&p.mdp, &out));
    }

    #[test]
    fn rejects_non_accepting_input() {
        let p = fixtures::self_loop_trap_product();
        let c = EndComponent::simple([(0, 1)]);
        assert!(matches!(
            extract_asec(&p.mdp, &p.pairs, &c),
            Err(Error::NotAccepting)
        ));
    }
}
