use std::collections::{BTreeMap, BTreeSet};

use super::BOTTOM;
use crate::components::{covering_asecs, CoveringCollection, CoveringMode};
use crate::error::{Error, Result};
use crate::model::{Choice, Dra, Edge, Mdp, Skeleton, TableRewardMachine, Transition};
use crate::product::{build_product, ProductMdp};

/// Transitions assumed to have positive probability.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SupportSet {
    pub edges: BTreeSet<Edge>,
}

impl SupportSet {
    pub fn of(m: &Mdp) -> Self {
        SupportSet {
            edges: m.support_edges().into_iter().collect(),
        }
    }
}

impl FromIterator<Edge> for SupportSet {
    fn from_iter<I: IntoIterator<Item = Edge>>(iter: I) -> Self {
        SupportSet {
            edges: iter.into_iter().collect(),
        }
    }
}

/// An MDP with the given skeleton and support, spreading each row uniformly.
///
/// Enabled actions without any support edge are dropped.
pub fn support_mdp(sk: &Skeleton, support: &SupportSet, strict_labels: bool) -> Result<Mdp> {
    let mut rows: BTreeMap<(usize, usize), Vec<Edge>> = BTreeMap::new();
    for &e in &support.edges {
        if !sk.in_domain(e) {
            return Err(Error::TransitionNotInDomain(format!(
                "support edge {}",
                sk.edge_name(e)
            )));
        }
        if strict_labels && !sk.labels.contains_key(&e) {
            return Err(Error::MissingLabel(sk.edge_name(e)));
        }
        rows.entry((e.from, e.action)).or_default().push(e);
    }
    let mut choices: Vec<Vec<Choice>> = vec![Vec::new(); sk.num_states()];
    for ((s, a), edges) in rows {
        let p = 1.0 / edges.len() as f64;
        choices[s].push(Choice {
            action: a,
            transitions: edges
                .iter()
                .map(|&e| Transition {
                    target: e.to,
                    prob: p,
                    label: sk.label(e),
                    reward: 0.0,
                })
                .collect(),
        });
    }
    Ok(Mdp {
        ap: sk.ap.clone(),
        states: sk.states.clone(),
        actions: sk.actions.clone(),
        initial: sk.initial,
        choices,
    })
}

/// Full product of the support graph with `d` and its covering collection.
pub fn covering_for_support(
    sk: &Skeleton,
    d: &Dra,
    support: &SupportSet,
    mode: CoveringMode,
) -> Result<(ProductMdp, CoveringCollection)> {
    let m = support_mdp(sk, support, true)?;
    let prod = build_product(&m, d, true)?;
    let cover = covering_asecs(&prod, mode)?;
    Ok((prod, cover))
}

/// Reward machine over `Q ∪ {⊥}` for a known support.
///
/// In state `q` on `(s, a, s')`: if `(s, q)` is covered and `a` is not the
/// action its first covering component prescribes, move to `⊥`; otherwise
/// follow the automaton. Reward is 1 exactly when `q ≠ ⊥` and `(s, q)` is
/// covered. Rules are produced for every syntactically possible transition.
pub fn translate_known_support(
    sk: &Skeleton,
    d: &Dra,
    support: &SupportSet,
    mode: CoveringMode,
) -> Result<TableRewardMachine> {
    if support.edges.is_empty() {
        return Err(Error::InvalidArgument("empty support".into()));
    }
    let (_, cover) = covering_for_support(sk, d, support, mode)?;
    let nq = d.num_states();
    let mut names = d.states.clone();
    names.push(BOTTOM.into());
    let bottom = nq;
    let mut r = TableRewardMachine::new(&names, d.initial);
    let domain: Vec<Edge> = sk.domain().collect();
    r.set_all(bottom, &domain, bottom, 0.0);
    for q in 0..nq {
        for &e in &domain {
            // Canonical product index of (s, q); the product is exhaustive.
            let v = e.from * nq + q;
            let covered = cover.is_covered(v);
            let reward = if covered { 1.0 } else { 0.0 };
            let next = if covered && cover.action_at(v) != Some(e.action) {
                bottom
            } else {
                d.step(q, sk.label(e)).ok_or_else(|| {
                    Error::Invalid(format!("automaton has no successor of {}", d.states[q]))
                })?
            };
            r.set(q, e, next, reward);
        }
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::model::RewardMachine;

    #[test]
    fn running_example_machine() {
        let m = fixtures::running_mdp();
        let d = fixtures::running_dra();
        let sk = m.skeleton();
        let r =
            translate_known_support(&sk, &d, &SupportSet::of(&m), CoveringMode::Efficient).unwrap();
        assert_eq!(r.states, ["q0", "q1", "q2", "⊥"]);
        let (a, b) = (0, 1);
        assert_eq!(r.step(1, Edge::new(0, a, 0)).unwrap(), (1, 1.0));
        assert_eq!(r.step(1, Edge::new(0, b, 1)).unwrap(), (3, 1.0));
        assert_eq!(r.step(0, Edge::new(0, b, 1)).unwrap(), (1, 0.0));
        assert_eq!(r.step(0, Edge::new(0, a, 0)).unwrap(), (0, 0.0));
        assert_eq!(r.step(1, Edge::new(1, b, 0)).unwrap(), (1, 0.0));
        for e in sk.domain() {
            assert_eq!(r.step(3, e).unwrap(), (3, 0.0));
        }
    }

    #[test]
    fn no_pairs_no_reward() {
        let m = fixtures::running_mdp();
        let mut d = fixtures::running_dra();
        d.pairs.clear();
        let r = translate_known_support(
            &m.skeleton(),
            &d,
            &SupportSet::of(&m),
            CoveringMode::Efficient,
        )
        .unwrap();
        assert!(r.rules.values().all(|&(_, rew)| rew == 0.0));
    }

    #[test]
    fn missing_label_is_reported() {
        let m = fixtures::running_mdp();
        let mut sk = m.skeleton();
        sk.labels.remove(&Edge::new(0, 1, 1));
        let err = translate_known_support(
            &sk,
            &fixtures::running_dra(),
            &SupportSet::of(&m),
            CoveringMode::Efficient,
        );
        assert!(matches!(err, Err(Error::MissingLabel(_))));
    }
}
