//! Seeded generators for random instances.

use std::collections::{BTreeMap, BTreeSet};

use nalgebra::DMatrix;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::components::EndComponent;
use crate::model::{Choice, Dra, Mdp, RabinPair, Transition};
use crate::product::ProductMdp;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Shape of a random MDP.
#[derive(Clone, Debug)]
pub struct MdpShape {
    pub states: usize,
    pub actions: usize,
    pub ap: Vec<String>,
    /// Upper bound on successors per row; rows are never empty.
    pub max_successors: usize,
}

/// Random distribution over `k` outcomes with every entry at least `floor / k`.
pub fn positive_row<R: Rng>(rng: &mut R, k: usize, floor: f64) -> Vec<f64> {
    let raw: Vec<f64> = (0..k).map(|_| rng.random::<f64>()).collect();
    let total: f64 = raw.iter().sum();
    let base = floor / k as f64;
    raw.iter()
        .map(|x| {
            base + (1.0 - floor)
                * if total > 0.0 {
                    x / total
                } else {
                    1.0 / k as f64
                }
        })
        .collect()
}

/// Random MDP where every state enables a nonempty set of actions and each row
/// has strictly positive probabilities on its successors.
pub fn random_mdp<R: Rng>(rng: &mut R, shape: &MdpShape) -> Mdp {
    let n = shape.states;
    let letters = 1u32 << shape.ap.len();
    let mut choices = Vec::with_capacity(n);
    for _ in 0..n {
        let k = rng.random_range(1..=shape.actions);
        let mut acts: Vec<usize> = sample(rng, shape.actions, k).into_vec();
        acts.sort_unstable();
        let mut row = Vec::new();
        for a in acts {
            let fan = rng.random_range(1..=shape.max_successors.min(n));
            let mut succ: Vec<usize> = sample(rng, n, fan).into_vec();
            succ.sort_unstable();
            let probs = positive_row(rng, fan, 0.2);
            row.push(Choice {
                action: a,
                transitions: succ
                    .into_iter()
                    .zip(probs)
                    .map(|(t, p)| Transition {
                        target: t,
                        prob: p,
                        label: rng.random_range(0..letters),
                        reward: 0.0,
                    })
                    .collect(),
            });
        }
        choices.push(row);
    }
    Mdp {
        ap: shape.ap.clone(),
        states: (0..n).map(|i| format!("s{i}")).collect(),
        actions: (0..shape.actions).map(|i| format!("a{i}")).collect(),
        initial: 0,
        choices,
    }
}

/// Random total DRA with `pairs` Rabin pairs.
pub fn random_dra<R: Rng>(rng: &mut R, ap: &[String], states: usize, pairs: usize) -> Dra {
    let names: Vec<String> = (0..states).map(|i| format!("q{i}")).collect();
    let mut d = Dra::empty(ap, &names, 0);
    for row in d.delta.iter_mut() {
        for cell in row.iter_mut() {
            *cell = Some(rng.random_range(0..states));
        }
    }
    for _ in 0..pairs {
        let accept = (0..states).filter(|_| rng.random_bool(0.4));
        let accept: Vec<usize> = accept.collect();
        let reject: Vec<usize> = (0..states)
            .filter(|q| !accept.contains(q) && rng.random_bool(0.3))
            .collect();
        d.pairs.push(RabinPair::new(accept, reject));
    }
    d
}

/// Row-stochastic matrix with every entry positive, hence ergodic.
pub fn random_ergodic_chain<R: Rng>(rng: &mut R, n: usize) -> DMatrix<f64> {
    let mut p = DMatrix::zeros(n, n);
    for i in 0..n {
        for (j, x) in positive_row(rng, n, 0.3).into_iter().enumerate() {
            p[(i, j)] = x;
        }
    }
    p
}

/// Random stochastic matrix with a given number of nonzeros per row.
pub fn random_sparse_chain<R: Rng>(rng: &mut R, n: usize, fan: usize) -> DMatrix<f64> {
    let mut p = DMatrix::zeros(n, n);
    for i in 0..n {
        let k = fan.clamp(1, n);
        let cols = sample(rng, n, k).into_vec();
        for (j, x) in cols.into_iter().zip(positive_row(rng, k, 0.2)) {
            p[(i, j)] = x;
        }
    }
    p
}

/// Random closed, strongly connected MDP on `1..=max_states` states whose
/// whole state-action set is an accepting end component for the first pair.
/// A second pair with a nonempty reject set is added now and then.
pub fn random_accepting_ec<R: Rng>(rng: &mut R, max_states: usize) -> (ProductMdp, EndComponent) {
    let n = rng.random_range(1..=max_states.max(1));
    let actions = 3;
    let mut choices = Vec::with_capacity(n);
    let mut act = BTreeMap::new();
    for v in 0..n {
        let k = rng.random_range(1..=actions);
        let mut acts: Vec<usize> = sample(rng, actions, k).into_vec();
        acts.sort_unstable();
        let mut row = Vec::new();
        for (i, &a) in acts.iter().enumerate() {
            let fan = rng.random_range(1..=n.min(3));
            let mut succ: Vec<usize> = sample(rng, n, fan).into_vec();
            // The first action always reaches the next state on the cycle.
            if i == 0 && !succ.contains(&((v + 1) % n)) {
                succ[0] = (v + 1) % n;
            }
            succ.sort_unstable();
            succ.dedup();
            let probs = positive_row(rng, succ.len(), 0.2);
            row.push(Choice {
                action: a,
                transitions: succ
                    .into_iter()
                    .zip(probs)
                    .map(|(t, p)| Transition {
                        target: t,
                        prob: p,
                        label: 0,
                        reward: 0.0,
                    })
                    .collect(),
            });
        }
        act.insert(v, acts.into_iter().collect::<BTreeSet<_>>());
        choices.push(row);
    }
    let m = Mdp {
        ap: Vec::new(),
        states: (0..n).map(|i| format!("v{i}")).collect(),
        actions: (0..actions).map(|i| format!("a{i}")).collect(),
        initial: 0,
        choices,
    };
    let mut accept: Vec<usize> = (0..n).filter(|_| rng.random_bool(0.3)).collect();
    if accept.is_empty() {
        accept.push(rng.random_range(0..n));
    }
    let mut pairs = vec![RabinPair::new(accept, [])];
    if rng.random_bool(0.5) {
        let rej = rng.random_range(0..n);
        pairs.insert(0, RabinPair::new((0..n).filter(|&v| v != rej), [rej]));
    }
    (ProductMdp::from_parts(m, pairs), EndComponent::new(act))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{validate_dra, validate_mdp};

    #[test]
    fn generators_are_reproducible_and_valid() {
        let shape = MdpShape {
            states: 4,
            actions: 2,
            ap: vec!["p".into(), "q".into()],
            max_successors: 3,
        };
        let a = random_mdp(&mut rng(7), &shape);
        let b = random_mdp(&mut rng(7), &shape);
        assert_eq!(a, b);
        assert!(validate_mdp(&a).is_valid());
        let d = random_dra(&mut rng(7), &shape.ap, 3, 2);
        assert!(validate_dra(&d, &shape.ap).is_valid());
    }

    #[test]
    fn chains_are_stochastic() {
        let p = random_ergodic_chain(&mut rng(1), 5);
        for i in 0..5 {
            assert!((p.row(i).sum() - 1.0).abs() < 1e-12);
            assert!(p.row(i).iter().all(|&x| x > 0.0));
        }
        let s = random_sparse_chain(&mut rng(1), 5, 2);
        assert!((s.row(3).sum() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn accepting_ec_generator_yields_accepting_end_components() {
        let mut r = rng(7);
        for _ in 0..50 {
            let (p, c) = random_accepting_ec(&mut r, 8);
            assert!(validate_mdp(&p.mdp).is_valid());
            assert!(crate::components::is_end_component(&p.mdp, &c));
            assert!(crate::components::is_accepting(&c, &p.pairs).is_some());
        }
    }
}
