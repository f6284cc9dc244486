use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use super::Simulator;
use crate::error::{Error, Result};
use crate::model::{Choice, Edge, Mdp, RewardMachine, Transition};
use crate::product::RmProductMdp;

/// Empirical model built from simulator draws.
#[derive(Clone, Debug, PartialEq)]
pub struct MdpEstimate {
    /// Same states and actions as the sampled model; probabilities are frequencies.
    pub mdp: Mdp,
    /// Draws per `(state, action)`, aligned with `mdp.choices`.
    pub pair_samples: Vec<Vec<u128>>,
}

impl MdpEstimate {
    /// Largest `|P̄ − P|` over all triples, or `None` if the structures differ.
    pub fn max_error(&self, hidden: &Mdp) -> Option<f64> {
        if self.mdp.num_states() != hidden.num_states() {
            return None;
        }
        let mut worst = 0.0f64;
        for s in 0..hidden.num_states() {
            let mine: Vec<usize> = self.mdp.enabled(s).collect();
            let theirs: Vec<usize> = hidden.enabled(s).collect();
            if mine != theirs {
                return None;
            }
            for a in theirs {
                for t in 0..hidden.num_states() {
                    let e = Edge::new(s, a, t);
                    let (p, q) = (self.mdp.prob(e), hidden.prob(e));
                    if (p > 0.0) != (q > 0.0) {
                        return None;
                    }
                    worst = worst.max((p - q).abs());
                }
            }
        }
        Some(worst)
    }

    /// Whether every entry is within `delta` and the supports agree.
    pub fn is_estimate_of(&self, hidden: &Mdp, delta: f64) -> bool {
        self.max_error(hidden).is_some_and(|e| e < delta)
    }
}

/// Samples every enabled pair of the hidden model exactly `n` times.
pub fn estimate_mdp(sim: &mut Simulator, n: u128) -> Result<MdpEstimate> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "at least one sample per pair".into(),
        ));
    }
    let sk = sim.skeleton();
    let mut choices = Vec::with_capacity(sk.num_states());
    let mut pair_samples = Vec::with_capacity(sk.num_states());
    for s in 0..sk.num_states() {
        let mut row = Vec::new();
        for &a in &sk.enabled[s] {
            let counts = sim.sample_counts(s, a, n)?;
            row.push(frequencies(
                a,
                n,
                counts.into_iter().map(|(t, k)| {
                    let e = Edge::new(s, a, t);
                    (t, k, sk.label(e), sim.reward(e))
                }),
            ));
        }
        pair_samples.push(vec![n; row.len()]);
        choices.push(row);
    }
    Ok(MdpEstimate {
        mdp: Mdp {
            ap: sk.ap,
            states: sk.states,
            actions: sk.actions,
            initial: sk.initial,
            choices,
        },
        pair_samples,
    })
}

/// Estimate of `M ⋉ R` over the product states discovered from `(s0, u0)`,
/// sampling each discovered pair `n` times.
#[derive(Clone, Debug)]
pub struct ProductEstimate {
    pub product: RmProductMdp,
    pub pair_samples: Vec<Vec<u128>>,
}

/// Action with its observed `(target, machine state, count, reward)` outcomes.
type SampledChoice = (usize, Vec<(usize, usize, u128, f64)>);

pub fn estimate_product(
    sim: &mut Simulator,
    r: &dyn RewardMachine,
    n: u128,
) -> Result<ProductEstimate> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "at least one sample per pair".into(),
        ));
    }
    let sk = sim.skeleton();
    let start = (sk.initial, r.initial());
    let mut rows: BTreeMap<(usize, usize), Vec<SampledChoice>> = BTreeMap::new();
    let mut seen = BTreeSet::from([start]);
    let mut queue = VecDeque::from([start]);
    while let Some((s, u)) = queue.pop_front() {
        let mut row = Vec::new();
        for &a in &sk.enabled[s] {
            let mut out = Vec::new();
            for (t, k) in sim.sample_counts(s, a, n)? {
                if k == 0 {
                    continue;
                }
                let (u2, reward) = r.step(u, Edge::new(s, a, t))?;
                if seen.insert((t, u2)) {
                    queue.push_back((t, u2));
                }
                out.push((t, u2, k, reward));
            }
            row.push((a, out));
        }
        rows.insert((s, u), row);
    }

    let backmap: Vec<(usize, usize)> = seen.into_iter().collect();
    let index: HashMap<(usize, usize), usize> =
        backmap.iter().enumerate().map(|(i, &c)| (c, i)).collect();
    let mut choices = Vec::with_capacity(backmap.len());
    let mut pair_samples = Vec::with_capacity(backmap.len());
    for key in &backmap {
        let row = &rows[key];
        choices.push(
            row.iter()
                .map(|(a, out)| {
                    frequencies(
                        *a,
                        n,
                        out.iter().map(|&(t, u2, k, reward)| {
                            (
                                index[&(t, u2)],
                                k,
                                sk.label(Edge::new(key.0, *a, t)),
                                reward,
                            )
                        }),
                    )
                })
                .collect(),
        );
        pair_samples.push(vec![n; row.len()]);
    }
    let max_u = backmap.iter().map(|&(_, u)| u).max().unwrap_or(0);
    let memory_names: Vec<String> = (0..=max_u).map(|u| r.state_name(u)).collect();
    let mdp = Mdp {
        ap: sk.ap.clone(),
        states: backmap
            .iter()
            .map(|&(s, u)| format!("{}@{}", sk.states[s], memory_names[u]))
            .collect(),
        actions: sk.actions.clone(),
        initial: index[&start],
        choices,
    };
    Ok(ProductEstimate {
        product: RmProductMdp {
            mdp,
            backmap,
            memory_names,
        },
        pair_samples,
    })
}

fn frequencies(
    action: usize,
    n: u128,
    counts: impl Iterator<Item = (usize, u128, u32, f64)>,
) -> Choice {
    let mut transitions: Vec<Transition> = counts
        .filter(|c| c.1 > 0)
        .map(|(target, k, label, reward)| Transition {
            target,
            prob: k as f64 / n as f64,
            label,
            reward,
        })
        .collect();
    transitions.sort_by_key(|t| t.target);
    Choice {
        action,
        transitions,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::product::build_rm_product;

    #[test]
    fn deterministic_model_is_recovered_from_one_draw() {
        let m = fixtures::running_mdp();
        let mut sim = Simulator::new(m.clone(), 0);
        let est = estimate_mdp(&mut sim, 1).unwrap();
        assert_eq!(est.mdp, m);
        assert_eq!(est.max_error(&m), Some(0.0));
        assert_eq!(sim.total_samples(), 3);
    }

    #[test]
    fn product_estimate_matches_exact_product_when_deterministic() {
        let m = fixtures::running_mdp();
        let r = fixtures::counting_rm(&m);
        let mut sim = Simulator::new(m.clone(), 0);
        let est = estimate_product(&mut sim, &r, 5).unwrap();
        let exact = build_rm_product(&m, &r, false).unwrap();
        assert_eq!(est.product.mdp, exact.mdp);
        assert_eq!(est.product.backmap, exact.backmap);
    }

    #[test]
    fn support_never_exceeds_the_hidden_one() {
        let m = fixtures::prefix_independent_mdp(0.9, 0.5, (0.0, 1.0, 1.0));
        for seed in 0..20 {
            let mut sim = Simulator::new(m.clone(), seed);
            let est = estimate_mdp(&mut sim, 3).unwrap();
            for e in est.mdp.support_edges() {
                assert!(m.prob(e) > 0.0);
            }
            for row in &est.mdp.choices {
                for c in row {
                    assert!((c.row_sum() - 1.0).abs() < 1e-12);
                }
            }
        }
    }
}
