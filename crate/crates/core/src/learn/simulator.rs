use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution, Normal};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{Edge, Mdp, PolicyTable, RewardMachine, Skeleton};

/// Sampling access to an MDP whose probabilities the learner does not see.
///
/// The hidden model stays reachable through [`Simulator::hidden`] so that
/// returned policies can be scored offline.
#[derive(Clone, Debug)]
pub struct Simulator {
    hidden: Mdp,
    rng: ChaCha8Rng,
    total: u128,
    per_pair: HashMap<(usize, usize), u128>,
}

impl Simulator {
    pub fn new(hidden: Mdp, seed: u64) -> Self {
        Simulator {
            hidden,
            rng: ChaCha8Rng::seed_from_u64(seed),
            total: 0,
            per_pair: HashMap::new(),
        }
    }

    pub fn skeleton(&self) -> Skeleton {
        self.hidden.skeleton()
    }

    pub fn hidden(&self) -> &Mdp {
        &self.hidden
    }

    /// Reward the known reward function assigns to an edge.
    pub fn reward(&self, e: Edge) -> f64 {
        self.hidden.transition(e).map_or(0.0, |t| t.reward)
    }

    pub fn total_samples(&self) -> u128 {
        self.total
    }

    pub fn samples_at(&self, s: usize, a: usize) -> u128 {
        self.per_pair.get(&(s, a)).copied().unwrap_or(0)
    }

    /// One successor of `(s, a)`.
    pub fn sample(&mut self, s: usize, a: usize) -> Result<usize> {
        let row = row(&self.hidden, s, a)?;
        let x: f64 = self.rng.random();
        let mut acc = 0.0;
        let mut pick = None;
        for t in row.support() {
            acc += t.prob;
            pick = Some(t.target);
            if x < acc {
                break;
            }
        }
        let target =
            pick.ok_or_else(|| Error::Invalid(format!("empty row at {}", self.hidden.states[s])))?;
        self.total += 1;
        *self.per_pair.entry((s, a)).or_default() += 1;
        Ok(target)
    }

    /// Successor counts of `n` independent draws from `(s, a)`.
    ///
    /// Counts are drawn as a multinomial through conditional binomials, so
    /// the cost does not depend on `n`.
    pub fn sample_counts(&mut self, s: usize, a: usize, n: u128) -> Result<Vec<(usize, u128)>> {
        let support: Vec<_> = row(&self.hidden, s, a)?.support().cloned().collect();
        let mut out = Vec::with_capacity(support.len());
        let mut left = n;
        let mut mass = 1.0;
        for (i, t) in support.iter().enumerate() {
            let k = if i + 1 == support.len() {
                left
            } else {
                let p = (t.prob / mass).clamp(0.0, 1.0);
                binomial(&mut self.rng, left, p)
            };
            mass -= t.prob;
            left -= k;
            out.push((t.target, k));
        }
        self.total += n;
        *self.per_pair.entry((s, a)).or_default() += n;
        Ok(out)
    }
}

fn row(m: &Mdp, s: usize, a: usize) -> Result<&crate::model::Choice> {
    m.choice(s, a).ok_or_else(|| Error::ActionNotEnabled {
        state: m.states.get(s).cloned().unwrap_or_else(|| format!("#{s}")),
        action: m.actions.get(a).cloned().unwrap_or_else(|| format!("#{a}")),
    })
}

/// Totals of one simulated run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunSummary {
    pub steps: u64,
    pub total_reward: f64,
    pub average_reward: f64,
    /// Visits per base state.
    pub visits: Vec<u64>,
}

/// Follows `pol` for `steps` transitions, collecting rewards from `r`.
pub fn simulate_run(
    sim: &mut Simulator,
    pol: &PolicyTable,
    r: &dyn RewardMachine,
    steps: u64,
) -> Result<RunSummary> {
    let m = sim.hidden.clone();
    let (mut s, mut u) = (m.initial, r.initial());
    let mut mem = match pol {
        PolicyTable::Memoryless(_) => 0,
        PolicyTable::FiniteMemory(f) => f.initial_memory,
    };
    let mut visits = vec![0u64; m.num_states()];
    let mut total = 0.0;
    for _ in 0..steps {
        visits[s] += 1;
        let a = match pol {
            PolicyTable::Memoryless(p) => p.action(s),
            PolicyTable::FiniteMemory(f) => f.act(mem, s),
        }
        .ok_or_else(|| Error::PolicyNotTotal(m.states[s].clone()))?;
        let t = sim.sample(s, a)?;
        let e = Edge::new(s, a, t);
        let (u2, reward) = r.step(u, e)?;
        total += reward;
        if let PolicyTable::FiniteMemory(f) = pol {
            mem = f.next_memory(mem, e).ok_or_else(|| {
                Error::Invalid(format!("memory update undefined on {}", m.edge_name(e)))
            })?;
        }
        (s, u) = (t, u2);
    }
    Ok(RunSummary {
        steps,
        total_reward: total,
        average_reward: if steps == 0 {
            0.0
        } else {
            total / steps as f64
        },
        visits,
    })
}

/// Binomial draw. Exact for `n` within `u64`; beyond that the normal
/// approximation is used, whose error is far below one count at that scale.
fn binomial(rng: &mut ChaCha8Rng, n: u128, p: f64) -> u128 {
    if n == 0 || p <= 0.0 {
        return 0;
    }
    if p >= 1.0 {
        return n;
    }
    if let Ok(small) = u64::try_from(n) {
        return Binomial::new(small, p).expect("valid binomial").sample(rng) as u128;
    }
    let nf = n as f64;
    let sd = (nf * p * (1.0 - p)).sqrt();
    let x = Normal::new(nf * p, sd)
        .expect("valid normal")
        .sample(rng)
        .round();
    (x.max(0.0) as u128).min(n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::model::MdpBuilder;

    fn coin() -> Mdp {
        MdpBuilder::new(&[] as &[&str])
            .transition("s0", "a", "s0", 0.5, &[])
            .transition("s0", "a", "s1", 0.5, &[])
            .transition("s1", "a", "s0", 1.0, &[])
            .build()
            .unwrap()
    }

    #[test]
    fn seeds_reproduce() {
        let mut x = Simulator::new(coin(), 3);
        let mut y = Simulator::new(coin(), 3);
        let a: Vec<usize> = (0..50).map(|_| x.sample(0, 0).unwrap()).collect();
        let b: Vec<usize> = (0..50).map(|_| y.sample(0, 0).unwrap()).collect();
        assert_eq!(a, b);
        assert_eq!(
            x.sample_counts(0, 0, 1000).unwrap(),
            y.sample_counts(0, 0, 1000).unwrap()
        );
        assert_eq!(x.total_samples(), 1050);
        assert_eq!(x.samples_at(0, 0), 1050);
    }

    #[test]
    fn counts_sum_to_n_even_beyond_u64() {
        let mut sim = Simulator::new(coin(), 0);
        let huge = u64::MAX as u128 * 1000;
        for n in [1u128, 17, 1 << 40, huge] {
            let c = sim.sample_counts(0, 0, n).unwrap();
            assert_eq!(c.iter().map(|x| x.1).sum::<u128>(), n);
        }
        let c = sim.sample_counts(0, 0, huge).unwrap();
        let frac = c[0].1 as f64 / huge as f64;
        assert!((frac - 0.5).abs() < 1e-6);
    }

    #[test]
    fn run_average_matches_expected_policy() {
        let m = fixtures::running_mdp();
        let r = fixtures::counting_rm(&m);
        let p = crate::product::build_rm_product(&m, &r, false).unwrap();
        let mut choice = vec![Some(1); p.mdp.num_states()];
        choice[p.mdp.state_index("s0@u1").unwrap()] = Some(0);
        let f =
            crate::product::lift_policy(&crate::model::MemorylessPolicy::new(choice), &p).unwrap();
        let run = simulate_run(&mut Simulator::new(m, 0), &f.into(), &r, 1000).unwrap();
        assert_eq!(run.total_reward, 998.0);
        assert_eq!(run.visits[1], 1);
    }

    #[test]
    fn disabled_action_is_an_error() {
        let mut sim = Simulator::new(fixtures::running_mdp(), 0);
        assert!(matches!(
            sim.sample(1, 0),
            Err(Error::ActionNotEnabled { .. })
        ));
    }
}
