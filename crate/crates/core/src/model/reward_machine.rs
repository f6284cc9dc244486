use std::collections::{BTreeMap, HashMap};

use super::mdp::Edge;
use crate::error::{Error, Result};

/// A finite-state transducer reading base transitions and emitting rewards.
///
/// States are identified by dense indices starting at zero. Implementations
/// may discover states lazily, so [`RewardMachine::num_states`] reports the
/// states materialized so far.
pub trait RewardMachine {
    fn initial(&self) -> usize;

    /// `(δ_u(u, e), δ_r(u, e))`.
    fn step(&self, u: usize, e: Edge) -> Result<(usize, f64)>;

    fn state_name(&self, u: usize) -> String;

    fn num_states(&self) -> usize;
}

/// Free-function form of [`RewardMachine::step`].
pub fn rm_step(r: &dyn RewardMachine, u: usize, e: Edge) -> Result<(usize, f64)> {
    r.step(u, e)
}

/// A reward machine stored as an explicit rule table.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct TableRewardMachine {
    pub states: Vec<String>,
    pub initial: usize,
    pub rules: HashMap<(usize, Edge), (usize, f64)>,
}

impl TableRewardMachine {
    pub fn new<S: AsRef<str>>(states: &[S], initial: usize) -> Self {
        TableRewardMachine {
            states: states.iter().map(|s| s.as_ref().to_string()).collect(),
            initial,
            rules: HashMap::new(),
        }
    }

    pub fn add_state(&mut self, name: impl Into<String>) -> usize {
        self.states.push(name.into());
        self.states.len() - 1
    }

    pub fn set(&mut self, u: usize, e: Edge, next: usize, reward: f64) {
        self.rules.insert((u, e), (next, reward));
    }

    /// Sets the same rule for every edge in `domain`.
    pub fn set_all(&mut self, u: usize, domain: &[Edge], next: usize, reward: f64) {
        for &e in domain {
            self.set(u, e, next, reward);
        }
    }

    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.states.iter().position(|s| s == name)
    }

    /// Rules in `(u, edge)` order.
    pub fn sorted_rules(&self) -> BTreeMap<(usize, Edge), (usize, f64)> {
        self.rules.iter().map(|(k, v)| (*k, *v)).collect()
    }

    /// First `(u, e)` of `domain` lacking a rule, if any.
    pub fn first_gap(&self, domain: &[Edge]) -> Option<(usize, Edge)> {
        (0..self.states.len())
            .flat_map(|u| domain.iter().map(move |&e| (u, e)))
            .find(|k| !self.rules.contains_key(k))
    }

    /// Copy of any machine restricted to the states reachable from its initial
    /// state over `domain`.
    pub fn materialize(r: &dyn RewardMachine, domain: &[Edge], cap: usize) -> Result<Self> {
        let mut index: HashMap<usize, usize> = HashMap::new();
        let mut order = vec![r.initial()];
        index.insert(r.initial(), 0);
        let mut out = TableRewardMachine::default();
        let mut i = 0;
        while i < order.len() {
            let u = order[i];
            for &e in domain {
                let (next, rew) = r.step(u, e)?;
                let j = match index.get(&next) {
                    Some(&j) => j,
                    None => {
                        if order.len() >= cap {
                            return Err(Error::cap(
                                "reward machine states",
                                order.len() as u128 + 1,
                                cap as u128,
                            ));
                        }
                        index.insert(next, order.len());
                        order.push(next);
                        order.len() - 1
                    }
                };
                out.rules.insert((i, e), (j, rew));
            }
            i += 1;
        }
        out.states = order.iter().map(|&u| r.state_name(u)).collect();
        out.initial = 0;
        Ok(out)
    }
}

impl RewardMachine for TableRewardMachine {
    fn initial(&self) -> usize {
        self.initial
    }

    fn step(&self, u: usize, e: Edge) -> Result<(usize, f64)> {
        self.rules.get(&(u, e)).copied().ok_or_else(|| {
            Error::TransitionNotInDomain(format!("state {} on {e}", self.state_name(u)))
        })
    }

    fn state_name(&self, u: usize) -> String {
        self.states
            .get(u)
            .cloned()
            .unwrap_or_else(|| format!("#{u}"))
    }

    fn num_states(&self) -> usize {
        self.states.len()
    }
}

/// Single-state machine emitting a constant reward.
pub fn constant_machine(domain: &[Edge], reward: f64) -> TableRewardMachine {
    let mut r = TableRewardMachine::new(&["u0"], 0);
    r.set_all(0, domain, 0, reward);
    r
}

/// Single-state machine reproducing the transition rewards stored in `m`.
///
/// Rules cover every listed transition of `m`; unlisted ones are outside the domain.
pub fn reward_function_machine(m: &super::mdp::Mdp) -> TableRewardMachine {
    let mut r = TableRewardMachine::new(&["u0"], 0);
    for (s, choices) in m.choices.iter().enumerate() {
        for c in choices {
            for t in &c.transitions {
                r.set(0, Edge::new(s, c.action, t.target), 0, t.reward);
            }
        }
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{counting_rm, running_mdp};

    #[test]
    fn counting_machine_steps() {
        let r = counting_rm(&running_mdp());
        let loop_a = Edge::new(0, 0, 0);
        assert_eq!(rm_step(&r, 1, loop_a).unwrap(), (1, 1.0));
        assert_eq!(rm_step(&r, 0, loop_a).unwrap(), (0, 0.0));
        assert_eq!(r.step(1, loop_a).unwrap(), r.step(1, loop_a).unwrap());
    }

    #[test]
    fn unknown_transition_is_an_error() {
        let r = counting_rm(&running_mdp());
        assert!(matches!(
            r.step(0, Edge::new(1, 0, 0)),
            Err(Error::TransitionNotInDomain(_))
        ));
    }

    #[test]
    fn materialize_keeps_reachable_states() {
        let m = running_mdp();
        let r = counting_rm(&m);
        let domain: Vec<Edge> = m.skeleton().domain().collect();
        let t = TableRewardMachine::materialize(&r, &domain, 10).unwrap();
        assert_eq!(t.states, ["u0", "u1", "u2"]);
        assert!(t.first_gap(&domain).is_none());
        assert!(matches!(
            TableRewardMachine::materialize(&r, &domain, 2),
            Err(Error::CapExceeded { .. })
        ));
    }
}
