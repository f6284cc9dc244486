//! End components of product MDPs.
//!
//! An end component is a state set with a nonempty set of retained actions per
//! state, closed under those actions and strongly connected through them.

mod asec;
mod chain;
mod covering;
mod mec;

use std::collections::{BTreeMap, BTreeSet};

use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;

use crate::model::{Mdp, RabinPair};

pub use asec::extract_asec;
pub use chain::induced_chain_ecs;
pub use covering::{covering_asecs, CoveringCollection, CoveringMode, NAIVE_STATE_CAP};
pub use mec::{mec_decomposition, mec_decomposition_within};

const CLOSURE_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EndComponent {
    pub states: BTreeSet<usize>,
    pub act: BTreeMap<usize, BTreeSet<usize>>,
    /// Smallest Rabin pair satisfied, when known to be accepting.
    pub witness_pair: Option<usize>,
}

impl EndComponent {
    pub fn new(act: BTreeMap<usize, BTreeSet<usize>>) -> Self {
        EndComponent {
            states: act.keys().copied().collect(),
            act,
            witness_pair: None,
        }
    }

    /// One retained action per state.
    pub fn simple(choice: impl IntoIterator<Item = (usize, usize)>) -> Self {
        EndComponent::new(
            choice
                .into_iter()
                .map(|(v, a)| (v, BTreeSet::from([a])))
                .collect(),
        )
    }

    pub fn is_simple(&self) -> bool {
        self.act.values().all(|a| a.len() == 1)
    }

    /// Total number of retained actions.
    pub fn size(&self) -> usize {
        self.act.values().map(BTreeSet::len).sum()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.states.contains(&v)
    }

    /// The retained action at `v` of a simple component.
    pub fn action_at(&self, v: usize) -> Option<usize> {
        self.act.get(&v).and_then(|a| a.iter().next().copied())
    }

    pub fn is_subset_of(&self, other: &EndComponent) -> bool {
        self.act.iter().all(|(v, acts)| {
            other
                .act
                .get(v)
                .is_some_and(|theirs| acts.is_subset(theirs))
        })
    }
}

/// Closure and strong connectivity of `(states, act)` in `m`.
pub fn is_end_component(m: &Mdp, c: &EndComponent) -> bool {
    if c.states.is_empty() || c.act.keys().ne(c.states.iter()) {
        return false;
    }
    for (&v, acts) in &c.act {
        if acts.is_empty() {
            return false;
        }
        for &a in acts {
            let Some(choice) = m.choice(v, a) else {
                return false;
            };
            let inside: f64 = choice
                .transitions
                .iter()
                .filter(|t| c.states.contains(&t.target))
                .map(|t| t.prob)
                .sum();
            if (inside - 1.0).abs() > CLOSURE_TOLERANCE {
                return false;
            }
        }
    }
    let order: Vec<usize> = c.states.iter().copied().collect();
    let comps = sccs(&order, |v| {
        c.act[&v]
            .iter()
            .flat_map(|&a| m.choice(v, a).into_iter().flat_map(|ch| ch.support()))
            .map(|t| t.target)
            .filter(|t| c.states.contains(t))
            .collect()
    });
    comps.len() == 1
}

/// Smallest pair index `i` with `T ∩ A'_i ≠ ∅` and `T ∩ R'_i = ∅`.
pub fn is_accepting(c: &EndComponent, pairs: &[RabinPair]) -> Option<usize> {
    pairs
        .iter()
        .position(|p| !p.accept.is_disjoint(&c.states) && p.reject.is_disjoint(&c.states))
}

/// Strongly connected components of the graph on `nodes` given by `succ`.
/// Successors outside `nodes` are ignored.
pub(crate) fn sccs(nodes: &[usize], succ: impl Fn(usize) -> Vec<usize>) -> Vec<Vec<usize>> {
    let mut g = DiGraph::<usize, ()>::with_capacity(nodes.len(), 0);
    let mut index = BTreeMap::new();
    for &v in nodes {
        index.insert(v, g.add_node(v));
    }
    for &v in nodes {
        for w in succ(v) {
            if let Some(&wi) = index.get(&w) {
                g.add_edge(index[&v], wi, ());
            }
        }
    }
    tarjan_scc(&g)
        .into_iter()
        .map(|comp| {
            let mut c: Vec<usize> = comp.into_iter().map(|i| g[i]).collect();
            c.sort_unstable();
            c
        })
        .collect()
}
