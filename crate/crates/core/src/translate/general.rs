use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use super::BOTTOM;
use crate::components::{covering_asecs, CoveringCollection, CoveringMode};
use crate::error::{Error, Result};
use crate::model::{
    Choice, Dra, Edge, Letter, Mdp, RabinPair, RewardMachine, Skeleton, TableRewardMachine,
    Transition,
};
use crate::product::ProductMdp;

/// Default bound on the number of machine states materialized.
pub const GENERAL_STATE_CAP: usize = 1_000_000;

/// Discovered product edges as a bitset keyed by `(s, q, a, s')`; the
/// automaton fixes `q'`.
type EdgeSet = Vec<u64>;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum Node {
    Bottom,
    Live(usize, EdgeSet),
}

#[derive(Default)]
struct Tables {
    nodes: Vec<Node>,
    ids: HashMap<Node, usize>,
    coverings: HashMap<EdgeSet, Arc<CoveringCollection>>,
}

/// Reward machine that learns the support while it runs.
///
/// Its states are `⊥` and pairs `(q, E)` with `E` the product edges seen so
/// far. On `(s, a, s')` from `(q, E)` it adds the product edge to `E`; if
/// `(s, q)` is covered with respect to the enlarged set and `a` deviates from
/// the prescribed action it moves to `⊥`, otherwise to `(δ(q, ℓ), E')`. The
/// reward is 1 when `(s, q)` is covered with respect to the old `E`.
///
/// States are created on demand; coverings are computed once per edge set.
pub struct GeneralRewardMachine {
    sk: Skeleton,
    dra: Dra,
    mode: CoveringMode,
    cap: usize,
    tables: Mutex<Tables>,
}

pub fn translate_general(sk: &Skeleton, d: &Dra) -> GeneralRewardMachine {
    GeneralRewardMachine::new(
        sk.clone(),
        d.clone(),
        CoveringMode::Efficient,
        GENERAL_STATE_CAP,
    )
}

impl GeneralRewardMachine {
    pub fn new(sk: Skeleton, dra: Dra, mode: CoveringMode, cap: usize) -> Self {
        let bits = sk.num_states() * dra.num_states() * sk.actions.len() * sk.num_states();
        let words = bits.div_ceil(64).max(1);
        let initial = Node::Live(dra.initial, vec![0; words]);
        let mut tables = Tables::default();
        tables.ids.insert(initial.clone(), 0);
        tables.nodes.push(initial);
        tables.ids.insert(Node::Bottom, 1);
        tables.nodes.push(Node::Bottom);
        GeneralRewardMachine {
            sk,
            dra,
            mode,
            cap,
            tables: Mutex::new(tables),
        }
    }

    pub const BOTTOM_ID: usize = 1;

    fn successor(&self, q: usize, letter: Letter) -> Result<usize> {
        self.dra.step(q, letter).ok_or_else(|| {
            Error::Invalid(format!(
                "automaton has no successor of {}",
                self.dra.states[q]
            ))
        })
    }

    fn bit(&self, s: usize, q: usize, e: Edge) -> usize {
        let nq = self.dra.num_states();
        let na = self.sk.actions.len();
        let ns = self.sk.num_states();
        ((s * nq + q) * na + e.action) * ns + e.to
    }

    /// Product MDP spanned by the edge set, rows spread uniformly.
    fn edge_product(&self, set: &EdgeSet) -> Result<ProductMdp> {
        let nq = self.dra.num_states();
        let na = self.sk.actions.len();
        let ns = self.sk.num_states();
        let mut choices: Vec<Vec<Choice>> = vec![Vec::new(); ns * nq];
        for (v, row) in choices.iter_mut().enumerate() {
            let (s, q) = (v / nq, v % nq);
            for a in 0..na {
                let targets: Vec<usize> = (0..ns)
                    .filter(|&t| {
                        let b = ((s * nq + q) * na + a) * ns + t;
                        set[b / 64] >> (b % 64) & 1 == 1
                    })
                    .collect();
                if targets.is_empty() {
                    continue;
                }
                let p = 1.0 / targets.len() as f64;
                let mut transitions = Vec::with_capacity(targets.len());
                for t in targets {
                    let label = self.sk.label(Edge::new(s, a, t));
                    let q2 = self.successor(q, label)?;
                    transitions.push(Transition {
                        target: t * nq + q2,
                        prob: p,
                        label,
                        reward: 0.0,
                    });
                }
                transitions.sort_by_key(|t| t.target);
                row.push(Choice {
                    action: a,
                    transitions,
                });
            }
        }
        let mdp = Mdp {
            ap: self.sk.ap.clone(),
            states: (0..ns * nq)
                .map(|v| format!("{}@{}", self.sk.states[v / nq], self.dra.states[v % nq]))
                .collect(),
            actions: self.sk.actions.clone(),
            initial: self.sk.initial * nq + self.dra.initial,
            choices,
        };
        let pairs = self
            .dra
            .pairs
            .iter()
            .map(|p| RabinPair {
                accept: (0..ns * nq)
                    .filter(|v| p.accept.contains(&(v % nq)))
                    .collect(),
                reject: (0..ns * nq)
                    .filter(|v| p.reject.contains(&(v % nq)))
                    .collect(),
            })
            .collect();
        Ok(ProductMdp {
            backmap: (0..ns * nq).map(|v| (v / nq, v % nq)).collect(),
            memory_names: self.dra.states.clone(),
            mdp,
            pairs,
        })
    }

    fn covering(&self, tables: &mut Tables, set: &EdgeSet) -> Result<Arc<CoveringCollection>> {
        if let Some(c) = tables.coverings.get(set) {
            return Ok(c.clone());
        }
        let prod = self.edge_product(set)?;
        let c = Arc::new(covering_asecs(&prod, self.mode)?);
        tables.coverings.insert(set.clone(), c.clone());
        Ok(c)
    }

    fn intern(&self, tables: &mut Tables, node: Node) -> Result<usize> {
        if let Some(&id) = tables.ids.get(&node) {
            return Ok(id);
        }
        if tables.nodes.len() >= self.cap {
            return Err(Error::cap(
                "reward machine states",
                tables.nodes.len() as u128 + 1,
                self.cap as u128,
            ));
        }
        let id = tables.nodes.len();
        tables.ids.insert(node.clone(), id);
        tables.nodes.push(node);
        Ok(id)
    }

    /// Number of distinct edge sets whose covering has been computed.
    pub fn memoized_coverings(&self) -> usize {
        self.tables.lock().unwrap().coverings.len()
    }

    /// Automaton state and discovered edge count of a machine state; `None` for `⊥`.
    pub fn describe(&self, u: usize) -> Option<(usize, usize)> {
        let t = self.tables.lock().unwrap();
        match t.nodes.get(u)? {
            Node::Bottom => None,
            Node::Live(q, set) => Some((*q, set.iter().map(|w| w.count_ones() as usize).sum())),
        }
    }

    /// Explicit table over the states reachable through `domain`.
    pub fn materialize(&self, domain: &[Edge], cap: usize) -> Result<TableRewardMachine> {
        TableRewardMachine::materialize(self, domain, cap)
    }
}

impl RewardMachine for GeneralRewardMachine {
    fn initial(&self) -> usize {
        0
    }

    fn step(&self, u: usize, e: Edge) -> Result<(usize, f64)> {
        if !self.sk.in_domain(e) {
            return Err(Error::TransitionNotInDomain(format!("{e}")));
        }
        let mut tables = self.tables.lock().unwrap();
        let node =
            tables.nodes.get(u).cloned().ok_or_else(|| {
                Error::TransitionNotInDomain(format!("unknown machine state {u}"))
            })?;
        let (q, set) = match node {
            Node::Bottom => return Ok((Self::BOTTOM_ID, 0.0)),
            Node::Live(q, set) => (q, set),
        };
        let nq = self.dra.num_states();
        let v = e.from * nq + q;
        let before = self.covering(&mut tables, &set)?;
        let reward = if before.is_covered(v) { 1.0 } else { 0.0 };
        let mut grown = set;
        let b = self.bit(e.from, q, e);
        grown[b / 64] |= 1 << (b % 64);
        let after = self.covering(&mut tables, &grown)?;
        let next = if after.is_covered(v) && after.action_at(v) != Some(e.action) {
            Node::Bottom
        } else {
            Node::Live(self.successor(q, self.sk.label(e))?, grown)
        };
        Ok((self.intern(&mut tables, next)?, reward))
    }

    fn state_name(&self, u: usize) -> String {
        let t = self.tables.lock().unwrap();
        match t.nodes.get(u) {
            Some(Node::Bottom) => BOTTOM.into(),
            Some(Node::Live(q, set)) => {
                let n: u32 = set.iter().map(|w| w.count_ones()).sum();
                format!("{}|{}#{}", self.dra.states[*q], n, u)
            }
            None => format!("#{u}"),
        }
    }

    fn num_states(&self) -> usize {
        self.tables.lock().unwrap().nodes.len()
    }
}
