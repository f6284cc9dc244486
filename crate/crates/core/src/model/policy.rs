use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::mdp::{Edge, Mdp};
use crate::error::{Error, Result};

/// Deterministic memoryless policy: `choice[s]` is the action taken at `s`.
///
/// `None` marks states the policy leaves unspecified (typically unreachable ones).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MemorylessPolicy {
    pub choice: Vec<Option<usize>>,
}

impl MemorylessPolicy {
    pub fn new(choice: Vec<Option<usize>>) -> Self {
        MemorylessPolicy { choice }
    }

    pub fn total(choice: Vec<usize>) -> Self {
        MemorylessPolicy {
            choice: choice.into_iter().map(Some).collect(),
        }
    }

    /// Same action everywhere it is enabled, first enabled action elsewhere.
    pub fn constant(m: &Mdp, action: usize) -> Self {
        MemorylessPolicy {
            choice: (0..m.num_states())
                .map(|s| {
                    if m.is_enabled(s, action) {
                        Some(action)
                    } else {
                        m.enabled(s).next()
                    }
                })
                .collect(),
        }
    }

    pub fn action(&self, s: usize) -> Option<usize> {
        self.choice.get(s).copied().flatten()
    }

    /// Checks the policy picks an enabled action at every state reachable under it.
    pub fn check(&self, m: &Mdp) -> Result<()> {
        let mut seen = vec![false; m.num_states()];
        let mut stack = vec![m.initial];
        seen[m.initial] = true;
        while let Some(s) = stack.pop() {
            let a = self
                .action(s)
                .ok_or_else(|| Error::PolicyNotTotal(m.states[s].clone()))?;
            let c = m.choice(s, a).ok_or_else(|| Error::ActionNotEnabled {
                state: m.states[s].clone(),
                action: m.actions.get(a).cloned().unwrap_or_else(|| a.to_string()),
            })?;
            for t in c.support() {
                if !seen[t.target] {
                    seen[t.target] = true;
                    stack.push(t.target);
                }
            }
        }
        Ok(())
    }

    /// Checks the policy picks an enabled action at every state.
    pub fn check_everywhere(&self, m: &Mdp) -> Result<()> {
        for s in 0..m.num_states() {
            let a = self
                .action(s)
                .ok_or_else(|| Error::PolicyNotTotal(m.states[s].clone()))?;
            if !m.is_enabled(s, a) {
                return Err(Error::ActionNotEnabled {
                    state: m.states[s].clone(),
                    action: m.actions.get(a).cloned().unwrap_or_else(|| a.to_string()),
                });
            }
        }
        Ok(())
    }
}

/// Deterministic policy on a base MDP with a finite memory.
///
/// At base state `s` with memory `m` it plays `action[(m, s)]`; after the
/// transition `e` the memory becomes `update[(m, e)]`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FiniteMemoryPolicy {
    pub memory: Vec<String>,
    pub initial_memory: usize,
    pub action: HashMap<(usize, usize), usize>,
    pub update: HashMap<(usize, Edge), usize>,
}

impl FiniteMemoryPolicy {
    pub fn act(&self, memory: usize, state: usize) -> Option<usize> {
        self.action.get(&(memory, state)).copied()
    }

    pub fn next_memory(&self, memory: usize, e: Edge) -> Option<usize> {
        self.update.get(&(memory, e)).copied()
    }

    /// Whether the chosen action never depends on the memory.
    pub fn is_memoryless(&self) -> bool {
        let mut by_state: HashMap<usize, usize> = HashMap::new();
        self.action
            .iter()
            .all(|(&(_, s), &a)| *by_state.entry(s).or_insert(a) == a)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PolicyTable {
    Memoryless(MemorylessPolicy),
    FiniteMemory(FiniteMemoryPolicy),
}

impl PolicyTable {
    pub fn kind(&self) -> &'static str {
        match self {
            PolicyTable::Memoryless(_) => "memoryless",
            PolicyTable::FiniteMemory(_) => "finite-memory",
        }
    }
}

impl From<MemorylessPolicy> for PolicyTable {
    fn from(p: MemorylessPolicy) -> Self {
        PolicyTable::Memoryless(p)
    }
}

impl From<FiniteMemoryPolicy> for PolicyTable {
    fn from(p: FiniteMemoryPolicy) -> Self {
        PolicyTable::FiniteMemory(p)
    }
}
