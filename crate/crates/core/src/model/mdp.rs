use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt;

use crate::error::{Error, Result};

/// A set of atomic propositions, encoded as a bitmask over the proposition list.
pub type Letter = u32;

/// Largest supported proposition alphabet.
pub const MAX_AP: usize = 16;

/// A base transition `(s, a, s')`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    pub from: usize,
    pub action: usize,
    pub to: usize,
}

impl Edge {
    pub fn new(from: usize, action: usize, to: usize) -> Self {
        Edge { from, action, to }
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.from, self.action, self.to)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Transition {
    pub target: usize,
    pub prob: f64,
    pub label: Letter,
    /// Reward collected on this transition; zero for plain models.
    pub reward: f64,
}

/// One enabled action at a state together with its successor distribution.
#[derive(Clone, Debug, PartialEq)]
pub struct Choice {
    pub action: usize,
    pub transitions: Vec<Transition>,
}

impl Choice {
    pub fn row_sum(&self) -> f64 {
        self.transitions.iter().map(|t| t.prob).sum()
    }

    /// Successors reached with positive probability.
    pub fn support(&self) -> impl Iterator<Item = &Transition> + '_ {
        self.transitions.iter().filter(|t| t.prob > 0.0)
    }

    /// Expected one-step reward.
    pub fn expected_reward(&self) -> f64 {
        self.transitions.iter().map(|t| t.prob * t.reward).sum()
    }
}

/// A finite MDP with per-state enabled actions and labelled transitions.
///
/// Choices of a state are kept sorted by action index and the transitions of
/// a choice sorted by target index. Transitions with probability zero may be
/// listed; they carry a label but are not part of the support.
#[derive(Clone, Debug, PartialEq)]
pub struct Mdp {
    pub ap: Vec<String>,
    pub states: Vec<String>,
    pub actions: Vec<String>,
    pub initial: usize,
    pub choices: Vec<Vec<Choice>>,
}

impl Mdp {
    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn num_actions(&self) -> usize {
        self.actions.len()
    }

    pub fn enabled(&self, state: usize) -> impl Iterator<Item = usize> + '_ {
        self.choices[state].iter().map(|c| c.action)
    }

    pub fn is_enabled(&self, state: usize, action: usize) -> bool {
        self.choice(state, action).is_some()
    }

    pub fn choice(&self, state: usize, action: usize) -> Option<&Choice> {
        self.choices
            .get(state)?
            .binary_search_by_key(&action, |c| c.action)
            .ok()
            .map(|i| &self.choices[state][i])
    }

    pub fn transition(&self, edge: Edge) -> Option<&Transition> {
        let choice = self.choice(edge.from, edge.action)?;
        choice
            .transitions
            .binary_search_by_key(&edge.to, |t| t.target)
            .ok()
            .map(|i| &choice.transitions[i])
    }

    pub fn prob(&self, edge: Edge) -> f64 {
        self.transition(edge).map_or(0.0, |t| t.prob)
    }

    pub fn label(&self, edge: Edge) -> Option<Letter> {
        self.transition(edge).map(|t| t.label)
    }

    /// All transitions with positive probability.
    pub fn support_edges(&self) -> Vec<Edge> {
        let mut out = Vec::new();
        for (s, choices) in self.choices.iter().enumerate() {
            for c in choices {
                for t in c.support() {
                    out.push(Edge::new(s, c.action, t.target));
                }
            }
        }
        out
    }

    /// Smallest positive transition probability.
    pub fn p_min(&self) -> f64 {
        self.choices
            .iter()
            .flatten()
            .flat_map(|c| c.support())
            .map(|t| t.prob)
            .fold(1.0, f64::min)
    }

    /// Number of (state, enabled action) pairs.
    pub fn num_pairs(&self) -> usize {
        self.choices.iter().map(Vec::len).sum()
    }

    pub fn max_enabled(&self) -> usize {
        self.choices.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.states.iter().position(|s| s == name)
    }

    pub fn action_index(&self, name: &str) -> Option<usize> {
        self.actions.iter().position(|a| a == name)
    }

    pub fn edge_name(&self, e: Edge) -> String {
        format!(
            "({}, {}, {})",
            self.states.get(e.from).map_or("?", String::as_str),
            self.actions.get(e.action).map_or("?", String::as_str),
            self.states.get(e.to).map_or("?", String::as_str)
        )
    }

    pub fn letter(&self, props: &[&str]) -> Result<Letter> {
        letter_from_names(&self.ap, props)
    }

    /// States reachable from the initial state through positive-probability transitions.
    pub fn reachable(&self) -> Vec<bool> {
        let mut seen = vec![false; self.num_states()];
        let mut queue = VecDeque::from([self.initial]);
        seen[self.initial] = true;
        while let Some(s) = queue.pop_front() {
            for c in &self.choices[s] {
                for t in c.support() {
                    if !seen[t.target] {
                        seen[t.target] = true;
                        queue.push_back(t.target);
                    }
                }
            }
        }
        seen
    }

    /// The MDP without its transition probabilities: states, actions, enabled
    /// actions and the label function on every listed transition.
    pub fn skeleton(&self) -> Skeleton {
        let mut labels = HashMap::new();
        for (s, choices) in self.choices.iter().enumerate() {
            for c in choices {
                for t in &c.transitions {
                    labels.insert(Edge::new(s, c.action, t.target), t.label);
                }
            }
        }
        Skeleton {
            ap: self.ap.clone(),
            states: self.states.clone(),
            actions: self.actions.clone(),
            initial: self.initial,
            enabled: (0..self.num_states())
                .map(|s| self.enabled(s).collect())
                .collect(),
            labels,
        }
    }

    /// Copy of this MDP with every reward replaced by `f(edge)`.
    pub fn with_rewards(&self, f: impl Fn(Edge) -> f64) -> Mdp {
        let mut out = self.clone();
        for (s, choices) in out.choices.iter_mut().enumerate() {
            for c in choices.iter_mut() {
                for t in c.transitions.iter_mut() {
                    t.reward = f(Edge::new(s, c.action, t.target));
                }
            }
        }
        out
    }
}

/// States, actions and labels of an MDP whose transition probabilities are unknown.
#[derive(Clone, Debug, PartialEq)]
pub struct Skeleton {
    pub ap: Vec<String>,
    pub states: Vec<String>,
    pub actions: Vec<String>,
    pub initial: usize,
    pub enabled: Vec<Vec<usize>>,
    pub labels: HashMap<Edge, Letter>,
}

impl Skeleton {
    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn is_enabled(&self, state: usize, action: usize) -> bool {
        self.enabled
            .get(state)
            .is_some_and(|acts| acts.contains(&action))
    }

    /// Whether `e` is a syntactically possible transition.
    pub fn in_domain(&self, e: Edge) -> bool {
        e.to < self.num_states() && self.is_enabled(e.from, e.action)
    }

    /// Label of `e`; transitions without a declared label read as the empty letter.
    pub fn label(&self, e: Edge) -> Letter {
        self.labels.get(&e).copied().unwrap_or(0)
    }

    /// Every syntactically possible transition, in index order.
    pub fn domain(&self) -> impl Iterator<Item = Edge> + '_ {
        let n = self.num_states();
        self.enabled.iter().enumerate().flat_map(move |(s, acts)| {
            acts.iter()
                .flat_map(move |&a| (0..n).map(move |t| Edge::new(s, a, t)))
        })
    }

    pub fn edge_name(&self, e: Edge) -> String {
        format!(
            "({}, {}, {})",
            self.states[e.from], self.actions[e.action], self.states[e.to]
        )
    }
}

pub fn letter_from_names(ap: &[String], props: &[&str]) -> Result<Letter> {
    let mut letter = 0;
    for p in props {
        let i = ap
            .iter()
            .position(|a| a == p)
            .ok_or_else(|| Error::Invalid(format!("unknown proposition `{p}`")))?;
        letter |= 1 << i;
    }
    Ok(letter)
}

pub fn letter_names(ap: &[String], letter: Letter) -> Vec<String> {
    ap.iter()
        .enumerate()
        .filter(|(i, _)| letter & (1 << i) != 0)
        .map(|(_, p)| p.clone())
        .collect()
}

/// Incremental constructor keyed by state and action names.
#[derive(Debug, Default)]
pub struct MdpBuilder {
    ap: Vec<String>,
    states: Vec<String>,
    actions: Vec<String>,
    initial: Option<usize>,
    rows: BTreeMap<(usize, usize), BTreeMap<usize, Transition>>,
    error: Option<Error>,
}

impl MdpBuilder {
    pub fn new<S: AsRef<str>>(ap: &[S]) -> Self {
        MdpBuilder {
            ap: ap.iter().map(|p| p.as_ref().to_string()).collect(),
            ..Default::default()
        }
    }

    pub fn state(&mut self, name: &str) -> usize {
        intern(&mut self.states, name)
    }

    pub fn action(&mut self, name: &str) -> usize {
        intern(&mut self.actions, name)
    }

    pub fn initial(mut self, name: &str) -> Self {
        self.initial = Some(self.state(name));
        self
    }

    pub fn transition(
        self,
        from: &str,
        action: &str,
        to: &str,
        prob: f64,
        labels: &[&str],
    ) -> Self {
        self.rewarded(from, action, to, prob, labels, 0.0)
    }

    pub fn rewarded(
        mut self,
        from: &str,
        action: &str,
        to: &str,
        prob: f64,
        labels: &[&str],
        reward: f64,
    ) -> Self {
        let s = self.state(from);
        let a = self.action(action);
        let t = self.state(to);
        let label = match letter_from_names(&self.ap, labels) {
            Ok(l) => l,
            Err(e) => {
                self.error.get_or_insert(e);
                0
            }
        };
        self.rows.entry((s, a)).or_default().insert(
            t,
            Transition {
                target: t,
                prob,
                label,
                reward,
            },
        );
        self
    }

    pub fn build(self) -> Result<Mdp> {
        if let Some(e) = self.error {
            return Err(e);
        }
        let n = self.states.len();
        let mut choices: Vec<Vec<Choice>> = vec![Vec::new(); n];
        for ((s, a), row) in self.rows {
            choices[s].push(Choice {
                action: a,
                transitions: row.into_values().collect(),
            });
        }
        Ok(Mdp {
            ap: self.ap,
            states: self.states,
            actions: self.actions,
            initial: self.initial.unwrap_or(0),
            choices,
        })
    }
}

fn intern(names: &mut Vec<String>, name: &str) -> usize {
    match names.iter().position(|n| n == name) {
        Some(i) => i,
        None => {
            names.push(name.to_string());
            names.len() - 1
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::running_mdp;

    #[test]
    fn builder_orders_and_labels() {
        let m = running_mdp();
        assert_eq!(m.states, ["s0", "s1"]);
        assert_eq!(m.actions, ["a", "b"]);
        assert_eq!(m.enabled(0).collect::<Vec<_>>(), [0, 1]);
        assert_eq!(m.enabled(1).collect::<Vec<_>>(), [1]);
        assert_eq!(m.label(Edge::new(0, 1, 1)), Some(1));
        assert_eq!(m.p_min(), 1.0);
        assert_eq!(letter_names(&m.ap, 1), ["p"]);
    }

    #[test]
    fn unknown_proposition_fails_build() {
        let r = MdpBuilder::new(&["p"])
            .transition("s", "a", "s", 1.0, &["zz"])
            .build();
        assert!(r.is_err());
    }

    #[test]
    fn skeleton_domain_and_default_labels() {
        let sk = running_mdp().skeleton();
        let dom: Vec<Edge> = sk.domain().collect();
        assert_eq!(dom.len(), 6);
        assert!(sk.in_domain(Edge::new(0, 0, 1)));
        assert!(!sk.in_domain(Edge::new(1, 0, 1)));
        assert_eq!(sk.label(Edge::new(0, 0, 1)), 0);
    }
}
