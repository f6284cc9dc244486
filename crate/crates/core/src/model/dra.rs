use std::collections::{BTreeSet, HashMap};

use super::mdp::{letter_from_names, Letter};
use super::word::UltimatelyPeriodicWord;
use crate::error::Result;

/// One Rabin acceptance pair: visit `accept` infinitely often and `reject` finitely often.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RabinPair {
    pub accept: BTreeSet<usize>,
    pub reject: BTreeSet<usize>,
}

impl RabinPair {
    pub fn new(
        accept: impl IntoIterator<Item = usize>,
        reject: impl IntoIterator<Item = usize>,
    ) -> Self {
        RabinPair {
            accept: accept.into_iter().collect(),
            reject: reject.into_iter().collect(),
        }
    }

    /// Whether a set of infinitely visited states satisfies this pair.
    pub fn satisfied_by(&self, inf: &BTreeSet<usize>) -> bool {
        !self.accept.is_disjoint(inf) && self.reject.is_disjoint(inf)
    }
}

/// Deterministic Rabin automaton over letters `2^AP`.
///
/// `delta[q][letter]` is the successor of `q`; `None` marks a gap that
/// validation reports as a partial transition function.
#[derive(Clone, Debug, PartialEq)]
pub struct Dra {
    pub ap: Vec<String>,
    pub states: Vec<String>,
    pub initial: usize,
    pub delta: Vec<Vec<Option<usize>>>,
    pub pairs: Vec<RabinPair>,
}

impl Dra {
    /// An automaton with every transition undefined.
    pub fn empty<S: AsRef<str>>(ap: &[S], states: &[S], initial: usize) -> Self {
        let letters = 1usize << ap.len();
        Dra {
            ap: ap.iter().map(|p| p.as_ref().to_string()).collect(),
            states: states.iter().map(|q| q.as_ref().to_string()).collect(),
            initial,
            delta: vec![vec![None; letters]; states.len()],
            pairs: Vec::new(),
        }
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn num_letters(&self) -> usize {
        1usize << self.ap.len()
    }

    pub fn step(&self, q: usize, letter: Letter) -> Option<usize> {
        self.delta.get(q)?.get(letter as usize).copied().flatten()
    }

    /// Sets `delta(from, letter) = to` for the letter spelled by `props`.
    pub fn set(&mut self, from: usize, props: &[&str], to: usize) -> Result<()> {
        let l = letter_from_names(&self.ap, props)?;
        self.delta[from][l as usize] = Some(to);
        Ok(())
    }

    /// Sets `delta(from, l) = to` for every letter `l`.
    pub fn set_all(&mut self, from: usize, to: usize) {
        self.delta[from].iter_mut().for_each(|t| *t = Some(to));
    }

    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.states.iter().position(|q| q == name)
    }

    /// Decides acceptance of `prefix · cycle^ω`.
    ///
    /// The run is driven through the prefix, then through repeated copies of the
    /// cycle until a (state, cycle position) pair recurs. The states on that
    /// loop are exactly the states visited infinitely often.
    pub fn accepts(&self, w: &UltimatelyPeriodicWord) -> bool {
        let Some(mut q) = self.run(self.initial, &w.prefix) else {
            return false;
        };
        let n = w.cycle.len();
        let mut seen: HashMap<(usize, usize), usize> = HashMap::new();
        let mut trace = Vec::new();
        let mut pos = 0;
        loop {
            if let Some(&start) = seen.get(&(q, pos)) {
                let inf: BTreeSet<usize> = trace[start..].iter().copied().collect();
                return self.pairs.iter().any(|p| p.satisfied_by(&inf));
            }
            seen.insert((q, pos), trace.len());
            trace.push(q);
            match self.step(q, w.cycle[pos]) {
                Some(next) => q = next,
                None => return false,
            }
            pos = (pos + 1) % n;
        }
    }

    /// Runs a finite word from `q`; `None` if some transition is undefined.
    pub fn run(&self, mut q: usize, word: &[Letter]) -> Option<usize> {
        for &l in word {
            q = self.step(q, l)?;
        }
        Some(q)
    }
}

/// Free-function form of [`Dra::accepts`].
pub fn dra_accepts(d: &Dra, w: &UltimatelyPeriodicWord) -> bool {
    d.accepts(w)
}
