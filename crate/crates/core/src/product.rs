//! Synchronized products: `M ⊗ A` with a Rabin automaton and `M ⋉ R` with a
//! reward machine, plus lifting of product policies back to the base MDP.

use std::collections::{BTreeSet, HashMap, VecDeque};

use crate::error::{Error, Result};
use crate::model::{
    Choice, Dra, Edge, FiniteMemoryPolicy, Mdp, MemorylessPolicy, RabinPair, RewardMachine,
    Transition,
};

/// `M ⊗ A`: states pair a base state with an automaton state.
#[derive(Clone, Debug, PartialEq)]
pub struct ProductMdp {
    pub mdp: Mdp,
    /// Rabin pairs lifted to product state indices.
    pub pairs: Vec<RabinPair>,
    /// Product state → (base state, automaton state).
    pub backmap: Vec<(usize, usize)>,
    pub memory_names: Vec<String>,
}

/// `M ⋉ R`: states pair a base state with a reward-machine state; transition
/// rewards are the machine's outputs.
#[derive(Clone, Debug, PartialEq)]
pub struct RmProductMdp {
    pub mdp: Mdp,
    /// Product state → (base state, machine state).
    pub backmap: Vec<(usize, usize)>,
    pub memory_names: Vec<String>,
}

/// Common view of both product kinds used by policy lifting.
pub trait Product {
    fn product(&self) -> &Mdp;
    fn backmap(&self) -> &[(usize, usize)];
    fn memory_names(&self) -> &[String];

    fn index_of(&self, s: usize, m: usize) -> Option<usize> {
        self.backmap().iter().position(|&c| c == (s, m))
    }
}

impl Product for ProductMdp {
    fn product(&self) -> &Mdp {
        &self.mdp
    }
    fn backmap(&self) -> &[(usize, usize)] {
        &self.backmap
    }
    fn memory_names(&self) -> &[String] {
        &self.memory_names
    }
}

impl Product for RmProductMdp {
    fn product(&self) -> &Mdp {
        &self.mdp
    }
    fn backmap(&self) -> &[(usize, usize)] {
        &self.backmap
    }
    fn memory_names(&self) -> &[String] {
        &self.memory_names
    }
}

impl ProductMdp {
    /// Wraps an MDP that already is a product, with identity backmap.
    pub fn from_parts(mdp: Mdp, pairs: Vec<RabinPair>) -> Self {
        let n = mdp.num_states();
        ProductMdp {
            backmap: (0..n).map(|v| (v, 0)).collect(),
            memory_names: vec!["q".into()],
            mdp,
            pairs,
        }
    }

    pub fn num_states(&self) -> usize {
        self.mdp.num_states()
    }

    /// States in `A'_i`, as a membership vector.
    pub fn accepting_states(&self, pair: usize) -> Vec<bool> {
        membership(self.num_states(), &self.pairs[pair].accept)
    }

    pub fn rejecting_states(&self, pair: usize) -> Vec<bool> {
        membership(self.num_states(), &self.pairs[pair].reject)
    }
}

fn membership(n: usize, set: &BTreeSet<usize>) -> Vec<bool> {
    let mut out = vec![false; n];
    for &v in set {
        out[v] = true;
    }
    out
}

/// Builds `M ⊗ A`. Only states reachable from `(s0, q0)` are kept unless
/// `exhaustive` is set. States are ordered by `s·|Q| + q`.
pub fn build_product(m: &Mdp, d: &Dra, exhaustive: bool) -> Result<ProductMdp> {
    if m.ap != d.ap {
        return Err(Error::AlphabetMismatch {
            mdp: m.ap.clone(),
            dra: d.ap.clone(),
        });
    }
    let nq = d.num_states();
    let succ = |s: usize, q: usize, a: usize, t: &Transition| -> Result<usize> {
        d.step(q, t.label).ok_or_else(|| {
            Error::Invalid(format!(
                "automaton has no successor of {} on the label of {}",
                d.states[q],
                m.edge_name(Edge::new(s, a, t.target))
            ))
        })
    };

    let mut keep = vec![exhaustive; m.num_states() * nq];
    if !exhaustive {
        let start = m.initial * nq + d.initial;
        keep[start] = true;
        let mut queue = VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            let (s, q) = (v / nq, v % nq);
            for c in &m.choices[s] {
                for t in c.support() {
                    let w = t.target * nq + succ(s, q, c.action, t)?;
                    if !keep[w] {
                        keep[w] = true;
                        queue.push_back(w);
                    }
                }
            }
        }
    }
    let canon: Vec<usize> = (0..keep.len()).filter(|&v| keep[v]).collect();
    let mut index = vec![usize::MAX; keep.len()];
    for (i, &v) in canon.iter().enumerate() {
        index[v] = i;
    }

    let mut choices = Vec::with_capacity(canon.len());
    for &v in &canon {
        let (s, q) = (v / nq, v % nq);
        let mut row = Vec::new();
        for c in &m.choices[s] {
            let mut transitions = Vec::new();
            for t in c.support() {
                let w = t.target * nq + succ(s, q, c.action, t)?;
                transitions.push(Transition {
                    target: index[w],
                    ..t.clone()
                });
            }
            transitions.sort_by_key(|t| t.target);
            row.push(Choice {
                action: c.action,
                transitions,
            });
        }
        choices.push(row);
    }

    let backmap: Vec<(usize, usize)> = canon.iter().map(|&v| (v / nq, v % nq)).collect();
    let pairs = d
        .pairs
        .iter()
        .map(|p| RabinPair {
            accept: (0..canon.len())
                .filter(|&i| p.accept.contains(&backmap[i].1))
                .collect(),
            reject: (0..canon.len())
                .filter(|&i| p.reject.contains(&backmap[i].1))
                .collect(),
        })
        .collect();
    let mdp = Mdp {
        ap: m.ap.clone(),
        states: backmap
            .iter()
            .map(|&(s, q)| format!("{}@{}", m.states[s], d.states[q]))
            .collect(),
        actions: m.actions.clone(),
        initial: index[m.initial * nq + d.initial],
        choices,
    };
    Ok(ProductMdp {
        mdp,
        pairs,
        backmap,
        memory_names: d.states.clone(),
    })
}

/// Builds `M ⋉ R`. Only states reachable from `(s0, u0)` are kept unless
/// `exhaustive` is set, in which case every machine state currently known
/// is paired with every base state.
pub fn build_rm_product(m: &Mdp, r: &dyn RewardMachine, exhaustive: bool) -> Result<RmProductMdp> {
    let step = |u: usize, e: Edge| -> Result<(usize, f64)> {
        r.step(u, e).map_err(|err| match err {
            Error::TransitionNotInDomain(_) => Error::DomainGap(format!(
                "{} in machine state {}",
                m.edge_name(e),
                r.state_name(u)
            )),
            other => other,
        })
    };

    let mut found: BTreeSet<(usize, usize)> = BTreeSet::new();
    let start = (m.initial, r.initial());
    found.insert(start);
    let mut queue = VecDeque::from([start]);
    if exhaustive {
        for s in 0..m.num_states() {
            for u in 0..r.num_states() {
                if found.insert((s, u)) {
                    queue.push_back((s, u));
                }
            }
        }
    }
    while let Some((s, u)) = queue.pop_front() {
        for c in &m.choices[s] {
            for t in c.support() {
                let (u2, _) = step(u, Edge::new(s, c.action, t.target))?;
                if found.insert((t.target, u2)) {
                    queue.push_back((t.target, u2));
                }
            }
        }
    }

    let backmap: Vec<(usize, usize)> = found.into_iter().collect();
    let index: HashMap<(usize, usize), usize> =
        backmap.iter().enumerate().map(|(i, &c)| (c, i)).collect();
    let mut choices = Vec::with_capacity(backmap.len());
    for &(s, u) in &backmap {
        let mut row = Vec::new();
        for c in &m.choices[s] {
            let mut transitions = Vec::new();
            for t in c.support() {
                let (u2, reward) = step(u, Edge::new(s, c.action, t.target))?;
                transitions.push(Transition {
                    target: index[&(t.target, u2)],
                    prob: t.prob,
                    label: t.label,
                    reward,
                });
            }
            transitions.sort_by_key(|t| t.target);
            row.push(Choice {
                action: c.action,
                transitions,
            });
        }
        choices.push(row);
    }
    let max_u = backmap.iter().map(|&(_, u)| u).max().unwrap_or(0);
    let memory_names: Vec<String> = (0..=max_u).map(|u| r.state_name(u)).collect();
    let mdp = Mdp {
        ap: m.ap.clone(),
        states: backmap
            .iter()
            .map(|&(s, u)| format!("{}@{}", m.states[s], memory_names[u]))
            .collect(),
        actions: m.actions.clone(),
        initial: index[&start],
        choices,
    };
    Ok(RmProductMdp {
        mdp,
        backmap,
        memory_names,
    })
}

/// Turns a memoryless product policy into a finite-memory base policy whose
/// memory is the automaton or machine coordinate.
///
/// The policy must choose an enabled action at every product state reachable
/// under it. Memory updates are recorded for every product transition so the
/// memory tracks the second coordinate along any run.
pub fn lift_policy<P: Product + ?Sized>(
    p: &MemorylessPolicy,
    product: &P,
) -> Result<FiniteMemoryPolicy> {
    let pm = product.product();
    p.check(pm)?;
    let back = product.backmap();
    let mut out = FiniteMemoryPolicy {
        memory: product.memory_names().to_vec(),
        initial_memory: back[pm.initial].1,
        ..Default::default()
    };
    for (v, &(s, mem)) in back.iter().enumerate() {
        if let Some(a) = p.action(v) {
            if pm.is_enabled(v, a) {
                out.action.insert((mem, s), a);
            }
        }
        for c in &pm.choices[v] {
            for t in &c.transitions {
                let (s2, mem2) = back[t.target];
                out.update.insert((mem, Edge::new(s, c.action, s2)), mem2);
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::model::TableRewardMachine;

    #[test]
    fn running_example_product_matches_expected() {
        let (m, d) = (fixtures::running_mdp(), fixtures::running_dra());
        let full = build_product(&m, &d, true).unwrap();
        assert_eq!(full.num_states(), 6);
        let names: Vec<&str> = full.mdp.states.iter().map(String::as_str).collect();
        assert_eq!(
            names,
            ["s0@q0", "s0@q1", "s0@q2", "s1@q0", "s1@q1", "s1@q2"]
        );
        let acc: Vec<usize> = full.pairs[0].accept.iter().copied().collect();
        assert_eq!(acc, [1, 4]);
        assert!(full.pairs[0].reject.is_empty());
        // (s0,q0) --b--> (s1,q1)
        let b = m.action_index("b").unwrap();
        let row = full.mdp.choice(0, b).unwrap();
        assert_eq!(row.transitions.len(), 1);
        assert_eq!(row.transitions[0].target, 4);

        // (s1,q0) is unreachable from (s0,q0).
        let p = build_product(&m, &d, false).unwrap();
        let names: Vec<&str> = p.mdp.states.iter().map(String::as_str).collect();
        assert_eq!(names, ["s0@q0", "s0@q1", "s0@q2", "s1@q1", "s1@q2"]);
        let acc: Vec<usize> = p.pairs[0].accept.iter().copied().collect();
        assert_eq!(acc, [1, 3]);
    }

    #[test]
    fn reachable_product_drops_unreachable_states() {
        let m = fixtures::running_mdp();
        let mut d = fixtures::running_dra();
        d.initial = 1;
        let p = build_product(&m, &d, false).unwrap();
        // (s*, q0) is no longer reachable.
        assert!(p.backmap.iter().all(|&(_, q)| q != 0));
        let full = build_product(&m, &d, true).unwrap();
        assert_eq!(full.num_states(), 6);
    }

    #[test]
    fn identity_product() {
        let m = crate::model::MdpBuilder::new(&[] as &[&str])
            .transition("s", "a", "s", 1.0, &[])
            .build()
            .unwrap();
        let mut d = Dra::empty(&[] as &[&str], &["q"], 0);
        d.set_all(0, 0);
        let p = build_product(&m, &d, false).unwrap();
        assert_eq!(p.num_states(), 1);
        assert_eq!(p.mdp.choices[0][0].transitions[0].target, 0);
    }

    #[test]
    fn alphabet_mismatch_is_rejected() {
        let m = fixtures::running_mdp();
        let mut d = fixtures::running_dra();
        d.ap = vec!["x".into()];
        assert!(matches!(
            build_product(&m, &d, false),
            Err(Error::AlphabetMismatch { .. })
        ));
    }

    #[test]
    fn rm_product_of_counting_machine() {
        let m = fixtures::running_mdp();
        let r = fixtures::counting_rm(&m);
        let p = build_rm_product(&m, &r, false).unwrap();
        assert_eq!(p.mdp.num_states(), 5);
        let mut rewarded = Vec::new();
        for (v, choices) in p.mdp.choices.iter().enumerate() {
            for c in choices {
                for t in &c.transitions {
                    if t.reward > 0.0 {
                        rewarded.push((
                            p.mdp.states[v].clone(),
                            c.action,
                            p.mdp.states[t.target].clone(),
                        ));
                    }
                }
            }
        }
        assert_eq!(rewarded, [("s0@u1".to_string(), 0, "s0@u1".to_string())]);
    }

    #[test]
    fn rm_product_reports_domain_gaps() {
        let m = fixtures::running_mdp();
        let r = TableRewardMachine::new(&["u0"], 0);
        assert!(matches!(
            build_rm_product(&m, &r, false),
            Err(Error::DomainGap(_))
        ));
    }

    #[test]
    fn lifted_policy_follows_memory() {
        let (m, d) = (fixtures::running_mdp(), fixtures::running_dra());
        let p = build_product(&m, &d, false).unwrap();
        let (a, b) = (0, 1);
        // b at (s0,q0), a at (s0,q1), b wherever s1.
        let mut choice = vec![Some(a); p.num_states()];
        choice[0] = Some(b);
        for (v, &(s, _)) in p.backmap.iter().enumerate() {
            if s == 1 {
                choice[v] = Some(b);
            }
        }
        let lifted = lift_policy(&MemorylessPolicy::new(choice), &p).unwrap();
        assert_eq!(lifted.act(0, 0), Some(b));
        assert_eq!(lifted.act(1, 0), Some(a));
        assert_eq!(lifted.next_memory(0, Edge::new(0, b, 1)), Some(1));
        assert!(!lifted.is_memoryless());
    }

    #[test]
    fn lifting_rejects_partial_policies() {
        let (m, d) = (fixtures::running_mdp(), fixtures::running_dra());
        let p = build_product(&m, &d, false).unwrap();
        let pol = MemorylessPolicy::new(vec![None; p.num_states()]);
        assert!(matches!(
            lift_policy(&pol, &p),
            Err(Error::PolicyNotTotal(_))
        ));
    }
}
