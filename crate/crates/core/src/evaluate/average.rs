use std::collections::{BTreeMap, HashMap, VecDeque};

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::linear::{gain_of_chain, PolicyChain};
use crate::components::{induced_chain_ecs, is_accepting, EndComponent};
use crate::error::{Error, Result};
use crate::model::{
    Choice, Dra, Edge, Letter, Mdp, MemorylessPolicy, PolicyTable, RabinPair, RewardMachine,
    Transition,
};
use crate::product::ProductMdp;

/// Contribution of one recurrent class to the limit-average reward.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EcGain {
    pub states: Vec<usize>,
    pub actions: Vec<usize>,
    /// Probability of eventually entering the class from the initial state.
    pub reach: f64,
    pub gain: f64,
    pub bias: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GainReport {
    pub components: Vec<EcGain>,
    /// `Σ reach_i · gain_i`.
    pub gain: f64,
}

/// Gain and bias of a simple end component, with bias anchored at its smallest state.
pub fn gain_of_ec(m: &Mdp, c: &EndComponent) -> Result<(f64, Vec<f64>)> {
    if !c.is_simple() {
        return Err(Error::InvalidArgument(
            "gain needs a simple end component".into(),
        ));
    }
    let states: Vec<usize> = c.states.iter().copied().collect();
    let local: HashMap<usize, usize> = states.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let k = states.len();
    let mut p = DMatrix::zeros(k, k);
    let mut r = DVector::zeros(k);
    for (i, &v) in states.iter().enumerate() {
        let a = c.action_at(v).unwrap();
        let ch = m.choice(v, a).ok_or_else(|| Error::ActionNotEnabled {
            state: m.states[v].clone(),
            action: m.actions[a].clone(),
        })?;
        for t in ch.support() {
            let j = *local
                .get(&t.target)
                .ok_or_else(|| Error::InvalidArgument("component is not closed".into()))?;
            p[(i, j)] += t.prob;
        }
        r[i] = ch.expected_reward();
    }
    let (y, w) = gain_of_chain(&p, &r)?;
    Ok((y, w.iter().copied().collect()))
}

/// Recurrent classes reachable from the initial state, with their entry probabilities.
fn reachable_classes(m: &Mdp, pol: &MemorylessPolicy) -> Result<Vec<(EndComponent, f64)>> {
    let chain = PolicyChain::new(m, pol)?;
    let start = chain.index[&m.initial];
    let mut out = Vec::new();
    for ec in induced_chain_ecs(m, pol) {
        let first = *ec.states.iter().next().unwrap();
        if !chain.index.contains_key(&first) {
            continue;
        }
        let mut target = vec![false; chain.len()];
        for v in &ec.states {
            target[chain.index[v]] = true;
        }
        let x = chain.reach(&target)?[start];
        out.push((ec, x));
    }
    Ok(out)
}

/// Limit-average reward of `pol` from the initial state.
pub fn limit_average(m: &Mdp, pol: &MemorylessPolicy) -> Result<GainReport> {
    let mut components = Vec::new();
    let mut gain = 0.0;
    for (ec, reach) in reachable_classes(m, pol)? {
        let (y, bias) = gain_of_ec(m, &ec)?;
        gain += reach * y;
        components.push(EcGain {
            actions: ec
                .states
                .iter()
                .map(|&v| ec.action_at(v).unwrap())
                .collect(),
            states: ec.states.into_iter().collect(),
            reach,
            gain: y,
            bias,
        });
    }
    Ok(GainReport { components, gain })
}

/// Probability that the chain induced by `pol` on a product is trapped in an
/// accepting recurrent class.
pub fn acceptance_on_product(prod: &ProductMdp, pol: &MemorylessPolicy) -> Result<f64> {
    Ok(reachable_classes(&prod.mdp, pol)?
        .into_iter()
        .filter(|(ec, _)| is_accepting(ec, &prod.pairs).is_some())
        .map(|(_, x)| x)
        .sum())
}

/// Acceptance probability of a base-MDP policy against `d`.
///
/// The policy is run jointly with the automaton; the resulting chain over
/// (state, memory, automaton state) is analysed exactly.
pub fn acceptance_probability(m: &Mdp, d: &Dra, pol: &PolicyTable) -> Result<f64> {
    if m.ap != d.ap {
        return Err(Error::AlphabetMismatch {
            mdp: m.ap.clone(),
            dra: d.ap.clone(),
        });
    }
    let (chain, order) = joint_chain(m, pol, d.initial, |q, e, label| {
        let q2 = d
            .step(q, label)
            .ok_or_else(|| Error::Invalid(format!("automaton undefined on {}", m.edge_name(e))))?;
        Ok((q2, 0.0))
    })?;
    let pairs = d
        .pairs
        .iter()
        .map(|p| RabinPair {
            accept: (0..order.len())
                .filter(|&i| p.accept.contains(&order[i].2))
                .collect(),
            reject: (0..order.len())
                .filter(|&i| p.reject.contains(&order[i].2))
                .collect(),
        })
        .collect();
    let n = order.len();
    acceptance_on_product(
        &ProductMdp::from_parts(chain, pairs),
        &MemorylessPolicy::total(vec![0; n]),
    )
}

type JointKey = (usize, usize, usize);
type ActFn<'a> = Box<dyn Fn(usize, usize) -> Option<usize> + 'a>;
type UpdateFn<'a> = Box<dyn Fn(usize, Edge) -> Option<usize> + 'a>;

/// Markov chain of a policy run alongside a deterministic tracker, keyed by
/// (state, memory, tracker state) in discovery order.
fn joint_chain(
    m: &Mdp,
    pol: &PolicyTable,
    t0: usize,
    track: impl Fn(usize, Edge, Letter) -> Result<(usize, f64)>,
) -> Result<(Mdp, Vec<JointKey>)> {
    let (mem0, act, upd): (usize, ActFn, UpdateFn) = match pol {
        PolicyTable::Memoryless(p) => (0, Box::new(|_, s| p.action(s)), Box::new(|_, _| Some(0))),
        PolicyTable::FiniteMemory(f) => (
            f.initial_memory,
            Box::new(|mem, s| f.act(mem, s)),
            Box::new(|mem, e| f.next_memory(mem, e)),
        ),
    };
    let start: JointKey = (m.initial, mem0, t0);
    let mut index: BTreeMap<JointKey, usize> = BTreeMap::from([(start, 0)]);
    let mut order = vec![start];
    let mut rows: Vec<Choice> = Vec::new();
    let mut queue = VecDeque::from([start]);
    while let Some((s, mem, q)) = queue.pop_front() {
        let a = act(mem, s).ok_or_else(|| Error::PolicyNotTotal(m.states[s].clone()))?;
        let c = m.choice(s, a).ok_or_else(|| Error::ActionNotEnabled {
            state: m.states[s].clone(),
            action: m.actions.get(a).cloned().unwrap_or_default(),
        })?;
        let mut transitions = Vec::new();
        for t in c.support() {
            let e = Edge::new(s, a, t.target);
            let mem2 = upd(mem, e).ok_or_else(|| {
                Error::Invalid(format!("memory update undefined on {}", m.edge_name(e)))
            })?;
            let (q2, reward) = track(q, e, t.label)?;
            let key = (t.target, mem2, q2);
            let j = *index.entry(key).or_insert_with(|| {
                order.push(key);
                queue.push_back(key);
                order.len() - 1
            });
            transitions.push(Transition {
                target: j,
                reward,
                ..t.clone()
            });
        }
        rows.push(Choice {
            action: 0,
            transitions,
        });
    }
    let mdp = Mdp {
        ap: m.ap.clone(),
        states: order
            .iter()
            .map(|&(s, mem, q)| format!("{}#{mem}#{q}", m.states[s]))
            .collect(),
        actions: vec!["pi".into()],
        initial: 0,
        choices: rows.into_iter().map(|c| vec![c]).collect(),
    };
    Ok((mdp, order))
}

/// Limit-average reward of a base-MDP policy when rewards come from `r`.
pub fn gain_with_machine(m: &Mdp, r: &dyn RewardMachine, pol: &PolicyTable) -> Result<f64> {
    let (chain, _) = joint_chain(m, pol, r.initial(), |u, e, _| r.step(u, e))?;
    let n = chain.num_states();
    Ok(limit_average(&chain, &MemorylessPolicy::total(vec![0; n]))?.gain)
}
