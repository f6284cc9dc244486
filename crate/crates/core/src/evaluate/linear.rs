use std::collections::{HashMap, VecDeque};

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::model::{Mdp, MemorylessPolicy};

/// The Markov chain a memoryless policy induces on the states reachable from
/// the initial state.
#[derive(Clone, Debug)]
pub struct PolicyChain {
    /// Global state index of each chain state, in increasing order.
    pub states: Vec<usize>,
    pub index: HashMap<usize, usize>,
    pub p: DMatrix<f64>,
    /// Expected one-step reward.
    pub r: DVector<f64>,
}

impl PolicyChain {
    pub fn new(m: &Mdp, pol: &MemorylessPolicy) -> Result<Self> {
        pol.check(m)?;
        let mut seen = vec![false; m.num_states()];
        let mut queue = VecDeque::from([m.initial]);
        seen[m.initial] = true;
        while let Some(v) = queue.pop_front() {
            let c = m.choice(v, pol.action(v).unwrap()).unwrap();
            for t in c.support() {
                if !seen[t.target] {
                    seen[t.target] = true;
                    queue.push_back(t.target);
                }
            }
        }
        let states: Vec<usize> = (0..m.num_states()).filter(|&v| seen[v]).collect();
        Ok(Self::over(m, pol, states))
    }

    /// Chain over every state; the policy must be defined everywhere.
    pub fn full(m: &Mdp, pol: &MemorylessPolicy) -> Result<Self> {
        pol.check_everywhere(m)?;
        Ok(Self::over(m, pol, (0..m.num_states()).collect()))
    }

    fn over(m: &Mdp, pol: &MemorylessPolicy, states: Vec<usize>) -> Self {
        let index: HashMap<usize, usize> =
            states.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let k = states.len();
        let mut p = DMatrix::zeros(k, k);
        let mut r = DVector::zeros(k);
        for (i, &v) in states.iter().enumerate() {
            let c = m.choice(v, pol.action(v).unwrap()).unwrap();
            for t in c.support() {
                p[(i, index[&t.target])] += t.prob;
            }
            r[i] = c.expected_reward();
        }
        PolicyChain {
            states,
            index,
            p,
            r,
        }
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// Probability of eventually reaching `target` (local indices) from each chain state.
    pub fn reach(&self, target: &[bool]) -> Result<DVector<f64>> {
        reach_in_matrix(&self.p, target)
    }
}

pub(crate) fn reach_in_matrix(p: &DMatrix<f64>, target: &[bool]) -> Result<DVector<f64>> {
    let k = p.nrows();
    // Pre(target): states with a positive-probability path into the target.
    let mut pre = target.to_vec();
    let mut queue: VecDeque<usize> = (0..k).filter(|&i| target[i]).collect();
    while let Some(j) = queue.pop_front() {
        for i in 0..k {
            if !pre[i] && p[(i, j)] > 0.0 {
                pre[i] = true;
                queue.push_back(i);
            }
        }
    }
    let unknown: Vec<usize> = (0..k).filter(|&i| pre[i] && !target[i]).collect();
    let mut x = DVector::from_fn(k, |i, _| if target[i] { 1.0 } else { 0.0 });
    if unknown.is_empty() {
        return Ok(x);
    }
    let n = unknown.len();
    let mut a = DMatrix::<f64>::identity(n, n);
    let mut b = DVector::<f64>::zeros(n);
    for (row, &i) in unknown.iter().enumerate() {
        for (col, &j) in unknown.iter().enumerate() {
            a[(row, col)] -= p[(i, j)];
        }
        b[row] = (0..k).filter(|&j| target[j]).map(|j| p[(i, j)]).sum();
    }
    let sol = solve(a, b, "reachability")?;
    for (row, &i) in unknown.iter().enumerate() {
        x[i] = sol[row].clamp(0.0, 1.0);
    }
    Ok(x)
}

pub(crate) fn solve(a: DMatrix<f64>, b: DVector<f64>, what: &'static str) -> Result<DVector<f64>> {
    let sol = a.lu().solve(&b).ok_or(Error::Singular(what))?;
    if sol.iter().all(|v| v.is_finite()) {
        Ok(sol)
    } else {
        Err(Error::Singular(what))
    }
}

/// Reachability probabilities of `target` from every state under `pol`.
///
/// Only states that can reach the target get an unknown; the rest are fixed
/// at 0 and targets at 1.
pub fn reach_probability(m: &Mdp, pol: &MemorylessPolicy, target: &[bool]) -> Result<Vec<f64>> {
    let n = m.num_states();
    let mut p = DMatrix::zeros(n, n);
    for v in 0..n {
        if target[v] {
            continue;
        }
        let Some(a) = pol.action(v) else { continue };
        let c = m.choice(v, a).ok_or_else(|| Error::ActionNotEnabled {
            state: m.states[v].clone(),
            action: m.actions.get(a).cloned().unwrap_or_default(),
        })?;
        for t in c.support() {
            p[(v, t.target)] += t.prob;
        }
    }
    Ok(reach_in_matrix(&p, target)?.iter().copied().collect())
}

/// Gain and bias of an irreducible chain.
///
/// Solves `w_t + y = r_t + Σ_j P_tj w_j` for all `t` with `w_0 = 0`.
pub fn gain_of_chain(p: &DMatrix<f64>, r: &DVector<f64>) -> Result<(f64, DVector<f64>)> {
    let k = p.nrows();
    let mut a = DMatrix::<f64>::zeros(k + 1, k + 1);
    let mut b = DVector::<f64>::zeros(k + 1);
    for t in 0..k {
        a[(t, t)] += 1.0;
        for j in 0..k {
            a[(t, j)] -= p[(t, j)];
        }
        a[(t, k)] = 1.0;
        b[t] = r[t];
    }
    a[(k, 0)] = 1.0;
    let sol = solve(a, b, "gain")?;
    Ok((sol[k], sol.rows(0, k).into_owned()))
}

/// Discounted value of every state: `(I − γP)v = r`.
pub fn discounted_value(m: &Mdp, pol: &MemorylessPolicy, gamma: f64) -> Result<Vec<f64>> {
    if !(0.0..1.0).contains(&gamma) {
        return Err(Error::InvalidArgument(format!(
            "discount {gamma} outside (0,1)"
        )));
    }
    let chain = PolicyChain::full(m, pol)?;
    let n = chain.len();
    let a = DMatrix::<f64>::identity(n, n) - chain.p.scale(gamma);
    Ok(solve(a, chain.r, "discounted")?.iter().copied().collect())
}
