use serde::Serialize;

use super::average::limit_average;
use super::ARGMAX_TOLERANCE;
use crate::error::{Error, Result};
use crate::model::{Mdp, MemorylessPolicy};

/// Default bound on the number of enumerated policies.
pub const POLICY_CAP: u128 = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EnumerationMode {
    /// Every combination of enabled actions over all states.
    Full,
    /// Only states reachable under the policy being built get an action, so
    /// policies that differ on unreachable states are not repeated.
    Reachable,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OracleResult {
    pub j_star: f64,
    pub optimal_set: Vec<MemorylessPolicy>,
    #[serde(serialize_with = "crate::io::wide")]
    pub enumerated_count: u128,
}

/// Calls `f` on every deterministic memoryless policy and returns how many were visited.
pub fn enumerate_policies(
    m: &Mdp,
    mode: EnumerationMode,
    cap: u128,
    mut f: impl FnMut(&MemorylessPolicy) -> Result<()>,
) -> Result<u128> {
    let n = m.num_states();
    let enabled: Vec<Vec<usize>> = (0..n).map(|v| m.enabled(v).collect()).collect();
    match mode {
        EnumerationMode::Full => {
            let total: u128 = enabled
                .iter()
                .try_fold(1u128, |acc, e| acc.checked_mul(e.len() as u128))
                .unwrap_or(u128::MAX);
            if total > cap {
                return Err(Error::cap("policy enumeration", total, cap));
            }
            if enabled.iter().any(Vec::is_empty) {
                return Err(Error::Invalid("state without enabled action".into()));
            }
            let mut digits = vec![0usize; n];
            let mut pol = MemorylessPolicy::total(enabled.iter().map(|e| e[0]).collect());
            let mut count = 0;
            loop {
                f(&pol)?;
                count += 1;
                let mut carried = true;
                for v in 0..n {
                    digits[v] += 1;
                    if digits[v] < enabled[v].len() {
                        pol.choice[v] = Some(enabled[v][digits[v]]);
                        carried = false;
                        break;
                    }
                    digits[v] = 0;
                    pol.choice[v] = Some(enabled[v][0]);
                }
                if carried {
                    return Ok(count);
                }
            }
        }
        EnumerationMode::Reachable => {
            let mut walk = Walk {
                m,
                enabled: &enabled,
                pol: MemorylessPolicy::new(vec![None; n]),
                order: vec![m.initial],
                seen: {
                    let mut s = vec![false; n];
                    s[m.initial] = true;
                    s
                },
                count: 0,
                cap,
            };
            walk.run(0, &mut f)?;
            Ok(walk.count)
        }
    }
}

struct Walk<'a> {
    m: &'a Mdp,
    enabled: &'a [Vec<usize>],
    pol: MemorylessPolicy,
    order: Vec<usize>,
    seen: Vec<bool>,
    count: u128,
    cap: u128,
}

impl Walk<'_> {
    fn run(
        &mut self,
        pos: usize,
        f: &mut dyn FnMut(&MemorylessPolicy) -> Result<()>,
    ) -> Result<()> {
        if pos == self.order.len() {
            self.count += 1;
            if self.count > self.cap {
                return Err(Error::cap("policy enumeration", self.count, self.cap));
            }
            return f(&self.pol);
        }
        let v = self.order[pos];
        let enabled = self.enabled;
        if enabled[v].is_empty() {
            return Err(Error::Invalid(format!(
                "no enabled action at {}",
                self.m.states[v]
            )));
        }
        for &a in &enabled[v] {
            self.pol.choice[v] = Some(a);
            let mark = self.order.len();
            for t in self.m.choice(v, a).unwrap().support() {
                if !self.seen[t.target] {
                    self.seen[t.target] = true;
                    self.order.push(t.target);
                }
            }
            self.run(pos + 1, f)?;
            for w in self.order.drain(mark..) {
                self.seen[w] = false;
            }
        }
        self.pol.choice[v] = None;
        Ok(())
    }
}

/// Optimal limit-average reward and every policy attaining it, by enumeration
/// of policies restricted to the states they reach.
pub fn brute_force_optimal_average(m: &Mdp) -> Result<OracleResult> {
    brute_force_with(m, EnumerationMode::Reachable, POLICY_CAP)
}

pub fn brute_force_with(m: &Mdp, mode: EnumerationMode, cap: u128) -> Result<OracleResult> {
    let mut best = f64::NEG_INFINITY;
    let mut set: Vec<(MemorylessPolicy, f64)> = Vec::new();
    let count = enumerate_policies(m, mode, cap, |p| {
        let g = limit_average(m, p)?.gain;
        if g > best + ARGMAX_TOLERANCE {
            best = g;
            set.retain(|(_, h)| *h >= best - ARGMAX_TOLERANCE);
        }
        if g >= best - ARGMAX_TOLERANCE {
            best = best.max(g);
            set.push((p.clone(), g));
        }
        Ok(())
    })?;
    set.retain(|(_, h)| *h >= best - ARGMAX_TOLERANCE);
    Ok(OracleResult {
        j_star: best,
        optimal_set: set.into_iter().map(|(p, _)| p).collect(),
        enumerated_count: count,
    })
}

/// Value iteration to sup-norm residual `ε(1−γ)/(2γ)` followed by the greedy
/// policy, which is then `ε`-optimal. Ties go to the lowest action index.
pub fn optimal_discounted(m: &Mdp, gamma: f64, eps: f64) -> Result<MemorylessPolicy> {
    if !(gamma > 0.0 && gamma < 1.0) || eps <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "discount {gamma}, accuracy {eps}"
        )));
    }
    let n = m.num_states();
    let threshold = eps * (1.0 - gamma) / (2.0 * gamma);
    let q = |v: &[f64], c: &crate::model::Choice| -> f64 {
        c.support()
            .map(|t| t.prob * (t.reward + gamma * v[t.target]))
            .sum()
    };
    let mut v = vec![0.0; n];
    loop {
        let next: Vec<f64> = (0..n)
            .map(|s| {
                m.choices[s]
                    .iter()
                    .map(|c| q(&v, c))
                    .fold(f64::NEG_INFINITY, f64::max)
            })
            .collect();
        let residual = next
            .iter()
            .zip(&v)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        v = next;
        if residual <= threshold {
            break;
        }
    }
    let choice = (0..n)
        .map(|s| {
            let mut best: Option<(usize, f64)> = None;
            for c in &m.choices[s] {
                let val = q(&v, c);
                if best.is_none_or(|(_, b)| val > b) {
                    best = Some((c.action, val));
                }
            }
            best.map(|(a, _)| a)
        })
        .collect();
    Ok(MemorylessPolicy::new(choice))
}
