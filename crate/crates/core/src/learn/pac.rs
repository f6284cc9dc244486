use std::collections::HashMap;

use serde::Serialize;

use super::{delta_for_accuracy, estimate_product, required_samples, ProductEstimate, Simulator};
use crate::error::{Error, Result};
use crate::evaluate::{
    brute_force_optimal_average, discounted_value, limit_average, optimal_discounted,
};
use crate::model::{FiniteMemoryPolicy, Mdp, MemorylessPolicy, RewardMachine};
use crate::product::{build_rm_product, lift_policy, RmProductMdp};

/// Gains within this distance of the optimum count as optimal.
pub const OPTIMALITY_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Debug)]
pub struct DiscountedOutcome {
    pub estimate: ProductEstimate,
    /// Memoryless policy on the estimated product.
    pub policy: MemorylessPolicy,
    pub samples_per_pair: u128,
}

/// Model-based discounted solver: estimate `M ⋉ R` to entrywise accuracy
/// `ε(1−γ)²/(4|S×U|)` with confidence `1−δ`, then plan on the estimate with
/// slack `ε/2`.
pub fn discounted_pac(
    sim: &mut Simulator,
    r: &dyn RewardMachine,
    gamma: f64,
    eps: f64,
    delta: f64,
) -> Result<DiscountedOutcome> {
    if !(gamma > 0.0 && gamma < 1.0) || !(eps > 0.0 && eps < 1.0) || !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "gamma {gamma}, eps {eps}, delta {delta}"
        )));
    }
    let sk = sim.skeleton();
    let n_states = sk.num_states() * r.num_states().max(1);
    let alpha = eps * (1.0 - gamma).powi(2) / (4.0 * n_states as f64);
    let n = required_samples(alpha, delta, 1.0, n_states, sk.actions.len());
    let estimate = estimate_product(sim, r, n)?;
    let policy = optimal_discounted(&estimate.product.mdp, gamma, eps / 2.0)?;
    Ok(DiscountedOutcome {
        estimate,
        policy,
        samples_per_pair: n,
    })
}

/// Carries a policy between two products over the same base and machine by
/// matching `(s, u)` coordinates. Unmatched states get their first enabled action.
pub fn transfer_policy(
    p: &MemorylessPolicy,
    from: &RmProductMdp,
    to: &RmProductMdp,
) -> MemorylessPolicy {
    let index: HashMap<(usize, usize), usize> = from
        .backmap
        .iter()
        .enumerate()
        .map(|(i, &c)| (c, i))
        .collect();
    let choice = to
        .backmap
        .iter()
        .enumerate()
        .map(|(v, key)| {
            index
                .get(key)
                .and_then(|&w| p.action(w))
                .filter(|&a| to.mdp.is_enabled(v, a))
                .or_else(|| to.mdp.enabled(v).next())
        })
        .collect();
    MemorylessPolicy::new(choice)
}

#[derive(Clone, Debug, Serialize)]
pub struct Iteration {
    pub k: usize,
    pub gamma: f64,
    pub eps: f64,
    pub delta: f64,
    #[serde(serialize_with = "crate::io::wide")]
    pub samples_per_pair: u128,
    #[serde(serialize_with = "crate::io::wide")]
    pub total_samples: u128,
    pub policy: MemorylessPolicy,
    pub gain: f64,
    pub gain_optimal: bool,
    /// Shortfall of the discounted value at the initial state against the
    /// exact discounted optimum.
    pub discounted_shortfall: f64,
    pub eps_optimal: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ScheduleReport {
    pub j_star: f64,
    pub iterations: Vec<Iteration>,
    /// Least `k` from which every policy is gain-optimal, if any.
    pub k0: Option<usize>,
    pub discounted_misses: usize,
}

/// Runs the discount schedule `γ_k = 1 − 1/k`, `ε_k = 1/k`, `δ_k = 1/k²` for
/// `k = 2..=k_max`, scoring each policy on the hidden model.
pub fn run_algorithm1(
    sim: &mut Simulator,
    r: &dyn RewardMachine,
    k_max: usize,
) -> Result<ScheduleReport> {
    if k_max < 2 {
        return Err(Error::InvalidArgument(format!("k_max {k_max} < 2")));
    }
    let hidden = build_rm_product(sim.hidden(), r, false)?;
    let j_star = brute_force_optimal_average(&hidden.mdp)?.j_star;
    let mut iterations = Vec::new();
    for k in 2..=k_max {
        let kf = k as f64;
        let (gamma, eps, delta) = (1.0 - 1.0 / kf, 1.0 / kf, 1.0 / (kf * kf));
        let out = discounted_pac(sim, r, gamma, eps, delta)?;
        let policy = transfer_policy(&out.policy, &out.estimate.product, &hidden);
        let gain = limit_average(&hidden.mdp, &policy)?.gain;
        let shortfall = discounted_shortfall(&hidden.mdp, &policy, gamma)?;
        iterations.push(Iteration {
            k,
            gamma,
            eps,
            delta,
            samples_per_pair: out.samples_per_pair,
            total_samples: sim.total_samples(),
            policy,
            gain,
            gain_optimal: gain >= j_star - OPTIMALITY_TOLERANCE,
            discounted_shortfall: shortfall,
            eps_optimal: shortfall <= eps,
        });
    }
    let k0 = iterations
        .iter()
        .rposition(|it| !it.gain_optimal)
        .map_or(Some(2), |i| iterations.get(i + 1).map(|it| it.k));
    let discounted_misses = iterations.iter().filter(|it| !it.eps_optimal).count();
    Ok(ScheduleReport {
        j_star,
        iterations,
        k0,
        discounted_misses,
    })
}

fn discounted_shortfall(m: &Mdp, p: &MemorylessPolicy, gamma: f64) -> Result<f64> {
    let best = optimal_discounted(m, gamma, 1e-9)?;
    let v_best = discounted_value(m, &best, gamma)?[m.initial];
    let v = discounted_value(m, p, gamma)?[m.initial];
    Ok((v_best - v).max(0.0))
}

#[derive(Clone, Debug)]
pub struct OmegaPacOutcome {
    /// Policy on the base model whose memory is the machine state.
    pub policy: FiniteMemoryPolicy,
    pub product_policy: MemorylessPolicy,
    pub estimate: ProductEstimate,
    pub accuracy: f64,
    pub samples_per_pair: u128,
    pub total_samples: u128,
    /// Optimal gain of the estimate.
    pub estimated_value: f64,
}

/// Returns, with probability at least `1 − eps`, a finite-memory policy whose
/// limit-average reward is within `delta` of optimal. `beta` must bound both
/// the smallest transition probability and the inverse mixing time of `M ⋉ R`.
pub fn omega_pac(
    sim: &mut Simulator,
    r: &dyn RewardMachine,
    beta: f64,
    eps: f64,
    delta: f64,
) -> Result<OmegaPacOutcome> {
    if !(beta > 0.0 && beta <= 1.0) || !(eps > 0.0 && eps < 2.0) || delta <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "beta {beta}, eps {eps}, delta {delta}"
        )));
    }
    let sk = sim.skeleton();
    let n_states = sk.num_states() * r.num_states().max(1);
    let accuracy = delta_for_accuracy(delta, n_states, beta);
    let n = required_samples(accuracy, eps, beta, n_states, sk.actions.len());
    let estimate = estimate_product(sim, r, n)?;
    let best = brute_force_optimal_average(&estimate.product.mdp)?;
    let product_policy = best
        .optimal_set
        .into_iter()
        .next()
        .ok_or_else(|| Error::Invalid("estimate has no policy".into()))?;
    let policy = lift_policy(&product_policy, &estimate.product)?;
    Ok(OmegaPacOutcome {
        policy,
        product_policy,
        estimate,
        accuracy,
        samples_per_pair: n,
        total_samples: sim.total_samples(),
        estimated_value: best.j_star,
    })
}

/// Limit-average reward of a policy whose memory is the machine state,
/// evaluated on the hidden model.
pub fn gain_on_hidden(
    hidden: &Mdp,
    r: &dyn RewardMachine,
    p: &MemorylessPolicy,
    from: &RmProductMdp,
) -> Result<f64> {
    let exact = build_rm_product(hidden, r, false)?;
    let carried = transfer_policy(p, from, &exact);
    Ok(limit_average(&exact.mdp, &carried)?.gain)
}
