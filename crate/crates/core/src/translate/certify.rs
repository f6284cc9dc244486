use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evaluate::{
    acceptance_on_product, enumerate_policies, limit_average, EnumerationMode, ARGMAX_TOLERANCE,
    CROSS_TOLERANCE, POLICY_CAP,
};
use crate::model::{Dra, Mdp, MemorylessPolicy, RewardMachine};
use crate::product::{build_product, build_rm_product};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CertifyOptions {
    /// Largest admissible number of reachable states of `M ⋉ R`.
    pub state_cap: usize,
    /// Largest number of policies enumerated on either side.
    pub policy_cap: u128,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        CertifyOptions {
            state_cap: 14,
            policy_cap: POLICY_CAP,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CertificationReport {
    pub certified: bool,
    pub max_gain: f64,
    pub max_acceptance: f64,
    pub rm_product_states: usize,
    #[serde(serialize_with = "crate::io::wide")]
    pub policies_enumerated: u128,
    pub gain_maximizers: usize,
    pub checks: Vec<Check>,
}

/// Checks that `r` is an optimality-preserving translation of `d` on `m`.
///
/// Every memoryless policy of `M ⋉ R` is evaluated twice: its limit-average
/// reward, and the probability that the induced run is accepted by `d`. The
/// best acceptance over all strategies is computed on `M ⊗ A`.
pub fn certify_translation(
    m: &Mdp,
    d: &Dra,
    r: &dyn RewardMachine,
    opts: CertifyOptions,
) -> Result<CertificationReport> {
    let rmp = build_rm_product(m, r, false)?;
    let n = rmp.mdp.num_states();
    if n > opts.state_cap {
        return Err(Error::cap(
            "reward machine product states",
            n as u128,
            opts.state_cap as u128,
        ));
    }
    let base = build_product(m, d, false)?;
    let mut max_acceptance = 0.0f64;
    enumerate_policies(
        &base.mdp,
        EnumerationMode::Reachable,
        opts.policy_cap,
        |p| {
            max_acceptance = max_acceptance.max(acceptance_on_product(&base, p)?);
            Ok(())
        },
    )?;

    let joint = build_product(&rmp.mdp, d, false)?;
    let lift = |p: &MemorylessPolicy| {
        MemorylessPolicy::new(joint.backmap.iter().map(|&(w, _)| p.action(w)).collect())
    };
    let mut rows: Vec<(f64, f64)> = Vec::new();
    let count = enumerate_policies(&rmp.mdp, EnumerationMode::Reachable, opts.policy_cap, |p| {
        let gain = limit_average(&rmp.mdp, p)?.gain;
        let acc = acceptance_on_product(&joint, &lift(p))?;
        rows.push((gain, acc));
        Ok(())
    })?;

    let max_gain = rows.iter().map(|r| r.0).fold(f64::NEG_INFINITY, f64::max);
    let maximizers: Vec<&(f64, f64)> = rows
        .iter()
        .filter(|r| r.0 >= max_gain - ARGMAX_TOLERANCE)
        .collect();
    let worst_maximizer = maximizers.iter().map(|r| r.1).fold(f64::INFINITY, f64::min);
    let worst_gap = rows
        .iter()
        .map(|r| r.0 - r.1)
        .fold(f64::NEG_INFINITY, f64::max);

    let checks = vec![
        Check {
            name: "max gain equals max acceptance".into(),
            pass: (max_gain - max_acceptance).abs() <= CROSS_TOLERANCE,
            detail: format!("max gain {max_gain:.9}, max acceptance {max_acceptance:.9}"),
        },
        Check {
            name: "gain maximizers maximize acceptance".into(),
            pass: worst_maximizer >= max_acceptance - CROSS_TOLERANCE,
            detail: format!(
                "{} maximizers, lowest acceptance among them {:.9}",
                maximizers.len(),
                // Adding zero turns a solver's -0 into 0.
                worst_maximizer + 0.0
            ),
        },
        Check {
            name: "gain bounded by acceptance".into(),
            pass: worst_gap <= CROSS_TOLERANCE,
            detail: format!("largest gain minus acceptance {worst_gap:.3e}"),
        },
    ];
    Ok(CertificationReport {
        certified: checks.iter().all(|c| c.pass),
        max_gain,
        max_acceptance,
        rm_product_states: n,
        policies_enumerated: count,
        gain_maximizers: maximizers.len(),
        checks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::components::CoveringMode;
    use crate::fixtures;
    use crate::model::constant_machine;
    use crate::translate::{translate_known_support, SupportSet};

    #[test]
    fn counting_machine_certifies() {
        let m = fixtures::running_mdp();
        let r = fixtures::counting_rm(&m);
        let rep = certify_translation(&m, &fixtures::running_dra(), &r, CertifyOptions::default())
            .unwrap();
        assert!(rep.certified, "{rep:?}");
        assert!((rep.max_gain - 1.0).abs() < 1e-9);
    }

    #[test]
    fn constant_zero_machine_is_rejected() {
        let m = fixtures::running_mdp();
        let d = fixtures::running_dra();
        let domain: Vec<_> = m.skeleton().domain().collect();
        let r = constant_machine(&domain, 0.0);
        let rep = certify_translation(&m, &d, &r, CertifyOptions::default()).unwrap();
        assert!(!rep.certified);
        assert_eq!(rep.max_gain, 0.0);
        assert!((rep.max_acceptance - 1.0).abs() < 1e-9);
        assert!(!rep.checks[0].pass && rep.checks[2].pass);
    }

    #[test]
    fn known_support_translation_certifies_on_counterexample() {
        let m = fixtures::prefix_independent_mdp(0.9, 0.5, (0.0, 1.0, 1.0));
        let d = fixtures::prefix_independent_dra();
        let r = translate_known_support(
            &m.skeleton(),
            &d,
            &SupportSet::of(&m),
            CoveringMode::Efficient,
        )
        .unwrap();
        let rep = certify_translation(&m, &d, &r, CertifyOptions::default()).unwrap();
        assert!(rep.certified, "{rep:?}");
    }

    #[test]
    fn state_cap_is_reported() {
        let m = fixtures::running_mdp();
        let r = fixtures::counting_rm(&m);
        let opts = CertifyOptions {
            state_cap: 2,
            ..Default::default()
        };
        let err = certify_translation(&m, &fixtures::running_dra(), &r, opts).unwrap_err();
        assert!(matches!(err, Error::CapExceeded { .. }));
    }
}
