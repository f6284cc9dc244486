use omega_rm::components::{extract_asec, is_accepting, is_end_component, CoveringMode};
use omega_rm::io::{parse_json, to_json, Instance, InstanceFile, RmFile};
use omega_rm::model::{Dra, Edge, Mdp, RewardMachine};
use omega_rm::random::{random_accepting_ec, random_dra, random_mdp, rng, MdpShape};
use omega_rm::translate::{translate_known_support, GeneralRewardMachine, SupportSet};
use omega_rm::Error;
use proptest::prelude::*;

fn instance(
    seed: u64,
    states: usize,
    actions: usize,
    dra_states: usize,
    pairs: usize,
) -> (Mdp, Dra) {
    let mut r = rng(seed);
    let shape = MdpShape {
        states,
        actions,
        ap: vec!["p".into(), "q".into()],
        max_successors: 3,
    };
    let m = random_mdp(&mut r, &shape);
    let d = random_dra(&mut r, &shape.ap, dra_states, pairs);
    (m, d)
}

/// Walks every machine state reachable over `domain` and checks the outputs.
fn check_machine(
    r: &dyn RewardMachine,
    domain: &[Edge],
    bottom: Option<usize>,
) -> Result<(), TestCaseError> {
    let mut seen = vec![r.initial()];
    let mut i = 0;
    while i < seen.len() {
        let u = seen[i];
        for &e in domain {
            let (v, x) = match r.step(u, e) {
                Ok(out) => out,
                Err(Error::CapExceeded { .. }) => return Err(TestCaseError::reject("state cap")),
                Err(err) => {
                    return Err(TestCaseError::fail(format!(
                        "no output at {u} on {e:?}: {err}"
                    )))
                }
            };
            prop_assert!(x == 0.0 || x == 1.0);
            if Some(u) == bottom {
                prop_assert_eq!((v, x), (u, 0.0));
            }
            if !seen.contains(&v) {
                seen.push(v);
            }
        }
        i += 1;
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig { failure_persistence: None, ..ProptestConfig::with_cases(64) })]

    #[test]
    fn extracted_components_are_simple_accepting_subsets(seed in any::<u64>()) {
        let (p, c) = random_accepting_ec(&mut rng(seed), 8);
        let out = extract_asec(&p.mdp, &p.pairs, &c).unwrap();
        prop_assert!(out.is_simple());
        prop_assert!(is_accepting(&out, &p.pairs).is_some());
        prop_assert!(is_end_component(&p.mdp, &out));
        prop_assert!(out.is_subset_of(&c));
    }

    #[test]
    fn known_support_machine_is_total_binary_and_absorbing(
        seed in any::<u64>(), ns in 1usize..5, na in 1usize..3, nq in 1usize..4, np in 0usize..3,
    ) {
        let (m, d) = instance(seed, ns, na, nq, np);
        let r = translate_known_support(&m.skeleton(), &d, &SupportSet::of(&m), CoveringMode::Efficient).unwrap();
        let domain: Vec<Edge> = m.skeleton().domain().collect();
        let bottom = r.state_index(omega_rm::translate::BOTTOM);
        check_machine(&r, &domain, bottom)?;
    }

    #[test]
    fn general_machine_is_total_binary_and_absorbing(
        seed in any::<u64>(), ns in 1usize..4, na in 1usize..3, nq in 1usize..3,
    ) {
        let (m, d) = instance(seed, ns, na, nq, 1);
        let r = GeneralRewardMachine::new(m.skeleton(), d, CoveringMode::Efficient, 5000);
        let domain: Vec<Edge> = m.support_edges();
        check_machine(&r, &domain, Some(GeneralRewardMachine::BOTTOM_ID))?;
    }

    #[test]
    fn instance_files_round_trip(seed in any::<u64>(), ns in 1usize..6, na in 1usize..4, nq in 1usize..4) {
        let (m, d) = instance(seed, ns, na, nq, 2);
        let inst = Instance { mdp: m, dra: d, declared_support: None };
        let text = to_json(&InstanceFile::from_instance(&inst)).unwrap();
        let back = parse_json::<InstanceFile>(&text).unwrap().to_instance().unwrap();
        prop_assert_eq!(back, inst);
    }

    #[test]
    fn machine_files_round_trip(seed in any::<u64>(), ns in 1usize..5, na in 1usize..3, nq in 1usize..4) {
        let (m, d) = instance(seed, ns, na, nq, 1);
        let sk = m.skeleton();
        let r = translate_known_support(&sk, &d, &SupportSet::of(&m), CoveringMode::Efficient).unwrap();
        let text = to_json(&RmFile::from_machine(&r, &sk, None)).unwrap();
        let back = parse_json::<RmFile>(&text).unwrap().to_machine(&sk).unwrap();
        prop_assert_eq!(back, r);
    }
}
