//! Small named instances used throughout the tests and examples.

use crate::model::{Dra, Edge, Mdp, MdpBuilder, RabinPair, TableRewardMachine};
use crate::product::ProductMdp;

/// Two states; `a` loops on `s0`, `b` moves between `s0` and `s1`.
/// Only `(s0, b, s1)` carries the label `{p}`.
pub fn running_mdp() -> Mdp {
    MdpBuilder::new(&["p"])
        .initial("s0")
        .transition("s0", "a", "s0", 1.0, &[])
        .transition("s0", "b", "s1", 1.0, &["p"])
        .transition("s1", "b", "s0", 1.0, &[])
        .build()
        .expect("fixture is well formed")
}

/// Accepts label sequences containing `{p}` exactly once.
pub fn running_dra() -> Dra {
    let mut d = Dra::empty(&["p"], &["q0", "q1", "q2"], 0);
    d.set(0, &[], 0).unwrap();
    d.set(0, &["p"], 1).unwrap();
    d.set(1, &[], 1).unwrap();
    d.set(1, &["p"], 2).unwrap();
    d.set_all(2, 2);
    d.pairs.push(RabinPair::new([1], []));
    d
}

/// The hand-written three-state machine for the running example: reward 1
/// for looping on `s0` after exactly one visit to `s1`.
///
/// Transitions outside the support keep the machine state with reward 0.
pub fn counting_rm(m: &Mdp) -> TableRewardMachine {
    let domain: Vec<Edge> = m.skeleton().domain().collect();
    let (a, b) = (0, 1);
    let mut r = TableRewardMachine::new(&["u0", "u1", "u2"], 0);
    for u in 0..3 {
        r.set_all(u, &domain, u, 0.0);
    }
    r.set(0, Edge::new(0, b, 1), 1, 0.0);
    r.set(1, Edge::new(0, a, 0), 1, 1.0);
    r.set(1, Edge::new(0, b, 1), 2, 0.0);
    r
}

/// Four states: from `s0`, `a` commits to `s1` (prob `p1`) or `s2`, while `b`
/// stays (prob `p2`) or detours through `s3`. `(s1,a,s1)` and `(s3,b,s0)` are
/// labelled `{c}`. Rewards follow `rewards = (R(s0,b,s0), R(s0,b,s3), R(s3,b,s0))`.
pub fn prefix_independent_mdp(p1: f64, p2: f64, rewards: (f64, f64, f64)) -> Mdp {
    MdpBuilder::new(&["c"])
        .initial("s0")
        .transition("s0", "a", "s1", p1, &[])
        .transition("s0", "a", "s2", 1.0 - p1, &[])
        .rewarded("s0", "b", "s0", p2, &[], rewards.0)
        .rewarded("s0", "b", "s3", 1.0 - p2, &[], rewards.1)
        .transition("s1", "a", "s1", 1.0, &["c"])
        .transition("s2", "a", "s2", 1.0, &[])
        .rewarded("s3", "b", "s0", 1.0, &["c"], rewards.2)
        .build()
        .expect("fixture is well formed")
}

/// Accepts words with infinitely many `{c}` letters.
pub fn prefix_independent_dra() -> Dra {
    let mut d = Dra::empty(&["c"], &["q0", "q1"], 0);
    d.set(0, &["c"], 1).unwrap();
    d.set(0, &[], 0).unwrap();
    d.set(1, &["c"], 1).unwrap();
    d.set(1, &[], 0).unwrap();
    d.pairs.push(RabinPair::new([1], []));
    d
}

/// A product whose single maximal accepting component still contains a
/// non-accepting self-loop: `b` loops on `s0`, `a` alternates `s0`/`s1`,
/// and the goal is to visit `s1` infinitely often.
pub fn self_loop_trap_product() -> ProductMdp {
    let m = MdpBuilder::new(&[] as &[&str])
        .initial("s0")
        .transition("s0", "a", "s1", 1.0, &[])
        .transition("s0", "b", "s0", 1.0, &[])
        .transition("s1", "a", "s0", 1.0, &[])
        .build()
        .expect("fixture is well formed");
    ProductMdp::from_parts(m, vec![RabinPair::new([1], [])])
}

/// Two reachable gain classes: `a` earns 1 once then 0.5 forever, `b` reaches
/// a 0.6 loop after a geometric delay. Limit-average optimal is `b`, which a
/// discounted planner only prefers once the discount is close enough to 1.
pub fn multichain_mdp() -> Mdp {
    MdpBuilder::new(&[] as &[&str])
        .initial("s0")
        .rewarded("s0", "a", "s1", 1.0, &[], 1.0)
        .rewarded("s0", "b", "s2", 0.9, &[], 0.0)
        .rewarded("s0", "b", "s0", 0.1, &[], 0.0)
        .rewarded("s1", "a", "s1", 1.0, &[], 0.5)
        .rewarded("s2", "a", "s2", 1.0, &[], 0.6)
        .build()
        .expect("fixture is well formed")
}
