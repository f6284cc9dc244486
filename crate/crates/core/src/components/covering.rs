use std::collections::BTreeSet;

use super::{extract_asec, is_accepting, mec_decomposition_within, sccs, EndComponent};
use crate::error::{Error, Result};
use crate::product::ProductMdp;

/// Largest product the naive covering will enumerate.
pub const NAIVE_STATE_CAP: usize = 12;
const NAIVE_POLICY_CAP: u128 = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CoveringMode {
    /// Brute force over every simple end component; exponential, for cross-checks.
    Naive,
    /// One simple component extracted from each maximal accepting component.
    Efficient,
}

/// Ordered simple accepting end components `C_1, …, C_n`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct CoveringCollection {
    pub asecs: Vec<EndComponent>,
    /// Accepting component each entry was extracted from (itself in naive mode).
    pub hosts: Vec<EndComponent>,
    /// Per product state, the least `i` with the state in `asecs[i]` (zero based).
    pub cover: Vec<Option<usize>>,
}

impl CoveringCollection {
    fn from_parts(n: usize, asecs: Vec<EndComponent>, hosts: Vec<EndComponent>) -> Self {
        let mut cover = vec![None; n];
        for (i, c) in asecs.iter().enumerate() {
            for &v in &c.states {
                cover[v].get_or_insert(i);
            }
        }
        CoveringCollection {
            asecs,
            hosts,
            cover,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.asecs.is_empty()
    }

    pub fn cover_index(&self, v: usize) -> Option<usize> {
        self.cover.get(v).copied().flatten()
    }

    pub fn is_covered(&self, v: usize) -> bool {
        self.cover_index(v).is_some()
    }

    /// The action prescribed at `v` by the first component covering it.
    pub fn action_at(&self, v: usize) -> Option<usize> {
        self.asecs[self.cover_index(v)?].action_at(v)
    }

    pub fn covered_states(&self) -> BTreeSet<usize> {
        (0..self.cover.len())
            .filter(|&v| self.is_covered(v))
            .collect()
    }
}

pub fn covering_asecs(p: &ProductMdp, mode: CoveringMode) -> Result<CoveringCollection> {
    match mode {
        CoveringMode::Efficient => Ok(efficient(p)),
        CoveringMode::Naive => naive(p),
    }
}

/// For every pair `i`, the maximal end components avoiding `R'_i` that meet
/// `A'_i` are exactly the maximal accepting components for that pair.
fn efficient(p: &ProductMdp) -> CoveringCollection {
    let n = p.num_states();
    let mut hosts: Vec<EndComponent> = Vec::new();
    for (i, pair) in p.pairs.iter().enumerate() {
        let allowed: Vec<bool> = (0..n).map(|v| !pair.reject.contains(&v)).collect();
        for mut mec in mec_decomposition_within(&p.mdp, &allowed) {
            if !pair.accept.is_disjoint(&mec.states) {
                mec.witness_pair = Some(i);
                if !hosts.iter().any(|h| h.act == mec.act) {
                    hosts.push(mec);
                }
            }
        }
    }
    hosts.sort_by_key(|h| (*h.states.iter().next().unwrap(), h.witness_pair));
    let asecs = hosts
        .iter()
        .map(|h| {
            // The host's own witness pair is the one it is accepting for, so
            // extract with respect to that pair alone.
            let pair = h.witness_pair.unwrap();
            let single = [p.pairs[pair].clone()];
            let mut c = extract_asec(&p.mdp, &single, h).expect("host is accepting");
            c.witness_pair = is_accepting(&c, &p.pairs);
            c
        })
        .collect();
    CoveringCollection::from_parts(n, asecs, hosts)
}

/// Enumerates every memoryless policy; the bottom SCCs of the chains they
/// induce are exactly the simple end components.
fn naive(p: &ProductMdp) -> Result<CoveringCollection> {
    let m = &p.mdp;
    let n = m.num_states();
    if n > NAIVE_STATE_CAP {
        return Err(Error::cap(
            "naive covering states",
            n as u128,
            NAIVE_STATE_CAP as u128,
        ));
    }
    let enabled: Vec<Vec<usize>> = (0..n).map(|v| m.enabled(v).collect()).collect();
    let count: u128 = enabled.iter().map(|e| e.len() as u128).product();
    if count > NAIVE_POLICY_CAP {
        return Err(Error::cap(
            "naive covering policies",
            count,
            NAIVE_POLICY_CAP,
        ));
    }
    let mut found: BTreeSet<EndComponent> = BTreeSet::new();
    let mut digits = vec![0usize; n];
    let nodes: Vec<usize> = (0..n).collect();
    loop {
        let choice: Vec<usize> = (0..n).map(|v| enabled[v][digits[v]]).collect();
        let succ = |v: usize| -> Vec<usize> {
            m.choice(v, choice[v])
                .unwrap()
                .support()
                .map(|t| t.target)
                .collect()
        };
        for comp in sccs(&nodes, succ) {
            let members: BTreeSet<usize> = comp.iter().copied().collect();
            let closed = comp
                .iter()
                .all(|&v| succ(v).iter().all(|t| members.contains(t)));
            if closed {
                let mut ec = EndComponent::simple(comp.iter().map(|&v| (v, choice[v])));
                ec.witness_pair = is_accepting(&ec, &p.pairs);
                if ec.witness_pair.is_some() {
                    found.insert(ec);
                }
            }
        }
        if !advance(&mut digits, &enabled) {
            break;
        }
    }
    // Greedy cover in state order; `found` is sorted, so the first component
    // containing a state is canonical.
    let mut asecs: Vec<EndComponent> = Vec::new();
    for v in 0..n {
        if asecs.iter().any(|c| c.contains(v)) {
            continue;
        }
        if let Some(c) = found.iter().find(|c| c.contains(v)) {
            asecs.push(c.clone());
        }
    }
    Ok(CoveringCollection::from_parts(n, asecs.clone(), asecs))
}

fn advance(digits: &mut [usize], enabled: &[Vec<usize>]) -> bool {
    for (d, e) in digits.iter_mut().zip(enabled) {
        *d += 1;
        if *d < e.len() {
            return true;
        }
        *d = 0;
    }
    false
}
