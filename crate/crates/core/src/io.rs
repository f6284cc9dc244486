//! JSON file formats for instances, reward machines, policies and reports.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    letter_from_names, letter_names, validate_dra, validate_mdp, Choice, Dra, Edge,
    FiniteMemoryPolicy, Mdp, MemorylessPolicy, PolicyTable, RabinPair, Skeleton,
    TableRewardMachine, Transition,
};
use crate::translate::{Check, SupportSet};

pub const FORMAT_VERSION: &str = "omega-rm/1";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub version: String,
    pub ap: Vec<String>,
    pub mdp: MdpSection,
    pub dra: DraSection,
    /// Transitions declared to have positive probability; defaults to the
    /// positive entries of `mdp.transitions`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub support: Option<Vec<EdgeEntry>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MdpSection {
    pub states: Vec<String>,
    pub initial: String,
    pub actions: Vec<String>,
    pub transitions: Vec<TransitionEntry>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransitionEntry {
    pub from: String,
    pub action: String,
    pub to: String,
    pub prob: f64,
    #[serde(default)]
    pub labels: Vec<String>,
    #[serde(default, skip_serializing_if = "is_zero")]
    pub reward: f64,
}

fn is_zero(x: &f64) -> bool {
    *x == 0.0
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeEntry {
    pub from: String,
    pub action: String,
    pub to: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DraSection {
    pub states: Vec<String>,
    pub initial: String,
    pub delta: Vec<DeltaEntry>,
    pub pairs: Vec<PairEntry>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeltaEntry {
    pub from: String,
    pub letter: Vec<String>,
    pub to: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairEntry {
    pub acc: Vec<String>,
    pub rej: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RmFile {
    pub version: String,
    pub states: Vec<String>,
    pub initial: String,
    /// Transitions the rules are total over; all syntactic transitions when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<Vec<EdgeEntry>>,
    pub rules: Vec<RuleEntry>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RuleEntry {
    pub u: String,
    pub from: String,
    pub action: String,
    pub to: String,
    pub u_next: String,
    pub reward: f64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolicyFile {
    pub version: String,
    /// `memoryless` or `finite-memory`.
    pub kind: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub memory: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_memory: Option<String>,
    pub entries: Vec<PolicyEntry>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub updates: Vec<UpdateEntry>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolicyEntry {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub memory: Option<String>,
    pub state: String,
    pub action: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UpdateEntry {
    pub memory: String,
    pub from: String,
    pub action: String,
    pub to: String,
    pub next: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportFile {
    pub version: String,
    pub command: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub results: serde_json::Value,
    #[serde(default)]
    pub checks: Vec<Check>,
    #[serde(default)]
    pub timings: BTreeMap<String, f64>,
}

/// Writes a counter as a JSON number when it fits in `u64`, else as a decimal string.
pub fn wide<S: serde::Serializer>(x: &u128, s: S) -> std::result::Result<S::Ok, S::Error> {
    match u64::try_from(*x) {
        Ok(small) => s.serialize_u64(small),
        Err(_) => s.serialize_str(&x.to_string()),
    }
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path)?;
    parse_json(&text)
}

pub fn parse_json<T: DeserializeOwned>(text: &str) -> Result<T> {
    Ok(serde_json::from_str(text)?)
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

fn lookup(names: &[String], name: &str, what: &str) -> Result<usize> {
    names
        .iter()
        .position(|n| n == name)
        .ok_or_else(|| Error::Invalid(format!("undeclared {what} `{name}`")))
}

fn unique(names: &[String], what: &str) -> Result<()> {
    for (i, n) in names.iter().enumerate() {
        if names[..i].contains(n) {
            return Err(Error::Invalid(format!("duplicate {what} `{n}`")));
        }
    }
    Ok(())
}

fn letter(ap: &[String], props: &[String]) -> Result<u32> {
    let refs: Vec<&str> = props.iter().map(String::as_str).collect();
    letter_from_names(ap, &refs)
}

/// A loaded and validated instance.
#[derive(Clone, Debug, PartialEq)]
pub struct Instance {
    pub mdp: Mdp,
    pub dra: Dra,
    pub declared_support: Option<SupportSet>,
}

impl Instance {
    /// Declared support if present, else the positive transitions.
    pub fn support(&self) -> SupportSet {
        self.declared_support
            .clone()
            .unwrap_or_else(|| SupportSet::of(&self.mdp))
    }
}

impl InstanceFile {
    pub fn to_instance(&self) -> Result<Instance> {
        if self.version != FORMAT_VERSION {
            return Err(Error::Invalid(format!(
                "unsupported version `{}`",
                self.version
            )));
        }
        unique(&self.ap, "proposition")?;
        let ms = &self.mdp;
        unique(&ms.states, "MDP state")?;
        unique(&ms.actions, "action")?;
        let n = ms.states.len();
        let mut rows: BTreeMap<(usize, usize), BTreeMap<usize, Transition>> = BTreeMap::new();
        for t in &ms.transitions {
            let (s, a, to) = (
                lookup(&ms.states, &t.from, "MDP state")?,
                lookup(&ms.actions, &t.action, "action")?,
                lookup(&ms.states, &t.to, "MDP state")?,
            );
            let entry = Transition {
                target: to,
                prob: t.prob,
                label: letter(&self.ap, &t.labels)?,
                reward: t.reward,
            };
            if rows.entry((s, a)).or_default().insert(to, entry).is_some() {
                return Err(Error::Invalid(format!(
                    "transition ({}, {}, {}) listed twice",
                    t.from, t.action, t.to
                )));
            }
        }
        let mut choices: Vec<Vec<Choice>> = vec![Vec::new(); n];
        for ((s, a), row) in rows {
            choices[s].push(Choice {
                action: a,
                transitions: row.into_values().collect(),
            });
        }
        let mdp = Mdp {
            ap: self.ap.clone(),
            states: ms.states.clone(),
            actions: ms.actions.clone(),
            initial: lookup(&ms.states, &ms.initial, "MDP state")?,
            choices,
        };
        let report = validate_mdp(&mdp);
        if !report.is_valid() {
            return Err(Error::Invalid(format!(
                "mdp: {}",
                report.to_string().trim_end()
            )));
        }

        let ds = &self.dra;
        unique(&ds.states, "automaton state")?;
        let mut dra = Dra::empty(
            &self.ap,
            &ds.states,
            lookup(&ds.states, &ds.initial, "automaton state")?,
        );
        for e in &ds.delta {
            let q = lookup(&ds.states, &e.from, "automaton state")?;
            let l = letter(&self.ap, &e.letter)? as usize;
            let to = lookup(&ds.states, &e.to, "automaton state")?;
            if dra.delta[q][l].replace(to).is_some_and(|old| old != to) {
                return Err(Error::Invalid(format!(
                    "automaton is not deterministic at {}",
                    e.from
                )));
            }
        }
        for p in &ds.pairs {
            let set = |names: &[String]| -> Result<Vec<usize>> {
                names
                    .iter()
                    .map(|q| lookup(&ds.states, q, "automaton state"))
                    .collect()
            };
            dra.pairs.push(RabinPair::new(set(&p.acc)?, set(&p.rej)?));
        }
        let report = validate_dra(&dra, &self.ap);
        if !report.is_valid() {
            return Err(Error::Invalid(format!(
                "dra: {}",
                report.to_string().trim_end()
            )));
        }

        let declared_support = match &self.support {
            None => None,
            Some(edges) => Some(
                edges
                    .iter()
                    .map(|e| {
                        Ok(Edge::new(
                            lookup(&ms.states, &e.from, "MDP state")?,
                            lookup(&ms.actions, &e.action, "action")?,
                            lookup(&ms.states, &e.to, "MDP state")?,
                        ))
                    })
                    .collect::<Result<SupportSet>>()?,
            ),
        };
        Ok(Instance {
            mdp,
            dra,
            declared_support,
        })
    }

    pub fn from_instance(inst: &Instance) -> Self {
        let (m, d) = (&inst.mdp, &inst.dra);
        let mut transitions = Vec::new();
        for (s, row) in m.choices.iter().enumerate() {
            for c in row {
                for t in &c.transitions {
                    transitions.push(TransitionEntry {
                        from: m.states[s].clone(),
                        action: m.actions[c.action].clone(),
                        to: m.states[t.target].clone(),
                        prob: t.prob,
                        labels: letter_names(&m.ap, t.label),
                        reward: t.reward,
                    });
                }
            }
        }
        let mut delta = Vec::new();
        for (q, row) in d.delta.iter().enumerate() {
            for (l, to) in row.iter().enumerate() {
                if let Some(to) = to {
                    delta.push(DeltaEntry {
                        from: d.states[q].clone(),
                        letter: letter_names(&d.ap, l as u32),
                        to: d.states[*to].clone(),
                    });
                }
            }
        }
        let names = |set: &std::collections::BTreeSet<usize>| {
            set.iter().map(|&q| d.states[q].clone()).collect()
        };
        InstanceFile {
            version: FORMAT_VERSION.into(),
            ap: m.ap.clone(),
            mdp: MdpSection {
                states: m.states.clone(),
                initial: m.states[m.initial].clone(),
                actions: m.actions.clone(),
                transitions,
            },
            dra: DraSection {
                states: d.states.clone(),
                initial: d.states[d.initial].clone(),
                delta,
                pairs: d
                    .pairs
                    .iter()
                    .map(|p| PairEntry {
                        acc: names(&p.accept),
                        rej: names(&p.reject),
                    })
                    .collect(),
            },
            support: inst.declared_support.as_ref().map(|s| {
                s.edges
                    .iter()
                    .map(|&e| EdgeEntry {
                        from: m.states[e.from].clone(),
                        action: m.actions[e.action].clone(),
                        to: m.states[e.to].clone(),
                    })
                    .collect()
            }),
        }
    }
}

fn edge_entry(sk: &Skeleton, e: Edge) -> EdgeEntry {
    EdgeEntry {
        from: sk.states[e.from].clone(),
        action: sk.actions[e.action].clone(),
        to: sk.states[e.to].clone(),
    }
}

fn resolve_edge(sk: &Skeleton, e: &EdgeEntry) -> Result<Edge> {
    let edge = Edge::new(
        lookup(&sk.states, &e.from, "MDP state")?,
        lookup(&sk.actions, &e.action, "action")?,
        lookup(&sk.states, &e.to, "MDP state")?,
    );
    if !sk.in_domain(edge) {
        return Err(Error::TransitionNotInDomain(sk.edge_name(edge)));
    }
    Ok(edge)
}

pub fn load_instance(path: &Path) -> Result<Instance> {
    read_json::<InstanceFile>(path)?.to_instance()
}

impl RmFile {
    pub fn from_machine(r: &TableRewardMachine, sk: &Skeleton, domain: Option<&[Edge]>) -> Self {
        let rules = r
            .sorted_rules()
            .into_iter()
            .map(|((u, e), (next, reward))| RuleEntry {
                u: r.states[u].clone(),
                from: sk.states[e.from].clone(),
                action: sk.actions[e.action].clone(),
                to: sk.states[e.to].clone(),
                u_next: r.states[next].clone(),
                reward,
            })
            .collect();
        RmFile {
            version: FORMAT_VERSION.into(),
            states: r.states.clone(),
            initial: r.states[r.initial].clone(),
            domain: domain.map(|d| d.iter().map(|&e| edge_entry(sk, e)).collect()),
            rules,
        }
    }

    /// Resolves names against `sk` and checks the rules cover its whole domain.
    pub fn to_machine(&self, sk: &Skeleton) -> Result<TableRewardMachine> {
        if self.version != FORMAT_VERSION {
            return Err(Error::Invalid(format!(
                "unsupported version `{}`",
                self.version
            )));
        }
        unique(&self.states, "machine state")?;
        let mut r = TableRewardMachine::new(
            &self.states,
            lookup(&self.states, &self.initial, "machine state")?,
        );
        for rule in &self.rules {
            let e = resolve_edge(
                sk,
                &EdgeEntry {
                    from: rule.from.clone(),
                    action: rule.action.clone(),
                    to: rule.to.clone(),
                },
            )?;
            let u = lookup(&self.states, &rule.u, "machine state")?;
            let next = lookup(&self.states, &rule.u_next, "machine state")?;
            r.set(u, e, next, rule.reward);
        }
        let domain: Vec<Edge> = match &self.domain {
            None => sk.domain().collect(),
            Some(list) => list
                .iter()
                .map(|e| resolve_edge(sk, e))
                .collect::<Result<_>>()?,
        };
        if let Some((u, e)) = r.first_gap(&domain) {
            return Err(Error::DomainGap(format!(
                "{} in machine state {}",
                sk.edge_name(e),
                r.states[u]
            )));
        }
        Ok(r)
    }
}

impl PolicyFile {
    pub fn from_policy(p: &PolicyTable, m: &Mdp) -> Self {
        let mut file = PolicyFile {
            version: FORMAT_VERSION.into(),
            kind: p.kind().into(),
            memory: Vec::new(),
            initial_memory: None,
            entries: Vec::new(),
            updates: Vec::new(),
        };
        match p {
            PolicyTable::Memoryless(p) => {
                for (s, a) in p.choice.iter().enumerate() {
                    if let Some(a) = a {
                        file.entries.push(PolicyEntry {
                            memory: None,
                            state: m.states[s].clone(),
                            action: m.actions[*a].clone(),
                        });
                    }
                }
            }
            PolicyTable::FiniteMemory(f) => {
                file.memory = f.memory.clone();
                file.initial_memory = Some(f.memory[f.initial_memory].clone());
                let actions: BTreeMap<_, _> = f.action.iter().collect();
                for (&(mem, s), &a) in actions {
                    file.entries.push(PolicyEntry {
                        memory: Some(f.memory[mem].clone()),
                        state: m.states[s].clone(),
                        action: m.actions[a].clone(),
                    });
                }
                let updates: BTreeMap<_, _> = f.update.iter().collect();
                for (&(mem, e), &next) in updates {
                    file.updates.push(UpdateEntry {
                        memory: f.memory[mem].clone(),
                        from: m.states[e.from].clone(),
                        action: m.actions[e.action].clone(),
                        to: m.states[e.to].clone(),
                        next: f.memory[next].clone(),
                    });
                }
            }
        }
        file
    }

    pub fn to_policy(&self, m: &Mdp) -> Result<PolicyTable> {
        if self.version != FORMAT_VERSION {
            return Err(Error::Invalid(format!(
                "unsupported version `{}`",
                self.version
            )));
        }
        let state = |n: &str| lookup(&m.states, n, "MDP state");
        let action = |n: &str| lookup(&m.actions, n, "action");
        match self.kind.as_str() {
            "memoryless" => {
                let mut choice = vec![None; m.num_states()];
                for e in &self.entries {
                    let s = state(&e.state)?;
                    if choice[s].replace(action(&e.action)?).is_some() {
                        return Err(Error::Invalid(format!(
                            "two entries for state `{}`",
                            e.state
                        )));
                    }
                }
                Ok(MemorylessPolicy::new(choice).into())
            }
            "finite-memory" => {
                unique(&self.memory, "memory state")?;
                let mem = |n: &str| lookup(&self.memory, n, "memory state");
                let initial = self.initial_memory.as_deref().ok_or_else(|| {
                    Error::Invalid("finite-memory policy needs `initial_memory`".into())
                })?;
                let mut f = FiniteMemoryPolicy {
                    memory: self.memory.clone(),
                    initial_memory: mem(initial)?,
                    ..Default::default()
                };
                for e in &self.entries {
                    let k = e.memory.as_deref().ok_or_else(|| {
                        Error::Invalid(format!("entry for `{}` lacks `memory`", e.state))
                    })?;
                    f.action
                        .insert((mem(k)?, state(&e.state)?), action(&e.action)?);
                }
                for u in &self.updates {
                    let e = Edge::new(state(&u.from)?, action(&u.action)?, state(&u.to)?);
                    f.update.insert((mem(&u.memory)?, e), mem(&u.next)?);
                }
                Ok(f.into())
            }
            other => Err(Error::Invalid(format!("unknown policy kind `{other}`"))),
        }
    }
}
