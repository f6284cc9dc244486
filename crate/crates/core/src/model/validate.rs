use std::fmt;

use super::dra::Dra;
use super::mdp::{Mdp, MAX_AP};

pub const ROW_SUM_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub enum Violation {
    RowSum {
        state: String,
        action: String,
        sum: f64,
    },
    NoEnabledAction {
        state: String,
    },
    LabelAlphabet {
        state: String,
        action: String,
        target: String,
    },
    Probability {
        state: String,
        action: String,
        target: String,
        prob: f64,
    },
    OutOfRange(String),
    AlphabetTooLarge(usize),
    PartialDelta {
        state: String,
        letter: u32,
    },
    PairOutOfRange {
        pair: usize,
        state: usize,
    },
}

impl Violation {
    /// Stable short tag for the violated invariant.
    pub fn kind(&self) -> &'static str {
        match self {
            Violation::RowSum { .. } => "row-sum",
            Violation::NoEnabledAction { .. } => "no enabled action",
            Violation::LabelAlphabet { .. } => "label alphabet",
            Violation::Probability { .. } => "probability range",
            Violation::OutOfRange(_) => "index out of range",
            Violation::AlphabetTooLarge(_) => "alphabet too large",
            Violation::PartialDelta { .. } => "partial delta",
            Violation::PairOutOfRange { .. } => "pair out of range",
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::RowSum { state, action, sum } => {
                write!(f, "row-sum: ({state}, {action}) sums to {sum}")
            }
            Violation::NoEnabledAction { state } => write!(f, "no enabled action at {state}"),
            Violation::LabelAlphabet {
                state,
                action,
                target,
            } => {
                write!(
                    f,
                    "label alphabet: ({state}, {action}, {target}) uses an undeclared proposition"
                )
            }
            Violation::Probability {
                state,
                action,
                target,
                prob,
            } => {
                write!(
                    f,
                    "probability range: ({state}, {action}, {target}) = {prob}"
                )
            }
            Violation::OutOfRange(what) => write!(f, "index out of range: {what}"),
            Violation::AlphabetTooLarge(n) => write!(f, "alphabet too large: {n} > {MAX_AP}"),
            Violation::PartialDelta { state, letter } => {
                write!(
                    f,
                    "partial delta: no successor of {state} on letter {letter:#b}"
                )
            }
            Violation::PairOutOfRange { pair, state } => {
                write!(f, "pair out of range: pair {pair} names state {state}")
            }
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has(&self, kind: &str) -> bool {
        self.violations.iter().any(|v| v.kind() == kind)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in &self.violations {
            writeln!(f, "{v}")?;
        }
        Ok(())
    }
}

pub fn validate_mdp(m: &Mdp) -> ValidationReport {
    let mut out = Vec::new();
    let n = m.num_states();
    if m.ap.len() > MAX_AP {
        out.push(Violation::AlphabetTooLarge(m.ap.len()));
    }
    if m.initial >= n {
        out.push(Violation::OutOfRange(format!(
            "initial state {}",
            m.initial
        )));
    }
    if m.choices.len() != n {
        out.push(Violation::OutOfRange(format!(
            "{} choice rows for {n} states",
            m.choices.len()
        )));
    }
    let alphabet_mask: u64 = (1u64 << m.ap.len()) - 1;
    let name = |v: &Vec<String>, i: usize| v.get(i).cloned().unwrap_or_else(|| format!("#{i}"));
    for (s, choices) in m.choices.iter().enumerate() {
        if choices.is_empty() {
            out.push(Violation::NoEnabledAction {
                state: name(&m.states, s),
            });
        }
        for c in choices {
            if c.action >= m.num_actions() {
                out.push(Violation::OutOfRange(format!(
                    "action {} at {}",
                    c.action,
                    name(&m.states, s)
                )));
            }
            for t in &c.transitions {
                if t.target >= n {
                    out.push(Violation::OutOfRange(format!("target {}", t.target)));
                }
                if !(0.0..=1.0).contains(&t.prob) || t.prob.is_nan() {
                    out.push(Violation::Probability {
                        state: name(&m.states, s),
                        action: name(&m.actions, c.action),
                        target: name(&m.states, t.target),
                        prob: t.prob,
                    });
                }
                if u64::from(t.label) & !alphabet_mask != 0 {
                    out.push(Violation::LabelAlphabet {
                        state: name(&m.states, s),
                        action: name(&m.actions, c.action),
                        target: name(&m.states, t.target),
                    });
                }
            }
            let sum = c.row_sum();
            if (sum - 1.0).abs() > ROW_SUM_TOLERANCE {
                out.push(Violation::RowSum {
                    state: name(&m.states, s),
                    action: name(&m.actions, c.action),
                    sum,
                });
            }
        }
    }
    ValidationReport { violations: out }
}

pub fn validate_dra(d: &Dra, ap: &[String]) -> ValidationReport {
    let mut out = Vec::new();
    if ap.len() > MAX_AP {
        out.push(Violation::AlphabetTooLarge(ap.len()));
        return ValidationReport { violations: out };
    }
    let nq = d.num_states();
    if d.initial >= nq {
        out.push(Violation::OutOfRange(format!(
            "initial state {}",
            d.initial
        )));
    }
    for q in 0..nq {
        for letter in 0..(1u32 << ap.len()) {
            match d.step(q, letter) {
                None => out.push(Violation::PartialDelta {
                    state: d.states[q].clone(),
                    letter,
                }),
                Some(t) if t >= nq => out.push(Violation::OutOfRange(format!(
                    "successor {t} of {}",
                    d.states[q]
                ))),
                Some(_) => {}
            }
        }
    }
    for (i, p) in d.pairs.iter().enumerate() {
        for &q in p.accept.iter().chain(&p.reject) {
            if q >= nq {
                out.push(Violation::PairOutOfRange { pair: i, state: q });
            }
        }
    }
    ValidationReport { violations: out }
}
