use super::mdp::Letter;
use crate::error::{Error, Result};

/// The infinite word `prefix · cycle^ω`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UltimatelyPeriodicWord {
    pub prefix: Vec<Letter>,
    pub cycle: Vec<Letter>,
}

impl UltimatelyPeriodicWord {
    pub fn new(prefix: Vec<Letter>, cycle: Vec<Letter>) -> Result<Self> {
        if cycle.is_empty() {
            return Err(Error::InvalidArgument("cycle must be nonempty".into()));
        }
        Ok(UltimatelyPeriodicWord { prefix, cycle })
    }

    /// Letter at position `i` of the infinite word.
    pub fn at(&self, i: usize) -> Letter {
        if i < self.prefix.len() {
            self.prefix[i]
        } else {
            self.cycle[(i - self.prefix.len()) % self.cycle.len()]
        }
    }
}
