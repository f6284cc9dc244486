//! Reward machines whose limit-average optimal policies maximize the
//! probability of satisfying a Rabin objective.
//!
//! [`translate_known_support`] needs the set of positive-probability
//! transitions; [`GeneralRewardMachine`] discovers it along the run.

mod certify;
mod general;
mod known;

pub use certify::{certify_translation, CertificationReport, CertifyOptions, Check};
pub use general::{translate_general, GeneralRewardMachine, GENERAL_STATE_CAP};
pub use known::{covering_for_support, support_mdp, translate_known_support, SupportSet};

/// Name of the absorbing sink entered after deviating inside a covered component.
pub const BOTTOM: &str = "⊥";
