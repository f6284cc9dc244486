//! Exact evaluation of fixed policies and brute-force optimization.

mod average;
mod linear;
mod mixing;
mod oracle;

pub use average::{
    acceptance_on_product, acceptance_probability, gain_of_ec, gain_with_machine, limit_average,
    EcGain, GainReport,
};
pub use linear::{discounted_value, gain_of_chain, reach_probability, PolicyChain};
pub use mixing::{ergodic_mixing_time, lazy_chain, stationary_distribution, MIXING_STEP_CAP};
pub use oracle::{
    brute_force_optimal_average, brute_force_with, enumerate_policies, optimal_discounted,
    EnumerationMode, OracleResult, POLICY_CAP,
};

/// Tolerance for membership in an argmax set.
pub const ARGMAX_TOLERANCE: f64 = 1e-9;
/// Tolerance for comparing quantities computed by different pipelines.
pub const CROSS_TOLERANCE: f64 = 1e-7;
