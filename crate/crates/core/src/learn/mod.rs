//! Learning against a sampling simulator: model estimation, a discounted
//! PAC solver, the discount schedule and the limit-average PAC procedure.

mod bounds;
mod estimate;
mod pac;
mod simulator;

pub use bounds::{delta_for_accuracy, required_samples};
pub use estimate::{estimate_mdp, estimate_product, MdpEstimate, ProductEstimate};
pub use pac::{
    discounted_pac, gain_on_hidden, omega_pac, run_algorithm1, transfer_policy, DiscountedOutcome,
    Iteration, OmegaPacOutcome, ScheduleReport, OPTIMALITY_TOLERANCE,
};
pub use simulator::{simulate_run, RunSummary, Simulator};
