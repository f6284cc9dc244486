//! Core domain types: MDPs, Rabin automata, reward machines and policies.

pub mod dra;
pub mod mdp;
pub mod policy;
pub mod reward_machine;
pub mod validate;
pub mod word;

pub use dra::{dra_accepts, Dra, RabinPair};
pub use mdp::{
    letter_from_names, letter_names, Choice, Edge, Letter, Mdp, MdpBuilder, Skeleton, Transition,
    MAX_AP,
};
pub use policy::{FiniteMemoryPolicy, MemorylessPolicy, PolicyTable};
pub use reward_machine::{
    constant_machine, reward_function_machine, rm_step, RewardMachine, TableRewardMachine,
};
pub use validate::{validate_dra, validate_mdp, ValidationReport, Violation};
pub use word::UltimatelyPeriodicWord;
