use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("transition not in domain: {0}")]
    TransitionNotInDomain(String),

    #[error("alphabet mismatch: MDP uses {mdp:?}, automaton uses {dra:?}")]
    AlphabetMismatch { mdp: Vec<String>, dra: Vec<String> },

    #[error("reward machine has no rule for {0}")]
    DomainGap(String),

    #[error("policy is not total on reachable states: no action at {0}")]
    PolicyNotTotal(String),

    #[error("policy selects action {action} which is not enabled at {state}")]
    ActionNotEnabled { state: String, action: String },

    #[error("end component is not accepting")]
    NotAccepting,

    #[error("missing label on support edge {0}")]
    MissingLabel(String),

    #[error("{what} cap exceeded: {size} > {cap}")]
    CapExceeded {
        what: &'static str,
        size: u128,
        cap: u128,
    },

    #[error("singular linear system ({0})")]
    Singular(&'static str),

    #[error("chain is not irreducible")]
    NotIrreducible,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn cap(what: &'static str, size: impl Into<u128>, cap: impl Into<u128>) -> Self {
        Error::CapExceeded {
            what,
            size: size.into(),
            cap: cap.into(),
        }
    }
}
