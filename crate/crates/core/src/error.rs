use thiserror::Error;

/// Errors raised by the election model, the solvers and the generators.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid alpha {0}: need s/t with 0 <= s <= t, 1 <= t <= 2^32")]
    InvalidAlpha(String),
    #[error("invalid candidate name {0:?}")]
    InvalidCandidate(String),
    #[error("duplicate candidate {0}")]
    DuplicateCandidate(String),
    #[error("unknown candidate {0}")]
    UnknownCandidate(String),
    #[error("a contest needs two distinct candidates")]
    SameCandidate,
    #[error("the election has no candidates")]
    EmptyCandidateSet,
    #[error("invalid ballot: {0}")]
    InvalidBallot(String),
    #[error("not a partition: {0}")]
    NotAPartition(String),
    #[error("invalid goal: {0}")]
    InvalidGoal(String),
    #[error("search space exceeds limits: {0}")]
    BudgetExceeded(String),
    #[error("malformed instance: {0}")]
    MalformedInstance(String),
    #[error("microbribery needs preference-table ballots only")]
    NotIrrational,
    #[error("solver does not handle problem {0}")]
    WrongProblem(String),
    #[error("instance violates bound: {0}")]
    BoundViolated(String),
    #[error("infeasible construction: {0}")]
    InfeasibleSpec(String),
    #[error("candidate name clash: {0}")]
    NameClash(String),
    #[error("alpha must satisfy 0 < alpha < 1 for this construction")]
    AlphaOutOfRange,
    #[error("graph has no edges")]
    EmptyGraph,
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
