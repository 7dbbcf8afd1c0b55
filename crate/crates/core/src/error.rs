//! Crate-wide error type.

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    // ── formalism ───────────────────────────────────────────────────────
    #[error("state count {got} outside 1..={cap}")]
    StateCount { got: u32, cap: u32 },
    #[error("state index {state} out of range for environment with {state_count} states")]
    StateOutOfRange { state: u32, state_count: u32 },
    #[error("vocabulary holds {got} programs, cap is {cap}")]
    VocabularyCap { got: usize, cap: usize },
    #[error("vocabulary is empty")]
    EmptyVocabulary,
    #[error("duplicate program at positions {first} and {second}")]
    DuplicateProgram { first: usize, second: usize },
    #[error("statements must name at least one program")]
    EmptyStatement,
    #[error("program index {index} out of range for vocabulary of {len}")]
    ProgramOutOfRange { index: usize, len: usize },
    #[error("enumerating 2^{programs} statements exceeds budget of {budget}")]
    StatementBudget { programs: usize, budget: u64 },
    #[error("duplicate statement in explicit universe")]
    DuplicateStatement,
    #[error("explicit universe is empty")]
    EmptyUniverse,
    #[error("derived statement {0} has empty intersection")]
    NotRealizable(String),

    // ── tasks ───────────────────────────────────────────────────────────
    #[error("task inputs are empty")]
    EmptyInputs,
    #[error("task correct outputs are empty")]
    EmptyOutputs,
    #[error("correct outputs are not a subset of the input extension")]
    OutputsOutsideExtension,
    #[error("correct outputs must be a strict subset of the input extension")]
    OutputsNotStrict,
    #[error("inputs of a derived-language task must be a strict subset of the universe")]
    InputsNotStrict,
    #[error("operands belong to different languages")]
    LanguageMismatch,
    #[error("policy has an empty extension")]
    EmptyExtension,
    #[error("no output available: input and policy extensions are disjoint")]
    NoOutput,
    #[error("input is not among the task inputs")]
    InputNotInTask,

    // ── learning ────────────────────────────────────────────────────────
    #[error("task has no correct policy")]
    NoCorrectPolicy,
    #[error("policy is not correct for the task")]
    NotCorrectPolicy,
    #[error("trial count must be at least 1")]
    ZeroTrials,
    #[error("no valid parent/child task pair exists for this language")]
    SamplingExhausted,
    #[error("task enumeration over {tasks} inputs exceeds budget of {budget}")]
    TaskBudget { tasks: u64, budget: u64 },

    // ── causality ───────────────────────────────────────────────────────
    #[error("intervention set is empty")]
    EmptyInterventions,
    #[error("a statement appears as both intervention and observation")]
    InterventionObservationOverlap,
    #[error("organism {owner} already holds a different self for chain {chain}")]
    DuplicateSelf { owner: String, chain: String },
    #[error("reflection chain of depth {depth} exceeds cap {cap}")]
    DepthExceeded { depth: usize, cap: usize },
    #[error("chain is empty, does not end with its owner, or repeats an organism consecutively")]
    MalformedChain,
    #[error("unknown organism {0}")]
    UnknownOrganism(String),

    // ── agents / scenarios ──────────────────────────────────────────────
    #[error("unknown scenario {0}")]
    UnknownScenario(String),
    #[error("scenario error at step {step}, organism {organism}: {message}")]
    Scenario {
        step: u64,
        organism: String,
        message: String,
    },
    #[error("counterfactual removal leaves the input unchanged")]
    NotASubStatement,

    // ── cli / io ────────────────────────────────────────────────────────
    #[error("unknown fixture {0}")]
    UnknownFixture(String),
    #[error("fixture assertion failed: {0}")]
    FixtureAssertion(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("{count} validation violation(s)")]
    Validation { count: usize },
    #[error("unknown name {0}")]
    UnknownName(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code for the CLI: 1 validation/assertion, 2 usage, 3 budget.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::StatementBudget { .. } | Error::TaskBudget { .. } => 3,
            Error::Parse(_) | Error::UnknownFixture(_) | Error::UnknownScenario(_) => 2,
            _ => 1,
        }
    }
}
