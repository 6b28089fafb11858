use thiserror::Error;

#[derive(Error, Debug)]
pub enum Error {
    #[error("duplicate state name `{0}`")]
    DuplicateState(String),
    #[error("unknown state `{0}` referenced as a section")]
    UnknownState(String),
    #[error("`{0}` is not a valid state name")]
    BadStateName(String),
    #[error("automaton has {0} states; at most 65535 are supported")]
    TooManyStates(usize),
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("`{0}` is not a binary digit")]
    BadBit(char),
    #[error("the kneading word must be nonempty")]
    EmptyKneadingWord,
    #[error("the last letters of the two kneading words must differ")]
    LastLetterClash,
    #[error(
        "nucleus closure did not stabilize ({rounds} rounds, {size} elements); \
         the group may fail to be contracting"
    )]
    PossiblyNonContracting { rounds: usize, size: usize },
    #[error("search exhausted: {0}")]
    SearchExhausted(String),
    #[error("no tree-preserving endomorphism of this form exists in the dihedral case")]
    DihedralCase,
    #[error("invalid angle: {0}")]
    Angle(String),
    #[error("orbit depth {requested} exceeds the cap of {cap}")]
    DepthCap { requested: usize, cap: usize },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
