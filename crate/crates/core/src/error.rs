use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("duplicate subsystem label `{0}`")]
    DuplicateLabel(String),

    #[error("subsystem `{0}` needs at least one basis state")]
    EmptySubsystem(String),

    #[error("duplicate basis label `{basis}` in subsystem `{label}`")]
    DuplicateBasisLabel { label: String, basis: String },

    #[error("unknown subsystem label `{0}`")]
    UnknownLabel(String),

    #[error("unknown basis label `{basis}` for subsystem `{label}`")]
    UnknownBasisLabel { label: String, basis: String },

    #[error("label `{0}` is already registered")]
    LabelCollision(String),

    #[error("expected {expected} entries, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("state is not normalized (squared norm {0})")]
    NotNormalized(f64),

    #[error("operands are defined over different registries")]
    RegistryMismatch,

    #[error("matrix is not Hermitian (deviation {0:e})")]
    NotHermitian(f64),

    #[error("trace is {0}, expected 1")]
    InvalidTrace(f64),

    #[error("matrix is not positive semidefinite (smallest eigenvalue {0:e})")]
    NotPositive(f64),

    #[error("projector is not idempotent (deviation {0:e})")]
    NotIdempotent(f64),

    #[error("negative probability {0:e}")]
    NegativeProbability(f64),

    #[error("measurement basis is not orthonormal (deviation {0:e})")]
    NotOrthonormal(f64),

    #[error("map is not an isometry (deviation {0:e})")]
    NotIsometry(f64),

    #[error("outcome `{outcome}` of `{agent}` has zero probability")]
    ZeroProbability { agent: String, outcome: String },

    #[error("`{outcome}` is not an outcome of `{agent}`")]
    UnknownOutcome { agent: String, outcome: String },

    #[error("unknown agent `{0}`")]
    UnknownAgent(String),

    #[error("invalid experiment: {0}")]
    InvalidExperiment(String),

    #[error("unknown slot `{0}`")]
    UnknownSlot(String),

    #[error("unknown time label `{0}`")]
    UnknownTime(String),

    #[error("schema mismatch: {0}")]
    SchemaMismatch(String),

    #[error("invalid event: {0}")]
    InvalidEvent(String),

    #[error("invalid story: {0}")]
    InvalidStory(String),

    #[error("no measurement mapped to slot `{slot}` at `{time}`")]
    UnmappedSlot { time: String, slot: String },

    #[error("deduction cycle through `{agent}={outcome}`")]
    CycleDetected { agent: String, outcome: String },

    #[error("invalid config: {0}")]
    Config(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Config(e.to_string())
    }
}
