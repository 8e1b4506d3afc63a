use alloc::boxed::Box;
use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("unknown metric `{0}`")]
    UnknownMetric(String),
    #[error("missing value for metric `{0}`")]
    MissingMetric(String),
    #[error("duplicate metric `{0}` in registry")]
    DuplicateMetric(String),
    #[error("metric id must be non-empty")]
    EmptyMetricId,
    #[error("registry must declare exactly one base metric, found {0}")]
    BaseMetricCount(usize),
    #[error("non-finite value for metric `{0}`")]
    NonFinite(String),
    #[error("non-finite input: {0}")]
    NonFiniteInput(&'static str),
    #[error("empty input: {0}")]
    EmptyInput(&'static str),
    #[error("metric vectors have mismatched key sets")]
    KeyMismatch,
    #[error("weight for `{metric}` must lie in (0, 1), got {value}")]
    InvalidWeight { metric: String, value: f64 },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("degenerate normalization for `{0}`: best equals baseline")]
    DegenerateNormalization(String),
    #[error("trade-off fit needs at least 2 front points, found {0}")]
    TooFewFrontPoints(usize),
    #[error("all front points share one auxiliary value; trade-off slope undefined")]
    VerticalFront,
    #[error("no trade-off curve for auxiliary metric `{0}`")]
    MissingCurve(String),
    #[error("zero denominator: {0}")]
    ZeroDenominator(&'static str),
    #[error("user `{0}` has no group label")]
    UnlabeledUser(String),
    #[error("no embedding for item `{0}`")]
    MissingEmbedding(String),
    #[error("invalid embedding: {0}")]
    InvalidEmbedding(String),
    #[error("recommendation list for user `{user}` has {len} items, need at least {needed}")]
    ListTooShort { user: String, len: usize, needed: usize },
    #[error("user `{0}` has an empty history")]
    EmptyHistory(String),
    #[error("item `{0}` has no artist mapping")]
    UnmappedItem(String),
    #[error("invalid recommendation run: {0}")]
    InvalidRun(String),
    #[error("user `{user}` has {events} events, need at least 2")]
    TooFewEvents { user: String, events: usize },
    #[error("inconsistent data: {0}")]
    InconsistentData(String),
    #[error("fold {index}: {source}")]
    Fold { index: usize, source: Box<Error> },
    #[error("algorithm failure: {0}")]
    Algorithm(String),
    #[error("invalid population spec: {0}")]
    InvalidSpec(String),
}
