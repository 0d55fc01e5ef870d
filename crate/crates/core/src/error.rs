use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// An input index or bit string does not match the expected arity.
    #[error("arity mismatch: expected {expected} bits, got {actual}")]
    ArityMismatch { expected: usize, actual: usize },

    /// A basis index lies outside `0..2^n`.
    #[error("index {index} out of range for arity {arity}")]
    IndexOutOfRange { index: usize, arity: usize },

    /// A bit string contained characters other than '0'/'1', or was empty.
    #[error("invalid bit string {input:?}")]
    InvalidBitString { input: String },

    /// A label was neither -1 nor +1.
    #[error("invalid label {value}; labels must be -1 or +1")]
    InvalidLabel { value: i64 },

    /// Two examples assigned different labels to the same input.
    #[error("conflicting labels for input {input}")]
    ConflictingLabel { input: String },

    /// A structural parameter was out of range (e.g. more literals than variables).
    #[error("invalid parameter: {reason}")]
    InvalidParameter { reason: String },

    /// Allocating a state or table of 2^n entries would exceed the configured cap.
    #[error("arity {n} exceeds the configured qubit cap {cap} (2^{n} amplitudes would need ~{mebibytes} MiB)")]
    ResourceCap { n: usize, cap: usize, mebibytes: u64 },

    /// A buffer handed to the transform was not a power-of-two length.
    #[error("length {len} is not a power of two")]
    NotPowerOfTwo { len: usize },

    /// A training set was empty where at least one example is required.
    #[error("training set is empty")]
    EmptyTrainingSet,

    /// A state vector's norm drifted too far from 1 to be measured.
    #[error("corrupt state: squared norm {norm_sq} is not within 1e-6 of 1")]
    CorruptState { norm_sq: f64 },

    /// A histogram with no observations cannot identify a coefficient.
    #[error("empty histogram")]
    EmptyHistogram,

    /// A coefficient estimate of exactly zero gives no sign for a hypothesis.
    #[error("coefficient estimate is zero; hypothesis sign is ambiguous")]
    AmbiguousSign,

    /// JSON (de)serialization failure for one of the wire formats.
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
