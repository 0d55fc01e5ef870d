//! Quantum Fourier sampling of Walsh spectra, simulated classically.
//!
//! The crate covers the full pipeline: boolean target functions behind an
//! example oracle ([`boolean_fn`]), classical Walsh analysis ([`walsh`]),
//! real-amplitude state simulation ([`qstate`]), and the sampling learner
//! that identifies a large coefficient from examples alone ([`learner`]).

pub mod bits;
pub mod boolean_fn;
pub mod error;
pub mod learner;
pub mod qstate;
pub mod seeds;
pub mod stats;
pub mod walsh;

/// Default refusal threshold for 2^n-sized allocations: n = 26 keeps a state
/// vector around 512 MiB of doubles.
pub const DEFAULT_QUBIT_CAP: usize = 26;

pub use boolean_fn::{
    build_training_set, random_dnf, BipolarFunction, DnfFormula, ExampleOracle, Literal,
    TrainingSet,
};
pub use error::{Error, Result};
pub use learner::{
    build_hypothesis, estimate_coefficient, identify_large, run_learner, run_sampling,
    sample_spectrum, LearnerConfig, LearnerResult, SampleHistogram, SamplingOutcome,
    StoppingPolicy, WeakHypothesis,
};
pub use qstate::{BornSampler, StateVector};
pub use walsh::{
    approx_coefficient, chi, evaluate_expansion, evaluate_full_expansion, fwht,
    memorization_value, FourierSpectrum, Scaling,
};
