//! Oracle-side analysis of learner output: exhaustive agreement rates,
//! spectrum ranks, and the shape of the sampled probability distribution.
//! Everything here evaluates the target function directly, so none of it is
//! reachable from the learner path.

use qsample_core::boolean_fn::{BipolarFunction, TrainingSet};
use qsample_core::learner::WeakHypothesis;
use qsample_core::qstate::StateVector;
use qsample_core::walsh::FourierSpectrum;

use crate::error::Result;

/// Fraction of all 2^n inputs where the hypothesis matches the function.
pub fn agreement_rate(h: &WeakHypothesis, f: &BipolarFunction) -> f64 {
    let dim = 1usize << f.arity();
    let matches = (0..dim).filter(|&x| h.predict(x) == f.eval(x)).count();
    matches as f64 / dim as f64
}

/// Competition rank of |coefficient| at `index` within the spectrum:
/// 1 + the number of indices with strictly larger magnitude.
pub fn magnitude_rank(spectrum: &FourierSpectrum, index: usize) -> usize {
    let target = spectrum.coefficient(index).abs();
    1 + spectrum.coefficients().iter().filter(|c| c.abs() > target).count()
}

/// Shape of the post-transform sampling distribution of a training set.
#[derive(Debug, Clone, Copy)]
pub struct ProbabilityProfile {
    pub max: f64,
    pub min_nonzero: f64,
    pub nonzero: usize,
}

impl ProbabilityProfile {
    /// Ratio of the largest to the smallest nonzero sampling probability;
    /// how strongly observation magnifies the coefficient differences.
    pub fn ratio(&self) -> f64 {
        if self.min_nonzero > 0.0 {
            self.max / self.min_nonzero
        } else {
            f64::NAN
        }
    }
}

pub fn probability_profile(t: &TrainingSet, cap: usize) -> Result<ProbabilityProfile> {
    let state = StateVector::encode_training_set(t, cap)?.apply_walsh();
    let dim = 1usize << t.arity();
    // Post-transform amplitudes sit on the 1/sqrt(m * 2^n) lattice; half a
    // lattice step separates true zeros from rounding residue.
    let threshold = 0.5 / ((t.m() * dim) as f64).sqrt();
    let mut max = 0.0f64;
    let mut min_nonzero = f64::INFINITY;
    let mut nonzero = 0usize;
    for &a in state.amplitudes() {
        if a.abs() <= threshold {
            continue;
        }
        let p = a * a;
        nonzero += 1;
        max = max.max(p);
        min_nonzero = min_nonzero.min(p);
    }
    if nonzero == 0 {
        min_nonzero = 0.0;
    }
    Ok(ProbabilityProfile { max, min_nonzero, nonzero })
}
