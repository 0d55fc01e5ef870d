//! Real-amplitude state-vector simulation.
//!
//! Only what the sampling algorithm needs: encoding functions and training
//! sets as superpositions, the n-qubit Walsh operator, and basis measurement.
//! Amplitudes are real throughout; the algorithm never uses the phase degree
//! of freedom of general quantum states.
//!
//! Measuring does not collapse the stored vector. Each observation stands for
//! one fresh prepare-transform-observe cycle, and re-sampling one stored
//! distribution is distributionally identical to re-preparing it; cost
//! accounting still charges one full cycle per draw.

use std::fmt::Write as _;

use rand::Rng;

use crate::bits;
use crate::boolean_fn::{check_cap, BipolarFunction, TrainingSet};
use crate::error::{Error, Result};
use crate::stats::kahan_sum;
use crate::walsh::{fwht, Scaling};

/// How far a squared norm may drift from 1 before a state is refused.
pub const NORM_TOLERANCE: f64 = 1e-6;

/// A unit-norm vector of 2^n real amplitudes indexed by basis state.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n: usize,
    amps: Vec<f64>,
}

impl StateVector {
    /// Wrap raw amplitudes, checking the length and the unit norm.
    pub fn from_amplitudes(n: usize, amps: Vec<f64>) -> Result<Self> {
        if amps.len() != bits::dimension(n)? {
            return Err(Error::InvalidParameter {
                reason: format!("state for {n} qubits needs {} amplitudes", 1usize << n),
            });
        }
        let state = Self { n, amps };
        state.check_norm()?;
        Ok(state)
    }

    /// Encode a full function: amplitude `f(x)/sqrt(2^n)` at every `x`.
    /// The domain lives in the state labels, the range in the signs.
    pub fn encode_function(f: &BipolarFunction, cap: usize) -> Result<Self> {
        let n = f.arity();
        let dim = check_cap(n, cap)?;
        let scale = 1.0 / (dim as f64).sqrt();
        let amps = (0..dim).map(|x| f.eval(x) as f64 * scale).collect();
        Ok(Self { n, amps })
    }

    /// Encode a training set: amplitude `label(x)/sqrt(m)` on the training
    /// inputs and 0 elsewhere. Amplitudes are assigned directly; no state
    /// preparation circuit is simulated.
    pub fn encode_training_set(t: &TrainingSet, cap: usize) -> Result<Self> {
        if t.m() == 0 {
            return Err(Error::EmptyTrainingSet);
        }
        let n = t.arity();
        let dim = check_cap(n, cap)?;
        let scale = 1.0 / (t.m() as f64).sqrt();
        let mut amps = vec![0.0; dim];
        for (x, y) in t.iter() {
            amps[x] = y as f64 * scale;
        }
        Ok(Self { n, amps })
    }

    pub fn qubits(&self) -> usize {
        self.n
    }

    /// The amplitude at basis index `a`, exactly as stored.
    #[inline]
    pub fn amplitude(&self, a: usize) -> f64 {
        self.amps[a]
    }

    pub fn amplitudes(&self) -> &[f64] {
        &self.amps
    }

    pub fn norm_squared(&self) -> f64 {
        kahan_sum(self.amps.iter().map(|a| a * a))
    }

    fn check_norm(&self) -> Result<()> {
        let norm_sq = self.norm_squared();
        if (norm_sq - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::CorruptState { norm_sq });
        }
        Ok(())
    }

    /// Apply the n-qubit Walsh operator (the unitary transform; its own
    /// inverse). Consumes the state and transforms the buffer in place.
    pub fn apply_walsh(mut self) -> Self {
        fwht(&mut self.amps, Scaling::BySqrtLen).expect("state length is a power of two");
        self
    }

    /// One measurement in the computational basis: index `x` with
    /// probability `amplitude(x)^2`. The stored state is not mutated.
    pub fn measure<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<usize> {
        Ok(BornSampler::new(self)?.draw(rng))
    }

    /// Debug dump: `index_bits,amplitude` rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("index_bits,amplitude\n");
        for (x, &a) in self.amps.iter().enumerate() {
            let _ = writeln!(out, "{},{}", bits::format_bits(x, self.n), a);
        }
        out
    }
}

/// Repeated-measurement sampler over one state's squared amplitudes.
///
/// Builds the cumulative distribution once, then draws in O(log 2^n); zero
/// probability indices are never produced.
pub struct BornSampler {
    n: usize,
    cdf: Vec<f64>,
}

impl BornSampler {
    pub fn new(state: &StateVector) -> Result<Self> {
        state.check_norm()?;
        let total = state.norm_squared();
        let mut cdf = Vec::with_capacity(state.amps.len());
        let mut acc = 0.0;
        for &a in &state.amps {
            acc += a * a / total;
            cdf.push(acc);
        }
        if let Some(last) = cdf.last_mut() {
            *last = 1.0;
        }
        Ok(Self { n: state.n, cdf })
    }

    pub fn qubits(&self) -> usize {
        self.n
    }

    /// Draw one basis index.
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.random();
        // First index whose cumulative mass exceeds u; empty intervals
        // (zero-probability cells) cannot satisfy the bracketing.
        self.cdf.partition_point(|&c| c <= u)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seeds::rng_from_seed;
    use crate::walsh::approx_coefficient;

    fn worked_function() -> BipolarFunction {
        BipolarFunction::from_table(2, vec![1, 1, -1, 1]).unwrap()
    }

    fn worked_training_set() -> TrainingSet {
        TrainingSet::from_pairs(2, [(0b00, 1), (0b01, 1), (0b10, -1)]).unwrap()
    }

    #[test]
    fn encode_function_worked_example() {
        let s = StateVector::encode_function(&worked_function(), 26).unwrap();
        let expect = [0.5, 0.5, -0.5, 0.5];
        for (x, &e) in expect.iter().enumerate() {
            assert!((s.amplitude(x) - e).abs() < 1e-15);
        }
        assert!((s.norm_squared() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn encode_constant_single_qubit() {
        let f = BipolarFunction::constant(1, 1).unwrap();
        let s = StateVector::encode_function(&f, 26).unwrap();
        let r = 1.0 / 2f64.sqrt();
        assert!((s.amplitude(0) - r).abs() < 1e-15);
        assert!((s.amplitude(1) - r).abs() < 1e-15);
    }

    #[test]
    fn encode_training_set_worked_example() {
        let s = StateVector::encode_training_set(&worked_training_set(), 26).unwrap();
        let r = 1.0 / 3f64.sqrt();
        let expect = [r, r, -r, 0.0];
        for (x, &e) in expect.iter().enumerate() {
            assert!((s.amplitude(x) - e).abs() < 1e-15);
        }
    }

    #[test]
    fn full_table_encoding_equals_function_encoding() {
        let f = worked_function();
        let t = TrainingSet::full_table(&f, 26).unwrap();
        let a = StateVector::encode_function(&f, 26).unwrap();
        let b = StateVector::encode_training_set(&t, 26).unwrap();
        for x in 0..4 {
            assert!((a.amplitude(x) - b.amplitude(x)).abs() < 1e-15);
        }
    }

    #[test]
    fn single_example_encoding() {
        let t = TrainingSet::from_pairs(2, [(0b01, -1)]).unwrap();
        let s = StateVector::encode_training_set(&t, 26).unwrap();
        assert_eq!(s.amplitude(1), -1.0);
        assert_eq!(s.amplitude(0), 0.0);
        assert_eq!(s.amplitude(2), 0.0);
        assert_eq!(s.amplitude(3), 0.0);
    }

    #[test]
    fn walsh_on_training_state_worked_example() {
        let s = StateVector::encode_training_set(&worked_training_set(), 26).unwrap().apply_walsh();
        let d = 2.0 * 3f64.sqrt();
        let expect = [1.0 / d, -1.0 / d, 3.0 / d, 1.0 / d];
        for (x, &e) in expect.iter().enumerate() {
            assert!((s.amplitude(x) - e).abs() < 1e-12, "x={x}");
        }
        assert!((s.norm_squared() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn walsh_of_uniform_phase_is_delta() {
        let f = BipolarFunction::constant(5, 1).unwrap();
        let s = StateVector::encode_function(&f, 26).unwrap().apply_walsh();
        assert!((s.amplitude(0) - 1.0).abs() < 1e-12);
        for x in 1..32 {
            assert!(s.amplitude(x).abs() < 1e-12);
        }
    }

    #[test]
    fn walsh_is_an_involution() {
        let s = StateVector::encode_training_set(&worked_training_set(), 26).unwrap();
        let back = s.clone().apply_walsh().apply_walsh();
        for x in 0..4 {
            assert!((s.amplitude(x) - back.amplitude(x)).abs() < 1e-12);
        }
    }

    #[test]
    fn measurement_probability_spin_half() {
        // The two-level example: amplitudes (2, 1)/sqrt(5), P(0) = 0.8.
        let r = 5f64.sqrt();
        let s = StateVector::from_amplitudes(1, vec![2.0 / r, 1.0 / r]).unwrap();
        let mut rng = rng_from_seed(61);
        let draws = 200_000;
        let zeros = (0..draws).filter(|_| s.measure(&mut rng).unwrap() == 0).count();
        let frac = zeros as f64 / draws as f64;
        assert!((frac - 0.8).abs() < 0.005, "frac={frac}");
    }

    #[test]
    fn delta_state_always_measures_itself() {
        let mut amps = vec![0.0; 8];
        amps[5] = 1.0;
        let s = StateVector::from_amplitudes(3, amps).unwrap();
        let mut rng = rng_from_seed(67);
        for _ in 0..100 {
            assert_eq!(s.measure(&mut rng).unwrap(), 5);
        }
    }

    #[test]
    fn post_walsh_leader_frequency() {
        // Dominant index 10 with probability (3/(2 sqrt 3))^2 = 3/4.
        let s = StateVector::encode_training_set(&worked_training_set(), 26).unwrap().apply_walsh();
        let sampler = BornSampler::new(&s).unwrap();
        let mut rng = rng_from_seed(71);
        let draws = 1_000_000;
        let hits = (0..draws).filter(|_| sampler.draw(&mut rng) == 0b10).count();
        let frac = hits as f64 / draws as f64;
        assert!((frac - 0.75).abs() < 0.002, "frac={frac}");
    }

    #[test]
    fn inner_product_recovers_function_value() {
        // The transformed basis state dotted with the transformed function
        // state recovers f(x) once the 1/sqrt(2^n) encoding normalization is
        // undone: here f(11) = 1. The same product against the transformed
        // training state gives exactly 0 at the unseen input, at any scale.
        let f = worked_function();
        let bf = StateVector::encode_function(&f, 26).unwrap().apply_walsh();
        let mut delta = vec![0.0; 4];
        delta[0b11] = 1.0;
        let bx = StateVector::from_amplitudes(2, delta).unwrap().apply_walsh();
        let dot: f64 = (0..4).map(|i| bx.amplitude(i) * bf.amplitude(i)).sum();
        assert!((dot * 2.0 - 1.0).abs() < 1e-12);

        let bt = StateVector::encode_training_set(&worked_training_set(), 26)
            .unwrap()
            .apply_walsh();
        let dot_t: f64 = (0..4).map(|i| bx.amplitude(i) * bt.amplitude(i)).sum();
        assert!(dot_t.abs() < 1e-12);
    }

    #[test]
    fn amplitudes_bridge_to_approx_coefficients() {
        let t = worked_training_set();
        let s = StateVector::encode_training_set(&t, 26).unwrap().apply_walsh();
        let scale = (t.m() as f64 / 4.0).sqrt();
        for a in 0..4 {
            let expect = scale * approx_coefficient(&t, a).unwrap();
            assert!((s.amplitude(a) - expect).abs() < 1e-14);
        }
        // Spot value from the worked example: amplitude(10) = 3 / (2 sqrt 3).
        assert!((s.amplitude(0b10) - 3.0 / (2.0 * 3f64.sqrt())).abs() < 1e-14);
    }

    #[test]
    fn corrupt_state_is_refused() {
        let bad = StateVector { n: 1, amps: vec![1.0, 0.5] };
        assert!(matches!(bad.measure(&mut rng_from_seed(0)), Err(Error::CorruptState { .. })));
        assert!(StateVector::from_amplitudes(1, vec![1.0, 0.5]).is_err());
    }

    #[test]
    fn encode_respects_cap() {
        let f = BipolarFunction::constant(12, 1).unwrap();
        assert!(matches!(
            StateVector::encode_function(&f, 10),
            Err(Error::ResourceCap { .. })
        ));
    }

    #[test]
    fn state_csv_dump() {
        let mut amps = vec![0.0; 4];
        amps[2] = 1.0;
        let s = StateVector::from_amplitudes(2, amps).unwrap();
        assert_eq!(s.to_csv(), "index_bits,amplitude\n00,0\n01,0\n10,1\n11,0\n");
    }
}
