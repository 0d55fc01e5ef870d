//! Classical Walsh machinery: parity basis functions, the fast transform
//! kernel, exact and training-set spectra, and expansion evaluation.
//!
//! All arithmetic is real. The single transform kernel serves every caller
//! through a scaling parameter: `ByLen` (1/2^n) turns the raw transform into
//! coefficient averages, `BySqrtLen` (1/sqrt(2^n)) is the unitary form used
//! on quantum states.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::bits;
use crate::boolean_fn::{check_cap, BipolarFunction, TrainingSet};
use crate::error::{Error, Result};

/// The parity basis function indexed by `a`, evaluated at `x`:
/// +1 when `a AND x` has even popcount, -1 when odd.
#[inline]
pub fn chi(a: usize, x: usize) -> i8 {
    if (a & x).count_ones().is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// `chi` with an arity check on both arguments.
pub fn chi_checked(a: usize, x: usize, n: usize) -> Result<i8> {
    bits::check_index(a, n)?;
    bits::check_index(x, n)?;
    Ok(chi(a, x))
}

/// Scaling applied after the raw +-1 transform.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scaling {
    /// Raw transform: the +-1 matrix applied as-is.
    None,
    /// Divide by 2^n: sums become averages, yielding Fourier coefficients.
    ByLen,
    /// Divide by sqrt(2^n): the unitary, norm-preserving form.
    BySqrtLen,
}

/// In-place fast Walsh transform via the radix-2 butterfly, O(n * 2^n).
///
/// The raw transform computes `out[a] = sum_x chi(a, x) * v[x]`, i.e. the
/// +-1 Walsh matrix with rows and columns in plain index order.
pub fn fwht(values: &mut [f64], scaling: Scaling) -> Result<()> {
    let len = values.len();
    if len == 0 || !len.is_power_of_two() {
        return Err(Error::NotPowerOfTwo { len });
    }
    let mut h = 1;
    while h < len {
        for block in values.chunks_exact_mut(2 * h) {
            let (lo, hi) = block.split_at_mut(h);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (s, d) = (*a + *b, *a - *b);
                *a = s;
                *b = d;
            }
        }
        h <<= 1;
    }
    match scaling {
        Scaling::None => {}
        Scaling::ByLen => {
            let inv = 1.0 / len as f64;
            values.iter_mut().for_each(|v| *v *= inv);
        }
        Scaling::BySqrtLen => {
            let inv = 1.0 / (len as f64).sqrt();
            values.iter_mut().for_each(|v| *v *= inv);
        }
    }
    Ok(())
}

#[derive(Serialize, Deserialize)]
struct SpectrumWire {
    n: usize,
    coefficients: Vec<f64>,
}

/// A length-2^n vector of Walsh coefficients indexed by basis mask.
///
/// Holds exact coefficients when built from a function and training-set
/// approximations when built from examples.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierSpectrum {
    n: usize,
    coeffs: Vec<f64>,
}

impl FourierSpectrum {
    /// The exact spectrum of `f`: transform of the truth table scaled by 1/2^n.
    pub fn exact(f: &BipolarFunction, cap: usize) -> Result<Self> {
        let n = f.arity();
        check_cap(n, cap)?;
        let mut coeffs: Vec<f64> = f.truth_table(cap)?.iter().map(|&v| v as f64).collect();
        fwht(&mut coeffs, Scaling::ByLen)?;
        Ok(Self { n, coeffs })
    }

    /// The dense training-set approximation: every coefficient of the partial
    /// function, computed in one transform. Each entry equals
    /// [`approx_coefficient`] at that index.
    pub fn approximate(t: &TrainingSet, cap: usize) -> Result<Self> {
        let n = t.arity();
        let dim = check_cap(n, cap)?;
        let mut padded = vec![0.0; dim];
        for (x, y) in t.iter() {
            padded[x] = y as f64;
        }
        fwht(&mut padded, Scaling::None)?;
        let inv_m = 1.0 / t.m() as f64;
        padded.iter_mut().for_each(|v| *v *= inv_m);
        Ok(Self { n, coeffs: padded })
    }

    pub fn from_coefficients(n: usize, coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.len() != bits::dimension(n)? {
            return Err(Error::InvalidParameter {
                reason: format!("spectrum for arity {n} needs {} entries", 1usize << n),
            });
        }
        Ok(Self { n, coeffs })
    }

    pub fn arity(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn coefficient(&self, a: usize) -> f64 {
        self.coeffs[a]
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coeffs
    }

    /// Index of the largest |coefficient|, smallest index on ties.
    pub fn argmax_magnitude(&self) -> usize {
        let mut best = 0;
        for (a, &c) in self.coeffs.iter().enumerate() {
            if c.abs() > self.coeffs[best].abs() {
                best = a;
            }
        }
        best
    }

    /// CSV export: header plus one `index_bits,coefficient` row per index.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("index_bits,coefficient\n");
        for (a, &c) in self.coeffs.iter().enumerate() {
            let _ = writeln!(out, "{},{}", bits::format_bits(a, self.n), c);
        }
        out
    }

    /// JSON export mirroring the truth-table file shape.
    pub fn to_json(&self) -> String {
        serde_json::to_string(&SpectrumWire { n: self.n, coefficients: self.coeffs.clone() })
            .expect("spectrum wire serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let wire: SpectrumWire = serde_json::from_str(text)?;
        Self::from_coefficients(wire.n, wire.coefficients)
    }
}

/// The training-set approximation of one coefficient: the mean of
/// `label * chi(x, a)` over the distinct examples. Always a multiple of 1/m.
pub fn approx_coefficient(t: &TrainingSet, a: usize) -> Result<f64> {
    bits::check_index(a, t.arity())?;
    let sum: i64 = t.iter().map(|(x, y)| (y * chi(a, x)) as i64).sum();
    Ok(sum as f64 / t.m() as f64)
}

/// Evaluate the expansion at `x` over the given support indices.
pub fn evaluate_expansion(spectrum: &FourierSpectrum, support: &[usize], x: usize) -> f64 {
    debug_assert!(x >> spectrum.arity() == 0);
    support.iter().map(|&a| spectrum.coefficient(a) * chi(a, x) as f64).sum()
}

/// Evaluate the expansion at `x` over all 2^n indices.
pub fn evaluate_full_expansion(spectrum: &FourierSpectrum, x: usize) -> f64 {
    spectrum
        .coefficients()
        .iter()
        .enumerate()
        .map(|(a, &c)| c * chi(a, x) as f64)
        .sum()
}

/// Closed form of the full-support reconstruction from a training set:
/// `(2^n / m) * label(x)` on the training inputs and 0 elsewhere.
///
/// Serves as the oracle for [`evaluate_full_expansion`] applied to
/// [`FourierSpectrum::approximate`]; using every coefficient memorizes the
/// training set and generalizes nowhere.
pub fn memorization_value(t: &TrainingSet, x: usize) -> f64 {
    debug_assert!(x >> t.arity() == 0);
    match t.label(x) {
        Some(y) => (1u64 << t.arity()) as f64 / t.m() as f64 * y as f64,
        None => 0.0,
    }
}
