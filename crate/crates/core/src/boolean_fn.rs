//! Boolean target functions and the oracles that expose them.
//!
//! Functions are bipolar: boolean true maps to +1 and false to -1, matching
//! the worked examples' output convention. The learner side of the crate only
//! ever sees an [`ExampleOracle`]; direct evaluation (the membership view)
//! stays on the verification side.

use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bits;
use crate::error::{Error, Result};

/// One variable occurrence inside a conjunctive term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Literal {
    pub var: usize,
    #[serde(rename = "neg")]
    pub negated: bool,
}

/// A disjunction of conjunctive terms over n binary variables.
///
/// The empty disjunction is permitted via explicit construction and evaluates
/// to constant false.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DnfFormula {
    n: usize,
    terms: Vec<Vec<Literal>>,
}

#[derive(Serialize, Deserialize)]
struct DnfWire {
    n: usize,
    terms: Vec<Vec<Literal>>,
}

impl DnfFormula {
    /// Build a formula, validating that every variable index is in range and
    /// no term mentions the same variable twice.
    pub fn new(n: usize, terms: Vec<Vec<Literal>>) -> Result<Self> {
        if n == 0 || n > bits::MAX_ARITY {
            return Err(Error::InvalidParameter {
                reason: format!("arity must be in 1..={}, got {n}", bits::MAX_ARITY),
            });
        }
        for term in &terms {
            let mut seen = vec![false; n];
            for lit in term {
                if lit.var >= n {
                    return Err(Error::InvalidParameter {
                        reason: format!("literal variable {} out of range for arity {n}", lit.var),
                    });
                }
                if seen[lit.var] {
                    return Err(Error::InvalidParameter {
                        reason: format!("variable {} repeated within a term", lit.var),
                    });
                }
                seen[lit.var] = true;
            }
        }
        Ok(Self { n, terms })
    }

    pub fn arity(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &[Vec<Literal>] {
        &self.terms
    }

    /// True iff some term has all its literals satisfied by `x`.
    pub fn satisfied(&self, x: usize) -> bool {
        debug_assert!(x >> self.n == 0);
        self.terms.iter().any(|term| {
            term.iter().all(|lit| {
                let bit = bits::variable(x, lit.var, self.n);
                bit == u8::from(!lit.negated)
            })
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&DnfWire { n: self.n, terms: self.terms.clone() })
            .expect("dnf wire form serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let wire: DnfWire = serde_json::from_str(text)?;
        Self::new(wire.n, wire.terms)
    }
}

/// Generate a random formula with `s` terms of `k` distinct literals each.
///
/// Variables within a term are sampled without replacement and stored sorted;
/// polarities are uniform. Deterministic given the generator state.
pub fn random_dnf<R: Rng + ?Sized>(n: usize, s: usize, k: usize, rng: &mut R) -> Result<DnfFormula> {
    if n == 0 || n > bits::MAX_ARITY {
        return Err(Error::InvalidParameter {
            reason: format!("arity must be in 1..={}, got {n}", bits::MAX_ARITY),
        });
    }
    if s == 0 {
        return Err(Error::InvalidParameter { reason: "term count must be >= 1".into() });
    }
    if k == 0 || k > n {
        return Err(Error::InvalidParameter {
            reason: format!("literals per term must be in 1..={n}, got {k}"),
        });
    }
    let mut terms = Vec::with_capacity(s);
    for _ in 0..s {
        let mut vars = rand::seq::index::sample(rng, n, k).into_vec();
        vars.sort_unstable();
        let term = vars
            .into_iter()
            .map(|var| Literal { var, negated: rng.random() })
            .collect();
        terms.push(term);
    }
    DnfFormula::new(n, terms)
}

#[derive(Debug, Clone)]
enum Backing {
    Dnf(DnfFormula),
    Table(Vec<i8>),
}

/// A bipolar-valued function over {0,1}^n, backed by a formula or by an
/// explicit truth table in index order.
#[derive(Debug, Clone)]
pub struct BipolarFunction {
    n: usize,
    backing: Backing,
}

#[derive(Serialize, Deserialize)]
struct TableWire {
    n: usize,
    outputs: Vec<i64>,
}

impl BipolarFunction {
    pub fn from_dnf(dnf: DnfFormula) -> Self {
        Self { n: dnf.arity(), backing: Backing::Dnf(dnf) }
    }

    /// Wrap an explicit truth table of 2^n entries in {-1, +1}.
    pub fn from_table(n: usize, outputs: Vec<i8>) -> Result<Self> {
        let dim = bits::dimension(n)?;
        if outputs.len() != dim {
            return Err(Error::InvalidParameter {
                reason: format!("truth table must have {dim} entries, got {}", outputs.len()),
            });
        }
        if let Some(&bad) = outputs.iter().find(|&&v| v != 1 && v != -1) {
            return Err(Error::InvalidLabel { value: bad as i64 });
        }
        Ok(Self { n, backing: Backing::Table(outputs) })
    }

    /// The constant function `sign`.
    pub fn constant(n: usize, sign: i8) -> Result<Self> {
        if sign != 1 && sign != -1 {
            return Err(Error::InvalidLabel { value: sign as i64 });
        }
        Ok(Self { n, backing: Backing::Table(vec![sign; bits::dimension(n)?]) })
    }

    /// The parity function on `mask`: +1 on even overlap with `mask`, -1 on odd.
    pub fn parity(n: usize, mask: usize) -> Result<Self> {
        bits::check_index(mask, n)?;
        let dim = bits::dimension(n)?;
        let table = (0..dim)
            .map(|x| if (mask & x).count_ones().is_multiple_of(2) { 1 } else { -1 })
            .collect();
        Ok(Self { n, backing: Backing::Table(table) })
    }

    pub fn arity(&self) -> usize {
        self.n
    }

    /// Evaluate at `x`. Always -1 or +1; never 0.
    #[inline]
    pub fn eval(&self, x: usize) -> i8 {
        debug_assert!(x >> self.n == 0, "index {x} out of range for arity {}", self.n);
        match &self.backing {
            Backing::Dnf(dnf) => {
                if dnf.satisfied(x) {
                    1
                } else {
                    -1
                }
            }
            Backing::Table(t) => t[x],
        }
    }

    /// Evaluate with an explicit range check, for inputs from the outside.
    pub fn eval_checked(&self, x: usize) -> Result<i8> {
        bits::check_index(x, self.n)?;
        Ok(self.eval(x))
    }

    /// Materialize the full truth table, refusing arities over `cap`.
    pub fn truth_table(&self, cap: usize) -> Result<Vec<i8>> {
        check_cap(self.n, cap)?;
        Ok(match &self.backing {
            Backing::Table(t) => t.clone(),
            Backing::Dnf(_) => (0..1usize << self.n).map(|x| self.eval(x)).collect(),
        })
    }

    /// Serialize as the truth-table JSON format.
    pub fn table_to_json(&self, cap: usize) -> Result<String> {
        let outputs = self.truth_table(cap)?.iter().map(|&v| v as i64).collect();
        Ok(serde_json::to_string(&TableWire { n: self.n, outputs }).expect("table wire serializes"))
    }

    pub fn from_table_json(text: &str) -> Result<Self> {
        let wire: TableWire = serde_json::from_str(text)?;
        let outputs = wire
            .outputs
            .iter()
            .map(|&v| match v {
                1 => Ok(1i8),
                -1 => Ok(-1i8),
                other => Err(Error::InvalidLabel { value: other }),
            })
            .collect::<Result<Vec<i8>>>()?;
        Self::from_table(wire.n, outputs)
    }
}

/// Refuse arities whose 2^n-entry tables or states would exceed the cap.
pub fn check_cap(n: usize, cap: usize) -> Result<usize> {
    if n > cap {
        let bytes = (1u128 << n.min(bits::MAX_ARITY)) * 8;
        let mebibytes = (bytes >> 20).max(1) as u64;
        return Err(Error::ResourceCap { n, cap, mebibytes });
    }
    bits::dimension(n)
}

/// Uniformly random labeled examples of a hidden function.
///
/// This is the only capability the learner accepts; anything that can answer
/// chosen-input queries stays out of its interface on purpose.
pub trait ExampleOracle {
    fn arity(&self) -> usize;

    /// One example (x, f(x)) with x uniform over {0,1}^n.
    fn draw_example<R: Rng + ?Sized>(&self, rng: &mut R) -> (usize, i8);
}

impl ExampleOracle for BipolarFunction {
    fn arity(&self) -> usize {
        self.n
    }

    fn draw_example<R: Rng + ?Sized>(&self, rng: &mut R) -> (usize, i8) {
        let x = rng.random_range(0..1usize << self.n);
        (x, self.eval(x))
    }
}

/// A deduplicated set of labeled examples; the keys are the distinct inputs
/// seen and `m` is their count.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrainingSet {
    n: usize,
    entries: BTreeMap<usize, i8>,
}

#[derive(Serialize, Deserialize)]
struct ExampleWire {
    x: String,
    y: i64,
}

#[derive(Serialize, Deserialize)]
struct TrainingSetWire {
    n: usize,
    examples: Vec<ExampleWire>,
}

impl TrainingSet {
    /// Build from explicit (input, label) pairs. Duplicate pairs collapse;
    /// contradictory labels for the same input are rejected.
    pub fn from_pairs<I: IntoIterator<Item = (usize, i8)>>(n: usize, pairs: I) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (x, y) in pairs {
            bits::check_index(x, n)?;
            if y != 1 && y != -1 {
                return Err(Error::InvalidLabel { value: y as i64 });
            }
            if let Some(&prev) = entries.get(&x) {
                if prev != y {
                    return Err(Error::ConflictingLabel { input: bits::format_bits(x, n) });
                }
            }
            entries.insert(x, y);
        }
        if entries.is_empty() {
            return Err(Error::EmptyTrainingSet);
        }
        Ok(Self { n, entries })
    }

    /// The full truth table of `f` as a training set (m = 2^n).
    pub fn full_table(f: &BipolarFunction, cap: usize) -> Result<Self> {
        let dim = check_cap(f.arity(), cap)?;
        Self::from_pairs(f.arity(), (0..dim).map(|x| (x, f.eval(x))))
    }

    pub fn arity(&self) -> usize {
        self.n
    }

    /// Number of distinct inputs.
    pub fn m(&self) -> usize {
        self.entries.len()
    }

    pub fn label(&self, x: usize) -> Option<i8> {
        self.entries.get(&x).copied()
    }

    /// Entries in ascending input order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, i8)> + '_ {
        self.entries.iter().map(|(&x, &y)| (x, y))
    }

    pub fn to_json(&self) -> String {
        let wire = TrainingSetWire {
            n: self.n,
            examples: self
                .iter()
                .map(|(x, y)| ExampleWire { x: bits::format_bits(x, self.n), y: y as i64 })
                .collect(),
        };
        serde_json::to_string(&wire).expect("training set wire serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let wire: TrainingSetWire = serde_json::from_str(text)?;
        let mut pairs = Vec::with_capacity(wire.examples.len());
        for ex in &wire.examples {
            let x = bits::parse_bits_with_arity(&ex.x, wire.n)?;
            let y = match ex.y {
                1 => 1i8,
                -1 => -1i8,
                other => return Err(Error::InvalidLabel { value: other }),
            };
            pairs.push((x, y));
        }
        Self::from_pairs(wire.n, pairs)
    }
}

/// Draw `target` examples with replacement from the oracle and deduplicate.
///
/// The resulting m is the number of distinct inputs seen, at most `target`.
pub fn build_training_set<O: ExampleOracle + ?Sized, R: Rng + ?Sized>(
    oracle: &O,
    target: usize,
    rng: &mut R,
) -> Result<TrainingSet> {
    if target == 0 {
        return Err(Error::InvalidParameter { reason: "draw target must be >= 1".into() });
    }
    let n = oracle.arity();
    let mut entries: BTreeMap<usize, i8> = BTreeMap::new();
    for _ in 0..target {
        let (x, y) = oracle.draw_example(rng);
        if let Some(prev) = entries.insert(x, y) {
            if prev != y {
                return Err(Error::ConflictingLabel { input: bits::format_bits(x, n) });
            }
        }
    }
    Ok(TrainingSet { n, entries })
}
