//! Experiment orchestration: per-trial learner runs over a grid of arities,
//! deterministic per-trial seeding, oracle-side verification fields, and the
//! CSV/JSON outputs of the `scale` command.

use std::fmt::Write as _;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use qsample_core::boolean_fn::{build_training_set, BipolarFunction, TrainingSet};
use qsample_core::learner::{
    estimate_coefficient, run_sampling, sqrt_budget, sqrt_examples, StoppingPolicy,
    WeakHypothesis,
};
use qsample_core::seeds::{derive_seed, rng_from_seed, trial_stream};
use qsample_core::stats::{linear_fit, median};
use qsample_core::walsh::FourierSpectrum;
use qsample_core::{bits, random_dnf};

use crate::analysis::{agreement_rate, magnitude_rank, probability_profile};
use crate::error::{HarnessError, Result};

pub const SCHEMA_VERSION: u32 = 1;

/// How many examples to draw for each arity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MRule {
    /// ceil(sqrt(2^n)) draws: the square-root example rule.
    Sqrt2n,
    /// A fixed number of draws regardless of arity.
    Fixed(usize),
    /// The complete truth table (verification regime; bypasses the oracle).
    FullTable,
}

/// Stopping policy, resolvable per arity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PolicyConfig {
    FixedBudget { samples: u64 },
    /// Budget ceil(factor * sqrt(2^n)), scaling with the arity.
    FixedBudgetSqrt { factor: f64 },
    SequentialGap { confidence: f64, max_samples: u64 },
}

impl PolicyConfig {
    pub fn resolve(&self, n: usize) -> StoppingPolicy {
        match *self {
            PolicyConfig::FixedBudget { samples } => StoppingPolicy::FixedBudget { samples },
            PolicyConfig::FixedBudgetSqrt { factor } => {
                StoppingPolicy::FixedBudget { samples: sqrt_budget(n, factor) }
            }
            PolicyConfig::SequentialGap { confidence, max_samples } => {
                StoppingPolicy::SequentialGap { confidence, max_samples }
            }
        }
    }
}

/// Full description of a scaling experiment. Every field has a default, so
/// config files may be partial; the defaults are the stock scaling run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    pub n_values: Vec<usize>,
    pub trials: usize,
    pub dnf_terms: usize,
    pub dnf_literals: usize,
    /// Resample targets whose truth table is constant (nothing to learn).
    pub reject_constant: bool,
    pub m_rule: MRule,
    pub policy: PolicyConfig,
    /// Fresh examples for the classical estimate of the selected coefficient.
    pub m_est: usize,
    /// Ignore the all-zero index during selection.
    pub exclude_zero: bool,
    /// `hit` marks trials whose identified coefficient ranks within the top
    /// ceil(quantile * 2^n) magnitudes of the exact spectrum.
    pub hit_quantile: f64,
    pub base_seed: u64,
    /// Budget factor c in ceil(c * sqrt(2^n)); also used for projections.
    pub budget_factor: f64,
    /// Include per-trial wall time in the CSV (breaks byte-identical reruns).
    pub timings: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            n_values: vec![8, 10, 12, 14, 16],
            trials: 50,
            dnf_terms: 4,
            dnf_literals: 2,
            reject_constant: true,
            m_rule: MRule::Sqrt2n,
            policy: PolicyConfig::SequentialGap { confidence: 0.85, max_samples: 4_000_000 },
            m_est: 1600,
            exclude_zero: false,
            hit_quantile: 0.01,
            base_seed: 1,
            budget_factor: 8.0,
            timings: false,
        }
    }
}

impl ExperimentConfig {
    /// The headline-scale configuration: n = 30, m = 32768. Far past the
    /// default cap; running it produces the resource projection instead.
    pub fn headline() -> Self {
        Self { n_values: vec![30], trials: 1, ..Self::default() }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_values.is_empty() {
            return Err(HarnessError::Usage("n_values must be non-empty".into()));
        }
        if self.n_values.iter().any(|&n| n == 0 || n > bits::MAX_ARITY) {
            return Err(HarnessError::Usage(format!(
                "every n must be in 1..={}",
                bits::MAX_ARITY
            )));
        }
        if self.trials == 0 {
            return Err(HarnessError::Usage("trials must be >= 1".into()));
        }
        if self.dnf_terms == 0 || self.dnf_literals == 0 {
            return Err(HarnessError::Usage("dnf shape values must be >= 1".into()));
        }
        if self.m_est == 0 {
            return Err(HarnessError::Usage("m_est must be >= 1".into()));
        }
        if !(self.hit_quantile > 0.0 && self.hit_quantile <= 1.0) {
            return Err(HarnessError::Usage("hit_quantile must be in (0, 1]".into()));
        }
        Ok(())
    }

    /// Refuse any arity past the cap, quoting the projected cost instead.
    pub fn check_resources(&self, cap: usize) -> Result<()> {
        for &n in &self.n_values {
            if n > cap {
                return Err(HarnessError::Resource(projection(n, cap, self.budget_factor)));
            }
        }
        Ok(())
    }
}

/// The refusal message for an over-cap arity: what the run would need.
pub fn projection(n: usize, cap: usize, budget_factor: f64) -> String {
    let gib = (1u128 << n) as f64 * 8.0 / (1u64 << 30) as f64;
    let m = sqrt_examples(n);
    let samples = sqrt_budget(n, budget_factor);
    format!(
        "arity {n} exceeds the qubit cap {cap}: a 2^{n}-amplitude state needs ~{gib:.1} GiB; \
         projected run: m = {m} examples, ~{samples} samples (ceil({budget_factor} * sqrt(2^{n})))"
    )
}

/// One row of the scale experiment.
#[derive(Debug, Clone, Serialize)]
pub struct TrialRecord {
    pub n: usize,
    pub trial: usize,
    pub seed: u64,
    pub m: usize,
    pub samples_used: u64,
    pub converged: bool,
    pub identified: String,
    pub estimate: f64,
    pub true_argmax: String,
    pub true_max_coeff: f64,
    pub identified_coeff: f64,
    pub identified_rank: usize,
    pub hit: bool,
    pub agreement: f64,
    pub nonzero_coeffs: usize,
    pub max_prob: f64,
    pub min_nonzero_prob: f64,
    pub prob_ratio: f64,
    pub wall_ms: u64,
    pub error: Option<String>,
}

impl TrialRecord {
    fn failed(n: usize, trial: usize, seed: u64, error: String, wall_ms: u64) -> Self {
        Self {
            n,
            trial,
            seed,
            m: 0,
            samples_used: 0,
            converged: false,
            identified: String::new(),
            estimate: 0.0,
            true_argmax: String::new(),
            true_max_coeff: 0.0,
            identified_coeff: 0.0,
            identified_rank: 0,
            hit: false,
            agreement: 0.0,
            nonzero_coeffs: 0,
            max_prob: 0.0,
            min_nonzero_prob: 0.0,
            prob_ratio: 0.0,
            wall_ms,
            error: Some(error),
        }
    }
}

fn generate_target<R: rand::Rng + ?Sized>(
    config: &ExperimentConfig,
    n: usize,
    rng: &mut R,
    cap: usize,
) -> Result<BipolarFunction> {
    let literals = config.dnf_literals.min(n);
    let mut candidate = BipolarFunction::from_dnf(random_dnf(n, config.dnf_terms, literals, rng)?);
    if config.reject_constant {
        for _ in 0..64 {
            let table = candidate.truth_table(cap)?;
            if table.iter().any(|&v| v != table[0]) {
                break;
            }
            candidate = BipolarFunction::from_dnf(random_dnf(n, config.dnf_terms, literals, rng)?);
        }
    }
    Ok(candidate)
}

fn run_trial_inner(
    config: &ExperimentConfig,
    n: usize,
    trial: usize,
    seed: u64,
    cap: usize,
) -> Result<TrialRecord> {
    let mut rng = rng_from_seed(seed);
    let f = generate_target(config, n, &mut rng, cap)?;

    let t: TrainingSet = match config.m_rule {
        MRule::Sqrt2n => build_training_set(&f, sqrt_examples(n), &mut rng)?,
        MRule::Fixed(target) => build_training_set(&f, target, &mut rng)?,
        MRule::FullTable => TrainingSet::full_table(&f, cap)?,
    };

    let policy = config.policy.resolve(n);
    let outcome = run_sampling(&t, &policy, config.exclude_zero, &mut rng, cap)?;
    let estimate = estimate_coefficient(&f, outcome.identified, config.m_est, &mut rng)?;

    // Oracle-side truth: the exact spectrum is never visible to the learner
    // path above; it only grades the outcome.
    let spectrum = FourierSpectrum::exact(&f, cap)?;
    let dim = 1usize << n;
    let true_argmax = spectrum.argmax_magnitude();
    let rank = magnitude_rank(&spectrum, outcome.identified);
    let rank_cutoff = ((config.hit_quantile * dim as f64).ceil() as usize).max(1);

    let agreement = if estimate == 0.0 {
        // No sign information: the hypothesis is a coin flip.
        0.5
    } else {
        let h = WeakHypothesis {
            index: outcome.identified,
            sign: if estimate > 0.0 { 1 } else { -1 },
        };
        agreement_rate(&h, &f)
    };

    let profile = probability_profile(&t, cap)?;

    Ok(TrialRecord {
        n,
        trial,
        seed,
        m: t.m(),
        samples_used: outcome.histogram.total(),
        converged: outcome.converged,
        identified: bits::format_bits(outcome.identified, n),
        estimate,
        true_argmax: bits::format_bits(true_argmax, n),
        true_max_coeff: spectrum.coefficient(true_argmax),
        identified_coeff: spectrum.coefficient(outcome.identified),
        identified_rank: rank,
        hit: rank <= rank_cutoff,
        agreement,
        nonzero_coeffs: profile.nonzero,
        max_prob: profile.max,
        min_nonzero_prob: profile.min_nonzero,
        prob_ratio: profile.ratio(),
        wall_ms: 0,
        error: None,
    })
}

/// One grid cell, never panicking the run: failures become marker rows.
pub fn run_trial(config: &ExperimentConfig, n: usize, trial: usize, cap: usize) -> TrialRecord {
    let seed = derive_seed(config.base_seed, trial_stream(n, trial));
    let start = Instant::now();
    let mut record = match run_trial_inner(config, n, trial, seed, cap) {
        Ok(record) => record,
        Err(e) => TrialRecord::failed(n, trial, seed, e.to_string(), 0),
    };
    record.wall_ms = start.elapsed().as_millis() as u64;
    record
}

/// Per-arity aggregate statistics over the non-error trials.
#[derive(Debug, Clone, Serialize)]
pub struct PerArity {
    pub n: usize,
    pub trials: usize,
    pub errors: usize,
    /// Median samples over all trials; non-converged trials count at the cap.
    pub median_samples: f64,
    /// Median samples over converged trials only (0 when none converged).
    pub median_samples_converged: f64,
    pub convergence_rate: f64,
    pub hit_rate: f64,
    pub mean_agreement: f64,
    pub median_prob_ratio: f64,
    pub median_nonzero_coeffs: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub schema_version: u32,
    pub config: ExperimentConfig,
    pub per_n: Vec<PerArity>,
    /// Least-squares slope of log2(median samples) against n.
    pub slope_log2_median_samples_vs_n: Option<f64>,
    pub slope_intercept: Option<f64>,
}

#[derive(Debug)]
pub struct ScaleOutcome {
    pub records: Vec<TrialRecord>,
    pub summary: Summary,
}

/// Run the full grid. Trials are independent; `workers` caps the thread
/// count (0 = one per CPU). Output is identical for any worker count: seeds
/// derive from (n, trial) and records are sorted before aggregation.
pub fn run_scale(config: &ExperimentConfig, workers: usize, cap: usize) -> Result<ScaleOutcome> {
    config.validate()?;
    config.check_resources(cap)?;

    let grid: Vec<(usize, usize)> = config
        .n_values
        .iter()
        .flat_map(|&n| (0..config.trials).map(move |trial| (n, trial)))
        .collect();

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| HarnessError::Usage(format!("thread pool: {e}")))?;
    let mut records: Vec<TrialRecord> =
        pool.install(|| grid.par_iter().map(|&(n, trial)| run_trial(config, n, trial, cap)).collect());
    records.sort_by_key(|r| (r.n, r.trial));

    let summary = summarize(config, &records);
    Ok(ScaleOutcome { records, summary })
}

pub fn summarize(config: &ExperimentConfig, records: &[TrialRecord]) -> Summary {
    let mut per_n = Vec::new();
    for &n in &config.n_values {
        let rows: Vec<&TrialRecord> = records.iter().filter(|r| r.n == n).collect();
        let ok: Vec<&&TrialRecord> = rows.iter().filter(|r| r.error.is_none()).collect();
        let errors = rows.len() - ok.len();
        let stat = |f: &dyn Fn(&TrialRecord) -> f64| -> Vec<f64> {
            ok.iter().map(|r| f(r)).collect()
        };
        let converged: Vec<f64> = ok
            .iter()
            .filter(|r| r.converged)
            .map(|r| r.samples_used as f64)
            .collect();
        let (median_samples, convergence_rate, hit_rate, mean_agreement, ratio, nonzero) =
            if ok.is_empty() {
                (0.0, 0.0, 0.0, 0.0, 0.0, 0.0)
            } else {
                (
                    median(&stat(&|r| r.samples_used as f64)),
                    converged.len() as f64 / ok.len() as f64,
                    ok.iter().filter(|r| r.hit).count() as f64 / ok.len() as f64,
                    stat(&|r| r.agreement).iter().sum::<f64>() / ok.len() as f64,
                    median(&stat(&|r| r.prob_ratio)),
                    median(&stat(&|r| r.nonzero_coeffs as f64)),
                )
            };
        per_n.push(PerArity {
            n,
            trials: rows.len(),
            errors,
            median_samples,
            median_samples_converged: if converged.is_empty() { 0.0 } else { median(&converged) },
            convergence_rate,
            hit_rate,
            mean_agreement,
            median_prob_ratio: ratio,
            median_nonzero_coeffs: nonzero,
        });
    }

    let fit_points: Vec<(f64, f64)> = per_n
        .iter()
        .filter(|p| p.median_samples > 0.0)
        .map(|p| (p.n as f64, p.median_samples.log2()))
        .collect();
    let (slope, intercept) = if fit_points.len() >= 2 {
        let xs: Vec<f64> = fit_points.iter().map(|p| p.0).collect();
        let ys: Vec<f64> = fit_points.iter().map(|p| p.1).collect();
        let (s, i) = linear_fit(&xs, &ys);
        (Some(s), Some(i))
    } else {
        (None, None)
    };

    Summary {
        schema_version: SCHEMA_VERSION,
        config: config.clone(),
        per_n,
        slope_log2_median_samples_vs_n: slope,
        slope_intercept: intercept,
    }
}

fn csv_escape(text: &str) -> String {
    format!("\"{}\"", text.replace('"', "\"\""))
}

/// Per-trial records as CSV. The wall-time column appears only when
/// requested, so default outputs are byte-identical across reruns.
pub fn records_to_csv(records: &[TrialRecord], timings: bool) -> String {
    let mut out = String::from(
        "schema_version,n,trial,seed,m,samples_used,converged,identified,estimate,\
         true_argmax,true_max_coeff,identified_coeff,identified_rank,hit,agreement,\
         nonzero_coeffs,max_prob,min_nonzero_prob,prob_ratio",
    );
    if timings {
        out.push_str(",wall_ms");
    }
    out.push_str(",error\n");
    for r in records {
        let _ = write!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            SCHEMA_VERSION,
            r.n,
            r.trial,
            r.seed,
            r.m,
            r.samples_used,
            r.converged,
            r.identified,
            r.estimate,
            r.true_argmax,
            r.true_max_coeff,
            r.identified_coeff,
            r.identified_rank,
            r.hit,
            r.agreement,
            r.nonzero_coeffs,
            r.max_prob,
            r.min_nonzero_prob,
            r.prob_ratio,
        );
        if timings {
            let _ = write!(out, ",{}", r.wall_ms);
        }
        match &r.error {
            Some(e) => {
                let _ = writeln!(out, ",{}", csv_escape(e));
            }
            None => out.push_str(",\n"),
        }
    }
    out
}

pub fn summary_to_json(summary: &Summary) -> String {
    let mut text = serde_json::to_string_pretty(summary).expect("summary serializes");
    text.push('\n');
    text
}
