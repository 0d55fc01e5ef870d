//! Command implementations. Each returns the process exit code:
//! 0 success, 1 usage, 2 resource refusal, 3 learner non-convergence,
//! 4 selftest failure (1/2/4 surface as errors; see `HarnessError`).

use std::path::Path;

use qsample_core::boolean_fn::{BipolarFunction, TrainingSet};
use qsample_core::learner::{
    estimate_coefficient, estimation_examples, run_learner, run_sampling, sqrt_examples,
    LearnerConfig, LearnerResult, StoppingPolicy,
};
use qsample_core::seeds::rng_from_seed;
use qsample_core::walsh::FourierSpectrum;
use qsample_core::{bits, random_dnf, DEFAULT_QUBIT_CAP};

use crate::cli::{Cli, Command, GenDnfArgs, LearnArgs, ScaleArgs, SelftestArgs, SpectrumArgs};
use crate::error::{HarnessError, Result};
use crate::experiment::{records_to_csv, run_scale, summary_to_json, ExperimentConfig};
use crate::{files, selftest};

/// Environment variable overriding the default qubit cap.
pub const CAP_ENV_VAR: &str = "QSAMPLE_QUBIT_CAP";

fn resolve_cap(flag: Option<usize>) -> Result<usize> {
    if let Some(cap) = flag {
        return Ok(cap);
    }
    match std::env::var(CAP_ENV_VAR) {
        Ok(text) => text
            .parse()
            .map_err(|_| HarnessError::Usage(format!("{CAP_ENV_VAR} must be an integer: {text:?}"))),
        Err(_) => Ok(DEFAULT_QUBIT_CAP),
    }
}

fn emit(out: Option<&Path>, content: &str) -> Result<()> {
    match out {
        Some(path) => files::write_string(path, content),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

pub fn run(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Spectrum(args) => cmd_spectrum(args),
        Command::Learn(args) => cmd_learn(args),
        Command::Scale(args) => cmd_scale(args),
        Command::GenDnf(args) => cmd_gen_dnf(args),
        Command::Selftest(args) => cmd_selftest(args),
    }
}

pub fn cmd_spectrum(args: SpectrumArgs) -> Result<i32> {
    let cap = resolve_cap(args.cap)?;
    let f = files::load_function(&args.input)?;
    let spectrum = FourierSpectrum::exact(&f, cap)?;
    let content =
        if args.json { format!("{}\n", spectrum.to_json()) } else { spectrum.to_csv() };
    emit(args.out.as_deref(), &content)?;
    Ok(0)
}

fn learn_target(args: &LearnArgs, rng: &mut impl rand::Rng) -> Result<BipolarFunction> {
    let sources = [
        args.table.is_some(),
        args.dnf.is_some(),
        args.parity.is_some(),
        args.gen_n.is_some(),
    ];
    if sources.iter().filter(|&&s| s).count() != 1 {
        return Err(HarnessError::Usage(
            "specify exactly one target: --table, --dnf, --parity, or --gen-n".into(),
        ));
    }
    if let Some(path) = &args.table {
        return files::load_function(path);
    }
    if let Some(path) = &args.dnf {
        return files::load_function(path);
    }
    if let Some(mask_bits) = &args.parity {
        let (mask, n) = bits::parse_bits(mask_bits)?;
        return Ok(BipolarFunction::parity(n, mask)?);
    }
    let n = args.gen_n.expect("counted above");
    Ok(BipolarFunction::from_dnf(random_dnf(n, args.gen_terms, args.gen_literals, rng)?))
}

pub fn cmd_learn(args: LearnArgs) -> Result<i32> {
    let cap = resolve_cap(args.cap)?;
    let mut rng = rng_from_seed(args.seed);
    let f = learn_target(&args, &mut rng)?;
    let n = f.arity();

    if args.budget.is_some() && args.gap_delta.is_some() {
        return Err(HarnessError::Usage("--budget and --gap-delta are exclusive".into()));
    }
    let policy = match args.budget {
        Some(samples) => StoppingPolicy::FixedBudget { samples },
        None => StoppingPolicy::SequentialGap {
            confidence: args.gap_delta.unwrap_or(0.95),
            max_samples: args.max_samples,
        },
    };
    let m_est = args.m_est.unwrap_or_else(|| estimation_examples(args.precision));

    let result: LearnerResult = if args.m == "full" {
        // Verification regime: encode the complete truth table directly.
        let t = TrainingSet::full_table(&f, cap)?;
        let outcome = run_sampling(&t, &policy, args.exclude_zero, &mut rng, cap)?;
        let estimate = estimate_coefficient(&f, outcome.identified, m_est, &mut rng)?;
        LearnerResult {
            n,
            m: t.m(),
            identified: outcome.identified,
            estimate,
            samples_used: outcome.histogram.total(),
            estimation_examples: m_est,
            converged: outcome.converged,
            histogram: outcome.histogram,
        }
    } else {
        let m_draws = match args.m.as_str() {
            "sqrt" => sqrt_examples(n),
            text => text.parse().map_err(|_| {
                HarnessError::Usage(format!("--m must be \"sqrt\", \"full\", or a count: {text:?}"))
            })?,
        };
        let config =
            LearnerConfig { m_draws, policy, m_est, exclude_zero: args.exclude_zero };
        run_learner(&f, &config, &mut rng, cap)?
    };

    let json = format!("{}\n", result.to_json());
    print!("{json}");
    if let Some(path) = &args.out {
        files::write_string(path, &json)?;
    }
    Ok(if result.converged { 0 } else { 3 })
}

pub fn cmd_scale(args: ScaleArgs) -> Result<i32> {
    let cap = resolve_cap(args.cap)?;
    if args.config.is_some() && args.preset.is_some() {
        return Err(HarnessError::Usage("--config and --preset are exclusive".into()));
    }
    let mut config = if let Some(path) = &args.config {
        ExperimentConfig::from_json(&files::read_to_string(path)?)?
    } else if let Some(preset) = &args.preset {
        match preset.as_str() {
            "default" => ExperimentConfig::default(),
            "headline" => ExperimentConfig::headline(),
            other => {
                return Err(HarnessError::Usage(format!(
                    "unknown preset {other:?}; available: default, headline"
                )))
            }
        }
    } else {
        ExperimentConfig::default()
    };
    if let Some(seed) = args.seed {
        config.base_seed = seed;
    }
    if args.timings {
        config.timings = true;
    }

    let outcome = run_scale(&config, args.workers, cap)?;
    let csv = records_to_csv(&outcome.records, config.timings);
    let summary = summary_to_json(&outcome.summary);
    files::write_string(&args.out.join("records.csv"), &csv)?;
    files::write_string(&args.out.join("summary.json"), &summary)?;
    print!("{summary}");
    Ok(0)
}

pub fn cmd_gen_dnf(args: GenDnfArgs) -> Result<i32> {
    let mut rng = rng_from_seed(args.seed);
    let dnf = random_dnf(args.n, args.terms, args.literals, &mut rng)?;
    emit(args.out.as_deref(), &format!("{}\n", dnf.to_json()))?;
    Ok(0)
}

pub fn cmd_selftest(args: SelftestArgs) -> Result<i32> {
    let stdout = std::io::stdout();
    let failures = selftest::run_all(args.seed, stdout.lock())
        .map_err(|e| HarnessError::io("stdout", e))?;
    if failures.is_empty() {
        Ok(0)
    } else {
        Err(HarnessError::Selftest(failures.join(", ")))
    }
}
