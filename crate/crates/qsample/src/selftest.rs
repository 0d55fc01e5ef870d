//! The cross-module verification suites: every oracle the tests rely on,
//! runnable from the CLI. Each suite is deterministic given its seed and
//! reports the first violated check.

use rand::Rng;
use qsample_core::boolean_fn::{build_training_set, BipolarFunction, TrainingSet};
use qsample_core::qstate::{BornSampler, StateVector};
use qsample_core::seeds::rng_from_seed;
use qsample_core::stats::{chi_square_gof, kahan_sum};
use qsample_core::walsh::{
    approx_coefficient, chi, evaluate_full_expansion, fwht, memorization_value, FourierSpectrum,
    Scaling,
};
use qsample_core::{random_dnf, DEFAULT_QUBIT_CAP};

type Check = std::result::Result<(), String>;

/// A named verification suite.
pub type Suite = (&'static str, fn(u64) -> Check);

const CAP: usize = DEFAULT_QUBIT_CAP;

/// Brute-force reference transform: the explicit +-1 matrix in O(4^n).
pub fn naive_walsh(values: &[f64]) -> Vec<f64> {
    let dim = values.len();
    (0..dim)
        .map(|a| (0..dim).map(|x| chi(a, x) as f64 * values[x]).sum())
        .collect()
}

fn random_training_set<R: Rng + ?Sized>(n: usize, rng: &mut R) -> TrainingSet {
    let dim = 1usize << n;
    let dnf = random_dnf(n, 3, 2.min(n), rng).expect("valid generator parameters");
    let f = BipolarFunction::from_dnf(dnf);
    build_training_set(&f, (dim / 2).max(1), rng).expect("target >= 1")
}

/// Fast transform against the explicit matrix on random vectors.
pub fn transform_reference_suite(seed: u64) -> Check {
    let mut rng = rng_from_seed(seed);
    for round in 0..50 {
        let n = rng.random_range(1..=8usize);
        let dim = 1usize << n;
        let v: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
        let expect = naive_walsh(&v);
        let mut got = v.clone();
        fwht(&mut got, Scaling::None).map_err(|e| e.to_string())?;
        for a in 0..dim {
            if (got[a] - expect[a]).abs() > 1e-10 {
                return Err(format!(
                    "round {round}, n={n}, index {a}: fast {} vs reference {}",
                    got[a], expect[a]
                ));
            }
        }
    }
    Ok(())
}

/// Exact orthonormality of the parity basis in integer arithmetic.
pub fn orthonormality_suite(_seed: u64) -> Check {
    for n in 1usize..=7 {
        let dim = 1usize << n;
        for a in 0..dim {
            for b in 0..dim {
                let sum: i64 = (0..dim).map(|x| (chi(a, x) * chi(b, x)) as i64).sum();
                let expect = if a == b { dim as i64 } else { 0 };
                if sum != expect {
                    return Err(format!("n={n} a={a} b={b}: inner product {sum}"));
                }
            }
        }
    }
    Ok(())
}

/// Unit spectral energy of random bipolar functions.
pub fn parseval_suite(seed: u64) -> Check {
    let mut rng = rng_from_seed(seed);
    for round in 0..30 {
        let n = rng.random_range(1..=16usize);
        let dim = 1usize << n;
        let table: Vec<i8> = (0..dim).map(|_| if rng.random::<bool>() { 1 } else { -1 }).collect();
        let f = BipolarFunction::from_table(n, table).expect("valid table");
        let spectrum = FourierSpectrum::exact(&f, CAP).map_err(|e| e.to_string())?;
        let energy = kahan_sum(spectrum.coefficients().iter().map(|c| c * c));
        if (energy - 1.0).abs() > 1e-10 {
            return Err(format!("round {round}, n={n}: spectral energy {energy}"));
        }
    }
    Ok(())
}

/// Full-support reconstruction memorizes the training set and returns 0
/// off it, for random training sets, exhaustively over inputs.
pub fn memorization_suite(seed: u64) -> Check {
    let mut rng = rng_from_seed(seed);
    for round in 0..25 {
        let n = rng.random_range(2..=8usize);
        let t = random_training_set(n, &mut rng);
        let spectrum = FourierSpectrum::approximate(&t, CAP).map_err(|e| e.to_string())?;
        for x in 0..(1usize << n) {
            let got = evaluate_full_expansion(&spectrum, x);
            let oracle = memorization_value(&t, x);
            if (got - oracle).abs() > 1e-9 {
                return Err(format!("round {round}, n={n}, x={x}: {got} vs {oracle}"));
            }
        }
    }
    Ok(())
}

/// Post-transform amplitudes against sqrt(m/2^n)-scaled classical
/// coefficients, with a pluggable transform so a fault anywhere in the
/// quantum path is caught.
pub fn coefficient_bridge_suite_with<F>(walsh: F, seed: u64) -> Check
where
    F: Fn(StateVector) -> StateVector,
{
    let mut rng = rng_from_seed(seed);
    for round in 0..40 {
        let n = rng.random_range(2..=10usize);
        let dim = 1usize << n;
        let t = random_training_set(n, &mut rng);
        let state = StateVector::encode_training_set(&t, CAP).map_err(|e| e.to_string())?;
        let state = walsh(state);
        let scale = (t.m() as f64 / dim as f64).sqrt();
        for a in 0..dim {
            let expect = scale * approx_coefficient(&t, a).map_err(|e| e.to_string())?;
            if (state.amplitude(a) - expect).abs() > 1e-10 {
                return Err(format!(
                    "round {round}, n={n}, index {a}: amplitude {} vs scaled coefficient {}",
                    state.amplitude(a),
                    expect
                ));
            }
        }
    }
    Ok(())
}

pub fn coefficient_bridge_suite(seed: u64) -> Check {
    coefficient_bridge_suite_with(StateVector::apply_walsh, seed)
}

/// Measurement frequencies against squared amplitudes by chi-square.
pub fn born_sampling_suite(seed: u64) -> Check {
    let mut rng = rng_from_seed(seed);
    for round in 0..4 {
        let n = rng.random_range(3..=6usize);
        let dim = 1usize << n;
        let mut amps: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
        let norm = kahan_sum(amps.iter().map(|a| a * a)).sqrt();
        amps.iter_mut().for_each(|a| *a /= norm);
        let state = StateVector::from_amplitudes(n, amps).map_err(|e| e.to_string())?;
        let sampler = BornSampler::new(&state).map_err(|e| e.to_string())?;

        let draws = 200_000u64;
        let mut counts = vec![0u64; dim];
        for _ in 0..draws {
            counts[sampler.draw(&mut rng)] += 1;
        }
        let expected: Vec<f64> =
            state.amplitudes().iter().map(|a| a * a * draws as f64).collect();
        let test = chi_square_gof(&counts, &expected, 5.0);
        if test.p_value <= 0.001 {
            return Err(format!(
                "round {round}, n={n}: chi-square {} at {} dof, p = {}",
                test.statistic, test.dof, test.p_value
            ));
        }
    }
    Ok(())
}

/// All suites in a fixed order.
pub fn suites() -> Vec<Suite> {
    vec![
        ("transform-reference", transform_reference_suite),
        ("orthonormality", orthonormality_suite),
        ("parseval", parseval_suite),
        ("memorization", memorization_suite),
        ("coefficient-bridge", coefficient_bridge_suite),
        ("born-sampling", born_sampling_suite),
    ]
}

/// Run every suite, printing one line each; returns the failing names.
pub fn run_all(seed: u64, mut out: impl std::io::Write) -> std::io::Result<Vec<String>> {
    let mut failures = Vec::new();
    for (name, suite) in suites() {
        match suite(seed) {
            Ok(()) => writeln!(out, "{name:<20} ok")?,
            Err(reason) => {
                writeln!(out, "{name:<20} FAIL: {reason}")?;
                failures.push(name.to_string());
            }
        }
    }
    Ok(failures)
}
