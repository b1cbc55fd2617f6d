//! Cross-module invariant suites with a machine-readable report.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::dynamics::{
    check_approximation, continued_fraction_value, convergents_with, default_seed,
    determinant_identity_holds, expand, invariance_residual, NatExtOrbit, QRecurrence,
};
use crate::error::{Error, Result};
use crate::gaussian::{nearest_gaussian, recip};
use crate::regions::{assign_mark, distance_to_boundary, region_after, Digit, Subregion};
use crate::scalar::exact_rational;
use crate::taylor::kernel_matrix_fd_check;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Invariance,
    JetFd,
    Automaton,
    RoundTrip,
    Determinant,
    Approximation,
    Admissible,
}

impl Suite {
    pub const ALL: [Suite; 7] = [
        Suite::Invariance,
        Suite::JetFd,
        Suite::Automaton,
        Suite::RoundTrip,
        Suite::Determinant,
        Suite::Approximation,
        Suite::Admissible,
    ];
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Suite::Invariance => "invariance",
            Suite::JetFd => "jet-fd",
            Suite::Automaton => "automaton",
            Suite::RoundTrip => "round-trip",
            Suite::Determinant => "determinant",
            Suite::Approximation => "approximation",
            Suite::Admissible => "admissible",
        })
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.to_string() == s.trim())
            .ok_or_else(|| Error::Config(format!("unknown suite {s:?}")))
    }
}

#[derive(Clone, Debug)]
pub struct ValidateOptions {
    /// Random inputs per sampled suite.
    pub samples: usize,
    /// Depth of expansions in the convergent suites.
    pub depth: usize,
    /// Orbit length of the admissibility fuzzer.
    pub orbit_steps: u64,
    pub rng_seed: u64,
    /// Sign of the `q_{n-2}` term; `Minus` injects a known fault.
    pub q_recurrence: QRecurrence,
}

impl Default for ValidateOptions {
    fn default() -> Self {
        Self {
            samples: 1000,
            depth: 20,
            orbit_steps: 1_000_000,
            rng_seed: 1,
            q_recurrence: QRecurrence::Plus,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteResult {
    pub suite: Suite,
    pub pass: bool,
    pub checked: u64,
    pub failures: u64,
    /// Worst observed value where meaningful (residual, deviation).
    pub worst: Option<f64>,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ValidationReport {
    pub pass: bool,
    pub suites: Vec<SuiteResult>,
}

pub fn run(suites: &[Suite], opts: &ValidateOptions) -> ValidationReport {
    let results: Vec<SuiteResult> = suites.iter().map(|&s| run_suite(s, opts)).collect();
    ValidationReport {
        pass: results.iter().all(|r| r.pass),
        suites: results,
    }
}

pub fn run_suite(suite: Suite, opts: &ValidateOptions) -> SuiteResult {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.rng_seed);
    let outcome = match suite {
        Suite::Invariance => invariance(&mut rng, opts.samples.max(1) * 100),
        Suite::JetFd => jet_fd(&mut rng, opts.samples.clamp(1, 25)),
        Suite::Automaton => automaton(),
        Suite::RoundTrip => round_trip(&mut rng, opts.samples),
        Suite::Determinant => determinant(&mut rng, opts),
        Suite::Approximation => approximation(&mut rng, opts),
        Suite::Admissible => admissible(opts.orbit_steps),
    };
    let (checked, failures, worst, detail) = match outcome {
        Ok(v) => v,
        Err(e) => (0, 1, None, e.to_string()),
    };
    SuiteResult {
        suite,
        pass: failures == 0 && checked > 0,
        checked,
        failures,
        worst,
        detail,
    }
}

type Outcome = Result<(u64, u64, Option<f64>, String)>;

fn random_in_k(rng: &mut ChaCha8Rng) -> Complex<f64> {
    loop {
        let z = Complex::new(rng.random_range(-0.5..0.5), rng.random_range(-0.5..0.5));
        if z.norm_sqr() > 1e-6 {
            return z;
        }
    }
}

fn random_in_disk(rng: &mut ChaCha8Rng) -> Complex<f64> {
    loop {
        let w = Complex::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        if w.norm_sqr() <= 1.0 {
            return w;
        }
    }
}

fn invariance(rng: &mut ChaCha8Rng, n: usize) -> Outcome {
    let mut worst = 0.0f64;
    let mut failures = 0;
    for _ in 0..n {
        let (z, w) = (random_in_k(rng), random_in_disk(rng));
        let r = invariance_residual(z, w)?;
        worst = worst.max(r);
        if !(r < 1e-10) {
            failures += 1;
        }
    }
    Ok((n as u64, failures, Some(worst), "residual < 1e-10".into()))
}

fn jet_fd(rng: &mut ChaCha8Rng, n: usize) -> Outcome {
    let mut cases = vec![(-0.7, -0.2, -0.5, -0.5), (0.0, 0.0, -0.5, -0.5), (0.3, -0.9, -0.5, 0.0)];
    for _ in 0..n {
        cases.push((
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
            rng.random_range(-0.5..0.5),
            rng.random_range(-0.5..0.5),
        ));
    }
    let mut worst = 0.0f64;
    let mut failures = 0;
    let mut checked = 0;
    for (a, b, x0, y0) in cases {
        match kernel_matrix_fd_check(a, b, x0, y0, 4) {
            Ok(d) => {
                checked += 1;
                worst = worst.max(d);
                if !(d < 1e-5) {
                    failures += 1;
                }
            }
            Err(Error::SingularKernel { .. }) => {}
            Err(e) => return Err(e),
        }
    }
    Ok((checked, failures, Some(worst), "max relative deviation < 1e-5, m+n <= 4".into()))
}

fn automaton() -> Outcome {
    let states: Vec<Subregion> = Subregion::all().collect();
    let mut checked = 0;
    let mut failures = 0;
    for &s in &states {
        for re in -8i64..=8 {
            for im in -8i64..=8 {
                for marked in [false, true] {
                    let Ok(d) = Digit::with_mark(Complex::new(re, im), marked) else {
                        continue;
                    };
                    checked += 1;
                    if s.admits(&d) && !states.contains(&region_after(&d)) {
                        failures += 1;
                    }
                }
            }
        }
    }
    if states.len() != 13 {
        failures += 1;
    }
    Ok((checked, failures, None, format!("{} states, transitions closed", states.len())))
}

fn random_exact_point(rng: &mut ChaCha8Rng) -> Complex<num_rational::BigRational> {
    let z = random_in_k(rng);
    Complex::new(exact_rational(z.re).unwrap(), exact_rational(z.im).unwrap())
}

fn round_trip(rng: &mut ChaCha8Rng, n: usize) -> Outcome {
    let mut failures = 0;
    for _ in 0..n {
        let z = random_exact_point(rng);
        let steps = expand(&z, 10_000)?;
        let digits: Vec<_> = steps.iter().map(|s| s.digit).collect();
        let ok = steps.last().is_some_and(|s| num_traits::Zero::is_zero(&s.remainder))
            && digits.iter().all(|d| d.norm_sqr() > 1)
            && continued_fraction_value(&digits).as_ref() == Some(&z);
        if !ok {
            failures += 1;
        }
    }
    Ok((n as u64, failures, None, "finite expansions reproduce z exactly".into()))
}

fn random_digits(rng: &mut ChaCha8Rng, depth: usize) -> Result<Vec<crate::GaussianInt>> {
    let z = random_exact_point(rng);
    Ok(expand(&z, depth)?.iter().map(|s| s.digit).collect())
}

fn determinant(rng: &mut ChaCha8Rng, opts: &ValidateOptions) -> Outcome {
    let mut failures = 0;
    for _ in 0..opts.samples {
        let digits = random_digits(rng, opts.depth)?;
        let convs = convergents_with::<BigInt>(&digits, opts.q_recurrence)?;
        if !determinant_identity_holds(&convs) {
            failures += 1;
        }
    }
    Ok((
        opts.samples as u64,
        failures,
        None,
        "|p_n q_{n-1} - p_{n-1} q_n| = 1".into(),
    ))
}

fn approximation(rng: &mut ChaCha8Rng, opts: &ValidateOptions) -> Outcome {
    let mut failures = 0;
    for _ in 0..opts.samples {
        let z = random_exact_point(rng);
        let steps = expand(&z, opts.depth)?;
        let digits: Vec<_> = steps.iter().map(|s| s.digit).collect();
        if digits.is_empty() {
            continue;
        }
        let convs = convergents_with::<BigInt>(&digits, opts.q_recurrence)?;
        if !check_approximation(&z, &steps, &convs)?.pass {
            failures += 1;
        }
    }
    Ok((
        opts.samples as u64,
        failures,
        None,
        "error bound and |q_{n+2}/q_n| >= 3/2".into(),
    ))
}

/// Follows the natural-extension orbit from the default seed, assigning
/// marks through the automaton and checking that every digit is admissible
/// and that each remainder lies in the region the automaton predicts.
fn admissible(steps: u64) -> Outcome {
    let mut orbit = NatExtOrbit::new(default_seed());
    let mut state = Subregion::Full;
    let mut violations = 0;
    let mut geometric = 0;
    for _ in 0..steps {
        let z = orbit.state().z;
        let digit = nearest_gaussian(&recip(&z));
        let rem = orbit.advance()?.z;
        match assign_mark(state, digit) {
            Ok(d) => {
                state = region_after(&d);
                if distance_to_boundary(&rem) > 1e-9 && !state.contains(&rem, 1e-9) {
                    geometric += 1;
                }
            }
            Err(_) => {
                violations += 1;
                state = Subregion::Full;
            }
        }
    }
    Ok((
        steps,
        violations + geometric,
        None,
        format!("{violations} successor violations, {geometric} remainders outside predicted region"),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> ValidateOptions {
        ValidateOptions {
            samples: 50,
            orbit_steps: 20_000,
            ..Default::default()
        }
    }

    #[test]
    fn all_suites_pass() {
        let report = run(&Suite::ALL, &small());
        for s in &report.suites {
            assert!(s.pass, "{s:?}");
        }
        assert!(report.pass);
    }

    #[test]
    fn flipped_q_sign_is_caught() {
        let opts = ValidateOptions {
            q_recurrence: QRecurrence::Minus,
            ..small()
        };
        assert!(!run_suite(Suite::Determinant, &opts).pass);
    }

    #[test]
    fn suite_names() {
        for s in Suite::ALL {
            assert_eq!(s.to_string().parse::<Suite>().unwrap(), s);
        }
        let json = serde_json::to_string(&run_suite(Suite::Automaton, &small())).unwrap();
        assert!(json.contains("\"suite\":\"automaton\""));
    }
}
