//! One executable check per claim, plus the driver that runs a selection of
//! them over a shared pass of the master table.

use std::sync::Mutex;
use std::time::Instant;

use num_bigint::{BigInt, Sign};
use num_traits::{One, ToPrimitive};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::arith::{ExactRational, Nat};
use crate::checks::{self, RowCheck, Running};
use crate::error::{Error, Result};
use crate::oracle;
use crate::report::{CheckName, CheckResult, Counterexamples};
use crate::sequence::{self, AStream, Fault, TableStream};
use crate::series::{self, TruncatedSeries};

/// Hard ceiling on `max_n`.
pub const MAX_N_CEILING: u64 = 20_000;
/// Above this `max_n` the CLI warns about run time.
pub const MAX_N_WARN: u64 = 5_000;
/// Random rationals drawn by the sign-flip check.
pub const SIGN_FLIP_SAMPLES: usize = 1000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyConfig {
    pub max_n: u64,
    pub prime_limit: u64,
    /// Truncation order for the series identities; even orders cover the
    /// last coefficient of `F(x)F(-x)` with a nonzero value.
    pub series_order: usize,
    pub oracle_max: u64,
    /// `None` runs every check.
    pub checks: Option<Vec<CheckName>>,
    pub seed: u64,
    #[serde(skip)]
    pub jobs: Option<usize>,
    /// Test hook: corrupts one `a_n` in the table the row checks see.
    #[serde(skip)]
    pub fault: Option<Fault>,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            max_n: 1000,
            prime_limit: 97,
            series_order: 600,
            oracle_max: oracle::ENUMERATION_MAX,
            checks: None,
            seed: 0,
            jobs: None,
            fault: None,
        }
    }
}

impl VerifyConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_n > MAX_N_CEILING {
            return Err(Error::LimitTooLarge {
                max: MAX_N_CEILING,
                got: self.max_n,
            });
        }
        if self.oracle_max > oracle::ENUMERATION_MAX {
            return Err(Error::EnumerationBound {
                max: oracle::ENUMERATION_MAX,
                got: self.oracle_max,
            });
        }
        if self.series_order < 2 {
            return Err(Error::IndexBelowMinimum {
                op: "series",
                min: 2,
                got: self.series_order as u64,
            });
        }
        if self.prime_limit > crate::arith::PRIME_LIMIT_CEILING {
            return Err(Error::LimitTooLarge {
                max: crate::arith::PRIME_LIMIT_CEILING,
                got: self.prime_limit,
            });
        }
        Ok(())
    }

    pub fn selected(&self) -> Vec<CheckName> {
        let mut names = match &self.checks {
            Some(c) => c.clone(),
            None => CheckName::ALL.to_vec(),
        };
        names.sort();
        names.dedup();
        names
    }
}

fn row_check(name: CheckName, cfg: &VerifyConfig) -> Result<Option<Box<dyn RowCheck>>> {
    let hi = cfg.max_n;
    let check: Box<dyn RowCheck> = match name {
        CheckName::XBounds => Box::new(checks::XBounds::new(4, hi)?),
        CheckName::Mod4Exclusion => Box::new(checks::Mod4Exclusion::new(4, hi)?),
        CheckName::QuadraticGap => Box::new(checks::QuadraticGap::new(4, hi)?),
        CheckName::SqrtFactorial => Box::new(checks::SqrtFactorialLower::new(0, hi)),
        CheckName::Congruence => Box::new(checks::Congruence::new(cfg.prime_limit, hi)?),
        CheckName::DPowerOfTwo => Box::new(checks::DPowerOfTwo::new(1, hi)?),
        CheckName::DUpper => Box::new(checks::DUpper::new(1, hi)?),
        CheckName::EQ => Box::new(checks::ValuationAndOddPart::new(0, hi)),
        CheckName::DFormula => Box::new(checks::DFormula::new(1, hi)?),
        CheckName::QuarterBound => Box::new(checks::QuarterBound::new(1, hi)?),
        CheckName::Parity => Box::new(checks::Parity::new(1, hi)?),
        CheckName::Integrality => Box::new(checks::Integrality::new(hi)),
        CheckName::A6Lemma => Box::new(checks::SixStep::new(2, hi.saturating_sub(6))?),
        CheckName::Ratio => Box::new(checks::Ratio::new(0, hi)),
        CheckName::Series | CheckName::Oracle | CheckName::SignFlip => return Ok(None),
    };
    Ok(Some(check))
}

/// Streams rows `0..=max_row` once and feeds every check.
pub fn run_row_checks(
    max_row: u64,
    fault: Option<Fault>,
    checks: Vec<Box<dyn RowCheck>>,
) -> Vec<CheckResult> {
    let mut running: Vec<Running> = checks.into_iter().map(Running::new).collect();
    if running.is_empty() {
        return Vec::new();
    }
    for row in TableStream::new(max_row).with_fault(fault) {
        for r in &mut running {
            r.observe(&row);
        }
    }
    running.into_iter().map(Running::finish).collect()
}

fn run_single(check: impl RowCheck + 'static, max_row: u64) -> CheckResult {
    let start = Instant::now();
    let mut result = run_row_checks(max_row, None, vec![Box::new(check)])
        .pop()
        .expect("one check in, one result out");
    result.elapsed_ms = start.elapsed().as_millis() as u64;
    result
}

/// Runs the configured checks and returns their results sorted by name.
///
/// Row checks share one pass over the table; the series, oracle, and
/// sign-flip checks run beside it on the rayon pool sized by `cfg.jobs`.
pub fn run_all(cfg: &VerifyConfig) -> Result<Vec<CheckResult>> {
    cfg.validate()?;
    let names = cfg.selected();
    let mut rows = Vec::new();
    for &name in &names {
        if let Some(c) = row_check(name, cfg)? {
            rows.push(c);
        }
    }
    let pool = {
        let mut builder = rayon::ThreadPoolBuilder::new();
        if let Some(jobs) = cfg.jobs {
            builder = builder.num_threads(jobs.max(1));
        }
        builder.build().expect("thread pool")
    };

    let results = Mutex::new(Vec::new());
    let errors = Mutex::new(Vec::new());
    pool.scope(|s| {
        let results = &results;
        let errors = &errors;
        if !rows.is_empty() {
            let fault = cfg.fault.clone();
            let max_n = cfg.max_n;
            s.spawn(move |_| {
                let out = run_row_checks(max_n, fault, rows);
                results.lock().unwrap().extend(out);
            });
        }
        for &name in &names {
            if !matches!(name, CheckName::Series | CheckName::Oracle | CheckName::SignFlip) {
                continue;
            }
            s.spawn(move |_| {
                let outcome = match name {
                    CheckName::Series => check_series(cfg.series_order),
                    CheckName::Oracle => oracle::check_involution_identity(cfg.oracle_max),
                    _ => Ok(check_sign_flip(cfg.seed, cfg.max_n.max(1), SIGN_FLIP_SAMPLES)),
                };
                match outcome {
                    Ok(r) => results.lock().unwrap().push(r),
                    Err(e) => errors.lock().unwrap().push(e),
                }
            });
        }
    });
    if let Some(e) = errors.into_inner().unwrap().into_iter().next() {
        return Err(e);
    }
    let mut results = results.into_inner().unwrap();
    results.sort_by_key(|r| r.name);
    Ok(results)
}

pub fn check_x_bounds(lo: u64, hi: u64) -> Result<CheckResult> {
    Ok(run_single(checks::XBounds::new(lo, hi)?, hi))
}

pub fn check_mod4_exclusion(lo: u64, hi: u64) -> Result<CheckResult> {
    Ok(run_single(checks::Mod4Exclusion::new(lo, hi)?, hi))
}

pub fn check_quadratic_gap(lo: u64, hi: u64) -> Result<CheckResult> {
    Ok(run_single(checks::QuadraticGap::new(lo, hi)?, hi))
}

pub fn check_sqrt_factorial_lower(lo: u64, hi: u64) -> Result<CheckResult> {
    Ok(run_single(checks::SqrtFactorialLower::new(lo, hi), hi))
}

/// Sweeps the modular recurrence for every odd prime `p <= prime_limit` up
/// to `n_limit`, reducing full-precision values for `n <= 200`.
pub fn check_congruence(prime_limit: u64, n_limit: u64) -> Result<CheckResult> {
    let start = Instant::now();
    let mut check = checks::Congruence::new(prime_limit, n_limit)?;
    let mut found = Counterexamples::new();
    let mut full = AStream::new();
    for n in 0..=n_limit {
        let a = (n <= checks::CONGRUENCE_CROSS_CHECK_MAX).then(|| full.next().expect("infinite"));
        check.observe_value(n, a.as_ref(), &mut found);
    }
    Ok(CheckResult::new(
        CheckName::Congruence,
        0,
        n_limit,
        found,
        start.elapsed(),
    ))
}

pub fn check_d_power_of_two(lo: u64, hi: u64) -> Result<CheckResult> {
    Ok(run_single(checks::DPowerOfTwo::new(lo, hi)?, hi))
}

pub fn check_d_upper(lo: u64, hi: u64) -> Result<CheckResult> {
    Ok(run_single(checks::DUpper::new(lo, hi)?, hi))
}

pub fn check_e_q(lo: u64, hi: u64) -> Result<CheckResult> {
    Ok(run_single(checks::ValuationAndOddPart::new(lo, hi), hi))
}

pub fn check_d_formula(lo: u64, hi: u64) -> Result<CheckResult> {
    Ok(run_single(checks::DFormula::new(lo, hi)?, hi))
}

pub fn check_quarter_bound_and_d(lo: u64, hi: u64) -> Result<CheckResult> {
    Ok(run_single(checks::QuarterBound::new(lo, hi)?, hi))
}

pub fn check_parity(lo: u64, hi: u64) -> Result<CheckResult> {
    Ok(run_single(checks::Parity::new(lo, hi)?, hi))
}

pub fn check_integrality(max_n: u64) -> CheckResult {
    run_single(checks::Integrality::new(max_n), max_n)
}

/// `lo..=hi` ranges over the relation index `n`; rows up to `hi + 6` are read.
pub fn check_a6_lemma(lo: u64, hi: u64) -> Result<CheckResult> {
    Ok(run_single(checks::SixStep::new(lo, hi)?, hi + 6))
}

pub fn check_ratio(lo: u64, hi: u64) -> CheckResult {
    run_single(checks::Ratio::new(lo, hi), hi)
}

/// Series identities at truncation order `order`:
/// `F = exp(x + x^2/2)`, `F'' = (1 + x) F' + F`, `F(x) F(-x) = exp(x^2)`,
/// the coefficient form of the last one for every `2n <= order`, and the
/// closed-form sum for every `a_n` with `n <= order`.
pub fn check_series(order: usize) -> Result<CheckResult> {
    if order < 2 {
        return Err(Error::IndexBelowMinimum {
            op: "series",
            min: 2,
            got: order as u64,
        });
    }
    let start = Instant::now();
    let mut found = Counterexamples::new();
    let f = series::egf_f(order);

    let closed = series::ps_exp(&series::egf_exponent(order))?;
    for n in first_differences(&f, &closed) {
        found.push(n as u64, format!("F and exp(x + x^2/2) differ at x^{n}"));
    }

    // F'' against (1 + x) F' + F at order K - 2
    let f1 = series::ps_derivative(&f)?;
    let f2 = series::ps_derivative(&f1)?;
    let one_plus_x = TruncatedSeries::from_integers(order - 1, &[1, 1]);
    let rhs = series::ps_add(
        &series::ps_mul(&one_plus_x, &f1)?.truncate(order - 2)?,
        &f.truncate(order - 2)?,
    )?;
    for n in first_differences(&f2, &rhs) {
        found.push(n as u64, format!("F'' and (1 + x)F' + F differ at x^{n}"));
    }

    let product = series::ps_mul(&f, &series::ps_subst_neg(&f))?;
    let x_squared = TruncatedSeries::monomial(order, 2, ExactRational::one());
    let gauss = series::ps_exp(&x_squared)?;
    for n in first_differences(&product, &gauss) {
        found.push(n as u64, format!("F(x)F(-x) and exp(x^2) differ at x^{n}"));
    }
    let mut inv_factorial = Nat::one();
    for (i, c) in product.coeffs().iter().enumerate() {
        let expected = if i % 2 == 1 {
            ExactRational::zero()
        } else {
            if i >= 2 {
                inv_factorial *= (i / 2) as u64;
            }
            ExactRational::from_nat_ratio(&Nat::one(), &inv_factorial)?
        };
        if c != &expected {
            found.push(i as u64, format!("coefficient of x^{i} in F(x)F(-x) is {c}, expected {expected}"));
        }
    }

    let a = sequence::a_seq(order as u64);
    for n in 0..=order / 2 {
        let lhs = series::convolution_lhs(n, &a)?;
        let rhs = BigInt::from_biguint(Sign::Plus, series::convolution_rhs(n as u64));
        if lhs != rhs {
            found.push(n as u64, format!("signed convolution = {lhs}, (2n)!/n! = {rhs}"));
        }
    }
    for (n, an) in a.iter().enumerate() {
        let c = sequence::a_closed(n as u64);
        if &c != an {
            found.push(n as u64, format!("closed-form sum {c} != recurrence a_n = {an}"));
        }
    }
    Ok(CheckResult::new(
        CheckName::Series,
        0,
        order as u64,
        found,
        start.elapsed(),
    ))
}

fn first_differences(f: &TruncatedSeries, g: &TruncatedSeries) -> Vec<usize> {
    f.coeffs()
        .iter()
        .zip(g.coeffs())
        .enumerate()
        .filter(|(_, (x, y))| x != y)
        .map(|(i, _)| i)
        .collect()
}

/// `(f(x)^2 - f(x) - n) x^2 = -n (x^2 - x - n)` for `f(x) = 1 + n/x`, on
/// `samples` seeded random positive rationals and `n` drawn from `1..=max_n`.
pub fn check_sign_flip(seed: u64, max_n: u64, samples: usize) -> CheckResult {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut found = Counterexamples::new();
    let one = ExactRational::one();
    for _ in 0..samples {
        let p: u64 = rng.gen_range(1..=1_000_000_000);
        let q: u64 = rng.gen_range(1..=1_000_000_000);
        let n: u64 = rng.gen_range(1..=max_n.max(1));
        let x = ExactRational::new(p.into(), q.into()).expect("q > 0");
        let nn = ExactRational::from(n);
        let fx = &one + &(&nn / &x);
        let x2 = &x * &x;
        let lhs = &(&(&(&fx * &fx) - &fx) - &nn) * &x2;
        let rhs = -(&nn * &(&(&x2 - &x) - &nn));
        if lhs != rhs {
            found.push(n, format!("x = {x}: {lhs} != {rhs}"));
        }
    }
    CheckResult::new(CheckName::SignFlip, 1, max_n.max(1), found, start.elapsed())
}

/// Natural log of a positive big integer from its leading 64 bits.
fn ln_big(v: &Nat) -> f64 {
    let bits = v.bits();
    if bits <= 64 {
        return v.to_f64().expect("fits").ln();
    }
    let shift = bits - 64;
    let top = (v >> shift).to_f64().expect("64 bits");
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// `(ln a_n - ln(n!)/2) / sqrt(n)` at each requested `n`; informational only.
pub fn stirling_diagnostic(points: &[u64]) -> Result<Vec<(u64, f64)>> {
    let Some(&max) = points.iter().max() else {
        return Err(Error::EmptyPoints);
    };
    let mut fact = Nat::one();
    let mut values = Vec::new();
    for (n, a) in AStream::new().take(max as usize + 1).enumerate() {
        let n = n as u64;
        if n > 0 {
            fact *= n;
        }
        if points.contains(&n) {
            let v = if n == 0 {
                0.0
            } else {
                (ln_big(&a) - ln_big(&fact) / 2.0) / (n as f64).sqrt()
            };
            values.push((n, v));
        }
    }
    let mut out: Vec<(u64, f64)> = points
        .iter()
        .map(|p| *values.iter().find(|(n, _)| n == p).expect("computed"))
        .collect();
    out.dedup_by_key(|(n, _)| *n);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;

    #[test]
    fn config_defaults_and_validation() {
        let cfg = VerifyConfig::default();
        assert_eq!((cfg.max_n, cfg.prime_limit, cfg.series_order, cfg.oracle_max), (1000, 97, 600, 10));
        cfg.validate().unwrap();
        let bad = VerifyConfig { oracle_max: 11, ..cfg.clone() };
        assert!(bad.validate().is_err());
        let bad = VerifyConfig { max_n: MAX_N_CEILING + 1, ..cfg.clone() };
        assert!(bad.validate().is_err());
        let bad = VerifyConfig { series_order: 1, ..cfg };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn small_suite_passes() {
        let cfg = VerifyConfig {
            max_n: 9,
            series_order: 8,
            oracle_max: 6,
            ..Default::default()
        };
        let results = run_all(&cfg).unwrap();
        assert_eq!(results.len(), CheckName::ALL.len());
        for r in &results {
            assert!(r.passed(), "{r:?}");
        }
        let names: Vec<CheckName> = results.iter().map(|r| r.name).collect();
        assert_eq!(names, CheckName::ALL.to_vec());
    }

    #[test]
    fn standalone_examples() {
        assert!(check_x_bounds(4, 4).unwrap().passed());
        assert!(check_x_bounds(3, 4).is_err());
        assert!(check_mod4_exclusion(4, 9).unwrap().passed());
        assert!(check_quadratic_gap(4, 5).unwrap().passed());
        assert!(check_sqrt_factorial_lower(0, 4).unwrap().passed());
        assert!(check_congruence(7, 30).unwrap().passed());
        assert!(check_d_power_of_two(1, 3).unwrap().passed());
        assert!(check_d_upper(1, 3).unwrap().passed());
        assert!(check_e_q(0, 8).unwrap().passed());
        assert!(check_d_formula(1, 7).unwrap().passed());
        assert!(check_quarter_bound_and_d(1, 10).unwrap().passed());
        assert!(check_parity(1, 6).unwrap().passed());
        assert!(check_integrality(9).passed());
        assert!(check_integrality(3).passed());
        assert!(check_a6_lemma(2, 3).unwrap().passed());
        assert!(check_ratio(0, 50).passed());
        assert!(check_series(2).unwrap().passed());
        assert!(check_series(9).unwrap().passed());
        assert!(check_series(1).is_err());
    }

    #[test]
    fn sign_flip_is_seeded() {
        let a = check_sign_flip(7, 100, 200);
        let b = check_sign_flip(7, 100, 200);
        assert!(a.passed());
        assert_eq!(a.counterexamples, b.counterexamples);
    }

    #[test]
    fn stirling_values() {
        let t = stirling_diagnostic(&[1, 100]).unwrap();
        assert_eq!(t[0], (1, 0.0));
        assert!(t[1].1 > 0.5 && t[1].1 < 1.5, "{:?}", t[1]);
        assert!(stirling_diagnostic(&[]).is_err());
        // leading-bits logarithm agrees with f64 on moderate values
        let v = Nat::one() << 200u32;
        assert!((ln_big(&v) - 200.0 * std::f64::consts::LN_2).abs() < 1e-9);
        assert!(Nat::zero() < v);
    }

    #[test]
    fn fault_changes_row_checks_only() {
        let cfg = VerifyConfig {
            max_n: 30,
            series_order: 4,
            oracle_max: 3,
            fault: Some(Fault { n: 5, value: Nat::from(27u8) }),
            ..Default::default()
        };
        let results = run_all(&cfg).unwrap();
        let failing: Vec<CheckName> = results.iter().filter(|r| !r.passed()).map(|r| r.name).collect();
        assert!(failing.contains(&CheckName::Congruence));
        assert!(failing.contains(&CheckName::Ratio));
        assert!(!failing.contains(&CheckName::Series));
    }
}
