//! End-to-end acceptance criteria. Prints one PASS/FAIL line per criterion
//! and fails if any criterion fails.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::io::Write;
use std::process::Command;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use num_traits::One;
use seqlab::arith::{cmp_shifted_sqrt, factorial, ExactRational, Nat};
use seqlab::cli::TableRecord;
use seqlab::oracle;
use seqlab::report::{CheckName, CheckResult};
use seqlab::sequence::{a6_step, a_seq, integer_indices, x_seq, Fault};
use seqlab::verifier::{self, VerifyConfig};

type Outcome = Result<(), String>;

fn seqlab(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_seqlab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Outcome {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn require_pass(r: &CheckResult) -> Outcome {
    ensure(r.passed(), || {
        format!("{} failed: {:?}", r.name, r.counterexamples.first())
    })
}

fn require_range(r: &CheckResult, lo: u64, hi: u64) -> Outcome {
    ensure(r.range.lo <= lo && r.range.hi >= hi, || {
        format!(
            "{} covered [{},{}], need [{lo},{hi}]",
            r.name, r.range.lo, r.range.hi
        )
    })
}

fn pick(results: &[CheckResult], name: CheckName) -> Result<&CheckResult, String> {
    results
        .iter()
        .find(|r| r.name == name)
        .ok_or_else(|| format!("no result for {name}"))
}

fn run_selected(max_n: u64, checks: &[CheckName]) -> Result<Vec<CheckResult>, String> {
    let cfg = VerifyConfig {
        max_n,
        checks: Some(checks.to_vec()),
        ..Default::default()
    };
    verifier::run_all(&cfg).map_err(|e| e.to_string())
}

fn golden_first_values() -> Outcome {
    let out = seqlab(&["table", "--max", "9"]);
    ensure(out.status.success(), || format!("exit {:?}", out.status))?;
    let xs: Vec<String> = csv::Reader::from_reader(&out.stdout[..])
        .deserialize::<TableRecord>()
        .map(|r| {
            let r = r.map_err(|e| e.to_string())?;
            Ok(if r.x_den == "1" {
                r.x_num
            } else {
                format!("{}/{}", r.x_num, r.x_den)
            })
        })
        .collect::<Result<_, String>>()?;
    let got = xs.join(",");
    let want = "1,1,2,2,5/2,13/5,38/13,58/19,191/58,655/191";
    ensure(got == want, || format!("got {got}"))
}

fn only_four_integers() -> Outcome {
    let out = seqlab(&[
        "verify", "--checks", "integrality", "--max", "5000", "--format", "json",
    ]);
    ensure(out.status.code() == Some(0), || format!("exit {:?}", out.status))?;
    let doc: serde_json::Value =
        serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())?;
    let results = doc["results"].as_array().ok_or("no results")?;
    ensure(results.len() == 1 && results[0]["status"] == "pass", || {
        format!("report: {doc}")
    })?;
    ensure(results[0]["range"]["hi"] == 5000, || "range".into())?;
    let idx = integer_indices(5000);
    ensure(idx == [0, 1, 2, 3], || format!("integer indices {idx:?}"))
}

fn x_bounds() -> Outcome {
    let r = verifier::check_x_bounds(4, 2000).map_err(|e| e.to_string())?;
    require_pass(&r)?;
    require_range(&r, 4, 2000)?;
    let x = x_seq(3);
    // (2x_1 - 1)^2 = 1 = 4*0 + 1 and (2x_3 - 1)^2 = 9 = 4*2 + 1
    for (n, m) in [(1usize, 1u32), (3, 9)] {
        let ord = cmp_shifted_sqrt(&x[n], &Nat::from(m)).map_err(|e| e.to_string())?;
        ensure(ord == Ordering::Equal, || format!("n={n}: {ord:?}"))?;
    }
    Ok(())
}

fn quadratic_gap(shared: &[CheckResult]) -> Outcome {
    let r = pick(shared, CheckName::QuadraticGap)?;
    require_pass(r)?;
    require_range(r, 4, 2000)?;
    let x4 = &x_seq(4)[4];
    let gap = x4 * x4 - x4.clone();
    ensure(gap == ExactRational::from_nat_ratio(&15u32.into(), &4u32.into()).unwrap(), || {
        format!("x_4^2 - x_4 = {gap}")
    })?;
    let three = ExactRational::from(3u64);
    let four = ExactRational::from(4u64);
    ensure(three < gap && gap < four, || format!("{gap} not in (3,4)"))
}

fn sqrt_factorial(shared: &[CheckResult]) -> Outcome {
    let r = pick(shared, CheckName::SqrtFactorial)?;
    require_pass(r)?;
    require_range(r, 0, 2000)?;
    let equal: Vec<u64> = a_seq(2000)
        .iter()
        .enumerate()
        .filter(|(n, a)| *a * *a == factorial(*n as u64))
        .map(|(n, _)| n as u64)
        .collect();
    ensure(equal == [0, 1], || format!("equality at {equal:?}"))
}

fn congruence() -> Outcome {
    let r = verifier::check_congruence(97, 5000).map_err(|e| e.to_string())?;
    require_pass(&r)?;
    require_range(&r, 0, 5000)
}

fn d_power_of_two(big: &[CheckResult]) -> Outcome {
    for name in [CheckName::DPowerOfTwo, CheckName::DUpper] {
        let r = pick(big, name)?;
        require_pass(r)?;
        require_range(r, 1, 5000)?;
    }
    Ok(())
}

fn valuation_and_odd_part(big: &[CheckResult]) -> Outcome {
    for name in [CheckName::EQ, CheckName::DFormula] {
        let r = pick(big, name)?;
        require_pass(r)?;
        require_range(r, 1, 5000)?;
    }
    let q: Vec<String> = a_seq(7)
        .iter()
        .map(|a| (a >> a.trailing_zeros().unwrap_or(0)).to_string())
        .collect();
    ensure(q.join(",") == "1,1,1,1,5,13,19,29", || format!("q = {q:?}"))
}

fn six_step(shared: &[CheckResult]) -> Outcome {
    let r = pick(shared, CheckName::A6Lemma)?;
    require_pass(r)?;
    require_range(r, 2, 2000)?;
    let a = a_seq(10);
    for (n, want) in [(2u64, 764u32), (3, 2620), (4, 9496)] {
        let i = n as usize;
        let got = a6_step(n, &a[i - 2], &a[i + 2]).map_err(|e| e.to_string())?;
        ensure(got == want.into(), || format!("n={n}: {got}"))?;
    }
    Ok(())
}

fn series() -> Outcome {
    let r = verifier::check_series(600).map_err(|e| e.to_string())?;
    require_pass(&r)?;
    require_range(&r, 0, 600)
}

fn oracle_counts() -> Outcome {
    let r = oracle::check_involution_identity(10).map_err(|e| e.to_string())?;
    require_pass(&r)?;
    let counts = oracle::involution_counts(10).map_err(|e| e.to_string())?;
    ensure(counts == [1, 1, 2, 4, 10, 26, 76, 232, 764, 2620, 9496], || {
        format!("{counts:?}")
    })
}

fn denominator_bounds(big: &[CheckResult]) -> Outcome {
    for name in [CheckName::QuarterBound, CheckName::Parity] {
        let r = pick(big, name)?;
        require_pass(r)?;
        require_range(r, 1, 5000)?;
    }
    let four_pow = |k: u64| BigUint::one() << (2 * k);
    ensure(factorial(9) > four_pow(9), || "9! <= 4^9".into())?;
    ensure(factorial(8) < four_pow(8), || "8! >= 4^8".into())
}

fn strip_timing_json(bytes: &[u8]) -> Result<serde_json::Value, String> {
    let mut doc: serde_json::Value = serde_json::from_slice(bytes).map_err(|e| e.to_string())?;
    for r in doc["results"].as_array_mut().ok_or("no results")? {
        r.as_object_mut().ok_or("result")?.remove("elapsed_ms");
    }
    Ok(doc)
}

fn strip_timing_text(bytes: &[u8]) -> String {
    String::from_utf8_lossy(bytes)
        .lines()
        .map(|l| match l.rsplit_once(" (") {
            Some((head, tail)) if tail.ends_with(" ms)") => head.to_string(),
            _ => l.to_string(),
        })
        .collect::<Vec<_>>()
        .join("\n")
}

fn determinism() -> Outcome {
    let args = ["verify", "--max", "1000", "--seed", "7", "--format"];
    let json_args: Vec<&str> = args.iter().copied().chain(["json"]).collect();
    let text_args: Vec<&str> = args.iter().copied().chain(["text"]).collect();
    let (j1, j2) = (seqlab(&json_args), seqlab(&json_args));
    ensure(j1.status.success() && j2.status.success(), || "verify failed".into())?;
    ensure(strip_timing_json(&j1.stdout)? == strip_timing_json(&j2.stdout)?, || {
        "json reports differ".into()
    })?;
    let (t1, t2) = (seqlab(&text_args), seqlab(&text_args));
    ensure(strip_timing_text(&t1.stdout) == strip_timing_text(&t2.stdout), || {
        "text reports differ".into()
    })
}

fn fault_injection() -> Outcome {
    let row_checks: Vec<CheckName> = CheckName::ALL
        .into_iter()
        .filter(|c| !matches!(c, CheckName::Series | CheckName::Oracle | CheckName::SignFlip))
        .collect();
    let mut targets: Vec<(u64, u64)> = (0..=48).map(|n| (n, 48)).collect();
    targets.extend([(300, 310), (1000, 1000)]);
    let mut tried = 0;
    for (n, max_n) in targets {
        let a = seqlab::sequence::a_value(n);
        let mut values: BTreeSet<Nat> =
            [&a + 1u32, &a * 2u32, &a * 3u32 + 1u32, Nat::from(0u32)].into();
        values.insert(&a - 1u32);
        values.remove(&a);
        for value in values {
            let cfg = VerifyConfig {
                max_n,
                checks: Some(row_checks.clone()),
                fault: Some(Fault { n, value: value.clone() }),
                ..Default::default()
            };
            let results = verifier::run_all(&cfg).map_err(|e| e.to_string())?;
            let named = results
                .iter()
                .any(|r| !r.passed() && r.failing_indices().contains(&n));
            ensure(named, || format!("a_{n} := {value} went unnoticed"))?;
            tried += 1;
        }
    }
    ensure(tried > 150, || format!("only {tried} faults"))
}

struct Criterion {
    id: u32,
    name: &'static str,
    limit: Option<Duration>,
    outcome: Outcome,
    elapsed: Duration,
}

fn timed(
    id: u32,
    name: &'static str,
    limit_s: Option<u64>,
    f: impl FnOnce() -> Outcome,
) -> Criterion {
    let start = Instant::now();
    let outcome = f();
    Criterion {
        id,
        name,
        limit: limit_s.map(Duration::from_secs),
        outcome,
        elapsed: start.elapsed(),
    }
}

#[test]
fn acceptance_criteria() {
    use CheckName::*;

    let mut done = vec![
        timed(1, "golden first values", Some(1), golden_first_values),
        timed(2, "only x_0..x_3 are integers", Some(60), only_four_integers),
        timed(3, "x bounds", Some(30), x_bounds),
    ];

    // One shared pass to n = 2006 so the six-step relation reaches n = 2000.
    let shared = run_selected(2006, &[QuadraticGap, SqrtFactorial, A6Lemma])
        .expect("shared pass to 2006");
    done.push(timed(4, "quadratic gap", None, || quadratic_gap(&shared)));
    done.push(timed(5, "sqrt factorial lower bound", None, || sqrt_factorial(&shared)));
    done.push(timed(6, "congruence", Some(60), congruence));

    let big = run_selected(5000, &[DPowerOfTwo, DUpper, EQ, DFormula, QuarterBound, Parity])
        .expect("shared pass to 5000");
    done.push(timed(7, "d power of two and upper bound", None, || d_power_of_two(&big)));
    done.push(timed(8, "valuation and odd part", None, || valuation_and_odd_part(&big)));
    done.push(timed(9, "six-step relation", None, || six_step(&shared)));
    done.push(timed(10, "series identities", Some(120), series));
    done.push(timed(11, "oracle", Some(30), oracle_counts));
    done.push(timed(12, "denominator bounds and parity", None, || denominator_bounds(&big)));
    done.push(timed(13, "determinism", None, determinism));
    done.push(timed(14, "fault injection", None, fault_injection));

    let mut failed = 0;
    for c in &done {
        let over = c.limit.filter(|l| c.elapsed > *l);
        let ok = c.outcome.is_ok() && over.is_none();
        if !ok {
            failed += 1;
        }
        let mut line = format!(
            "{} criterion {:>2} {} ({} ms)",
            if ok { "PASS" } else { "FAIL" },
            c.id,
            c.name,
            c.elapsed.as_millis()
        );
        if let Err(e) = &c.outcome {
            line.push_str(&format!(": {e}"));
        }
        if let Some(l) = over {
            line.push_str(&format!(": over the {} s limit", l.as_secs()));
        }
        // straight to the handle so the lines survive libtest's capture
        let _ = writeln!(std::io::stderr(), "{line}");
    }
    assert_eq!(failed, 0, "{failed} acceptance criteria failed");
}
