//! Outcome types shared by the verifier, the oracle, and the CLI.

use std::fmt;
use std::str::FromStr;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// Every check the verifier knows, in report order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckName {
    A6Lemma,
    Congruence,
    DFormula,
    DPowerOfTwo,
    DUpper,
    EQ,
    Integrality,
    Mod4Exclusion,
    Oracle,
    Parity,
    QuadraticGap,
    QuarterBound,
    Ratio,
    Series,
    SignFlip,
    SqrtFactorial,
    XBounds,
}

impl CheckName {
    pub const ALL: [CheckName; 17] = [
        CheckName::A6Lemma,
        CheckName::Congruence,
        CheckName::DFormula,
        CheckName::DPowerOfTwo,
        CheckName::DUpper,
        CheckName::EQ,
        CheckName::Integrality,
        CheckName::Mod4Exclusion,
        CheckName::Oracle,
        CheckName::Parity,
        CheckName::QuadraticGap,
        CheckName::QuarterBound,
        CheckName::Ratio,
        CheckName::Series,
        CheckName::SignFlip,
        CheckName::SqrtFactorial,
        CheckName::XBounds,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CheckName::A6Lemma => "a6_lemma",
            CheckName::Congruence => "congruence",
            CheckName::DFormula => "d_formula",
            CheckName::DPowerOfTwo => "d_power_of_two",
            CheckName::DUpper => "d_upper",
            CheckName::EQ => "e_q",
            CheckName::Integrality => "integrality",
            CheckName::Mod4Exclusion => "mod4_exclusion",
            CheckName::Oracle => "oracle",
            CheckName::Parity => "parity",
            CheckName::QuadraticGap => "quadratic_gap",
            CheckName::QuarterBound => "quarter_bound",
            CheckName::Ratio => "ratio",
            CheckName::Series => "series",
            CheckName::SignFlip => "sign_flip",
            CheckName::SqrtFactorial => "sqrt_factorial",
            CheckName::XBounds => "x_bounds",
        }
    }
}

impl fmt::Display for CheckName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CheckName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        CheckName::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| Error::UnknownCheck(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexRange {
    pub lo: u64,
    pub hi: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counterexample {
    pub n: u64,
    pub detail: String,
}

/// Outcome of one check. `status` is `Fail` exactly when `counterexamples`
/// is nonempty.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: CheckName,
    pub range: IndexRange,
    pub status: Status,
    pub counterexamples: Vec<Counterexample>,
    pub elapsed_ms: u64,
}

impl CheckResult {
    pub fn new(name: CheckName, lo: u64, hi: u64, found: Counterexamples, elapsed: Duration) -> Self {
        let counterexamples = found.into_vec();
        let status = if counterexamples.is_empty() {
            Status::Pass
        } else {
            Status::Fail
        };
        Self {
            name,
            range: IndexRange { lo, hi },
            status,
            counterexamples,
            elapsed_ms: elapsed.as_millis() as u64,
        }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    /// Indices named by the counterexamples.
    pub fn failing_indices(&self) -> Vec<u64> {
        self.counterexamples.iter().map(|c| c.n).collect()
    }
}

/// Collects counterexamples, keeping the first [`Counterexamples::CAP`] and
/// summarizing the rest in one trailing entry.
#[derive(Debug, Clone, Default)]
pub struct Counterexamples {
    kept: Vec<Counterexample>,
    omitted: u64,
    last_omitted: u64,
}

impl Counterexamples {
    pub const CAP: usize = 64;

    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, n: u64, detail: impl Into<String>) {
        if self.kept.len() < Self::CAP {
            self.kept.push(Counterexample {
                n,
                detail: detail.into(),
            });
        } else {
            self.omitted += 1;
            self.last_omitted = n;
        }
    }

    pub fn is_empty(&self) -> bool {
        self.kept.is_empty()
    }

    pub fn into_vec(mut self) -> Vec<Counterexample> {
        if self.omitted > 0 {
            self.kept.push(Counterexample {
                n: self.last_omitted,
                detail: format!("{} further counterexamples omitted", self.omitted),
            });
        }
        self.kept
    }
}
