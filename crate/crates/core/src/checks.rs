//! Checks that consume the master table one row at a time.
//!
//! Each check sees every row from `n = 0` upward (some need earlier rows as
//! context) and only judges the indices inside its own range. All
//! comparisons are exact; bounds involving square roots are squared first.

use std::cmp::Ordering;
use std::collections::VecDeque;
use std::time::{Duration, Instant};

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::arith::{self, Nat};
use crate::error::{Error, Result};
use crate::report::{CheckName, CheckResult, Counterexamples};
use crate::sequence::{self, AModStream, SeqRow};

/// Largest `n` at which the congruence check also reduces the full-precision
/// `a_n` and compares it with the modular recurrence.
pub const CONGRUENCE_CROSS_CHECK_MAX: u64 = 200;

pub trait RowCheck: Send {
    fn name(&self) -> CheckName;
    fn range(&self) -> (u64, u64);
    fn observe(&mut self, row: &SeqRow, found: &mut Counterexamples);
    fn finish(&mut self, _found: &mut Counterexamples) {}
}

/// Wraps a [`RowCheck`] with its counterexample sink and a timer.
pub struct Running {
    check: Box<dyn RowCheck>,
    found: Counterexamples,
    busy: Duration,
}

impl Running {
    pub fn new(check: Box<dyn RowCheck>) -> Self {
        Self {
            check,
            found: Counterexamples::new(),
            busy: Duration::ZERO,
        }
    }

    pub fn observe(&mut self, row: &SeqRow) {
        let t = Instant::now();
        self.check.observe(row, &mut self.found);
        self.busy += t.elapsed();
    }

    /// `elapsed_ms` counts only the time spent inside this check.
    pub fn finish(mut self) -> CheckResult {
        let t = Instant::now();
        self.check.finish(&mut self.found);
        self.busy += t.elapsed();
        let (lo, hi) = self.check.range();
        CheckResult::new(self.check.name(), lo, hi, self.found, self.busy)
    }
}

fn in_range(n: u64, (lo, hi): (u64, u64)) -> bool {
    lo <= n && n <= hi
}

fn require_lo(op: &'static str, lo: u64, min: u64) -> Result<()> {
    if lo < min {
        return Err(Error::IndexBelowMinimum { op, min, got: lo });
    }
    Ok(())
}

fn signed(n: &Nat) -> BigInt {
    BigInt::from_biguint(Sign::Plus, n.clone())
}

/// `y_{n-1} < x_n < y_n`, i.e. `4n - 3 < (2 x_n - 1)^2 < 4n + 1`.
pub struct XBounds {
    lo: u64,
    hi: u64,
}

impl XBounds {
    pub fn new(lo: u64, hi: u64) -> Result<Self> {
        require_lo("check_x_bounds", lo, 4)?;
        Ok(Self { lo, hi })
    }
}

impl RowCheck for XBounds {
    fn name(&self) -> CheckName {
        CheckName::XBounds
    }

    fn range(&self) -> (u64, u64) {
        (self.lo, self.hi)
    }

    fn observe(&mut self, row: &SeqRow, found: &mut Counterexamples) {
        let n = row.n;
        if !in_range(n, self.range()) {
            return;
        }
        let below = arith::cmp_shifted_sqrt(&row.x, &Nat::from(4 * n - 3));
        let above = arith::cmp_shifted_sqrt(&row.x, &Nat::from(4 * n + 1));
        if below != Ok(Ordering::Greater) || above != Ok(Ordering::Less) {
            let p = signed(&row.x_num());
            let q = signed(&row.den);
            let s = &p * 2 - &q;
            found.push(
                n,
                format!(
                    "x_n = {}: (2x_n - 1)^2 = {}/{} not strictly between {} and {}",
                    row.x,
                    &s * &s,
                    &q * &q,
                    4 * n - 3,
                    4 * n + 1
                ),
            );
        }
    }
}

/// `x_n` is not an integer for `n >= 4`.
pub struct Mod4Exclusion {
    lo: u64,
    hi: u64,
}

impl Mod4Exclusion {
    pub fn new(lo: u64, hi: u64) -> Result<Self> {
        require_lo("check_mod4_exclusion", lo, 4)?;
        Ok(Self { lo, hi })
    }
}

impl RowCheck for Mod4Exclusion {
    fn name(&self) -> CheckName {
        CheckName::Mod4Exclusion
    }

    fn range(&self) -> (u64, u64) {
        (self.lo, self.hi)
    }

    fn observe(&mut self, row: &SeqRow, found: &mut Counterexamples) {
        if in_range(row.n, self.range()) && row.den.is_one() {
            let k = row.x_num();
            let odd = &k * 2u8 - 1u8;
            let sq = &odd * &odd;
            found.push(
                row.n,
                format!(
                    "x_n = {k} is an integer; (2k - 1)^2 = {sq} = {} mod 4 against the window ({}, {})",
                    &sq % 4u8,
                    4 * row.n - 3,
                    4 * row.n + 1
                ),
            );
        }
    }
}

/// `n - 1 < x_n^2 - x_n < n`.
pub struct QuadraticGap {
    lo: u64,
    hi: u64,
}

impl QuadraticGap {
    pub fn new(lo: u64, hi: u64) -> Result<Self> {
        require_lo("check_quadratic_gap", lo, 4)?;
        Ok(Self { lo, hi })
    }
}

impl RowCheck for QuadraticGap {
    fn name(&self) -> CheckName {
        CheckName::QuadraticGap
    }

    fn range(&self) -> (u64, u64) {
        (self.lo, self.hi)
    }

    fn observe(&mut self, row: &SeqRow, found: &mut Counterexamples) {
        let n = row.n;
        if !in_range(n, self.range()) {
            return;
        }
        // x = p/q: x^2 - x = p(p - q) / q^2
        let p = signed(&row.x_num());
        let q = signed(&row.den);
        let num = &p * (&p - &q);
        let q2 = &q * &q;
        let lower = BigInt::from(n - 1) * &q2;
        let upper = BigInt::from(n) * &q2;
        if !(lower < num && num < upper) {
            found.push(
                n,
                format!("x_n^2 - x_n = {num}/{q2} not strictly between {} and {n}", n - 1),
            );
        }
    }
}

/// `a_n^2 >= n!`, with equality exactly at `n = 0, 1`.
pub struct SqrtFactorialLower {
    lo: u64,
    hi: u64,
    factorial: Nat,
}

impl SqrtFactorialLower {
    pub fn new(lo: u64, hi: u64) -> Self {
        Self {
            lo,
            hi,
            factorial: Nat::one(),
        }
    }
}

impl RowCheck for SqrtFactorialLower {
    fn name(&self) -> CheckName {
        CheckName::SqrtFactorial
    }

    fn range(&self) -> (u64, u64) {
        (self.lo, self.hi)
    }

    fn observe(&mut self, row: &SeqRow, found: &mut Counterexamples) {
        let n = row.n;
        if n > 0 {
            self.factorial *= n;
        }
        if !in_range(n, self.range()) {
            return;
        }
        let sq = &row.a * &row.a;
        match (sq.cmp(&self.factorial), n <= 1) {
            (Ordering::Less, _) => found.push(n, format!("a_n^2 = {sq} < n! = {}", self.factorial)),
            (Ordering::Equal, false) => {
                found.push(n, format!("a_n^2 = n! = {sq}, expected strict inequality"))
            }
            (Ordering::Greater, true) => {
                found.push(n, format!("a_n^2 = {sq}, expected equality with n! = 1"))
            }
            _ => {}
        }
    }
}

/// `a_n ≡ 1 (mod p)` whenever the odd prime `p` divides `n`.
///
/// Runs one modular recurrence per prime alongside the table and, for small
/// `n`, also reduces the full-precision `a_n`.
pub struct Congruence {
    n_limit: u64,
    streams: Vec<(u64, AModStream)>,
}

impl Congruence {
    pub fn new(prime_limit: u64, n_limit: u64) -> Result<Self> {
        let streams = arith::primes_upto(prime_limit)?
            .into_iter()
            .filter(|&p| p > 2)
            .map(|p| Ok((p, AModStream::new(p)?)))
            .collect::<Result<_>>()?;
        Ok(Self { n_limit, streams })
    }

    /// Feeds index `n`; `a` is the full-precision value when available.
    pub fn observe_value(&mut self, n: u64, a: Option<&Nat>, found: &mut Counterexamples) {
        for (p, stream) in &mut self.streams {
            let p = *p;
            let residue = stream.next().expect("stream is infinite");
            if n > self.n_limit {
                continue;
            }
            if n > 0 && n % p == 0 && residue != 1 {
                found.push(n, format!("a_n = {residue} (mod {p}), expected 1"));
            }
            if let Some(a) = a.filter(|_| n <= CONGRUENCE_CROSS_CHECK_MAX) {
                let full = a % p;
                if full != Nat::from(residue) {
                    found.push(
                        n,
                        format!("full-precision a_n = {full} (mod {p}) but modular recurrence gives {residue}"),
                    );
                }
            }
        }
    }
}

impl RowCheck for Congruence {
    fn name(&self) -> CheckName {
        CheckName::Congruence
    }

    fn range(&self) -> (u64, u64) {
        (0, self.n_limit)
    }

    fn observe(&mut self, row: &SeqRow, found: &mut Counterexamples) {
        self.observe_value(row.n, Some(&row.a), found);
    }
}

/// `d_n` is a power of two.
pub struct DPowerOfTwo {
    lo: u64,
    hi: u64,
}

impl DPowerOfTwo {
    pub fn new(lo: u64, hi: u64) -> Result<Self> {
        require_lo("check_d_power_of_two", lo, 1)?;
        Ok(Self { lo, hi })
    }
}

impl RowCheck for DPowerOfTwo {
    fn name(&self) -> CheckName {
        CheckName::DPowerOfTwo
    }

    fn range(&self) -> (u64, u64) {
        (self.lo, self.hi)
    }

    fn observe(&mut self, row: &SeqRow, found: &mut Counterexamples) {
        if !in_range(row.n, self.range()) {
            return;
        }
        match arith::odd_part(&row.d) {
            Ok(odd) if odd.is_one() => {}
            Ok(odd) => found.push(row.n, format!("d_n = {} has odd part {odd}", row.d)),
            Err(e) => found.push(row.n, format!("d_n: {e}")),
        }
    }
}

/// `d_n <= 2^(n-1)`, plus the divisibility facts behind it:
/// `d_{n+1} | (2n)!/n!`, `d_{n+1} | a_{n+2}` and `d_{n+1} | d_{n+2}`.
pub struct DUpper {
    lo: u64,
    hi: u64,
    /// `(2m)!/m!` for the previous index `m`.
    rhs: Nat,
    prev_d: Option<Nat>,
}

impl DUpper {
    pub fn new(lo: u64, hi: u64) -> Result<Self> {
        require_lo("check_d_upper", lo, 1)?;
        Ok(Self {
            lo,
            hi,
            rhs: Nat::one(),
            prev_d: None,
        })
    }
}

impl RowCheck for DUpper {
    fn name(&self) -> CheckName {
        CheckName::DUpper
    }

    fn range(&self) -> (u64, u64) {
        (self.lo, self.hi)
    }

    fn observe(&mut self, row: &SeqRow, found: &mut Counterexamples) {
        let n = row.n;
        if n == 0 {
            return;
        }
        let range = self.range();
        if in_range(n, range) {
            let bound = Nat::one() << (n - 1);
            if row.d > bound {
                found.push(n, format!("d_n = {} > 2^(n-1) = {bound}", row.d));
            }
        }
        // this row is index m + 1 for m = n - 1
        let m = n - 1;
        if m >= self.lo && n <= self.hi && !row.d.is_zero() && !(&self.rhs % &row.d).is_zero() {
            found.push(
                m,
                format!("d_(n+1) = {} does not divide (2n)!/n! = 2^n (2n-1)!!", row.d),
            );
        }
        // and index k + 2 for k + 1 = n - 1
        if let Some(prev_d) = &self.prev_d {
            if n >= 2 && n > self.lo && n <= self.hi && !prev_d.is_zero() {
                if !(&row.a % prev_d).is_zero() {
                    found.push(n, format!("d_(n-1) = {prev_d} does not divide a_n = {}", row.a));
                }
                if !(&row.d % prev_d).is_zero() {
                    found.push(n, format!("d_(n-1) = {prev_d} does not divide d_n = {}", row.d));
                }
            }
        }
        if m >= 1 {
            // (2m)!/m! -> (2n)!/n! multiplies by 2(2n - 1)
            self.rhs *= 2 * (2 * m + 1);
        } else {
            self.rhs = Nat::from(2u8);
        }
        self.prev_d = Some(row.d.clone());
    }
}

/// `v2(a_n) = e_n` from the mod-4 table, `q_n` odd, the first eight odd
/// parts, and the divided six-step relation for `q`.
pub struct ValuationAndOddPart {
    lo: u64,
    hi: u64,
    window: VecDeque<Nat>,
}

/// `q_0..q_7`.
pub const LEADING_ODD_PARTS: [u64; 8] = [1, 1, 1, 1, 5, 13, 19, 29];

impl ValuationAndOddPart {
    pub fn new(lo: u64, hi: u64) -> Self {
        Self {
            lo,
            hi,
            window: VecDeque::with_capacity(9),
        }
    }
}

impl RowCheck for ValuationAndOddPart {
    fn name(&self) -> CheckName {
        CheckName::EQ
    }

    fn range(&self) -> (u64, u64) {
        (self.lo, self.hi)
    }

    fn observe(&mut self, row: &SeqRow, found: &mut Counterexamples) {
        let n = row.n;
        self.window.push_back(row.q.clone());
        if self.window.len() > 9 {
            self.window.pop_front();
        }
        if !in_range(n, self.range()) {
            return;
        }
        if row.a.is_zero() {
            found.push(n, "a_n = 0 has no 2-adic valuation");
            return;
        }
        let expected = sequence::e_closed(n);
        if row.e != expected {
            found.push(n, format!("v2(a_n) = {} but e_n = {expected}", row.e));
        }
        if !row.q.is_odd() {
            found.push(n, format!("q_n = {} is even", row.q));
        }
        if let Some(&listed) = LEADING_ODD_PARTS.get(n as usize) {
            if row.q != Nat::from(listed) {
                found.push(n, format!("q_n = {}, expected {listed}", row.q));
            }
        }
        // q_{k+6} from q_{k-2}, q_{k+2} with k = n - 6 >= 2
        if n >= 8 && self.window.len() == 9 {
            let k = n - 6;
            let replay = sequence::q_step(k, &self.window[0], &self.window[4]).expect("k >= 2");
            if replay != signed(&row.q) {
                found.push(n, format!("six-step relation at k = {k} gives q_n = {replay}, table has {}", row.q));
            }
        }
    }
}

/// `d_n` against its closed form.
pub struct DFormula {
    lo: u64,
    hi: u64,
}

impl DFormula {
    pub fn new(lo: u64, hi: u64) -> Result<Self> {
        require_lo("check_d_formula", lo, 1)?;
        Ok(Self { lo, hi })
    }
}

impl RowCheck for DFormula {
    fn name(&self) -> CheckName {
        CheckName::DFormula
    }

    fn range(&self) -> (u64, u64) {
        (self.lo, self.hi)
    }

    fn observe(&mut self, row: &SeqRow, found: &mut Counterexamples) {
        if !in_range(row.n, self.range()) {
            return;
        }
        let expected = sequence::d_closed(row.n).expect("n >= 1");
        if row.d != expected {
            found.push(row.n, format!("d_n = {} but closed form gives {expected}", row.d));
        }
    }
}

/// `d_n^4 <= 2^(n+1)`, `D_n > 1` from `n = 4`, `D_n d_n = a_(n-1)`, and the
/// squared threshold `(n-1)! > 4^(n-1)` for `n >= 10`, which fails at `n = 9`.
pub struct QuarterBound {
    lo: u64,
    hi: u64,
    prev_a: Option<Nat>,
    /// `(n-1)!` for the current row.
    factorial: Nat,
}

impl QuarterBound {
    pub fn new(lo: u64, hi: u64) -> Result<Self> {
        require_lo("check_quarter_bound_and_D", lo, 1)?;
        Ok(Self {
            lo,
            hi,
            prev_a: None,
            factorial: Nat::one(),
        })
    }
}

impl RowCheck for QuarterBound {
    fn name(&self) -> CheckName {
        CheckName::QuarterBound
    }

    fn range(&self) -> (u64, u64) {
        (self.lo, self.hi)
    }

    fn observe(&mut self, row: &SeqRow, found: &mut Counterexamples) {
        let n = row.n;
        if n >= 2 {
            self.factorial *= n - 1;
        }
        let prev_a = self.prev_a.replace(row.a.clone());
        if n == 0 || !in_range(n, self.range()) {
            return;
        }
        let d4 = row.d.pow(4);
        let bound = Nat::one() << (n + 1);
        if d4 > bound {
            found.push(n, format!("d_n^4 = {d4} > 2^(n+1) = {bound}"));
        }
        if n >= 4 && row.den.is_one() {
            found.push(n, "reduced denominator D_n = 1");
        }
        if let Some(prev_a) = prev_a {
            let product = &row.den * &row.d;
            if product != prev_a {
                found.push(n, format!("D_n * d_n = {product} but a_(n-1) = {prev_a}"));
            }
        }
        let four_pow = Nat::one() << (2 * (n - 1));
        if n >= 10 && self.factorial <= four_pow {
            found.push(n, format!("(n-1)! = {} <= 4^(n-1) = {four_pow}", self.factorial));
        }
        if n == 9 && self.factorial > four_pow {
            found.push(n, format!("threshold not tight: 8! = {} > 4^8", self.factorial));
        }
    }
}

/// `D_n` even iff `n ≡ 0 (mod 4)`; reduced numerator even iff `n ≡ 2, 3 (mod 4)`.
pub struct Parity {
    lo: u64,
    hi: u64,
}

impl Parity {
    pub fn new(lo: u64, hi: u64) -> Result<Self> {
        require_lo("check_parity", lo, 1)?;
        Ok(Self { lo, hi })
    }
}

impl RowCheck for Parity {
    fn name(&self) -> CheckName {
        CheckName::Parity
    }

    fn range(&self) -> (u64, u64) {
        (self.lo, self.hi)
    }

    fn observe(&mut self, row: &SeqRow, found: &mut Counterexamples) {
        let n = row.n;
        if !in_range(n, self.range()) {
            return;
        }
        let den_even = row.den.is_even();
        if den_even != (n % 4 == 0) {
            found.push(n, format!("D_n = {} parity disagrees with n mod 4 = {}", row.den, n % 4));
        }
        let num = row.x_num();
        if num.is_even() != matches!(n % 4, 2 | 3) {
            found.push(n, format!("numerator {num} parity disagrees with n mod 4 = {}", n % 4));
        }
    }
}

/// The set of `n` with integral `x_n` is `{0, 1, 2, 3}` (cut at `max_n`).
pub struct Integrality {
    max_n: u64,
    integral: Vec<u64>,
}

impl Integrality {
    pub fn new(max_n: u64) -> Self {
        Self {
            max_n,
            integral: Vec::new(),
        }
    }

    pub fn indices(&self) -> &[u64] {
        &self.integral
    }
}

impl RowCheck for Integrality {
    fn name(&self) -> CheckName {
        CheckName::Integrality
    }

    fn range(&self) -> (u64, u64) {
        (0, self.max_n)
    }

    fn observe(&mut self, row: &SeqRow, _found: &mut Counterexamples) {
        if row.n <= self.max_n && row.den.is_one() {
            self.integral.push(row.n);
        }
    }

    fn finish(&mut self, found: &mut Counterexamples) {
        let expected: Vec<u64> = (0..=self.max_n.min(3)).collect();
        for n in &self.integral {
            if !expected.contains(n) {
                found.push(*n, "x_n is an integer");
            }
        }
        for n in expected {
            if !self.integral.contains(&n) {
                found.push(n, "x_n is not an integer");
            }
        }
    }
}

/// `a_{n+6} = 2(n^2+9n+19) a_{n+2} - n(n-1)(n+2)(n+5) a_{n-2}` for `n` in range.
/// Counterexamples name the reproduced index `n + 6`.
pub struct SixStep {
    lo: u64,
    hi: u64,
    window: VecDeque<Nat>,
}

impl SixStep {
    pub fn new(lo: u64, hi: u64) -> Result<Self> {
        require_lo("check_a6_lemma", lo, 2)?;
        Ok(Self {
            lo,
            hi,
            window: VecDeque::with_capacity(9),
        })
    }
}

impl RowCheck for SixStep {
    fn name(&self) -> CheckName {
        CheckName::A6Lemma
    }

    fn range(&self) -> (u64, u64) {
        (self.lo, self.hi)
    }

    fn observe(&mut self, row: &SeqRow, found: &mut Counterexamples) {
        self.window.push_back(row.a.clone());
        if self.window.len() > 9 {
            self.window.pop_front();
        }
        if row.n < 8 || self.window.len() < 9 {
            return;
        }
        let k = row.n - 6;
        if !in_range(k, self.range()) {
            return;
        }
        let got = sequence::a6_step(k, &self.window[0], &self.window[4]).expect("k >= 2");
        if got != signed(&row.a) {
            found.push(
                row.n,
                format!("six-step relation at n = {k} gives {got}, table has a_(n+6) = {}", row.a),
            );
        }
    }
}

/// `x_n = a_n / b_n` with `b_0 = 1`, `b_n = a_(n-1)`, compared by
/// cross-multiplication against the independently iterated `x_n`.
pub struct Ratio {
    lo: u64,
    hi: u64,
    prev_a: Nat,
}

impl Ratio {
    pub fn new(lo: u64, hi: u64) -> Self {
        Self {
            lo,
            hi,
            prev_a: Nat::one(),
        }
    }
}

impl RowCheck for Ratio {
    fn name(&self) -> CheckName {
        CheckName::Ratio
    }

    fn range(&self) -> (u64, u64) {
        (self.lo, self.hi)
    }

    fn observe(&mut self, row: &SeqRow, found: &mut Counterexamples) {
        // b_0 = 1 is the initial value of prev_a
        let b = std::mem::replace(&mut self.prev_a, row.a.clone());
        if !in_range(row.n, self.range()) {
            return;
        }
        if row.x_num() * &b != &row.a * &row.den {
            found.push(
                row.n,
                format!("x_n = {} but a_n / b_n = {}/{b}", row.x, row.a),
            );
        }
    }
}
