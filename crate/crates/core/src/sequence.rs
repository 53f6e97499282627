//! The rational sequence `x_{n+1} = 1 + n / x_n` and its integer companions.
//!
//! `a_n` satisfies `a_0 = a_1 = 1`, `a_{n+2} = a_{n+1} + (n+1) a_n`, and
//! `x_n = a_n / a_{n-1}` for `n >= 1`. The companion denominator sequence
//! `b_n` is never stored: `b_0 = 1` and `b_n = a_{n-1}` afterwards.

use std::collections::VecDeque;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::arith::{self, ExactRational, Int, Nat};
use crate::error::{Error, Result};

/// Streams `a_0, a_1, a_2, ...` keeping only the last two terms.
#[derive(Debug, Clone)]
pub struct AStream {
    n: u64,
    cur: Nat,
    next: Nat,
}

impl AStream {
    pub fn new() -> Self {
        Self {
            n: 0,
            cur: Nat::one(),
            next: Nat::one(),
        }
    }
}

impl Default for AStream {
    fn default() -> Self {
        Self::new()
    }
}

impl Iterator for AStream {
    type Item = Nat;

    fn next(&mut self) -> Option<Nat> {
        // a_{n+2} = a_{n+1} + (n+1) a_n
        let after = &self.next + &self.cur * (self.n + 1);
        let out = std::mem::replace(&mut self.cur, std::mem::replace(&mut self.next, after));
        self.n += 1;
        Some(out)
    }
}

pub fn a_seq(max_n: u64) -> Vec<Nat> {
    AStream::new().take(max_n as usize + 1).collect()
}

pub fn a_value(n: u64) -> Nat {
    AStream::new().nth(n as usize).expect("stream is infinite")
}

/// Streams the reduced values `x_0, x_1, ...`.
///
/// With `x_n = p/q` reduced, `x_{n+1} = (p + n q) / p` and the only common
/// factor that can appear is `gcd(n, p)`, so reduction never needs a
/// big-by-big gcd.
#[derive(Debug, Clone)]
pub struct XStream {
    n: u64,
    x: ExactRational,
}

impl XStream {
    pub fn new() -> Self {
        Self {
            n: 0,
            x: ExactRational::one(),
        }
    }
}

impl Default for XStream {
    fn default() -> Self {
        Self::new()
    }
}

impl Iterator for XStream {
    type Item = ExactRational;

    fn next(&mut self) -> Option<ExactRational> {
        let p = self.x.numer();
        let q = self.x.denom();
        // gcd(n, p) through p mod n keeps this linear in the size of p
        let g = if self.n == 0 {
            1
        } else {
            let r = (p.magnitude() % self.n).to_u64().expect("below n");
            self.n.gcd(&r)
        };
        let p_red = p / g;
        let num = &p_red + BigInt::from(self.n / g) * q;
        let following = ExactRational::from_reduced(num, p_red);
        self.n += 1;
        Some(std::mem::replace(&mut self.x, following))
    }
}

pub fn x_seq(max_n: u64) -> Vec<ExactRational> {
    XStream::new().take(max_n as usize + 1).collect()
}

/// `a_n = sum_{2s <= n} C(n, 2s) (2s-1)!!`.
pub fn a_closed(n: u64) -> Nat {
    let mut choose = Nat::one(); // C(n, 2s)
    let mut semi = Nat::one(); // (2s-1)!!
    let mut total = Nat::zero();
    let mut s = 0u64;
    loop {
        total += &choose * &semi;
        if 2 * s + 2 > n {
            break;
        }
        let k = 2 * s;
        choose = choose * ((n - k) * (n - k - 1)) / ((k + 1) * (k + 2));
        semi *= 2 * s + 1;
        s += 1;
    }
    total
}

/// `a_n mod m` with every intermediate reduced.
pub fn a_mod(n: u64, m: u64) -> Result<u64> {
    if m < 2 {
        return Err(Error::ModulusTooSmall(m));
    }
    Ok(AModStream::new(m)?.nth(n as usize).expect("stream is infinite"))
}

/// Streams `a_n mod m`.
#[derive(Debug, Clone)]
pub struct AModStream {
    m: u64,
    n: u64,
    cur: u64,
    next: u64,
}

impl AModStream {
    pub fn new(m: u64) -> Result<Self> {
        if m < 2 {
            return Err(Error::ModulusTooSmall(m));
        }
        Ok(Self {
            m,
            n: 0,
            cur: 1,
            next: 1,
        })
    }
}

impl Iterator for AModStream {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        let m = self.m as u128;
        let step = ((self.n + 1) as u128 % m) * self.cur as u128 % m;
        let after = ((self.next as u128 + step) % m) as u64;
        let out = self.cur;
        self.cur = self.next;
        self.next = after;
        self.n += 1;
        Some(out)
    }
}

/// `d_n = gcd(a_n, a_{n-1})`.
pub fn d(n: u64) -> Result<Nat> {
    if n == 0 {
        return Err(Error::IndexZero);
    }
    let mut stream = AStream::new().skip(n as usize - 1);
    let prev = stream.next().expect("stream is infinite");
    let cur = stream.next().expect("stream is infinite");
    arith::gcd(&cur, &prev)
}

/// Closed-form 2-adic valuation of `a_n`: `k, k, k+1, k+2` for
/// `n = 4k, 4k+1, 4k+2, 4k+3`.
pub fn e_closed(n: u64) -> u64 {
    let k = n / 4;
    match n % 4 {
        0 | 1 => k,
        2 => k + 1,
        _ => k + 2,
    }
}

/// Closed form of `d_n`: `2^k` for `n = 4k, 4k+1, 4k+2` and `2^(k+1)` for
/// `n = 4k+3`.
pub fn d_closed(n: u64) -> Result<Nat> {
    if n == 0 {
        return Err(Error::IndexZero);
    }
    let k = n / 4;
    let exp = if n % 4 == 3 { k + 1 } else { k };
    Ok(Nat::one() << exp)
}

/// A fractional linear map `x -> (alpha x + beta) / (gamma x + delta)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MoebiusMatrix {
    pub alpha: Int,
    pub beta: Int,
    pub gamma: Int,
    pub delta: Int,
}

impl MoebiusMatrix {
    pub fn new(alpha: Int, beta: Int, gamma: Int, delta: Int) -> Self {
        Self {
            alpha,
            beta,
            gamma,
            delta,
        }
    }

    pub fn identity() -> Self {
        Self::new(Int::one(), Int::zero(), Int::zero(), Int::one())
    }

    /// The single step `x -> 1 + m/x`, i.e. `[[1, m], [1, 0]]`.
    pub fn step(m: u64) -> Self {
        Self::new(Int::one(), Int::from(m), Int::one(), Int::zero())
    }

    pub fn determinant(&self) -> Int {
        &self.alpha * &self.delta - &self.beta * &self.gamma
    }

    pub fn compose(&self, rhs: &Self) -> Self {
        Self::new(
            &self.alpha * &rhs.alpha + &self.beta * &rhs.gamma,
            &self.alpha * &rhs.beta + &self.beta * &rhs.delta,
            &self.gamma * &rhs.alpha + &self.delta * &rhs.gamma,
            &self.gamma * &rhs.beta + &self.delta * &rhs.delta,
        )
    }

    pub fn apply(&self, x: &ExactRational) -> Result<ExactRational> {
        let (p, q) = (x.numer(), x.denom());
        let num = &self.alpha * p + &self.beta * q;
        let den = &self.gamma * p + &self.delta * q;
        ExactRational::new(num, den)
    }
}

/// `M_{n,k}`, built by `M_{n,j+1} = [[1, n+j], [1, 0]] M_{n,j}` from the identity.
pub fn moebius(n: u64, k: u64) -> MoebiusMatrix {
    (0..k).fold(MoebiusMatrix::identity(), |acc, j| {
        MoebiusMatrix::step(n + j).compose(&acc)
    })
}

pub fn moebius_apply(m: &MoebiusMatrix, x: &ExactRational) -> Result<ExactRational> {
    m.apply(x)
}

fn six_step_coefficients(n: u64) -> (Int, Int) {
    let n = Int::from(n);
    let lead = Int::from(2) * (&n * &n + Int::from(9) * &n + Int::from(19));
    let tail = &n * (&n - 1) * (&n + 2) * (&n + 5);
    (lead, tail)
}

/// `a_{n+6} = 2(n^2 + 9n + 19) a_{n+2} - n(n-1)(n+2)(n+5) a_{n-2}` for `n >= 2`.
///
/// Signed so that inconsistent inputs surface as-is rather than underflowing.
pub fn a6_step(n: u64, a_nm2: &Nat, a_np2: &Nat) -> Result<Int> {
    if n < 2 {
        return Err(Error::IndexBelowMinimum {
            op: "a6_step",
            min: 2,
            got: n,
        });
    }
    let (lead, tail) = six_step_coefficients(n);
    Ok(lead * to_int(a_np2) - tail * to_int(a_nm2))
}

/// The monic relation divided through by `2^{e_{n+6}}`:
/// `q_{n+6} = (n^2 + 9n + 19) q_{n+2} - n(n-1)(n+2)(n+5)/4 * q_{n-2}`.
pub fn q_step(n: u64, q_nm2: &Nat, q_np2: &Nat) -> Result<Int> {
    if n < 2 {
        return Err(Error::IndexBelowMinimum {
            op: "q_step",
            min: 2,
            got: n,
        });
    }
    let (lead, tail) = q_step_coefficients(n);
    Ok(lead * to_int(q_np2) - tail * to_int(q_nm2))
}

/// `(n^2 + 9n + 19, n(n-1)(n+2)(n+5)/4)`; the first is always odd and the
/// second always even.
pub fn q_step_coefficients(n: u64) -> (Int, Int) {
    let (lead, tail) = six_step_coefficients(n);
    let (quarter, rem) = tail.div_rem(&Int::from(4));
    assert!(rem.is_zero(), "4 does not divide n(n-1)(n+2)(n+5) at n = {n}");
    (lead / 2, quarter)
}

fn to_int(n: &Nat) -> Int {
    BigInt::from_biguint(Sign::Plus, n.clone())
}

/// All `n <= max_n` for which `x_n` is an integer.
pub fn integer_indices(max_n: u64) -> Vec<u64> {
    XStream::new()
        .take(max_n as usize + 1)
        .enumerate()
        .filter(|(_, x)| x.is_integer())
        .map(|(n, _)| n as u64)
        .collect()
}

/// One row of the master table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeqRow {
    pub n: u64,
    pub a: Nat,
    /// Reduced `x_n`.
    pub x: ExactRational,
    /// `gcd(a_n, a_{n-1})`; the placeholder 1 at `n = 0`.
    pub d: Nat,
    /// `v2(a_n)`.
    pub e: u64,
    /// Odd part of `a_n`.
    pub q: Nat,
    /// Reduced denominator of `x_n`.
    pub den: Nat,
}

impl SeqRow {
    pub fn x_num(&self) -> Nat {
        self.x.numer().magnitude().clone()
    }

    /// Checks every row invariant; `prev_a` is `a_{n-1}` when `n >= 1`.
    pub fn check_invariants(&self, prev_a: Option<&Nat>) -> std::result::Result<(), String> {
        if self.a.is_zero() {
            return Err(format!("n={}: a_n = 0", self.n));
        }
        if !self.q.is_odd() {
            return Err(format!("n={}: q = {} is even", self.n, self.q));
        }
        if &self.q << self.e != self.a {
            return Err(format!("n={}: q * 2^e != a", self.n));
        }
        if !self.x.is_positive() || self.x.denom().magnitude() != &self.den {
            return Err(format!("n={}: D does not match x", self.n));
        }
        match (self.n, prev_a) {
            (0, _) => {
                if self.x != ExactRational::one() || !self.d.is_one() {
                    return Err("n=0: expected x = 1 and d = 1".into());
                }
            }
            (n, Some(prev)) => {
                if &(&self.den * &self.d) != prev {
                    return Err(format!("n={n}: D * d != a_(n-1)"));
                }
                let ratio = ExactRational::from_nat_ratio(&self.a, prev)
                    .map_err(|e| format!("n={n}: {e}"))?;
                if ratio != self.x {
                    return Err(format!("n={n}: a_n / a_(n-1) != x_n"));
                }
            }
            (n, None) => return Err(format!("n={n}: missing a_(n-1)")),
        }
        Ok(())
    }
}

/// Replaces the emitted value of one `a_n` without touching the recurrence
/// state. Used to test that the verifier notices corrupted tables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fault {
    pub n: u64,
    pub value: Nat,
}

const BATCH: usize = 32;

/// Streams [`SeqRow`]s for `n = 0..=max_n`.
///
/// The recurrences run serially; the gcds of each batch of rows are computed
/// in parallel on the current rayon pool.
pub struct TableStream {
    max_n: u64,
    n: u64,
    a: AStream,
    x: XStream,
    prev_a: Option<Nat>,
    fault: Option<Fault>,
    ready: VecDeque<SeqRow>,
}

impl TableStream {
    pub fn new(max_n: u64) -> Self {
        Self {
            max_n,
            n: 0,
            a: AStream::new(),
            x: XStream::new(),
            prev_a: None,
            fault: None,
            ready: VecDeque::new(),
        }
    }

    pub fn with_fault(mut self, fault: Option<Fault>) -> Self {
        self.fault = fault;
        self
    }

    fn fill(&mut self) {
        let mut pending = Vec::with_capacity(BATCH);
        while pending.len() < BATCH && self.n <= self.max_n {
            let mut a = self.a.next().expect("stream is infinite");
            let x = self.x.next().expect("stream is infinite");
            if let Some(f) = &self.fault {
                if f.n == self.n {
                    a = f.value.clone();
                }
            }
            let prev = self.prev_a.replace(a.clone());
            pending.push((self.n, a, prev, x));
            self.n += 1;
        }
        let rows: Vec<SeqRow> = pending
            .into_par_iter()
            .map(|(n, a, prev, x)| build_row(n, a, prev.as_ref(), x))
            .collect();
        self.ready.extend(rows);
    }
}

/// `gcd(a, prev)` read off the reduced ratio `x = a/prev` when it fits:
/// `a = d x_num` and `prev = d x_den` with coprime `x_num, x_den` force
/// `gcd = d`. A division and a product instead of a full binary gcd.
fn gcd_from_ratio(a: &Nat, prev: &Nat, x: &ExactRational) -> Option<Nat> {
    let (num, den) = (x.numer().magnitude(), x.denom().magnitude());
    if num.is_zero() {
        return None;
    }
    let (d, r) = a.div_rem(num);
    (r.is_zero() && !d.is_zero() && &(&d * den) == prev).then_some(d)
}

fn build_row(n: u64, a: Nat, prev: Option<&Nat>, x: ExactRational) -> SeqRow {
    let d = match prev {
        Some(prev) if !(a.is_zero() && prev.is_zero()) => {
            gcd_from_ratio(&a, prev, &x).unwrap_or_else(|| a.gcd(prev))
        }
        _ => Nat::one(),
    };
    // a zero only shows up through an injected fault; keep e = 0, q = 0 so
    // the row fails its invariants instead of panicking here.
    let e = a.trailing_zeros().unwrap_or(0);
    let q = &a >> e;
    let den = x.denom().magnitude().clone();
    SeqRow {
        n,
        a,
        x,
        d,
        e,
        q,
        den,
    }
}

impl Iterator for TableStream {
    type Item = SeqRow;

    fn next(&mut self) -> Option<SeqRow> {
        if self.ready.is_empty() {
            self.fill();
        }
        self.ready.pop_front()
    }
}

pub fn table(max_n: u64) -> Vec<SeqRow> {
    TableStream::new(max_n).collect()
}
