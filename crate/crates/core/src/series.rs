//! Truncated formal power series with exact rational coefficients.
//!
//! A series of order `K` carries exactly the coefficients of `x^0..=x^K`.
//! Binary operations require equal orders; use [`TruncatedSeries::truncate`]
//! to cut a series down explicitly.

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::arith::{ExactRational, Int, Nat};
use crate::error::{Error, Result};
use crate::sequence::AStream;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruncatedSeries {
    coeffs: Vec<ExactRational>,
}

impl TruncatedSeries {
    /// Series of order `coeffs.len() - 1`; an empty list is treated as the
    /// zero series of order 0.
    pub fn new(mut coeffs: Vec<ExactRational>) -> Self {
        if coeffs.is_empty() {
            coeffs.push(ExactRational::zero());
        }
        Self { coeffs }
    }

    pub fn from_integers(order: usize, coeffs: &[i64]) -> Self {
        let mut c: Vec<ExactRational> = coeffs
            .iter()
            .take(order + 1)
            .map(|&v| ExactRational::from_integer(v))
            .collect();
        c.resize(order + 1, ExactRational::zero());
        Self::new(c)
    }

    pub fn zero(order: usize) -> Self {
        Self::new(vec![ExactRational::zero(); order + 1])
    }

    pub fn one(order: usize) -> Self {
        Self::monomial(order, 0, ExactRational::one())
    }

    /// `c x^power`, or zero if `power > order`.
    pub fn monomial(order: usize, power: usize, c: ExactRational) -> Self {
        let mut s = Self::zero(order);
        if power <= order {
            s.coeffs[power] = c;
        }
        s
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, i: usize) -> &ExactRational {
        &self.coeffs[i]
    }

    pub fn coeffs(&self) -> &[ExactRational] {
        &self.coeffs
    }

    pub fn truncate(&self, order: usize) -> Result<Self> {
        if order > self.order() {
            return Err(Error::OrderMismatch {
                left: self.order(),
                right: order,
            });
        }
        Ok(Self::new(self.coeffs[..=order].to_vec()))
    }

    pub fn scale(&self, c: &ExactRational) -> Self {
        Self::new(self.coeffs.iter().map(|v| v * c).collect())
    }

    fn same_order(&self, other: &Self) -> Result<()> {
        if self.order() != other.order() {
            return Err(Error::OrderMismatch {
                left: self.order(),
                right: other.order(),
            });
        }
        Ok(())
    }

    /// Common denominator `L` and the integers `c_i * L`.
    fn to_scaled_integers(&self) -> (Int, Vec<Int>) {
        let lcm = self
            .coeffs
            .iter()
            .fold(Int::one(), |acc, c| acc.lcm(c.denom()));
        let scaled = self
            .coeffs
            .iter()
            .map(|c| c.numer() * (&lcm / c.denom()))
            .collect();
        (lcm, scaled)
    }
}

pub fn ps_add(f: &TruncatedSeries, g: &TruncatedSeries) -> Result<TruncatedSeries> {
    f.same_order(g)?;
    Ok(TruncatedSeries::new(
        f.coeffs.iter().zip(&g.coeffs).map(|(a, b)| a + b).collect(),
    ))
}

pub fn ps_sub(f: &TruncatedSeries, g: &TruncatedSeries) -> Result<TruncatedSeries> {
    f.same_order(g)?;
    Ok(TruncatedSeries::new(
        f.coeffs.iter().zip(&g.coeffs).map(|(a, b)| a - b).collect(),
    ))
}

/// Cauchy product truncated at the common order.
///
/// Both operands are scaled to integer coefficients first so that the
/// `O(K^2)` inner loop runs on integers and each output coefficient is
/// reduced once.
pub fn ps_mul(f: &TruncatedSeries, g: &TruncatedSeries) -> Result<TruncatedSeries> {
    f.same_order(g)?;
    let order = f.order();
    let (lf, fi) = f.to_scaled_integers();
    let (lg, gi) = g.to_scaled_integers();
    let g_support: Vec<usize> = (0..=order).filter(|&j| !gi[j].is_zero()).collect();
    let mut acc = vec![Int::zero(); order + 1];
    for (i, fv) in fi.iter().enumerate() {
        if fv.is_zero() {
            continue;
        }
        for &j in &g_support {
            if i + j > order {
                break;
            }
            acc[i + j] += fv * &gi[j];
        }
    }
    let denom = lf * lg;
    let coeffs = acc
        .into_iter()
        .map(|num| ExactRational::new(num, denom.clone()).expect("nonzero lcm"))
        .collect();
    Ok(TruncatedSeries::new(coeffs))
}

/// Termwise derivative; the result has order `K - 1`.
pub fn ps_derivative(f: &TruncatedSeries) -> Result<TruncatedSeries> {
    if f.order() == 0 {
        return Err(Error::ZeroOrder);
    }
    Ok(TruncatedSeries::new(
        f.coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c * &ExactRational::from(i as u64))
            .collect(),
    ))
}

/// `exp(g)` for `g(0) = 0`, from `E' = g' E`, `E(0) = 1`:
/// `(n+1) E_{n+1} = sum_j (j+1) g_{j+1} E_{n-j}`.
pub fn ps_exp(g: &TruncatedSeries) -> Result<TruncatedSeries> {
    if !g.coeffs[0].is_zero() {
        return Err(Error::NonZeroConstantTerm);
    }
    let order = g.order();
    // (j+1) g_{j+1}, nonzero entries only
    let dg: Vec<(usize, ExactRational)> = (0..order)
        .filter(|&j| !g.coeffs[j + 1].is_zero())
        .map(|j| (j, &g.coeffs[j + 1] * &ExactRational::from(j as u64 + 1)))
        .collect();
    let mut e = Vec::with_capacity(order + 1);
    e.push(ExactRational::one());
    for n in 0..order {
        let mut sum = ExactRational::zero();
        for (j, c) in &dg {
            if *j > n {
                break;
            }
            sum = &sum + &(c * &e[n - j]);
        }
        e.push(&sum / &ExactRational::from(n as u64 + 1));
    }
    Ok(TruncatedSeries::new(e))
}

/// `f(-x)`.
pub fn ps_subst_neg(f: &TruncatedSeries) -> TruncatedSeries {
    TruncatedSeries::new(
        f.coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| if i % 2 == 1 { -c.clone() } else { c.clone() })
            .collect(),
    )
}

/// `sum_n a_n x^n / n!` up to order `order`.
pub fn egf_f(order: usize) -> TruncatedSeries {
    let mut fact = Nat::one();
    let coeffs = AStream::new()
        .take(order + 1)
        .enumerate()
        .map(|(n, a)| {
            if n > 0 {
                fact *= n as u64;
            }
            ExactRational::from_nat_ratio(&a, &fact).expect("n! > 0")
        })
        .collect();
    TruncatedSeries::new(coeffs)
}

/// `x + x^2/2` at the given order (at least 2 for the quadratic term to appear).
pub fn egf_exponent(order: usize) -> TruncatedSeries {
    let mut s = TruncatedSeries::zero(order);
    if order >= 1 {
        s.coeffs[1] = ExactRational::one();
    }
    if order >= 2 {
        s.coeffs[2] = ExactRational::new(1.into(), 2.into()).expect("nonzero");
    }
    s
}

/// `sum_{m + r = 2n} (-1)^r C(2n, m) a_m a_r`, which should equal `(2n)!/n!`.
pub fn convolution_lhs(n: usize, a: &[Nat]) -> Result<Int> {
    let top = 2 * n;
    if a.len() < top + 1 {
        return Err(Error::InsufficientCoefficients {
            need: top,
            got: a.len(),
        });
    }
    let mut choose = Nat::one(); // C(2n, m)
    let mut total = Int::zero();
    for m in 0..=top {
        let r = top - m;
        let term = BigInt::from_biguint(Sign::Plus, &choose * &a[m] * &a[r]);
        if r % 2 == 0 {
            total += term;
        } else {
            total -= term;
        }
        if m < top {
            choose = choose * (top - m) as u64 / (m as u64 + 1);
        }
    }
    Ok(total)
}

/// `(2n)!/n! = 2^n (2n-1)!!`.
pub fn convolution_rhs(n: u64) -> Nat {
    (n + 1..=2 * n).fold(Nat::one(), |acc, k| acc * k)
}
