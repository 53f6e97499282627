//! Brute-force involution counting.
//!
//! Nothing here uses the three-term recurrence or the closed-form sum: the
//! count is obtained by walking every permutation of `n` points.

use std::time::Instant;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::report::{CheckName, CheckResult, Counterexamples};
use crate::sequence::a_seq;

/// Largest `n` accepted by [`count_involutions_enum`] (10! permutations).
pub const ENUMERATION_MAX: u64 = 10;

/// A bijection on `{0, ..., n-1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Permutation {
    mapping: Vec<usize>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Self {
            mapping: (0..n).collect(),
        }
    }

    pub fn from_mapping(mapping: Vec<usize>) -> Option<Self> {
        let mut seen = vec![false; mapping.len()];
        for &v in &mapping {
            if v >= mapping.len() || std::mem::replace(&mut seen[v], true) {
                return None;
            }
        }
        Some(Self { mapping })
    }

    pub fn len(&self) -> usize {
        self.mapping.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mapping.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.mapping
    }

    pub fn is_involution(&self) -> bool {
        self.mapping
            .iter()
            .enumerate()
            .all(|(i, &j)| self.mapping[j] == i)
    }

    /// `other ∘ self ∘ other⁻¹`.
    pub fn conjugate_by(&self, other: &Permutation) -> Permutation {
        let mut out = vec![0; self.len()];
        for (i, &j) in self.mapping.iter().enumerate() {
            out[other.mapping[i]] = other.mapping[j];
        }
        Permutation { mapping: out }
    }

    /// Advances to the lexicographic successor; returns false (leaving the
    /// permutation unchanged) at the last one.
    pub fn advance(&mut self) -> bool {
        let p = &mut self.mapping;
        if p.len() < 2 {
            return false;
        }
        let Some(i) = (0..p.len() - 1).rev().find(|&i| p[i] < p[i + 1]) else {
            return false;
        };
        let j = (i + 1..p.len()).rev().find(|&j| p[j] > p[i]).expect("p[i+1] > p[i]");
        p.swap(i, j);
        p[i + 1..].reverse();
        true
    }
}

/// Iterates over all permutations of `n` points in lexicographic order.
pub struct Permutations {
    current: Option<Permutation>,
}

impl Permutations {
    pub fn new(n: usize) -> Self {
        Self {
            current: Some(Permutation::identity(n)),
        }
    }
}

impl Iterator for Permutations {
    type Item = Permutation;

    fn next(&mut self) -> Option<Permutation> {
        let out = self.current.take()?;
        let mut following = out.clone();
        if following.advance() {
            self.current = Some(following);
        }
        Some(out)
    }
}

/// Number of `σ ∈ S_n` with `σ∘σ = id`, by exhaustive enumeration.
pub fn count_involutions_enum(n: u64) -> Result<u64> {
    if n > ENUMERATION_MAX {
        return Err(Error::EnumerationBound {
            max: ENUMERATION_MAX,
            got: n,
        });
    }
    let mut perm = Permutation::identity(n as usize);
    let mut count = 0u64;
    loop {
        if perm.is_involution() {
            count += 1;
        }
        if !perm.advance() {
            return Ok(count);
        }
    }
}

/// Enumeration counts for `n = 0..=max_n`, computed in parallel per `n`.
pub fn involution_counts(max_n: u64) -> Result<Vec<u64>> {
    if max_n > ENUMERATION_MAX {
        return Err(Error::EnumerationBound {
            max: ENUMERATION_MAX,
            got: max_n,
        });
    }
    (0..=max_n).into_par_iter().map(count_involutions_enum).collect()
}

/// Compares enumeration counts with the recurrence values for `n <= max_n`.
pub fn check_involution_identity(max_n: u64) -> Result<CheckResult> {
    let start = Instant::now();
    let counts = involution_counts(max_n)?;
    let mut found = Counterexamples::new();
    for (n, (count, a)) in counts.iter().zip(a_seq(max_n)).enumerate() {
        if a != (*count).into() {
            found.push(
                n as u64,
                format!("enumerated {count} involutions, recurrence gives a_n = {a}"),
            );
        }
    }
    Ok(CheckResult::new(
        CheckName::Oracle,
        0,
        max_n,
        found,
        start.elapsed(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_counts() {
        assert_eq!(count_involutions_enum(0).unwrap(), 1);
        // id, (01), (02), (12)
        let listed: Vec<Permutation> = Permutations::new(3).collect();
        assert_eq!(listed.len(), 6);
        assert_eq!(listed.iter().filter(|p| p.is_involution()).count(), 4);
        assert_eq!(count_involutions_enum(3).unwrap(), 4);
        assert_eq!(count_involutions_enum(4).unwrap(), 10);
        assert_eq!(
            count_involutions_enum(11),
            Err(Error::EnumerationBound { max: 10, got: 11 })
        );
    }

    #[test]
    fn enumeration_is_lexicographic_and_complete() {
        let all: Vec<Vec<usize>> = Permutations::new(4).map(|p| p.mapping).collect();
        assert_eq!(all.len(), 24);
        assert!(all.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(all[0], vec![0, 1, 2, 3]);
        assert_eq!(all[23], vec![3, 2, 1, 0]);
        assert_eq!(Permutations::new(0).count(), 1);
    }

    #[test]
    fn identity_check_passes() {
        let r = check_involution_identity(8).unwrap();
        assert!(r.passed());
        assert_eq!(r.range.hi, 8);
        assert_eq!(
            involution_counts(8).unwrap(),
            vec![1, 1, 2, 4, 10, 26, 76, 232, 764]
        );
        assert!(check_involution_identity(0).unwrap().passed());
        assert!(check_involution_identity(11).is_err());
    }

    #[test]
    fn count_is_invariant_under_relabeling() {
        for n in 0..=6 {
            let relabel = Permutation::from_mapping((0..n).rev().collect()).unwrap();
            let shifted = Permutation::from_mapping((0..n).map(|i| (i + 1) % n).collect()).unwrap();
            for other in [relabel, shifted] {
                let conjugated = Permutations::new(n)
                    .filter(|p| p.conjugate_by(&other).is_involution())
                    .count() as u64;
                assert_eq!(conjugated, count_involutions_enum(n as u64).unwrap());
            }
        }
    }

    #[test]
    fn rejects_non_bijections() {
        assert!(Permutation::from_mapping(vec![0, 0]).is_none());
        assert!(Permutation::from_mapping(vec![2, 0]).is_none());
        assert!(Permutation::from_mapping(vec![1, 0]).unwrap().is_involution());
    }
}
