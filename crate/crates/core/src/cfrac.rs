//! Continued fractions of `a/p`, fractional parts, distance to the nearest
//! integer, and the set `E` of running minima of `frac(h·a/p)`.
//!
//! Everything here is exact. Public helpers that take a rational work on
//! [`BigRational`]; the expansions themselves only ever see integers below `p`.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::is_odd_prime;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CfError {
    #[error("{0} is not an odd prime")]
    NotOddPrime(u64),
    #[error("numerator {a} is outside [0, {p})")]
    NumeratorOutOfRange { a: u64, p: u64 },
    #[error("the set E needs a numerator coprime to p (got a = 0)")]
    ZeroNumerator,
    #[error("distance to the nearest integer is undefined for the half-integer {0}")]
    HalfInteger(String),
}

/// Canonical expansion `a/p = [a_0; a_1, ..., a_n]` together with its convergents.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContinuedFraction {
    numerator: u64,
    denominator: u64,
    partials: Vec<u64>,
    convergents: Vec<(u64, u64)>,
}

impl ContinuedFraction {
    pub fn numerator(&self) -> u64 {
        self.numerator
    }

    pub fn denominator(&self) -> u64 {
        self.denominator
    }

    /// `[a_0, a_1, ..., a_n]`.
    pub fn partials(&self) -> &[u64] {
        &self.partials
    }

    /// The index `n` of the last partial quotient.
    pub fn length(&self) -> usize {
        self.partials.len() - 1
    }

    /// `a_i`, zero past the end of the expansion.
    pub fn partial(&self, i: usize) -> u64 {
        self.partials.get(i).copied().unwrap_or(0)
    }

    /// Convergents `(p_i, q_i)` for `i = 0..=n`.
    pub fn convergents(&self) -> &[(u64, u64)] {
        &self.convergents
    }

    /// Denominator `q_i` of the `i`-th convergent.
    pub fn q(&self, i: usize) -> u64 {
        self.convergents[i].1
    }

    pub fn qs(&self) -> Vec<u64> {
        self.convergents.iter().map(|c| c.1).collect()
    }

    pub fn value(&self) -> BigRational {
        BigRational::new(self.numerator.into(), self.denominator.into())
    }

    /// Folds the partial quotients back into a reduced fraction.
    pub fn reconstruct(&self) -> BigRational {
        let mut acc = BigRational::from_integer(BigInt::from(*self.partials.last().unwrap()));
        for &q in self.partials.iter().rev().skip(1) {
            acc = BigRational::from_integer(q.into()) + acc.recip();
        }
        acc
    }
}

/// Expands `a/p` for an odd prime `p` and `0 <= a < p`.
pub fn cf_expand(a: u64, p: u64) -> Result<ContinuedFraction, CfError> {
    if !is_odd_prime(p) {
        return Err(CfError::NotOddPrime(p));
    }
    if a >= p {
        return Err(CfError::NumeratorOutOfRange { a, p });
    }
    let mut partials = Vec::new();
    let (mut x, mut y) = (a, p);
    loop {
        let (q, r) = x.div_rem(&y);
        partials.push(q);
        if r == 0 {
            break;
        }
        x = y;
        y = r;
    }
    let convergents = convergents_of(&partials);
    Ok(ContinuedFraction {
        numerator: a,
        denominator: p,
        partials,
        convergents,
    })
}

fn convergents_of(partials: &[u64]) -> Vec<(u64, u64)> {
    // (p_{-2}, q_{-2}) = (0, 1), (p_{-1}, q_{-1}) = (1, 0)
    let (mut p2, mut q2, mut p1, mut q1) = (0u64, 1u64, 1u64, 0u64);
    partials
        .iter()
        .map(|&a| {
            let (pn, qn) = (a * p1 + p2, a * q1 + q2);
            (p2, q2, p1, q1) = (p1, q1, pn, qn);
            (pn, qn)
        })
        .collect()
}

/// Recomputes the convergent list from the partial quotients.
pub fn convergents(cf: &ContinuedFraction) -> Vec<(u64, u64)> {
    convergents_of(cf.partials())
}

pub fn frac_part(x: &BigRational) -> BigRational {
    x - x.floor()
}

/// `||x||`, the distance from `x` to the nearest integer: zero on integers and
/// undefined on the remaining points with `2x` an integer.
pub fn nearest_dist(x: &BigRational) -> Result<BigRational, CfError> {
    if x.is_integer() {
        return Ok(BigRational::zero());
    }
    let twice = x * BigInt::from(2);
    if twice.is_integer() {
        return Err(CfError::HalfInteger(x.to_string()));
    }
    let f = frac_part(x);
    let g = BigRational::one() - &f;
    Ok(if f < g { f } else { g })
}

/// `h·a/p` as an exact rational.
pub fn multiple(h: i64, a: u64, p: u64) -> BigRational {
    BigRational::new(BigInt::from(h) * BigInt::from(a), BigInt::from(p))
}

/// Modular distance `d(h, k) = ||(h - k)·a/p||` on the circle of length one.
pub fn modular_distance(h: i64, k: i64, a: u64, p: u64) -> Result<BigRational, CfError> {
    nearest_dist(&multiple(h - k, a, p))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ESet {
    p: u64,
    a: u64,
    members: BTreeSet<u64>,
}

impl ESet {
    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn a(&self) -> u64 {
        self.a
    }

    pub fn contains(&self, h: u64) -> bool {
        self.members.contains(&h)
    }

    pub fn members(&self) -> impl Iterator<Item = u64> + '_ {
        self.members.iter().copied()
    }

    pub fn to_vec(&self) -> Vec<u64> {
        self.members().collect()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Membership table indexed by `h` in `0..=p`.
    pub fn indicator(&self) -> Vec<bool> {
        let mut v = vec![false; self.p as usize + 1];
        for h in self.members() {
            v[h as usize] = true;
        }
        v
    }
}

fn check_e_args(a: u64, p: u64) -> Result<(), CfError> {
    if !is_odd_prime(p) {
        return Err(CfError::NotOddPrime(p));
    }
    if a == 0 {
        return Err(CfError::ZeroNumerator);
    }
    if a >= p {
        return Err(CfError::NumeratorOutOfRange { a, p });
    }
    Ok(())
}

/// `E` by direct scan: `h` is kept when `frac(h·a/p)` is a new strict minimum.
/// The fractional part is `(h·a mod p)/p`, so comparing residues is exact.
pub fn e_set_bruteforce(a: u64, p: u64) -> Result<ESet, CfError> {
    check_e_args(a, p)?;
    let mut members = BTreeSet::new();
    let mut best = p;
    for h in 1..p {
        let r = h * a % p;
        if r < best {
            members.insert(h);
            best = r;
        }
    }
    Ok(ESet { p, a, members })
}

/// `E` from the convergent denominators: `a'·q_{2i+1} + q_{2i}` for
/// `0 <= i < (n-1)/2`, with `a' < a_{2i+2}`, or `a' <= a_{2i+2}` when `2i = n - 3`.
pub fn e_set_parametrized(a: u64, p: u64) -> Result<ESet, CfError> {
    check_e_args(a, p)?;
    let cf = cf_expand(a, p)?;
    let n = cf.length();
    let mut members = BTreeSet::new();
    if n < 2 {
        // a = 1: [0; p]
        members.insert(1);
        return Ok(ESet { p, a, members });
    }
    // i < (n-1)/2  <=>  2i + 1 < n
    let mut i = 0;
    while 2 * i + 1 < n {
        let top = cf.partial(2 * i + 2);
        let last = if 2 * i + 3 == n { top } else { top - 1 };
        let (q_odd, q_even) = (cf.q(2 * i + 1), cf.q(2 * i));
        for r in 0..=last {
            members.insert(r * q_odd + q_even);
        }
        i += 1;
    }
    Ok(ESet { p, a, members })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn expands_known_fractions() {
        assert_eq!(cf_expand(8, 13).unwrap().partials(), &[0, 1, 1, 1, 1, 2]);
        assert_eq!(cf_expand(3, 5).unwrap().partials(), &[0, 1, 1, 2]);
        assert_eq!(cf_expand(1, 5).unwrap().partials(), &[0, 5]);
        let zero = cf_expand(0, 7).unwrap();
        assert_eq!(zero.partials(), &[0]);
        assert_eq!(zero.length(), 0);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert_eq!(cf_expand(1, 9), Err(CfError::NotOddPrime(9)));
        assert_eq!(cf_expand(1, 2), Err(CfError::NotOddPrime(2)));
        assert_eq!(
            cf_expand(13, 13),
            Err(CfError::NumeratorOutOfRange { a: 13, p: 13 })
        );
        assert_eq!(e_set_bruteforce(0, 13), Err(CfError::ZeroNumerator));
    }

    #[test]
    fn convergent_sequences() {
        let cf = cf_expand(8, 13).unwrap();
        assert_eq!(cf.qs(), vec![1, 1, 2, 3, 5, 13]);
        let ps: Vec<u64> = cf.convergents().iter().map(|c| c.0).collect();
        assert_eq!(ps, vec![0, 1, 1, 2, 3, 8]);
        assert_eq!(convergents(&cf), cf.convergents());
        assert_eq!(convergents(&cf_expand(1, 5).unwrap()), vec![(0, 1), (1, 5)]);
        assert_eq!(cf_expand(4, 13).unwrap().qs(), vec![1, 3, 13]);
    }

    #[test]
    fn fractional_parts() {
        assert_eq!(frac_part(&r(96, 13)), r(5, 13));
        assert_eq!(frac_part(&r(-1, 3)), r(2, 3));
        assert_eq!(frac_part(&r(4, 1)), r(0, 1));
    }

    #[test]
    fn nearest_integer_distance() {
        assert_eq!(nearest_dist(&r(8, 13)).unwrap(), r(5, 13));
        assert_eq!(nearest_dist(&r(40, 13)).unwrap(), r(1, 13));
        assert!(matches!(
            nearest_dist(&r(1, 2)),
            Err(CfError::HalfInteger(_))
        ));
        assert_eq!(nearest_dist(&r(3, 1)).unwrap(), r(0, 1));
        assert!(nearest_dist(&r(-3, 2)).is_err());
    }

    #[test]
    fn e_sets() {
        assert_eq!(e_set_bruteforce(8, 13).unwrap().to_vec(), vec![1, 2, 5]);
        assert_eq!(e_set_bruteforce(4, 13).unwrap().to_vec(), vec![1, 4, 7, 10]);
        assert_eq!(
            e_set_bruteforce(12, 13).unwrap().to_vec(),
            (1..13).collect::<Vec<_>>()
        );
        assert_eq!(e_set_parametrized(8, 13).unwrap().to_vec(), vec![1, 2, 5]);
        assert_eq!(
            e_set_parametrized(4, 13).unwrap().to_vec(),
            vec![1, 4, 7, 10]
        );
        assert_eq!(e_set_parametrized(1, 11).unwrap().to_vec(), vec![1]);
        assert_eq!(e_set_bruteforce(1, 11).unwrap().to_vec(), vec![1]);
    }

    #[test]
    fn reconstruction() {
        let cf = cf_expand(8, 13).unwrap();
        assert_eq!(cf.reconstruct(), r(8, 13));
        assert_eq!(cf_expand(0, 3).unwrap().reconstruct(), r(0, 1));
    }
}
