//! Arithmetic in `ℤ[σ]/(σ^p - 1)`, the polynomial relation satisfied by
//! `σ - σ^{-1}`, and valuation bookkeeping for powers of `w = z(σ - σ^{-1})`.
//!
//! The element `z` is only modelled through its valuation: `v_K(z^2) = 1`, and the
//! coefficients `c_j` have `v_K(c_j) = e` because `v_p(c_j) = 1`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{binomial, is_odd_prime, valuation};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupRingError {
    #[error("{0} is not an odd prime")]
    NotOddPrime(u64),
    #[error("elements live in different group rings (p = {0} and p = {1})")]
    MismatchedPrime(u64, u64),
    #[error("c_{j} disagrees between its closed forms or has v_p != 1")]
    CoefficientMismatch { j: u64 },
    #[error("coefficient matrices fail check: {0}")]
    MatrixMismatch(String),
    #[error("valuation of w^(p-1+{m}) at w^{j} is {found}, expected {expected}")]
    StaircaseMismatch {
        m: usize,
        j: usize,
        found: String,
        expected: String,
    },
    #[error("e must be at least 1")]
    ZeroE,
}

fn check_prime(p: u64) -> Result<(), GroupRingError> {
    if is_odd_prime(p) {
        Ok(())
    } else {
        Err(GroupRingError::NotOddPrime(p))
    }
}

/// `Σ c_k σ^k` with `σ^p = 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GroupRingElement {
    p: u64,
    coeffs: Vec<BigInt>,
}

impl GroupRingElement {
    pub fn zero(p: u64) -> Self {
        GroupRingElement {
            p,
            coeffs: vec![BigInt::zero(); p as usize],
        }
    }

    pub fn one(p: u64) -> Self {
        Self::sigma_pow(p, 0)
    }

    /// `σ^k` for any integer `k`.
    pub fn sigma_pow(p: u64, k: i64) -> Self {
        let mut x = Self::zero(p);
        x.coeffs[k.rem_euclid(p as i64) as usize] = BigInt::one();
        x
    }

    /// `σ - σ^{-1}`.
    pub fn w(p: u64) -> Self {
        Self::sigma_pow(p, 1).sub(&Self::sigma_pow(p, -1)).unwrap()
    }

    /// Builds an element from coefficients of `σ^0, σ^1, ...`, folding indices mod `p`.
    pub fn from_coeffs<T: Into<BigInt>>(p: u64, coeffs: impl IntoIterator<Item = T>) -> Self {
        let mut x = Self::zero(p);
        for (k, c) in coeffs.into_iter().enumerate() {
            x.coeffs[k % p as usize] += c.into();
        }
        x
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    /// Coefficient of `σ^k`, reading negative `k` as `σ^{p+k}`.
    pub fn coeff(&self, k: i64) -> &BigInt {
        &self.coeffs[k.rem_euclid(self.p as i64) as usize]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    fn same_ring(&self, other: &Self) -> Result<(), GroupRingError> {
        if self.p == other.p {
            Ok(())
        } else {
            Err(GroupRingError::MismatchedPrime(self.p, other.p))
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, GroupRingError> {
        self.same_ring(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a + b)
            .collect();
        Ok(GroupRingElement { p: self.p, coeffs })
    }

    pub fn sub(&self, other: &Self) -> Result<Self, GroupRingError> {
        self.same_ring(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a - b)
            .collect();
        Ok(GroupRingElement { p: self.p, coeffs })
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        GroupRingElement {
            p: self.p,
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self, GroupRingError> {
        self.same_ring(other)?;
        let p = self.p as usize;
        let mut out = vec![BigInt::zero(); p];
        for (i, a) in self.coeffs.iter().enumerate().filter(|(_, a)| !a.is_zero()) {
            for (j, b) in other
                .coeffs
                .iter()
                .enumerate()
                .filter(|(_, b)| !b.is_zero())
            {
                out[(i + j) % p] += a * b;
            }
        }
        Ok(GroupRingElement {
            p: self.p,
            coeffs: out,
        })
    }

    /// `self^n` by `n` successive multiplications.
    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::one(self.p);
        for _ in 0..n {
            acc = acc.mul(self).unwrap();
        }
        acc
    }
}

impl fmt::Display for GroupRingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| format!("{c}*s^{k}"))
            .collect();
        if terms.is_empty() {
            f.write_str("0")
        } else {
            f.write_str(&terms.join(" + "))
        }
    }
}

/// `c_1, ..., c_{(p-1)/2}` with both closed forms cross-checked and `v_p(c_j) = 1`.
pub fn c_coeffs(p: u64) -> Result<Vec<BigInt>, GroupRingError> {
    check_prime(p)?;
    let (pi, half) = (p as i64, (p as i64 - 1) / 2);
    (1..=half)
        .map(|j| {
            let (c, r) = (BigInt::from(pi) * binomial(pi - j - 1, j - 1)).div_rem(&BigInt::from(j));
            let alt = binomial(pi - j, j) + binomial(pi - j - 1, j - 1);
            if !r.is_zero() || c != alt || valuation(&c, p) != Some(1) {
                Err(GroupRingError::CoefficientMismatch { j: j as u64 })
            } else {
                Ok(c)
            }
        })
        .collect()
}

/// `Σ_{j=0}^{(p-1)/2} c_j (σ - σ^{-1})^{p-2j}` with `c_0 = 1`, evaluated exactly.
pub fn wp_identity_sum(p: u64) -> Result<GroupRingElement, GroupRingError> {
    let cs = c_coeffs(p)?;
    let w = GroupRingElement::w(p);
    let mut sum = w.pow(p as u32);
    for (j, c) in cs.iter().enumerate() {
        let j = j as u32 + 1;
        sum = sum.add(&w.pow(p as u32 - 2 * j).scale(c))?;
    }
    Ok(sum)
}

pub fn verify_wp_identity(p: u64) -> bool {
    wp_identity_sum(p).is_ok_and(|s| s.is_zero())
}

/// Lower-triangular change of basis between `(σ - σ^{-1})^{2i+1}` and
/// `σ^{2j+1} - σ^{-(2j+1)}` for `0 <= i, j <= (p-1)/2`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AbMatrices {
    pub a: Vec<Vec<BigInt>>,
    pub b: Vec<Vec<BigInt>>,
}

/// `a_{ij} = (-1)^{i-j} C(2i+1, i-j)`, and `b` from
/// `σ^{2i+1} - σ^{-(2i+1)} = w^{2i+1} - Σ_{j<i} a_{ij} (σ^{2j+1} - σ^{-(2j+1)})`.
pub fn ab_matrices(p: u64) -> Result<AbMatrices, GroupRingError> {
    check_prime(p)?;
    let size = (p as usize + 1) / 2;
    let a: Vec<Vec<BigInt>> = (0..size as i64)
        .map(|i| {
            (0..size as i64)
                .map(|j| {
                    let c = binomial(2 * i + 1, i - j);
                    if (i - j) % 2 == 0 {
                        c
                    } else {
                        -c
                    }
                })
                .collect()
        })
        .collect();
    let mut b = vec![vec![BigInt::zero(); size]; size];
    for i in 0..size {
        b[i][i] = BigInt::one();
        for j in 0..i {
            for k in 0..=j {
                let t = &a[i][j] * &b[j][k];
                b[i][k] -= t;
            }
        }
    }
    let cs = c_coeffs(p)?;
    for i in 0..size {
        for k in 0..size {
            let delta: BigInt = (0..size).map(|j| &a[i][j] * &b[j][k]).sum();
            if delta != BigInt::from(u8::from(i == k)) {
                return Err(GroupRingError::MatrixMismatch(format!("a*b at ({i}, {k})")));
            }
            let closed = binomial((i + k + 1) as i64, (2 * k + 1) as i64)
                + binomial((i + k) as i64, (2 * k + 1) as i64);
            if b[i][k] != closed {
                return Err(GroupRingError::MatrixMismatch(format!(
                    "b closed form at ({i}, {k})"
                )));
            }
        }
    }
    let last = size - 1;
    for k in 0..size {
        let expect = if k == last {
            BigInt::one()
        } else {
            cs[last - k - 1].clone()
        };
        if b[last][k] != expect {
            return Err(GroupRingError::MatrixMismatch(format!(
                "b_(last, {k}) != c_{}",
                last - k
            )));
        }
    }
    Ok(AbMatrices { a, b })
}

/// Checks `σ^{2j+1} - σ^{-(2j+1)} = Σ_k b_{jk} w^{2k+1}` inside the group ring.
pub fn verify_b_expansion(p: u64, m: &AbMatrices) -> bool {
    let w = GroupRingElement::w(p);
    m.b.iter().enumerate().all(|(j, row)| {
        let lhs = GroupRingElement::sigma_pow(p, 2 * j as i64 + 1)
            .sub(&GroupRingElement::sigma_pow(p, -(2 * j as i64 + 1)))
            .unwrap();
        let rhs = row
            .iter()
            .enumerate()
            .fold(GroupRingElement::zero(p), |acc, (k, c)| {
                acc.add(&w.pow(2 * k as u32 + 1).scale(c)).unwrap()
            });
        lhs == rhs
    })
}

/// `K`-valuation of a coefficient: `val = None` means the coefficient is zero.
/// `exact = false` means `val` is only a lower bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ValCoeff {
    pub val: Option<u64>,
    pub exact: bool,
}

impl ValCoeff {
    pub const ZERO: ValCoeff = ValCoeff {
        val: None,
        exact: true,
    };

    pub fn exact(v: u64) -> Self {
        ValCoeff {
            val: Some(v),
            exact: true,
        }
    }

    pub fn bound(v: u64) -> Self {
        ValCoeff {
            val: Some(v),
            exact: false,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.val.is_none()
    }

    pub fn mul(self, other: Self) -> Self {
        match (self.val, other.val) {
            (Some(x), Some(y)) => ValCoeff {
                val: Some(x + y),
                exact: self.exact && other.exact,
            },
            _ => Self::ZERO,
        }
    }

    pub fn add(self, other: Self) -> Self {
        match (self.val, other.val) {
            (None, _) => other,
            (_, None) => self,
            (Some(x), Some(y)) if x < y => self,
            (Some(x), Some(y)) if y < x => other,
            (Some(x), Some(_)) => ValCoeff::bound(x),
        }
    }

    /// Whether every coefficient described by `self` is also described by `bound`.
    pub fn satisfies_bound(&self, bound: u64) -> bool {
        self.val.is_none_or(|v| v >= bound)
    }
}

impl fmt::Display for ValCoeff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.val, self.exact) {
            (None, _) => f.write_str("inf"),
            (Some(v), true) => write!(f, "={v}"),
            (Some(v), false) => write!(f, ">={v}"),
        }
    }
}

/// Expansion of `w^p` over `w^0, ..., w^{p-1}`: `v(c_j z^{2j}) = e + j` at `w^{p-2j}`.
fn wp_base(p: usize, e: u64) -> Vec<ValCoeff> {
    let mut base = vec![ValCoeff::ZERO; p];
    for j in 1..=(p - 1) / 2 {
        base[p - 2 * j] = ValCoeff::exact(e + j as u64);
    }
    base
}

/// Valuations of the expansion of `w^{p-1+m}` for `1 <= m <= p-1`, obtained by
/// multiplying by `w` and re-expanding the `w^p` overflow each step.
pub fn wpower_val_table_raw(
    p: u64,
    e: u64,
) -> Result<BTreeMap<usize, Vec<ValCoeff>>, GroupRingError> {
    check_prime(p)?;
    if e == 0 {
        return Err(GroupRingError::ZeroE);
    }
    let p = p as usize;
    let base = wp_base(p, e);
    let mut table = BTreeMap::new();
    let mut cur = base.clone();
    table.insert(1, cur.clone());
    for m in 2..p {
        let overflow = cur[p - 1];
        let mut next = vec![ValCoeff::ZERO; p];
        for k in 0..p - 1 {
            next[k + 1] = cur[k];
        }
        for (slot, b) in next.iter_mut().zip(&base) {
            *slot = slot.add(overflow.mul(*b));
        }
        table.insert(m, next.clone());
        cur = next;
    }
    Ok(table)
}

/// The expected entry of `w^{p-1+m}` at `w^j`: exact `e + (p-1)/2 - (j-m)/2` for
/// `j >= m` of the parity of `m`, the bound `2e + (p+1)/2 + (m-2-j)/2` below `m`,
/// and zero at the other parity.
pub fn wpower_expected(p: u64, e: u64, m: usize, j: usize) -> ValCoeff {
    let half = (p - 1) / 2;
    if j == 0 || j >= p as usize || (j + m) % 2 == 1 {
        ValCoeff::ZERO
    } else if j >= m {
        ValCoeff::exact(e + half - ((j - m) / 2) as u64)
    } else {
        ValCoeff::bound(2 * e + half + 1 + ((m - 2 - j) / 2) as u64)
    }
}

/// The inductive table, checked against the closed forms and reported in them:
/// unit coefficients keep their exact valuation, the remaining ones are recorded
/// as the stated lower bound once the computed valuation is seen to respect it.
pub fn wpower_val_table(p: u64, e: u64) -> Result<BTreeMap<usize, Vec<ValCoeff>>, GroupRingError> {
    let raw = wpower_val_table_raw(p, e)?;
    let mut out = BTreeMap::new();
    for (&m, row) in &raw {
        let mut stated = Vec::with_capacity(row.len());
        for (j, &got) in row.iter().enumerate() {
            let want = wpower_expected(p, e, m, j);
            let ok = match (want.val, want.exact) {
                (None, _) => got.is_zero(),
                (Some(_), true) => got == want,
                (Some(v), false) => got.satisfies_bound(v),
            };
            if !ok {
                return Err(GroupRingError::StaircaseMismatch {
                    m,
                    j,
                    found: got.to_string(),
                    expected: want.to_string(),
                });
            }
            stated.push(want);
        }
        out.insert(m, stated);
    }
    Ok(out)
}
