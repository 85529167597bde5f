//! Residue patterns of the matrices `M(π^{-ν_k} w^k)` modulo the maximal ideal.
//!
//! Entry `μ_{j,i}^{(k)}` (row `j`, column `i`) is the coordinate at `π^{-ν_j} w^j` of
//! `π^{-ν_k - n_i} w^{k+i}`. Its residue class is decided from fractional parts of
//! multiples of `a/p`; throughout, `h = p - i` and `r(x) = x·a mod p`, so that
//! `frac(x·a/p) = r(x)/p` and every comparison is between integers.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::assocorder::{OrderError, OrderProfile};
use crate::cfrac::{cf_expand, ContinuedFraction};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EntryClass {
    Zero,
    /// Nonzero with residue known to be 1.
    One,
    Nonzero,
    Unknown,
}

impl EntryClass {
    pub fn is_nonzero(self) -> bool {
        matches!(self, EntryClass::One | EntryClass::Nonzero)
    }

    pub fn may_be_nonzero(self) -> bool {
        self != EntryClass::Zero
    }

    fn symbol(self) -> char {
        match self {
            EntryClass::Zero => '.',
            EntryClass::One => '1',
            EntryClass::Nonzero => '*',
            EntryClass::Unknown => '?',
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PatternError {
    #[error("index out of range: k = {k}, i = {i}, j = {j}, p = {p}")]
    OutOfRange {
        k: usize,
        i: usize,
        j: usize,
        p: usize,
    },
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("structure mismatch: {0}")]
    StructureMismatch(String),
    #[error(transparent)]
    Order(#[from] OrderError),
}

struct Ctx<'a> {
    prof: &'a OrderProfile,
    p: usize,
    a: usize,
}

impl<'a> Ctx<'a> {
    fn new(prof: &'a OrderProfile) -> Self {
        Ctx {
            prof,
            p: prof.rd.p as usize,
            a: prof.rd.a as usize,
        }
    }

    fn r(&self, x: usize) -> usize {
        x * self.a % self.p
    }

    fn in_e(&self, h: usize) -> bool {
        h < self.p && self.prof.e_set.contains(h as u64)
    }

    fn class(&self, k: usize, i: usize, j: usize) -> Result<EntryClass, PatternError> {
        let p = self.p;
        if k >= p || i >= p || j >= p {
            return Err(PatternError::OutOfRange { k, i, j, p });
        }
        let h = p - i;
        let rk = self.r(k + 1);
        if k + i <= p - 1 {
            if j != k + i {
                return Ok(EntryClass::Zero);
            }
            let one = h == p || self.in_e(h) || rk < self.r(h);
            return Ok(if one {
                EntryClass::One
            } else {
                EntryClass::Zero
            });
        }
        if !self.prof.is_high_band() {
            return Err(PatternError::PreconditionViolated(
                "entries with k + i > p - 1 need nu_(p-1) = e + (p-1)/2".into(),
            ));
        }
        let m = k + i - (p - 1);
        if (j + m) % 2 == 1 {
            return Ok(EntryClass::Zero);
        }
        if m == p - 1 && j < m {
            return Ok(EntryClass::Unknown);
        }
        if j < m || j > m + self.prof.d(m) as usize {
            return Ok(EntryClass::Zero);
        }
        // a/p + frac((k+1)a/p) against frac(ha/p), shifted by one when h is in E
        let lhs = self.a + rk;
        let rhs = self.r(h) + if self.in_e(h) { p } else { 0 };
        Ok(if lhs < rhs {
            EntryClass::Nonzero
        } else {
            EntryClass::Zero
        })
    }
}

/// Residue class of `μ_{j,i}^{(k)}`.
pub fn entry_class(
    profile: &OrderProfile,
    k: usize,
    i: usize,
    j: usize,
) -> Result<EntryClass, PatternError> {
    Ctx::new(profile).class(k, i, j)
}

/// Diagonal of `M(1)`: nonzero at `i` exactly when `n_i = ν_i`.
pub fn m1_diagonal(profile: &OrderProfile) -> Vec<bool> {
    profile
        .n
        .iter()
        .zip(&profile.nu)
        .map(|(n, v)| n == v)
        .collect()
}

/// A `p × p` grid of residue classes, rows `j` and columns `i`, plus the cells that
/// carry the symbolic unit `u` from `u·M(1)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResiduePatternMatrix {
    pub p: usize,
    pub k: usize,
    pub cells: Vec<Vec<EntryClass>>,
    pub u_mask: BTreeSet<(usize, usize)>,
}

impl ResiduePatternMatrix {
    pub fn cell(&self, j: usize, i: usize) -> EntryClass {
        self.cells[j][i]
    }

    pub fn has_u(&self, j: usize, i: usize) -> bool {
        self.u_mask.contains(&(j, i))
    }

    /// The cell is exactly `u`: masked, with no contribution from the `k`-matrix.
    pub fn is_pure_u(&self, j: usize, i: usize) -> bool {
        self.has_u(j, i) && self.cells[j][i] == EntryClass::Zero
    }
}

impl fmt::Display for ResiduePatternMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for j in 0..self.p {
            let row: String = (0..self.p)
                .map(|i| {
                    if self.is_pure_u(j, i) {
                        'u'
                    } else {
                        self.cell(j, i).symbol()
                    }
                })
                .collect();
            writeln!(f, "{row}")?;
        }
        Ok(())
    }
}

/// Pattern of `M(π^{-ν_k} w^k)` alone.
pub fn build_pattern(
    profile: &OrderProfile,
    k: usize,
) -> Result<ResiduePatternMatrix, PatternError> {
    let ctx = Ctx::new(profile);
    let p = ctx.p;
    let cells = (0..p)
        .map(|j| {
            (0..p)
                .map(|i| ctx.class(k, i, j))
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ResiduePatternMatrix {
        p,
        k,
        cells,
        u_mask: BTreeSet::new(),
    })
}

/// Pattern of `M(u + π^{-ν_k} w^k) = u·M(1) + M(π^{-ν_k} w^k)`. A cell where both
/// terms are nonzero has a residue depending on `u` and is recorded as unknown.
pub fn build_pattern_alpha(
    profile: &OrderProfile,
    k: usize,
) -> Result<ResiduePatternMatrix, PatternError> {
    if !profile.is_high_band() {
        return Err(PatternError::PreconditionViolated(
            "profile is not in the high band".into(),
        ));
    }
    let mut pat = build_pattern(profile, k)?;
    for (i, on) in m1_diagonal(profile).into_iter().enumerate() {
        if on {
            pat.u_mask.insert((i, i));
            if pat.cells[i][i].is_nonzero() {
                pat.cells[i][i] = EntryClass::Unknown;
            }
        }
    }
    Ok(pat)
}

/// Perfect matchings of a bipartite graph given as candidate rows per column,
/// each returned as the row chosen for every column. Stops after `limit` matchings.
pub fn enumerate_matchings(
    candidates: &[Vec<usize>],
    rows: usize,
    limit: usize,
) -> Vec<Vec<usize>> {
    fn go(
        col: usize,
        cand: &[Vec<usize>],
        used: &mut [bool],
        cur: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
        limit: usize,
    ) {
        if out.len() >= limit {
            return;
        }
        if col == cand.len() {
            out.push(cur.clone());
            return;
        }
        for &r in &cand[col] {
            if !used[r] {
                used[r] = true;
                cur.push(r);
                go(col + 1, cand, used, cur, out, limit);
                cur.pop();
                used[r] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(
        0,
        candidates,
        &mut vec![false; rows],
        &mut Vec::new(),
        &mut out,
        limit,
    );
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SufficiencyWitness {
    pub k: usize,
    /// `matching[i - 1]` is the row used by column `i` of the minor on indices `1..p`.
    pub matching: Vec<usize>,
    /// Number of `u`-cells in that minor, bounding the degree of `P` with `det ≡ u·P(u)`.
    pub poly_degree_bound: usize,
    /// Indices `i >= 1` where `M(1)` has a zero on the diagonal.
    pub diagonal_zeros: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NecessityCertificate {
    pub s: usize,
    pub columns: Vec<usize>,
    pub allowed_rows: Vec<usize>,
    pub cover_deficit: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Certificate {
    Sufficiency(SufficiencyWitness),
    Necessity(NecessityCertificate),
}

impl Certificate {
    pub fn proves_free(&self) -> bool {
        matches!(self, Certificate::Sufficiency(_))
    }
}

fn require_high(profile: &OrderProfile) -> Result<ContinuedFraction, PatternError> {
    if !profile.is_high_band() {
        return Err(PatternError::PreconditionViolated(
            "profile is not in the high band".into(),
        ));
    }
    Ok(cf_expand(profile.rd.a, profile.rd.p).map_err(OrderError::from)?)
}

/// With `k = q_2 - 1` and `α = u + π^{-ν_k} w^k`, checks that the first row of
/// `M(α)` is `(u, 0, ..., 0)` and that exactly one perfect matching of the remaining
/// minor avoids every pure `u`-cell, namely `i ↦ k + i` wrapped into `1..p`.
pub fn sufficiency_check(profile: &OrderProfile) -> Result<SufficiencyWitness, PatternError> {
    let cf = require_high(profile)?;
    let n = cf.length();
    if !(3..=4).contains(&n) {
        return Err(PatternError::PreconditionViolated(format!(
            "continued fraction length {n} is not 3 or 4"
        )));
    }
    let p = profile.rd.p as usize;
    let k = cf.q(2) as usize - 1;
    let pat = build_pattern_alpha(profile, k)?;
    let mismatch = |s: String| Err(PatternError::StructureMismatch(s));

    if !pat.is_pure_u(0, 0) || (1..p).any(|i| pat.cell(0, i) != EntryClass::Zero) {
        return mismatch("first row is not (u, 0, ..., 0)".into());
    }
    let candidates: Vec<Vec<usize>> = (1..p)
        .map(|i| {
            (1..p)
                .filter(|&j| pat.cell(j, i).may_be_nonzero())
                .map(|j| j - 1)
                .collect()
        })
        .collect();
    let found = enumerate_matchings(&candidates, p - 1, 2);
    let expected: Vec<usize> = (1..p)
        .map(|i| {
            if k + i <= p - 1 {
                k + i
            } else {
                k + i - (p - 1)
            }
        })
        .collect();
    match found.as_slice() {
        [only] if only.iter().map(|r| r + 1).eq(expected.iter().copied()) => {}
        [_] => return mismatch("the u-free matching is not i -> k + i".into()),
        other => return mismatch(format!("{} u-free matchings instead of one", other.len())),
    }
    if let Some(i) = (1..p).find(|&i| !pat.cell(expected[i - 1], i).is_nonzero()) {
        return mismatch(format!(
            "matching cell in column {i} is not known to be nonzero"
        ));
    }
    let diagonal_zeros: Vec<usize> = m1_diagonal(profile)
        .iter()
        .enumerate()
        .skip(1)
        .filter(|(_, on)| !**on)
        .map(|(i, _)| i)
        .collect();
    let poly_degree_bound = (1..p).filter(|&i| pat.has_u(i, i)).count();
    if diagonal_zeros.is_empty() || poly_degree_bound > p - 2 {
        return mismatch("M(1) has no zero on the diagonal of the minor".into());
    }
    Ok(SufficiencyWitness {
        k,
        matching: expected,
        poly_degree_bound,
        diagonal_zeros,
    })
}

/// With `n = 2s + 1` or `2s + 2`, selects the `a_{2s} + 2` columns with
/// `h ∈ {2q_{2s-2}} ∪ {q_{2s-2} + a'q_{2s-1} + q_{2s} : 0 <= a' <= a_{2s}}` and checks
/// that for every `k` their possibly nonzero cells lie in the `a_{2s} + 1` rows
/// `p - 1 - q_{2s-2} - c·q_{2s-1}`, so every `det M(α)` vanishes mod the maximal ideal.
pub fn necessity_check(profile: &OrderProfile) -> Result<NecessityCertificate, PatternError> {
    let cf = require_high(profile)?;
    let n = cf.length();
    if n < 5 {
        return Err(PatternError::PreconditionViolated(format!(
            "continued fraction length {n} is below 5"
        )));
    }
    let p = profile.rd.p as usize;
    let s = (n - 1) / 2;
    let (qa, qb, qc) = (
        cf.q(2 * s - 2) as usize,
        cf.q(2 * s - 1) as usize,
        cf.q(2 * s) as usize,
    );
    let top = cf.partial(2 * s) as usize;
    let hs: Vec<usize> = std::iter::once(2 * qa)
        .chain((0..=top).map(|x| qa + x * qb + qc))
        .collect();
    if let Some(h) = hs.iter().find(|&&h| h == 0 || h >= p) {
        return Err(PatternError::StructureMismatch(format!(
            "h = {h} is not in [1, p)"
        )));
    }
    let mut columns: Vec<usize> = hs.iter().map(|h| p - h).collect();
    columns.sort_unstable();
    columns.dedup();
    let rows: BTreeSet<usize> = (0..=top)
        .filter_map(|c| (p - 1).checked_sub(qa + c * qb))
        .collect();
    let ctx = Ctx::new(profile);
    for k in 0..p {
        for &i in &columns {
            for j in 0..p {
                if ctx.class(k, i, j)?.may_be_nonzero() && !rows.contains(&j) {
                    return Err(PatternError::StructureMismatch(format!(
                        "cell (row {j}, column {i}) for k = {k} is outside the allowed rows"
                    )));
                }
            }
        }
    }
    if columns.len() <= rows.len() {
        return Err(PatternError::StructureMismatch(
            "no covering deficit".into(),
        ));
    }
    Ok(NecessityCertificate {
        s,
        cover_deficit: columns.len() - rows.len(),
        columns,
        allowed_rows: rows.into_iter().collect(),
    })
}

/// Runs whichever determinant argument applies to the length of the expansion.
pub fn certify(profile: &OrderProfile) -> Result<Certificate, PatternError> {
    let n = require_high(profile)?.length();
    if n >= 5 {
        necessity_check(profile).map(Certificate::Necessity)
    } else {
        sufficiency_check(profile).map(Certificate::Sufficiency)
    }
}
