//! Ramification parameters of a degree `p` extension: validation, the derived
//! triple `(ℓ, a, a0)`, band classification and the existence predicate.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{gcd, is_odd_prime};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Closure {
    Dihedral,
    Cyclic,
}

impl std::fmt::Display for Closure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Closure::Dihedral => "dihedral",
            Closure::Cyclic => "cyclic",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize)]
#[serde(tag = "error")]
pub enum RamificationError {
    #[error("{p} is not an odd prime")]
    NotOddPrime { p: u64 },
    #[error("t = {t} is outside [1, {bound}] for p = {p}, e = {e}")]
    OutOfRange {
        p: u64,
        e: u64,
        t: u64,
        bound: String,
    },
    #[error("jump t = {t} must be odd when the dihedral closure is totally ramified")]
    ParityViolation { t: u64 },
    #[error("p = {p} divides t = {t} but t is not the maximal jump")]
    DivisibilityViolation { p: u64, t: u64 },
    #[error("operation needs dihedral, totally ramified data")]
    NotDihedralTotallyRamified,
}

/// A validated parameter tuple.
///
/// For dihedral, totally ramified data `ℓ = (p + t)/2` and `(a0, a)` are the
/// quotient and remainder of `ℓ` by `p`. In every other case they come from `t`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RamificationData {
    pub p: u64,
    pub e: u64,
    pub t: u64,
    pub closure: Closure,
    pub totally_ramified: bool,
    pub ell: Option<u64>,
    pub a: u64,
    pub a0: u64,
}

impl RamificationData {
    pub fn is_dihedral_totram(&self) -> bool {
        self.closure == Closure::Dihedral && self.totally_ramified
    }

    /// The number whose expansion over `p` governs the valuations: `ℓ` or `t`.
    pub fn slope(&self) -> u64 {
        self.ell.unwrap_or(self.t)
    }

    /// `t` equals its upper bound, equivalently `a = 0`.
    pub fn is_maximal(&self) -> bool {
        self.a == 0
    }

    /// The upper bound `e + (p-1)/2` of `ν_{p-1}`.
    pub fn band_top(&self) -> u64 {
        self.e + (self.p - 1) / 2
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CaseTag {
    MaximalA0,
    HighBand,
    LowBand,
}

/// Upper bound for `t` as the numerator over `p - 1`: `2pe` or `pe`.
fn bound_numerator(p: u64, e: u64, closure: Closure, totally_ramified: bool) -> u64 {
    if closure == Closure::Dihedral && totally_ramified {
        2 * p * e
    } else {
        p * e
    }
}

pub fn validate(
    p: u64,
    e: u64,
    t: u64,
    closure: Closure,
    totally_ramified: bool,
) -> Result<RamificationData, RamificationError> {
    if !is_odd_prime(p) {
        return Err(RamificationError::NotOddPrime { p });
    }
    let num = bound_numerator(p, e, closure, totally_ramified);
    if e == 0 || t == 0 || t * (p - 1) > num {
        let bound = if num % (p - 1) == 0 {
            (num / (p - 1)).to_string()
        } else {
            format!("{}/{}", num, p - 1)
        };
        return Err(RamificationError::OutOfRange { p, e, t, bound });
    }
    let dihedral_totram = closure == Closure::Dihedral && totally_ramified;
    if dihedral_totram && t % 2 == 0 {
        return Err(RamificationError::ParityViolation { t });
    }
    if t % p == 0 && t * (p - 1) != num {
        return Err(RamificationError::DivisibilityViolation { p, t });
    }
    let (ell, base) = if dihedral_totram {
        let ell = (p + t) / 2;
        (Some(ell), ell)
    } else {
        (None, t)
    };
    Ok(RamificationData {
        p,
        e,
        t,
        closure,
        totally_ramified,
        ell,
        a: base % p,
        a0: base / p,
    })
}

/// All `t` accepted by [`validate`] for the given `(p, e)` and variant, ascending.
pub fn valid_jumps(
    p: u64,
    e: u64,
    closure: Closure,
    totally_ramified: bool,
) -> Vec<RamificationData> {
    if !is_odd_prime(p) || e == 0 {
        return Vec::new();
    }
    let top = bound_numerator(p, e, closure, totally_ramified) / (p - 1);
    (1..=top)
        .filter_map(|t| validate(p, e, t, closure, totally_ramified).ok())
        .collect()
}

/// Dihedral, totally ramified tuples with `ℓ = a0·p + a`, `1 <= a < p`, `a0 <= a0_max`.
/// Each pair contributes its `extra + 1` smallest admissible `e` and, when positive,
/// the `e` that puts it in the high band. Sorted by `(e, t)`, without repeats.
pub fn residue_tuples(p: u64, a0_max: u64, extra: u64) -> Vec<RamificationData> {
    if !is_odd_prime(p) {
        return Vec::new();
    }
    let mut seen = std::collections::BTreeMap::new();
    for a in 1..p {
        for a0 in 0..=a0_max {
            let ell = a0 * p + a;
            if 2 * ell <= p {
                continue;
            }
            let t = 2 * ell - p;
            let e_min = (t * (p - 1)).div_ceil(2 * p).max(1);
            let high = (a + (p - 1) * a0)
                .checked_sub((p - 1) / 2)
                .filter(|&e| e >= 1);
            for e in (e_min..=e_min + extra).chain(high) {
                if let Ok(rd) = validate(p, e, t, Closure::Dihedral, true) {
                    seen.insert((e, t), rd);
                }
            }
        }
    }
    seen.into_values().collect()
}

/// Band of dihedral, totally ramified data, decided by `ν_{p-1} = e + (p-1)/2`.
pub fn classify(rd: &RamificationData) -> Result<CaseTag, RamificationError> {
    if !rd.is_dihedral_totram() {
        return Err(RamificationError::NotDihedralTotallyRamified);
    }
    if rd.a == 0 {
        return Ok(CaseTag::MaximalA0);
    }
    let top = crate::assocorder::nu_at(rd, rd.p - 1);
    Ok(if top == rd.band_top() {
        CaseTag::HighBand
    } else {
        CaseTag::LowBand
    })
}

/// Whether a dihedral degree `2p` extension with jump `t` exists over a base whose
/// quadratic subextension `M` has absolute ramification index `e0`.
pub fn existence_check(p: u64, e0: u64, t: u64, m_ramified: bool) -> bool {
    let lhs = t * (p - 1);
    let rhs = p * e0;
    if lhs == rhs {
        return true;
    }
    t >= 1 && lhs < rhs && gcd(t, p) == 1 && (!m_ramified || t % 2 == 1)
}
