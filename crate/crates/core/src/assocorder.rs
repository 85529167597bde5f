//! Valuation profile of the associated order.
//!
//! With `s` the slope of the data (`ℓ` for dihedral, totally ramified data and `t`
//! otherwise), the lattice of elements sending `π_L^a` into the integers has basis
//! exponents `ν_i = ⌊(a + i·s)/p⌋`, and the associated order has exponents
//! `n_i = min_j (ν_{i+j} - ν_j)`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cfrac::{e_set_bruteforce, CfError, ESet};
use crate::ramification::RamificationData;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OrderError {
    #[error("the valuation profile is degenerate when a = 0")]
    MaximalCase,
    #[error("operation needs dihedral, totally ramified data")]
    NotApplicable,
    #[error("m = {m} is outside [1, {max}]")]
    IndexOutOfRange { m: usize, max: usize },
    #[error("scaffold identity failed: c = {c}, l = {l}, a = {a}")]
    ScaffoldMismatch { c: i64, l: i64, a: u64 },
    #[error(transparent)]
    Cf(#[from] CfError),
}

fn require_nonmaximal(rd: &RamificationData) -> Result<(), OrderError> {
    if rd.a == 0 {
        Err(OrderError::MaximalCase)
    } else {
        Ok(())
    }
}

fn require_dihedral(rd: &RamificationData) -> Result<(), OrderError> {
    require_nonmaximal(rd)?;
    if rd.is_dihedral_totram() {
        Ok(())
    } else {
        Err(OrderError::NotApplicable)
    }
}

/// `ν_i` without any applicability check.
pub fn nu_at(rd: &RamificationData, i: u64) -> u64 {
    (rd.a + i * rd.slope()) / rd.p
}

pub fn nu_sequence(rd: &RamificationData) -> Result<Vec<u64>, OrderError> {
    require_nonmaximal(rd)?;
    Ok((0..rd.p).map(|i| nu_at(rd, i)).collect())
}

/// `n_i = min_{0 <= j <= p-1-i} (ν_{i+j} - ν_j)`.
pub fn n_sequence_min(rd: &RamificationData) -> Result<Vec<u64>, OrderError> {
    let nu = nu_sequence(rd)?;
    let p = nu.len();
    Ok((0..p)
        .map(|i| (0..p - i).map(|j| nu[i + j] - nu[j]).min().unwrap())
        .collect())
}

/// `n_i = i·a0 + ⌊i·a/p⌋ + [p - i ∈ E]`, with `h = p` never in `E`.
pub fn n_sequence_eps(rd: &RamificationData, e_set: &ESet) -> Result<Vec<u64>, OrderError> {
    require_nonmaximal(rd)?;
    let (p, a, a0) = (rd.p, rd.a, rd.a0);
    Ok((0..p)
        .map(|i| i * a0 + i * a / p + u64::from(e_set.contains(p - i)))
        .collect())
}

/// Largest even `d` with `m + d <= p - 1` and `ν_{m+d} = ν_m + d/2`; zero if none.
pub fn d_max(rd: &RamificationData, m: usize) -> Result<u64, OrderError> {
    require_dihedral(rd)?;
    let p = rd.p as usize;
    if m == 0 || m > p - 1 {
        return Err(OrderError::IndexOutOfRange { m, max: p - 1 });
    }
    let nu_m = nu_at(rd, m as u64);
    Ok((2..=p - 1 - m)
        .step_by(2)
        .filter(|&d| nu_at(rd, (m + d) as u64) == nu_m + d as u64 / 2)
        .max()
        .unwrap_or(0) as u64)
}

pub fn d_max_table(rd: &RamificationData) -> Result<BTreeMap<usize, u64>, OrderError> {
    (1..rd.p as usize).map(|m| Ok((m, d_max(rd, m)?))).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RingReport {
    pub cond1: bool,
    pub cond2: bool,
    /// Pairs `(i, j)` with `i <= j` breaking either condition.
    pub violations: Vec<(u64, u64)>,
}

impl RingReport {
    pub fn is_ring(&self) -> bool {
        self.cond1 && self.cond2
    }
}

/// Closure of the lattice under multiplication:
/// `ν_i + ν_j <= ν_{i+j}` for `i + j <= p - 1` and
/// `ν_i + ν_j <= e + (p-1)/2 + ν_{i+j+1-p}` for `i + j >= p`.
pub fn ring_conditions(rd: &RamificationData) -> Result<RingReport, OrderError> {
    require_dihedral(rd)?;
    let nu = nu_sequence(rd)?;
    let p = rd.p as usize;
    let top = rd.band_top();
    let (mut cond1, mut cond2) = (true, true);
    let mut violations = Vec::new();
    for i in 0..p {
        for j in i..p {
            let ok = if i + j <= p - 1 {
                let ok = nu[i] + nu[j] <= nu[i + j];
                cond1 &= ok;
                ok
            } else {
                let ok = nu[i] + nu[j] <= top + nu[i + j + 1 - p];
                cond2 &= ok;
                ok
            };
            if !ok {
                violations.push((i as u64, j as u64));
            }
        }
    }
    Ok(RingReport {
        cond1,
        cond2,
        violations,
    })
}

/// The associated order equals the lattice attached to `π_L^a` iff `a = 0` or `a | p - 1`.
pub fn orders_equal(rd: &RamificationData) -> bool {
    rd.a == 0 || (rd.p - 1) % rd.a == 0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Scaffold {
    /// `𝔠 = pe - (p-1)t/2`.
    pub c: u64,
    /// `l = e + (p-1)/2 - ν_{p-1}`.
    pub l: u64,
}

pub fn scaffold_precision(rd: &RamificationData) -> Result<Scaffold, OrderError> {
    require_dihedral(rd)?;
    let (p, e, t) = (rd.p as i64, rd.e as i64, rd.t as i64);
    let c = p * e - (p - 1) * t / 2;
    let l = rd.band_top() as i64 - nu_at(rd, rd.p - 1) as i64;
    if c < 0 || l < 0 || c != l * p + rd.a as i64 {
        return Err(OrderError::ScaffoldMismatch { c, l, a: rd.a });
    }
    Ok(Scaffold {
        c: c as u64,
        l: l as u64,
    })
}

/// Everything the other modules need about one non-maximal tuple.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrderProfile {
    pub rd: RamificationData,
    pub nu: Vec<u64>,
    pub n: Vec<u64>,
    pub e_set: ESet,
    /// `d_m` for `1 <= m <= p - 1`; empty unless the data is dihedral and totally ramified.
    pub d_max_table: BTreeMap<usize, u64>,
    pub scaffold: Option<Scaffold>,
}

impl OrderProfile {
    pub fn new(rd: &RamificationData) -> Result<Self, OrderError> {
        let nu = nu_sequence(rd)?;
        let n = n_sequence_min(rd)?;
        let e_set = e_set_bruteforce(rd.a, rd.p)?;
        let (d_max_table, scaffold) = if rd.is_dihedral_totram() {
            (d_max_table(rd)?, Some(scaffold_precision(rd)?))
        } else {
            (BTreeMap::new(), None)
        };
        Ok(OrderProfile {
            rd: *rd,
            nu,
            n,
            e_set,
            d_max_table,
            scaffold,
        })
    }

    pub fn p(&self) -> u64 {
        self.rd.p
    }

    pub fn d(&self, m: usize) -> u64 {
        self.d_max_table.get(&m).copied().unwrap_or(0)
    }

    /// `ν_{p-1} = e + (p-1)/2`.
    pub fn is_high_band(&self) -> bool {
        self.rd.is_dihedral_totram() && self.nu[self.nu.len() - 1] == self.rd.band_top()
    }
}

/// Checks the structural facts about `ν` for dihedral, totally ramified data and
/// returns a description of each one that fails.
pub fn nu_property_failures(rd: &RamificationData, nu: &[u64]) -> Vec<String> {
    let mut bad = Vec::new();
    let p = rd.p as usize;
    let e = rd.e;
    let last = nu[p - 1];
    if nu.windows(2).any(|w| w[0] > w[1]) {
        bad.push("nu is not non-decreasing".to_string());
    }
    if last != rd.a + (rd.p - 1) * rd.a0 {
        bad.push(format!("nu_(p-1) = {last} != a + (p-1)a0"));
    }
    if last > rd.band_top() {
        bad.push(format!("nu_(p-1) = {last} > e + (p-1)/2"));
    }
    let gap = if rd.a0 > 0 { 2 } else { 1 };
    for k in 0..p - 2 {
        if nu[k + 2] - nu[k] < gap {
            bad.push(format!("nu_{} - nu_{} < {gap}", k + 2, k));
        }
    }
    if p >= 3 && (nu[p - 1] - nu[p - 2] < 1 || nu[p - 2] - nu[p - 3] < 1) {
        bad.push("top differences of nu are not both positive".to_string());
    }
    for (s, &v) in nu.iter().enumerate().take(p - 1) {
        if v >= e + (s as u64).div_ceil(2) {
            bad.push(format!("nu_{s} = {v} >= e + ceil(s/2)"));
        }
    }
    bad
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ramification::{validate, Closure};

    fn dih(p: u64, e: u64, t: u64) -> RamificationData {
        validate(p, e, t, Closure::Dihedral, true).unwrap()
    }

    #[test]
    fn sequences_for_13_2_3() {
        let rd = dih(13, 2, 3);
        assert_eq!(
            nu_sequence(&rd).unwrap(),
            vec![0, 1, 1, 2, 3, 3, 4, 4, 5, 6, 6, 7, 8]
        );
        let n = n_sequence_min(&rd).unwrap();
        assert_eq!(n, vec![0, 0, 1, 1, 2, 3, 3, 4, 5, 5, 6, 7, 8]);
        let e_set = e_set_bruteforce(8, 13).unwrap();
        assert_eq!(n_sequence_eps(&rd, &e_set).unwrap(), n);
    }

    #[test]
    fn nu_for_7_2_1() {
        assert_eq!(
            nu_sequence(&dih(7, 2, 1)).unwrap(),
            vec![0, 1, 1, 2, 2, 3, 4]
        );
    }

    #[test]
    fn d_values() {
        let rd = dih(13, 2, 3);
        assert_eq!(d_max(&rd, 1).unwrap(), 6);
        assert_eq!(d_max(&rd, 2).unwrap(), 0);
        assert_eq!(d_max(&rd, 12).unwrap(), 0);
        assert!(d_max(&rd, 0).is_err());
    }

    #[test]
    fn ring_and_equality() {
        let r = ring_conditions(&dih(13, 2, 3)).unwrap();
        assert!(!r.cond1 && r.cond2);
        assert!(r.violations.contains(&(1, 1)));
        assert!(!ring_conditions(&dih(7, 2, 1)).unwrap().cond1);
        assert!(orders_equal(&dih(5, 2, 5)));
        assert!(!orders_equal(&dih(13, 2, 3)));
        assert!(orders_equal(&dih(3, 2, 1)));
        assert!(ring_conditions(&dih(3, 2, 1)).unwrap().is_ring());
    }

    #[test]
    fn scaffold() {
        assert_eq!(
            scaffold_precision(&dih(13, 2, 3)).unwrap(),
            Scaffold { c: 8, l: 0 }
        );
        assert_eq!(
            scaffold_precision(&dih(7, 2, 1)).unwrap(),
            Scaffold { c: 11, l: 1 }
        );
        assert_eq!(
            scaffold_precision(&dih(5, 2, 5)),
            Err(OrderError::MaximalCase)
        );
    }

    #[test]
    fn profile_and_properties() {
        let rd = dih(13, 2, 3);
        let prof = OrderProfile::new(&rd).unwrap();
        assert!(prof.is_high_band());
        assert_eq!(prof.d(1), 6);
        assert!(nu_property_failures(&rd, &prof.nu).is_empty());
        let cyc = validate(13, 4, 3, Closure::Cyclic, true).unwrap();
        let prof = OrderProfile::new(&cyc).unwrap();
        assert!(prof.scaffold.is_none() && prof.d_max_table.is_empty());
    }
}
