//! Freeness of the ring of integers over its associated order.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::assocorder::{OrderError, OrderProfile};
use crate::cfrac::cf_expand;
use crate::patterns::{certify, Certificate, PatternError};
use crate::ramification::{
    classify, validate, CaseTag, Closure, RamificationData, RamificationError,
};

/// Expansions of length at most this decide freeness in the high band.
pub const CF_THRESHOLD: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VerdictCase {
    #[serde(rename = "maximal_a0")]
    MaximalA0,
    /// `a | p - 1`, a sufficient condition.
    DividesPm1,
    /// Low band, where divisibility is also necessary.
    DividesPm1Converse,
    ContinuedFractionLen,
    NonTotRamDelegated,
}

impl VerdictCase {
    pub fn as_str(self) -> &'static str {
        match self {
            VerdictCase::MaximalA0 => "maximal_a0",
            VerdictCase::DividesPm1 => "divides_pm1",
            VerdictCase::DividesPm1Converse => "divides_pm1_converse",
            VerdictCase::ContinuedFractionLen => "continued_fraction_len",
            VerdictCase::NonTotRamDelegated => "non_tot_ram_delegated",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReasonCode {
    AIsZero,
    ADividesPm1,
    ANotDividesPm1,
    CfLengthAtMostThreshold,
    CfLengthAboveThreshold,
}

impl ReasonCode {
    pub fn as_str(self) -> &'static str {
        match self {
            ReasonCode::AIsZero => "a_is_zero",
            ReasonCode::ADividesPm1 => "a_divides_p_minus_1",
            ReasonCode::ANotDividesPm1 => "a_not_divides_p_minus_1",
            ReasonCode::CfLengthAtMostThreshold => "cf_length_at_most_threshold",
            ReasonCode::CfLengthAboveThreshold => "cf_length_above_threshold",
        }
    }
}

/// Which rule applies to the tuple.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    /// `a = 0`.
    Maximal,
    /// `a | p - 1` is necessary and sufficient.
    Divisibility,
    /// Length of the expansion at most [`CF_THRESHOLD`] is necessary and sufficient.
    ContinuedFraction,
}

/// The quantities the decision is made from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Reason {
    pub code: ReasonCode,
    pub rule: Rule,
    pub a: u64,
    pub p: u64,
    pub cf_length: usize,
    pub cf_threshold: usize,
    /// Band of dihedral, totally ramified data.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub band: Option<CaseTag>,
    /// `(t + 1)(p - 1)` and `pe` for cyclic data; the cf rule applies when the first is at least the second.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub boundary: Option<(u64, u64)>,
}

impl Reason {
    /// The decision implied by the recorded quantities alone.
    pub fn recompute(&self) -> bool {
        match self.rule {
            Rule::Maximal => self.a == 0,
            Rule::Divisibility => self.a != 0 && (self.p - 1) % self.a == 0,
            Rule::ContinuedFraction => self.cf_length <= self.cf_threshold,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub p: u64,
    pub e: u64,
    pub t: u64,
    pub closure: Closure,
    pub totally_ramified: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub ell: Option<u64>,
    pub a: u64,
    pub a0: u64,
    /// Partial quotients of `ℓ/p` (dihedral, totally ramified) or `t/p`.
    pub cf: Vec<u64>,
    pub cf_length: usize,
    pub case: VerdictCase,
    pub free: bool,
    pub reason: Reason,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub cross_checks: Option<Certificate>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VerdictError {
    #[error(transparent)]
    Ramification(#[from] RamificationError),
    #[error(transparent)]
    Order(#[from] OrderError),
    #[error(transparent)]
    Pattern(#[from] PatternError),
    #[error("inconsistent decision: {0}")]
    Inconsistent(String),
}

fn expansion(rd: &RamificationData) -> Result<(Vec<u64>, usize), VerdictError> {
    if rd.a == 0 {
        return Ok((vec![rd.a0], 0));
    }
    let cf = cf_expand(rd.a, rd.p).map_err(OrderError::from)?;
    let mut partials = cf.partials().to_vec();
    partials[0] = rd.a0;
    Ok((partials, cf.length()))
}

fn divides(a: u64, p: u64) -> bool {
    a != 0 && (p - 1) % a == 0
}

fn assemble(
    rd: &RamificationData,
    case: VerdictCase,
    reason: Reason,
) -> Result<Verdict, VerdictError> {
    let (cf, cf_length) = expansion(rd)?;
    Ok(Verdict {
        p: rd.p,
        e: rd.e,
        t: rd.t,
        closure: rd.closure,
        totally_ramified: rd.totally_ramified,
        ell: rd.ell,
        a: rd.a,
        a0: rd.a0,
        cf,
        cf_length,
        case,
        free: reason.recompute(),
        reason,
        cross_checks: None,
    })
}

fn base_reason(rd: &RamificationData, rule: Rule, cf_length: usize) -> Reason {
    let free_by_cf = cf_length <= CF_THRESHOLD;
    let code = match rule {
        Rule::Maximal => ReasonCode::AIsZero,
        Rule::Divisibility if divides(rd.a, rd.p) => ReasonCode::ADividesPm1,
        Rule::Divisibility => ReasonCode::ANotDividesPm1,
        Rule::ContinuedFraction if free_by_cf => ReasonCode::CfLengthAtMostThreshold,
        Rule::ContinuedFraction => ReasonCode::CfLengthAboveThreshold,
    };
    Reason {
        code,
        rule,
        a: rd.a,
        p: rd.p,
        cf_length,
        cf_threshold: CF_THRESHOLD,
        band: None,
        boundary: None,
    }
}

/// In the cf regime divisibility must already give a short expansion.
fn check_divisibility_consistent(
    rd: &RamificationData,
    cf_length: usize,
) -> Result<(), VerdictError> {
    if divides(rd.a, rd.p) && cf_length > 2 {
        return Err(VerdictError::Inconsistent(format!(
            "a = {} divides p - 1 = {} but the expansion has length {cf_length}",
            rd.a,
            rd.p - 1
        )));
    }
    Ok(())
}

/// Decision for dihedral, totally ramified data. In the high band with expansion
/// length at least 3 the matching determinant certificate is attached and must agree.
pub fn dihedral_verdict(rd: &RamificationData) -> Result<Verdict, VerdictError> {
    let band = classify(rd)?;
    let (_, cf_length) = expansion(rd)?;
    let (rule, case) = match band {
        CaseTag::MaximalA0 => (Rule::Maximal, VerdictCase::MaximalA0),
        CaseTag::LowBand => (Rule::Divisibility, VerdictCase::DividesPm1Converse),
        CaseTag::HighBand => {
            check_divisibility_consistent(rd, cf_length)?;
            if divides(rd.a, rd.p) {
                (Rule::ContinuedFraction, VerdictCase::DividesPm1)
            } else {
                (Rule::ContinuedFraction, VerdictCase::ContinuedFractionLen)
            }
        }
    };
    let mut reason = base_reason(rd, rule, cf_length);
    reason.band = Some(band);
    let mut v = assemble(rd, case, reason)?;
    if band == CaseTag::HighBand && cf_length >= 3 {
        let cert = certify(&OrderProfile::new(rd)?)?;
        if cert.proves_free() != v.free {
            return Err(VerdictError::Inconsistent(
                "the determinant certificate disagrees with the expansion length".into(),
            ));
        }
        v.cross_checks = Some(cert);
    }
    Ok(v)
}

fn cyclic_like(
    rd: &RamificationData,
    case_override: Option<VerdictCase>,
) -> Result<Verdict, VerdictError> {
    let (_, cf_length) = expansion(rd)?;
    let boundary = ((rd.t + 1) * (rd.p - 1), rd.p * rd.e);
    let (rule, case) = if rd.a == 0 {
        (Rule::Maximal, VerdictCase::MaximalA0)
    } else if boundary.0 >= boundary.1 {
        check_divisibility_consistent(rd, cf_length)?;
        (Rule::ContinuedFraction, VerdictCase::ContinuedFractionLen)
    } else {
        (Rule::Divisibility, VerdictCase::DividesPm1Converse)
    };
    let mut reason = base_reason(rd, rule, cf_length);
    reason.boundary = Some(boundary);
    assemble(rd, case_override.unwrap_or(case), reason)
}

/// Decision for a totally ramified cyclic degree `p` extension with jump `t`.
pub fn cyclic_verdict(p: u64, e: u64, t: u64) -> Result<Verdict, VerdictError> {
    let rd = validate(p, e, t, Closure::Cyclic, true)?;
    cyclic_like(&rd, None)
}

/// Decision for dihedral data whose normal closure is not totally ramified, read off
/// the cyclic extension of the unramified quadratic base.
pub fn nontot_verdict(p: u64, e: u64, t: u64) -> Result<Verdict, VerdictError> {
    let rd = validate(p, e, t, Closure::Dihedral, false)?;
    cyclic_like(&rd, Some(VerdictCase::NonTotRamDelegated))
}

/// Dispatches on the closure and ramification of the tuple.
pub fn verdict(
    p: u64,
    e: u64,
    t: u64,
    closure: Closure,
    totally_ramified: bool,
) -> Result<Verdict, VerdictError> {
    match (closure, totally_ramified) {
        (Closure::Dihedral, true) => dihedral_verdict(&validate(p, e, t, closure, true)?),
        (Closure::Dihedral, false) => nontot_verdict(p, e, t),
        (Closure::Cyclic, _) => {
            let rd = validate(p, e, t, closure, totally_ramified)?;
            cyclic_like(&rd, None)
        }
    }
}
