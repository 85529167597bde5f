#![allow(dead_code)]

use assocfree::arith::odd_primes_in;
use assocfree::ramification::{classify, residue_tuples};
use assocfree::{CaseTag, RamificationData};

/// Every residue tuple with `a0 <= 2` and three values of `e` per pair, over all odd primes below the bound.
pub fn all_tuples(p_below: u64) -> Vec<RamificationData> {
    odd_primes_in(3, p_below)
        .into_iter()
        .flat_map(|p| residue_tuples(p, 2, 2))
        .collect()
}

pub fn high_band(p_below: u64) -> Vec<RamificationData> {
    all_tuples(p_below)
        .into_iter()
        .filter(|rd| classify(rd) == Ok(CaseTag::HighBand))
        .collect()
}
