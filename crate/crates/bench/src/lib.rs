//! Benchmark inputs shared by the criterion targets.

use assocfree::ramification::{valid_jumps, Closure};
use assocfree::RamificationData;

/// Every dihedral, totally ramified tuple with the given prime and `e` in `1..=e_max`.
pub fn dihedral_tuples(p: u64, e_max: u64) -> Vec<RamificationData> {
    (1..=e_max)
        .flat_map(|e| valid_jumps(p, e, Closure::Dihedral, true))
        .collect()
}
