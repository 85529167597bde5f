//! Exact computations around the Galois module structure of the ring of integers
//! of a degree `p` extension of `p`-adic fields with dihedral or cyclic normal
//! closure, over its associated order in the unique Hopf-Galois structure.
//!
//! The modules build on each other bottom-up:
//!
//! * [`cfrac`]: continued fractions of `a/p` and the set `E`.
//! * [`ramification`]: validated parameter tuples and band classification.
//! * [`assocorder`]: the sequences `ν_i`, `n_i` and derived data.
//! * [`groupring`]: identities in `ℤ[σ]/(σ^p - 1)` and valuations of powers of `w`.
//! * [`redmethod`]: the reduction method for action matrices and the maximal case.
//! * [`patterns`]: residue patterns of action matrices and the determinant arguments.
//! * [`verdict`]: the freeness decision.

pub mod arith;
pub mod assocorder;
pub mod cfrac;
pub mod groupring;
pub mod patterns;
pub mod ramification;
pub mod redmethod;
pub mod verdict;

pub use assocorder::{OrderError, OrderProfile, RingReport, Scaffold};
pub use cfrac::{cf_expand, CfError, ContinuedFraction, ESet};
pub use groupring::{GroupRingElement, GroupRingError, ValCoeff};
pub use patterns::{Certificate, EntryClass, PatternError, ResiduePatternMatrix};
pub use ramification::{validate, CaseTag, Closure, RamificationData, RamificationError};
pub use redmethod::{ActionMatrix, MaximalModel, RedError, ReducedPair};
pub use verdict::{Verdict, VerdictCase, VerdictError};
