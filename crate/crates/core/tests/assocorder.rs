use assocfree::assocorder::{
    d_max, n_sequence_eps, n_sequence_min, nu_property_failures, nu_sequence, ring_conditions,
    scaffold_precision, OrderError,
};
use assocfree::cfrac::e_set_bruteforce;
use assocfree::ramification::{classify, valid_jumps};
use assocfree::{validate, CaseTag, Closure, OrderProfile};
use proptest::prelude::*;

fn dih(p: u64, e: u64, t: u64) -> assocfree::RamificationData {
    validate(p, e, t, Closure::Dihedral, true).unwrap()
}

#[test]
fn frozen_profile_of_thirteen() {
    let prof = OrderProfile::new(&dih(13, 2, 3)).unwrap();
    assert_eq!(prof.nu, vec![0, 1, 1, 2, 3, 3, 4, 4, 5, 6, 6, 7, 8]);
    assert_eq!(prof.n, vec![0, 0, 1, 1, 2, 3, 3, 4, 5, 5, 6, 7, 8]);
    assert_eq!(prof.e_set.to_vec(), vec![1, 2, 5]);
    assert!(prof.is_high_band());
    assert_eq!(prof.scaffold.unwrap().c, 8);
}

#[test]
fn cyclic_data_uses_t_as_slope() {
    let rd = validate(13, 4, 3, Closure::Cyclic, true).unwrap();
    assert_eq!(
        nu_sequence(&rd).unwrap(),
        (0..13).map(|i| (3 + 3 * i) / 13).collect::<Vec<_>>()
    );
    assert_eq!(ring_conditions(&rd), Err(OrderError::NotApplicable));
    let e_set = e_set_bruteforce(3, 13).unwrap();
    assert_eq!(
        n_sequence_min(&rd).unwrap(),
        n_sequence_eps(&rd, &e_set).unwrap()
    );
}

#[test]
fn every_valid_jump_has_consistent_profile() {
    for p in [3, 5, 7, 11, 13] {
        for e in 1..=6 {
            for rd in valid_jumps(p, e, Closure::Dihedral, true) {
                if rd.a == 0 {
                    assert_eq!(OrderProfile::new(&rd), Err(OrderError::MaximalCase));
                    continue;
                }
                let prof = OrderProfile::new(&rd).unwrap();
                assert!(nu_property_failures(&rd, &prof.nu).is_empty(), "{rd:?}");
                let low = classify(&rd).unwrap() == CaseTag::LowBand;
                assert_eq!(low, prof.scaffold.unwrap().l > 0);
            }
        }
    }
}

/// `d_m` straight from its definition over all even `d`.
fn d_oracle(nu: &[u64], m: usize) -> u64 {
    let mut best = 0;
    let mut d = 2;
    while m + d < nu.len() {
        if nu[m + d] == nu[m] + d as u64 / 2 {
            best = d;
        }
        d += 2;
    }
    best as u64
}

fn tuple_strategy() -> impl Strategy<Value = assocfree::RamificationData> {
    prop::sample::select(assocfree::arith::odd_primes_in(3, 400))
        .prop_flat_map(|p| (Just(p), 1..p, 0u64..3, 0u64..3))
        .prop_filter_map("valid", |(p, a, a0, extra)| {
            let ell = a0 * p + a;
            let t = (2 * ell).checked_sub(p).filter(|&t| t > 0)?;
            let e = (t * (p - 1)).div_ceil(2 * p) + extra;
            validate(p, e.max(1), t, Closure::Dihedral, true).ok()
        })
}

proptest! {
    #[test]
    fn n_formulas_agree(rd in tuple_strategy()) {
        let e_set = e_set_bruteforce(rd.a, rd.p).unwrap();
        prop_assert_eq!(n_sequence_min(&rd).unwrap(), n_sequence_eps(&rd, &e_set).unwrap());
    }

    #[test]
    fn d_matches_definition(rd in tuple_strategy()) {
        let nu = nu_sequence(&rd).unwrap();
        for m in 1..rd.p as usize {
            prop_assert_eq!(d_max(&rd, m).unwrap(), d_oracle(&nu, m));
        }
    }

    #[test]
    fn ring_condition_one_is_divisibility(rd in tuple_strategy()) {
        let r = ring_conditions(&rd).unwrap();
        prop_assert_eq!(r.cond1, (rd.p - 1) % rd.a == 0);
        prop_assert!(r.cond2);
        prop_assert_eq!(r.violations.is_empty(), r.is_ring());
    }

    #[test]
    fn scaffold_identity(rd in tuple_strategy()) {
        let s = scaffold_precision(&rd).unwrap();
        prop_assert_eq!(s.c, s.l * rd.p + rd.a);
        prop_assert!(nu_property_failures(&rd, &nu_sequence(&rd).unwrap()).is_empty());
        prop_assert!(n_sequence_min(&rd).unwrap().iter().zip(nu_sequence(&rd).unwrap()).all(|(n, v)| *n <= v));
    }
}
