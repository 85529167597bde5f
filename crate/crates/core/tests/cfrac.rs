use assocfree::arith::{is_odd_prime, odd_primes_in};
use assocfree::cf_expand;
use assocfree::cfrac::{
    e_set_bruteforce, e_set_parametrized, modular_distance, multiple, nearest_dist,
};
use num_rational::BigRational;
use proptest::prelude::*;

/// Partial quotients by the Euclidean algorithm on `(a, p)`.
fn euclid(mut x: u64, mut y: u64) -> Vec<u64> {
    let mut out = Vec::new();
    while y != 0 {
        out.push(x / y);
        (x, y) = (y, x % y);
    }
    out
}

/// `||q·a/p||` scaled by `p`.
fn dist_scaled(q: u64, a: u64, p: u64) -> u64 {
    let r = q * a % p;
    r.min(p - r)
}

fn prime_and_numerator(max: u64) -> impl Strategy<Value = (u64, u64)> {
    (3..max)
        .prop_filter("odd prime", |&p| is_odd_prime(p))
        .prop_flat_map(|p| (Just(p), 1..p))
}

#[test]
fn frozen_expansions() {
    let cf = cf_expand(8, 13).unwrap();
    assert_eq!(cf.qs(), vec![1, 1, 2, 3, 5, 13]);
    assert_eq!(cf.convergents()[3], (2, 3));
    assert_eq!(e_set_bruteforce(8, 13).unwrap().to_vec(), vec![1, 2, 5]);
    assert_eq!(
        e_set_parametrized(4, 13).unwrap().to_vec(),
        vec![1, 4, 7, 10]
    );
    assert_eq!(e_set_parametrized(1, 7).unwrap().to_vec(), vec![1]);
}

#[test]
fn distances_strictly_decrease_from_the_first_convergent_on() {
    for p in odd_primes_in(3, 200) {
        for a in 1..p {
            let cf = cf_expand(a, p).unwrap();
            let qs = cf.qs();
            let (d0, d1) = (dist_scaled(qs[0], a, p), dist_scaled(qs[1], a, p));
            if cf.partial(1) == 1 {
                assert_eq!(d0, d1, "{a}/{p}");
            } else {
                assert!(d1 < d0, "{a}/{p}");
            }
            for i in 1..cf.length() {
                assert!(
                    dist_scaled(qs[i + 1], a, p) < dist_scaled(qs[i], a, p),
                    "{a}/{p} at {i}"
                );
            }
        }
    }
}

proptest! {
    #[test]
    fn expansion_matches_euclid((p, a) in prime_and_numerator(3000)) {
        let cf = cf_expand(a, p).unwrap();
        prop_assert_eq!(cf.partials().to_vec(), euclid(a, p));
        prop_assert_eq!(cf.reconstruct(), BigRational::new(a.into(), p.into()));
        prop_assert!(cf.length() == 0 || *cf.partials().last().unwrap() >= 2);
        prop_assert_eq!(cf.q(cf.length()), p);
        let conv = cf.convergents();
        for i in 1..conv.len() {
            let (pp, qq) = conv[i];
            let (pr, qr) = conv[i - 1];
            prop_assert_eq!((pp * qr).abs_diff(pr * qq), 1);
        }
    }

    #[test]
    fn e_sets_agree((p, a) in prime_and_numerator(3000)) {
        prop_assert_eq!(e_set_parametrized(a, p).unwrap(), e_set_bruteforce(a, p).unwrap());
    }

    #[test]
    fn best_approximation((p, a) in prime_and_numerator(400)) {
        let cf = cf_expand(a, p).unwrap();
        let qs = cf.qs();
        for i in 1..=cf.length() {
            for q in 1..qs[i] {
                prop_assert!(dist_scaled(q, a, p) >= dist_scaled(qs[i - 1], a, p));
            }
        }
        prop_assert_eq!(dist_scaled(qs[cf.length() - 1], a, p), 1);
    }

    #[test]
    fn nearest_dist_matches_residues((p, a) in prime_and_numerator(500), q in 0u64..2000) {
        let d = nearest_dist(&multiple(q as i64, a, p)).unwrap();
        prop_assert_eq!(d, BigRational::new(dist_scaled(q, a, p).into(), p.into()));
    }

    #[test]
    fn modular_distance_is_a_metric((p, a) in prime_and_numerator(200), h in 0i64..200, k in 0i64..200, l in 0i64..200) {
        let d = |x: i64, y: i64| modular_distance(x, y, a, p).unwrap();
        prop_assert_eq!(d(h, k), d(k, h));
        prop_assert!(d(h, l) <= d(h, k) + d(k, l));
        prop_assert_eq!(d(h, k) == BigRational::from_integer(0.into()), (h - k).rem_euclid(p as i64) == 0);
    }
}
