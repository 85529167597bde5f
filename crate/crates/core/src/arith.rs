//! Small integer helpers shared by the other modules.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

/// Trial-division primality test. Parameters stay at desk scale, so this is plenty.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n % 2 == 0 {
        return false;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

pub fn is_odd_prime(n: u64) -> bool {
    n % 2 == 1 && is_prime(n)
}

/// Odd primes `p` with `lo <= p < hi`.
pub fn odd_primes_in(lo: u64, hi: u64) -> Vec<u64> {
    (lo.max(3)..hi).filter(|&n| is_odd_prime(n)).collect()
}

/// Binomial coefficient, zero when `k > n` or either argument is negative.
pub fn binomial(n: i64, k: i64) -> BigInt {
    if k < 0 || n < 0 || k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// `v_p(x)`, or `None` for `x = 0`.
pub fn valuation(x: &BigInt, p: u64) -> Option<u32> {
    if x.is_zero() {
        return None;
    }
    let p = BigInt::from(p);
    let mut v = 0;
    let mut y = x.clone();
    loop {
        let (q, r) = y.div_rem(&p);
        if !r.is_zero() {
            return Some(v);
        }
        y = q;
        v += 1;
    }
}

pub fn gcd(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

/// `x mod p` in `[0, p)` for signed `x`.
pub fn residue(x: i64, p: u64) -> u64 {
    x.rem_euclid(p as i64) as u64
}

/// Inverse of `x` modulo the prime `p`.
pub fn inv_mod(x: u64, p: u64) -> Option<u64> {
    let x = x % p;
    if x == 0 {
        return None;
    }
    // Fermat; p is prime.
    Some(pow_mod(x, p - 2, p))
}

pub fn pow_mod(b: u64, mut e: u64, m: u64) -> u64 {
    let m = m as u128;
    let mut acc = 1u128 % m;
    let mut base = b as u128 % m;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % m;
        }
        base = base * base % m;
        e >>= 1;
    }
    acc as u64
}
