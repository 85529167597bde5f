//! Invariant suites behind `assocfree verify`.

use std::fmt;

use assocfree::arith::odd_primes_in;
use assocfree::assocorder::{
    d_max, n_sequence_eps, n_sequence_min, nu_property_failures, nu_sequence, orders_equal,
    ring_conditions, scaffold_precision,
};
use assocfree::cfrac::{e_set_bruteforce, e_set_parametrized};
use assocfree::groupring::{
    ab_matrices, c_coeffs, verify_b_expansion, verify_wp_identity, wpower_val_table,
};
use assocfree::patterns::{certify, Certificate};
use assocfree::ramification::{classify, residue_tuples};
use assocfree::redmethod::{
    basis_action, basis_from_reduced, delta_action_holds, idempotent_check, reduce,
};
use assocfree::verdict::dihedral_verdict;
use assocfree::{cf_expand, CaseTag, MaximalModel, OrderProfile, RamificationData};
use clap::ValueEnum;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Cfrac,
    Assocorder,
    Groupring,
    Redmethod,
    Patterns,
    All,
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub cases: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<String>,
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.pass {
            write!(f, "PASS {} ({} cases)", self.name, self.cases)
        } else {
            write!(
                f,
                "FAIL {} ({} cases): counterexample {}",
                self.name,
                self.cases,
                self.counterexample.as_deref().unwrap_or("?")
            )
        }
    }
}

/// Applies `ok` to every case and stops at the first failure.
fn check<T: fmt::Debug>(
    name: &str,
    cases: impl IntoIterator<Item = T>,
    mut ok: impl FnMut(&T) -> bool,
) -> Check {
    let mut count = 0;
    for c in cases {
        count += 1;
        if !ok(&c) {
            return Check {
                name: name.to_string(),
                pass: false,
                cases: count,
                counterexample: Some(format!("{c:?}")),
            };
        }
    }
    Check {
        name: name.to_string(),
        pass: true,
        cases: count,
        counterexample: None,
    }
}

fn pairs(max_p: u64) -> Vec<(u64, u64)> {
    odd_primes_in(3, max_p + 1)
        .into_iter()
        .flat_map(|p| (1..p).map(move |a| (a, p)))
        .collect()
}

fn tuples(max_p: u64) -> Vec<RamificationData> {
    odd_primes_in(3, max_p + 1)
        .into_iter()
        .flat_map(|p| residue_tuples(p, 2, 2))
        .collect()
}

fn dist(q: u64, a: u64, p: u64) -> u64 {
    let r = q * a % p;
    r.min(p - r)
}

fn cfrac(max_p: u64) -> Vec<Check> {
    let ps = pairs(max_p);
    vec![
        check("cfrac.reconstruct", ps.iter(), |&&(a, p)| {
            let cf = cf_expand(a, p).unwrap();
            cf.reconstruct() == cf.value() && cf.q(cf.length()) == p
        }),
        check("cfrac.e_set_oracle", ps.iter(), |&&(a, p)| {
            e_set_parametrized(a, p).unwrap() == e_set_bruteforce(a, p).unwrap()
        }),
        check("cfrac.distances_decrease", ps.iter(), |&&(a, p)| {
            let cf = cf_expand(a, p).unwrap();
            let qs = cf.qs();
            let first = if cf.partial(1) == 1 {
                dist(qs[1], a, p) == dist(qs[0], a, p)
            } else {
                dist(qs[1], a, p) < dist(qs[0], a, p)
            };
            first && (1..cf.length()).all(|i| dist(qs[i + 1], a, p) < dist(qs[i], a, p))
        }),
        check("cfrac.best_approximation", ps.iter(), |&&(a, p)| {
            let cf = cf_expand(a, p).unwrap();
            let qs = cf.qs();
            (1..=cf.length()).all(|i| (1..qs[i]).all(|q| dist(q, a, p) >= dist(qs[i - 1], a, p)))
        }),
        check("cfrac.alternating_sides", ps.iter(), |&&(a, p)| {
            let cf = cf_expand(a, p).unwrap();
            (1..cf.length()).all(|i| {
                let r = cf.q(i) * a % p;
                (2 * r < p) == (i % 2 == 0)
            })
        }),
        check("cfrac.penultimate_distance", ps.iter(), |&&(a, p)| {
            let cf = cf_expand(a, p).unwrap();
            dist(cf.q(cf.length() - 1), a, p) == 1
        }),
    ]
}

fn assocorder(max_p: u64) -> Vec<Check> {
    let ts = tuples(max_p);
    vec![
        check("assocorder.n_oracle", ts.iter(), |rd| {
            n_sequence_min(rd).unwrap()
                == n_sequence_eps(rd, &e_set_bruteforce(rd.a, rd.p).unwrap()).unwrap()
        }),
        check("assocorder.nu_properties", ts.iter(), |rd| {
            nu_property_failures(rd, &nu_sequence(rd).unwrap()).is_empty()
        }),
        check("assocorder.ring_conditions", ts.iter(), |rd| {
            let r = ring_conditions(rd).unwrap();
            r.cond1 == ((rd.p - 1) % rd.a == 0) && r.cond2
        }),
        check("assocorder.orders_equal", ts.iter(), |rd| {
            orders_equal(rd) == (n_sequence_min(rd).unwrap() == nu_sequence(rd).unwrap())
        }),
        check("assocorder.scaffold", ts.iter(), |rd| {
            let s = scaffold_precision(rd).unwrap();
            s.c == s.l * rd.p + rd.a && (s.l > 0) == (classify(rd) == Ok(CaseTag::LowBand))
        }),
        check("assocorder.d_max_even", ts.iter(), |rd| {
            (1..rd.p as usize).all(|m| {
                let d = d_max(rd, m).unwrap() as usize;
                d % 2 == 0 && m + d < rd.p as usize
            })
        }),
    ]
}

fn groupring(max_p: u64) -> Vec<Check> {
    let primes = odd_primes_in(3, max_p + 1);
    let small: Vec<u64> = primes.iter().copied().filter(|&p| p <= 23).collect();
    vec![
        check("groupring.wp_identity", small.iter(), |&&p| {
            verify_wp_identity(p)
        }),
        check("groupring.c_coefficients", primes.iter(), |&&p| {
            c_coeffs(p).is_ok()
        }),
        check("groupring.ab_matrices", small.iter(), |&&p| {
            ab_matrices(p).is_ok_and(|m| verify_b_expansion(p, &m))
        }),
        check(
            "groupring.wpower_table",
            small.iter().flat_map(|&p| (1..=3u64).map(move |e| (p, e))),
            |&(p, e)| wpower_val_table(p, e).is_ok(),
        ),
    ]
}

fn redmethod(max_p: u64, seed: u64) -> Vec<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let models: Vec<(u64, Vec<i64>)> = odd_primes_in(3, max_p.min(7) + 1)
        .into_iter()
        .flat_map(|p| std::iter::repeat_n(p, 30))
        .map(|p| {
            let mut units: Vec<i64> = (1..p as i64).collect();
            units.shuffle(&mut rng);
            let lambdas = std::iter::once(0)
                .chain(
                    units
                        .into_iter()
                        .map(|u| u + p as i64 * rng.gen_range(-2..=2)),
                )
                .collect();
            (p, lambdas)
        })
        .collect();
    vec![check(
        "redmethod.maximal_models",
        models.iter(),
        |(p, lambdas)| {
            let Ok(mm) = MaximalModel::new(*p, lambdas.clone()) else {
                return false;
            };
            let m = mm.action_matrix();
            let Ok(rp) = reduce(&m) else {
                return false;
            };
            rp.certificate_holds(&m)
                && basis_from_reduced(&rp)
                    .and_then(|b| basis_action(&m, &b))
                    .is_ok_and(|act| delta_action_holds(&act))
                && idempotent_check(&mm)
        },
    )]
}

fn patterns(max_p: u64) -> Vec<Check> {
    let high: Vec<RamificationData> = tuples(max_p)
        .into_iter()
        .filter(|rd| classify(rd) == Ok(CaseTag::HighBand))
        .collect();
    vec![
        check("patterns.certificate_matches_length", high.iter(), |rd| {
            let n = cf_expand(rd.a, rd.p).unwrap().length();
            let cert = certify(&OrderProfile::new(rd).unwrap());
            match n {
                0..=2 => cert.is_err() && orders_equal(rd),
                3 | 4 => matches!(cert, Ok(Certificate::Sufficiency(_))),
                _ => matches!(cert, Ok(Certificate::Necessity(_))),
            }
        }),
        check("patterns.verdict_agrees", high.iter(), |rd| {
            dihedral_verdict(rd).is_ok_and(|v| {
                v.cross_checks
                    .as_ref()
                    .is_none_or(|c| c.proves_free() == v.free)
            })
        }),
    ]
}

pub fn run(suite: Suite, max_p: u64, seed: u64) -> Vec<Check> {
    let mut out = Vec::new();
    let all = suite == Suite::All;
    if all || suite == Suite::Cfrac {
        out.extend(cfrac(max_p));
    }
    if all || suite == Suite::Assocorder {
        out.extend(assocorder(max_p));
    }
    if all || suite == Suite::Groupring {
        out.extend(groupring(max_p));
    }
    if all || suite == Suite::Redmethod {
        out.extend(redmethod(max_p, seed));
    }
    if all || suite == Suite::Patterns {
        out.extend(patterns(max_p));
    }
    out
}
