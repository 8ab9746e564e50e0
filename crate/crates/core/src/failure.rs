//! Failure-rate and cost polynomials.
//!
//! Errors are grouped by (ideal syndrome, correction class). For each group
//! the number of failing flip patterns of each weight is counted once against
//! the lookup table, so the event space is never walked one event at a time.
//! Under the repeat schedule the per-stabilizer consensus flips independently
//! with probability `3 pm^2 - 2 pm^3`, which is substituted afterwards.

mod compare;
mod crossover;
mod monte_carlo;
pub mod poly;

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use rayon::prelude::*;
use thiserror::Error;

use crate::codes::{flip_records_with_weight, subsets_of_weight, Alphabet, Protocol, Schedule, Sector};
use crate::decode::{DecodeError, DecodePolicy, Decoder, Flips, LookupTable};

pub use compare::{compare, ComparisonReport, Grid, GridAxis, ProtocolSummary};
pub use crossover::{crossover, crossover_curve, Crossover, CrossoverPoint, Sign, Slope};
pub use monte_carlo::{monte_carlo, MonteCarloEstimate};
pub use poly::{BivariatePolynomial, PolyParseError, Polynomial};

/// Events (error patterns times flip records) a full enumeration may cover.
pub const DEFAULT_EVENT_BUDGET: u128 = 100_000_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FailureError {
    #[error(transparent)]
    Decode(#[from] DecodeError),
    #[error("{events} events exceed the enumeration budget of {budget}; use a truncated degree instead")]
    Budget { events: u128, budget: u128 },
    #[error("invalid probability {0}")]
    BadProbability(f64),
    #[error("no protocols selected")]
    EmptySelection,
    #[error("invalid grid: {0}")]
    BadGrid(String),
}

/// Number of events of the protocol: error patterns times flip records.
pub fn event_count(p: &Protocol) -> u128 {
    let patterns = p.alphabet().pattern_count(p.n_qubits()) as u128;
    let per_stabilizer: u128 = match p.schedule() {
        Schedule::SingleRound => 2,
        Schedule::RepeatMajority => 6,
    };
    patterns.saturating_mul(per_stabilizer.saturating_pow(p.m() as u32))
}

/// Per-error probability share: each Pauli of the alphabet gets `pq / radix-1`.
fn pauli_share(alphabet: Alphabet) -> BigRational {
    match alphabet {
        Alphabet::XOnly => BigRational::one(),
        Alphabet::Depolarizing => poly::rat(1, 3),
    }
}

/// Exact failure polynomial over the full event space.
pub fn exact_failure(p: &Protocol, policy: DecodePolicy) -> Result<Polynomial, FailureError> {
    exact_failure_with_budget(p, policy, DEFAULT_EVENT_BUDGET)
}

pub fn exact_failure_with_budget(p: &Protocol, policy: DecodePolicy, budget: u128) -> Result<Polynomial, FailureError> {
    let events = event_count(p);
    if events > budget {
        return Err(FailureError::Budget { events, budget });
    }
    failure_polynomial(p, policy, None)
}

/// Failure polynomial exact in every term of total degree at most `k`.
/// Only events that can contribute at that order are enumerated.
pub fn truncated_failure(p: &Protocol, policy: DecodePolicy, k: u32) -> Result<Polynomial, FailureError> {
    if k == 0 {
        return Ok(Polynomial::zero());
    }
    failure_polynomial(p, policy, Some(k))
}

/// `N[a][b]`: failing events with `a` qubit errors and `b` consensus flips,
/// counted over error patterns and flip subsets.
fn failure_counts(p: &Protocol, table: &LookupTable, max_a: usize, max_b: usize) -> Vec<Vec<u64>> {
    let n = p.n_qubits();
    let m = p.m();
    let alphabet = p.alphabet();
    let mut groups: BTreeMap<(u64, Option<u32>), Vec<u64>> = BTreeMap::new();
    for i in 0..alphabet.pattern_count(n) {
        let e = alphabet.pattern(n, i);
        let a = e.weight();
        if a > max_a {
            continue;
        }
        let counts = groups
            .entry((p.syndrome_of(&e), table.class_of(&e)))
            .or_insert_with(|| vec![0; n + 1]);
        counts[a] += 1;
    }
    let full = if m == 64 { u64::MAX } else { (1u64 << m) - 1 };
    let per_group: Vec<(Vec<u64>, Vec<u64>)> = groups
        .into_par_iter()
        .map(|((ideal, class), counts)| {
            let mut fails = vec![0u64; m + 1];
            if max_b >= m {
                for f in 0..=full {
                    if !table.succeeds(class, ideal, f) {
                        fails[f.count_ones() as usize] += 1;
                    }
                }
            } else {
                for (b, slot) in fails.iter_mut().enumerate().take(max_b + 1) {
                    *slot = subsets_of_weight(full, b)
                        .into_iter()
                        .filter(|&f| !table.succeeds(class, ideal, f))
                        .count() as u64;
                }
            }
            (counts, fails)
        })
        .collect();
    let mut total = vec![vec![0u64; m + 1]; n + 1];
    for (counts, fails) in per_group {
        for (a, &c) in counts.iter().enumerate() {
            if c == 0 {
                continue;
            }
            for (b, &f) in fails.iter().enumerate() {
                total[a][b] += c * f;
            }
        }
    }
    total
}

/// Probability that one consensus bit is wrong, as a polynomial in `pm`.
fn consensus_flip(schedule: Schedule) -> Polynomial {
    match schedule {
        Schedule::SingleRound => Polynomial::pm(),
        Schedule::RepeatMajority => "3 pm^2\n-2 pm^3".parse().expect("literal"),
    }
}

/// `sum_{a,b} N[a][b] (share pq)^a (1-pq)^(n-a) u^b (1-u)^(m-b)`.
fn assemble(p: &Protocol, counts: &[Vec<u64>], max: Option<u32>) -> Polynomial {
    let n = p.n_qubits() as u32;
    let m = p.m() as u32;
    let share = pauli_share(p.alphabet());
    let u = consensus_flip(p.schedule());
    let not_u = Polynomial::one() - u.clone();
    let flip_part: Vec<Polynomial> = (0..=m)
        .map(|b| {
            if counts.iter().all(|row| row[b as usize] == 0) {
                return Polynomial::zero();
            }
            u.pow_truncated(b, max)
                .mul_truncated(&not_u.pow_truncated(m - b, max), max)
        })
        .collect();
    let mut out = Polynomial::zero();
    for (a, row) in counts.iter().enumerate() {
        let a = a as u32;
        if row.iter().all(|&c| c == 0) {
            continue;
        }
        let mut inner = Polynomial::zero();
        for (b, &c) in row.iter().enumerate() {
            if c != 0 {
                inner += flip_part[b].scale(&BigRational::from_integer(BigInt::from(c)));
            }
        }
        let qubit = Polynomial::monomial(num_traits::pow(share.clone(), a as usize), a, 0)
            .mul_truncated(&Polynomial::one_minus_pow(true, n - a), max);
        out += qubit.mul_truncated(&inner, max);
    }
    match max {
        Some(k) => out.truncate(k),
        None => out,
    }
}

fn failure_polynomial(p: &Protocol, policy: DecodePolicy, max: Option<u32>) -> Result<Polynomial, FailureError> {
    let table = LookupTable::build(p, policy)?;
    let (max_a, max_b) = match max {
        None => (usize::MAX, usize::MAX),
        Some(k) => {
            let b = match p.schedule() {
                Schedule::SingleRound => k,
                Schedule::RepeatMajority => k / 2,
            };
            (k as usize, b as usize)
        }
    };
    let counts = failure_counts(p, &table, max_a, max_b);
    Ok(assemble(p, &counts, max))
}

fn event_term(p: &Protocol, a: u32, flips: u32, performed: u32) -> Polynomial {
    let n = p.n_qubits() as u32;
    let share = num_traits::pow(pauli_share(p.alphabet()), a as usize);
    Polynomial::monomial(share, a, flips)
        * Polynomial::one_minus_pow(true, n - a)
        * Polynomial::one_minus_pow(false, performed - flips)
}

/// Event-by-event oracle: every error pattern against every flip record of
/// the schedule, decoded from the raw record by the direct decoder. Slow;
/// meant for cross-checking the grouped engine on small protocols.
pub fn event_oracle_failure(p: &Protocol, policy: DecodePolicy) -> Result<Polynomial, FailureError> {
    let decoder = Decoder::new(p, policy)?;
    let n = p.n_qubits();
    let errors: Vec<_> = (0..p.alphabet().pattern_count(n))
        .map(|i| p.alphabet().pattern(n, i))
        .collect();
    let records = all_flip_records(p);
    let mut weights: BTreeMap<(u32, u32, u32), u64> = BTreeMap::new();
    for e in &errors {
        for f in &records {
            if !decoder.success_unchecked(e, f) {
                *weights
                    .entry((e.weight() as u32, f.count(), p.performed(f) as u32))
                    .or_default() += 1;
            }
        }
    }
    Ok(weighted_sum(p, weights))
}

fn all_flip_records(p: &Protocol) -> Vec<Flips> {
    let max = match p.schedule() {
        Schedule::SingleRound => p.m(),
        Schedule::RepeatMajority => 3 * p.m(),
    };
    (0..=max).flat_map(|b| flip_records_with_weight(p, b)).collect()
}

fn weighted_sum(p: &Protocol, weights: BTreeMap<(u32, u32, u32), u64>) -> Polynomial {
    let mut out = Polynomial::zero();
    for ((a, b, performed), c) in weights {
        out += event_term(p, a, b, performed).scale(&BigRational::from_integer(BigInt::from(c)));
    }
    out
}

/// Sum of every event probability, enumerating error patterns and flip
/// records separately. Equals one for a well-formed event model.
pub fn total_probability(p: &Protocol) -> Polynomial {
    let n = p.n_qubits();
    let mut by_weight: BTreeMap<(u32, u32, u32), u64> = BTreeMap::new();
    let mut error_weights = vec![0u64; n + 1];
    for i in 0..p.alphabet().pattern_count(n) {
        error_weights[p.alphabet().pattern(n, i).weight()] += 1;
    }
    let mut record_weights: BTreeMap<(u32, u32), u64> = BTreeMap::new();
    for f in all_flip_records(p) {
        *record_weights.entry((f.count(), p.performed(&f) as u32)).or_default() += 1;
    }
    for (a, &ce) in error_weights.iter().enumerate() {
        for (&(b, perf), &cf) in &record_weights {
            *by_weight.entry((a as u32, b, perf)).or_default() += ce * cf;
        }
    }
    weighted_sum(p, by_weight)
}

/// Expected number of stabilizer measurements per cycle.
pub fn expected_cost(p: &Protocol) -> Polynomial {
    let m = BigRational::from_integer(BigInt::from(p.m()));
    match p.schedule() {
        Schedule::SingleRound => Polynomial::constant(m),
        Schedule::RepeatMajority => {
            // Two rounds plus a third measurement whenever they disagree.
            let disagree: Polynomial = "2 pm\n-2 pm^2".parse().expect("literal");
            Polynomial::constant(m.clone() * BigInt::from(2)) + disagree.scale(&m)
        }
    }
}

/// Both CSS sectors treated as independent copies of the analysed one:
/// failure `1 - (1 - F)^2`, cost doubled. Other codes are returned as is.
pub fn both_sectors(p: &Protocol, failure: &Polynomial, cost: &Polynomial) -> (Polynomial, Polynomial) {
    if p.code().sector() != Sector::CssSector {
        return (failure.clone(), cost.clone());
    }
    let ok = Polynomial::one() - failure.clone();
    let two = BigRational::from_integer(BigInt::from(2));
    (Polynomial::one() - &ok * &ok, cost.scale(&two))
}

/// Checks a probability argument.
pub fn check_probability(x: f64) -> Result<f64, FailureError> {
    if (0.0..=1.0).contains(&x) {
        Ok(x)
    } else {
        Err(FailureError::BadProbability(x))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::{builtin_protocol, ProtocolKind};

    fn poly(s: &str) -> Polynomial {
        s.parse().unwrap()
    }

    #[test]
    fn bitflip_dbr_full() {
        let p = builtin_protocol("bitflip", ProtocolKind::Dbr).unwrap();
        let f = exact_failure(&p, DecodePolicy::default()).unwrap();
        assert_eq!(f.truncate(2), poly("3 pq^2\n9 pq pm\n3 pm^2"));
        assert_eq!(f, event_oracle_failure(&p, DecodePolicy::default()).unwrap());
    }

    #[test]
    fn truncation_agrees() {
        for kind in [ProtocolKind::MinimalQec, ProtocolKind::FtRepeatQec, ProtocolKind::Dbr] {
            let p = builtin_protocol("bitflip", kind).unwrap();
            let f = exact_failure(&p, DecodePolicy::default()).unwrap();
            for k in 0..8 {
                assert_eq!(
                    truncated_failure(&p, DecodePolicy::default(), k).unwrap(),
                    f.truncate(k),
                    "{kind} {k}"
                );
            }
        }
    }

    #[test]
    fn budget_refusal() {
        let p = builtin_protocol("perfect5", ProtocolKind::Dbr).unwrap();
        assert_eq!(event_count(&p), 1024 * 32768);
        assert!(matches!(
            exact_failure_with_budget(&p, DecodePolicy::default(), 1000),
            Err(FailureError::Budget { .. })
        ));
    }

    #[test]
    fn costs() {
        let ft = builtin_protocol("bitflip", ProtocolKind::FtRepeatQec).unwrap();
        assert_eq!(expected_cost(&ft), poly("4\n4 pm\n-4 pm^2"));
        let dbr = builtin_protocol("steane", ProtocolKind::Dbr).unwrap();
        assert_eq!(expected_cost(&dbr), poly("7"));
    }

    #[test]
    fn both_sector_view() {
        let p = builtin_protocol("steane", ProtocolKind::MinimalQec).unwrap();
        let (f, c) = both_sectors(&p, &poly("1 pm"), &poly("3"));
        assert_eq!(f, poly("2 pm\n-1 pm^2"));
        assert_eq!(c, poly("6"));
        let q = builtin_protocol("perfect5", ProtocolKind::MinimalQec).unwrap();
        assert_eq!(both_sectors(&q, &poly("1 pm"), &poly("4")).0, poly("1 pm"));
    }

    #[test]
    fn probabilities_sum_to_one() {
        let p = builtin_protocol("bitflip", ProtocolKind::FtRepeatQec).unwrap();
        assert_eq!(total_probability(&p), Polynomial::one());
    }
}
