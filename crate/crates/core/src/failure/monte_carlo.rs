//! Seeded sampling of events.
//!
//! Worker `w` of `W` draws from `ChaCha8Rng::seed_from_u64(seed)` on stream
//! `w` and runs `trials / W` trials, the first `trials % W` workers taking one
//! extra. Results depend on `(seed, trials, workers)` only.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{check_probability, FailureError};
use crate::codes::{Alphabet, Protocol, Schedule};
use crate::decode::{DecodePolicy, Flips, LookupTable};
use crate::pauli::{Pauli, PauliOperator};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonteCarloEstimate {
    pub trials: u64,
    pub failures: u64,
    pub estimate: f64,
    /// Binomial standard error `sqrt(p (1 - p) / N)`.
    pub std_error: f64,
}

impl MonteCarloEstimate {
    /// Distance from `exact` in standard errors. Zero when both agree exactly.
    pub fn z_score(&self, exact: f64) -> f64 {
        let diff = self.estimate - exact;
        if diff == 0.0 {
            0.0
        } else if self.std_error == 0.0 {
            f64::INFINITY.copysign(diff)
        } else {
            diff / self.std_error
        }
    }
}

fn sample_error(rng: &mut ChaCha8Rng, n: usize, alphabet: Alphabet, pq: f64) -> PauliOperator {
    let mut e = PauliOperator::identity(n);
    for q in 0..n {
        if rng.gen::<f64>() < pq {
            let p = match alphabet {
                Alphabet::XOnly => Pauli::X,
                Alphabet::Depolarizing => [Pauli::X, Pauli::Y, Pauli::Z][rng.gen_range(0..3)],
            };
            e = e.mul_unchecked(&PauliOperator::single(n, q, p));
        }
    }
    e
}

fn sample_mask(rng: &mut ChaCha8Rng, bits: u64, pm: f64) -> u64 {
    let mut out = 0;
    for i in 0..64 {
        if bits >> i & 1 == 1 && rng.gen::<f64>() < pm {
            out |= 1 << i;
        }
    }
    out
}

fn sample_flips(rng: &mut ChaCha8Rng, schedule: Schedule, m: usize, pm: f64) -> Flips {
    let full = if m == 64 { u64::MAX } else { (1u64 << m) - 1 };
    match schedule {
        Schedule::SingleRound => Flips::Single(sample_mask(rng, full, pm)),
        Schedule::RepeatMajority => {
            let first = sample_mask(rng, full, pm);
            let second = sample_mask(rng, full, pm);
            let third = sample_mask(rng, first ^ second, pm);
            Flips::Repeated { first, second, third }
        }
    }
}

/// Failure frequency over `trials` sampled events at `(pq, pm)`.
pub fn monte_carlo(
    p: &Protocol,
    policy: DecodePolicy,
    pq: f64,
    pm: f64,
    trials: u64,
    seed: u64,
    workers: usize,
) -> Result<MonteCarloEstimate, FailureError> {
    check_probability(pq)?;
    check_probability(pm)?;
    let table = LookupTable::build(p, policy)?;
    let workers = workers.max(1) as u64;
    let failures: u64 = (0..workers)
        .into_par_iter()
        .map(|w| {
            let share = trials / workers + u64::from(w < trials % workers);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(w);
            let mut fails = 0u64;
            for _ in 0..share {
                let e = sample_error(&mut rng, p.n_qubits(), p.alphabet(), pq);
                let f = sample_flips(&mut rng, p.schedule(), p.m(), pm);
                if !table.succeeds(table.class_of(&e), p.syndrome_of(&e), f.consensus()) {
                    fails += 1;
                }
            }
            fails
        })
        .sum();
    let estimate = if trials == 0 {
        0.0
    } else {
        failures as f64 / trials as f64
    };
    let std_error = if trials == 0 {
        0.0
    } else {
        (estimate * (1.0 - estimate) / trials as f64).sqrt()
    };
    Ok(MonteCarloEstimate {
        trials,
        failures,
        estimate,
        std_error,
    })
}
