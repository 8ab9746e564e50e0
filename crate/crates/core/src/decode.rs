//! Maximum-likelihood event decoding.
//!
//! An observed record is explained by a candidate physical error together with
//! the measurement flips it implies (`observed XOR ideal`). Candidates are
//! ranked by their `(a, b)` weights: qubit errors and measurement flips. When
//! every best-ranked candidate implies the same correction modulo the
//! stabilizer group, that correction is applied; otherwise the record is
//! ambiguous.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::codes::{Alphabet, Protocol, Schedule};
use crate::pauli::{PauliOperator, StabilizerGroup};

/// Candidate enumeration limits: `2^16` bit-flip or `4^8` depolarizing patterns.
pub const MAX_CANDIDATES: usize = 1 << 16;
/// Lookup tables cover every syndrome, so `m` is capped.
pub const MAX_TABLE_BITS: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecodeError {
    #[error("record has {got} bits, schedule expects {expected}")]
    RecordLength { expected: usize, got: usize },
    #[error("too many candidate errors ({0}) to enumerate")]
    TooManyCandidates(usize),
    #[error("lookup table over {0} measurements exceeds the {MAX_TABLE_BITS}-bit budget")]
    TableTooLarge(usize),
    #[error("flip record does not match the protocol schedule")]
    InconsistentEvent,
}

/// How explanations are ordered.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Ranking {
    /// By `a + b`, ties toward fewer measurement flips.
    Balanced,
    /// By log-likelihood `a ln(p_q/(1-p_q)) + b ln(p_m/(1-p_m))`.
    LikelihoodAt { p_q: f64, p_m: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TieOutcome {
    /// Inequivalent best explanations count as a decoding failure.
    AmbiguousIsFailure,
    /// Take the first best explanation in enumeration order.
    FirstInOrder,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecodePolicy {
    pub ranking: Ranking,
    pub tie_outcome: TieOutcome,
}

impl Default for DecodePolicy {
    fn default() -> Self {
        Self {
            ranking: Ranking::Balanced,
            tie_outcome: TieOutcome::AmbiguousIsFailure,
        }
    }
}

impl DecodePolicy {
    pub fn first_in_order() -> Self {
        Self {
            tie_outcome: TieOutcome::FirstInOrder,
            ..Self::default()
        }
    }

    /// Key to minimise. Integer keys for the balanced ranking keep ties exact.
    fn key(&self, a: u32, b: u32) -> RankKey {
        match self.ranking {
            Ranking::Balanced => RankKey::Int(a + b, b),
            Ranking::LikelihoodAt { p_q, p_m } => {
                let cost = |k: u32, p: f64| {
                    if k == 0 {
                        0.0
                    } else {
                        -(k as f64) * (p / (1.0 - p)).ln()
                    }
                };
                RankKey::Float(cost(a, p_q) + cost(b, p_m))
            }
        }
    }
}

#[derive(Debug, Clone, Copy)]
enum RankKey {
    Int(u32, u32),
    Float(f64),
}

impl RankKey {
    /// `Less` when `self` is the better explanation.
    fn compare(&self, other: &Self) -> std::cmp::Ordering {
        use std::cmp::Ordering::*;
        match (self, other) {
            (RankKey::Int(a, b), RankKey::Int(c, d)) => (a, b).cmp(&(c, d)),
            (RankKey::Float(x), RankKey::Float(y)) => {
                if x == y {
                    return Equal;
                }
                let scale = x.abs().max(y.abs()).max(1.0);
                if (x - y).abs() <= 1e-9 * scale {
                    Equal
                } else if x < y {
                    Less
                } else {
                    Greater
                }
            }
            _ => unreachable!("keys from one policy"),
        }
    }
}

/// Explanation of an observed syndrome by one candidate error.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Explanation {
    pub error: PauliOperator,
    /// Implied flips over the (consensus) syndrome bits.
    pub flips: u64,
    pub a: u32,
    pub b: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Decoded {
    Correction(PauliOperator),
    Ambiguous,
}

impl Decoded {
    pub fn correction(&self) -> Option<&PauliOperator> {
        match self {
            Decoded::Correction(c) => Some(c),
            Decoded::Ambiguous => None,
        }
    }
}

/// Measurement flips for one event.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Flips {
    /// Single-round schedule: bit `i` flips measurement `i`.
    Single(u64),
    /// Repeat schedule: flips in rounds one and two; `third` holds flips of
    /// the tie-break measurements and may only set bits where the first two
    /// rounds' flips differ.
    Repeated { first: u64, second: u64, third: u64 },
}

impl Flips {
    pub fn count(&self) -> u32 {
        match *self {
            Flips::Single(f) => f.count_ones(),
            Flips::Repeated { first, second, third } => {
                first.count_ones() + second.count_ones() + (third & (first ^ second)).count_ones()
            }
        }
    }

    /// Flips of the per-stabilizer majority.
    pub fn consensus(&self) -> u64 {
        match *self {
            Flips::Single(f) => f,
            Flips::Repeated { first, second, third } => {
                let disagree = first ^ second;
                (first & second) | (third & disagree)
            }
        }
    }

    fn consistent_with(&self, schedule: Schedule, m: usize) -> bool {
        let full = if m == 64 { u64::MAX } else { (1u64 << m) - 1 };
        match (*self, schedule) {
            (Flips::Single(f), Schedule::SingleRound) => f & !full == 0,
            (Flips::Repeated { first, second, third }, Schedule::RepeatMajority) => {
                (first | second) & !full == 0 && third & !(first ^ second) == 0
            }
            _ => false,
        }
    }
}

/// One event: the qubit error and the measurement flips.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Event {
    pub error: PauliOperator,
    pub flips: Flips,
}

/// Observed record of an event: round one, round two, then the tie-break
/// results in stabilizer order. `true` is a `-1` outcome.
pub fn observed_record(p: &Protocol, event: &Event) -> Result<Vec<bool>, DecodeError> {
    if !event.flips.consistent_with(p.schedule(), p.m()) || event.error.n_qubits() != p.n_qubits() {
        return Err(DecodeError::InconsistentEvent);
    }
    let m = p.m();
    let ideal = p.syndrome_of(&event.error);
    let bits = |mask: u64| (0..m).map(move |i| mask >> i & 1 == 1);
    Ok(match event.flips {
        Flips::Single(f) => bits(ideal ^ f).collect(),
        Flips::Repeated { first, second, third } => {
            let disagree = first ^ second;
            let mut out: Vec<bool> = bits(ideal ^ first).chain(bits(ideal ^ second)).collect();
            out.extend(
                (0..m)
                    .filter(|i| disagree >> i & 1 == 1)
                    .map(|i| (ideal ^ third) >> i & 1 == 1),
            );
            out
        }
    })
}

/// Reduces a full record to the syndrome the explanations are ranked
/// against: the record itself for one round, the per-stabilizer majority for
/// the repeat schedule.
pub fn consensus_syndrome(p: &Protocol, observed: &[bool]) -> Result<u64, DecodeError> {
    let m = p.m();
    let mask = |bits: &[bool]| bits.iter().enumerate().fold(0u64, |acc, (i, &b)| acc | (b as u64) << i);
    match p.schedule() {
        Schedule::SingleRound => {
            if observed.len() != m {
                return Err(DecodeError::RecordLength {
                    expected: m,
                    got: observed.len(),
                });
            }
            Ok(mask(observed))
        }
        Schedule::RepeatMajority => {
            if observed.len() < 2 * m {
                return Err(DecodeError::RecordLength {
                    expected: 2 * m,
                    got: observed.len(),
                });
            }
            let first = mask(&observed[..m]);
            let second = mask(&observed[m..2 * m]);
            let disagree = first ^ second;
            let expected = 2 * m + disagree.count_ones() as usize;
            if observed.len() != expected {
                return Err(DecodeError::RecordLength {
                    expected,
                    got: observed.len(),
                });
            }
            let mut third = 0u64;
            for (k, i) in (0..m).filter(|i| disagree >> i & 1 == 1).enumerate() {
                third |= (observed[2 * m + k] as u64) << i;
            }
            Ok((first & second) | (third & disagree))
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Candidate {
    error: PauliOperator,
    syndrome: u64,
    weight: u32,
}

fn candidates(p: &Protocol) -> Result<Vec<Candidate>, DecodeError> {
    let n = p.n_qubits();
    let alphabet = p.alphabet();
    let count = match alphabet {
        Alphabet::XOnly if n <= 16 => 1usize << n,
        Alphabet::Depolarizing if n <= 8 => 1usize << (2 * n),
        _ => return Err(DecodeError::TooManyCandidates(usize::MAX)),
    };
    if count > MAX_CANDIDATES {
        return Err(DecodeError::TooManyCandidates(count));
    }
    Ok((0..count)
        .map(|i| {
            let error = alphabet.pattern(n, i);
            Candidate {
                syndrome: p.syndrome_of(&error),
                weight: error.weight() as u32,
                error,
            }
        })
        .collect())
}

/// Direct decoder: scans every candidate error for each record.
#[derive(Debug, Clone)]
pub struct Decoder {
    protocol: Protocol,
    policy: DecodePolicy,
    candidates: Vec<Candidate>,
}

impl Decoder {
    pub fn new(protocol: &Protocol, policy: DecodePolicy) -> Result<Self, DecodeError> {
        Ok(Self {
            candidates: candidates(protocol)?,
            protocol: protocol.clone(),
            policy,
        })
    }

    pub fn protocol(&self) -> &Protocol {
        &self.protocol
    }

    /// Best-ranked explanations of a consensus syndrome, in enumeration order.
    pub fn explanations(&self, syndrome: u64) -> Vec<Explanation> {
        let mut best: Option<RankKey> = None;
        let mut out = Vec::new();
        for c in &self.candidates {
            let flips = syndrome ^ c.syndrome;
            let b = flips.count_ones();
            let key = self.policy.key(c.weight, b);
            let ord = best.map_or(std::cmp::Ordering::Less, |k| key.compare(&k));
            if ord == std::cmp::Ordering::Less {
                best = Some(key);
                out.clear();
            }
            if ord != std::cmp::Ordering::Greater {
                out.push(Explanation {
                    error: c.error,
                    flips,
                    a: c.weight,
                    b,
                });
            }
        }
        out
    }

    pub fn decode_syndrome(&self, syndrome: u64) -> Decoded {
        let best = self.explanations(syndrome);
        let group = self.protocol.code().group();
        let first = best[0].error;
        let rep = group.coset_representative(&first);
        let unique = best.iter().all(|e| group.coset_representative(&e.error) == rep);
        if unique || self.policy.tie_outcome == TieOutcome::FirstInOrder {
            Decoded::Correction(first)
        } else {
            Decoded::Ambiguous
        }
    }

    pub fn decode(&self, observed: &[bool]) -> Result<Decoded, DecodeError> {
        Ok(self.decode_syndrome(consensus_syndrome(&self.protocol, observed)?))
    }

    /// `s(e)`: 1 when the applied correction times the actual error is a
    /// stabilizer. Goes through the full observed record.
    pub fn success(&self, event: &Event) -> Result<bool, DecodeError> {
        let record = observed_record(&self.protocol, event)?;
        Ok(match self.decode(&record)? {
            Decoded::Correction(c) => self.protocol.code().group().contains(&c.mul_unchecked(&event.error)),
            Decoded::Ambiguous => false,
        })
    }

    pub(crate) fn success_unchecked(&self, error: &PauliOperator, flips: &Flips) -> bool {
        self.success(&Event {
            error: *error,
            flips: *flips,
        })
        .expect("event generated from the schedule")
    }
}

/// Decodes one record from scratch.
pub fn decode(observed: &[bool], protocol: &Protocol, policy: DecodePolicy) -> Result<Decoded, DecodeError> {
    Decoder::new(protocol, policy)?.decode(observed)
}

pub fn success(event: &Event, protocol: &Protocol, policy: DecodePolicy) -> Result<bool, DecodeError> {
    Decoder::new(protocol, policy)?.success(event)
}

/// Correction (or ambiguity) for every consensus syndrome, with corrections
/// also labelled by coset class so success tests are integer compares.
#[derive(Debug, Clone)]
pub struct LookupTable {
    m: usize,
    entries: Vec<Decoded>,
    entry_class: Vec<u32>,
    classes: ClassIndex,
}

pub const AMBIGUOUS_CLASS: u32 = u32::MAX;

/// Dense ids for cosets of the stabilizer group.
#[derive(Debug, Clone, Default)]
pub struct ClassIndex {
    ids: HashMap<PauliOperator, u32>,
    group: Option<StabilizerGroup>,
}

impl ClassIndex {
    fn new(group: &StabilizerGroup) -> Self {
        Self {
            ids: HashMap::new(),
            group: Some(group.clone()),
        }
    }

    pub fn id_of(&mut self, p: &PauliOperator) -> u32 {
        let rep = self.group.as_ref().expect("initialised").coset_representative(p);
        let next = self.ids.len() as u32;
        *self.ids.entry(rep).or_insert(next)
    }

    /// Id of an already seen class, `None` for a class no table entry uses.
    pub fn lookup(&self, p: &PauliOperator) -> Option<u32> {
        let rep = self.group.as_ref()?.coset_representative(p);
        self.ids.get(&rep).copied()
    }
}

/// Per-syndrome summary of candidates with a given weight.
struct Bucket {
    syndrome: u64,
    weight: u32,
    first_index: usize,
    first: PauliOperator,
    classes: Vec<PauliOperator>,
}

impl LookupTable {
    /// Builds the table by bucketing candidates by (syndrome, weight) first,
    /// then ranking buckets for each observed syndrome.
    pub fn build(protocol: &Protocol, policy: DecodePolicy) -> Result<Self, DecodeError> {
        let m = protocol.m();
        if m > MAX_TABLE_BITS {
            return Err(DecodeError::TableTooLarge(m));
        }
        let group = protocol.code().group();
        let mut index: HashMap<(u64, u32), usize> = HashMap::new();
        let mut buckets: Vec<Bucket> = Vec::new();
        for (i, c) in candidates(protocol)?.into_iter().enumerate() {
            let rep = group.coset_representative(&c.error);
            let slot = *index.entry((c.syndrome, c.weight)).or_insert_with(|| {
                buckets.push(Bucket {
                    syndrome: c.syndrome,
                    weight: c.weight,
                    first_index: i,
                    first: c.error,
                    classes: Vec::new(),
                });
                buckets.len() - 1
            });
            let b = &mut buckets[slot];
            if !b.classes.contains(&rep) {
                b.classes.push(rep);
            }
        }
        let mut classes = ClassIndex::new(group);
        let mut entries = Vec::with_capacity(1 << m);
        let mut entry_class = Vec::with_capacity(1 << m);
        let mut best: Vec<usize> = Vec::new();
        for obs in 0u64..1 << m {
            best.clear();
            let mut best_key: Option<RankKey> = None;
            for (k, bucket) in buckets.iter().enumerate() {
                let key = policy.key(bucket.weight, (obs ^ bucket.syndrome).count_ones());
                let ord = best_key.map_or(std::cmp::Ordering::Less, |bk| key.compare(&bk));
                if ord == std::cmp::Ordering::Less {
                    best_key = Some(key);
                    best.clear();
                }
                if ord != std::cmp::Ordering::Greater {
                    best.push(k);
                }
            }
            let first = best
                .iter()
                .map(|&k| &buckets[k])
                .min_by_key(|b| b.first_index)
                .expect("at least one candidate");
            let rep = first.classes[0];
            let unique = best.iter().all(|&k| buckets[k].classes.iter().all(|c| *c == rep));
            let entry = if unique || policy.tie_outcome == TieOutcome::FirstInOrder {
                Decoded::Correction(first.first)
            } else {
                Decoded::Ambiguous
            };
            entry_class.push(match entry {
                Decoded::Correction(c) => classes.id_of(&c),
                Decoded::Ambiguous => AMBIGUOUS_CLASS,
            });
            entries.push(entry);
        }
        Ok(Self {
            m,
            entries,
            entry_class,
            classes,
        })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn get(&self, syndrome: u64) -> Decoded {
        self.entries[syndrome as usize]
    }

    pub fn entries(&self) -> &[Decoded] {
        &self.entries
    }

    pub fn class_of_entry(&self, syndrome: u64) -> u32 {
        self.entry_class[syndrome as usize]
    }

    /// Class id of an error, or `None` when no entry ever corrects into it
    /// (such errors always fail).
    pub fn class_of(&self, error: &PauliOperator) -> Option<u32> {
        self.classes.lookup(error)
    }

    /// Success of an error given the consensus syndrome flips.
    pub fn succeeds(&self, error_class: Option<u32>, ideal: u64, consensus_flips: u64) -> bool {
        match error_class {
            Some(id) => self.entry_class[(ideal ^ consensus_flips) as usize] == id,
            None => false,
        }
    }

    /// CSV export: `syndrome,correction` with the syndrome as a binary string
    /// (measurement 1 first) and `AMBIG` for ambiguous entries.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("syndrome,correction\n");
        for (s, e) in self.entries.iter().enumerate() {
            let bits: String = (0..self.m).map(|i| if s >> i & 1 == 1 { '1' } else { '0' }).collect();
            let corr = match e {
                Decoded::Correction(c) => c.to_string(),
                Decoded::Ambiguous => "AMBIG".to_string(),
            };
            out.push_str(&format!("{bits},{corr}\n"));
        }
        out
    }
}

impl fmt::Display for Decoded {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Decoded::Correction(c) => write!(f, "{c}"),
            Decoded::Ambiguous => f.write_str("AMBIG"),
        }
    }
}
