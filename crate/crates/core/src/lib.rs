//! Redundant syndrome extraction for small stabilizer codes.
//!
//! Pauli algebra and stabilizer groups ([`pauli`]), 2-designs ([`designs`]),
//! built-in codes and measurement protocols ([`codes`]), event decoding
//! ([`decode`]) and exact failure-rate polynomials ([`failure`]).

pub mod codes;
pub mod decode;
pub mod designs;
pub mod failure;
pub mod pauli;

pub use codes::{builtin_protocol, classify, Alphabet, Code, Protocol, ProtocolKind, Schedule};
pub use decode::{DecodePolicy, Decoded, Decoder, LookupTable};
pub use designs::BlockDesign;
pub use failure::{exact_failure, expected_cost, truncated_failure, Polynomial};
pub use pauli::{Pauli, PauliOperator, StabilizerGroup};
