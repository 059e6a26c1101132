//! Rational maps of the projective line as pairs of integer binary forms:
//! parsing, orbits, conjugation, and the normalization pipeline that moves
//! an orbit tail into the fixed point `[0:1]`.

mod map;
mod moebius;
mod normalize;
mod orbit;
mod parse;
mod poly;
mod synth;

use thiserror::Error;

use crate::arith::ArithError;

pub use map::RationalMap;
pub use moebius::{MoebiusOrder, MoebiusTransform};
pub use normalize::{
    check_tail_divisibility, collapse_to_fixed_point, normalize_orbit, tail_divisibility, verify_np_conditions,
    Collapsed, DivisibilityReport, DivisibilityWitness, Normalized, NpReport,
};
pub use orbit::{detect_orbit, trace_orbit, OrbitBudget, OrbitCertificate, OrbitOutcome, OrbitTrace, UndecidedReason};
pub use parse::MAX_PARSE_DEGREE;
pub use synth::synthesize_map;

/// Default cap for [`MoebiusTransform::order`].
pub const DEFAULT_ORDER_CAP: u32 = 12;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DynamicsError {
    #[error("syntax error at {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("division by zero at {position}")]
    ZeroDenominator { position: usize },
    #[error("constant map has degree 0")]
    ConstantMap,
    #[error("forms have unequal degrees {0} and {1}")]
    DegreeMismatch(usize, usize),
    #[error("F and G share a root (resultant 0)")]
    ZeroResultant,
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("coefficients reached {bits} bits (budget {max_bits})")]
    BitBudget { bits: u64, max_bits: u64 },
    #[error("{point} is not fixed by the map")]
    NotFixed { point: String },
    #[error("invalid certificate: {0}")]
    InvalidCertificate(String),
    #[error("condition ({condition}) fails at indices {i}, {j}")]
    ConditionFails { condition: u8, i: usize, j: usize },
    #[error("place set misses bad prime {0}")]
    PlacesMissBadPrime(String),
    #[error(transparent)]
    Arith(#[from] ArithError),
}
