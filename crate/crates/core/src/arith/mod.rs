//! Exact arithmetic over the rationals: primes and factorization, p-adic
//! valuations, S-integer classification, binary forms and their resultants.
//!
//! Everything here is immutable and pure. The only shared state is the
//! read-only small-prime table built on first use.

mod coprime;
mod factor;
mod form;
mod linalg;
mod primes;
mod valuation;

use num_bigint::BigInt;
use num_rational::BigRational;
use thiserror::Error;

pub use coprime::{coprime_base, multiplicity, CoprimeSplit};
pub use factor::{factor, factor_with, FactorBudget, Factorization};
pub use form::{resultant, BinaryForm};
pub use linalg::{bareiss_determinant, rational_nullspace};
pub use primes::{is_prime, small_primes, Prime};
pub use valuation::{s_membership, vp, vp_int, PlaceSet, SClass};

/// Arbitrary-precision rational; `num_rational` keeps it reduced with a
/// positive denominator, and zero is stored as `0/1`.
pub type ExactRational = BigRational;

/// Errors raised by the exact-arithmetic layer.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArithError {
    #[error("p-adic valuation of zero is undefined")]
    ZeroValuation,
    #[error("{0} is not prime")]
    NotPrime(BigInt),
    #[error("cannot factor zero")]
    FactorZero,
    #[error("factorization incomplete ({reason}); unfactored cofactor {cofactor}")]
    FactorizationIncomplete {
        cofactor: BigInt,
        reason: String,
        partial: Factorization,
    },
    #[error("binary forms have unequal degrees {0} and {1}")]
    DegreeMismatch(usize, usize),
}

#[cfg(test)]
pub(crate) fn rational(num: i64, den: i64) -> ExactRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}
