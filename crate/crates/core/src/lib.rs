//! Certified finite orbits of rational maps on the projective line over the
//! rationals, with exact arithmetic throughout.
//!
//! * [`arith`]: rationals, factorization, valuations, resultants.
//! * [`projective`]: canonical points and the p-adic logarithmic distance.
//! * [`dynamics`]: rational maps, orbit certificates, normalization.
//! * [`sunit`]: box-truncated S-unit equation enumeration.
//! * [`bounds`]: log-space evaluation of orbit-length bounds.
//! * [`suites`]: randomized property suites behind `orbita verify`.
//! * [`cli`]: the `orbita` command line.

pub mod arith;
pub mod bounds;
pub mod cli;
pub mod dynamics;
pub mod projective;
pub mod suites;
pub mod sunit;

/// Version tag carried by every JSON document.
pub const SCHEMA: &str = "orbita/1";
