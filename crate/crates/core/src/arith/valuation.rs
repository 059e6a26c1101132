use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::primes::Prime;
use super::{ArithError, ExactRational};

/// Exponent of `p` in the nonzero integer `n`, together with the cofactor.
pub(crate) fn split_off(n: &BigUint, p: &Prime) -> (u64, BigUint) {
    debug_assert!(!n.is_zero());
    if p.to_u64() == Some(2) {
        let tz = n.trailing_zeros().unwrap_or(0);
        return (tz, n >> tz);
    }
    let mut rest = n.clone();
    let mut e = 0;
    loop {
        let (q, r) = rest.div_rem(p.value());
        if !r.is_zero() {
            return (e, rest);
        }
        rest = q;
        e += 1;
    }
}

/// `v_p(n)` for a nonzero integer.
pub fn vp_int(n: &BigInt, p: &Prime) -> Result<u64, ArithError> {
    if n.is_zero() {
        return Err(ArithError::ZeroValuation);
    }
    Ok(split_off(n.magnitude(), p).0)
}

/// `v_p(x)` for a nonzero rational, normalized so that `v_p(p) = 1`.
pub fn vp(x: &ExactRational, p: &Prime) -> Result<i64, ArithError> {
    if x.is_zero() {
        return Err(ArithError::ZeroValuation);
    }
    let num = split_off(x.numer().magnitude(), p).0 as i64;
    let den = split_off(x.denom().magnitude(), p).0 as i64;
    Ok(num - den)
}

/// A finite set of places of the rationals: the archimedean place together
/// with finitely many primes.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct PlaceSet {
    finite_primes: Vec<Prime>,
}

impl PlaceSet {
    /// Only the archimedean place.
    pub fn archimedean() -> Self {
        PlaceSet::default()
    }

    pub fn new(primes: impl IntoIterator<Item = Prime>) -> Self {
        let mut finite_primes: Vec<Prime> = primes.into_iter().collect();
        finite_primes.sort();
        finite_primes.dedup();
        PlaceSet { finite_primes }
    }

    pub fn from_u64s(primes: &[u64]) -> Result<Self, ArithError> {
        let primes = primes
            .iter()
            .map(|&p| Prime::from_u64(p))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(PlaceSet::new(primes))
    }

    pub fn finite_primes(&self) -> &[Prime] {
        &self.finite_primes
    }

    pub fn includes_archimedean(&self) -> bool {
        true
    }

    /// Cardinality `s`, counting the archimedean place.
    pub fn cardinality(&self) -> usize {
        1 + self.finite_primes.len()
    }

    pub fn contains(&self, p: &Prime) -> bool {
        self.finite_primes.binary_search(p).is_ok()
    }

    pub fn union(&self, other: &PlaceSet) -> PlaceSet {
        PlaceSet::new(self.finite_primes.iter().chain(&other.finite_primes).cloned())
    }

    /// Divides every prime of the set out of `n`, returning the exponents
    /// (in the order of `finite_primes`) and the prime-to-S part.
    pub(crate) fn strip(&self, n: &BigUint) -> (Vec<u64>, BigUint) {
        let mut rest = n.clone();
        let exps = self
            .finite_primes
            .iter()
            .map(|p| {
                let (e, r) = split_off(&rest, p);
                rest = r;
                e
            })
            .collect();
        (exps, rest)
    }

    /// Exponent vector of an S-unit as `(sign, [v_p(x) for p in S])`, or
    /// `None` when `x` is zero or not an S-unit.
    pub fn unit_exponents(&self, x: &ExactRational) -> Option<(i8, Vec<i64>)> {
        if x.is_zero() {
            return None;
        }
        let (num_e, num_rest) = self.strip(x.numer().magnitude());
        if !num_rest.is_one() {
            return None;
        }
        let (den_e, den_rest) = self.strip(x.denom().magnitude());
        if !den_rest.is_one() {
            return None;
        }
        let sign = if x.is_negative() { -1 } else { 1 };
        let exps = num_e.iter().zip(&den_e).map(|(&a, &b)| a as i64 - b as i64).collect();
        Some((sign, exps))
    }
}

impl fmt::Display for PlaceSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{inf")?;
        for p in &self.finite_primes {
            write!(f, ",{p}")?;
        }
        write!(f, "}}")
    }
}

/// Where a rational sits relative to the S-integers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SClass {
    Zero,
    SUnit,
    SIntegerNotUnit,
    NotSInteger,
}

pub fn s_membership(x: &ExactRational, places: &PlaceSet) -> SClass {
    if x.is_zero() {
        return SClass::Zero;
    }
    let (_, den_rest) = places.strip(x.denom().magnitude());
    if !den_rest.is_one() {
        return SClass::NotSInteger;
    }
    let (_, num_rest) = places.strip(x.numer().magnitude());
    if num_rest.is_one() {
        SClass::SUnit
    } else {
        SClass::SIntegerNotUnit
    }
}
