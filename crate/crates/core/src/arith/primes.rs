use std::fmt;
use std::sync::OnceLock;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, ToPrimitive, Zero};

use super::ArithError;

/// Trial-division limit; the prime table holds every prime below it.
pub(crate) const TRIAL_LIMIT: u32 = 1_000_000;

/// `n < DETERMINISTIC_MR_LIMIT` makes Miller-Rabin with the first 13 prime
/// bases a proof of primality.
const DETERMINISTIC_MR_LIMIT: u128 = 3_317_044_064_679_887_385_961_981;

const MR_BASES: [u32; 24] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89,
];

/// All primes below one million, in increasing order.
pub fn small_primes() -> &'static [u32] {
    static TABLE: OnceLock<Vec<u32>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let limit = TRIAL_LIMIT as usize;
        let mut composite = vec![false; limit];
        let mut primes = Vec::with_capacity(78_500);
        for i in 2..limit {
            if !composite[i] {
                primes.push(i as u32);
                let mut j = i * i;
                while j < limit {
                    composite[j] = true;
                    j += i;
                }
            }
        }
        primes
    })
}

/// Primality check: table lookup below one million, Miller-Rabin above.
///
/// Deterministic (a proof) below 3.3 * 10^24; beyond that it is a strong
/// probable-prime test with 24 fixed bases.
pub fn is_prime(n: &BigUint) -> bool {
    if let Some(small) = n.to_u32() {
        if small < TRIAL_LIMIT {
            return small_primes().binary_search(&small).is_ok();
        }
    }
    for &p in &small_primes()[..64] {
        if (n % p).is_zero() {
            return false;
        }
    }
    let bases = match n.to_u128() {
        Some(v) if v < DETERMINISTIC_MR_LIMIT => &MR_BASES[..13],
        _ => &MR_BASES[..],
    };
    bases.iter().all(|&a| miller_rabin_round(n, &BigUint::from(a)))
}

fn miller_rabin_round(n: &BigUint, base: &BigUint) -> bool {
    let one = BigUint::one();
    let n_minus_one = n - &one;
    let twos = n_minus_one.trailing_zeros().unwrap_or(0);
    let odd = &n_minus_one >> twos;
    let mut x = base.modpow(&odd, n);
    if x.is_one() || x == n_minus_one {
        return true;
    }
    for _ in 1..twos {
        x = (&x * &x) % n;
        if x == n_minus_one {
            return true;
        }
        if x.is_one() {
            return false;
        }
    }
    false
}

/// A rational prime, validated at construction.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Prime(BigUint);

impl Prime {
    pub fn new(n: BigUint) -> Result<Self, ArithError> {
        if is_prime(&n) {
            Ok(Prime(n))
        } else {
            Err(ArithError::NotPrime(BigInt::from(n)))
        }
    }

    pub fn from_u64(n: u64) -> Result<Self, ArithError> {
        Self::new(BigUint::from(n))
    }

    /// Caller guarantees primality (factorization output, table entries).
    pub(crate) fn trusted(n: BigUint) -> Self {
        debug_assert!(is_prime(&n));
        Prime(n)
    }

    pub fn value(&self) -> &BigUint {
        &self.0
    }

    pub fn to_u64(&self) -> Option<u64> {
        self.0.to_u64()
    }

    #[cfg(test)]
    pub(crate) fn divides(&self, n: &BigUint) -> bool {
        num_integer::Integer::is_multiple_of(n, &self.0)
    }
}

impl fmt::Display for Prime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}
