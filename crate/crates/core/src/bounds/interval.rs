//! Fixed-point interval arithmetic with directed rounding.
//!
//! An [`Interval`] holds integers `lo <= hi` standing for the closed range
//! `[lo, hi] * 2^-bits`. Every operation rounds `lo` down and `hi` up, so
//! the true value always stays inside.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Interval {
    pub lo: BigInt,
    pub hi: BigInt,
    pub bits: u32,
}

/// `floor(n / 2^s)`.
fn shr_floor(n: &BigInt, s: u32) -> BigInt {
    n >> s
}

/// `ceil(n / 2^s)`.
fn shr_ceil(n: &BigInt, s: u32) -> BigInt {
    -((-n) >> s)
}

impl Interval {
    pub fn exact(n: BigInt, bits: u32) -> Self {
        let v = n << bits;
        Interval {
            lo: v.clone(),
            hi: v,
            bits,
        }
    }

    pub fn int(n: i64, bits: u32) -> Self {
        Self::exact(BigInt::from(n), bits)
    }

    /// `num / den` for `den > 0`.
    pub fn ratio(num: &BigInt, den: &BigInt, bits: u32) -> Self {
        debug_assert!(den.is_positive());
        let scaled = num << bits;
        Interval {
            lo: scaled.div_floor(den),
            hi: scaled.div_ceil(den),
            bits,
        }
    }

    /// `[lo_units, hi_units] * 2^-bits` taken literally.
    pub fn units(lo: BigInt, hi: BigInt, bits: u32) -> Self {
        debug_assert!(lo <= hi);
        Interval { lo, hi, bits }
    }

    pub fn add(&self, other: &Self) -> Self {
        debug_assert_eq!(self.bits, other.bits);
        Interval {
            lo: &self.lo + &other.lo,
            hi: &self.hi + &other.hi,
            bits: self.bits,
        }
    }

    pub fn neg(&self) -> Self {
        Interval {
            lo: -&self.hi,
            hi: -&self.lo,
            bits: self.bits,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        let (a, b) = (&self.lo * k, &self.hi * k);
        if k.is_negative() {
            Interval {
                lo: b,
                hi: a,
                bits: self.bits,
            }
        } else {
            Interval {
                lo: a,
                hi: b,
                bits: self.bits,
            }
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        debug_assert_eq!(self.bits, other.bits);
        let products = [
            &self.lo * &other.lo,
            &self.lo * &other.hi,
            &self.hi * &other.lo,
            &self.hi * &other.hi,
        ];
        let min = products.iter().min().expect("four products");
        let max = products.iter().max().expect("four products");
        Interval {
            lo: shr_floor(min, self.bits),
            hi: shr_ceil(max, self.bits),
            bits: self.bits,
        }
    }

    /// Natural logarithm; `None` unless the interval is strictly positive.
    pub fn ln(&self) -> Option<Self> {
        if !self.lo.is_positive() {
            return None;
        }
        let (lo, _) = ln_units(self.lo.magnitude(), self.bits);
        let (_, hi) = ln_units(self.hi.magnitude(), self.bits);
        Some(Interval {
            lo,
            hi,
            bits: self.bits,
        })
    }

    pub fn width(&self) -> BigInt {
        &self.hi - &self.lo
    }
}

/// Bounds on `ln(a / 2^w)` in units of `2^-w`.
pub fn ln_units(a: &BigUint, w: u32) -> (BigInt, BigInt) {
    debug_assert!(!a.is_zero());
    let guard = 24 + 2 * (64 - u64::from(w).leading_zeros());
    let abits = a.bits() as u32;
    let g = (w + guard).max(abits);
    // x = 2^k * m with m in [1, 2), m held exactly with g fractional bits
    let k = i64::from(abits) - 1 - i64::from(w);
    let m = BigInt::from(a.clone()) << (g + 1 - abits);
    let one = BigInt::one() << g;

    // z = (m - 1)/(m + 1) in [0, 1/3)
    let num = (&m - &one) << g;
    let den = &m + &one;
    let (s_lo, s_hi) = atanh_series(&num.div_floor(&den), &num.div_ceil(&den), g);
    let (l2_lo, l2_hi) = ln2_units(g);

    let k_big = BigInt::from(k);
    let (klo, khi) = if k >= 0 {
        (&k_big * &l2_lo, &k_big * &l2_hi)
    } else {
        (&k_big * &l2_hi, &k_big * &l2_lo)
    };
    let lo = klo + (s_lo << 1u32);
    let hi = khi + (s_hi << 1u32);
    let shift = g - w;
    (shr_floor(&lo, shift), shr_ceil(&hi, shift))
}

/// `ln 2 = 2 atanh(1/3)` in units of `2^-g`.
fn ln2_units(g: u32) -> (BigInt, BigInt) {
    let one = BigInt::one() << g;
    let three = BigInt::from(3);
    let (lo, hi) = atanh_series(&one.div_floor(&three), &one.div_ceil(&three), g);
    (lo << 1u32, hi << 1u32)
}

/// Bounds on `atanh(z)` for `0 <= z_lo <= z <= z_hi < 2^g / 2` (fixed point
/// with `g` fractional bits).
fn atanh_series(z_lo: &BigInt, z_hi: &BigInt, g: u32) -> (BigInt, BigInt) {
    // lower: truncated series of floored terms (all terms are positive)
    let z2_lo = shr_floor(&(z_lo * z_lo), g);
    let mut lo = BigInt::zero();
    let mut power = z_lo.clone();
    let mut j = 0u64;
    while !power.is_zero() {
        lo += power.div_floor(&BigInt::from(2 * j + 1));
        power = shr_floor(&(&power * &z2_lo), g);
        j += 1;
    }

    // upper: ceiled terms until the power reaches one unit, then the tail
    // sum_{i>=j} z^(2i+1)/(2i+1) <= z^(2j+1) / (1 - z^2) < 2 z^(2j+1)
    let z2_hi = shr_ceil(&(z_hi * z_hi), g);
    let mut hi = BigInt::zero();
    let mut power = z_hi.clone();
    let mut j = 0u64;
    while power > BigInt::one() {
        hi += power.div_ceil(&BigInt::from(2 * j + 1));
        power = shr_ceil(&(&power * &z2_hi), g);
        j += 1;
        if z2_hi.is_zero() {
            power = BigInt::zero();
        }
    }
    hi += power << 1u32;
    (lo, hi)
}

/// Bits needed so one unit is below `10^-digits`.
pub fn bits_for_digits(digits: u32) -> u32 {
    // log2(10) < 3.3220
    (u64::from(digits) * 33_220 / 10_000) as u32 + 8
}

/// `floor` or `ceil` of `units / 2^bits` in units of `10^-digits`.
pub fn to_decimal_units(units: &BigInt, bits: u32, digits: u32, round_up: bool) -> BigInt {
    let scaled = units * BigInt::from(10u32).pow(digits);
    let den = BigInt::one() << bits;
    if round_up {
        scaled.div_ceil(&den)
    } else {
        scaled.div_floor(&den)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::ToPrimitive;

    fn as_f64(units: &BigInt, bits: u32) -> f64 {
        units.to_f64().unwrap() / 2f64.powi(bits as i32)
    }

    #[test]
    fn ln_brackets_f64_values() {
        let bits = 80;
        for (num, den) in [(2i64, 1i64), (3, 1), (10, 1), (1, 3), (5, 4), (1_000_003, 7), (1, 1)] {
            let x = Interval::ratio(&BigInt::from(num), &BigInt::from(den), bits);
            let l = x.ln().unwrap();
            let expect = (num as f64 / den as f64).ln();
            assert!(as_f64(&l.lo, bits) <= expect + 1e-15, "{num}/{den}");
            assert!(as_f64(&l.hi, bits) >= expect - 1e-15, "{num}/{den}");
            assert!(l.width() < BigInt::from(64), "{num}/{den}: width {}", l.width());
        }
    }

    #[test]
    fn ln_of_one_contains_zero() {
        let l = Interval::int(1, 100).ln().unwrap();
        assert!(l.lo <= BigInt::zero() && l.hi >= BigInt::zero());
    }

    #[test]
    fn nonpositive_has_no_log() {
        assert!(Interval::int(0, 10).ln().is_none());
        assert!(Interval::int(-3, 10).ln().is_none());
    }

    #[test]
    fn rounding_directions() {
        let x = Interval::ratio(&BigInt::from(-1), &BigInt::from(3), 4);
        assert_eq!((x.lo.clone(), x.hi.clone()), (BigInt::from(-6), BigInt::from(-5)));
        let y = x.mul(&x);
        assert!(as_f64(&y.lo, 4) <= 1.0 / 9.0 && as_f64(&y.hi, 4) >= 1.0 / 9.0);
        assert_eq!(to_decimal_units(&BigInt::from(-5), 4, 2, false), BigInt::from(-32));
        assert_eq!(to_decimal_units(&BigInt::from(-5), 4, 2, true), BigInt::from(-31));
    }
}
