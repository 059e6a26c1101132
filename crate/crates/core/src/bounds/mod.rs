//! Log-space evaluation of the explicit orbit-length and counting bounds,
//! with outward rounding.
//!
//! The bounds are far too large to write down (`e^(10^12)` and beyond), so
//! each is carried as an interval `[ln_lower, ln_upper]` that provably
//! contains its natural logarithm. Comparisons against orbit data are sound
//! in both directions: "satisfied" and "violated" are only reported when the
//! interval decides them.

mod interval;

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use interval::to_decimal_units;
pub use interval::{bits_for_digits, Interval};

/// Digits after the decimal point used unless overridden.
pub const DEFAULT_PRECISION: u32 = 60;

/// Exact values wider than this are reported in log form only.
const EXACT_BITS_LIMIT: u64 = 256;

/// One of the explicit bounds. `degree` is the field degree `[K:Q]`, which
/// is 1 over the rationals but kept as a parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "id", rename_all = "kebab-case")]
pub enum BoundFormula {
    /// Uniform orbit length `c(s) = [e^(10^12) (s+1)^8 ln(5(s+1))^8]^s`.
    CanciC { s: u64 },
    /// Period bound `[12(t+2) ln(5(t+2))]^(4D)` for `t` bad primes.
    MortonSilverman { t: u64, degree: u64 },
    /// Cycle length bound `[12 s ln(5s)]^(2D+1)` for monic polynomials.
    PezdaBR { s: u64, degree: u64 },
    /// `(1/3) [12 s ln(5s)]^(2D+1) (31 + 2^(1031 s)) - 1`.
    NarkiewiczPezdaOrbit { s: u64, degree: u64 },
    /// `2^(8(r+1))` solutions of `x + y = 1` in a rank-`r` group.
    BeukersSchlickewei { r: u64 },
    /// `e^((6n)^(3n) (r+1))` nondegenerate solutions in `n` variables.
    Ess { n: u64, r: u64 },
    /// Tail bound `e^(10^12 s) - 2` for orbits into a fixed point.
    NpTail { s: u64 },
    /// Run length `2^(16 s)` of points at equal distance from the fixed point.
    KRun { s: u64 },
    /// `e^(18^9 (3s - 2))` ideals with two essentially different
    /// representations.
    TwoWaysIdeals { s: u64 },
    /// Order of a finite-order element of `PGL_2`: `2 + 4 D^2`.
    Pgl2Order { degree: u64 },
}

impl BoundFormula {
    pub fn id(&self) -> &'static str {
        match self {
            BoundFormula::CanciC { .. } => "canci-c",
            BoundFormula::MortonSilverman { .. } => "morton-silverman",
            BoundFormula::PezdaBR { .. } => "pezda-br",
            BoundFormula::NarkiewiczPezdaOrbit { .. } => "narkiewicz-pezda-orbit",
            BoundFormula::BeukersSchlickewei { .. } => "beukers-schlickewei",
            BoundFormula::Ess { .. } => "ess",
            BoundFormula::NpTail { .. } => "np-tail",
            BoundFormula::KRun { .. } => "k-run",
            BoundFormula::TwoWaysIdeals { .. } => "two-ways-ideals",
            BoundFormula::Pgl2Order { .. } => "pgl2-order",
        }
    }

    pub fn params(&self) -> String {
        match *self {
            BoundFormula::CanciC { s }
            | BoundFormula::NpTail { s }
            | BoundFormula::KRun { s }
            | BoundFormula::TwoWaysIdeals { s } => format!("s={s}"),
            BoundFormula::MortonSilverman { t, degree } => format!("t={t},D={degree}"),
            BoundFormula::PezdaBR { s, degree } | BoundFormula::NarkiewiczPezdaOrbit { s, degree } => {
                format!("s={s},D={degree}")
            }
            BoundFormula::BeukersSchlickewei { r } => format!("r={r}"),
            BoundFormula::Ess { n, r } => format!("n={n},r={r}"),
            BoundFormula::Pgl2Order { degree } => format!("D={degree}"),
        }
    }

    fn validate(&self) -> Result<(), BoundError> {
        let positive = |name: &'static str, v: u64| {
            if v == 0 {
                Err(BoundError::Parameter {
                    name,
                    reason: "must be positive",
                })
            } else {
                Ok(())
            }
        };
        match *self {
            BoundFormula::CanciC { s }
            | BoundFormula::NpTail { s }
            | BoundFormula::KRun { s }
            | BoundFormula::TwoWaysIdeals { s } => positive("s", s),
            BoundFormula::MortonSilverman { degree, .. } => positive("D", degree),
            BoundFormula::PezdaBR { s, degree } | BoundFormula::NarkiewiczPezdaOrbit { s, degree } => {
                positive("s", s)?;
                positive("D", degree)
            }
            BoundFormula::BeukersSchlickewei { .. } => Ok(()),
            BoundFormula::Ess { n, .. } => {
                if n < 3 {
                    Err(BoundError::Parameter {
                        name: "n",
                        reason: "must be at least 3",
                    })
                } else {
                    Ok(())
                }
            }
            BoundFormula::Pgl2Order { degree } => positive("D", degree),
        }
    }
}

impl fmt::Display for BoundFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", self.id(), self.params())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BoundError {
    #[error("parameter {name} {reason}")]
    Parameter { name: &'static str, reason: &'static str },
}

/// `mantissa * 10^-digits`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decimal {
    pub mantissa: BigInt,
    pub digits: u32,
}

impl Decimal {
    pub fn to_rational(&self) -> BigRational {
        BigRational::new(self.mantissa.clone(), BigInt::from(10u32).pow(self.digits))
    }

    pub fn to_f64(&self) -> f64 {
        self.to_rational().to_f64().unwrap_or(f64::INFINITY)
    }
}

impl fmt::Display for Decimal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let neg = self.mantissa.is_negative();
        let digits = self.mantissa.magnitude().to_string();
        let width = self.digits as usize;
        let padded = if digits.len() <= width {
            format!("{}{}", "0".repeat(width + 1 - digits.len()), digits)
        } else {
            digits
        };
        let (int, frac) = padded.split_at(padded.len() - width);
        let sign = if neg { "-" } else { "" };
        if width == 0 {
            write!(f, "{sign}{int}")
        } else {
            write!(f, "{sign}{int}.{frac}")
        }
    }
}

/// Outward-rounded natural logarithm of a bound.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundValue {
    pub formula: BoundFormula,
    /// Rounded toward `+inf`; never below the true logarithm.
    pub ln_upper: Decimal,
    /// Rounded toward `-inf`; never above the true logarithm.
    pub ln_lower: Decimal,
    /// The bound itself when it is a modest integer.
    pub exact: Option<BigUint>,
    pub exact_form: String,
    pub precision_digits: u32,
}

impl BoundValue {
    /// `"10^x"` with `x = ln_upper / ln 10` to six decimals.
    pub fn magnitude(&self) -> String {
        let bits = bits_for_digits(self.precision_digits.max(20)) + 64;
        let ln10 = ln_int(10, bits);
        let upper = self.ln_upper.to_rational() * BigRational::from_integer(BigInt::one() << (2 * bits));
        let units = (upper / BigRational::from_integer(ln10.lo)).ceil().to_integer();
        let mantissa = to_decimal_units(&units, bits, 6, true);
        format!("10^{}", Decimal { mantissa, digits: 6 })
    }
}

/// Evaluates a bound at the default precision.
pub fn evaluate_bound(formula: BoundFormula) -> Result<BoundValue, BoundError> {
    evaluate_bound_at(formula, DEFAULT_PRECISION)
}

fn ln_int(n: u64, bits: u32) -> Interval {
    Interval::int(n as i64, bits).ln().expect("positive argument")
}

/// `ln(12 a) + ln(ln(5 a))`, the logarithm of `12 a ln(5a)`.
fn ln_twelve_log_five(a: u64, bits: u32) -> Interval {
    let inner = ln_int(5 * a, bits).ln().expect("ln(5a) > 1");
    ln_int(12 * a, bits).add(&inner)
}

fn big(n: u64) -> BigInt {
    BigInt::from(n)
}

/// Evaluates a bound keeping `digits` decimals in either endpoint.
pub fn evaluate_bound_at(formula: BoundFormula, digits: u32) -> Result<BoundValue, BoundError> {
    formula.validate()?;
    let bits = bits_for_digits(digits);
    let unit = || Interval::units(BigInt::zero(), BigInt::one(), bits);
    let ln2 = ln_int(2, bits);
    let tera = BigInt::from(10u64).pow(12);

    let (ln, exact, exact_form): (Interval, Option<BigUint>, String) = match formula {
        BoundFormula::CanciC { s } => {
            let inner = ln_int(s + 1, bits)
                .add(&ln_int(5 * (s + 1), bits).ln().expect("ln 10 > 0"))
                .scale(&big(8))
                .add(&Interval::exact(tera, bits));
            (
                inner.scale(&big(s)),
                None,
                format!("[e^(10^12) * {}^8 * ln({})^8]^{s}", s + 1, 5 * (s + 1)),
            )
        }
        BoundFormula::MortonSilverman { t, degree } => (
            ln_twelve_log_five(t + 2, bits).scale(&big(4 * degree)),
            None,
            format!("[12*{} * ln({})]^{}", t + 2, 5 * (t + 2), 4 * degree),
        ),
        BoundFormula::PezdaBR { s, degree } => (
            ln_twelve_log_five(s, bits).scale(&big(2 * degree + 1)),
            None,
            format!("[12*{s} * ln({})]^{}", 5 * s, 2 * degree + 1),
        ),
        BoundFormula::NarkiewiczPezdaOrbit { s, degree } => {
            // ln(31 + 2^k) = k ln 2 + ln(1 + 31/2^k) with 0 < ln(1 + 31/2^k) <= 31/2^k,
            // and the trailing -1 costs at most 2/X >= ln(1 - 1/X) in the lower end.
            let k = 1031 * s;
            let pow = BigInt::one() << k;
            let plus_31 = Interval::ratio(&big(31), &pow, bits);
            let plus = Interval::units(BigInt::zero(), plus_31.hi, bits);
            let minus_1 = Interval::ratio(&big(2), &pow, bits);
            let minus = Interval::units(-minus_1.hi, BigInt::zero(), bits);
            let ln = ln_twelve_log_five(s, bits)
                .scale(&big(2 * degree + 1))
                .sub(&ln_int(3, bits))
                .add(&ln2.scale(&big(k)))
                .add(&plus)
                .add(&minus);
            (
                ln,
                None,
                format!("(1/3) * [12*{s} * ln({})]^{} * (31 + 2^{k}) - 1", 5 * s, 2 * degree + 1),
            )
        }
        BoundFormula::BeukersSchlickewei { r } => {
            let k = 8 * (r + 1);
            (ln2.scale(&big(k)), exact_power_of_two(k), format!("2^{k}"))
        }
        BoundFormula::Ess { n, r } => {
            let e = BigInt::from(6 * n).pow((3 * n) as u32) * big(r + 1);
            let form = format!("e^({}^{} * {})", 6 * n, 3 * n, r + 1);
            (Interval::exact(e, bits), None, form)
        }
        BoundFormula::NpTail { s } => {
            // ln(e^A - 2) = A + ln(1 - 2e^-A), and 0 > ln(1 - 2e^-A) > -4e^-A > -2^-bits
            let a = &tera * big(s);
            let hi = Interval::exact(a, bits);
            let lo = hi.sub(&unit());
            (
                Interval::units(lo.lo, hi.hi, bits),
                None,
                format!("e^(10^12 * {s}) - 2"),
            )
        }
        BoundFormula::KRun { s } => {
            let k = 16 * s;
            (
                ln2.scale(&big(k)),
                exact_power_of_two(k),
                format!("2^(16*{s}) [proof-derived; weaker variant 2^(16^{s})]"),
            )
        }
        BoundFormula::TwoWaysIdeals { s } => {
            let e = BigInt::from(18u32).pow(9) * big(3 * s - 2);
            (Interval::exact(e, bits), None, format!("e^(18^9 * {})", 3 * s - 2))
        }
        BoundFormula::Pgl2Order { degree } => {
            let v = 2 + 4 * degree * degree;
            (ln_int(v, bits), Some(BigUint::from(v)), format!("2 + 4*{degree}^2"))
        }
    };

    Ok(BoundValue {
        formula,
        ln_upper: Decimal {
            mantissa: to_decimal_units(&ln.hi, bits, digits, true),
            digits,
        },
        ln_lower: Decimal {
            mantissa: to_decimal_units(&ln.lo, bits, digits, false),
            digits,
        },
        exact,
        exact_form,
        precision_digits: digits,
    })
}

fn exact_power_of_two(k: u64) -> Option<BigUint> {
    (k < EXACT_BITS_LIMIT).then(|| BigUint::one() << k)
}

/// Outcome of checking `length <= bound`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Satisfied,
    Violated,
    /// The interval straddles `ln(length)`; retry at higher precision.
    Inconclusive,
}

/// Decides `length <= bound` soundly: exact integers compare directly,
/// otherwise `satisfied` needs `ln(length) <= ln_lower` and `violated`
/// needs `ln(length) > ln_upper`, both with `ln(length)` itself bracketed.
pub fn compare(length: &BigUint, bound: &BoundValue) -> Verdict {
    if let Some(exact) = &bound.exact {
        return if length <= exact {
            Verdict::Satisfied
        } else {
            Verdict::Violated
        };
    }
    if length.is_zero() {
        return Verdict::Satisfied;
    }
    let bits = bits_for_digits(bound.precision_digits) + 8;
    let ln_len = Interval::exact(BigInt::from(length.clone()), bits)
        .ln()
        .expect("positive length");
    let den = BigInt::one() << bits;
    let len_hi = BigRational::new(ln_len.hi, den.clone());
    let len_lo = BigRational::new(ln_len.lo, den);
    if len_hi <= bound.ln_lower.to_rational() {
        Verdict::Satisfied
    } else if len_lo > bound.ln_upper.to_rational() {
        Verdict::Violated
    } else {
        Verdict::Inconclusive
    }
}

pub fn compare_u64(length: u64, bound: &BoundValue) -> Verdict {
    compare(&BigUint::from(length), bound)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn value(f: BoundFormula) -> BoundValue {
        evaluate_bound(f).unwrap()
    }

    #[test]
    fn exact_small_bounds() {
        let pgl = value(BoundFormula::Pgl2Order { degree: 1 });
        assert_eq!(pgl.exact, Some(BigUint::from(6u32)));
        let bs = value(BoundFormula::BeukersSchlickewei { r: 2 });
        assert_eq!(bs.exact, Some(BigUint::from(16_777_216u32)));
        assert_eq!(bs.exact_form, "2^24");
        assert_eq!(value(BoundFormula::KRun { s: 1 }).exact, Some(BigUint::from(65536u32)));
        assert_eq!(value(BoundFormula::BeukersSchlickewei { r: 40 }).exact, None);
    }

    #[test]
    fn canci_c_for_one_place() {
        let c = value(BoundFormula::CanciC { s: 1 });
        let tera = BigRational::from_integer(BigInt::from(10u64).pow(12));
        let frac = (c.ln_upper.to_rational() - tera).to_f64().unwrap();
        assert!((frac - 12.217_437).abs() < 1e-5, "{}", c.ln_upper);
        assert!(c.ln_lower.to_rational() <= c.ln_upper.to_rational());
    }

    #[test]
    fn morton_silverman_for_one_bad_prime() {
        let ms = value(BoundFormula::MortonSilverman { t: 1, degree: 1 });
        assert!((ms.ln_upper.to_f64() - 18.318_991).abs() < 1e-5);
        assert_eq!(ms.magnitude()[..6].to_string(), "10^7.9");
    }

    #[test]
    fn np_tail_reports_the_exponent() {
        let t = value(BoundFormula::NpTail { s: 1 });
        assert_eq!(
            t.ln_upper.to_rational(),
            BigRational::from_integer(BigInt::from(10u64).pow(12))
        );
        assert!(t.ln_lower.to_rational() < t.ln_upper.to_rational());
    }

    #[test]
    fn exponent_only_formulas_are_exact_in_log_space() {
        let two = value(BoundFormula::TwoWaysIdeals { s: 1 });
        assert_eq!(two.ln_upper, two.ln_lower);
        assert_eq!(
            two.ln_upper.to_rational(),
            BigRational::from_integer(BigInt::from(18u64.pow(9)))
        );
        let ess = value(BoundFormula::Ess { n: 3, r: 0 });
        assert_eq!(ess.ln_upper, two.ln_upper);
    }

    #[test]
    fn comparisons() {
        assert_eq!(
            compare_u64(3, &value(BoundFormula::CanciC { s: 1 })),
            Verdict::Satisfied
        );
        assert_eq!(
            compare_u64(3, &value(BoundFormula::MortonSilverman { t: 1, degree: 1 })),
            Verdict::Satisfied
        );
        assert_eq!(
            compare_u64(7, &value(BoundFormula::Pgl2Order { degree: 1 })),
            Verdict::Violated
        );
        assert_eq!(
            compare_u64(6, &value(BoundFormula::Pgl2Order { degree: 1 })),
            Verdict::Satisfied
        );
        // [12*3 ln 15]^4 is about 9.03e7
        let ms = value(BoundFormula::MortonSilverman { t: 1, degree: 1 });
        assert_eq!(compare_u64(90_000_000, &ms), Verdict::Satisfied);
        assert_eq!(compare_u64(91_000_000, &ms), Verdict::Violated);
    }

    #[test]
    fn invalid_parameters() {
        assert!(evaluate_bound(BoundFormula::CanciC { s: 0 }).is_err());
        assert!(evaluate_bound(BoundFormula::Ess { n: 2, r: 1 }).is_err());
    }

    #[test]
    fn decimal_display() {
        let d = Decimal {
            mantissa: BigInt::from(-5),
            digits: 3,
        };
        assert_eq!(d.to_string(), "-0.005");
        let d = Decimal {
            mantissa: BigInt::from(123456),
            digits: 2,
        };
        assert_eq!(d.to_string(), "1234.56");
    }
}
