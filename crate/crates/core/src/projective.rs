//! Points of the projective line over the rationals in canonical coprime
//! integer coordinates, and the p-adic logarithmic distance between them.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::arith::{coprime_base, factor, multiplicity, vp_int, ArithError, ExactRational, PlaceSet, Prime};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PointError {
    #[error("[0:0] is not a point of the projective line")]
    BothZero,
    #[error("cannot parse point {text:?}: {reason}")]
    Syntax { text: String, reason: String },
}

/// `[x:y]` with `gcd(x, y) = 1` and either `y > 0` or `(x, y) = (1, 0)`.
///
/// Construction always canonicalizes, so structural equality is equality of
/// points and both min-terms of the distance formula vanish.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ProjectivePoint {
    x: BigInt,
    y: BigInt,
}

impl ProjectivePoint {
    pub fn new(x: BigInt, y: BigInt) -> Result<Self, PointError> {
        if x.is_zero() && y.is_zero() {
            return Err(PointError::BothZero);
        }
        let g = x.gcd(&y);
        let (mut x, mut y) = (x / &g, y / &g);
        if y.is_negative() || (y.is_zero() && x.is_negative()) {
            x = -x;
            y = -y;
        }
        Ok(ProjectivePoint { x, y })
    }

    pub fn from_i64s(x: i64, y: i64) -> Result<Self, PointError> {
        Self::new(BigInt::from(x), BigInt::from(y))
    }

    /// `z -> [z:1]`.
    pub fn affine(z: &ExactRational) -> Self {
        ProjectivePoint {
            x: z.numer().clone(),
            y: z.denom().clone(),
        }
    }

    pub fn infinity() -> Self {
        ProjectivePoint {
            x: BigInt::one(),
            y: BigInt::zero(),
        }
    }

    pub fn origin() -> Self {
        ProjectivePoint {
            x: BigInt::zero(),
            y: BigInt::one(),
        }
    }

    pub fn x(&self) -> &BigInt {
        &self.x
    }

    pub fn y(&self) -> &BigInt {
        &self.y
    }

    pub fn is_infinity(&self) -> bool {
        self.y.is_zero()
    }

    /// Affine coordinate `x/y`, or `None` at infinity.
    pub fn to_rational(&self) -> Option<ExactRational> {
        (!self.is_infinity()).then(|| ExactRational::new(self.x.clone(), self.y.clone()))
    }

    /// `x1 y2 - x2 y1`; zero exactly when the points coincide.
    pub fn cross(&self, other: &Self) -> BigInt {
        &self.x * &other.y - &other.x * &self.y
    }

    pub fn bits(&self) -> u64 {
        self.x.bits().max(self.y.bits())
    }

    /// Image under the integer matrix `(a b; c d)` acting on columns.
    pub fn transform(&self, m: &[BigInt; 4]) -> Result<Self, PointError> {
        let [a, b, c, d] = m;
        Self::new(a * &self.x + b * &self.y, c * &self.x + d * &self.y)
    }
}

impl fmt::Display for ProjectivePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}:{}]", self.x, self.y)
    }
}

/// Accepts an integer, `a/b`, `inf` (or `∞`), or `[x:y]`.
impl FromStr for ProjectivePoint {
    type Err = PointError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let err = |reason: &str| PointError::Syntax {
            text: text.to_string(),
            reason: reason.to_string(),
        };
        let int = |s: &str| -> Result<BigInt, PointError> {
            let s = s.trim().replace('\u{2212}', "-");
            s.parse::<BigInt>().map_err(|_| err("expected an integer"))
        };
        let t = text.trim();
        if t.eq_ignore_ascii_case("inf") || t == "∞" {
            return Ok(Self::infinity());
        }
        if let Some(inner) = t.strip_prefix('[').and_then(|r| r.strip_suffix(']')) {
            let (x, y) = inner.split_once(':').ok_or_else(|| err("expected [x:y]"))?;
            return Self::new(int(x)?, int(y)?);
        }
        match t.split_once('/') {
            Some((n, d)) => {
                let d = int(d)?;
                if d.is_zero() {
                    return Err(err("zero denominator"));
                }
                Self::new(int(n)?, d)
            }
            None => Self::new(int(t)?, BigInt::one()),
        }
    }
}

/// Value of the p-adic logarithmic distance; `Infinite` sorts above every
/// finite value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LogDistance {
    Finite(u64),
    Infinite,
}

impl LogDistance {
    pub fn finite(self) -> Option<u64> {
        match self {
            LogDistance::Finite(v) => Some(v),
            LogDistance::Infinite => None,
        }
    }

    /// Builds from an exponent where `None` stands for infinity.
    pub fn from_option(v: Option<u64>) -> Self {
        v.map_or(LogDistance::Infinite, LogDistance::Finite)
    }
}

impl fmt::Display for LogDistance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LogDistance::Finite(v) => write!(f, "{v}"),
            LogDistance::Infinite => write!(f, "inf"),
        }
    }
}

/// `delta_p(P, Q) = v_p(x1 y2 - x2 y1)` for canonical coordinates.
pub fn log_distance(p1: &ProjectivePoint, p2: &ProjectivePoint, p: &Prime) -> LogDistance {
    let cross = p1.cross(p2);
    match vp_int(&cross, p) {
        Ok(v) => LogDistance::Finite(v),
        Err(_) => LogDistance::Infinite,
    }
}

/// Every prime with `delta_p(P, Q) > 0`, paired with that distance.
pub fn relevant_primes(p1: &ProjectivePoint, p2: &ProjectivePoint) -> Result<Vec<(Prime, u64)>, ArithError> {
    let cross = p1.cross(p2);
    if cross.is_zero() {
        return Err(ArithError::ZeroValuation);
    }
    Ok(factor(&cross)?
        .factors
        .into_iter()
        .map(|(p, e)| (p, u64::from(e)))
        .collect())
}

pub(crate) fn cross_magnitude(p1: &ProjectivePoint, p2: &ProjectivePoint) -> BigUint {
    p1.cross(p2).magnitude().clone()
}

/// Orders points by affine value with infinity last; used only to make
/// reports deterministic.
pub fn display_order(a: &ProjectivePoint, b: &ProjectivePoint) -> Ordering {
    match (a.to_rational(), b.to_rational()) {
        (Some(x), Some(y)) => x.cmp(&y),
        (Some(_), None) => Ordering::Less,
        (None, Some(_)) => Ordering::Greater,
        (None, None) => Ordering::Equal,
    }
}

/// Primes to leave out of a [`DistanceProfile`].
#[derive(Debug, Clone)]
pub enum Excluded {
    Nothing,
    /// The finite primes of a place set.
    Places(PlaceSet),
    /// Every prime dividing this nonzero integer (e.g. a resultant), whether
    /// or not it has been factored.
    DivisorsOf(BigUint),
}

/// Pairwise p-adic distances of a point list at every prime outside an
/// excluded set, without factoring.
///
/// The cross terms `x_i y_j - x_j y_i` are split over a coprime base. For a
/// prime `p` dividing base element `b`, `delta_p(P_i, P_j) = e_ij(b) v_p(b)`,
/// so any inequality between distances at a common prime holds at every
/// prime dividing `b` iff it holds between the exponents `e_ij(b)`. Primes
/// dividing no base element have all distances zero.
#[derive(Debug, Clone)]
pub struct DistanceProfile {
    points: usize,
    base: Vec<BigUint>,
    exps: Vec<Option<Vec<u64>>>,
}

impl DistanceProfile {
    pub fn new(points: &[ProjectivePoint], excluded: &Excluded) -> Self {
        let n = points.len();
        let mut cross = Vec::with_capacity(n * (n - 1) / 2);
        for i in 0..n {
            for j in i + 1..n {
                let c = cross_magnitude(&points[i], &points[j]);
                let c = match excluded {
                    Excluded::Places(places) if !c.is_zero() => places.strip(&c).1,
                    _ => c,
                };
                cross.push(c);
            }
        }
        let mut inputs = cross.clone();
        if let Excluded::DivisorsOf(m) = excluded {
            inputs.push(m.clone());
        }
        let mut base = coprime_base(&inputs);
        if let Excluded::DivisorsOf(m) = excluded {
            base.retain(|b| b.gcd(m).is_one());
        }
        let exps = cross
            .iter()
            .map(|c| (!c.is_zero()).then(|| base.iter().map(|b| multiplicity(b, c)).collect()))
            .collect();
        DistanceProfile { points: n, base, exps }
    }

    /// Base elements; each stands for the set of primes dividing it.
    pub fn base(&self) -> &[BigUint] {
        &self.base
    }

    /// Distance between points `i` and `j` at the primes of base element
    /// `k`, in units of `v_p(base[k])`.
    pub fn distance(&self, i: usize, j: usize, k: usize) -> LogDistance {
        if i == j {
            return LogDistance::Infinite;
        }
        let (i, j) = if i < j { (i, j) } else { (j, i) };
        // index of (i, j) in the upper-triangle enumeration
        let idx = i * (2 * self.points - i - 1) / 2 + (j - i - 1);
        LogDistance::from_option(self.exps[idx].as_ref().map(|e| e[k]))
    }

    /// A prime standing behind base element `k`: the element itself when
    /// prime, else its smallest factor if factoring succeeds.
    pub fn witness_prime(&self, k: usize) -> Option<Prime> {
        factor(&BigInt::from(self.base[k].clone()))
            .ok()
            .and_then(|f| f.factors.into_iter().next().map(|(p, _)| p))
    }
}
