use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::DynamicsError;
use crate::projective::ProjectivePoint;

/// Integer matrix `(a b; c d)` acting on `[x:y]` columns, with content 1,
/// positive first nonzero entry and nonzero determinant.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MoebiusTransform {
    m: [BigInt; 4],
}

/// Result of an order search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MoebiusOrder {
    Finite(u32),
    ExceedsCap,
}

impl MoebiusTransform {
    pub fn new(a: BigInt, b: BigInt, c: BigInt, d: BigInt) -> Result<Self, DynamicsError> {
        let m = [a, b, c, d];
        if (&m[0] * &m[3] - &m[1] * &m[2]).is_zero() {
            return Err(DynamicsError::SingularMatrix);
        }
        let g = m.iter().fold(BigInt::zero(), |g, v| g.gcd(v));
        let neg = m.iter().find(|v| !v.is_zero()).is_some_and(Signed::is_negative);
        let g = if neg { -g } else { g };
        Ok(MoebiusTransform { m: m.map(|v| v / &g) })
    }

    pub fn from_i64s(a: i64, b: i64, c: i64, d: i64) -> Result<Self, DynamicsError> {
        Self::new(a.into(), b.into(), c.into(), d.into())
    }

    pub fn identity() -> Self {
        MoebiusTransform {
            m: [BigInt::one(), BigInt::zero(), BigInt::zero(), BigInt::one()],
        }
    }

    pub fn entries(&self) -> &[BigInt; 4] {
        &self.m
    }

    pub fn determinant(&self) -> BigInt {
        &self.m[0] * &self.m[3] - &self.m[1] * &self.m[2]
    }

    pub fn apply(&self, p: &ProjectivePoint) -> ProjectivePoint {
        p.transform(&self.m).expect("invertible matrix")
    }

    /// Matrix product `self * other` (apply `other` first).
    pub fn then_after(&self, other: &Self) -> Self {
        let [a, b, c, d] = &self.m;
        let [e, f, g, h] = &other.m;
        Self::new(a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h).expect("product of invertible matrices")
    }

    pub fn is_scalar(&self) -> bool {
        self.m[1].is_zero() && self.m[2].is_zero() && self.m[0] == self.m[3]
    }

    /// Least `k <= cap` with `A^k` scalar (identity in PGL_2).
    pub fn order(&self, cap: u32) -> MoebiusOrder {
        let mut power = self.clone();
        for k in 1..=cap {
            if power.is_scalar() {
                return MoebiusOrder::Finite(k);
            }
            power = power.then_after(self);
        }
        MoebiusOrder::ExceedsCap
    }
}

impl fmt::Display for MoebiusTransform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = &self.m;
        write!(f, "[[{a},{b}],[{c},{d}]]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::DEFAULT_ORDER_CAP;

    fn order(a: i64, b: i64, c: i64, d: i64) -> MoebiusOrder {
        MoebiusTransform::from_i64s(a, b, c, d)
            .unwrap()
            .order(DEFAULT_ORDER_CAP)
    }

    #[test]
    fn orders() {
        assert_eq!(order(0, -1, 1, 0), MoebiusOrder::Finite(2));
        assert_eq!(order(0, 1, -1, 1), MoebiusOrder::Finite(3));
        assert_eq!(order(1, 1, 0, 1), MoebiusOrder::ExceedsCap);
        assert_eq!(order(5, 0, 0, 5), MoebiusOrder::Finite(1));
        assert_eq!(order(1, -1, 1, 1), MoebiusOrder::Finite(4));
        assert_eq!(order(1, -1, 1, 0), MoebiusOrder::Finite(3));
        assert_eq!(order(2, -1, 1, 1), MoebiusOrder::Finite(6));
    }

    #[test]
    fn canonical_and_nonsingular() {
        let a = MoebiusTransform::from_i64s(-2, 4, 0, -6).unwrap();
        assert_eq!(a.entries(), &[1, -2, 0, 3].map(BigInt::from));
        assert_eq!(
            MoebiusTransform::from_i64s(1, 2, 2, 4),
            Err(DynamicsError::SingularMatrix)
        );
    }
}
