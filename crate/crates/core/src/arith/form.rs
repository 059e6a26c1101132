use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::linalg::bareiss_determinant;
use super::ArithError;

/// Homogeneous polynomial `sum_i c[i] X^(d-i) Y^i` with integer
/// coefficients. The degree is formal: `c[0]` may vanish.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BinaryForm {
    coeffs: Vec<BigInt>,
}

impl BinaryForm {
    /// Coefficients in order `X^d, X^(d-1) Y, ..., Y^d`; an empty list is the
    /// zero form of degree 0.
    pub fn new(coeffs: Vec<BigInt>) -> Self {
        if coeffs.is_empty() {
            return BinaryForm {
                coeffs: vec![BigInt::zero()],
            };
        }
        BinaryForm { coeffs }
    }

    pub fn from_i64s(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero(degree: usize) -> Self {
        BinaryForm {
            coeffs: vec![BigInt::zero(); degree + 1],
        }
    }

    /// `aX + bY`.
    pub fn linear(a: BigInt, b: BigInt) -> Self {
        BinaryForm { coeffs: vec![a, b] }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn eval(&self, x: &BigInt, y: &BigInt) -> BigInt {
        let mut acc = self.coeffs[0].clone();
        let mut ypow = BigInt::one();
        for c in &self.coeffs[1..] {
            ypow *= y;
            acc = acc * x + c * &ypow;
        }
        acc
    }

    /// gcd of the coefficients (zero for the zero form).
    pub fn content(&self) -> BigUint {
        self.coeffs
            .iter()
            .fold(BigInt::zero(), |g, c| g.gcd(c))
            .magnitude()
            .clone()
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        BinaryForm {
            coeffs: self.coeffs.iter().map(|c| c * k).collect(),
        }
    }

    pub(crate) fn div_exact(&self, k: &BigInt) -> Self {
        BinaryForm {
            coeffs: self
                .coeffs
                .iter()
                .map(|c| {
                    debug_assert!(c.is_multiple_of(k));
                    c / k
                })
                .collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.degree(), other.degree(), "adding forms of different degree");
        BinaryForm {
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = vec![BigInt::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        BinaryForm { coeffs: out }
    }

    pub fn pow(&self, k: usize) -> Self {
        let mut acc = BinaryForm::from_i64s(&[1]);
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    /// `self(p, q)` for forms `p`, `q` of a common degree `e`; the result has
    /// degree `d * e`.
    pub fn compose(&self, p: &Self, q: &Self) -> Self {
        assert_eq!(p.degree(), q.degree(), "substituted forms must share a degree");
        let d = self.degree();
        let e = p.degree();
        let p_pows = powers(p, d);
        let q_pows = powers(q, d);
        let mut out = BinaryForm::zero(d * e);
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let term = p_pows[d - i].mul(&q_pows[i]).scale(c);
            out = out.add(&term);
        }
        out
    }

    /// `self(aX + bY, cX + dY)`.
    pub fn substitute_linear(&self, a: &BigInt, b: &BigInt, c: &BigInt, d: &BigInt) -> Self {
        self.compose(
            &BinaryForm::linear(a.clone(), b.clone()),
            &BinaryForm::linear(c.clone(), d.clone()),
        )
    }

    /// Largest coefficient bit length.
    pub fn max_bits(&self) -> u64 {
        self.coeffs.iter().map(|c| c.bits()).max().unwrap_or(0)
    }
}

fn powers(f: &BinaryForm, up_to: usize) -> Vec<BinaryForm> {
    let mut out = Vec::with_capacity(up_to + 1);
    out.push(BinaryForm::from_i64s(&[1]));
    for k in 1..=up_to {
        let next = out[k - 1].mul(f);
        out.push(next);
    }
    out
}

impl fmt::Display for BinaryForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = self.degree();
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let monomial = monomial(d - i, i);
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let mag = c.magnitude();
            if monomial.is_empty() {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "{monomial}")?;
            } else {
                write!(f, "{mag}{monomial}")?;
            }
            first = false;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

fn monomial(x_exp: usize, y_exp: usize) -> String {
    let part = |v: &str, e: usize| match e {
        0 => String::new(),
        1 => v.to_string(),
        _ => format!("{v}^{e}"),
    };
    format!("{}{}", part("X", x_exp), part("Y", y_exp))
}

/// `Res(F, G)` as the determinant of the `2d x 2d` Sylvester matrix.
pub fn resultant(f: &BinaryForm, g: &BinaryForm) -> Result<BigInt, ArithError> {
    if f.degree() != g.degree() {
        return Err(ArithError::DegreeMismatch(f.degree(), g.degree()));
    }
    let d = f.degree();
    let n = 2 * d;
    let mut rows = Vec::with_capacity(n);
    for form in [f, g] {
        for shift in 0..d {
            let mut row = vec![BigInt::zero(); n];
            for (j, c) in form.coeffs.iter().enumerate() {
                row[shift + j] = c.clone();
            }
            rows.push(row);
        }
    }
    Ok(bareiss_determinant(&rows))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn form(c: &[i64]) -> BinaryForm {
        BinaryForm::from_i64s(c)
    }

    #[test]
    fn sylvester_examples() {
        assert_eq!(resultant(&form(&[1, 0, -1]), &form(&[0, 0, 1])), Ok(BigInt::from(1)));
        assert_eq!(resultant(&form(&[1, 0, 0]), &form(&[0, 0, 1])), Ok(BigInt::from(1)));
        assert_eq!(
            resultant(&form(&[16, 0, -29]), &form(&[0, 0, 16])),
            Ok(BigInt::from(65536))
        );
        // X(X - Y) and XY share the root [0:1]
        assert_eq!(resultant(&form(&[1, -1, 0]), &form(&[0, 1, 0])), Ok(BigInt::zero()));
        assert_eq!(
            resultant(&form(&[1, 0]), &form(&[1, 0, 0])),
            Err(ArithError::DegreeMismatch(1, 2))
        );
    }

    #[test]
    fn evaluation_and_display() {
        let f = form(&[16, 0, -29]);
        assert_eq!(f.eval(&BigInt::from(-1), &BigInt::from(4)), BigInt::from(16 - 29 * 16));
        assert_eq!(f.to_string(), "16X^2 - 29Y^2");
        assert_eq!(form(&[0, -1, 1]).to_string(), "-XY + Y^2");
        assert_eq!(form(&[0, 0]).to_string(), "0");
    }

    #[test]
    fn linear_substitution_matches_expansion() {
        // X^2 at (X + Y, Y) is X^2 + 2XY + Y^2
        let f = form(&[1, 0, 0]);
        let one = BigInt::one();
        let zero = BigInt::zero();
        assert_eq!(f.substitute_linear(&one, &one, &zero, &one), form(&[1, 2, 1]));
    }

    /// `a^d b^d prod (alpha_i - beta_j)` for `F = a prod (X - alpha_i Y)`.
    fn root_product_oracle(a: i64, alphas: &[i64], b: i64, betas: &[i64]) -> BigInt {
        let d = alphas.len() as u32;
        let mut r = BigInt::from(a).pow(d) * BigInt::from(b).pow(d);
        for &al in alphas {
            for &be in betas {
                r *= BigInt::from(al - be);
            }
        }
        r
    }

    fn split_form(lead: i64, roots: &[i64]) -> BinaryForm {
        roots.iter().fold(form(&[lead]), |acc, &r| acc.mul(&form(&[1, -r])))
    }

    /// Random determinant-one matrix as a product of elementary moves.
    fn sl2(moves: &[(bool, i64)]) -> [BigInt; 4] {
        let (mut a, mut b, mut c, mut d) = (1i64, 0i64, 0i64, 1i64);
        for &(upper, k) in moves {
            if upper {
                a += k * c;
                b += k * d;
            } else {
                c += k * a;
                d += k * b;
            }
        }
        [a, b, c, d].map(BigInt::from)
    }

    proptest! {
        #[test]
        fn resultant_matches_root_differences(
            (alphas, betas) in (1usize..=3).prop_flat_map(|d| (
                prop::collection::vec(-9i64..=9, d),
                prop::collection::vec(-9i64..=9, d),
            )),
            a in prop::sample::select(vec![-3i64, -2, -1, 1, 2, 3]),
            b in prop::sample::select(vec![-3i64, -2, -1, 1, 2, 5]),
        ) {
            let f = split_form(a, &alphas);
            let g = split_form(b, &betas);
            prop_assert_eq!(resultant(&f, &g).unwrap(), root_product_oracle(a, &alphas, b, &betas));
        }

        #[test]
        fn resultant_is_sl2_invariant(
            (fc, gc) in (1usize..=3).prop_flat_map(|d| (
                prop::collection::vec(-20i64..=20, d + 1),
                prop::collection::vec(-20i64..=20, d + 1),
            )),
            moves in prop::collection::vec((any::<bool>(), -3i64..=3), 0..5),
        ) {
            let f = form(&fc);
            let g = form(&gc);
            let [a, b, c, d] = sl2(&moves);
            let fa = f.substitute_linear(&a, &b, &c, &d);
            let ga = g.substitute_linear(&a, &b, &c, &d);
            prop_assert_eq!(resultant(&fa, &ga).unwrap(), resultant(&f, &g).unwrap());
        }
    }
}
