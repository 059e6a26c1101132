use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::moebius::MoebiusTransform;
use super::parse::parse_rational_function;
use super::DynamicsError;
use crate::arith::{factor, resultant, vp_int, BinaryForm, Factorization, PlaceSet, Prime};
use crate::projective::ProjectivePoint;

/// `[X:Y] -> [F(X,Y) : G(X,Y)]` for integer binary forms of a common degree
/// `d >= 1`.
///
/// The model is canonical: the `2d + 2` coefficients have gcd 1, the first
/// nonzero coefficient of `G` (else of `F`) is positive, and
/// `Res(F, G) != 0`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RationalMap {
    f: BinaryForm,
    g: BinaryForm,
    resultant: BigInt,
}

impl RationalMap {
    pub fn new(f: BinaryForm, g: BinaryForm) -> Result<Self, DynamicsError> {
        if f.degree() != g.degree() {
            return Err(DynamicsError::DegreeMismatch(f.degree(), g.degree()));
        }
        if f.degree() == 0 {
            return Err(DynamicsError::ConstantMap);
        }
        let content = BigInt::from(f.content().gcd(&g.content()));
        if content.is_zero() {
            return Err(DynamicsError::ZeroResultant);
        }
        let lead_negative = g
            .coeffs()
            .iter()
            .chain(f.coeffs())
            .find(|c| !c.is_zero())
            .is_some_and(Signed::is_negative);
        let scale = if lead_negative { -content } else { content };
        let (f, g) = (f.div_exact(&scale), g.div_exact(&scale));
        let res = resultant(&f, &g).map_err(|_| DynamicsError::DegreeMismatch(f.degree(), g.degree()))?;
        if res.is_zero() {
            return Err(DynamicsError::ZeroResultant);
        }
        Ok(RationalMap { f, g, resultant: res })
    }

    pub fn from_i64s(f: &[i64], g: &[i64]) -> Result<Self, DynamicsError> {
        Self::new(BinaryForm::from_i64s(f), BinaryForm::from_i64s(g))
    }

    /// Parses a rational function of `z` (grammar in [`super::parse`]).
    pub fn parse(text: &str) -> Result<Self, DynamicsError> {
        let rf = parse_rational_function(text)?;
        let d = rf.num.degree().max(rf.den.degree());
        if d == 0 {
            return Err(DynamicsError::ConstantMap);
        }
        // F(X, Y) = Y^d num(X/Y): coefficient of X^(d-i) Y^i is num[d-i]
        let lcm = (0..=d)
            .flat_map(|i| [rf.num.coeff(i), rf.den.coeff(i)])
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let homogenize = |p: &super::poly::Poly| {
            BinaryForm::new(
                (0..=d)
                    .map(|i| (p.coeff(d - i) * BigRational::from_integer(lcm.clone())).to_integer())
                    .collect(),
            )
        };
        Self::new(homogenize(&rf.num), homogenize(&rf.den))
    }

    pub fn degree(&self) -> usize {
        self.f.degree()
    }

    pub fn f(&self) -> &BinaryForm {
        &self.f
    }

    pub fn g(&self) -> &BinaryForm {
        &self.g
    }

    /// `Res(F, G)` of the canonical model.
    pub fn resultant(&self) -> &BigInt {
        &self.resultant
    }

    pub fn evaluate(&self, p: &ProjectivePoint) -> ProjectivePoint {
        ProjectivePoint::new(self.f.eval(p.x(), p.y()), self.g.eval(p.x(), p.y()))
            .expect("nonzero resultant rules out a common zero")
    }

    pub fn resultant_factorization(&self) -> Result<Factorization, DynamicsError> {
        Ok(factor(&self.resultant)?)
    }

    /// Primes dividing the resultant of this model. It contains every prime
    /// of bad reduction and possibly more (the model need not be minimal).
    pub fn bad_primes(&self) -> Result<Vec<Prime>, DynamicsError> {
        Ok(self.resultant_factorization()?.primes().cloned().collect())
    }

    pub fn bad_places(&self) -> Result<PlaceSet, DynamicsError> {
        Ok(PlaceSet::new(self.bad_primes()?))
    }

    pub fn good_reduction_at(&self, p: &Prime) -> bool {
        vp_int(&self.resultant, p).map(|v| v == 0).unwrap_or(false)
    }

    /// True when every prime dividing the resultant lies in `places`.
    pub fn good_reduction_outside(&self, places: &PlaceSet) -> bool {
        places.strip(self.resultant.magnitude()).1.is_one()
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &RationalMap) -> RationalMap {
        let f = self.f.compose(&inner.f, &inner.g);
        let g = self.g.compose(&inner.f, &inner.g);
        RationalMap::new(f, g).expect("composite of maps has nonzero resultant")
    }

    /// `n`-fold iterate, refusing once a coefficient exceeds `max_bits`.
    pub fn iterate(&self, n: usize, max_bits: u64) -> Result<RationalMap, DynamicsError> {
        assert!(n >= 1, "iterate needs n >= 1");
        let mut acc = self.clone();
        for _ in 1..n {
            acc = self.compose(&acc);
            let bits = acc.f.max_bits().max(acc.g.max_bits());
            if bits > max_bits {
                return Err(DynamicsError::BitBudget { bits, max_bits });
            }
        }
        Ok(acc)
    }

    /// `A ∘ self ∘ A^-1`, content-normalized.
    pub fn conjugate(&self, a: &MoebiusTransform) -> RationalMap {
        let [p, q, r, s] = a.entries();
        // A^-1 up to scalar is the adjugate (s -q; -r p)
        let f_in = self.f.substitute_linear(s, &-q, &-r, p);
        let g_in = self.g.substitute_linear(s, &-q, &-r, p);
        let f = f_in.scale(p).add(&g_in.scale(q));
        let g = f_in.scale(r).add(&g_in.scale(s));
        RationalMap::new(f, g).expect("conjugate of a map has nonzero resultant")
    }

    /// An expression in `z` that parses back to this map.
    pub fn to_expression(&self) -> String {
        format!("({})/({})", dehomogenize(&self.f), dehomogenize(&self.g))
    }

    /// Largest coefficient bit length.
    pub fn max_bits(&self) -> u64 {
        self.f.max_bits().max(self.g.max_bits())
    }
}

fn dehomogenize(form: &BinaryForm) -> String {
    let d = form.degree();
    let mut out = String::new();
    for (i, c) in form.coeffs().iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let e = d - i;
        let sign = if c.is_negative() {
            "-"
        } else if out.is_empty() {
            ""
        } else {
            "+"
        };
        let mag: BigUint = c.magnitude().clone();
        let monomial = match e {
            0 => mag.to_string(),
            1 if mag.is_one() => "z".to_string(),
            1 => format!("{mag}*z"),
            _ if mag.is_one() => format!("z^{e}"),
            _ => format!("{mag}*z^{e}"),
        };
        out.push_str(sign);
        out.push_str(&monomial);
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

impl fmt::Display for RationalMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{} : {}]", self.f, self.g)
    }
}
