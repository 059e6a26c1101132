//! Brute-force S-unit equations inside an exponent box.
//!
//! Units are `± p_1^a_1 ... p_r^a_r` with every `|a_i| <= B`. Results are
//! complete for the box only; nothing here says anything about solutions
//! outside it.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::arith::{ExactRational, PlaceSet};
use crate::bounds::{compare_u64, evaluate_bound, BoundFormula, BoundValue, Verdict};

/// Largest number of candidates a scan may test.
pub const DEFAULT_SCAN_CAP: u64 = 20_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SUnitError {
    #[error("exponent bound must be at least 1")]
    ZeroBound,
    #[error("scan of {size} candidates exceeds the cap of {cap}")]
    BoxTooLarge { size: u128, cap: u64 },
    #[error("coefficient {0} must be nonzero")]
    ZeroCoefficient(usize),
}

/// The units of an exponent box.
#[derive(Debug, Clone)]
pub struct UnitBox {
    places: PlaceSet,
    bound: u32,
}

impl UnitBox {
    pub fn new(places: PlaceSet, bound: u32) -> Result<Self, SUnitError> {
        if bound == 0 {
            return Err(SUnitError::ZeroBound);
        }
        Ok(UnitBox { places, bound })
    }

    pub fn places(&self) -> &PlaceSet {
        &self.places
    }

    pub fn bound(&self) -> u32 {
        self.bound
    }

    /// `2 (2B + 1)^r`, the number of units in the box.
    pub fn size(&self) -> u128 {
        let side = 2 * u128::from(self.bound) + 1;
        2 * (0..self.places.finite_primes().len()).fold(1u128, |acc, _| acc.saturating_mul(side))
    }

    fn check(&self, work: u128, cap: u64) -> Result<(), SUnitError> {
        if work > u128::from(cap) {
            return Err(SUnitError::BoxTooLarge { size: work, cap });
        }
        Ok(())
    }

    /// All units of the box in increasing order.
    pub fn units(&self) -> Vec<ExactRational> {
        let primes: Vec<BigInt> = self
            .places
            .finite_primes()
            .iter()
            .map(|p| BigInt::from(p.value().clone()))
            .collect();
        let b = i64::from(self.bound);
        let mut out = vec![BigRational::one()];
        for p in &primes {
            let powers: Vec<BigRational> = (-b..=b)
                .map(|e| {
                    let m = p.pow(e.unsigned_abs() as u32);
                    if e < 0 {
                        BigRational::new(BigInt::one(), m)
                    } else {
                        BigRational::from_integer(m)
                    }
                })
                .collect();
            out = out.iter().flat_map(|u| powers.iter().map(move |q| u * q)).collect();
        }
        let negatives: Vec<_> = out.iter().map(|u| -u).collect();
        out.extend(negatives);
        out.sort();
        out
    }

    /// True for a unit whose exponents all lie in the box.
    pub fn contains(&self, x: &ExactRational) -> bool {
        self.places
            .unit_exponents(x)
            .is_some_and(|(_, e)| e.iter().all(|a| a.unsigned_abs() <= u64::from(self.bound)))
    }
}

/// Solutions of `u + v = 1` in a box.
#[derive(Debug, Clone)]
pub struct UnitEquationReport {
    pub unit_box: UnitBox,
    pub solutions: Vec<(ExactRational, ExactRational)>,
    /// Rank of the group of pairs `(u, v)`, `2 (s - 1)`.
    pub rank: u64,
    pub bound: BoundValue,
    pub verdict: Verdict,
}

/// Enumerates `u` over the box and keeps those with `1 - u` in it.
pub fn solve_unit_equation(places: &PlaceSet, bound: u32) -> Result<UnitEquationReport, SUnitError> {
    solve_unit_equation_capped(places, bound, DEFAULT_SCAN_CAP)
}

pub fn solve_unit_equation_capped(places: &PlaceSet, bound: u32, cap: u64) -> Result<UnitEquationReport, SUnitError> {
    let unit_box = UnitBox::new(places.clone(), bound)?;
    unit_box.check(unit_box.size(), cap)?;
    let one = BigRational::one();
    let solutions: Vec<_> = unit_box
        .units()
        .into_par_iter()
        .filter_map(|u| {
            let v = &one - &u;
            unit_box.contains(&v).then_some((u, v))
        })
        .collect();
    let rank = 2 * places.finite_primes().len() as u64;
    let bound = evaluate_bound(BoundFormula::BeukersSchlickewei { r: rank }).expect("no constraints");
    let verdict = compare_u64(solutions.len() as u64, &bound);
    Ok(UnitEquationReport {
        unit_box,
        solutions,
        rank,
        bound,
        verdict,
    })
}

/// Unordered pairs `{u, v}` of box units with `u + v = T`.
#[derive(Debug, Clone)]
pub struct TwoWaysReport {
    pub target: ExactRational,
    /// Each pair has `u <= v`; sorted by `u`.
    pub representations: Vec<(ExactRational, ExactRational)>,
}

impl TwoWaysReport {
    /// `T` is a sum of two units in at least two different ways.
    pub fn essentially_different(&self) -> bool {
        self.representations.len() >= 2
    }
}

pub fn two_way_representations(
    target: &ExactRational,
    places: &PlaceSet,
    bound: u32,
) -> Result<TwoWaysReport, SUnitError> {
    let unit_box = UnitBox::new(places.clone(), bound)?;
    unit_box.check(unit_box.size(), DEFAULT_SCAN_CAP)?;
    let representations = unit_box
        .units()
        .into_par_iter()
        .filter_map(|u| {
            let v = target - &u;
            (u <= v && unit_box.contains(&v)).then_some((u, v))
        })
        .collect();
    Ok(TwoWaysReport {
        target: target.clone(),
        representations,
    })
}

/// Nondegenerate solutions of `a_1 x_1 + a_2 x_2 + a_3 x_3 = 1`.
#[derive(Debug, Clone)]
pub struct ThreeTermReport {
    pub unit_box: UnitBox,
    pub coefficients: [ExactRational; 3],
    pub solutions: Vec<[ExactRational; 3]>,
    /// `3 (s - 1)`.
    pub rank: u64,
    pub bound: BoundValue,
    pub verdict: Verdict,
}

/// True when no nonempty proper subsum of the terms vanishes.
pub fn nondegenerate(terms: &[ExactRational; 3]) -> bool {
    let [a, b, c] = terms;
    ![a.clone(), b.clone(), c.clone(), a + b, a + c, b + c]
        .iter()
        .any(Zero::is_zero)
}

/// Scans `(x_1, x_2)` over the box and solves for `x_3`.
pub fn count_three_term(
    places: &PlaceSet,
    coefficients: &[ExactRational; 3],
    bound: u32,
) -> Result<ThreeTermReport, SUnitError> {
    if let Some(i) = coefficients.iter().position(Zero::is_zero) {
        return Err(SUnitError::ZeroCoefficient(i));
    }
    let unit_box = UnitBox::new(places.clone(), bound)?;
    let n = unit_box.size();
    unit_box.check(n.saturating_mul(n), DEFAULT_SCAN_CAP)?;
    let units = unit_box.units();
    let [a1, a2, a3] = coefficients;
    let one = BigRational::one();
    let solutions: Vec<[ExactRational; 3]> = units
        .par_iter()
        .flat_map_iter(|x1| {
            let (units, one, unit_box) = (&units, &one, &unit_box);
            units.iter().filter_map(move |x2| {
                let x3 = (one - a1 * x1 - a2 * x2) / a3;
                if !unit_box.contains(&x3) {
                    return None;
                }
                let terms = [a1 * x1, a2 * x2, a3 * &x3];
                nondegenerate(&terms).then(|| [x1.clone(), x2.clone(), x3])
            })
        })
        .collect();
    let rank = 3 * places.finite_primes().len() as u64;
    let bound = evaluate_bound(BoundFormula::Ess { n: 3, r: rank }).expect("n = 3");
    let verdict = compare_u64(solutions.len() as u64, &bound);
    Ok(ThreeTermReport {
        unit_box,
        coefficients: coefficients.clone(),
        solutions,
        rank,
        bound,
        verdict,
    })
}

/// `u_num,u_den,v_num,v_den` rows with a header line.
pub fn solutions_csv(solutions: &[(ExactRational, ExactRational)]) -> String {
    let mut out = String::from("u_num,u_den,v_num,v_den\n");
    for (u, v) in solutions {
        out.push_str(&format!("{},{},{},{}\n", u.numer(), u.denom(), v.numer(), v.denom()));
    }
    out
}

/// Sign and exponent vector of a box unit, for display.
pub fn describe_unit(places: &PlaceSet, u: &ExactRational) -> Option<String> {
    let (sign, exps) = places.unit_exponents(u)?;
    let mut s = String::from(if sign < 0 { "-" } else { "+" });
    for (p, e) in places.finite_primes().iter().zip(exps) {
        s.push_str(&format!(" {p}^{e}"));
    }
    Some(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn places(primes: &[u64]) -> PlaceSet {
        PlaceSet::from_u64s(primes).unwrap()
    }

    fn q(s: &str) -> ExactRational {
        s.parse().unwrap()
    }

    fn set(pairs: &[(ExactRational, ExactRational)]) -> Vec<(String, String)> {
        pairs.iter().map(|(u, v)| (u.to_string(), v.to_string())).collect()
    }

    #[test]
    fn box_size_matches_enumeration() {
        let b = UnitBox::new(places(&[2, 3]), 2).unwrap();
        assert_eq!(b.size(), 50);
        assert_eq!(b.units().len(), 50);
        assert!(b.contains(&q("-4/9")));
        assert!(!b.contains(&q("8")));
        assert!(!b.contains(&q("5")));
    }

    #[test]
    fn two_adic_unit_equation() {
        let r = solve_unit_equation(&places(&[2]), 20).unwrap();
        assert_eq!(
            set(&r.solutions),
            [("-1", "2"), ("1/2", "1/2"), ("2", "-1")].map(|(a, b)| (a.to_string(), b.to_string()))
        );
        assert_eq!(r.rank, 2);
        assert_eq!(r.verdict, Verdict::Satisfied);
    }

    #[test]
    fn archimedean_only_has_no_solutions() {
        for b in 1..4 {
            assert!(solve_unit_equation(&PlaceSet::archimedean(), b)
                .unwrap()
                .solutions
                .is_empty());
        }
    }

    #[test]
    fn refuses_oversized_boxes() {
        assert_eq!(
            solve_unit_equation_capped(&places(&[2, 3]), 10, 100).unwrap_err(),
            SUnitError::BoxTooLarge { size: 882, cap: 100 }
        );
        assert_eq!(
            solve_unit_equation(&places(&[2]), 0).unwrap_err(),
            SUnitError::ZeroBound
        );
    }

    #[test]
    fn two_way_examples() {
        let s = places(&[2, 3]);
        let r = two_way_representations(&q("1"), &s, 10).unwrap();
        for (u, v) in [("-2", "3"), ("-8", "9"), ("1/3", "2/3")] {
            assert!(r.representations.contains(&(q(u), q(v))), "{u} + {v}");
        }
        assert!(r.essentially_different());
        let r = two_way_representations(&q("5"), &s, 10).unwrap();
        for (u, v) in [("2", "3"), ("-4", "9"), ("-3", "8")] {
            assert!(r.representations.contains(&(q(u), q(v))), "{u} + {v}");
        }
        let r = two_way_representations(&q("2"), &PlaceSet::archimedean(), 1).unwrap();
        assert_eq!(r.representations, [(q("1"), q("1"))]);
        assert!(!r.essentially_different());
    }

    #[test]
    fn three_term_examples() {
        let ones = [q("1"), q("1"), q("1")];
        let r = count_three_term(&PlaceSet::archimedean(), &ones, 1).unwrap();
        assert!(r.solutions.is_empty());

        // oracle: all triples, checked directly
        let s = places(&[2]);
        let a = [q("1"), q("1"), q("-1")];
        let units = UnitBox::new(s.clone(), 6).unwrap().units();
        let mut expected = 0;
        for x in &units {
            for y in &units {
                for z in &units {
                    let terms = [x.clone(), y.clone(), -z];
                    if x + y - z == q("1") && nondegenerate(&terms) {
                        expected += 1;
                    }
                }
            }
        }
        let r = count_three_term(&s, &a, 6).unwrap();
        assert_eq!(r.solutions.len(), expected);
        assert!(expected > 0);
        assert_eq!(r.verdict, Verdict::Satisfied);
        for [x, y, z] in &r.solutions {
            assert_eq!(x + y - z, q("1"));
        }
    }

    #[test]
    fn csv_output() {
        let r = solve_unit_equation(&places(&[2]), 3).unwrap();
        assert_eq!(
            solutions_csv(&r.solutions),
            "u_num,u_den,v_num,v_den\n-1,1,2,1\n1,2,1,2\n2,1,-1,1\n"
        );
        assert_eq!(describe_unit(&places(&[2, 3]), &q("-4/3")).unwrap(), "- 2^2 3^-1");
    }
}
