use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::RationalMap;
use crate::arith::{rational_nullspace, BinaryForm};
use crate::projective::ProjectivePoint;

/// Largest coefficient magnitude tried when combining nullspace vectors.
const COMBINATION_RANGE: i64 = 2;

/// Nullspaces wider than this only have their basis vectors tried.
const COMBINATION_DIM_LIMIT: usize = 4;

/// Finds a degree-`d` map sending each `P_i` to `P'_i`.
///
/// The conditions `F(P_i) y'_i - G(P_i) x'_i = 0` are linear in the `2d + 2`
/// coefficients. Candidates are the nullspace basis vectors, then small
/// integer combinations of them, and the first with nonzero resultant wins.
/// `None` means every candidate tried was degenerate.
pub fn synthesize_map(pairs: &[(ProjectivePoint, ProjectivePoint)], d: usize) -> Option<RationalMap> {
    if d == 0 {
        return None;
    }
    let rows: Vec<Vec<BigRational>> = pairs
        .iter()
        .map(|(p, q)| {
            let monomials: Vec<BigInt> = (0..=d)
                .map(|i| p.x().pow((d - i) as u32) * p.y().pow(i as u32))
                .collect();
            monomials
                .iter()
                .map(|m| m * q.y())
                .chain(monomials.iter().map(|m| -(m * q.x())))
                .map(BigRational::from_integer)
                .collect()
        })
        .collect();
    let basis = rational_nullspace(&rows, 2 * d + 2);
    let realizes = |map: &RationalMap| pairs.iter().all(|(p, q)| &map.evaluate(p) == q);
    let candidate = |v: &[BigRational]| {
        let lcm = v.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let ints: Vec<BigInt> = v
            .iter()
            .map(|c| (c * BigRational::from_integer(lcm.clone())).to_integer())
            .collect();
        let map = RationalMap::new(
            BinaryForm::new(ints[..=d].to_vec()),
            BinaryForm::new(ints[d + 1..].to_vec()),
        )
        .ok()?;
        realizes(&map).then_some(map)
    };
    if let Some(map) = basis.iter().find_map(|v| candidate(v)) {
        return Some(map);
    }
    if basis.len() < 2 || basis.len() > COMBINATION_DIM_LIMIT {
        return None;
    }
    combinations(basis.len()).into_iter().find_map(|coeffs| {
        let v: Vec<BigRational> = (0..2 * d + 2)
            .map(|k| {
                basis.iter().zip(&coeffs).fold(BigRational::zero(), |acc, (b, &c)| {
                    acc + &b[k] * BigRational::from_integer(c.into())
                })
            })
            .collect();
        candidate(&v)
    })
}

/// Coefficient vectors in `[-R, R]^k` with at least two nonzero entries,
/// ordered by l1 weight and then lexicographically.
fn combinations(k: usize) -> Vec<Vec<i64>> {
    let width = (2 * COMBINATION_RANGE + 1) as usize;
    let mut out: Vec<Vec<i64>> = (0..width.pow(k as u32))
        .map(|mut code| {
            (0..k)
                .map(|_| {
                    let c = (code % width) as i64 - COMBINATION_RANGE;
                    code /= width;
                    c
                })
                .collect::<Vec<i64>>()
        })
        .filter(|v| v.iter().filter(|c| **c != 0).count() >= 2)
        .collect();
    out.sort_by_key(|v| (v.iter().map(|c| c.abs()).sum::<i64>(), v.clone()));
    out
}
