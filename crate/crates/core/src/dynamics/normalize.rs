//! Moving a finite orbit onto a fixed point at `[0:1]` and checking the
//! structural conditions along its tail.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::{DynamicsError, MoebiusTransform, OrbitCertificate, RationalMap};
use crate::arith::{PlaceSet, Prime};
use crate::bounds::{compare_u64, evaluate_bound, BoundFormula, BoundValue, Verdict};
use crate::projective::{DistanceProfile, Excluded, ProjectivePoint};

/// `Ψ^n` together with the points `Q_{-⌊m/n⌋n}, ..., Q_{-n}, Q_0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Collapsed {
    pub map: RationalMap,
    pub tail: Vec<ProjectivePoint>,
}

/// Collapses the cycle of `cert` to a fixed point of the `n`-fold iterate.
pub fn collapse_to_fixed_point(cert: &OrbitCertificate, max_bits: u64) -> Result<Collapsed, DynamicsError> {
    let (m, n) = (cert.tail_length(), cert.period());
    let map = cert.map().iterate(n, max_bits)?;
    let tail: Vec<_> = (0..=m / n).rev().map(|j| cert.points()[m - j * n].clone()).collect();
    let q0 = tail.last().expect("tail holds Q_0");
    if &map.evaluate(q0) != q0 {
        return Err(DynamicsError::NotFixed { point: q0.to_string() });
    }
    Ok(Collapsed { map, tail })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Normalized {
    pub map: RationalMap,
    pub tail: Vec<ProjectivePoint>,
    /// Determinant 1, sends the fixed point to `[0:1]`.
    pub transform: MoebiusTransform,
}

/// `A = (l -t; r s)` for `Q_0 = [t:l]`, where `r t + s l = 1` and `r` is
/// reduced modulo `|l|`.
fn transform_to_origin(q0: &ProjectivePoint) -> MoebiusTransform {
    let (t, l) = (q0.x(), q0.y());
    let (r, s) = if l.is_zero() {
        (BigInt::one(), BigInt::zero())
    } else {
        let e = t.extended_gcd(l);
        debug_assert!(e.gcd.is_one());
        let r = e.x.mod_floor(&l.abs());
        let s = (BigInt::one() - &r * t) / l;
        (r, s)
    };
    MoebiusTransform::new(l.clone(), -t, r, s).expect("determinant 1")
}

/// Conjugates so that the last tail point becomes `[0:1]`.
pub fn normalize_orbit(map: &RationalMap, tail: &[ProjectivePoint]) -> Result<Normalized, DynamicsError> {
    let q0 = tail
        .last()
        .ok_or_else(|| DynamicsError::InvalidCertificate("empty tail".into()))?;
    if &map.evaluate(q0) != q0 {
        return Err(DynamicsError::NotFixed { point: q0.to_string() });
    }
    let a = transform_to_origin(q0);
    let conj = map.conjugate(&a);
    let tail: Vec<_> = tail.iter().map(|p| a.apply(p)).collect();
    let origin = ProjectivePoint::origin();
    assert_eq!(tail.last(), Some(&origin), "A sends Q_0 to [0:1]");
    assert_eq!(conj.evaluate(&origin), origin, "conjugate fixes [0:1]");
    Ok(Normalized {
        map: conj,
        tail,
        transform: a,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NpReport {
    pub s: usize,
    /// Points before the fixed point.
    pub tail_length: usize,
    /// Cross terms checked nonzero.
    pub pairs_checked: usize,
    pub tail_bound: BoundValue,
    pub tail_verdict: Verdict,
}

fn require_places(map: &RationalMap, places: &PlaceSet) -> Result<(), DynamicsError> {
    if map.good_reduction_outside(places) {
        return Ok(());
    }
    let missing = places.strip(map.resultant().magnitude()).1;
    Err(DynamicsError::PlacesMissBadPrime(missing.to_string()))
}

/// Conditions on a normalized tail `P_0, ..., P_k = [0:1]`:
/// (1) the last point is `[0:1]`, (2) each `gcd(x_i, y_i)` is an S-unit,
/// (3) all cross terms `x_i y_j - x_j y_i` are nonzero; plus
/// `k < e^(10^12 s) - 2`.
///
/// Over the rationals (2) and (3) hold for any list of distinct canonical
/// points, but both are still checked literally.
pub fn verify_np_conditions(
    map: &RationalMap,
    tail: &[ProjectivePoint],
    places: &PlaceSet,
) -> Result<NpReport, DynamicsError> {
    require_places(map, places)?;
    let k = tail.len().saturating_sub(1);
    if tail.last() != Some(&ProjectivePoint::origin()) {
        return Err(DynamicsError::ConditionFails {
            condition: 1,
            i: k,
            j: k,
        });
    }
    for (i, p) in tail.iter().enumerate() {
        let g = p.x().gcd(p.y());
        if !places.strip(g.magnitude()).1.is_one() {
            return Err(DynamicsError::ConditionFails { condition: 2, i, j: i });
        }
    }
    let mut pairs_checked = 0;
    for i in 0..tail.len() {
        for j in i + 1..tail.len() {
            if tail[i].cross(&tail[j]).is_zero() {
                return Err(DynamicsError::ConditionFails { condition: 3, i, j });
            }
            pairs_checked += 1;
        }
    }
    let s = places.cardinality();
    let tail_bound = evaluate_bound(BoundFormula::NpTail { s: s as u64 }).expect("s >= 1");
    let tail_verdict = compare_u64(k as u64, &tail_bound);
    Ok(NpReport {
        s,
        tail_length: k,
        pairs_checked,
        tail_bound,
        tail_verdict,
    })
}

/// A step of the tail where the `x`-coordinate loses divisibility.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DivisibilityWitness {
    /// `v_p(x_index) > v_p(x_{index+1})`.
    pub index: usize,
    /// Product of primes behind the failure (a coprime-base element).
    pub divisor: String,
    pub prime: Option<Prime>,
}

impl std::fmt::Display for DivisibilityWitness {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match &self.prime {
            Some(p) => write!(f, "index {} prime {p}", self.index),
            None => write!(f, "index {} divisor {}", self.index, self.divisor),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DivisibilityReport {
    pub steps_checked: usize,
    /// Coprime-base elements covering every prime that divides some `x_i`.
    pub base_size: usize,
    pub witness: Option<DivisibilityWitness>,
}

impl DivisibilityReport {
    pub fn passed(&self) -> bool {
        self.witness.is_none()
    }
}

/// `v_p(x_i) <= v_p(x_{i+1})` along a normalized tail at every prime outside
/// `places`.
pub fn check_tail_divisibility(
    map: &RationalMap,
    tail: &[ProjectivePoint],
    places: &PlaceSet,
) -> Result<DivisibilityReport, DynamicsError> {
    require_places(map, places)?;
    tail_divisibility(tail, &Excluded::Places(places.clone()))
}

/// As [`check_tail_divisibility`], excluding whichever primes `excluded`
/// names; with `Excluded::DivisorsOf(resultant)` no factoring is needed.
pub fn tail_divisibility(tail: &[ProjectivePoint], excluded: &Excluded) -> Result<DivisibilityReport, DynamicsError> {
    let k = tail.len().saturating_sub(1);
    if tail.last() != Some(&ProjectivePoint::origin()) {
        return Err(DynamicsError::ConditionFails {
            condition: 1,
            i: k,
            j: k,
        });
    }
    // delta_p(P_i, [0:1]) = v_p(x_i)
    let profile = DistanceProfile::new(tail, excluded);
    let mut witness = None;
    'scan: for i in 0..k {
        for b in 0..profile.base().len() {
            let here = profile.distance(i, k, b);
            let next = profile.distance(i + 1, k, b);
            if here > next {
                witness = Some(DivisibilityWitness {
                    index: i,
                    divisor: profile.base()[b].to_string(),
                    prime: profile.witness_prime(b),
                });
                break 'scan;
            }
        }
    }
    Ok(DivisibilityReport {
        steps_checked: k,
        base_size: profile.base().len(),
        witness,
    })
}
