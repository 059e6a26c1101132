//! The distance inequalities, decided at every relevant prime at once via a
//! coprime base of the cross terms.

use num_bigint::BigUint;

use crate::dynamics::{
    check_tail_divisibility, collapse_to_fixed_point, normalize_orbit, verify_np_conditions, DynamicsError,
    OrbitCertificate, RationalMap,
};
use crate::projective::{DistanceProfile, Excluded, ProjectivePoint};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CheckStatus {
    Passed,
    Failed(String),
    /// The check could not run (e.g. a composite outgrew the bit budget).
    Skipped(String),
}

/// Outcome of one property check; `checks` counts the inequalities decided.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckOutcome {
    pub checks: u64,
    pub status: CheckStatus,
}

impl CheckOutcome {
    fn passed(checks: u64) -> Self {
        CheckOutcome {
            checks,
            status: CheckStatus::Passed,
        }
    }

    fn failed(checks: u64, why: String) -> Self {
        CheckOutcome {
            checks,
            status: CheckStatus::Failed(why),
        }
    }

    pub fn is_failure(&self) -> bool {
        matches!(self.status, CheckStatus::Failed(_))
    }

    pub fn label(&self) -> &'static str {
        match self.status {
            CheckStatus::Passed => "passed",
            CheckStatus::Failed(_) => "failed",
            CheckStatus::Skipped(_) => "skipped",
        }
    }
}

fn primes_of(profile: &DistanceProfile, k: usize) -> String {
    match profile.witness_prime(k) {
        Some(p) if p.value() == &profile.base()[k] => format!("p = {p}"),
        Some(p) => format!("primes dividing {} (e.g. {p})", profile.base()[k]),
        None => format!("primes dividing {}", profile.base()[k]),
    }
}

/// `delta_p(P_i, P_k) >= min(delta_p(P_i, P_j), delta_p(P_j, P_k))` for every
/// ordered triple of distinct indices and every prime.
pub fn triangle(points: &[ProjectivePoint]) -> CheckOutcome {
    let profile = DistanceProfile::new(points, &Excluded::Nothing);
    let n = points.len();
    let mut checks = 0;
    for k in 0..profile.base().len() {
        for a in 0..n {
            for b in 0..n {
                for c in a + 1..n {
                    if b == a || b == c {
                        continue;
                    }
                    checks += 1;
                    let lhs = profile.distance(a, c, k);
                    let rhs = profile.distance(a, b, k).min(profile.distance(b, c, k));
                    if lhs < rhs {
                        return CheckOutcome::failed(
                            checks,
                            format!(
                                "triangle inequality fails for {} {} {} at {}",
                                points[a],
                                points[b],
                                points[c],
                                primes_of(&profile, k)
                            ),
                        );
                    }
                }
            }
        }
    }
    CheckOutcome::passed(checks)
}

/// `delta_p(Phi P_i, Phi P_j) >= delta_p(P_i, P_j)` at each prime not dividing
/// `resultant`, where `image[i]` indexes `Phi P_i` in `points`.
fn non_expansion_indexed(points: &[ProjectivePoint], image: &[usize], resultant: &BigUint) -> CheckOutcome {
    let profile = DistanceProfile::new(points, &Excluded::DivisorsOf(resultant.clone()));
    let mut checks = 0;
    for k in 0..profile.base().len() {
        for i in 0..image.len() {
            for j in i + 1..image.len() {
                checks += 1;
                let before = profile.distance(i, j, k);
                let after = profile.distance(image[i], image[j], k);
                if after < before {
                    return CheckOutcome::failed(
                        checks,
                        format!(
                            "distance of {} and {} shrinks under the map at {}",
                            points[i],
                            points[j],
                            primes_of(&profile, k)
                        ),
                    );
                }
            }
        }
    }
    CheckOutcome::passed(checks)
}

/// Non-expansion for one pair `(P, Q)` at every good-reduction prime.
pub fn non_expansion(map: &RationalMap, p: &ProjectivePoint, q: &ProjectivePoint) -> CheckOutcome {
    let points = [p.clone(), q.clone(), map.evaluate(p), map.evaluate(q)];
    non_expansion_indexed(&points, &[2, 3], map.resultant().magnitude())
}

/// Orbit index `i` (counted from the start) advanced by `steps`, wrapping
/// around the cycle.
fn advance(i: usize, steps: usize, m: usize, n: usize) -> usize {
    let j = i + steps;
    if j < m + n {
        j
    } else {
        m + (j - m) % n
    }
}

/// Non-expansion between consecutive orbit points, using the orbit itself
/// for the images.
pub fn orbit_non_expansion(points: &[ProjectivePoint], m: usize, n: usize, resultant: &BigUint) -> CheckOutcome {
    let image: Vec<usize> = (0..m + n).map(|i| advance(i, 1, m, n)).collect();
    non_expansion_indexed(points, &image, resultant)
}

/// `delta_p(Q_a, Q_{a+kb}) >= delta_p(Q_a, Q_{a+b})` for every start `a`,
/// step `b >= 1`, multiple `k >= 2` up to the orbit length, and every prime
/// not dividing `resultant`.
pub fn remark(points: &[ProjectivePoint], m: usize, n: usize, resultant: &BigUint) -> CheckOutcome {
    let profile = DistanceProfile::new(points, &Excluded::DivisorsOf(resultant.clone()));
    let len = m + n;
    let mut checks = 0;
    for k in 0..profile.base().len() {
        for (a, point) in points.iter().enumerate().take(len) {
            for b in 1..=len {
                let near = profile.distance(a, advance(a, b, m, n), k);
                for mult in 2..=len {
                    checks += 1;
                    let far = profile.distance(a, advance(a, mult * b, m, n), k);
                    if far < near {
                        return CheckOutcome::failed(
                            checks,
                            format!(
                                "a = {}, b = {b}, k = {mult}: distance from {} drops at {}",
                                a as i64 - m as i64,
                                point,
                                primes_of(&profile, k)
                            ),
                        );
                    }
                }
            }
        }
    }
    CheckOutcome::passed(checks)
}

/// The four checks attached to a certificate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CertificateChecks {
    pub prop51: CheckOutcome,
    pub prop52: CheckOutcome,
    pub remark: CheckOutcome,
    pub divisibility: CheckOutcome,
}

impl CertificateChecks {
    pub fn any_failure(&self) -> bool {
        [&self.prop51, &self.prop52, &self.remark, &self.divisibility]
            .iter()
            .any(|c| c.is_failure())
    }
}

/// Runs collapse, normalization, the tail conditions and tail divisibility.
pub fn pipeline(cert: &OrbitCertificate, max_bits: u64) -> CheckOutcome {
    let run = || -> Result<u64, DynamicsError> {
        let places = cert.places();
        let collapsed = collapse_to_fixed_point(cert, max_bits)?;
        let normalized = normalize_orbit(&collapsed.map, &collapsed.tail)?;
        let np = verify_np_conditions(&normalized.map, &normalized.tail, &places)?;
        if np.tail_verdict != crate::bounds::Verdict::Satisfied {
            return Err(DynamicsError::InvalidCertificate(format!(
                "tail bound {:?} for length {}",
                np.tail_verdict, np.tail_length
            )));
        }
        let div = check_tail_divisibility(&normalized.map, &normalized.tail, &places)?;
        if let Some(w) = div.witness {
            return Err(DynamicsError::InvalidCertificate(format!("divisibility fails at {w}")));
        }
        Ok(np.pairs_checked as u64 + div.steps_checked as u64)
    };
    match run() {
        Ok(checks) => CheckOutcome::passed(checks),
        Err(DynamicsError::BitBudget { bits, max_bits }) => CheckOutcome {
            checks: 0,
            status: CheckStatus::Skipped(format!("composite needs {bits} bits (budget {max_bits})")),
        },
        Err(e) => CheckOutcome::failed(0, e.to_string()),
    }
}

pub fn check_certificate(cert: &OrbitCertificate, max_bits: u64) -> CertificateChecks {
    let (m, n) = (cert.tail_length(), cert.period());
    let res = cert.map().resultant().magnitude();
    CertificateChecks {
        prop51: triangle(cert.points()),
        prop52: orbit_non_expansion(cert.points(), m, n, res),
        remark: remark(cert.points(), m, n, res),
        divisibility: pipeline(cert, max_bits),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(s: &str) -> ProjectivePoint {
        s.parse().unwrap()
    }

    #[test]
    fn triangle_on_powers_of_two() {
        // 0, 4 and 8: delta_2 = 2, 2, 3 consistent with the ultrametric rule
        assert_eq!(triangle(&[pt("0"), pt("4"), pt("8")]).status, CheckStatus::Passed);
    }

    #[test]
    fn non_expansion_passes_and_flags_bad_primes() {
        let map = RationalMap::parse("z^2-29/16").unwrap();
        // at p = 2 the distance can shrink, but 2 divides the resultant
        let r = non_expansion(&map, &pt("1/2"), &pt("5/2"));
        assert_eq!(r.status, CheckStatus::Passed);
        // 2z has resultant 2 and pulls inf and 1/2 apart 2-adically; a fake
        // resultant of 1 exposes the drop
        let m = RationalMap::parse("2*z").unwrap();
        let (p, q) = (pt("inf"), pt("1/2"));
        assert_eq!(non_expansion(&m, &p, &q).status, CheckStatus::Passed);
        let points = [p.clone(), q.clone(), m.evaluate(&p), m.evaluate(&q)];
        assert!(non_expansion_indexed(&points, &[2, 3], &BigUint::from(1u32)).is_failure());
    }

    #[test]
    fn advance_wraps_into_the_cycle() {
        // m = 1, n = 2: indices 0 | 1 2
        assert_eq!(advance(0, 1, 1, 2), 1);
        assert_eq!(advance(2, 1, 1, 2), 1);
        assert_eq!(advance(0, 4, 1, 2), 2);
    }
}
