use std::collections::HashMap;

use super::{DynamicsError, RationalMap};
use crate::arith::{ArithError, PlaceSet, Prime};
use crate::projective::ProjectivePoint;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OrbitBudget {
    pub max_steps: usize,
    /// Largest coordinate bit length allowed for any orbit point.
    pub max_bits: u64,
}

impl Default for OrbitBudget {
    fn default() -> Self {
        OrbitBudget {
            max_steps: 10_000,
            max_bits: 4096,
        }
    }
}

/// A finite orbit `start = Q_{-m}, ..., Q_0, ..., Q_{n-1}` with
/// `map(Q_{n-1}) = Q_0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitCertificate {
    map: RationalMap,
    tail_length: usize,
    period: usize,
    points: Vec<ProjectivePoint>,
    bad_primes: Vec<Prime>,
}

impl OrbitCertificate {
    /// Checks replay, distinctness, closure and minimality before accepting.
    pub fn from_parts(
        map: RationalMap,
        points: Vec<ProjectivePoint>,
        tail_length: usize,
        period: usize,
    ) -> Result<Self, DynamicsError> {
        let bad_primes = map.bad_primes()?;
        let cert = OrbitCertificate {
            map,
            tail_length,
            period,
            points,
            bad_primes,
        };
        cert.verify()?;
        Ok(cert)
    }

    pub fn map(&self) -> &RationalMap {
        &self.map
    }

    pub fn start(&self) -> &ProjectivePoint {
        &self.points[0]
    }

    pub fn tail_length(&self) -> usize {
        self.tail_length
    }

    pub fn period(&self) -> usize {
        self.period
    }

    pub fn points(&self) -> &[ProjectivePoint] {
        &self.points
    }

    /// `Q_0`, the first periodic point.
    pub fn cycle_entry(&self) -> &ProjectivePoint {
        &self.points[self.tail_length]
    }

    pub fn bad_primes(&self) -> &[Prime] {
        &self.bad_primes
    }

    /// The archimedean place together with the bad primes.
    pub fn places(&self) -> PlaceSet {
        PlaceSet::new(self.bad_primes.iter().cloned())
    }

    /// `s = |S|` for [`Self::places`].
    pub fn s(&self) -> usize {
        1 + self.bad_primes.len()
    }

    /// Replays the orbit from its start and re-checks every invariant.
    pub fn verify(&self) -> Result<(), DynamicsError> {
        let (m, n) = (self.tail_length, self.period);
        let bad = |msg: String| Err(DynamicsError::InvalidCertificate(msg));
        if n == 0 {
            return bad("period must be positive".into());
        }
        if self.points.len() != m + n {
            return bad(format!("{} points for m + n = {}", self.points.len(), m + n));
        }
        for (i, w) in self.points.windows(2).enumerate() {
            if self.map.evaluate(&w[0]) != w[1] {
                return bad(format!("point {} is not the image of point {i}", i + 1));
            }
        }
        if self.map.evaluate(&self.points[m + n - 1]) != self.points[m] {
            return bad("cycle does not close".into());
        }
        let mut seen = HashMap::new();
        for (i, p) in self.points.iter().enumerate() {
            if let Some(j) = seen.insert(p, i) {
                return bad(format!("points {j} and {i} coincide"));
            }
        }
        let entry = &self.points[m];
        for k in (1..n).filter(|k| n % k == 0) {
            let mut q = entry.clone();
            for _ in 0..k {
                q = self.map.evaluate(&q);
            }
            if &q == entry {
                return bad(format!("period {n} is not minimal; {k} closes the cycle"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UndecidedReason {
    StepsExhausted,
    BitBudgetExhausted,
    /// The orbit closed but the resultant could not be factored.
    FactorizationBudget,
}

impl UndecidedReason {
    pub fn as_str(self) -> &'static str {
        match self {
            UndecidedReason::StepsExhausted => "steps-exhausted",
            UndecidedReason::BitBudgetExhausted => "bit-budget-exhausted",
            UndecidedReason::FactorizationBudget => "factorization-budget",
        }
    }
}

/// Never claims the orbit is infinite; `Undecided` only reports budget
/// exhaustion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OrbitOutcome {
    Finite(OrbitCertificate),
    Undecided {
        reason: UndecidedReason,
        last_point: ProjectivePoint,
        steps: usize,
    },
}

/// Points from `start` up to the first repeat, with the index it repeats at.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitTrace {
    pub points: Vec<ProjectivePoint>,
    pub tail_length: usize,
}

impl OrbitTrace {
    pub fn period(&self) -> usize {
        self.points.len() - self.tail_length
    }
}

/// Iterates without factoring the resultant; the error carries the
/// `Undecided` fields.
pub fn trace_orbit(
    map: &RationalMap,
    start: &ProjectivePoint,
    budget: OrbitBudget,
) -> Result<OrbitTrace, (UndecidedReason, ProjectivePoint, usize)> {
    let mut seen: HashMap<ProjectivePoint, usize> = HashMap::new();
    let mut points = Vec::new();
    let mut current = start.clone();
    loop {
        if let Some(&first) = seen.get(&current) {
            return Ok(OrbitTrace {
                points,
                tail_length: first,
            });
        }
        if points.len() >= budget.max_steps {
            return Err((UndecidedReason::StepsExhausted, current, points.len()));
        }
        if current.bits() > budget.max_bits {
            return Err((UndecidedReason::BitBudgetExhausted, current, points.len()));
        }
        let next = map.evaluate(&current);
        seen.insert(current.clone(), points.len());
        points.push(current);
        current = next;
    }
}

/// Iterates from `start` until a point repeats or the budget runs out.
pub fn detect_orbit(map: &RationalMap, start: &ProjectivePoint, budget: OrbitBudget) -> OrbitOutcome {
    let undecided = |(reason, last_point, steps)| OrbitOutcome::Undecided {
        reason,
        last_point,
        steps,
    };
    let trace = match trace_orbit(map, start, budget) {
        Ok(t) => t,
        Err(e) => return undecided(e),
    };
    let bad_primes = match map.bad_primes() {
        Ok(b) => b,
        Err(DynamicsError::Arith(ArithError::FactorizationIncomplete { .. })) => {
            let last = trace.points.last().cloned().unwrap_or_else(|| start.clone());
            let steps = trace.points.len();
            return undecided((UndecidedReason::FactorizationBudget, last, steps));
        }
        Err(e) => panic!("unexpected error listing bad primes: {e}"),
    };
    let cert = OrbitCertificate {
        map: map.clone(),
        period: trace.period(),
        tail_length: trace.tail_length,
        points: trace.points,
        bad_primes,
    };
    debug_assert!(cert.verify().is_ok());
    OrbitOutcome::Finite(cert)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn finite(map: &str, start: &str) -> OrbitCertificate {
        let map = RationalMap::parse(map).unwrap();
        match detect_orbit(&map, &start.parse().unwrap(), OrbitBudget::default()) {
            OrbitOutcome::Finite(c) => c,
            other => panic!("expected a finite orbit, got {other:?}"),
        }
    }

    fn affine(points: &[ProjectivePoint]) -> Vec<String> {
        points.iter().map(|p| p.to_rational().unwrap().to_string()).collect()
    }

    #[test]
    fn z2_minus_1_from_1() {
        let c = finite("z^2-1", "1");
        assert_eq!((c.tail_length(), c.period()), (1, 2));
        assert_eq!(affine(c.points()), ["1", "0", "-1"]);
        assert!(c.bad_primes().is_empty());
        assert_eq!(c.s(), 1);
    }

    #[test]
    fn three_cycle() {
        let c = finite("z^2-29/16", "-1/4");
        assert_eq!((c.tail_length(), c.period()), (0, 3));
        assert_eq!(affine(c.points()), ["-1/4", "-7/4", "5/4"]);
        assert_eq!(c.bad_primes(), [Prime::from_u64(2).unwrap()]);
    }

    #[test]
    fn identity_fixes_everything() {
        let c = finite("z", "[5:7]");
        assert_eq!((c.tail_length(), c.period()), (0, 1));
    }

    #[test]
    fn wandering_point_is_undecided() {
        let map = RationalMap::parse("z^2+1").unwrap();
        let start = ProjectivePoint::from_i64s(1, 1).unwrap();
        let budget = OrbitBudget {
            max_steps: 10_000,
            max_bits: 64,
        };
        match detect_orbit(&map, &start, budget) {
            OrbitOutcome::Undecided { reason, .. } => assert_eq!(reason, UndecidedReason::BitBudgetExhausted),
            other => panic!("{other:?}"),
        }
        let budget = OrbitBudget {
            max_steps: 3,
            max_bits: 4096,
        };
        match detect_orbit(&map, &start, budget) {
            OrbitOutcome::Undecided { reason, steps, .. } => {
                assert_eq!(reason, UndecidedReason::StepsExhausted);
                assert_eq!(steps, 3);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn tampered_certificates_are_rejected() {
        let c = finite("z^2-1", "1");
        let map = c.map().clone();
        let pts = c.points().to_vec();
        assert!(OrbitCertificate::from_parts(map.clone(), pts.clone(), 1, 2).is_ok());
        assert!(OrbitCertificate::from_parts(map.clone(), pts.clone(), 0, 3).is_err());
        let mut doubled = pts.clone();
        doubled.extend(pts[1..].iter().cloned());
        // 0, -1, 0, -1 closes with period 4 but repeats points
        assert!(OrbitCertificate::from_parts(map, doubled, 1, 4).is_err());
    }
}
