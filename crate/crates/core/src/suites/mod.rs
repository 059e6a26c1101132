//! Seeded randomized property suites and the regression corpus.
//!
//! Iteration `i` of a suite draws from its own ChaCha stream, so reports
//! depend only on the seed and iteration count, not on thread scheduling.

mod checks;

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::bounds::{compare_u64, evaluate_bound, BoundFormula, BoundValue, Verdict};
use crate::dynamics::{
    detect_orbit, synthesize_map, tail_divisibility, trace_orbit, OrbitBudget, OrbitCertificate, OrbitOutcome,
    RationalMap,
};
use crate::projective::{Excluded, ProjectivePoint};

pub use checks::{
    check_certificate, non_expansion, orbit_non_expansion, pipeline, remark, triangle, CertificateChecks, CheckOutcome,
    CheckStatus,
};

/// Maps with known finite orbits and the starting points used for them.
pub const REGRESSION_CORPUS: &[(&str, &[&str])] = &[
    ("z^2-1", &["1", "0", "-1", "inf"]),
    ("z^2-29/16", &["-1/4", "1/4", "7/4", "-5/4"]),
    ("z^2", &["1", "0", "-1", "inf"]),
    ("z^2-2", &["2", "-2", "0", "1"]),
    ("z^2-21/16", &["1/4", "-7/4", "-1/4"]),
    ("1/(1-z)", &["2", "0"]),
    ("-1/z", &["2"]),
    ("z", &["[5:7]"]),
    ("z^2-3/4", &["-3/2"]),
];

/// Certificates for every corpus entry.
pub fn corpus_certificates() -> Vec<OrbitCertificate> {
    REGRESSION_CORPUS
        .iter()
        .flat_map(|(map, starts)| {
            let map = RationalMap::parse(map).expect("corpus map parses");
            starts.iter().map(move |s| {
                let start: ProjectivePoint = s.parse().expect("corpus point parses");
                match detect_orbit(&map, &start, OrbitBudget::default()) {
                    OrbitOutcome::Finite(c) => c,
                    other => panic!("corpus orbit of {s} is not finite: {other:?}"),
                }
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Suite {
    Prop51,
    Prop52,
    Remark,
    Divisibility,
    All,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Prop51 => "prop51",
            Suite::Prop52 => "prop52",
            Suite::Remark => "remark",
            Suite::Divisibility => "divisibility",
            Suite::All => "all",
        }
    }

    fn members(self) -> Vec<Suite> {
        match self {
            Suite::All => vec![Suite::Prop51, Suite::Prop52, Suite::Remark, Suite::Divisibility],
            s => vec![s],
        }
    }

    fn stream_base(self) -> u64 {
        let index = match self {
            Suite::Prop51 => 1,
            Suite::Prop52 => 2,
            Suite::Remark => 3,
            Suite::Divisibility => 4,
            Suite::All => 0,
        };
        index << 40
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "prop51" => Ok(Suite::Prop51),
            "prop52" => Ok(Suite::Prop52),
            "remark" => Ok(Suite::Remark),
            "divisibility" => Ok(Suite::Divisibility),
            "all" => Ok(Suite::All),
            _ => Err(format!("unknown suite {s:?}")),
        }
    }
}

fn decimal<S: serde::Serializer>(v: &u64, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

/// Only the first few witnesses are kept; `failures` counts all of them.
const MAX_WITNESSES: usize = 10;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    #[serde(serialize_with = "decimal")]
    pub iterations: u64,
    /// Cases actually checked (corpus entries included).
    #[serde(serialize_with = "decimal")]
    pub cases: u64,
    /// Individual inequalities decided.
    #[serde(serialize_with = "decimal")]
    pub checks: u64,
    #[serde(serialize_with = "decimal")]
    pub skipped: u64,
    #[serde(serialize_with = "decimal")]
    pub failures: u64,
    pub witnesses: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub schema: &'static str,
    #[serde(serialize_with = "decimal")]
    pub seed: u64,
    #[serde(serialize_with = "decimal")]
    pub iterations: u64,
    pub suites: Vec<SuiteReport>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.suites.iter().all(|s| s.failures == 0)
    }

    /// Pretty JSON with fixed key order.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

enum CaseResult {
    Checked(CheckOutcome, String),
    Skipped,
}

fn rng_for(suite: Suite, seed: u64, iteration: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(suite.stream_base() + iteration);
    rng
}

fn random_int(rng: &mut ChaCha8Rng, bits: u32) -> BigInt {
    let bits = rng.gen_range(1..=bits);
    let mag: u64 = if bits == 64 {
        rng.gen()
    } else {
        rng.gen::<u64>() & ((1u64 << bits) - 1)
    };
    let v = BigInt::from(mag);
    if rng.gen() {
        -v
    } else {
        v
    }
}

/// Random canonical point with coordinates of at most `bits` bits.
fn random_point(rng: &mut ChaCha8Rng, bits: u32) -> ProjectivePoint {
    loop {
        if rng.gen_ratio(1, 64) {
            return ProjectivePoint::infinity();
        }
        let x = random_int(rng, bits);
        let y = random_int(rng, bits);
        if let Ok(p) = ProjectivePoint::new(x, y) {
            return p;
        }
    }
}

const SMALL_PRIMES: [u64; 8] = [2, 3, 5, 7, 11, 13, 101, 65537];

/// `P + p^k (u, v)` for a random small prime, so the pair is p-adically
/// close by construction.
fn nearby(rng: &mut ChaCha8Rng, p: &ProjectivePoint, bits: u32) -> ProjectivePoint {
    loop {
        let prime = BigInt::from(SMALL_PRIMES[rng.gen_range(0..SMALL_PRIMES.len())]);
        let shift = prime.pow(rng.gen_range(1..=12));
        let u = random_int(rng, bits / 2);
        let v = random_int(rng, bits / 2);
        if let Ok(q) = ProjectivePoint::new(p.x() + &shift * u, p.y() + &shift * v) {
            if &q != p {
                return q;
            }
        }
    }
}

fn random_triple(rng: &mut ChaCha8Rng) -> Vec<ProjectivePoint> {
    let p1 = random_point(rng, 64);
    if rng.gen_bool(0.5) {
        return vec![p1, random_point(rng, 64), random_point(rng, 64)];
    }
    let p2 = nearby(rng, &p1, 40);
    let p3 = if rng.gen() {
        nearby(rng, &p1, 40)
    } else {
        nearby(rng, &p2, 40)
    };
    vec![p1, p2, p3]
}

fn random_map(rng: &mut ChaCha8Rng, max_degree: usize, bits: u32) -> RationalMap {
    loop {
        let d = rng.gen_range(1..=max_degree);
        let mut coeffs = || (0..=d).map(|_| random_int(rng, bits)).collect::<Vec<_>>();
        let (f, g) = (coeffs(), coeffs());
        if let Ok(m) = RationalMap::new(crate::arith::BinaryForm::new(f), crate::arith::BinaryForm::new(g)) {
            return m;
        }
    }
}

fn prop51_case(rng: &mut ChaCha8Rng) -> CaseResult {
    let points = random_triple(rng);
    let label = format!("{} {} {}", points[0], points[1], points[2]);
    CaseResult::Checked(triangle(&points), label)
}

fn prop52_case(rng: &mut ChaCha8Rng) -> CaseResult {
    let map = random_map(rng, 3, 8);
    let p = random_point(rng, 32);
    let q = if rng.gen() {
        nearby(rng, &p, 24)
    } else {
        random_point(rng, 32)
    };
    let label = format!("map {} points {p} {q}", map.to_expression());
    CaseResult::Checked(non_expansion(&map, &p, &q), label)
}

/// Distinct points with small coordinates, avoiding `[0:1]`.
fn small_points(rng: &mut ChaCha8Rng, count: usize) -> Vec<ProjectivePoint> {
    let mut out: Vec<ProjectivePoint> = Vec::with_capacity(count);
    while out.len() < count {
        let x = BigInt::from(rng.gen_range(-24i64..=24));
        let y = BigInt::from(rng.gen_range(0i64..=12));
        if let Ok(p) = ProjectivePoint::new(x, y) {
            if p != ProjectivePoint::origin() && !out.contains(&p) {
                out.push(p);
            }
        }
    }
    out
}

/// A map with a prescribed orbit of tail `m` and period `n`.
fn synthesized_orbit(rng: &mut ChaCha8Rng) -> Option<(RationalMap, Vec<ProjectivePoint>, usize, usize)> {
    let d = rng.gen_range(2..=3usize);
    let len = rng.gen_range(2..=2 * d + 1);
    let n = rng.gen_range(1..=len);
    let m = len - n;
    let points = small_points(rng, len);
    let pairs: Vec<_> = (0..len)
        .map(|i| {
            let next = if i + 1 < len { i + 1 } else { m };
            (points[i].clone(), points[next].clone())
        })
        .collect();
    let map = synthesize_map(&pairs, d)?;
    Some((map, points, m, n))
}

fn remark_case(rng: &mut ChaCha8Rng) -> CaseResult {
    let Some((map, points, m, n)) = synthesized_orbit(rng) else {
        return CaseResult::Skipped;
    };
    let trace = trace_orbit(&map, &points[0], OrbitBudget::default()).expect("prescribed orbit closes");
    assert_eq!(
        (trace.tail_length, trace.period()),
        (m, n),
        "synthesized orbit has its prescribed shape"
    );
    let label = format!("map {} orbit of {} (m = {m}, n = {n})", map.to_expression(), points[0]);
    CaseResult::Checked(remark(&points, m, n, map.resultant().magnitude()), label)
}

fn divisibility_case(rng: &mut ChaCha8Rng) -> CaseResult {
    let d = rng.gen_range(2..=3usize);
    let k = rng.gen_range(3..=2 * d);
    let mut tail = small_points(rng, k);
    tail.push(ProjectivePoint::origin());
    let mut pairs: Vec<_> = tail.windows(2).map(|w| (w[0].clone(), w[1].clone())).collect();
    pairs.push((ProjectivePoint::origin(), ProjectivePoint::origin()));
    let Some(map) = synthesize_map(&pairs, d) else {
        return CaseResult::Skipped;
    };
    let trace = trace_orbit(&map, &tail[0], OrbitBudget::default()).expect("prescribed tail closes");
    assert_eq!((trace.tail_length, trace.period()), (k, 1));
    let label = format!("map {} tail from {}", map.to_expression(), tail[0]);
    let excluded = Excluded::DivisorsOf(map.resultant().magnitude().clone());
    let report = tail_divisibility(&tail, &excluded).expect("tail ends at [0:1]");
    let outcome = match report.witness {
        None => CheckOutcome {
            checks: report.steps_checked as u64,
            status: CheckStatus::Passed,
        },
        Some(w) => CheckOutcome {
            checks: report.steps_checked as u64,
            status: CheckStatus::Failed(format!("valuation drops at {w}")),
        },
    };
    CaseResult::Checked(outcome, label)
}

fn corpus_cases() -> Vec<(CheckOutcome, String)> {
    corpus_certificates()
        .iter()
        .map(|c| {
            let label = format!("corpus {} from {}", c.map().to_expression(), c.start());
            (
                remark(c.points(), c.tail_length(), c.period(), c.map().resultant().magnitude()),
                label,
            )
        })
        .collect()
}

fn run_one(suite: Suite, iterations: u64, seed: u64) -> SuiteReport {
    let case = match suite {
        Suite::Prop51 => prop51_case,
        Suite::Prop52 => prop52_case,
        Suite::Remark => remark_case,
        Suite::Divisibility => divisibility_case,
        Suite::All => unreachable!("expanded by the caller"),
    };
    let results: Vec<CaseResult> = (0..iterations)
        .into_par_iter()
        .map(|i| case(&mut rng_for(suite, seed, i)))
        .collect();
    let mut report = SuiteReport {
        suite: suite.name().to_string(),
        iterations,
        cases: 0,
        checks: 0,
        skipped: 0,
        failures: 0,
        witnesses: Vec::new(),
    };
    let record = |outcome: CheckOutcome, label: String, report: &mut SuiteReport| {
        report.cases += 1;
        report.checks += outcome.checks;
        match outcome.status {
            CheckStatus::Passed => {}
            CheckStatus::Skipped(_) => report.skipped += 1,
            CheckStatus::Failed(why) => {
                report.failures += 1;
                if report.witnesses.len() < MAX_WITNESSES {
                    report.witnesses.push(format!("{label}: {why}"));
                }
            }
        }
    };
    if suite == Suite::Remark {
        for (outcome, label) in corpus_cases() {
            record(outcome, label, &mut report);
        }
    }
    for (i, r) in results.into_iter().enumerate() {
        match r {
            CaseResult::Checked(outcome, label) => record(outcome, format!("iteration {i}, {label}"), &mut report),
            CaseResult::Skipped => report.skipped += 1,
        }
    }
    report
}

/// Runs `suite` (or all four) for `iterations` draws each.
pub fn run_suite(suite: Suite, iterations: u64, seed: u64) -> VerifyReport {
    VerifyReport {
        schema: crate::SCHEMA,
        seed,
        iterations,
        suites: suite
            .members()
            .into_iter()
            .map(|s| run_one(s, iterations, seed))
            .collect(),
    }
}

/// Bound comparisons attached to a certificate.
#[derive(Debug, Clone)]
pub struct CertificateBounds {
    pub c_s: BoundValue,
    pub length_verdict: Verdict,
    /// Morton-Silverman for degree at least 2, else the PGL_2 order bound.
    pub period_bound: BoundValue,
    pub period_verdict: Verdict,
}

impl CertificateBounds {
    pub fn satisfied(&self) -> bool {
        self.length_verdict == Verdict::Satisfied && self.period_verdict == Verdict::Satisfied
    }
}

pub fn certificate_bounds(cert: &OrbitCertificate, digits: u32) -> CertificateBounds {
    let eval = |f| crate::bounds::evaluate_bound_at(f, digits).expect("positive parameters");
    let c_s = eval(BoundFormula::CanciC { s: cert.s() as u64 });
    let length = (cert.tail_length() + cert.period()) as u64;
    let period_bound = if cert.map().degree() >= 2 {
        eval(BoundFormula::MortonSilverman {
            t: cert.bad_primes().len() as u64,
            degree: 1,
        })
    } else {
        eval(BoundFormula::Pgl2Order { degree: 1 })
    };
    CertificateBounds {
        length_verdict: compare_u64(length, &c_s),
        period_verdict: compare_u64(cert.period() as u64, &period_bound),
        c_s,
        period_bound,
    }
}

/// `ln c(s)` at the default precision, for reports that only need one value.
pub fn ln_c(s: u64) -> BoundValue {
    evaluate_bound(BoundFormula::CanciC { s }).expect("s >= 1")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_runs_pass() {
        let r = run_suite(Suite::All, 40, 7);
        assert!(r.passed(), "{}", r.to_json());
        assert_eq!(r.suites.len(), 4);
        for s in &r.suites {
            assert!(s.checks > 0, "{} checked nothing", s.suite);
        }
    }

    #[test]
    fn reports_depend_only_on_the_seed() {
        assert_eq!(run_suite(Suite::Prop52, 30, 11), run_suite(Suite::Prop52, 30, 11));
        assert_ne!(run_suite(Suite::Prop51, 30, 11), run_suite(Suite::Prop51, 30, 12));
    }

    #[test]
    fn corpus_certificates_pass_every_check() {
        let certs = corpus_certificates();
        assert_eq!(
            certs.len(),
            REGRESSION_CORPUS.iter().map(|(_, s)| s.len()).sum::<usize>()
        );
        for c in &certs {
            let checks = check_certificate(c, 4096);
            assert!(!checks.any_failure(), "{} from {}: {checks:?}", c.map(), c.start());
            assert_eq!(checks.divisibility.status, CheckStatus::Passed);
            assert!(certificate_bounds(c, 30).satisfied());
        }
    }

    #[test]
    fn suite_names_round_trip() {
        for s in [
            Suite::Prop51,
            Suite::Prop52,
            Suite::Remark,
            Suite::Divisibility,
            Suite::All,
        ] {
            assert_eq!(s.name().parse::<Suite>(), Ok(s));
        }
        assert!("prop53".parse::<Suite>().is_err());
    }
}
