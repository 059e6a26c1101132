//! The `orbita` command line.
//!
//! Exit status: 0 success, 2 parse error, 3 budget exhausted, 4 property
//! violation, 5 internal invariant breach.

pub mod json;

use std::ffi::OsString;
use std::io::Write;
use std::panic::{catch_unwind, AssertUnwindSafe};

use clap::{Args, Parser, Subcommand};
use num_bigint::BigUint;
use num_rational::BigRational;
use serde_json::{json, Value};

use crate::arith::{ArithError, PlaceSet, Prime};
use crate::bounds::{evaluate_bound_at, BoundFormula, DEFAULT_PRECISION};
use crate::dynamics::{detect_orbit, DynamicsError, OrbitBudget, OrbitOutcome, RationalMap};
use crate::projective::{log_distance, ProjectivePoint};
use crate::suites::{certificate_bounds, check_certificate, run_suite, Suite};
use crate::sunit::{count_three_term, solutions_csv, solve_unit_equation, two_way_representations, SUnitError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;
pub const EXIT_VIOLATION: i32 = 4;
pub const EXIT_INTERNAL: i32 = 5;

/// Environment variable overriding the bound precision in decimal digits.
pub const PRECISION_VAR: &str = "ORBITA_PRECISION";

/// Fault injection for exercising exit paths: `violation` makes `verify`
/// report a failure, `panic` makes it panic.
pub const FAULT_VAR: &str = "ORBITA_FAULT";

#[derive(Debug, Parser)]
#[command(name = "orbita", version, about = "Certified finite orbits of rational maps over Q")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Certify the orbit of a point and compare it with the bounds.
    Orbit {
        /// Rational function in `z`, e.g. `(z^2-1)/(2z)`.
        #[arg(long)]
        map: String,
        /// Start point: a rational, `n/d` or `inf`.
        #[arg(long, allow_hyphen_values = true)]
        point: String,
        #[arg(long, default_value_t = 10_000)]
        max_steps: usize,
        #[arg(long, default_value_t = 4096)]
        max_bits: u64,
        /// Print JSON instead of text.
        #[arg(long)]
        json: bool,
    },
    /// p-adic logarithmic distance of two points.
    Delta {
        /// A prime, or `inf`.
        #[arg(long)]
        p: String,
        #[arg(long, allow_hyphen_values = true)]
        a: String,
        #[arg(long, allow_hyphen_values = true)]
        b: String,
    },
    /// Resultant, its factorization and the bad primes of a map.
    Badprimes {
        #[arg(long)]
        map: String,
        /// Print JSON instead of text.
        #[arg(long)]
        json: bool,
    },
    /// Evaluate explicit bounds in log space.
    Bounds(BoundsArgs),
    /// Solutions of S-unit equations inside an exponent box.
    Sunit(SunitArgs),
    /// Randomized property suites.
    Verify {
        /// prop51, prop52, remark, divisibility or all.
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = 1000)]
        iterations: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Common place set of several maps and the resulting orbit bound.
    Semigroup {
        /// Generators, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        maps: Vec<String>,
        #[arg(long, allow_hyphen_values = true)]
        point: Option<String>,
        /// Print JSON instead of text.
        #[arg(long)]
        json: bool,
    },
}

#[derive(Debug, Args)]
struct BoundsArgs {
    /// Formula id, or `all`.
    #[arg(long, default_value = "all")]
    formula: String,
    /// `name=value` pairs: s, t, D, r, n.
    #[arg(long, value_delimiter = ',')]
    params: Vec<String>,
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Args)]
struct SunitArgs {
    /// Finite primes of S, comma separated; empty for S = {inf}.
    #[arg(long, value_delimiter = ',', default_value = "")]
    primes: Vec<String>,
    #[arg(long)]
    bound: u32,
    /// Coefficients of `a1 x1 + a2 x2 + a3 x3 = 1`.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    three_term: Option<Vec<String>>,
    /// List representations of this target as a sum of two units instead.
    #[arg(long, allow_hyphen_values = true)]
    target: Option<String>,
}

/// Error carrying its exit status.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn parse(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_PARSE,
            message: message.into(),
        }
    }
}

impl From<DynamicsError> for Failure {
    fn from(e: DynamicsError) -> Self {
        let code = match &e {
            DynamicsError::Syntax { .. }
            | DynamicsError::ZeroDenominator { .. }
            | DynamicsError::ConstantMap
            | DynamicsError::ZeroResultant
            | DynamicsError::DegreeMismatch(..) => EXIT_PARSE,
            DynamicsError::BitBudget { .. } | DynamicsError::Arith(ArithError::FactorizationIncomplete { .. }) => {
                EXIT_BUDGET
            }
            DynamicsError::ConditionFails { .. } | DynamicsError::NotFixed { .. } => EXIT_VIOLATION,
            _ => EXIT_INTERNAL,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<SUnitError> for Failure {
    fn from(e: SUnitError) -> Self {
        let code = match e {
            SUnitError::BoxTooLarge { .. } => EXIT_BUDGET,
            SUnitError::ZeroBound | SUnitError::ZeroCoefficient(_) => EXIT_PARSE,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

type Outcome = Result<(String, i32), Failure>;

/// Runs the command line, writing to `out` and `err`, and returns the exit
/// status.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_PARSE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK {
                out.write_all(text.as_bytes())
            } else {
                err.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let result = catch_unwind(AssertUnwindSafe(|| dispatch(cli.command)));
    match result {
        Ok(Ok((text, code))) => {
            let _ = out.write_all(text.as_bytes());
            code
        }
        Ok(Err(f)) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
        Err(panic) => {
            let why = panic
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            let _ = writeln!(err, "internal error: {why}");
            EXIT_INTERNAL
        }
    }
}

fn precision() -> Result<u32, Failure> {
    match std::env::var(PRECISION_VAR) {
        Err(_) => Ok(DEFAULT_PRECISION),
        Ok(v) => v
            .trim()
            .parse::<u32>()
            .ok()
            .filter(|d| (1..=10_000).contains(d))
            .ok_or_else(|| Failure::parse(format!("{PRECISION_VAR} must be an integer in 1..=10000, got {v:?}"))),
    }
}

fn parse_map(text: &str) -> Result<RationalMap, Failure> {
    RationalMap::parse(text).map_err(|e| Failure::parse(format!("map {text:?}: {e}")))
}

fn parse_point(text: &str) -> Result<ProjectivePoint, Failure> {
    text.parse().map_err(|e| Failure::parse(format!("{e}")))
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json");
    s.push('\n');
    s
}

fn dispatch(command: Command) -> Outcome {
    match command {
        Command::Orbit {
            map,
            point,
            max_steps,
            max_bits,
            json,
        } => orbit(&map, &point, OrbitBudget { max_steps, max_bits }, json),
        Command::Delta { p, a, b } => delta(&p, &a, &b),
        Command::Badprimes { map, json } => badprimes(&map, json),
        Command::Bounds(args) => bounds(&args),
        Command::Sunit(args) => sunit(&args),
        Command::Verify {
            suite,
            iterations,
            seed,
        } => {
            let suite: Suite = suite.parse().map_err(Failure::parse)?;
            let mut report = run_suite(suite, iterations, seed);
            match std::env::var(FAULT_VAR).as_deref() {
                Ok("violation") => {
                    report.suites[0].failures += 1;
                    report.suites[0].witnesses.push(format!("injected by {FAULT_VAR}"));
                }
                Ok("panic") => panic!("injected by {FAULT_VAR}"),
                _ => {}
            }
            let code = if report.passed() { EXIT_OK } else { EXIT_VIOLATION };
            Ok((report.to_json() + "\n", code))
        }
        Command::Semigroup { maps, point, json } => semigroup(&maps, point.as_deref(), json),
    }
}

/// Certificate JSON and whether every check and bound held.
fn certify(
    map: &RationalMap,
    start: &ProjectivePoint,
    budget: OrbitBudget,
    digits: u32,
) -> Result<(Value, bool), Value> {
    match detect_orbit(map, start, budget) {
        OrbitOutcome::Finite(cert) => {
            let checks = check_certificate(&cert, budget.max_bits);
            let bounds = certificate_bounds(&cert, digits);
            let doc = json::certificate(&cert, &checks, &bounds);
            // the encoding must reproduce the certificate
            let back =
                json::parse_certificate(&doc).unwrap_or_else(|e| panic!("certificate JSON does not round-trip: {e}"));
            assert_eq!(back, cert, "certificate JSON does not round-trip");
            Ok((doc, !checks.any_failure() && bounds.satisfied()))
        }
        OrbitOutcome::Undecided {
            reason,
            last_point,
            steps,
        } => Err(json!({
            "schema": crate::SCHEMA,
            "outcome": "undecided",
            "reason": reason.as_str(),
            "last_point": json::point(&last_point),
            "steps": json::int(steps),
        })),
    }
}

fn orbit_text(doc: &Value) -> String {
    let s = |v: &Value| v.as_str().unwrap_or_default().to_string();
    let pts = |v: &Value| -> String {
        v.as_array()
            .map(|a| {
                a.iter()
                    .map(|p| format!("[{}:{}]", s(&p[0]), s(&p[1])))
                    .collect::<Vec<_>>()
                    .join(" ")
            })
            .unwrap_or_default()
    };
    if doc.get("outcome").is_some() {
        return format!(
            "undecided ({}) after {} steps at [{}:{}]\n",
            s(&doc["reason"]),
            s(&doc["steps"]),
            s(&doc["last_point"][0]),
            s(&doc["last_point"][1])
        );
    }
    let bad: Vec<String> = doc["bad_primes"].as_array().into_iter().flatten().map(s).collect();
    let mut out = String::new();
    out.push_str(&format!(
        "tail length m = {}, period n = {}\n",
        s(&doc["tail_length"]),
        s(&doc["period"])
    ));
    out.push_str(&format!("points: {}\n", pts(&doc["points"])));
    out.push_str(&format!(
        "bad primes: {}\ns = {}\n",
        if bad.is_empty() {
            "none".to_string()
        } else {
            bad.join(", ")
        },
        s(&doc["s"])
    ));
    for name in ["prop51", "prop52", "remark", "divisibility"] {
        let c = &doc["checks"][name];
        out.push_str(&format!(
            "check {name}: {} ({} inequalities)\n",
            s(&c["status"]),
            s(&c["checks"])
        ));
        if let Some(d) = c.get("detail") {
            out.push_str(&format!("  {}\n", s(d)));
        }
    }
    let b = &doc["bounds"];
    out.push_str(&format!(
        "ln c(s) <= {}: {}\n",
        s(&b["ln_c_s"]),
        s(&b["length_verdict"])
    ));
    out.push_str(&format!(
        "ln {} <= {}: {}\n",
        s(&b["period_bound"]),
        s(&b["ln_ms"]),
        s(&b["period_verdict"])
    ));
    out
}

fn orbit(map: &str, point: &str, budget: OrbitBudget, as_json: bool) -> Outcome {
    let digits = precision()?;
    let map = parse_map(map)?;
    let start = parse_point(point)?;
    let (doc, code) = match certify(&map, &start, budget, digits) {
        Ok((doc, ok)) => (doc, if ok { EXIT_OK } else { EXIT_VIOLATION }),
        Err(doc) => (doc, EXIT_BUDGET),
    };
    Ok((if as_json { pretty(&doc) } else { orbit_text(&doc) }, code))
}

fn delta(p: &str, a: &str, b: &str) -> Outcome {
    let p: BigUint = p
        .trim()
        .parse()
        .map_err(|_| Failure::parse(format!("--p {p:?} is not an integer")))?;
    let p = Prime::new(p).map_err(|e| Failure::parse(e.to_string()))?;
    let (a, b) = (parse_point(a)?, parse_point(b)?);
    Ok((format!("{}\n", log_distance(&a, &b, &p)), EXIT_OK))
}

fn badprimes(map: &str, as_json: bool) -> Outcome {
    let map = parse_map(map)?;
    let fact = map.resultant_factorization()?;
    let primes: Vec<Prime> = fact.primes().cloned().collect();
    let text = if as_json {
        pretty(&json!({
            "schema": crate::SCHEMA,
            "map": json::map(&map),
            "resultant": json::int(map.resultant()),
            "factorization": json::factorization(&fact),
            "bad_primes": json::primes(&primes),
        }))
    } else {
        let list: Vec<String> = primes.iter().map(ToString::to_string).collect();
        format!(
            "map: {map}\nresultant: {}\nfactorization: {fact}\nbad primes: {}\n",
            map.resultant(),
            if list.is_empty() {
                "none".to_string()
            } else {
                list.join(", ")
            }
        )
    };
    Ok((text, EXIT_OK))
}

const FORMULA_IDS: [&str; 10] = [
    "canci-c",
    "morton-silverman",
    "pezda-br",
    "narkiewicz-pezda-orbit",
    "beukers-schlickewei",
    "ess",
    "np-tail",
    "k-run",
    "two-ways-ideals",
    "pgl2-order",
];

fn formula(id: &str, param: &dyn Fn(&str, u64) -> u64) -> Result<BoundFormula, Failure> {
    Ok(match id {
        "canci-c" => BoundFormula::CanciC { s: param("s", 1) },
        "morton-silverman" => BoundFormula::MortonSilverman {
            t: param("t", 1),
            degree: param("D", 1),
        },
        "pezda-br" => BoundFormula::PezdaBR {
            s: param("s", 1),
            degree: param("D", 1),
        },
        "narkiewicz-pezda-orbit" => BoundFormula::NarkiewiczPezdaOrbit {
            s: param("s", 1),
            degree: param("D", 1),
        },
        "beukers-schlickewei" => BoundFormula::BeukersSchlickewei { r: param("r", 1) },
        "ess" => BoundFormula::Ess {
            n: param("n", 3),
            r: param("r", 1),
        },
        "np-tail" => BoundFormula::NpTail { s: param("s", 1) },
        "k-run" => BoundFormula::KRun { s: param("s", 1) },
        "two-ways-ideals" => BoundFormula::TwoWaysIdeals { s: param("s", 1) },
        "pgl2-order" => BoundFormula::Pgl2Order { degree: param("D", 1) },
        _ => {
            return Err(Failure::parse(format!(
                "unknown formula {id:?}; known: {}",
                FORMULA_IDS.join(", ")
            )))
        }
    })
}

fn bounds(args: &BoundsArgs) -> Outcome {
    let digits = precision()?;
    let mut params: Vec<(String, u64)> = Vec::new();
    for p in args.params.iter().filter(|p| !p.is_empty()) {
        let (k, v) = p
            .split_once('=')
            .ok_or_else(|| Failure::parse(format!("parameter {p:?} is not name=value")))?;
        if !["s", "t", "D", "r", "n"].contains(&k) {
            return Err(Failure::parse(format!("unknown parameter {k:?}")));
        }
        let v: u64 = v
            .parse()
            .ok()
            .filter(|v| *v <= 1 << 20)
            .ok_or_else(|| Failure::parse(format!("parameter {k} must be an integer up to 2^20")))?;
        params.push((k.to_string(), v));
    }
    let param = |name: &str, default: u64| {
        params
            .iter()
            .rev()
            .find(|(k, _)| k == name)
            .map_or(default, |(_, v)| *v)
    };
    let ids: Vec<&str> = if args.formula == "all" {
        FORMULA_IDS.to_vec()
    } else {
        vec![args.formula.as_str()]
    };
    let mut values = Vec::new();
    for id in ids {
        let f = formula(id, &param)?;
        values.push(evaluate_bound_at(f, digits).map_err(|e| Failure::parse(format!("{f}: {e}")))?);
    }
    let text = if args.json {
        pretty(&json!({
            "schema": crate::SCHEMA,
            "bounds": values.iter().map(json::bound).collect::<Vec<_>>(),
        }))
    } else {
        let mut out = String::new();
        for v in &values {
            out.push_str(&format!("{}\n  value     {}\n", v.formula, v.exact_form));
            if let Some(e) = &v.exact {
                out.push_str(&format!("  exact     {e}\n"));
            }
            out.push_str(&format!(
                "  ln upper  {}\n  ln lower  {}\n  magnitude {}\n",
                v.ln_upper,
                v.ln_lower,
                v.magnitude()
            ));
        }
        out
    };
    Ok((text, EXIT_OK))
}

fn parse_places(primes: &[String]) -> Result<PlaceSet, Failure> {
    let mut out = Vec::new();
    for p in primes.iter().map(|p| p.trim()).filter(|p| !p.is_empty()) {
        let n: BigUint = p
            .parse()
            .map_err(|_| Failure::parse(format!("{p:?} is not an integer")))?;
        out.push(Prime::new(n).map_err(|e| Failure::parse(e.to_string()))?);
    }
    Ok(PlaceSet::new(out))
}

fn parse_rational(text: &str) -> Result<BigRational, Failure> {
    let t = text.trim().replace('\u{2212}', "-");
    let value = match t.split_once('/') {
        Some((n, d)) => {
            let (n, d) = (n.trim().parse(), d.trim().parse());
            match (n, d) {
                (Ok(n), Ok(d)) if d != num_bigint::BigInt::from(0) => Some(BigRational::new(n, d)),
                _ => None,
            }
        }
        None => t.parse().ok().map(BigRational::from_integer),
    };
    value.ok_or_else(|| Failure::parse(format!("{text:?} is not a rational number")))
}

fn summary(
    count: usize,
    rank: u64,
    bound: &crate::bounds::BoundValue,
    verdict: crate::bounds::Verdict,
    places: &PlaceSet,
    b: u32,
) -> Value {
    json!({
        "schema": crate::SCHEMA,
        "count": json::int(count),
        "rank": json::int(rank),
        "ln_bound": bound.ln_upper.to_string(),
        "bound": json::bound(bound),
        "verdict": json::verdict(verdict),
        "box": { "places": places.to_string(), "exponent_bound": json::int(b), "scope": "within box" },
    })
}

fn sunit(args: &SunitArgs) -> Outcome {
    let places = parse_places(&args.primes)?;
    if let Some(target) = &args.target {
        let t = parse_rational(target)?;
        let r = two_way_representations(&t, &places, args.bound)?;
        let mut out = solutions_csv(&r.representations);
        out.push('\n');
        out.push_str(&pretty(&json!({
            "schema": crate::SCHEMA,
            "target": t.to_string(),
            "count": json::int(r.representations.len()),
            "essentially_different": r.essentially_different(),
            "box": { "places": places.to_string(), "exponent_bound": json::int(args.bound), "scope": "within box" },
        })));
        return Ok((out, EXIT_OK));
    }
    if let Some(coeffs) = &args.three_term {
        let a: Vec<BigRational> = coeffs.iter().map(|c| parse_rational(c)).collect::<Result<_, _>>()?;
        let a: [BigRational; 3] = a
            .try_into()
            .map_err(|_| Failure::parse("--three-term takes exactly three coefficients"))?;
        let r = count_three_term(&places, &a, args.bound)?;
        let mut out = String::from("x1_num,x1_den,x2_num,x2_den,x3_num,x3_den\n");
        for x in &r.solutions {
            let cells: Vec<String> = x
                .iter()
                .flat_map(|v| [v.numer().to_string(), v.denom().to_string()])
                .collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out.push('\n');
        out.push_str(&pretty(&summary(
            r.solutions.len(),
            r.rank,
            &r.bound,
            r.verdict,
            &places,
            args.bound,
        )));
        let code = if r.verdict == crate::bounds::Verdict::Violated {
            EXIT_VIOLATION
        } else {
            EXIT_OK
        };
        return Ok((out, code));
    }
    let r = solve_unit_equation(&places, args.bound)?;
    let mut out = solutions_csv(&r.solutions);
    out.push('\n');
    out.push_str(&pretty(&summary(
        r.solutions.len(),
        r.rank,
        &r.bound,
        r.verdict,
        &places,
        args.bound,
    )));
    let code = if r.verdict == crate::bounds::Verdict::Violated {
        EXIT_VIOLATION
    } else {
        EXIT_OK
    };
    Ok((out, code))
}

fn semigroup(maps: &[String], point: Option<&str>, as_json: bool) -> Outcome {
    let digits = precision()?;
    let parsed: Vec<RationalMap> = maps.iter().map(|m| parse_map(m)).collect::<Result<_, _>>()?;
    let start = point.map(parse_point).transpose()?;
    let mut union: Vec<Prime> = Vec::new();
    let mut generators = Vec::new();
    for (text, map) in maps.iter().zip(&parsed) {
        let bad = map.bad_primes()?;
        union.extend(bad.iter().cloned());
        generators.push(json!({ "expression": text, "map": json::map(map), "bad_primes": json::primes(&bad) }));
    }
    union.sort();
    union.dedup();
    let s = 1 + union.len() as u64;
    let c_s = evaluate_bound_at(BoundFormula::CanciC { s }, digits).expect("s >= 1");
    let mut code = EXIT_OK;
    let mut orbits = Vec::new();
    if let Some(p) = &start {
        for map in &parsed {
            match certify(map, p, OrbitBudget::default(), digits) {
                Ok((doc, ok)) => {
                    if !ok {
                        code = EXIT_VIOLATION;
                    }
                    orbits.push(doc);
                }
                Err(doc) => {
                    if code == EXIT_OK {
                        code = EXIT_BUDGET;
                    }
                    orbits.push(doc);
                }
            }
        }
    }
    let doc = json!({
        "schema": crate::SCHEMA,
        "generators": generators,
        "bad_primes": json::primes(&union),
        "s": json::int(s),
        "ln_c_s": json::bound(&c_s),
        "orbits": orbits,
    });
    let text = if as_json {
        pretty(&doc)
    } else {
        let list: Vec<String> = union.iter().map(ToString::to_string).collect();
        let mut out = format!(
            "union of bad primes: {}\ns = {s}\nln c(s) <= {} ({})\n",
            if list.is_empty() {
                "none".to_string()
            } else {
                list.join(", ")
            },
            c_s.ln_upper,
            c_s.magnitude()
        );
        for (text, o) in maps.iter().zip(&orbits) {
            out.push_str(&format!("orbit under {text}:\n"));
            for line in orbit_text(o).lines() {
                out.push_str(&format!("  {line}\n"));
            }
        }
        out
    };
    Ok((text, code))
}
