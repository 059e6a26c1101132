use std::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::primes::{is_prime, small_primes, Prime, TRIAL_LIMIT};
use super::ArithError;

/// Limits that keep factorization from hanging on adversarial inputs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FactorBudget {
    /// Inputs wider than this are refused outright.
    pub max_bits: u64,
    /// Total Pollard-Brent iterations spent on one input.
    pub max_rho_iterations: u64,
}

impl Default for FactorBudget {
    fn default() -> Self {
        FactorBudget {
            max_bits: 4096,
            max_rho_iterations: 1 << 22,
        }
    }
}

/// `sign * prod(p^e)` with strictly increasing primes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    pub sign: i8,
    pub factors: Vec<(Prime, u32)>,
}

impl Factorization {
    pub fn primes(&self) -> impl Iterator<Item = &Prime> {
        self.factors.iter().map(|(p, _)| p)
    }

    pub fn recompose(&self) -> BigInt {
        let magnitude = self
            .factors
            .iter()
            .fold(BigUint::one(), |acc, (p, e)| acc * p.value().pow(*e));
        let n = BigInt::from(magnitude);
        if self.sign < 0 {
            -n
        } else {
            n
        }
    }

    fn from_parts(sign: i8, mut found: Vec<BigUint>) -> Self {
        found.sort();
        let mut factors: Vec<(Prime, u32)> = Vec::new();
        for p in found {
            match factors.last_mut() {
                Some((q, e)) if q.value() == &p => *e += 1,
                _ => factors.push((Prime::trusted(p), 1)),
            }
        }
        Factorization { sign, factors }
    }
}

impl fmt::Display for Factorization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.sign < 0 {
            write!(f, "-")?;
        }
        if self.factors.is_empty() {
            return write!(f, "1");
        }
        for (i, (p, e)) in self.factors.iter().enumerate() {
            if i > 0 {
                write!(f, " * ")?;
            }
            if *e == 1 {
                write!(f, "{p}")?;
            } else {
                write!(f, "{p}^{e}")?;
            }
        }
        Ok(())
    }
}

/// Complete factorization under the default budget.
pub fn factor(n: &BigInt) -> Result<Factorization, ArithError> {
    factor_with(n, FactorBudget::default())
}

/// Trial division below one million, then Pollard-Brent with seeds
/// `c = 1, 2, ...`. Exhausting the budget is an error carrying the
/// unfactored part; it never returns a partial answer as complete.
pub fn factor_with(n: &BigInt, budget: FactorBudget) -> Result<Factorization, ArithError> {
    if n.is_zero() {
        return Err(ArithError::FactorZero);
    }
    let sign = if n.sign() == Sign::Minus { -1 } else { 1 };
    let mut rest = n.abs().to_biguint().expect("absolute value");
    if rest.bits() > budget.max_bits {
        return Err(ArithError::FactorizationIncomplete {
            cofactor: BigInt::from(rest.clone()),
            reason: format!("{} bits exceeds budget of {}", rest.bits(), budget.max_bits),
            partial: Factorization {
                sign,
                factors: Vec::new(),
            },
        });
    }

    let mut found = Vec::new();
    for &p in small_primes() {
        let p_big = BigUint::from(p);
        if &p_big * &p_big > rest {
            break;
        }
        while (&rest % p).is_zero() {
            rest /= p;
            found.push(p_big.clone());
        }
    }
    let limit = BigUint::from(TRIAL_LIMIT);
    if !rest.is_one() && rest < &limit * &limit {
        // every composite below TRIAL_LIMIT^2 has a factor in the table
        found.push(std::mem::take(&mut rest));
        rest = BigUint::one();
    }

    let mut spent = 0u64;
    let mut stack = vec![rest];
    let mut stuck = Vec::new();
    while let Some(m) = stack.pop() {
        if m.is_one() {
            continue;
        }
        if is_prime(&m) {
            found.push(m);
            continue;
        }
        match split(&m, budget.max_rho_iterations.saturating_sub(spent), &mut spent) {
            Some(d) => {
                let other = &m / &d;
                stack.push(d);
                stack.push(other);
            }
            None => stuck.push(m),
        }
    }

    if stuck.is_empty() {
        return Ok(Factorization::from_parts(sign, found));
    }
    let cofactor = stuck.iter().fold(BigUint::one(), |acc, m| acc * m);
    Err(ArithError::FactorizationIncomplete {
        cofactor: BigInt::from(cofactor),
        reason: format!("rho iteration budget of {} exhausted", budget.max_rho_iterations),
        partial: Factorization::from_parts(sign, found),
    })
}

/// Finds a nontrivial divisor of the odd composite `n`, or gives up once
/// `allowance` iterations are used.
fn split(n: &BigUint, allowance: u64, spent: &mut u64) -> Option<BigUint> {
    let start = *spent;
    let mut c = BigUint::one();
    while *spent - start < allowance {
        let left = allowance - (*spent - start);
        if let Some(d) = brent(n, &c, left, spent) {
            return Some(d);
        }
        c += 1u32;
    }
    None
}

/// Brent's cycle-finding variant of Pollard rho on `x -> x^2 + c mod n`,
/// batching 128 differences per gcd.
fn brent(n: &BigUint, c: &BigUint, allowance: u64, spent: &mut u64) -> Option<BigUint> {
    const BATCH: u64 = 128;
    let step = |x: &BigUint| (x * x + c) % n;
    let start = *spent;
    let mut y = BigUint::from(2u32);
    let mut r = 1u64;
    let mut q = BigUint::one();
    let mut x = y.clone();
    let mut ys = y.clone();
    let mut g = BigUint::one();
    while g.is_one() {
        x = y.clone();
        for _ in 0..r {
            y = step(&y);
        }
        *spent += r;
        let mut k = 0;
        while k < r && g.is_one() {
            ys = y.clone();
            let batch = BATCH.min(r - k);
            for _ in 0..batch {
                y = step(&y);
                q = (q * abs_diff(&x, &y)) % n;
            }
            *spent += batch;
            g = q.gcd(n);
            k += batch;
        }
        r *= 2;
        if *spent - start >= allowance {
            break;
        }
    }
    if g.is_one() {
        return None;
    }
    if &g == n {
        // batch overshot; replay one step at a time
        loop {
            ys = step(&ys);
            g = abs_diff(&x, &ys).gcd(n);
            if !g.is_one() {
                break;
            }
        }
    }
    (&g != n).then_some(g)
}

fn abs_diff(a: &BigUint, b: &BigUint) -> BigUint {
    if a > b {
        a - b
    } else {
        b - a
    }
}
