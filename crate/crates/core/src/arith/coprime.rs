use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};

/// Pairwise coprime integers `b_1, ..., b_k > 1` such that every nonzero
/// input is `prod b_j^(e_j)` exactly.
///
/// For any prime `p | b_j`, `v_p(n) = e_j(n) * v_p(b_j)`, so comparisons of
/// valuations that scale linearly can be decided on the exponents `e_j`
/// without factoring `b_j`.
pub fn coprime_base(inputs: &[BigUint]) -> Vec<BigUint> {
    let mut base: Vec<BigUint> = inputs.iter().filter(|n| !n.is_zero() && !n.is_one()).cloned().collect();
    'refine: loop {
        base.sort();
        base.dedup();
        for i in 0..base.len() {
            for j in i + 1..base.len() {
                let g = base[i].gcd(&base[j]);
                if g.is_one() {
                    continue;
                }
                let b = base.swap_remove(j);
                let a = base.swap_remove(i);
                for piece in [&a / &g, &b / &g, g] {
                    if !piece.is_one() {
                        base.push(piece);
                    }
                }
                continue 'refine;
            }
        }
        return base;
    }
}

/// Largest `e` with `b^e | n`, for `b > 1` and `n != 0`.
pub fn multiplicity(b: &BigUint, n: &BigUint) -> u64 {
    debug_assert!(!n.is_zero() && b > &BigUint::one());
    let mut rest = n.clone();
    let mut e = 0;
    loop {
        let (q, r) = rest.div_rem(b);
        if !r.is_zero() {
            return e;
        }
        rest = q;
        e += 1;
    }
}

/// Inputs expressed over their coprime base. A zero input has no exponent
/// vector (its valuation is infinite everywhere).
#[derive(Debug, Clone)]
pub struct CoprimeSplit {
    pub base: Vec<BigUint>,
    pub exponents: Vec<Option<Vec<u64>>>,
}

impl CoprimeSplit {
    pub fn new(inputs: &[BigUint]) -> Self {
        let base = coprime_base(inputs);
        let exponents = inputs
            .iter()
            .map(|n| (!n.is_zero()).then(|| base.iter().map(|b| multiplicity(b, n)).collect()))
            .collect();
        CoprimeSplit { base, exponents }
    }

    /// Exponent of base element `j` in input `i`; `None` means infinite.
    pub fn exponent(&self, input: usize, element: usize) -> Option<u64> {
        self.exponents[input].as_ref().map(|e| e[element])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{factor, vp_int};
    use num_bigint::BigInt;
    use proptest::prelude::*;

    fn big(v: u64) -> BigUint {
        BigUint::from(v)
    }

    #[test]
    fn refines_overlapping_inputs() {
        let base = coprime_base(&[big(12), big(18), big(35)]);
        // 12 = 2^2 3, 18 = 2 3^2, 35 = 5 7 -> {2, 3, 35}
        assert_eq!(base, vec![big(2), big(3), big(35)]);
        assert!(coprime_base(&[big(1), big(0)]).is_empty());
    }

    proptest! {
        #[test]
        fn split_reproduces_every_prime_valuation(
            inputs in prop::collection::vec(0u64..5_000_000, 1..5)
        ) {
            let inputs: Vec<BigUint> = inputs.into_iter().map(big).collect();
            let split = CoprimeSplit::new(&inputs);
            for (a, b) in split.base.iter().zip(split.base.iter().skip(1)) {
                prop_assert!(a.gcd(b).is_one());
            }
            for (i, n) in inputs.iter().enumerate() {
                if n.is_zero() {
                    continue;
                }
                let recomposed = split.base.iter().enumerate().fold(BigUint::one(), |acc, (j, b)| {
                    acc * b.pow(split.exponent(i, j).unwrap() as u32)
                });
                prop_assert_eq!(&recomposed, n);
                // valuations scale by the base exponent
                for (j, b) in split.base.iter().enumerate() {
                    for (p, _) in factor(&BigInt::from(b.clone())).unwrap().factors {
                        let vb = vp_int(&BigInt::from(b.clone()), &p).unwrap();
                        let vn = vp_int(&BigInt::from(n.clone()), &p).unwrap();
                        prop_assert_eq!(vn, split.exponent(i, j).unwrap() * vb);
                    }
                }
            }
        }
    }
}
