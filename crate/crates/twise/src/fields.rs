//! Exact arithmetic in prime fields F_p with 64-bit moduli.
//!
//! All intermediate products go through `u128`, so any prime below 2^63
//! is safe. Elements are kept canonical (in `[0, p)`) at all times, and
//! randomness is always drawn from a caller-owned RNG.

use crate::error::{Error, Result};
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::collections::HashSet;
use std::fmt;

/// Escalating test primes used when re-checking singular-looking instances.
pub mod primes {
    /// 2^31 - 1 (Mersenne).
    pub const P31: u64 = (1 << 31) - 1;
    /// 2^40 + 15.
    pub const P40: u64 = (1 << 40) + 15;
    /// 2^61 - 1 (Mersenne).
    pub const P61: u64 = (1 << 61) - 1;
}

/// An element of F_p, stored as its canonical representative in `[0, p)`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FieldElement(u64);

impl FieldElement {
    pub fn value(self) -> u64 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A prime field, acting as the context object for all arithmetic.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct FieldSpec {
    p: u64,
}

impl FieldSpec {
    /// Creates the field F_p. The modulus is checked with a deterministic
    /// Miller-Rabin test; composites are rejected.
    pub fn new(p: u64) -> Result<Self> {
        if p < 2 || p >= (1 << 63) || !is_prime_u64(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(FieldSpec { p })
    }

    pub fn modulus(self) -> u64 {
        self.p
    }

    /// Canonical element from an arbitrary integer.
    pub fn element(self, v: u64) -> FieldElement {
        FieldElement(v % self.p)
    }

    pub fn zero(self) -> FieldElement {
        FieldElement(0)
    }

    pub fn one(self) -> FieldElement {
        FieldElement(1 % self.p)
    }

    pub fn add(self, a: FieldElement, b: FieldElement) -> FieldElement {
        let s = a.0 + b.0; // < 2^64 since both < 2^63
        FieldElement(if s >= self.p { s - self.p } else { s })
    }

    pub fn sub(self, a: FieldElement, b: FieldElement) -> FieldElement {
        FieldElement(if a.0 >= b.0 {
            a.0 - b.0
        } else {
            self.p - (b.0 - a.0)
        })
    }

    pub fn neg(self, a: FieldElement) -> FieldElement {
        FieldElement(if a.0 == 0 { 0 } else { self.p - a.0 })
    }

    pub fn mul(self, a: FieldElement, b: FieldElement) -> FieldElement {
        FieldElement(((a.0 as u128 * b.0 as u128) % self.p as u128) as u64)
    }

    /// a^e by square-and-multiply.
    pub fn pow(self, a: FieldElement, mut e: u64) -> FieldElement {
        let mut base = a.0 % self.p;
        let mut acc: u64 = 1 % self.p;
        while e > 0 {
            if e & 1 == 1 {
                acc = ((acc as u128 * base as u128) % self.p as u128) as u64;
            }
            base = ((base as u128 * base as u128) % self.p as u128) as u64;
            e >>= 1;
        }
        FieldElement(acc)
    }

    /// Multiplicative inverse via Fermat exponentiation (p is prime).
    pub fn inv(self, a: FieldElement) -> Result<FieldElement> {
        if a.0 == 0 {
            return Err(Error::ZeroInverse);
        }
        Ok(self.pow(a, self.p - 2))
    }

    /// Uniform random element.
    pub fn sample<R: Rng + ?Sized>(self, rng: &mut R) -> FieldElement {
        FieldElement(rng.gen_range(0..self.p))
    }

    /// Samples `n` pairwise-distinct field elements (an evaluation vector).
    ///
    /// Deterministic given the RNG state. Fails with `FieldTooSmall` when
    /// `n` exceeds the field size.
    pub fn sample_distinct_vector<R: Rng + ?Sized>(
        self,
        n: usize,
        rng: &mut R,
    ) -> Result<Vec<FieldElement>> {
        if n as u128 > self.p as u128 {
            return Err(Error::FieldTooSmall {
                requested: n,
                size: self.p,
            });
        }
        // Dense case: partial Fisher-Yates over the full field.
        if self.p <= 4096 || self.p / 2 <= n as u64 {
            let mut pool: Vec<u64> = (0..self.p).collect();
            for i in 0..n {
                let j = rng.gen_range(i..pool.len());
                pool.swap(i, j);
            }
            return Ok(pool[..n].iter().map(|&v| FieldElement(v)).collect());
        }
        // Sparse case: rejection sampling.
        let mut seen = HashSet::with_capacity(n);
        let mut out = Vec::with_capacity(n);
        while out.len() < n {
            let v = rng.gen_range(0..self.p);
            if seen.insert(v) {
                out.push(FieldElement(v));
            }
        }
        Ok(out)
    }

    /// Evaluates a polynomial given by its coefficient vector
    /// (coefficient of x^i at position i) via Horner's rule.
    pub fn eval_poly(self, coeffs: &[FieldElement], x: FieldElement) -> FieldElement {
        let mut acc = FieldElement(0);
        for &c in coeffs.iter().rev() {
            acc = self.add(self.mul(acc, x), c);
        }
        acc
    }
}

/// Deterministic Miller-Rabin for u64. The fixed witness set decides
/// primality correctly for all inputs below 3.3 * 10^24.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut r = 0u32;
    while d % 2 == 0 {
        d /= 2;
        r += 1;
    }
    'witness: for &a in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 0..r - 1 {
            x = ((x as u128 * x as u128) % n as u128) as u64;
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn pow_mod(mut a: u64, mut e: u64, m: u64) -> u64 {
    a %= m;
    let mut acc: u64 = 1;
    while e > 0 {
        if e & 1 == 1 {
            acc = ((acc as u128 * a as u128) % m as u128) as u64;
        }
        a = ((a as u128 * a as u128) % m as u128) as u64;
        e >>= 1;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn small_field_arithmetic() {
        let f = FieldSpec::new(7).unwrap();
        assert_eq!(f.add(f.element(3), f.element(5)).value(), 1);
        assert_eq!(f.inv(f.element(3)).unwrap().value(), 5);
        let f101 = FieldSpec::new(101).unwrap();
        assert_eq!(f101.pow(f101.element(2), 100).value(), 1);
    }

    #[test]
    fn zero_has_no_inverse() {
        let f = FieldSpec::new(7).unwrap();
        assert_eq!(f.inv(f.zero()), Err(Error::ZeroInverse));
    }

    #[test]
    fn composite_moduli_rejected() {
        assert!(FieldSpec::new(1).is_err());
        assert!(FieldSpec::new(91).is_err()); // 7 * 13
        assert!(FieldSpec::new((1 << 31) - 2).is_err());
        assert!(FieldSpec::new(primes::P31).is_ok());
        assert!(FieldSpec::new(primes::P40).is_ok());
        assert!(FieldSpec::new(primes::P61).is_ok());
    }

    #[test]
    fn distinct_vector_small_field_is_permutation() {
        let f = FieldSpec::new(5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut v: Vec<u64> = f
            .sample_distinct_vector(5, &mut rng)
            .unwrap()
            .iter()
            .map(|e| e.value())
            .collect();
        v.sort_unstable();
        assert_eq!(v, vec![0, 1, 2, 3, 4]);
    }

    #[test]
    fn distinct_vector_reproducible() {
        let f = FieldSpec::new(101).unwrap();
        let a = f
            .sample_distinct_vector(4, &mut ChaCha8Rng::seed_from_u64(42))
            .unwrap();
        let b = f
            .sample_distinct_vector(4, &mut ChaCha8Rng::seed_from_u64(42))
            .unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 4);
    }

    #[test]
    fn distinct_vector_pigeonhole() {
        let f = FieldSpec::new(3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert_eq!(
            f.sample_distinct_vector(4, &mut rng),
            Err(Error::FieldTooSmall {
                requested: 4,
                size: 3
            })
        );
    }

    #[test]
    fn distinct_vector_never_repeats() {
        // 10^4 random (seed, n, p) triples.
        let ps = [5u64, 7, 11, 101, 1009, primes::P31];
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for trial in 0..10_000u64 {
            let p = ps[(trial % ps.len() as u64) as usize];
            let f = FieldSpec::new(p).unwrap();
            let n = rand::Rng::gen_range(&mut rng, 1..=16u64).min(p) as usize;
            let mut inner = ChaCha8Rng::seed_from_u64(trial);
            let v = f.sample_distinct_vector(n, &mut inner).unwrap();
            let set: HashSet<u64> = v.iter().map(|e| e.value()).collect();
            assert_eq!(set.len(), n);
        }
    }

    proptest! {
        // Cross-check against naive big-integer arithmetic.
        #[test]
        fn ops_agree_with_naive_oracle(a in 0u64..u64::MAX, b in 0u64..u64::MAX, pi in 0usize..4) {
            let p = [7u64, 101, primes::P31, primes::P61][pi];
            let f = FieldSpec::new(p).unwrap();
            let (x, y) = (f.element(a), f.element(b));
            prop_assert_eq!(f.add(x, y).value() as u128, ((a % p) as u128 + (b % p) as u128) % p as u128);
            prop_assert_eq!(f.sub(x, y).value() as u128, ((a % p) as u128 + p as u128 - (b % p) as u128) % p as u128);
            prop_assert_eq!(f.mul(x, y).value() as u128, ((a % p) as u128 * (b % p) as u128) % p as u128);
            if !x.is_zero() {
                prop_assert_eq!(f.mul(f.inv(x).unwrap(), x).value(), 1);
            }
        }

        #[test]
        fn pow_agrees_with_repeated_mul(a in 0u64..1000, e in 0u64..64) {
            let f = FieldSpec::new(primes::P31).unwrap();
            let x = f.element(a);
            let mut acc = f.one();
            for _ in 0..e {
                acc = f.mul(acc, x);
            }
            prop_assert_eq!(f.pow(x, e), acc);
        }
    }
}
