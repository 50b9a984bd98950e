use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::sieve::sieve;
use crate::{Error, Result};

/// A positive integer carried together with its prime factorisation.
///
/// Indices of cyclotomic polynomials in the constructions can have thousands
/// of digits; every such index is built already factored, so nothing here
/// ever factors a large number.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FactoredInt {
    value: BigUint,
    /// Strictly increasing primes, each with exponent at least one.
    factors: Vec<(u64, u32)>,
}

impl FactoredInt {
    pub fn one() -> Self {
        Self {
            value: BigUint::one(),
            factors: Vec::new(),
        }
    }

    /// Factor a machine integer by trial division against the shared sieve.
    pub fn from_u64(n: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::Precondition("zero has no factorisation".into()));
        }
        const TRIAL_LIMIT: u64 = 1 << 22;
        let mut rest = n;
        let mut factors = Vec::new();
        let mut limit = 1024u64;
        let mut idx = 0;
        'trial: loop {
            let primes = sieve().primes_up_to(limit);
            while let Some(&p) = primes.get(idx) {
                if p.saturating_mul(p) > rest {
                    break 'trial;
                }
                let mut e = 0;
                while rest % p == 0 {
                    rest /= p;
                    e += 1;
                }
                if e > 0 {
                    factors.push((p, e));
                }
                idx += 1;
            }
            if limit >= TRIAL_LIMIT {
                if rest > 1 && !sieve().is_prime(rest) {
                    return Err(Error::OutOfRange(format!(
                        "{n} has a cofactor {rest} too large to factor; pass it in factored form"
                    )));
                }
                break;
            }
            limit = (limit * 8).min(TRIAL_LIMIT);
        }
        if rest > 1 {
            factors.push((rest, 1));
        }
        Ok(Self {
            value: BigUint::from(n),
            factors,
        })
    }

    pub fn prime(p: u64) -> Result<Self> {
        Self::from_factors([(p, 1)])
    }

    /// Build from `(prime, exponent)` pairs in any order; repeated primes are
    /// merged and zero exponents dropped. Every base is checked for primality.
    pub fn from_factors<I>(pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (u64, u32)>,
    {
        let mut factors: Vec<(u64, u32)> = Vec::new();
        let mut sorted: Vec<(u64, u32)> = pairs.into_iter().filter(|&(_, e)| e > 0).collect();
        sorted.sort_unstable();
        for (p, e) in sorted {
            if !sieve().is_prime(p) {
                return Err(Error::Parse(format!("{p} is not prime")));
            }
            match factors.last_mut() {
                Some((q, f)) if *q == p => *f += e,
                _ => factors.push((p, e)),
            }
        }
        Ok(Self::from_sorted(factors))
    }

    /// Caller guarantees primes are prime, strictly increasing, exponents > 0.
    pub(crate) fn from_sorted(factors: Vec<(u64, u32)>) -> Self {
        // balanced product keeps long factor lists near-linear
        fn product(f: &[(u64, u32)]) -> BigUint {
            match f {
                [] => BigUint::one(),
                [(p, e)] => BigUint::from(*p).pow(*e),
                _ => {
                    let (a, b) = f.split_at(f.len() / 2);
                    product(a) * product(b)
                }
            }
        }
        let value = product(&factors);
        Self { value, factors }
    }

    pub fn value(&self) -> &BigUint {
        &self.value
    }

    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.iter().map(|&(p, _)| p)
    }

    pub fn to_u64(&self) -> Option<u64> {
        self.value.to_u64()
    }

    pub fn is_one(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn exponent_of(&self, p: u64) -> u32 {
        self.factors
            .binary_search_by_key(&p, |&(q, _)| q)
            .map(|i| self.factors[i].1)
            .unwrap_or(0)
    }

    /// Merge two factorisations with `combine` applied to exponents.
    fn merge(&self, other: &Self, combine: impl Fn(u32, u32) -> u32) -> Self {
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.factors, &other.factors);
        let mut out = Vec::with_capacity(a.len() + b.len());
        while i < a.len() || j < b.len() {
            let (p, e) = match (a.get(i), b.get(j)) {
                (Some(&(p, e)), Some(&(q, f))) => match p.cmp(&q) {
                    Ordering::Less => {
                        i += 1;
                        (p, combine(e, 0))
                    }
                    Ordering::Greater => {
                        j += 1;
                        (q, combine(0, f))
                    }
                    Ordering::Equal => {
                        i += 1;
                        j += 1;
                        (p, combine(e, f))
                    }
                },
                (Some(&(p, e)), None) => {
                    i += 1;
                    (p, combine(e, 0))
                }
                (None, Some(&(q, f))) => {
                    j += 1;
                    (q, combine(0, f))
                }
                (None, None) => unreachable!(),
            };
            if e > 0 {
                out.push((p, e));
            }
        }
        Self::from_sorted(out)
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.merge(other, |e, f| e + f)
    }

    pub fn lcm(&self, other: &Self) -> Self {
        self.merge(other, u32::max)
    }

    pub fn gcd(&self, other: &Self) -> Self {
        self.merge(other, u32::min)
    }

    pub fn divides(&self, other: &Self) -> bool {
        self.factors.iter().all(|&(p, e)| other.exponent_of(p) >= e)
    }

    /// `self / other`, provided `other` divides `self`.
    pub fn div_exact(&self, other: &Self) -> Option<Self> {
        other
            .divides(self)
            .then(|| self.merge(other, |e, f| e - f))
    }

    pub fn radical(&self) -> Self {
        Self::from_sorted(self.factors.iter().map(|&(p, _)| (p, 1)).collect())
    }

    pub fn is_squarefree(&self) -> bool {
        self.factors.iter().all(|&(_, e)| e == 1)
    }

    /// Number of distinct prime factors, `v(n)`.
    pub fn distinct_prime_count(&self) -> usize {
        self.factors.len()
    }

    /// `d(n)`. Panics if the count does not fit in 64 bits, which needs at
    /// least 64 distinct primes.
    pub fn divisor_count(&self) -> u64 {
        self.factors.iter().fold(1u64, |acc, &(_, e)| {
            acc.checked_mul(e as u64 + 1)
                .expect("divisor count exceeds u64")
        })
    }

    pub fn euler_phi(&self) -> BigUint {
        self.factors.iter().fold(BigUint::one(), |acc, &(p, e)| {
            acc * BigUint::from(p).pow(e - 1) * BigUint::from(p - 1)
        })
    }

    /// All divisors in ascending order.
    pub fn divisors(&self) -> Vec<FactoredInt> {
        let mut out = vec![(BigUint::one(), Vec::<(u64, u32)>::new())];
        for &(p, e) in &self.factors {
            let mut next = Vec::with_capacity(out.len() * (e as usize + 1));
            for (value, factors) in &out {
                let mut v = value.clone();
                next.push((v.clone(), factors.clone()));
                for k in 1..=e {
                    v *= p;
                    let mut f = factors.clone();
                    f.push((p, k));
                    next.push((v.clone(), f));
                }
            }
            out = next;
        }
        out.sort_by(|a, b| a.0.cmp(&b.0));
        out.into_iter()
            .map(|(value, factors)| FactoredInt { value, factors })
            .collect()
    }

    /// Canonical `p^e.p^e` rendering, `"1"` for one.
    pub fn factored_string(&self) -> String {
        if self.is_one() {
            return "1".into();
        }
        self.factors
            .iter()
            .map(|(p, e)| format!("{p}^{e}"))
            .collect::<Vec<_>>()
            .join(".")
    }
}

impl Ord for FactoredInt {
    fn cmp(&self, other: &Self) -> Ordering {
        self.value.cmp(&other.value)
    }
}

impl PartialOrd for FactoredInt {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for FactoredInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

/// Accepts a decimal integer (`"30"`) or a factored form (`"2^1.3^1.5^1"`,
/// exponents optional: `"2.3.5"`).
impl FromStr for FactoredInt {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Err(Error::Parse("empty string".into()));
        }
        if !s.contains('^') && !s.contains('.') {
            let n: u64 = s
                .parse()
                .map_err(|_| Error::Parse(format!("{s:?} is not a positive integer")))?;
            return FactoredInt::from_u64(n);
        }
        let mut pairs = Vec::new();
        for part in s.split('.') {
            let (p, e) = match part.split_once('^') {
                Some((p, e)) => (p, e),
                None => (part, "1"),
            };
            let p: u64 = p
                .parse()
                .map_err(|_| Error::Parse(format!("bad prime {p:?} in {s:?}")))?;
            let e: u32 = e
                .parse()
                .map_err(|_| Error::Parse(format!("bad exponent {e:?} in {s:?}")))?;
            pairs.push((p, e));
        }
        FactoredInt::from_factors(pairs)
    }
}

impl From<u32> for FactoredInt {
    fn from(n: u32) -> Self {
        assert!(n > 0, "FactoredInt must be positive");
        FactoredInt::from_u64(n as u64).expect("nonzero")
    }
}

impl Serialize for FactoredInt {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.factors.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for FactoredInt {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let pairs = Vec::<(u64, u32)>::deserialize(deserializer)?;
        FactoredInt::from_factors(pairs).map_err(serde::de::Error::custom)
    }
}
