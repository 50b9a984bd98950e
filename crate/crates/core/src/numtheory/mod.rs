//! Elementary number theory: Möbius function, divisor lattices, primes and
//! the deterministic prime/index sequences used by the constructions.

mod factored;
mod sieve;

use std::cmp::Reverse;
use std::collections::BinaryHeap;

pub use factored::FactoredInt;
pub use sieve::{PrimeSieve, sieve};

use crate::{Error, Result};

/// Möbius function: zero on non-squarefree input, otherwise `(-1)^v(n)`.
pub fn moebius(n: &FactoredInt) -> i8 {
    if !n.is_squarefree() {
        0
    } else if n.distinct_prime_count() % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Divisors of `n` in ascending order; `d(n)` of them.
pub fn divisors(n: &FactoredInt) -> Vec<FactoredInt> {
    n.divisors()
}

pub fn distinct_prime_count(n: &FactoredInt) -> usize {
    n.distinct_prime_count()
}

/// Product of the first `k` primes.
pub fn primorial(k: usize) -> Result<FactoredInt> {
    if k == 0 {
        return Err(Error::Precondition("primorial rank must be at least 1".into()));
    }
    Ok(FactoredInt::from_sorted(
        sieve().first(k).into_iter().map(|p| (p, 1)).collect(),
    ))
}

/// `t` consecutive primes `p_1 < ... < p_t` with `p_1 + p_2 > p_t`.
///
/// Windows slide over the primes in increasing order and the first window
/// whose smallest prime exceeds `t` is returned. Every window obtained by
/// picking `t` primes from an interval `(m, 2m]` has that property, and it
/// fixes `t = 3` to `(5, 7, 11)`.
pub fn find_prime_cluster(t: usize) -> Result<Vec<u64>> {
    if t < 3 {
        return Err(Error::Precondition(format!(
            "prime cluster needs t >= 3, got {t}"
        )));
    }
    let mut primes: Vec<u64> = Vec::new();
    let mut next = t as u64;
    loop {
        next = sieve().next_prime_after(next).expect("primes are unbounded");
        primes.push(next);
        if primes.len() >= t {
            let window = &primes[primes.len() - t..];
            if window[0] + window[1] > window[t - 1] {
                return Ok(window.to_vec());
            }
        }
    }
}

/// Ascending stream of squarefree integers `q1 * q2` with
/// `lower < q1 < q2` both prime.
///
/// Pairs are indices into the primes above `lower`; the heap holds the
/// frontier of the pair lattice, so each product is produced exactly once.
#[derive(Debug, Clone)]
pub struct TwoPrimeProducts {
    primes: Vec<u64>,
    heap: BinaryHeap<Reverse<(u128, usize, usize)>>,
}

impl TwoPrimeProducts {
    pub fn above(lower: u64) -> Self {
        let mut it = Self {
            primes: Vec::new(),
            heap: BinaryHeap::new(),
        };
        let q0 = sieve().next_prime_after(lower).expect("prime above lower");
        it.primes.push(q0);
        it.push_pair(0, 1);
        it
    }

    fn prime(&mut self, i: usize) -> u64 {
        while self.primes.len() <= i {
            let last = *self.primes.last().unwrap();
            let next = sieve()
                .next_prime_after(last)
                .expect("prime search beyond u64 range");
            self.primes.push(next);
        }
        self.primes[i]
    }

    fn push_pair(&mut self, i: usize, j: usize) {
        let v = self.prime(i) as u128 * self.prime(j) as u128;
        self.heap.push(Reverse((v, i, j)));
    }
}

impl Iterator for TwoPrimeProducts {
    type Item = FactoredInt;

    fn next(&mut self) -> Option<FactoredInt> {
        let Reverse((_, i, j)) = self.heap.pop()?;
        self.push_pair(i, j + 1);
        if j == i + 1 {
            self.push_pair(i + 1, i + 2);
        }
        let (p, q) = (self.primes[i], self.primes[j]);
        Some(FactoredInt::from_sorted(vec![(p, 1), (q, 1)]))
    }
}

/// The `count` smallest products of two distinct primes, both above `lower`.
pub fn two_prime_squarefree_sequence(lower: u64, count: usize) -> Result<Vec<FactoredInt>> {
    if lower < 1 || count < 1 {
        return Err(Error::Precondition(
            "two-prime sequence needs lower >= 1 and count >= 1".into(),
        ));
    }
    Ok(TwoPrimeProducts::above(lower).take(count).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn f(n: u64) -> FactoredInt {
        FactoredInt::from_u64(n).unwrap()
    }

    fn values(v: &[FactoredInt]) -> Vec<u64> {
        v.iter().map(|x| x.to_u64().unwrap()).collect()
    }

    #[test]
    fn moebius_values() {
        assert_eq!(moebius(&f(1)), 1);
        assert_eq!(moebius(&f(12)), 0);
        assert_eq!(moebius(&f(30)), -1);
        assert_eq!(moebius(&f(6)), 1);
        assert_eq!(moebius(&f(7)), -1);
    }

    #[test]
    fn divisor_examples() {
        assert_eq!(values(&divisors(&f(1))), vec![1]);
        assert_eq!(values(&divisors(&f(6))), vec![1, 2, 3, 6]);
        assert_eq!(divisors(&f(30)).len(), 8);
    }

    #[test]
    fn moebius_sums_vanish() {
        for n in 1..=2000u64 {
            let s: i64 = divisors(&f(n)).iter().map(|d| moebius(d) as i64).sum();
            assert_eq!(s, if n == 1 { 1 } else { 0 }, "n = {n}");
        }
    }

    #[test]
    fn primorials() {
        assert_eq!(primorial(1).unwrap(), f(2));
        assert_eq!(primorial(3).unwrap(), f(30));
        assert_eq!(primorial(4).unwrap(), f(210));
        assert_eq!(primorial(10).unwrap().divisor_count(), 1024);
        assert!(primorial(0).is_err());
    }

    #[test]
    fn distinct_primes() {
        assert_eq!(distinct_prime_count(&f(1)), 0);
        assert_eq!(distinct_prime_count(&f(12)), 2);
        assert_eq!(distinct_prime_count(&f(30)), 3);
    }

    /// Brute force over consecutive prime windows starting above `t`.
    fn cluster_oracle(t: usize) -> Vec<u64> {
        let primes: Vec<u64> = (2u64..10_000)
            .filter(|&n| (2..n).take_while(|d| d * d <= n).all(|d| n % d != 0))
            .filter(|&p| p > t as u64)
            .collect();
        primes
            .windows(t)
            .find(|w| w[0] + w[1] > w[t - 1])
            .unwrap()
            .to_vec()
    }

    #[test]
    fn prime_clusters() {
        assert_eq!(find_prime_cluster(3).unwrap(), vec![5, 7, 11]);
        assert_eq!(find_prime_cluster(4).unwrap(), vec![7, 11, 13, 17]);
        assert!(find_prime_cluster(2).is_err());
        for t in 3..=15 {
            let c = find_prime_cluster(t).unwrap();
            assert_eq!(c, cluster_oracle(t), "t = {t}");
            assert!(c.windows(2).all(|w| w[0] < w[1]));
            assert!(c[0] + c[1] > c[t - 1]);
        }
    }

    /// All products q1*q2 with lower < q1 < q2, enumerated by brute force.
    fn two_prime_oracle(lower: u64, k: usize) -> Vec<u64> {
        let primes: Vec<u64> = (lower + 1..lower + 400)
            .filter(|&n| n > 1 && (2..n).take_while(|d| d * d <= n).all(|d| n % d != 0))
            .collect();
        let mut prods: Vec<u64> = Vec::new();
        for (i, &p) in primes.iter().enumerate() {
            for &q in &primes[i + 1..] {
                prods.push(p * q);
            }
        }
        prods.sort_unstable();
        prods.truncate(k);
        prods
    }

    #[test]
    fn two_prime_examples() {
        assert_eq!(values(&two_prime_squarefree_sequence(1, 3).unwrap()), vec![6, 10, 14]);
        assert_eq!(values(&two_prime_squarefree_sequence(2, 3).unwrap()), vec![15, 21, 33]);
        assert_eq!(values(&two_prime_squarefree_sequence(2, 1).unwrap()), vec![15]);
        assert!(two_prime_squarefree_sequence(0, 1).is_err());
    }

    #[test]
    fn two_prime_matches_oracle() {
        for lower in [1u64, 2, 3, 10, 50, 97] {
            let got = values(&two_prime_squarefree_sequence(lower, 25).unwrap());
            assert_eq!(got, two_prime_oracle(lower, 25), "lower = {lower}");
        }
    }

    #[test]
    fn two_prime_above_large_bound() {
        let seq = two_prime_squarefree_sequence(10_010, 3).unwrap();
        assert_eq!(seq[0].factors(), &[(10_037, 1), (10_039, 1)]);
        assert!(seq.windows(2).all(|w| w[0] < w[1]));
    }

    proptest! {
        #[test]
        fn divisor_count_matches_exponents(n in 1u64..1_000_000) {
            let x = f(n);
            let expected: u64 = x.factors().iter().map(|&(_, e)| e as u64 + 1).product();
            prop_assert_eq!(divisors(&x).len() as u64, expected);
        }

        #[test]
        fn two_prime_elements_coprime_to_small(lower in 1u64..200, k in 1usize..12) {
            let seq = two_prime_squarefree_sequence(lower, k).unwrap();
            prop_assert_eq!(seq.len(), k);
            for w in seq.windows(2) {
                prop_assert!(w[0] < w[1]);
            }
            for x in &seq {
                prop_assert!(x.is_squarefree());
                prop_assert_eq!(x.distinct_prime_count(), 2);
                prop_assert!(x.primes().all(|p| p > lower));
            }
        }
    }
}
