//! Cyclotomic polynomials: full expansion, truncation at huge factored
//! indices, the factorisation of `x^n - 1`, and identity checks.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::numtheory::{FactoredInt, moebius, sieve};
use crate::polyring::{Coefficient, IntPoly, Substitution, TruncSeries};
use crate::{Error, Result};

fn guard(n: &BigUint, cap: u64) -> Result<u64> {
    match n.to_u64() {
        Some(v) if v <= cap => Ok(v),
        _ => Err(Error::CapExceeded {
            needed: n.to_string(),
            cap,
        }),
    }
}

/// Squarefree `e | rad(n)` paired with `n / e` and `mu(e)`; these are the
/// only divisors `d = n / e` with `mu(n / d) != 0`.
fn moebius_support(n: &FactoredInt) -> Vec<(FactoredInt, i8)> {
    n.radical()
        .divisors()
        .into_iter()
        .map(|e| {
            let mu = moebius(&e);
            (n.div_exact(&e).expect("e divides n"), mu)
        })
        .collect()
}

/// `phi_n` from the Möbius product: multiply every `x^d - 1` with
/// `mu(n/d) = 1`, then exact-divide by those with `mu(n/d) = -1`.
pub fn cyclotomic(n: &FactoredInt, cap: u64) -> Result<IntPoly> {
    guard(n.value(), cap)?;
    let support = moebius_support(n);
    let mut poly = IntPoly::one();
    for (d, mu) in &support {
        if *mu == 1 {
            poly = poly.mul_x_pow_minus_one(d.to_u64().unwrap() as usize);
        }
    }
    for (d, mu) in &support {
        if *mu == -1 {
            poly = poly.div_x_pow_minus_one(d.to_u64().unwrap() as usize)?;
        }
    }
    Ok(poly)
}

/// `phi_n` through the prime-index recurrences: build `phi_rad(n)` one prime
/// at a time with `phi_{mp}(x) = phi_m(x^p) / phi_m(x)`, then lift with
/// `phi_{mp}(x) = phi_m(x^p)` for the repeated primes.
pub fn cyclotomic_by_recurrence(n: &FactoredInt, cap: u64) -> Result<IntPoly> {
    let value = guard(n.value(), cap)? as usize;
    let mut poly = IntPoly::from_i64(&[-1, 1]);
    let mut rad = 1usize;
    for p in n.primes() {
        let p = p as usize;
        poly = poly.substitute(Substitution::Power(p)).exact_div(&poly)?;
        rad *= p;
    }
    if value > rad {
        poly = poly.substitute(Substitution::Power(value / rad));
    }
    Ok(poly)
}

/// `phi_n mod x^{order+1}` for any factored `n`, however large.
///
/// Each factor `(x^d - 1)^{mu(n/d)}` with `d > order` is `-1` modulo
/// `x^{order+1}`, so it contributes only a sign; the remaining factors have
/// `d <= order` and are applied exactly.
pub fn cyclotomic_trunc(n: &FactoredInt, order: usize) -> TruncSeries<BigInt> {
    cyclotomic_trunc_in(n, order)
}

/// [`cyclotomic_trunc`] over any coefficient ring.
pub fn cyclotomic_trunc_in<T: Coefficient>(n: &FactoredInt, order: usize) -> TruncSeries<T> {
    let small = small_support(n, order as u64);
    let total_terms_parity = if n.is_one() { 1 } else { 0 };
    let dropped_parity = (total_terms_parity + small.len()) % 2;
    let mut out = TruncSeries::<T>::one(order);
    for &(d, mu) in &small {
        out.mul_x_pow_minus_one_pow(d as usize, mu as i64);
    }
    if dropped_parity == 1 {
        out.negate();
    }
    out
}

/// Pairs `(d, mu(n/d))` with `d | n`, `n/d` squarefree and `d <= bound`.
///
/// Such `d` are `base * prod(T)` where `base = n / rad(n)` and `T` is a set
/// of primes of `n` (those left out of `e = n/d`); a depth-first walk over
/// the primes prunes once the running product exceeds `bound`.
fn small_support(n: &FactoredInt, bound: u64) -> Vec<(u64, i8)> {
    let rad = n.radical();
    let base = n.div_exact(&rad).expect("radical divides n");
    let Some(base) = base.to_u64().filter(|&b| b <= bound) else {
        return Vec::new();
    };
    let primes: Vec<u64> = rad.primes().collect();
    let v = primes.len();
    let mut out = Vec::new();
    // (index of next prime, running d, number of primes kept out of e)
    let mut stack = vec![(0usize, base, 0usize)];
    while let Some((i, d, kept)) = stack.pop() {
        if i == v {
            let mu = if (v - kept) % 2 == 0 { 1 } else { -1 };
            out.push((d, mu));
            continue;
        }
        stack.push((i + 1, d, kept));
        if let Some(next) = d.checked_mul(primes[i]).filter(|&x| x <= bound) {
            stack.push((i + 1, next, kept + 1));
        }
    }
    out.sort_unstable();
    out
}

/// `x^n - 1 = prod_{d | n} phi_d(x)`, one entry per divisor in ascending order.
pub fn factor_xn_minus_1(n: &FactoredInt, cap: u64) -> Result<Vec<(FactoredInt, IntPoly)>> {
    guard(n.value(), cap)?;
    n.divisors()
        .into_iter()
        .map(|d| {
            let phi = cyclotomic(&d, cap)?;
            Ok((d, phi))
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckStatus {
    Pass,
    Skip,
    Fail,
}

impl CheckStatus {
    fn from_bool(ok: bool) -> Self {
        if ok { Self::Pass } else { Self::Fail }
    }
}

/// Outcome of the three prime-index identities for one `(n, p)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimeIndexReport {
    pub n: FactoredInt,
    pub p: u64,
    /// `p | n  =>  phi_{np}(x) = phi_n(x^p)`
    pub prime_divides: CheckStatus,
    /// `p ∤ n  =>  phi_{np}(x) = phi_n(x^p) / phi_n(x)`
    pub prime_coprime: CheckStatus,
    /// `n > 1 odd  =>  phi_{2n}(x) = phi_n(-x)`
    pub doubling: CheckStatus,
}

impl PrimeIndexReport {
    pub fn all_pass_or_skip(&self) -> bool {
        [self.prime_divides, self.prime_coprime, self.doubling]
            .iter()
            .all(|&s| s != CheckStatus::Fail)
    }
}

pub fn verify_lemma2(n: &FactoredInt, p: u64, cap: u64) -> Result<PrimeIndexReport> {
    if !sieve().is_prime(p) {
        return Err(Error::Precondition(format!("{p} is not prime")));
    }
    let pf = FactoredInt::prime(p)?;
    let np = n.mul(&pf);
    guard(np.value(), cap)?;
    let phi_n = cyclotomic(n, cap)?;
    let phi_np = cyclotomic(&np, cap)?;
    let lifted = phi_n.substitute(Substitution::Power(p as usize));

    let (prime_divides, prime_coprime) = if pf.divides(n) {
        (CheckStatus::from_bool(phi_np == lifted), CheckStatus::Skip)
    } else {
        let ok = lifted.exact_div(&phi_n).is_ok_and(|q| q == phi_np);
        (CheckStatus::Skip, CheckStatus::from_bool(ok))
    };

    let odd = n.exponent_of(2) == 0;
    let doubling = if odd && !n.is_one() {
        let two_n = n.mul(&FactoredInt::prime(2)?);
        guard(two_n.value(), cap)?;
        let phi_2n = cyclotomic(&two_n, cap)?;
        CheckStatus::from_bool(phi_2n == phi_n.substitute(Substitution::NegateX))
    } else {
        CheckStatus::Skip
    };

    Ok(PrimeIndexReport {
        n: n.clone(),
        p,
        prime_divides,
        prime_coprime,
        doubling,
    })
}

/// Height of `phi_n` against `n^{2^{k-1}}`, `k` the number of distinct odd
/// prime factors.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BatemanReport {
    #[serde(with = "crate::serde_util::biguint")]
    pub n: BigUint,
    #[serde(with = "crate::serde_util::biguint")]
    pub height: BigUint,
    pub odd_prime_count: usize,
    #[serde(with = "crate::serde_util::biguint")]
    pub bound: BigUint,
    /// How the exponent was read; `k = 0` uses `ceil(n^{1/2})`.
    pub exponent: String,
    pub ok: bool,
}

pub fn bateman_check(n: &FactoredInt, cap: u64) -> Result<BatemanReport> {
    let phi = cyclotomic(n, cap)?;
    let height = phi.height();
    let k = n.primes().filter(|&p| p != 2).count();
    let (bound, exponent) = if k == 0 {
        let root = n.value().sqrt();
        let ceil = if &(&root * &root) == n.value() {
            root
        } else {
            root + BigUint::one()
        };
        (ceil, "1/2 (k = 0, rounded up)".to_string())
    } else {
        (n.value().pow(1u32 << (k - 1)), format!("2^{}", k - 1))
    };
    let ok = height <= bound;
    Ok(BatemanReport {
        n: n.value().clone(),
        height,
        odd_prime_count: k,
        bound,
        exponent,
        ok,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::DEFAULT_MATERIALIZATION_CAP as CAP;

    fn f(n: u64) -> FactoredInt {
        FactoredInt::from_u64(n).unwrap()
    }

    fn p(c: &[i64]) -> IntPoly {
        IntPoly::from_i64(c)
    }

    /// Independent oracle: `(x^n - 1) / prod_{d | n, d < n} phi_d` by
    /// generic long division.
    fn by_division(n: u64, memo: &mut Vec<Option<IntPoly>>) -> IntPoly {
        if let Some(Some(done)) = memo.get(n as usize) {
            return done.clone();
        }
        let mut poly = IntPoly::x_pow_minus_one(n as usize);
        for d in (1..n).filter(|d| n % d == 0) {
            let phi_d = by_division(d, memo);
            poly = poly.exact_div(&phi_d).unwrap();
        }
        if memo.len() <= n as usize {
            memo.resize(n as usize + 1, None);
        }
        memo[n as usize] = Some(poly.clone());
        poly
    }

    #[test]
    fn small_examples() {
        assert_eq!(cyclotomic(&f(1), CAP).unwrap(), p(&[-1, 1]));
        assert_eq!(cyclotomic(&f(6), CAP).unwrap(), p(&[1, -1, 1]));
        let phi105 = cyclotomic(&f(105), CAP).unwrap();
        assert_eq!(phi105.coefficient(7), BigInt::from(-2));
        assert_eq!(phi105.degree(), Some(48));
    }

    #[test]
    fn both_paths_agree_with_division_oracle() {
        let mut memo = Vec::new();
        for n in 1..=300u64 {
            let expected = by_division(n, &mut memo);
            assert_eq!(cyclotomic(&f(n), CAP).unwrap(), expected, "n = {n}");
            assert_eq!(cyclotomic_by_recurrence(&f(n), CAP).unwrap(), expected, "n = {n}");
        }
    }

    #[test]
    fn degree_is_totient_and_monic() {
        for n in 1..=400u64 {
            let x = f(n);
            let phi = cyclotomic(&x, CAP).unwrap();
            assert!(phi.is_monic());
            assert_eq!(BigUint::from(phi.degree().unwrap()), x.euler_phi());
        }
    }

    #[test]
    fn cap_is_enforced() {
        assert!(matches!(
            cyclotomic(&f(2000), 1000),
            Err(Error::CapExceeded { .. })
        ));
        assert!(matches!(
            factor_xn_minus_1(&f(2000), 1000),
            Err(Error::CapExceeded { .. })
        ));
    }

    #[test]
    fn truncation_examples() {
        let t = cyclotomic_trunc(&f(6), 5);
        assert_eq!(t, TruncSeries::from_i64(5, &[1, -1, 1]));
        let t = cyclotomic_trunc(&f(385), 11);
        assert_eq!(
            t,
            TruncSeries::from_i64(11, &[1, 1, 1, 1, 1, 0, 0, -1, -1, -1, -1, -2])
        );
        let t = cyclotomic_trunc(&f(770), 11);
        assert_eq!(
            t,
            TruncSeries::from_i64(11, &[1, -1, 1, -1, 1, 0, 0, 1, -1, 1, -1, 2])
        );
        assert_eq!(cyclotomic_trunc(&f(1), 0), TruncSeries::from_i64(0, &[-1]));
    }

    #[test]
    fn truncation_matches_full_expansion() {
        for n in 1..=400u64 {
            let full = cyclotomic(&f(n), CAP).unwrap();
            for r in [0usize, 1, 2, 5, 10, 17] {
                assert_eq!(cyclotomic_trunc(&f(n), r), full.truncate(r), "n = {n}, r = {r}");
            }
        }
    }

    #[test]
    fn truncation_at_enormous_index() {
        // 2 * (product of the primes from 101 to 997): only the sign and the
        // d = 1, 2 factors survive below x^100.
        let mut factors = vec![(2u64, 1u32)];
        factors.extend(sieve().primes_up_to(997).into_iter().filter(|&p| p > 100).map(|p| (p, 1)));
        let n = FactoredInt::from_factors(factors).unwrap();
        assert!(n.value().bits() > 1000);
        let t = cyclotomic_trunc(&n, 99);
        // m has 143 primes, all above 100, so phi_m = 1/(1 - x) below x^100
        // and phi_{2m}(x) = phi_m(-x) = 1/(1 + x).
        let alternating: Vec<i64> = (0..100).map(|i| if i % 2 == 0 { 1 } else { -1 }).collect();
        assert_eq!(t, TruncSeries::from_i64(99, &alternating));
    }

    #[test]
    fn factorisation_of_xn_minus_1() {
        let fs = factor_xn_minus_1(&f(1), CAP).unwrap();
        assert_eq!(fs, vec![(f(1), p(&[-1, 1]))]);
        let fs = factor_xn_minus_1(&f(6), CAP).unwrap();
        let expected = vec![
            (f(1), p(&[-1, 1])),
            (f(2), p(&[1, 1])),
            (f(3), p(&[1, 1, 1])),
            (f(6), p(&[1, -1, 1])),
        ];
        assert_eq!(fs, expected);
        let degrees: usize = factor_xn_minus_1(&f(12), CAP)
            .unwrap()
            .iter()
            .map(|(_, phi)| phi.degree().unwrap())
            .sum();
        assert_eq!(degrees, 12);
    }

    #[test]
    fn prime_index_examples() {
        let r = verify_lemma2(&f(2), 2, CAP).unwrap();
        assert_eq!(r.prime_divides, CheckStatus::Pass);
        assert_eq!(r.prime_coprime, CheckStatus::Skip);
        let r = verify_lemma2(&f(3), 2, CAP).unwrap();
        assert_eq!(r.prime_coprime, CheckStatus::Pass);
        assert_eq!(r.doubling, CheckStatus::Pass);
        assert!(verify_lemma2(&f(3), 4, CAP).is_err());
    }

    #[test]
    fn prime_index_small_grid() {
        for n in 1..=120u64 {
            for p in sieve().primes_up_to(2000 / n) {
                let r = verify_lemma2(&f(n), p, CAP).unwrap();
                assert!(r.all_pass_or_skip(), "{r:?}");
            }
        }
    }

    #[test]
    fn bateman_examples() {
        let r = bateman_check(&f(105), CAP).unwrap();
        assert_eq!(r.height, BigUint::from(2u32));
        // k = 3 odd primes, so the exponent is 2^2.
        assert_eq!(r.bound, BigUint::from(105u32).pow(4));
        assert!(r.ok);
        let r = bateman_check(&f(6), CAP).unwrap();
        assert_eq!(r.height, BigUint::one());
        assert!(r.ok);
        let r = bateman_check(&f(2), CAP).unwrap();
        assert_eq!(r.height, BigUint::one());
        assert_eq!(r.bound, BigUint::from(2u32));
        assert!(r.ok);
        let r = bateman_check(&f(16), CAP).unwrap();
        assert_eq!(r.bound, BigUint::from(4u32));
    }
}
