//! Explicit divisors of `x^l - 1` built from cyclotomic factors: the
//! building blocks congruent to `1 -+ x^n`, prefix witnesses realising any
//! finite run of low coefficients, coverage witnesses with a fixed number of
//! irreducible factors, and the primorial products behind the lower bound.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::cyclotomic::{cyclotomic, cyclotomic_trunc};
use crate::numtheory::{FactoredInt, TwoPrimeProducts, find_prime_cluster, moebius, primorial, sieve};
use crate::polyring::{IntPoly, TruncSeries};
use crate::{Error, Result};

/// Largest `l` for which reports materialise the product and divide
/// `x^l - 1` by it.
pub const MATERIALIZE_ORDER_CAP: u64 = 100_000;

/// `prod_{m in indices} phi_m`, kept symbolic.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CycProduct {
    indices: Vec<FactoredInt>,
    order_l: FactoredInt,
}

impl CycProduct {
    /// Fails on repeated indices.
    pub fn new(indices: impl IntoIterator<Item = FactoredInt>) -> Result<Self> {
        let mut indices: Vec<FactoredInt> = indices.into_iter().collect();
        indices.sort();
        if indices.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Precondition("cyclotomic indices must be distinct".into()));
        }
        let mut top: BTreeMap<u64, u32> = BTreeMap::new();
        for m in &indices {
            for &(p, e) in m.factors() {
                let slot = top.entry(p).or_insert(0);
                *slot = (*slot).max(e);
            }
        }
        let order_l = FactoredInt::from_sorted(top.into_iter().collect());
        Ok(Self { indices, order_l })
    }

    pub fn indices(&self) -> &[FactoredInt] {
        &self.indices
    }

    pub fn order_l(&self) -> &FactoredInt {
        &self.order_l
    }

    pub fn factor_count(&self) -> usize {
        self.indices.len()
    }

    pub fn is_disjoint(&self, other: &CycProduct) -> bool {
        let mine: BTreeSet<&FactoredInt> = self.indices.iter().collect();
        other.indices.iter().all(|m| !mine.contains(m))
    }

    pub fn union(&self, other: &CycProduct) -> Result<Self> {
        Self::new(self.indices.iter().chain(&other.indices).cloned())
    }

    pub fn trunc(&self, order: usize) -> TruncSeries<BigInt> {
        trunc_of_product(self, order)
    }

    /// Full expansion, for `order_l <= cap`.
    pub fn materialize(&self, cap: u64) -> Result<IntPoly> {
        match self.order_l.to_u64() {
            Some(l) if l <= cap => {}
            _ => {
                return Err(Error::CapExceeded {
                    needed: self.order_l.to_string(),
                    cap,
                });
            }
        }
        self.indices
            .iter()
            .try_fold(IntPoly::one(), |acc, m| Ok(acc.mul(&cyclotomic(m, cap)?)))
    }

    /// Long division of `x^l - 1` by the expanded product.
    pub fn divides_xl_minus_1(&self, cap: u64) -> Result<bool> {
        let poly = self.materialize(cap)?;
        let l = self.order_l.to_u64().expect("checked by materialize") as usize;
        Ok(IntPoly::x_pow_minus_one(l).exact_div(&poly).is_ok())
    }
}

/// `prod phi_m mod x^{order+1}`; indices may be arbitrarily large.
pub fn trunc_of_product(p: &CycProduct, order: usize) -> TruncSeries<BigInt> {
    let mut acc = TruncSeries::one(order);
    for m in &p.indices {
        acc = acc
            .trunc_mul(&cyclotomic_trunc(m, order))
            .expect("same order");
    }
    acc
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Claim {
    pub name: String,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessReport {
    #[serde(flatten)]
    pub product: CycProduct,
    pub truncation: TruncSeries<BigInt>,
    pub claims: Vec<Claim>,
}

impl WitnessReport {
    pub fn all_pass(&self) -> bool {
        self.claims.iter().all(|c| c.pass)
    }

    pub fn claim(&self, name: &str) -> Option<bool> {
        self.claims.iter().find(|c| c.name == name).map(|c| c.pass)
    }

    fn push(&mut self, name: &str, pass: bool) {
        self.claims.push(Claim {
            name: name.into(),
            pass,
        });
    }

    /// Structural claims every report carries, plus the full division
    /// check when `l` is small enough.
    fn push_structural(&mut self) -> Result<()> {
        let p = self.product.clone();
        let distinct = p.indices.windows(2).all(|w| w[0] < w[1]);
        self.push("indices_distinct", distinct);
        let divide = p.indices.iter().all(|m| m.divides(&p.order_l));
        self.push("indices_divide_order_l", divide);
        if p.order_l.to_u64().is_some_and(|l| l <= MATERIALIZE_ORDER_CAP) {
            let poly = p.materialize(MATERIALIZE_ORDER_CAP)?;
            let matches = poly.truncate(self.truncation.order()) == self.truncation;
            self.push("materialized_matches_truncation", matches);
            self.push("divides_x_l_minus_1", p.divides_xl_minus_1(MATERIALIZE_ORDER_CAP)?);
        }
        Ok(())
    }
}

fn block_lower(n: usize) -> u64 {
    // Both primes of n_m must avoid every d | 2n; above max(n, 2) suffices
    // since a prime q > n dividing 2n would have to equal 2n.
    (n as u64).max(2)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum BlockKind {
    /// `1 - x^n`: `d | n`
    Minus,
    /// `1 + x^n`: `d | 2n`, `d ∤ n`
    Plus,
}

fn block_divisors(kind: BlockKind, n: usize) -> Result<Vec<FactoredInt>> {
    if n == 0 {
        return Err(Error::Precondition("building blocks need n >= 1".into()));
    }
    let nf = FactoredInt::from_u64(n as u64)?;
    Ok(match kind {
        BlockKind::Minus => nf.divisors(),
        BlockKind::Plus => FactoredInt::from_u64(2 * n as u64)?
            .divisors()
            .into_iter()
            .filter(|d| !d.divides(&nf))
            .collect(),
    })
}

/// Indices `n_m d` when none is excluded.
fn admissible(n_m: &FactoredInt, ds: &[FactoredInt], exclude: &BTreeSet<FactoredInt>) -> Option<Vec<FactoredInt>> {
    let indices: Vec<FactoredInt> = ds.iter().map(|d| n_m.mul(d)).collect();
    (!indices.iter().any(|i| exclude.contains(i))).then_some(indices)
}

fn verified_block(kind: BlockKind, n: usize, n_m: &FactoredInt, indices: Vec<FactoredInt>) -> Result<CycProduct> {
    let product = CycProduct::new(indices)?;
    let mut expected = vec![BigInt::zero(); n + 1];
    expected[0] = BigInt::one();
    expected[n] = BigInt::from(if kind == BlockKind::Minus { -1 } else { 1 });
    if product.trunc(n).coeffs() != expected.as_slice() {
        return Err(Error::VerificationFailed(format!(
            "{kind:?} block for n={n} at {n_m} is not 1 -+ x^{n}"
        )));
    }
    Ok(product)
}

fn block(kind: BlockKind, n: usize, m: usize, exclude: &BTreeSet<FactoredInt>) -> Result<CycProduct> {
    if m == 0 {
        return Err(Error::Precondition("building blocks need m >= 1".into()));
    }
    let ds = block_divisors(kind, n)?;
    let (n_m, indices) = TwoPrimeProducts::above(block_lower(n))
        .filter_map(|n_m| admissible(&n_m, &ds, exclude).map(|ix| (n_m, ix)))
        .nth(m - 1)
        .expect("two-prime products are unbounded");
    verified_block(kind, n, &n_m, indices)
}

/// `prod_{d | n} phi_{n_m d} == 1 - x^n (mod x^{n+1})`, `n_m` the `m`-th
/// product of two primes above `max(n, 2)` whose indices avoid `exclude`.
pub fn building_block_d(n: usize, m: usize, exclude: &BTreeSet<FactoredInt>) -> Result<CycProduct> {
    block(BlockKind::Minus, n, m, exclude)
}

/// `prod_{d | 2n, d ∤ n} phi_{n_m d} == 1 + x^n (mod x^{n+1})`.
pub fn building_block_dprime(n: usize, m: usize, exclude: &BTreeSet<FactoredInt>) -> Result<CycProduct> {
    block(BlockKind::Plus, n, m, exclude)
}

/// Hands out the first admissible block of each family against everything
/// used so far. Candidates passed over stay excluded because the used set
/// only grows, so each family's scan resumes where it stopped.
#[derive(Default)]
struct BlockPool {
    used: BTreeSet<FactoredInt>,
    scans: BTreeMap<(BlockKind, usize), (Vec<FactoredInt>, TwoPrimeProducts)>,
}

impl BlockPool {
    fn take(&mut self, kind: BlockKind, n: usize) -> Result<CycProduct> {
        if !self.scans.contains_key(&(kind, n)) {
            let ds = block_divisors(kind, n)?;
            self.scans
                .insert((kind, n), (ds, TwoPrimeProducts::above(block_lower(n))));
        }
        let (ds, scan) = self.scans.get_mut(&(kind, n)).expect("inserted above");
        let (n_m, indices) = scan
            .find_map(|n_m| admissible(&n_m, ds, &self.used).map(|ix| (n_m, ix)))
            .expect("two-prime products are unbounded");
        let blk = verified_block(kind, n, &n_m, indices)?;
        self.used.extend(blk.indices.iter().cloned());
        Ok(blk)
    }
}

/// A divisor of some `x^l - 1` whose coefficients `1..=r` are `target`.
///
/// Built by induction on the prefix length: fix coefficient 1, then for each
/// later position multiply in fresh blocks `1 -+ x^j` until it matches.
pub fn prefix_witness(target: &[i64]) -> Result<WitnessReport> {
    let r = target.len();
    if r == 0 {
        return Err(Error::Precondition("prefix target must be nonempty".into()));
    }
    let mut pool = BlockPool::default();
    let mut series = TruncSeries::<BigInt>::one(r);
    if target[0] == 0 {
        // 1 - x^2 has the right linear term already
        let blk = pool.take(BlockKind::Minus, 2)?;
        series = series.trunc_mul(&blk.trunc(r)).expect("same order");
    }
    for j in 1..=r {
        let diff = series.coeff(j) - BigInt::from(target[j - 1]);
        let kind = if diff.is_positive() { BlockKind::Minus } else { BlockKind::Plus };
        for _ in 0..diff.abs().to_u64().expect("small adjustment") {
            let blk = pool.take(kind, j)?;
            series = series.trunc_mul(&blk.trunc(r)).expect("same order");
        }
    }

    let product = CycProduct::new(pool.used)?;
    let truncation = product.trunc(r);
    let mut report = WitnessReport {
        product,
        truncation,
        claims: Vec::new(),
    };
    let matches = report
        .truncation
        .coeffs()
        .iter()
        .skip(1)
        .zip(target)
        .all(|(c, &t)| *c == BigInt::from(t));
    report.push("truncation_matches_target", matches);
    report.push("constant_term_unit", report.truncation.coeff(0).abs().is_one());
    report.push_structural()?;
    Ok(report)
}

/// Parameters of the coverage construction for target `n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuzukiParams {
    pub t: usize,
    pub primes: Vec<u64>,
    /// `2N`, `N` the product of the cluster.
    pub two_n: FactoredInt,
    /// Largest cluster prime.
    pub p: u64,
    /// Next prime after `p`.
    pub p_prime: u64,
}

pub fn suzuki_params(n: usize) -> Result<SuzukiParams> {
    if n == 0 {
        return Err(Error::Precondition("coverage target must be >= 1".into()));
    }
    // smallest odd t > n + 1
    let t = if n % 2 == 0 { n + 3 } else { n + 2 };
    let primes = find_prime_cluster(t)?;
    let p = *primes.last().expect("t >= 3");
    let p_prime = sieve().next_prime_after(p).expect("prime above p");
    let two_n = FactoredInt::from_factors(std::iter::once((2, 1)).chain(primes.iter().map(|&q| (q, 1))))?;
    Ok(SuzukiParams {
        t,
        primes,
        two_n,
        p,
        p_prime,
    })
}

/// `(-1)^i c_i`, `i = 0..=p`: the expansion of `phi_{2N}` below `x^{p+1}`,
/// with `c_i = 1 - #{k : p_k <= i}`.
pub fn suzuki_table(primes: &[u64]) -> Vec<i64> {
    let p = *primes.last().expect("nonempty cluster");
    (0..=p)
        .map(|i| {
            let passed = primes.iter().filter(|&&q| q <= i).count() as i64;
            let c = 1 - passed;
            if i % 2 == 1 { -c } else { c }
        })
        .collect()
}

/// A divisor with exactly `m` irreducible factors whose coefficients cover
/// `-n..=n`.
///
/// Odd `m` starts from `phi_{2N}`, which agrees with the table of
/// [`suzuki_table`] below `x^{p+1}`; the default order is `p`. Even `m`
/// starts from `phi_{2Np'} phi_{p'}`. That product is
/// `phi_{2N}(x^{p'}) phi_{p'} / phi_{2N}`, not `phi_{2N}(x^{p'})`, so no
/// table is claimed for it and coverage is checked directly up to `p p'`.
pub fn suzuki_witness(m: usize, n: usize, order: Option<usize>) -> Result<WitnessReport> {
    if m == 0 {
        return Err(Error::Precondition("factor count must be >= 1".into()));
    }
    let params = suzuki_params(n)?;
    let p = params.p as usize;
    let p_prime = params.p_prime as usize;
    let even = m % 2 == 0;
    let (mut indices, extra) = if even {
        let pp = FactoredInt::prime(params.p_prime)?;
        (vec![params.two_n.mul(&pp), pp], m / 2 - 1)
    } else {
        (vec![params.two_n.clone()], m / 2)
    };
    if extra > 0 {
        let floor = params
            .two_n
            .to_u64()
            .and_then(|v| v.checked_mul(params.p_prime))
            .ok_or_else(|| Error::OutOfRange(format!("2N p' for n={n} exceeds 64 bits")))?;
        indices.extend(TwoPrimeProducts::above(floor).take(extra));
        let mut q = floor;
        for _ in 0..extra {
            q = sieve()
                .next_prime_after(q)
                .ok_or_else(|| Error::OutOfRange("prime beyond 64 bits".into()))?;
            indices.push(FactoredInt::prime(q)?);
        }
    }
    let default_order = if even { p * p_prime } else { p };
    let order = order.unwrap_or(default_order);
    let product = CycProduct::new(indices)?;
    let truncation = product.trunc(order);
    let mut report = WitnessReport {
        product,
        truncation,
        claims: Vec::new(),
    };
    report.push("factor_count", report.product.factor_count() == m);
    let seen: BTreeSet<BigInt> = report.truncation.coeffs().iter().skip(1).cloned().collect();
    let covered = (-(n as i64)..=n as i64).all(|v| seen.contains(&BigInt::from(v)));
    report.push("coverage", covered);

    if !even {
        let table = suzuki_table(&params.primes);
        let checked = order.min(p);
        let table_ok = (0..=checked).all(|i| report.truncation.coeff(i) == BigInt::from(table[i]));
        report.push("coefficient_table", table_ok);
    }
    report.push_structural()?;
    Ok(report)
}

/// `f_k = prod phi_m` over `m | n_k` with `mu(m) = 1`, `n_k` the `k`-th
/// primorial.
pub fn extremal_fk(k: usize) -> Result<CycProduct> {
    let n_k = primorial(k)?;
    CycProduct::new(n_k.divisors().into_iter().filter(|m| moebius(m) == 1))
}

/// `(f_k)_r`.
pub fn extremal_coeff(k: usize, r: usize) -> Result<BigInt> {
    Ok(extremal_fk(k)?.trunc(r).coeff(r))
}

/// `#{m | n_k : d | m, mu(m) = 1}` by enumeration.
pub fn positive_multiples(k: usize, d: &FactoredInt) -> Result<u64> {
    let n_k = primorial(k)?;
    if !d.divides(&n_k) {
        return Err(Error::Precondition(format!("{d} does not divide the primorial")));
    }
    Ok(n_k
        .divisors()
        .iter()
        .filter(|m| d.divides(m) && moebius(m) == 1)
        .count() as u64)
}
