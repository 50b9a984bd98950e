//! Exhaustive search over the divisors of `x^n - 1`.
//!
//! Every monic divisor is `prod_{m in S} phi_m` for a subset `S` of the
//! divisors of `n`. Subsets are walked in gray-code order so each step
//! multiplies or divides the running product by a single `phi_m`. The mask
//! space is split on its high bits into independent walks, one per task, and
//! results merge by `(value, canonical mask order)`, so the answer does not
//! depend on the number of workers.

use std::cmp::Ordering;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::bounds::dominance_bound;
use crate::cyclotomic::{cyclotomic, cyclotomic_trunc_in};
use crate::numtheory::{FactoredInt, moebius};
use crate::polyring::{Coefficient, IntPoly, TruncSeries};
use crate::{DEFAULT_MATERIALIZATION_CAP, Error, Result};

pub const DEFAULT_SUBSET_BUDGET: u64 = 1 << 20;
pub const DEFAULT_HEIGHT_BUDGET: u64 = 1 << 14;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchConfig {
    /// Largest number of subsets `big_h` will enumerate.
    pub subset_budget: u64,
    /// Largest number of subsets `big_b` will enumerate; every one is a full
    /// polynomial product.
    pub height_budget: u64,
    pub workers: usize,
    pub materialization_cap: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            subset_budget: DEFAULT_SUBSET_BUDGET,
            height_budget: DEFAULT_HEIGHT_BUDGET,
            workers: 1,
            materialization_cap: DEFAULT_MATERIALIZATION_CAP,
        }
    }
}

impl SearchConfig {
    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers.max(1);
        self
    }
}

/// Canonical order on subsets: compare the ascending lists of chosen
/// divisors lexicographically, a proper prefix coming first. Bit `i` of a
/// mask stands for the `i`-th smallest divisor.
pub fn canonical_cmp(a: u64, b: u64) -> Ordering {
    if a == b {
        return Ordering::Equal;
    }
    let low = (a ^ b).trailing_zeros();
    let above = |m: u64| low < 63 && (m >> (low + 1)) != 0;
    if a >> low & 1 == 1 {
        // `a` continues with divisor `low`, `b` skips it.
        if above(b) { Ordering::Less } else { Ordering::Greater }
    } else if above(a) {
        Ordering::Greater
    } else {
        Ordering::Less
    }
}

/// A subset `S` of the divisors of `n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DivisorSubset {
    n: FactoredInt,
    mask: u64,
}

impl DivisorSubset {
    pub fn new(n: FactoredInt, mask: u64) -> Result<Self> {
        let d = n.divisor_count();
        if d > 63 || (d < 64 && mask >> d != 0) {
            return Err(Error::Precondition(format!(
                "mask {mask:#x} does not fit the {d} divisors of {n}"
            )));
        }
        Ok(Self { n, mask })
    }

    pub fn all(n: FactoredInt) -> Result<Self> {
        let d = n.divisor_count();
        if d > 63 {
            return Err(Error::OutOfRange(format!("{n} has {d} divisors")));
        }
        Ok(Self {
            n,
            mask: (1u64 << d) - 1,
        })
    }

    pub fn from_members(n: FactoredInt, members: &[FactoredInt]) -> Result<Self> {
        let divisors = n.divisors();
        let mut mask = 0u64;
        for m in members {
            let i = divisors
                .binary_search(m)
                .map_err(|_| Error::Precondition(format!("{m} does not divide {n}")))?;
            mask |= 1 << i;
        }
        Self::new(n, mask)
    }

    pub fn n(&self) -> &FactoredInt {
        &self.n
    }

    pub fn mask(&self) -> u64 {
        self.mask
    }

    pub fn members(&self) -> Vec<FactoredInt> {
        self.n
            .divisors()
            .into_iter()
            .enumerate()
            .filter(|(i, _)| self.mask >> i & 1 == 1)
            .map(|(_, d)| d)
            .collect()
    }
}

/// `e(d) = s1(d) - s2(d)` for every `d | n`, so that the divisor equals
/// `prod_{d | n} (x^d - 1)^{e(d)}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExponentVector {
    pub n: FactoredInt,
    /// One entry per divisor, ascending.
    pub entries: Vec<(FactoredInt, i64)>,
}

impl ExponentVector {
    pub fn get(&self, d: &FactoredInt) -> i64 {
        self.entries
            .binary_search_by(|(x, _)| x.cmp(d))
            .map(|i| self.entries[i].1)
            .unwrap_or(0)
    }

    pub fn max_abs(&self) -> u64 {
        self.entries
            .iter()
            .map(|(_, e)| e.unsigned_abs())
            .max()
            .unwrap_or(0)
    }
}

pub fn exponent_vector(s: &DivisorSubset) -> ExponentVector {
    let members = s.members();
    let entries = s
        .n
        .divisors()
        .into_iter()
        .map(|d| {
            let e = members
                .iter()
                .filter_map(|m| m.div_exact(&d))
                .map(|q| moebius(&q) as i64)
                .sum();
            (d, e)
        })
        .collect();
    ExponentVector {
        n: s.n.clone(),
        entries,
    }
}

/// `prod_{m in S} phi_m`, fully expanded.
pub fn divisor_poly(s: &DivisorSubset, cap: u64) -> Result<IntPoly> {
    if s.n.to_u64().is_none_or(|v| v > cap) {
        return Err(Error::CapExceeded {
            needed: s.n.to_string(),
            cap,
        });
    }
    s.members()
        .iter()
        .try_fold(IntPoly::one(), |acc, m| Ok(acc.mul(&cyclotomic(m, cap)?)))
}

/// `prod_{m in S} phi_m mod x^{order+1}` from the exponent vector: factors
/// with `d > order` each contribute `(-1)^{e(d)}`.
pub fn divisor_poly_trunc(s: &DivisorSubset, order: usize) -> TruncSeries<BigInt> {
    let ev = exponent_vector(s);
    let mut out = TruncSeries::one(order);
    let mut dropped = 0i64;
    for (d, e) in &ev.entries {
        match d.to_u64().filter(|&v| v <= order as u64) {
            Some(v) => out.mul_x_pow_minus_one_pow(v as usize, *e),
            None => dropped += e,
        }
    }
    if dropped.rem_euclid(2) == 1 {
        out.negate();
    }
    out
}

/// Outcome of a maximisation over all divisors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchResult {
    pub n: FactoredInt,
    /// Coefficient index for `H(r, n)`; `None` for `B(n)`.
    pub r: Option<usize>,
    pub value: BigUint,
    pub witness: DivisorSubset,
}

#[derive(Serialize, Deserialize)]
struct SearchRecord {
    #[serde(with = "crate::serde_util::biguint")]
    n: BigUint,
    r: Option<usize>,
    #[serde(with = "crate::serde_util::biguint")]
    value: BigUint,
    witness_subset: Vec<u64>,
}

impl Serialize for SearchResult {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let witness_subset = self
            .witness
            .members()
            .iter()
            .map(|m| m.to_u64().ok_or_else(|| serde::ser::Error::custom("divisor beyond u64")))
            .collect::<std::result::Result<_, _>>()?;
        SearchRecord {
            n: self.n.value().clone(),
            r: self.r,
            value: self.value.clone(),
            witness_subset,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for SearchResult {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let rec = SearchRecord::deserialize(d)?;
        let n = rec
            .n
            .to_u64()
            .ok_or_else(|| D::Error::custom("n beyond u64"))
            .and_then(|v| FactoredInt::from_u64(v).map_err(D::Error::custom))?;
        let members = rec
            .witness_subset
            .iter()
            .map(|&m| FactoredInt::from_u64(m))
            .collect::<Result<Vec<_>>>()
            .map_err(D::Error::custom)?;
        let witness = DivisorSubset::from_members(n.clone(), &members).map_err(D::Error::custom)?;
        Ok(SearchResult {
            n,
            r: rec.r,
            value: rec.value,
            witness,
        })
    }
}

#[derive(Clone, Debug)]
struct Best<T> {
    value: T,
    mask: u64,
}

impl<T: Ord + Clone> Best<T> {
    fn offer(&mut self, value: &T, mask: u64) {
        match value.cmp(&self.value) {
            Ordering::Greater => {
                self.value = value.clone();
                self.mask = mask;
            }
            Ordering::Equal if canonical_cmp(mask, self.mask) == Ordering::Less => {
                self.mask = mask;
            }
            _ => {}
        }
    }

    fn merge(&mut self, other: &Self) {
        self.offer(&other.value, other.mask);
    }
}

trait SubsetWalker: Send {
    type Tracker: Send;

    fn tracker(&self) -> Self::Tracker;
    /// Insert (`true`) or remove divisor number `bit` from the product.
    fn toggle(&mut self, bit: usize, insert: bool);
    fn record(&self, mask: u64, tracker: &mut Self::Tracker);
    fn merge(into: &mut Self::Tracker, other: Self::Tracker);
}

/// Visit all `2^dims` masks and reduce the trackers.
fn walk_all<W, F>(dims: usize, workers: usize, make: F) -> W::Tracker
where
    W: SubsetWalker,
    F: Fn() -> W + Sync,
{
    let high_bits = if workers <= 1 {
        0
    } else {
        let want = (usize::BITS - (workers - 1).leading_zeros()) as usize + 3;
        want.min(dims)
    };
    let low_bits = dims - high_bits;
    let run_chunk = |chunk: u64| {
        let mut walker = make();
        let mut tracker = walker.tracker();
        let mut mask = 0u64;
        for b in 0..high_bits {
            if chunk >> b & 1 == 1 {
                let bit = low_bits + b;
                walker.toggle(bit, true);
                mask |= 1 << bit;
            }
        }
        walker.record(mask, &mut tracker);
        for k in 1..(1u64 << low_bits) {
            let bit = k.trailing_zeros() as usize;
            mask ^= 1 << bit;
            walker.toggle(bit, mask >> bit & 1 == 1);
            walker.record(mask, &mut tracker);
        }
        tracker
    };
    if high_bits == 0 {
        return run_chunk(0);
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .expect("thread pool");
    pool.install(|| {
        (0..1u64 << high_bits)
            .into_par_iter()
            .map(run_chunk)
            .reduce_with(|mut a, b| {
                W::merge(&mut a, b);
                a
            })
            .expect("at least one chunk")
    })
}

/// Running truncated product; tracks the best `|coefficient j|` for every
/// `j <= order`.
struct TruncWalker<'a, T> {
    factors: &'a [Vec<T>],
    state: TruncSeries<T>,
}

impl<T: Coefficient> SubsetWalker for TruncWalker<'_, T> {
    type Tracker = Vec<Best<T>>;

    fn tracker(&self) -> Self::Tracker {
        vec![
            Best {
                value: T::zero(),
                mask: 0,
            };
            self.state.order() + 1
        ]
    }

    fn toggle(&mut self, bit: usize, insert: bool) {
        let f = &self.factors[bit];
        if insert {
            self.state.mul_assign_series(f);
        } else {
            self.state
                .div_assign_series(f)
                .expect("cyclotomic constant term is a unit");
        }
    }

    fn record(&self, mask: u64, tracker: &mut Self::Tracker) {
        for (best, c) in tracker.iter_mut().zip(self.state.coeffs()) {
            best.offer(&c.abs(), mask);
        }
    }

    fn merge(into: &mut Self::Tracker, other: Self::Tracker) {
        for (a, b) in into.iter_mut().zip(&other) {
            a.merge(b);
        }
    }
}

/// Running full product in a fixed buffer of length `n + 1`.
struct PolyWalker<'a, T> {
    factors: &'a [Vec<T>],
    coeffs: Vec<T>,
    degree: usize,
}

impl<T: Coefficient> SubsetWalker for PolyWalker<'_, T> {
    type Tracker = Best<T>;

    fn tracker(&self) -> Self::Tracker {
        Best {
            value: T::zero(),
            mask: 0,
        }
    }

    fn toggle(&mut self, bit: usize, insert: bool) {
        let g = &self.factors[bit];
        let k = g.len() - 1;
        if insert {
            let top = self.degree + k;
            for i in (0..=top).rev() {
                let mut acc = T::zero();
                for (j, gj) in g.iter().enumerate().take(i + 1) {
                    if i - j <= self.degree && !gj.is_zero() {
                        acc.add_product(gj, &self.coeffs[i - j]);
                    }
                }
                self.coeffs[i] = acc;
            }
            self.degree = top;
        } else {
            let inv0 = g[0].unit_inverse().expect("cyclotomic constant term is a unit");
            let top = self.degree - k;
            for i in 0..=top {
                let mut acc = self.coeffs[i].clone();
                for (j, gj) in g.iter().enumerate().take(i + 1).skip(1) {
                    if !gj.is_zero() {
                        acc.sub_product(gj, &self.coeffs[i - j]);
                    }
                }
                acc *= &inv0;
                self.coeffs[i] = acc;
            }
            for c in &mut self.coeffs[top + 1..=self.degree] {
                *c = T::zero();
            }
            self.degree = top;
        }
    }

    fn record(&self, mask: u64, tracker: &mut Self::Tracker) {
        let h = self.coeffs[..=self.degree]
            .iter()
            .map(Signed::abs)
            .max()
            .expect("nonempty");
        tracker.offer(&h, mask);
    }

    fn merge(into: &mut Self::Tracker, other: Self::Tracker) {
        into.merge(&other);
    }
}

fn check_budget(n: &FactoredInt, budget: u64) -> Result<usize> {
    let d = n.divisor_count();
    let fits = d < 64 && (1u64 << d) <= budget;
    if !fits {
        return Err(Error::BudgetExceeded {
            subsets: format!("2^{d}"),
            budget,
        });
    }
    Ok(d as usize)
}

fn to_biguint<T: Coefficient + Into<BigInt>>(v: T) -> BigUint {
    v.into().magnitude().clone()
}

fn h_search<T: Coefficient + Into<BigInt>>(
    n: &FactoredInt,
    order: usize,
    dims: usize,
    workers: usize,
) -> Vec<(BigUint, u64)> {
    let factors: Vec<Vec<T>> = n
        .divisors()
        .iter()
        .map(|m| cyclotomic_trunc_in::<T>(m, order).into_coeffs())
        .collect();
    let best = walk_all(dims, workers, || TruncWalker {
        factors: &factors,
        state: TruncSeries::one(order),
    });
    best.into_iter()
        .map(|b| (to_biguint(b.value), b.mask))
        .collect()
}

/// `H(r, n)` for every `r <= max_order` from a single walk.
pub fn big_h_all(max_order: usize, n: &FactoredInt, cfg: &SearchConfig) -> Result<Vec<SearchResult>> {
    let dims = check_budget(n, cfg.subset_budget)?;
    // Every running product and every factor (or its inverse) is a series
    // dominated coefficient-wise by the same bound B, so machine integers
    // are safe when (order + 1) * B^2 fits.
    let bound = dominance_bound(max_order, n.divisor_count().max(2));
    let limit = BigRational::from_integer(BigInt::from(i64::MAX))
        / BigRational::from_integer(BigInt::from(max_order as u64 + 1));
    let raw = if &bound * &bound < limit {
        h_search::<i64>(n, max_order, dims, cfg.workers)
    } else {
        h_search::<BigInt>(n, max_order, dims, cfg.workers)
    };
    raw.into_iter()
        .enumerate()
        .map(|(r, (value, mask))| {
            Ok(SearchResult {
                n: n.clone(),
                r: Some(r),
                value,
                witness: DivisorSubset::new(n.clone(), mask)?,
            })
        })
        .collect()
}

/// `H(r, n) = max |(g)_r|` over all divisors `g` of `x^n - 1`.
pub fn big_h(r: usize, n: &FactoredInt, cfg: &SearchConfig) -> Result<SearchResult> {
    Ok(big_h_all(r, n, cfg)?.pop().expect("order + 1 results"))
}

fn b_search<T: Coefficient + Into<BigInt>>(
    dims: usize,
    degree_cap: usize,
    factors: &[IntPoly],
    workers: usize,
) -> (BigUint, u64) {
    let factors: Vec<Vec<T>> = factors
        .iter()
        .map(|f| {
            f.coeffs()
                .iter()
                .map(|c| T::from_i128(c.to_i128().expect("bounded coefficient")).unwrap())
                .collect()
        })
        .collect();
    let best = walk_all(dims, workers, || {
        let mut coeffs = vec![T::zero(); degree_cap + 1];
        coeffs[0] = T::one();
        PolyWalker {
            factors: &factors,
            coeffs,
            degree: 0,
        }
    });
    (to_biguint(best.value), best.mask)
}

/// `B(n) = max H(f)` over all divisors `f` of `x^n - 1`.
pub fn big_b(n: &FactoredInt, cfg: &SearchConfig) -> Result<SearchResult> {
    let dims = check_budget(n, cfg.height_budget)?;
    let degree = n
        .to_u64()
        .filter(|&v| v <= cfg.materialization_cap)
        .ok_or_else(|| Error::CapExceeded {
            needed: n.to_string(),
            cap: cfg.materialization_cap,
        })? as usize;
    let phis: Vec<IntPoly> = n
        .divisors()
        .iter()
        .map(|m| cyclotomic(m, cfg.materialization_cap))
        .collect::<Result<_>>()?;
    // Every partial product has l1 norm at most the product of the factors'
    // l1 norms; keep that (times two for the division sums) inside i128.
    let l1_bits: u64 = phis
        .iter()
        .map(|f| {
            f.coeffs()
                .iter()
                .fold(BigUint::zero(), |acc, c| acc + c.magnitude())
                .bits()
        })
        .sum();
    let (value, mask) = if l1_bits < 120 {
        b_search::<i128>(dims, degree, &phis, cfg.workers)
    } else {
        let wide: Vec<Vec<BigInt>> = phis.iter().map(|f| f.coeffs().to_vec()).collect();
        let best = walk_all(dims, cfg.workers, || {
            let mut coeffs = vec![BigInt::zero(); degree + 1];
            coeffs[0] = BigInt::from(1);
            PolyWalker {
                factors: &wide,
                coeffs,
                degree: 0,
            }
        });
        (to_biguint(best.value), best.mask)
    };
    Ok(SearchResult {
        n: n.clone(),
        r: None,
        value,
        witness: DivisorSubset::new(n.clone(), mask)?,
    })
}
