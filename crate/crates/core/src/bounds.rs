//! Upper and lower bounds for `H(r, n)`, plus the logarithmic statistics
//! used in the exploratory tables.

use std::fmt::Write as _;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::constructions::extremal_coeff;
use crate::numtheory::{FactoredInt, primorial};
use crate::polyring::{TruncSeries, binomial_series};
use crate::search::{SearchConfig, big_b, big_h_all};
use crate::{Error, Result};

/// Width of the lower band in [`check_lower`]: the normalised ratio must lie
/// within `1 +- LOWER_BAND_FACTOR * r^2 / d(n_k)`.
pub const LOWER_BAND_FACTOR: u64 = 8;

fn rat(v: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(v.into())
}

fn factorial(r: usize) -> BigInt {
    (1..=r as u64).fold(BigInt::one(), |acc, i| acc * i)
}

/// Coefficient of `x^r` in `prod_{i=1}^{r} (1 - x^i)^{-d_n/2}`.
///
/// Every divisor of `x^n - 1` is `prod (x^d - 1)^{e(d)}` with
/// `|e(d)| <= d(n)/2` (for `n > 1`), so this dominates `H(r, n)`.
pub fn dominance_bound(r: usize, d_n: u64) -> BigRational {
    let alpha = BigRational::new(d_n.into(), 2.into());
    let mut acc = TruncSeries::<BigRational>::one(r);
    for i in 1..=r {
        acc = acc
            .trunc_mul(&binomial_series(&alpha, i, r))
            .expect("same order");
    }
    acc.coeff(r)
}

/// `d_n^r / (2^r r!)`.
pub fn leading_term(r: usize, d_n: u64) -> BigRational {
    let num = BigInt::from(d_n).pow(r as u32);
    let den = (BigInt::one() << r) * factorial(r);
    BigRational::new(num, den)
}

/// Multiplicity vectors `(i_1, .., i_r)` with `sum j * i_j = r`.
fn weighted_compositions(r: usize) -> Vec<Vec<usize>> {
    fn go(j: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if j == 0 {
            if left == 0 {
                out.push(cur.clone());
            }
            return;
        }
        for i in 0..=left / j {
            cur[j - 1] = i;
            go(j - 1, left - i * j, cur, out);
        }
        cur[j - 1] = 0;
    }
    let mut out = Vec::new();
    go(r, r, &mut vec![0; r], &mut out);
    out
}

/// The coefficient of `x^r` in `(sum c_i x^i)^D`, `c` the coefficients of
/// `prod (1 - x^i)^{-1/2}`, as a polynomial in `D` (ascending coefficients).
///
/// Summed term by term over the multinomial expansion, each term being
/// `D (D-1) .. (D-s+1) / (i_1! .. i_r!) * c_1^{i_1} .. c_r^{i_r}` with
/// `s = i_1 + .. + i_r`.
pub fn multinomial_polynomial(r: usize) -> Vec<BigRational> {
    let half = BigRational::new(1.into(), 2.into());
    let mut base = TruncSeries::<BigRational>::one(r);
    for i in 1..=r {
        base = base
            .trunc_mul(&binomial_series(&half, i, r))
            .expect("same order");
    }
    let c = base.coeffs();
    let mut total = vec![BigRational::zero(); r + 1];
    for parts in weighted_compositions(r) {
        let mut weight = BigRational::one();
        for (j, &i) in parts.iter().enumerate() {
            weight = weight * num_traits::pow(c[j + 1].clone(), i) / rat(factorial(i));
        }
        let s: usize = parts.iter().sum();
        // falling factorial D (D-1) .. (D-s+1) expanded in powers of D
        let mut falling = vec![BigRational::one()];
        for t in 0..s {
            let mut next = vec![BigRational::zero(); falling.len() + 1];
            for (k, a) in falling.iter().enumerate() {
                next[k + 1] += a;
                next[k] -= a * rat(t as u64);
            }
            falling = next;
        }
        for (k, a) in falling.into_iter().enumerate() {
            total[k] += a * &weight;
        }
    }
    total
}

/// The single dominant-partition term `i_1 = r`: `binom(D, r) / 2^r`.
pub fn dominant_partition_term(r: usize, d_n: u64) -> BigRational {
    let mut falling = BigInt::one();
    for t in 0..r as u64 {
        falling *= BigInt::from(d_n) - t;
    }
    BigRational::new(falling, (BigInt::one() << r) * factorial(r))
}

pub fn eval_polynomial(poly: &[BigRational], x: u64) -> BigRational {
    let x = rat(x);
    poly.iter()
        .rev()
        .fold(BigRational::zero(), |acc, c| acc * &x + c)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundKind {
    Upper,
    Lower,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundReport {
    pub kind: BoundKind,
    pub r: usize,
    pub n: FactoredInt,
    pub d_n: u64,
    #[serde(with = "crate::serde_util::rational")]
    pub exact_bound: BigRational,
    #[serde(with = "crate::serde_util::rational")]
    pub leading_term: BigRational,
    /// `H(r, n)` for upper reports, `|(f_k)_r|` for lower ones.
    #[serde(with = "crate::serde_util::biguint")]
    pub observed: BigUint,
    /// `observed / leading_term`.
    #[serde(with = "crate::serde_util::rational")]
    pub ratio: BigRational,
    /// `observed / exact_bound`.
    #[serde(with = "crate::serde_util::rational")]
    pub bound_ratio: BigRational,
    /// Exhaustive `H(r, n_k)` for lower reports small enough to search.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub height: Option<String>,
    pub holds: bool,
}

fn upper_report(r: usize, n: &FactoredInt, d_n: u64, observed: BigUint) -> BoundReport {
    let exact_bound = dominance_bound(r, d_n);
    let lead = leading_term(r, d_n);
    let obs = rat(BigInt::from(observed.clone()));
    BoundReport {
        kind: BoundKind::Upper,
        r,
        n: n.clone(),
        d_n,
        ratio: &obs / &lead,
        bound_ratio: &obs / &exact_bound,
        holds: obs <= exact_bound,
        exact_bound,
        leading_term: lead,
        observed,
        height: None,
    }
}

/// `H(r, n)` against the dominating series.
pub fn check_upper(r: usize, n: &FactoredInt, cfg: &SearchConfig) -> Result<BoundReport> {
    let h = big_h_all(r, n, cfg)?.pop().expect("order + 1 results");
    Ok(upper_report(r, n, n.divisor_count(), h.value))
}

/// Every `(r, n)` with `r <= r_max`, `1 <= n <= n_max`, ordered by `(r, n)`.
/// One walk per `n` yields all orders; the `n` are spread over the workers.
pub fn check_upper_grid(r_max: usize, n_max: u64, cfg: &SearchConfig) -> Result<Vec<BoundReport>> {
    let inner = SearchConfig {
        workers: 1,
        ..cfg.clone()
    };
    let per_n = |n: u64| -> Result<Vec<BoundReport>> {
        let nf = FactoredInt::from_u64(n)?;
        let d_n = nf.divisor_count();
        Ok(big_h_all(r_max, &nf, &inner)?
            .into_iter()
            .enumerate()
            .map(|(r, h)| upper_report(r, &nf, d_n, h.value))
            .collect())
    };
    let columns: Vec<Vec<BoundReport>> = if cfg.workers <= 1 {
        (1..=n_max).map(per_n).collect::<Result<_>>()?
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.workers)
            .build()
            .map_err(|e| Error::Precondition(e.to_string()))?
            .install(|| (1..=n_max).into_par_iter().map(per_n).collect::<Result<_>>())?
    };
    let mut out: Vec<BoundReport> = columns.into_iter().flatten().collect();
    out.sort_by(|a, b| (a.r, &a.n).cmp(&(b.r, &b.n)));
    Ok(out)
}

/// `|(f_k)_r|` for the primorial `n_k` against the leading term.
pub fn check_lower(r: usize, k: usize, cfg: &SearchConfig) -> Result<BoundReport> {
    if k < r.max(1) {
        return Err(Error::Precondition(format!("need k >= max(r, 1), got r={r}, k={k}")));
    }
    let n = primorial(k)?;
    let d_n = n.divisor_count();
    let observed = extremal_coeff(k, r)?.magnitude().clone();
    let exact_bound = dominance_bound(r, d_n);
    let lead = leading_term(r, d_n);
    let obs = rat(BigInt::from(observed.clone()));
    let ratio = &obs / &lead;
    let band = BigRational::new((LOWER_BAND_FACTOR * (r * r) as u64).into(), d_n.into());
    let mut holds = (&ratio - BigRational::one()).abs() <= band;
    let height = match big_h_all(r, &n, cfg) {
        Ok(mut all) => {
            let h = all.pop().expect("order + 1 results").value;
            holds &= observed <= h;
            Some(h.to_string())
        }
        Err(Error::BudgetExceeded { .. }) => None,
        Err(e) => return Err(e),
    };
    Ok(BoundReport {
        kind: BoundKind::Lower,
        r,
        n,
        d_n,
        bound_ratio: &obs / &exact_bound,
        exact_bound,
        leading_term: lead,
        observed,
        ratio,
        height,
        holds,
    })
}

pub fn bounds_csv(reports: &[BoundReport]) -> String {
    let mut out = String::from("r,n,d_n,H_rn,dominance_bound,leading_term,ratio\n");
    for rep in reports {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            rep.r,
            rep.n,
            rep.d_n,
            rep.observed,
            rep.exact_bound,
            rep.leading_term,
            decimal(&rep.ratio, 12)
        );
    }
    out
}

/// Fixed-point natural logarithms on big integers.
mod precise {
    use num_bigint::{BigInt, BigUint, Sign};
    use num_traits::{Signed, Zero};

    /// Fractional bits carried; about 96 decimal digits.
    pub const BITS: u64 = 320;

    fn atanh(z: &BigInt) -> BigInt {
        let z2 = (z * z) >> BITS;
        let mut term = z.clone();
        let mut sum = BigInt::zero();
        let mut k = 1u64;
        while !term.is_zero() {
            sum += &term / k;
            term = (term * &z2) >> BITS;
            k += 2;
        }
        sum
    }

    fn ln2() -> BigInt {
        let third = (BigInt::from(1) << BITS) / 3;
        atanh(&third) * 2
    }

    /// `ln(num / den) * 2^BITS`, both positive.
    pub fn ln_ratio(num: &BigUint, den: &BigUint) -> BigInt {
        assert!(!num.is_zero() && !den.is_zero(), "logarithm of zero");
        let k = num.bits() as i64 - den.bits() as i64;
        let mut a = BigInt::from_biguint(Sign::Plus, num.clone()) << BITS;
        let mut b = BigInt::from_biguint(Sign::Plus, den.clone());
        if k >= 0 {
            b <<= k as u64;
        } else {
            a <<= k.unsigned_abs();
        }
        // y = num / (den 2^k) lies in (1/2, 2)
        let y = a / b;
        let one = BigInt::from(1) << BITS;
        let z = ((&y - &one) << BITS) / (&y + &one);
        atanh(&z) * 2 + ln2() * k
    }

    pub fn to_biguint(v: &BigInt) -> BigUint {
        assert!(!v.is_negative());
        v.magnitude().clone()
    }
}

fn fixed_to_rational(v: BigInt) -> BigRational {
    BigRational::new(v, BigInt::one() << precise::BITS)
}

/// `ln x` of a positive integer, accurate to about 90 digits.
pub fn ln(x: &BigUint) -> BigRational {
    fixed_to_rational(precise::ln_ratio(x, &BigUint::one()))
}

/// `ln ln x`, `x >= 3`.
fn ln_ln_fixed(x: &BigUint) -> BigInt {
    let l = precise::ln_ratio(x, &BigUint::one());
    precise::ln_ratio(&precise::to_biguint(&l), &(BigUint::one() << precise::BITS))
}

/// `log d(n) * log log n / log n`, the exponent `e` in `d(n) = n^{e / log log n}`.
pub fn ramanujan_stat(n: &FactoredInt) -> Result<BigRational> {
    if *n.value() < BigUint::from(3u32) {
        return Err(Error::Precondition(format!(
            "ramanujan_stat needs n >= 3 (log log n <= 0 below), got {n}"
        )));
    }
    let ln_d = precise::ln_ratio(&BigUint::from(n.divisor_count()), &BigUint::one());
    let ln_n = precise::ln_ratio(n.value(), &BigUint::one());
    let ln_ln_n = ln_ln_fixed(n.value());
    Ok(fixed_to_rational((ln_d * ln_ln_n) / ln_n))
}

/// `log log B(n) / (log n / log log n)`; `None` when `B(n) = 1`.
pub fn height_growth_stat(n: &FactoredInt, b_n: &BigUint) -> Result<Option<BigRational>> {
    if *n.value() < BigUint::from(3u32) {
        return Err(Error::Precondition(format!("needs n >= 3, got {n}")));
    }
    if *b_n <= BigUint::one() {
        return Ok(None);
    }
    let ln_b = precise::ln_ratio(b_n, &BigUint::one());
    let ln_ln_b = precise::ln_ratio(&precise::to_biguint(&ln_b), &(BigUint::one() << precise::BITS));
    let ln_n = precise::ln_ratio(n.value(), &BigUint::one());
    let ln_ln_n = ln_ln_fixed(n.value());
    Ok(Some(fixed_to_rational((ln_ln_b * ln_ln_n) / ln_n)))
}

/// Rounded decimal expansion with `digits` places after the point.
pub fn decimal(q: &BigRational, digits: usize) -> String {
    let scale = BigInt::from(10u32).pow(digits as u32);
    let scaled = q.abs() * BigRational::from_integer(scale.clone());
    let rounded = (scaled + BigRational::new(1.into(), 2.into())).floor().to_integer();
    let int_part = &rounded / &scale;
    let frac = (&rounded % &scale).to_string();
    let sign = if q.is_negative() && !rounded.is_zero() { "-" } else { "" };
    if digits == 0 {
        return format!("{sign}{int_part}");
    }
    format!("{sign}{int_part}.{}{frac}", "0".repeat(digits - frac.len()))
}

/// Growth statistics of f_k at one primorial.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimorialRow {
    pub k: usize,
    pub r: usize,
    pub n_k: FactoredInt,
    /// `e_k` in `d(n_k) = n_k^{(log 2 + e_k) / log log n_k}`.
    #[serde(with = "crate::serde_util::rational")]
    pub epsilon: BigRational,
    /// `|(f_k)_r| * 2^r r! / d(n_k)^r - 1`: the prefactor with the constant
    /// `1 / (2^r r!)` of the leading term divided out.
    #[serde(with = "crate::serde_util::rational")]
    pub epsilon_prime: BigRational,
}

pub fn primorial_rows(r: usize, k_max: usize) -> Result<Vec<PrimorialRow>> {
    let ln2 = ln(&BigUint::from(2u32));
    (r.max(2)..=k_max)
        .map(|k| {
            let n_k = primorial(k)?;
            let d_n = n_k.divisor_count();
            let observed = rat(extremal_coeff(k, r)?.abs());
            Ok(PrimorialRow {
                k,
                r,
                epsilon: ramanujan_stat(&n_k)? - &ln2,
                epsilon_prime: observed / leading_term(r, d_n) - BigRational::one(),
                n_k,
            })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurveyRow {
    pub n: FactoredInt,
    pub d_n: u64,
    #[serde(with = "crate::serde_util::rational")]
    pub ramanujan: BigRational,
    /// `B(n)` when the exhaustive search fits the budgets.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b_n: Option<String>,
    /// `log log B(n) * log log n / log n`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub height_growth: Option<String>,
}

/// Exploratory table for `3 <= n <= n_max`. Nothing here is asserted.
pub fn survey(n_max: u64, cfg: &SearchConfig) -> Result<Vec<SurveyRow>> {
    (3..=n_max)
        .map(|n| {
            let nf = FactoredInt::from_u64(n)?;
            let b = match big_b(&nf, cfg) {
                Ok(res) => Some(res.value),
                Err(Error::BudgetExceeded { .. } | Error::CapExceeded { .. }) => None,
                Err(e) => return Err(e),
            };
            let growth = match &b {
                Some(b) => height_growth_stat(&nf, b)?,
                None => None,
            };
            Ok(SurveyRow {
                d_n: nf.divisor_count(),
                ramanujan: ramanujan_stat(&nf)?,
                b_n: b.map(|v| v.to_string()),
                height_growth: growth.map(|g| decimal(&g, 50)),
                n: nf,
            })
        })
        .collect()
}

pub fn survey_csv(rows: &[SurveyRow]) -> String {
    let mut out = String::from("n,d_n,ramanujan_stat,B_n,height_growth\n");
    for row in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            row.n,
            row.d_n,
            decimal(&row.ramanujan, 50),
            row.b_n.as_deref().unwrap_or(""),
            row.height_growth.as_deref().unwrap_or("")
        );
    }
    out
}
