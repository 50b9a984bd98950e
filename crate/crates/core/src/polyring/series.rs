use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::Coefficient;
use crate::{Error, Result};

/// Power series known modulo `x^{order+1}`: exactly `order + 1` stored
/// coefficients, and no operation ever looks past index `order`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TruncSeries<T> {
    coeffs: Vec<T>,
}

impl<T: Coefficient> TruncSeries<T> {
    pub fn zero(order: usize) -> Self {
        Self {
            coeffs: vec![T::zero(); order + 1],
        }
    }

    pub fn one(order: usize) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = T::one();
        s
    }

    /// Takes the first `order + 1` items, padding with zeros.
    pub fn from_coeffs<I: IntoIterator<Item = T>>(order: usize, coeffs: I) -> Self {
        let mut v: Vec<T> = coeffs.into_iter().take(order + 1).collect();
        v.resize(order + 1, T::zero());
        Self { coeffs: v }
    }

    pub fn from_i64(order: usize, coeffs: &[i64]) -> Self {
        Self::from_coeffs(
            order,
            coeffs.iter().map(|&c| T::from_i64(c).expect("small integer")),
        )
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<T> {
        self.coeffs
    }

    /// Coefficient of `x^i`; zero when `i > order`.
    pub fn coeff(&self, i: usize) -> T {
        self.coeffs.get(i).cloned().unwrap_or_else(T::zero)
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0].is_one() && self.coeffs[1..].iter().all(Zero::is_zero)
    }

    /// Product modulo `x^{order+1}`.
    pub fn trunc_mul(&self, other: &Self) -> Result<Self> {
        if self.order() != other.order() {
            return Err(Error::OrderMismatch {
                left: self.order(),
                right: other.order(),
            });
        }
        let mut out = self.clone();
        out.mul_assign_series(&other.coeffs);
        Ok(out)
    }

    /// In-place product with a series given by (at least) `order + 1`
    /// coefficients. Walks indices downward so each source entry is read
    /// before it is overwritten.
    pub(crate) fn mul_assign_series(&mut self, factor: &[T]) {
        let order = self.order();
        let support: Vec<(usize, &T)> = factor
            .iter()
            .take(order + 1)
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .collect();
        for i in (0..=order).rev() {
            let mut acc = T::zero();
            for &(j, c) in &support {
                if j > i {
                    break;
                }
                if !self.coeffs[i - j].is_zero() {
                    acc.add_product(c, &self.coeffs[i - j]);
                }
            }
            self.coeffs[i] = acc;
        }
    }

    /// In-place division by a series with invertible constant term.
    pub(crate) fn div_assign_series(&mut self, divisor: &[T]) -> Result<()> {
        let inv0 = divisor
            .first()
            .and_then(Coefficient::unit_inverse)
            .ok_or(Error::NotInvertible)?;
        let order = self.order();
        let support: Vec<(usize, &T)> = divisor
            .iter()
            .take(order + 1)
            .enumerate()
            .skip(1)
            .filter(|(_, c)| !c.is_zero())
            .collect();
        for i in 0..=order {
            let mut acc = self.coeffs[i].clone();
            for &(j, c) in &support {
                if j > i {
                    break;
                }
                acc.sub_product(c, &self.coeffs[i - j]);
            }
            acc *= &inv0;
            self.coeffs[i] = acc;
        }
        Ok(())
    }

    /// `b` with `a * b == 1` modulo `x^{order+1}`.
    pub fn trunc_inverse(&self) -> Result<Self> {
        let mut out = Self::one(self.order());
        out.div_assign_series(&self.coeffs)?;
        Ok(out)
    }

    /// Multiply in place by `1 - x^d`.
    pub fn mul_one_minus_x_pow(&mut self, d: usize) {
        assert!(d >= 1);
        for i in (d..=self.order()).rev() {
            let prev = self.coeffs[i - d].clone();
            self.coeffs[i] -= &prev;
        }
    }

    /// Multiply in place by `(1 - x^d)^{-1}`.
    pub fn div_one_minus_x_pow(&mut self, d: usize) {
        assert!(d >= 1);
        for i in d..=self.order() {
            let prev = self.coeffs[i - d].clone();
            self.coeffs[i] += &prev;
        }
    }

    /// Multiply in place by `(x^d - 1)^e`, `e` of either sign.
    pub fn mul_x_pow_minus_one_pow(&mut self, d: usize, e: i64) {
        for _ in 0..e.unsigned_abs() {
            if e > 0 {
                self.mul_one_minus_x_pow(d);
            } else {
                self.div_one_minus_x_pow(d);
            }
        }
        if e.unsigned_abs() % 2 == 1 {
            self.negate();
        }
    }

    pub fn negate(&mut self) {
        for c in &mut self.coeffs {
            *c = -std::mem::replace(c, T::zero());
        }
    }

    /// Same series at a smaller (or equal) order.
    pub fn truncated(&self, order: usize) -> Self {
        Self::from_coeffs(order, self.coeffs.iter().cloned())
    }

    pub fn map<U: Coefficient>(&self, f: impl Fn(&T) -> U) -> TruncSeries<U> {
        TruncSeries {
            coeffs: self.coeffs.iter().map(f).collect(),
        }
    }
}

impl TruncSeries<BigInt> {
    pub fn to_rational(&self) -> TruncSeries<BigRational> {
        self.map(|c| BigRational::from_integer(c.clone()))
    }
}

/// `(1 - x^d)^{-alpha}` modulo `x^{order+1}`: coefficient of `x^{dk}` is the
/// generalized binomial `prod_{j<k} (alpha + j) / k!`.
pub fn binomial_series(alpha: &BigRational, d: usize, order: usize) -> TruncSeries<BigRational> {
    assert!(d >= 1, "binomial series needs step d >= 1");
    let mut out = TruncSeries::<BigRational>::zero(order);
    let mut term = BigRational::one();
    let mut k = 0usize;
    while k * d <= order {
        out.coeffs[k * d] = term.clone();
        term = term * (alpha + BigRational::from_integer(k.into()))
            / BigRational::from_integer((k + 1).into());
        k += 1;
    }
    out
}

impl Serialize for TruncSeries<BigInt> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        crate::serde_util::bigint_vec::serialize(&self.coeffs, serializer)
    }
}

impl<'de> Deserialize<'de> for TruncSeries<BigInt> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let coeffs = crate::serde_util::bigint_vec::deserialize(deserializer)?;
        if coeffs.is_empty() {
            return Err(serde::de::Error::custom("a truncated series has at least one coefficient"));
        }
        Ok(Self { coeffs })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::IntPoly;
    use proptest::prelude::*;

    type Q = BigRational;

    fn q(n: i64, d: i64) -> Q {
        Q::new(n.into(), d.into())
    }

    fn int_series(order: usize, c: &[i64]) -> TruncSeries<BigInt> {
        TruncSeries::from_i64(order, c)
    }

    #[test]
    fn trunc_mul_examples() {
        let a = int_series(1, &[1, 1]);
        let b = int_series(1, &[1, -1]);
        assert!(a.trunc_mul(&b).unwrap().is_one());
        let one = TruncSeries::one(1);
        assert_eq!(a.trunc_mul(&one).unwrap(), a);
        let c = int_series(2, &[1, 1, 1]);
        let d = int_series(2, &[1, -1]);
        assert!(c.trunc_mul(&d).unwrap().is_one());
        assert_eq!(
            a.trunc_mul(&c),
            Err(Error::OrderMismatch { left: 1, right: 2 })
        );
    }

    #[test]
    fn inverse_examples() {
        let a = int_series(3, &[1, -1]);
        assert_eq!(a.trunc_inverse().unwrap(), int_series(3, &[1, 1, 1, 1]));
        let two = TruncSeries::from_coeffs(2, [Q::from_integer(2.into())]);
        assert_eq!(
            two.trunc_inverse().unwrap(),
            TruncSeries::from_coeffs(2, [q(1, 2)])
        );
        let b = int_series(5, &[1, 0, -1]);
        assert_eq!(b.trunc_inverse().unwrap(), int_series(5, &[1, 0, 1, 0, 1]));
        assert_eq!(int_series(3, &[0, 1]).trunc_inverse(), Err(Error::NotInvertible));
        // 2 is not a unit over the integers.
        assert_eq!(int_series(3, &[2, 1]).trunc_inverse(), Err(Error::NotInvertible));
    }

    #[test]
    fn binomial_series_examples() {
        let one = Q::one();
        let s = binomial_series(&one, 1, 3);
        assert_eq!(s, TruncSeries::from_coeffs(3, vec![one.clone(); 4]));
        let s = binomial_series(&q(1, 2), 1, 2);
        assert_eq!(s.coeffs(), &[Q::one(), q(1, 2), q(3, 8)]);
        let s = binomial_series(&Q::from_integer(2.into()), 2, 4);
        assert_eq!(s, TruncSeries::from_i64(4, &[1, 0, 2, 0, 3]));
    }

    #[test]
    fn binomial_pow_helpers() {
        let mut s = TruncSeries::<BigInt>::one(6);
        s.mul_x_pow_minus_one_pow(2, 1);
        assert_eq!(s, int_series(6, &[-1, 0, 1]));
        s.mul_x_pow_minus_one_pow(2, -1);
        assert!(s.is_one());
        let mut t = TruncSeries::<BigInt>::one(4);
        t.div_one_minus_x_pow(1);
        t.div_one_minus_x_pow(1);
        assert_eq!(t, int_series(4, &[1, 2, 3, 4, 5]));
    }

    #[test]
    fn polynomial_truncation() {
        let f = IntPoly::from_i64(&[-1, 2, -2, 1]);
        assert_eq!(f.truncate(1), int_series(1, &[-1, 2]));
        assert_eq!(f.truncate(6), int_series(6, &[-1, 2, -2, 1]));
    }

    fn invertible_int_series() -> impl Strategy<Value = TruncSeries<BigInt>> {
        (0usize..20, prop::bool::ANY, prop::collection::vec(-50i64..=50, 20)).prop_map(
            |(order, neg, rest)| {
                let mut c = vec![if neg { -1 } else { 1 }];
                c.extend_from_slice(&rest);
                TruncSeries::from_i64(order, &c)
            },
        )
    }

    proptest! {
        #[test]
        fn inverse_roundtrip(a in invertible_int_series()) {
            let inv = a.trunc_inverse().unwrap();
            prop_assert!(a.trunc_mul(&inv).unwrap().is_one());
        }

        #[test]
        fn rational_inverse_roundtrip(
            c0 in 1i64..20,
            rest in prop::collection::vec(-9i64..=9, 0..12),
        ) {
            let mut c = vec![c0];
            c.extend(rest);
            let a = TruncSeries::<Q>::from_i64(c.len(), &c);
            let inv = a.trunc_inverse().unwrap();
            prop_assert!(a.trunc_mul(&inv).unwrap().is_one());
        }

        #[test]
        fn integer_binomial_matches_inverse(e in 0i64..6, d in 1usize..5, order in 0usize..25) {
            // (1 - x^d)^e computed integrally, then inverted.
            let mut pow = TruncSeries::<BigInt>::one(order);
            for _ in 0..e {
                pow.mul_one_minus_x_pow(d);
            }
            let expected = pow.trunc_inverse().unwrap().to_rational();
            let got = binomial_series(&Q::from_integer(e.into()), d, order);
            prop_assert_eq!(got, expected);
        }
    }
}
