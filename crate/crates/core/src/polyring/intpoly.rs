use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::TruncSeries;
use crate::{Error, Result};

/// Dense polynomial over arbitrary-precision integers. Index `i` holds the
/// coefficient of `x^i`; the leading stored coefficient is never zero, so the
/// zero polynomial is the empty vector.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct IntPoly {
    #[serde(with = "crate::serde_util::bigint_vec")]
    coeffs: Vec<BigInt>,
}

/// Variable substitutions used by the cyclotomic identities.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Substitution {
    /// `f(-x)`
    NegateX,
    /// `f(x^p)`
    Power(usize),
}

impl IntPoly {
    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self {
            coeffs: vec![BigInt::one()],
        }
    }

    pub fn from_coeffs(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::from_coeffs(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    /// `x^n - 1`.
    pub fn x_pow_minus_one(n: usize) -> Self {
        let mut coeffs = vec![BigInt::zero(); n + 1];
        coeffs[n] += 1;
        coeffs[0] -= 1;
        Self::from_coeffs(coeffs)
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<BigInt> {
        self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&BigInt> {
        self.coeffs.last()
    }

    pub fn is_monic(&self) -> bool {
        self.leading().is_some_and(One::is_one)
    }

    /// `(f)_r`; zero past the degree.
    pub fn coefficient(&self, r: usize) -> BigInt {
        self.coeffs.get(r).cloned().unwrap_or_default()
    }

    /// `H(f)`: largest absolute value of a coefficient.
    pub fn height(&self) -> BigUint {
        self.coeffs
            .iter()
            .map(|c| c.magnitude())
            .max()
            .cloned()
            .unwrap_or_default()
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    out[i + j] += a * b;
                }
            }
        }
        Self::from_coeffs(out)
    }

    /// Exact quotient `f / g`.
    ///
    /// Fails with [`Error::NotDivisible`] when the remainder is nonzero or a
    /// quotient coefficient would not be integral.
    pub fn exact_div(&self, g: &Self) -> Result<Self> {
        let Some(dg) = g.degree() else {
            return Err(Error::Precondition("division by the zero polynomial".into()));
        };
        let Some(df) = self.degree() else {
            return Ok(Self::zero());
        };
        if df < dg {
            return Err(Error::NotDivisible);
        }
        let lead = &g.coeffs[dg];
        let support: Vec<(usize, &BigInt)> = g.coeffs[..dg]
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .collect();
        let mut rem = self.coeffs.clone();
        let mut quot = vec![BigInt::zero(); df - dg + 1];
        for i in (0..=df - dg).rev() {
            let top = std::mem::take(&mut rem[i + dg]);
            if top.is_zero() {
                continue;
            }
            let (q, r) = top.div_rem(lead);
            if !r.is_zero() {
                return Err(Error::NotDivisible);
            }
            for &(j, c) in &support {
                rem[i + j] -= &q * c;
            }
            quot[i] = q;
        }
        if rem.iter().any(|c| !c.is_zero()) {
            return Err(Error::NotDivisible);
        }
        Ok(Self::from_coeffs(quot))
    }

    /// `f * (x^d - 1)` in `O(deg f)`.
    pub fn mul_x_pow_minus_one(&self, d: usize) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let n = self.coeffs.len();
        let mut out = vec![BigInt::zero(); n + d];
        for (i, c) in self.coeffs.iter().enumerate() {
            out[i + d] += c;
            out[i] -= c;
        }
        Self::from_coeffs(out)
    }

    /// Exact quotient `f / (x^d - 1)` in `O(deg f)`.
    pub fn div_x_pow_minus_one(&self, d: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::Precondition("x^0 - 1 is zero".into()));
        }
        let Some(df) = self.degree() else {
            return Ok(Self::zero());
        };
        if df < d {
            return Err(Error::NotDivisible);
        }
        // f_k = q_{k-d} - q_k, solved from the top down.
        let dq = df - d;
        let mut quot = vec![BigInt::zero(); dq + 1];
        for j in (0..=dq).rev() {
            let mut v = self.coeffs[j + d].clone();
            if j + d <= dq {
                v += &quot[j + d];
            }
            quot[j] = v;
        }
        for k in 0..d {
            let q_k = quot.get(k).cloned().unwrap_or_default();
            if self.coeffs[k] != -q_k {
                return Err(Error::NotDivisible);
            }
        }
        Ok(Self::from_coeffs(quot))
    }

    /// `f(-x)` or `f(x^p)`.
    pub fn substitute(&self, mode: Substitution) -> Self {
        match mode {
            Substitution::NegateX => Self::from_coeffs(
                self.coeffs
                    .iter()
                    .enumerate()
                    .map(|(i, c)| if i % 2 == 1 { -c } else { c.clone() })
                    .collect(),
            ),
            Substitution::Power(p) => {
                assert!(p >= 1, "power substitution needs p >= 1");
                let Some(d) = self.degree() else {
                    return Self::zero();
                };
                let mut out = vec![BigInt::zero(); d * p + 1];
                for (i, c) in self.coeffs.iter().enumerate() {
                    out[i * p] = c.clone();
                }
                Self::from_coeffs(out)
            }
        }
    }

    /// `f mod x^{order+1}`.
    pub fn truncate(&self, order: usize) -> TruncSeries<BigInt> {
        TruncSeries::from_coeffs(order, self.coeffs.iter().take(order + 1).cloned())
    }
}

impl fmt::Display for IntPoly {
    /// Ascending coefficient list, e.g. `[-1, 2, -2, 1]`; zero is `[0]`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "[0]");
        }
        write!(f, "[")?;
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "]")
    }
}

impl Add for &IntPoly {
    type Output = IntPoly;

    fn add(self, rhs: &IntPoly) -> IntPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        IntPoly::from_coeffs(
            (0..n)
                .map(|i| self.coefficient(i) + rhs.coefficient(i))
                .collect(),
        )
    }
}

impl Sub for &IntPoly {
    type Output = IntPoly;

    fn sub(self, rhs: &IntPoly) -> IntPoly {
        self + &(-rhs)
    }
}

impl Neg for &IntPoly {
    type Output = IntPoly;

    fn neg(self) -> IntPoly {
        IntPoly::from_coeffs(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl Mul for &IntPoly {
    type Output = IntPoly;

    fn mul(self, rhs: &IntPoly) -> IntPoly {
        IntPoly::mul(self, rhs)
    }
}
