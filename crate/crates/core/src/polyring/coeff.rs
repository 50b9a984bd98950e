use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, NumAssignRef, One, Signed, Zero};

/// Exact coefficient ring for [`TruncSeries`](super::TruncSeries).
///
/// Machine integers are used on hot search paths only after a bound check
/// shows every intermediate value fits.
pub trait Coefficient:
    Clone + Debug + Ord + Signed + NumAssignRef + FromPrimitive + Send + Sync + 'static
{
    /// Multiplicative inverse, if one exists in the ring.
    fn unit_inverse(&self) -> Option<Self>;

    /// `self += a * b`.
    fn add_product(&mut self, a: &Self, b: &Self) {
        let mut t = a.clone();
        t *= b;
        *self += &t;
    }

    /// `self -= a * b`.
    fn sub_product(&mut self, a: &Self, b: &Self) {
        let mut t = a.clone();
        t *= b;
        *self -= &t;
    }
}

macro_rules! machine_coefficient {
    ($($t:ty),*) => {$(
        impl Coefficient for $t {
            fn unit_inverse(&self) -> Option<Self> {
                (*self == 1 || *self == -1).then_some(*self)
            }

            #[inline]
            fn add_product(&mut self, a: &Self, b: &Self) {
                *self += a * b;
            }

            #[inline]
            fn sub_product(&mut self, a: &Self, b: &Self) {
                *self -= a * b;
            }
        }
    )*};
}

machine_coefficient!(i64, i128);

impl Coefficient for BigInt {
    fn unit_inverse(&self) -> Option<Self> {
        (self.is_one() || (-self).is_one()).then(|| self.clone())
    }
}

impl Coefficient for BigRational {
    fn unit_inverse(&self) -> Option<Self> {
        (!self.is_zero()).then(|| self.recip())
    }
}
