//! JSON helpers for arbitrary-precision integers.
//!
//! Values that fit in 64 bits are written as plain JSON numbers; anything
//! larger is written as a decimal string so no digits are lost. Both forms
//! are accepted on input.

use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Deserialize)]
#[serde(untagged)]
enum IntRepr {
    Signed(i64),
    Unsigned(u64),
    Text(String),
}

impl IntRepr {
    fn into_bigint<E: serde::de::Error>(self) -> Result<BigInt, E> {
        match self {
            IntRepr::Signed(v) => Ok(v.into()),
            IntRepr::Unsigned(v) => Ok(v.into()),
            IntRepr::Text(s) => BigInt::from_str(&s).map_err(E::custom),
        }
    }
}

struct Json<'a>(&'a BigInt);

impl Serialize for Json<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self.0.to_i64() {
            Some(v) => s.serialize_i64(v),
            None => s.serialize_str(&self.0.to_string()),
        }
    }
}

pub mod bigint {
    use super::*;

    pub fn serialize<S: Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        Json(v).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
        IntRepr::deserialize(d)?.into_bigint()
    }
}

pub mod biguint {
    use super::*;

    pub fn serialize<S: Serializer>(v: &BigUint, s: S) -> Result<S::Ok, S::Error> {
        match v.to_u64() {
            Some(x) => s.serialize_u64(x),
            None => s.serialize_str(&v.to_string()),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigUint, D::Error> {
        let v = IntRepr::deserialize(d)?.into_bigint::<D::Error>()?;
        v.to_biguint()
            .ok_or_else(|| serde::de::Error::custom("expected a nonnegative integer"))
    }
}

pub mod bigint_vec {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(Json))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigInt>, D::Error> {
        Vec::<IntRepr>::deserialize(d)?
            .into_iter()
            .map(IntRepr::into_bigint)
            .collect()
    }
}

/// Rationals as `"p/q"` strings (or `"p"` for integers).
pub mod rational {
    use super::*;

    pub fn serialize<S: Serializer>(v: &BigRational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigRational, D::Error> {
        let s = String::deserialize(d)?;
        BigRational::from_str(&s).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Serialize, Deserialize, PartialEq, Debug)]
    struct Probe {
        #[serde(with = "bigint")]
        a: BigInt,
        #[serde(with = "biguint")]
        b: BigUint,
        #[serde(with = "bigint_vec")]
        c: Vec<BigInt>,
        #[serde(with = "rational")]
        q: BigRational,
    }

    #[test]
    fn small_and_large_values_roundtrip() {
        let huge = BigInt::from(7u32).pow(40);
        let p = Probe {
            a: -huge.clone(),
            b: BigUint::from(12u32),
            c: vec![BigInt::from(-3), huge],
            q: BigRational::new(3.into(), (-6).into()),
        };
        let json = serde_json::to_string(&p).unwrap();
        assert!(json.contains("\"b\":12"));
        assert!(json.contains("\"q\":\"-1/2\""));
        let back: Probe = serde_json::from_str(&json).unwrap();
        assert_eq!(back, p);
    }
}
