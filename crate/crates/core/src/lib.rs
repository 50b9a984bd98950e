//! Divisors of `x^n - 1` over the integers.
//!
//! The crate is organised bottom-up:
//!
//! * [`numtheory`]: Möbius function, divisor lattices, an incremental prime
//!   sieve and the prime/index sequences used by the constructions.
//! * [`polyring`]: dense polynomials over arbitrary-precision integers and
//!   truncated power series over any exact coefficient ring.
//! * [`cyclotomic`]: full and truncated cyclotomic polynomials, the
//!   factorisation of `x^n - 1`, and identity checks.
//! * [`search`]: exhaustive gray-code enumeration of all divisors of
//!   `x^n - 1`, computing `B(n)` and `H(r, n)` exactly.
//! * [`constructions`]: symbolic cyclotomic products that witness the
//!   existence results (prefix prescription, coefficient coverage, extremal
//!   primorial products).
//! * [`bounds`]: the dominating-series upper bound for `H(r, n)` and the
//!   primorial lower-bound harness.

pub mod bounds;
pub mod constructions;
pub mod cyclotomic;
mod error;
pub mod numtheory;
pub mod polyring;
pub mod search;
pub mod serde_util;

pub use error::{Error, Result};
pub use numtheory::FactoredInt;
pub use polyring::{Coefficient, IntPoly, TruncSeries};

/// Default bound on the number of coefficients a full polynomial may have.
pub const DEFAULT_MATERIALIZATION_CAP: u64 = 1_000_000;
