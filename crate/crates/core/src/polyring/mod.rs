//! Exact polynomial and truncated power-series arithmetic.

mod coeff;
mod intpoly;
mod series;

pub use coeff::Coefficient;
pub use intpoly::{IntPoly, Substitution};
pub use series::{TruncSeries, binomial_series};
