//! Exact computation of probabilistic degenerate Whitney numbers, Dowling
//! polynomials and their `r`-shifted variants for random variables given by
//! rational moment sequences.
//!
//! Numbers are exact [`Rational`]s throughout. Every object can be computed by
//! more than one route, and [`identities`] turns the relations between them
//! into executable checks.

pub mod bell;
pub mod dowling;
pub mod error;
pub mod identities;
pub mod moments;
pub mod montecarlo;
pub mod poly;
pub mod ratcore;
pub mod series;

pub use dowling::{Route, WhitneyTriangle};
pub use error::{Error, Result};
pub use moments::{ModelKind, MomentModel};
pub use poly::PolyX;
pub use ratcore::{Params, Rational};
pub use series::EgfSeries;
