//! Polynomial partitioning of finite point sets with exact arithmetic.
//!
//! Points and polynomials carry rational coordinates and coefficients. Signs
//! and ranks are always decided exactly; floating point appears only inside
//! the ham-sandwich search, whose answers are re-verified.

pub mod bounds;
pub mod error;
pub mod hamsandwich;
pub mod incidence;
pub mod linalg;
pub mod partition;
pub mod poly;
pub mod rational;
pub mod report;
pub mod schedule;
pub mod variety;
pub mod veronese;

pub use error::{Error, ErrorCategory, Result};
pub use poly::{Monomial, Point, PointSet, Polynomial, Sign};
pub use rational::Rational;
