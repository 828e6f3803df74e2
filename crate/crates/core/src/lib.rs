//! Arithmetic statistics over the ideals of ℚ and quadratic number fields.
//!
//! The crate enumerates prime ideals and ideals by norm, classifies ideals as
//! h-free or h-full, counts them against their asymptotic main terms,
//! evaluates the Euler-product constants those main terms need, and measures
//! how closely the normalized number of prime divisors follows the standard
//! normal law.

pub mod catalog;
pub mod constants;
pub mod counting;
pub mod ekstat;
pub mod error;
pub mod field;
pub mod ideals;
pub mod mertens;
pub mod numeric;
pub mod primeideals;
pub mod probmodel;
pub mod sieve;
pub mod zeta;

pub use error::{Error, Result};
pub use field::FieldDescriptor;
pub use ideals::{IdealEnumerator, IdealFactorization, IdealView};
pub use primeideals::PrimeIdeal;
