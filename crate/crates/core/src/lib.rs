//! Elliptic curves over Q with good reduction outside a finite set of primes.

pub mod arith;
pub mod assembly;
pub mod curve;
pub mod error;
pub mod hall;
pub mod localdata;
pub mod maxcond;
pub mod mordell;
pub mod sunit;

pub use error::{Error, Result};
