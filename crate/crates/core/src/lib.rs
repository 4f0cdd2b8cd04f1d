//! Symmetric-cube L-functions of level-one Hecke eigenforms twisted by
//! imaginary quadratic characters: coefficients, central values, root
//! numbers, moment statistics and prime-sum diagnostics.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod crt;
pub mod error;
pub mod grh;
pub mod hecke;
pub mod lvalue;
pub mod moments;
pub mod ntt;
pub mod primes;
pub mod quadchar;
pub mod special;

pub use error::{Error, Result};
