//! Perron factors and capacities of slope sets, certified Diophantine
//! approximation of 2π, lacunary order, and Kakeya-blow rectangle geometry.
//!
//! The crate is `no_std` and needs only `alloc`.

#![no_std]

extern crate alloc;

pub mod constants;
pub mod decimal;
pub mod diophantine;
pub mod error;
pub mod kakeya;
pub mod lacunary;
pub mod real;
pub mod slopes;
pub mod witness;

pub use error::{Error, Result};
pub use real::{Ball, Real};
