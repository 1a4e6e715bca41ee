//! Executable densities on subsets of the positive integers.
//!
//! The crate builds without `std` (only `alloc`) when default features are off.
//! Sets are lazy expressions ([`SetExpr`]); everything else (density
//! estimators, summable ideals, almost-disjoint families, the witness-family
//! density) is a pure function over them.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod axioms;
pub mod counterexamples;
pub mod densities;
mod error;
pub mod ideals;
pub mod intset;
mod numeric;
pub mod tad;
pub mod thm1;

pub use error::{Error, Result};
pub use intset::{BlockSchedule, Enumerator, MemberTag, Registry, SetExpr};
