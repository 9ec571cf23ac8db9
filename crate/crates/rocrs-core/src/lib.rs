//! Core algorithms for contention resolution on graphic matroids.
//!
//! This crate is `no_std` (with `alloc`) and dependency-free. It houses the
//! multigraph instance model with exact scaled-integer marginals, x-topological
//! orderings with consistent tiebreaking, the selection schemes, and the exact
//! enumeration oracles. Everything IO- or thread-related lives in the `rocrs`
//! companion crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod frac;
pub mod rng;
pub mod instance;
pub mod ordering;
pub mod scheme;
pub mod oracle;
pub mod fixtures;

pub use frac::Frac;
pub use instance::{EdgeRecord, ForestChecker, Instance, InstanceError};
pub use ordering::{Labeling, Ordering, OrderingError};
pub use scheme::{ArrivalEvent, AuditViolation, CoinConfig, Selection};
