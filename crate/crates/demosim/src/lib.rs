//! demosim: deterministic, seedable simulations of collective decision
//! mechanisms.
//!
//! Three mechanisms share one toolkit:
//!
//! - [`condorcet`] computes the probability that a majority of independent
//!   voters picks the better of two options, across voter count and
//!   per-voter competence.
//! - [`trustnet`] + [`ddd`] generate trust networks over a citizen
//!   population and let any active subset stand in for everyone by flowing
//!   "vote power" from abstainers to participants along trust links.
//! - [`market`] pits an incentive-free decision market against one whose
//!   participants self-select by their best knowledge.
//!
//! [`experiments`] wraps the three in a reproducible sweep harness (derived
//! seeds, replication scheduling, CSV output), and [`cli`] exposes it all as
//! the `demosim` binary. The `examples/` directory has one runnable program
//! per capability; start there.
//!
//! Everything is deterministic given a master seed: replication seeds are
//! derived by a documented mixing function, and aggregation folds results in
//! replication order, so output bytes are independent of thread count.

pub mod condorcet;
pub mod ddd;
pub mod error;
pub mod experiments;
pub mod market;
pub mod rng;
pub mod trustnet;

pub mod cli;

pub use error::{Error, Result};
