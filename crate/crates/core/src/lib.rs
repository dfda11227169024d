//! Online fair division with unknown mean values.
//!
//! Items of `m` types arrive one per round; a policy picks a column-stochastic
//! allocation, the item goes to a random player drawn from its column, and that
//! player's noisy value is observed. The crate provides the UCB policy that keeps
//! proportionality in expectation while learning, baselines, the LP machinery it
//! relies on, a simulator, and numeric checkers for the supporting lemmas.

pub mod cli;
pub mod constraints;
pub mod error;
pub mod lemmas;
pub mod lowerbound;
pub mod lp;
pub mod model;
pub mod opt;
pub mod policies;
pub mod rng;
pub mod sim;
pub mod verify;

pub use error::{Error, Result};
pub use model::{Allocation, ConstraintKind, InstanceSpec, Matrix, ValueMatrix};
