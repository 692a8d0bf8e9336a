//! Expert Iteration laboratory.
//!
//! A PUCT tree search guided by a linear softmax apprentice generates
//! self-play experience; the apprentice is trained to imitate the search's
//! visit-count distribution. Experience can be re-weighted by episode
//! duration, sampled by priority, or collected under a learned exploration
//! policy, and trained agents are compared in round-robin tournaments ranked
//! with alpha-rank.

pub mod checkpoint;
pub mod error;
pub mod eval;
pub mod features;
pub mod game;
pub mod io;
pub mod par;
pub mod policy;
pub mod replay;
pub mod search;
pub mod seed;
pub mod train;

pub use error::{Error, Result};
