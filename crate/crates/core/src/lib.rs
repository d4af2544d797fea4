//! Online list scheduling of moldable task graphs.
//!
//! A task's execution time depends on the processor count it is given at
//! launch. The engine reveals tasks as their predecessors finish, sizes them
//! with an [`engine::AllocationPolicy`] and starts them greedily. Around it
//! sit the two-step allocator, makespan lower bounds, an exact oracle for
//! tiny graphs and generators for adversarial instances.

pub mod allocator;
pub mod audit;
pub mod bounds;
pub mod engine;
pub mod error;
pub mod instances;
pub mod model;
pub mod par;

pub use error::{Error, Result};
