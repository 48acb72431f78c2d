//! Animat action selection driven by a two-node blackboard network, with a
//! motivation degree that adapts to how scarce or abundant the stimuli that
//! satisfy each need turn out to be.
//!
//! - [`motivation`]: stimulus combination and the alpha update curves.
//! - [`network`]: the cognitive and motivational blackboard nodes.
//! - [`world`]: 2-D environment, perception, locomotion and physiology.
//! - [`harness`]: scenarios, seeded runs, traces and metrics.
//! - [`batch`]: many seeds at once.

pub mod batch;
pub mod error;
pub mod harness;
pub mod motivation;
pub mod network;
pub mod world;

pub use error::{CoreError, Result};
