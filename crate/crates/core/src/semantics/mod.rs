//! Structural congruence, reduction and bounded exploration.

pub mod canon;
pub mod graph;
pub mod step;

pub use canon::{canonical, canonicalize};
pub use graph::{
    always_reaches_success, always_reaches_success_in, explore, explore_many, has_divergence, has_divergence_in,
    reaches_success, reaches_success_in, trace_to_success, Bounds, Execution, StateGraph, Truth, Verdict,
};
pub use step::{capabilities, communication_pairs, successors, Capability, Label};
