//! Quantum link invariants from planar diagrams.
//!
//! The library evaluates ribbon-category invariants of framed oriented
//! links presented by planar diagram codes. A carving decomposition of
//! the diagram's 4-valent graph is turned into a contraction schedule
//! whose intermediate tensors stay within the congestion bound of the
//! decomposition; the schedule is executed by streaming kernels over an
//! exact Laurent-polynomial ring, or over small prime fields with the
//! result reassembled by CRT and interpolation.

pub mod carving;
pub mod category;
pub mod compute;
pub mod corpus;
pub mod diagram;
pub mod engine;
pub mod kernels;
pub mod oracle;
pub mod pipeline;
pub mod planner;
pub mod ring;
pub mod scalar;
