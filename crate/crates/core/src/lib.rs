//! Core engine for indoor wireless extender self-placement.
//!
//! The crate models a desk-scale RF environment (floor plan, walls,
//! log-distance propagation, a contention-aware MAC surrogate) and the
//! reasoning machinery that places relays in it: perception of per-user
//! throughput, a case base of past placements, an exploitation/exploration
//! optimizer over the candidate grid, measurement-driven throughput learning,
//! and an exhaustive solver for small instances of the underlying
//! NP-hard location problem.

pub mod cbr;
pub mod channel;
pub mod error;
pub mod geom;
pub mod learn;
pub mod link;
pub mod mcs;
pub mod netstate;
pub mod placement;
pub mod plan;
pub mod radio;

pub use error::{CoreError, Result};
pub use geom::{Point, Rect, WallSegment};
pub use plan::{FloorPlan, WallCrossing};
pub use radio::{ChannelParams, Interferer, RadioNode, Role};
