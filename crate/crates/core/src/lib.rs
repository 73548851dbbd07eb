//! Bouncing outer billiards: the billiard map on convex bodies, the integrable theory of
//! the segment, and numerical checks of the map's structural properties.

// `!(x > 0.0)` style checks deliberately reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod dynamics;
pub mod error;
pub mod geometry;
pub mod io;
pub mod segment_theory;
pub mod verify;

pub use dynamics::{orbit, step, step_segment, OrbitRecord, PhasePoint, SegmentState};
pub use error::{Error, Result};
pub use geometry::{Angle, Shape, Vec2};
