use thiserror::Error;

use crate::geometry::Vec2;

/// Errors raised by the geometry, dynamics and analysis layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid shape: {0}")]
    InvalidShape(String),

    /// The nearest boundary hit sits on a corner of a polygon or on an arc endpoint,
    /// where the boundary tangent is undefined.
    #[error("degenerate bounce at ({}, {})", .point.x, .point.y)]
    DegenerateBounce { point: Vec2 },

    #[error("point ({}, {}) lies inside the shape", .point.x, .point.y)]
    InsideShape { point: Vec2 },

    #[error("no part of the shape is visible from ({}, {})", .point.x, .point.y)]
    EmptyCone { point: Vec2 },

    #[error("boundary parameter {0} sits on a corner")]
    OnCorner(f64),

    #[error("boundary parameter {0} is outside the shape's parameter domain")]
    ParameterOutOfDomain(f64),

    #[error("phase point is not in the visibility domain")]
    NotVisible,

    #[error("reflected point ({}, {}) left the visibility domain", .point.x, .point.y)]
    LeftVisibility { point: Vec2 },

    #[error("bounce misses the segment: |x + h tan(theta)| = {0} > 1")]
    BounceOffSegment(f64),

    #[error("invalid segment state: {0}")]
    InvalidSegmentState(String),

    #[error("degenerate orbit: the invariant ellipse collapses to a fixed point")]
    DegenerateOrbit,

    #[error("curvature is not strictly monotone along the arc")]
    NotMonotone,

    #[error("operation requires a smooth shape")]
    NotSmooth,

    #[error("finite-difference perturbation left the visibility domain")]
    PerturbationLeftDomain,
}

pub type Result<T> = std::result::Result<T, Error>;
