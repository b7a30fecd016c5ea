//! Shadowing curves: trajectories that keep a fixed distance from a point
//! moving along a closed planar curve, while moving only along the line
//! joining them.

pub mod circle_oracle;
pub mod dynamics;
pub mod error;
pub mod export;
pub mod geometry;
pub(crate) mod ode;
pub mod rotation;
pub mod singularities;
pub mod vec2;

pub use dynamics::{IntegrationConfig, Method, PoincareMap, Trajectory, TrajectorySample};
pub use error::{Error, ErrorKind, Result};
pub use geometry::{ClosedCurve, CurveMetrics, CurveSpec, FourierSeries};
pub use rotation::{DistanceKind, DistanceReport, RotationEstimate, SweepPoint};
pub use singularities::{Branch, CuspCountReport, CuspEvent};
pub use vec2::Vec2;
