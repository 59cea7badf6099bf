//! Numerical laboratory for local fractional maximal operators on planar
//! domains: distance geometry, grid fields with extend-by-zero semantics,
//! the averaging operators and their angular decomposition, convex-body
//! boundary extraction, and an experiment harness with CSV/SVG reports.

pub mod decomp;
pub mod domain;
pub mod error;
pub mod field;
pub mod geom;
pub mod grid;
pub mod harness;
pub mod maximal;
pub mod raster;
pub mod sampling;

pub use domain::{BoundaryContact, Domain, PolygonSide};
pub use error::{MaxlabError, Result};
pub use geom::{Rect, Vec2};
pub use grid::GridSpec;
pub use maximal::{Alpha, Flagged, MaximalResult};
