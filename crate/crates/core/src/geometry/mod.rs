//! Computational domain: grid, player regions, boundary tagging and the
//! convective field.

pub mod boundary;
pub mod convection;
pub mod grid;
pub mod region;

pub use boundary::{AxisName, BcSide, BoundarySpec, ResolvedBc, SegmentLocus, SegmentRule};
pub use convection::{sample_convection, ConvectionField, ConvectionPiece, HalfPlane, SampledConvection};
pub use grid::{Axis, BoundaryFace, Grid, InteriorFace, Outward, Rect};
pub use region::{Interface, RegionPartition};
