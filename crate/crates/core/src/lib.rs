//! Placement of UAV base stations with directional antennas around a
//! rectangular building so that their indoor coverage volumes never overlap.
//!
//! * [`geometry`]: truncated coverage cones, facade circles, membership.
//! * [`link_budget`]: outdoor-to-indoor path loss and transmit power.
//! * [`packing`]: equal circles in a rectangle.
//! * [`placement`]: one-side, above-roof and alternating two-side planners.
//! * [`coverage`]: Monte-Carlo verification, facade index, holes, augmentation.
//! * [`scenario`], [`deployment`], [`commands`]: the command-line surface.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod coverage;
pub mod deployment;
pub mod error;
pub mod geometry;
pub mod link_budget;
pub mod packing;
pub mod placement;
pub mod scenario;

pub use error::{Error, Result};
pub use geometry::{BuildingDims, ConeAxis, Facade, FacadeCircle, Point3, TruncatedCone};
pub use link_budget::RadioParams;
pub use placement::{DeploymentPlan, Method, Uav};
