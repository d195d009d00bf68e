//! Deployment planners.
//!
//! * FOBS: every UAV in front of side A, cones packed as circles on the
//!   `y_b x z_b` facade.
//! * ABS: every UAV above the roof, cones packed on the `x_b x y_b` roof.
//! * AUDA: UAVs in front of both sides A and B in alternating upside-down
//!   order. Both facades are tiled with square cells of side `2 r_far`; a
//!   side-B UAV aims at each cell center and a side-A UAV at each cell corner.
//!   With the standoff `x_b / sqrt(2)` the small face of every cone has radius
//!   `(sqrt(2) - 1) r_far`, which makes the corner and center circles tangent.
//!   Corner UAVs on the edge of the facade cover a half or quarter cone.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{
    auda_offset, beamwidth_for_far_radius, check_beamwidth, cone_radii, cones_disjoint, gamma_ratio, BuildingDims,
    ConeAxis, Point3, TruncatedCone,
};
use crate::packing::{max_circles, DEFAULT_MAX_ITERS, DEFAULT_RESTARTS};

/// Slack for the facade-containment check.
pub const CONTAINMENT_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "FOBS")]
    Fobs,
    #[serde(rename = "ABS")]
    Abs,
    #[serde(rename = "AUDA")]
    Auda,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Fobs, Method::Abs, Method::Auda];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Fobs => "FOBS",
            Method::Abs => "ABS",
            Method::Auda => "AUDA",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "FOBS" => Ok(Method::Fobs),
            "ABS" => Ok(Method::Abs),
            "AUDA" => Ok(Method::Auda),
            other => Err(Error::Domain(format!("unknown method {other:?} (expected FOBS, ABS or AUDA)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Uav {
    pub position: Point3,
    pub cone: TruncatedCone,
    /// The cone extends past the facade rectangle and is cut by the building.
    pub clipped: bool,
    /// Radio channel; cones on different channels may overlap.
    pub channel: u32,
}

impl Uav {
    fn base(cone: TruncatedCone, building: &BuildingDims) -> Self {
        Self {
            position: cone.apex,
            clipped: !cone.within_facades(building, CONTAINMENT_TOL),
            cone,
            channel: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeploymentPlan {
    pub method: Method,
    pub theta_b: f64,
    pub standoff: f64,
    pub r_near: f64,
    pub r_far: f64,
    pub uavs: Vec<Uav>,
    /// Why the plan is empty, when it is.
    pub diagnostic: Option<String>,
}

impl DeploymentPlan {
    pub fn cones(&self) -> Vec<TruncatedCone> {
        self.uavs.iter().map(|u| u.cone).collect()
    }

    /// Constraint violations: overlapping same-channel cones and unclipped
    /// cones leaving their facade rectangle.
    pub fn violations(&self, building: &BuildingDims) -> Vec<String> {
        let mut out = Vec::new();
        for (i, a) in self.uavs.iter().enumerate() {
            if !a.clipped && !a.cone.within_facades(building, CONTAINMENT_TOL) {
                out.push(format!("UAV {i} covers outside the building"));
            }
            for (j, b) in self.uavs.iter().enumerate().skip(i + 1) {
                if a.channel == b.channel && !cones_disjoint(&a.cone, &b.cone, building) {
                    out.push(format!("UAVs {i} and {j} overlap on channel {}", a.channel));
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoverageSummary {
    pub n_uavs: usize,
    pub covered_volume: f64,
    pub fraction: f64,
}

/// UAV count, covered volume and covered share of the building. Clipped
/// cones count only their part inside the building.
pub fn plan_coverage_summary(plan: &DeploymentPlan, building: &BuildingDims) -> CoverageSummary {
    let covered_volume = plan.uavs.iter().map(|u| u.cone.clipped_volume(building)).fold(0.0, |a, b| a + b);
    CoverageSummary { n_uavs: plan.uavs.len(), covered_volume, fraction: covered_volume / building.volume() }
}

/// One-side plan with the default packing effort.
pub fn plan_fobs(building: &BuildingDims, theta_b: f64, standoff: f64, seed: u64) -> Result<DeploymentPlan> {
    plan_packed(Method::Fobs, building, theta_b, standoff, seed, DEFAULT_RESTARTS, DEFAULT_MAX_ITERS)
}

/// Above-roof plan with the default packing effort.
pub fn plan_abs(building: &BuildingDims, theta_b: f64, standoff_z: f64, seed: u64) -> Result<DeploymentPlan> {
    plan_packed(Method::Abs, building, theta_b, standoff_z, seed, DEFAULT_RESTARTS, DEFAULT_MAX_ITERS)
}

/// FOBS or ABS: pack the far-face circles on the target facade and put one
/// UAV in front of each circle center.
pub fn plan_packed(
    method: Method,
    building: &BuildingDims,
    theta_b: f64,
    standoff: f64,
    seed: u64,
    restarts: usize,
    max_iters: usize,
) -> Result<DeploymentPlan> {
    let axis = match method {
        Method::Fobs => ConeAxis::PlusX,
        Method::Abs => ConeAxis::MinusZ,
        Method::Auda => return Err(Error::Domain("AUDA plans are built by plan_auda".into())),
    };
    check_beamwidth(theta_b)?;
    let span = building.span(axis);
    let (r_near, r_far) = cone_radii(standoff, span, theta_b)?;
    let rect = building.facade_rect(axis);
    let (n, sol) = max_circles(r_far, rect[1], rect[3], seed, restarts, max_iters);
    let mut uavs = Vec::with_capacity(n);
    for c in sol.centers.iter().take(n) {
        let cone = TruncatedCone::new(building, axis, *c, standoff, theta_b)?;
        uavs.push(Uav::base(cone, building));
    }
    let diagnostic = (n == 0).then(|| "no circle fits".to_string());
    Ok(DeploymentPlan { method, theta_b, standoff, r_near, r_far, uavs, diagnostic })
}

/// Alternating upside-down arrangement for far-face radius `r_far`.
pub fn plan_auda(building: &BuildingDims, r_far: f64) -> Result<DeploymentPlan> {
    if !(r_far.is_finite() && r_far > 0.0) {
        return Err(Error::Domain(format!("r_far must be positive, got {r_far}")));
    }
    let span = building.x_b;
    let standoff = auda_offset(span)?;
    let r_near = gamma_ratio() * r_far;
    let theta_b = beamwidth_for_far_radius(r_far, standoff, span)?;
    let mut plan = DeploymentPlan {
        method: Method::Auda,
        theta_b,
        standoff,
        r_near,
        r_far,
        uavs: Vec::new(),
        diagnostic: None,
    };
    let ny = cells_along(building.y_b, r_far);
    let nz = cells_along(building.z_b, r_far);
    if ny == 0 || nz == 0 {
        plan.diagnostic = Some("no circle fits".to_string());
        return Ok(plan);
    }
    let pitch = 2.0 * r_far;
    // Side B: one UAV per cell, aimed at the cell center.
    for k1 in 1..=ny {
        for s1 in 1..=nz {
            let foot = [(2 * k1 - 1) as f64 * r_far, (2 * s1 - 1) as f64 * r_far];
            let cone = TruncatedCone::from_radii(building, ConeAxis::MinusX, foot, r_near, r_far)?;
            plan.uavs.push(Uav::base(cone, building));
        }
    }
    // Side A: one UAV per cell corner. Corners on the tiled border cover a
    // half or quarter cone.
    for k2 in 0..=ny {
        for s2 in 0..=nz {
            let foot = [k2 as f64 * pitch, s2 as f64 * pitch];
            let cone = TruncatedCone::from_radii(building, ConeAxis::PlusX, foot, r_near, r_far)?;
            plan.uavs.push(Uav::base(cone, building));
        }
    }
    Ok(plan)
}

/// Whole cells of side `2 r_far` along a length, forgiving rounding in
/// `r_far` such as a round trip through the beamwidth.
fn cells_along(len: f64, r_far: f64) -> usize {
    (len / (2.0 * r_far) * (1.0 + 1e-9)).floor() as usize
}

/// Number of square cells of side `2 r_far` on a `y_b x z_b` facade.
pub fn auda_cell_count(building: &BuildingDims, r_far: f64) -> usize {
    cells_along(building.y_b, r_far) * cells_along(building.z_b, r_far)
}

/// Covered share predicted by the cell formula: two truncated cones of
/// volume `(pi/3) x_b (r_i^2 + r_i r_j + r_j^2)` per cell, with
/// `floor(y_b z_b / 4 r_j^2)` cells.
pub fn cell_formula_fraction(building: &BuildingDims, r_far: f64) -> f64 {
    let g = gamma_ratio();
    let cells = (building.y_b * building.z_b / (4.0 * r_far * r_far) * (1.0 + 1e-9)).floor();
    let cone = (std::f64::consts::PI / 3.0) * building.x_b * r_far * r_far * (g * g + g + 1.0);
    cells * 2.0 * cone / building.volume()
}
