//! Coverage geometry of directional antennas aimed at a rectangular building.
//!
//! A UAV hovering in front of a facade with its beam axis perpendicular to
//! that facade illuminates a right circular cone. Inside the building the cone
//! is truncated by the two opposite facades it passes through, so each UAV
//! covers a truncated cone whose small face lies on the near facade and whose
//! large face lies on the far facade.
//!
//! Facade-plane coordinates are `(y, z)` for cones along the x axis and
//! `(x, y)` for cones pointing down from above the roof.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// Slack used for boundary membership and tangency.
pub const BOUNDARY_TOL: f64 = 1e-9;

/// Resolution of the sampled intersection test used between cones of
/// different axis families.
pub const CROSS_FAMILY_RESOLUTION: f64 = 0.25;

/// The building occupies `[0, x_b] x [0, y_b] x [0, z_b]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BuildingDims {
    pub x_b: f64,
    pub y_b: f64,
    pub z_b: f64,
}

impl BuildingDims {
    pub fn new(x_b: f64, y_b: f64, z_b: f64) -> Result<Self> {
        for (name, v) in [("x_b", x_b), ("y_b", y_b), ("z_b", z_b)] {
            if !(v.is_finite() && v > 0.0) {
                return domain(format!("building dimension {name} must be positive and finite, got {v}"));
            }
        }
        Ok(Self { x_b, y_b, z_b })
    }

    pub fn volume(&self) -> f64 {
        self.x_b * self.y_b * self.z_b
    }

    /// Membership with `tol` slack on every face.
    pub fn contains(&self, p: Point3, tol: f64) -> bool {
        p.x >= -tol
            && p.x <= self.x_b + tol
            && p.y >= -tol
            && p.y <= self.y_b + tol
            && p.z >= -tol
            && p.z <= self.z_b + tol
    }

    /// Facade rectangle `[u0, u1] x [v0, v1]` seen by cones of the given axis.
    pub fn facade_rect(&self, axis: ConeAxis) -> [f64; 4] {
        match axis.family() {
            AxisFamily::X => [0.0, self.y_b, 0.0, self.z_b],
            AxisFamily::Z => [0.0, self.x_b, 0.0, self.y_b],
        }
    }

    /// Building extent along the cone axis.
    pub fn span(&self, axis: ConeAxis) -> f64 {
        match axis.family() {
            AxisFamily::X => self.x_b,
            AxisFamily::Z => self.z_b,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Point3 {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn distance(&self, other: &Point3) -> f64 {
        ((self.x - other.x).powi(2) + (self.y - other.y).powi(2) + (self.z - other.z).powi(2)).sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }
}

/// Beam direction of a UAV. Only the three axis-aligned directions are used.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ConeAxis {
    /// UAV in front of side A (`x < 0`), beam toward `+x`.
    #[serde(rename = "+x")]
    PlusX,
    /// UAV in front of side B (`x > x_b`), beam toward `-x`.
    #[serde(rename = "-x")]
    MinusX,
    /// UAV above the roof, beam toward `-z`.
    #[serde(rename = "-z")]
    MinusZ,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AxisFamily {
    X,
    Z,
}

impl ConeAxis {
    pub const ALL: [ConeAxis; 3] = [ConeAxis::PlusX, ConeAxis::MinusX, ConeAxis::MinusZ];

    pub fn family(self) -> AxisFamily {
        match self {
            ConeAxis::PlusX | ConeAxis::MinusX => AxisFamily::X,
            ConeAxis::MinusZ => AxisFamily::Z,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            ConeAxis::PlusX => "+x",
            ConeAxis::MinusX => "-x",
            ConeAxis::MinusZ => "-z",
        }
    }

    /// Facade the beam enters through.
    pub fn near_facade(self) -> Facade {
        match self {
            ConeAxis::PlusX => Facade::A,
            ConeAxis::MinusX => Facade::B,
            ConeAxis::MinusZ => Facade::Roof,
        }
    }

    /// Facade the beam leaves through.
    pub fn far_facade(self) -> Facade {
        match self {
            ConeAxis::PlusX => Facade::B,
            ConeAxis::MinusX => Facade::A,
            ConeAxis::MinusZ => Facade::Floor,
        }
    }

    /// Depth of `p` behind the near facade, measured along the beam.
    pub fn depth(self, building: &BuildingDims, p: Point3) -> f64 {
        match self {
            ConeAxis::PlusX => p.x,
            ConeAxis::MinusX => building.x_b - p.x,
            ConeAxis::MinusZ => building.z_b - p.z,
        }
    }

    /// Facade-plane coordinates of `p`.
    pub fn facade_coords(self, p: Point3) -> [f64; 2] {
        match self.family() {
            AxisFamily::X => [p.y, p.z],
            AxisFamily::Z => [p.x, p.y],
        }
    }

    /// 3D point at facade coordinates `uv` and signed depth behind the near facade.
    pub fn point_at(self, building: &BuildingDims, uv: [f64; 2], depth: f64) -> Point3 {
        match self {
            ConeAxis::PlusX => Point3::new(depth, uv[0], uv[1]),
            ConeAxis::MinusX => Point3::new(building.x_b - depth, uv[0], uv[1]),
            ConeAxis::MinusZ => Point3::new(uv[0], uv[1], building.z_b - depth),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Facade {
    /// `x = 0`
    A,
    /// `x = x_b`
    B,
    /// `z = z_b`
    Roof,
    /// `z = 0`
    Floor,
}

/// Intersection of a coverage cone with one building face.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FacadeCircle {
    pub facade: Facade,
    pub center: [f64; 2],
    pub radius: f64,
}

impl FacadeCircle {
    /// Closed-disc disjointness with tangency allowed.
    pub fn disjoint(&self, other: &FacadeCircle) -> bool {
        let d = (self.center[0] - other.center[0]).hypot(self.center[1] - other.center[1]);
        d >= self.radius + other.radius - BOUNDARY_TOL
    }

    /// Signed gap between the two discs (negative when they overlap).
    pub fn clearance(&self, other: &FacadeCircle) -> f64 {
        let d = (self.center[0] - other.center[0]).hypot(self.center[1] - other.center[1]);
        d - self.radius - other.radius
    }

    pub fn inside_rect(&self, rect: [f64; 4], tol: f64) -> bool {
        self.center[0] - self.radius >= rect[0] - tol
            && self.center[0] + self.radius <= rect[1] + tol
            && self.center[1] - self.radius >= rect[2] - tol
            && self.center[1] + self.radius <= rect[3] + tol
    }

    /// Area of the disc inside `rect`.
    pub fn area_in_rect(&self, rect: [f64; 4]) -> f64 {
        circle_rect_area(self.center, self.radius, rect)
    }
}

/// Indoor coverage region of one UAV.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncatedCone {
    pub axis: ConeAxis,
    /// UAV position.
    pub apex: Point3,
    /// Half of the half-power beamwidth, in degrees.
    pub half_angle_deg: f64,
    /// Axis coordinate of the facade the beam enters through.
    pub near_plane: f64,
    /// Axis coordinate of the opposite facade.
    pub far_plane: f64,
    /// Where the beam axis pierces the facades.
    pub axis_foot: [f64; 2],
    pub r_near: f64,
    pub r_far: f64,
}

impl TruncatedCone {
    /// Cone of a UAV hovering `standoff` meters in front of the near facade.
    pub fn new(
        building: &BuildingDims,
        axis: ConeAxis,
        axis_foot: [f64; 2],
        standoff: f64,
        theta_b_deg: f64,
    ) -> Result<Self> {
        let span = building.span(axis);
        let (r_near, r_far) = cone_radii(standoff, span, theta_b_deg)?;
        Self::assemble(building, axis, axis_foot, standoff, theta_b_deg / 2.0, r_near, r_far)
    }

    /// Cone with prescribed facade radii; the standoff and beamwidth follow.
    pub fn from_radii(
        building: &BuildingDims,
        axis: ConeAxis,
        axis_foot: [f64; 2],
        r_near: f64,
        r_far: f64,
    ) -> Result<Self> {
        if !(r_near > 0.0 && r_far > r_near && r_far.is_finite()) {
            return domain(format!("cone radii must satisfy 0 < r_near < r_far, got ({r_near}, {r_far})"));
        }
        let span = building.span(axis);
        let standoff = r_near * span / (r_far - r_near);
        let half = (r_far / (standoff + span)).atan().to_degrees();
        Self::assemble(building, axis, axis_foot, standoff, half, r_near, r_far)
    }

    fn assemble(
        building: &BuildingDims,
        axis: ConeAxis,
        axis_foot: [f64; 2],
        standoff: f64,
        half_angle_deg: f64,
        r_near: f64,
        r_far: f64,
    ) -> Result<Self> {
        if !(axis_foot[0].is_finite() && axis_foot[1].is_finite()) {
            return domain("axis foot must be finite");
        }
        let apex = axis.point_at(building, axis_foot, -standoff);
        let (near_plane, far_plane) = match axis {
            ConeAxis::PlusX => (0.0, building.x_b),
            ConeAxis::MinusX => (building.x_b, 0.0),
            ConeAxis::MinusZ => (building.z_b, 0.0),
        };
        Ok(Self { axis, apex, half_angle_deg, near_plane, far_plane, axis_foot, r_near, r_far })
    }

    pub fn span(&self) -> f64 {
        (self.far_plane - self.near_plane).abs()
    }

    /// Perpendicular distance from the UAV to the near facade.
    pub fn standoff(&self) -> f64 {
        let apex_axis = match self.axis.family() {
            AxisFamily::X => self.apex.x,
            AxisFamily::Z => self.apex.z,
        };
        (apex_axis - self.near_plane).abs()
    }

    pub fn theta_b_deg(&self) -> f64 {
        2.0 * self.half_angle_deg
    }

    /// Cross-section radius at `depth` meters behind the near facade.
    pub fn radius_at(&self, depth: f64) -> f64 {
        let t = (depth / self.span()).clamp(0.0, 1.0);
        self.r_near + (self.r_far - self.r_near) * t
    }

    /// Volume of the full truncated cone between the two facades.
    pub fn volume(&self) -> f64 {
        (PI / 3.0) * self.span() * (self.r_near.powi(2) + self.r_near * self.r_far + self.r_far.powi(2))
    }

    /// Whether both facade circles lie inside the facade rectangle.
    pub fn within_facades(&self, building: &BuildingDims, tol: f64) -> bool {
        let rect = building.facade_rect(self.axis);
        let (near, far) = facade_projections(self);
        near.inside_rect(rect, tol) && far.inside_rect(rect, tol)
    }

    /// Axis-aligned bounding box of the cone restricted to the building.
    pub fn bounding_box(&self, building: &BuildingDims) -> [f64; 6] {
        let [u, v] = self.axis_foot;
        let r = self.r_far;
        let (lo, hi) = match self.axis.family() {
            AxisFamily::X => (Point3::new(0.0, u - r, v - r), Point3::new(building.x_b, u + r, v + r)),
            AxisFamily::Z => (Point3::new(u - r, v - r, 0.0), Point3::new(u + r, v + r, building.z_b)),
        };
        [
            lo.x.max(0.0),
            hi.x.min(building.x_b),
            lo.y.max(0.0),
            hi.y.min(building.y_b),
            lo.z.max(0.0),
            hi.z.min(building.z_b),
        ]
    }

    /// Volume of the part of the cone inside the building.
    pub fn clipped_volume(&self, building: &BuildingDims) -> f64 {
        if self.within_facades(building, 0.0) {
            return self.volume();
        }
        let rect = building.facade_rect(self.axis);
        let span = self.span();
        // Composite 5-point Gauss-Legendre over the depth; the integrand is a
        // quadratic in depth wherever the clipping pattern does not change.
        const NODES: [(f64, f64); 5] = [
            (0.0, 0.568_888_888_888_888_9),
            (-0.538_469_310_105_683_1, 0.478_628_670_499_366_5),
            (0.538_469_310_105_683_1, 0.478_628_670_499_366_5),
            (-0.906_179_845_938_664, 0.236_926_885_056_189_1),
            (0.906_179_845_938_664, 0.236_926_885_056_189_1),
        ];
        const PANELS: usize = 64;
        let h = span / PANELS as f64;
        let mut total = 0.0;
        for k in 0..PANELS {
            let mid = (k as f64 + 0.5) * h;
            for (x, w) in NODES {
                let depth = mid + 0.5 * h * x;
                total += w * 0.5 * h * circle_rect_area(self.axis_foot, self.radius_at(depth), rect);
            }
        }
        total
    }
}

/// Small-to-large face radius ratio that makes the square-cell diagonal equal
/// `2 r_large + 2 r_small`: `gamma = (sqrt(8) - 2) / 2 = sqrt(2) - 1`.
pub fn gamma_ratio() -> f64 {
    (8f64.sqrt() - 2.0) / 2.0
}

/// Standoff distance that makes the near/far radius ratio equal to
/// [`gamma_ratio`]: `x_b * sqrt(2) / 2`.
pub fn auda_offset(x_b: f64) -> Result<f64> {
    if !(x_b.is_finite() && x_b > 0.0) {
        return domain(format!("span must be positive, got {x_b}"));
    }
    Ok(x_b * std::f64::consts::FRAC_1_SQRT_2)
}

/// Near and far facade radii of a cone with full apex angle `theta_b_deg`
/// whose apex sits `standoff` in front of a slab `span` thick.
pub fn cone_radii(standoff: f64, span: f64, theta_b_deg: f64) -> Result<(f64, f64)> {
    if !(standoff.is_finite() && standoff > 0.0) {
        return domain(format!("standoff must be positive, got {standoff}"));
    }
    if !(span.is_finite() && span > 0.0) {
        return domain(format!("span must be positive, got {span}"));
    }
    check_beamwidth(theta_b_deg)?;
    let tan_half = (theta_b_deg / 2.0).to_radians().tan();
    Ok((standoff * tan_half, (standoff + span) * tan_half))
}

/// Beamwidth that yields far radius `r_far` from the given standoff.
pub fn beamwidth_for_far_radius(r_far: f64, standoff: f64, span: f64) -> Result<f64> {
    if !(r_far > 0.0 && standoff > 0.0 && span > 0.0) {
        return domain("radius, standoff and span must be positive");
    }
    Ok(2.0 * (r_far / (standoff + span)).atan().to_degrees())
}

pub(crate) fn check_beamwidth(theta_b_deg: f64) -> Result<()> {
    if !(theta_b_deg > 0.0 && theta_b_deg < 180.0) {
        return domain(format!("beamwidth must lie in (0, 180) degrees, got {theta_b_deg}"));
    }
    Ok(())
}

/// `(1/3) pi h (r1^2 + r1 r2 + r2^2)`.
pub fn truncated_cone_volume(span: f64, r_near: f64, r_far: f64) -> Result<f64> {
    if !(span > 0.0 && r_near > 0.0 && r_near <= r_far && r_far.is_finite() && span.is_finite()) {
        return domain(format!(
            "truncated cone needs span > 0 and 0 < r_near <= r_far, got ({span}, {r_near}, {r_far})"
        ));
    }
    Ok((PI / 3.0) * span * (r_near * r_near + r_near * r_far + r_far * r_far))
}

/// Whether `p` is covered by `cone` inside `building`. Boundary points count.
pub fn point_in_cone(cone: &TruncatedCone, p: Point3, building: &BuildingDims) -> bool {
    if !p.is_finite() || !building.contains(p, BOUNDARY_TOL) {
        return false;
    }
    let depth = cone.axis.depth(building, p);
    if depth < -BOUNDARY_TOL || depth > cone.span() + BOUNDARY_TOL {
        return false;
    }
    let [u, v] = cone.axis.facade_coords(p);
    let lateral = (u - cone.axis_foot[0]).hypot(v - cone.axis_foot[1]);
    lateral <= cone.radius_at(depth) + BOUNDARY_TOL
}

/// The circles where the cone meets its near and far facades.
pub fn facade_projections(cone: &TruncatedCone) -> (FacadeCircle, FacadeCircle) {
    (
        FacadeCircle { facade: cone.axis.near_facade(), center: cone.axis_foot, radius: cone.r_near },
        FacadeCircle { facade: cone.axis.far_facade(), center: cone.axis_foot, radius: cone.r_far },
    )
}

/// Facade circle of `cone` on the given facade, if the cone meets it.
pub fn circle_on(cone: &TruncatedCone, facade: Facade) -> Option<FacadeCircle> {
    let (near, far) = facade_projections(cone);
    [near, far].into_iter().find(|c| c.facade == facade)
}

/// Whether two coverage cones share no interior point inside the building.
///
/// Cones spanning the same facade pair have cross-section radii that are
/// affine in depth, so the cross sections are disjoint at every depth exactly
/// when they are disjoint on both facades. Cones from different axis families
/// are compared by sampling the overlap of their bounding boxes.
pub fn cones_disjoint(a: &TruncatedCone, b: &TruncatedCone, building: &BuildingDims) -> bool {
    if a.axis.family() == b.axis.family() {
        let facades = match a.axis.family() {
            AxisFamily::X => [Facade::A, Facade::B],
            AxisFamily::Z => [Facade::Roof, Facade::Floor],
        };
        return facades.iter().all(|&f| match (circle_on(a, f), circle_on(b, f)) {
            (Some(ca), Some(cb)) => ca.disjoint(&cb),
            _ => true,
        });
    }
    sampled_disjoint(a, b, building, CROSS_FAMILY_RESOLUTION)
}

fn sampled_disjoint(a: &TruncatedCone, b: &TruncatedCone, building: &BuildingDims, step: f64) -> bool {
    let ba = a.bounding_box(building);
    let bb = b.bounding_box(building);
    let lo = [ba[0].max(bb[0]), ba[2].max(bb[2]), ba[4].max(bb[4])];
    let hi = [ba[1].min(bb[1]), ba[3].min(bb[3]), ba[5].min(bb[5])];
    if (0..3).any(|i| lo[i] > hi[i]) {
        return true;
    }
    let counts: Vec<usize> = (0..3).map(|i| ((hi[i] - lo[i]) / step).floor() as usize + 1).collect();
    for i in 0..counts[0] {
        let x = lo[0] + i as f64 * step;
        for j in 0..counts[1] {
            let y = lo[1] + j as f64 * step;
            for k in 0..counts[2] {
                let p = Point3::new(x, y, lo[2] + k as f64 * step);
                if point_in_cone(a, p, building) && point_in_cone(b, p, building) {
                    return false;
                }
            }
        }
    }
    true
}

/// Area of the disc of radius `r` centered at `c` inside `rect = [u0, u1, v0, v1]`.
pub fn circle_rect_area(c: [f64; 2], r: f64, rect: [f64; 4]) -> f64 {
    if r <= 0.0 {
        return 0.0;
    }
    // Work relative to the disc center.
    let (x0, x1) = ((rect[0] - c[0]).max(-r), (rect[1] - c[0]).min(r));
    let (y0, y1) = (rect[2] - c[1], rect[3] - c[1]);
    if x0 >= x1 || y0 >= y1 {
        return 0.0;
    }
    let mut breaks = vec![x0, x1];
    for y in [y0, y1] {
        if y.abs() < r {
            let s = (r * r - y * y).sqrt();
            breaks.extend([-s, s]);
        }
    }
    breaks.retain(|&b| b >= x0 && b <= x1);
    breaks.sort_by(f64::total_cmp);

    let half_chord = |x: f64| (r * r - x * x).max(0.0).sqrt();
    // Antiderivative of the half chord.
    let chord_integral = |x: f64| 0.5 * (x * half_chord(x) + r * r * (x / r).clamp(-1.0, 1.0).asin());

    let mut area = 0.0;
    for w in breaks.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b - a <= 0.0 {
            continue;
        }
        let m = 0.5 * (a + b);
        let hm = half_chord(m);
        let top_is_chord = hm <= y1;
        let bottom_is_chord = -hm >= y0;
        let top = if top_is_chord { hm } else { y1 };
        let bottom = if bottom_is_chord { -hm } else { y0 };
        if top <= bottom {
            continue;
        }
        let chord = chord_integral(b) - chord_integral(a);
        let top_int = if top_is_chord { chord } else { y1 * (b - a) };
        let bottom_int = if bottom_is_chord { -chord } else { y0 * (b - a) };
        area += top_int - bottom_int;
    }
    area.max(0.0)
}
