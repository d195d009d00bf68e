//! Deployment documents: versioned JSON with sorted keys and floats rounded
//! to nine significant digits, so that reruns are byte-identical.
//!
//! ```json
//! {
//!   "building": {"x_b": 30.0, "y_b": 40.0, "z_b": 60.0},
//!   "coverage": {"covered_volume": 59782.7403, "fraction": 0.830315837, "n_uavs": 18},
//!   "diagnostic": null,
//!   "method": "AUDA",
//!   "parameters": {"r_far_m": 10.0, "r_near_m": 4.14213562, "seed": 7, "standoff_m": 21.2132034, "theta_b_deg": 22.0973559},
//!   "schema_version": 1,
//!   "uavs": [{"axis": "-x", "axis_foot": [10.0, 10.0], "channel": 0, "clipped": false,
//!             "position": [51.2132034, 10.0, 10.0], "r_far": 10.0, "r_near": 4.14213562}]
//! }
//! ```
//!
//! Each cone is rebuilt from its axis, foot and facade radii. The stored
//! position must agree with the rebuilt apex.

use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::geometry::{BuildingDims, ConeAxis, Point3, TruncatedCone};
use crate::placement::{plan_coverage_summary, DeploymentPlan, Method, Uav};

pub const SCHEMA_VERSION: u32 = 1;
/// Allowed distance between a stored position and the rebuilt apex, metres.
const POSITION_TOL: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BuildingDoc {
    pub x_b: f64,
    pub y_b: f64,
    pub z_b: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParametersDoc {
    pub theta_b_deg: f64,
    pub standoff_m: f64,
    pub r_near_m: f64,
    pub r_far_m: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UavDoc {
    pub position: [f64; 3],
    pub axis: ConeAxis,
    pub axis_foot: [f64; 2],
    pub r_near: f64,
    pub r_far: f64,
    pub clipped: bool,
    pub channel: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoverageDoc {
    pub n_uavs: usize,
    pub covered_volume: f64,
    pub fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeploymentDoc {
    pub schema_version: u32,
    pub method: Method,
    pub building: BuildingDoc,
    pub parameters: ParametersDoc,
    pub uavs: Vec<UavDoc>,
    pub coverage: CoverageDoc,
    pub diagnostic: Option<String>,
}

/// Rounds to nine significant digits.
pub fn round_sig(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.8e}").parse().unwrap_or(x)
}

fn round_floats(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            if let Some(r) = n.as_f64().map(round_sig).and_then(serde_json::Number::from_f64) {
                *n = r;
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_floats),
        Value::Object(map) => map.values_mut().for_each(round_floats),
        _ => {}
    }
}

/// Pretty JSON with sorted keys, rounded floats and a trailing newline.
pub fn to_canonical_json<T: Serialize>(value: &T) -> Result<String> {
    // serde_json maps are ordered by key, so a round trip through Value sorts.
    let mut v = serde_json::to_value(value).map_err(|e| Error::Schema(e.to_string()))?;
    round_floats(&mut v);
    let mut s = serde_json::to_string_pretty(&v).map_err(|e| Error::Schema(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

impl DeploymentDoc {
    pub fn from_plan(plan: &DeploymentPlan, building: &BuildingDims, seed: u64) -> Self {
        let cov = plan_coverage_summary(plan, building);
        DeploymentDoc {
            schema_version: SCHEMA_VERSION,
            method: plan.method,
            building: BuildingDoc { x_b: building.x_b, y_b: building.y_b, z_b: building.z_b },
            parameters: ParametersDoc {
                theta_b_deg: plan.theta_b,
                standoff_m: plan.standoff,
                r_near_m: plan.r_near,
                r_far_m: plan.r_far,
                seed,
            },
            uavs: plan
                .uavs
                .iter()
                .map(|u| UavDoc {
                    position: [u.position.x, u.position.y, u.position.z],
                    axis: u.cone.axis,
                    axis_foot: u.cone.axis_foot,
                    r_near: u.cone.r_near,
                    r_far: u.cone.r_far,
                    clipped: u.clipped,
                    channel: u.channel,
                })
                .collect(),
            coverage: CoverageDoc { n_uavs: cov.n_uavs, covered_volume: cov.covered_volume, fraction: cov.fraction },
            diagnostic: plan.diagnostic.clone(),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        to_canonical_json(self)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let doc: DeploymentDoc = serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))?;
        if doc.schema_version != SCHEMA_VERSION {
            return Err(Error::Schema(format!(
                "schema_version: unsupported version {} (expected {SCHEMA_VERSION})",
                doc.schema_version
            )));
        }
        Ok(doc)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn building(&self) -> Result<BuildingDims> {
        BuildingDims::new(self.building.x_b, self.building.y_b, self.building.z_b)
            .map_err(|e| Error::Schema(format!("building: {e}")))
    }

    /// Rebuilds the plan, checking every UAV against its stored position.
    pub fn to_plan(&self) -> Result<(DeploymentPlan, BuildingDims)> {
        let building = self.building()?;
        let mut uavs = Vec::with_capacity(self.uavs.len());
        for (i, u) in self.uavs.iter().enumerate() {
            let cone = TruncatedCone::from_radii(&building, u.axis, u.axis_foot, u.r_near, u.r_far)
                .map_err(|e| Error::Schema(format!("uavs[{i}]: {e}")))?;
            let position = Point3::new(u.position[0], u.position[1], u.position[2]);
            let gap = position.distance(&cone.apex);
            if !(gap <= POSITION_TOL * (1.0 + cone.standoff())) {
                return Err(Error::Schema(format!(
                    "uavs[{i}].position: {:?} is {gap:.3e} m from the apex implied by axis, axis_foot and radii",
                    u.position
                )));
            }
            uavs.push(Uav { position: cone.apex, cone, clipped: u.clipped, channel: u.channel });
        }
        let p = &self.parameters;
        let plan = DeploymentPlan {
            method: self.method,
            theta_b: p.theta_b_deg,
            standoff: p.standoff_m,
            r_near: p.r_near_m,
            r_far: p.r_far_m,
            uavs,
            diagnostic: self.diagnostic.clone(),
        };
        Ok((plan, building))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::placement::plan_auda;

    fn doc() -> DeploymentDoc {
        let b = BuildingDims::new(30.0, 40.0, 60.0).unwrap();
        DeploymentDoc::from_plan(&plan_auda(&b, 10.0).unwrap(), &b, 7)
    }

    #[test]
    fn rounding() {
        assert_eq!(round_sig(0.830_315_837_101_835_5), 0.830_315_837);
        assert_eq!(round_sig(-25.361_275_531_139_427), -25.361_275_5);
        assert_eq!(round_sig(0.0), 0.0);
        assert_eq!(round_sig(123_456_789_012.0), 123_456_789_000.0);
    }

    #[test]
    fn json_is_sorted_and_round_trips() {
        let d = doc();
        let text = d.to_json().unwrap();
        let keys: Vec<usize> = ["building", "coverage", "diagnostic", "method", "parameters", "schema_version", "uavs"]
            .iter()
            .map(|k| text.find(&format!("\"{k}\"")).unwrap())
            .collect();
        assert!(keys.windows(2).all(|w| w[0] < w[1]));
        assert!(text.contains("\"fraction\": 0.830315837"));
        let back = DeploymentDoc::parse(&text).unwrap();
        assert_eq!(back.uavs.len(), 18);
        let (plan, b) = back.to_plan().unwrap();
        let f = plan_coverage_summary(&plan, &b).fraction;
        assert_eq!(round_sig(f), 0.830_315_837);
        assert_eq!(back.to_json().unwrap(), text);
    }

    #[test]
    fn schema_errors_name_the_key() {
        let text = doc().to_json().unwrap();
        let bad = text.replacen("\"clipped\"", "\"clipd\"", 1);
        let msg = DeploymentDoc::parse(&bad).unwrap_err().to_string();
        assert!(msg.contains("clipd"), "{msg}");
        let bad = text.replacen("\"method\": \"AUDA\",", "", 1);
        let msg = DeploymentDoc::parse(&bad).unwrap_err().to_string();
        assert!(msg.contains("method"), "{msg}");
        let bad = text.replacen("\"schema_version\": 1", "\"schema_version\": 9", 1);
        let msg = DeploymentDoc::parse(&bad).unwrap_err().to_string();
        assert!(msg.contains("schema_version"), "{msg}");
    }

    #[test]
    fn moved_position_is_rejected() {
        let mut d = doc();
        d.uavs[3].position[1] += 1.0;
        let msg = d.to_plan().unwrap_err().to_string();
        assert!(msg.contains("uavs[3].position"), "{msg}");
    }
}
