//! Outdoor-to-indoor link budget.
//!
//! Received power `P_r = P_t + G_t + G_r - L` with the path loss split into
//! free-space, building-penetration and indoor terms:
//!
//! ```text
//! L_F = 20 log10(d_3d) + 20 log10(f_GHz) + 32.4
//! L_B = 14 + 15 (1 - cos theta_i)^2
//! L_I = 0.5 d_2d
//! ```
//!
//! `theta_i` is the angle between the UAV-to-user ray and the inward normal of
//! the penetrated facade, and `d_2d` is the user's depth behind that facade.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::geometry::{check_beamwidth, point_in_cone, BuildingDims, Facade, Point3, TruncatedCone, BOUNDARY_TOL};

const FSPL_SLOPE: f64 = 20.0;
const FSPL_CONST: f64 = 32.4;
const PENETRATION_BASE: f64 = 14.0;
const PENETRATION_ANGLE: f64 = 15.0;
const INDOOR_PER_METER: f64 = 0.5;

/// Default spacing of the worst-case search grid, in meters.
pub const DEFAULT_GRID_STEP: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadioParams {
    pub f_ghz: f64,
    /// Half-power beamwidth of the UAV antenna, degrees.
    pub theta_b: f64,
    pub snr_min_db: f64,
    pub noise_dbm: f64,
    pub g_r_dir_db: f64,
    pub g_r_omni_db: f64,
    /// Gain reduction factor from indoor clutter.
    pub grf_db: f64,
}

impl RadioParams {
    /// 2 GHz carrier, 25 dB SNR threshold, -120 dBm noise and a 14.4 dB
    /// indoor receiver.
    pub fn reference(theta_b: f64) -> Self {
        Self {
            f_ghz: 2.0,
            theta_b,
            snr_min_db: 25.0,
            noise_dbm: -120.0,
            g_r_dir_db: 14.4,
            g_r_omni_db: 0.0,
            grf_db: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.f_ghz.is_finite() && self.f_ghz > 0.0) {
            return domain(format!("carrier frequency must be positive, got {}", self.f_ghz));
        }
        check_beamwidth(self.theta_b)?;
        if !(self.grf_db >= 0.0) {
            return domain(format!("GRF must be non-negative, got {}", self.grf_db));
        }
        Ok(())
    }

    pub fn with_beamwidth(self, theta_b: f64) -> Self {
        Self { theta_b, ..self }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathLossBreakdown {
    pub d_3d: f64,
    pub d_2d: f64,
    /// Incidence angle in radians.
    pub theta_i: f64,
    pub l_f: f64,
    pub l_b: f64,
    pub l_i: f64,
    pub total: f64,
}

/// `10 log10(29000 / theta_b^2)`.
pub fn tx_antenna_gain_db(theta_b: f64) -> Result<f64> {
    check_beamwidth(theta_b)?;
    Ok(10.0 * (29_000.0 / (theta_b * theta_b)).log10())
}

pub fn rx_antenna_gain_db(params: &RadioParams) -> f64 {
    params.g_r_dir_db + params.g_r_omni_db - params.grf_db
}

pub fn path_loss_db(
    uav: Point3,
    user: Point3,
    facade: Facade,
    f_ghz: f64,
    building: &BuildingDims,
) -> Result<PathLossBreakdown> {
    if !(f_ghz > 0.0) {
        return domain(format!("carrier frequency must be positive, got {f_ghz}"));
    }
    if !building.contains(user, BOUNDARY_TOL) {
        return domain(format!("user {user:?} is outside the building"));
    }
    // Outward normal component of the UAV offset and the user's depth.
    let (uav_out, d_2d) = match facade {
        Facade::A => (-uav.x, user.x),
        Facade::B => (uav.x - building.x_b, building.x_b - user.x),
        Facade::Roof => (uav.z - building.z_b, building.z_b - user.z),
        Facade::Floor => (-uav.z, user.z),
    };
    if !(uav_out > 0.0) {
        return domain(format!("UAV {uav:?} is not in front of facade {facade:?}"));
    }
    let d_2d = d_2d.max(0.0);
    let d_3d = uav.distance(&user);
    let cos_i = ((uav_out + d_2d) / d_3d).clamp(0.0, 1.0);
    let theta_i = cos_i.acos();

    let l_f = FSPL_SLOPE * d_3d.log10() + FSPL_SLOPE * f_ghz.log10() + FSPL_CONST;
    let l_b = PENETRATION_BASE + PENETRATION_ANGLE * (1.0 - cos_i).powi(2);
    let l_i = INDOOR_PER_METER * d_2d;
    Ok(PathLossBreakdown { d_3d, d_2d, theta_i, l_f, l_b, l_i, total: l_f + l_b + l_i })
}

pub fn received_power_dbm(p_t_dbm: f64, params: &RadioParams, loss: &PathLossBreakdown) -> Result<f64> {
    Ok(p_t_dbm + tx_antenna_gain_db(params.theta_b)? + rx_antenna_gain_db(params) - loss.total)
}

/// Transmit power that puts the SNR at a point exactly on the threshold.
pub fn required_tx_power_dbm(params: &RadioParams, loss: &PathLossBreakdown) -> Result<f64> {
    Ok(params.snr_min_db + params.noise_dbm - tx_antenna_gain_db(params.theta_b)? - rx_antenna_gain_db(params)
        + loss.total)
}

/// Worst-case point of a cone for the transmit power requirement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WorstPoint {
    pub point: Point3,
    pub tx_power_dbm: f64,
    pub samples: usize,
}

/// Smallest transmit power that meets the SNR threshold at every grid point
/// of the cone. `G_t` is taken at the cone's own beamwidth.
pub fn min_tx_power(
    cone: &TruncatedCone,
    building: &BuildingDims,
    params: &RadioParams,
    grid_step: f64,
) -> Result<WorstPoint> {
    if !(grid_step > 0.0 && grid_step.is_finite()) {
        return domain(format!("grid step must be positive, got {grid_step}"));
    }
    let params = params.with_beamwidth(cone.theta_b_deg());
    params.validate()?;
    let facade = cone.axis.near_facade();
    let bbox = cone.bounding_box(building);
    // Lattice anchored at the building origin so nested cones share points.
    let range = |lo: f64, hi: f64| {
        let start = (lo / grid_step - 1e-9).ceil() as i64;
        let end = (hi / grid_step + 1e-9).floor() as i64;
        start..=end
    };
    let xs: Vec<i64> = range(bbox[0], bbox[1]).collect();

    let per_slab: Vec<Option<(f64, Point3, usize)>> = xs
        .par_iter()
        .map(|&i| {
            let mut best: Option<(f64, Point3)> = None;
            let mut count = 0usize;
            for j in range(bbox[2], bbox[3]) {
                for k in range(bbox[4], bbox[5]) {
                    let p = Point3::new(i as f64 * grid_step, j as f64 * grid_step, k as f64 * grid_step);
                    if !point_in_cone(cone, p, building) {
                        continue;
                    }
                    let Ok(loss) = path_loss_db(cone.apex, p, facade, params.f_ghz, building) else {
                        continue;
                    };
                    let Ok(req) = required_tx_power_dbm(&params, &loss) else {
                        continue;
                    };
                    count += 1;
                    if best.is_none_or(|(b, _)| req > b) {
                        best = Some((req, p));
                    }
                }
            }
            best.map(|(v, p)| (v, p, count))
        })
        .collect();

    // Sequential reduction in slab order keeps ties deterministic.
    let mut result: Option<WorstPoint> = None;
    let mut total = 0usize;
    for (v, p, n) in per_slab.into_iter().flatten() {
        total += n;
        if result.is_none_or(|r| v > r.tx_power_dbm) {
            result = Some(WorstPoint { point: p, tx_power_dbm: v, samples: 0 });
        }
    }
    match result {
        Some(mut r) => {
            r.samples = total;
            Ok(r)
        }
        None => domain("cone contains no grid point inside the building"),
    }
}

pub fn min_tx_power_dbm(
    cone: &TruncatedCone,
    building: &BuildingDims,
    params: &RadioParams,
    grid_step: f64,
) -> Result<f64> {
    min_tx_power(cone, building, params, grid_step).map(|w| w.tx_power_dbm)
}

pub fn total_tx_power_mw(
    cones: &[TruncatedCone],
    building: &BuildingDims,
    params: &RadioParams,
    grid_step: f64,
) -> Result<f64> {
    cones.iter().try_fold(0.0, |acc, c| Ok(acc + dbm_to_mw(min_tx_power_dbm(c, building, params, grid_step)?)))
}

pub fn dbm_to_mw(dbm: f64) -> f64 {
    10f64.powf(dbm / 10.0)
}

pub fn mw_to_dbm(mw: f64) -> f64 {
    10.0 * mw.log10()
}
