//! Command implementations behind the `uavcover` binary. Each returns the
//! text it would write so that callers and tests share one code path.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use crate::coverage::{augment_full_coverage, find_holes, mc_coverage, CoverageReport};
use crate::deployment::{round_sig, to_canonical_json, DeploymentDoc};
use crate::error::{Error, Result};
use crate::geometry::{beamwidth_for_far_radius, check_beamwidth, BuildingDims, TruncatedCone};
use crate::link_budget::{dbm_to_mw, min_tx_power, DEFAULT_GRID_STEP};
use crate::placement::{plan_abs, plan_auda, plan_coverage_summary, plan_fobs, DeploymentPlan, Method, Uav};
use crate::scenario::{Scenario, Sweep};

pub const SWEEP_HEADER: &str = "method,theta_b_deg,r_far_m,n_uavs,analytic_fraction,mc_fraction,mc_ci95";
pub const POWER_HEADER: &str = "uav,role,channel,axis,theta_b_deg,r_near_m,r_far_m,min_tx_power_dbm,min_tx_power_mw";
/// Finest grid tried for cones too small for the default grid.
const FINEST_GRID_STEP: f64 = 0.01;

/// How a plan's beam is specified on the command line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BeamSpec {
    ThetaB(f64),
    RFar(f64),
}

/// Nine significant digits, shortest form.
fn num(x: f64) -> String {
    format!("{}", round_sig(x))
}

/// Builds the plan of `method` for a beamwidth or far-face radius. The
/// conversion uses the method's own standoff and target span.
pub fn build_plan(scenario: &Scenario, method: Method, beam: BeamSpec) -> Result<DeploymentPlan> {
    let b = &scenario.building;
    let standoff = scenario.standoff(method)?;
    let span = match method {
        Method::Abs => b.z_b,
        Method::Fobs | Method::Auda => b.x_b,
    };
    let theta = match beam {
        BeamSpec::ThetaB(t) => {
            check_beamwidth(t)?;
            t
        }
        BeamSpec::RFar(r) => beamwidth_for_far_radius(r, standoff, span)?,
    };
    match method {
        Method::Fobs => plan_fobs(b, theta, standoff, scenario.seed),
        Method::Abs => plan_abs(b, theta, standoff, scenario.seed),
        Method::Auda => {
            let r_far = match beam {
                BeamSpec::RFar(r) => r,
                BeamSpec::ThetaB(t) => (standoff + span) * (t.to_radians() / 2.0).tan(),
            };
            plan_auda(b, r_far)
        }
    }
}

/// Deployment document for one plan.
pub fn cmd_plan(scenario: &Scenario, method: Method, beam: BeamSpec) -> Result<(DeploymentPlan, String)> {
    let plan = build_plan(scenario, method, beam)?;
    let text = DeploymentDoc::from_plan(&plan, &scenario.building, scenario.seed).to_json()?;
    Ok((plan, text))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub method: Method,
    pub theta_b_deg: f64,
    pub r_far_m: f64,
    pub n_uavs: usize,
    pub analytic_fraction: f64,
    pub mc_fraction: f64,
    pub mc_ci95: f64,
}

/// One row per method and sweep value, ordered by method then beamwidth.
pub fn sweep_rows(scenario: &Scenario) -> Result<Vec<SweepRow>> {
    let values = scenario.sweep.values();
    let jobs: Vec<(Method, f64)> =
        scenario.methods.iter().flat_map(|&m| values.iter().map(move |&v| (m, v))).collect();
    let mut rows: Vec<SweepRow> = jobs
        .par_iter()
        .map(|&(method, v)| {
            let beam = match scenario.sweep {
                Sweep::Theta { .. } => BeamSpec::ThetaB(v),
                Sweep::RFar(_) => BeamSpec::RFar(v),
            };
            let plan = build_plan(scenario, method, beam)?;
            let (mc_fraction, mc_ci95) = if plan.uavs.is_empty() {
                (0.0, 0.0)
            } else {
                let rep = mc_coverage(&plan, &scenario.building, scenario.n_samples, scenario.seed)?;
                (rep.mc_fraction, rep.mc_halfwidth_95)
            };
            Ok(SweepRow {
                method,
                theta_b_deg: plan.theta_b,
                r_far_m: plan.r_far,
                n_uavs: plan.uavs.len(),
                analytic_fraction: plan_coverage_summary(&plan, &scenario.building).fraction,
                mc_fraction,
                mc_ci95,
            })
        })
        .collect::<Result<_>>()?;
    // Method order as given in the scenario, then increasing beamwidth.
    let rank = |m: Method| scenario.methods.iter().position(|&x| x == m).unwrap_or(usize::MAX);
    rows.sort_by(|a, b| rank(a.method).cmp(&rank(b.method)).then(a.theta_b_deg.total_cmp(&b.theta_b_deg)));
    Ok(rows)
}

pub fn cmd_sweep(scenario: &Scenario) -> Result<String> {
    let mut out = format!("{SWEEP_HEADER}\n");
    for r in sweep_rows(scenario)? {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.method,
            num(r.theta_b_deg),
            num(r.r_far_m),
            r.n_uavs,
            num(r.analytic_fraction),
            num(r.mc_fraction),
            num(r.mc_ci95)
        );
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PowerRow {
    pub augmented: bool,
    pub uav: Uav,
    pub min_tx_power_dbm: f64,
}

/// Worst-case power of one cone, refining the grid for cones that hold no
/// point of the default grid.
fn cone_power(cone: &TruncatedCone, building: &BuildingDims, scenario: &Scenario) -> Result<f64> {
    let params = scenario.radio()?.params(cone.theta_b_deg());
    let mut step = DEFAULT_GRID_STEP;
    loop {
        match min_tx_power(cone, building, &params, step) {
            Ok(w) => return Ok(w.tx_power_dbm),
            Err(e) if step <= FINEST_GRID_STEP => return Err(e),
            Err(_) => step /= 2.0,
        }
    }
}

/// Minimum transmit power of every UAV, plus augmentation UAVs on other
/// channels when `full_coverage` is set.
pub fn power_rows(scenario: &Scenario, doc: &DeploymentDoc, full_coverage: bool) -> Result<Vec<PowerRow>> {
    scenario.radio()?;
    let (plan, building) = doc.to_plan()?;
    let mut uavs: Vec<(bool, Uav)> = plan.uavs.iter().map(|u| (false, *u)).collect();
    if full_coverage {
        let first = plan.uavs.iter().map(|u| u.channel).max().map_or(0, |c| c + 1);
        let aug = augment_full_coverage(&plan, &building, scenario.voxel_size)?;
        uavs.extend(aug.uavs(first).into_iter().map(|u| (true, u)));
    }
    uavs.par_iter()
        .map(|&(augmented, uav)| {
            Ok(PowerRow { augmented, uav, min_tx_power_dbm: cone_power(&uav.cone, &building, scenario)? })
        })
        .collect()
}

pub fn total_power_mw(rows: &[PowerRow]) -> f64 {
    rows.iter().map(|r| dbm_to_mw(r.min_tx_power_dbm)).fold(0.0, |a, b| a + b)
}

pub fn cmd_power(scenario: &Scenario, doc: &DeploymentDoc, full_coverage: bool) -> Result<String> {
    let rows = power_rows(scenario, doc, full_coverage)?;
    let mut out = format!("{POWER_HEADER}\n");
    for (i, r) in rows.iter().enumerate() {
        let c = &r.uav.cone;
        let _ = writeln!(
            out,
            "{i},{},{},{},{},{},{},{},{}",
            if r.augmented { "augment" } else { "base" },
            r.uav.channel,
            c.axis.label(),
            num(c.theta_b_deg()),
            num(c.r_near),
            num(c.r_far),
            num(r.min_tx_power_dbm),
            num(dbm_to_mw(r.min_tx_power_dbm))
        );
    }
    let _ = writeln!(out, "total,,,,,,,,{}", num(total_power_mw(&rows)));
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HoleSummary {
    pub voxel_count: usize,
    pub bbox: [f64; 6],
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvaluationReport {
    pub method: Method,
    #[serde(flatten)]
    pub coverage: CoverageReport,
    /// Same-channel pairs that intersect or cones leaving their facades.
    pub constraint_violations: Vec<String>,
    pub voxel_size: f64,
    pub uncovered_voxels: usize,
    pub hole_components: Vec<HoleSummary>,
}

pub fn evaluate(scenario: &Scenario, doc: &DeploymentDoc) -> Result<EvaluationReport> {
    let (plan, building) = doc.to_plan()?;
    if building != scenario.building {
        return Err(Error::Schema(format!(
            "building: deployment is {} x {} x {} but the scenario says {} x {} x {}",
            building.x_b, building.y_b, building.z_b, scenario.building.x_b, scenario.building.y_b, scenario.building.z_b
        )));
    }
    let coverage = mc_coverage(&plan, &building, scenario.n_samples, scenario.seed)?;
    let holes = find_holes(&plan, &building, scenario.voxel_size)?;
    Ok(EvaluationReport {
        method: plan.method,
        coverage,
        constraint_violations: plan.violations(&building),
        voxel_size: scenario.voxel_size,
        uncovered_voxels: holes.uncovered_voxels,
        hole_components: holes
            .components
            .iter()
            .map(|c| HoleSummary { voxel_count: c.voxel_count, bbox: c.bbox })
            .collect(),
    })
}

pub fn cmd_evaluate(scenario: &Scenario, doc: &DeploymentDoc) -> Result<String> {
    to_canonical_json(&evaluate(scenario, doc)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scenario(extra: &str) -> Scenario {
        let text = format!(
            "building.x_b = 30\nbuilding.y_b = 40\nbuilding.z_b = 60\nradio.f_ghz = 2\nradio.snr_min_db = 25\n\
             radio.noise_dbm = -120\nradio.g_r_dir_db = 14.4\nsweep.r_far = 5, 10\nseed = 3\nmc.samples = 20000\n{extra}"
        );
        Scenario::parse(&text).unwrap()
    }

    #[test]
    fn theta_and_r_far_agree_for_auda() {
        let s = scenario("");
        let by_r = build_plan(&s, Method::Auda, BeamSpec::RFar(10.0)).unwrap();
        let by_t = build_plan(&s, Method::Auda, BeamSpec::ThetaB(by_r.theta_b)).unwrap();
        assert!((by_t.r_far - 10.0).abs() < 1e-9);
        assert_eq!(by_t.uavs.len(), by_r.uavs.len());
        assert!((by_r.theta_b - 22.097_355_868_964_485).abs() < 1e-9);
    }

    #[test]
    fn fobs_too_wide_is_empty_with_diagnostic() {
        let s = scenario("");
        let (plan, text) = cmd_plan(&s, Method::Fobs, BeamSpec::ThetaB(170.0)).unwrap();
        assert!(plan.uavs.is_empty());
        assert!(text.contains("\"diagnostic\": \"no circle fits\""));
    }

    #[test]
    fn sweep_has_fixed_header_and_order() {
        let s = scenario("methods = AUDA, FOBS\n");
        let csv = cmd_sweep(&s).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], SWEEP_HEADER);
        assert_eq!(lines.len(), 5);
        assert!(lines[1].starts_with("AUDA,") && lines[3].starts_with("FOBS,"));
        assert!(!csv.contains('\r'));
        assert_eq!(cmd_sweep(&s).unwrap(), csv);
    }

    #[test]
    fn power_of_empty_plan_is_zero() {
        let s = scenario("");
        let (plan, _) = cmd_plan(&s, Method::Fobs, BeamSpec::ThetaB(170.0)).unwrap();
        let doc = DeploymentDoc::from_plan(&plan, &s.building, 3);
        let csv = cmd_power(&s, &doc, false).unwrap();
        assert_eq!(csv, format!("{POWER_HEADER}\ntotal,,,,,,,,0\n"));
    }

    #[test]
    fn power_needs_radio() {
        let mut s = scenario("");
        let (plan, _) = cmd_plan(&s, Method::Auda, BeamSpec::RFar(10.0)).unwrap();
        let doc = DeploymentDoc::from_plan(&plan, &s.building, 3);
        s.radio = None;
        assert!(matches!(cmd_power(&s, &doc, false), Err(Error::Missing(_))));
    }

    #[test]
    fn evaluate_flags_coincident_uavs() {
        let s = scenario("voxel_size = 2\n");
        let (plan, _) = cmd_plan(&s, Method::Auda, BeamSpec::RFar(10.0)).unwrap();
        let mut doc = DeploymentDoc::from_plan(&plan, &s.building, 3);
        let clean = evaluate(&s, &doc).unwrap();
        assert_eq!(clean.coverage.overlap_violations, 0);
        assert!(clean.constraint_violations.is_empty());
        doc.uavs.push(doc.uavs[0].clone());
        let dirty = evaluate(&s, &doc).unwrap();
        assert!(dirty.coverage.overlap_violations > 0);
        assert_eq!(dirty.constraint_violations.len(), 1);
    }
}
