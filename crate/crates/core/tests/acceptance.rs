//! Acceptance criteria 1 to 10. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use uavcover::commands::{build_plan, cmd_evaluate, cmd_sweep, power_rows, sweep_rows, total_power_mw, BeamSpec};
use uavcover::coverage::{augment_full_coverage, facade_coverage_index, mc_coverage, volume_to_facade_ratio};
use uavcover::deployment::DeploymentDoc;
use uavcover::geometry::{cones_disjoint, gamma_ratio, point_in_cone, AxisFamily};
use uavcover::packing::{density_upper_bound, grid_lower_bound, max_circles, packing_decision, PackingInstance};
use uavcover::placement::{plan_auda, plan_coverage_summary};
use uavcover::scenario::Scenario;
use uavcover::{BuildingDims, ConeAxis, Facade, Method, Point3, TruncatedCone};

const SEED: u64 = 20_240_611;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn building() -> BuildingDims {
    BuildingDims::new(30.0, 40.0, 60.0).unwrap()
}

fn scenario(extra: &str) -> Scenario {
    Scenario::parse(&format!(
        "building.x_b = 30\nbuilding.y_b = 40\nbuilding.z_b = 60\n\
         radio.f_ghz = 2\nradio.snr_min_db = 25\nradio.noise_dbm = -120\nradio.g_r_dir_db = 14.4\n\
         seed = {SEED}\n{extra}"
    ))
    .unwrap()
}

/// Cell-aligned far radii 4, 4.5, ..., 12; FOBS and AUDA share the standoff,
/// so each radius is one beamwidth for both.
fn r_far_sweep() -> String {
    let list: Vec<String> = (0..17).map(|i| format!("{}", 4.0 + 0.5 * i as f64)).collect();
    format!("sweep.r_far = {}\n", list.join(", "))
}

fn c1() -> Outcome {
    let plan = plan_auda(&building(), 10.0).unwrap();
    let f = plan_coverage_summary(&plan, &building()).fraction;
    let g = gamma_ratio();
    let formula = (PI / 6.0) * (g * g + g + 1.0);
    outcome(
        (f - formula).abs() < 1e-4 && (f - formula).abs() < 1e-9,
        format!(
            "fraction {f:.7} vs (pi/6)(g^2+g+1) = {formula:.7}, |diff| = {:.1e}; the quoted 0.830190 is {:.2e} off the formula",
            (f - formula).abs(),
            (formula - 0.830_190).abs()
        ),
    )
}

fn c2() -> Outcome {
    let s = scenario(&format!("methods = FOBS, AUDA\nmc.samples = 10000\n{}", r_far_sweep()));
    let fobs = build_plan(&s, Method::Fobs, BeamSpec::RFar(10.0)).unwrap();
    let auda = build_plan(&s, Method::Auda, BeamSpec::RFar(10.0)).unwrap();
    let b = building();
    let ratio10 = plan_coverage_summary(&auda, &b).fraction / plan_coverage_summary(&fobs, &b).fraction;
    let rows = sweep_rows(&s).unwrap();
    let max = |m: Method| rows.iter().filter(|r| r.method == m).map(|r| r.analytic_fraction).fold(0.0, f64::max);
    let points = rows.iter().filter(|r| r.method == Method::Auda).count();
    let ratio_max = max(Method::Auda) / max(Method::Fobs);
    outcome(
        (ratio10 - 2.0).abs() <= 0.01 && (1.9..=2.1).contains(&ratio_max) && points >= 15,
        format!(
            "r_far=10 ratio {ratio10:.4}; sweep of {points} beamwidths: max AUDA {:.4} / max FOBS {:.4} = {ratio_max:.4}",
            max(Method::Auda),
            max(Method::Fobs)
        ),
    )
}

fn c3() -> Outcome {
    let s = scenario(
        "methods = FOBS, ABS\nmc.samples = 10000\nsweep.theta_min = 6\nsweep.theta_max = 40\nsweep.theta_step = 2\n",
    );
    let rows = sweep_rows(&s).unwrap();
    let worst = rows.iter().map(|r| r.analytic_fraction.max(r.mc_fraction)).fold(0.0, f64::max);
    outcome(rows.len() == 36 && worst < 0.5, format!("{} FOBS/ABS rows, largest fraction {worst:.4}", rows.len()))
}

fn c4() -> Outcome {
    let s = scenario("sweep.r_far = 10\n");
    let b = building();
    let mut pass = true;
    let mut parts = Vec::new();
    for method in [Method::Auda, Method::Fobs] {
        for r in [5.0, 10.0] {
            let plan = build_plan(&s, method, BeamSpec::RFar(r)).unwrap();
            let rep = mc_coverage(&plan, &b, 1_000_000, SEED).unwrap();
            let gap = (rep.mc_fraction - rep.analytic_fraction).abs();
            let ok = gap <= rep.mc_halfwidth_95 + 0.002 && rep.overlap_violations == 0;
            pass &= ok;
            parts.push(format!("{method} r={r}: |{:.4}-{:.4}|={gap:.4} ov={}", rep.mc_fraction, rep.analytic_fraction, rep.overlap_violations));
        }
    }
    outcome(pass, parts.join("; "))
}

/// Sampled 3D oracle: 100 depth slices (facades included) times 1000 points
/// on the segment joining the two axes, which meets the overlap whenever the
/// slice discs intersect.
fn sampled_overlap(a: &TruncatedCone, b: &TruncatedCone, building: &BuildingDims) -> bool {
    let span = building.span(a.axis);
    for i in 0..100 {
        let depth = span * i as f64 / 99.0;
        let depth_a = |p: Point3| match a.axis.family() {
            AxisFamily::X => Point3::new(depth, p.y, p.z),
            AxisFamily::Z => Point3::new(p.x, p.y, depth),
        };
        for j in 0..1000 {
            let t = j as f64 / 999.0;
            let uv = [
                a.axis_foot[0] + t * (b.axis_foot[0] - a.axis_foot[0]),
                a.axis_foot[1] + t * (b.axis_foot[1] - a.axis_foot[1]),
            ];
            let p = depth_a(a.axis.point_at(building, uv, 0.0));
            if point_in_cone(a, p, building) && point_in_cone(b, p, building) {
                return true;
            }
        }
    }
    false
}

fn c5() -> Outcome {
    let b = building();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let (mut checked, mut skipped, mut disagree, mut overlapping) = (0, 0, 0, 0);
    for k in 0..200 {
        let (axes, facades) = if k % 4 == 3 {
            ([ConeAxis::MinusZ, ConeAxis::MinusZ], [Facade::Roof, Facade::Floor])
        } else {
            let pick = |r: &mut ChaCha8Rng| if r.gen::<bool>() { ConeAxis::PlusX } else { ConeAxis::MinusX };
            ([pick(&mut rng), pick(&mut rng)], [Facade::A, Facade::B])
        };
        let rect = b.facade_rect(axes[0]);
        let cone = |axis: ConeAxis, r: &mut ChaCha8Rng| {
            let foot = [r.gen_range(rect[0]..rect[1]), r.gen_range(rect[2]..rect[3])];
            let r_near = r.gen_range(0.5..6.0);
            let r_far = r_near + r.gen_range(0.5..8.0);
            TruncatedCone::from_radii(&b, axis, foot, r_near, r_far).unwrap()
        };
        let first = cone(axes[0], &mut rng);
        let mut second = cone(axes[1], &mut rng);
        // Pull the second foot toward the first so both verdicts are common.
        let d = rng.gen_range(0.0..24.0);
        let dir = rng.gen_range(0.0..2.0 * PI);
        let foot = [
            (first.axis_foot[0] + d * dir.cos()).clamp(rect[0], rect[1]),
            (first.axis_foot[1] + d * dir.sin()).clamp(rect[2], rect[3]),
        ];
        second = TruncatedCone::from_radii(&b, second.axis, foot, second.r_near, second.r_far).unwrap();

        let clearance = facades
            .iter()
            .map(|&f| {
                let (ca, cb) = (uavcover::geometry::circle_on(&first, f).unwrap(), uavcover::geometry::circle_on(&second, f).unwrap());
                ca.clearance(&cb)
            })
            .fold(f64::INFINITY, f64::min);
        if clearance.abs() <= 0.1 {
            skipped += 1;
            continue;
        }
        checked += 1;
        let verdict = cones_disjoint(&first, &second, &b);
        let overlap = sampled_overlap(&first, &second, &b);
        overlapping += usize::from(overlap);
        if verdict == overlap {
            disagree += 1;
        }
    }
    outcome(
        disagree == 0 && checked > 0,
        format!("{checked} pairs checked ({overlapping} overlapping), {skipped} within 0.1 m skipped, {disagree} disagreements"),
    )
}

fn c6() -> Outcome {
    let b = building();
    let target = volume_to_facade_ratio();
    let mut worst: f64 = 0.0;
    for m in 1..=10 {
        let plan = plan_auda(&b, 10.0 / m as f64).unwrap();
        let v = plan_coverage_summary(&plan, &b).fraction;
        let w = facade_coverage_index(&plan, &b).unwrap();
        worst = worst.max(((v / w) - target).abs() / target);
    }
    outcome(worst <= 1e-9, format!("V/W target {target:.9}, worst relative error over r_far = 10/m, m=1..10: {worst:.1e}"))
}

fn c7() -> Outcome {
    let (n, sol) = max_circles(10.0, 40.0, 60.0, SEED, 50, 2000);
    let lower = grid_lower_bound(10.0, 40.0, 60.0);
    let upper = density_upper_bound(10.0, 40.0, 60.0);
    let seven_excluded = PackingInstance::new(7, 10.0, 40.0, 60.0).unwrap().provably_infeasible();

    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 7);
    let mut mismatches = 0;
    let mut feasible = 0;
    for i in 0..100 {
        let r: f64 = rng.gen_range(0.3..2.5);
        let d1: f64 = rng.gen_range(1.0..8.0);
        let d2: f64 = rng.gen_range(1.0..8.0);
        let oracle = 2.0 * r <= d1.min(d2) && (d1 - 2.0 * r).powi(2) + (d2 - 2.0 * r).powi(2) >= 4.0 * r * r;
        let got = PackingInstance::new(2, r, d1, d2).is_some_and(|inst| packing_decision(&inst, SEED + i, 50, 2000).feasible);
        feasible += usize::from(oracle);
        mismatches += usize::from(got != oracle);
    }

    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| max_circles(4.0, 40.0, 60.0, SEED, 50, 2000))
    };
    let (one, four) = (run(1), run(4));
    let same = one.0 == four.0 && one.1.centers == four.1.centers && one.1.residual.to_bits() == four.1.residual.to_bits();
    outcome(
        n == 6 && sol.feasible && lower == 6 && upper == 6 && seven_excluded && mismatches == 0 && same,
        format!(
            "max_circles = {n}, grid bound {lower}, density bound {upper}, 7 excluded: {seven_excluded}; \
             two-circle oracle {mismatches} mismatches on 100 ({feasible} feasible); 1 vs 4 workers identical: {same}"
        ),
    )
}

fn c8() -> Outcome {
    let s = scenario("sweep.r_far = 10\n");
    let mut pass = true;
    let mut parts = Vec::new();
    for r in [10.0, 5.0] {
        let mut totals = Vec::new();
        for method in [Method::Auda, Method::Fobs] {
            let plan = build_plan(&s, method, BeamSpec::RFar(r)).unwrap();
            let doc = DeploymentDoc::from_plan(&plan, &s.building, s.seed);
            let rows = power_rows(&s, &doc, true).unwrap();
            let worst = rows.iter().map(|x| x.min_tx_power_dbm).fold(f64::NEG_INFINITY, f64::max);
            pass &= worst < 0.0;
            let total = total_power_mw(&rows);
            totals.push(total);
            parts.push(format!("{method} r={r}: {} UAVs, max {worst:.2} dBm, total {total:.3e} mW", rows.len()));
        }
        pass &= totals[0] < totals[1];
    }
    outcome(pass, parts.join("; "))
}

fn c9() -> Outcome {
    let s = scenario("sweep.r_far = 10\n");
    let mut pass = true;
    let mut parts = Vec::new();
    for r in [5.0, 10.0] {
        let mut counts = Vec::new();
        for method in [Method::Auda, Method::Fobs] {
            let plan = build_plan(&s, method, BeamSpec::RFar(r)).unwrap();
            let aug = augment_full_coverage(&plan, &s.building, s.voxel_size).unwrap();
            if method == Method::Auda {
                pass &= aug.extra_uavs <= aug.hole_components;
            }
            counts.push(aug.extra_uavs);
        }
        pass &= counts[0] < counts[1];
        parts.push(format!("r={r}: AUDA +{} vs FOBS +{}", counts[0], counts[1]));
    }
    outcome(pass, parts.join("; "))
}

fn c10(elapsed: Duration) -> Outcome {
    let s = scenario("mc.samples = 200000\nvoxel_size = 1\nsweep.theta_min = 10\nsweep.theta_max = 30\nsweep.theta_step = 5\n");
    let sweep_same = cmd_sweep(&s).unwrap() == cmd_sweep(&s).unwrap();
    let plan = build_plan(&s, Method::Auda, BeamSpec::RFar(10.0)).unwrap();
    let doc = DeploymentDoc::from_plan(&plan, &s.building, s.seed);
    let eval_same = cmd_evaluate(&s, &doc).unwrap() == cmd_evaluate(&s, &doc).unwrap();
    let mc = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| mc_coverage(&plan, &s.building, 300_000, SEED).unwrap())
    };
    let mc_same = mc(1) == mc(3);
    outcome(
        sweep_same && eval_same && mc_same && elapsed < Duration::from_secs(300),
        format!(
            "criteria 1-9 took {:.1} s; reruns identical: sweep {sweep_same}, evaluate {eval_same}, MC across worker counts {mc_same}",
            elapsed.as_secs_f64()
        ),
    )
}

/// (number, name, time budget in seconds, check)
type Criterion = (u32, &'static str, f64, fn() -> Outcome);

fn main() {
    let start = Instant::now();
    let criteria: [Criterion; 9] = [
        (1, "AUDA analytic coverage", 1.0, c1),
        (2, "100% improvement", 30.0, c2),
        (3, "packed methods below half", 30.0, c3),
        (4, "Monte-Carlo vs analytic", 20.0, c4),
        (5, "cone disjointness from facade circles", 60.0, c5),
        (6, "volume to facade coverage ratio", 60.0, c6),
        (7, "circle packing", 60.0, c7),
        (8, "transmit power", 60.0, c8),
        (9, "full-coverage ordering", 300.0, c9),
    ];
    let mut failed = 0;
    let mut report = |id: u32, name: &str, budget: f64, o: Outcome, secs: f64| {
        let pass = o.pass && secs < budget;
        failed += usize::from(!pass);
        println!(
            "criterion {id:>2} {}: {name} [{secs:.2} s of {budget} s] {}",
            if pass { "PASS" } else { "FAIL" },
            o.detail
        );
    };
    for (id, name, budget, f) in criteria {
        let t = Instant::now();
        let o = f();
        report(id, name, budget, o, t.elapsed().as_secs_f64());
    }
    let t = Instant::now();
    let o = c10(start.elapsed());
    report(10, "runtime and determinism", 300.0, o, t.elapsed().as_secs_f64());
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
