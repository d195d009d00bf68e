//! Independent checks of deployment plans.
//!
//! Monte-Carlo sampling estimates the covered share of the building and
//! counts same-channel overlaps, the facade index sums projected circle areas,
//! and a voxel grid exposes the coverage holes that extra UAVs on other
//! channels must fill for full coverage.

use std::collections::VecDeque;
use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::geometry::{
    circle_on, gamma_ratio, point_in_cone, AxisFamily, BuildingDims, ConeAxis, Facade, Point3, TruncatedCone,
};
use crate::placement::{plan_coverage_summary, DeploymentPlan, Uav};

pub const MIN_SAMPLES: usize = 10_000;
pub const DEFAULT_SAMPLES: usize = 1_000_000;
pub const DEFAULT_VOXEL_SIZE: f64 = 0.5;

/// Samples drawn from one RNG stream.
const SAMPLE_CHUNK: usize = 1 << 16;
/// Largest near/far radius ratio of an augmentation cone; the UAV then hovers
/// at most four building spans away from the facade.
const MAX_AUGMENT_RATIO: f64 = 0.8;
/// Candidate axis feet for the greedy step sit on this many voxels' pitch.
const CANDIDATE_PITCH_VOXELS: f64 = 4.0;
/// Above this size a component's gain is estimated on a lattice of about
/// `GAIN_SAMPLE_PITCH` metres.
const SUBSAMPLE_ABOVE: usize = 4096;
const GAIN_SAMPLE_PITCH: f64 = 1.0;
const RADIUS_SCAN_STEPS: usize = 400;
const ENCLOSING_PER_AXIS: usize = 5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageReport {
    pub analytic_fraction: f64,
    pub mc_fraction: f64,
    pub mc_halfwidth_95: f64,
    pub n_samples: usize,
    pub seed: u64,
    /// Samples inside two or more cones sharing a channel.
    pub overlap_violations: usize,
}

/// Cones with precomputed bounding boxes for fast rejection.
struct ConeIndex<'a> {
    building: &'a BuildingDims,
    entries: Vec<(TruncatedCone, u32, [f64; 6])>,
}

impl<'a> ConeIndex<'a> {
    fn new(uavs: &[Uav], building: &'a BuildingDims) -> Self {
        let entries = uavs.iter().map(|u| (u.cone, u.channel, u.cone.bounding_box(building))).collect();
        Self { building, entries }
    }

    /// (covered by any cone, covered twice on one channel)
    fn classify(&self, p: Point3, channels: &mut Vec<u32>) -> (bool, bool) {
        channels.clear();
        let mut clash = false;
        for (cone, ch, bb) in &self.entries {
            if p.x < bb[0] - 1e-9 || p.x > bb[1] + 1e-9 || p.y < bb[2] - 1e-9 || p.y > bb[3] + 1e-9 {
                continue;
            }
            if p.z < bb[4] - 1e-9 || p.z > bb[5] + 1e-9 {
                continue;
            }
            if point_in_cone(cone, p, self.building) {
                if channels.contains(ch) {
                    clash = true;
                } else {
                    channels.push(*ch);
                }
            }
        }
        (!channels.is_empty(), clash)
    }
}

/// Monte-Carlo estimate of the covered share with a 95% normal interval.
pub fn mc_coverage(plan: &DeploymentPlan, building: &BuildingDims, n_samples: usize, seed: u64) -> Result<CoverageReport> {
    let (mc_fraction, overlap_violations) = sample_uavs(&plan.uavs, building, n_samples, seed)?;
    let p = mc_fraction;
    Ok(CoverageReport {
        analytic_fraction: plan_coverage_summary(plan, building).fraction,
        mc_fraction,
        mc_halfwidth_95: 1.96 * (p * (1.0 - p) / n_samples as f64).sqrt(),
        n_samples,
        seed,
        overlap_violations,
    })
}

/// Covered share and same-channel overlap count for an arbitrary UAV set.
pub fn sample_uavs(uavs: &[Uav], building: &BuildingDims, n_samples: usize, seed: u64) -> Result<(f64, usize)> {
    if n_samples < MIN_SAMPLES {
        return domain(format!("at least {MIN_SAMPLES} samples are required, got {n_samples}"));
    }
    let index = ConeIndex::new(uavs, building);
    let chunks = n_samples.div_ceil(SAMPLE_CHUNK);
    let counts: Vec<(usize, usize)> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c as u64);
            let n = SAMPLE_CHUNK.min(n_samples - c * SAMPLE_CHUNK);
            let mut channels = Vec::new();
            let (mut hit, mut clash) = (0, 0);
            for _ in 0..n {
                let p = Point3::new(
                    rng.gen::<f64>() * building.x_b,
                    rng.gen::<f64>() * building.y_b,
                    rng.gen::<f64>() * building.z_b,
                );
                let (h, c) = index.classify(p, &mut channels);
                hit += usize::from(h);
                clash += usize::from(c);
            }
            (hit, clash)
        })
        .collect();
    let (hit, clash) = counts.into_iter().fold((0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    Ok((hit as f64 / n_samples as f64, clash))
}

/// `(gamma^2 + gamma + 1) / (3 (gamma^2 + 1))`, the fixed ratio between the
/// covered volume share and the facade index of an alternating plan.
pub fn volume_to_facade_ratio() -> f64 {
    let g = gamma_ratio();
    (g * g + g + 1.0) / (3.0 * (g * g + 1.0))
}

/// Volume-share constant: share = `k1 * cells * r_far^2`.
pub fn volume_constant(building: &BuildingDims) -> f64 {
    let g = gamma_ratio();
    (2.0 * PI / 3.0) * (g * g + g + 1.0) / (building.y_b * building.z_b)
}

/// Facade-index constant: index = `k2 * cells * r_far^2`.
pub fn facade_constant(building: &BuildingDims) -> f64 {
    let g = gamma_ratio();
    2.0 * PI * (g * g + 1.0) / (building.y_b * building.z_b)
}

/// Projected circle area on sides A and B, summed over both sides, divided
/// by the area of one side. It can exceed one.
pub fn facade_coverage_index(plan: &DeploymentPlan, building: &BuildingDims) -> Result<f64> {
    if plan.uavs.iter().any(|u| u.cone.axis.family() != AxisFamily::X) {
        return domain("facade index needs cones along the x axis");
    }
    let rect = building.facade_rect(ConeAxis::PlusX);
    let area: f64 = plan
        .uavs
        .iter()
        .flat_map(|u| [Facade::A, Facade::B].into_iter().filter_map(move |f| circle_on(&u.cone, f)))
        .map(|c| c.area_in_rect(rect))
        .fold(0.0, |a, b| a + b);
    Ok(area / (building.y_b * building.z_b))
}

/// Regular voxelization of the building. Voxel edges are adjusted per axis so
/// that a whole number of voxels fills each dimension.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VoxelGrid {
    pub n: [usize; 3],
    pub size: [f64; 3],
}

impl VoxelGrid {
    pub fn new(building: &BuildingDims, voxel_size: f64) -> Result<Self> {
        let min_dim = building.x_b.min(building.y_b).min(building.z_b);
        if !(voxel_size > 0.0 && voxel_size <= min_dim / 4.0) {
            return domain(format!("voxel size must lie in (0, {}], got {voxel_size}", min_dim / 4.0));
        }
        let dims = [building.x_b, building.y_b, building.z_b];
        let n = dims.map(|d| ((d / voxel_size) - 1e-9).ceil().max(1.0) as usize);
        let size = [dims[0] / n[0] as f64, dims[1] / n[1] as f64, dims[2] / n[2] as f64];
        Ok(Self { n, size })
    }

    pub fn len(&self) -> usize {
        self.n[0] * self.n[1] * self.n[2]
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.n[1] + j) * self.n[2] + k
    }

    pub fn coords(&self, idx: usize) -> [usize; 3] {
        let k = idx % self.n[2];
        let j = (idx / self.n[2]) % self.n[1];
        [idx / (self.n[1] * self.n[2]), j, k]
    }

    pub fn center(&self, idx: usize) -> Point3 {
        let [i, j, k] = self.coords(idx);
        Point3::new(
            (i as f64 + 0.5) * self.size[0],
            (j as f64 + 0.5) * self.size[1],
            (k as f64 + 0.5) * self.size[2],
        )
    }

    pub fn voxel_volume(&self) -> f64 {
        self.size[0] * self.size[1] * self.size[2]
    }

    /// Index range of voxel centers inside `[lo, hi]` along `axis`.
    fn span(&self, axis: usize, lo: f64, hi: f64) -> std::ops::Range<usize> {
        let s = self.size[axis];
        let a = ((lo / s) - 0.5 - 1e-9).ceil().max(0.0) as usize;
        let b = (((hi / s) - 0.5 + 1e-9).floor() + 1.0).clamp(0.0, self.n[axis] as f64) as usize;
        a.min(b)..b
    }

    fn neighbors(&self, idx: usize) -> impl Iterator<Item = usize> + '_ {
        let [i, j, k] = self.coords(idx);
        let n = self.n;
        [
            (i > 0).then(|| self.index(i - 1, j, k)),
            (i + 1 < n[0]).then(|| self.index(i + 1, j, k)),
            (j > 0).then(|| self.index(i, j - 1, k)),
            (j + 1 < n[1]).then(|| self.index(i, j + 1, k)),
            (k > 0).then(|| self.index(i, j, k - 1)),
            (k + 1 < n[2]).then(|| self.index(i, j, k + 1)),
        ]
        .into_iter()
        .flatten()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HoleComponent {
    pub voxel_count: usize,
    /// `[x0, x1, y0, y1, z0, z1]` over the member voxels' extents.
    pub bbox: [f64; 6],
    pub voxels: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HoleSet {
    pub voxel_size: f64,
    pub grid: VoxelGrid,
    pub uncovered_voxels: usize,
    pub components: Vec<HoleComponent>,
}

/// Marks every voxel whose center lies in at least one cone.
fn covered_mask(cones: &[TruncatedCone], building: &BuildingDims, grid: &VoxelGrid) -> Vec<bool> {
    let slab = grid.n[1] * grid.n[2];
    let slabs: Vec<Vec<bool>> = (0..grid.n[0])
        .into_par_iter()
        .map(|i| {
            let mut mask = vec![false; slab];
            let x = (i as f64 + 0.5) * grid.size[0];
            for cone in cones {
                let bb = cone.bounding_box(building);
                if x < bb[0] - 1e-9 || x > bb[1] + 1e-9 {
                    continue;
                }
                for j in grid.span(1, bb[2], bb[3]) {
                    let y = (j as f64 + 0.5) * grid.size[1];
                    for k in grid.span(2, bb[4], bb[5]) {
                        let m = &mut mask[j * grid.n[2] + k];
                        if !*m {
                            let z = (k as f64 + 0.5) * grid.size[2];
                            *m = point_in_cone(cone, Point3::new(x, y, z), building);
                        }
                    }
                }
            }
            mask
        })
        .collect();
    slabs.concat()
}

/// 6-connected components of `members`, in order of their first voxel.
fn components_of(grid: &VoxelGrid, members: &[usize], mut in_set: impl FnMut(usize) -> bool) -> Vec<Vec<usize>> {
    let mut seen = std::collections::HashSet::with_capacity(members.len());
    let mut out = Vec::new();
    let mut sorted = members.to_vec();
    sorted.sort_unstable();
    for &start in &sorted {
        if !seen.insert(start) {
            continue;
        }
        let mut comp = vec![start];
        let mut queue = VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            for w in grid.neighbors(v) {
                if in_set(w) && seen.insert(w) {
                    comp.push(w);
                    queue.push_back(w);
                }
            }
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out
}

fn bbox_of(grid: &VoxelGrid, voxels: &[usize]) -> [f64; 6] {
    let mut lo = [usize::MAX; 3];
    let mut hi = [0usize; 3];
    for &v in voxels {
        let c = grid.coords(v);
        for a in 0..3 {
            lo[a] = lo[a].min(c[a]);
            hi[a] = hi[a].max(c[a]);
        }
    }
    let s = grid.size;
    [
        lo[0] as f64 * s[0],
        (hi[0] + 1) as f64 * s[0],
        lo[1] as f64 * s[1],
        (hi[1] + 1) as f64 * s[1],
        lo[2] as f64 * s[2],
        (hi[2] + 1) as f64 * s[2],
    ]
}

/// Uncovered voxels of a plan grouped into 6-connected components.
pub fn find_holes(plan: &DeploymentPlan, building: &BuildingDims, voxel_size: f64) -> Result<HoleSet> {
    holes_of_cones(&plan.cones(), building, voxel_size)
}

pub fn holes_of_cones(cones: &[TruncatedCone], building: &BuildingDims, voxel_size: f64) -> Result<HoleSet> {
    let grid = VoxelGrid::new(building, voxel_size)?;
    let covered = covered_mask(cones, building, &grid);
    let uncovered: Vec<usize> = (0..grid.len()).filter(|&v| !covered[v]).collect();
    let components = components_of(&grid, &uncovered, |w| !covered[w])
        .into_iter()
        .map(|voxels| HoleComponent { voxel_count: voxels.len(), bbox: bbox_of(&grid, &voxels), voxels })
        .collect();
    Ok(HoleSet { voxel_size, grid, uncovered_voxels: uncovered.len(), components })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Augmentation {
    pub extra_uavs: usize,
    pub cones: Vec<TruncatedCone>,
    /// Hole components found before augmentation.
    pub hole_components: usize,
}

impl Augmentation {
    /// Augmentation UAVs, each on its own channel starting at `first_channel`.
    pub fn uavs(&self, first_channel: u32) -> Vec<Uav> {
        self.cones
            .iter()
            .enumerate()
            .map(|(i, c)| Uav { position: c.apex, cone: *c, clipped: false, channel: first_channel + i as u32 })
            .collect()
    }
}

/// Lateral slack so that a cone containing a voxel center with this margin
/// contains the whole voxel cross-section.
fn lateral_margin(grid: &VoxelGrid, axis: ConeAxis) -> f64 {
    let s = grid.size;
    match axis.family() {
        AxisFamily::X => 0.5 * s[1].hypot(s[2]),
        AxisFamily::Z => 0.5 * s[0].hypot(s[1]),
    }
}

fn depth_extent(grid: &VoxelGrid, axis: ConeAxis) -> f64 {
    match axis.family() {
        AxisFamily::X => grid.size[0],
        AxisFamily::Z => grid.size[2],
    }
}

/// Whether `cone` contains the whole voxel around `center`.
fn contains_voxel(cone: &TruncatedCone, grid: &VoxelGrid, building: &BuildingDims, center: Point3) -> bool {
    let depth = cone.axis.depth(building, center) - 0.5 * depth_extent(grid, cone.axis);
    let [u, v] = cone.axis.facade_coords(center);
    let lateral = (u - cone.axis_foot[0]).hypot(v - cone.axis_foot[1]) + lateral_margin(grid, cone.axis);
    lateral <= cone.radius_at(depth.max(0.0))
}

/// Contained voxels on the `stride` sublattice passing `pick`, split by
/// whether `own` also holds.
fn gain(
    cone: &TruncatedCone,
    grid: &VoxelGrid,
    building: &BuildingDims,
    stride: usize,
    pick: impl Fn(usize) -> bool,
    own: impl Fn(usize) -> bool,
) -> (usize, usize) {
    let bb = cone.bounding_box(building);
    let aligned = |r: std::ops::Range<usize>| (r.start.div_ceil(stride) * stride..r.end).step_by(stride);
    let (mut mine, mut all) = (0, 0);
    for i in aligned(grid.span(0, bb[0], bb[1])) {
        for j in aligned(grid.span(1, bb[2], bb[3])) {
            for k in aligned(grid.span(2, bb[4], bb[5])) {
                let v = grid.index(i, j, k);
                if pick(v) && contains_voxel(cone, grid, building, grid.center(v)) {
                    all += 1;
                    mine += usize::from(own(v));
                }
            }
        }
    }
    (mine, all)
}

/// Cones along each axis family that contain every voxel of `voxels` with far
/// radius at most `r_cap`, a few far radii per family.
fn enclosing_cones(voxels: &[usize], grid: &VoxelGrid, building: &BuildingDims, r_cap: f64) -> Vec<TruncatedCone> {
    let mut out = Vec::new();
    for axis in ConeAxis::ALL {
        let span = building.span(axis);
        let margin = lateral_margin(grid, axis);
        let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
        for &v in voxels {
            let uv = axis.facade_coords(grid.center(v));
            for a in 0..2 {
                lo[a] = lo[a].min(uv[a]);
                hi[a] = hi[a].max(uv[a]);
            }
        }
        let foot = [0.5 * (lo[0] + hi[0]), 0.5 * (lo[1] + hi[1])];
        // Largest lateral need per voxel layer, as (depth fraction, radius).
        let half_depth = 0.5 * depth_extent(grid, axis);
        let mut layers = std::collections::BTreeMap::<i64, (f64, f64)>::new();
        for &v in voxels {
            let c = grid.center(v);
            let depth = (axis.depth(building, c) - half_depth).max(0.0);
            let [u, w] = axis.facade_coords(c);
            let r = (u - foot[0]).hypot(w - foot[1]) + margin;
            let e = layers.entry((depth / half_depth).round() as i64).or_insert((depth / span, 0.0));
            e.1 = e.1.max(r);
        }
        let need: Vec<(f64, f64)> = layers.into_values().collect();
        let r_min = need.iter().map(|n| n.1).fold(0.0, f64::max);
        if r_min > r_cap {
            continue;
        }
        let mut feasible = Vec::new();
        for s in 0..=RADIUS_SCAN_STEPS {
            let r_far = r_min + (r_cap - r_min) * s as f64 / RADIUS_SCAN_STEPS as f64;
            if r_far <= 0.0 {
                continue;
            }
            let r_near = need
                .iter()
                .filter(|(t, _)| *t < 1.0)
                .map(|&(t, r)| (r - r_far * t) / (1.0 - t))
                .fold(0.01 * r_far, f64::max);
            if r_near > MAX_AUGMENT_RATIO * r_far {
                continue;
            }
            if let Ok(cone) = TruncatedCone::from_radii(building, axis, foot, r_near, r_far) {
                feasible.push(cone);
            }
        }
        // Smallest, largest and three in between.
        let n = feasible.len();
        let mut picks: Vec<usize> = (0..ENCLOSING_PER_AXIS).map(|i| i * n.saturating_sub(1) / (ENCLOSING_PER_AXIS - 1)).collect();
        picks.dedup();
        out.extend(picks.into_iter().filter(|&i| i < n).map(|i| feasible[i]));
    }
    out
}

/// Candidate cones of the plan's shape with feet on a lattice near `bbox`.
fn lattice_cones(bbox: [f64; 6], grid: &VoxelGrid, building: &BuildingDims, shape: (f64, f64)) -> Vec<TruncatedCone> {
    let pitch = CANDIDATE_PITCH_VOXELS * grid.size[0].max(grid.size[1]).max(grid.size[2]);
    let mut out = Vec::new();
    for axis in ConeAxis::ALL {
        let rect = building.facade_rect(axis);
        let (u_lo, u_hi, v_lo, v_hi) = match axis.family() {
            AxisFamily::X => (bbox[2], bbox[3], bbox[4], bbox[5]),
            AxisFamily::Z => (bbox[0], bbox[1], bbox[2], bbox[3]),
        };
        let lattice = |lo: f64, hi: f64, rlo: f64, rhi: f64| {
            let a = ((lo - shape.1).max(rlo) / pitch).ceil() as i64;
            let b = ((hi + shape.1).min(rhi) / pitch).floor() as i64;
            (a..=b).map(move |i| i as f64 * pitch)
        };
        for u in lattice(u_lo, u_hi, rect[0], rect[1]) {
            for v in lattice(v_lo, v_hi, rect[2], rect[3]) {
                if let Ok(c) = TruncatedCone::from_radii(building, axis, [u, v], shape.0, shape.1) {
                    out.push(c);
                }
            }
        }
    }
    out
}

const NONE: u32 = u32::MAX;

/// Index of the candidate with the largest global gain among those with a
/// positive gain on component `id`; ties go to the smaller cone, then to the
/// earlier candidate.
fn best_candidate(cands: &[TruncatedCone], id: u32, owner: &[u32], grid: &VoxelGrid, building: &BuildingDims, stride: usize, need_all: Option<usize>) -> Option<usize> {
    let scores: Vec<(usize, usize)> = cands
        .par_iter()
        .map(|cone| {
            gain(cone, grid, building, stride, |v| owner[v] != NONE, |v| owner[v] == id)
        })
        .collect();
    let mut best: Option<(usize, f64, usize)> = None;
    for (i, &(own, all)) in scores.iter().enumerate() {
        let ok = match need_all {
            Some(n) => own == n,
            None => own > 0,
        };
        if !ok {
            continue;
        }
        let vol = cands[i].volume();
        let better = match best {
            None => true,
            Some((g, v, _)) => all > g || (all == g && vol < v),
        };
        if better {
            best = Some((all, vol, i));
        }
    }
    best.map(|b| b.2)
}

/// Extra UAVs on other channels until every voxel of the building is
/// covered. The largest remaining hole component is handled first. If cones
/// no wider than the plan's can enclose it, the enclosing cone that also
/// sweeps up the most other uncovered voxels is placed. Otherwise the
/// plan-shaped cone covering the most uncovered voxels is placed and the
/// remainder of the component is split again.
pub fn augment_full_coverage(plan: &DeploymentPlan, building: &BuildingDims, voxel_size: f64) -> Result<Augmentation> {
    let holes = find_holes(plan, building, voxel_size)?;
    let grid = holes.grid;
    let r_cap = if plan.r_far > 0.0 { plan.r_far } else { 0.5 * building.y_b.min(building.z_b) };
    let ratio = if plan.r_far > 0.0 && plan.r_near > 0.0 { plan.r_near / plan.r_far } else { gamma_ratio() };
    let shape = (ratio * r_cap, r_cap);

    let mut owner = vec![NONE; grid.len()];
    let mut pending: Vec<(u32, Vec<usize>)> = Vec::new();
    for (id, comp) in holes.components.iter().enumerate() {
        for &v in &comp.voxels {
            owner[v] = id as u32;
        }
        pending.push((id as u32, comp.voxels.clone()));
    }
    let mut next_id = pending.len() as u32;

    let mut cones = Vec::new();
    loop {
        for (id, voxels) in pending.iter_mut() {
            voxels.retain(|&v| owner[v] == *id);
        }
        pending.retain(|(_, v)| !v.is_empty());
        // Largest first, earliest first voxel on ties.
        let Some(pos) = (0..pending.len()).max_by(|&a, &b| {
            let (la, lb) = (pending[a].1.len(), pending[b].1.len());
            la.cmp(&lb).then(pending[b].1[0].cmp(&pending[a].1[0]))
        }) else {
            break;
        };
        let (id, live) = pending.swap_remove(pos);
        let min_size = grid.size[0].min(grid.size[1]).min(grid.size[2]);
        let stride = if live.len() > SUBSAMPLE_ABOVE { (GAIN_SAMPLE_PITCH / min_size).round().max(1.0) as usize } else { 1 };

        let enclosing = enclosing_cones(&live, &grid, building, r_cap);
        let chosen = best_candidate(&enclosing, id, &owner, &grid, building, 1, Some(live.len())).map(|i| enclosing[i]);
        let cone = match chosen {
            Some(c) => c,
            None => {
                let lattice = lattice_cones(bbox_of(&grid, &live), &grid, building, shape);
                match best_candidate(&lattice, id, &owner, &grid, building, stride, None) {
                    Some(i) => lattice[i],
                    None => match best_candidate(&lattice, id, &owner, &grid, building, 1, None) {
                        Some(i) => lattice[i],
                        None => {
                            let one = enclosing_cones(&live[..1], &grid, building, r_cap.max(1.0));
                            match one.first() {
                                Some(c) => *c,
                                None => return domain("cannot place a cone over an isolated hole voxel"),
                            }
                        }
                    },
                }
            }
        };
        let bb = cone.bounding_box(building);
        for i in grid.span(0, bb[0], bb[1]) {
            for j in grid.span(1, bb[2], bb[3]) {
                for k in grid.span(2, bb[4], bb[5]) {
                    let v = grid.index(i, j, k);
                    if owner[v] != NONE && contains_voxel(&cone, &grid, building, grid.center(v)) {
                        owner[v] = NONE;
                    }
                }
            }
        }
        if chosen.is_some() {
            for &v in &live {
                owner[v] = NONE;
            }
        }
        cones.push(cone);
        let rest: Vec<usize> = live.into_iter().filter(|&v| owner[v] == id).collect();
        for part in components_of(&grid, &rest, |w| owner[w] == id) {
            for &v in &part {
                owner[v] = next_id;
            }
            pending.push((next_id, part));
            next_id += 1;
        }
    }
    Ok(Augmentation { extra_uavs: cones.len(), cones, hole_components: holes.components.len() })
}
