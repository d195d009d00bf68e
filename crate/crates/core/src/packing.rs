//! Equal circles in a rectangle.
//!
//! The decision problem asks whether `n` circles of radius `r` fit inside a
//! `d1 x d2` rectangle without overlapping. It is answered by minimizing a
//! smooth penalty (squared pairwise overlap plus squared boundary excess)
//! with multi-start gradient descent. A feasible answer carries checkable
//! centers; an infeasible one only means no restart reached zero penalty,
//! unless a diameter or density bound proves it.
//!
//! [`max_circles`] increments `n` until the decision fails.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Largest constraint violation accepted as feasible, in meters.
pub const FEASIBILITY_TOL: f64 = 1e-6;
pub const DEFAULT_RESTARTS: usize = 50;
pub const DEFAULT_MAX_ITERS: usize = 2000;

/// Descent runs with the radius inflated by this much so that converged
/// configurations are strictly feasible for the true radius.
const INFLATION: f64 = 1e-7;
/// Restarts evaluated together; the reduction is in restart order so the
/// answer does not depend on the number of worker threads.
/// Iterations between progress checks, and the relative penalty decrease
/// below which a restart is abandoned.
const STALL_WINDOW: usize = 200;
const STALL_DECREASE: f64 = 1e-3;
const BATCH: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PackingInstance {
    pub n: usize,
    pub r: f64,
    pub d1: f64,
    pub d2: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PackingSolution {
    pub feasible: bool,
    pub centers: Vec<[f64; 2]>,
    /// Worst constraint violation of `centers`, in meters.
    pub residual: f64,
    pub seed: u64,
    pub restarts_used: usize,
}

impl PackingSolution {
    fn empty(seed: u64) -> Self {
        Self { feasible: false, centers: Vec::new(), residual: f64::INFINITY, seed, restarts_used: 0 }
    }
}

impl PackingInstance {
    pub fn new(n: usize, r: f64, d1: f64, d2: f64) -> Option<Self> {
        (n >= 1 && r > 0.0 && d1 > 0.0 && d2 > 0.0 && r.is_finite() && d1.is_finite() && d2.is_finite())
            .then_some(Self { n, r, d1, d2 })
    }

    /// Provably infeasible by the diameter or the `pi / sqrt(12)` density bound.
    pub fn provably_infeasible(&self) -> bool {
        2.0 * self.r > self.d1.min(self.d2) + FEASIBILITY_TOL || self.n > density_upper_bound(self.r, self.d1, self.d2)
    }
}

/// `floor(d1 / 2r) * floor(d2 / 2r)`: circles in a square grid.
pub fn grid_lower_bound(r: f64, d1: f64, d2: f64) -> usize {
    if !(r > 0.0) {
        return 0;
    }
    let per = |d: f64| (d / (2.0 * r)).floor().max(0.0) as usize;
    per(d1) * per(d2)
}

/// Largest count whose circle area stays within `pi / sqrt(12)` of the rectangle.
pub fn density_upper_bound(r: f64, d1: f64, d2: f64) -> usize {
    let cap = d1 * d2 / (2.0 * 3f64.sqrt() * r * r);
    // The count is at least one whenever a single circle fits.
    (cap.floor() as usize).max(usize::from(2.0 * r <= d1.min(d2) + FEASIBILITY_TOL))
}

/// Worst violation of the non-overlap and containment constraints.
pub fn residual(inst: &PackingInstance, centers: &[[f64; 2]]) -> f64 {
    let r = inst.r;
    let mut worst = 0.0f64;
    for (i, c) in centers.iter().enumerate() {
        worst = worst
            .max(r - c[0])
            .max(c[0] + r - inst.d1)
            .max(r - c[1])
            .max(c[1] + r - inst.d2);
        for d in &centers[i + 1..] {
            worst = worst.max(2.0 * r - (c[0] - d[0]).hypot(c[1] - d[1]));
        }
    }
    worst
}

/// Decide whether `inst.n` circles fit, trying up to `restarts` starting
/// configurations of `max_iters` descent steps each.
pub fn packing_decision(inst: &PackingInstance, seed: u64, restarts: usize, max_iters: usize) -> PackingSolution {
    if inst.provably_infeasible() || restarts == 0 {
        return PackingSolution::empty(seed);
    }
    let mut best: Option<(usize, Vec<[f64; 2]>, f64)> = None;
    let mut start = 0;
    while start < restarts {
        // The lattice warm start runs alone; it usually settles the instance.
        let end = if start == 0 { 1 } else { (start + BATCH).min(restarts) };
        let batch: Vec<(usize, Vec<[f64; 2]>, f64)> = (start..end)
            .into_par_iter()
            .map(|k| {
                let centers = descend(inst, initial_centers(inst, seed, k), max_iters);
                let res = residual(inst, &centers);
                (k, centers, res)
            })
            .collect();
        for (k, centers, res) in batch {
            if res <= FEASIBILITY_TOL {
                return PackingSolution { feasible: true, centers, residual: res.max(0.0), seed, restarts_used: k + 1 };
            }
            if best.as_ref().is_none_or(|b| res < b.2) {
                best = Some((k, centers, res));
            }
        }
        start = end;
    }
    let (_, centers, res) = best.expect("at least one restart ran");
    PackingSolution { feasible: false, centers, residual: res, seed, restarts_used: restarts }
}

/// Largest `n` for which [`packing_decision`] succeeds. Counts up from the
/// size of the best lattice, which the warm start always realizes.
pub fn max_circles(
    r: f64,
    d1: f64,
    d2: f64,
    seed: u64,
    restarts: usize,
    max_iters: usize,
) -> (usize, PackingSolution) {
    let mut last = PackingSolution::empty(seed);
    let lattice = PackingInstance::new(usize::MAX, r, d1, d2).map_or(0, |inst| lattice_start(&inst).len());
    let mut n = lattice.max(1);
    loop {
        let Some(inst) = PackingInstance::new(n, r, d1, d2) else {
            return (0, last);
        };
        let sol = packing_decision(&inst, seed, restarts, max_iters);
        if !sol.feasible {
            if last.centers.is_empty() && n > 1 {
                n = 1;
                continue;
            }
            return (n - 1, last);
        }
        last = sol;
        n += 1;
    }
}

/// Restart 0 starts from the denser of a square and a hexagonal lattice;
/// later restarts start from seeded uniform positions.
fn initial_centers(inst: &PackingInstance, seed: u64, restart: usize) -> Vec<[f64; 2]> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(restart as u64);
    let mut centers = if restart == 0 { lattice_start(inst) } else { Vec::new() };
    centers.truncate(inst.n);
    let axis = |d: f64, rng: &mut ChaCha8Rng| {
        if d > 2.0 * inst.r {
            rng.gen_range(inst.r..d - inst.r)
        } else {
            d / 2.0
        }
    };
    while centers.len() < inst.n {
        let x = axis(inst.d1, &mut rng);
        let y = axis(inst.d2, &mut rng);
        centers.push([x, y]);
    }
    centers
}

fn lattice_start(inst: &PackingInstance) -> Vec<[f64; 2]> {
    let r = inst.r;
    let square = {
        let (nx, ny) = ((inst.d1 / (2.0 * r)).floor() as usize, (inst.d2 / (2.0 * r)).floor() as usize);
        let mut v = Vec::with_capacity(nx * ny);
        for i in 0..nx {
            for j in 0..ny {
                v.push([(2 * i + 1) as f64 * r, (2 * j + 1) as f64 * r]);
            }
        }
        v
    };
    let hex = |d1: f64, d2: f64, swap: bool| {
        let mut v = Vec::new();
        let pitch = 3f64.sqrt() * r;
        if d2 < 2.0 * r {
            return v;
        }
        let rows = ((d2 - 2.0 * r) / pitch).floor() as usize + 1;
        for row in 0..rows {
            let offset = if row % 2 == 1 { r } else { 0.0 };
            let y = r + row as f64 * pitch;
            let mut x = r + offset;
            while x + r <= d1 + 1e-12 {
                v.push(if swap { [y, x] } else { [x, y] });
                x += 2.0 * r;
            }
        }
        v
    };
    [square, hex(inst.d1, inst.d2, false), hex(inst.d2, inst.d1, true)]
        .into_iter()
        .rev()
        .max_by_key(|v| v.len().min(inst.n))
        .unwrap_or_default()
}

/// Penalty value; the gradient is accumulated into `g` unless it is empty.
fn penalty_and_gradient(inst: &PackingInstance, r: f64, x: &[[f64; 2]], g: &mut [[f64; 2]]) -> f64 {
    let mut p = 0.0;
    g.iter_mut().for_each(|v| *v = [0.0, 0.0]);
    let want_grad = !g.is_empty();
    let bounds = [(r, inst.d1 - r), (r, inst.d2 - r)];
    for i in 0..x.len() {
        for (k, &(lo, hi)) in bounds.iter().enumerate() {
            let v = x[i][k];
            if v < lo {
                p += (lo - v).powi(2);
                if want_grad {
                    g[i][k] -= 2.0 * (lo - v);
                }
            } else if v > hi {
                p += (v - hi).powi(2);
                if want_grad {
                    g[i][k] += 2.0 * (v - hi);
                }
            }
        }
    }
    for_close_pairs(x, 2.0 * r, |i, j| {
        let dx = x[i][0] - x[j][0];
        let dy = x[i][1] - x[j][1];
        let d = dx.hypot(dy);
        let overlap = 2.0 * r - d;
        if overlap > 0.0 {
            p += overlap * overlap;
            if want_grad && d > 0.0 {
                let s = -2.0 * overlap / d;
                g[i][0] += s * dx;
                g[i][1] += s * dy;
                g[j][0] -= s * dx;
                g[j][1] -= s * dy;
            }
        }
    });
    p
}

/// Calls `f(i, j)`, `i < j`, for every pair closer than `reach`, and for
/// some farther pairs. Uses buckets of side `reach` when that beats checking
/// all pairs.
fn for_close_pairs(x: &[[f64; 2]], reach: f64, mut f: impl FnMut(usize, usize)) {
    let n = x.len();
    let all_pairs = |f: &mut dyn FnMut(usize, usize)| {
        for i in 0..n {
            for j in i + 1..n {
                f(i, j);
            }
        }
    };
    if n < 32 {
        return all_pairs(&mut f);
    }
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for c in x {
        for k in 0..2 {
            lo[k] = lo[k].min(c[k]);
            hi[k] = hi[k].max(c[k]);
        }
    }
    let cells = |k: usize| ((hi[k] - lo[k]) / reach).floor() + 1.0;
    let (cx, cy) = (cells(0), cells(1));
    if !(cx * cy <= (4 * n) as f64) {
        return all_pairs(&mut f);
    }
    let (cx, cy) = (cx as usize, cy as usize);
    let cell_of = |c: &[f64; 2]| {
        let i = (((c[0] - lo[0]) / reach) as usize).min(cx - 1);
        let j = (((c[1] - lo[1]) / reach) as usize).min(cy - 1);
        (i, j)
    };
    // Counting sort of circle indices by cell.
    let mut start = vec![0usize; cx * cy + 1];
    let home: Vec<(usize, usize)> = x.iter().map(cell_of).collect();
    for &(i, j) in &home {
        start[i * cy + j + 1] += 1;
    }
    for k in 0..cx * cy {
        start[k + 1] += start[k];
    }
    let mut fill = start.clone();
    let mut order = vec![0usize; n];
    for (idx, &(i, j)) in home.iter().enumerate() {
        order[fill[i * cy + j]] = idx;
        fill[i * cy + j] += 1;
    }
    for (a, &(i, j)) in home.iter().enumerate() {
        for ni in i.saturating_sub(1)..=(i + 1).min(cx - 1) {
            for nj in j.saturating_sub(1)..=(j + 1).min(cy - 1) {
                let cell = ni * cy + nj;
                for &b in &order[start[cell]..start[cell + 1]] {
                    if b > a {
                        f(a, b);
                    }
                }
            }
        }
    }
}

/// Gradient descent with Armijo backtracking on the penalty.
fn descend(inst: &PackingInstance, mut x: Vec<[f64; 2]>, max_iters: usize) -> Vec<[f64; 2]> {
    let r = inst.r + INFLATION;
    let mut grad = vec![[0.0; 2]; x.len()];
    let mut trial = x.clone();
    let mut step = 0.5;
    let mut p = penalty_and_gradient(inst, r, &x, &mut grad);
    let mut checkpoint = p;
    for it in 0..max_iters {
        if p == 0.0 {
            break;
        }
        // Stuck in a local minimum with overlaps left.
        if it > 0 && it % STALL_WINDOW == 0 {
            if p > (1.0 - STALL_DECREASE) * checkpoint {
                break;
            }
            checkpoint = p;
        }
        let gnorm2: f64 = grad.iter().map(|g| g[0] * g[0] + g[1] * g[1]).sum();
        if gnorm2 == 0.0 {
            // Coincident centers give a zero gradient; nudge them apart.
            for (i, c) in x.iter_mut().enumerate() {
                let a = i as f64 * 2.399_963;
                c[0] += 1e-3 * inst.r * a.cos();
                c[1] += 1e-3 * inst.r * a.sin();
            }
            p = penalty_and_gradient(inst, r, &x, &mut grad);
            continue;
        }
        step *= 2.0;
        loop {
            for ((t, c), g) in trial.iter_mut().zip(&x).zip(&grad) {
                t[0] = c[0] - step * g[0];
                t[1] = c[1] - step * g[1];
            }
            let pt = penalty_and_gradient(inst, r, &trial, &mut []);
            if pt <= p - 1e-4 * step * gnorm2 {
                break;
            }
            step *= 0.5;
            if step < 1e-14 {
                break;
            }
        }
        if step < 1e-14 {
            break;
        }
        std::mem::swap(&mut x, &mut trial);
        p = penalty_and_gradient(inst, r, &x, &mut grad);
        if p < 1e-16 && residual(inst, &x) <= 0.0 {
            break;
        }
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bucketed_pairs_cover_all_close_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in [5, 40, 300] {
            let x: Vec<[f64; 2]> = (0..n).map(|_| [rng.gen_range(-3.0..25.0), rng.gen_range(0.0..12.0)]).collect();
            let reach = 1.3;
            let mut seen = std::collections::HashSet::new();
            for_close_pairs(&x, reach, |i, j| {
                assert!(i < j);
                assert!(seen.insert((i, j)));
            });
            for i in 0..n {
                for j in i + 1..n {
                    if (x[i][0] - x[j][0]).hypot(x[i][1] - x[j][1]) < reach {
                        assert!(seen.contains(&(i, j)), "missed {i},{j} of {n}");
                    }
                }
            }
        }
    }

    const SEED: u64 = 7;

    fn decide(n: usize, r: f64, d1: f64, d2: f64) -> PackingSolution {
        packing_decision(&PackingInstance::new(n, r, d1, d2).unwrap(), SEED, DEFAULT_RESTARTS, DEFAULT_MAX_ITERS)
    }

    fn assert_certificate(inst: &PackingInstance, sol: &PackingSolution) {
        assert_eq!(sol.centers.len(), inst.n);
        for (i, c) in sol.centers.iter().enumerate() {
            assert!(c[0] >= inst.r - FEASIBILITY_TOL && c[0] <= inst.d1 - inst.r + FEASIBILITY_TOL);
            assert!(c[1] >= inst.r - FEASIBILITY_TOL && c[1] <= inst.d2 - inst.r + FEASIBILITY_TOL);
            for d in &sol.centers[i + 1..] {
                assert!((c[0] - d[0]).hypot(c[1] - d[1]) >= 2.0 * inst.r - FEASIBILITY_TOL);
            }
        }
        assert!(sol.residual <= FEASIBILITY_TOL);
    }

    #[test]
    fn diameter_exceeds_side() {
        assert!(!decide(1, 5.0, 8.0, 8.0).feasible);
    }

    #[test]
    fn four_unit_circles_tile_a_square() {
        let sol = decide(4, 1.0, 4.0, 4.0);
        assert!(sol.feasible);
        let inst = PackingInstance::new(4, 1.0, 4.0, 4.0).unwrap();
        assert_certificate(&inst, &sol);
        let mut c = sol.centers.clone();
        c.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let expect = [[1.0, 1.0], [1.0, 3.0], [3.0, 1.0], [3.0, 3.0]];
        for (a, b) in c.iter().zip(expect) {
            assert!((a[0] - b[0]).abs() < 1e-6 && (a[1] - b[1]).abs() < 1e-6);
        }
    }

    #[test]
    fn random_starts_reach_feasibility() {
        // Restart 0 is the lattice; force random starts by asking for a
        // count the lattice does not provide in full.
        let inst = PackingInstance::new(3, 1.0, 5.0, 3.5).unwrap();
        let sol = packing_decision(&inst, SEED, DEFAULT_RESTARTS, DEFAULT_MAX_ITERS);
        assert!(sol.feasible, "{sol:?}");
        assert_certificate(&inst, &sol);
    }

    #[test]
    fn grid_bound_examples() {
        assert_eq!(grid_lower_bound(10.0, 40.0, 60.0), 6);
        assert_eq!(grid_lower_bound(10.0, 19.0, 100.0), 0);
        assert_eq!(grid_lower_bound(5.0, 40.0, 60.0), 24);
    }

    #[test]
    fn max_circles_examples() {
        let (n, sol) = max_circles(10.0, 40.0, 60.0, SEED, DEFAULT_RESTARTS, DEFAULT_MAX_ITERS);
        assert_eq!(n, 6);
        assert_eq!(density_upper_bound(10.0, 40.0, 60.0), 6);
        assert_certificate(&PackingInstance::new(6, 10.0, 40.0, 60.0).unwrap(), &sol);

        let (n, sol) = max_circles(10.0, 15.0, 15.0, SEED, DEFAULT_RESTARTS, DEFAULT_MAX_ITERS);
        assert_eq!(n, 0);
        assert!(sol.centers.is_empty());

        for k in 1..=6 {
            let (n, _) = max_circles(1.0, 2.0, 2.0 * k as f64, SEED, DEFAULT_RESTARTS, DEFAULT_MAX_ITERS);
            assert_eq!(n, k);
        }
    }

    #[test]
    fn max_circles_never_below_grid_and_nonincreasing() {
        let mut prev = usize::MAX;
        for i in 0..12 {
            let r = 6.0 + i as f64;
            let (n, _) = max_circles(r, 40.0, 60.0, SEED, 20, 1000);
            assert!(n >= grid_lower_bound(r, 40.0, 60.0), "r = {r}");
            assert!(n <= prev, "r = {r}: {n} > {prev}");
            prev = n;
        }
    }
}
