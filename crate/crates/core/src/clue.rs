//! Classical CLUE: tiled local density, nearest-higher scan, seed/outlier
//! classification and follower-tree cluster assignment.
//!
//! This is the deterministic reference for the quantum pipeline and the
//! `O(m)`-per-query classical cost baseline.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Dataset, NhSearch, Params, Point, Role, SqDist, Thresholds, TileGrid};

/// Label used for outliers and points not reached from any seed.
pub const NOISE: i64 = -1;

/// Outcome of a clustering run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClusterResult {
    /// `-1` for outliers and stranded points, otherwise the cluster id.
    pub labels: Vec<i64>,
    /// Seed of cluster `c` is `seeds[c]`.
    pub seeds: Vec<usize>,
    pub outliers: Vec<usize>,
    pub n_clusters: usize,
}

impl ClusterResult {
    /// Reads labels back from the points' `cluster_id` annotations.
    pub(crate) fn from_annotations(ds: &Dataset, seeds: Vec<usize>) -> Self {
        let labels = ds
            .points()
            .iter()
            .map(|p| p.cluster_id.map_or(NOISE, |c| c as i64))
            .collect();
        let outliers = ds
            .points()
            .iter()
            .enumerate()
            .filter(|(_, p)| p.role == Role::Outlier)
            .map(|(i, _)| i)
            .collect();
        Self {
            labels,
            n_clusters: seeds.len(),
            seeds,
            outliers,
        }
    }

    pub fn cluster_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.n_clusters];
        for &l in &self.labels {
            if l >= 0 {
                sizes[l as usize] += 1;
            }
        }
        sizes
    }
}

/// `rho_j = E_j + 1/2 * sum of E_i` over the given neighbors, summed in
/// ascending index order so every route produces the same bits.
pub(crate) fn density_from_neighbors(ds: &Dataset, j: usize, sorted_neighbors: &[usize]) -> f64 {
    debug_assert!(sorted_neighbors.windows(2).all(|w| w[0] < w[1]));
    let pts = ds.points();
    let sum: f64 = sorted_neighbors.iter().map(|&i| pts[i].energy).sum();
    pts[j].energy + 0.5 * sum
}

/// Strict `d_ij < d_c`, self excluded.
#[inline]
pub(crate) fn is_density_neighbor(ds: &Dataset, j: usize, i: usize, d_c_sq: SqDist) -> bool {
    i != j && ds.sq_dist(i, j) < d_c_sq
}

/// Seed condition: `d_NH > d_c` and `rho > rho_c`.
#[inline]
pub(crate) fn is_seed(p: &Point, thr: &Thresholds, rho_c: f64) -> bool {
    p.nh_sq.is_none_or(|d| d > thr.d_c_sq) && p.density > rho_c
}

/// Outlier condition: `d_NH > delta * d_c` and `rho < rho_c`.
#[inline]
pub(crate) fn is_outlier(p: &Point, thr: &Thresholds, rho_c: f64) -> bool {
    p.nh_sq.is_none_or(|d| d > thr.d_m_sq) && p.density < rho_c
}

/// Seeds in cluster-id order: descending density, then ascending index.
pub(crate) fn seed_order(ds: &Dataset) -> Vec<usize> {
    let pts = ds.points();
    let mut seeds: Vec<usize> = (0..pts.len())
        .filter(|&i| pts[i].role == Role::Seed)
        .collect();
    seeds.sort_by(|&a, &b| pts[b].density.total_cmp(&pts[a].density).then(a.cmp(&b)));
    seeds
}

pub(crate) fn write_nearest_higher(ds: &mut Dataset, j: usize, nh: Option<(usize, SqDist)>) {
    let q = ds.quantizer();
    let p = &mut ds.points_mut()[j];
    match nh {
        Some((i, sq)) => {
            p.nearest_higher = Some(i);
            p.nh_sq = Some(sq);
            p.nh_distance = q.distance(sq);
        }
        None => {
            p.nearest_higher = None;
            p.nh_sq = None;
            p.nh_distance = f64::INFINITY;
        }
    }
}

/// Fills `density` for every point using the `d_c` search space of each.
pub fn local_density(ds: &mut Dataset, grid: &TileGrid, params: &Params) -> Result<()> {
    let thr = params.thresholds()?;
    let snapshot: &Dataset = ds;
    let densities: Vec<f64> = (0..snapshot.len())
        .into_par_iter()
        .map(|j| {
            let space = grid.search_space_fixed(&snapshot.points()[j].coords, thr.d_c);
            let neighbors: Vec<usize> = space
                .points()
                .iter()
                .copied()
                .filter(|&i| is_density_neighbor(snapshot, j, i, thr.d_c_sq))
                .collect();
            density_from_neighbors(snapshot, j, &neighbors)
        })
        .collect();
    for (p, rho) in ds.points_mut().iter_mut().zip(densities) {
        p.density = rho;
    }
    Ok(())
}

/// Nearest point to `j` with strictly higher density, ties broken by the
/// lower index. Under [`NhSearch::Capped`] only points with `d_ij <= d_m`
/// qualify.
pub fn nearest_higher_scan(
    ds: &Dataset,
    grid: &TileGrid,
    params: &Params,
    j: usize,
) -> Result<Option<(usize, SqDist)>> {
    let thr = params.thresholds()?;
    ds.point(j)?;
    Ok(nh_scan(ds, grid, &thr, params.nh_search, j))
}

fn nh_scan(
    ds: &Dataset,
    grid: &TileGrid,
    thr: &Thresholds,
    mode: NhSearch,
    j: usize,
) -> Option<(usize, SqDist)> {
    let pts = ds.points();
    let rho_j = pts[j].density;
    let better = |best: Option<(usize, SqDist)>, i: usize, sq: SqDist| match best {
        None => true,
        Some((bi, bsq)) => (sq, i) < (bsq, bi),
    };
    let mut best = None;
    match mode {
        NhSearch::Capped => {
            let space = grid.search_space_fixed(&pts[j].coords, thr.d_m);
            for &i in space.points() {
                if pts[i].density > rho_j {
                    let sq = ds.sq_dist(i, j);
                    if sq <= thr.d_m_sq && better(best, i, sq) {
                        best = Some((i, sq));
                    }
                }
            }
        }
        NhSearch::Global => {
            for (i, p) in pts.iter().enumerate() {
                if p.density > rho_j {
                    let sq = ds.sq_dist(i, j);
                    if better(best, i, sq) {
                        best = Some((i, sq));
                    }
                }
            }
        }
    }
    best
}

/// Fills the nearest-higher annotations of every point.
pub fn nearest_highers(ds: &mut Dataset, grid: &TileGrid, params: &Params) -> Result<()> {
    let thr = params.thresholds()?;
    let snapshot: &Dataset = ds;
    let found: Vec<_> = (0..snapshot.len())
        .into_par_iter()
        .map(|j| nh_scan(snapshot, grid, &thr, params.nh_search, j))
        .collect();
    for (j, nh) in found.into_iter().enumerate() {
        write_nearest_higher(ds, j, nh);
    }
    Ok(())
}

/// Marks seeds, outliers and followers.
pub fn classify_seeds_outliers(ds: &mut Dataset, params: &Params) -> Result<()> {
    let thr = params.thresholds()?;
    for p in ds.points_mut() {
        p.role = if is_seed(p, &thr, params.rho_c) {
            Role::Seed
        } else if is_outlier(p, &thr, params.rho_c) {
            Role::Outlier
        } else {
            Role::Follower
        };
    }
    Ok(())
}

/// Grows one cluster per seed by following nearest-higher links downwards.
///
/// Only followers are absorbed; outliers, and anything hanging below an
/// outlier, keep label `-1`.
pub fn assign_clusters(ds: &mut Dataset) -> ClusterResult {
    let n = ds.len();
    let mut children: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (j, p) in ds.points().iter().enumerate() {
        if p.role == Role::Follower {
            if let Some(h) = p.nearest_higher {
                children[h].push(j);
            }
        }
    }

    let seeds = seed_order(ds);
    for p in ds.points_mut() {
        p.cluster_id = None;
    }
    let pts = ds.points_mut();
    let mut stack = Vec::new();
    for (c, &s) in seeds.iter().enumerate() {
        pts[s].cluster_id = Some(c);
        stack.push(s);
        while let Some(v) = stack.pop() {
            for &f in &children[v] {
                if pts[f].cluster_id.is_none() {
                    pts[f].cluster_id = Some(c);
                    stack.push(f);
                }
            }
        }
    }
    ClusterResult::from_annotations(ds, seeds)
}

/// Rejects params whose precision differs from the dataset's.
pub(crate) fn check_precision(ds: &Dataset, params: &Params) -> Result<()> {
    params.validate()?;
    if ds.precision_bits() != params.precision_bits {
        return Err(Error::InvalidParams(format!(
            "dataset uses {} fractional bits, params use {}",
            ds.precision_bits(),
            params.precision_bits
        )));
    }
    Ok(())
}

/// Runs every classical phase on `ds`, overwriting its annotations.
pub fn run_clue(ds: &mut Dataset, params: &Params) -> Result<ClusterResult> {
    check_precision(ds, params)?;
    ds.reset_annotations();
    let grid = TileGrid::build(ds, params.tile_edge())?;
    local_density(ds, &grid, params)?;
    nearest_highers(ds, &grid, params)?;
    classify_seeds_outliers(ds, params)?;
    Ok(assign_clusters(ds))
}
