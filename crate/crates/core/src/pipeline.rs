//! qLUE: the CLUE phases rebuilt on Grover primitives with query accounting.
//!
//! Every phase writes the same annotations as its classical counterpart in
//! [`crate::clue`] and must agree with it exactly.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::clue::{
    check_precision, density_from_neighbors, is_density_neighbor, is_outlier, is_seed, seed_order,
    write_nearest_higher, ClusterResult,
};
use crate::error::Result;
use crate::grover::{isqrt, GroverModel, QueryLedger};
use crate::model::{Dataset, NhSearch, Params, Role, Thresholds, TileGrid};

pub const PHASE_DENSITY: &str = "local_density";
pub const PHASE_NEAREST_HIGHER: &str = "nearest_higher";
pub const PHASE_CLASSIFY: &str = "classify";
pub const PHASE_ASSIGN: &str = "assign";

/// Outcome of a full quantum-model run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PipelineRun {
    pub result: ClusterResult,
    pub ledger: QueryLedger,
    pub params: Params,
    pub rng_seed: u64,
}

/// Measurement seed for one phase; per-point streams hang off it.
fn phase_seed(seed: u64, phase: u64) -> u64 {
    seed ^ phase.wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

fn model(seed: u64, phase_id: u64, stream: u64, phase: &str) -> GroverModel {
    let mut g = GroverModel::with_stream(phase_seed(seed, phase_id), stream);
    g.set_phase(phase);
    g
}

fn merge_all(ledger: &mut QueryLedger, parts: impl IntoIterator<Item = QueryLedger>) {
    for part in parts {
        ledger.merge(&part);
    }
}

/// Densities via one `find_all` per point over its `d_c` search space.
pub fn q_local_density(
    ds: &mut Dataset,
    grid: &TileGrid,
    params: &Params,
    ledger: &mut QueryLedger,
    rng_seed: u64,
) -> Result<()> {
    let thr = params.thresholds()?;
    let snapshot: &Dataset = ds;
    let per_point: Vec<(f64, QueryLedger)> = (0..snapshot.len())
        .into_par_iter()
        .map(|j| -> Result<(f64, QueryLedger)> {
            let mut g = model(rng_seed, 1, j as u64, PHASE_DENSITY);
            let space = grid.search_space_fixed(&snapshot.points()[j].coords, thr.d_c);
            let mut found = g.find_all(space.points(), |i| {
                is_density_neighbor(snapshot, j, i, thr.d_c_sq)
            })?;
            found.sort_unstable();
            Ok((density_from_neighbors(snapshot, j, &found), g.into_ledger()))
        })
        .collect::<Result<_>>()?;
    let mut parts = Vec::with_capacity(per_point.len());
    for (p, (rho, l)) in ds.points_mut().iter_mut().zip(per_point) {
        p.density = rho;
        parts.push(l);
    }
    merge_all(ledger, parts);
    Ok(())
}

/// Nearest highers via GEBS over each point's `d_m` search space (or the
/// whole dataset under [`NhSearch::Global`]).
pub fn q_nearest_highers(
    ds: &mut Dataset,
    grid: &TileGrid,
    params: &Params,
    ledger: &mut QueryLedger,
    rng_seed: u64,
) -> Result<()> {
    let thr = params.thresholds()?;
    let mode = params.nh_search;
    let snapshot: &Dataset = ds;
    let everything: Vec<usize> = (0..snapshot.len()).collect();
    let per_point: Vec<_> = (0..snapshot.len())
        .into_par_iter()
        .map(|j| {
            let mut g = model(rng_seed, 2, j as u64, PHASE_NEAREST_HIGHER);
            let nh = match mode {
                NhSearch::Capped => {
                    let space = grid.search_space_fixed(&snapshot.points()[j].coords, thr.d_m);
                    g.gebs(snapshot, space.points(), j, &thr, mode)
                }
                NhSearch::Global => g.gebs(snapshot, &everything, j, &thr, mode),
            };
            (nh, g.into_ledger())
        })
        .collect();
    let mut parts = Vec::with_capacity(per_point.len());
    for (j, (nh, l)) in per_point.into_iter().enumerate() {
        write_nearest_higher(ds, j, nh);
        parts.push(l);
    }
    merge_all(ledger, parts);
    Ok(())
}

/// Roles via two `find_all` passes over the whole dataset.
pub fn q_classify(
    ds: &mut Dataset,
    params: &Params,
    ledger: &mut QueryLedger,
    rng_seed: u64,
) -> Result<()> {
    let thr = params.thresholds()?;
    let domain: Vec<usize> = (0..ds.len()).collect();
    let mut g = model(rng_seed, 3, 0, PHASE_CLASSIFY);
    let pts = ds.points();
    let seeds = g.find_all(&domain, |i| is_seed(&pts[i], &thr, params.rho_c))?;
    let outliers = g.find_all(&domain, |i| is_outlier(&pts[i], &thr, params.rho_c))?;
    ledger.merge(g.ledger());

    let pts = ds.points_mut();
    for p in pts.iter_mut() {
        p.role = Role::Follower;
    }
    for i in seeds {
        pts[i].role = Role::Seed;
    }
    for i in outliers {
        pts[i].role = Role::Outlier;
    }
    Ok(())
}

/// Half-width of the assignment window: every follower must lie inside the
/// window of its nearest higher.
fn assign_half_width(ds: &Dataset, thr: &Thresholds, mode: NhSearch) -> i64 {
    match mode {
        NhSearch::Capped => thr.d_m,
        NhSearch::Global => {
            let widest = ds
                .points()
                .iter()
                .filter(|p| p.role == Role::Follower)
                .filter_map(|p| p.nh_sq)
                .max();
            let reach = widest.map_or(0, |sq| {
                let r = isqrt(sq.0);
                if (r as i128) * (r as i128) < sq.0 {
                    r + 1
                } else {
                    r
                }
            });
            reach.max(thr.d_m)
        }
    }
}

/// Grows each seed's cluster by repeated `find_all` batches over the
/// dynamic search space of the current members.
pub fn q_assign_clusters(
    ds: &mut Dataset,
    grid: &TileGrid,
    params: &Params,
    ledger: &mut QueryLedger,
    rng_seed: u64,
) -> Result<ClusterResult> {
    let thr = params.thresholds()?;
    let half = assign_half_width(ds, &thr, params.nh_search);
    let seeds = seed_order(ds);
    for p in ds.points_mut() {
        p.cluster_id = None;
    }
    let mut g = model(rng_seed, 4, 0, PHASE_ASSIGN);
    for (c, &s) in seeds.iter().enumerate() {
        ds.points_mut()[s].cluster_id = Some(c);
        let mut members = vec![s];
        loop {
            let dss = grid.dynamic_search_space_fixed(ds, &members, half)?;
            let pts = ds.points();
            let domain: Vec<usize> = dss
                .points()
                .iter()
                .copied()
                .filter(|&i| pts[i].role == Role::Follower && pts[i].cluster_id.is_none())
                .collect();
            if domain.is_empty() {
                break;
            }
            let found = g.find_all(&domain, |i| {
                pts[i]
                    .nearest_higher
                    .is_some_and(|h| pts[h].cluster_id == Some(c))
            })?;
            if found.is_empty() {
                break;
            }
            let pts = ds.points_mut();
            for &i in &found {
                pts[i].cluster_id = Some(c);
            }
            members.extend(found);
        }
    }
    ledger.merge(g.ledger());
    Ok(ClusterResult::from_annotations(ds, seeds))
}

/// Runs every quantum-model phase on `ds`, overwriting its annotations.
pub fn run_qlue(ds: &mut Dataset, params: &Params, rng_seed: u64) -> Result<PipelineRun> {
    check_precision(ds, params)?;
    ds.reset_annotations();
    let grid = TileGrid::build(ds, params.tile_edge())?;
    let mut ledger = QueryLedger::new();
    q_local_density(ds, &grid, params, &mut ledger, rng_seed)?;
    q_nearest_highers(ds, &grid, params, &mut ledger, rng_seed)?;
    q_classify(ds, params, &mut ledger, rng_seed)?;
    let result = q_assign_clusters(ds, &grid, params, &mut ledger, rng_seed)?;
    Ok(PipelineRun {
        result,
        ledger,
        params: *params,
        rng_seed,
    })
}
