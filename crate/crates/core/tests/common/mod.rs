#![allow(dead_code)]

use qlue_core::{Dataset, NhSearch, Params, SqDist};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

/// Clumps plus background, coordinates on a 0.25 grid and energies in
/// half-units, so duplicate points and density ties are common.
pub fn random_dataset(seed: u64, n: usize, dim: usize) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_clumps = rng.random_range(1..=6);
    let centers: Vec<Vec<f64>> = (0..n_clumps)
        .map(|_| (0..dim).map(|_| rng.random_range(0.0..200.0)).collect())
        .collect();
    let spread = Normal::new(0.0, rng.random_range(3.0..15.0)).unwrap();
    let snap = |x: f64| (x * 4.0).round() / 4.0;
    let mut coords = Vec::with_capacity(n);
    let mut energies = Vec::with_capacity(n);
    for _ in 0..n {
        let p: Vec<f64> = if rng.random_bool(0.75) {
            let c = &centers[rng.random_range(0..n_clumps)];
            c.iter()
                .map(|&x| snap(x + spread.sample(&mut rng)))
                .collect()
        } else {
            (0..dim)
                .map(|_| snap(rng.random_range(-20.0..220.0)))
                .collect()
        };
        coords.push(p);
        energies.push(rng.random_range(1..=6) as f64 * 0.5);
    }
    Dataset::from_reals(&coords, &energies, 16).unwrap()
}

pub fn random_params(seed: u64) -> Params {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let d_c = rng.random_range(3.0..25.0);
    let mut p = Params::new(d_c, rng.random_range(1.0..3.0), rng.random_range(1.0..40.0)).unwrap();
    if rng.random_bool(0.3) {
        p = p.with_nh_search(NhSearch::Global);
    }
    if rng.random_bool(0.5) {
        p = p.with_tile_edge(d_c * rng.random_range(0.5..2.0));
    }
    p
}

/// Radius in the dataset's fixed-point units.
pub fn fixed(ds: &Dataset, r: f64) -> i64 {
    ds.quantizer().to_fixed(r).unwrap()
}

/// All-pairs density: own energy plus half of every strictly closer
/// neighbor's, summed in index order.
pub fn brute_density(ds: &Dataset, d_c: f64) -> Vec<f64> {
    let lim = SqDist::of_length(fixed(ds, d_c));
    let pts = ds.points();
    (0..ds.len())
        .map(|j| {
            let mut sum = 0.0;
            for (i, p) in pts.iter().enumerate() {
                if i != j && ds.sq_dist(i, j) < lim {
                    sum += p.energy;
                }
            }
            pts[j].energy + 0.5 * sum
        })
        .collect()
}

/// Linear scan for the closest strictly denser point, lower index on ties.
pub fn brute_nearest_higher(ds: &Dataset, params: &Params, j: usize) -> Option<(usize, SqDist)> {
    let cap = match params.nh_search {
        NhSearch::Capped => Some(SqDist::of_length(fixed(ds, params.d_m()))),
        NhSearch::Global => None,
    };
    let pts = ds.points();
    let mut best: Option<(SqDist, usize)> = None;
    for i in 0..ds.len() {
        if pts[i].density <= pts[j].density {
            continue;
        }
        let sq = ds.sq_dist(i, j);
        if cap.is_some_and(|c| sq > c) {
            continue;
        }
        if best.is_none_or(|b| (sq, i) < b) {
            best = Some((sq, i));
        }
    }
    best.map(|(sq, i)| (i, sq))
}
