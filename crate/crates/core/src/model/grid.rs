//! Uniform square tiling and search-space computation.

use std::collections::BTreeMap;

use super::{Dataset, Quantizer};
use crate::error::{Error, Result};

/// Uniform tiling of the dataset's bounding box into square tiles.
///
/// Bucketing uses half-open intervals `[low, high)` per axis, except that the
/// topmost tile on each axis is closed so the maximum coordinate has a home.
#[derive(Debug, Clone)]
pub struct TileGrid {
    origin: Vec<i64>,
    edge: i64,
    dims: Vec<usize>,
    strides: Vec<u64>,
    buckets: BTreeMap<u64, Vec<usize>>,
    n_points: usize,
    quantizer: Quantizer,
}

impl TileGrid {
    /// Tiles the bounding box of `ds` with square tiles of edge `tile_edge`.
    pub fn build(ds: &Dataset, tile_edge: f64) -> Result<Self> {
        if ds.is_empty() {
            return Err(Error::EmptyInput("cannot tile an empty dataset".into()));
        }
        if !(tile_edge.is_finite() && tile_edge > 0.0) {
            return Err(Error::InvalidParams(format!(
                "tile_edge must be positive, got {tile_edge}"
            )));
        }
        let quantizer = ds.quantizer();
        let edge = quantizer.to_fixed(tile_edge)?;
        if edge < 1 {
            return Err(Error::InvalidParams(
                "tile_edge is below the coordinate precision".into(),
            ));
        }

        let dim = ds.dim();
        let mut lo = vec![i64::MAX; dim];
        let mut hi = vec![i64::MIN; dim];
        for p in ds.points() {
            for (a, &x) in p.coords.iter().enumerate() {
                lo[a] = lo[a].min(x);
                hi[a] = hi[a].max(x);
            }
        }

        let dims: Vec<usize> = lo
            .iter()
            .zip(&hi)
            .map(|(&l, &h)| {
                let range = (h as i128 - l as i128) as u128;
                let n = range.div_ceil(edge as u128).max(1);
                usize::try_from(n).unwrap_or(usize::MAX)
            })
            .collect();

        let mut strides = Vec::with_capacity(dim);
        let mut acc: u64 = 1;
        for &n in &dims {
            strides.push(acc);
            acc = acc
                .checked_mul(n as u64)
                .ok_or_else(|| Error::InvalidData("tile grid too large to index".into()))?;
        }

        let mut grid = Self {
            origin: lo,
            edge,
            dims,
            strides,
            buckets: BTreeMap::new(),
            n_points: ds.len(),
            quantizer,
        };
        for (i, p) in ds.points().iter().enumerate() {
            let key = grid.linear(&grid.tile_of(&p.coords));
            grid.buckets.entry(key).or_default().push(i);
        }
        Ok(grid)
    }

    pub fn dim(&self) -> usize {
        self.dims.len()
    }

    /// Number of tiles along each axis.
    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn origin(&self) -> Vec<f64> {
        self.origin
            .iter()
            .map(|&v| self.quantizer.to_real(v))
            .collect()
    }

    pub fn tile_edge(&self) -> f64 {
        self.quantizer.to_real(self.edge)
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    /// Number of non-empty tiles.
    pub fn occupied_tiles(&self) -> usize {
        self.buckets.len()
    }

    /// Tile holding fixed-point coordinates `coords` (clamped to the grid).
    pub fn tile_of(&self, coords: &[i64]) -> Vec<usize> {
        coords
            .iter()
            .enumerate()
            .map(|(a, &x)| self.axis_index(a, x))
            .collect()
    }

    fn axis_index(&self, axis: usize, x: i64) -> usize {
        let off = x as i128 - self.origin[axis] as i128;
        let idx = off.div_euclid(self.edge as i128);
        idx.clamp(0, self.dims[axis] as i128 - 1) as usize
    }

    /// Row-major tile index `k`.
    pub fn linear(&self, tile: &[usize]) -> u64 {
        tile.iter()
            .zip(&self.strides)
            .map(|(&t, &s)| t as u64 * s)
            .sum()
    }

    fn unlinear(&self, mut k: u64) -> Vec<usize> {
        let mut out = vec![0; self.dims.len()];
        for a in (0..self.dims.len()).rev() {
            out[a] = (k / self.strides[a]) as usize;
            k %= self.strides[a];
        }
        out
    }

    /// Point indices bucketed in `tile`.
    pub fn bucket(&self, tile: &[usize]) -> &[usize] {
        self.buckets
            .get(&self.linear(tile))
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    /// Iterates over the non-empty buckets as `(tile index k, points)`.
    pub fn buckets(&self) -> impl Iterator<Item = (u64, &[usize])> {
        self.buckets.iter().map(|(&k, v)| (k, v.as_slice()))
    }

    /// Tiles intersecting the square of half-width `radius` around `center`.
    pub fn search_space(&self, center: &[f64], radius: f64) -> Result<SearchSpace> {
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::InvalidParams(format!(
                "radius must be positive, got {radius}"
            )));
        }
        let c = self.fixed_vec(center)?;
        let r = self.quantizer.to_fixed(radius)?;
        Ok(self.search_space_fixed(&c, r))
    }

    pub(crate) fn search_space_fixed(&self, center: &[i64], radius: i64) -> SearchSpace {
        let lo: Vec<i64> = center.iter().map(|&c| c.saturating_sub(radius)).collect();
        let hi: Vec<i64> = center.iter().map(|&c| c.saturating_add(radius)).collect();
        self.box_space(&lo, &hi)
    }

    /// Dynamic search space: tiles touched by the bounding box of the
    /// `2 * d_m` square windows around every member.
    pub fn dynamic_search_space(
        &self,
        ds: &Dataset,
        members: &[usize],
        d_m: f64,
    ) -> Result<SearchSpace> {
        if !(d_m.is_finite() && d_m > 0.0) {
            return Err(Error::InvalidParams(format!(
                "d_m must be positive, got {d_m}"
            )));
        }
        let half = self.quantizer.to_fixed(d_m)?;
        self.dynamic_search_space_fixed(ds, members, half)
    }

    pub(crate) fn dynamic_search_space_fixed(
        &self,
        ds: &Dataset,
        members: &[usize],
        half_width: i64,
    ) -> Result<SearchSpace> {
        if members.is_empty() {
            return Err(Error::EmptyInput(
                "dynamic search space needs members".into(),
            ));
        }
        let dim = self.dim();
        let mut lo = vec![i64::MAX; dim];
        let mut hi = vec![i64::MIN; dim];
        for &m in members {
            let p = ds.point(m)?;
            for (a, &x) in p.coords.iter().enumerate() {
                lo[a] = lo[a].min(x);
                hi[a] = hi[a].max(x);
            }
        }
        lo.iter_mut()
            .for_each(|v| *v = v.saturating_sub(half_width));
        hi.iter_mut()
            .for_each(|v| *v = v.saturating_add(half_width));
        Ok(self.box_space(&lo, &hi))
    }

    /// Every tile intersecting the closed box `[lo, hi]`, clipped to the grid.
    pub(crate) fn box_space(&self, lo: &[i64], hi: &[i64]) -> SearchSpace {
        let mut t_lo = Vec::with_capacity(self.dim());
        let mut t_hi = Vec::with_capacity(self.dim());
        for a in 0..self.dim() {
            let top = self.dims[a] as i128 - 1;
            let e = self.edge as i128;
            let l = (lo[a] as i128 - self.origin[a] as i128).div_euclid(e);
            let h = (hi[a] as i128 - self.origin[a] as i128).div_euclid(e);
            // the top tile is closed, so a box starting exactly on the upper
            // grid boundary still touches it
            let on_top_edge = lo[a] as i128 - self.origin[a] as i128 == (top + 1) * e;
            let l = if on_top_edge { top } else { l };
            if h < 0 || l > top {
                return SearchSpace::empty();
            }
            t_lo.push(l.max(0) as usize);
            t_hi.push(h.min(top) as usize);
        }

        let box_tiles: u128 = t_lo
            .iter()
            .zip(&t_hi)
            .map(|(&l, &h)| (h - l + 1) as u128)
            .product();

        let mut points = Vec::new();
        if box_tiles <= self.buckets.len() as u128 {
            let mut cursor = t_lo.clone();
            loop {
                points.extend_from_slice(self.bucket(&cursor));
                if !odometer_step(&mut cursor, &t_lo, &t_hi) {
                    break;
                }
            }
        } else {
            for (&k, v) in &self.buckets {
                let t = self.unlinear(k);
                if t.iter()
                    .enumerate()
                    .all(|(a, &x)| x >= t_lo[a] && x <= t_hi[a])
                {
                    points.extend_from_slice(v);
                }
            }
        }
        points.sort_unstable();

        SearchSpace {
            bounds: Some((t_lo, t_hi)),
            points,
        }
    }

    fn fixed_vec(&self, x: &[f64]) -> Result<Vec<i64>> {
        if x.len() != self.dim() {
            return Err(Error::InvalidData(format!(
                "expected {} coordinates, got {}",
                self.dim(),
                x.len()
            )));
        }
        x.iter().map(|&v| self.quantizer.to_fixed(v)).collect()
    }
}

fn odometer_step(cursor: &mut [usize], lo: &[usize], hi: &[usize]) -> bool {
    for a in 0..cursor.len() {
        if cursor[a] < hi[a] {
            cursor[a] += 1;
            return true;
        }
        cursor[a] = lo[a];
    }
    false
}

/// A box of tiles together with the points bucketed inside it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchSpace {
    /// Inclusive per-axis tile ranges, `None` when the query missed the grid.
    bounds: Option<(Vec<usize>, Vec<usize>)>,
    /// Point indices in ascending order.
    points: Vec<usize>,
}

impl SearchSpace {
    fn empty() -> Self {
        Self {
            bounds: None,
            points: Vec::new(),
        }
    }

    /// Number of points `m` in the search space.
    pub fn point_count(&self) -> usize {
        self.points.len()
    }

    pub fn points(&self) -> &[usize] {
        &self.points
    }

    pub fn is_empty(&self) -> bool {
        self.bounds.is_none()
    }

    pub fn bounds(&self) -> Option<(&[usize], &[usize])> {
        self.bounds
            .as_ref()
            .map(|(l, h)| (l.as_slice(), h.as_slice()))
    }

    pub fn tile_count(&self) -> u128 {
        match &self.bounds {
            None => 0,
            Some((l, h)) => l
                .iter()
                .zip(h)
                .map(|(&a, &b)| (b - a + 1) as u128)
                .product(),
        }
    }

    pub fn contains_tile(&self, tile: &[usize]) -> bool {
        match &self.bounds {
            None => false,
            Some((l, h)) => tile
                .iter()
                .enumerate()
                .all(|(a, &t)| t >= l[a] && t <= h[a]),
        }
    }

    /// Whether every tile of `other` is also in `self`.
    pub fn covers(&self, other: &SearchSpace) -> bool {
        match (&self.bounds, &other.bounds) {
            (_, None) => true,
            (None, Some(_)) => false,
            (Some((l, h)), Some((ol, oh))) => (0..l.len()).all(|a| l[a] <= ol[a] && oh[a] <= h[a]),
        }
    }

    /// All tiles of the space as per-axis coordinates.
    pub fn tiles(&self) -> Vec<Vec<usize>> {
        let Some((lo, hi)) = &self.bounds else {
            return Vec::new();
        };
        let mut out = Vec::new();
        let mut cursor = lo.clone();
        loop {
            out.push(cursor.clone());
            if !odometer_step(&mut cursor, lo, hi) {
                break;
            }
        }
        out
    }
}
