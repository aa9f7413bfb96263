//! Domain types shared by the classical and quantum pipelines.
//!
//! Coordinates are quantized on ingestion to `precision_bits` fractional
//! bits and stored as `i64` fixed-point values. Every distance comparison in
//! the crate is carried out on exact squared fixed-point distances, so the
//! classical scan, the Grover model and the brute-force oracles agree
//! bit-for-bit.

mod grid;

pub use grid::{SearchSpace, TileGrid};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported number of fractional bits.
pub const MAX_PRECISION_BITS: u32 = 30;

/// Default coordinate precision (fractional bits).
pub const DEFAULT_PRECISION_BITS: u32 = 16;

/// Converts between reals and `i64` fixed-point values with a fixed number
/// of fractional bits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Quantizer {
    frac_bits: u32,
}

impl Quantizer {
    pub fn new(frac_bits: u32) -> Result<Self> {
        if frac_bits == 0 || frac_bits > MAX_PRECISION_BITS {
            return Err(Error::InvalidParams(format!(
                "precision_bits must be in 1..={MAX_PRECISION_BITS}, got {frac_bits}"
            )));
        }
        Ok(Self { frac_bits })
    }

    pub fn frac_bits(&self) -> u32 {
        self.frac_bits
    }

    pub fn scale(&self) -> f64 {
        (1u64 << self.frac_bits) as f64
    }

    /// Rounds `x` to the nearest representable fixed-point value.
    pub fn to_fixed(&self, x: f64) -> Result<i64> {
        if !x.is_finite() {
            return Err(Error::InvalidData(format!("non-finite value {x}")));
        }
        let scaled = (x * self.scale()).round();
        // keep 2^62 of headroom so squared sums fit comfortably in i128
        if scaled.abs() >= (1u64 << 62) as f64 {
            return Err(Error::InvalidData(format!(
                "value {x} out of fixed-point range"
            )));
        }
        Ok(scaled as i64)
    }

    pub fn to_real(&self, v: i64) -> f64 {
        v as f64 / self.scale()
    }

    /// Euclidean distance in real units for a squared fixed-point distance.
    pub fn distance(&self, sq: SqDist) -> f64 {
        (sq.0 as f64).sqrt() / self.scale()
    }
}

/// Squared Euclidean distance in fixed-point units (`2^-2Δ`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SqDist(pub i128);

impl SqDist {
    pub fn between(a: &[i64], b: &[i64]) -> Self {
        SqDist(
            a.iter()
                .zip(b)
                .map(|(&x, &y)| {
                    let d = x as i128 - y as i128;
                    d * d
                })
                .sum(),
        )
    }

    /// Square of a non-negative fixed-point length.
    pub fn of_length(len: i64) -> Self {
        SqDist(len as i128 * len as i128)
    }
}

/// Role assigned by the seed/outlier classification.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Role {
    #[default]
    Unassigned,
    Seed,
    Outlier,
    Follower,
}

impl Role {
    pub fn as_str(&self) -> &'static str {
        match self {
            Role::Unassigned => "unassigned",
            Role::Seed => "seed",
            Role::Outlier => "outlier",
            Role::Follower => "follower",
        }
    }
}

/// A point with its clustering annotations.
#[derive(Debug, Clone, PartialEq)]
pub struct Point {
    /// Fixed-point coordinates.
    pub coords: Vec<i64>,
    pub energy: f64,
    /// Local density, filled by the density phase.
    pub density: f64,
    pub nearest_higher: Option<usize>,
    /// Squared fixed-point distance to the nearest higher; `None` stands for
    /// the +infinity sentinel.
    pub nh_sq: Option<SqDist>,
    /// Distance to the nearest higher in real units, `f64::INFINITY` when
    /// there is none.
    pub nh_distance: f64,
    pub role: Role,
    pub cluster_id: Option<usize>,
}

impl Point {
    fn new(coords: Vec<i64>, energy: f64) -> Self {
        Self {
            coords,
            energy,
            density: 0.0,
            nearest_higher: None,
            nh_sq: None,
            nh_distance: f64::INFINITY,
            role: Role::Unassigned,
            cluster_id: None,
        }
    }

    pub fn reset(&mut self) {
        self.density = 0.0;
        self.nearest_higher = None;
        self.nh_sq = None;
        self.nh_distance = f64::INFINITY;
        self.role = Role::Unassigned;
        self.cluster_id = None;
    }
}

/// How far the nearest-higher search looks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NhSearch {
    /// Only points within `d_m` qualify; everything else gets the +infinity
    /// sentinel.
    #[default]
    Capped,
    /// Search the whole dataset.
    Global,
}

/// Clustering parameters. Missing fields deserialize to the defaults.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Params {
    /// Critical radius for the local density.
    pub d_c: f64,
    /// Outlier delta factor; `d_m = delta * d_c`.
    pub delta: f64,
    /// Critical density threshold for seeds and outliers.
    pub rho_c: f64,
    /// Tile edge; defaults to `d_c`.
    pub tile_edge: Option<f64>,
    pub precision_bits: u32,
    pub nh_search: NhSearch,
}

impl Default for Params {
    /// `d_c = 20`, `rho_c = 25`, `delta = 2`.
    fn default() -> Self {
        Self {
            d_c: 20.0,
            delta: 2.0,
            rho_c: 25.0,
            tile_edge: None,
            precision_bits: DEFAULT_PRECISION_BITS,
            nh_search: NhSearch::Capped,
        }
    }
}

impl Params {
    pub fn new(d_c: f64, delta: f64, rho_c: f64) -> Result<Self> {
        let p = Self {
            d_c,
            delta,
            rho_c,
            ..Self::default()
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_tile_edge(mut self, tile_edge: f64) -> Self {
        self.tile_edge = Some(tile_edge);
        self
    }

    pub fn with_precision_bits(mut self, bits: u32) -> Self {
        self.precision_bits = bits;
        self
    }

    pub fn with_nh_search(mut self, mode: NhSearch) -> Self {
        self.nh_search = mode;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::InvalidParams(format!(
                    "{name} must be positive, got {v}"
                )))
            }
        };
        positive("d_c", self.d_c)?;
        positive("delta", self.delta)?;
        positive("rho_c", self.rho_c)?;
        positive("tile_edge", self.tile_edge())?;
        let q = self.quantizer()?;
        if q.to_fixed(self.tile_edge())? < 1 {
            return Err(Error::InvalidParams(
                "tile_edge is below the coordinate precision".into(),
            ));
        }
        Ok(())
    }

    /// Nearest-higher search radius, `delta * d_c`.
    pub fn d_m(&self) -> f64 {
        self.delta * self.d_c
    }

    pub fn tile_edge(&self) -> f64 {
        self.tile_edge.unwrap_or(self.d_c)
    }

    pub fn quantizer(&self) -> Result<Quantizer> {
        Quantizer::new(self.precision_bits)
    }

    pub(crate) fn thresholds(&self) -> Result<Thresholds> {
        self.validate()?;
        let q = self.quantizer()?;
        let d_c = q.to_fixed(self.d_c)?;
        let d_m = q.to_fixed(self.d_m())?;
        Ok(Thresholds {
            d_c,
            d_m,
            d_c_sq: SqDist::of_length(d_c),
            d_m_sq: SqDist::of_length(d_m),
        })
    }
}

/// Radii converted to fixed point.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Thresholds {
    pub d_c: i64,
    pub d_m: i64,
    pub d_c_sq: SqDist,
    pub d_m_sq: SqDist,
}

/// A set of points sharing one coordinate precision, with optional ground
/// truth labels (`-1` = noise).
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    dim: usize,
    quantizer: Quantizer,
    points: Vec<Point>,
    truth: Option<Vec<i64>>,
}

impl Dataset {
    pub fn new(dim: usize, precision_bits: u32) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidData("dimension must be at least 1".into()));
        }
        Ok(Self {
            dim,
            quantizer: Quantizer::new(precision_bits)?,
            points: Vec::new(),
            truth: None,
        })
    }

    /// Builds a dataset from real coordinates and energies.
    pub fn from_reals(coords: &[Vec<f64>], energies: &[f64], precision_bits: u32) -> Result<Self> {
        if coords.len() != energies.len() {
            return Err(Error::InvalidData(format!(
                "{} coordinate rows but {} energies",
                coords.len(),
                energies.len()
            )));
        }
        let dim = coords
            .first()
            .map(Vec::len)
            .ok_or_else(|| Error::EmptyInput("no points".into()))?;
        let mut ds = Self::new(dim, precision_bits)?;
        for (x, &e) in coords.iter().zip(energies) {
            ds.push(x, e)?;
        }
        Ok(ds)
    }

    pub fn push(&mut self, coords: &[f64], energy: f64) -> Result<usize> {
        if coords.len() != self.dim {
            return Err(Error::InvalidData(format!(
                "expected {} coordinates, got {}",
                self.dim,
                coords.len()
            )));
        }
        if !energy.is_finite() || energy < 0.0 {
            return Err(Error::InvalidData(format!(
                "energy must be finite and non-negative, got {energy}"
            )));
        }
        let fixed = coords
            .iter()
            .map(|&x| self.quantizer.to_fixed(x))
            .collect::<Result<Vec<_>>>()?;
        self.points.push(Point::new(fixed, energy));
        if let Some(t) = &mut self.truth {
            t.push(-1);
        }
        Ok(self.points.len() - 1)
    }

    pub fn with_truth(mut self, labels: Vec<i64>) -> Result<Self> {
        if labels.len() != self.points.len() {
            return Err(Error::InvalidData(format!(
                "{} labels for {} points",
                labels.len(),
                self.points.len()
            )));
        }
        if let Some(bad) = labels.iter().find(|&&l| l < -1) {
            return Err(Error::InvalidData(format!("invalid true label {bad}")));
        }
        self.truth = Some(labels);
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn quantizer(&self) -> Quantizer {
        self.quantizer
    }

    pub fn precision_bits(&self) -> u32 {
        self.quantizer.frac_bits()
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn points_mut(&mut self) -> &mut [Point] {
        &mut self.points
    }

    pub fn point(&self, i: usize) -> Result<&Point> {
        self.points.get(i).ok_or(Error::IndexOutOfRange {
            index: i,
            len: self.points.len(),
        })
    }

    pub fn truth(&self) -> Option<&[i64]> {
        self.truth.as_deref()
    }

    pub fn energies(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.energy).collect()
    }

    /// Real-valued coordinates of point `i`.
    pub fn coords(&self, i: usize) -> Vec<f64> {
        self.points[i]
            .coords
            .iter()
            .map(|&v| self.quantizer.to_real(v))
            .collect()
    }

    pub fn sq_dist(&self, i: usize, j: usize) -> SqDist {
        SqDist::between(&self.points[i].coords, &self.points[j].coords)
    }

    /// Clears every annotation written by the clustering phases.
    pub fn reset_annotations(&mut self) {
        self.points.iter_mut().for_each(Point::reset);
    }
}
