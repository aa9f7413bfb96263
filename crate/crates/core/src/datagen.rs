//! Seeded synthetic dataset families with ground truth and energy profiles.
//!
//! Gaussian families use covariance `sigma * I`, so the per-axis standard
//! deviation is `sqrt(sigma)`, and energies `A * pdf(X)`.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Dataset, DEFAULT_PRECISION_BITS};

/// Energy multiplier for Gaussian cluster points.
pub const DEFAULT_AMPLITUDE: f64 = 500.0;
/// Side of the square that uniform noise is drawn from, centered at the origin.
pub const DEFAULT_NOISE_SIDE: f64 = 500.0;
/// Moons/circles are generated in a unit frame and scaled by this.
pub const DEFAULT_SHAPE_SCALE: f64 = 100.0;
/// Per-axis jitter of moons/circles in the unit frame.
pub const DEFAULT_SHAPE_JITTER: f64 = 0.05;
/// Per-point energy of moons/circles under [`EnergyProfile::Uniform`].
pub const DEFAULT_UNIFORM_ENERGY: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnergyProfile {
    /// Every point has the same energy.
    #[default]
    Uniform,
    /// Energy rises linearly in the second coordinate towards a single
    /// extreme point per cluster.
    Gradient,
}

fn default_amplitude() -> f64 {
    DEFAULT_AMPLITUDE
}
fn default_noise_side() -> f64 {
    DEFAULT_NOISE_SIDE
}
fn default_scale() -> f64 {
    DEFAULT_SHAPE_SCALE
}
fn default_jitter() -> f64 {
    DEFAULT_SHAPE_JITTER
}
fn default_factor() -> f64 {
    0.5
}
fn default_uniform_energy() -> f64 {
    DEFAULT_UNIFORM_ENERGY
}

/// Declarative description of one dataset family instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum DatasetSpec {
    /// Gaussian cluster at the origin (label 0) plus uniform noise (label -1)
    /// with energies uniform in `[0, 1)`.
    NoisyGaussian {
        n_cluster: usize,
        n_noise: usize,
        sigma: f64,
        #[serde(default = "default_amplitude")]
        amplitude: f64,
        #[serde(default = "default_noise_side")]
        noise_side: f64,
    },
    /// Clusters of `n1` and `n2` points centered at `(r/2, 0)` and `(-r/2, 0)`.
    TwoGaussians {
        n1: usize,
        n2: usize,
        sigma: f64,
        r: f64,
        #[serde(default = "default_amplitude")]
        amplitude: f64,
    },
    /// Two interleaved half circles.
    Moons {
        n_per_cluster: usize,
        #[serde(default)]
        profile: EnergyProfile,
        #[serde(default = "default_jitter")]
        jitter: f64,
        #[serde(default = "default_scale")]
        scale: f64,
        #[serde(default = "default_uniform_energy")]
        uniform_energy: f64,
    },
    /// Two concentric circles, the inner one shrunk by `factor`.
    Circles {
        n_per_cluster: usize,
        #[serde(default)]
        profile: EnergyProfile,
        #[serde(default = "default_jitter")]
        jitter: f64,
        #[serde(default = "default_scale")]
        scale: f64,
        #[serde(default = "default_factor")]
        factor: f64,
        #[serde(default = "default_uniform_energy")]
        uniform_energy: f64,
    },
    /// `a^d` points on the unit integer lattice, unit energy.
    Lattice { a: usize, d: usize },
}

impl DatasetSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParams(msg));
        let positive = |name: &str, v: f64| -> Result<()> {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                bad(format!("{name} must be positive, got {v}"))
            }
        };
        match *self {
            DatasetSpec::NoisyGaussian {
                n_cluster,
                n_noise,
                sigma,
                amplitude,
                noise_side,
            } => {
                positive("sigma", sigma)?;
                positive("amplitude", amplitude)?;
                positive("noise_side", noise_side)?;
                if n_cluster + n_noise == 0 {
                    return bad("dataset would be empty".into());
                }
            }
            DatasetSpec::TwoGaussians {
                n1,
                n2,
                sigma,
                r,
                amplitude,
            } => {
                positive("sigma", sigma)?;
                positive("amplitude", amplitude)?;
                if !(r.is_finite() && r >= 0.0) {
                    return bad(format!("r must be non-negative, got {r}"));
                }
                if n1 + n2 == 0 {
                    return bad("dataset would be empty".into());
                }
            }
            DatasetSpec::Moons {
                n_per_cluster,
                jitter,
                scale,
                uniform_energy,
                ..
            } => {
                positive("scale", scale)?;
                positive("uniform_energy", uniform_energy)?;
                if !(jitter.is_finite() && jitter >= 0.0) || n_per_cluster == 0 {
                    return bad("moons need points and a non-negative jitter".into());
                }
            }
            DatasetSpec::Circles {
                n_per_cluster,
                jitter,
                scale,
                factor,
                uniform_energy,
                ..
            } => {
                positive("scale", scale)?;
                positive("uniform_energy", uniform_energy)?;
                if !(jitter.is_finite() && jitter >= 0.0) || n_per_cluster == 0 {
                    return bad("circles need points and a non-negative jitter".into());
                }
                if !(factor > 0.0 && factor < 1.0) {
                    return bad(format!("circle factor must be in (0, 1), got {factor}"));
                }
            }
            DatasetSpec::Lattice { a, d } => {
                if a == 0 || d == 0 || d > 8 {
                    return bad(format!(
                        "lattice needs a >= 1 and 1 <= d <= 8, got a={a}, d={d}"
                    ));
                }
            }
        }
        Ok(())
    }

    /// Number of points `generate` produces.
    pub fn len(&self) -> usize {
        match *self {
            DatasetSpec::NoisyGaussian {
                n_cluster, n_noise, ..
            } => n_cluster + n_noise,
            DatasetSpec::TwoGaussians { n1, n2, .. } => n1 + n2,
            DatasetSpec::Moons { n_per_cluster, .. }
            | DatasetSpec::Circles { n_per_cluster, .. } => 2 * n_per_cluster,
            DatasetSpec::Lattice { a, d } => a.pow(d as u32),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn generate(&self, seed: u64) -> Result<Dataset> {
        self.generate_with_precision(seed, DEFAULT_PRECISION_BITS)
    }

    pub fn generate_with_precision(&self, seed: u64, precision_bits: u32) -> Result<Dataset> {
        self.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let raw = match *self {
            DatasetSpec::NoisyGaussian {
                n_cluster,
                n_noise,
                sigma,
                amplitude,
                noise_side,
            } => noisy_gaussian(&mut rng, n_cluster, n_noise, sigma, amplitude, noise_side),
            DatasetSpec::TwoGaussians {
                n1,
                n2,
                sigma,
                r,
                amplitude,
            } => two_gaussians(&mut rng, n1, n2, sigma, r, amplitude),
            DatasetSpec::Moons {
                n_per_cluster,
                profile,
                jitter,
                scale,
                uniform_energy,
            } => {
                let shape = Shape {
                    n: n_per_cluster,
                    profile,
                    jitter,
                    scale,
                    uniform_energy,
                };
                moons(&mut rng, &shape)
            }
            DatasetSpec::Circles {
                n_per_cluster,
                profile,
                jitter,
                scale,
                factor,
                uniform_energy,
            } => {
                let shape = Shape {
                    n: n_per_cluster,
                    profile,
                    jitter,
                    scale,
                    uniform_energy,
                };
                circles(&mut rng, &shape, factor)
            }
            DatasetSpec::Lattice { a, d } => lattice(a, d),
        };
        raw.into_dataset(precision_bits)
    }
}

#[derive(Default)]
struct Raw {
    coords: Vec<Vec<f64>>,
    energies: Vec<f64>,
    labels: Vec<i64>,
}

impl Raw {
    fn push(&mut self, x: Vec<f64>, e: f64, label: i64) {
        self.coords.push(x);
        self.energies.push(e);
        self.labels.push(label);
    }

    fn into_dataset(self, bits: u32) -> Result<Dataset> {
        Dataset::from_reals(&self.coords, &self.energies, bits)?.with_truth(self.labels)
    }
}

/// Density of `N(mu, sigma * I)` in two dimensions.
pub fn gaussian_pdf(x: &[f64], mu: &[f64], sigma: f64) -> f64 {
    let sq: f64 = x.iter().zip(mu).map(|(a, b)| (a - b) * (a - b)).sum();
    (-0.5 * sq / sigma).exp() / (2.0 * PI * sigma)
}

fn gaussian_blob(
    rng: &mut ChaCha8Rng,
    raw: &mut Raw,
    n: usize,
    mu: [f64; 2],
    sigma: f64,
    amplitude: f64,
    label: i64,
) {
    let normal = Normal::new(0.0, sigma.sqrt()).expect("validated sigma");
    for _ in 0..n {
        let x = vec![mu[0] + normal.sample(rng), mu[1] + normal.sample(rng)];
        let e = amplitude * gaussian_pdf(&x, &mu, sigma);
        raw.push(x, e, label);
    }
}

fn noisy_gaussian(
    rng: &mut ChaCha8Rng,
    n_cluster: usize,
    n_noise: usize,
    sigma: f64,
    amplitude: f64,
    side: f64,
) -> Raw {
    let mut raw = Raw::default();
    gaussian_blob(rng, &mut raw, n_cluster, [0.0, 0.0], sigma, amplitude, 0);
    let half = side / 2.0;
    for _ in 0..n_noise {
        let x = vec![rng.random_range(-half..half), rng.random_range(-half..half)];
        let e = rng.random::<f64>();
        raw.push(x, e, -1);
    }
    raw
}

fn two_gaussians(
    rng: &mut ChaCha8Rng,
    n1: usize,
    n2: usize,
    sigma: f64,
    r: f64,
    amplitude: f64,
) -> Raw {
    let mut raw = Raw::default();
    gaussian_blob(rng, &mut raw, n1, [r / 2.0, 0.0], sigma, amplitude, 0);
    gaussian_blob(rng, &mut raw, n2, [-r / 2.0, 0.0], sigma, amplitude, 1);
    raw
}

/// `n` evenly spaced angles in `[0, end]` (`inclusive`) or `[0, end)`.
fn angles(n: usize, end: f64, inclusive: bool) -> impl Iterator<Item = f64> {
    let steps = if inclusive {
        n.saturating_sub(1).max(1)
    } else {
        n
    };
    (0..n).map(move |k| end * k as f64 / steps as f64)
}

fn jittered(rng: &mut ChaCha8Rng, x: f64, y: f64, jitter: f64, scale: f64) -> Vec<f64> {
    if jitter == 0.0 {
        return vec![x * scale, y * scale];
    }
    let n = Normal::new(0.0, jitter).expect("validated jitter");
    vec![(x + n.sample(rng)) * scale, (y + n.sample(rng)) * scale]
}

struct Shape {
    n: usize,
    profile: EnergyProfile,
    jitter: f64,
    scale: f64,
    uniform_energy: f64,
}

impl Shape {
    fn energy(&self, gradient: f64) -> f64 {
        match self.profile {
            EnergyProfile::Uniform => self.uniform_energy,
            EnergyProfile::Gradient => gradient.max(0.0),
        }
    }
}

fn moons(rng: &mut ChaCha8Rng, sh: &Shape) -> Raw {
    let mut raw = Raw::default();
    let arc: Vec<f64> = angles(sh.n, PI, true).collect();
    for &t in &arc {
        let x = jittered(rng, t.cos(), t.sin(), sh.jitter, sh.scale);
        let e = sh.energy(x[1]);
        raw.push(x, e, 0);
    }
    for &t in &arc {
        let x = jittered(rng, 1.0 - t.cos(), 0.5 - t.sin(), sh.jitter, sh.scale);
        let e = sh.energy(60.0 - x[1]);
        raw.push(x, e, 1);
    }
    raw
}

fn circles(rng: &mut ChaCha8Rng, sh: &Shape, factor: f64) -> Raw {
    let mut raw = Raw::default();
    let ring: Vec<f64> = angles(sh.n, 2.0 * PI, false).collect();
    for &t in &ring {
        let x = jittered(rng, t.cos(), t.sin(), sh.jitter, sh.scale);
        let e = sh.energy((x[1] + 100.0).abs() / 5.0);
        raw.push(x, e, 0);
    }
    for &t in &ring {
        let x = jittered(rng, factor * t.cos(), factor * t.sin(), sh.jitter, sh.scale);
        let e = sh.energy((x[1] - 200.0).abs() / 10.0);
        raw.push(x, e, 1);
    }
    raw
}

fn lattice(a: usize, d: usize) -> Raw {
    let mut raw = Raw::default();
    let m = a.pow(d as u32);
    for k in 0..m {
        let mut rest = k;
        let x: Vec<f64> = (0..d)
            .map(|_| {
                let c = rest % a;
                rest /= a;
                c as f64
            })
            .collect();
        raw.push(x, 1.0, 0);
    }
    raw
}

/// Convenience wrappers matching the family names.
pub fn gen_noisy_gaussian(
    n_cluster: usize,
    n_noise: usize,
    sigma: f64,
    seed: u64,
) -> Result<Dataset> {
    DatasetSpec::NoisyGaussian {
        n_cluster,
        n_noise,
        sigma,
        amplitude: DEFAULT_AMPLITUDE,
        noise_side: DEFAULT_NOISE_SIDE,
    }
    .generate(seed)
}

pub fn gen_two_gaussians(n1: usize, n2: usize, sigma: f64, r: f64, seed: u64) -> Result<Dataset> {
    DatasetSpec::TwoGaussians {
        n1,
        n2,
        sigma,
        r,
        amplitude: DEFAULT_AMPLITUDE,
    }
    .generate(seed)
}

pub fn gen_moons(n_per_cluster: usize, profile: EnergyProfile, seed: u64) -> Result<Dataset> {
    DatasetSpec::Moons {
        n_per_cluster,
        profile,
        jitter: DEFAULT_SHAPE_JITTER,
        scale: DEFAULT_SHAPE_SCALE,
        uniform_energy: DEFAULT_UNIFORM_ENERGY,
    }
    .generate(seed)
}

pub fn gen_circles(n_per_cluster: usize, profile: EnergyProfile, seed: u64) -> Result<Dataset> {
    DatasetSpec::Circles {
        n_per_cluster,
        profile,
        jitter: DEFAULT_SHAPE_JITTER,
        scale: DEFAULT_SHAPE_SCALE,
        factor: default_factor(),
        uniform_energy: DEFAULT_UNIFORM_ENERGY,
    }
    .generate(seed)
}

pub fn gen_lattice(a: usize, d: usize) -> Result<Dataset> {
    DatasetSpec::Lattice { a, d }.generate(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lattice_counts() {
        assert_eq!(gen_lattice(3, 2).unwrap().len(), 9);
        assert_eq!(gen_lattice(1, 4).unwrap().len(), 1);
        assert!(gen_lattice(0, 2).is_err());
        assert_eq!(gen_lattice(2, 3).unwrap().coords(7), vec![1.0, 1.0, 1.0]);
    }

    #[test]
    fn pure_cluster_has_no_noise_labels() {
        let ds = gen_noisy_gaussian(100, 0, 10.0, 1).unwrap();
        assert!(ds.truth().unwrap().iter().all(|&l| l == 0));
    }

    #[test]
    fn noise_energy_in_unit_interval() {
        let ds = gen_noisy_gaussian(10, 200, 10.0, 1).unwrap();
        let truth = ds.truth().unwrap();
        for (p, &l) in ds.points().iter().zip(truth) {
            if l == -1 {
                assert!((0.0..1.0).contains(&p.energy));
            }
        }
    }

    #[test]
    fn zero_jitter_points_lie_on_arcs() {
        let spec = DatasetSpec::Moons {
            n_per_cluster: 50,
            profile: EnergyProfile::Uniform,
            jitter: 0.0,
            scale: 100.0,
            uniform_energy: 1.0,
        };
        let ds = spec.generate(0).unwrap();
        for i in 0..50 {
            let c = ds.coords(i);
            assert!(((c[0] * c[0] + c[1] * c[1]).sqrt() - 100.0).abs() < 1e-3);
            let c = ds.coords(50 + i);
            let (dx, dy) = (c[0] - 100.0, c[1] - 50.0);
            assert!(((dx * dx + dy * dy).sqrt() - 100.0).abs() < 1e-3);
        }
    }

    #[test]
    fn same_seed_same_data() {
        let a = gen_circles(40, EnergyProfile::Gradient, 9).unwrap();
        let b = gen_circles(40, EnergyProfile::Gradient, 9).unwrap();
        let c = gen_circles(40, EnergyProfile::Gradient, 10).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn spec_roundtrips_through_json() {
        let spec: DatasetSpec =
            serde_json::from_str(r#"{"family":"moons","n_per_cluster":5}"#).unwrap();
        assert_eq!(
            spec,
            DatasetSpec::Moons {
                n_per_cluster: 5,
                profile: EnergyProfile::Uniform,
                jitter: DEFAULT_SHAPE_JITTER,
                scale: DEFAULT_SHAPE_SCALE,
                uniform_energy: DEFAULT_UNIFORM_ENERGY,
            }
        );
    }
}
