use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use qlue_core::Params;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Engine {
    Classical,
    #[default]
    Quantum,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    Noise,
    Overlap,
    NonCentroidal,
    LatticeScaling,
    Single,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NoiseGrid {
    /// Gaussian covariance scale; per-axis std is `sqrt(sigma)`.
    pub sigmas: Vec<f64>,
    /// `N_N / N_C` values.
    pub ratios: Vec<f64>,
    pub n_cluster: usize,
    pub amplitude: f64,
    pub noise_side: f64,
}

impl Default for NoiseGrid {
    fn default() -> Self {
        Self {
            sigmas: vec![10.0, 32.0],
            ratios: vec![0.0, 0.1, 0.2, 0.33, 0.5, 0.75, 1.0],
            n_cluster: 750,
            amplitude: 500.0,
            noise_side: 500.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OverlapGrid {
    pub sigma: f64,
    pub r_over_sigma: Vec<f64>,
    /// `N_1 / N_2` values; `N_2 = round(N_1 / ratio)`.
    pub n1_over_n2: Vec<f64>,
    pub n1: usize,
    pub amplitude: f64,
}

impl Default for OverlapGrid {
    fn default() -> Self {
        Self {
            sigma: 30.0,
            r_over_sigma: vec![0.25, 0.5, 1.0, 1.5, 2.0, 3.0, 4.0, 6.0, 10.0],
            n1_over_n2: vec![1.0, 2.0, 5.0],
            n1: 500,
            amplitude: 500.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ShapeGrid {
    pub n_per_cluster: usize,
    pub jitter: f64,
    pub scale: f64,
    pub circle_factor: f64,
    /// Energy of every point under the uniform profile.
    pub uniform_energy: f64,
    /// Write per-point labels for plotting.
    pub dump_points: bool,
}

impl Default for ShapeGrid {
    fn default() -> Self {
        Self {
            n_per_cluster: 500,
            jitter: qlue_core::datagen::DEFAULT_SHAPE_JITTER,
            scale: qlue_core::datagen::DEFAULT_SHAPE_SCALE,
            circle_factor: 0.5,
            uniform_energy: qlue_core::datagen::DEFAULT_UNIFORM_ENERGY,
            dump_points: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LatticeGrid {
    pub a: Vec<usize>,
    pub d: Vec<usize>,
    /// Lattices with more points are skipped.
    pub max_points: usize,
}

impl Default for LatticeGrid {
    fn default() -> Self {
        Self {
            a: vec![3, 10],
            d: (1..=5).collect(),
            max_points: 100_000,
        }
    }
}

/// Declarative sweep description, read from TOML.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    #[serde(default)]
    pub engine: Engine,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_repetitions")]
    pub repetitions: usize,
    #[serde(default)]
    pub params: Params,
    /// Also run the other engine on every cell and count label mismatches.
    #[serde(default)]
    pub verify_engines: bool,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub noise: NoiseGrid,
    #[serde(default)]
    pub overlap: OverlapGrid,
    #[serde(default)]
    pub shapes: ShapeGrid,
    #[serde(default)]
    pub lattice: LatticeGrid,
}

fn default_repetitions() -> usize {
    30
}

impl ExperimentConfig {
    pub fn new(experiment: ExperimentKind) -> Self {
        Self {
            experiment,
            engine: Engine::default(),
            seed: 0,
            repetitions: default_repetitions(),
            params: Params::default(),
            verify_engines: false,
            output_dir: None,
            noise: NoiseGrid::default(),
            overlap: OverlapGrid::default(),
            shapes: ShapeGrid::default(),
            lattice: LatticeGrid::default(),
        }
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).context("parsing experiment config")?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        Ok(toml::to_string(self)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.repetitions == 0 {
            bail!("repetitions must be at least 1");
        }
        self.params.validate()?;
        let nonempty = |name: &str, len: usize| -> Result<()> {
            if len == 0 {
                bail!("{name} grid must not be empty");
            }
            Ok(())
        };
        let all_positive = |name: &str, v: &[f64]| -> Result<()> {
            if let Some(x) = v.iter().find(|x| !(x.is_finite() && **x > 0.0)) {
                bail!("{name} values must be positive, got {x}");
            }
            Ok(())
        };
        match self.experiment {
            ExperimentKind::Noise => {
                nonempty("noise.sigmas", self.noise.sigmas.len())?;
                nonempty("noise.ratios", self.noise.ratios.len())?;
                all_positive("noise.sigmas", &self.noise.sigmas)?;
                if let Some(r) = self
                    .noise
                    .ratios
                    .iter()
                    .find(|r| !(r.is_finite() && **r >= 0.0))
                {
                    bail!("noise ratios must be non-negative, got {r}");
                }
                if self.noise.n_cluster == 0 {
                    bail!("noise.n_cluster must be at least 1");
                }
            }
            ExperimentKind::Overlap => {
                nonempty("overlap.r_over_sigma", self.overlap.r_over_sigma.len())?;
                nonempty("overlap.n1_over_n2", self.overlap.n1_over_n2.len())?;
                all_positive("overlap.sigma", &[self.overlap.sigma])?;
                all_positive("overlap.n1_over_n2", &self.overlap.n1_over_n2)?;
                if let Some(r) = self
                    .overlap
                    .r_over_sigma
                    .iter()
                    .find(|r| !(r.is_finite() && **r >= 0.0))
                {
                    bail!("r/sigma values must be non-negative, got {r}");
                }
                if self.overlap.n1 == 0 {
                    bail!("overlap.n1 must be at least 1");
                }
            }
            ExperimentKind::NonCentroidal => {
                if self.shapes.n_per_cluster == 0 {
                    bail!("shapes.n_per_cluster must be at least 1");
                }
            }
            ExperimentKind::LatticeScaling => {
                nonempty("lattice.a", self.lattice.a.len())?;
                nonempty("lattice.d", self.lattice.d.len())?;
                if self.lattice.a.contains(&0) || self.lattice.d.contains(&0) {
                    bail!("lattice a and d must be at least 1");
                }
            }
            ExperimentKind::Single => {}
        }
        Ok(())
    }
}

/// Deterministic per-cell seed: splitmix64 over the base seed, the cell
/// index and the repetition.
pub fn derive_seed(base: u64, cell: usize, rep: usize) -> u64 {
    let mut z = base
        .wrapping_add((cell as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))
        .wrapping_add((rep as u64).wrapping_mul(0xD1B5_4A32_D192_ED03));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
