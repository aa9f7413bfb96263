use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use qlue_bench::report::sha256_file;
use qlue_bench::{run_experiment, run_single, Engine, ExperimentConfig, ExperimentKind, Manifest};
use qlue_core::datagen::DatasetSpec;
use qlue_core::io;
use serde::Deserialize;

#[derive(Parser)]
#[command(
    name = "qlue",
    version,
    about = "Density clustering lab: classical and Grover-model engines"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// TOML config file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Overrides the config seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides the config engine.
    #[arg(long, value_enum)]
    engine: Option<Engine>,
    /// Run directory; created if missing.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a dataset from a config with a `[dataset]` table.
    Generate(Common),
    /// Cluster one CSV dataset.
    Cluster {
        #[command(flatten)]
        common: Common,
        /// Dataset CSV (`x1,...,xd,energy[,true_label]`).
        #[arg(long)]
        input: PathBuf,
    },
    /// F_H against the noise ratio.
    SweepNoise(Common),
    /// F_H against cluster separation.
    SweepOverlap(Common),
    /// Moons and circles under uniform and gradient energies.
    Noncentroidal(Common),
    /// Grover against classical query counts on lattices.
    LatticeScaling(Common),
}

#[derive(Deserialize)]
struct GenerateConfig {
    #[serde(default)]
    seed: u64,
    #[serde(default)]
    precision_bits: Option<u32>,
    dataset: DatasetSpec,
}

fn load_config(common: &Common, kind: ExperimentKind) -> Result<ExperimentConfig> {
    let mut cfg = match &common.config {
        Some(path) => {
            let cfg = ExperimentConfig::load(path)?;
            if cfg.experiment != kind && kind != ExperimentKind::Single {
                anyhow::bail!(
                    "config {} describes a {:?} experiment, not {:?}",
                    path.display(),
                    cfg.experiment,
                    kind
                );
            }
            cfg
        }
        None => ExperimentConfig::new(kind),
    };
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    if let Some(engine) = common.engine {
        cfg.engine = engine;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run_dir(common: &Common, verb: &str, seed: u64) -> PathBuf {
    common
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from("runs").join(format!("{verb}-seed{seed}")))
}

fn engine_name(engine: Engine) -> String {
    format!("{engine:?}").to_lowercase()
}

fn generate(common: &Common) -> Result<()> {
    let path = common
        .config
        .as_ref()
        .context("generate needs --config with a [dataset] table")?;
    let text = std::fs::read_to_string(path)?;
    let gc: GenerateConfig = toml::from_str(&text).context("parsing generate config")?;
    let seed = common.seed.unwrap_or(gc.seed);
    let bits = gc
        .precision_bits
        .unwrap_or(qlue_core::model::DEFAULT_PRECISION_BITS);
    let ds = gc.dataset.generate_with_precision(seed, bits)?;
    let dir = run_dir(common, "generate", seed);
    std::fs::create_dir_all(&dir)?;
    let data = dir.join("dataset.csv");
    io::write_dataset_file(&ds, &data)?;
    Manifest {
        command: "generate".into(),
        seed,
        engine: "none".into(),
        config: None,
        dataset_path: Some(data.clone()),
        dataset_sha256: Some(sha256_file(&data)?),
        outputs: vec![data.clone()],
        tool_version: env!("CARGO_PKG_VERSION").into(),
    }
    .write(&dir)?;
    println!("wrote {} points to {}", ds.len(), data.display());
    Ok(())
}

fn cluster(common: &Common, input: &Path) -> Result<()> {
    let cfg = load_config(common, ExperimentKind::Single)?;
    let dir = run_dir(common, "cluster", cfg.seed);
    let run = run_single(&cfg, input, &dir)?;
    Manifest {
        command: "cluster".into(),
        seed: cfg.seed,
        engine: engine_name(cfg.engine),
        config: Some(cfg.clone()),
        dataset_path: Some(input.to_path_buf()),
        dataset_sha256: Some(sha256_file(input)?),
        outputs: run.outputs.clone(),
        tool_version: env!("CARGO_PKG_VERSION").into(),
    }
    .write(&dir)?;
    let t = run.ledger.totals();
    println!(
        "{} clusters, {} outliers; oracle calls {}, classical equivalent {}; outputs in {}",
        run.result.n_clusters,
        run.result.outliers.len(),
        t.oracle_calls,
        t.classical_equivalent_calls,
        dir.display()
    );
    Ok(())
}

fn sweep(common: &Common, kind: ExperimentKind, verb: &str) -> Result<()> {
    let mut cfg = load_config(common, kind)?;
    let dir = run_dir(common, verb, cfg.seed);
    cfg.output_dir = Some(dir.clone());
    let report = run_experiment(&cfg)?;
    Manifest {
        command: verb.into(),
        seed: cfg.seed,
        engine: engine_name(cfg.engine),
        config: Some(cfg.clone()),
        dataset_path: None,
        dataset_sha256: None,
        outputs: report.artifacts.clone(),
        tool_version: env!("CARGO_PKG_VERSION").into(),
    }
    .write(&dir)?;
    for c in &report.cells {
        let params: Vec<String> = c.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
        let metrics: Vec<String> = c
            .metrics
            .iter()
            .map(|(k, v)| format!("{k}={v:.4}"))
            .collect();
        println!("{}  {}", params.join(" "), metrics.join(" "));
    }
    println!(
        "{} cells in {:.1}s; outputs in {}",
        report.cells.len(),
        report.wall_time_s,
        dir.display()
    );
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Generate(c) => generate(c),
        Command::Cluster { common, input } => cluster(common, input),
        Command::SweepNoise(c) => sweep(c, ExperimentKind::Noise, "sweep-noise"),
        Command::SweepOverlap(c) => sweep(c, ExperimentKind::Overlap, "sweep-overlap"),
        Command::Noncentroidal(c) => sweep(c, ExperimentKind::NonCentroidal, "noncentroidal"),
        Command::LatticeScaling(c) => sweep(c, ExperimentKind::LatticeScaling, "lattice-scaling"),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
