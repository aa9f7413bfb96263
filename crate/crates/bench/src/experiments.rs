use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use qlue_core::datagen::DatasetSpec;
use qlue_core::grover::{linear_scan, GroverModel};
use qlue_core::io::{self, ClusterSummary};
use qlue_core::metrics::{scores, unit_energy_scores};
use qlue_core::{
    run_clue, run_qlue, ClusterResult, Dataset, EnergyProfile, Params, PhaseCounts, QueryLedger,
};
use rayon::prelude::*;

use crate::config::{derive_seed, Engine, ExperimentConfig, ExperimentKind};
use crate::report::{mean_std, Cell, RunReport};

/// Clusters `ds` in place with the chosen engine.
pub fn cluster(
    ds: &mut Dataset,
    params: &Params,
    engine: Engine,
    seed: u64,
) -> Result<(ClusterResult, QueryLedger)> {
    Ok(match engine {
        Engine::Classical => (run_clue(ds, params)?, QueryLedger::new()),
        Engine::Quantum => {
            let run = run_qlue(ds, params, seed)?;
            (run.result, run.ledger)
        }
    })
}

fn other(engine: Engine) -> Engine {
    match engine {
        Engine::Classical => Engine::Quantum,
        Engine::Quantum => Engine::Classical,
    }
}

/// Measurements from one repetition of one cell.
#[derive(Debug, Clone, Default)]
struct Rep {
    fh: f64,
    fc: f64,
    n_clusters: usize,
    ledger: PhaseCounts,
    mismatch: bool,
}

fn cluster_and_score(
    cfg: &ExperimentConfig,
    spec: &DatasetSpec,
    seed: u64,
    unit_energy: bool,
) -> Result<(Rep, Dataset, ClusterResult)> {
    let mut ds = spec.generate_with_precision(seed, cfg.params.precision_bits)?;
    let truth = ds.truth().context("generated data carries truth")?.to_vec();
    let pristine = cfg.verify_engines.then(|| ds.clone());
    let (result, ledger) = cluster(&mut ds, &cfg.params, cfg.engine, seed)?;
    let s = if unit_energy {
        unit_energy_scores(&result.labels, &truth)?
    } else {
        scores(&result.labels, &truth, &ds.energies())?
    };
    let mismatch = match pristine {
        Some(mut twin) => cluster(&mut twin, &cfg.params, other(cfg.engine), seed)?.0 != result,
        None => false,
    };
    let rep = Rep {
        fh: s.homogeneity,
        fc: s.completeness,
        n_clusters: result.n_clusters,
        ledger: ledger.totals(),
        mismatch,
    };
    Ok((rep, ds, result))
}

fn aggregate(cfg: &ExperimentConfig, params: BTreeMap<String, f64>, reps: &[Rep]) -> Cell {
    let col = |f: fn(&Rep) -> f64| reps.iter().map(f).collect::<Vec<_>>();
    let (mean_fh, std_fh) = mean_std(&col(|r| r.fh));
    let (mean_fc, std_fc) = mean_std(&col(|r| r.fc));
    let (mean_clusters, _) = mean_std(&col(|r| r.n_clusters as f64));
    let mut metrics = BTreeMap::from([
        ("mean_fh".to_owned(), mean_fh),
        ("std_fh".to_owned(), std_fh),
        ("mean_fc".to_owned(), mean_fc),
        ("std_fc".to_owned(), std_fc),
        ("mean_clusters".to_owned(), mean_clusters),
        ("repetitions".to_owned(), reps.len() as f64),
    ]);
    if cfg.verify_engines {
        let n = reps.iter().filter(|r| r.mismatch).count();
        metrics.insert("engine_mismatches".to_owned(), n as f64);
    }
    let mut ledger = PhaseCounts::default();
    for r in reps {
        ledger.oracle_calls += r.ledger.oracle_calls;
        ledger.diffusion_calls += r.ledger.diffusion_calls;
        ledger.classical_equivalent_calls += r.ledger.classical_equivalent_calls;
        ledger.invocations += r.ledger.invocations;
    }
    Cell {
        params,
        metrics,
        ledger,
    }
}

/// Runs every `(cell, repetition)` pair in parallel and aggregates per cell
/// in grid order.
fn sweep(
    cfg: &ExperimentConfig,
    grid: Vec<(BTreeMap<String, f64>, DatasetSpec)>,
    unit_energy: bool,
) -> Result<Vec<Cell>> {
    let jobs: Vec<(usize, usize)> = (0..grid.len())
        .flat_map(|c| (0..cfg.repetitions).map(move |r| (c, r)))
        .collect();
    let reps: Vec<Rep> = jobs
        .par_iter()
        .map(|&(c, r)| {
            cluster_and_score(cfg, &grid[c].1, derive_seed(cfg.seed, c, r), unit_energy)
                .map(|(rep, _, _)| rep)
        })
        .collect::<Result<_>>()?;
    Ok(grid
        .into_iter()
        .zip(reps.chunks(cfg.repetitions))
        .map(|((params, _), chunk)| aggregate(cfg, params, chunk))
        .collect())
}

fn key(pairs: &[(&str, f64)]) -> BTreeMap<String, f64> {
    pairs.iter().map(|&(k, v)| (k.to_owned(), v)).collect()
}

/// F_H over `(sigma, N_N / N_C)`.
pub fn run_noise_sweep(cfg: &ExperimentConfig) -> Result<Vec<Cell>> {
    let g = &cfg.noise;
    let mut grid = Vec::new();
    for &sigma in &g.sigmas {
        for &ratio in &g.ratios {
            let spec = DatasetSpec::NoisyGaussian {
                n_cluster: g.n_cluster,
                n_noise: (ratio * g.n_cluster as f64).round() as usize,
                sigma,
                amplitude: g.amplitude,
                noise_side: g.noise_side,
            };
            grid.push((key(&[("sigma", sigma), ("ratio", ratio)]), spec));
        }
    }
    sweep(cfg, grid, false)
}

/// F_H over `(r / sigma, N_1 / N_2)`.
pub fn run_overlap_sweep(cfg: &ExperimentConfig) -> Result<Vec<Cell>> {
    let g = &cfg.overlap;
    let mut grid = Vec::new();
    for &ratio in &g.n1_over_n2 {
        for &rs in &g.r_over_sigma {
            let spec = DatasetSpec::TwoGaussians {
                n1: g.n1,
                n2: ((g.n1 as f64) / ratio).round().max(1.0) as usize,
                sigma: g.sigma,
                r: rs * g.sigma,
                amplitude: g.amplitude,
            };
            grid.push((key(&[("r_over_sigma", rs), ("n1_over_n2", ratio)]), spec));
        }
    }
    sweep(cfg, grid, false)
}

fn shape_specs(cfg: &ExperimentConfig) -> Vec<(BTreeMap<String, f64>, DatasetSpec, String)> {
    let g = &cfg.shapes;
    let mut out = Vec::new();
    for (shape_id, shape) in ["moons", "circles"].into_iter().enumerate() {
        for (grad, profile) in [
            (0.0, EnergyProfile::Uniform),
            (1.0, EnergyProfile::Gradient),
        ] {
            let spec = if shape == "moons" {
                DatasetSpec::Moons {
                    n_per_cluster: g.n_per_cluster,
                    profile,
                    jitter: g.jitter,
                    scale: g.scale,
                    uniform_energy: g.uniform_energy,
                }
            } else {
                DatasetSpec::Circles {
                    n_per_cluster: g.n_per_cluster,
                    profile,
                    jitter: g.jitter,
                    scale: g.scale,
                    factor: g.circle_factor,
                    uniform_energy: g.uniform_energy,
                }
            };
            let name = format!(
                "{shape}_{}",
                if grad == 1.0 { "gradient" } else { "uniform" }
            );
            out.push((
                key(&[("shape", shape_id as f64), ("gradient", grad)]),
                spec,
                name,
            ));
        }
    }
    out
}

/// Moons and circles under both energy profiles, scored with unit energies.
/// Cell key `shape`: 0 = moons, 1 = circles; `gradient`: 0 = uniform profile.
pub fn run_noncentroidal(cfg: &ExperimentConfig, dump_dir: Option<&Path>) -> Result<Vec<Cell>> {
    let specs = shape_specs(cfg);
    let grid: Vec<_> = specs
        .iter()
        .map(|(k, s, _)| (k.clone(), s.clone()))
        .collect();
    let cells = sweep(cfg, grid, true)?;
    if let Some(dir) = dump_dir.filter(|_| cfg.shapes.dump_points) {
        fs::create_dir_all(dir)?;
        for (c, (_, spec, name)) in specs.iter().enumerate() {
            let (_, ds, result) = cluster_and_score(cfg, spec, derive_seed(cfg.seed, c, 0), true)?;
            io::write_dataset_file(&ds, &dir.join(format!("{name}_points.csv")))?;
            io::write_cluster_result_file(&ds, &result, &dir.join(format!("{name}_clusters.csv")))?;
        }
    }
    Ok(cells)
}

/// Cost of locating one marked item among the `m = a^d` lattice points:
/// a Grover `find_all` against a classical scan.
pub fn run_lattice_scaling(cfg: &ExperimentConfig) -> Result<Vec<Cell>> {
    let g = &cfg.lattice;
    let mut cells = Vec::new();
    for &a in &g.a {
        for &d in &g.d {
            let Some(m) = a.checked_pow(d as u32).filter(|&m| m <= g.max_points) else {
                continue;
            };
            let domain: Vec<usize> = (0..m).collect();
            let target = m / 2;
            let mut q = GroverModel::new(derive_seed(cfg.seed, a, d));
            q.set_phase("lattice");
            let found = q.find_all(&domain, |i| i == target)?;
            let mut classical = QueryLedger::new();
            let scanned = linear_scan(&domain, |i| i == target, &mut classical, "lattice");
            if found != scanned {
                bail!("grover and classical scan disagree on lattice a={a}, d={d}");
            }
            let qt = q.ledger().totals();
            let metrics = BTreeMap::from([
                ("quantum_calls".to_owned(), qt.oracle_calls as f64),
                (
                    "classical_calls".to_owned(),
                    classical.totals().classical_equivalent_calls as f64,
                ),
            ]);
            cells.push(Cell {
                params: key(&[("a", a as f64), ("d", d as f64), ("m", m as f64)]),
                metrics,
                ledger: qt,
            });
        }
    }
    Ok(cells)
}

/// Runs a sweep experiment and, when an output directory is configured,
/// writes `report.json` and `cells.csv` into it.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunReport> {
    cfg.validate()?;
    let start = Instant::now();
    let dir = cfg.output_dir.as_deref();
    if let Some(d) = dir {
        fs::create_dir_all(d).with_context(|| format!("creating {}", d.display()))?;
    }
    let cells = match cfg.experiment {
        ExperimentKind::Noise => run_noise_sweep(cfg)?,
        ExperimentKind::Overlap => run_overlap_sweep(cfg)?,
        ExperimentKind::NonCentroidal => {
            run_noncentroidal(cfg, dir.map(|d| d.join("points")).as_deref())?
        }
        ExperimentKind::LatticeScaling => run_lattice_scaling(cfg)?,
        ExperimentKind::Single => bail!("single runs need a dataset; use run_single"),
    };
    let mut report = RunReport {
        config: cfg.clone(),
        cells,
        wall_time_s: start.elapsed().as_secs_f64(),
        artifacts: Vec::new(),
    };
    if let Some(d) = dir {
        let csv_path = d.join("cells.csv");
        report.write_csv(&csv_path)?;
        report.artifacts.push(csv_path);
        let json_path = d.join("report.json");
        report.artifacts.push(json_path.clone());
        report.write_json(&json_path)?;
    }
    Ok(report)
}

/// Outputs of clustering one dataset file.
#[derive(Debug)]
pub struct SingleRun {
    pub result: ClusterResult,
    pub ledger: QueryLedger,
    pub outputs: Vec<PathBuf>,
}

/// Clusters a CSV dataset, writing `clusters.csv`, `summary.json` and
/// `ledger.json` into `out_dir`.
pub fn run_single(cfg: &ExperimentConfig, dataset: &Path, out_dir: &Path) -> Result<SingleRun> {
    cfg.params.validate()?;
    let mut ds = io::read_dataset_file(dataset, cfg.params.precision_bits)
        .with_context(|| format!("reading dataset {}", dataset.display()))?;
    let (result, ledger) = cluster(&mut ds, &cfg.params, cfg.engine, cfg.seed)?;
    fs::create_dir_all(out_dir)?;
    let clusters = out_dir.join("clusters.csv");
    io::write_cluster_result_file(&ds, &result, &clusters)?;
    let mut summary = serde_json::to_value(ClusterSummary::of(&result))?;
    if let Some(truth) = ds.truth() {
        let s = scores(&result.labels, truth, &ds.energies())?;
        summary["scores"] = serde_json::to_value(s)?;
    }
    let summary_path = out_dir.join("summary.json");
    fs::write(&summary_path, serde_json::to_vec_pretty(&summary)?)?;
    let ledger_path = out_dir.join("ledger.json");
    fs::write(&ledger_path, serde_json::to_vec_pretty(&ledger.to_json())?)?;
    Ok(SingleRun {
        result,
        ledger,
        outputs: vec![clusters, summary_path, ledger_path],
    })
}
