use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use qlue_core::PhaseCounts;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::ExperimentConfig;

/// One sweep cell: its grid coordinates and aggregated measurements.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub params: BTreeMap<String, f64>,
    pub metrics: BTreeMap<String, f64>,
    /// Ledger totals summed over repetitions.
    pub ledger: PhaseCounts,
}

impl Cell {
    pub fn param(&self, key: &str) -> f64 {
        self.params[key]
    }

    pub fn metric(&self, key: &str) -> f64 {
        self.metrics[key]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub config: ExperimentConfig,
    pub cells: Vec<Cell>,
    /// Excluded from reproducibility comparisons.
    pub wall_time_s: f64,
    pub artifacts: Vec<PathBuf>,
}

impl RunReport {
    /// The report without run-dependent fields, for byte comparisons.
    pub fn payload(&self) -> serde_json::Value {
        serde_json::json!({ "config": self.config, "cells": self.cells })
    }

    /// Cell whose params match every `(key, value)` pair.
    pub fn find(&self, keys: &[(&str, f64)]) -> Option<&Cell> {
        self.cells
            .iter()
            .find(|c| keys.iter().all(|(k, v)| c.params.get(*k) == Some(v)))
    }

    /// Cells as CSV: param columns, then metric columns, then ledger totals.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        let Some(first) = self.cells.first() else {
            w.flush()?;
            return Ok(());
        };
        let mut header: Vec<String> = first.params.keys().cloned().collect();
        header.extend(first.metrics.keys().cloned());
        header.extend(["oracle_calls", "classical_equivalent_calls"].map(String::from));
        w.write_record(&header)?;
        for c in &self.cells {
            let mut rec: Vec<String> = c.params.values().map(f64::to_string).collect();
            rec.extend(c.metrics.values().map(f64::to_string));
            rec.push(c.ledger.oracle_calls.to_string());
            rec.push(c.ledger.classical_equivalent_calls.to_string());
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_json(&self, path: &Path) -> Result<()> {
        fs::write(path, serde_json::to_vec_pretty(self)?)
            .with_context(|| format!("writing {}", path.display()))
    }
}

/// Mean and sample standard deviation.
pub fn mean_std(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() == 1 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

pub fn sha256_file(path: &Path) -> Result<String> {
    let bytes = fs::read(path).with_context(|| format!("hashing {}", path.display()))?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

/// Provenance record written next to every run's outputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub command: String,
    pub seed: u64,
    pub engine: String,
    pub config: Option<ExperimentConfig>,
    pub dataset_path: Option<PathBuf>,
    pub dataset_sha256: Option<String>,
    pub outputs: Vec<PathBuf>,
    pub tool_version: String,
}

impl Manifest {
    pub fn write(&self, dir: &Path) -> Result<PathBuf> {
        let path = dir.join("manifest.json");
        fs::write(&path, serde_json::to_vec_pretty(self)?)?;
        Ok(path)
    }
}
