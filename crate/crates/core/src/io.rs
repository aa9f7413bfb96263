//! CSV and JSON formats.
//!
//! Datasets: header `x1,...,xd,energy[,true_label]`. Cluster results:
//! `index,label,role,density,nh_index,nh_distance`.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::clue::ClusterResult;
use crate::error::{Error, Result};
use crate::model::Dataset;

fn parse_f64(field: &str, row: usize, col: &str) -> Result<f64> {
    field
        .trim()
        .parse::<f64>()
        .map_err(|_| Error::InvalidData(format!("row {row}: bad {col} value {field:?}")))
}

/// Reads a dataset; coordinates are quantized to `precision_bits`.
pub fn read_dataset<R: Read>(input: R, precision_bits: u32) -> Result<Dataset> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(input);
    let headers = rdr.headers()?.clone();
    if headers.is_empty() || headers.iter().all(|h| h.trim().is_empty()) {
        return Err(Error::EmptyInput("dataset file has no header".into()));
    }
    let names: Vec<&str> = headers.iter().map(str::trim).collect();
    let mut dim = 0;
    while names.get(dim) == Some(&format!("x{}", dim + 1).as_str()) {
        dim += 1;
    }
    if dim == 0 || names.get(dim) != Some(&"energy") {
        return Err(Error::InvalidData(format!(
            "expected header x1,...,xd,energy[,true_label], got {}",
            names.join(",")
        )));
    }
    let has_truth = match names.get(dim + 1) {
        None => false,
        Some(&"true_label") if names.len() == dim + 2 => true,
        Some(_) => {
            return Err(Error::InvalidData(format!(
                "unexpected columns after energy: {names:?}"
            )))
        }
    };

    let mut ds = Dataset::new(dim, precision_bits)?;
    let mut truth = Vec::new();
    let mut coords = vec![0.0; dim];
    for (row, rec) in rdr.records().enumerate() {
        let rec = rec?;
        if rec.len() != names.len() {
            return Err(Error::InvalidData(format!(
                "row {}: {} fields, expected {}",
                row + 1,
                rec.len(),
                names.len()
            )));
        }
        for (k, c) in coords.iter_mut().enumerate() {
            *c = parse_f64(&rec[k], row + 1, names[k])?;
        }
        let e = parse_f64(&rec[dim], row + 1, "energy")?;
        ds.push(&coords, e)?;
        if has_truth {
            let l = rec[dim + 1].trim().parse::<i64>().map_err(|_| {
                Error::InvalidData(format!(
                    "row {}: bad true_label {:?}",
                    row + 1,
                    &rec[dim + 1]
                ))
            })?;
            truth.push(l);
        }
    }
    if ds.is_empty() {
        return Err(Error::EmptyInput("dataset file has no points".into()));
    }
    if has_truth {
        ds = ds.with_truth(truth)?;
    }
    Ok(ds)
}

pub fn read_dataset_file(path: &Path, precision_bits: u32) -> Result<Dataset> {
    read_dataset(BufReader::new(File::open(path)?), precision_bits)
}

/// Writes quantized coordinates, which re-read to the same fixed-point values.
pub fn write_dataset<W: Write>(ds: &Dataset, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<String> = (1..=ds.dim()).map(|k| format!("x{k}")).collect();
    header.push("energy".into());
    if ds.truth().is_some() {
        header.push("true_label".into());
    }
    w.write_record(&header)?;
    let q = ds.quantizer();
    for (i, p) in ds.points().iter().enumerate() {
        let mut rec: Vec<String> = p.coords.iter().map(|&c| q.to_real(c).to_string()).collect();
        rec.push(p.energy.to_string());
        if let Some(t) = ds.truth() {
            rec.push(t[i].to_string());
        }
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_dataset_file(ds: &Dataset, path: &Path) -> Result<()> {
    write_dataset(ds, BufWriter::new(File::create(path)?))
}

/// Per-point clustering output; `ds` must carry the annotations of the run
/// that produced `result`.
pub fn write_cluster_result<W: Write>(ds: &Dataset, result: &ClusterResult, out: W) -> Result<()> {
    if ds.len() != result.labels.len() {
        return Err(Error::InvalidInput(format!(
            "{} labels for {} points",
            result.labels.len(),
            ds.len()
        )));
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "index",
        "label",
        "role",
        "density",
        "nh_index",
        "nh_distance",
    ])?;
    for (i, p) in ds.points().iter().enumerate() {
        w.write_record([
            i.to_string(),
            result.labels[i].to_string(),
            p.role.as_str().to_string(),
            p.density.to_string(),
            p.nearest_higher.map_or_else(String::new, |h| h.to_string()),
            p.nh_distance.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_cluster_result_file(ds: &Dataset, result: &ClusterResult, path: &Path) -> Result<()> {
    write_cluster_result(ds, result, BufWriter::new(File::create(path)?))
}

/// Reads the `label` column of a cluster-result CSV.
pub fn read_labels<R: Read>(input: R) -> Result<Vec<i64>> {
    let mut rdr = csv::Reader::from_reader(input);
    let col = rdr
        .headers()?
        .iter()
        .position(|h| h == "label")
        .ok_or_else(|| Error::InvalidData("no label column".into()))?;
    rdr.records()
        .map(|r| {
            let r = r?;
            r[col]
                .parse::<i64>()
                .map_err(|_| Error::InvalidData(format!("bad label {:?}", &r[col])))
        })
        .collect()
}

/// Compact JSON view of a clustering run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClusterSummary {
    pub n_points: usize,
    pub n_clusters: usize,
    pub seeds: Vec<usize>,
    pub outlier_count: usize,
    pub cluster_sizes: Vec<usize>,
}

impl ClusterSummary {
    pub fn of(result: &ClusterResult) -> Self {
        Self {
            n_points: result.labels.len(),
            n_clusters: result.n_clusters,
            seeds: result.seeds.clone(),
            outlier_count: result.outliers.len(),
            cluster_sizes: result.cluster_sizes(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dataset_roundtrip() {
        let coords = vec![vec![0.1, -2.5], vec![3.0, 4.25]];
        let ds = Dataset::from_reals(&coords, &[1.5, 0.0], 16)
            .unwrap()
            .with_truth(vec![0, -1])
            .unwrap();
        let mut buf = Vec::new();
        write_dataset(&ds, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("x1,x2,energy,true_label\n"));
        let back = read_dataset(buf.as_slice(), 16).unwrap();
        assert_eq!(back, ds);
    }

    #[test]
    fn header_without_truth() {
        let ds = read_dataset("x1,energy\n1,2\n3,4\n".as_bytes(), 16).unwrap();
        assert_eq!(ds.dim(), 1);
        assert!(ds.truth().is_none());
        assert_eq!(ds.energies(), vec![2.0, 4.0]);
    }

    #[test]
    fn empty_and_malformed_inputs() {
        assert!(matches!(
            read_dataset("".as_bytes(), 16),
            Err(Error::EmptyInput(_))
        ));
        assert!(matches!(
            read_dataset("x1,energy\n".as_bytes(), 16),
            Err(Error::EmptyInput(_))
        ));
        assert!(read_dataset("a,b\n1,2\n".as_bytes(), 16).is_err());
        assert!(read_dataset("x1,energy\nfoo,1\n".as_bytes(), 16).is_err());
        assert!(read_dataset("x1,energy\n1,-1\n".as_bytes(), 16).is_err());
        assert!(read_dataset("x1,energy,true_label\n1,1,-3\n".as_bytes(), 16).is_err());
    }
}
