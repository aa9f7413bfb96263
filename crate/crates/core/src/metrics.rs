//! Energy-weighted homogeneity and completeness.
//!
//! Each point contributes its energy instead of a unit count to the
//! contingency table; with unit energies the scores are the usual
//! count-based homogeneity and completeness.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How label `-1` enters the contingency table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseHandling {
    /// `-1` is an ordinary class on each side: all noise points share it.
    #[default]
    SharedClass,
    /// Every `-1` point becomes a class of its own.
    Singletons,
}

/// Labels after applying `mode`. Singleton ids are negative and distinct
/// from each other and from every input label.
pub fn noise_handling(labels: &[i64], mode: NoiseHandling) -> Vec<i64> {
    match mode {
        NoiseHandling::SharedClass => labels.to_vec(),
        NoiseHandling::Singletons => labels
            .iter()
            .enumerate()
            .map(|(i, &l)| if l == -1 { -2 - i as i64 } else { l })
            .collect(),
    }
}

/// Energy aggregated per (predicted, true) class pair.
#[derive(Debug, Clone, PartialEq)]
pub struct ContingencyTable {
    pub pred_classes: Vec<i64>,
    pub true_classes: Vec<i64>,
    /// `cells[a][b]`: energy of points predicted `a` with truth `b`.
    pub cells: Vec<Vec<f64>>,
    pub pred_marginal: Vec<f64>,
    pub true_marginal: Vec<f64>,
    pub total: f64,
}

impl ContingencyTable {
    pub fn build(pred: &[i64], truth: &[i64], energies: &[f64]) -> Result<Self> {
        if pred.len() != truth.len() || pred.len() != energies.len() {
            return Err(Error::InvalidInput(format!(
                "length mismatch: {} predicted, {} true, {} energies",
                pred.len(),
                truth.len(),
                energies.len()
            )));
        }
        if let Some(e) = energies.iter().find(|e| !(e.is_finite() && **e >= 0.0)) {
            return Err(Error::InvalidInput(format!("invalid energy {e}")));
        }
        let index = |labels: &[i64]| -> BTreeMap<i64, usize> {
            let mut m: BTreeMap<i64, usize> = labels.iter().map(|&l| (l, 0)).collect();
            for (k, v) in m.values_mut().enumerate() {
                *v = k;
            }
            m
        };
        let pa = index(pred);
        let tb = index(truth);
        let mut cells = vec![vec![0.0; tb.len()]; pa.len()];
        for ((p, t), &e) in pred.iter().zip(truth).zip(energies) {
            cells[pa[p]][tb[t]] += e;
        }
        let pred_marginal: Vec<f64> = cells.iter().map(|row| row.iter().sum()).collect();
        let true_marginal: Vec<f64> = (0..tb.len())
            .map(|b| cells.iter().map(|row| row[b]).sum())
            .collect();
        let total: f64 = pred_marginal.iter().sum();
        if total <= 0.0 {
            return Err(Error::InvalidInput("total energy is zero".into()));
        }
        Ok(Self {
            pred_classes: pa.into_keys().collect(),
            true_classes: tb.into_keys().collect(),
            cells,
            pred_marginal,
            true_marginal,
            total,
        })
    }

    /// Entropy in bits of a distribution given by unnormalized weights.
    fn entropy<'a>(&self, weights: impl Iterator<Item = &'a f64>) -> f64 {
        -weights
            .filter(|&&w| w > 0.0)
            .map(|&w| {
                let p = w / self.total;
                p * p.log2()
            })
            .sum::<f64>()
    }

    pub fn pred_entropy(&self) -> f64 {
        self.entropy(self.pred_marginal.iter())
    }

    pub fn true_entropy(&self) -> f64 {
        self.entropy(self.true_marginal.iter())
    }

    pub fn joint_entropy(&self) -> f64 {
        self.entropy(self.cells.iter().flatten())
    }

    pub fn mutual_information(&self) -> f64 {
        (self.pred_entropy() + self.true_entropy() - self.joint_entropy()).max(0.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scores {
    /// `F_H = I / H(true)`.
    pub homogeneity: f64,
    /// `F_C = I / H(pred)`.
    pub completeness: f64,
}

fn ratio(num: f64, den: f64) -> f64 {
    if den <= 0.0 {
        1.0
    } else {
        (num / den).clamp(0.0, 1.0)
    }
}

/// Scores with the default noise convention.
pub fn scores(pred: &[i64], truth: &[i64], energies: &[f64]) -> Result<Scores> {
    scores_with(pred, truth, energies, NoiseHandling::default())
}

pub fn scores_with(
    pred: &[i64],
    truth: &[i64],
    energies: &[f64],
    mode: NoiseHandling,
) -> Result<Scores> {
    let t = ContingencyTable::build(
        &noise_handling(pred, mode),
        &noise_handling(truth, mode),
        energies,
    )?;
    let i = t.mutual_information();
    Ok(Scores {
        homogeneity: ratio(i, t.true_entropy()),
        completeness: ratio(i, t.pred_entropy()),
    })
}

/// Scores with every point weighted 1.
pub fn unit_energy_scores(pred: &[i64], truth: &[i64]) -> Result<Scores> {
    scores(pred, truth, &vec![1.0; pred.len()])
}
