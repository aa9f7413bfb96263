use std::collections::BTreeMap;
use std::io::Write;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest register a dense state vector may hold.
pub const MAX_DENSE_QUBITS: usize = 22;

/// Amplitudes with modulus below this are treated as exactly zero.
pub const AMPLITUDE_EPS: f64 = 1e-15;

/// Basis-level operations shared by the dense and sparse backends.
///
/// Qubit `q` is bit `q` of the basis index (little endian).
pub trait QuantumState {
    fn n_qubits(&self) -> usize;

    fn amplitude(&self, basis: u64) -> Complex64;

    /// Non-negligible `(basis, amplitude)` pairs in ascending basis order.
    fn support(&self) -> Vec<(u64, Complex64)>;

    /// Moves every amplitude at `b` to `f(b)`. `f` must be injective on the
    /// support, otherwise the state is left untouched and an error returned.
    fn permute(&mut self, f: &dyn Fn(u64) -> u64) -> Result<()>;

    /// Multiplies by `-1` every amplitude whose basis index satisfies `pred`.
    fn phase_flip_where(&mut self, pred: &dyn Fn(u64) -> bool);

    fn norm(&self) -> f64 {
        self.support()
            .iter()
            .map(|(_, a)| a.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    fn x(&mut self, q: usize) -> Result<()> {
        check_qubit(self.n_qubits(), q)?;
        self.permute(&|b| b ^ (1u64 << q))
    }

    fn z(&mut self, q: usize) -> Result<()> {
        check_qubit(self.n_qubits(), q)?;
        self.phase_flip_where(&|b| b >> q & 1 == 1);
        Ok(())
    }

    /// Multi-controlled Z: phase `-1` iff every listed qubit is `1`.
    fn cnz(&mut self, qubits: &[usize]) -> Result<()> {
        let mut mask = 0u64;
        for &q in qubits {
            check_qubit(self.n_qubits(), q)?;
            mask |= 1u64 << q;
        }
        if mask == 0 {
            return Err(Error::InvalidInput("cnz needs at least one qubit".into()));
        }
        self.phase_flip_where(&|b| b & mask == mask);
        Ok(())
    }
}

fn check_qubit(n: usize, q: usize) -> Result<()> {
    if q >= n {
        return Err(Error::InvalidInput(format!(
            "qubit {q} out of range for {n} qubits"
        )));
    }
    Ok(())
}

fn check_basis(n: usize, b: u64) -> Result<()> {
    if n < 64 && b >> n != 0 {
        return Err(Error::InvalidInput(format!(
            "basis state {b} needs more than {n} qubits"
        )));
    }
    Ok(())
}

/// Dense `2^n` amplitude array.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// `|0...0>` on `n_qubits` qubits.
    pub fn new(n_qubits: usize) -> Result<Self> {
        Self::basis(n_qubits, 0)
    }

    pub fn basis(n_qubits: usize, index: u64) -> Result<Self> {
        if n_qubits == 0 || n_qubits > MAX_DENSE_QUBITS {
            return Err(Error::InvalidInput(format!(
                "dense state supports 1..={MAX_DENSE_QUBITS} qubits, got {n_qubits}"
            )));
        }
        check_basis(n_qubits, index)?;
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n_qubits];
        amps[index as usize] = Complex64::new(1.0, 0.0);
        Ok(Self { n_qubits, amps })
    }

    /// Takes ownership of raw amplitudes; length must be a power of two and
    /// the norm 1 within `1e-12`.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let len = amps.len();
        if len < 2 || !len.is_power_of_two() || len > 1 << MAX_DENSE_QUBITS {
            return Err(Error::InvalidInput(format!("bad amplitude count {len}")));
        }
        let s = Self {
            n_qubits: len.trailing_zeros() as usize,
            amps,
        };
        if (s.norm() - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidInput(format!(
                "state norm {} is not 1",
                s.norm()
            )));
        }
        Ok(s)
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn probability(&self, basis: u64) -> f64 {
        self.amplitude(basis).norm_sqr()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Hadamard on qubit `q`.
    pub fn h(&mut self, q: usize) -> Result<()> {
        check_qubit(self.n_qubits, q)?;
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let bit = 1usize << q;
        for b in 0..self.amps.len() {
            if b & bit == 0 {
                let (a0, a1) = (self.amps[b], self.amps[b | bit]);
                self.amps[b] = (a0 + a1) * s;
                self.amps[b | bit] = (a0 - a1) * s;
            }
        }
        Ok(())
    }

    /// Writes `basis,re,im,probability` rows.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["basis", "re", "im", "probability"])?;
        for (b, a) in self.amps.iter().enumerate() {
            w.write_record([
                b.to_string(),
                a.re.to_string(),
                a.im.to_string(),
                a.norm_sqr().to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

impl QuantumState for StateVector {
    fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    fn amplitude(&self, basis: u64) -> Complex64 {
        self.amps.get(basis as usize).copied().unwrap_or_default()
    }

    fn support(&self) -> Vec<(u64, Complex64)> {
        self.amps
            .iter()
            .enumerate()
            .filter(|(_, a)| a.norm() > AMPLITUDE_EPS)
            .map(|(b, &a)| (b as u64, a))
            .collect()
    }

    fn permute(&mut self, f: &dyn Fn(u64) -> u64) -> Result<()> {
        let len = self.amps.len();
        let mut out = vec![Complex64::new(0.0, 0.0); len];
        let mut hit = vec![false; len];
        for (b, &a) in self.amps.iter().enumerate() {
            if a.norm() <= AMPLITUDE_EPS {
                continue;
            }
            let t = f(b as u64) as usize;
            if t >= len || hit[t] {
                return Err(Error::ContractViolation(format!(
                    "basis map is not a permutation at {b} -> {t}"
                )));
            }
            hit[t] = true;
            out[t] = a;
        }
        self.amps = out;
        Ok(())
    }

    fn phase_flip_where(&mut self, pred: &dyn Fn(u64) -> bool) {
        for (b, a) in self.amps.iter_mut().enumerate() {
            if pred(b as u64) {
                *a = -*a;
            }
        }
    }
}

/// Basis-map state for wide registers whose support stays small, such as
/// the distance oracle's ancilla-heavy layout.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseState {
    n_qubits: usize,
    amps: BTreeMap<u64, Complex64>,
}

impl SparseState {
    pub fn basis(n_qubits: usize, index: u64) -> Result<Self> {
        if n_qubits == 0 || n_qubits > 64 {
            return Err(Error::InvalidInput(format!(
                "sparse state supports 1..=64 qubits, got {n_qubits}"
            )));
        }
        check_basis(n_qubits, index)?;
        Ok(Self {
            n_qubits,
            amps: BTreeMap::from([(index, Complex64::new(1.0, 0.0))]),
        })
    }

    /// Equal-weight superposition of the given distinct basis states.
    pub fn uniform(n_qubits: usize, states: &[u64]) -> Result<Self> {
        if states.is_empty() {
            return Err(Error::InvalidInput(
                "uniform superposition of nothing".into(),
            ));
        }
        let mut s = Self::basis(n_qubits, states[0])?;
        s.amps.clear();
        let w = Complex64::new(1.0 / (states.len() as f64).sqrt(), 0.0);
        for &b in states {
            check_basis(n_qubits, b)?;
            if s.amps.insert(b, w).is_some() {
                return Err(Error::InvalidInput(format!("duplicate basis state {b}")));
            }
        }
        Ok(s)
    }
}

impl QuantumState for SparseState {
    fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    fn amplitude(&self, basis: u64) -> Complex64 {
        self.amps.get(&basis).copied().unwrap_or_default()
    }

    fn support(&self) -> Vec<(u64, Complex64)> {
        self.amps
            .iter()
            .filter(|(_, a)| a.norm() > AMPLITUDE_EPS)
            .map(|(&b, &a)| (b, a))
            .collect()
    }

    fn permute(&mut self, f: &dyn Fn(u64) -> u64) -> Result<()> {
        let mut out = BTreeMap::new();
        for (&b, &a) in &self.amps {
            let t = f(b);
            if check_basis(self.n_qubits, t).is_err() || out.insert(t, a).is_some() {
                return Err(Error::ContractViolation(format!(
                    "basis map is not a permutation at {b} -> {t}"
                )));
            }
        }
        self.amps = out;
        Ok(())
    }

    fn phase_flip_where(&mut self, pred: &dyn Fn(u64) -> bool) {
        for (&b, a) in self.amps.iter_mut() {
            if pred(b) {
                *a = -*a;
            }
        }
    }
}
