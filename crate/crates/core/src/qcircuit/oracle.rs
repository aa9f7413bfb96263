use num_complex::Complex64;

use super::arith::{
    apply_add, apply_function, apply_mul, apply_negate, uncompute_add, uncompute_function,
    uncompute_mul, Register,
};
use super::state::{QuantumState, StateVector};
use crate::error::{Error, Result};

/// Reflection `2|psi><psi| - 1` on `reg`, where `|psi>` is the uniform
/// superposition over the first `domain_size` values of `reg`. Values at or
/// above `domain_size` are padding and only pick up the `-1`.
pub fn apply_diffusion(state: &mut StateVector, reg: Register, domain_size: u64) -> Result<()> {
    let n = state.n_qubits_checked(reg)?;
    if domain_size == 0 || domain_size > 1u64 << reg.width {
        return Err(Error::InvalidInput(format!(
            "domain size {domain_size} does not fit a {}-qubit register",
            reg.width
        )));
    }
    let amps = state.amplitudes_mut();
    let inv = 1.0 / domain_size as f64;
    let reg_mask = reg.mask() << reg.offset;
    for rest in 0..1u64 << n {
        if rest & reg_mask != 0 {
            continue;
        }
        let idx = |v: u64| reg.with_value(rest, v as i64) as usize;
        let mean: Complex64 = (0..domain_size).map(|v| amps[idx(v)]).sum::<Complex64>() * inv;
        for v in 0..1u64 << reg.width {
            let a = &mut amps[idx(v)];
            *a = if v < domain_size {
                mean * 2.0 - *a
            } else {
                -*a
            };
        }
    }
    Ok(())
}

impl StateVector {
    fn n_qubits_checked(&self, reg: Register) -> Result<usize> {
        let n = self.n_qubits();
        if reg.width == 0 || reg.end() > n {
            return Err(Error::InvalidInput(format!(
                "register {}..{} does not fit {n} qubits",
                reg.offset,
                reg.end()
            )));
        }
        Ok(n)
    }
}

/// Phase `-1` on every basis value of `index_reg` listed in `members`,
/// built from X-conjugated multi-controlled Z blocks, one per member.
pub fn membership_oracle(
    state: &mut dyn QuantumState,
    index_reg: Register,
    members: &[u64],
) -> Result<()> {
    if index_reg.width == 0 || index_reg.end() > state.n_qubits() {
        return Err(Error::InvalidInput(
            "index register does not fit the state".into(),
        ));
    }
    if let Some(&bad) = members.iter().find(|&&m| m > index_reg.mask()) {
        return Err(Error::InvalidInput(format!(
            "member {bad} needs more than {} bits",
            index_reg.width
        )));
    }
    let qubits: Vec<usize> = index_reg.qubits().collect();
    for &member in members {
        let zeros: Vec<usize> = (0..index_reg.width)
            .filter(|&k| member >> k & 1 == 0)
            .map(|k| index_reg.offset + k)
            .collect();
        for &q in &zeros {
            state.x(q)?;
        }
        state.cnz(&qubits)?;
        for &q in &zeros {
            state.x(q)?;
        }
    }
    Ok(())
}

/// Register layout of the squared-distance threshold oracle for two points
/// with `coord_bits`-bit non-negative integer coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DistanceLayout {
    pub coord_bits: usize,
    pub x1i: Register,
    pub x2i: Register,
    pub x1j: Register,
    pub x2j: Register,
    pub a: Register,
    pub b: Register,
    pub m1: Register,
    pub m2: Register,
    pub ans: Register,
    pub sign: Register,
}

impl DistanceLayout {
    /// Coordinates get one extra bit so their negation fits; squares get
    /// `2c` bits and the signed answer `2c + 2`, which never overflows.
    pub fn new(coord_bits: usize) -> Result<Self> {
        if coord_bits == 0 || coord_bits > 8 {
            return Err(Error::InvalidInput(format!(
                "coordinate width {coord_bits} outside 1..=8"
            )));
        }
        let w = coord_bits + 1;
        let mut next = 0;
        let mut alloc = |width: usize, signed: bool| {
            let r = Register {
                offset: next,
                width,
                signed,
            };
            next += width;
            r
        };
        let x1i = alloc(w, true);
        let x2i = alloc(w, true);
        let x1j = alloc(w, true);
        let x2j = alloc(w, true);
        let a = alloc(w, true);
        let b = alloc(w, true);
        let m1 = alloc(2 * coord_bits, false);
        let m2 = alloc(2 * coord_bits, false);
        let ans = alloc(2 * coord_bits + 2, true);
        let sign = alloc(1, false);
        Ok(Self {
            coord_bits,
            x1i,
            x2i,
            x1j,
            x2j,
            a,
            b,
            m1,
            m2,
            ans,
            sign,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.sign.end()
    }

    pub fn ancillas(&self) -> [Register; 6] {
        [self.a, self.b, self.m1, self.m2, self.ans, self.sign]
    }

    /// Basis state holding points `i = (x1i, x2i)` and `j = (x1j, x2j)` with
    /// every ancilla at zero.
    pub fn encode(&self, pi: (u64, u64), pj: (u64, u64)) -> Result<u64> {
        let max = (1u64 << self.coord_bits) - 1;
        if [pi.0, pi.1, pj.0, pj.1].iter().any(|&c| c > max) {
            return Err(Error::InvalidInput(format!("coordinate above {max}")));
        }
        let mut s = 0;
        for (r, v) in [
            (self.x1i, pi.0),
            (self.x2i, pi.1),
            (self.x1j, pj.0),
            (self.x2j, pj.1),
        ] {
            s = r.with_value(s, v as i64);
        }
        Ok(s)
    }
}

/// Phase `-1` on basis states whose encoded pair satisfies
/// `d^2 < d_c_sq`, with every ancilla returned to `|0>`.
///
/// Sequence: negate `j`, add into `a` and `b`, square into `m1`/`m2`,
/// `ans = m1 + m2 - d_c^2`, copy the sign bit, `Z` on it, then undo all.
pub fn distance_oracle(
    state: &mut dyn QuantumState,
    layout: &DistanceLayout,
    d_c_sq: u64,
) -> Result<()> {
    let l = layout;
    if d_c_sq > 1u64 << (2 * l.coord_bits + 1) {
        return Err(Error::InvalidInput(format!(
            "threshold {d_c_sq} overflows the answer register"
        )));
    }
    if state.n_qubits() < l.n_qubits() {
        return Err(Error::InvalidInput(
            "state too small for distance layout".into(),
        ));
    }
    let c = d_c_sq as i64;
    let shifted = move |v: &[i64]| v[0] + v[1] - c;
    let negative = |v: &[i64]| (v[0] < 0) as i64;

    apply_negate(state, l.x1j)?;
    apply_negate(state, l.x2j)?;
    apply_add(state, &[l.x1i, l.x1j], l.a)?;
    apply_add(state, &[l.x2i, l.x2j], l.b)?;
    apply_mul(state, &[l.a, l.a], l.m1)?;
    apply_mul(state, &[l.b, l.b], l.m2)?;
    apply_function(state, &[l.m1, l.m2], l.ans, &shifted)?;
    apply_function(state, &[l.ans], l.sign, &negative)?;

    state.z(l.sign.offset)?;

    uncompute_function(state, &[l.ans], l.sign, &negative)?;
    uncompute_function(state, &[l.m1, l.m2], l.ans, &shifted)?;
    uncompute_mul(state, &[l.b, l.b], l.m2)?;
    uncompute_mul(state, &[l.a, l.a], l.m1)?;
    uncompute_add(state, &[l.x2i, l.x2j], l.b)?;
    uncompute_add(state, &[l.x1i, l.x1j], l.a)?;
    apply_negate(state, l.x2j)?;
    apply_negate(state, l.x1j)?;
    Ok(())
}

/// Measurement distribution over `0..domain_size` after `iterations`
/// rounds of phase oracle then diffusion, starting from the uniform
/// superposition over the domain.
pub fn grover_statevector(
    domain_size: usize,
    marked: &[u64],
    iterations: usize,
) -> Result<Vec<f64>> {
    if domain_size == 0 {
        return Err(Error::EmptyDomain);
    }
    let width = (usize::BITS - (domain_size - 1).leading_zeros()).max(1) as usize;
    let mut is_marked = vec![false; domain_size];
    for &m in marked {
        let slot = is_marked.get_mut(m as usize).ok_or_else(|| {
            Error::InvalidInput(format!("marked item {m} outside domain of {domain_size}"))
        })?;
        *slot = true;
    }

    let mut amps = vec![Complex64::new(0.0, 0.0); 1 << width];
    let w = 1.0 / (domain_size as f64).sqrt();
    amps[..domain_size].fill(Complex64::new(w, 0.0));
    let mut state = StateVector::from_amplitudes(amps)?;
    let reg = Register::unsigned(0, width);
    for _ in 0..iterations {
        state.phase_flip_where(&|b| is_marked.get(b as usize).copied().unwrap_or(false));
        apply_diffusion(&mut state, reg, domain_size as u64)?;
    }
    Ok(state.probabilities()[..domain_size].to_vec())
}
