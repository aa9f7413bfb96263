//! Reversible fixed-point arithmetic lifted to basis permutations.
//!
//! Every operator maps `|x>|0>` to `|x>|f(x) mod 2^w>`; the inverse maps
//! `|x>|f(x)>` back to `|x>|0>`. Overflow wraps modulo `2^w`.

use serde::{Deserialize, Serialize};

use super::state::QuantumState;
use crate::error::{Error, Result};

/// A contiguous block of qubits read as an integer, bit `offset` least
/// significant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Register {
    pub offset: usize,
    pub width: usize,
    /// Two's complement when set.
    pub signed: bool,
}

impl Register {
    pub fn unsigned(offset: usize, width: usize) -> Self {
        Self {
            offset,
            width,
            signed: false,
        }
    }

    pub fn signed(offset: usize, width: usize) -> Self {
        Self {
            offset,
            width,
            signed: true,
        }
    }

    /// First qubit after this register.
    pub fn end(&self) -> usize {
        self.offset + self.width
    }

    pub fn mask(&self) -> u64 {
        if self.width >= 64 {
            u64::MAX
        } else {
            (1u64 << self.width) - 1
        }
    }

    pub fn qubits(&self) -> std::ops::Range<usize> {
        self.offset..self.end()
    }

    /// Raw bits of this register inside `basis`.
    pub fn raw(&self, basis: u64) -> u64 {
        (basis >> self.offset) & self.mask()
    }

    /// Integer value, sign-extended when signed.
    pub fn value(&self, basis: u64) -> i64 {
        let raw = self.raw(basis);
        if self.signed && self.width < 64 && raw >> (self.width - 1) & 1 == 1 {
            raw as i64 - (1i64 << self.width)
        } else {
            raw as i64
        }
    }

    /// `basis` with this register overwritten by `v mod 2^w`.
    pub fn with_value(&self, basis: u64, v: i64) -> u64 {
        let m = self.mask();
        (basis & !(m << self.offset)) | (((v as u64) & m) << self.offset)
    }

    fn validate(&self, n_qubits: usize) -> Result<()> {
        if self.width == 0 || self.width > 62 || self.end() > n_qubits {
            return Err(Error::InvalidInput(format!(
                "register {}..{} does not fit {} qubits",
                self.offset,
                self.end(),
                n_qubits
            )));
        }
        Ok(())
    }

    fn overlaps(&self, other: &Register) -> bool {
        self.offset < other.end() && other.offset < self.end()
    }
}

/// Encoding of reals with `frac_bits` fractional bits in `width` bits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FixedPointReg {
    pub width: usize,
    pub frac_bits: u32,
    pub signed: bool,
}

impl FixedPointReg {
    pub fn new(width: usize, frac_bits: u32, signed: bool) -> Result<Self> {
        if width == 0 || width > 62 || frac_bits as usize > width {
            return Err(Error::InvalidInput(format!(
                "bad fixed-point format: width {width}, frac {frac_bits}"
            )));
        }
        Ok(Self {
            width,
            frac_bits,
            signed,
        })
    }

    /// Inclusive range of representable raw integers.
    pub fn raw_range(&self) -> (i64, i64) {
        if self.signed {
            (-(1i64 << (self.width - 1)), (1i64 << (self.width - 1)) - 1)
        } else {
            (0, (1i64 << self.width) - 1)
        }
    }

    /// Bit pattern of `x`, which must be an exact multiple of `2^-frac`
    /// within range.
    pub fn encode(&self, x: f64) -> Result<u64> {
        let scaled = x * (1u64 << self.frac_bits) as f64;
        let (lo, hi) = self.raw_range();
        if !scaled.is_finite() || scaled.fract() != 0.0 || scaled < lo as f64 || scaled > hi as f64
        {
            return Err(Error::InvalidInput(format!(
                "{x} is not representable in {self:?}"
            )));
        }
        Ok((scaled as i64 as u64) & self.mask())
    }

    pub fn decode(&self, bits: u64) -> f64 {
        let reg = Register {
            offset: 0,
            width: self.width,
            signed: self.signed,
        };
        reg.value(bits) as f64 / (1u64 << self.frac_bits) as f64
    }

    /// This format placed at `offset`.
    pub fn at(&self, offset: usize) -> Register {
        Register {
            offset,
            width: self.width,
            signed: self.signed,
        }
    }

    fn mask(&self) -> u64 {
        (1u64 << self.width) - 1
    }
}

fn check_layout(state: &dyn QuantumState, srcs: &[Register], dst: Register) -> Result<()> {
    let n = state.n_qubits();
    dst.validate(n)?;
    for s in srcs {
        s.validate(n)?;
        if s.overlaps(&dst) {
            return Err(Error::InvalidInput("source overlaps destination".into()));
        }
    }
    Ok(())
}

/// `dst <- f(srcs)` on every basis state; `dst` must be `|0>` throughout.
pub fn apply_function(
    state: &mut dyn QuantumState,
    srcs: &[Register],
    dst: Register,
    f: &dyn Fn(&[i64]) -> i64,
) -> Result<()> {
    check_layout(state, srcs, dst)?;
    if let Some((b, _)) = state.support().into_iter().find(|&(b, _)| dst.raw(b) != 0) {
        return Err(Error::ContractViolation(format!(
            "destination register not |0> in basis state {b}"
        )));
    }
    state.permute(&|b| {
        let args: Vec<i64> = srcs.iter().map(|s| s.value(b)).collect();
        dst.with_value(b, f(&args))
    })
}

/// Inverse of [`apply_function`]: `dst <- dst - f(srcs)`.
pub fn uncompute_function(
    state: &mut dyn QuantumState,
    srcs: &[Register],
    dst: Register,
    f: &dyn Fn(&[i64]) -> i64,
) -> Result<()> {
    check_layout(state, srcs, dst)?;
    state.permute(&|b| {
        let args: Vec<i64> = srcs.iter().map(|s| s.value(b)).collect();
        dst.with_value(b, dst.value(b).wrapping_sub(f(&args)))
    })
}

fn sum(args: &[i64]) -> i64 {
    args.iter().fold(0i64, |a, &x| a.wrapping_add(x))
}

fn product(args: &[i64]) -> i64 {
    args.iter().fold(1i64, |a, &x| a.wrapping_mul(x))
}

/// `|x_1..x_k>|0> -> |x_1..x_k>|x_1 + ... + x_k>`.
pub fn apply_add(state: &mut dyn QuantumState, srcs: &[Register], dst: Register) -> Result<()> {
    apply_function(state, srcs, dst, &sum)
}

pub fn uncompute_add(state: &mut dyn QuantumState, srcs: &[Register], dst: Register) -> Result<()> {
    uncompute_function(state, srcs, dst, &sum)
}

/// `|x_1..x_k>|0> -> |x_1..x_k>|x_1 * ... * x_k>`. Fractional bits of the
/// result are the sum of the sources' fractional bits.
pub fn apply_mul(state: &mut dyn QuantumState, srcs: &[Register], dst: Register) -> Result<()> {
    apply_function(state, srcs, dst, &product)
}

pub fn uncompute_mul(state: &mut dyn QuantumState, srcs: &[Register], dst: Register) -> Result<()> {
    uncompute_function(state, srcs, dst, &product)
}

/// `|x> -> |-x>` in two's complement, in place. Self-inverse.
pub fn apply_negate(state: &mut dyn QuantumState, reg: Register) -> Result<()> {
    reg.validate(state.n_qubits())?;
    state.permute(&|b| reg.with_value(b, reg.value(b).wrapping_neg()))
}
