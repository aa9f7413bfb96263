//! Small-register statevector simulation of the Grover building blocks:
//! diffusion, reversible arithmetic, the distance threshold oracle and the
//! index-membership oracle.

mod arith;
mod oracle;
mod state;

pub use arith::{
    apply_add, apply_function, apply_mul, apply_negate, uncompute_add, uncompute_function,
    uncompute_mul, FixedPointReg, Register,
};
pub use oracle::{
    apply_diffusion, distance_oracle, grover_statevector, membership_oracle, DistanceLayout,
};
pub use state::{QuantumState, SparseState, StateVector, AMPLITUDE_EPS, MAX_DENSE_QUBITS};
