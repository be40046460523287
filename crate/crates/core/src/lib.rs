//! GKP-Magic: a stabilizer-magic measure for qubit states, built from the
//! unit-cell Wigner negativity of the GKP encoding.
//!
//! The fast path computes `sum_{i,j} |Tr(X^j Z^i rho)|` with one Walsh–Hadamard
//! transform per shift `j`, so a pure state of `n` qubits costs
//! `O(n 4^n)` time and `O(2^n)` memory per thread.

pub mod analytic;
pub mod bounds;
pub mod error;
pub mod fwht;
pub mod gates;
pub mod measures;
pub mod optimize;
pub mod oracle;
pub mod state;

pub use error::{MagicError, Result, MAX_QUBITS};
pub use gates::{Circuit, Gate, GateUnitary};
pub use measures::{gkp_magic, magic, st_norm, EvalPath, MagicReport, Measure};
pub use state::{DensityOperator, PauliLabel, PureState, QubitState};
