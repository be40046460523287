//! Magic quantifiers built on the binary Pauli sum
//! `S(rho) = sum_{i,j} |sum_k (-1)^{i·k} rho_{k, k+j}| = 2^n D(rho)`.
//!
//! * st-norm `D = 2^{-n} S`
//! * GKP-Magic `log2 D` (pure states only)
//! * cell negativity `pi^{-n/2} S = (2/sqrt(pi))^n D` and its log
//! * clipped mixed-state variant, stabilizer Rényi entropy at 1/2, and the
//!   single-qubit discrete-Wigner sum negativity.
//!
//! The single-qubit cell negativity is sometimes written without the identity
//! term, as `(2/sqrt(pi))(|cos θ| + |sin θ cos φ| + |sin θ sin φ|)`; that form
//! disagrees with the tabulated values (the |T> state, for one). Everything here
//! uses the full sum including the identity.

use std::f64::consts::PI;
use std::fmt;
use std::time::Instant;

use nalgebra::Matrix2;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{check_qubits, MagicError, Result, MAX_QUBITS};
use crate::fwht::{fwht_in_place, pairwise_sum, CompensatedSum};
use crate::state::{dot_parity, pauli_sum_unchecked, DensityOperator, PureState, QubitState};

/// Largest register for the `8^n` direct sum.
pub const MAX_NAIVE_QUBITS: usize = 10;

/// `log2(2/sqrt(pi))`, the per-qubit cell-negativity offset of a pure stabilizer state.
pub fn log2_cell_offset() -> f64 {
    (2.0 / PI.sqrt()).log2()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Measure {
    GkpMagic,
    StNorm,
    CellNegativity,
    CellLogNegativity,
    TildeMagic,
    RenyiHalf,
    SumNegativity,
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Measure::GkpMagic => "gkp",
            Measure::StNorm => "stnorm",
            Measure::CellNegativity => "cellneg",
            Measure::CellLogNegativity => "celllogneg",
            Measure::TildeMagic => "tilde",
            Measure::RenyiHalf => "renyi",
            Measure::SumNegativity => "sumneg",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EvalPath {
    Naive,
    Fwht,
    Analytic,
    Oracle,
}

impl fmt::Display for EvalPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            EvalPath::Naive => "naive",
            EvalPath::Fwht => "fwht",
            EvalPath::Analytic => "analytic",
            EvalPath::Oracle => "oracle",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MagicReport {
    pub measure: Measure,
    pub n: usize,
    /// Bits for logarithmic measures, dimensionless otherwise.
    pub value: f64,
    pub path: EvalPath,
    /// Wall time in seconds.
    pub elapsed: f64,
    /// Pre-clip value for [`Measure::TildeMagic`].
    pub diagnostic: Option<f64>,
}

impl MagicReport {
    pub const CSV_HEADER: &'static str = "measure,n,value,path,elapsed_s";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{:.4},{},{:.6}",
            self.measure, self.n, self.value, self.path, self.elapsed
        )
    }
}

/// `S(rho) = 2^n D(rho)` by the direct `8^n` sum.
pub fn pauli_abs_sum_naive<S: QubitState + ?Sized>(state: &S) -> Result<f64> {
    let n = state.num_qubits();
    check_qubits("naive Pauli sum", n, MAX_NAIVE_QUBITS)?;
    let d = state.dim();
    let mut acc = CompensatedSum::default();
    for z in 0..d {
        for x in 0..d {
            acc.add(pauli_sum_unchecked(state, z, x).norm());
        }
    }
    Ok(acc.value())
}

/// Below this dimension the shifts are summed on the calling thread.
const SEQUENTIAL_DIM: usize = 64;

/// `S(rho) = 2^n D(rho)` with one Walsh–Hadamard transform per shift `j`.
///
/// Shifts are processed in parallel on the current rayon pool; per-shift sums
/// are combined by [`pairwise_sum`] so the result does not depend on the thread
/// count.
pub fn pauli_abs_sum_fwht<S: QubitState + Sync + ?Sized>(state: &S) -> Result<f64> {
    let n = state.num_qubits();
    check_qubits("FWHT Pauli sum", n, MAX_QUBITS)?;
    let d = state.dim();
    let shift_sum = |buf: &mut Vec<Complex64>, x: usize| {
        for (k, slot) in buf.iter_mut().enumerate() {
            *slot = state.element(k, k ^ x);
        }
        fwht_in_place(buf);
        buf.iter()
            .map(|a| a.norm())
            .collect::<CompensatedSum>()
            .value()
    };
    if d <= SEQUENTIAL_DIM {
        let mut buf = vec![Complex64::new(0.0, 0.0); d];
        let per_shift: Vec<f64> = (0..d).map(|x| shift_sum(&mut buf, x)).collect();
        return Ok(pairwise_sum(&per_shift));
    }
    let per_shift: Vec<f64> = (0..d)
        .into_par_iter()
        .map_init(|| vec![Complex64::new(0.0, 0.0); d], shift_sum)
        .collect();
    Ok(pairwise_sum(&per_shift))
}

fn pauli_abs_sum<S: QubitState + Sync + ?Sized>(state: &S, path: EvalPath) -> Result<f64> {
    match path {
        EvalPath::Naive => pauli_abs_sum_naive(state),
        EvalPath::Fwht => pauli_abs_sum_fwht(state),
        other => Err(MagicError::Unsupported(format!(
            "{other} path for the Pauli sum (use naive or fwht)"
        ))),
    }
}

/// st-norm `D(rho) = 2^{-n} sum_{i,j} |Tr(X^j Z^i rho)|`.
pub fn st_norm<S: QubitState + Sync + ?Sized>(state: &S, path: EvalPath) -> Result<f64> {
    let n = state.num_qubits();
    Ok(pauli_abs_sum(state, path)? / (1u64 << n) as f64)
}

/// GKP-Magic `log2 D(|psi>)`. Only defined for pure states; see [`tilde_magic`]
/// for the mixed-state extension.
pub fn gkp_magic(psi: &PureState, path: EvalPath) -> Result<MagicReport> {
    let start = Instant::now();
    let value = st_norm(psi, path)?.log2();
    Ok(MagicReport {
        measure: Measure::GkpMagic,
        n: psi.n(),
        value,
        path,
        elapsed: start.elapsed().as_secs_f64(),
        diagnostic: None,
    })
}

/// GKP-Magic via the FWHT path, value only.
pub fn magic(psi: &PureState) -> f64 {
    st_norm(psi, EvalPath::Fwht)
        .expect("pure states are within the FWHT cap")
        .log2()
}

/// Unit-cell Wigner negativity `pi^{-n/2} sum_{i,j} |sum_k (-1)^{i·k} rho_{k,k+j}|`.
pub fn cell_negativity<S: QubitState + Sync + ?Sized>(state: &S) -> Result<f64> {
    let n = state.num_qubits() as f64;
    Ok(pauli_abs_sum_fwht(state)? * PI.powf(-n / 2.0))
}

/// `log2` of [`cell_negativity`].
pub fn cell_log_negativity<S: QubitState + Sync + ?Sized>(state: &S) -> Result<f64> {
    Ok(cell_negativity(state)?.log2())
}

/// `max[0, log2(cell negativity) - n log2(2/sqrt(pi))]`.
///
/// This extension to mixed states is not a magic monotone: composing with a
/// state inside the stabilizer polytope can drive it to zero. The value before
/// clipping is returned in `diagnostic`.
pub fn tilde_magic(rho: &DensityOperator) -> Result<MagicReport> {
    let start = Instant::now();
    let raw = cell_log_negativity(rho)? - rho.n() as f64 * log2_cell_offset();
    Ok(MagicReport {
        measure: Measure::TildeMagic,
        n: rho.n(),
        value: raw.max(0.0),
        path: EvalPath::Fwht,
        elapsed: start.elapsed().as_secs_f64(),
        diagnostic: Some(raw),
    })
}

/// `<psi| P |psi>` for the Hermitian Pauli `P = i^{x·z} X^x Z^z`, computed by
/// applying `P` to the amplitudes.
fn hermitian_pauli_expectation(psi: &PureState, z: usize, x: usize) -> f64 {
    let amps = psi.amps();
    let mut acc = Complex64::new(0.0, 0.0);
    for (k, &a) in amps.iter().enumerate() {
        // X^x Z^z |k> = (-1)^{z·k} |k ^ x>
        let term = amps[k ^ x].conj() * a;
        if dot_parity(z, k) {
            acc -= term;
        } else {
            acc += term;
        }
    }
    let phase = match (x & z).count_ones() % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    };
    (phase * acc).re
}

/// Stabilizer Rényi entropy at `alpha = 1/2`:
/// `2 log2(sum_P 2^{-n/2} |<P>|) - n` over the `4^n` Hermitian Paulis.
pub fn renyi_half(psi: &PureState) -> Result<f64> {
    let n = psi.n();
    check_qubits("Rényi-1/2 Pauli sum", n, MAX_NAIVE_QUBITS)?;
    let d = psi.dim();
    let scale = (0.5f64).powf(n as f64 / 2.0);
    let mut acc = CompensatedSum::default();
    for z in 0..d {
        for x in 0..d {
            acc.add(scale * hermitian_pauli_expectation(psi, z, x).abs());
        }
    }
    Ok(2.0 * acc.value().log2() - n as f64)
}

/// Single-qubit discrete-Wigner sum negativity `(sum_u |C(u)| - 1) / 2` with
/// `C(u) = Tr(A_u rho)/2`, `A_0 = (1/2) sum_u W_u`, `A_u = W_u A_0 W_u^dag` and
/// Weyl operators `W_{l,m} = i^{lm} Z^m X^l`.
pub fn discrete_wigner_sum_negativity<S: QubitState + ?Sized>(rho: &S) -> Result<f64> {
    if rho.num_qubits() != 1 {
        return Err(MagicError::Unsupported(format!(
            "discrete-Wigner sum negativity on {} qubits (single qubit only)",
            rho.num_qubits()
        )));
    }
    let c = |re: f64, im: f64| Complex64::new(re, im);
    let rho = Matrix2::new(
        rho.element(0, 0),
        rho.element(0, 1),
        rho.element(1, 0),
        rho.element(1, 1),
    );
    let x = Matrix2::new(c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0));
    let z = Matrix2::new(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0));
    let id = Matrix2::identity();
    let weyl = |l: u32, m: u32| -> Matrix2<Complex64> {
        let zm = if m == 1 { z } else { id };
        let xl = if l == 1 { x } else { id };
        zm * xl * c(0.0, 1.0).powu(l * m)
    };
    let points = [(0, 0), (0, 1), (1, 0), (1, 1)];
    let a0: Matrix2<Complex64> = points
        .iter()
        .map(|&(l, m)| weyl(l, m))
        .fold(Matrix2::zeros(), |acc, w| acc + w)
        * c(0.5, 0.0);
    let total: f64 = points
        .iter()
        .map(|&(l, m)| {
            let w = weyl(l, m);
            let a = w * a0 * w.adjoint();
            ((a * rho).trace() * 0.5).norm()
        })
        .sum();
    Ok(0.5 * (total - 1.0))
}
