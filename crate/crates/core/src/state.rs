//! Dense pure states, density operators and Pauli labels.
//!
//! Basis indices put qubit 1 in the most-significant bit, so the index of
//! `|u_1 u_2 ... u_n>` is `u_1 * 2^(n-1) + ... + u_n`.

use std::fmt::Write as _;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{check_qubits, MagicError, Result, MAX_QUBITS};
use crate::gates::{self, Gate};

/// Tolerance on the input norm accepted by [`PureState::new`].
pub const NORM_INPUT_TOL: f64 = 1e-6;
/// Two states are equal up to global phase when `|<a|b>| >= 1 - PHASE_EQ_TOL`.
pub const PHASE_EQ_TOL: f64 = 1e-9;

/// Bit mask of a 1-based qubit index in an `n`-qubit register.
#[inline]
pub fn qubit_mask(n: usize, qubit: usize) -> usize {
    1usize << (n - qubit)
}

/// Read access to the matrix elements `rho_{u,v}` of a state, pure or mixed.
pub trait QubitState {
    fn num_qubits(&self) -> usize;
    fn element(&self, u: usize, v: usize) -> Complex64;

    fn dim(&self) -> usize {
        1 << self.num_qubits()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    n: usize,
    amps: Vec<Complex64>,
}

impl PureState {
    /// Validates and stores a normalized copy of `amps`.
    ///
    /// Inputs whose norm is off by more than [`NORM_INPUT_TOL`] are rejected
    /// instead of being renormalized.
    pub fn new(amps: Vec<Complex64>) -> Result<Self> {
        let len = amps.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(MagicError::NotPowerOfTwo(len));
        }
        let n = len.trailing_zeros() as usize;
        check_qubits("pure state", n, MAX_QUBITS)?;
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if !norm.is_finite() || (norm - 1.0).abs() > NORM_INPUT_TOL {
            return Err(MagicError::NotNormalized {
                norm,
                tol: NORM_INPUT_TOL,
            });
        }
        // already unit norm to rounding: keep the bits so text round-trips exactly
        if (norm - 1.0).abs() <= 8.0 * f64::EPSILON {
            return Ok(Self { n, amps });
        }
        let amps = amps.into_iter().map(|a| a / norm).collect();
        Ok(Self { n, amps })
    }

    /// Normalizes without validation; callers guarantee a non-zero vector.
    pub(crate) fn from_unnormalized(amps: Vec<Complex64>) -> Self {
        let n = amps.len().trailing_zeros() as usize;
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        Self {
            n,
            amps: amps.into_iter().map(|a| a / norm).collect(),
        }
    }

    pub fn from_real(amps: &[f64]) -> Result<Self> {
        Self::new(amps.iter().map(|&a| Complex64::new(a, 0.0)).collect())
    }

    pub fn basis(n: usize, index: usize) -> Result<Self> {
        check_qubits("pure state", n, MAX_QUBITS)?;
        if n == 0 || index >= 1 << n {
            return Err(MagicError::Unsupported(format!(
                "basis index {index} for {n} qubits"
            )));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(Self { n, amps })
    }

    pub fn zero(n: usize) -> Result<Self> {
        Self::basis(n, 0)
    }

    /// `|+>^{⊗n}`.
    pub fn plus(n: usize) -> Result<Self> {
        check_qubits("pure state", n, MAX_QUBITS)?;
        if n == 0 {
            return Err(MagicError::NotPowerOfTwo(1));
        }
        let a = Complex64::new((0.5f64).powf(n as f64 / 2.0), 0.0);
        Ok(Self {
            n,
            amps: vec![a; 1 << n],
        })
    }

    /// `(|0> + e^{i phi}|1>)/sqrt(2)`.
    pub fn phase_plus(phi: f64) -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        Self {
            n: 1,
            amps: vec![Complex64::new(s, 0.0), Complex64::from_polar(s, phi)],
        }
    }

    /// `|H> = (|0> + e^{i pi/4}|1>)/sqrt(2)`, the state that teleports a T gate.
    pub fn h_state() -> Self {
        Self::phase_plus(std::f64::consts::FRAC_PI_4)
    }

    /// `cos(theta/2)|0> + e^{i phi} sin(theta/2)|1>`.
    pub fn bloch(theta: f64, phi: f64) -> Self {
        let (s, c) = (theta / 2.0).sin_cos();
        Self {
            n: 1,
            amps: vec![Complex64::new(c, 0.0), Complex64::from_polar(s, phi)],
        }
    }

    /// `|T> = cos(beta)|0> + sin(beta) e^{i pi/4}|1>` with `cos(2 beta) = 1/sqrt(3)`.
    pub fn t_state() -> Self {
        Self::bloch((1.0f64 / 3f64.sqrt()).acos(), std::f64::consts::FRAC_PI_4)
    }

    /// The three-qubit Hoggar state `(1+i, 0, -1, 1, -i, 1, 0, 0)/sqrt(6)`.
    pub fn hoggar() -> Self {
        let c = |re: f64, im: f64| Complex64::new(re, im);
        Self::from_unnormalized(vec![
            c(1.0, 1.0),
            c(0.0, 0.0),
            c(-1.0, 0.0),
            c(1.0, 0.0),
            c(0.0, -1.0),
            c(1.0, 0.0),
            c(0.0, 0.0),
            c(0.0, 0.0),
        ])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn amps(&self) -> &[Complex64] {
        &self.amps
    }

    pub(crate) fn amps_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn into_amps(self) -> Vec<Complex64> {
        self.amps
    }

    /// Kronecker product with `self`'s qubits most significant.
    pub fn tensor(&self, other: &PureState) -> Result<PureState> {
        let n = self.n + other.n;
        check_qubits("tensor product", n, MAX_QUBITS)?;
        let mut amps = Vec::with_capacity(1 << n);
        for a in &self.amps {
            amps.extend(other.amps.iter().map(|b| a * b));
        }
        Ok(PureState { n, amps })
    }

    pub fn tensor_power(&self, k: usize) -> Result<PureState> {
        let mut out = self.clone();
        for _ in 1..k {
            out = out.tensor(self)?;
        }
        Ok(out)
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &PureState) -> Complex64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn equal_up_to_phase(&self, other: &PureState) -> bool {
        self.n == other.n && self.inner(other).norm() >= 1.0 - PHASE_EQ_TOL
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn to_density(&self) -> DensityOperator {
        let d = self.amps.len();
        let mat = DMatrix::from_fn(d, d, |u, v| self.amps[u] * self.amps[v].conj());
        DensityOperator { n: self.n, mat }
    }

    pub fn apply(&mut self, gate: &Gate) -> Result<()> {
        gates::apply_gate(self, gate)
    }

    /// Projective Z measurement of one qubit, returning both branches.
    ///
    /// The measured qubit is removed from the post-measurement states. For a
    /// single-qubit input, or a branch of probability zero, `post_state` is
    /// `None` (a scalar, which carries no magic).
    pub fn measure_z(&self, qubit: usize) -> Result<[MeasurementRecord; 2]> {
        if qubit == 0 || qubit > self.n {
            return Err(MagicError::QubitOutOfRange { qubit, n: self.n });
        }
        let mask = qubit_mask(self.n, qubit);
        let low = mask - 1;
        let half = 1usize << (self.n - 1);
        let branch = |outcome: u8| {
            let sub: Vec<Complex64> = (0..half)
                .map(|r| {
                    // re-insert the measured bit at its position
                    let idx = ((r & !low) << 1) | (r & low) | if outcome == 1 { mask } else { 0 };
                    self.amps[idx]
                })
                .collect();
            let probability: f64 = sub.iter().map(|a| a.norm_sqr()).sum();
            let post_state = if self.n >= 2 && probability > 1e-300 {
                Some(PureState::from_unnormalized(sub))
            } else {
                None
            };
            MeasurementRecord {
                outcome,
                probability,
                post_state,
            }
        };
        Ok([branch(0), branch(1)])
    }

    /// Parses the plain-text state format: `n=<int>` followed by `2^n` lines of `<re> <im>`.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = lines
            .next()
            .ok_or_else(|| MagicError::Parse("empty state file".into()))?;
        let n: usize = header
            .strip_prefix("n=")
            .and_then(|s| s.trim().parse().ok())
            .ok_or_else(|| MagicError::Parse(format!("bad header line `{header}`")))?;
        check_qubits("state file", n, MAX_QUBITS)?;
        let mut amps = Vec::with_capacity(1 << n);
        for line in lines {
            let mut parts = line.split_whitespace();
            let mut num = || -> Result<f64> {
                let tok = parts
                    .next()
                    .ok_or_else(|| MagicError::Parse(format!("bad amplitude line `{line}`")))?;
                f64::from_str(tok).map_err(|e| MagicError::Parse(format!("`{tok}`: {e}")))
            };
            let re = num()?;
            let im = num()?;
            if parts.next().is_some() {
                return Err(MagicError::Parse(format!("trailing data in `{line}`")));
            }
            amps.push(Complex64::new(re, im));
        }
        if amps.len() != 1 << n {
            return Err(MagicError::Parse(format!(
                "expected {} amplitudes for n={n}, found {}",
                1usize << n,
                amps.len()
            )));
        }
        Self::new(amps)
    }

    /// Serializes with 17 significant digits so that parsing round-trips exactly.
    pub fn to_text(&self) -> String {
        let mut out = format!("n={}\n", self.n);
        for a in &self.amps {
            let _ = writeln!(out, "{:.16e} {:.16e}", a.re, a.im);
        }
        out
    }
}

impl QubitState for PureState {
    fn num_qubits(&self) -> usize {
        self.n
    }

    #[inline]
    fn element(&self, u: usize, v: usize) -> Complex64 {
        self.amps[u] * self.amps[v].conj()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementRecord {
    pub outcome: u8,
    pub probability: f64,
    pub post_state: Option<PureState>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    n: usize,
    mat: DMatrix<Complex64>,
}

impl DensityOperator {
    pub const HERMITIAN_TOL: f64 = 1e-12;
    pub const TRACE_TOL: f64 = 1e-10;
    pub const EIGEN_TOL: f64 = 1e-10;

    /// Validates hermiticity, unit trace and positivity.
    pub fn new(mat: DMatrix<Complex64>) -> Result<Self> {
        let d = mat.nrows();
        if d != mat.ncols() {
            return Err(MagicError::InvalidDensity(format!(
                "matrix is {}x{}",
                d,
                mat.ncols()
            )));
        }
        if d < 2 || !d.is_power_of_two() {
            return Err(MagicError::NotPowerOfTwo(d));
        }
        let n = d.trailing_zeros() as usize;
        check_qubits("density operator", n, MAX_QUBITS)?;
        for u in 0..d {
            for v in u..d {
                if (mat[(u, v)] - mat[(v, u)].conj()).norm() > Self::HERMITIAN_TOL {
                    return Err(MagicError::InvalidDensity(format!(
                        "not Hermitian at ({u}, {v})"
                    )));
                }
            }
        }
        let tr = mat.trace();
        if (tr - Complex64::new(1.0, 0.0)).norm() > Self::TRACE_TOL {
            return Err(MagicError::InvalidDensity(format!("trace {tr}")));
        }
        let min_eig = mat
            .clone()
            .symmetric_eigenvalues()
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min);
        if min_eig < -Self::EIGEN_TOL {
            return Err(MagicError::InvalidDensity(format!(
                "negative eigenvalue {min_eig:e}"
            )));
        }
        Ok(Self { n, mat })
    }

    pub fn maximally_mixed(n: usize) -> Result<Self> {
        check_qubits("density operator", n, MAX_QUBITS)?;
        let d = 1 << n;
        let mut mat = DMatrix::zeros(d, d);
        for k in 0..d {
            mat[(k, k)] = Complex64::new(1.0 / d as f64, 0.0);
        }
        Ok(Self { n, mat })
    }

    /// Convex mixture `sum_k w_k |psi_k><psi_k|`; weights are normalized to sum to one.
    pub fn mixture(weights: &[f64], states: &[PureState]) -> Result<Self> {
        let first = states
            .first()
            .ok_or_else(|| MagicError::InvalidDensity("empty mixture".into()))?;
        if weights.len() != states.len() || weights.iter().any(|w| *w < 0.0) {
            return Err(MagicError::InvalidDensity("bad mixture weights".into()));
        }
        let total: f64 = weights.iter().sum();
        let d = first.amps.len();
        let mut mat = DMatrix::zeros(d, d);
        for (w, s) in weights.iter().zip(states) {
            if s.n != first.n {
                return Err(MagicError::DimensionMismatch {
                    expected: first.n,
                    got: s.n,
                });
            }
            mat += s.to_density().mat * Complex64::new(w / total, 0.0);
        }
        Ok(Self { n: first.n, mat })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.mat
    }

    pub fn tensor(&self, other: &DensityOperator) -> Result<DensityOperator> {
        let n = self.n + other.n;
        check_qubits("tensor product", n, MAX_QUBITS)?;
        Ok(DensityOperator {
            n,
            mat: self.mat.kronecker(&other.mat),
        })
    }

    /// Traces out the last `k` qubits.
    pub fn partial_trace_last(&self, k: usize) -> Result<DensityOperator> {
        if k == 0 || k >= self.n {
            return Err(MagicError::QubitOutOfRange {
                qubit: k,
                n: self.n,
            });
        }
        let keep = 1usize << (self.n - k);
        let traced = 1usize << k;
        let mat = DMatrix::from_fn(keep, keep, |u, v| {
            (0..traced)
                .map(|t| self.mat[(u * traced + t, v * traced + t)])
                .sum()
        });
        Ok(DensityOperator { n: self.n - k, mat })
    }

    pub fn purity(&self) -> f64 {
        (&self.mat * &self.mat).trace().re
    }
}

impl QubitState for DensityOperator {
    fn num_qubits(&self) -> usize {
        self.n
    }

    #[inline]
    fn element(&self, u: usize, v: usize) -> Complex64 {
        self.mat[(u, v)]
    }
}

impl From<&PureState> for DensityOperator {
    fn from(psi: &PureState) -> Self {
        psi.to_density()
    }
}

/// Pauli operator `X^j Z^i` on `n` qubits, stored as bit masks with qubit 1 in
/// the most-significant bit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PauliLabel {
    n: usize,
    /// Exponent of Z (the `i` index).
    z: usize,
    /// Exponent of X (the `j` index).
    x: usize,
}

impl PauliLabel {
    pub fn new(n: usize, z: usize, x: usize) -> Result<Self> {
        check_qubits("Pauli label", n, MAX_QUBITS)?;
        if (z | x) >> n != 0 {
            return Err(MagicError::DimensionMismatch {
                expected: n,
                got: (usize::BITS - (z | x).leading_zeros()) as usize,
            });
        }
        Ok(Self { n, z, x })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn z_bits(&self) -> usize {
        self.z
    }

    pub fn x_bits(&self) -> usize {
        self.x
    }

    /// All `4^n` labels.
    pub fn all(n: usize) -> impl Iterator<Item = PauliLabel> {
        let d = 1usize << n;
        (0..d).flat_map(move |z| (0..d).map(move |x| PauliLabel { n, z, x }))
    }
}

/// Parity of the binary inner product `a · b`.
#[inline]
pub fn dot_parity(a: usize, b: usize) -> bool {
    (a & b).count_ones() & 1 == 1
}

/// `Tr(X^j Z^i rho) = sum_k (-1)^{i·k} rho_{k, k+j}` evaluated as the binary sum.
pub fn pauli_expectation<S: QubitState + ?Sized>(
    state: &S,
    label: PauliLabel,
) -> Result<Complex64> {
    if label.n != state.num_qubits() {
        return Err(MagicError::DimensionMismatch {
            expected: state.num_qubits(),
            got: label.n,
        });
    }
    Ok(pauli_sum_unchecked(state, label.z, label.x))
}

#[inline]
pub(crate) fn pauli_sum_unchecked<S: QubitState + ?Sized>(
    state: &S,
    z: usize,
    x: usize,
) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for k in 0..state.dim() {
        let term = state.element(k, k ^ x);
        if dot_parity(z, k) {
            acc -= term;
        } else {
            acc += term;
        }
    }
    acc
}

/// All stabilizer states on `n <= 2` qubits, as the orbit of `|0...0>` under
/// circuits over {H, S, CNOT}, deduplicated up to global phase.
pub fn enumerate_stabilizer_states(n: usize) -> Result<Vec<PureState>> {
    if n == 0 || n > 2 {
        return Err(MagicError::Unsupported(format!(
            "exhaustive stabilizer enumeration for n={n} (only n <= 2)"
        )));
    }
    let mut generators = Vec::new();
    for q in 1..=n {
        generators.push(Gate::H(q));
        generators.push(Gate::S(q));
    }
    if n == 2 {
        generators.push(Gate::Cnot(1, 2));
        generators.push(Gate::Cnot(2, 1));
    }
    clifford_orbit(PureState::zero(n)?, &generators)
}

/// Breadth-first closure of `start` under `generators`, up to global phase.
pub fn clifford_orbit(start: PureState, generators: &[Gate]) -> Result<Vec<PureState>> {
    let mut orbit = vec![start];
    let mut frontier = 0;
    while frontier < orbit.len() {
        let current = orbit[frontier].clone();
        frontier += 1;
        for g in generators {
            let mut next = current.clone();
            next.apply(g)?;
            if !orbit.iter().any(|s| s.equal_up_to_phase(&next)) {
                orbit.push(next);
            }
        }
    }
    Ok(orbit)
}

/// Haar-random pure state from normalized complex Gaussian amplitudes.
pub fn random_haar_state(n: usize, seed: u64) -> Result<PureState> {
    check_qubits("random state", n, MAX_QUBITS)?;
    if n == 0 {
        return Err(MagicError::NotPowerOfTwo(1));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(random_haar_with(n, &mut rng))
}

pub(crate) fn random_haar_with<R: rand::Rng>(n: usize, rng: &mut R) -> PureState {
    let amps: Vec<Complex64> = (0..1usize << n)
        .map(|_| {
            Complex64::new(
                StandardNormal.sample(&mut *rng),
                StandardNormal.sample(&mut *rng),
            )
        })
        .collect();
    PureState::from_unnormalized(amps)
}

/// Random mixture of up to `max_terms` Haar states with Dirichlet(1,...,1) weights.
pub fn random_mixed_state(n: usize, max_terms: usize, seed: u64) -> Result<DensityOperator> {
    use rand::Rng;
    check_qubits("random state", n, MAX_QUBITS)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let terms = rng.random_range(1..=max_terms.max(1));
    let states: Vec<PureState> = (0..terms).map(|_| random_haar_with(n, &mut rng)).collect();
    // Dirichlet(1, ..., 1) via normalized exponentials
    let weights: Vec<f64> = (0..terms)
        .map(|_| rand_distr::Exp1.sample(&mut rng))
        .collect();
    DensityOperator::mixture(&weights, &states)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn construction_and_validation() {
        let zero = PureState::new(vec![c(1.0, 0.0), c(0.0, 0.0)]).unwrap();
        assert_eq!(zero.n(), 1);
        let h = PureState::new(vec![
            c(FRAC_1_SQRT_2, 0.0),
            Complex64::from_polar(FRAC_1_SQRT_2, FRAC_PI_4),
        ])
        .unwrap();
        assert!(h.equal_up_to_phase(&PureState::h_state()));
        assert!(matches!(
            PureState::new(vec![c(1.0, 0.0), c(1.0, 0.0)]),
            Err(MagicError::NotNormalized { .. })
        ));
        assert!(matches!(
            PureState::new(vec![c(1.0, 0.0); 3]),
            Err(MagicError::NotPowerOfTwo(3))
        ));
        assert!(matches!(
            PureState::new(vec![c(1.0, 0.0)]),
            Err(MagicError::NotPowerOfTwo(1))
        ));
    }

    #[test]
    fn tensor_ordering() {
        let zero = PureState::zero(1).unwrap();
        let one = PureState::basis(1, 1).unwrap();
        let t = zero.tensor(&one).unwrap();
        assert_eq!(t.amps()[1], c(1.0, 0.0));
        let pp = PureState::plus(1)
            .unwrap()
            .tensor(&PureState::plus(1).unwrap())
            .unwrap();
        for a in pp.amps() {
            assert!((a - c(0.5, 0.0)).norm() < 1e-15);
        }
        let big = PureState::zero(8).unwrap();
        assert!(matches!(
            big.tensor(&PureState::zero(7).unwrap()),
            Err(MagicError::DimensionOverflow { .. })
        ));
    }

    #[test]
    fn pauli_expectation_examples() {
        let zero = PureState::zero(1).unwrap();
        let z = PauliLabel::new(1, 1, 0).unwrap();
        assert!((pauli_expectation(&zero, z).unwrap() - c(1.0, 0.0)).norm() < 1e-15);

        // <X> on |H>: 2x2 trace of X |H><H|
        let h = PureState::h_state();
        let rho = h.to_density();
        let x =
            DMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
        let oracle = (x * rho.matrix()).trace();
        let val = pauli_expectation(&h, PauliLabel::new(1, 0, 1).unwrap()).unwrap();
        assert!((val - oracle).norm() < 1e-15);
        assert!((val.re - FRAC_1_SQRT_2).abs() < 1e-15);

        let pp = PureState::plus(2).unwrap();
        let zz = PauliLabel::new(2, 0b11, 0).unwrap();
        assert!(pauli_expectation(&pp, zz).unwrap().norm() < 1e-15);

        assert!(matches!(
            pauli_expectation(&pp, PauliLabel::new(1, 1, 0).unwrap()),
            Err(MagicError::DimensionMismatch { .. })
        ));
        assert!(PauliLabel::new(2, 0b100, 0).is_err());
    }

    #[test]
    fn measurement_branches() {
        let s = FRAC_1_SQRT_2;
        let bell = PureState::new(vec![c(s, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(s, 0.0)]).unwrap();
        let [b0, b1] = bell.measure_z(1).unwrap();
        assert!((b0.probability - 0.5).abs() < 1e-12);
        assert!((b1.probability - 0.5).abs() < 1e-12);
        assert!(b0
            .post_state
            .unwrap()
            .equal_up_to_phase(&PureState::zero(1).unwrap()));
        assert!(b1
            .post_state
            .unwrap()
            .equal_up_to_phase(&PureState::basis(1, 1).unwrap()));

        let h0 = PureState::h_state()
            .tensor(&PureState::zero(1).unwrap())
            .unwrap();
        let [b0, b1] = h0.measure_z(2).unwrap();
        assert!((b0.probability - 1.0).abs() < 1e-12);
        assert!(b1.probability.abs() < 1e-12);
        assert!(b0
            .post_state
            .unwrap()
            .equal_up_to_phase(&PureState::h_state()));
        assert!(b1.post_state.is_none());

        assert!(matches!(
            h0.measure_z(3),
            Err(MagicError::QubitOutOfRange { .. })
        ));
        assert!(matches!(
            h0.measure_z(0),
            Err(MagicError::QubitOutOfRange { .. })
        ));

        let [a, b] = PureState::h_state().measure_z(1).unwrap();
        assert!(a.post_state.is_none() && b.post_state.is_none());
    }

    #[test]
    fn stabilizer_counts() {
        assert_eq!(enumerate_stabilizer_states(1).unwrap().len(), 6);
        assert_eq!(enumerate_stabilizer_states(2).unwrap().len(), 60);
        assert!(matches!(
            enumerate_stabilizer_states(3),
            Err(MagicError::Unsupported(_))
        ));
    }

    #[test]
    fn haar_determinism() {
        let a = random_haar_state(2, 0).unwrap();
        let b = random_haar_state(2, 0).unwrap();
        assert_eq!(a, b);
        assert!((random_haar_state(3, 1).unwrap().norm() - 1.0).abs() < 1e-10);
        assert_ne!(a, random_haar_state(2, 1).unwrap());
    }

    #[test]
    fn density_validation() {
        let rho = PureState::h_state().to_density();
        assert!(DensityOperator::new(rho.matrix().clone()).is_ok());
        let bad = rho.matrix() * c(2.0, 0.0);
        assert!(DensityOperator::new(bad).is_err());
        let mut nonherm = rho.matrix().clone();
        nonherm[(0, 1)] += c(0.1, 0.0);
        assert!(DensityOperator::new(nonherm).is_err());
        let neg =
            DMatrix::from_row_slice(2, 2, &[c(1.5, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-0.5, 0.0)]);
        assert!(DensityOperator::new(neg).is_err());
        let mixed = random_mixed_state(3, 4, 7).unwrap();
        assert!(DensityOperator::new(mixed.matrix().clone()).is_ok());
    }

    #[test]
    fn partial_trace_of_product() {
        let a = PureState::h_state().to_density();
        let b = DensityOperator::maximally_mixed(2).unwrap();
        let ab = a.tensor(&b).unwrap();
        let back = ab.partial_trace_last(2).unwrap();
        assert!((back.matrix() - a.matrix()).norm() < 1e-14);
    }

    #[test]
    fn text_round_trip() {
        let s = random_haar_state(3, 5).unwrap();
        let back = PureState::from_text(&s.to_text()).unwrap();
        assert_eq!(s, back);
        assert!(PureState::from_text("n=1\n1 0\n").is_err());
        assert!(PureState::from_text("m=1\n1 0\n0 0\n").is_err());
        assert!(PureState::from_text("n=1\n1 0\nx 0\n").is_err());
    }
}
