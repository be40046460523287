//! Gates, circuits and dense unitaries.
//!
//! Circuits act on states through in-place bit-indexed kernels; dense
//! [`GateUnitary`] matrices are only built where a construction needs them
//! (Choi states, permutation gates, composites).

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{check_qubits, MagicError, Result, MAX_QUBITS};
use crate::state::{qubit_mask, PureState};

/// Largest register a dense unitary may act on (4096 x 4096 entries).
pub const MAX_UNITARY_QUBITS: usize = 12;
/// Largest gate whose Choi state (twice as many qubits) stays within the dense cap.
pub const MAX_CHOI_QUBITS: usize = 6;
pub const UNITARY_TOL: f64 = 1e-10;
/// Off-diagonal magnitude below which a unitary counts as diagonal.
pub const DIAGONAL_TOL: f64 = 1e-12;

/// One circuit operation. Qubits are 1-based; multi-qubit controlled gates list
/// their controls first and the target last.
#[derive(Debug, Clone, PartialEq)]
pub enum Gate {
    H(usize),
    S(usize),
    Sdg(usize),
    T(usize),
    Tdg(usize),
    X(usize),
    Y(usize),
    Z(usize),
    Cnot(usize, usize),
    Cz(usize, usize),
    Swap(usize, usize),
    /// `diag(1, ..., 1, e^{i phi})` on the listed qubits.
    MPhase {
        phi: f64,
        qubits: Vec<usize>,
    },
    CnX(Vec<usize>),
    CnZ(Vec<usize>),
    CnS(Vec<usize>),
}

/// Wraps an angle into `(-pi, pi]`.
pub fn wrap_angle(phi: f64) -> f64 {
    let mut a = phi.rem_euclid(2.0 * PI);
    if a > PI {
        a -= 2.0 * PI;
    }
    a
}

impl Gate {
    pub fn qubits(&self) -> Vec<usize> {
        use Gate::*;
        match self {
            H(q) | S(q) | Sdg(q) | T(q) | Tdg(q) | X(q) | Y(q) | Z(q) => vec![*q],
            Cnot(a, b) | Cz(a, b) | Swap(a, b) => vec![*a, *b],
            MPhase { qubits, .. } => qubits.clone(),
            CnX(qs) | CnZ(qs) | CnS(qs) => qs.clone(),
        }
    }

    pub fn name(&self) -> &'static str {
        use Gate::*;
        match self {
            H(_) => "H",
            S(_) => "S",
            Sdg(_) => "SDG",
            T(_) => "T",
            Tdg(_) => "TDG",
            X(_) => "X",
            Y(_) => "Y",
            Z(_) => "Z",
            Cnot(..) => "CNOT",
            Cz(..) => "CZ",
            Swap(..) => "SWAP",
            MPhase { .. } => "MPHASE",
            CnX(_) => "CNX",
            CnZ(_) => "CNZ",
            CnS(_) => "CNS",
        }
    }

    pub fn angle(&self) -> Option<f64> {
        match self {
            Gate::MPhase { phi, .. } => Some(*phi),
            _ => None,
        }
    }

    fn validate(&self, n: usize) -> Result<()> {
        let qs = self.qubits();
        if qs.is_empty() {
            return Err(MagicError::Parse(format!(
                "{} needs at least one qubit",
                self.name()
            )));
        }
        for (k, &q) in qs.iter().enumerate() {
            if q == 0 || q > n {
                return Err(MagicError::QubitOutOfRange { qubit: q, n });
            }
            if qs[..k].contains(&q) {
                return Err(MagicError::Parse(format!(
                    "{} repeats qubit {q}",
                    self.name()
                )));
            }
        }
        if let Gate::MPhase { phi, .. } = self {
            if !(phi.is_finite() && *phi > -PI && *phi <= PI) {
                return Err(MagicError::Parse(format!(
                    "MPHASE angle {phi} outside (-pi, pi]"
                )));
            }
        }
        Ok(())
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())?;
        if let Some(phi) = self.angle() {
            write!(f, " {phi}")?;
        }
        for q in self.qubits() {
            write!(f, " {q}")?;
        }
        Ok(())
    }
}

fn apply_1q(amps: &mut [Complex64], mask: usize, m: [[Complex64; 2]; 2]) {
    for i in 0..amps.len() {
        if i & mask == 0 {
            let a0 = amps[i];
            let a1 = amps[i | mask];
            amps[i] = m[0][0] * a0 + m[0][1] * a1;
            amps[i | mask] = m[1][0] * a0 + m[1][1] * a1;
        }
    }
}

fn apply_controlled_phase(amps: &mut [Complex64], mask: usize, phase: Complex64) {
    for (i, a) in amps.iter_mut().enumerate() {
        if i & mask == mask {
            *a *= phase;
        }
    }
}

fn apply_controlled_x(amps: &mut [Complex64], controls: usize, target: usize) {
    for i in 0..amps.len() {
        if i & target == 0 && i & controls == controls {
            amps.swap(i, i | target);
        }
    }
}

fn mask_of(n: usize, qubits: &[usize]) -> usize {
    qubits.iter().fold(0, |m, &q| m | qubit_mask(n, q))
}

/// Applies one gate in place.
pub fn apply_gate(state: &mut PureState, gate: &Gate) -> Result<()> {
    let n = state.n();
    gate.validate(n)?;
    let amps = state.amps_mut();
    let c = |re: f64, im: f64| Complex64::new(re, im);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    match gate {
        Gate::H(q) => apply_1q(
            amps,
            qubit_mask(n, *q),
            [[c(s, 0.0), c(s, 0.0)], [c(s, 0.0), c(-s, 0.0)]],
        ),
        Gate::X(q) => apply_controlled_x(amps, 0, qubit_mask(n, *q)),
        Gate::Y(q) => apply_1q(
            amps,
            qubit_mask(n, *q),
            [[c(0.0, 0.0), c(0.0, -1.0)], [c(0.0, 1.0), c(0.0, 0.0)]],
        ),
        Gate::Z(q) => apply_controlled_phase(amps, qubit_mask(n, *q), c(-1.0, 0.0)),
        Gate::S(q) => apply_controlled_phase(amps, qubit_mask(n, *q), c(0.0, 1.0)),
        Gate::Sdg(q) => apply_controlled_phase(amps, qubit_mask(n, *q), c(0.0, -1.0)),
        Gate::T(q) => apply_controlled_phase(
            amps,
            qubit_mask(n, *q),
            Complex64::from_polar(1.0, FRAC_PI_4),
        ),
        Gate::Tdg(q) => apply_controlled_phase(
            amps,
            qubit_mask(n, *q),
            Complex64::from_polar(1.0, -FRAC_PI_4),
        ),
        Gate::Cnot(a, b) => apply_controlled_x(amps, qubit_mask(n, *a), qubit_mask(n, *b)),
        Gate::Cz(a, b) => apply_controlled_phase(amps, mask_of(n, &[*a, *b]), c(-1.0, 0.0)),
        Gate::Swap(a, b) => {
            let (ma, mb) = (qubit_mask(n, *a), qubit_mask(n, *b));
            for i in 0..amps.len() {
                if i & ma != 0 && i & mb == 0 {
                    amps.swap(i, (i & !ma) | mb);
                }
            }
        }
        Gate::MPhase { phi, qubits } => {
            apply_controlled_phase(amps, mask_of(n, qubits), Complex64::from_polar(1.0, *phi))
        }
        Gate::CnX(qs) => {
            let (target, controls) = qs.split_last().expect("validated non-empty");
            apply_controlled_x(amps, mask_of(n, controls), qubit_mask(n, *target))
        }
        Gate::CnZ(qs) => apply_controlled_phase(amps, mask_of(n, qs), c(-1.0, 0.0)),
        Gate::CnS(qs) => apply_controlled_phase(amps, mask_of(n, qs), c(0.0, 1.0)),
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    n: usize,
    ops: Vec<Gate>,
}

impl Circuit {
    pub fn new(n: usize) -> Result<Self> {
        check_qubits("circuit", n, MAX_QUBITS)?;
        if n == 0 {
            return Err(MagicError::Parse("circuit needs at least one qubit".into()));
        }
        Ok(Self { n, ops: Vec::new() })
    }

    pub fn from_gates(n: usize, gates: impl IntoIterator<Item = Gate>) -> Result<Self> {
        let mut c = Self::new(n)?;
        for g in gates {
            c.push(g)?;
        }
        Ok(c)
    }

    pub fn push(&mut self, gate: Gate) -> Result<()> {
        gate.validate(self.n)?;
        self.ops.push(gate);
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn ops(&self) -> &[Gate] {
        &self.ops
    }

    /// Applies the gates in order to `state`.
    pub fn apply(&self, state: &mut PureState) -> Result<()> {
        if state.n() != self.n {
            return Err(MagicError::DimensionMismatch {
                expected: self.n,
                got: state.n(),
            });
        }
        for g in &self.ops {
            apply_gate(state, g)?;
        }
        Ok(())
    }

    pub fn run_from_zero(&self) -> Result<PureState> {
        let mut s = PureState::zero(self.n)?;
        self.apply(&mut s)?;
        Ok(s)
    }

    pub fn run_from_plus(&self) -> Result<PureState> {
        let mut s = PureState::plus(self.n)?;
        self.apply(&mut s)?;
        Ok(s)
    }

    /// Dense matrix of the whole circuit, built column by column.
    pub fn unitary(&self) -> Result<GateUnitary> {
        check_qubits("dense unitary", self.n, MAX_UNITARY_QUBITS)?;
        let d = 1usize << self.n;
        let mut mat = DMatrix::zeros(d, d);
        for col in 0..d {
            let mut s = PureState::basis(self.n, col)?;
            self.apply(&mut s)?;
            mat.set_column(col, &nalgebra::DVector::from_column_slice(s.amps()));
        }
        Ok(GateUnitary { n: self.n, mat })
    }

    /// Parses `H 1; T 1; CNOT 1 2; MPHASE 0.785398 1 2 3`, inferring the
    /// register size from the largest qubit index.
    pub fn parse(text: &str) -> Result<Self> {
        let gates = parse_gates(text)?;
        let n = gates
            .iter()
            .flat_map(|g| g.qubits())
            .max()
            .ok_or_else(|| MagicError::Parse("empty circuit".into()))?;
        Self::from_gates(n, gates)
    }

    /// Parses with an explicit register size, which must cover every index used.
    pub fn parse_with_n(text: &str, n: usize) -> Result<Self> {
        Self::from_gates(n, parse_gates(text)?)
    }
}

impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, g) in self.ops.iter().enumerate() {
            if k > 0 {
                write!(f, "; ")?;
            }
            write!(f, "{g}")?;
        }
        Ok(())
    }
}

fn parse_gates(text: &str) -> Result<Vec<Gate>> {
    let mut gates = Vec::new();
    for raw in text.split(';') {
        let mut tokens = raw.split_whitespace();
        let Some(name) = tokens.next() else { continue };
        let name = name.to_ascii_uppercase();
        let args: Vec<&str> = tokens.collect();
        let qubit = |s: &str| -> Result<usize> {
            s.parse::<usize>().map_err(|_| {
                MagicError::Parse(format!("bad qubit index `{s}` in `{}`", raw.trim()))
            })
        };
        let qubits = |xs: &[&str]| -> Result<Vec<usize>> { xs.iter().map(|s| qubit(s)).collect() };
        let arity = |k: usize| -> Result<Vec<usize>> {
            if args.len() != k {
                return Err(MagicError::Parse(format!(
                    "{name} takes {k} qubit(s), got `{}`",
                    raw.trim()
                )));
            }
            qubits(&args)
        };
        let gate = match name.as_str() {
            "H" => Gate::H(arity(1)?[0]),
            "S" => Gate::S(arity(1)?[0]),
            "SDG" => Gate::Sdg(arity(1)?[0]),
            "T" => Gate::T(arity(1)?[0]),
            "TDG" => Gate::Tdg(arity(1)?[0]),
            "X" => Gate::X(arity(1)?[0]),
            "Y" => Gate::Y(arity(1)?[0]),
            "Z" => Gate::Z(arity(1)?[0]),
            "CNOT" | "CX" => {
                let q = arity(2)?;
                Gate::Cnot(q[0], q[1])
            }
            "CZ" => {
                let q = arity(2)?;
                Gate::Cz(q[0], q[1])
            }
            "SWAP" => {
                let q = arity(2)?;
                Gate::Swap(q[0], q[1])
            }
            "CS" => Gate::CnS(arity(2)?),
            "CCX" | "TOFFOLI" => Gate::CnX(arity(3)?),
            "CCZ" => Gate::CnZ(arity(3)?),
            "MPHASE" => {
                let (angle, rest) = args
                    .split_first()
                    .ok_or_else(|| MagicError::Parse("MPHASE needs an angle".into()))?;
                let phi: f64 = angle
                    .parse()
                    .map_err(|_| MagicError::Parse(format!("bad angle `{angle}`")))?;
                if !phi.is_finite() {
                    return Err(MagicError::Parse(format!("bad angle `{angle}`")));
                }
                Gate::MPhase {
                    phi: wrap_angle(phi),
                    qubits: qubits(rest)?,
                }
            }
            "CNX" => Gate::CnX(qubits(&args)?),
            "CNZ" => Gate::CnZ(qubits(&args)?),
            "CNS" => Gate::CnS(qubits(&args)?),
            other => return Err(MagicError::Parse(format!("unknown gate `{other}`"))),
        };
        gates.push(gate);
    }
    Ok(gates)
}

/// Dense unitary on `n` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct GateUnitary {
    n: usize,
    mat: DMatrix<Complex64>,
}

impl GateUnitary {
    pub fn from_matrix(mat: DMatrix<Complex64>) -> Result<Self> {
        let d = mat.nrows();
        if d != mat.ncols() || d < 2 || !d.is_power_of_two() {
            return Err(MagicError::NotPowerOfTwo(d));
        }
        let n = d.trailing_zeros() as usize;
        check_qubits("dense unitary", n, MAX_UNITARY_QUBITS)?;
        let u = Self { n, mat };
        let err = u.unitarity_error();
        if err > UNITARY_TOL {
            return Err(MagicError::Unsupported(format!(
                "matrix is not unitary (max |U^dag U - I| = {err:e})"
            )));
        }
        Ok(u)
    }

    /// Builds the permutation `|x> -> |f(x)>`; `f` must be a bijection.
    pub fn from_permutation(n: usize, f: impl Fn(usize) -> usize) -> Result<Self> {
        check_qubits("dense unitary", n, MAX_UNITARY_QUBITS)?;
        let d = 1usize << n;
        let mut mat = DMatrix::zeros(d, d);
        let mut seen = vec![false; d];
        for x in 0..d {
            let y = f(x);
            if y >= d || seen[y] {
                return Err(MagicError::Unsupported("map is not a permutation".into()));
            }
            seen[y] = true;
            mat[(y, x)] = Complex64::new(1.0, 0.0);
        }
        Ok(Self { n, mat })
    }

    pub fn diagonal(n: usize, phases: impl Fn(usize) -> Complex64) -> Result<Self> {
        check_qubits("dense unitary", n, MAX_UNITARY_QUBITS)?;
        let d = 1usize << n;
        let mut mat = DMatrix::zeros(d, d);
        for x in 0..d {
            mat[(x, x)] = phases(x);
        }
        Ok(Self { n, mat })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.mat
    }

    pub fn unitarity_error(&self) -> f64 {
        let prod = self.mat.adjoint() * &self.mat;
        let d = self.mat.nrows();
        let mut worst: f64 = 0.0;
        for i in 0..d {
            for j in 0..d {
                let expect = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((prod[(i, j)] - Complex64::new(expect, 0.0)).norm());
            }
        }
        worst
    }

    pub fn max_off_diagonal(&self) -> f64 {
        let d = self.mat.nrows();
        let mut worst: f64 = 0.0;
        for i in 0..d {
            for j in 0..d {
                if i != j {
                    worst = worst.max(self.mat[(i, j)].norm());
                }
            }
        }
        worst
    }

    pub fn is_diagonal(&self) -> bool {
        self.max_off_diagonal() < DIAGONAL_TOL
    }

    /// `other · self`: apply `self` first, then `other`.
    pub fn then(&self, other: &GateUnitary) -> Result<GateUnitary> {
        if self.n != other.n {
            return Err(MagicError::DimensionMismatch {
                expected: self.n,
                got: other.n,
            });
        }
        Ok(GateUnitary {
            n: self.n,
            mat: &other.mat * &self.mat,
        })
    }

    pub fn tensor(&self, other: &GateUnitary) -> Result<GateUnitary> {
        let n = self.n + other.n;
        check_qubits("dense unitary", n, MAX_UNITARY_QUBITS)?;
        Ok(GateUnitary {
            n,
            mat: self.mat.kronecker(&other.mat),
        })
    }

    pub fn adjoint(&self) -> GateUnitary {
        GateUnitary {
            n: self.n,
            mat: self.mat.adjoint(),
        }
    }

    pub fn apply_to(&self, state: &PureState) -> Result<PureState> {
        if state.n() != self.n {
            return Err(MagicError::DimensionMismatch {
                expected: self.n,
                got: state.n(),
            });
        }
        let v = &self.mat * nalgebra::DVector::from_column_slice(state.amps());
        Ok(PureState::from_unnormalized(v.iter().cloned().collect()))
    }
}

/// `M_phi = diag(1, ..., 1, e^{i phi})` on `n` qubits.
pub fn mphase(n: usize, phi: f64) -> Result<GateUnitary> {
    if n == 0 {
        return Err(MagicError::NotPowerOfTwo(1));
    }
    let last = (1usize << n) - 1;
    GateUnitary::diagonal(n, |x| {
        if x == last {
            Complex64::from_polar(1.0, phi)
        } else {
            Complex64::new(1.0, 0.0)
        }
    })
}

/// Resource state `U |+>^{⊗n}` of a diagonal gate.
pub fn plus_state_image(u: &GateUnitary) -> Result<PureState> {
    let off = u.max_off_diagonal();
    if off >= DIAGONAL_TOL {
        return Err(MagicError::NonDiagonalGate(off));
    }
    let s = (0.5f64).powf(u.n as f64 / 2.0);
    Ok(PureState::from_unnormalized(
        (0..1usize << u.n).map(|x| u.mat[(x, x)] * s).collect(),
    ))
}

/// Choi state `(U ⊗ 1) 2^{-n/2} sum_j |j, j>`; `U` acts on the first register.
pub fn choi_state(u: &GateUnitary) -> Result<PureState> {
    check_qubits("Choi state", u.n, MAX_CHOI_QUBITS)?;
    let d = 1usize << u.n;
    let s = 1.0 / (d as f64).sqrt();
    let mut amps = Vec::with_capacity(d * d);
    for a in 0..d {
        for b in 0..d {
            amps.push(u.mat[(a, b)] * s);
        }
    }
    Ok(PureState::from_unnormalized(amps))
}

/// `C^{n-1}X` with the last qubit as target.
pub fn cnx(n: usize) -> Result<GateUnitary> {
    if n == 0 {
        return Err(MagicError::NotPowerOfTwo(1));
    }
    let controls = ((1usize << n) - 1) & !1;
    GateUnitary::from_permutation(n, |x| if x & controls == controls { x ^ 1 } else { x })
}

pub fn toffoli() -> GateUnitary {
    cnx(3).expect("3 qubits is within the cap")
}

/// Controlled-SWAP with qubit 1 as control.
pub fn fredkin() -> GateUnitary {
    GateUnitary::from_permutation(3, |x| {
        if x & 0b100 != 0 {
            (x & 0b100) | ((x & 0b01) << 1) | ((x & 0b10) >> 1)
        } else {
            x
        }
    })
    .expect("3 qubits is within the cap")
}

/// Modular adder `|i>|j> -> |i>|i + j mod 2^n>` on two `n`-qubit registers.
pub fn adder_unitary(n: usize) -> Result<GateUnitary> {
    if n == 0 {
        return Err(MagicError::NotPowerOfTwo(1));
    }
    check_qubits("adder", 2 * n, MAX_UNITARY_QUBITS)?;
    let mask = (1usize << n) - 1;
    GateUnitary::from_permutation(2 * n, |x| {
        let i = x >> n;
        let j = x & mask;
        (i << n) | ((i + j) & mask)
    })
}

/// `⊗_{k=1}^n (|0> + e^{i 2 pi a / 2^k}|1>)/sqrt(2)`, factor `k` on qubit `k`.
pub fn qft_state(n: usize, a: i64) -> Result<PureState> {
    check_qubits("QFT state", n, MAX_QUBITS)?;
    if n == 0 {
        return Err(MagicError::NotPowerOfTwo(1));
    }
    let mut state = qft_factor(1, a);
    for k in 2..=n {
        state = state.tensor(&qft_factor(k, a))?;
    }
    Ok(state)
}

fn qft_factor(k: usize, a: i64) -> PureState {
    // reduce a mod 2^k first so the angle stays accurate for large |a|
    let modulus = 1i128 << k.min(100);
    let r = (a as i128).rem_euclid(modulus) as f64;
    PureState::phase_plus(2.0 * PI * r / modulus as f64)
}

/// `U_1 = (CCX ⊗ 1)(1 ⊗ CCX)` and `U_2 = (CCX ⊗ 1)(1 ⊗ CCX)(CCX ⊗ 1)` on four
/// qubits, with the Toffolis on qubits (1,2,3) and (2,3,4), targets last.
pub fn composite_u1_u2() -> (GateUnitary, GateUnitary) {
    let first = Gate::CnX(vec![1, 2, 3]);
    let second = Gate::CnX(vec![2, 3, 4]);
    let u1 = Circuit::from_gates(4, [second.clone(), first.clone()])
        .and_then(|c| c.unitary())
        .expect("fixed 4-qubit circuit");
    let u2 = Circuit::from_gates(4, [first.clone(), second, first])
        .and_then(|c| c.unitary())
        .expect("fixed 4-qubit circuit");
    (u1, u2)
}

/// Random depth-`20 n` circuit over {H, S, CNOT}.
pub fn random_clifford(n: usize, seed: u64) -> Result<Circuit> {
    check_qubits("random Clifford", n, MAX_UNITARY_QUBITS)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_clifford_with(n, 20 * n, &mut rng)
}

pub(crate) fn random_clifford_with<R: Rng>(n: usize, depth: usize, rng: &mut R) -> Result<Circuit> {
    let mut c = Circuit::new(n)?;
    let kinds = if n >= 2 { 3 } else { 2 };
    for _ in 0..depth {
        let q = rng.random_range(1..=n);
        let gate = match rng.random_range(0..kinds) {
            0 => Gate::H(q),
            1 => Gate::S(q),
            _ => {
                let mut t = rng.random_range(1..n);
                if t >= q {
                    t += 1;
                }
                Gate::Cnot(q, t)
            }
        };
        c.push(gate)?;
    }
    Ok(c)
}

/// Named gates accepted by the command line: `t`, `s`, `h`, `cnot`, `cz`,
/// `toffoli`, `fredkin`, `ccz`, `cs`, `cnx:N`, `cnz:N`, `cns:N`,
/// `mphase:N:PHI`, `u1`, `u2`, `adder:N`.
pub fn named_gate(spec: &str) -> Result<GateUnitary> {
    let lower = spec.trim().to_ascii_lowercase();
    let mut parts = lower.split(':');
    let name = parts.next().unwrap_or_default();
    let args: Vec<&str> = parts.collect();
    let int_arg = |k: usize| -> Result<usize> {
        args.get(k)
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| MagicError::Parse(format!("gate `{spec}` needs an integer argument")))
    };
    let single = |m: [Complex64; 4]| GateUnitary::from_matrix(DMatrix::from_row_slice(2, 2, &m));
    let c = |re: f64, im: f64| Complex64::new(re, im);
    match name {
        "t" => mphase(1, FRAC_PI_4),
        "s" => mphase(1, FRAC_PI_2),
        "z" => mphase(1, PI),
        "h" => {
            let s = std::f64::consts::FRAC_1_SQRT_2;
            single([c(s, 0.0), c(s, 0.0), c(s, 0.0), c(-s, 0.0)])
        }
        "x" => cnx(1),
        "cnot" | "cx" => cnx(2),
        "cz" => mphase(2, PI),
        "cs" => mphase(2, FRAC_PI_2),
        "ccz" => mphase(3, PI),
        "toffoli" | "ccx" => Ok(toffoli()),
        "fredkin" | "cswap" => Ok(fredkin()),
        "u1" => Ok(composite_u1_u2().0),
        "u2" => Ok(composite_u1_u2().1),
        "cnx" => cnx(int_arg(0)?),
        "cnz" => mphase(int_arg(0)?, PI),
        "cns" => mphase(int_arg(0)?, FRAC_PI_2),
        "cnt" => mphase(int_arg(0)?, FRAC_PI_4),
        "adder" => adder_unitary(int_arg(0)?),
        "mphase" => {
            let phi: f64 = args
                .get(1)
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| MagicError::Parse(format!("gate `{spec}` needs mphase:N:PHI")))?;
            mphase(int_arg(0)?, phi)
        }
        _ => Err(MagicError::Parse(format!("unknown gate name `{spec}`"))),
    }
}
