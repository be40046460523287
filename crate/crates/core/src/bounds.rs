//! Resource lower bounds from additive magic measures: state conversion
//! (deterministic and probabilistic) and T-count / U-count sandwiches.

use crate::analytic::h_state_magic;
use crate::error::{MagicError, Result};
use crate::gates::{choi_state, plus_state_image, GateUnitary, DIAGONAL_TOL};
use crate::measures::{log2_cell_offset, magic};
use crate::state::PureState;

/// Slack applied before rounding up, so float noise like `4.000000001` reports 4.
pub const CEIL_SLACK: f64 = 1e-9;
/// Input magic at or below this is treated as a stabilizer input.
pub const ZERO_MAGIC: f64 = 1e-12;

pub fn ceil_with_slack(x: f64) -> u64 {
    (x - CEIL_SLACK).ceil().max(0.0) as u64
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundKind {
    Deterministic,
    Probabilistic,
    CellNegativity,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConversionBound {
    /// Minimum number of input copies (expected copies for probabilistic protocols).
    pub k_min: f64,
    pub k_min_int: u64,
    pub magic_in: f64,
    pub magic_out: f64,
    pub m: u64,
    pub p: Option<f64>,
    /// Qubits per input copy.
    pub r: Option<u64>,
    /// Qubits per output copy.
    pub s: Option<u64>,
    pub kind: BoundKind,
}

fn check_magic(magic_in: f64, magic_out: f64, m: u64) -> Result<()> {
    if !magic_in.is_finite() || !magic_out.is_finite() {
        return Err(MagicError::InvalidParameters("non-finite magic".into()));
    }
    if magic_out < 0.0 {
        return Err(MagicError::InvalidParameters(format!(
            "output magic {magic_out} is negative"
        )));
    }
    if m == 0 {
        return Err(MagicError::InvalidParameters("m must be at least 1".into()));
    }
    Ok(())
}

/// `k >= m M(phi) / M(psi)` for stabilizer protocols turning `k` copies of
/// `psi` into `m` copies of `phi`.
pub fn deterministic_bound(magic_in: f64, magic_out: f64, m: u64) -> Result<ConversionBound> {
    check_magic(magic_in, magic_out, m)?;
    if magic_in <= ZERO_MAGIC {
        return Err(MagicError::ZeroInputMagic(magic_in));
    }
    let k_min = m as f64 * magic_out / magic_in;
    Ok(ConversionBound {
        k_min,
        k_min_int: ceil_with_slack(k_min),
        magic_in,
        magic_out,
        m,
        p: None,
        r: None,
        s: None,
        kind: BoundKind::Deterministic,
    })
}

/// Expected input copies for a protocol that succeeds with probability `p`:
/// `E[n] = k/p >= m (M(phi) + log2 c(s)) / (M(psi) + log2 c(r))` with
/// `c(n) = (2/sqrt(pi))^n`, `r`/`s` the qubits per input/output copy.
pub fn probabilistic_bound(
    magic_in: f64,
    magic_out: f64,
    m: u64,
    p: f64,
    r: u64,
    s: u64,
) -> Result<ConversionBound> {
    check_magic(magic_in, magic_out, m)?;
    if !(p > 0.0 && p <= 1.0) {
        return Err(MagicError::InvalidProbability(p));
    }
    if r == 0 || s == 0 {
        return Err(MagicError::InvalidParameters(
            "r and s must be at least 1".into(),
        ));
    }
    let offset = log2_cell_offset();
    let k_min = m as f64 * (magic_out + s as f64 * offset) / (magic_in + r as f64 * offset);
    Ok(ConversionBound {
        k_min,
        k_min_int: ceil_with_slack(k_min),
        magic_in,
        magic_out,
        m,
        p: Some(p),
        r: Some(r),
        s: Some(s),
        kind: BoundKind::Probabilistic,
    })
}

/// Deterministic GKP-Magic bound against the `p = 1` cell-negativity bound.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundComparison {
    /// `M(phi)/M(psi)`, the GKP-Magic lower bound on `k/m`.
    pub gkp_ratio: f64,
    /// Explicit cell-negativity bound on `k/m`:
    /// `(M(phi) + s L)/(M(psi) + r L)` with `L = log2(2/sqrt(pi))`.
    pub cell_ratio: f64,
    /// The same cell-negativity condition solved for `k/m` with the protocol's
    /// `k` kept on the right: `(M(phi) + L (s - k r / m)) / M(psi)`.
    pub cell_ratio_at_k: f64,
    /// `k r >= m s`: the protocol does not create qubits.
    pub qubits_conserved: bool,
    /// `gkp_ratio >= cell_ratio_at_k`.
    pub gkp_tighter: bool,
}

/// Compares both `p = 1` bounds for a protocol consuming `k` copies of an
/// `r`-qubit input to make `m` copies of an `s`-qubit output.
///
/// Rearranged for a fixed protocol, the cell-negativity condition reads
/// `k/m >= M(phi)/M(psi) + L (s - k r/m) / M(psi)`, so it can only be tighter
/// than the GKP-Magic bound when the protocol outputs more qubits than it
/// consumes. The closed-form `cell_ratio` on its own is not ordered against
/// `gkp_ratio` (a low-magic many-qubit target can make it larger).
pub fn compare_bounds_p1(
    magic_in: f64,
    magic_out: f64,
    m: u64,
    k: u64,
    r: u64,
    s: u64,
) -> Result<BoundComparison> {
    let det = deterministic_bound(magic_in, magic_out, m)?;
    let prob = probabilistic_bound(magic_in, magic_out, m, 1.0, r, s)?;
    if k == 0 {
        return Err(MagicError::InvalidParameters("k must be at least 1".into()));
    }
    let gkp_ratio = det.k_min / m as f64;
    let cell_ratio = prob.k_min / m as f64;
    let offset = log2_cell_offset();
    let cell_ratio_at_k = (magic_out + offset * (s as f64 - (k * r) as f64 / m as f64)) / magic_in;
    let qubits_conserved = k * r >= m * s;
    let gkp_tighter = gkp_ratio >= cell_ratio_at_k - 1e-12;
    Ok(BoundComparison {
        gkp_ratio,
        cell_ratio,
        cell_ratio_at_k,
        qubits_conserved,
        gkp_tighter,
    })
}

/// `m_floor M(unit) <= M(target) <= (m_floor + 1) M(unit)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TCountBound {
    pub target_magic: f64,
    pub unit_magic: f64,
    pub ratio: f64,
    pub m_floor: u64,
    /// `ceil(ratio)`, the lower bound on unit-state (T-gate) count.
    pub reported: u64,
}

impl TCountBound {
    pub fn from_magic(target_magic: f64, unit_magic: f64) -> Result<Self> {
        if unit_magic <= ZERO_MAGIC {
            return Err(MagicError::ZeroInputMagic(unit_magic));
        }
        if !target_magic.is_finite() || target_magic < -1e-9 {
            return Err(MagicError::InvalidParameters(format!(
                "target magic {target_magic}"
            )));
        }
        let ratio = target_magic.max(0.0) / unit_magic;
        Ok(Self {
            target_magic,
            unit_magic,
            ratio,
            m_floor: ratio.floor() as u64,
            reported: ceil_with_slack(ratio),
        })
    }

    /// Formats as `reported (ratio)`, e.g. `4 (3.340)` for the Toffoli gate.
    pub fn summary(&self) -> String {
        format!("{} ({:.3})", self.reported, self.ratio)
    }
}

/// How a gate is turned into a resource state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GateRoute {
    /// Plus-state image for diagonal gates, Choi state otherwise.
    Auto,
    PlusState,
    Choi,
}

pub enum TCountTarget<'a> {
    State(&'a PureState),
    Gate(&'a GateUnitary, GateRoute),
}

/// Resource state used for a gate. The Choi route gives a looser bound for
/// gates outside the diagonal third-level family.
pub fn gate_resource_state(u: &GateUnitary, route: GateRoute) -> Result<(PureState, GateRoute)> {
    let route = match route {
        GateRoute::Auto if u.max_off_diagonal() < DIAGONAL_TOL => GateRoute::PlusState,
        GateRoute::Auto => GateRoute::Choi,
        r => r,
    };
    let state = match route {
        GateRoute::PlusState => plus_state_image(u)?,
        _ => choi_state(u)?,
    };
    Ok((state, route))
}

/// T-count lower bound with `|H>` as the unit resource.
pub fn t_count_bound(target: TCountTarget<'_>) -> Result<TCountBound> {
    let target_magic = match target {
        TCountTarget::State(psi) => magic(psi),
        TCountTarget::Gate(u, route) => magic(&gate_resource_state(u, route)?.0),
    };
    TCountBound::from_magic(target_magic, h_state_magic())
}
