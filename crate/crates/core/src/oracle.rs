//! Slow, independent evaluations of `sum_{i,j} |Tr(X^j Z^i rho)|` used to
//! cross-check the fast paths. Single-threaded and exponential on purpose.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{check_qubits, Result};
use crate::fwht::CompensatedSum;
use crate::state::DensityOperator;

pub const MAX_RECURSIVE_QUBITS: usize = 8;
pub const MAX_DENSE_QUBITS: usize = 6;

/// Lattice coefficients `w_{l_1,m_1,...,l_n,m_n}` of the unit-cell Wigner function.
///
/// Each index runs over the quotient `{0,1}`: the full `{0..3}` range repeats
/// the same Pauli coefficients up to sign, so the complete table holds every
/// entry here `4^n` times and its normalization `(4 sqrt(pi))^{-n}` absorbs that
/// multiplicity. Summing `|w|` over this table gives `2^n D(rho)` directly.
#[derive(Debug, Clone)]
pub struct WCoefficientTable {
    n: usize,
    /// Packed as `(l_1 m_1)(l_2 m_2)...(l_n m_n)` from most to least significant.
    w: Vec<Complex64>,
}

impl WCoefficientTable {
    /// Builds the table by peeling qubits off from the last to the first.
    pub fn build(rho: &DensityOperator) -> Result<Self> {
        let n = rho.n();
        check_qubits("recursive w table", n, MAX_RECURSIVE_QUBITS)?;
        let mat = rho.matrix();
        // table[(u, v)][label]: u, v are the unprocessed prefixes (j bits each),
        // label packs (l, m) for the qubits already peeled off.
        let mut prefix_bits = n;
        let mut labels = 1usize;
        let mut table: Vec<Complex64> = {
            let d = 1usize << n;
            let mut t = Vec::with_capacity(d * d);
            for u in 0..d {
                for v in 0..d {
                    t.push(mat[(u, v)]);
                }
            }
            t
        };
        let i = Complex64::new(0.0, 1.0);
        while prefix_bits > 0 {
            let old_dim = 1usize << prefix_bits;
            let new_dim = old_dim >> 1;
            let new_labels = labels * 4;
            let at = |u: usize, v: usize, label: usize| table[(u * old_dim + v) * labels + label];
            let mut next = vec![Complex64::new(0.0, 0.0); new_dim * new_dim * new_labels];
            for up in 0..new_dim {
                for vp in 0..new_dim {
                    let (u0, u1, v0, v1) = (up << 1, (up << 1) | 1, vp << 1, (vp << 1) | 1);
                    for label in 0..labels {
                        for l in 0..2usize {
                            for m in 0..2usize {
                                let sign = if m == 1 { -1.0 } else { 1.0 };
                                let w = if l == 0 {
                                    at(u0, v0, label) + at(u1, v1, label) * sign
                                } else {
                                    // (-i)^m rho_{..0, ..1} + i^m rho_{..1, ..0}
                                    let (neg_i_m, i_m) = if m == 1 {
                                        (-i, i)
                                    } else {
                                        (Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0))
                                    };
                                    neg_i_m * at(u0, v1, label) + i_m * at(u1, v0, label)
                                };
                                let new_label = (((l << 1) | m) * labels) + label;
                                next[(up * new_dim + vp) * new_labels + new_label] = w;
                            }
                        }
                    }
                }
            }
            table = next;
            labels = new_labels;
            prefix_bits -= 1;
        }
        Ok(Self { n, w: table })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Coefficient for per-qubit indices `(l_k, m_k)` with `k = 1..=n`.
    pub fn get(&self, lm: &[(u8, u8)]) -> Option<Complex64> {
        if lm.len() != self.n {
            return None;
        }
        let idx = lm.iter().try_fold(0usize, |acc, &(l, m)| {
            (l < 2 && m < 2).then_some((acc << 2) | ((l as usize) << 1) | m as usize)
        })?;
        self.w.get(idx).copied()
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.w
    }

    pub fn abs_sum(&self) -> f64 {
        self.w
            .iter()
            .map(|w| w.norm())
            .collect::<CompensatedSum>()
            .value()
    }
}

/// `sum |w|` over the recursively built lattice coefficients.
pub fn recursive_w_sum(rho: &DensityOperator) -> Result<f64> {
    Ok(WCoefficientTable::build(rho)?.abs_sum())
}

/// `sum_{i,j} |Tr(X^j Z^i rho)|` with every Pauli built as a dense matrix.
pub fn dense_pauli_trace_sum(rho: &DensityOperator) -> Result<f64> {
    let n = rho.n();
    check_qubits("dense Pauli trace sum", n, MAX_DENSE_QUBITS)?;
    let d = 1usize << n;
    let c = |re: f64| Complex64::new(re, 0.0);
    let id = DMatrix::from_row_slice(2, 2, &[c(1.0), c(0.0), c(0.0), c(1.0)]);
    let x = DMatrix::from_row_slice(2, 2, &[c(0.0), c(1.0), c(1.0), c(0.0)]);
    let z = DMatrix::from_row_slice(2, 2, &[c(1.0), c(0.0), c(0.0), c(-1.0)]);
    let mat = rho.matrix();
    let mut acc = CompensatedSum::default();
    for zi in 0..d {
        for xj in 0..d {
            let mut p = DMatrix::from_element(1, 1, c(1.0));
            for q in 0..n {
                let bit = 1usize << (n - 1 - q);
                let xf = if xj & bit != 0 { &x } else { &id };
                let zf = if zi & bit != 0 { &z } else { &id };
                p = p.kronecker(&(xf * zf));
            }
            let tr = (&p * mat).trace();
            acc.add(tr.norm());
        }
    }
    Ok(acc.value())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::PureState;
    use std::f64::consts::SQRT_2;

    #[test]
    fn recursive_examples() {
        let zero = PureState::zero(1).unwrap().to_density();
        assert!((recursive_w_sum(&zero).unwrap() - 2.0).abs() < 1e-12);
        let h = PureState::h_state().to_density();
        assert!((recursive_w_sum(&h).unwrap() - (1.0 + SQRT_2)).abs() < 1e-12);
        let h0 = h.tensor(&zero).unwrap();
        assert!((recursive_w_sum(&h0).unwrap() - 2.0 * (1.0 + SQRT_2)).abs() < 1e-12);
        let big = DensityOperator::maximally_mixed(9).unwrap();
        assert!(recursive_w_sum(&big).is_err());
    }

    #[test]
    fn single_qubit_table_entries() {
        // w_{0,0} = Tr rho, w_{0,1} = <Z>, w_{1,0} = <X>, |w_{1,1}| = |<Y>|
        let t = WCoefficientTable::build(&PureState::zero(1).unwrap().to_density()).unwrap();
        assert!((t.get(&[(0, 0)]).unwrap() - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        assert!((t.get(&[(0, 1)]).unwrap() - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        assert!(t.get(&[(1, 0)]).unwrap().norm() < 1e-15);
        assert!(t.get(&[(2, 0)]).is_none());
        assert!(t.get(&[(0, 0), (0, 0)]).is_none());
    }

    #[test]
    fn dense_examples() {
        let mixed = DensityOperator::maximally_mixed(1).unwrap();
        assert!((dense_pauli_trace_sum(&mixed).unwrap() - 1.0).abs() < 1e-12);

        // polytope face x|X><X| + y|Y><Y| + z|Z><Z|
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let xs = PureState::from_real(&[s, s]).unwrap();
        let ys = PureState::new(vec![Complex64::new(s, 0.0), Complex64::new(0.0, s)]).unwrap();
        let zs = PureState::zero(1).unwrap();
        let face = DensityOperator::mixture(&[0.2, 0.3, 0.5], &[xs, ys, zs]).unwrap();
        assert!((dense_pauli_trace_sum(&face).unwrap() - 2.0).abs() < 1e-12);

        let h = PureState::h_state().to_density();
        assert!((dense_pauli_trace_sum(&h).unwrap() - (1.0 + SQRT_2)).abs() < 1e-12);
        assert!(dense_pauli_trace_sum(&DensityOperator::maximally_mixed(7).unwrap()).is_err());
    }
}
