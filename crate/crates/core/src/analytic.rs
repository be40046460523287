//! Closed-form GKP-Magic values for the |H> state, multiply-controlled phase
//! states `M_phi |+>^{⊗n}` and inverse-QFT product states.

use std::f64::consts::{PI, SQRT_2};

use crate::error::{check_qubits, MagicError, Result};
use crate::gates::wrap_angle;
use crate::measures::log2_cell_offset;

/// Largest `n` for which the case multiplicities (about `4^n`) stay finite in `f64`.
pub const MAX_ANALYTIC_QUBITS: usize = 500;

/// `log2((1 + sqrt 2)/2)`, the magic of one |H> state.
pub fn h_state_magic() -> f64 {
    ((1.0 + SQRT_2) / 2.0).log2()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MPhiCase {
    /// `i = 0, j = 0`
    Identity,
    /// `i = 0, j != 0`
    PureZ,
    /// `i != 0, j = 0`
    PureX,
    /// `i, j != 0` with `i·j` even
    MixedEven,
    /// `i, j != 0` with `i·j` odd
    MixedOdd,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MPhiCaseTerm {
    pub case: MPhiCase,
    /// `|<M_phi| X^i Z^j |M_phi>|` for every label in this case.
    pub magnitude: f64,
    /// Number of labels in the case, as a float since it grows like `4^n`.
    pub count: f64,
}

/// Pauli-spectrum case table of `|M_phi> = M_phi |+>^{⊗n}`.
#[derive(Debug, Clone, PartialEq)]
pub struct MPhiCaseBreakdown {
    pub n: usize,
    pub phi: f64,
    pub terms: [MPhiCaseTerm; 5],
}

impl MPhiCaseBreakdown {
    pub fn new(n: usize, phi: f64) -> Result<Self> {
        if n == 0 {
            return Err(MagicError::NotPowerOfTwo(1));
        }
        check_qubits("analytic M_phi", n, MAX_ANALYTIC_QUBITS)?;
        let inv = (0.5f64).powi(n as i32);
        let pow_n = 2f64.powi(n as i32);
        let pow_n1 = 2f64.powi(n as i32 - 1);
        let pow_2n1 = 2f64.powi(2 * n as i32 - 1);
        let (s, c) = phi.sin_cos();
        // 1 + 2^{-n}[(e^{i phi} - 1) + (e^{-i phi} - 1)] = 1 + 2^{-n}(2 cos phi - 2)
        let pure_x = (1.0 + inv * (2.0 * c - 2.0)).abs();
        let term = |case, magnitude, count| MPhiCaseTerm {
            case,
            magnitude,
            count,
        };
        Ok(Self {
            n,
            phi,
            terms: [
                term(MPhiCase::Identity, 1.0, 1.0),
                term(MPhiCase::PureZ, 0.0, pow_n - 1.0),
                term(MPhiCase::PureX, pure_x, pow_n - 1.0),
                term(
                    MPhiCase::MixedEven,
                    inv * (2.0 * c - 2.0).abs(),
                    1.0 - 3.0 * pow_n1 + pow_2n1,
                ),
                term(MPhiCase::MixedOdd, inv * (2.0 * s).abs(), pow_2n1 - pow_n1),
            ],
        })
    }

    pub fn total_count(&self) -> f64 {
        self.terms.iter().map(|t| t.count).sum()
    }

    /// st-norm `D = 2^{-n} sum count * magnitude`.
    pub fn st_norm(&self) -> f64 {
        let inv = (0.5f64).powi(self.n as i32);
        self.terms.iter().map(|t| t.count * inv * t.magnitude).sum()
    }
}

/// GKP-Magic of `M_phi |+>^{⊗n}` from the case table.
pub fn mphi_magic(n: usize, phi: f64) -> Result<(f64, MPhiCaseBreakdown)> {
    let table = MPhiCaseBreakdown::new(n, phi)?;
    Ok((table.st_norm().log2(), table))
}

/// Large-`n` limit of [`mphi_magic`]. Only the leading terms of each case
/// survive: `D -> 1 + (1 - cos phi) + |sin phi|`.
pub fn mphi_asymptote(phi: f64) -> Result<f64> {
    let wrapped = wrap_angle(phi);
    if wrapped.abs() < 1e-12 {
        return Err(MagicError::DegenerateAngle(phi));
    }
    let (s, c) = wrapped.sin_cos();
    Ok((2.0 - c + s.abs()).log2())
}

/// GKP-Magic of `|QFT^{-1}_n>`:
/// `sum_k log2((1 + |sin(2 pi/2^k)| + |cos(2 pi/2^k)|)/sqrt(pi)) - n log2(2/sqrt(pi))`.
pub fn qft_inv_magic(n: usize) -> f64 {
    let per_cell: f64 = (1..=n)
        .map(|k| {
            let angle = 2.0 * PI * (0.5f64).powi(k as i32);
            ((1.0 + angle.sin().abs() + angle.cos().abs()) / PI.sqrt()).log2()
        })
        .sum();
    per_cell - n as f64 * log2_cell_offset()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    #[test]
    fn h_magic_constant() {
        assert!((h_state_magic() - 0.271553).abs() < 1e-6);
    }

    #[test]
    fn table_values() {
        // brute-force Pauli sums over the full 4^n spectrum
        let cases = [
            (3, PI, 0.9068905956085185),
            (4, PI, 1.2667865406949013),
            (5, PI, 1.4304525516655313),
            (3, FRAC_PI_2, 1.2094533656289497),
            (4, FRAC_PI_2, 1.4008794362821844),
            (5, FRAC_PI_2, 1.4938554492408225),
        ];
        for (n, phi, expect) in cases {
            assert!(
                (mphi_magic(n, phi).unwrap().0 - expect).abs() < 1e-12,
                "n={n}"
            );
        }
    }

    #[test]
    fn counts_sum_to_four_pow_n() {
        for n in 1..=20 {
            let t = MPhiCaseBreakdown::new(n, 0.3).unwrap();
            assert_eq!(t.total_count(), 4f64.powi(n as i32));
        }
    }

    #[test]
    fn identity_angle_has_no_magic() {
        for n in 1..=30 {
            assert!(mphi_magic(n, 0.0).unwrap().0.abs() < 1e-12);
        }
        assert!(matches!(
            mphi_asymptote(0.0),
            Err(MagicError::DegenerateAngle(_))
        ));
        assert!(matches!(
            mphi_asymptote(2.0 * PI),
            Err(MagicError::DegenerateAngle(_))
        ));
    }

    #[test]
    fn asymptote_matches_large_n() {
        for phi in [PI, FRAC_PI_2, FRAC_PI_4, 0.3] {
            let limit = mphi_asymptote(phi).unwrap();
            let at30 = mphi_magic(30, phi).unwrap().0;
            assert!((limit - at30).abs() < 1e-8, "phi={phi}");
            assert!((limit - mphi_magic(20, phi).unwrap().0).abs() < 1e-4);
        }
        // pi and pi/2 share the limit log2(3); pi/4 converges to 1
        assert!((mphi_asymptote(PI).unwrap() - 3f64.log2()).abs() < 1e-12);
        assert!(mphi_asymptote(FRAC_PI_4).unwrap() < mphi_asymptote(PI).unwrap());
    }

    #[test]
    fn convergence_decays() {
        let step = |n| mphi_magic(n, PI).unwrap().0 - mphi_magic(n - 1, PI).unwrap().0;
        assert!(step(12).abs() < step(5).abs());
    }

    #[test]
    fn qft_small_cases() {
        assert!(qft_inv_magic(1).abs() < 1e-12);
        assert!(qft_inv_magic(2).abs() < 1e-12);
        assert!((qft_inv_magic(3) - h_state_magic()).abs() < 1e-12);
    }

    #[test]
    fn qft_bounded_and_converging() {
        let mut prev_step = f64::INFINITY;
        for n in 1..=64 {
            assert!(qft_inv_magic(n) <= n as f64 * h_state_magic() + 1e-12);
            if n >= 4 {
                let step = qft_inv_magic(n) - qft_inv_magic(n - 1);
                assert!(step >= -1e-12 && step <= prev_step + 1e-12, "n={n}");
                prev_step = step;
            }
        }
    }
}
