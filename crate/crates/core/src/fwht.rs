//! Walsh–Hadamard butterfly and the summation helpers the transform paths share.

use num_complex::Complex64;

/// In-place unnormalized Walsh–Hadamard transform:
/// `out_i = sum_k (-1)^{i·k} in_k`. `data.len()` must be a power of two.
pub fn fwht_in_place(data: &mut [Complex64]) {
    let len = data.len();
    debug_assert!(len.is_power_of_two());
    let mut half = 1;
    while half < len {
        for block in data.chunks_exact_mut(2 * half) {
            let (lo, hi) = block.split_at_mut(half);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = x + y;
                *b = x - y;
            }
        }
        half <<= 1;
    }
}

/// Neumaier-compensated running sum.
#[derive(Debug, Default, Clone, Copy)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = CompensatedSum::default();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

/// Pairwise (balanced tree) sum. The association order depends only on the
/// slice length, so results are bit-identical however the terms were produced.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    match xs.len() {
        0 => 0.0,
        1 => xs[0],
        len => {
            let (a, b) = xs.split_at(len / 2);
            pairwise_sum(a) + pairwise_sum(b)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::dot_parity;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn naive(data: &[Complex64]) -> Vec<Complex64> {
        (0..data.len())
            .map(|i| {
                data.iter()
                    .enumerate()
                    .map(|(k, a)| if dot_parity(i, k) { -a } else { *a })
                    .sum()
            })
            .collect()
    }

    #[test]
    fn matches_direct_sum() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in 0..=7 {
            let data: Vec<Complex64> = (0..1 << n)
                .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                .collect();
            let mut fast = data.clone();
            fwht_in_place(&mut fast);
            for (a, b) in fast.iter().zip(naive(&data)) {
                assert!((a - b).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn involution_up_to_scale() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let data: Vec<Complex64> = (0..64)
            .map(|_| Complex64::new(rng.random(), rng.random()))
            .collect();
        let mut twice = data.clone();
        fwht_in_place(&mut twice);
        fwht_in_place(&mut twice);
        for (a, b) in twice.iter().zip(&data) {
            assert!((a / 64.0 - b).norm() < 1e-14);
        }
    }

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let mut acc = CompensatedSum::default();
        acc.add(1.0);
        for _ in 0..1000 {
            acc.add(1e-17);
        }
        assert!((acc.value() - (1.0 + 1e-14)).abs() < 1e-20);
        assert_eq!(pairwise_sum(&[1.0, 2.0, 3.0]), 6.0);
        assert_eq!(pairwise_sum(&[]), 0.0);
    }
}
