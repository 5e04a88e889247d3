//! Reference harmonic oscillator `-d^2/ds^2 + omega^2 s^2` in the number
//! basis: energies `(2n+1) omega` and banded matrices of powers of `s`.

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::potential::LinePotential;

/// Truncated number basis of the oscillator with kinetic term `-d^2/ds^2`
/// (no 1/2 factors), so level `n` has energy `(2n+1) omega`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HoBasis {
    omega: f64,
    dimension: usize,
}

impl HoBasis {
    pub fn new(omega: f64, dimension: usize) -> Result<Self> {
        if !(omega > 0.0) || !omega.is_finite() {
            return Err(Error::NonpositiveCoupling { value: omega });
        }
        if dimension == 0 {
            return Err(Error::BadGrid { n_points: 0 });
        }
        Ok(Self { omega, dimension })
    }

    /// The well at the bottom of the shifted sextic line: omega = sqrt(8).
    pub fn standard(dimension: usize) -> Self {
        Self {
            omega: crate::OMEGA,
            dimension,
        }
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }
}

/// Energy of level `n`: `(2n+1) omega`.
pub fn ho_energy(n: usize, omega: f64) -> f64 {
    (2 * n + 1) as f64 * omega
}

/// Matrix of `s^k` in the number basis, `M[m][n] = <m|s^k|n>`.
///
/// Built as the k-th power of the exact tridiagonal position matrix
/// `s = (a + a^dag)/sqrt(2 omega)` by repeated banded multiplication, so
/// parity zeros (`m+n+k` odd) are exact and the bandwidth is `k`.  Entries
/// with `m, n <= N-1-k` are unaffected by the truncation.
pub fn position_power_matrix(k: usize, basis: &HoBasis) -> Array2<f64> {
    let n = basis.dimension;
    let s = position_matrix(basis);
    let mut m = Array2::<f64>::eye(n);
    let mut bandwidth = 0usize;
    for _ in 0..k {
        m = banded_mul(&m, &s, bandwidth, n);
        bandwidth += 1;
    }
    m
}

/// The tridiagonal position matrix itself.
fn position_matrix(basis: &HoBasis) -> Array2<f64> {
    let n = basis.dimension;
    let scale = 1.0 / (2.0 * basis.omega).sqrt();
    let mut s = Array2::<f64>::zeros((n, n));
    for i in 0..n.saturating_sub(1) {
        let v = ((i + 1) as f64).sqrt() * scale;
        s[[i, i + 1]] = v;
        s[[i + 1, i]] = v;
    }
    s
}

/// `c = a * s` where `a` has the given bandwidth and `s` is tridiagonal.
/// Only the upper triangle is computed; the lower one is mirrored so the
/// result is symmetric to the bit.
fn banded_mul(a: &Array2<f64>, s: &Array2<f64>, bandwidth: usize, n: usize) -> Array2<f64> {
    let mut c = Array2::<f64>::zeros((n, n));
    let out_band = bandwidth + 1;
    for i in 0..n {
        let hi = (i + out_band).min(n - 1);
        for j in i..=hi {
            let mut acc = 0.0;
            if j > 0 {
                acc += a[[i, j - 1]] * s[[j - 1, j]];
            }
            if j + 1 < n {
                acc += a[[i, j + 1]] * s[[j + 1, j]];
            }
            c[[i, j]] = acc;
            c[[j, i]] = acc;
        }
    }
    c
}

/// Harmonic line `W(s) = omega^2 s^2`, the exactly solvable reference used
/// by the integration and finite-difference oracles.
#[derive(Debug, Clone, Copy)]
pub struct HarmonicLine {
    pub omega: f64,
}

impl LinePotential for HarmonicLine {
    fn w(&self, s: f64) -> Complex64 {
        Complex64::new(self.omega * self.omega * s * s, 0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::OMEGA;

    #[test]
    fn energies() {
        assert!((ho_energy(0, OMEGA) - 2.8284271247461903).abs() <= 1e-15);
        assert!((ho_energy(3, 1.0) - 7.0).abs() <= 1e-15);
        assert!((ho_energy(1, OMEGA) - 3.0 * 8.0_f64.sqrt()).abs() <= 1e-14);
    }

    #[test]
    fn square_and_quartic_ground_state_elements() {
        let basis = HoBasis::standard(24);
        let m2 = position_power_matrix(2, &basis);
        // <0|s^2|0> = 1/(2 omega)
        let want = 1.0 / (2.0 * OMEGA);
        assert!((m2[[0, 0]] - want).abs() <= 1e-15, "got {}", m2[[0, 0]]);
        assert!((want - 0.17677669529663687).abs() <= 1e-15);
        let m4 = position_power_matrix(4, &basis);
        // <0|s^4|0> = 3/(4 omega^2) = 3/32
        assert!((m4[[0, 0]] - 3.0 / 32.0).abs() <= 1e-15, "got {}", m4[[0, 0]]);
    }

    #[test]
    fn square_diagonal_closed_form() {
        let basis = HoBasis::standard(30);
        let m2 = position_power_matrix(2, &basis);
        for n in 0..27 {
            let want = (2 * n + 1) as f64 / (2.0 * OMEGA);
            assert!(
                (m2[[n, n]] - want).abs() <= 1e-13 * want,
                "n = {n}: {} vs {want}",
                m2[[n, n]]
            );
        }
    }

    #[test]
    fn odd_powers_have_empty_diagonal() {
        let basis = HoBasis::new(1.7, 20).unwrap();
        let m3 = position_power_matrix(3, &basis);
        for n in 0..20 {
            assert_eq!(m3[[n, n]], 0.0);
        }
    }

    #[test]
    fn parity_selection_and_symmetry_are_exact() {
        let basis = HoBasis::standard(22);
        for k in 1..=7 {
            let m = position_power_matrix(k, &basis);
            for i in 0..22 {
                for j in 0..22 {
                    if (i + j + k) % 2 == 1 {
                        assert_eq!(m[[i, j]], 0.0, "parity zero broken at k={k} ({i},{j})");
                    }
                    assert_eq!(m[[i, j]], m[[j, i]], "symmetry broken at k={k} ({i},{j})");
                    if j > i + k {
                        assert_eq!(m[[i, j]], 0.0, "bandwidth exceeded at k={k} ({i},{j})");
                    }
                }
            }
        }
    }

    #[test]
    fn interior_entries_are_truncation_stable() {
        let k = 5;
        let n = 26;
        let small = position_power_matrix(k, &HoBasis::standard(n));
        let large = position_power_matrix(k, &HoBasis::standard(n + 10));
        for i in 0..=(n - k) {
            for j in 0..=(n - k) {
                let scale = large[[i, j]].abs().max(1.0);
                assert!(
                    (small[[i, j]] - large[[i, j]]).abs() <= 1e-13 * scale,
                    "entry ({i},{j}) moved under truncation"
                );
            }
        }
    }
}
