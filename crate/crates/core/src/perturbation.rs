//! Closed-form harmonic energies and Rayleigh-Schrodinger corrections from
//! the anharmonic terms of the expansion about `-iR`.

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::oscillator::{ho_energy, position_power_matrix, HoBasis};
use crate::potential::{taylor_series, Coupling, TaylorSeries};

/// How many orders of the correction series to keep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RsOrder {
    Zeroth,
    First,
    Second,
}

impl RsOrder {
    pub fn from_u8(order: u8) -> Option<Self> {
        match order {
            0 => Some(Self::Zeroth),
            1 => Some(Self::First),
            2 => Some(Self::Second),
            _ => None,
        }
    }
}

/// Perturbative estimate of one level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerturbedEnergy {
    pub n: usize,
    pub e_harmonic: f64,
    pub first_order: Complex64,
    pub second_order: Complex64,
    pub total: Complex64,
    pub k_max: usize,
    pub basis_dim: usize,
}

/// Leading closed formula: `E_n = -4R^2/3 + (2n+1) sqrt(8)`.
pub fn harmonic_energy(n: usize, r: f64) -> f64 {
    -4.0 * r * r / 3.0 + ho_energy(n, crate::OMEGA)
}

/// First- and second-order corrections of level `n` from the series terms
/// `c_k s^k`, k = 3..k_max.
///
/// The second order uses the complex-symmetric square of the transition
/// amplitude (no conjugation): the perturbation is complex-symmetric rather
/// than Hermitian, and conjugating would break the exact cancellation that
/// keeps the totals real.
pub fn rs_corrections(
    n: usize,
    series: &TaylorSeries,
    basis: &HoBasis,
    k_max: usize,
) -> Result<PerturbedEnergy> {
    if k_max < 3 {
        return Err(Error::BadTruncation { k_max, min: 3 });
    }
    if series.k_max() < k_max {
        return Err(Error::BadTruncation {
            k_max,
            min: series.k_max(),
        });
    }
    let need = n + k_max + 16;
    if basis.dimension() < need {
        return Err(Error::BasisTooSmall {
            dim: basis.dimension(),
            n,
            k_max,
            need,
        });
    }
    let mats = power_matrices(basis, k_max);
    Ok(corrections_with(n, series, basis, k_max, &mats))
}

fn power_matrices(basis: &HoBasis, k_max: usize) -> Vec<Array2<f64>> {
    (3..=k_max).map(|k| position_power_matrix(k, basis)).collect()
}

fn corrections_with(
    n: usize,
    series: &TaylorSeries,
    basis: &HoBasis,
    k_max: usize,
    mats: &[Array2<f64>],
) -> PerturbedEnergy {
    let omega = basis.omega();
    let dim = basis.dimension();

    let mut first = Complex64::new(0.0, 0.0);
    for k in 3..=k_max {
        first += series.coefficient(k) * mats[k - 3][[n, n]];
    }

    let mut second = Complex64::new(0.0, 0.0);
    // amplitudes vanish beyond |m - n| = k_max, so the sum is finite
    let m_hi = (n + k_max).min(dim - 1);
    let m_lo = n.saturating_sub(k_max);
    for m in m_lo..=m_hi {
        if m == n {
            continue;
        }
        let mut amp = Complex64::new(0.0, 0.0);
        for k in 3..=k_max {
            amp += series.coefficient(k) * mats[k - 3][[m, n]];
        }
        let denom = ho_energy(n, omega) - ho_energy(m, omega);
        second += amp * amp / denom;
    }

    let e_harmonic = harmonic_energy(n, series.r());
    PerturbedEnergy {
        n,
        e_harmonic,
        first_order: first,
        second_order: second,
        total: e_harmonic + first + second,
        k_max,
        basis_dim: dim,
    }
}

/// Perturbative spectrum for levels 0..n_max at the requested order.
pub fn predicted_spectrum(
    c: &Coupling,
    n_max: usize,
    order: RsOrder,
    k_max: usize,
) -> Result<Vec<PerturbedEnergy>> {
    if k_max < 3 {
        return Err(Error::BadTruncation { k_max, min: 3 });
    }
    let series = taylor_series(c, k_max)?;
    let basis = HoBasis::standard(n_max - 1 + k_max + 16);
    let mats = power_matrices(&basis, k_max);
    Ok((0..n_max)
        .map(|n| {
            let full = corrections_with(n, &series, &basis, k_max, &mats);
            match order {
                RsOrder::Zeroth => PerturbedEnergy {
                    first_order: Complex64::new(0.0, 0.0),
                    second_order: Complex64::new(0.0, 0.0),
                    total: Complex64::new(full.e_harmonic, 0.0),
                    ..full
                },
                RsOrder::First => PerturbedEnergy {
                    second_order: Complex64::new(0.0, 0.0),
                    total: full.e_harmonic + full.first_order,
                    ..full
                },
                RsOrder::Second => full,
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::OMEGA;

    #[test]
    fn harmonic_energy_values() {
        // -4 * 100^2/3 + sqrt(8)
        assert!((harmonic_energy(0, 100.0) - (-13330.504906208588)).abs() <= 1e-8);
        // g = 1e4 gives R = 11.4720269...
        let c = Coupling::from_g(1e4).unwrap();
        assert!((c.r() - 11.4720269).abs() <= 1e-6);
        assert!((harmonic_energy(0, c.r()) - (-172.648107)).abs() <= 1e-5);
        // equidistant spacing 2 sqrt(8)
        for &r in &[3.0, 11.47, 100.0] {
            let gap = harmonic_energy(1, r) - harmonic_energy(0, r);
            assert!((gap - 2.0 * OMEGA).abs() <= 1e-12);
        }
    }

    #[test]
    fn quartic_first_order_hand_value() {
        // first order at k_max = 4 is c_4 <0|s^4|0> = (-42/R^2)(3/32)
        let c = Coupling::from_r(100.0).unwrap();
        let series = taylor_series(&c, 4).unwrap();
        let basis = HoBasis::standard(24);
        let p = rs_corrections(0, &series, &basis, 4).unwrap();
        assert!((p.first_order.re - (-3.9375e-4)).abs() <= 1e-17);
        assert_eq!(p.first_order.im, 0.0);
    }

    #[test]
    fn cubic_second_order_hand_value() {
        // ladder algebra for the k = 3 term alone gives
        // second = -11 c_3^2 / (16 omega^4) = (539/144)/R^2
        let r = 100.0;
        let c = Coupling::from_r(r).unwrap();
        let series = taylor_series(&c, 3).unwrap();
        let basis = HoBasis::standard(24);
        let p = rs_corrections(0, &series, &basis, 3).unwrap();
        assert_eq!(p.first_order, Complex64::new(0.0, 0.0));
        let want = 539.0 / 144.0 / (r * r);
        assert!(
            (p.second_order.re - want).abs() <= 1e-12 * want,
            "{} vs {want}",
            p.second_order.re
        );
        assert_eq!(p.second_order.im, 0.0);
    }

    #[test]
    fn odd_power_first_order_vanishes_identically() {
        let c = Coupling::from_g(1e4).unwrap();
        let series = taylor_series(&c, 9).unwrap();
        let basis = HoBasis::standard(40);
        let mats = power_matrices(&basis, 9);
        for n in 0..=5 {
            for k in (3..=9).step_by(2) {
                let term = series.coefficient(k) * mats[k - 3][[n, n]];
                assert_eq!(term, Complex64::new(0.0, 0.0), "n = {n}, k = {k}");
            }
        }
    }

    #[test]
    fn totals_are_real_through_second_order() {
        for &r in &[50.0, 100.0, 400.0] {
            let c = Coupling::from_r(r).unwrap();
            let series = taylor_series(&c, 10).unwrap();
            for n in 0..=5 {
                let basis = HoBasis::standard(n + 10 + 16);
                let p = rs_corrections(n, &series, &basis, 10).unwrap();
                assert!(
                    p.total.im.abs() <= 1e-12 * p.total.re.abs(),
                    "n = {n}, r = {r}: Im = {}",
                    p.total.im
                );
            }
        }
    }

    #[test]
    fn corrections_scale_as_inverse_r_squared() {
        let p50 = {
            let c = Coupling::from_r(50.0).unwrap();
            let series = taylor_series(&c, 10).unwrap();
            rs_corrections(0, &series, &HoBasis::standard(30), 10).unwrap()
        };
        let p100 = {
            let c = Coupling::from_r(100.0).unwrap();
            let series = taylor_series(&c, 10).unwrap();
            rs_corrections(0, &series, &HoBasis::standard(30), 10).unwrap()
        };
        let ratio = (p50.total - p50.e_harmonic).norm() / (p100.total - p100.e_harmonic).norm();
        assert!((3.5..=4.5).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn basis_growth_does_not_move_totals() {
        let c = Coupling::from_r(100.0).unwrap();
        let series = taylor_series(&c, 10).unwrap();
        let a = rs_corrections(2, &series, &HoBasis::standard(28), 10).unwrap();
        let b = rs_corrections(2, &series, &HoBasis::standard(56), 10).unwrap();
        assert!((a.total - b.total).norm() <= 1e-12 * b.total.norm());
    }

    #[test]
    fn basis_too_small_is_reported() {
        let c = Coupling::from_r(100.0).unwrap();
        let series = taylor_series(&c, 10).unwrap();
        let err = rs_corrections(0, &series, &HoBasis::standard(10), 10).unwrap_err();
        assert!(matches!(err, Error::BasisTooSmall { .. }));
    }

    #[test]
    fn predicted_spectrum_orders() {
        let c = Coupling::from_r(100.0).unwrap();
        let zeroth = predicted_spectrum(&c, 4, RsOrder::Zeroth, 10).unwrap();
        for p in &zeroth {
            assert_eq!(p.total, Complex64::new(p.e_harmonic, 0.0));
        }
        let second = predicted_spectrum(&c, 4, RsOrder::Second, 10).unwrap();
        for p in &second {
            assert!((p.total - p.e_harmonic).norm() <= 0.01, "n = {}", p.n);
            assert!(p.total.im.abs() <= 1e-12 * p.total.re.abs());
        }
    }
}
