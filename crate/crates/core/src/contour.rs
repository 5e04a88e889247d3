//! The straight integration line `x(s) = s - i*eps` and its discretization.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Discretized integration line below the real axis.
///
/// The grid is built by mirroring the positive half onto the negative half,
/// so `s_j + s_{n-1-j} == 0` holds bit-exactly; the parity tests downstream
/// rely on that.
#[derive(Debug, Clone, PartialEq)]
pub struct Contour {
    epsilon: f64,
    half_width: f64,
    n_points: usize,
}

impl Contour {
    /// `epsilon` must be positive (the line may not cross the cut starting at
    /// the origin), `n_points` odd and at least 3 so `s = 0` is a grid node.
    pub fn new(epsilon: f64, half_width: f64, n_points: usize) -> Result<Self> {
        if !(epsilon > 0.0) || !epsilon.is_finite() {
            return Err(Error::NonpositiveShift { value: epsilon });
        }
        if !(half_width > 0.0) || !half_width.is_finite() {
            return Err(Error::BadHalfWidth { value: half_width });
        }
        if n_points < 3 || n_points % 2 == 0 {
            return Err(Error::BadGrid { n_points });
        }
        Ok(Self {
            epsilon,
            half_width,
            n_points,
        })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    /// Grid spacing `2L/(n-1)`.
    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / (self.n_points - 1) as f64
    }

    /// Maps a line parameter to the complex plane: `x = s - i*eps`.
    pub fn map_to_x(&self, s: f64) -> Complex64 {
        Complex64::new(s, -self.epsilon)
    }

    /// Uniform symmetric grid over `[-L, L]` with exact endpoints.
    pub fn grid(&self) -> Vec<f64> {
        let mid = (self.n_points - 1) / 2;
        let mut s = vec![0.0; self.n_points];
        for k in 1..=mid {
            let v = self.half_width * (k as f64 / mid as f64);
            s[mid + k] = v;
            s[mid - k] = -v;
        }
        s
    }

    /// Same line with halved spacing (`2n - 1` points), for Richardson pairs.
    pub fn refined(&self) -> Self {
        Self {
            epsilon: self.epsilon,
            half_width: self.half_width,
            n_points: 2 * self.n_points - 1,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn map_to_x_is_the_shifted_line() {
        let c = Contour::new(1.0, 5.0, 11).unwrap();
        assert_eq!(c.map_to_x(0.0), Complex64::new(0.0, -1.0));
        let c = Contour::new(100.0, 5.0, 11).unwrap();
        // crosses -100i, the lowest stationary point when R = 100
        assert_eq!(c.map_to_x(0.0), Complex64::new(0.0, -100.0));
        let c = Contour::new(2.0, 5.0, 11).unwrap();
        assert_eq!(c.map_to_x(3.0), Complex64::new(3.0, -2.0));
    }

    #[test]
    fn grid_examples() {
        let c = Contour::new(1.0, 1.0, 3).unwrap();
        assert_eq!(c.grid(), vec![-1.0, 0.0, 1.0]);
        let c = Contour::new(1.0, 2.0, 5).unwrap();
        assert_eq!(c.grid(), vec![-2.0, -1.0, 0.0, 1.0, 2.0]);
    }

    #[test]
    fn even_point_count_rejected() {
        assert!(matches!(
            Contour::new(1.0, 1.0, 4),
            Err(Error::BadGrid { n_points: 4 })
        ));
        assert!(matches!(Contour::new(1.0, 1.0, 1), Err(Error::BadGrid { .. })));
        assert!(matches!(
            Contour::new(0.0, 1.0, 3),
            Err(Error::NonpositiveShift { .. })
        ));
        assert!(matches!(
            Contour::new(-1.0, 1.0, 3),
            Err(Error::NonpositiveShift { .. })
        ));
    }

    #[test]
    fn reflection_of_x() {
        let c = Contour::new(3.0, 2.0, 9).unwrap();
        for s in c.grid() {
            let x = c.map_to_x(s);
            let xr = c.map_to_x(-s);
            assert_eq!(xr.re, -x.re);
            assert_eq!(xr.im, x.im);
        }
    }

    proptest! {
        #[test]
        fn grid_mirror_is_bit_exact(
            l in 1e-3_f64..1e3,
            half in 1_usize..400,
        ) {
            let n = 2 * half + 1;
            let c = Contour::new(1.0, l, n).unwrap();
            let s = c.grid();
            prop_assert_eq!(s.len(), n);
            for j in 0..n {
                prop_assert_eq!(s[j] + s[n - 1 - j], 0.0);
            }
            prop_assert_eq!(s[0], -l);
            prop_assert_eq!(s[n - 1], l);
            // uniform to rounding
            let h = c.spacing();
            for j in 1..n {
                prop_assert!(((s[j] - s[j - 1]) - h).abs() <= 1e-12 * h);
            }
        }
    }
}
