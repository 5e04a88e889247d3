//! Independent finite-difference oracle: three-point discretization of the
//! problem on the line as a complex-symmetric tridiagonal operator, solved by
//! shift-invert inverse iteration and Richardson extrapolation.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::contour::Contour;
use crate::error::{Error, Result};
use crate::perturbation::harmonic_energy;
use crate::potential::{Coupling, LinePotential, SexticLine};
use crate::shooting::{choose_half_width, EigenState, Method};

/// `-d^2/ds^2 + W(s)` with Dirichlet ends, on the interior grid nodes.
/// Complex-symmetric: the sub- and superdiagonal are the same real constant
/// `-1/h^2`.
#[derive(Debug, Clone)]
pub struct TridiagonalOperator {
    diag: Vec<Complex64>,
    off: f64,
    h: f64,
    contour: Contour,
}

impl TridiagonalOperator {
    pub fn dimension(&self) -> usize {
        self.diag.len()
    }

    pub fn diag(&self) -> &[Complex64] {
        &self.diag
    }

    pub fn off(&self) -> f64 {
        self.off
    }

    pub fn spacing(&self) -> f64 {
        self.h
    }

    pub fn contour(&self) -> &Contour {
        &self.contour
    }

    /// Largest diagonal magnitude; the natural residual scale.
    pub fn scale(&self) -> f64 {
        self.diag.iter().map(|d| d.norm()).fold(0.0, f64::max)
    }

    /// `y = T v`.
    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        let n = v.len();
        let mut y = vec![Complex64::new(0.0, 0.0); n];
        for i in 0..n {
            let mut acc = self.diag[i] * v[i];
            if i > 0 {
                acc += self.off * v[i - 1];
            }
            if i + 1 < n {
                acc += self.off * v[i + 1];
            }
            y[i] = acc;
        }
        y
    }
}

/// Discretize an arbitrary line potential on the contour grid.
pub fn build_line<L: LinePotential + ?Sized>(line: &L, contour: &Contour) -> TridiagonalOperator {
    let h = contour.spacing();
    let inv_h2 = 1.0 / (h * h);
    let grid = contour.grid();
    let diag = grid[1..grid.len() - 1]
        .iter()
        .map(|&s| Complex64::new(2.0 * inv_h2, 0.0) + line.w(s))
        .collect();
    TridiagonalOperator {
        diag,
        off: -inv_h2,
        h,
        contour: contour.clone(),
    }
}

/// Discretize the sextic problem; the shift comes from the contour.
pub fn build(c: &Coupling, contour: &Contour) -> TridiagonalOperator {
    let line = SexticLine::new(*c, contour.epsilon()).expect("contour guarantees epsilon > 0");
    build_line(&line, contour)
}

/// LU factorization of `T - sigma I`.  Plain Thomas elimination when the
/// pivots stay healthy, LAPACK-style partial pivoting (with one fill-in
/// diagonal) otherwise.
enum TriLu {
    Plain {
        // eliminated diagonal and the multipliers
        diag: Vec<Complex64>,
        mult: Vec<Complex64>,
        off: f64,
    },
    Pivoted {
        du: Vec<Complex64>,
        du1: Vec<Complex64>,
        du2: Vec<Complex64>,
        mult: Vec<Complex64>,
        swapped: Vec<bool>,
    },
}

impl TriLu {
    fn factor(t: &TridiagonalOperator, sigma: Complex64) -> Result<Self> {
        let n = t.dimension();
        let off = t.off;
        let scale = t.scale().max(off.abs());
        let tiny = 1e-14 * scale;

        // Thomas first
        let mut diag = Vec::with_capacity(n);
        let mut mult = Vec::with_capacity(n - 1);
        let mut ok = true;
        let mut d_prev = t.diag[0] - sigma;
        diag.push(d_prev);
        if d_prev.norm() <= tiny {
            ok = false;
        }
        if ok {
            for i in 1..n {
                let m = off / d_prev;
                let d = t.diag[i] - sigma - m * off;
                if d.norm() <= tiny {
                    ok = false;
                    break;
                }
                mult.push(m);
                diag.push(d);
                d_prev = d;
            }
        }
        if ok {
            return Ok(TriLu::Plain { diag, mult, off });
        }
        Self::factor_pivoted(t, sigma)
    }

    fn factor_pivoted(t: &TridiagonalOperator, sigma: Complex64) -> Result<Self> {
        let n = t.dimension();
        let offc = Complex64::new(t.off, 0.0);
        let dl = vec![offc; n.saturating_sub(1)];
        let mut du = t.diag.iter().map(|&d| d - sigma).collect::<Vec<_>>();
        let mut du1 = vec![offc; n.saturating_sub(1)];
        let mut du2 = vec![Complex64::new(0.0, 0.0); n.saturating_sub(2)];
        let mut mult = vec![Complex64::new(0.0, 0.0); n.saturating_sub(1)];
        let mut swapped = vec![false; n.saturating_sub(1)];

        for i in 0..n - 1 {
            if du[i].norm() >= dl[i].norm() {
                if du[i].norm() == 0.0 {
                    return Err(Error::LuBreakdown { row: i });
                }
                let m = dl[i] / du[i];
                mult[i] = m;
                du[i + 1] -= m * du1[i];
                if i + 2 < n {
                    // du2 row i stays zero: the (i, i+2) entry is zero pre-pivot
                    du1[i + 1] -= m * du2[i];
                }
            } else {
                // swap rows i and i+1
                let m = du[i] / dl[i];
                mult[i] = m;
                swapped[i] = true;
                let old_du1 = du1[i];
                du[i] = dl[i];
                du1[i] = du[i + 1];
                du[i + 1] = old_du1 - m * du[i + 1];
                if i + 2 < n {
                    du2[i] = du1[i + 1];
                    du1[i + 1] = -m * du1[i + 1];
                }
            }
        }
        if du[n - 1].norm() == 0.0 {
            return Err(Error::LuBreakdown { row: n - 1 });
        }
        Ok(TriLu::Pivoted {
            du,
            du1,
            du2,
            mult,
            swapped,
        })
    }

    fn solve(&self, rhs: &[Complex64]) -> Vec<Complex64> {
        match self {
            TriLu::Plain { diag, mult, off } => {
                let n = rhs.len();
                let mut y = rhs.to_vec();
                for i in 1..n {
                    let m = mult[i - 1];
                    y[i] = y[i] - m * y[i - 1];
                }
                let mut x = y;
                x[n - 1] /= diag[n - 1];
                for i in (0..n - 1).rev() {
                    x[i] = (x[i] - *off * x[i + 1]) / diag[i];
                }
                x
            }
            TriLu::Pivoted {
                du,
                du1,
                du2,
                mult,
                swapped,
            } => {
                let n = rhs.len();
                let mut y = rhs.to_vec();
                for i in 0..n - 1 {
                    if swapped[i] {
                        y.swap(i, i + 1);
                    }
                    let m = mult[i];
                    y[i + 1] = y[i + 1] - m * y[i];
                }
                let mut x = y;
                x[n - 1] /= du[n - 1];
                if n >= 2 {
                    x[n - 2] = (x[n - 2] - du1[n - 2] * x[n - 1]) / du[n - 2];
                }
                for i in (0..n.saturating_sub(2)).rev() {
                    x[i] = (x[i] - du1[i] * x[i + 1] - du2[i] * x[i + 2]) / du[i];
                }
                x
            }
        }
    }
}

const MAX_INVERSE_ITER: usize = 200;

fn bilinear(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm2(v: &[Complex64]) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// Relative eigenresidual `||T v - lambda v|| / ||v||`, in units of the
/// operator scale.
pub fn eigen_residual(t: &TridiagonalOperator, lambda: Complex64, v: &[Complex64]) -> f64 {
    let tv = t.apply(v);
    let num = tv
        .iter()
        .zip(v)
        .map(|(a, b)| (a - lambda * b).norm_sqr())
        .sum::<f64>()
        .sqrt();
    num / norm2(v) / t.scale()
}

/// Inverse power iteration on `(T - sigma I)^{-1}`.
///
/// The Rayleigh quotient uses the complex-symmetric bilinear form
/// `v^T T v / v^T v` (transpose, no conjugation): the operator equals its
/// transpose and its eigenvectors are orthogonal under that form.
pub fn shift_invert_eigen(
    t: &TridiagonalOperator,
    sigma: Complex64,
    tol: f64,
) -> Result<(Complex64, Vec<Complex64>)> {
    let n = t.dimension();
    let mut shift = sigma;
    let mut lu = TriLu::factor(t, shift);
    for retry in 0..3 {
        if lu.is_ok() {
            break;
        }
        // sigma hit an eigenvalue of the discrete operator; nudge it
        shift = sigma + Complex64::new(1e-6 * sigma.norm().max(1.0) * (retry + 1) as f64, 0.0);
        lu = TriLu::factor(t, shift);
    }
    let lu = lu?;

    // deterministic start vector with nonzero overlap against everything
    let mut v: Vec<Complex64> = (0..n)
        .map(|j| Complex64::new((1.0 + 0.7 * j as f64).sin() + 1.5, 0.0))
        .collect();
    let s = norm2(&v);
    v.iter_mut().for_each(|x| *x /= s);

    let mut lambda_prev = Complex64::new(f64::INFINITY, 0.0);
    for it in 0..MAX_INVERSE_ITER {
        let mut w = lu.solve(&v);
        let s = norm2(&w);
        if !s.is_finite() || s == 0.0 {
            return Err(Error::InverseIterationStalled { iterations: it });
        }
        w.iter_mut().for_each(|x| *x /= s);
        let vv = bilinear(&w, &w);
        if vv.norm() < 1e-12 {
            // quasi-null vector of the bilinear form; reseed asymmetrically
            for (j, x) in w.iter_mut().enumerate() {
                *x += Complex64::new(1e-3 * ((0.3 + 1.3 * j as f64).cos()), 0.0);
            }
        }
        let tv = t.apply(&w);
        let lambda = bilinear(&w, &tv) / bilinear(&w, &w);
        v = w;
        if (lambda - lambda_prev).norm() <= tol {
            return Ok((lambda, v));
        }
        lambda_prev = lambda;
    }
    Err(Error::InverseIterationStalled {
        iterations: MAX_INVERSE_ITER,
    })
}

/// Default discretization for the sextic problem: the shooting module's
/// half-width for the highest requested level, 2001 points.
pub fn default_contour(c: &Coupling, epsilon: f64, n_max: usize) -> Result<Contour> {
    let line = SexticLine::new(*c, epsilon)?;
    let e_top = harmonic_energy(n_max.saturating_sub(1), c.r());
    let half_width = choose_half_width(&line, e_top);
    Contour::new(epsilon, half_width, 2001)
}

/// Richardson-extrapolated spectrum: eigenvalues on the contour grid and on
/// its spacing-halved refinement, combined as `(4 E_{h/2} - E_h)/3` per
/// level.
pub fn fd_spectrum(c: &Coupling, contour: &Contour, n_max: usize) -> Result<Vec<EigenState>> {
    assert!(n_max >= 1);
    let fine = contour.refined();
    fd_spectrum_pair(c, contour, &fine, n_max)
}

/// Same, with the grid pair given explicitly.  The two contours must share
/// the half-width and differ exactly by spacing halving.
pub fn fd_spectrum_pair(
    c: &Coupling,
    coarse: &Contour,
    fine: &Contour,
    n_max: usize,
) -> Result<Vec<EigenState>> {
    if fine.n_points() != 2 * coarse.n_points() - 1
        || fine.half_width() != coarse.half_width()
        || fine.epsilon() != coarse.epsilon()
    {
        return Err(Error::MismatchedContourPair);
    }
    let t_coarse = build(c, coarse);
    let t_fine = build(c, fine);
    let states: Vec<EigenState> = (0..n_max)
        .into_par_iter()
        .map(|n| {
            let sigma = Complex64::new(harmonic_energy(n, c.r()), 0.0);
            let tol = 1e-11 * sigma.norm().max(1.0);
            let (e_h, _) = shift_invert_eigen(&t_coarse, sigma, tol).map_err(|e| {
                Error::LevelFailed {
                    n,
                    source: Box::new(e),
                }
            })?;
            let (e_h2, v) = shift_invert_eigen(&t_fine, sigma, tol).map_err(|e| {
                Error::LevelFailed {
                    n,
                    source: Box::new(e),
                }
            })?;
            let extrapolated = (4.0 * e_h2 - e_h) / 3.0;
            Ok(EigenState {
                n,
                energy: extrapolated,
                residual: eigen_residual(&t_fine, e_h2, &v),
                method: Method::FdOracle,
                samples: None,
            })
        })
        .collect::<Result<_>>()?;
    Ok(states)
}
