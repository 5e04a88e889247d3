//! The potential `V(x) = x^2 + g^2/x^6`, its stationary points, and the
//! closed-form expansion about the lowest one.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Exponent of the repulsive core `g^2 x^{-2-CORE_EXPONENT}`.  The whole
/// solver is specialized to the sextic case; the constant exists to document
/// where the 6 in `g^2/x^6` comes from.
pub const CORE_EXPONENT: u32 = 4;

/// Coupling strength together with the derived stationary radius
/// `R = 3^(1/8) g^(1/4)` (equivalently `R^8 = 3 g^2`).
///
/// Both branches are taken real and positive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Coupling {
    g: f64,
    r: f64,
}

impl Coupling {
    pub fn from_g(g: f64) -> Result<Self> {
        if !(g > 0.0) || !g.is_finite() {
            return Err(Error::NonpositiveCoupling { value: g });
        }
        // single rounding of the root keeps R^8 = 3g^2 within a few ulps
        let r = (3.0 * g * g).powf(0.125);
        Ok(Self { g, r })
    }

    pub fn from_r(r: f64) -> Result<Self> {
        if !(r > 0.0) || !r.is_finite() {
            return Err(Error::NonpositiveCoupling { value: r });
        }
        let g = r.powi(4) / 3.0_f64.sqrt();
        Ok(Self { g, r })
    }

    pub fn g(&self) -> f64 {
        self.g
    }

    /// Stationary radius `R = 3^(1/8) g^(1/4)`.
    pub fn r(&self) -> f64 {
        self.r
    }

    /// The potential on the line shifted by `epsilon`.
    pub fn line(&self, epsilon: f64) -> Result<SexticLine> {
        SexticLine::new(*self, epsilon)
    }
}

/// One of the eight roots of `V'(x) = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StationaryPoint {
    /// 1-based index; the root sits at angle `pi (m-1)/4`.
    pub m: usize,
    pub location: Complex64,
    pub second_derivative: Complex64,
}

/// `V(x) = x^2 + g^2/x^6`.
pub fn v_of_x(c: &Coupling, x: Complex64) -> Result<Complex64> {
    if x == Complex64::new(0.0, 0.0) {
        return Err(Error::SingularOrigin);
    }
    let x2 = x * x;
    let x6 = x2 * x2 * x2;
    Ok(x2 + (c.g * c.g) / x6)
}

/// `V'(x) = 2x - 6 g^2/x^7`.
pub fn v_prime(c: &Coupling, x: Complex64) -> Result<Complex64> {
    if x == Complex64::new(0.0, 0.0) {
        return Err(Error::SingularOrigin);
    }
    let x2 = x * x;
    let x7 = x2 * x2 * x2 * x;
    Ok(2.0 * x - 6.0 * (c.g * c.g) / x7)
}

/// `V''(x) = 2 + 42 g^2/x^8`.
pub fn v_second(c: &Coupling, x: Complex64) -> Result<Complex64> {
    if x == Complex64::new(0.0, 0.0) {
        return Err(Error::SingularOrigin);
    }
    let x2 = x * x;
    let x8 = x2 * x2 * x2 * x2;
    Ok(Complex64::new(2.0, 0.0) + 42.0 * (c.g * c.g) / x8)
}

/// The potential seen along the shifted line: `W(s) = V(s - i*eps)`.
pub fn w_of_s(c: &Coupling, epsilon: f64, s: f64) -> Result<Complex64> {
    if !(epsilon > 0.0) || !epsilon.is_finite() {
        return Err(Error::NonpositiveShift { value: epsilon });
    }
    v_of_x(c, Complex64::new(s, -epsilon))
}

/// All eight stationary points `R_m = R exp(i pi (m-1)/4)`, m = 1..8.
pub fn stationary_points(c: &Coupling) -> Vec<StationaryPoint> {
    (1..=8)
        .map(|m| {
            let angle = std::f64::consts::PI * (m - 1) as f64 / 4.0;
            let location = Complex64::from_polar(c.r, angle);
            let second_derivative =
                v_second(c, location).expect("stationary points are away from the origin");
            StationaryPoint {
                m,
                location,
                second_derivative,
            }
        })
        .collect()
}

/// Which exponential component of the small-|x| solution dominates near the
/// origin.  The solutions behave like `exp(+-g/(2x^2))`, so dominance is
/// decided by the sign of `Re(g/x^2)`: positive in the left and right wedges,
/// negative in the upper and lower ones, zero on the diagonals.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StokesDominance {
    PlusDominant,
    MinusDominant,
    Boundary,
}

pub fn stokes_dominance(x: Complex64, g: f64) -> Result<StokesDominance> {
    if !(g > 0.0) || !g.is_finite() {
        return Err(Error::NonpositiveCoupling { value: g });
    }
    if x == Complex64::new(0.0, 0.0) {
        return Err(Error::SingularOrigin);
    }
    let w = g / (x * x);
    Ok(if w.re > 0.0 {
        StokesDominance::PlusDominant
    } else if w.re < 0.0 {
        StokesDominance::MinusDominant
    } else {
        StokesDominance::Boundary
    })
}

/// Taylor expansion of `W(s)` about the stationary point `-iR` (`eps = R`):
///
/// ```text
/// W(s) = -4R^2/3 + 8 s^2 + sum_{k>=3} c_k s^k,
/// c_k  = -(1/3) (-i)^k C(k+5,5) R^{2-k},
/// ```
///
/// with real coefficients for even k and imaginary ones for odd k.  The
/// coefficients are generated by the recurrence
/// `c_{k+1} = c_k * (-i) (k+6) / ((k+1) R)` seeded at `c_3 = -i 56/(3R)`,
/// which keeps the zero components exactly zero.
#[derive(Debug, Clone, PartialEq)]
pub struct TaylorSeries {
    r: f64,
    coefficients: Vec<Complex64>,
}

pub fn taylor_series(c: &Coupling, k_max: usize) -> Result<TaylorSeries> {
    if k_max < 2 {
        return Err(Error::BadTruncation { k_max, min: 2 });
    }
    let r = c.r;
    let mut coeff = Vec::with_capacity(k_max + 1);
    coeff.push(Complex64::new(-4.0 * r * r / 3.0, 0.0));
    coeff.push(Complex64::new(0.0, 0.0));
    coeff.push(Complex64::new(8.0, 0.0));
    if k_max >= 3 {
        let mut ck = Complex64::new(0.0, -56.0 / (3.0 * r));
        coeff.push(ck);
        for k in 3..k_max {
            // multiply by -i (k+6)/((k+1) R): a rotation that swaps the
            // components, so exact zeros stay exact
            let f = (k + 6) as f64 / ((k + 1) as f64 * r);
            ck = Complex64::new(ck.im * f, -ck.re * f);
            coeff.push(ck);
        }
    }
    Ok(TaylorSeries {
        r,
        coefficients: coeff,
    })
}

impl TaylorSeries {
    pub fn r(&self) -> f64 {
        self.r
    }

    /// Highest retained power.
    pub fn k_max(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn coefficient(&self, k: usize) -> Complex64 {
        self.coefficients[k]
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coefficients
    }

    /// Truncated polynomial evaluated by Horner's rule.
    pub fn eval(&self, s: f64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for &c in self.coefficients.iter().rev() {
            acc = acc * s + c;
        }
        acc
    }

    /// Coefficient in exact rational/surd form, e.g. `-56i/(3R)` for k = 3.
    pub fn exact_form(&self, k: usize) -> String {
        exact_form(k)
    }
}

/// Closed form `c_k = -(1/3)(-i)^k C(k+5,5) R^{2-k}` for k >= 3, used to
/// validate the recurrence.
pub fn taylor_coefficient_closed(k: usize, r: f64) -> Complex64 {
    assert!(k >= 3);
    let binom = binomial_k5(k);
    let magnitude = binom / 3.0 * r.powi(2 - k as i32);
    // (-i)^k cycles 1, -i, -1, i
    match k % 4 {
        0 => Complex64::new(-magnitude, 0.0),
        1 => Complex64::new(0.0, magnitude),
        2 => Complex64::new(magnitude, 0.0),
        _ => Complex64::new(0.0, -magnitude),
    }
}

/// C(k+5, 5) as a float, via the product form.
fn binomial_k5(k: usize) -> f64 {
    let k = k as f64;
    (k + 1.0) * (k + 2.0) * (k + 3.0) * (k + 4.0) * (k + 5.0) / 120.0
}

fn exact_form(k: usize) -> String {
    match k {
        0 => return "-4R^2/3".to_string(),
        1 => return "0".to_string(),
        2 => return "+8".to_string(),
        _ => {}
    }
    let binom = binomial_k5(k) as u64;
    let (num, divides) = if binom % 3 == 0 {
        (binom / 3, true)
    } else {
        (binom, false)
    };
    let sign = match k % 4 {
        1 | 2 => "+",
        _ => "-",
    };
    let i = if k % 2 == 1 { "i" } else { "" };
    let rpow = k - 2;
    let r = if rpow == 1 {
        "R".to_string()
    } else {
        format!("R^{rpow}")
    };
    if divides {
        format!("{sign}{num}{i}/{r}")
    } else {
        format!("{sign}{num}{i}/(3{r})")
    }
}

/// Potential evaluated along a shifted line, as the 1-D problem in `s` sees
/// it.  Implementors must be cheap to evaluate; the integrators call this in
/// their inner loop.
pub trait LinePotential: Sync {
    fn w(&self, s: f64) -> Complex64;
}

impl<F> LinePotential for F
where
    F: Fn(f64) -> Complex64 + Sync,
{
    fn w(&self, s: f64) -> Complex64 {
        self(s)
    }
}

/// The production line: `W(s) = V(s - i*eps)` for the sextic potential.
#[derive(Debug, Clone, Copy)]
pub struct SexticLine {
    coupling: Coupling,
    epsilon: f64,
}

impl SexticLine {
    pub fn new(coupling: Coupling, epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0) || !epsilon.is_finite() {
            return Err(Error::NonpositiveShift { value: epsilon });
        }
        Ok(Self { coupling, epsilon })
    }

    pub fn coupling(&self) -> Coupling {
        self.coupling
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }
}

impl LinePotential for SexticLine {
    fn w(&self, s: f64) -> Complex64 {
        let x = Complex64::new(s, -self.epsilon);
        let x2 = x * x;
        let x6 = x2 * x2 * x2;
        x2 + (self.coupling.g * self.coupling.g) / x6
    }
}
