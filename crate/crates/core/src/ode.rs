//! Fixed-step complex Runge-Kutta integration of `phi'' = (W(s) - E) phi`
//! with overflow-safe rescaling.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::potential::{Coupling, LinePotential, SexticLine};

/// Amplitude and derivative of the wave function, with the accumulated
/// logarithmic rescale factor: the true amplitude is `phi * exp(log_scale)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveState {
    pub phi: Complex64,
    pub dphi: Complex64,
    pub log_scale: f64,
}

impl WaveState {
    pub fn new(phi: Complex64, dphi: Complex64) -> Self {
        Self {
            phi,
            dphi,
            log_scale: 0.0,
        }
    }

    /// Max-norm of the stored (rescaled) pair.
    pub fn norm(&self) -> f64 {
        self.phi.norm().max(self.dphi.norm())
    }

    /// Log-derivative `phi'/phi`; scale factors cancel.
    pub fn log_derivative(&self) -> Complex64 {
        self.dphi / self.phi
    }
}

const RESCALE_HI: f64 = 1e8;
const RESCALE_LO: f64 = 1e-8;

/// Classical RK4 advance of `(phi, phi')` with right-hand side
/// `(phi', (W(s) - E) phi)` from `s_from` to `s_to`.  Whenever the max-norm
/// leaves `[1e-8, 1e8]` the state is renormalized to unit max-norm and the
/// factor folded into `log_scale`.
pub fn integrate_line<L: LinePotential + ?Sized>(
    line: &L,
    e: Complex64,
    s_from: f64,
    s_to: f64,
    steps: usize,
    initial: WaveState,
) -> Result<WaveState> {
    assert!(steps >= 1, "need at least one step");
    let h = (s_to - s_from) / steps as f64;
    let mut phi = initial.phi;
    let mut dphi = initial.dphi;
    let mut log_scale = initial.log_scale;
    for i in 0..steps {
        let s = s_from + i as f64 * h;
        let w0 = line.w(s) - e;
        let wh = line.w(s + 0.5 * h) - e;
        let w1 = line.w(s + h) - e;

        let k1p = dphi;
        let k1d = w0 * phi;
        let k2p = dphi + 0.5 * h * k1d;
        let k2d = wh * (phi + 0.5 * h * k1p);
        let k3p = dphi + 0.5 * h * k2d;
        let k3d = wh * (phi + 0.5 * h * k2p);
        let k4p = dphi + h * k3d;
        let k4d = w1 * (phi + h * k3p);

        phi += h / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
        dphi += h / 6.0 * (k1d + 2.0 * k2d + 2.0 * k3d + k4d);

        let m = phi.norm().max(dphi.norm());
        if !m.is_finite() || m == 0.0 {
            return Err(Error::IntegrationBlowup { s: s + h });
        }
        if m > RESCALE_HI || m < RESCALE_LO {
            phi /= m;
            dphi /= m;
            log_scale += m.ln();
        }
    }
    Ok(WaveState {
        phi,
        dphi,
        log_scale,
    })
}

/// Integration along the shifted sextic line.
pub fn integrate(
    c: &Coupling,
    epsilon: f64,
    e: Complex64,
    s_from: f64,
    s_to: f64,
    steps: usize,
    initial: WaveState,
) -> Result<WaveState> {
    let line = SexticLine::new(*c, epsilon)?;
    integrate_line(&line, e, s_from, s_to, steps, initial)
}

/// `phi_a phi_b' - phi_a' phi_b`, with the rescale factors restored.
/// Constant along jointly integrated solutions of the same equation.
pub fn wronskian(a: &WaveState, b: &WaveState) -> Complex64 {
    (a.phi * b.dphi - a.dphi * b.phi) * (a.log_scale + b.log_scale).exp()
}
