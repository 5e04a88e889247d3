//! Bound states of the singular oscillator `V(x) = x^2 + g^2/x^6` regularized
//! on the complex line `x(s) = s - i*eps`.
//!
//! For strong coupling (`g >> 1`) the potential develops eight stationary
//! points at distance `R = 3^(1/8) g^(1/4)` from the origin.  Running the
//! integration line through the lowest one (`-iR`, i.e. `eps = R`) turns the
//! problem into a slightly anharmonic oscillator with frequency `sqrt(8)`,
//! whose low-lying levels sit near `-4R^2/3 + (2n+1) sqrt(8)`.  This crate
//! computes that spectrum three independent ways and cross-checks the claimed
//! properties (real energies, independence of the shift `eps`, `1/R` decay of
//! the closed-formula error):
//!
//! * [`shooting`] — two-sided complex Runge-Kutta shooting with secant
//!   iteration on the log-derivative mismatch,
//! * [`fdsolver`] — finite-difference discretization on the line plus
//!   shift-invert inverse iteration on the complex-symmetric tridiagonal
//!   operator, Richardson-extrapolated,
//! * [`perturbation`] — Rayleigh-Schrodinger corrections built from the
//!   closed-form Taylor expansion of the potential about `-iR`.
//!
//! [`verify`] packages the cross-checks into serializable reports; the
//! companion CLI crate exposes everything as subcommands.

pub mod contour;
pub mod error;
pub mod fdsolver;
pub mod ode;
pub mod oscillator;
pub mod perturbation;
pub mod potential;
pub mod shooting;
pub mod verify;

pub use contour::Contour;
pub use error::{Error, Result};
pub use fdsolver::TridiagonalOperator;
pub use ode::WaveState;
pub use oscillator::HoBasis;
pub use perturbation::{PerturbedEnergy, RsOrder};
pub use potential::{Coupling, LinePotential, SexticLine, StationaryPoint, TaylorSeries};
pub use shooting::{EigenState, Method};
pub use verify::{ClaimTag, PerLevelCheck, VerificationReport};

/// Oscillator frequency of the harmonic well at `eps = R`: omega = sqrt(8).
pub const OMEGA: f64 = 2.828_427_124_746_190_3;
