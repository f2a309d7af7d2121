//! Numerical laboratory for the semilinear wave equation with scale-invariant
//! damping and mass,
//!
//! ```text
//! u_tt - Δu + μ₁/(1+t) u_t + μ₂²/(1+t)² u = |u|^p,   x ∈ ℝⁿ,
//! ```
//!
//! restricted to radially symmetric data. The crate is `no_std` and only needs
//! `alloc`; file formats, the CLI and parallel sweeps live in the `scalewave`
//! companion crate.
//!
//! Module map:
//!
//! * [`model`]: closed-form coefficients, the weight exponent ψ, δ, the
//!   critical exponent and the theoretical decay-exponent table.
//! * [`grid`]: radial mesh with n-dimensional quadrature and a radial Laplacian.
//! * [`solver`]: leapfrog time stepping with semi-implicit damping and
//!   blow-up detection.
//! * [`functionals`]: weighted and unweighted norms, the weighted energy and
//!   the averaged functional `F(t) = ∫ v(t,x) dx`.
//! * [`verify`]: pointwise identities and integral inequalities checked on
//!   manufactured functions.
//! * [`odi`]: the comparison function for the blow-up ODE inequality.
//! * [`analysis`]: decay fits, run classification, sweeps and the ODI
//!   cross-check on solver output.
#![no_std]
// `!(x > 0.0)` is the NaN-rejecting form used throughout
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod analysis;
pub mod error;
pub mod functionals;
pub mod grid;
pub mod model;
pub mod odi;
pub mod ode;
pub mod profile;
pub mod rng;
pub mod solver;
pub mod verify;

pub use error::{Error, Result};
pub use grid::RadialGrid;
pub use model::{DecayExponentTable, ModelParams, RegimeReport};
pub use profile::RadialProfile;
pub use solver::{RunConfig, RunOutcome, RunReport, Sample, WaveState};
pub use verify::CheckReport;
