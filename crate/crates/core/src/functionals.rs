//! Norms, energies and the averaged functional on a [`RadialGrid`].
//!
//! Weighted quantities use the weight `e^{σψ(t,·)}` with
//! `ψ(t,x) = μ₁|x|²/(2(1+t)²)`. The weight is never allowed to saturate: if
//! the exponent exceeds 600 at a node where the integrand is not negligible
//! the computation fails with [`Error::WeightOverflow`].

use alloc::vec::Vec;

// shadowed by the inherent methods whenever std is linked
#[allow(unused_imports)]
use num_traits::Float;
use crate::error::{Error, Result};
use crate::grid::RadialGrid;
use crate::model::{self, ModelParams};

/// Largest admissible exponent of the weight.
pub const MAX_WEIGHT_EXPONENT: f64 = 600.0;
/// Values at or below this magnitude are ignored by the overflow guard.
pub const NEGLIGIBLE: f64 = 1e-300;

fn check_len(grid: &RadialGrid, len: usize) -> Result<()> {
    if len != grid.len() {
        return Err(Error::LengthMismatch { expected: grid.len(), found: len });
    }
    Ok(())
}

/// `‖f‖_{L^q}` for `q ≥ 1`.
pub fn lq(grid: &RadialGrid, f: &[f64], q: f64) -> Result<f64> {
    check_len(grid, f.len())?;
    if !(q >= 1.0) {
        return Err(Error::Domain("q must be >= 1".into()));
    }
    Ok(grid.integrate_with(|j, _| f[j].abs().powf(q)).powf(1.0 / q))
}

pub fn l1(grid: &RadialGrid, f: &[f64]) -> Result<f64> {
    lq(grid, f, 1.0)
}

pub fn l2(grid: &RadialGrid, f: &[f64]) -> Result<f64> {
    check_len(grid, f.len())?;
    Ok(grid.integrate_with(|j, _| f[j] * f[j]).sqrt())
}

pub fn sup_norm(f: &[f64]) -> f64 {
    f.iter().fold(0.0, |m, v| m.max(v.abs()))
}

/// `∫ e^{qσψ}|f|^q dx` evaluated as `exp(q(σψ + ln|f|))`, with the overflow
/// guard applied to `qσψ`.
fn weighted_power_integral(
    grid: &RadialGrid,
    magnitude: impl Fn(usize) -> f64,
    params: &ModelParams,
    sigma: f64,
    t: f64,
    q: f64,
) -> Result<f64> {
    let mut overflow = None;
    let total = grid.integrate_with(|j, r| {
        let a = magnitude(j);
        if a == 0.0 {
            return 0.0;
        }
        let expo = q * sigma * model::psi(params, t, r * r);
        if expo > MAX_WEIGHT_EXPONENT && a > NEGLIGIBLE && overflow.is_none() {
            overflow = Some(Error::WeightOverflow { node: j, exponent: expo });
        }
        (expo + q * a.ln()).exp()
    });
    match overflow {
        Some(e) => Err(e),
        None => Ok(total),
    }
}

fn check_weight_args(sigma: f64, t: f64) -> Result<()> {
    if !(sigma > 0.0) {
        return Err(Error::Domain("σ must be positive".into()));
    }
    if !(t >= 0.0) {
        return Err(Error::Domain("t must be nonnegative".into()));
    }
    Ok(())
}

/// `‖e^{σψ(t,·)} f‖_{L²}`.
pub fn weighted_l2(grid: &RadialGrid, f: &[f64], params: &ModelParams, sigma: f64, t: f64) -> Result<f64> {
    check_len(grid, f.len())?;
    check_weight_args(sigma, t)?;
    Ok(weighted_power_integral(grid, |j| f[j].abs(), params, sigma, t, 2.0)?.sqrt())
}

/// `‖e^{σψ(t,·)} f‖_{L^q}`.
pub fn weighted_lq(
    grid: &RadialGrid,
    f: &[f64],
    params: &ModelParams,
    sigma: f64,
    t: f64,
    q: f64,
) -> Result<f64> {
    check_len(grid, f.len())?;
    check_weight_args(sigma, t)?;
    if !(q >= 1.0) {
        return Err(Error::Domain("q must be >= 1".into()));
    }
    Ok(weighted_power_integral(grid, |j| f[j].abs(), params, sigma, t, q)?.powf(1.0 / q))
}

/// `‖e^{σψ(t,·)} (a, b)‖_{L²} = (∫ e^{2σψ}(a² + b²) dx)^{1/2}`, e.g. for the
/// pair `(∇u, u_t)`.
pub fn weighted_l2_pair(
    grid: &RadialGrid,
    a: &[f64],
    b: &[f64],
    params: &ModelParams,
    sigma: f64,
    t: f64,
) -> Result<f64> {
    check_len(grid, a.len())?;
    check_len(grid, b.len())?;
    check_weight_args(sigma, t)?;
    Ok(weighted_power_integral(grid, |j| a[j].hypot(b[j]), params, sigma, t, 2.0)?.sqrt())
}

/// Weighted energy `½∫ e^{2ψ}(u_t² + |∇u|² + m²(t)u²) dx`.
///
/// `ur` is the radial derivative, so `|∇u| = |u_r|`.
pub fn weighted_energy(
    grid: &RadialGrid,
    u: &[f64],
    ut: &[f64],
    ur: &[f64],
    params: &ModelParams,
    t: f64,
) -> Result<f64> {
    for len in [u.len(), ut.len(), ur.len()] {
        check_len(grid, len)?;
    }
    check_weight_args(1.0, t)?;
    let (_, m2) = model::coefficients(params, t);
    let mag = |j: usize| (ut[j] * ut[j] + ur[j] * ur[j] + m2 * u[j] * u[j]).sqrt();
    Ok(0.5 * weighted_power_integral(grid, mag, params, 1.0, t, 2.0)?)
}

/// Unweighted energy `½∫ (u_t² + |∇u|² + m²(t)u²) dx`.
pub fn energy(grid: &RadialGrid, u: &[f64], ut: &[f64], ur: &[f64], params: &ModelParams, t: f64) -> Result<f64> {
    for len in [u.len(), ut.len(), ur.len()] {
        check_len(grid, len)?;
    }
    let (_, m2) = model::coefficients(params, t);
    Ok(0.5 * grid.integrate_with(|j, _| ut[j] * ut[j] + ur[j] * ur[j] + m2 * u[j] * u[j]))
}

/// Scaling factor `(1+t)^{(μ₁-1)/2 - √δ/2}` of the transformation `u ↦ v`.
pub fn transform_factor(t: f64, params: &ModelParams) -> Result<f64> {
    let gamma = params.transform_exponent()?;
    Ok((1.0 + t).powf(gamma))
}

/// `v = (1+t)^{(μ₁-1)/2 - √δ/2} u`.
pub fn transform_v(u: &[f64], t: f64, params: &ModelParams) -> Result<Vec<f64>> {
    let c = transform_factor(t, params)?;
    Ok(u.iter().map(|x| c * x).collect())
}

/// `F = ∫ v dx` (signed).
pub fn f_functional(grid: &RadialGrid, v: &[f64]) -> Result<f64> {
    grid.integrate(v)
}
