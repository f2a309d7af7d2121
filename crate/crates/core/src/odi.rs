//! Blow-up comparison for the ordinary differential inequality
//!
//! ```text
//! F'' + K₀(1+t)^{-1} F' ≥ K₁(1+t)^α |F|^p,   F(0) > 0, F'(0) > 0,
//! ```
//!
//! through the explicit subsolution `G' = ν(1+t)^{α+1} G^{(p+1)/2}`,
//! `G(0) = F(0)`, which blows up at the life-span `T₀`.

use alloc::format;
use alloc::vec::Vec;
// shadowed by the inherent methods whenever std is linked
#[allow(unused_imports)]
use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ode;
use crate::verify::CheckReport;

/// Factor applied to the largest admissible ν.
pub const NU_SAFETY: f64 = 0.9;
/// Trajectory value taken as numerical blow-up.
pub const BLOWUP_CUTOFF: f64 = 1e12;
/// Relative slack in the comparison `F ≥ G`.
pub const COMPARISON_RTOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OdiProblem {
    pub k0: f64,
    pub k1: f64,
    pub alpha: f64,
    pub p: f64,
    pub f0: f64,
    pub df0: f64,
}

impl OdiProblem {
    pub fn validate(&self) -> Result<()> {
        self.validate_with_k1(self.k1 > 0.0)
    }

    fn validate_with_k1(&self, k1_ok: bool) -> Result<()> {
        let ok = self.k0 > 0.0
            && k1_ok
            && self.alpha >= -2.0
            && self.p > 1.0
            && self.f0 > 0.0
            && self.df0 > 0.0
            && [self.k0, self.k1, self.alpha, self.p, self.f0, self.df0].iter().all(|v| v.is_finite());
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParams(format!(
                "ODI problem needs K₀, K₁ > 0, α ≥ -2, p > 1, F(0), F'(0) > 0; got {self:?}"
            )))
        }
    }

    fn half_pm1(&self) -> f64 {
        0.5 * (self.p - 1.0)
    }
}

/// Coefficient of ν in the first constraint:
/// `(max(α+1+K₀, 0) + (p+1)(α+2)/(p-1))·F₀^{-(p-1)/2}`.
///
/// Along `G`, `G'' + K₀G'/(1+t)` is
/// `(p+1)ν²/2·(1+t)^{2α+2}G^p + ν(α+1+K₀)(1+t)^α G^{(p+1)/2}`. The first
/// term is bounded by `(1+t)^α G^p` times `(p+1)ν²/2·(1+T₀)^{α+2}`, and
/// `(1+T₀)^{α+2} = 1 + 2(α+2)F₀^{-(p-1)/2}/((p-1)ν)`; the second by
/// `G^{(p+1)/2} ≤ F₀^{-(p-1)/2}G^p` when its coefficient is positive, and
/// by zero otherwise. At `α = -2` the extra `(α+2)` part vanishes.
fn first_constraint_slope(problem: &OdiProblem) -> f64 {
    let damping = (problem.alpha + 1.0 + problem.k0).max(0.0);
    let horizon = (problem.p + 1.0) * (problem.alpha + 2.0) / (problem.p - 1.0);
    (damping + horizon) * problem.f0.powf(-problem.half_pm1())
}

/// The two smallness constraints on ν, as `(ν₁, ν₂)` bounds:
/// `(p+1)ν²/2 + ν·b < K₁` with `b` from the bound on
/// `G'' + K₀G'/(1+t)` over `[0, T₀)` holds for `ν < ν₁`, and
/// `νF₀^{(p+1)/2} < F'(0)` for `ν < ν₂`.
pub fn nu_bounds(problem: &OdiProblem) -> (f64, f64) {
    let a = 0.5 * (problem.p + 1.0);
    let b = first_constraint_slope(problem);
    let c = problem.k1;
    let disc = (b * b + 4.0 * a * c).sqrt();
    // positive root of aν² + bν - c, cancellation-free since b ≥ 0
    let nu1 = 2.0 * c / (b + disc);
    let nu2 = problem.df0 * problem.f0.powf(-0.5 * (problem.p + 1.0));
    (nu1, nu2)
}

/// `ν = 0.9·min(ν₁, ν₂)`.
pub fn select_nu(problem: &OdiProblem) -> Result<f64> {
    problem.validate()?;
    let (nu1, nu2) = nu_bounds(problem);
    Ok(NU_SAFETY * nu1.min(nu2))
}

/// Left-hand sides of both constraints at `ν`, each to be compared with
/// its bound (`K₁` and `F'(0)`).
pub fn nu_constraints(problem: &OdiProblem, nu: f64) -> (f64, f64) {
    let first = nu * (0.5 * (problem.p + 1.0) * nu + first_constraint_slope(problem));
    let second = nu * problem.f0.powf(0.5 * (problem.p + 1.0));
    (first, second)
}

/// Life-span of `G`: the time where `G^{-(p-1)/2}` reaches zero,
/// `T₀ = (2(α+2)/((p-1)ν)·F₀^{-(p-1)/2} + 1)^{1/(α+2)} - 1`, or
/// `exp(2/((p-1)ν)·F₀^{-(p-1)/2}) - 1` when `α = -2`.
pub fn life_span_t0(problem: &OdiProblem, nu: f64) -> Result<f64> {
    if !(nu > 0.0) {
        return Err(Error::Domain(format!("ν = {nu} must be positive")));
    }
    let x = problem.f0.powf(-problem.half_pm1()) / nu;
    let e = problem.alpha + 2.0;
    if e == 0.0 {
        Ok((x / problem.half_pm1()).exp_m1())
    } else {
        Ok(((e * x / problem.half_pm1()).ln_1p() / e).exp_m1())
    }
}

/// Closed form of `G(t)` for `0 ≤ t < T₀`, from separating variables:
/// `G^{-(p-1)/2} = F₀^{-(p-1)/2} - (p-1)ν/(2(α+2))·((1+t)^{α+2} - 1)`,
/// with `log(1+t)` in place of `((1+t)^{α+2} - 1)/(α+2)` when `α = -2`.
pub fn closed_form_g(problem: &OdiProblem, nu: f64, t: f64) -> Result<f64> {
    let t0 = life_span_t0(problem, nu)?;
    if !(t >= 0.0) {
        return Err(Error::Domain(format!("t = {t} must be nonnegative")));
    }
    if t >= t0 {
        return Err(Error::Domain(format!("life-span exceeded: t = {t} ≥ T₀ = {t0}")));
    }
    let h = problem.half_pm1();
    let e = problem.alpha + 2.0;
    let growth = if e == 0.0 { t.ln_1p() } else { (e * t.ln_1p()).exp_m1() / e };
    let inv = problem.f0.powf(-h) - h * nu * growth;
    if !(inv > 0.0) {
        return Err(Error::Domain(format!("life-span exceeded at t = {t}")));
    }
    Ok(inv.powf(-1.0 / h))
}

/// Right-hand side `G' = ν(1+t)^{α+1}G^{(p+1)/2}`.
pub fn g_rate(problem: &OdiProblem, nu: f64, t: f64, g: f64) -> f64 {
    nu * (1.0 + t).powf(problem.alpha + 1.0) * g.abs().powf(0.5 * (problem.p + 1.0))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OdiTrajectory {
    /// `(t, F, F')`.
    pub samples: Vec<(f64, f64, f64)>,
    /// First time `F` exceeds the cutoff or leaves the finite range.
    pub blowup_time: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OdiSolution {
    pub problem: OdiProblem,
    pub nu: f64,
    pub t0: f64,
    pub trajectory: OdiTrajectory,
}

impl OdiSolution {
    pub fn g(&self, t: f64) -> Result<f64> {
        closed_form_g(&self.problem, self.nu, t)
    }
}

/// RK4 with fixed step on the equality version
/// `F'' = -K₀(1+t)^{-1}F' + K₁(1+t)^α|F|^p` up to `t_end` or blow-up.
/// `K₁ = 0` is accepted here.
pub fn integrate_odi_until(problem: &OdiProblem, dt: f64, t_end: f64) -> Result<OdiTrajectory> {
    problem.validate_with_k1(problem.k1 >= 0.0)?;
    if !(dt > 0.0) || !(t_end > 0.0) {
        return Err(Error::Domain("dt and t_end must be positive".into()));
    }
    let pr = *problem;
    let rhs = move |t: f64, y: &[f64; 2]| {
        let s = 1.0 + t;
        [y[1], -pr.k0 / s * y[1] + pr.k1 * s.powf(pr.alpha) * y[0].abs().powf(pr.p)]
    };
    let steps = (t_end / dt).ceil() as usize;
    let mut samples = Vec::with_capacity(steps.min(1 << 22) + 1);
    let mut y = [problem.f0, problem.df0];
    samples.push((0.0, y[0], y[1]));
    for k in 0..steps {
        let t = k as f64 * dt;
        y = ode::rk4_step(&rhs, t, &y, dt);
        let t1 = (k + 1) as f64 * dt;
        if !y[0].is_finite() || y[0] > BLOWUP_CUTOFF {
            return Ok(OdiTrajectory { samples, blowup_time: Some(t1) });
        }
        samples.push((t1, y[0], y[1]));
    }
    Ok(OdiTrajectory { samples, blowup_time: None })
}

/// [`integrate_odi_until`] with horizon `10·T₀` for the selected ν.
pub fn integrate_odi(problem: &OdiProblem, dt: f64) -> Result<OdiTrajectory> {
    let nu = select_nu(problem)?;
    let t0 = life_span_t0(problem, nu)?;
    integrate_odi_until(problem, dt, 10.0 * t0)
}

/// RK4 on `G' = ν(1+t)^{α+1}G^{(p+1)/2}` from `G(0) = F(0)`; samples `(t, G)`.
pub fn integrate_g(problem: &OdiProblem, nu: f64, dt: f64, t_end: f64) -> Vec<(f64, f64)> {
    let pr = *problem;
    let rhs = move |t: f64, y: &[f64; 1]| [g_rate(&pr, nu, t, y[0])];
    let steps = (t_end / dt).ceil() as usize;
    let mut out = Vec::with_capacity(steps + 1);
    let mut y = [problem.f0];
    out.push((0.0, y[0]));
    for k in 0..steps {
        y = ode::rk4_step(&rhs, k as f64 * dt, &y, dt);
        if !y[0].is_finite() {
            break;
        }
        out.push(((k + 1) as f64 * dt, y[0]));
    }
    out
}

/// Selects ν, integrates the equality ODI and checks
/// `F(t) ≥ G(t)(1 - 10⁻⁶)` at every sample before `min(blow-up, T₀)`.
/// `worst` is the largest `G/F` (tolerance `1/(1 - 10⁻⁶)`).
pub fn comparison_check(problem: &OdiProblem, dt: f64) -> Result<(CheckReport, OdiSolution)> {
    let nu = select_nu(problem)?;
    let t0 = life_span_t0(problem, nu)?;
    let trajectory = integrate_odi_until(problem, dt, 10.0 * t0)?;
    let horizon = trajectory.blowup_time.unwrap_or(f64::INFINITY).min(t0);
    let mut worst = 0.0f64;
    let mut cases = 0;
    for &(t, f, _) in &trajectory.samples {
        if t >= horizon {
            break;
        }
        let g = closed_form_g(problem, nu, t)?;
        worst = worst.max(g / f);
        cases += 1;
    }
    let mut rep = CheckReport {
        id: "odi_comparison".into(),
        cases,
        worst,
        tolerance: 1.0 / (1.0 - COMPARISON_RTOL),
        pass: worst <= 1.0 / (1.0 - COMPARISON_RTOL),
        notes: Vec::new(),
        metrics: alloc::vec![("nu".into(), nu), ("t0".into(), t0)],
        seed: None,
    };
    match trajectory.blowup_time {
        Some(tb) => rep.metrics.push(("blowup_time".into(), tb)),
        None => rep.notes.push(format!("no numerical blow-up before {}", 10.0 * t0)),
    }
    if !(f64::is_finite(worst) && worst > 0.0) {
        rep.pass = false;
    }
    Ok((rep, OdiSolution { problem: *problem, nu, t0, trajectory }))
}
