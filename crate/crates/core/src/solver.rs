//! Time integration of
//!
//! ```text
//! u_tt - Δu + b(t) u_t + m²(t) u = [nonlinear]·|u|^p,   t > s,
//! ```
//!
//! with `b = μ₁/(1+t)`, `m² = μ₂²/(1+t)²`, on a [`RadialGrid`].
//!
//! The scheme is the three-level leapfrog stencil with the damping term
//! discretized by a centered difference across `t ± dt`:
//!
//! ```text
//! (u⁺ - 2u + u⁻)/dt² + b (u⁺ - u⁻)/(2dt) + m² u = Δ_h u + |u|^p
//! ```
//!
//! Coefficients are taken at the center time `t`. Solving for `u⁺` only
//! divides by the scalar `1 + b·dt/2`, so the update stays explicit.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
// shadowed by the inherent methods whenever std is linked
#[allow(unused_imports)]
use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functionals;
use crate::grid::RadialGrid;
use crate::model::{self, ModelParams};

pub const DEFAULT_BLOWUP_THRESHOLD: f64 = 1e8;
/// Relative data mass beyond the safe radius that triggers a support warning.
pub const SUPPORT_LEAK_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub params: ModelParams,
    /// Initial time `s ≥ 0`; data are prescribed at `t = s`.
    pub initial_time: f64,
    pub t_max: f64,
    pub nonlinear: bool,
    pub cfl_safety: f64,
    pub blowup_threshold: f64,
    /// Steps between recorded samples.
    pub record_every: usize,
    /// Slack between the light cone of the data and the Dirichlet cut-off.
    pub support_margin: f64,
}

impl RunConfig {
    pub fn new(params: ModelParams, t_max: f64) -> Self {
        RunConfig {
            params,
            initial_time: 0.0,
            t_max,
            nonlinear: true,
            cfl_safety: 0.5,
            blowup_threshold: DEFAULT_BLOWUP_THRESHOLD,
            record_every: 10,
            support_margin: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if !(self.initial_time >= 0.0) {
            return Err(Error::Config(format!("initial time {} must be >= 0", self.initial_time)));
        }
        if !(self.t_max > self.initial_time) || !self.t_max.is_finite() {
            return Err(Error::Config(format!(
                "t_max = {} must exceed the initial time {}",
                self.t_max, self.initial_time
            )));
        }
        if !(self.cfl_safety > 0.0 && self.cfl_safety <= 1.0) {
            return Err(Error::Config(format!("cfl_safety = {} must lie in (0, 1]", self.cfl_safety)));
        }
        if !(self.blowup_threshold > 0.0) {
            return Err(Error::Config("blowup_threshold must be positive".into()));
        }
        if self.record_every == 0 {
            return Err(Error::Config("record_every must be at least 1".into()));
        }
        if !(self.support_margin >= 0.0) {
            return Err(Error::Config("support_margin must be >= 0".into()));
        }
        Ok(())
    }

    /// Step count and step size: the nominal CFL step, shrunk just enough to
    /// land exactly on `t_max`.
    pub fn time_steps(&self, grid: &RadialGrid) -> Result<(usize, f64)> {
        let nominal = cfl_dt(grid, self.cfl_safety)?;
        let span = self.t_max - self.initial_time;
        let steps = ((span / nominal) - 1e-9).ceil().max(1.0) as usize;
        Ok((steps, span / steps as f64))
    }
}

/// CFL step `cfl_safety · dr` for unit wave speed.
pub fn cfl_dt(grid: &RadialGrid, cfl_safety: f64) -> Result<f64> {
    if !(cfl_safety > 0.0 && cfl_safety <= 1.0) {
        return Err(Error::Config(format!("cfl_safety = {cfl_safety} must lie in (0, 1]")));
    }
    Ok(cfl_safety * grid.dr())
}

/// Two consecutive time levels of the discrete solution.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveState {
    /// Time of `u_curr`.
    pub t: f64,
    pub dt: f64,
    pub u_prev: Vec<f64>,
    pub u_curr: Vec<f64>,
    pub step_index: usize,
    pub diverged: bool,
    initial_time: f64,
    next: Vec<f64>,
    lap: Vec<f64>,
}

impl WaveState {
    /// Builds a state from two explicit levels at `t - dt` and `t`.
    pub fn from_levels(t: f64, dt: f64, u_prev: Vec<f64>, u_curr: Vec<f64>) -> Result<Self> {
        if u_prev.len() != u_curr.len() {
            return Err(Error::LengthMismatch { expected: u_prev.len(), found: u_curr.len() });
        }
        if !(dt > 0.0) {
            return Err(Error::Config("dt must be positive".into()));
        }
        let m = u_curr.len();
        let diverged = !u_prev.iter().chain(&u_curr).all(|v| v.is_finite());
        Ok(WaveState {
            t,
            dt,
            u_prev,
            u_curr,
            step_index: 0,
            diverged,
            initial_time: t - dt,
            next: vec![0.0; m],
            lap: vec![0.0; m],
        })
    }

    /// Computes the next level into the internal buffer without rotating.
    fn compute_next(&mut self, grid: &RadialGrid, config: &RunConfig) {
        let params = &config.params;
        let (b, m2) = model::coefficients(params, self.t);
        let dt = self.dt;
        let dt2 = dt * dt;
        let c = 0.5 * b * dt;
        let inv = 1.0 / (1.0 + c);
        grid.laplacian_into(&self.u_curr, &mut self.lap);
        let p = params.p;
        let nonlinear = config.nonlinear;
        for (((nx, &u), &um), &l) in self.next.iter_mut().zip(&self.u_curr).zip(&self.u_prev).zip(&self.lap) {
            let source = if nonlinear && u != 0.0 { u.abs().powf(p) } else { 0.0 };
            *nx = (2.0 * u - um + dt2 * (l - m2 * u + source) + c * um) * inv;
        }
        if let Some(last) = self.next.last_mut() {
            *last = 0.0;
        }
    }

    fn rotate(&mut self) {
        // prev <- curr <- next, recycling the old prev buffer as scratch
        core::mem::swap(&mut self.u_prev, &mut self.u_curr);
        core::mem::swap(&mut self.u_curr, &mut self.next);
        self.step_index += 1;
        self.t = self.initial_time + (self.step_index + 1) as f64 * self.dt;
        if !self.u_curr.iter().all(|v| v.is_finite()) {
            self.diverged = true;
        }
    }

    /// Advances one step of size `dt`.
    pub fn step(&mut self, grid: &RadialGrid, config: &RunConfig) -> Result<()> {
        if self.u_curr.len() != grid.len() {
            return Err(Error::LengthMismatch { expected: grid.len(), found: self.u_curr.len() });
        }
        self.compute_next(grid, config);
        self.rotate();
        Ok(())
    }
}

/// Returns the current time if `u_curr` exceeds `threshold` in sup-norm or
/// holds a non-finite value.
pub fn detect_blowup(state: &WaveState, threshold: f64) -> Option<f64> {
    exceeds(&state.u_curr, threshold).then_some(state.t)
}

fn exceeds(u: &[f64], threshold: f64) -> bool {
    u.iter().any(|v| !v.is_finite() || v.abs() > threshold)
}

/// Raised when the data do not fit the domain-of-dependence contract.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RunWarning {
    /// Fraction of `∫(|u₀| + |u₁|)` beyond `r_max - (t_max - s) - margin`.
    SupportLeak { fraction: f64, safe_radius: f64 },
    /// A weighted quantity could not be evaluated from this time on.
    WeightOverflow { t: f64 },
}

/// Samples the data at `t = s` and takes the first step with a second-order
/// Taylor expansion:
/// `u(s+dt) = u₀ + dt·u₁ + dt²/2·(Δu₀ - b(s)u₁ - m²(s)u₀ + [nonlinear]|u₀|^p)`.
pub fn init_state(
    grid: &RadialGrid,
    u0: impl Fn(f64) -> f64,
    u1: impl Fn(f64) -> f64,
    config: &RunConfig,
) -> Result<(WaveState, Option<RunWarning>)> {
    config.validate()?;
    let (_, dt) = config.time_steps(grid)?;
    let s = config.initial_time;
    let mut v0 = grid.sample(&u0);
    let mut v1 = grid.sample(&u1);
    let m = grid.len();
    v0[m - 1] = 0.0;
    v1[m - 1] = 0.0;

    let warning = support_leak(grid, &v0, &v1, config);

    let lap = grid.laplacian_apply(&v0)?;
    let (b, m2) = model::coefficients(&config.params, s);
    let p = config.params.p;
    let mut first: Vec<f64> = (0..m)
        .map(|j| {
            let u = v0[j];
            let source = if config.nonlinear && u != 0.0 { u.abs().powf(p) } else { 0.0 };
            u + dt * v1[j] + 0.5 * dt * dt * (lap[j] - b * v1[j] - m2 * u + source)
        })
        .collect();
    first[m - 1] = 0.0;

    let mut state = WaveState::from_levels(s + dt, dt, v0, first)?;
    state.initial_time = s;
    Ok((state, warning))
}

fn support_leak(grid: &RadialGrid, v0: &[f64], v1: &[f64], config: &RunConfig) -> Option<RunWarning> {
    let safe_radius = grid.r_max() - (config.t_max - config.initial_time) - config.support_margin;
    let w = grid.quad_weights();
    let mut total = 0.0;
    let mut outside = 0.0;
    for (j, r) in grid.nodes().enumerate() {
        let mass = w[j] * (v0[j].abs() + v1[j].abs());
        total += mass;
        if r > safe_radius {
            outside += mass;
        }
    }
    if total == 0.0 {
        return None;
    }
    let fraction = outside / total;
    (fraction > SUPPORT_LEAK_TOLERANCE).then_some(RunWarning::SupportLeak { fraction, safe_radius })
}

/// One recorded row of a run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub t: f64,
    pub sup: f64,
    pub l2: f64,
    /// `‖∇u‖_{L²}`.
    pub grad_l2: f64,
    /// `‖u_t‖_{L²}`.
    pub ut_l2: f64,
    /// `‖e^{ψ} u‖_{L²}`; `None` on weight overflow.
    pub wl2: Option<f64>,
    /// `‖e^{ψ}(∇u, u_t)‖_{L²}`.
    pub wgrad_l2: Option<f64>,
    /// Weighted energy `E_{ψ,u}(t)`.
    pub wenergy: Option<f64>,
    /// `F(t) = ∫ v dx`; `None` when δ < 0.
    pub f_value: Option<f64>,
}

impl Sample {
    /// `‖(∇u, u_t)‖_{L²}`.
    pub fn energy_l2(&self) -> f64 {
        self.grad_l2.hypot(self.ut_l2)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RunOutcome {
    /// Reached `t_max` with finite values below the blow-up threshold.
    Completed,
    /// Sup-norm crossed the blow-up threshold at time `t`.
    BlowUp { t: f64 },
    /// Non-finite values appeared without the threshold being crossed first.
    Diverged { t: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub config: RunConfig,
    pub dt: f64,
    pub steps: usize,
    pub samples: Vec<Sample>,
    pub outcome: RunOutcome,
    pub blowup_time: Option<f64>,
    pub warnings: Vec<RunWarning>,
}

impl RunReport {
    pub fn series(&self, f: impl Fn(&Sample) -> f64) -> Vec<(f64, f64)> {
        self.samples.iter().map(|s| (s.t, f(s))).collect()
    }
}

struct Recorder<'a> {
    grid: &'a RadialGrid,
    params: ModelParams,
    samples: Vec<Sample>,
    warnings: Vec<RunWarning>,
    overflowed: bool,
    ur: Vec<f64>,
    ut: Vec<f64>,
}

impl<'a> Recorder<'a> {
    fn new(grid: &'a RadialGrid, params: ModelParams) -> Self {
        Recorder {
            grid,
            params,
            samples: Vec::new(),
            warnings: Vec::new(),
            overflowed: false,
            ur: vec![0.0; grid.len()],
            ut: vec![0.0; grid.len()],
        }
    }

    /// Records a sample at time `t`; `self.ut` must already hold `u_t`.
    fn record(&mut self, t: f64, u: &[f64]) {
        let grid = self.grid;
        if let Ok(ur) = grid.radial_derivative(u) {
            self.ur = ur;
        }
        let params = &self.params;
        let l2 = functionals::l2(grid, u).unwrap_or(f64::NAN);
        let grad_l2 = functionals::l2(grid, &self.ur).unwrap_or(f64::NAN);
        let ut_l2 = functionals::l2(grid, &self.ut).unwrap_or(f64::NAN);
        let wl2 = functionals::weighted_l2(grid, u, params, 1.0, t).ok();
        let wgrad_l2 = functionals::weighted_l2_pair(grid, &self.ur, &self.ut, params, 1.0, t).ok();
        let wenergy = functionals::weighted_energy(grid, u, &self.ut, &self.ur, params, t).ok();
        if (wl2.is_none() || wgrad_l2.is_none() || wenergy.is_none()) && !self.overflowed {
            self.overflowed = true;
            self.warnings.push(RunWarning::WeightOverflow { t });
        }
        let f_value = functionals::transform_factor(t, params)
            .ok()
            .map(|c| c * grid.integrate_unchecked(u));
        self.samples.push(Sample {
            t,
            sup: functionals::sup_norm(u),
            l2,
            grad_l2,
            ut_l2,
            wl2,
            wgrad_l2,
            wenergy,
            f_value,
        });
    }
}

/// Integrates from `initial_time` to `t_max`, recording a sample every
/// `record_every` steps plus the final time. Stops early on blow-up or
/// divergence; the last sample then sits one step before the detection.
pub fn run(
    grid: &RadialGrid,
    u0: impl Fn(f64) -> f64,
    u1: impl Fn(f64) -> f64,
    config: &RunConfig,
) -> Result<RunReport> {
    let (mut state, warning) = init_state(grid, &u0, &u1, config)?;
    let (steps, dt) = config.time_steps(grid)?;
    let s = config.initial_time;
    let time = |k: usize| if k == steps { config.t_max } else { s + k as f64 * dt };

    let mut rec = Recorder::new(grid, config.params);
    rec.warnings.extend(warning);

    rec.ut = grid.sample(&u1);
    let last = grid.len() - 1;
    rec.ut[last] = 0.0;
    rec.record(s, &state.u_prev);

    let finish = |rec: Recorder, outcome: RunOutcome| {
        let blowup_time = match outcome {
            RunOutcome::BlowUp { t } => Some(t),
            _ => None,
        };
        RunReport {
            config: *config,
            dt,
            steps,
            samples: rec.samples,
            outcome,
            blowup_time,
            warnings: rec.warnings,
        }
    };

    let threshold = config.blowup_threshold;
    if let Some(outcome) = detection(&state.u_curr, threshold, time(1)) {
        return Ok(finish(rec, outcome));
    }

    // state: u_prev = L_{k-1}, u_curr = L_k
    for k in 1..=steps {
        state.compute_next(grid, config);
        let detected = if k < steps { detection(&state.next, threshold, time(k + 1)) } else { None };
        if detected.is_some() || k % config.record_every == 0 || k == steps {
            let next_ok = !exceeds(&state.next, threshold);
            for j in 0..grid.len() {
                rec.ut[j] = if next_ok {
                    (state.next[j] - state.u_prev[j]) / (2.0 * dt)
                } else {
                    (state.u_curr[j] - state.u_prev[j]) / dt
                };
            }
            rec.record(time(k), &state.u_curr);
        }
        if let Some(outcome) = detected {
            return Ok(finish(rec, outcome));
        }
        state.rotate();
    }
    Ok(finish(rec, RunOutcome::Completed))
}

fn detection(u: &[f64], threshold: f64, t: f64) -> Option<RunOutcome> {
    if u.iter().any(|v| !v.is_finite()) {
        Some(RunOutcome::Diverged { t })
    } else if u.iter().any(|v| v.abs() > threshold) {
        Some(RunOutcome::BlowUp { t })
    } else {
        None
    }
}
