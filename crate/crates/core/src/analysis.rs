//! Experiment layer: decay fits, run classification, parameter sweeps and
//! the ODI cross-check on solver output.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
// shadowed by the inherent methods whenever std is linked
#[allow(unused_imports)]
use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::RadialGrid;
use crate::model::{self, ModelParams};
use crate::odi::{self, OdiProblem};
use crate::profile::RadialProfile;
use crate::solver::{self, RunConfig, RunOutcome, RunReport};
use crate::verify::CheckReport;

pub const MIN_FIT_POINTS: usize = 8;

/// Divisor applied to the data before the log-log fit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LogCorrection {
    None,
    /// `1 + √log(1+t)`.
    Ell,
    /// `1 + √log((1+t)/(1+s))`.
    EllShifted { s: f64 },
}

impl LogCorrection {
    pub fn factor(&self, t: f64) -> f64 {
        match *self {
            LogCorrection::None => 1.0,
            LogCorrection::Ell => model::ell(t),
            LogCorrection::EllShifted { s } => model::ell_shifted(t, s),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub exponent: f64,
    pub stderr: f64,
    /// Log of the fitted prefactor.
    pub intercept: f64,
    pub window: (f64, f64),
    pub log_corrected: bool,
    pub n_points: usize,
}

/// Least-squares slope of `log(value/ℓ(t))` against `log(1+t)` over the
/// samples with `t` in `window`.
pub fn fit_decay(series: &[(f64, f64)], window: (f64, f64), correction: LogCorrection) -> Result<DecayFit> {
    let (lo, hi) = window;
    if !(lo < hi) {
        return Err(Error::Fit(format!("empty window [{lo}, {hi}]")));
    }
    let (first, last) = match (series.first(), series.last()) {
        (Some(a), Some(b)) => (a.0, b.0),
        _ => return Err(Error::Fit("empty series".into())),
    };
    let slack = 1e-9 * hi.abs().max(1.0);
    if lo < first - slack || hi > last + slack {
        return Err(Error::Fit(format!("window [{lo}, {hi}] outside series range [{first}, {last}]")));
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for &(t, v) in series.iter().filter(|(t, _)| *t >= lo - slack && *t <= hi + slack) {
        if !(v > 0.0) {
            return Err(Error::Fit(format!("nonpositive value {v} at t = {t}")));
        }
        xs.push(t.ln_1p());
        ys.push((v / correction.factor(t)).ln());
    }
    let n = xs.len();
    if n < MIN_FIT_POINTS {
        return Err(Error::Fit(format!("window holds {n} points, need {MIN_FIT_POINTS}")));
    }
    let nf = n as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if !(sxx > 0.0) {
        return Err(Error::Fit("degenerate window".into()));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ssr: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    let stderr = (ssr / (nf - 2.0) / sxx).sqrt();
    Ok(DecayFit {
        exponent: slope,
        stderr,
        intercept,
        window,
        log_corrected: !matches!(correction, LogCorrection::None),
        n_points: n,
    })
}

/// Default fit window `[T/10, T]`.
pub fn default_window(t_max: f64) -> (f64, f64) {
    (t_max / 10.0, t_max)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    GlobalLooking,
    BlowUp,
    Undecided,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassifyCriteria {
    /// Bound on `max E_ψ / E_ψ(initial)`.
    pub energy_growth_bound: f64,
    /// Fit window for the `L²` slope; `None` means `[T/10, T]`.
    pub fit_window: Option<(f64, f64)>,
}

impl Default for ClassifyCriteria {
    fn default() -> Self {
        ClassifyCriteria { energy_growth_bound: 10.0, fit_window: None }
    }
}

/// `max_t E_ψ(t) / E_ψ(s)`; `None` if any weighted energy is missing.
pub fn weighted_energy_growth(report: &RunReport) -> Option<f64> {
    let mut vals = report.samples.iter().map(|s| s.wenergy);
    let first = vals.next()??;
    let mut max = first;
    for v in vals {
        max = max.max(v?);
    }
    if first > 0.0 {
        Some(max / first)
    } else if max == 0.0 {
        Some(1.0)
    } else {
        Some(f64::INFINITY)
    }
}

pub fn classify_run(report: &RunReport, criteria: &ClassifyCriteria) -> Classification {
    match report.outcome {
        RunOutcome::BlowUp { .. } => return Classification::BlowUp,
        RunOutcome::Diverged { .. } => return Classification::Undecided,
        RunOutcome::Completed => {}
    }
    if report.samples.iter().all(|s| s.sup == 0.0) {
        return Classification::GlobalLooking;
    }
    match weighted_energy_growth(report) {
        Some(g) if g <= criteria.energy_growth_bound => {}
        _ => return Classification::Undecided,
    }
    let window = criteria.fit_window.unwrap_or_else(|| default_window(report.config.t_max));
    match fit_decay(&report.series(|s| s.l2), window, LogCorrection::None) {
        Ok(fit) if fit.exponent < 0.0 => Classification::GlobalLooking,
        _ => Classification::Undecided,
    }
}

/// A batch of runs sharing grid, data shapes and configuration, varying
/// `p` and the data amplitude.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPlan {
    pub r_max: f64,
    pub dr: f64,
    pub config: RunConfig,
    /// Shapes of `u₀` and `u₁`; each run scales both by the amplitude.
    pub u0: RadialProfile,
    pub u1: RadialProfile,
    pub p_values: Vec<f64>,
    pub amplitudes: Vec<f64>,
    pub criteria: ClassifyCriteria,
}

impl SweepPlan {
    /// `(p, amplitude)` pairs in deterministic order (p outer).
    pub fn cases(&self) -> Vec<(f64, f64)> {
        self.p_values
            .iter()
            .flat_map(|&p| self.amplitudes.iter().map(move |&a| (p, a)))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub params: ModelParams,
    pub amplitude: f64,
    pub outcome: RunOutcome,
    pub classification: Classification,
    pub blowup_time: Option<f64>,
    pub l2_exponent: Option<f64>,
    pub grad_exponent: Option<f64>,
    pub p_crit: Option<f64>,
    pub thm22_applicable: bool,
    pub thm23_applicable: bool,
    pub error: Option<String>,
}

/// Runs a single sweep case. Errors are stored in the row.
pub fn sweep_row(plan: &SweepPlan, p: f64, amplitude: f64) -> SweepRow {
    let params = ModelParams { p, ..plan.config.params };
    let regime = model::regime_check(&params);
    let mut row = SweepRow {
        params,
        amplitude,
        outcome: RunOutcome::Diverged { t: f64::NAN },
        classification: Classification::Undecided,
        blowup_time: None,
        l2_exponent: None,
        grad_exponent: None,
        p_crit: regime.p_crit,
        thm22_applicable: regime.thm22_applicable,
        thm23_applicable: regime.thm23_applicable,
        error: None,
    };
    let result = (|| -> Result<RunReport> {
        params.validate()?;
        let grid = RadialGrid::new(params.n, plan.r_max, plan.dr)?;
        let config = RunConfig { params, ..plan.config };
        let u0 = plan.u0.scaled(amplitude);
        let u1 = plan.u1.scaled(amplitude);
        solver::run(&grid, |r| u0.eval(r), |r| u1.eval(r), &config)
    })();
    match result {
        Ok(report) => {
            row.outcome = report.outcome;
            row.blowup_time = report.blowup_time;
            row.classification = classify_run(&report, &plan.criteria);
            if report.outcome == RunOutcome::Completed {
                let window = plan.criteria.fit_window.unwrap_or_else(|| default_window(report.config.t_max));
                row.l2_exponent = fit_decay(&report.series(|s| s.l2), window, LogCorrection::None)
                    .ok()
                    .map(|f| f.exponent);
                row.grad_exponent = fit_decay(&report.series(|s| s.energy_l2()), window, LogCorrection::None)
                    .ok()
                    .map(|f| f.exponent);
            }
        }
        Err(e) => row.error = Some(format!("{e}")),
    }
    row
}

/// Sequential sweep in [`SweepPlan::cases`] order.
pub fn sweep(plan: &SweepPlan) -> Vec<SweepRow> {
    plan.cases().into_iter().map(|(p, a)| sweep_row(plan, p, a)).collect()
}

/// At each amplitude, no global-looking row has `p` below the `p` of a
/// blow-up row.
pub fn sweep_is_monotone(rows: &[SweepRow]) -> bool {
    rows.iter().all(|g| {
        g.classification != Classification::GlobalLooking
            || !rows.iter().any(|b| {
                b.classification == Classification::BlowUp && b.amplitude == g.amplitude && b.params.p > g.params.p
            })
    })
}

/// Diagnostics of the averaged functional `F` on a blow-up run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrosscheckDetail {
    pub f0: f64,
    pub df0: f64,
    /// Time from which the recorded `F` increases strictly.
    pub monotone_from: f64,
    pub k0: f64,
    pub alpha: f64,
    /// Smallest observed `(F'' + K₀F'/(1+t)) / ((1+t)^α |F|^p)`.
    pub k1_estimate: f64,
    pub t0_bound: Option<f64>,
    pub blowup_time: f64,
}

/// Checks a blow-up run against the ODI for `F(t) = ∫v`: `F(s) > 0`,
/// `F'(s) > 0`, `F > 0` throughout, and the numerical blow-up time is at
/// most the ODI life-span built with `K₀ = 1+√δ`,
/// `α = -(n + (μ₁-1)/2 - √δ/2)(p-1)` and an estimated `K₁`.
pub fn odi_crosscheck(report: &RunReport, params: &ModelParams) -> Result<(CheckReport, Option<CrosscheckDetail>)> {
    let na = |why: String| {
        let rep = CheckReport {
            id: "odi_crosscheck".into(),
            cases: 0,
            worst: f64::NAN,
            tolerance: 1.0,
            pass: false,
            notes: alloc::vec![format!("not applicable: {why}")],
            metrics: Vec::new(),
            seed: None,
        };
        Ok((rep, None))
    };
    let tb = match report.outcome {
        RunOutcome::BlowUp { t } => t,
        _ => return na("run did not blow up".into()),
    };
    let sd = params
        .sqrt_delta()
        .ok_or_else(|| Error::Regime("odi crosscheck needs δ ≥ 0".into()))?;
    let series: Vec<(f64, f64)> = report.samples.iter().filter_map(|s| s.f_value.map(|f| (s.t, f))).collect();
    if series.len() < 3 {
        return na("fewer than three F samples".into());
    }
    let (t_0, f0) = series[0];
    let df0 = (series[1].1 - f0) / (series[1].0 - t_0);
    if !(f0 > 0.0) {
        return na(format!("F(s) = {f0:e} is not positive"));
    }
    if !(df0 > 0.0) {
        return na(format!("F'(s) = {df0:e} is not positive"));
    }

    let mut monotone_from = t_0;
    for w in series.windows(2) {
        if !(w[1].1 > w[0].1) {
            monotone_from = w[1].0;
        }
    }
    let positive = series.iter().all(|&(_, f)| f > 0.0);

    let k0 = 1.0 + sd;
    let alpha = -(params.dim() + 0.5 * (params.mu1 - 1.0) - 0.5 * sd) * (params.p - 1.0);
    let mut k1 = f64::INFINITY;
    for w in series.windows(3) {
        let (ta, fa) = w[0];
        let (tb_, fb) = w[1];
        let (tc, fc) = w[2];
        let h1 = tb_ - ta;
        let h2 = tc - tb_;
        // nonuniform three-point derivatives at the middle node
        let d1 = (fc - fb) / h2 * h1 / (h1 + h2) + (fb - fa) / h1 * h2 / (h1 + h2);
        let d2 = 2.0 * ((fc - fb) / h2 - (fb - fa) / h1) / (h1 + h2);
        let lhs = d2 + k0 / (1.0 + tb_) * d1;
        let rhs = (1.0 + tb_).powf(alpha) * fb.abs().powf(params.p);
        if rhs > 0.0 {
            k1 = k1.min(lhs / rhs);
        }
    }

    // the ODI lives on [s, ∞); shift time so that it starts at 0 only when s = 0
    let t0_bound = if k1 > 0.0 && k1.is_finite() && t_0 == 0.0 {
        let problem = OdiProblem { k0, k1, alpha: alpha.max(-2.0), p: params.p, f0, df0 };
        let nu = odi::select_nu(&problem)?;
        Some(odi::life_span_t0(&problem, nu)?)
    } else {
        None
    };

    let mut rep = CheckReport {
        id: "odi_crosscheck".into(),
        cases: series.len(),
        worst: t0_bound.map(|b| tb / b).unwrap_or(f64::NAN),
        tolerance: 1.0,
        pass: false,
        notes: Vec::new(),
        metrics: alloc::vec![
            ("f0".into(), f0),
            ("df0".into(), df0),
            ("k0".into(), k0),
            ("alpha".into(), alpha),
            ("k1_estimate".into(), k1),
            ("monotone_from".into(), monotone_from),
            ("blowup_time".into(), tb),
        ],
        seed: None,
    };
    if alpha < -2.0 {
        rep.notes.push(format!("α = {alpha} < -2 outside the ODI lemma; clamped"));
    }
    match t0_bound {
        Some(b) => {
            rep.metrics.push(("t0_bound".into(), b));
            rep.pass = positive && tb <= b;
        }
        None => {
            rep.notes.push(format!("K₁ estimate {k1:e} unusable; life-span bound not formed"));
            rep.pass = positive;
        }
    }
    if !positive {
        rep.notes.push("F not positive along the run".into());
    }
    let detail = CrosscheckDetail { f0, df0, monotone_from, k0, alpha, k1_estimate: k1, t0_bound, blowup_time: tb };
    Ok((rep, Some(detail)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::Sample;
    use alloc::vec;
    use proptest::prelude::*;

    fn power_series(c: f64, e: f64, ell: bool) -> Vec<(f64, f64)> {
        (0..200)
            .map(|i| {
                let t = 1.0 + i as f64;
                let l = if ell { model::ell(t) } else { 1.0 };
                (t, c * (1.0 + t).powf(e) * l)
            })
            .collect()
    }

    #[test]
    fn fit_exact_power_laws() {
        let f = fit_decay(&power_series(1.0, -1.5, false), (10.0, 200.0), LogCorrection::None).unwrap();
        assert!((f.exponent + 1.5).abs() < 1e-9 && f.stderr < 1e-8);
        let f = fit_decay(&power_series(3.0, -0.5, false), (10.0, 200.0), LogCorrection::None).unwrap();
        assert!((f.exponent + 0.5).abs() < 1e-9);
        let f = fit_decay(&power_series(1.0, -1.0, true), (10.0, 200.0), LogCorrection::Ell).unwrap();
        assert!((f.exponent + 1.0).abs() < 1e-6 && f.log_corrected);
    }

    #[test]
    fn fit_errors() {
        let s = power_series(1.0, -1.0, false);
        assert!(fit_decay(&s, (10.0, 12.0), LogCorrection::None).is_err());
        assert!(fit_decay(&s, (10.0, 500.0), LogCorrection::None).is_err());
        assert!(fit_decay(&s, (20.0, 10.0), LogCorrection::None).is_err());
        let mut bad = s.clone();
        bad[50].1 = 0.0;
        assert!(fit_decay(&bad, (10.0, 200.0), LogCorrection::None).is_err());
    }

    fn report_with(samples: Vec<Sample>, outcome: RunOutcome) -> RunReport {
        let params = ModelParams::new(1, 4.0, 0.0, 4.0).unwrap();
        let blowup_time = match outcome {
            RunOutcome::BlowUp { t } => Some(t),
            _ => None,
        };
        RunReport {
            config: RunConfig::new(params, samples.last().map(|s| s.t).unwrap_or(1.0)),
            dt: 0.1,
            steps: samples.len(),
            samples,
            outcome,
            blowup_time,
            warnings: vec![],
        }
    }

    fn sample(t: f64, l2: f64, we: f64) -> Sample {
        Sample {
            t,
            sup: l2,
            l2,
            grad_l2: l2,
            ut_l2: l2,
            wl2: Some(l2),
            wgrad_l2: Some(we.sqrt()),
            wenergy: Some(we),
            f_value: Some(l2),
        }
    }

    #[test]
    fn classify_examples() {
        let decaying: Vec<Sample> = (0..=100).map(|i| sample(i as f64, (1.0 + i as f64).powf(-0.5), 1.0)).collect();
        let c = ClassifyCriteria::default();
        assert_eq!(classify_run(&report_with(decaying.clone(), RunOutcome::Completed), &c), Classification::GlobalLooking);
        assert_eq!(
            classify_run(&report_with(decaying.clone(), RunOutcome::BlowUp { t: 3.0 }), &c),
            Classification::BlowUp
        );
        let growing: Vec<Sample> =
            decaying.iter().enumerate().map(|(i, s)| Sample { wenergy: Some(1.0 + 0.5 * i as f64), ..*s }).collect();
        assert_eq!(classify_run(&report_with(growing, RunOutcome::Completed), &c), Classification::Undecided);
        let zero: Vec<Sample> = (0..=10).map(|i| sample(i as f64, 0.0, 0.0)).collect();
        assert_eq!(classify_run(&report_with(zero, RunOutcome::Completed), &c), Classification::GlobalLooking);
    }

    #[test]
    fn crosscheck_needs_blowup_and_positive_mass() {
        let p = ModelParams::new(1, 4.0, 0.0, 2.0).unwrap();
        let s: Vec<Sample> = (0..=10).map(|i| sample(i as f64, 1.0, 1.0)).collect();
        let (rep, d) = odi_crosscheck(&report_with(s.clone(), RunOutcome::Completed), &p).unwrap();
        assert!(!rep.pass && d.is_none());
        let zero_mass: Vec<Sample> = s.iter().map(|x| Sample { f_value: Some(0.0), ..*x }).collect();
        let (rep, d) = odi_crosscheck(&report_with(zero_mass, RunOutcome::BlowUp { t: 10.0 }), &p).unwrap();
        assert!(!rep.pass && d.is_none());
        assert!(rep.notes[0].contains("not applicable"));
    }

    #[test]
    fn empty_sweep_is_empty() {
        let params = ModelParams::new(1, 4.0, 0.0, 2.0).unwrap();
        let plan = SweepPlan {
            r_max: 10.0,
            dr: 0.1,
            config: RunConfig::new(params, 1.0),
            u0: RadialProfile::Zero,
            u1: RadialProfile::Zero,
            p_values: vec![],
            amplitudes: vec![1.0],
            criteria: ClassifyCriteria::default(),
        };
        assert!(sweep(&plan).is_empty());
    }

    #[test]
    fn monotonicity_rule() {
        let params = ModelParams::new(1, 4.0, 0.0, 2.0).unwrap();
        let row = |p: f64, c: Classification| SweepRow {
            params: ModelParams { p, ..params },
            amplitude: 1.0,
            outcome: RunOutcome::Completed,
            classification: c,
            blowup_time: None,
            l2_exponent: None,
            grad_exponent: None,
            p_crit: None,
            thm22_applicable: false,
            thm23_applicable: false,
            error: None,
        };
        assert!(sweep_is_monotone(&[row(2.0, Classification::BlowUp), row(4.0, Classification::GlobalLooking)]));
        assert!(!sweep_is_monotone(&[row(2.0, Classification::GlobalLooking), row(4.0, Classification::BlowUp)]));
    }

    proptest! {
        #[test]
        fn fit_recovers_any_power(c in 0.01f64..100.0, e in -3.0f64..1.0) {
            let f = fit_decay(&power_series(c, e, false), (5.0, 150.0), LogCorrection::None).unwrap();
            prop_assert!((f.exponent - e).abs() < 1e-9);
            prop_assert!(f.stderr < 1e-8);
        }
    }
}
