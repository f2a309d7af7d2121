//! Numerical checks of the weight identities, the weighted energy identity,
//! the weighted functional inequalities and Bihari's inequality on
//! manufactured functions with closed-form derivatives.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::PI;
// shadowed by the inherent methods whenever std is linked
#[allow(unused_imports)]
use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::RadialGrid;
use crate::model::{self, ModelParams};
use crate::rng;

/// Multiplicative slack for inequalities evaluated by quadrature.
pub const QUADRATURE_MARGIN: f64 = 1.01;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub id: String,
    pub cases: usize,
    /// Worst residual or ratio, in the units of `tolerance`.
    pub worst: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub notes: Vec<String>,
    /// Auxiliary named quantities (e.g. a tightness ratio).
    pub metrics: Vec<(String, f64)>,
    pub seed: Option<u64>,
}

impl CheckReport {
    fn new(id: impl Into<String>, cases: usize, worst: f64, tolerance: f64) -> Self {
        CheckReport {
            id: id.into(),
            cases,
            worst,
            tolerance,
            pass: worst <= tolerance,
            notes: Vec::new(),
            metrics: Vec::new(),
            seed: None,
        }
    }

    fn fail(mut self, note: String) -> Self {
        self.pass = false;
        self.notes.push(note);
        self
    }

    pub fn metric(&self, name: &str) -> Option<f64> {
        self.metrics.iter().find(|(k, _)| k == name).map(|(_, v)| *v)
    }
}

/// `count` seeded points `(t, r)` drawn uniformly from the given ranges.
pub fn random_points(seed: u64, count: usize, t_range: (f64, f64), r_range: (f64, f64)) -> Vec<(f64, f64)> {
    let mut g = rng::seeded(seed);
    (0..count)
        .map(|_| {
            let t = rng::uniform(&mut g, t_range.0, t_range.1);
            let r = rng::uniform(&mut g, r_range.0, r_range.1);
            (t, r)
        })
        .collect()
}

fn rel(residual: f64, scale: f64) -> f64 {
    if scale > 0.0 {
        residual.abs() / scale
    } else {
        residual.abs()
    }
}

/// `|∇ψ|² + bψ_t = 0`, `Δψ = nμ₁/(1+t)²` and `ψ_t = -2ψ/(1+t)` at the
/// given `(t, r)` points, relative residuals against `1e-12`.
pub fn check_psi_identities(params: &ModelParams, points: &[(f64, f64)]) -> CheckReport {
    let mut worst = 0.0f64;
    let n = params.dim();
    for &(t, r) in points {
        let x2 = r * r;
        let (b, _) = model::coefficients(params, t);
        let g2 = model::grad_psi_norm_sq(params, t, x2);
        let bpt = b * model::psi_t(params, t, x2);
        worst = worst.max(rel(g2 + bpt, g2.abs() + bpt.abs()));

        // Δψ from the radial form ψ_rr + (n-1)ψ_r/r, with ψ_rr = ψ_r/r
        let psi_rr = params.mu1 / (1.0 + t).powi(2);
        let lap = if r > 0.0 { psi_rr + (n - 1.0) * model::psi_r(params, t, r) / r } else { n * psi_rr };
        let lap_closed = model::laplacian_psi(params, t);
        worst = worst.max(rel(lap - lap_closed, lap_closed.abs()));

        let pt = model::psi_t(params, t, x2);
        let two = 2.0 * model::psi(params, t, x2) / (1.0 + t);
        worst = worst.max(rel(pt + two, pt.abs() + two.abs()));
    }
    CheckReport::new("psi_identities", points.len(), worst, 1e-12)
}

/// Closed-form sign facts behind the weighted energy inequality: `ψ_t ≤ 0`
/// and `d(m²)/dt ≤ 0`.
pub fn check_sign_blocks(params: &ModelParams, points: &[(f64, f64)]) -> CheckReport {
    let worst = points
        .iter()
        .map(|&(t, r)| model::psi_t(params, t, r * r).max(model::mass_coefficient_dt(params, t)))
        .fold(f64::NEG_INFINITY, f64::max);
    CheckReport::new("sign_blocks", points.len(), worst.max(0.0), 0.0)
}

/// Values and derivatives of a radial space-time function at `(t, r)`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Jet {
    pub u: f64,
    pub ut: f64,
    pub utt: f64,
    pub ur: f64,
    pub urr: f64,
    pub utr: f64,
}

pub trait SpaceTimeField {
    fn jet(&self, t: f64, r: f64) -> Jet;
}

/// `u(t, r) = sin(ωt)·exp(-r²/w²)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SinGaussian {
    pub omega: f64,
    pub width: f64,
}

impl SpaceTimeField for SinGaussian {
    fn jet(&self, t: f64, r: f64) -> Jet {
        let w2 = self.width * self.width;
        let e = (-r * r / w2).exp();
        let g1 = -2.0 * r / w2 * e;
        let g2 = (4.0 * r * r / (w2 * w2) - 2.0 / w2) * e;
        let (s, c) = (self.omega * t).sin_cos();
        let om = self.omega;
        Jet { u: s * e, ut: om * c * e, utt: -om * om * s * e, ur: s * g1, urr: s * g2, utr: om * c * g1 }
    }
}

/// The field identically zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZeroField;

impl SpaceTimeField for ZeroField {
    fn jet(&self, _t: f64, _r: f64) -> Jet {
        Jet::default()
    }
}

/// Terms of the pointwise weighted energy identity, with `E = e^{2ψ}`:
///
/// ```text
/// lhs    = E u_t (u_tt - Δu + b u_t + m² u)
/// dt     = ∂_t(½E(u_t² + |∇u|² + m²u²))
/// div    = div(E u_t ∇u)
/// third  = (E/ψ_t) u_t² (|∇ψ|² + bψ_t)
/// square = (E/ψ_t) |u_t∇ψ - ψ_t∇u|²
/// psi    = ψ_t E (u_t² + m²u²)
/// mass   = ½ E u² d(m²)/dt
/// lhs = dt - div + third - square - psi - mass
/// ```
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentityTerms {
    pub lhs: f64,
    pub dt: f64,
    pub div: f64,
    pub third: f64,
    pub square: f64,
    pub psi: f64,
    pub mass: f64,
}

impl IdentityTerms {
    pub fn residual(&self) -> f64 {
        self.lhs - (self.dt - self.div + self.third - self.square - self.psi - self.mass)
    }

    pub fn scale(&self) -> f64 {
        [self.lhs, self.dt, self.div, self.third, self.square, self.psi, self.mass]
            .iter()
            .map(|v| v.abs())
            .sum()
    }
}

/// Evaluates every term of the identity from an analytic jet. Requires
/// `r > 0` (the identity divides by `ψ_t`, which vanishes at the origin).
pub fn identity_terms(params: &ModelParams, t: f64, r: f64, j: &Jet) -> IdentityTerms {
    let n = params.dim();
    let x2 = r * r;
    let (b, m2) = model::coefficients(params, t);
    let dm2 = model::mass_coefficient_dt(params, t);
    let psi = model::psi(params, t, x2);
    let pt = model::psi_t(params, t, x2);
    let pr = model::psi_r(params, t, r);
    let e = (2.0 * psi).exp();
    let lap = j.urr + (n - 1.0) / r * j.ur;

    let lhs = e * j.ut * (j.utt - lap + b * j.ut + m2 * j.u);
    let dt = e
        * (pt * (j.ut * j.ut + j.ur * j.ur + m2 * j.u * j.u)
            + j.ut * j.utt
            + j.ur * j.utr
            + m2 * j.u * j.ut
            + 0.5 * dm2 * j.u * j.u);
    let div = e * (2.0 * pr * j.ut * j.ur + j.utr * j.ur + j.ut * lap);
    let third = e / pt * j.ut * j.ut * (pr * pr + b * pt);
    let sq = j.ut * pr - pt * j.ur;
    let square = e / pt * sq * sq;
    let psi_term = pt * e * (j.ut * j.ut + m2 * j.u * j.u);
    let mass = 0.5 * e * j.u * j.u * dm2;
    IdentityTerms { lhs, dt, div, third, square, psi: psi_term, mass }
}

/// Same terms, with the outer derivatives (`u_tt`, `Δu`, `∂_t` of the energy
/// density and the divergence of the flux) replaced by centered differences
/// of step `h`. The residual is then `O(h²)`.
pub fn identity_terms_fd(
    params: &ModelParams,
    field: &impl SpaceTimeField,
    t: f64,
    r: f64,
    h: f64,
) -> IdentityTerms {
    let n = params.dim();
    let jet = |t: f64, r: f64| field.jet(t, r);
    let density = |t: f64, r: f64| {
        let j = jet(t, r);
        let (_, m2) = model::coefficients(params, t);
        0.5 * (2.0 * model::psi(params, t, r * r)).exp() * (j.ut * j.ut + j.ur * j.ur + m2 * j.u * j.u)
    };
    let flux = |r: f64| {
        let j = jet(t, r);
        r.powf(n - 1.0) * (2.0 * model::psi(params, t, r * r)).exp() * j.ut * j.ur
    };
    let mut j = jet(t, r);
    let exact = identity_terms(params, t, r, &j);

    let u = |t: f64, r: f64| jet(t, r).u;
    j.utt = (u(t + h, r) - 2.0 * j.u + u(t - h, r)) / (h * h);
    let urr = (u(t, r + h) - 2.0 * j.u + u(t, r - h)) / (h * h);
    let ur = (u(t, r + h) - u(t, r - h)) / (2.0 * h);
    let lap = urr + (n - 1.0) / r * ur;

    let x2 = r * r;
    let (b, m2) = model::coefficients(params, t);
    let e = (2.0 * model::psi(params, t, x2)).exp();
    IdentityTerms {
        lhs: e * j.ut * (j.utt - lap + b * j.ut + m2 * j.u),
        dt: (density(t + h, r) - density(t - h, r)) / (2.0 * h),
        div: (flux(r + h) - flux(r - h)) / (2.0 * h) / r.powf(n - 1.0),
        ..exact
    }
}

/// Pointwise weighted energy identity on analytic jets. Relative residual
/// against `1e-10`; the `third` term (zero by the eikonal identity) is
/// checked separately against `1e-12` of the scale. Points at `r = 0` are
/// skipped.
pub fn check_energy_identity(
    field: &impl SpaceTimeField,
    params: &ModelParams,
    points: &[(f64, f64)],
) -> CheckReport {
    let mut worst = 0.0f64;
    let mut worst_third = 0.0f64;
    let mut cases = 0;
    let mut skipped = 0;
    for &(t, r) in points {
        if r == 0.0 {
            skipped += 1;
            continue;
        }
        cases += 1;
        let terms = identity_terms(params, t, r, &field.jet(t, r));
        let scale = terms.scale();
        worst = worst.max(rel(terms.residual(), scale));
        worst_third = worst_third.max(rel(terms.third, scale));
    }
    let mut rep = CheckReport::new("energy_identity", cases, worst, 1e-10);
    rep.metrics.push(("third_term".into(), worst_third));
    if skipped > 0 {
        rep.notes.push(format!("{skipped} points at the origin skipped"));
    }
    if worst_third > 1e-12 {
        rep = rep.fail(format!("third term not zero: {worst_third:e}"));
    }
    rep
}

/// Observed order of the finite-difference residual of the energy identity
/// between steps `h` and `h/2`, as the median over the points.
pub fn energy_identity_fd_order(
    field: &impl SpaceTimeField,
    params: &ModelParams,
    points: &[(f64, f64)],
    h: f64,
) -> f64 {
    let mut orders: Vec<f64> = points
        .iter()
        .filter(|&&(_, r)| r > 2.0 * h)
        .filter_map(|&(t, r)| {
            let r1 = identity_terms_fd(params, field, t, r, h).residual().abs();
            let r2 = identity_terms_fd(params, field, t, r, h / 2.0).residual().abs();
            (r1 > 0.0 && r2 > 0.0).then(|| (r1 / r2).log2())
        })
        .collect();
    if orders.is_empty() {
        return f64::NAN;
    }
    orders.sort_by(|a, b| a.partial_cmp(b).unwrap_or(core::cmp::Ordering::Equal));
    orders[orders.len() / 2]
}

/// `v(r) = A (r/λ)^{2d} exp(-(r/λ)²/w²)`: smooth, radial, Gaussian tail.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestFunction {
    pub amplitude: f64,
    pub width: f64,
    pub degree: u32,
    pub dilation: f64,
}

impl TestFunction {
    pub fn new(amplitude: f64, width: f64, degree: u32) -> Self {
        TestFunction { amplitude, width, degree, dilation: 1.0 }
    }

    /// Gaussian decay rate `c` in `v ~ exp(-c r²)`.
    pub fn decay_rate(&self) -> f64 {
        let wl = self.width * self.dilation;
        1.0 / (wl * wl)
    }

    /// `v(r)·exp(a r²)`, evaluated without forming the weight.
    pub fn weighted_value(&self, r: f64, a: f64) -> f64 {
        let s = r / self.dilation;
        self.amplitude * s.powi(2 * self.degree as i32) * (a * r * r - self.decay_rate() * r * r).exp()
    }

    /// `v'(r)·exp(a r²)`.
    pub fn weighted_derivative(&self, r: f64, a: f64) -> f64 {
        let s = r / self.dilation;
        let w2 = self.width * self.width;
        let d = self.degree as i32;
        let poly = if d == 0 {
            -2.0 * s / w2
        } else {
            2.0 * d as f64 * s.powi(2 * d - 1) - 2.0 * s.powi(2 * d + 1) / w2
        };
        self.amplitude * poly / self.dilation * (a * r * r - self.decay_rate() * r * r).exp()
    }

    pub fn value(&self, r: f64) -> f64 {
        self.weighted_value(r, 0.0)
    }

    pub fn derivative(&self, r: f64) -> f64 {
        self.weighted_derivative(r, 0.0)
    }

    /// `Δv` in dimension `n`.
    pub fn laplacian(&self, n: u32, r: f64) -> f64 {
        let s = r / self.dilation;
        let w2 = self.width * self.width;
        let d = self.degree as f64;
        let n = n as f64;
        let di = self.degree as i32;
        let low = if self.degree == 0 { 0.0 } else { 2.0 * d * (2.0 * d + n - 2.0) * s.powi(2 * di - 2) };
        let poly = low - 2.0 / w2 * (4.0 * d + n) * s.powi(2 * di) + 4.0 / (w2 * w2) * s.powi(2 * di + 2);
        self.amplitude * poly * (-s * s / w2).exp() / (self.dilation * self.dilation)
    }

    pub fn dilated(&self, factor: f64) -> Self {
        TestFunction { dilation: self.dilation * factor, ..*self }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestFunctionFamily {
    pub seed: u64,
    pub members: Vec<TestFunction>,
}

impl TestFunctionFamily {
    /// 10 widths in `[0.4, 1.3]` × degrees `0..=4`, amplitudes drawn from
    /// `[0.5, 2]` with the given seed.
    pub fn standard(seed: u64) -> Self {
        let mut g = rng::seeded(seed);
        let mut members = Vec::with_capacity(50);
        for i in 0..10 {
            let width = 0.4 + 0.1 * i as f64;
            for degree in 0..=4 {
                let amplitude = rng::uniform(&mut g, 0.5, 2.0);
                members.push(TestFunction::new(amplitude, width, degree));
            }
        }
        TestFunctionFamily { seed, members }
    }

    pub fn dilated(&self, factor: f64) -> Self {
        TestFunctionFamily { seed: self.seed, members: self.members.iter().map(|m| m.dilated(factor)).collect() }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// Members are usable with weight `exp(a r²)` only if their Gaussian rate
/// beats `a` by this fraction.
const MIN_DECAY_MARGIN: f64 = 0.05;

fn usable(m: &TestFunction, a: f64) -> bool {
    m.decay_rate() - a > MIN_DECAY_MARGIN * m.decay_rate()
}

/// Grid resolving every usable member with weight up to `exp(a r²)`.
fn family_grid(n: u32, members: &[&TestFunction], a: f64) -> Result<RadialGrid> {
    let mut r_cut = 1.0f64;
    let mut h = f64::INFINITY;
    for m in members {
        r_cut = r_cut.max((60.0 / (m.decay_rate() - a)).sqrt());
        h = h.min(1.0 / m.decay_rate().sqrt() / 100.0);
    }
    let nodes = (r_cut / h).ceil();
    RadialGrid::new(n, nodes * h, h)
}

/// Weight coefficient `a` with `σψ(t, r) = a r²`.
fn weight_coeff(params: &ModelParams, sigma: f64, t: f64) -> f64 {
    sigma * params.mu1 / (2.0 * (1.0 + t).powi(2))
}

fn split_usable(family: &TestFunctionFamily, a: f64) -> (Vec<&TestFunction>, usize) {
    let ok: Vec<&TestFunction> = family.members.iter().filter(|m| usable(m, a)).collect();
    let skipped = family.len() - ok.len();
    (ok, skipped)
}

/// `σμ₁n(1+t)^{-2}‖e^{σψ}v‖² + ‖∇(e^{σψ}v)‖² ≤ ‖e^{σψ}∇v‖²`. Reports the
/// worst LHS/RHS ratio against the quadrature margin, plus the worst
/// relative defect of the exact expansion
/// `‖e^{σψ}∇v‖² = LHS + σ²‖e^{σψ}v∇ψ‖²` as a quadrature self-check.
pub fn check_lemma41(
    family: &TestFunctionFamily,
    params: &ModelParams,
    sigmas: &[f64],
    times: &[f64],
) -> Result<CheckReport> {
    let n = params.n;
    let mut worst = 0.0f64;
    let mut worst_expansion = 0.0f64;
    let mut cases = 0;
    let mut skipped = 0;
    for &t in times {
        let a_max = weight_coeff(params, sigmas.iter().cloned().fold(0.0, f64::max), t);
        let (members, s) = split_usable(family, a_max);
        skipped += s * sigmas.len();
        if members.is_empty() {
            continue;
        }
        let grid = family_grid(n, &members, a_max)?;
        for &sigma in sigmas {
            let a = weight_coeff(params, sigma, t);
            let c0 = sigma * params.mu1 * params.dim() / (1.0 + t).powi(2);
            for m in &members {
                let f2 = grid.integrate_with(|_, r| m.weighted_value(r, a).powi(2));
                // ∇(e^{σψ}v) = e^{σψ}(v' + 2a r v)
                let gf2 = grid.integrate_with(|_, r| {
                    (m.weighted_derivative(r, a) + 2.0 * a * r * m.weighted_value(r, a)).powi(2)
                });
                let fpsi2 = grid.integrate_with(|_, r| (2.0 * a * r * m.weighted_value(r, a)).powi(2));
                let rhs = grid.integrate_with(|_, r| m.weighted_derivative(r, a).powi(2));
                let lhs = c0 * f2 + gf2;
                cases += 1;
                if rhs > 0.0 {
                    worst = worst.max(lhs / rhs);
                    // σ²‖f∇ψ‖² with ∇ψ = 2a r/σ
                    worst_expansion = worst_expansion.max(rel(rhs - lhs - fpsi2, rhs));
                } else if lhs > 0.0 {
                    worst = f64::INFINITY;
                }
            }
        }
    }
    let mut rep = CheckReport::new("weighted_gradient", cases, worst, QUADRATURE_MARGIN);
    rep.seed = Some(family.seed);
    rep.metrics.push(("expansion_defect".into(), worst_expansion));
    if skipped > 0 {
        rep.notes.push(format!("{skipped} cases outside the weighted space skipped"));
    }
    Ok(rep)
}

/// How the family is treated across the time list in
/// [`gn_ratio_lemma42`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyScaling {
    /// Same members at every `t`; the sup must not grow by more than 5%.
    Fixed,
    /// Members dilated by `1+t`; the sup must vary by less than 5%.
    Dilated,
}

/// Per-time supremum of the Gagliardo–Nirenberg type ratio.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GnRatioReport {
    pub sup_by_time: Vec<(f64, f64)>,
    pub check: CheckReport,
}

/// Ratio `‖e^{σψ}v‖_{L^q} / ((1+t)^{1-θ(q)} ‖∇v‖^{1-σ} ‖e^{ψ}∇v‖^σ)` with
/// `θ(q) = n(1/2 - 1/q)`. Its supremum over the family estimates the
/// constant, which must not depend on `t`.
pub fn gn_ratio_lemma42(
    family: &TestFunctionFamily,
    params: &ModelParams,
    sigma: f64,
    q: f64,
    times: &[f64],
    scaling: FamilyScaling,
) -> Result<GnRatioReport> {
    if !(sigma > 0.0 && sigma <= 1.0) {
        return Err(Error::Domain(format!("σ = {sigma} must lie in (0, 1]")));
    }
    let theta = params.dim() * (0.5 - 1.0 / q);
    if !(q >= 1.0) || !(0.0..=1.0).contains(&theta) {
        return Err(Error::Domain(format!("θ(q) = {theta} must lie in [0, 1]")));
    }
    let n = params.n;
    let mut sup_by_time = Vec::with_capacity(times.len());
    let mut cases = 0;
    let mut skipped = 0;
    for &t in times {
        let fam = match scaling {
            FamilyScaling::Fixed => family.clone(),
            FamilyScaling::Dilated => family.dilated(1.0 + t),
        };
        let a1 = weight_coeff(params, 1.0, t);
        let a = weight_coeff(params, sigma, t);
        let (members, s) = split_usable(&fam, a1);
        skipped += s;
        if members.is_empty() {
            return Err(Error::Domain(format!("no family member lies in the weighted space at t = {t}")));
        }
        let grid = family_grid(n, &members, a1)?;
        let mut sup = 0.0f64;
        for m in &members {
            let lq = grid.integrate_with(|_, r| m.weighted_value(r, a).abs().powf(q)).powf(1.0 / q);
            let g = grid.integrate_with(|_, r| m.derivative(r).powi(2)).sqrt();
            let wg = grid.integrate_with(|_, r| m.weighted_derivative(r, a1).powi(2)).sqrt();
            let denom = (1.0 + t).powf(1.0 - theta) * g.powf(1.0 - sigma) * wg.powf(sigma);
            cases += 1;
            if denom > 0.0 {
                sup = sup.max(lq / denom);
            }
        }
        sup_by_time.push((t, sup));
    }
    let sups: Vec<f64> = sup_by_time.iter().map(|&(_, s)| s).collect();
    let worst = match scaling {
        FamilyScaling::Fixed => {
            let first = sups.first().copied().unwrap_or(0.0);
            sups.iter().map(|s| s / first - 1.0).fold(0.0, f64::max)
        }
        FamilyScaling::Dilated => {
            let max = sups.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let min = sups.iter().cloned().fold(f64::INFINITY, f64::min);
            max / min - 1.0
        }
    };
    let id = match scaling {
        FamilyScaling::Fixed => "gn_ratio_fixed",
        FamilyScaling::Dilated => "gn_ratio_dilated",
    };
    let mut check = CheckReport::new(id, cases, worst, 0.05);
    check.seed = Some(family.seed);
    if !sups.iter().all(|s| s.is_finite() && *s > 0.0) {
        check = check.fail("ratio supremum not finite".into());
    }
    if skipped > 0 {
        check.notes.push(format!("{skipped} cases outside the weighted space skipped"));
    }
    Ok(GnRatioReport { sup_by_time, check })
}

/// Constant `(π(1+t)²/(σμ₁))^{n/4}` of the weighted `L¹` embedding.
pub fn embedding_constant(params: &ModelParams, sigma: f64, t: f64) -> f64 {
    (PI * (1.0 + t).powi(2) / (sigma * params.mu1)).powf(params.dim() / 4.0)
}

/// `‖f‖_{L¹} ≤ C‖f‖_{L²_{σψ}}` and `‖f‖_{L²} ≤ ‖f‖_{L²_{σψ}}` on every usable
/// member; the worst of both ratios is compared with the quadrature margin.
pub fn check_embeddings(
    family: &TestFunctionFamily,
    params: &ModelParams,
    sigma: f64,
    t: f64,
) -> Result<CheckReport> {
    if params.mu1 == 0.0 {
        let mut rep = CheckReport::new("embeddings", 0, 0.0, QUADRATURE_MARGIN);
        rep.notes.push("μ₁ = 0: weighted L¹ constant undefined, skipped".into());
        return Ok(rep);
    }
    let a = weight_coeff(params, sigma, t);
    let (members, skipped) = split_usable(family, a);
    let mut worst = 0.0f64;
    let mut strict = true;
    if !members.is_empty() {
        let grid = family_grid(params.n, &members, a)?;
        let c = embedding_constant(params, sigma, t);
        for m in &members {
            let l1 = grid.integrate_with(|_, r| m.value(r).abs());
            let l2 = grid.integrate_with(|_, r| m.value(r).powi(2)).sqrt();
            let wl2 = grid.integrate_with(|_, r| m.weighted_value(r, a).powi(2)).sqrt();
            if wl2 > 0.0 {
                worst = worst.max(l1 / (c * wl2)).max(l2 / wl2);
                strict &= l2 < wl2;
            }
        }
    }
    let mut rep = CheckReport::new("embeddings", members.len(), worst, QUADRATURE_MARGIN);
    rep.seed = Some(family.seed);
    if !strict {
        rep.notes.push("L² embedding not strict for some member".into());
    }
    if skipped > 0 {
        rep.notes.push(format!("{skipped} members outside the weighted space skipped"));
    }
    Ok(rep)
}

/// `‖f‖_{L¹} / (C‖f‖_{L²_{σψ}})` for `f = e^{-2σψ}`, where Cauchy–Schwarz is
/// an equality; should be close to 1.
pub fn embedding_tightness(params: &ModelParams, sigma: f64, t: f64) -> Result<f64> {
    if !(params.mu1 > 0.0 && sigma > 0.0) {
        return Err(Error::Domain("tightness needs μ₁ > 0 and σ > 0".into()));
    }
    let a = weight_coeff(params, sigma, t);
    let h = 1.0 / (2.0 * a).sqrt() / 200.0;
    let nodes = ((60.0 / a).sqrt() / h).ceil();
    let grid = RadialGrid::new(params.n, nodes * h, h)?;
    let l1 = grid.integrate_with(|_, r| (-2.0 * a * r * r).exp());
    let wl2 = grid.integrate_with(|_, r| (-2.0 * a * r * r).exp()).sqrt();
    Ok(l1 / (embedding_constant(params, sigma, t) * wl2))
}

/// Runs the weighted gradient bound, both embeddings and the
/// Gagliardo-Nirenberg ratio (both scalings) on the standard family for one
/// parameter set.
pub fn inequality_suite(
    params: &ModelParams,
    sigmas: &[f64],
    times: &[f64],
    seed: u64,
) -> Result<Vec<CheckReport>> {
    let family = TestFunctionFamily::standard(seed);
    let mut out = Vec::new();
    out.push(check_lemma41(&family, params, sigmas, times)?);

    let mut emb_worst = 0.0f64;
    let mut emb_cases = 0;
    let mut emb_notes = Vec::new();
    for &sigma in sigmas {
        for &t in times {
            let rep = check_embeddings(&family, params, sigma, t)?;
            emb_worst = emb_worst.max(rep.worst);
            emb_cases += rep.cases;
            emb_notes.extend(rep.notes.into_iter().map(|n| format!("σ={sigma}, t={t}: {n}")));
        }
    }
    let mut emb = CheckReport::new("embeddings", emb_cases, emb_worst, QUADRATURE_MARGIN);
    emb.seed = Some(seed);
    emb.notes = emb_notes;
    if params.mu1 > 0.0 {
        let tight = embedding_tightness(params, sigmas[0], times[0])?;
        emb.metrics.push(("tightness".into(), tight));
    }
    out.push(emb);

    let q = if params.n <= 2 { 4.0 } else { 3.0 };
    for scaling in [FamilyScaling::Dilated, FamilyScaling::Fixed] {
        for &sigma in sigmas {
            let mut rep = gn_ratio_lemma42(&family, params, sigma, q, times, scaling)?.check;
            rep.notes.push(format!("σ = {sigma}, q = {q}"));
            out.push(rep);
        }
    }
    Ok(out)
}

/// Parameter grid `{1,2,3} × {1,2,4} × {0,1}` of `(n, μ₁, μ₂²)` used by the
/// identity suite.
pub fn identity_grid() -> Vec<ModelParams> {
    let mut out = Vec::new();
    for n in 1..=3 {
        for mu1 in [1.0, 2.0, 4.0] {
            for mu2sq in [0.0, 1.0] {
                out.push(ModelParams { n, mu1, mu2sq, p: 2.0 });
            }
        }
    }
    out
}

/// Weight identities at `psi_points` seeded points and the weighted energy
/// identity on [`SinGaussian`] at `energy_points` points, for every
/// parameter set of [`identity_grid`]. One report per check kind.
pub fn identity_suite(seed: u64, psi_points: usize, energy_points: usize) -> Vec<CheckReport> {
    let pts = random_points(seed, psi_points, (0.0, 10.0), (0.0, 20.0));
    let epts = random_points(seed.wrapping_add(1), energy_points, (0.0, 5.0), (0.05, 4.0));
    let field = SinGaussian { omega: 1.3, width: 1.1 };
    let mut merged: [Option<CheckReport>; 3] = [None, None, None];
    for params in identity_grid() {
        let reps = [
            check_psi_identities(&params, &pts),
            check_sign_blocks(&params, &pts),
            check_energy_identity(&field, &params, &epts),
        ];
        for (slot, rep) in merged.iter_mut().zip(reps) {
            let tag = format!("n={}, μ₁={}, μ₂²={}", params.n, params.mu1, params.mu2sq);
            let notes: Vec<String> = rep.notes.iter().map(|m| format!("{tag}: {m}")).collect();
            match slot {
                None => {
                    let mut first = rep;
                    first.notes = notes;
                    *slot = Some(first);
                }
                Some(acc) => {
                    acc.cases += rep.cases;
                    acc.worst = acc.worst.max(rep.worst);
                    acc.pass &= rep.pass;
                    acc.notes.extend(notes);
                    for (name, v) in rep.metrics {
                        match acc.metrics.iter_mut().find(|(k, _)| *k == name) {
                            Some(m) => m.1 = m.1.max(v),
                            None => acc.metrics.push((name, v)),
                        }
                    }
                }
            }
        }
    }
    merged
        .into_iter()
        .flatten()
        .map(|mut r| {
            r.seed = Some(seed);
            r
        })
        .collect()
}

/// Bihari's inequality for `g(u) = √(2u)` (so `G(u) = √(2u)`) on the exact
/// equality trajectory `√(2y) = √(2M) + ∫₀ᵗ k` with `k = 1 + sin t`, plus
/// the degenerate case `k ≡ 0`.
pub fn bihari_suite(samples: usize, t_end: f64) -> Result<Vec<CheckReport>> {
    if samples < 2 {
        return Err(Error::Config(format!("bihari suite needs at least 2 samples, got {samples}")));
    }
    let m = 0.5;
    let g = |u: f64| (2.0 * u).sqrt();
    let times: Vec<f64> = (0..samples).map(|i| t_end * i as f64 / (samples - 1) as f64).collect();
    let k: Vec<f64> = times.iter().map(|t| 1.0 + t.sin()).collect();
    let y: Vec<f64> = times
        .iter()
        .map(|&t| {
            let s = (2.0 * m).sqrt() + t + 1.0 - t.cos();
            0.5 * s * s
        })
        .collect();
    let mut equality = bihari_check(&times, &y, &k, g, g, m, 1e-8)?;
    equality.id = "bihari_equality".into();
    if equality.metric("equality_gap").is_none_or(|gap| gap > 1e-8) {
        equality = equality.fail("equality case not attained within 1e-8".into());
    }
    let zeros = alloc::vec![0.0; samples];
    let flat = alloc::vec![m; samples];
    let mut degenerate = bihari_check(&times, &flat, &zeros, g, g, m, 0.0)?;
    degenerate.id = "bihari_k_zero".into();
    Ok(alloc::vec![equality, degenerate])
}

/// Cumulative trapezoid integral of sampled values.
pub fn cumulative_trapezoid(times: &[f64], values: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(times.len());
    let mut acc = 0.0;
    for i in 0..times.len() {
        if i > 0 {
            acc += 0.5 * (times[i] - times[i - 1]) * (values[i] + values[i - 1]);
        }
        out.push(acc);
    }
    out
}

/// Bihari's inequality on sampled data: if
/// `y(t) ≤ M + ∫₀ᵗ k g(y) ds` then `G(y(t)) ≤ G(M) + ∫₀ᵗ k ds`, with `G`
/// an antiderivative of `1/g` vanishing at 0. Integrals are trapezoidal on
/// the sample times; `tol` is relative to `1 + |RHS|`.
///
/// `worst` is the largest normalized excess of the conclusion; the metric
/// `equality_gap` is the largest normalized `|G(y) - G(M) - ∫k|`.
#[allow(clippy::too_many_arguments)]
pub fn bihari_check(
    times: &[f64],
    y: &[f64],
    k: &[f64],
    g: impl Fn(f64) -> f64,
    big_g: impl Fn(f64) -> f64,
    m: f64,
    tol: f64,
) -> Result<CheckReport> {
    if y.len() != times.len() {
        return Err(Error::LengthMismatch { expected: times.len(), found: y.len() });
    }
    if k.len() != times.len() {
        return Err(Error::LengthMismatch { expected: times.len(), found: k.len() });
    }
    if times.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Input("sample times must increase strictly".into()));
    }
    if k.iter().any(|v| !(*v >= 0.0)) {
        return Err(Error::Input("k must be nonnegative".into()));
    }
    let lo = y.iter().cloned().fold(m, f64::min).max(0.0);
    let hi = y.iter().cloned().fold(m, f64::max);
    let mut prev = f64::NEG_INFINITY;
    for i in 0..=256 {
        let u = lo + (hi - lo) * i as f64 / 256.0;
        let gu = g(u);
        if !(gu >= 0.0) || gu < prev {
            return Err(Error::Input(format!("g must be nonnegative and non-decreasing (fails at u = {u})")));
        }
        prev = gu;
    }

    let kg: Vec<f64> = k.iter().zip(y).map(|(k, y)| k * g(*y)).collect();
    let hyp = cumulative_trapezoid(times, &kg);
    let kint = cumulative_trapezoid(times, k);
    let mut hypothesis_ok = true;
    let mut worst = f64::NEG_INFINITY;
    let mut gap = 0.0f64;
    for i in 0..times.len() {
        let bound = m + hyp[i];
        if y[i] - bound > tol * (1.0 + bound.abs()) {
            hypothesis_ok = false;
        }
        let rhs = big_g(m) + kint[i];
        let excess = (big_g(y[i]) - rhs) / (1.0 + rhs.abs());
        worst = worst.max(excess);
        gap = gap.max(excess.abs());
    }
    let mut rep = CheckReport::new("bihari", times.len(), worst, tol);
    rep.metrics.push(("equality_gap".into(), gap));
    if !hypothesis_ok {
        rep = rep.fail("hypothesis violated".into());
    }
    Ok(rep)
}
