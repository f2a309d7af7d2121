//! Closed-form model quantities.
//!
//! Everything here is a pure function of [`ModelParams`]; nothing derived is
//! cached, so δ can never drift out of sync with `(μ₁, μ₂²)`.

use alloc::format;
// shadowed by the inherent methods whenever std is linked
#[allow(unused_imports)]
use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative tolerance used to decide `δ = (n+1)²` and `κ = (1+√δ-n)/2`.
pub const BORDERLINE_RTOL: f64 = 1e-12;

/// Physical parameters `(n, μ₁, μ₂², p)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Spatial dimension.
    pub n: u32,
    /// Damping coefficient μ₁.
    pub mu1: f64,
    /// Mass coefficient μ₂².
    pub mu2sq: f64,
    /// Nonlinearity exponent.
    pub p: f64,
}

impl ModelParams {
    pub fn new(n: u32, mu1: f64, mu2sq: f64, p: f64) -> Result<Self> {
        let params = ModelParams { n, mu1, mu2sq, p };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidParams("dimension n must be at least 1".into()));
        }
        if !(self.mu1 >= 0.0 && self.mu1.is_finite()) {
            return Err(Error::InvalidParams(format!("mu1 = {} must be >= 0", self.mu1)));
        }
        if !(self.mu2sq >= 0.0 && self.mu2sq.is_finite()) {
            return Err(Error::InvalidParams(format!("mu2sq = {} must be >= 0", self.mu2sq)));
        }
        if !(self.p > 1.0 && self.p.is_finite()) {
            return Err(Error::InvalidParams(format!("p = {} must be > 1", self.p)));
        }
        Ok(())
    }

    pub fn dim(&self) -> f64 {
        self.n as f64
    }

    pub fn delta(&self) -> f64 {
        delta(self)
    }

    /// `√δ`, or `None` when δ < 0.
    pub fn sqrt_delta(&self) -> Option<f64> {
        let d = self.delta();
        (d >= 0.0).then(|| d.sqrt())
    }

    /// Exponent γ = (μ₁-1)/2 - √δ/2 of the transformation `v = (1+t)^γ u`.
    pub fn transform_exponent(&self) -> Result<f64> {
        let sd = self.sqrt_delta().ok_or_else(sqrt_delta_undefined)?;
        Ok((self.mu1 - 1.0) / 2.0 - sd / 2.0)
    }

    /// Shifted dimension `n + (μ₁-1)/2 - √δ/2`.
    pub fn shifted_dimension(&self) -> Result<f64> {
        Ok(self.dim() + self.transform_exponent()?)
    }

    /// Whether δ equals `(n+1)²` up to [`BORDERLINE_RTOL`].
    pub fn is_log_borderline(&self) -> bool {
        let target = (self.dim() + 1.0).powi(2);
        (self.delta() - target).abs() <= BORDERLINE_RTOL * target
    }
}

fn sqrt_delta_undefined() -> Error {
    Error::Regime("√δ undefined (δ < 0)".into())
}

/// δ = (μ₁-1)² - 4μ₂². May be negative.
pub fn delta(params: &ModelParams) -> f64 {
    (params.mu1 - 1.0).powi(2) - 4.0 * params.mu2sq
}

/// Fujita exponent `1 + 2/d`.
pub fn fujita(d: f64) -> Result<f64> {
    if !(d > 0.0) {
        return Err(Error::Domain(format!("fujita exponent needs d > 0, got {d}")));
    }
    Ok(1.0 + 2.0 / d)
}

/// Critical exponent `p_Fuj(n + (μ₁-1)/2 - √δ/2)`.
pub fn critical_exponent(params: &ModelParams) -> Result<f64> {
    let d = params.shifted_dimension()?;
    if !(d > 0.0) {
        return Err(Error::Domain(format!("shifted dimension {d} is not positive")));
    }
    fujita(d)
}

/// Which of the two main results apply to a parameter set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegimeReport {
    pub delta: f64,
    pub sqrt_delta: Option<f64>,
    /// Small-data global existence: δ ≥ (n+1)², μ₁ > 0, p > p_crit and
    /// `p ≤ n/(n-2)` when n ≥ 3.
    pub thm22_applicable: bool,
    /// Blow-up: δ ≥ 0 and `1 < p ≤ p_crit`.
    pub thm23_applicable: bool,
    pub p_crit: Option<f64>,
}

pub fn regime_check(params: &ModelParams) -> RegimeReport {
    let delta = params.delta();
    let sqrt_delta = params.sqrt_delta();
    let p_crit = critical_exponent(params).ok();
    let n = params.dim();
    let p = params.p;

    let thm22_applicable = match p_crit {
        Some(pc) => {
            let target = (n + 1.0).powi(2);
            let delta_ok = delta >= target || params.is_log_borderline();
            let gn_ok = params.n < 3 || p <= n / (n - 2.0);
            params.mu1 > 0.0 && delta_ok && p > pc && gn_ok
        }
        None => false,
    };
    let thm23_applicable = match p_crit {
        Some(pc) => delta >= 0.0 && p > 1.0 && p <= pc,
        None => false,
    };

    RegimeReport { delta, sqrt_delta, thm22_applicable, thm23_applicable, p_crit }
}

/// ψ(t,x) = μ₁|x|² / (2(1+t)²).
pub fn psi(params: &ModelParams, t: f64, x_norm_sq: f64) -> f64 {
    params.mu1 * x_norm_sq / (2.0 * (1.0 + t).powi(2))
}

/// ∂ψ/∂t = -μ₁|x|² / (1+t)³.
pub fn psi_t(params: &ModelParams, t: f64, x_norm_sq: f64) -> f64 {
    -params.mu1 * x_norm_sq / (1.0 + t).powi(3)
}

/// Radial derivative ∂ψ/∂r = μ₁ r / (1+t)².
pub fn psi_r(params: &ModelParams, t: f64, r: f64) -> f64 {
    params.mu1 * r / (1.0 + t).powi(2)
}

/// |∇ψ|² = μ₁²|x|² / (1+t)⁴.
pub fn grad_psi_norm_sq(params: &ModelParams, t: f64, x_norm_sq: f64) -> f64 {
    params.mu1.powi(2) * x_norm_sq / (1.0 + t).powi(4)
}

/// Δψ = nμ₁ / (1+t)².
pub fn laplacian_psi(params: &ModelParams, t: f64) -> f64 {
    params.dim() * params.mu1 / (1.0 + t).powi(2)
}

/// Damping and mass coefficients `(b(t), m²(t)) = (μ₁/(1+t), μ₂²/(1+t)²)`.
pub fn coefficients(params: &ModelParams, t: f64) -> (f64, f64) {
    let s = 1.0 + t;
    (params.mu1 / s, params.mu2sq / (s * s))
}

/// d(m²)/dt = -2μ₂²/(1+t)³.
pub fn mass_coefficient_dt(params: &ModelParams, t: f64) -> f64 {
    -2.0 * params.mu2sq / (1.0 + t).powi(3)
}

/// Decay exponents of the linear problem.
///
/// `l2_exponent` and `grad_exponent` are the powers of `(1+t)` bounding
/// `‖u‖_{L²}` and `‖(∇u, u_t)‖_{L²}`; the gradient bound carries an extra
/// `1 + √log(1+t)` factor when `log_correction` is set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayExponentTable {
    pub l2_exponent: f64,
    pub grad_exponent: f64,
    pub log_correction: bool,
    /// Threshold `(1+√δ-n)/2` where the `Ḣ^κ` rate changes branch.
    pub kappa_threshold: f64,
    /// Power of `(1+s)` in the prefactor bounding solutions with data
    /// `(0, u₁)` prescribed at time `s`: `(1+μ₁)/2 - √δ/2`.
    pub initial_time_exponent: f64,
    mu1: f64,
    n: f64,
    sqrt_delta: f64,
}

impl DecayExponentTable {
    /// Rate for `‖u(t)‖_{Ḣ^κ}`, `κ ∈ [0,1]`, as `(exponent, log_flag)`.
    ///
    /// Below the threshold the rate is `-κ - (n+μ₁)/2 + (1+√δ)/2`; at the
    /// threshold it is `-μ₁/2` with the `1 + √log(1+t)` factor; above it is
    /// `-μ₁/2` flat.
    pub fn hkappa_case(&self, kappa: f64) -> (f64, bool) {
        let thr = self.kappa_threshold;
        let tol = BORDERLINE_RTOL * thr.abs().max(1.0);
        if (kappa - thr).abs() <= tol {
            (-self.mu1 / 2.0, true)
        } else if kappa < thr {
            (-kappa - (self.n + self.mu1) / 2.0 + (1.0 + self.sqrt_delta) / 2.0, false)
        } else {
            (-self.mu1 / 2.0, false)
        }
    }
}

pub fn decay_exponents(params: &ModelParams) -> Result<DecayExponentTable> {
    let delta = params.delta();
    if !(delta > 0.0) {
        return Err(Error::Regime(format!("decay exponents need δ > 0, got δ = {delta}")));
    }
    let sd = delta.sqrt();
    let n = params.dim();
    let l2 = -n / 2.0 - params.mu1 / 2.0 + 0.5 + sd / 2.0;
    Ok(DecayExponentTable {
        l2_exponent: l2,
        grad_exponent: l2 - 1.0,
        log_correction: params.is_log_borderline(),
        kappa_threshold: (1.0 + sd - n) / 2.0,
        initial_time_exponent: (1.0 + params.mu1) / 2.0 - sd / 2.0,
        mu1: params.mu1,
        n,
        sqrt_delta: sd,
    })
}

/// ℓ_δ(t): `1` when δ > (n+1)², `1 + √log(1+t)` when δ = (n+1)².
pub fn ell_delta(params: &ModelParams, t: f64) -> Result<f64> {
    if params.is_log_borderline() {
        return Ok(ell(t));
    }
    let target = (params.dim() + 1.0).powi(2);
    if params.delta() > target {
        Ok(1.0)
    } else {
        Err(Error::Regime(format!(
            "ℓ_δ needs δ ≥ (n+1)² = {target}, got δ = {}",
            params.delta()
        )))
    }
}

/// `1 + √log(1+t)`.
pub fn ell(t: f64) -> f64 {
    1.0 + t.ln_1p().sqrt()
}

/// `1 + √log((1+t)/(1+s))`.
pub fn ell_shifted(t: f64, s: f64) -> f64 {
    1.0 + ((1.0 + t) / (1.0 + s)).ln().max(0.0).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mp(n: u32, mu1: f64, mu2sq: f64, p: f64) -> ModelParams {
        ModelParams::new(n, mu1, mu2sq, p).unwrap()
    }

    #[test]
    fn delta_examples() {
        assert_eq!(delta(&mp(1, 1.0, 0.0, 2.0)), 0.0);
        assert_eq!(delta(&mp(1, 4.0, 0.0, 2.0)), 9.0);
        assert_eq!(delta(&mp(1, 2.0, 1.0, 2.0)), -3.0);
    }

    #[test]
    fn fujita_examples() {
        assert_eq!(fujita(1.0).unwrap(), 3.0);
        assert_eq!(fujita(2.0).unwrap(), 2.0);
        assert!((fujita(1.5).unwrap() - 7.0 / 3.0).abs() < 1e-15);
        assert!(matches!(fujita(0.0), Err(Error::Domain(_))));
        assert!(matches!(fujita(-1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn critical_exponent_examples() {
        assert_eq!(critical_exponent(&mp(1, 4.0, 0.0, 2.0)).unwrap(), 3.0);
        assert_eq!(critical_exponent(&mp(2, 5.0, 0.0, 2.0)).unwrap(), 2.0);
        let pc = critical_exponent(&mp(1, 5.0, 1.75, 2.0)).unwrap();
        assert!((pc - 7.0 / 3.0).abs() < 1e-14);
        assert!(matches!(critical_exponent(&mp(1, 2.0, 1.0, 2.0)), Err(Error::Regime(_))));
        // μ₁ = 0, μ₂² = 0, n = 1: shifted dimension 0
        assert!(matches!(critical_exponent(&mp(1, 0.0, 0.0, 2.0)), Err(Error::Domain(_))));
    }

    #[test]
    fn regime_examples() {
        let r = regime_check(&mp(1, 4.0, 0.0, 4.0));
        assert!(r.thm22_applicable && !r.thm23_applicable);
        let r = regime_check(&mp(1, 4.0, 0.0, 2.0));
        assert!(!r.thm22_applicable && r.thm23_applicable);
        let r = regime_check(&mp(3, 6.0, 0.0, 4.0));
        assert!(!r.thm22_applicable);
        let r = regime_check(&mp(1, 2.0, 1.0, 2.0));
        assert!(r.sqrt_delta.is_none() && r.p_crit.is_none());
        assert!(!r.thm22_applicable && !r.thm23_applicable);
    }

    #[test]
    fn psi_examples() {
        let p = mp(1, 2.0, 0.0, 2.0);
        assert_eq!(psi(&p, 1.0, 4.0), 1.0);
        assert_eq!(psi(&mp(1, 7.0, 1.0, 2.0), 3.0, 0.0), 0.0);
        assert_eq!(psi_t(&mp(1, 7.0, 1.0, 2.0), 3.0, 0.0), 0.0);
        assert_eq!(laplacian_psi(&mp(3, 2.0, 0.0, 2.0), 0.0), 6.0);
    }

    #[test]
    fn coefficient_examples() {
        let p = mp(1, 4.0, 1.0, 2.0);
        assert_eq!(coefficients(&p, 0.0), (4.0, 1.0));
        assert_eq!(coefficients(&p, 1.0), (2.0, 0.25));
        assert_eq!(coefficients(&mp(2, 0.0, 3.0, 2.0), 5.0).0, 0.0);
    }

    #[test]
    fn decay_exponent_examples() {
        let t = decay_exponents(&mp(1, 4.0, 0.0, 2.0)).unwrap();
        assert_eq!(t.l2_exponent, -0.5);
        assert_eq!(t.grad_exponent, -1.5);
        assert!(!t.log_correction);
        assert_eq!(t.hkappa_case(0.0), (-0.5, false));
        assert_eq!(t.kappa_threshold, 1.5);
        let t = decay_exponents(&mp(1, 3.0, 0.0, 2.0)).unwrap();
        assert!(t.log_correction);
        assert!(matches!(decay_exponents(&mp(1, 1.0, 0.0, 2.0)), Err(Error::Regime(_))));
    }

    #[test]
    fn hkappa_branches() {
        // n = 1, μ₁ = 3: threshold (1 + 2 - 1)/2 = 1
        let t = decay_exponents(&mp(1, 3.0, 0.0, 2.0)).unwrap();
        assert_eq!(t.hkappa_case(1.0), (-1.5, true));
        assert_eq!(t.hkappa_case(0.0), (-0.5, false));
        // n = 3, μ₁ = 3: threshold 0, so κ > 0 is the flat branch
        let t = decay_exponents(&mp(3, 3.0, 0.0, 2.0)).unwrap();
        assert_eq!(t.hkappa_case(0.5), (-1.5, false));
        assert_eq!(t.hkappa_case(0.0), (-1.5, true));
    }

    #[test]
    fn ell_delta_examples() {
        assert_eq!(ell_delta(&mp(1, 4.0, 0.0, 2.0), 17.0).unwrap(), 1.0);
        let border = mp(1, 3.0, 0.0, 2.0);
        assert!((ell_delta(&border, core::f64::consts::E - 1.0).unwrap() - 2.0).abs() < 1e-15);
        assert_eq!(ell_delta(&border, 0.0).unwrap(), 1.0);
        assert!(matches!(ell_delta(&mp(1, 2.0, 0.0, 2.0), 1.0), Err(Error::Regime(_))));
    }

    #[test]
    fn invalid_params_rejected() {
        assert!(ModelParams::new(0, 1.0, 0.0, 2.0).is_err());
        assert!(ModelParams::new(1, -1.0, 0.0, 2.0).is_err());
        assert!(ModelParams::new(1, 1.0, -0.1, 2.0).is_err());
        assert!(ModelParams::new(1, 1.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn massless_critical_exponent_is_fujita() {
        for n in 1..=4u32 {
            for mu1 in [1.0, 1.5, 2.0, 4.0, 6.0, 10.0] {
                let p = mp(n, mu1, 0.0, 2.0);
                assert_eq!(critical_exponent(&p).unwrap(), fujita(n as f64).unwrap());
            }
        }
    }
}
