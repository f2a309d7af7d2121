//! Flat JSON experiment configuration with `key=value` overrides.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use scalewave_core::analysis::{ClassifyCriteria, SweepPlan};
use scalewave_core::odi::OdiProblem;
use scalewave_core::profile::RadialProfile;
use scalewave_core::{ModelParams, RadialGrid, RunConfig};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileKind {
    Zero,
    Bump,
    Gaussian,
}

/// Every field the CLI reads. Model and run fields carry the names of
/// [`ModelParams`] and [`RunConfig`]; the rest describe the grid, the data
/// and the per-subcommand inputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub n: u32,
    pub mu1: f64,
    pub mu2sq: f64,
    pub p: f64,

    pub initial_time: f64,
    pub t_max: f64,
    pub nonlinear: bool,
    pub cfl_safety: f64,
    pub blowup_threshold: f64,
    pub record_every: usize,
    pub support_margin: f64,

    pub r_max: f64,
    pub dr: f64,
    pub u0_kind: ProfileKind,
    pub u0_amplitude: f64,
    /// Bump radius or Gaussian width.
    pub u0_scale: f64,
    pub u1_kind: ProfileKind,
    pub u1_amplitude: f64,
    pub u1_scale: f64,

    pub p_values: Vec<f64>,
    pub amplitudes: Vec<f64>,
    pub energy_growth_bound: f64,
    pub fit_t_min: Option<f64>,
    pub fit_t_max: Option<f64>,

    pub sigmas: Vec<f64>,
    pub times: Vec<f64>,
    pub psi_points: usize,
    pub energy_points: usize,
    pub bihari_samples: usize,
    pub bihari_t_end: f64,

    pub odi_k0: f64,
    pub odi_k1: f64,
    pub odi_alpha: f64,
    pub odi_f0: f64,
    pub odi_df0: f64,
    pub odi_dt: f64,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            n: 1,
            mu1: 4.0,
            mu2sq: 0.0,
            p: 2.0,
            initial_time: 0.0,
            t_max: 200.0,
            nonlinear: true,
            cfl_safety: 0.5,
            blowup_threshold: scalewave_core::solver::DEFAULT_BLOWUP_THRESHOLD,
            record_every: 10,
            support_margin: 1.0,
            r_max: 230.0,
            dr: 0.05,
            u0_kind: ProfileKind::Bump,
            u0_amplitude: 1.0,
            u0_scale: 2.0,
            u1_kind: ProfileKind::Zero,
            u1_amplitude: 1.0,
            u1_scale: 2.0,
            p_values: Vec::new(),
            amplitudes: vec![1.0],
            energy_growth_bound: 10.0,
            fit_t_min: None,
            fit_t_max: None,
            sigmas: vec![0.25, 0.5, 1.0],
            times: vec![0.0, 1.0, 4.0, 9.0],
            psi_points: 1000,
            energy_points: 100,
            bihari_samples: 20_001,
            bihari_t_end: 2.0,
            odi_k0: 4.0,
            odi_k1: 1.0,
            odi_alpha: -2.0,
            odi_f0: 1.0,
            odi_df0: 1.0,
            odi_dt: 1e-3,
        }
    }
}

fn profile(kind: ProfileKind, amplitude: f64, scale: f64) -> RadialProfile {
    match kind {
        ProfileKind::Zero => RadialProfile::Zero,
        ProfileKind::Bump => RadialProfile::Bump {
            amplitude,
            radius: scale,
        },
        ProfileKind::Gaussian => RadialProfile::Gaussian {
            amplitude,
            width: scale,
        },
    }
}

impl Config {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    /// Applies `key=value` overrides in order. Values are parsed as JSON;
    /// bare words become strings and comma lists fill array fields.
    pub fn with_overrides(&self, overrides: &[String]) -> Result<Self> {
        let mut map = match serde_json::to_value(self)? {
            Value::Object(m) => m,
            _ => unreachable!("Config serializes to an object"),
        };
        for item in overrides {
            let (key, raw) = item
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("--set expects KEY=VALUE, got {item:?}")))?;
            let key = key.trim();
            let slot = map
                .get(key)
                .ok_or_else(|| CliError::Config(format!("unknown key {key:?}")))?;
            let value = if slot.is_array() && !raw.trim_start().starts_with('[') {
                let parts: std::result::Result<Vec<Value>, _> = raw
                    .split(',')
                    .filter(|p| !p.trim().is_empty())
                    .map(|p| serde_json::from_str(p.trim()))
                    .collect();
                Value::Array(parts.map_err(|e| CliError::Config(format!("{key}: {e}")))?)
            } else {
                serde_json::from_str::<Value>(raw)
                    .unwrap_or_else(|_| Value::String(raw.to_string()))
            };
            map.insert(key.to_string(), value);
        }
        serde_json::from_value(Value::Object(map)).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn params(&self) -> ModelParams {
        ModelParams {
            n: self.n,
            mu1: self.mu1,
            mu2sq: self.mu2sq,
            p: self.p,
        }
    }

    pub fn run_config(&self) -> RunConfig {
        RunConfig {
            params: self.params(),
            initial_time: self.initial_time,
            t_max: self.t_max,
            nonlinear: self.nonlinear,
            cfl_safety: self.cfl_safety,
            blowup_threshold: self.blowup_threshold,
            record_every: self.record_every,
            support_margin: self.support_margin,
        }
    }

    pub fn grid(&self) -> Result<RadialGrid> {
        Ok(RadialGrid::new(self.n, self.r_max, self.dr)?)
    }

    pub fn u0(&self) -> RadialProfile {
        profile(self.u0_kind, self.u0_amplitude, self.u0_scale)
    }

    pub fn u1(&self) -> RadialProfile {
        profile(self.u1_kind, self.u1_amplitude, self.u1_scale)
    }

    pub fn fit_window(&self) -> Option<(f64, f64)> {
        match (self.fit_t_min, self.fit_t_max) {
            (None, None) => None,
            (lo, hi) => Some((lo.unwrap_or(self.t_max / 10.0), hi.unwrap_or(self.t_max))),
        }
    }

    /// Sweep over `p_values × amplitudes`; the data shapes are `u0`, `u1`
    /// with their configured amplitudes, scaled by each sweep amplitude.
    pub fn sweep_plan(&self) -> SweepPlan {
        SweepPlan {
            r_max: self.r_max,
            dr: self.dr,
            config: self.run_config(),
            u0: self.u0(),
            u1: self.u1(),
            p_values: self.p_values.clone(),
            amplitudes: self.amplitudes.clone(),
            criteria: ClassifyCriteria {
                energy_growth_bound: self.energy_growth_bound,
                fit_window: self.fit_window(),
            },
        }
    }

    pub fn odi_problem(&self) -> OdiProblem {
        OdiProblem {
            k0: self.odi_k0,
            k1: self.odi_k1,
            alpha: self.odi_alpha,
            p: self.p,
            f0: self.odi_f0,
            df0: self.odi_df0,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_roundtrip() {
        let c = Config::default();
        let text = serde_json::to_string(&c).unwrap();
        assert_eq!(Config::from_json(&text).unwrap(), c);
        assert_eq!(Config::from_json("{}").unwrap(), c);
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(matches!(
            Config::from_json(r#"{"mu3": 1}"#),
            Err(CliError::Config(_))
        ));
        let err = Config::default()
            .with_overrides(&["mu3=1".into()])
            .unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn overrides_parse_each_type() {
        let c = Config::default()
            .with_overrides(&[
                "p=3.5".into(),
                "nonlinear=false".into(),
                "u1_kind=gaussian".into(),
                "p_values=1.5,2,2.5".into(),
                "amplitudes=[0.01]".into(),
                "sigmas=0.5".into(),
                "times=".into(),
                "fit_t_min=20".into(),
                "p=4".into(),
            ])
            .unwrap();
        assert_eq!(c.p, 4.0);
        assert!(!c.nonlinear);
        assert_eq!(c.u1_kind, ProfileKind::Gaussian);
        assert_eq!(c.p_values, vec![1.5, 2.0, 2.5]);
        assert_eq!(c.amplitudes, vec![0.01]);
        assert_eq!(c.sigmas, vec![0.5]);
        assert!(c.times.is_empty());
        assert_eq!(c.fit_window(), Some((20.0, 200.0)));
    }

    #[test]
    fn bad_overrides() {
        let c = Config::default();
        assert_eq!(c.with_overrides(&["p".into()]).unwrap_err().exit_code(), 1);
        assert_eq!(
            c.with_overrides(&["n=-1".into()]).unwrap_err().exit_code(),
            2
        );
        assert_eq!(
            c.with_overrides(&["u0_kind=square".into()])
                .unwrap_err()
                .exit_code(),
            2
        );
    }

    #[test]
    fn plan_scales_profiles() {
        let c = Config::default()
            .with_overrides(&["u1_kind=bump".into(), "u1_amplitude=0.5".into()])
            .unwrap();
        assert_eq!(
            c.u1(),
            RadialProfile::Bump {
                amplitude: 0.5,
                radius: 2.0
            }
        );
        assert_eq!(c.sweep_plan().config, c.run_config());
    }
}
