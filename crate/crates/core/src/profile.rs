//! Radial initial-data profiles.

// shadowed by the inherent methods whenever std is linked
#[allow(unused_imports)]
use num_traits::Float;
use serde::{Deserialize, Serialize};

/// A radial function `r ↦ f(r)` used as initial data.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RadialProfile {
    Zero,
    /// Smooth compactly supported bump `A·exp(1 - 1/(1 - (r/R)²))` for
    /// `r < R`, zero outside. Peak value `A` at the origin.
    Bump { amplitude: f64, radius: f64 },
    /// `A·exp(-r²/w²)`.
    Gaussian { amplitude: f64, width: f64 },
}

impl RadialProfile {
    pub fn eval(&self, r: f64) -> f64 {
        match *self {
            RadialProfile::Zero => 0.0,
            RadialProfile::Bump { amplitude, radius } => {
                let s = r / radius;
                if s.abs() >= 1.0 {
                    0.0
                } else {
                    amplitude * (1.0 - 1.0 / (1.0 - s * s)).exp()
                }
            }
            RadialProfile::Gaussian { amplitude, width } => {
                amplitude * (-(r * r) / (width * width)).exp()
            }
        }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        match *self {
            RadialProfile::Zero => RadialProfile::Zero,
            RadialProfile::Bump { amplitude, radius } => {
                RadialProfile::Bump { amplitude: amplitude * factor, radius }
            }
            RadialProfile::Gaussian { amplitude, width } => {
                RadialProfile::Gaussian { amplitude: amplitude * factor, width }
            }
        }
    }

    /// Radius outside which the profile is zero (`None` for unbounded support).
    pub fn support_radius(&self) -> Option<f64> {
        match *self {
            RadialProfile::Zero => Some(0.0),
            RadialProfile::Bump { radius, .. } => Some(radius),
            RadialProfile::Gaussian { .. } => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bump_shape() {
        let b = RadialProfile::Bump { amplitude: 2.0, radius: 1.5 };
        assert_eq!(b.eval(0.0), 2.0);
        assert_eq!(b.eval(1.5), 0.0);
        assert_eq!(b.eval(3.0), 0.0);
        assert!(b.eval(1.0) > 0.0 && b.eval(1.0) < 2.0);
        assert_eq!(b.scaled(0.5).eval(0.0), 1.0);
    }

    #[test]
    fn gaussian_shape() {
        let g = RadialProfile::Gaussian { amplitude: 1.0, width: 1.0 };
        assert_eq!(g.eval(0.0), 1.0);
        assert!((g.eval(1.0) - (-1.0f64).exp()).abs() < 1e-15);
        assert_eq!(g.support_radius(), None);
    }
}
