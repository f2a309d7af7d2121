//! Small ODE integrators for systems of fixed dimension.
//!
//! [`rk4_step`] is the fixed-step workhorse; [`Dopri5`] is an adaptive
//! Dormand–Prince 5(4) pair used as an independent reference.

// shadowed by the inherent methods whenever std is linked
#[allow(unused_imports)]
use num_traits::Float;

/// One classical fourth-order Runge–Kutta step of `y' = f(t, y)`.
pub fn rk4_step<const D: usize>(
    f: &impl Fn(f64, &[f64; D]) -> [f64; D],
    t: f64,
    y: &[f64; D],
    h: f64,
) -> [f64; D] {
    let axpy = |y: &[f64; D], k: &[f64; D], a: f64| {
        let mut out = *y;
        for i in 0..D {
            out[i] += a * k[i];
        }
        out
    };
    let k1 = f(t, y);
    let k2 = f(t + 0.5 * h, &axpy(y, &k1, 0.5 * h));
    let k3 = f(t + 0.5 * h, &axpy(y, &k2, 0.5 * h));
    let k4 = f(t + h, &axpy(y, &k3, h));
    let mut out = *y;
    for i in 0..D {
        out[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    out
}

/// Adaptive Dormand–Prince 5(4) with mixed absolute/relative error control.
#[derive(Debug, Clone, Copy)]
pub struct Dopri5 {
    pub rtol: f64,
    pub atol: f64,
    pub h_init: f64,
    pub max_steps: usize,
}

impl Default for Dopri5 {
    fn default() -> Self {
        Dopri5 { rtol: 1e-12, atol: 1e-14, h_init: 1e-4, max_steps: 2_000_000 }
    }
}

/// Why an adaptive integration stopped before the requested end time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OdeStop {
    Reached,
    /// Step size fell below round-off at time `t` (typically a singularity).
    StepUnderflow { t: f64 },
    MaxSteps { t: f64 },
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// b - b* (difference between 5th and embedded 4th order weights)
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

impl Dopri5 {
    /// Integrates from `(t0, y0)` to `t_end`, returning the final state and
    /// the reason the integration stopped.
    pub fn integrate<const D: usize>(
        &self,
        f: impl Fn(f64, &[f64; D]) -> [f64; D],
        t0: f64,
        y0: [f64; D],
        t_end: f64,
    ) -> ([f64; D], f64, OdeStop) {
        let lin = |y: &[f64; D], terms: &[(f64, &[f64; D])]| {
            let mut out = *y;
            for (c, k) in terms {
                for i in 0..D {
                    out[i] += c * k[i];
                }
            }
            out
        };
        let mut t = t0;
        let mut y = y0;
        let mut h = self.h_init.min(t_end - t0);
        let mut k1 = f(t, &y);
        for _ in 0..self.max_steps {
            if t >= t_end {
                return (y, t, OdeStop::Reached);
            }
            if t + h > t_end {
                h = t_end - t;
            }
            let k2 = f(t + C2 * h, &lin(&y, &[(h * A21, &k1)]));
            let k3 = f(t + C3 * h, &lin(&y, &[(h * A31, &k1), (h * A32, &k2)]));
            let k4 = f(t + C4 * h, &lin(&y, &[(h * A41, &k1), (h * A42, &k2), (h * A43, &k3)]));
            let k5 = f(
                t + C5 * h,
                &lin(&y, &[(h * A51, &k1), (h * A52, &k2), (h * A53, &k3), (h * A54, &k4)]),
            );
            let k6 = f(
                t + h,
                &lin(
                    &y,
                    &[(h * A61, &k1), (h * A62, &k2), (h * A63, &k3), (h * A64, &k4), (h * A65, &k5)],
                ),
            );
            let y_new = lin(
                &y,
                &[(h * B1, &k1), (h * B3, &k3), (h * B4, &k4), (h * B5, &k5), (h * B6, &k6)],
            );
            let k7 = f(t + h, &y_new);

            let mut err = 0.0f64;
            for i in 0..D {
                let e = h
                    * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
                let sc = self.atol + self.rtol * y[i].abs().max(y_new[i].abs());
                err = err.max((e / sc).abs());
            }
            let finite = y_new.iter().all(|v| v.is_finite());
            if finite && err <= 1.0 {
                t += h;
                y = y_new;
                k1 = k7;
            }
            let factor = if !finite || !err.is_finite() {
                0.1
            } else if err == 0.0 {
                5.0
            } else {
                (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
            };
            h *= factor;
            if h <= 1e-15 * t.abs().max(1.0) {
                return (y, t, OdeStop::StepUnderflow { t });
            }
        }
        (y, t, OdeStop::MaxSteps { t })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rk4_exponential() {
        let f = |_t: f64, y: &[f64; 1]| [y[0]];
        let mut y = [1.0];
        let h = 0.01;
        for k in 0..100 {
            y = rk4_step(&f, k as f64 * h, &y, h);
        }
        assert!((y[0] - 1.0f64.exp()).abs() < 1e-9);
    }

    #[test]
    fn dopri_harmonic_oscillator() {
        let f = |_t: f64, y: &[f64; 2]| [y[1], -y[0]];
        let (y, t, stop) = Dopri5::default().integrate(f, 0.0, [0.0, 1.0], 10.0);
        assert_eq!(stop, OdeStop::Reached);
        assert_eq!(t, 10.0);
        assert!((y[0] - 10.0f64.sin()).abs() < 1e-10);
        assert!((y[1] - 10.0f64.cos()).abs() < 1e-10);
    }

    #[test]
    fn dopri_detects_singularity() {
        // y' = y², y(0) = 1 blows up at t = 1
        let f = |_t: f64, y: &[f64; 1]| [y[0] * y[0]];
        let (_, t, stop) = Dopri5::default().integrate(f, 0.0, [1.0], 2.0);
        assert!(matches!(stop, OdeStop::StepUnderflow { .. }));
        assert!((t - 1.0).abs() < 1e-6);
    }
}
