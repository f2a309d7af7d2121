//! Radial discretization of ℝⁿ.
//!
//! Nodes sit at `r_j = j·dr`, `j = 0..M`, with `r_{M-1} = r_max`. Integrals
//! over ℝⁿ of radial functions become `ω_{n-1} ∫₀^{r_max} f(r) r^{n-1} dr`,
//! approximated with the trapezoid rule.

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::PI;

// shadowed by the inherent methods whenever std is linked
#[allow(unused_imports)]
use num_traits::Float;
use crate::error::{Error, Result};

/// Surface area `ω_{n-1} = 2π^{n/2}/Γ(n/2)` of the unit sphere in ℝⁿ.
/// For n = 1 this is 2, the two endpoints of the unit interval.
pub fn unit_sphere_area(n: u32) -> f64 {
    2.0 * PI.powf(n as f64 / 2.0) / gamma_half_integer(n)
}

/// Γ(n/2) for integer n ≥ 1.
fn gamma_half_integer(n: u32) -> f64 {
    // Γ(1/2) = √π, Γ(1) = 1, Γ(x+1) = xΓ(x)
    let (mut x, mut g) = if n.is_multiple_of(2) { (1.0, 1.0) } else { (0.5, PI.sqrt()) };
    let target = n as f64 / 2.0;
    while x < target - 0.25 {
        g *= x;
        x += 1.0;
    }
    g
}

/// Volume of the ball of radius `r` in ℝⁿ.
pub fn ball_volume(n: u32, r: f64) -> f64 {
    unit_sphere_area(n) * r.powi(n as i32) / n as f64
}

#[derive(Debug, Clone, PartialEq)]
pub struct RadialGrid {
    n: u32,
    r_max: f64,
    dr: f64,
    weights: Vec<f64>,
}

impl RadialGrid {
    /// Builds a grid on `[0, r_max]`. `r_max` must be an integer multiple of
    /// `dr` (to a relative 1e-6); the spacing is then snapped so that the last
    /// node lands exactly on `r_max`.
    pub fn new(n: u32, r_max: f64, dr: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::Grid("dimension must be at least 1".into()));
        }
        if !(r_max > 0.0 && r_max.is_finite()) {
            return Err(Error::Grid(format!("r_max = {r_max} must be positive")));
        }
        if !(dr > 0.0 && dr < r_max) {
            return Err(Error::Grid(format!("dr = {dr} must satisfy 0 < dr < r_max")));
        }
        let cells = (r_max / dr).round();
        if ((cells * dr - r_max) / r_max).abs() > 1e-6 {
            return Err(Error::Grid(format!(
                "r_max = {r_max} is not an integer multiple of dr = {dr}"
            )));
        }
        let cells = cells as usize;
        let dr = r_max / cells as f64;
        let omega = unit_sphere_area(n);
        let weights = (0..=cells)
            .map(|j| {
                let r = j as f64 * dr;
                let end = if j == 0 || j == cells { 0.5 } else { 1.0 };
                omega * dr * end * r.powi(n as i32 - 1)
            })
            .collect();
        Ok(RadialGrid { n, r_max, dr, weights })
    }

    pub fn dim(&self) -> u32 {
        self.n
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    pub fn dr(&self) -> f64 {
        self.dr
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn r(&self, j: usize) -> f64 {
        if j + 1 == self.len() {
            self.r_max
        } else {
            j as f64 * self.dr
        }
    }

    pub fn nodes(&self) -> impl ExactSizeIterator<Item = f64> + '_ {
        (0..self.len()).map(move |j| self.r(j))
    }

    pub fn quad_weights(&self) -> &[f64] {
        &self.weights
    }

    /// Samples a radial function at every node.
    pub fn sample(&self, f: impl Fn(f64) -> f64) -> Vec<f64> {
        self.nodes().map(f).collect()
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.len() {
            return Err(Error::LengthMismatch { expected: self.len(), found: len });
        }
        Ok(())
    }

    /// Trapezoid approximation of `∫_{ℝⁿ} f dx`.
    pub fn integrate(&self, f: &[f64]) -> Result<f64> {
        self.check_len(f.len())?;
        Ok(self.integrate_unchecked(f))
    }

    pub(crate) fn integrate_unchecked(&self, f: &[f64]) -> f64 {
        self.weights.iter().zip(f).map(|(w, v)| w * v).sum()
    }

    /// `∫ g(r_j, f_j) dx` without materializing the integrand.
    pub(crate) fn integrate_with(&self, mut g: impl FnMut(usize, f64) -> f64) -> f64 {
        self.weights
            .iter()
            .enumerate()
            .map(|(j, w)| w * g(j, self.r(j)))
            .sum()
    }

    /// Discrete radial Laplacian `u_rr + (n-1)/r u_r` with second-order
    /// central differences. The origin uses the even extension
    /// `u(-dr) = u(dr)`, giving `Δu(0) ≈ n·u_rr(0)`. The last node carries the
    /// Dirichlet condition and returns 0.
    pub fn laplacian_apply(&self, u: &[f64]) -> Result<Vec<f64>> {
        self.check_len(u.len())?;
        let mut out = alloc::vec![0.0; u.len()];
        self.laplacian_into(u, &mut out);
        Ok(out)
    }

    pub(crate) fn laplacian_into(&self, u: &[f64], out: &mut [f64]) {
        let m = u.len();
        let inv_dr2 = 1.0 / (self.dr * self.dr);
        let nm1 = self.n as f64 - 1.0;
        out[0] = self.n as f64 * 2.0 * (u[1] - u[0]) * inv_dr2;
        for j in 1..m - 1 {
            let second = (u[j + 1] - 2.0 * u[j] + u[j - 1]) * inv_dr2;
            // (n-1)/r_j · (u_{j+1} - u_{j-1})/(2dr) with r_j = j·dr
            let first = nm1 * (u[j + 1] - u[j - 1]) * 0.5 * inv_dr2 / j as f64;
            out[j] = second + first;
        }
        out[m - 1] = 0.0;
    }

    /// Centered radial derivative; zero at the origin by symmetry and a
    /// ghost value `u = 0` past the last node.
    pub fn radial_derivative(&self, u: &[f64]) -> Result<Vec<f64>> {
        self.check_len(u.len())?;
        let m = u.len();
        let h = 0.5 / self.dr;
        Ok((0..m)
            .map(|j| match j {
                0 => 0.0,
                _ if j == m - 1 => -u[j - 1] * h,
                _ => (u[j + 1] - u[j - 1]) * h,
            })
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sphere_areas() {
        assert!((unit_sphere_area(1) - 2.0).abs() < 1e-15);
        assert!((unit_sphere_area(2) - 2.0 * PI).abs() < 1e-14);
        assert!((unit_sphere_area(3) - 4.0 * PI).abs() < 1e-13);
        assert!((unit_sphere_area(4) - 2.0 * PI * PI).abs() < 1e-12);
    }

    #[test]
    fn node_count_and_endpoint() {
        let g = RadialGrid::new(1, 10.0, 0.1).unwrap();
        assert_eq!(g.len(), 101);
        assert_eq!(g.r(100), 10.0);
        assert!((g.r(50) - 5.0).abs() < 1e-12);
    }

    #[test]
    fn invalid_sizes_rejected() {
        assert!(RadialGrid::new(1, 0.0, 0.1).is_err());
        assert!(RadialGrid::new(1, 1.0, 2.0).is_err());
        assert!(RadialGrid::new(1, 1.0, 0.3).is_err());
        assert!(RadialGrid::new(0, 1.0, 0.1).is_err());
    }

    #[test]
    fn weights_sum_to_ball_volume() {
        for n in 1..=3 {
            let g = RadialGrid::new(n, 5.0, 0.01).unwrap();
            let sum: f64 = g.quad_weights().iter().sum();
            let vol = ball_volume(n, 5.0);
            assert!(g.quad_weights().iter().all(|w| *w >= 0.0));
            assert!(((sum - vol) / vol).abs() < 1e-5, "n={n}: {sum} vs {vol}");
        }
    }

    #[test]
    fn integrate_zero_and_gaussians() {
        let g = RadialGrid::new(1, 10.0, 0.01).unwrap();
        assert_eq!(g.integrate(&alloc::vec![0.0; g.len()]).unwrap(), 0.0);
        let f = g.sample(|r| (-r * r).exp());
        assert!((g.integrate(&f).unwrap() - PI.sqrt()).abs() < 1e-6);

        let g3 = RadialGrid::new(3, 10.0, 0.01).unwrap();
        let f = g3.sample(|r| (-r * r).exp());
        assert!((g3.integrate(&f).unwrap() - PI.powf(1.5)).abs() < 1e-4);
    }

    #[test]
    fn integrate_length_mismatch() {
        let g = RadialGrid::new(1, 1.0, 0.1).unwrap();
        assert!(matches!(
            g.integrate(&[1.0, 2.0]),
            Err(Error::LengthMismatch { expected: 11, found: 2 })
        ));
    }

    #[test]
    fn ball_indicator_volume() {
        let g = RadialGrid::new(3, 4.0, 0.01).unwrap();
        let f = g.sample(|r| if r <= 2.0 { 1.0 } else { 0.0 });
        let v = g.integrate(&f).unwrap();
        let exact = ball_volume(3, 2.0);
        assert!(((v - exact) / exact).abs() < 0.02);
    }

    #[test]
    fn laplacian_of_constant_vanishes() {
        for n in 1..=3 {
            let g = RadialGrid::new(n, 2.0, 0.1).unwrap();
            let lap = g.laplacian_apply(&alloc::vec![3.0; g.len()]).unwrap();
            // the node next to the Dirichlet boundary sees the constant as-is
            assert!(lap[..g.len() - 1].iter().all(|v| v.abs() < 1e-10));
        }
    }

    #[test]
    fn laplacian_exact_on_quadratics() {
        let g = RadialGrid::new(3, 2.0, 0.1).unwrap();
        let u = g.sample(|r| r * r);
        let lap = g.laplacian_apply(&u).unwrap();
        for v in &lap[..g.len() - 1] {
            assert!((v - 6.0).abs() < 1e-9, "{v}");
        }
    }

    fn gaussian_laplacian_error(n: u32, dr: f64) -> f64 {
        let g = RadialGrid::new(n, 8.0, dr).unwrap();
        let u = g.sample(|r| (-r * r).exp());
        let lap = g.laplacian_apply(&u).unwrap();
        let nf = n as f64;
        g.nodes()
            .zip(&lap)
            .take(g.len() - 1)
            .map(|(r, l)| (l - (4.0 * r * r - 2.0 * nf) * (-r * r).exp()).abs())
            .fold(0.0, f64::max)
    }

    #[test]
    fn laplacian_gaussian_second_order() {
        for n in 1..=3 {
            let e1 = gaussian_laplacian_error(n, 0.02);
            let e2 = gaussian_laplacian_error(n, 0.01);
            assert!(e1 < 5e-3, "n={n}: {e1}");
            let order = (e1 / e2).log2();
            assert!(order >= 1.9, "n={n}: observed order {order}");
        }
    }

    #[test]
    fn laplacian_is_nearly_symmetric_negative() {
        let g = RadialGrid::new(3, 10.0, 0.01).unwrap();
        let u = g.sample(|r| (-r * r).exp());
        let v = g.sample(|r| (1.0 + r * r) * (-0.5 * r * r).exp());
        let lu = g.laplacian_apply(&u).unwrap();
        let lv = g.laplacian_apply(&v).unwrap();
        let dot = |a: &[f64], b: &[f64]| -> f64 {
            let prod: Vec<f64> = a.iter().zip(b).map(|(x, y)| x * y).collect();
            g.integrate(&prod).unwrap()
        };
        let (a, b) = (dot(&lu, &v), dot(&u, &lv));
        assert!((a - b).abs() < 1e-3 * a.abs());
        assert!(dot(&lu, &u) < 0.0);
    }

    #[test]
    fn radial_derivative_of_gaussian() {
        let g = RadialGrid::new(2, 8.0, 0.01).unwrap();
        let u = g.sample(|r| (-r * r).exp());
        let du = g.radial_derivative(&u).unwrap();
        for (r, d) in g.nodes().zip(&du) {
            assert!((d + 2.0 * r * (-r * r).exp()).abs() < 1e-4);
        }
    }
}
