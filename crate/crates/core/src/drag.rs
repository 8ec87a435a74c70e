//! Constant-velocity drag force and its small-velocity power law.
//!
//! A particle dragged at speed `v` through the membranes feels the force
//! `-f_r(v) v/|v|` with
//!
//! ```text
//! f_r(v) = (2π)^{3/2} v ∫_0^∞ dω |σ̂₂|²(vω) |K̂(ω)|,
//! ```
//!
//! reported here as a positive magnitude per unit `g²`. For small `v`,
//! `f_r(v) ≈ γ_α v^{α+1}` with `α = 2μ + 1`.

use crate::error::{invalid, Error, Result};
use crate::fit::loglog_slope;
use crate::formfactor::{hat_k, FormFactorModel};
use crate::quadrature::{grading_for_power, QuadratureGrid, Rule};
use rayon::prelude::*;
use std::f64::consts::PI;

/// Minimum number of curve points inside a fit window.
pub const MIN_FIT_POINTS: usize = 8;

/// Drag magnitude at one speed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DragMagnitude {
    pub value: f64,
    /// Set when `|σ̂₂|²(vω)` underflows over the whole support of `K̂`.
    pub negligible: bool,
}

/// `|f_r(v)|` per unit `g²` (the caller multiplies by `g²`).
pub fn drag_magnitude(v: f64, model: &FormFactorModel, grid: &QuadratureGrid) -> Result<DragMagnitude> {
    if !(v > 0.0) || !v.is_finite() {
        return Err(invalid("drag_magnitude needs v > 0"));
    }
    model.validate()?;
    let omega_k = model.rho1_hat.cutoff(grid);
    let omega_s = model.rho2_hat.cutoff(grid) / v;
    let upper = omega_k.min(omega_s);
    // near ω = 0 the integrand behaves like ω^{α+2}
    let p = grading_for_power(model.alpha() + 2.0);
    let order = grid.order;
    let s = model.mu + 0.5;
    let rho2 = &model.rho2_hat;
    let integrand = |w: f64| -> f64 {
        let x = v * w;
        let r2 = rho2.eval(x);
        let sig2 = x.powf(2.0 * s) * r2 * r2;
        if sig2 == 0.0 {
            return 0.0;
        }
        let k = hat_k(w, model, grid).unwrap_or(f64::NAN);
        sig2 * k.abs()
    };
    let integral = grid.integrate_converged(|n| Rule::graded(0.0, upper, n, order, p), integrand)?;
    if !integral.is_finite() {
        return Err(Error::QuadratureNotConverged {
            residual: f64::INFINITY,
            tol: grid.tol,
        });
    }
    let value = (2.0 * PI).powf(1.5) * v * integral;
    Ok(DragMagnitude {
        value,
        negligible: value == 0.0 || value < f64::MIN_POSITIVE,
    })
}

/// `C_α = lim_{ω→0} |σ̂₂|²(ω)/ω^α = |ρ̂₂(0)|²`.
pub fn c_alpha(model: &FormFactorModel) -> f64 {
    let r = model.rho2_hat.eval(0.0);
    r * r
}

/// `γ_α = |(2π)^{3/2} C_α ∫_0^∞ ω^α K̂(ω) dω|`.
pub fn gamma_alpha(model: &FormFactorModel, grid: &QuadratureGrid) -> Result<f64> {
    let alpha = model.alpha();
    if !(alpha > -1.0) {
        return Err(Error::NonIntegrableExponent { alpha });
    }
    let upper = model.rho1_hat.cutoff(grid);
    let p = grading_for_power(alpha + 2.0);
    let order = grid.order;
    let integral = grid.integrate_converged(
        |n| Rule::graded(0.0, upper, n, order, p),
        |w| w.powf(alpha) * hat_k(w, model, grid).unwrap_or(f64::NAN).abs(),
    )?;
    Ok(((2.0 * PI).powf(1.5) * c_alpha(model) * integral).abs())
}

/// Sampled drag curve with its power-law fit.
#[derive(Debug, Clone, PartialEq)]
pub struct DragCurve {
    pub velocities: Vec<f64>,
    pub magnitudes: Vec<f64>,
    pub mu: f64,
    pub fit_exponent: f64,
    pub fit_coefficient: f64,
    pub fit_window: (f64, f64),
}

/// Evaluates `drag_magnitude` on `velocities` (parallel over points) and
/// fits the power law inside `window`.
pub fn drag_curve(
    velocities: &[f64],
    window: (f64, f64),
    model: &FormFactorModel,
    grid: &QuadratureGrid,
) -> Result<DragCurve> {
    if !velocities.windows(2).all(|w| w[0] < w[1]) || velocities.first().is_none_or(|v| *v <= 0.0) {
        return Err(invalid("velocities must be positive and strictly increasing"));
    }
    let lo = velocities[0];
    let hi = velocities[velocities.len() - 1];
    if window.0 < lo * (1.0 - 1e-12) || window.1 > hi * (1.0 + 1e-12) || window.0 >= window.1 {
        return Err(invalid("fit window must lie inside the velocity range"));
    }
    let magnitudes: Vec<f64> = velocities
        .par_iter()
        .map(|&v| drag_magnitude(v, model, grid).map(|d| d.value))
        .collect::<Result<Vec<_>>>()?;
    let points: Vec<(f64, f64)> = velocities.iter().copied().zip(magnitudes.iter().copied()).collect();
    let (fit_exponent, fit_coefficient) = fit_power_law(&points, window)?;
    Ok(DragCurve {
        velocities: velocities.to_vec(),
        magnitudes,
        mu: model.mu,
        fit_exponent,
        fit_coefficient,
        fit_window: window,
    })
}

/// Least-squares fit of `ln f = e ln v + ln c` over points inside `window`;
/// returns `(e, c)`.
pub fn fit_power_law(points: &[(f64, f64)], window: (f64, f64)) -> Result<(f64, f64)> {
    let inside: Vec<(f64, f64)> = points
        .iter()
        .copied()
        .filter(|(v, _)| *v >= window.0 * (1.0 - 1e-12) && *v <= window.1 * (1.0 + 1e-12))
        .collect();
    if inside.len() < MIN_FIT_POINTS {
        return Err(Error::InsufficientData {
            found: inside.len(),
            needed: MIN_FIT_POINTS,
        });
    }
    let (x, y): (Vec<f64>, Vec<f64>) = inside.into_iter().unzip();
    let f = loglog_slope(&x, &y)?;
    Ok((f.slope, f.intercept.exp()))
}

/// Closed-form solution of `v̇ = -v^k`, `v(0) = v0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurrogateSolution {
    pub k_exponent: f64,
    pub v0: f64,
}

impl SurrogateSolution {
    pub fn new(k_exponent: f64, v0: f64) -> Result<Self> {
        if !(k_exponent > 1.0) || !(v0 > 0.0) {
            return Err(invalid("surrogate needs k > 1 and v0 > 0"));
        }
        Ok(SurrogateSolution { k_exponent, v0 })
    }

    /// Exponent `k = 2(μ + 1)` of the drag law for a given `μ`.
    pub fn for_mu(mu: f64, v0: f64) -> Result<Self> {
        Self::new(2.0 * (mu + 1.0), v0)
    }

    fn u(&self, t: f64) -> f64 {
        let k = self.k_exponent;
        self.v0.powf(1.0 - k) + (k - 1.0) * t
    }

    /// `v(t) = (v0^{1-k} + (k-1) t)^{1/(1-k)}`.
    pub fn velocity(&self, t: f64) -> f64 {
        self.u(t).powf(1.0 / (1.0 - self.k_exponent))
    }

    /// `q(t) − q(0) = ∫_0^t v`.
    pub fn displacement(&self, t: f64) -> f64 {
        let k = self.k_exponent;
        if (k - 2.0).abs() < 1e-12 {
            return (self.v0 * t).ln_1p();
        }
        let e = (2.0 - k) / (1.0 - k);
        let u0 = self.u(0.0);
        let u = self.u(t);
        // (u^e − u0^e)/(k − 2), written to avoid cancellation when u ≈ u0
        u0.powf(e) * ((e * (u / u0).ln()).exp_m1()) / (k - 2.0)
    }

    /// Limit of the displacement, `v0^{2-k}/(2-k)` for `k < 2`, `None` otherwise.
    pub fn q_infinity(&self) -> Option<f64> {
        let k = self.k_exponent;
        if k < 2.0 - 1e-12 {
            Some(self.v0.powf(2.0 - k) / (2.0 - k))
        } else {
            None
        }
    }
}

/// `(v(t), q(t) − q(0))` of the surrogate `v̇ = -v^k`.
pub fn surrogate_solve(k_exponent: f64, v0: f64, t: f64) -> Result<(f64, f64)> {
    if !(t >= 0.0) {
        return Err(invalid("surrogate time must be nonnegative"));
    }
    let s = SurrogateSolution::new(k_exponent, v0)?;
    Ok((s.velocity(t), s.displacement(t)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_for_unit_gaussians_mu_zero() {
        // (2π)^{3/2} √(2π) ∫ ω³ e^{-ω²} dω = 4π² · 1/2
        let m = FormFactorModel::gaussian(0.0, 1.0);
        let g = gamma_alpha(&m, &QuadratureGrid::default()).unwrap();
        assert!((g / (2.0 * PI * PI) - 1.0).abs() < 1e-12, "{g}");
        assert_eq!(c_alpha(&m), 1.0);
    }

    #[test]
    fn gamma_positive_for_listed_exponents() {
        for mu in [-0.5, -0.25, 0.0, 0.5] {
            let m = FormFactorModel::gaussian(mu, 1.0);
            assert!(gamma_alpha(&m, &QuadratureGrid::default()).unwrap() > 0.0);
        }
    }

    #[test]
    fn drag_rejects_nonpositive_speed() {
        let m = FormFactorModel::gaussian(0.0, 1.0);
        assert!(drag_magnitude(0.0, &m, &QuadratureGrid::default()).is_err());
    }

    #[test]
    fn huge_speed_gives_negligible_drag() {
        let m = FormFactorModel::gaussian(0.0, 1.0);
        let d = drag_magnitude(1e300, &m, &QuadratureGrid::default()).unwrap();
        assert!(d.negligible);
    }

    #[test]
    fn fit_needs_eight_points() {
        let pts: Vec<(f64, f64)> = (1..=7).map(|i| (i as f64, i as f64)).collect();
        assert!(matches!(
            fit_power_law(&pts, (1.0, 7.0)),
            Err(Error::InsufficientData { found: 7, .. })
        ));
    }

    #[test]
    fn fit_exact_power() {
        let pts: Vec<(f64, f64)> = (1..=10).map(|i| {
            let v = 0.1 * i as f64;
            (v, 3.0 * v * v)
        }).collect();
        let (e, c) = fit_power_law(&pts, (0.1, 1.0)).unwrap();
        assert!((e - 2.0).abs() < 1e-12 && (c - 3.0).abs() < 1e-12);
    }

    #[test]
    fn surrogate_k2_closed_form() {
        let (v, q) = surrogate_solve(2.0, 1.0, 1.0).unwrap();
        assert!((v - 0.5).abs() < 1e-15);
        assert!((q - 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn surrogate_finiteness_classification() {
        assert!(SurrogateSolution::for_mu(-0.25, 1.0).unwrap().q_infinity().is_some());
        assert!(SurrogateSolution::for_mu(0.25, 1.0).unwrap().q_infinity().is_none());
        assert!(SurrogateSolution::for_mu(0.0, 1.0).unwrap().q_infinity().is_none());
        let s = SurrogateSolution::new(1.5, 0.7).unwrap();
        let qinf = s.q_infinity().unwrap();
        assert!((s.displacement(1e12) - qinf).abs() < 1e-5 * qinf);
    }

    #[test]
    fn surrogate_rejects_bad_exponent() {
        assert!(surrogate_solve(1.0, 1.0, 1.0).is_err());
        assert!(surrogate_solve(2.0, 0.0, 1.0).is_err());
    }
}
