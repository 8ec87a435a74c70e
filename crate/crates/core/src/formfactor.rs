//! Form factors and the closed-form scalar quantities built from them.
//!
//! The particle couples to the membranes through two radial profiles:
//! `ρ̂₁(|ξ|)` in the particle direction and `ρ̂₂(|k|)` in the membrane
//! direction, with `σ̂₂(k) = |k|^{μ+1/2} ρ̂₂(k)`. Fourier transforms are
//! unitary with symmetric `(2π)^{-d/2}` factors, and `σ₁` is identified with
//! `ρ₁` throughout.

use crate::error::{invalid, Error, Result};
use crate::quadrature::{grading_for_power, QuadratureGrid, Rule};
use num_complex::Complex64;
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProfileKind {
    Gaussian,
    CompactBump,
    Table,
}

/// A radial profile `s ↦ profile(s)` on `s ≥ 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialProfile {
    kind: ProfileKind,
    /// Gaussian width or bump radius.
    scale: f64,
    amplitude: f64,
    /// `(radius, value)` pairs, strictly increasing radii (table kind only).
    table: Vec<(f64, f64)>,
}

impl RadialProfile {
    /// `A exp(-s² / 2σ²)`.
    pub fn gaussian(sigma: f64, amplitude: f64) -> Result<Self> {
        if !(sigma > 0.0) || !amplitude.is_finite() || amplitude == 0.0 {
            return Err(invalid("gaussian profile needs sigma > 0 and a nonzero amplitude"));
        }
        Ok(RadialProfile {
            kind: ProfileKind::Gaussian,
            scale: sigma,
            amplitude,
            table: Vec::new(),
        })
    }

    /// `A exp(1 - 1/(1 - (s/R)²))` inside `s < R`, zero outside.
    pub fn compact_bump(radius: f64, amplitude: f64) -> Result<Self> {
        if !(radius > 0.0) || !amplitude.is_finite() || amplitude == 0.0 {
            return Err(invalid("bump profile needs radius > 0 and a nonzero amplitude"));
        }
        Ok(RadialProfile {
            kind: ProfileKind::CompactBump,
            scale: radius,
            amplitude,
            table: Vec::new(),
        })
    }

    /// Piecewise-linear interpolation through `(radius, value)` points;
    /// zero beyond the last radius.
    pub fn table(points: Vec<(f64, f64)>) -> Result<Self> {
        if points.len() < 2 {
            return Err(invalid("table profile needs at least two points"));
        }
        if points[0].0 != 0.0 {
            return Err(invalid("table profile must start at radius 0"));
        }
        if !points.windows(2).all(|w| w[0].0 < w[1].0) {
            return Err(invalid("table radii must be strictly increasing"));
        }
        if points.iter().any(|(r, v)| !r.is_finite() || !v.is_finite()) {
            return Err(invalid("table entries must be finite"));
        }
        let last = points.last().map(|p| p.0).unwrap_or(0.0);
        Ok(RadialProfile {
            kind: ProfileKind::Table,
            scale: last,
            amplitude: points[0].1,
            table: points,
        })
    }

    pub fn kind(&self) -> ProfileKind {
        self.kind
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    pub fn eval(&self, s: f64) -> f64 {
        let s = s.abs();
        match self.kind {
            ProfileKind::Gaussian => {
                let x = s / self.scale;
                self.amplitude * (-0.5 * x * x).exp()
            }
            ProfileKind::CompactBump => {
                let x = s / self.scale;
                if x >= 1.0 {
                    0.0
                } else {
                    self.amplitude * (1.0 - 1.0 / (1.0 - x * x)).exp()
                }
            }
            ProfileKind::Table => {
                let pts = &self.table;
                if s >= pts[pts.len() - 1].0 {
                    return 0.0;
                }
                let i = pts.partition_point(|p| p.0 <= s) - 1;
                let (r0, v0) = pts[i];
                let (r1, v1) = pts[i + 1];
                v0 + (v1 - v0) * (s - r0) / (r1 - r0)
            }
        }
    }

    /// Radial derivative `d profile / ds`.
    pub fn derivative(&self, s: f64) -> f64 {
        let s = s.abs();
        match self.kind {
            ProfileKind::Gaussian => -s / (self.scale * self.scale) * self.eval(s),
            ProfileKind::CompactBump => {
                let x = s / self.scale;
                if x >= 1.0 {
                    0.0
                } else {
                    let den = 1.0 - x * x;
                    -2.0 * x / (den * den) / self.scale * self.eval(s)
                }
            }
            ProfileKind::Table => {
                let pts = &self.table;
                if s >= pts[pts.len() - 1].0 {
                    return 0.0;
                }
                let i = pts.partition_point(|p| p.0 <= s) - 1;
                let (r0, v0) = pts[i];
                let (r1, v1) = pts[i + 1];
                (v1 - v0) / (r1 - r0)
            }
        }
    }

    /// Radius beyond which the profile is treated as zero.
    pub fn cutoff(&self, grid: &QuadratureGrid) -> f64 {
        match self.kind {
            ProfileKind::Gaussian => grid.cutoff_sigmas * self.scale,
            ProfileKind::CompactBump | ProfileKind::Table => self.scale,
        }
    }

    /// Short deterministic description used in reports.
    pub fn fingerprint(&self) -> String {
        match self.kind {
            ProfileKind::Gaussian => format!("gaussian(sigma={},A={})", self.scale, self.amplitude),
            ProfileKind::CompactBump => {
                format!("bump(R={},A={})", self.scale, self.amplitude)
            }
            ProfileKind::Table => format!("table(n={},rmax={})", self.table.len(), self.scale),
        }
    }
}

/// The full parameter set of the particle–membrane model.
#[derive(Debug, Clone, PartialEq)]
pub struct FormFactorModel {
    /// `ρ̂₁` over `|ξ|`.
    pub rho1_hat: RadialProfile,
    /// `ρ̂₂` over `|k|`.
    pub rho2_hat: RadialProfile,
    pub mu: f64,
    /// Particle-space dimension.
    pub d: usize,
    /// Membrane dimension (always 3).
    pub membrane_dim: usize,
    /// Wave speed (always 1).
    pub c: f64,
    /// Classical particle mass.
    pub m: f64,
    pub g: f64,
}

impl FormFactorModel {
    pub fn new(
        rho1_hat: RadialProfile,
        rho2_hat: RadialProfile,
        mu: f64,
        d: usize,
        m: f64,
        g: f64,
    ) -> Result<Self> {
        let model = FormFactorModel {
            rho1_hat,
            rho2_hat,
            mu,
            d,
            membrane_dim: 3,
            c: 1.0,
            m,
            g,
        };
        model.validate()?;
        Ok(model)
    }

    /// Unit gaussians for both profiles, `d = 1`, `m = 1`.
    pub fn gaussian(mu: f64, g: f64) -> Self {
        FormFactorModel::new(
            RadialProfile::gaussian(1.0, 1.0).expect("unit gaussian"),
            RadialProfile::gaussian(1.0, 1.0).expect("unit gaussian"),
            mu,
            1,
            1.0,
            g,
        )
        .expect("mu > -1 required")
    }

    pub fn with_mu(&self, mu: f64) -> Result<Self> {
        let m = FormFactorModel { mu, ..self.clone() };
        m.validate()?;
        Ok(m)
    }

    pub fn with_g(&self, g: f64) -> Self {
        FormFactorModel { g, ..self.clone() }
    }

    pub fn with_d(&self, d: usize) -> Result<Self> {
        let m = FormFactorModel { d, ..self.clone() };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.mu > -1.0) {
            return Err(invalid(format!("mu = {} must exceed -1", self.mu)));
        }
        if self.d == 0 {
            return Err(invalid("particle dimension d must be positive"));
        }
        if self.membrane_dim != 3 || self.c != 1.0 {
            return Err(invalid("membrane dimension is fixed to 3 and wave speed to 1"));
        }
        if !(self.m > 0.0) {
            return Err(invalid("mass must be positive"));
        }
        if !self.g.is_finite() {
            return Err(invalid("coupling must be finite"));
        }
        if self.rho2_hat.eval(0.0) == 0.0 {
            return Err(invalid("rho2_hat(0) must be nonzero"));
        }
        Ok(())
    }

    pub fn alpha(&self) -> f64 {
        2.0 * self.mu + 1.0
    }

    pub fn fingerprint(&self) -> String {
        format!(
            "rho1={};rho2={};mu={};d={};m={};g={}",
            self.rho1_hat.fingerprint(),
            self.rho2_hat.fingerprint(),
            self.mu,
            self.d,
            self.m,
            self.g
        )
    }
}

/// `σ̂₂(k) = k^{μ+1/2} ρ̂₂(k)`.
pub fn sigma2_hat(k: f64, model: &FormFactorModel) -> Result<f64> {
    if !(k >= 0.0) {
        return Err(invalid("sigma2_hat needs k >= 0"));
    }
    let e = model.mu + 0.5;
    if k == 0.0 {
        if e > 0.0 {
            return Ok(0.0);
        }
        if e < 0.0 {
            return Err(Error::InfraredSingular { k, mu: model.mu });
        }
        return Ok(model.rho2_hat.eval(0.0));
    }
    Ok(k.powf(e) * model.rho2_hat.eval(k))
}

/// Real radial part `|k|^μ ρ̂₁(|ξ|) ρ̂₂(k)` of the quantum coupling function.
pub fn coupling_radial(k: f64, xi_norm: f64, model: &FormFactorModel) -> Result<f64> {
    let kmu = if k == 0.0 {
        if model.mu > 0.0 {
            0.0
        } else if model.mu == 0.0 {
            1.0
        } else {
            return Err(Error::InfraredSingular { k, mu: model.mu });
        }
    } else if k > 0.0 {
        k.powf(model.mu)
    } else {
        return Err(invalid("coupling needs k >= 0"));
    };
    Ok(kmu * model.rho1_hat.eval(xi_norm) * model.rho2_hat.eval(k))
}

/// `h_q(k, ξ) = e^{-i q·ξ} |k|^μ ρ̂₁(|ξ|) ρ̂₂(k)`.
pub fn coupling_h(q: &[f64], k: f64, xi: &[f64], model: &FormFactorModel) -> Result<Complex64> {
    if q.len() != xi.len() {
        return Err(invalid("q and xi must have the same dimension"));
    }
    let radial = coupling_radial(k, norm(xi), model)?;
    let phase = -dot(q, xi);
    Ok(Complex64::from_polar(radial, phase))
}

/// Static field `ψ̂_q(k, ξ) = -e^{iξ·q} ρ̂₁(|ξ|) σ̂₂(k) / k²` of the particle at rest at `q`.
pub fn static_field_psi_q(q: &[f64], k: f64, xi: &[f64], model: &FormFactorModel) -> Result<Complex64> {
    if q.len() != xi.len() {
        return Err(invalid("q and xi must have the same dimension"));
    }
    if k == 0.0 {
        return Err(Error::InfraredSingular { k, mu: model.mu });
    }
    let s2 = sigma2_hat(k, model)?;
    let amp = -model.rho1_hat.eval(norm(xi)) * s2 / (k * k);
    Ok(Complex64::from_polar(1.0, dot(q, xi)) * amp)
}

/// Drag kernel `K̂(ω) = √(2π) ∫_{ℝ^{d-1}} dη [FT(∂₁ρ₁)(ω, η)]²`.
///
/// The transform of `∂₁ρ₁` is `iω ρ̂₁`, so the square is `-ω² ρ̂₁²` and
/// `K̂ ≤ 0`. For `d = 1` there is no `η` integral.
pub fn hat_k(omega: f64, model: &FormFactorModel, grid: &QuadratureGrid) -> Result<f64> {
    if !(omega >= 0.0) {
        return Err(invalid("hat_K needs omega >= 0"));
    }
    if omega == 0.0 {
        return Ok(0.0);
    }
    let rho1 = &model.rho1_hat;
    let pref = -(2.0 * PI).sqrt() * omega * omega;
    if model.d == 1 {
        let r = rho1.eval(omega);
        return Ok(pref * r * r);
    }
    // ∫_{ℝ^{d-1}} dη f(√(ω²+η²)) = S_{d-2} ∫_0^∞ η^{d-2} f dη
    let dm = model.d - 1;
    let shell = sphere_area(dm);
    let cut = rho1.cutoff(grid);
    if omega >= cut {
        return Ok(0.0);
    }
    let eta_max = (cut * cut - omega * omega).sqrt();
    let order = grid.order;
    let inner = grid.integrate_converged(
        |n| Rule::composite(0.0, eta_max, n, order),
        |eta| {
            let r = rho1.eval((omega * omega + eta * eta).sqrt());
            eta.powi(dm as i32 - 1) * r * r
        },
    )?;
    Ok(pref * shell * inner)
}

/// `‖ρ₁‖² = ∫_{ℝ^d} ρ̂₁(|ξ|)² dξ` (Plancherel).
pub fn rho1_norm_sq(model: &FormFactorModel, grid: &QuadratureGrid) -> Result<f64> {
    let d = model.d;
    let rho1 = &model.rho1_hat;
    let cut = rho1.cutoff(grid);
    let order = grid.order;
    let radial = grid.integrate_converged(
        |n| Rule::composite(0.0, cut, n, order),
        |s| {
            let r = rho1.eval(s);
            s.powi(d as i32 - 1) * r * r
        },
    )?;
    Ok(sphere_area(d) * radial)
}

/// `4π ∫_0^∞ k^{2μ+1} ρ̂₂(k)² dk`, i.e. `∫_{ℝ³} |σ̂₂|²(|k|)/|k|² dk`.
pub fn static_field_radial_integral(model: &FormFactorModel, grid: &QuadratureGrid) -> Result<f64> {
    let rho2 = &model.rho2_hat;
    let s = 2.0 * model.mu + 1.0;
    let p = grading_for_power(s);
    let cut = rho2.cutoff(grid);
    let order = grid.order;
    let radial = grid.integrate_converged(
        |n| Rule::graded(0.0, cut, n, order, p),
        |k| {
            let r = rho2.eval(k);
            k.powf(s) * r * r
        },
    )?;
    Ok(4.0 * PI * radial)
}

/// Classical minimum energy
/// `E₀ = -g² (‖ρ₁‖²/2) ∫_{ℝ³} |σ̂₂|²(|k|)/|k|² dk = -g² (‖ρ₁‖²/2) 4π ∫ k^{2μ+1} ρ̂₂² dk`.
pub fn classical_ground_energy_e0(model: &FormFactorModel, grid: &QuadratureGrid) -> Result<f64> {
    model.validate()?;
    if model.g == 0.0 {
        return Ok(0.0);
    }
    let n1 = rho1_norm_sq(model, grid)?;
    let radial = static_field_radial_integral(model, grid)?;
    Ok(-model.g * model.g * 0.5 * n1 * radial)
}

/// Area of the unit sphere `S^{n-1} ⊂ ℝ^n`; `sphere_area(1) = 2`.
pub fn sphere_area(n: usize) -> f64 {
    match n {
        0 => 1.0,
        1 => 2.0,
        2 => 2.0 * PI,
        3 => 4.0 * PI,
        _ => 2.0 * PI * sphere_area(n - 2) / (n as f64 - 2.0),
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit() -> FormFactorModel {
        FormFactorModel::gaussian(0.0, 1.0)
    }

    #[test]
    fn sigma2_at_unit_radius_is_profile_value() {
        for mu in [-0.75, -0.25, 0.0, 0.5, 1.0] {
            let m = unit().with_mu(mu).unwrap();
            assert!((sigma2_hat(1.0, &m).unwrap() - (-0.5f64).exp()).abs() < 1e-15);
        }
    }

    #[test]
    fn sigma2_examples() {
        assert_eq!(sigma2_hat(0.0, &unit()).unwrap(), 0.0);
        let m = unit().with_mu(0.5).unwrap();
        // 2^1 · exp(-2²/2)
        let expected = 2.0 * (-2.0f64).exp();
        assert!((sigma2_hat(2.0, &m).unwrap() - expected).abs() < 1e-15);
        let m = unit().with_mu(-0.75).unwrap();
        assert!(matches!(sigma2_hat(0.0, &m), Err(Error::InfraredSingular { .. })));
    }

    #[test]
    fn coupling_examples() {
        let m = unit();
        let h = coupling_h(&[0.0], 1.0, &[0.0], &m).unwrap();
        assert!((h.re - (-0.5f64).exp()).abs() < 1e-15 && h.im == 0.0);
        let m = unit().with_mu(-0.25).unwrap();
        let h = coupling_h(&[0.0], 1.0, &[1.0], &m).unwrap();
        assert!((h.re - (-1.0f64).exp()).abs() < 1e-15);
        let a = coupling_h(&[3.7], 0.4, &[1.3], &m).unwrap().norm();
        let b = coupling_h(&[-11.0], 0.4, &[1.3], &m).unwrap().norm();
        assert!((a - b).abs() < 1e-15);
    }

    #[test]
    fn coupling_infrared_rule() {
        let m = unit().with_mu(-0.5).unwrap();
        assert!(coupling_h(&[0.0], 0.0, &[0.0], &m).is_err());
        assert!(coupling_h(&[0.0], 0.0, &[0.0], &unit()).is_ok());
    }

    #[test]
    fn static_field_is_real_at_origin_and_singular_at_zero() {
        let m = unit();
        let v = static_field_psi_q(&[0.0], 0.7, &[-1.2], &m).unwrap();
        assert_eq!(v.im, 0.0);
        assert!(v.re < 0.0);
        assert!(static_field_psi_q(&[0.0], 0.0, &[1.0], &m).is_err());
        assert!(static_field_psi_q(&[0.0], 40.0, &[0.0], &m).unwrap().norm() < 1e-300);
    }

    #[test]
    fn hat_k_matches_gaussian_transform() {
        let m = unit();
        let g = QuadratureGrid::default();
        assert_eq!(hat_k(0.0, &m, &g).unwrap(), 0.0);
        // FT(∂ρ₁)(1) = i·1·e^{-1/2}; squared gives -e^{-1}
        let expected = -(2.0 * PI).sqrt() * (-1.0f64).exp();
        assert!((hat_k(1.0, &m, &g).unwrap() - expected).abs() < 1e-15);
    }

    #[test]
    fn hat_k_in_three_dimensions() {
        let m = unit().with_d(3).unwrap();
        let g = QuadratureGrid::default();
        // ∫_{ℝ²} e^{-(ω²+η²)} dη = π e^{-ω²}
        let w: f64 = 0.8;
        let expected = -(2.0 * PI).sqrt() * w * w * PI * (-w * w).exp();
        let v = hat_k(w, &m, &g).unwrap();
        assert!((v - expected).abs() < 1e-12 * expected.abs(), "{v} vs {expected}");
    }

    #[test]
    fn bump_and_table_profiles() {
        let b = RadialProfile::compact_bump(2.0, 3.0).unwrap();
        assert_eq!(b.eval(0.0), 3.0);
        assert_eq!(b.eval(2.0), 0.0);
        assert_eq!(b.eval(5.0), 0.0);
        let h = 1e-6;
        let fd = (b.eval(1.0 + h) - b.eval(1.0 - h)) / (2.0 * h);
        assert!((fd - b.derivative(1.0)).abs() < 1e-8);

        let t = RadialProfile::table(vec![(0.0, 1.0), (1.0, 0.5), (2.0, 0.0)]).unwrap();
        assert_eq!(t.eval(0.5), 0.75);
        assert_eq!(t.eval(3.0), 0.0);
        assert!(RadialProfile::table(vec![(0.0, 1.0), (0.0, 2.0)]).is_err());
    }

    #[test]
    fn model_rejects_mu_at_or_below_minus_one() {
        assert!(unit().with_mu(-1.0).is_err());
        assert!(unit().with_mu(-0.99).is_ok());
    }

    #[test]
    fn e0_zero_coupling_and_quadratic_scaling() {
        let g = QuadratureGrid::default();
        assert_eq!(classical_ground_energy_e0(&unit().with_g(0.0), &g).unwrap(), 0.0);
        let e1 = classical_ground_energy_e0(&unit().with_g(1.0), &g).unwrap();
        let e3 = classical_ground_energy_e0(&unit().with_g(3.0), &g).unwrap();
        assert!((e3 / e1 - 9.0).abs() < 1e-14);
        assert!(e1 < 0.0);
    }

    #[test]
    fn sphere_areas() {
        assert!((sphere_area(3) - 4.0 * PI).abs() < 1e-15);
        assert!((sphere_area(4) - 2.0 * PI * PI).abs() < 1e-13);
        assert!((sphere_area(5) - 8.0 * PI * PI / 3.0).abs() < 1e-13);
    }
}
