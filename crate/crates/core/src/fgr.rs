//! Fermi golden rule coefficient of the embedded eigenvalue `P²`.
//!
//! With `f(ω) = ω^{2+2μ} |ρ̂₂(ω)|²` and `ω₀(ξ) = 2P·ξ - ξ²`,
//!
//! ```text
//! c(P) = 4π ∫_{ℝ^d} f(ω₀(ξ)) |ρ̂₁(|ξ|)|² 𝟙[ω₀(ξ) ≥ 0] dξ.
//! ```
//!
//! The support is the ball `|ξ - P| ≤ |P|`. In `d = 1` it is the interval
//! between 0 and `2P`; in `d = 3` spherical coordinates aligned with `P`
//! reduce it to `r ∈ (0, 2|P|)`, `cos θ ∈ (r/2|P|, 1)`.
//!
//! The same quantity is reached from the regularised self-energy
//!
//! ```text
//! F_ε(P, λ) = 4π ∫ dξ ∫_0^∞ dω f(ω) |ρ̂₁(|ξ|)|² / ((P - ξ)² - λ + ω - iε),
//! ```
//!
//! since `Im F_ε(P, P²) → π c(P)` as `ε ↓ 0`.
//!
//! For small `|P|` the substitution `ξ = |P| η` gives
//! `c(P) ≈ |P|^{d + 4 + 4μ} · 4π ∫ (2e·η - η²)_+^{2+2μ} dη`.

use crate::error::{invalid, Error, Result};
use crate::fit::loglog_slope;
use crate::formfactor::FormFactorModel;
use crate::quadrature::{grading_for_power, QuadratureGrid, Rule};
use num_complex::Complex64;
use rayon::prelude::*;
use std::cell::RefCell;
use std::f64::consts::PI;

/// `ω^{2+2μ} |ρ̂₂(ω)|²`, zero for `ω ≤ 0`.
fn spectral_weight(omega: f64, model: &FormFactorModel) -> f64 {
    if omega <= 0.0 {
        return 0.0;
    }
    let r = model.rho2_hat.eval(omega);
    omega.powf(2.0 + 2.0 * model.mu) * r * r
}

fn norm(p: &[f64]) -> f64 {
    p.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn check_dimension(p: &[f64], model: &FormFactorModel) -> Result<()> {
    model.validate()?;
    if p.len() != model.d {
        return Err(invalid("P must have the model dimension"));
    }
    if model.d != 1 && model.d != 3 {
        return Err(invalid("the golden rule is implemented for d = 1 and d = 3"));
    }
    Ok(())
}

/// `c(P)` by direct quadrature on the resonance set. Depends on `P` only
/// through `|P|` and is exactly 0 at `P = 0`.
pub fn c_of_p(p: &[f64], model: &FormFactorModel, grid: &QuadratureGrid) -> Result<f64> {
    check_dimension(p, model)?;
    let pn = norm(p);
    if pn == 0.0 {
        return Ok(0.0);
    }
    c_of_p_abs(pn, model, grid)
}

/// Pieces of `[0, 2|P|]` on which `ω₀(ξ) ≤ ω_cut` and `ρ̂₁` is above its
/// cut-off (`d = 1`).
fn support_segments(pn: f64, omega_cut: f64, xi_cut: f64) -> Vec<(f64, f64)> {
    let top = (2.0 * pn).min(xi_cut);
    if pn * pn <= omega_cut {
        return vec![(0.0, top)];
    }
    // ω₀ = 2|P|ξ - ξ² exceeds ω_cut strictly between the two roots
    let a = pn - (pn * pn - omega_cut).sqrt();
    let b = 2.0 * pn - a;
    let mut out = vec![(0.0, a.min(top))];
    if b < top {
        out.push((b, top));
    }
    out
}

fn c_of_p_abs(pn: f64, model: &FormFactorModel, grid: &QuadratureGrid) -> Result<f64> {
    let order = grid.order;
    // f vanishes like dist^{2+2μ} at both ends of the admissible range
    let edge = grading_for_power(2.0 + 2.0 * model.mu).max(2.0);
    let rho1 = &model.rho1_hat;
    let omega_cut = model.rho2_hat.cutoff(grid);
    let segments = if model.d == 1 {
        support_segments(pn, omega_cut, rho1.cutoff(grid))
    } else {
        // every r < 2|P| reaches small ω through cos θ
        vec![(0.0, (2.0 * pn).min(rho1.cutoff(grid)))]
    };
    let mut value = 0.0;
    for (a, b) in segments {
        value += match model.d {
            1 => grid.integrate_converged(
                |n| Rule::graded_both(a, b, n, order, edge),
                |xi| {
                    let r = rho1.eval(xi);
                    spectral_weight(2.0 * pn * xi - xi * xi, model) * r * r
                },
            )?,
            _ => {
                // dξ = 2π r² dr d(cos θ); trading cos θ for ω = 2|P| r cos θ - r²
                // leaves G(W)/(2|P| r) with G(W) = ∫_0^W f, on a fixed rule so
                // the outer integrand is smooth in r
                let inner_panels = 8 * grid.panels;
                let inner = |r: f64| -> Result<f64> {
                    let w = (2.0 * pn * r - r * r).min(omega_cut);
                    if w <= 0.0 {
                        return Ok(0.0);
                    }
                    let g = Rule::graded(0.0, w, inner_panels, order, edge).integrate(|x| spectral_weight(x, model));
                    Ok(g / (2.0 * pn * r))
                };
                let outer_edge = grading_for_power(3.0 + 2.0 * model.mu).max(2.0);
                let failure = RefCell::new(None);
                let v = grid.integrate_converged(
                    |n| Rule::graded_both(a, b, n, order, outer_edge),
                    |r| {
                        let q = rho1.eval(r);
                        match inner(r) {
                            Ok(i) => 2.0 * PI * r * r * q * q * i,
                            Err(e) => {
                                failure.borrow_mut().get_or_insert(e);
                                f64::NAN
                            }
                        }
                    },
                );
                if let Some(e) = failure.into_inner() {
                    return Err(e);
                }
                v?
            }
        };
    }
    Ok(4.0 * PI * value)
}

/// Discretisation of the regularised self-energy.
#[derive(Debug, Clone, PartialEq)]
pub struct LorentzianGrid {
    /// Gauss–Legendre panels per outer segment (between resonance roots).
    pub panels: usize,
    /// Panels of each inner `ω` piece.
    pub inner_panels: usize,
    pub order: usize,
    /// Half-width of the pole window in units of `ε`.
    pub window: f64,
    /// Cut-off of the profiles.
    pub cutoff: QuadratureGrid,
}

impl Default for LorentzianGrid {
    fn default() -> Self {
        LorentzianGrid {
            panels: 24,
            inner_panels: 12,
            order: 16,
            window: 20.0,
            cutoff: QuadratureGrid::default(),
        }
    }
}

/// Outer rule on `[a, b]` with segment boundaries at `breaks`, each segment
/// graded towards both of its ends.
fn segmented_rule(a: f64, b: f64, breaks: &[f64], panels: usize, order: usize) -> Rule {
    let mut cuts = vec![a];
    let mut inner: Vec<f64> = breaks.iter().copied().filter(|&x| x > a && x < b).collect();
    inner.sort_by(f64::total_cmp);
    cuts.extend(inner);
    cuts.push(b);
    let mut nodes = Vec::new();
    let mut weights = Vec::new();
    for w in cuts.windows(2) {
        let r = Rule::graded_both(w[0], w[1], panels, order, 2.0);
        nodes.extend(r.nodes);
        weights.extend(r.weights);
    }
    Rule { nodes, weights }
}

/// Largest change of `ω₀` between a resonance root and its nearest outer
/// node; the denominators are resolved down to this scale.
fn root_spacing(rule: &Rule, roots: &[f64], slope: impl Fn(f64) -> f64) -> f64 {
    let (Some(&a), Some(&b)) = (rule.nodes.first(), rule.nodes.last()) else {
        return 0.0;
    };
    roots
        .iter()
        .filter(|&&x0| x0 > a.min(b) && x0 < a.max(b))
        .filter_map(|&x0| {
            rule.nodes
                .iter()
                .map(|&x| (x - x0).abs())
                .min_by(f64::total_cmp)
                .map(|dx| dx * slope(x0).abs())
        })
        .fold(0.0, f64::max)
}

/// `∫_0^Ω f(ω) / (ω - ω₀ - iε) dω`. Inside `|ω - ω₀| < window·ε` the map
/// `ω = ω₀ + ε tan θ` turns the Lorentzian into `(tan θ + i) dθ`; outside,
/// graded Gauss rules see a pole at least `window·ε` away.
fn resolvent(w0: f64, eps: f64, omega_max: f64, model: &FormFactorModel, grid: &LorentzianGrid) -> Complex64 {
    let half = grid.window * eps;
    let lo = (w0 - half).clamp(0.0, omega_max);
    let hi = (w0 + half).clamp(0.0, omega_max);
    let n = grid.inner_panels;
    let order = grid.order;
    let mut acc = Complex64::default();
    if hi > lo {
        let t1 = ((lo - w0) / eps).atan();
        let t2 = ((hi - w0) / eps).atan();
        let r = Rule::graded_both(t1, t2, n, order, 2.0);
        for (&t, &w) in r.nodes.iter().zip(&r.weights) {
            let tt = t.tan();
            acc += Complex64::new(tt, 1.0) * (w * spectral_weight(w0 + eps * tt, model));
        }
    }
    let mut outside = |a: f64, b: f64| {
        if b > a {
            let r = Rule::graded_both(a, b, n, order, 2.0);
            for (&x, &w) in r.nodes.iter().zip(&r.weights) {
                acc += w * spectral_weight(x, model) / Complex64::new(x - w0, -eps);
            }
        }
    };
    outside(0.0, lo);
    outside(hi, omega_max);
    acc
}

/// `F_ε(P, λ)` on `grid`. Fails with `EpsilonUnderResolved` when `ε` is
/// below three times the `ω₀` step the outer rule takes at a resonance root.
pub fn lorentzian_selfenergy(
    p: &[f64],
    lambda: f64,
    eps: f64,
    model: &FormFactorModel,
    grid: &LorentzianGrid,
) -> Result<Complex64> {
    check_dimension(p, model)?;
    if !(eps > 0.0) {
        return Err(invalid("epsilon must be positive"));
    }
    let pn = norm(p);
    let omega_max = model.rho2_hat.cutoff(&grid.cutoff);
    let shift = lambda - pn * pn;
    let xi_max = model.rho1_hat.cutoff(&grid.cutoff);
    let rho1 = &model.rho1_hat;
    let under = |resolution: f64| Error::EpsilonUnderResolved { eps, resolution };
    // ω₀ = 2|P|x - x² + λ - P² along P vanishes at x = |P| ± √λ
    let mut roots = Vec::new();
    if lambda >= 0.0 {
        roots.push(pn - lambda.sqrt());
        roots.push(pn + lambda.sqrt());
    }
    let value: Complex64 = match model.d {
        1 => {
            let mut breaks = roots.clone();
            breaks.push(0.0);
            let rule = segmented_rule(-xi_max, xi_max, &breaks, grid.panels, grid.order);
            let resolution = 3.0 * root_spacing(&rule, &roots, |x| 2.0 * (pn - x));
            if eps < resolution {
                return Err(under(resolution));
            }
            rule.nodes
                .par_iter()
                .zip(&rule.weights)
                .map(|(&xi, &w)| {
                    let r = rho1.eval(xi.abs());
                    resolvent(2.0 * pn * xi - xi * xi + shift, eps, omega_max, model, grid) * (w * r * r)
                })
                .collect::<Vec<_>>()
                .into_iter()
                .sum()
        }
        _ => {
            // ω₀ = 2|P| r c - r² + shift with c = cos θ
            let r_rule = segmented_rule(0.0, xi_max, &roots, grid.panels, grid.order);
            let c_rules: Vec<(Rule, f64)> = r_rule
                .nodes
                .iter()
                .map(|&r| {
                    let mut c_roots = Vec::new();
                    if pn > 0.0 && r > 0.0 {
                        c_roots.push((r * r - shift) / (2.0 * pn * r));
                    }
                    let rule = segmented_rule(-1.0, 1.0, &c_roots, grid.panels, grid.order);
                    let res = 3.0 * root_spacing(&rule, &c_roots, |_| 2.0 * pn * r);
                    (rule, res)
                })
                .collect();
            let resolution = c_rules
                .iter()
                .map(|c| c.1)
                .fold(3.0 * root_spacing(&r_rule, &roots, |r| 2.0 * (pn - r)), f64::max);
            if eps < resolution {
                return Err(under(resolution));
            }
            r_rule
                .nodes
                .par_iter()
                .zip(&r_rule.weights)
                .zip(&c_rules)
                .map(|((&r, &wr), (c_rule, _))| {
                    let q = rho1.eval(r);
                    let mut acc = Complex64::default();
                    for (&c, &wc) in c_rule.nodes.iter().zip(&c_rule.weights) {
                        acc += resolvent(2.0 * pn * r * c - r * r + shift, eps, omega_max, model, grid) * wc;
                    }
                    acc * (2.0 * PI * r * r * q * q * wr)
                })
                .collect::<Vec<_>>()
                .into_iter()
                .sum()
        }
    };
    Ok(value * (4.0 * PI))
}

/// Value at `x = 0` of the interpolating polynomial through `points`
/// (Neville); with `points = (ε, Im F_ε / π)` this is Richardson
/// extrapolation in `ε`.
pub fn extrapolate_to_zero(points: &[(f64, f64)]) -> Result<f64> {
    if points.is_empty() {
        return Err(invalid("nothing to extrapolate"));
    }
    let x: Vec<f64> = points.iter().map(|p| p.0).collect();
    let mut t: Vec<f64> = points.iter().map(|p| p.1).collect();
    let n = t.len();
    for m in 1..n {
        for i in 0..n - m {
            let den = x[i] - x[i + m];
            if den == 0.0 {
                return Err(invalid("repeated extrapolation abscissa"));
            }
            t[i] = (x[i] * t[i + 1] - x[i + m] * t[i]) / den;
        }
    }
    Ok(t[0])
}

/// `c(P)` from `Im F_ε(P, P²)/π` on `eps_list`, extrapolated to `ε = 0`.
pub fn c_lorentzian(p: &[f64], eps_list: &[f64], model: &FormFactorModel, grid: &LorentzianGrid) -> Result<f64> {
    let pn = norm(p);
    let pts = eps_list
        .iter()
        .map(|&e| lorentzian_selfenergy(p, pn * pn, e, model, grid).map(|f| (e, f.im / PI)))
        .collect::<Result<Vec<_>>>()?;
    extrapolate_to_zero(&pts)
}

/// How a curve was computed.
#[derive(Debug, Clone, PartialEq)]
pub enum FgrMethod {
    DeltaResolved,
    Lorentzian { eps: Vec<f64> },
}

impl FgrMethod {
    pub fn tag(&self) -> String {
        match self {
            FgrMethod::DeltaResolved => "delta".to_string(),
            FgrMethod::Lorentzian { eps } => {
                let e: Vec<String> = eps.iter().map(|x| format!("{x:e}")).collect();
                format!("lorentzian[{}]", e.join(";"))
            }
        }
    }
}

/// Sampled `c(|P|)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FgrCurve {
    pub p_abs: Vec<f64>,
    pub c: Vec<f64>,
    pub mu: f64,
    pub d: usize,
    pub fingerprint: String,
    pub method: FgrMethod,
}

impl FgrCurve {
    pub const HEADER: [&'static str; 5] = ["p_abs", "c", "mu", "d", "method"];

    /// Index of the largest sample.
    pub fn peak(&self) -> Option<usize> {
        (0..self.c.len()).max_by(|&a, &b| self.c[a].total_cmp(&self.c[b]))
    }

    /// True when the samples rise strictly to a single interior maximum and
    /// then fall strictly.
    pub fn is_unimodal(&self) -> bool {
        let Some(k) = self.peak() else {
            return false;
        };
        k > 0
            && k + 1 < self.c.len()
            && self.c[..=k].windows(2).all(|w| w[0] < w[1])
            && self.c[k..].windows(2).all(|w| w[0] > w[1])
    }
}

/// Points along `P = |P| e₁`.
fn along_axis(pn: f64, d: usize) -> Vec<f64> {
    let mut p = vec![0.0; d];
    p[0] = pn;
    p
}

/// Delta-resolved curve on `p_abs` (parallel over samples).
pub fn fgr_curve(p_abs: &[f64], model: &FormFactorModel, grid: &QuadratureGrid) -> Result<FgrCurve> {
    if p_abs.iter().any(|p| !(*p >= 0.0)) {
        return Err(invalid("|P| samples must be nonnegative"));
    }
    let c = p_abs
        .par_iter()
        .map(|&pn| c_of_p(&along_axis(pn, model.d), model, grid))
        .collect::<Result<Vec<_>>>()?;
    Ok(FgrCurve {
        p_abs: p_abs.to_vec(),
        c,
        mu: model.mu,
        d: model.d,
        fingerprint: model.fingerprint(),
        method: FgrMethod::DeltaResolved,
    })
}

/// Lorentzian-extrapolated curve on `p_abs`.
pub fn fgr_curve_lorentzian(
    p_abs: &[f64],
    eps_list: &[f64],
    model: &FormFactorModel,
    grid: &LorentzianGrid,
) -> Result<FgrCurve> {
    let c = p_abs
        .iter()
        .map(|&pn| {
            if pn == 0.0 {
                Ok(0.0)
            } else {
                c_lorentzian(&along_axis(pn, model.d), eps_list, model, grid)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FgrCurve {
        p_abs: p_abs.to_vec(),
        c,
        mu: model.mu,
        d: model.d,
        fingerprint: model.fingerprint(),
        method: FgrMethod::Lorentzian { eps: eps_list.to_vec() },
    })
}

/// `lim_{|P|→∞} |P| c(P)`: the resonance set collapses onto a layer of
/// width `1/|P|` at `ξ = 0`, giving `2π |ρ̂₁(0)|² ∫f` in `d = 1` and
/// `4π² ∫ r |ρ̂₁(r)|² dr ∫f` in `d = 3`.
pub fn large_p_coefficient(model: &FormFactorModel, grid: &QuadratureGrid) -> Result<f64> {
    model.validate()?;
    let order = grid.order;
    let edge = grading_for_power(2.0 + 2.0 * model.mu).max(2.0);
    let wcut = model.rho2_hat.cutoff(grid);
    let f_int = grid.integrate_converged(|n| Rule::graded(0.0, wcut, n, order, edge), |w| spectral_weight(w, model))?;
    let rho1 = &model.rho1_hat;
    match model.d {
        1 => Ok(2.0 * PI * rho1.eval(0.0).powi(2) * f_int),
        3 => {
            let r_int = grid.integrate_converged(
                |n| Rule::composite(0.0, rho1.cutoff(grid), n, order),
                |r| r * rho1.eval(r).powi(2),
            )?;
            Ok(4.0 * PI * PI * r_int * f_int)
        }
        _ => Err(invalid("the golden rule is implemented for d = 1 and d = 3")),
    }
}

/// Small-`|P|` behaviour of `c`.
#[derive(Debug, Clone, PartialEq)]
pub struct SmallPFit {
    pub p_abs: Vec<f64>,
    pub c: Vec<f64>,
    pub exponent: f64,
    /// `d + 4 + 4μ`.
    pub expected: f64,
}

/// Log-log slope of `c` on `|P| ∈ {2⁻⁶, 2⁻⁵, 2⁻⁴, 2⁻³}`.
pub fn c_small_p_exponent(model: &FormFactorModel, grid: &QuadratureGrid) -> Result<SmallPFit> {
    let p_abs: Vec<f64> = (3..=6).rev().map(|k| 0.5f64.powi(k)).collect();
    let curve = fgr_curve(&p_abs, model, grid)?;
    let exponent = loglog_slope(&curve.p_abs, &curve.c)?.slope;
    Ok(SmallPFit {
        p_abs,
        c: curve.c,
        exponent,
        expected: model.d as f64 + 4.0 + 4.0 * model.mu,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model(mu: f64, d: usize) -> FormFactorModel {
        FormFactorModel::gaussian(mu, 0.1).with_d(d).unwrap()
    }

    #[test]
    fn vanishes_at_rest_and_is_positive_elsewhere() {
        let q = QuadratureGrid::default();
        for d in [1, 3] {
            let m = model(0.0, d);
            assert_eq!(c_of_p(&vec![0.0; d], &m, &q).unwrap(), 0.0);
            assert!(c_of_p(&along_axis(0.7, d), &m, &q).unwrap() > 0.0);
        }
    }

    #[test]
    fn one_dimensional_value_by_substitution() {
        // independent midpoint sum of 4π ∫_0^{2P} ω² e^{-ω²} e^{-ξ²} dξ
        let m = model(0.0, 1);
        let pn = 0.8;
        let n = 200_000;
        let h = 2.0 * pn / n as f64;
        let mid: f64 = (0..n)
            .map(|i| {
                let xi = (i as f64 + 0.5) * h;
                let w = 2.0 * pn * xi - xi * xi;
                (w * w) * (-w * w).exp() * (-xi * xi).exp()
            })
            .sum::<f64>()
            * h
            * 4.0
            * PI;
        let c = c_of_p(&[pn], &m, &QuadratureGrid::default()).unwrap();
        assert!((c / mid - 1.0).abs() < 1e-9, "{c} {mid}");
    }

    #[test]
    fn depends_only_on_the_norm_of_p() {
        let m = model(0.5, 3);
        let q = QuadratureGrid::default();
        let a = c_of_p(&[1.0, 0.0, 0.0], &m, &q).unwrap();
        let s = 1.0 / 3f64.sqrt();
        let b = c_of_p(&[s, -s, s], &m, &q).unwrap();
        assert!((a - b).abs() <= 1e-10 * a);
        let c = c_of_p(&[-1.0], &model(0.5, 1), &q).unwrap();
        let e = c_of_p(&[1.0], &model(0.5, 1), &q).unwrap();
        assert_eq!(c, e);
    }

    #[test]
    fn small_p_exponents() {
        let q = QuadratureGrid::default();
        let f = c_small_p_exponent(&model(0.0, 1), &q).unwrap();
        assert!((f.exponent - 5.0).abs() < 0.1, "{f:?}");
        let f = c_small_p_exponent(&model(0.5, 3), &q).unwrap();
        assert!((f.exponent - 9.0).abs() < 0.2, "{f:?}");
    }

    #[test]
    fn neville_recovers_polynomial_limit() {
        let pts: Vec<(f64, f64)> = [0.1, 0.01, 0.001].iter().map(|&e| (e, 2.0 + 3.0 * e - 5.0 * e * e)).collect();
        assert!((extrapolate_to_zero(&pts).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn lorentzian_imaginary_part_is_positive_and_g_free() {
        let grid = LorentzianGrid::default();
        let a = lorentzian_selfenergy(&[0.9], 0.81, 1e-2, &model(0.0, 1), &grid).unwrap();
        let b = lorentzian_selfenergy(&[0.9], 0.81, 1e-2, &model(0.0, 1).with_g(3.0), &grid).unwrap();
        assert!(a.im > 0.0);
        assert_eq!(a, b);
    }

    #[test]
    fn under_resolved_epsilon_is_rejected() {
        let grid = LorentzianGrid::default();
        assert!(matches!(
            lorentzian_selfenergy(&[0.9], 0.81, 1e-12, &model(0.0, 1), &grid),
            Err(Error::EpsilonUnderResolved { .. })
        ));
    }

    #[test]
    fn lorentzian_limit_matches_delta_in_one_dimension() {
        let m = model(0.0, 1);
        let grid = LorentzianGrid::default();
        let c = c_lorentzian(&[1.0], &[1e-1, 1e-2, 1e-3], &m, &grid).unwrap();
        let d = c_of_p(&[1.0], &m, &QuadratureGrid::default()).unwrap();
        assert!((c / d - 1.0).abs() < 1e-2, "{c} {d}");
    }

    #[test]
    fn gaussian_curve_is_unimodal() {
        let ps: Vec<f64> = (0..=32).map(|i| 0.25 * i as f64).collect();
        let curve = fgr_curve(&ps, &model(0.0, 1), &QuadratureGrid::default()).unwrap();
        assert_eq!(curve.c[0], 0.0);
        assert!(curve.is_unimodal());
    }

    #[test]
    fn tail_follows_inverse_momentum() {
        let q = QuadratureGrid::default();
        for d in [1, 3] {
            let m = model(0.5, d);
            let a = large_p_coefficient(&m, &q).unwrap();
            let c = c_of_p(&along_axis(64.0, d), &m, &q).unwrap();
            assert!((64.0 * c / a - 1.0).abs() < 1e-2, "d={d} {} {a}", 64.0 * c);
        }
    }
}
