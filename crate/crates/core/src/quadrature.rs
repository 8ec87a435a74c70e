//! One-dimensional quadrature rules.
//!
//! Everything here is built from Gauss–Legendre panels. Integrands with an
//! algebraic endpoint behaviour `x^s` are handled by the graded substitution
//! `x = a + (b - a) t^p`, which turns the endpoint power into `t^{p(s+1)-1}`;
//! choosing `p` so that exponent is an integer restores polynomial accuracy.

use crate::error::{Error, Result};
use std::f64::consts::PI;

/// Node/weight pairs for `∫ f(x) dx ≈ Σ w_i f(x_i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule {
    /// Gauss–Legendre rule with `n` nodes on `[-1, 1]`.
    pub fn gauss_legendre(n: usize) -> Rule {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            // Tricomi initial guess, then Newton on P_n.
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    let (_, d) = legendre_with_derivative(n, x);
                    dp = d;
                    break;
                }
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Rule { nodes, weights }
    }

    /// `panels` equal Gauss–Legendre panels of `order` nodes on `[a, b]`.
    pub fn composite(a: f64, b: f64, panels: usize, order: usize) -> Rule {
        Self::graded(a, b, panels, order, 1.0)
    }

    /// Composite rule in `t ∈ [0, 1]` mapped through `x = a + (b - a) t^p`.
    ///
    /// `p > 1` clusters nodes towards `a`.
    pub fn graded(a: f64, b: f64, panels: usize, order: usize, p: f64) -> Rule {
        assert!(panels >= 1 && p >= 1.0);
        let base = Rule::gauss_legendre(order);
        let mut nodes = Vec::with_capacity(panels * order);
        let mut weights = Vec::with_capacity(panels * order);
        let len = b - a;
        let h = 1.0 / panels as f64;
        for j in 0..panels {
            let t0 = j as f64 * h;
            for (x, w) in base.nodes.iter().zip(&base.weights) {
                let t = t0 + 0.5 * h * (x + 1.0);
                let wt = 0.5 * h * w;
                if p == 1.0 {
                    nodes.push(a + len * t);
                    weights.push(len * wt);
                } else {
                    nodes.push(a + len * t.powf(p));
                    weights.push(len * p * t.powf(p - 1.0) * wt);
                }
            }
        }
        Rule { nodes, weights }
    }

    /// Composite rule on `[a, b]` clustered towards both endpoints
    /// (graded halves meeting at the midpoint).
    pub fn graded_both(a: f64, b: f64, panels: usize, order: usize, p: f64) -> Rule {
        let mid = 0.5 * (a + b);
        let left = Rule::graded(a, mid, panels, order, p);
        let right = Rule::graded(b, mid, panels, order, p);
        let mut nodes = left.nodes;
        let mut weights = left.weights;
        // Mapping towards `b` runs backwards: nodes decrease and the
        // Jacobian carries a sign flip.
        for (x, w) in right.nodes.iter().zip(&right.weights).rev() {
            nodes.push(*x);
            weights.push(-w);
        }
        Rule { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { 1.0 } else { p1 };
    let dp = n as f64 * (x * p - p0) / (x * x - 1.0);
    (p, dp)
}

/// Grading exponent that makes `x^s dx` polynomial in the graded variable.
///
/// Returns the smallest `p ≥ 1` with `p (s + 1)` an integer.
pub fn grading_for_power(s: f64) -> f64 {
    assert!(s > -1.0, "endpoint power must exceed -1");
    let e = s + 1.0;
    let near = e.round();
    if (e - near).abs() < 1e-12 {
        return 1.0;
    }
    (e.ceil() / e).max(1.0)
}

/// Resolution settings for the radial integrals of the model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureGrid {
    /// Panels of the coarsest level.
    pub panels: usize,
    /// Gauss–Legendre nodes per panel.
    pub order: usize,
    /// Relative tolerance between two successive refinement levels.
    pub tol: f64,
    /// Number of panel doublings allowed before giving up.
    pub max_refinements: usize,
    /// Cut-off of a gaussian profile in units of its scale.
    pub cutoff_sigmas: f64,
}

impl Default for QuadratureGrid {
    fn default() -> Self {
        QuadratureGrid {
            panels: 8,
            order: 16,
            tol: 1e-10,
            max_refinements: 6,
            cutoff_sigmas: 12.0,
        }
    }
}

impl QuadratureGrid {
    /// Same grid with every level twice as fine.
    pub fn refined(&self) -> Self {
        QuadratureGrid {
            panels: self.panels * 2,
            ..*self
        }
    }

    /// Integrates with the rule produced by `build(panels)`, doubling the
    /// panel count until two successive levels agree to `self.tol`.
    pub fn integrate_converged(
        &self,
        build: impl Fn(usize) -> Rule,
        f: impl Fn(f64) -> f64,
    ) -> Result<f64> {
        let mut panels = self.panels;
        let mut prev = build(panels).integrate(&f);
        let mut residual = f64::INFINITY;
        for _ in 0..self.max_refinements {
            panels *= 2;
            let next = build(panels).integrate(&f);
            residual = (next - prev).abs();
            if residual <= self.tol * next.abs().max(f64::MIN_POSITIVE) || next == prev {
                return Ok(next);
            }
            prev = next;
        }
        Err(Error::QuadratureNotConverged {
            residual: residual / prev.abs().max(f64::MIN_POSITIVE),
            tol: self.tol,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        let r = Rule::gauss_legendre(7);
        // exact for degree <= 13
        let v = r.integrate(|x| x.powi(12) + 3.0 * x.powi(5) + 1.0);
        assert!((v - (2.0 / 13.0 + 2.0)).abs() < 1e-14);
        let sum: f64 = r.weights.iter().sum();
        assert!((sum - 2.0).abs() < 1e-14);
    }

    #[test]
    fn high_order_nodes_are_sorted_and_inside() {
        let r = Rule::gauss_legendre(64);
        assert!(r.nodes.windows(2).all(|w| w[0] < w[1]));
        assert!(r.nodes.iter().all(|x| x.abs() < 1.0));
    }

    #[test]
    fn graded_rule_handles_algebraic_endpoint() {
        let s: f64 = -0.5;
        let p = grading_for_power(s);
        assert!((p * (s + 1.0) - 1.0).abs() < 1e-12);
        let r = Rule::graded(0.0, 1.0, 4, 10, p);
        let v = r.integrate(|x| x.powf(s));
        assert!((v - 2.0).abs() < 1e-12);
    }

    #[test]
    fn graded_both_clusters_at_each_end() {
        let r = Rule::graded_both(0.0, 2.0, 4, 12, 2.0);
        // ∫_0^2 sqrt(x(2-x)) dx = π/2
        let v = r.integrate(|x| (x * (2.0 - x)).sqrt());
        assert!((v - PI / 2.0).abs() < 1e-6, "{v}");
        assert!(r.nodes.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn convergence_loop_reports_failure() {
        let g = QuadratureGrid {
            panels: 1,
            order: 2,
            tol: 1e-15,
            max_refinements: 1,
            cutoff_sigmas: 12.0,
        };
        let err = g
            .integrate_converged(|n| Rule::composite(0.0, 1.0, n, 2), |x| (50.0 * x).sin())
            .unwrap_err();
        assert!(matches!(err, Error::QuadratureNotConverged { .. }));
    }
}
