//! Discretisation of the single-mode phase space `(|k|, ξ)` for `d = 1`.
//!
//! Radial `k` cells carry the three-dimensional Jacobian, so a node weight is
//! `4π k² Δk · Δξ` and `Σ_n w_n f(k_n, ξ_n)` approximates `∫_{ℝ³×ℝ} f dk dξ`
//! for radial `f`.

use crate::error::{invalid, Result};
use std::f64::consts::PI;

/// Cells of the radial `k` axis.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialGrid {
    pub nodes: Vec<f64>,
    pub widths: Vec<f64>,
}

impl RadialGrid {
    /// `n` equal midpoint cells covering `[0, k_max]`; the IR cutoff is `Δ/2`.
    pub fn uniform(k_max: f64, n: usize) -> Result<Self> {
        if !(k_max > 0.0) || n == 0 {
            return Err(invalid("uniform k grid needs k_max > 0 and n > 0"));
        }
        let h = k_max / n as f64;
        Ok(RadialGrid {
            nodes: (0..n).map(|i| (i as f64 + 0.5) * h).collect(),
            widths: vec![h; n],
        })
    }

    /// Log-midpoint cells with `per_decade` nodes per factor of ten.
    ///
    /// Nodes sit at `k_min · r^i` with `r = 10^{1/per_decade}`, so grids with
    /// the same `k_min` anchor and ratio are nested when the range grows.
    pub fn geometric(k_min: f64, k_max: f64, per_decade: usize) -> Result<Self> {
        if !(k_min > 0.0) || !(k_max > k_min) || per_decade == 0 {
            return Err(invalid("geometric k grid needs 0 < k_min < k_max"));
        }
        let ln_r = std::f64::consts::LN_10 / per_decade as f64;
        let n = ((k_max / k_min).ln() / ln_r).floor() as usize + 1;
        let half = (0.5 * ln_r).exp();
        let nodes: Vec<f64> = (0..n).map(|i| k_min * (i as f64 * ln_r).exp()).collect();
        let widths = nodes.iter().map(|k| k * (half - 1.0 / half)).collect();
        Ok(RadialGrid { nodes, widths })
    }

    /// Geometric cells below `k_switch`, uniform cells of width `h` above.
    pub fn graded(k_min: f64, k_switch: f64, k_max: f64, per_decade: usize, h: f64) -> Result<Self> {
        if !(k_switch > k_min) || !(k_max > k_switch) || !(h > 0.0) {
            return Err(invalid("graded k grid needs k_min < k_switch < k_max and h > 0"));
        }
        let ln_r = std::f64::consts::LN_10 / per_decade as f64;
        let half = (0.5 * ln_r).exp();
        let mut nodes = Vec::new();
        let mut widths = Vec::new();
        let mut upper = 0.0;
        let mut i = 0;
        loop {
            let k = k_min * (i as f64 * ln_r).exp();
            let hi = k * half;
            if hi > k_switch {
                break;
            }
            nodes.push(k);
            widths.push(k * (half - 1.0 / half));
            upper = hi;
            i += 1;
        }
        let n_uni = ((k_max - upper) / h).ceil() as usize;
        let hu = (k_max - upper) / n_uni as f64;
        for j in 0..n_uni {
            nodes.push(upper + (j as f64 + 0.5) * hu);
            widths.push(hu);
        }
        Ok(RadialGrid { nodes, widths })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn k_min(&self) -> f64 {
        self.nodes[0]
    }

    pub fn k_max(&self) -> f64 {
        self.nodes[self.nodes.len() - 1] + 0.5 * self.widths[self.widths.len() - 1]
    }

    /// `4π k² Δk` per cell.
    pub fn weights_3d(&self) -> Vec<f64> {
        self.nodes
            .iter()
            .zip(&self.widths)
            .map(|(k, w)| 4.0 * PI * k * k * w)
            .collect()
    }
}

/// Uniform symmetric `ξ` nodes `j Δ`, `j = -J..=J` (contains `ξ = 0`).
#[derive(Debug, Clone, PartialEq)]
pub struct XiGrid {
    pub nodes: Vec<f64>,
    pub spacing: f64,
}

impl XiGrid {
    /// Nodes `jΔ` for `|j| ≤ J` with `Δ = xi_max / J`.
    pub fn uniform(xi_max: f64, half_count: usize) -> Result<Self> {
        if !(xi_max > 0.0) || half_count == 0 {
            return Err(invalid("xi grid needs xi_max > 0 and at least one positive node"));
        }
        let h = xi_max / half_count as f64;
        Self::with_spacing(h, half_count)
    }

    pub fn with_spacing(spacing: f64, half_count: usize) -> Result<Self> {
        if !(spacing > 0.0) {
            return Err(invalid("xi spacing must be positive"));
        }
        let j = half_count as i64;
        Ok(XiGrid {
            nodes: (-j..=j).map(|i| i as f64 * spacing).collect(),
            spacing,
        })
    }

    /// Single node at `ξ = 0` with the given cell width.
    pub fn origin_only(width: f64) -> Self {
        XiGrid {
            nodes: vec![0.0],
            spacing: width,
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn xi_max(&self) -> f64 {
        self.nodes[self.nodes.len() - 1]
    }

    /// Index of the node mirrored through the origin.
    pub fn mirror(&self, j: usize) -> usize {
        self.nodes.len() - 1 - j
    }

    /// Index of the node closest to `xi`.
    pub fn nearest(&self, xi: f64) -> usize {
        let mut best = 0;
        for (j, x) in self.nodes.iter().enumerate() {
            if (x - xi).abs() < (self.nodes[best] - xi).abs() {
                best = j;
            }
        }
        best
    }
}

/// Product grid of radial `k` cells and `ξ` nodes, flattened `n = i·n_ξ + j`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeGrid {
    pub k: RadialGrid,
    pub xi: XiGrid,
}

/// One node of a [`ModeGrid`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeNode {
    pub k: f64,
    pub xi: f64,
    pub weight: f64,
}

impl ModeGrid {
    pub fn new(k: RadialGrid, xi: XiGrid) -> Self {
        ModeGrid { k, xi }
    }

    pub fn len(&self) -> usize {
        self.k.len() * self.xi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn k_min(&self) -> f64 {
        self.k.k_min()
    }

    pub fn index(&self, i_k: usize, j_xi: usize) -> usize {
        i_k * self.xi.len() + j_xi
    }

    pub fn node(&self, n: usize) -> ModeNode {
        let nx = self.xi.len();
        let (i, j) = (n / nx, n % nx);
        let k = self.k.nodes[i];
        ModeNode {
            k,
            xi: self.xi.nodes[j],
            weight: 4.0 * PI * k * k * self.k.widths[i] * self.xi.spacing,
        }
    }

    pub fn nodes(&self) -> Vec<ModeNode> {
        (0..self.len()).map(|n| self.node(n)).collect()
    }

    /// Flattened index of the `ξ`-mirror of node `n`.
    pub fn mirror(&self, n: usize) -> usize {
        let nx = self.xi.len();
        let (i, j) = (n / nx, n % nx);
        i * nx + self.xi.mirror(j)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_cells_cover_range() {
        let g = RadialGrid::uniform(2.0, 4).unwrap();
        assert_eq!(g.nodes, vec![0.25, 0.75, 1.25, 1.75]);
        assert_eq!(g.k_min(), 0.25);
        assert!((g.k_max() - 2.0).abs() < 1e-15);
        // ∫_{|k|<2} dk = 32π/3 up to the O(h²) midpoint error
        let v: f64 = g.weights_3d().iter().sum();
        assert!((v / (32.0 * PI / 3.0) - 1.0).abs() < 0.02);
    }

    #[test]
    fn geometric_cells_tile_without_gaps() {
        let g = RadialGrid::geometric(1e-3, 10.0, 10).unwrap();
        for (k, h) in g.nodes.windows(2).zip(g.widths.windows(2)) {
            // upper edge of one cell is the lower edge of the next
            let r = k[1] / k[0];
            let hi = k[0] * r.sqrt();
            let lo = k[1] / r.sqrt();
            assert!((hi - lo).abs() < 1e-12 * hi);
            assert!(h[0] < h[1]);
        }
        // log-midpoint rule: ∫_{a}^{b} dk/k = ln(b/a)
        let s: f64 = g.nodes.iter().zip(&g.widths).map(|(k, w)| w / k).sum();
        let ln_r = std::f64::consts::LN_10 / 10.0;
        let expected = g.len() as f64 * ln_r;
        assert!((s / expected - 1.0).abs() < 3e-3);
    }

    #[test]
    fn geometric_grids_with_common_anchor_nest() {
        let a = RadialGrid::geometric(1e-4, 5.0, 8).unwrap();
        let b = RadialGrid::geometric(1e-4, 5.0, 8).unwrap();
        assert_eq!(a, b);
        let coarse = RadialGrid::geometric(1e-3, 5.0, 8).unwrap();
        let fine = RadialGrid::geometric(1e-4, 5.0, 8).unwrap();
        // every coarse node appears in the fine grid
        for k in &coarse.nodes {
            assert!(fine.nodes.iter().any(|f| (f / k - 1.0).abs() < 1e-12));
        }
    }

    #[test]
    fn graded_grid_is_increasing() {
        let g = RadialGrid::graded(1e-3, 0.1, 4.0, 20, 0.01).unwrap();
        assert!(g.nodes.windows(2).all(|w| w[0] < w[1]));
        assert!((g.k_max() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn xi_grid_is_symmetric_and_contains_origin() {
        let x = XiGrid::uniform(2.0, 8).unwrap();
        assert_eq!(x.len(), 17);
        assert_eq!(x.nodes[8], 0.0);
        for j in 0..x.len() {
            assert_eq!(x.nodes[j], -x.nodes[x.mirror(j)]);
        }
        assert_eq!(x.nearest(0.74), 11);
    }

    #[test]
    fn mode_grid_weights_positive() {
        let g = ModeGrid::new(RadialGrid::uniform(3.0, 5).unwrap(), XiGrid::uniform(1.0, 2).unwrap());
        assert_eq!(g.len(), 25);
        assert!(g.nodes().iter().all(|n| n.weight > 0.0));
        for n in 0..g.len() {
            assert_eq!(g.node(g.mirror(n)).xi, -g.node(n).xi);
            assert_eq!(g.mirror(g.mirror(n)), n);
        }
    }
}
