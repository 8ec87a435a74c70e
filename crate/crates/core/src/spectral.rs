//! Fiber Hamiltonians `H(P)` on a truncated Fock space and the probes run
//! on them: second-order energies, flatness of the ground-state energy in
//! `P`, infrared behaviour of the one-boson amplitude, and the Mourre bound.
//!
//! Everything here is for `d = 1`; the quantum particle has mass 1/2, so
//! the kinetic term is `(P - dΓ(ξ))²`.

use crate::eigen::{lowest_eigenpair, EigenOptions, Eigenpair};
use crate::error::{invalid, Error, Result};
use crate::fit::{fit_line, loglog_slope};
use crate::fock::{assemble_with_field, FockBasis, FockOperator, DEFAULT_DIMENSION_CAP};
use crate::formfactor::{coupling_radial, FormFactorModel};
use crate::grid::{ModeGrid, RadialGrid, XiGrid};
use crate::quadrature::{QuadratureGrid, Rule};
use num_complex::Complex64;
use rayon::prelude::*;
use std::collections::HashMap;
use std::f64::consts::PI;

/// Discrete one-boson data: `k`, `ξ`, weight and `h₀` per node.
#[derive(Debug, Clone, PartialEq)]
pub struct SingleBosonGrid {
    pub grid: ModeGrid,
    pub k: Vec<f64>,
    pub xi: Vec<f64>,
    pub weight: Vec<f64>,
    pub h0: Vec<f64>,
}

impl SingleBosonGrid {
    pub fn new(model: &FormFactorModel, grid: &ModeGrid) -> Result<Self> {
        model.validate()?;
        if model.d != 1 {
            return Err(invalid("Fock-space computations use d = 1"));
        }
        if grid.is_empty() || !(grid.k_min() > 0.0) {
            return Err(invalid("single-boson grid needs nodes and k_min > 0"));
        }
        let nodes = grid.nodes();
        let h0 = nodes
            .iter()
            .map(|n| coupling_radial(n.k, n.xi.abs(), model))
            .collect::<Result<Vec<_>>>()?;
        Ok(SingleBosonGrid {
            grid: grid.clone(),
            k: nodes.iter().map(|n| n.k).collect(),
            xi: nodes.iter().map(|n| n.xi).collect(),
            weight: nodes.iter().map(|n| n.weight).collect(),
            h0,
        })
    }

    pub fn len(&self) -> usize {
        self.k.len()
    }

    pub fn is_empty(&self) -> bool {
        self.k.is_empty()
    }

    /// `‖h₀‖²` in the discrete pairing.
    pub fn h0_norm_sq(&self) -> f64 {
        self.weight.iter().zip(&self.h0).map(|(w, h)| w * h * h).sum()
    }
}

/// Free energy `(P - Σξ)² + Σk` of a multiset of modes.
fn free_energy(p: f64, sb: &SingleBosonGrid, s: &[u32]) -> f64 {
    let mut xi = 0.0;
    let mut k = 0.0;
    for &m in s {
        xi += sb.xi[m as usize];
        k += sb.k[m as usize];
    }
    let d = p - xi;
    d * d + k
}

/// `H(P) = (P - dΓ(ξ))² + dΓ(|k|) + g Φ(h₀)` on the basis `basis`.
pub fn assemble_h_on(p: f64, g: f64, sb: &SingleBosonGrid, basis: &FockBasis) -> Result<FockOperator> {
    let coeff: Vec<Complex64> = sb
        .weight
        .iter()
        .zip(&sb.h0)
        .map(|(w, h)| Complex64::new(g * w.sqrt() * h, 0.0))
        .collect();
    assemble_with_field(&format!("H(P={p})"), basis, |s| free_energy(p, sb, s), &coeff)
}

/// Builds the basis and assembles `H(P)`.
pub fn assemble_h(p: f64, model: &FormFactorModel, grid: &ModeGrid, n_max: usize) -> Result<(FockOperator, FockBasis)> {
    let sb = SingleBosonGrid::new(model, grid)?;
    let basis = FockBasis::new(sb.len(), n_max, DEFAULT_DIMENSION_CAP)?;
    let op = assemble_h_on(p, model.g, &sb, &basis)?;
    Ok((op, basis))
}

/// Applies `Y = y₀ - dΓ(ξ) - Σ_m e_m (a*_m + a_m)` to a sparse vector of
/// occupation multisets, without truncation.
fn apply_recoil(y0: f64, sb: &SingleBosonGrid, e: &[f64], x: &HashMap<Vec<u32>, f64>) -> HashMap<Vec<u32>, f64> {
    let mut out: HashMap<Vec<u32>, f64> = HashMap::with_capacity(x.len() * (1 + 2 * e.len()));
    for (s, &a) in x {
        let xi: f64 = s.iter().map(|&m| sb.xi[m as usize]).sum();
        *out.entry(s.clone()).or_default() += a * (y0 - xi);
        for (m, &em) in e.iter().enumerate() {
            if em == 0.0 {
                continue;
            }
            let m = m as u32;
            let occ = s.iter().filter(|&&x| x == m).count() as f64;
            let mut t = s.clone();
            t.insert(t.partition_point(|&x| x <= m), m);
            *out.entry(t).or_default() -= a * em * (occ + 1.0).sqrt();
            if occ > 0.0 {
                let mut t = s.clone();
                t.remove(t.partition_point(|&x| x < m));
                *out.entry(t).or_default() -= a * em * occ.sqrt();
            }
        }
    }
    out
}

/// `H(P)` conjugated by the Weyl operator that removes the linear coupling
/// at second order: with `b_n = -g √w_n h₀_n / D_n`,
/// `D_n = (P - ξ_n)² - P² + k_n`, the transformed operator is
///
/// ```text
/// Y² + dΓ(k) + Σ (k_n b_n + g √w_n h₀_n)(a*_n + a_n) + Σ k_n b_n² + 2g Σ √w_n h₀_n b_n,
/// Y = P - dΓ(ξ) - Σ ξ_n b_n (a*_n + a_n) - Σ ξ_n b_n².
/// ```
///
/// It is unitarily equivalent to `H(P)` on the full Fock space, but its
/// truncation to `N_max` bosons converges far faster in `g`. The
/// compression `P_N Y² P_N` is exact (the intermediate sum runs over
/// `N_max + 1` bosons). Fails when some `D_n ≤ 0`.
pub fn assemble_h_displaced_on(p: f64, g: f64, sb: &SingleBosonGrid, basis: &FockBasis) -> Result<FockOperator> {
    let n = sb.len();
    let b = (0..n)
        .map(|i| {
            let d = (p - sb.xi[i]).powi(2) - p * p + sb.k[i];
            if !(d > 0.0) {
                return Err(invalid("displaced frame needs (P - ξ)² - P² + k > 0 on every node"));
            }
            Ok(-g * sb.weight[i].sqrt() * sb.h0[i] / d)
        })
        .collect::<Result<Vec<f64>>>()?;
    let e: Vec<f64> = (0..n).map(|i| sb.xi[i] * b[i]).collect();
    let lin: Vec<f64> = (0..n).map(|i| sb.k[i] * b[i] + g * sb.weight[i].sqrt() * sb.h0[i]).collect();
    let shift: f64 = (0..n).map(|i| sb.xi[i] * b[i] * b[i]).sum();
    let constant: f64 = (0..n)
        .map(|i| sb.k[i] * b[i] * b[i] + 2.0 * g * sb.weight[i].sqrt() * sb.h0[i] * b[i])
        .sum();
    let y0 = p - shift;
    let n_max = basis.n_max();
    let rows: Vec<Vec<(usize, Complex64)>> = (0..basis.dim())
        .into_par_iter()
        .map(|i| {
            let s = basis.state(i);
            let start = HashMap::from([(s.to_vec(), 1.0)]);
            let yy = apply_recoil(y0, sb, &e, &apply_recoil(y0, sb, &e, &start));
            let kin: f64 = s.iter().map(|&m| sb.k[m as usize]).sum();
            let mut row: Vec<(usize, Complex64)> = yy
                .into_iter()
                .filter(|(t, v)| t.len() <= n_max && *v != 0.0)
                .map(|(t, v)| (basis.find(&t).expect("state in basis"), Complex64::new(v, 0.0)))
                .collect();
            row.push((i, Complex64::new(kin + constant, 0.0)));
            for (m, &c) in lin.iter().enumerate() {
                let m = m as u32;
                let occ = s.iter().filter(|&&x| x == m).count() as f64;
                if s.len() < n_max {
                    let mut t = s.to_vec();
                    t.insert(t.partition_point(|&x| x <= m), m);
                    row.push((basis.find(&t).expect("state in basis"), Complex64::new(c * (occ + 1.0).sqrt(), 0.0)));
                }
                if occ > 0.0 {
                    let mut t = s.to_vec();
                    t.remove(t.partition_point(|&x| x < m));
                    row.push((basis.find(&t).expect("state in basis"), Complex64::new(c * occ.sqrt(), 0.0)));
                }
            }
            row
        })
        .collect();
    Ok(FockOperator::from_rows(&format!("H'(P={p})"), rows))
}

/// Representation in which `H(P)` is truncated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Frame {
    /// Plain occupation basis.
    #[default]
    Bare,
    /// Coherently displaced basis, see [`assemble_h_displaced_on`]. Sector
    /// weights then count bosons on top of the coherent cloud.
    Displaced,
}

/// Assembles `H(P)` in `frame`.
pub fn assemble_h_in(frame: Frame, p: f64, g: f64, sb: &SingleBosonGrid, basis: &FockBasis) -> Result<FockOperator> {
    match frame {
        Frame::Bare => assemble_h_on(p, g, sb, basis),
        Frame::Displaced => assemble_h_displaced_on(p, g, sb, basis),
    }
}

/// Lowest eigenvalue with the structure of its eigenvector.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralReport {
    pub p: f64,
    pub energy: f64,
    /// `‖ψ^{(n)}‖²` per boson number.
    pub sector_weights: Vec<f64>,
    pub vacuum_overlap: f64,
    pub mean_number: f64,
    pub residual: f64,
    pub dim: usize,
}

impl SpectralReport {
    pub fn from_eigenpair(p: f64, e: &Eigenpair, basis: &FockBasis) -> Self {
        let sector_weights: Vec<f64> = (0..=basis.n_max())
            .map(|n| basis.sector(n).map(|i| e.vector[i].norm_sqr()).sum())
            .collect();
        let mean_number = sector_weights.iter().enumerate().map(|(n, w)| n as f64 * w).sum();
        SpectralReport {
            p,
            energy: e.value,
            vacuum_overlap: e.vector[0].norm_sqr(),
            sector_weights,
            mean_number,
            residual: e.residual,
            dim: basis.dim(),
        }
    }
}

/// Ground state of `H(P)` on the truncated space.
pub fn ground_state(
    p: f64,
    model: &FormFactorModel,
    grid: &ModeGrid,
    n_max: usize,
    opts: &EigenOptions,
) -> Result<(SpectralReport, Eigenpair, FockBasis)> {
    ground_state_in(Frame::Bare, p, model, grid, n_max, opts)
}

/// Ground state of `H(P)` truncated in `frame`.
pub fn ground_state_in(
    frame: Frame,
    p: f64,
    model: &FormFactorModel,
    grid: &ModeGrid,
    n_max: usize,
    opts: &EigenOptions,
) -> Result<(SpectralReport, Eigenpair, FockBasis)> {
    let sb = SingleBosonGrid::new(model, grid)?;
    let basis = FockBasis::new(sb.len(), n_max, DEFAULT_DIMENSION_CAP)?;
    let op = assemble_h_in(frame, p, model.g, &sb, &basis)?;
    let e = lowest_eigenpair(&op, opts)?;
    Ok((SpectralReport::from_eigenpair(p, &e, &basis), e, basis))
}

/// Second-order energy of the vacuum branch.
#[derive(Debug, Clone, PartialEq)]
pub struct Pt2Energy {
    pub energy: f64,
    /// Nodes whose denominator `(P-ξ)² - P² + k` vanished and were left out.
    pub excluded: Vec<usize>,
}

/// `E₂ = P² - g² Σ w h₀² / ((P - ξ)² - P² + k)`, resonant nodes excluded.
pub fn pt2_energy(p: f64, model: &FormFactorModel, grid: &ModeGrid) -> Result<Pt2Energy> {
    let sb = SingleBosonGrid::new(model, grid)?;
    let g = model.g;
    let mut sum = 0.0;
    let mut excluded = Vec::new();
    for n in 0..sb.len() {
        let d = (p - sb.xi[n]).powi(2) - p * p + sb.k[n];
        if d.abs() < 1e-12 * (1.0 + sb.k[n]) {
            excluded.push(n);
            continue;
        }
        sum += sb.weight[n] * sb.h0[n] * sb.h0[n] / d;
    }
    Ok(Pt2Energy {
        energy: p * p - g * g * sum,
        excluded,
    })
}

/// One row of the flatness probe.
#[derive(Debug, Clone, PartialEq)]
pub struct FlatnessRow {
    pub level: usize,
    pub p: f64,
    pub k_min: f64,
    pub xi_max: f64,
    pub energy: f64,
    pub energy_at_zero: f64,
    /// `E(P) - E(0)`.
    pub gap: f64,
}

/// `E(P) - E(0)` for every `P` in `p_list` on each grid of `levels`.
pub fn flatness_probe(
    p_list: &[f64],
    model: &FormFactorModel,
    levels: &[ModeGrid],
    n_max: usize,
    opts: &EigenOptions,
) -> Result<Vec<FlatnessRow>> {
    let mut rows = Vec::new();
    for (level, grid) in levels.iter().enumerate() {
        let sb = SingleBosonGrid::new(model, grid)?;
        let basis = FockBasis::new(sb.len(), n_max, DEFAULT_DIMENSION_CAP)?;
        let e0 = lowest_eigenpair(&assemble_h_on(0.0, model.g, &sb, &basis)?, opts)?.value;
        for &p in p_list {
            let e = if p == 0.0 {
                e0
            } else {
                lowest_eigenpair(&assemble_h_on(p, model.g, &sb, &basis)?, opts)?.value
            };
            rows.push(FlatnessRow {
                level,
                p,
                k_min: grid.k_min(),
                xi_max: grid.xi.xi_max(),
                energy: e,
                energy_at_zero: e0,
                gap: if p == 0.0 { 0.0 } else { e - e0 },
            });
        }
    }
    Ok(rows)
}

/// Grid used by the infrared probe for one value of `k_min`.
#[derive(Debug, Clone, PartialEq)]
pub struct IrProbeConfig {
    pub k_max: f64,
    pub per_decade: usize,
    pub xi_spacing: f64,
    pub xi_half_count: usize,
    pub n_max: usize,
}

impl Default for IrProbeConfig {
    fn default() -> Self {
        IrProbeConfig {
            k_max: 6.0,
            per_decade: 8,
            xi_spacing: 0.1,
            xi_half_count: 10,
            n_max: 1,
        }
    }
}

impl IrProbeConfig {
    pub fn grid(&self, k_min: f64) -> Result<ModeGrid> {
        Ok(ModeGrid::new(
            RadialGrid::geometric(k_min, self.k_max, self.per_decade)?,
            XiGrid::with_spacing(self.xi_spacing, self.xi_half_count)?,
        ))
    }
}

/// One row of the infrared probe.
#[derive(Debug, Clone, PartialEq)]
pub struct IrRow {
    pub mu: f64,
    pub k_min: f64,
    pub energy: f64,
    /// `∫ dk |ψ^{(1)}(k, 0)|² / |ψ^{(0)}|²` from the computed ground state.
    pub slice_norm: f64,
    /// The same quantity from first-order perturbation theory,
    /// `g² ρ̂₁(0)² 4π ∫_{k_min}^∞ k^{2μ} ρ̂₂(k)² dk`.
    pub pt_norm: f64,
}

/// Scaling of the slice norm with `k_min` for one `μ`.
#[derive(Debug, Clone, PartialEq)]
pub struct IrFit {
    pub mu: f64,
    /// Log-log slope of the slice norm against `k_min`.
    pub exponent: f64,
    /// Slope and `R²` of the slice norm against `ln(1/k_min)`.
    pub log_slope: f64,
    pub log_r_squared: f64,
    /// Largest ratio of successive slice norms.
    pub max_ratio: f64,
}

/// Ground state of `H(0)` for every `(μ, k_min)` and the one-boson norm of
/// its `ξ = 0` slice, the quantity the pull-through formula makes diverge
/// for `μ ≤ -1/2`.
pub fn ir_ground_state_probe(
    mu_list: &[f64],
    k_min_list: &[f64],
    model: &FormFactorModel,
    cfg: &IrProbeConfig,
    opts: &EigenOptions,
) -> Result<(Vec<IrRow>, Vec<IrFit>)> {
    let mut rows = Vec::new();
    let mut fits = Vec::new();
    for &mu in mu_list {
        let m = model.with_mu(mu)?;
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for &k_min in k_min_list {
            let grid = cfg.grid(k_min)?;
            let sb = SingleBosonGrid::new(&m, &grid)?;
            let basis = FockBasis::new(sb.len(), cfg.n_max, DEFAULT_DIMENSION_CAP)?;
            let e = lowest_eigenpair(&assemble_h_on(0.0, m.g, &sb, &basis)?, opts)?;
            let j0 = grid.xi.nearest(0.0);
            let vac = e.vector[0].norm_sqr();
            let mut slice = 0.0;
            for i in 0..grid.k.len() {
                let mode = grid.index(i, j0) as u32;
                let idx = basis.find(&[mode]).expect("one-boson state");
                slice += e.vector[idx].norm_sqr();
            }
            let slice_norm = slice / grid.xi.spacing / vac;
            let pt_norm = pt_slice_norm(&m, k_min)?;
            rows.push(IrRow {
                mu,
                k_min,
                energy: e.value,
                slice_norm,
                pt_norm,
            });
            xs.push(k_min);
            ys.push(slice_norm);
        }
        let exponent = loglog_slope(&xs, &ys)?.slope;
        let lx: Vec<f64> = xs.iter().map(|k| (1.0 / k).ln()).collect();
        let lin = fit_line(&lx, &ys)?;
        let max_ratio = ys
            .windows(2)
            .map(|w| (w[1] / w[0]).max(w[0] / w[1]))
            .fold(1.0, f64::max);
        fits.push(IrFit {
            mu,
            exponent,
            log_slope: lin.slope,
            log_r_squared: lin.r_squared,
            max_ratio,
        });
    }
    Ok((rows, fits))
}

/// `g² ρ̂₁(0)² 4π ∫_{k_min}^∞ k^{2μ} ρ̂₂(k)² dk`.
pub fn pt_slice_norm(model: &FormFactorModel, k_min: f64) -> Result<f64> {
    let q = QuadratureGrid::default();
    let cut = model.rho2_hat.cutoff(&q);
    if k_min >= cut {
        return Ok(0.0);
    }
    let s = 2.0 * model.mu;
    let r2 = &model.rho2_hat;
    let order = q.order;
    // x = ln k makes the power law smooth on [ln k_min, ln cut]
    let (a, b) = (k_min.ln(), cut.ln());
    let val = q.integrate_converged(
        |n| Rule::composite(a, b, n, order),
        |x| {
            let k = x.exp();
            let r = r2.eval(k);
            k.powf(s + 1.0) * r * r
        },
    )?;
    let r1 = model.rho1_hat.eval(0.0);
    Ok(model.g * model.g * r1 * r1 * 4.0 * PI * val)
}

/// Outcome of the Mourre check.
#[derive(Debug, Clone, PartialEq)]
pub struct MourreReport {
    /// `‖a h₀‖` in the discrete pairing.
    pub norm_ah0: f64,
    /// `c₀ = 1 - 2|g| ‖a h₀‖`.
    pub c0: f64,
    /// Lowest eigenvalue of `N - gΦ(i a h₀) + (1 - |g|‖a h₀‖) Π_Ω`.
    pub min_eigenvalue: f64,
    pub margin: f64,
    pub holds: bool,
}

/// `(i a h₀)(k, ξ) = -(1/k) ∂_ω[ω h₀(ω, ξ)]` at `ω = k`.
pub fn i_a_h0(model: &FormFactorModel, k: f64, xi: f64) -> f64 {
    let mu = model.mu;
    let r1 = model.rho1_hat.eval(xi.abs());
    let r2 = model.rho2_hat.eval(k);
    let dr2 = model.rho2_hat.derivative(k);
    // ∂_k (k^{μ+1} ρ̂₂(k)) = (μ+1) k^μ ρ̂₂ + k^{μ+1} ρ̂₂'
    let d = (mu + 1.0) * k.powf(mu) * r2 + k.powf(mu + 1.0) * dr2;
    -d * r1 / k
}

/// Discrete `‖a h₀‖`.
pub fn norm_a_h0(model: &FormFactorModel, grid: &ModeGrid) -> f64 {
    grid.nodes()
        .iter()
        .map(|n| n.weight * i_a_h0(model, n.k, n.xi).powi(2))
        .sum::<f64>()
        .sqrt()
}

/// Checks `N - gΦ(i a h₀) + (1 - |g|‖a h₀‖) Π_Ω ≥ 1 - 2|g|‖a h₀‖`.
pub fn mourre_check(
    model: &FormFactorModel,
    grid: &ModeGrid,
    n_max: usize,
    g: f64,
    opts: &EigenOptions,
) -> Result<MourreReport> {
    model.validate()?;
    let norm = norm_a_h0(model, grid);
    let b = g.abs() * norm;
    if b >= 0.5 {
        return Err(Error::OutsideSmallCoupling { value: b });
    }
    let nodes = grid.nodes();
    let coeff: Vec<Complex64> = nodes
        .iter()
        .map(|n| Complex64::new(-g * n.weight.sqrt() * i_a_h0(model, n.k, n.xi), 0.0))
        .collect();
    let basis = FockBasis::new(nodes.len(), n_max, DEFAULT_DIMENSION_CAP)?;
    let c = 1.0 - b;
    let op = assemble_with_field(
        "mourre",
        &basis,
        |s| if s.is_empty() { c } else { s.len() as f64 },
        &coeff,
    )?;
    let min_eigenvalue = lowest_eigenpair(&op, opts)?.value;
    let c0 = 1.0 - 2.0 * b;
    let margin = min_eigenvalue - c0;
    Ok(MourreReport {
        norm_ah0: norm,
        c0,
        min_eigenvalue,
        margin,
        holds: margin >= -1e-8,
    })
}

/// `‖a h₀‖` on geometric grids with decreasing `k_min`, and its log-log
/// slope against `k_min`.
pub fn mourre_norm_scaling(model: &FormFactorModel, k_mins: &[f64], cfg: &IrProbeConfig) -> Result<(Vec<f64>, f64)> {
    let norms = k_mins
        .iter()
        .map(|&k| cfg.grid(k).map(|g| norm_a_h0(model, &g)))
        .collect::<Result<Vec<_>>>()?;
    let slope = loglog_slope(k_mins, &norms)?.slope;
    Ok((norms, slope))
}

/// Exponent of `∫_{k_min} k^{2μ} dk` used as the reference for the probes.
pub fn ir_power_count(mu: f64) -> Option<f64> {
    let e = 2.0 * mu + 1.0;
    (e < 0.0).then_some(e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{DMatrix, SymmetricEigen};

    fn tiny_grid() -> ModeGrid {
        ModeGrid::new(RadialGrid::uniform(2.0, 2).unwrap(), XiGrid::origin_only(0.5))
    }

    fn dense_min(op: &FockOperator) -> f64 {
        let d = op.to_dense();
        let n = op.dim();
        SymmetricEigen::new(DMatrix::from_fn(n, n, |i, j| d[i][j])).eigenvalues.min()
    }

    #[test]
    fn vacuum_entry_is_p_squared() {
        let m = FormFactorModel::gaussian(0.0, 0.3);
        let g = ModeGrid::new(RadialGrid::uniform(2.0, 3).unwrap(), XiGrid::uniform(1.0, 2).unwrap());
        for p in [0.0, 0.5, -1.25] {
            let (op, _) = assemble_h(p, &m, &g, 2).unwrap();
            assert_eq!(op.get(0, 0).re, p * p);
            assert!(op.hermiticity_defect() < 1e-12);
        }
    }

    #[test]
    fn displaced_vacuum_entry_is_second_order_energy() {
        // ⟨Ω, H' Ω⟩ = E₂ + (Σ ξ b²)², and the shift vanishes at P = 0
        let m = FormFactorModel::gaussian(0.0, 0.3);
        let grid = ModeGrid::new(RadialGrid::uniform(2.0, 3).unwrap(), XiGrid::uniform(1.0, 2).unwrap());
        let sb = SingleBosonGrid::new(&m, &grid).unwrap();
        let basis = FockBasis::new(sb.len(), 2, 10_000).unwrap();
        for p in [0.0, 0.2, -0.35] {
            let op = assemble_h_displaced_on(p, m.g, &sb, &basis).unwrap();
            let shift: f64 = (0..sb.len())
                .map(|n| {
                    let d = (p - sb.xi[n]).powi(2) - p * p + sb.k[n];
                    let b = m.g * sb.weight[n].sqrt() * sb.h0[n] / d;
                    sb.xi[n] * b * b
                })
                .sum();
            let e2 = pt2_energy(p, &m, &grid).unwrap().energy;
            assert!((op.get(0, 0).re - e2 - shift * shift).abs() < 1e-14);
            assert!(op.hermiticity_defect() < 1e-14);
        }
    }

    #[test]
    fn displaced_and_bare_frames_share_the_ground_energy() {
        let m = FormFactorModel::gaussian(0.0, 0.3);
        let grid = ModeGrid::new(RadialGrid::uniform(2.0, 2).unwrap(), XiGrid::uniform(1.0, 1).unwrap());
        let opts = EigenOptions::default();
        let bare = ground_state_in(Frame::Bare, 0.1, &m, &grid, 12, &opts).unwrap().0.energy;
        let disp = ground_state_in(Frame::Displaced, 0.1, &m, &grid, 9, &opts).unwrap().0.energy;
        assert!((bare - disp).abs() < 2e-8, "{bare} {disp}");
        assert!(bare >= disp - 1e-12);
    }

    #[test]
    fn displaced_frame_rejects_resonant_nodes() {
        let m = FormFactorModel::gaussian(0.0, 0.3);
        let grid = ModeGrid::new(RadialGrid::uniform(0.2, 2).unwrap(), XiGrid::uniform(1.0, 2).unwrap());
        let sb = SingleBosonGrid::new(&m, &grid).unwrap();
        let basis = FockBasis::new(sb.len(), 1, 100).unwrap();
        assert!(assemble_h_displaced_on(2.0, m.g, &sb, &basis).is_err());
    }

    #[test]
    fn three_by_three_against_hand_built_matrix() {
        let m = FormFactorModel::gaussian(0.0, 0.4);
        let grid = tiny_grid();
        let p = 0.3;
        let (op, basis) = assemble_h(p, &m, &grid, 1).unwrap();
        assert_eq!(basis.dim(), 3);
        let nodes = grid.nodes();
        let c: Vec<f64> = nodes
            .iter()
            .map(|n| 0.4 * n.weight.sqrt() * (-0.5 * n.k * n.k).exp())
            .collect();
        let hand = DMatrix::from_row_slice(
            3,
            3,
            &[
                p * p, c[0], c[1],
                c[0], p * p + nodes[0].k, 0.0,
                c[1], 0.0, p * p + nodes[1].k,
            ],
        );
        let e_hand = SymmetricEigen::new(hand).eigenvalues.min();
        let e = lowest_eigenpair(&op, &EigenOptions::default()).unwrap();
        assert!((e.value - e_hand).abs() < 1e-12, "{} {}", e.value, e_hand);
    }

    #[test]
    fn free_spectrum_and_soft_boson_gap() {
        let m = FormFactorModel::gaussian(0.0, 0.0);
        let grid = ModeGrid::new(RadialGrid::uniform(2.0, 4).unwrap(), XiGrid::with_spacing(0.5, 2).unwrap());
        let (op, _) = assemble_h(0.5, &m, &grid, 2).unwrap();
        let e = lowest_eigenpair(&op, &EigenOptions::default()).unwrap();
        // one boson at ξ = P, k = k_min, particle at rest
        assert!((e.value - grid.k_min()).abs() < 1e-12);
    }

    #[test]
    fn ground_energy_nonpositive_at_rest() {
        let m = FormFactorModel::gaussian(0.0, 0.3);
        let g = ModeGrid::new(RadialGrid::uniform(3.0, 5).unwrap(), XiGrid::uniform(1.0, 2).unwrap());
        let (op, _) = assemble_h(0.0, &m, &g, 2).unwrap();
        let e = lowest_eigenpair(&op, &EigenOptions::default()).unwrap();
        assert!(e.value <= 0.0);
        assert!((e.value - dense_min(&op)).abs() < 1e-9);
    }

    #[test]
    fn pt2_trivial_cases() {
        let g = ModeGrid::new(RadialGrid::uniform(3.0, 5).unwrap(), XiGrid::uniform(1.0, 2).unwrap());
        let free = pt2_energy(0.7, &FormFactorModel::gaussian(0.0, 0.0), &g).unwrap();
        assert_eq!(free.energy, 0.7 * 0.7);
        let a = pt2_energy(0.0, &FormFactorModel::gaussian(0.0, 0.1), &g).unwrap().energy;
        let b = pt2_energy(0.0, &FormFactorModel::gaussian(0.0, 0.2), &g).unwrap().energy;
        assert!(b < a && a < 0.0);
    }

    #[test]
    fn pt2_flags_resonant_nodes() {
        let g = ModeGrid::new(RadialGrid::uniform(1.0, 2).unwrap(), XiGrid::with_spacing(0.5, 2).unwrap());
        // node k = 0.25, ξ = 0.5: 0.25 + 0.25 - P = 0 at P = 0.5
        let r = pt2_energy(0.5, &FormFactorModel::gaussian(0.0, 0.1), &g).unwrap();
        assert_eq!(r.excluded.len(), 1);
    }

    #[test]
    fn enlarging_the_grid_lowers_the_energy() {
        let m = FormFactorModel::gaussian(0.0, 0.5);
        let small = ModeGrid::new(RadialGrid::geometric(0.1, 3.0, 4).unwrap(), XiGrid::with_spacing(0.5, 1).unwrap());
        let large = ModeGrid::new(RadialGrid::geometric(0.1, 3.0, 4).unwrap(), XiGrid::with_spacing(0.5, 2).unwrap());
        let opts = EigenOptions::default();
        let es = lowest_eigenpair(&assemble_h(0.0, &m, &small, 2).unwrap().0, &opts).unwrap().value;
        let el = lowest_eigenpair(&assemble_h(0.0, &m, &large, 2).unwrap().0, &opts).unwrap().value;
        assert!(el <= es + 1e-9);
    }

    #[test]
    fn mourre_free_case_is_exactly_one() {
        let m = FormFactorModel::gaussian(1.0, 0.0);
        let g = ModeGrid::new(RadialGrid::uniform(3.0, 4).unwrap(), XiGrid::uniform(1.0, 1).unwrap());
        let r = mourre_check(&m, &g, 2, 0.0, &EigenOptions::default()).unwrap();
        assert!((r.min_eigenvalue - 1.0).abs() < 1e-12 && r.c0 == 1.0 && r.holds);
    }

    #[test]
    fn mourre_rejects_strong_coupling() {
        let m = FormFactorModel::gaussian(1.0, 0.0);
        let g = ModeGrid::new(RadialGrid::uniform(3.0, 4).unwrap(), XiGrid::uniform(1.0, 1).unwrap());
        assert!(matches!(
            mourre_check(&m, &g, 2, 1.0, &EigenOptions::default()),
            Err(Error::OutsideSmallCoupling { .. })
        ));
    }

    #[test]
    fn i_a_h0_matches_finite_difference() {
        let m = FormFactorModel::gaussian(0.5, 1.0);
        let (k, xi) = (0.8, 0.3);
        let f = |w: f64| w * coupling_radial(w, xi, &m).unwrap();
        let h = 1e-6;
        let fd = -(f(k + h) - f(k - h)) / (2.0 * h) / k;
        assert!((i_a_h0(&m, k, xi) - fd).abs() < 1e-8);
    }
}
