//! Lowest eigenpair of a sparse Hermitian operator.
//!
//! Davidson iteration with the diagonal preconditioner and Olsen's
//! correction. The fiber Hamiltonians have a spectral gap of order `k_min`
//! above a dense continuum, where plain Lanczos stalls; the preconditioner
//! targets the diagonal structure directly.

use crate::error::{invalid, Error, Result};
use crate::fock::FockOperator;
use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Settings of [`lowest_eigenpair`].
#[derive(Debug, Clone, PartialEq)]
pub struct EigenOptions {
    /// Converged when `‖(M - E)ψ‖ ≤ tol · ‖M‖_est`.
    pub tol: f64,
    pub max_iterations: usize,
    /// Subspace size that triggers a restart.
    pub max_subspace: usize,
    /// Start vectors come from these seeds; all runs must agree.
    pub seeds: Vec<u64>,
}

impl Default for EigenOptions {
    fn default() -> Self {
        EigenOptions {
            tol: 1e-10,
            max_iterations: 5000,
            max_subspace: 48,
            seeds: vec![11, 29],
        }
    }
}

/// Converged eigenpair with its residual.
#[derive(Debug, Clone, PartialEq)]
pub struct Eigenpair {
    pub value: f64,
    pub vector: Vec<Complex64>,
    pub residual: f64,
    pub iterations: usize,
}

/// Ritz vectors kept across a restart.
const RESTART_KEEP: usize = 4;
/// Size of the initial block.
const START_BLOCK: usize = 4;
/// Relative size of the seeded noise in the initial block.
const START_NOISE: f64 = 1e-2;

fn dotc(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[Complex64]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn scale(a: &mut [Complex64], s: f64) {
    a.iter_mut().for_each(|z| *z *= s);
}

/// Orthogonalises `t` against the orthonormal columns `basis` (two passes)
/// and normalises it; returns `false` when nothing is left.
fn orthonormalize(t: &mut [Complex64], basis: &[Vec<Complex64>]) -> bool {
    let n0 = norm(t);
    if n0 == 0.0 {
        return false;
    }
    for _ in 0..2 {
        for v in basis {
            let c = dotc(v, t);
            t.iter_mut().zip(v).for_each(|(x, y)| *x -= c * y);
        }
    }
    let n = norm(t);
    if n < 1e-12 * n0 {
        return false;
    }
    scale(t, 1.0 / n);
    true
}

/// Initial block: unit vectors on the lowest diagonal entries, each with
/// seeded noise of relative size `START_NOISE` spread over the others.
fn start_block(diag: &[f64], seed: u64) -> Vec<Vec<Complex64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..diag.len()).collect();
    order.sort_by(|&a, &b| diag[a].total_cmp(&diag[b]));
    let dmin = diag[order[0]];
    let spread = diag[order[diag.len() - 1]] - dmin;
    let width = (spread * 1e-2).max(1e-12);
    let mut block: Vec<Vec<Complex64>> = Vec::new();
    for &i in order.iter().take(START_BLOCK) {
        let mut x: Vec<Complex64> = diag
            .iter()
            .map(|d| {
                let r: f64 = rng.gen_range(-1.0..1.0);
                Complex64::new(START_NOISE * r / (1.0 + (d - dmin) / width), 0.0)
            })
            .collect();
        x[i] += 1.0;
        if orthonormalize(&mut x, &block) {
            block.push(x);
        }
    }
    block
}

fn davidson(op: &FockOperator, opts: &EigenOptions, seed: u64) -> Result<Eigenpair> {
    let n = op.dim();
    let diag = op.diagonal();
    let target = opts.tol * op.norm_estimate().max(1.0);
    let mut v = start_block(&diag, seed);
    if v.is_empty() {
        return Err(invalid("empty start block"));
    }
    let mut av: Vec<Vec<Complex64>> = v.iter().map(|x| op.apply_new(x)).collect();
    let mut residual = f64::INFINITY;
    for iter in 1..=opts.max_iterations {
        let m = v.len();
        let mut hs = DMatrix::<Complex64>::zeros(m, m);
        for i in 0..m {
            for j in i..m {
                let z = dotc(&v[i], &av[j]);
                hs[(i, j)] = z;
                hs[(j, i)] = z.conj();
            }
        }
        let eig = SymmetricEigen::new(hs);
        let k = eig.eigenvalues.imin();
        let theta = eig.eigenvalues[k];
        let y = eig.eigenvectors.column(k).into_owned();
        let mut x = vec![Complex64::default(); n];
        let mut ax = vec![Complex64::default(); n];
        for (j, c) in y.iter().enumerate() {
            x.iter_mut().zip(&v[j]).for_each(|(a, b)| *a += c * b);
            ax.iter_mut().zip(&av[j]).for_each(|(a, b)| *a += c * b);
        }
        let r: Vec<Complex64> = ax.iter().zip(&x).map(|(a, b)| a - theta * b).collect();
        residual = norm(&r);
        if residual <= target {
            let xn = norm(&x);
            scale(&mut x, 1.0 / xn);
            return Ok(Eigenpair {
                value: theta,
                vector: x,
                residual,
                iterations: iter,
            });
        }
        // Olsen: t = M⁻¹(εx - r) with ε making t ⟂ x
        let floor = 1e-3 * residual.max(1e-8);
        let minv: Vec<f64> = diag
            .iter()
            .map(|d| {
                let den = d - theta;
                1.0 / if den.abs() < floor { floor.copysign(den) } else { den }
            })
            .collect();
        let mr: Vec<Complex64> = r.iter().zip(&minv).map(|(a, b)| a * b).collect();
        let mx: Vec<Complex64> = x.iter().zip(&minv).map(|(a, b)| a * b).collect();
        let den = dotc(&x, &mx);
        let eps = if den.norm() > 0.0 { dotc(&x, &mr) / den } else { Complex64::default() };
        let mut t: Vec<Complex64> = mx.iter().zip(&mr).map(|(a, b)| eps * a - b).collect();
        if m >= opts.max_subspace {
            // thick restart on the lowest Ritz vectors
            let mut order: Vec<usize> = (0..m).collect();
            order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
            let mut nv: Vec<Vec<Complex64>> = Vec::with_capacity(RESTART_KEEP);
            let mut nav: Vec<Vec<Complex64>> = Vec::with_capacity(RESTART_KEEP);
            for &c in order.iter().take(RESTART_KEEP) {
                let yc = eig.eigenvectors.column(c);
                let mut xr = vec![Complex64::default(); n];
                let mut axr = vec![Complex64::default(); n];
                for (j, cj) in yc.iter().enumerate() {
                    xr.iter_mut().zip(&v[j]).for_each(|(a, b)| *a += cj * b);
                    axr.iter_mut().zip(&av[j]).for_each(|(a, b)| *a += cj * b);
                }
                nv.push(xr);
                nav.push(axr);
            }
            v = nv;
            av = nav;
        }
        if !orthonormalize(&mut t, &v) {
            // fall back to the plain residual direction
            t = r;
            if !orthonormalize(&mut t, &v) {
                break;
            }
        }
        av.push(op.apply_new(&t));
        v.push(t);
    }
    Err(Error::EigenNotConverged {
        iterations: opts.max_iterations,
        residual,
    })
}

/// Lowest eigenpair of `op`, computed from every seed in `opts.seeds`.
///
/// Fails with `EigenRestartMismatch` when the runs disagree by more than the
/// residual-based accuracy; returns the run with the lowest value otherwise.
pub fn lowest_eigenpair(op: &FockOperator, opts: &EigenOptions) -> Result<Eigenpair> {
    if op.dim() == 0 || opts.seeds.is_empty() {
        return Err(invalid("eigensolver needs a nonempty operator and at least one seed"));
    }
    if op.dim() == 1 {
        return Ok(Eigenpair {
            value: op.get(0, 0).re,
            vector: vec![Complex64::new(1.0, 0.0)],
            residual: 0.0,
            iterations: 0,
        });
    }
    let runs = opts
        .seeds
        .iter()
        .map(|&s| davidson(op, opts, s))
        .collect::<Result<Vec<_>>>()?;
    let tol = 10.0 * opts.tol * op.norm_estimate().max(1.0);
    let best = runs
        .iter()
        .min_by(|a, b| a.value.total_cmp(&b.value))
        .expect("at least one run");
    for r in &runs {
        if (r.value - best.value).abs() > tol {
            return Err(Error::EigenRestartMismatch {
                first: best.value,
                second: r.value,
            });
        }
    }
    Ok(best.clone())
}
