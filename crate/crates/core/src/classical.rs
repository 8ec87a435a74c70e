//! Hamiltonian dynamics of the particle and its membranes for `d = 1`.
//!
//! The field is carried by normal variables `α(k, ξ)` on the full symmetric
//! `ξ` grid. With `h₀ = k^μ ρ̂₁ ρ̂₂` and node weights `w` the discrete
//! Hamiltonian is
//!
//! ```text
//! H = p²/2m + Σ w k |α|² + √2 g Re Σ w e^{iξq} h₀ α,
//! ```
//!
//! so `α̇ = -ikα - i c` with `c = (g/√2) e^{-iξq} h₀` and
//! `ṗ = √2 g Σ w ξ h₀ Im(e^{iξq} α)`. The real field is recovered as
//! `ψ̂(k, ξ) = (α(k, ξ) + conj α(k, -ξ)) / √(2k)`, which satisfies
//! `conj ψ̂(k, ξ) = ψ̂(k, -ξ)` for any `α`, so no constraint needs enforcing.
//! The total momentum `p + Σ w ξ |α|²` is conserved exactly by the flow.

use crate::error::{invalid, Error, Result};
use crate::formfactor::{coupling_radial, FormFactorModel};
use crate::grid::ModeGrid;
use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::SQRT_2;

/// Nodes per chunk in the summed kernels. Sums are formed per chunk and
/// then added in order, so results do not depend on the thread count.
const CHUNK: usize = 4096;
/// Below this many nodes the chunks are processed on the calling thread.
const PAR_THRESHOLD: usize = 1 << 15;

/// Particle coordinates and field amplitudes at time `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalState {
    pub q: f64,
    pub p: f64,
    pub alpha: Vec<Complex64>,
    pub t: f64,
}

/// Initial field for [`ClassicalSystem::run`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitialField {
    Vacuum,
    /// Static field of the particle at rest at `q0`.
    Static,
}

/// Settings of a trajectory run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub dt: f64,
    pub t_final: f64,
    /// Record every this many steps (the final state is always recorded).
    pub sample_every: usize,
    pub q0: f64,
    pub p0: f64,
    pub initial: InitialField,
}

/// Sampled observables of one trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRecord {
    pub times: Vec<f64>,
    pub q: Vec<f64>,
    pub p: Vec<f64>,
    pub energy: Vec<f64>,
    pub momentum: Vec<f64>,
    pub field_energy: Vec<f64>,
    pub fingerprint: String,
}

impl TrajectoryRecord {
    pub const HEADER: [&'static str; 6] = ["t", "q", "p", "E", "P_tot", "E_field"];

    pub fn rows(&self) -> Vec<[f64; 6]> {
        (0..self.times.len())
            .map(|i| {
                [
                    self.times[i],
                    self.q[i],
                    self.p[i],
                    self.energy[i],
                    self.momentum[i],
                    self.field_energy[i],
                ]
            })
            .collect()
    }

    /// `max_t |E(t) - E(0)| / |E(0)|` (absolute when `E(0) = 0`).
    pub fn energy_drift(&self) -> f64 {
        drift(&self.energy)
    }

    /// `max_t |P(t) - P(0)|`.
    pub fn momentum_drift(&self) -> f64 {
        let p0 = self.momentum[0];
        self.momentum.iter().map(|p| (p - p0).abs()).fold(0.0, f64::max)
    }
}

fn drift(values: &[f64]) -> f64 {
    let e0 = values[0];
    let scale = if e0 == 0.0 { 1.0 } else { e0.abs() };
    values.iter().map(|e| (e - e0).abs()).fold(0.0, f64::max) / scale
}

/// Precomputed per-node data of the discrete model.
#[derive(Debug, Clone)]
pub struct ClassicalSystem {
    pub model: FormFactorModel,
    pub grid: ModeGrid,
    k: Vec<f64>,
    w: Vec<f64>,
    h0: Vec<f64>,
    n_xi: usize,
}

/// Per-node factors of the frozen-`q` flow over a fixed step.
#[derive(Debug, Clone)]
struct Propagator {
    tau: f64,
    rot: Vec<Complex64>,
    // (1 - e^{-ikτ}) / (ik)
    gain: Vec<Complex64>,
}

impl ClassicalSystem {
    pub fn new(model: &FormFactorModel, grid: &ModeGrid) -> Result<Self> {
        model.validate()?;
        if model.d != 1 {
            return Err(invalid("the dynamics is implemented for d = 1"));
        }
        if grid.is_empty() || !(grid.k_min() > 0.0) {
            return Err(invalid("mode grid must be nonempty with k_min > 0"));
        }
        let nodes = grid.nodes();
        let h0 = nodes
            .iter()
            .map(|n| coupling_radial(n.k, n.xi.abs(), model))
            .collect::<Result<Vec<_>>>()?;
        Ok(ClassicalSystem {
            model: model.clone(),
            grid: grid.clone(),
            k: nodes.iter().map(|n| n.k).collect(),
            w: nodes.iter().map(|n| n.weight).collect(),
            h0,
            n_xi: grid.xi.len(),
        })
    }

    pub fn len(&self) -> usize {
        self.k.len()
    }

    pub fn is_empty(&self) -> bool {
        self.k.is_empty()
    }

    fn xi(&self, n: usize) -> f64 {
        self.grid.xi.nodes[n % self.n_xi]
    }

    /// `e^{iξ_j s}` for every `ξ` node.
    fn phases(&self, s: f64) -> Vec<Complex64> {
        self.grid.xi.nodes.iter().map(|x| Complex64::from_polar(1.0, x * s)).collect()
    }

    fn propagator(&self, tau: f64) -> Propagator {
        let rot: Vec<Complex64> = self.k.iter().map(|k| Complex64::from_polar(1.0, -k * tau)).collect();
        let gain = self.k.iter().map(|&k| phase_integral(-k, tau)).collect();
        Propagator { tau, rot, gain }
    }

    pub fn vacuum(&self, q: f64, p: f64) -> ClassicalState {
        ClassicalState {
            q,
            p,
            alpha: vec![Complex64::new(0.0, 0.0); self.len()],
            t: 0.0,
        }
    }

    /// Static field `α = -(g/√2) e^{-iξq} h₀ / k`, the minimiser of the field
    /// energy at fixed `q`; in `ψ̂` it is the discretised `ψ_q`.
    pub fn static_field(&self, q: f64) -> ClassicalState {
        let g = self.model.g / SQRT_2;
        let ph = self.phases(q);
        let alpha = (0..self.len())
            .map(|n| -g * self.h0[n] / self.k[n] * ph[n % self.n_xi].conj())
            .collect();
        ClassicalState { q, p: 0.0, alpha, t: 0.0 }
    }

    /// Field value `ψ̂(k, ξ)` reconstructed from the normal variables.
    pub fn psi_hat(&self, state: &ClassicalState, n: usize) -> Complex64 {
        let m = self.grid.mirror(n);
        (state.alpha[n] + state.alpha[m].conj()) / (2.0 * self.k[n]).sqrt()
    }

    /// Position-space field `Σ_ξ Δξ ψ̂(k_i, ξ) e^{iξx}` on radial shell `i`.
    pub fn field_at(&self, state: &ClassicalState, i_k: usize, x: f64) -> Complex64 {
        let base = i_k * self.n_xi;
        let ph = self.phases(x);
        (0..self.n_xi)
            .map(|j| self.psi_hat(state, base + j) * ph[j] * self.grid.xi.spacing)
            .sum()
    }

    /// `Σ w k |α|²`.
    pub fn field_energy(&self, state: &ClassicalState) -> f64 {
        chunked_sum(self.len(), |n| self.w[n] * self.k[n] * state.alpha[n].norm_sqr())
    }

    /// `√2 g Re Σ w e^{iξq} h₀ α`.
    pub fn interaction_energy(&self, state: &ClassicalState) -> f64 {
        let ph = self.phases(state.q);
        let s = chunked_sum(self.len(), |n| {
            self.w[n] * self.h0[n] * (ph[n % self.n_xi] * state.alpha[n]).re
        });
        SQRT_2 * self.model.g * s
    }

    pub fn total_energy(&self, state: &ClassicalState) -> f64 {
        0.5 * state.p * state.p / self.model.m + self.field_energy(state) + self.interaction_energy(state)
    }

    /// `p + Σ w ξ |α|²`.
    pub fn total_momentum(&self, state: &ClassicalState) -> f64 {
        state.p + chunked_sum(self.len(), |n| self.w[n] * self.xi(n) * state.alpha[n].norm_sqr())
    }

    /// `-∂H/∂q = √2 g Σ w ξ h₀ Im(e^{iξq} α)`.
    pub fn force(&self, state: &ClassicalState) -> f64 {
        let ph = self.phases(state.q);
        let s = chunked_sum(self.len(), |n| {
            self.w[n] * self.xi(n) * self.h0[n] * (ph[n % self.n_xi] * state.alpha[n]).im
        });
        SQRT_2 * self.model.g * s
    }

    /// Exact flow of the field and `p` over `prop.tau` with `q` frozen.
    fn kick(&self, state: &mut ClassicalState, prop: &Propagator) {
        let gs = self.model.g / SQRT_2;
        let ph = self.phases(state.q);
        let n_xi = self.n_xi;
        let body = |offset: usize, chunk: &mut [Complex64]| -> f64 {
            let mut acc = 0.0;
            for (i, a) in chunk.iter_mut().enumerate() {
                let n = offset + i;
                let e = ph[n % n_xi];
                let shift = gs * self.h0[n] / self.k[n] * e.conj();
                let beta = *a + shift;
                *a = beta * prop.rot[n] - shift;
                acc += self.w[n] * self.grid.xi.nodes[n % n_xi] * self.h0[n] * (e * beta * prop.gain[n]).im;
            }
            acc
        };
        let partial: Vec<f64> = if self.len() >= PAR_THRESHOLD {
            state
                .alpha
                .par_chunks_mut(CHUNK)
                .enumerate()
                .map(|(c, chunk)| body(c * CHUNK, chunk))
                .collect()
        } else {
            state
                .alpha
                .chunks_mut(CHUNK)
                .enumerate()
                .map(|(c, chunk)| body(c * CHUNK, chunk))
                .collect()
        };
        state.p += SQRT_2 * self.model.g * partial.iter().sum::<f64>();
        state.t += prop.tau;
    }

    fn drift_q(&self, state: &mut ClassicalState, tau: f64) {
        state.q += state.p * tau / self.model.m;
    }

    /// One Strang step: half interaction-plus-field flow, full particle
    /// drift, half interaction-plus-field flow.
    pub fn step_strang(&self, state: &ClassicalState, dt: f64) -> Result<ClassicalState> {
        if !(dt > 0.0) {
            return Err(invalid("dt must be positive"));
        }
        let half = self.propagator(0.5 * dt);
        let mut s = state.clone();
        self.strang_with(&mut s, &half, dt);
        self.check_finite(&s)?;
        Ok(s)
    }

    fn strang_with(&self, s: &mut ClassicalState, half: &Propagator, dt: f64) {
        let t0 = s.t;
        self.kick(s, half);
        self.drift_q(s, dt);
        self.kick(s, half);
        s.t = t0 + dt;
    }

    fn check_finite(&self, s: &ClassicalState) -> Result<()> {
        if !s.p.is_finite() || !s.q.is_finite() {
            return Err(Error::BlowUp { node: usize::MAX, t: s.t });
        }
        if let Some(node) = s.alpha.iter().position(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::BlowUp { node, t: s.t });
        }
        Ok(())
    }

    /// Initial state described by `cfg`.
    pub fn initial_state(&self, cfg: &RunConfig) -> ClassicalState {
        let mut s = match cfg.initial {
            InitialField::Vacuum => self.vacuum(cfg.q0, 0.0),
            InitialField::Static => self.static_field(cfg.q0),
        };
        s.p = cfg.p0;
        s
    }

    /// Integrates from the initial state of `cfg`, sampling observables.
    pub fn run(&self, cfg: &RunConfig) -> Result<TrajectoryRecord> {
        let state = self.initial_state(cfg);
        self.run_from(state, cfg)
    }

    pub fn run_from(&self, mut state: ClassicalState, cfg: &RunConfig) -> Result<TrajectoryRecord> {
        if !(cfg.dt > 0.0) || !(cfg.t_final > 0.0) || cfg.sample_every == 0 {
            return Err(invalid("run needs dt > 0, t_final > 0 and sample_every > 0"));
        }
        let steps = (cfg.t_final / cfg.dt).round() as usize;
        if steps == 0 {
            return Err(invalid("t_final shorter than one step"));
        }
        let half = self.propagator(0.5 * cfg.dt);
        let t0 = state.t;
        let mut rec = TrajectoryRecord {
            times: Vec::new(),
            q: Vec::new(),
            p: Vec::new(),
            energy: Vec::new(),
            momentum: Vec::new(),
            field_energy: Vec::new(),
            fingerprint: format!("{};grid={}x{};dt={}", self.model.fingerprint(), self.grid.k.len(), self.n_xi, cfg.dt),
        };
        self.record(&state, &mut rec);
        for step in 1..=steps {
            self.strang_with(&mut state, &half, cfg.dt);
            // keep sample times exact multiples of dt
            state.t = t0 + step as f64 * cfg.dt;
            if step % cfg.sample_every == 0 || step == steps {
                self.check_finite(&state)?;
                self.record(&state, &mut rec);
            } else if !state.p.is_finite() {
                return Err(Error::BlowUp { node: usize::MAX, t: state.t });
            }
        }
        Ok(rec)
    }

    fn record(&self, s: &ClassicalState, rec: &mut TrajectoryRecord) {
        rec.times.push(s.t);
        rec.q.push(s.q);
        rec.p.push(s.p);
        rec.energy.push(self.total_energy(s));
        rec.momentum.push(self.total_momentum(s));
        rec.field_energy.push(self.field_energy(s));
    }
}

/// `∫_0^τ e^{iDs} ds`, with a series near `D τ = 0`.
fn phase_integral(d: f64, tau: f64) -> Complex64 {
    let x = d * tau;
    if x.abs() < 1e-4 {
        let i = Complex64::i();
        tau * (1.0 + i * x / 2.0 - x * x / 6.0 - i * x * x * x / 24.0)
    } else {
        (Complex64::from_polar(1.0, x) - 1.0) / Complex64::new(0.0, d)
    }
}

fn chunked_sum(len: usize, f: impl Fn(usize) -> f64 + Sync) -> f64 {
    let chunk = |c: usize| -> f64 { (c * CHUNK..((c + 1) * CHUNK).min(len)).map(&f).sum() };
    let n_chunks = len.div_ceil(CHUNK);
    let partial: Vec<f64> = if len >= PAR_THRESHOLD {
        (0..n_chunks).into_par_iter().map(chunk).collect()
    } else {
        (0..n_chunks).map(chunk).collect()
    };
    partial.iter().sum()
}

/// Result of a constant-velocity drag measurement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClampedDrag {
    /// Mean force on the particle over `[T/2, T]`.
    pub force: f64,
    /// Means over `[T/2, 3T/4]` and `[3T/4, T]`.
    pub windows: (f64, f64),
    pub rel_change: f64,
}

/// Drives the field with `q(t) = v t` from the vacuum and returns the mean
/// force along the motion over the second half of `[0, t_final]`.
///
/// The field is advanced by the exact forced propagator, so `dt` only sets
/// the force sampling. Fails with `TransientNotSettled` when the means over
/// the two quarters of the averaging window differ by more than `tol`.
pub fn measure_drag_clamped(
    v: f64,
    model: &FormFactorModel,
    grid: &ModeGrid,
    t_final: f64,
    dt: f64,
    tol: f64,
) -> Result<ClampedDrag> {
    if v == 0.0 || !v.is_finite() {
        return Err(invalid("clamped drag needs v != 0"));
    }
    if !(dt > 0.0) || !(t_final > 4.0 * dt) {
        return Err(invalid("clamped drag needs dt > 0 and t_final > 4 dt"));
    }
    let sys = ClassicalSystem::new(model, grid)?;
    let n = sys.len();
    let gs = model.g / SQRT_2;
    let rot: Vec<Complex64> = sys.k.iter().map(|k| Complex64::from_polar(1.0, -k * dt)).collect();
    // -i c₀ e^{-ikτ} ∫_0^τ e^{i(k-ξv)s} ds, times e^{-iξvt} at run time
    let src: Vec<Complex64> = (0..n)
        .map(|m| {
            let d = sys.k[m] - sys.xi(m) * v;
            -Complex64::i() * gs * sys.h0[m] * rot[m] * phase_integral(d, dt)
        })
        .collect();
    let coef: Vec<f64> = (0..n).map(|m| sys.w[m] * sys.xi(m) * sys.h0[m]).collect();
    let steps = (t_final / dt).round() as usize;
    let start = steps / 2;
    let mid = start + (steps - start) / 2;
    let mut alpha = vec![Complex64::new(0.0, 0.0); n];
    let (mut s1, mut n1, mut s2, mut n2) = (0.0, 0usize, 0.0, 0usize);
    for step in 0..steps {
        let t = step as f64 * dt;
        let ph = sys.phases(-v * t);
        for m in 0..n {
            alpha[m] = alpha[m] * rot[m] + src[m] * ph[m % sys.n_xi];
        }
        if step + 1 > start {
            let t1 = (step + 1) as f64 * dt;
            let ph1 = sys.phases(v * t1);
            let f = SQRT_2 * model.g * chunked_sum(n, |m| coef[m] * (ph1[m % sys.n_xi] * alpha[m]).im);
            if !f.is_finite() {
                return Err(Error::BlowUp { node: usize::MAX, t: t1 });
            }
            if step < mid {
                s1 += f;
                n1 += 1;
            } else {
                s2 += f;
                n2 += 1;
            }
        }
    }
    let a1 = s1 / n1.max(1) as f64;
    let a2 = s2 / n2.max(1) as f64;
    let force = (s1 + s2) / (n1 + n2) as f64;
    let rel_change = (a1 - a2).abs() / force.abs().max(f64::MIN_POSITIVE);
    if rel_change > tol {
        return Err(Error::TransientNotSettled { rel_change, tol });
    }
    Ok(ClampedDrag {
        force,
        windows: (a1, a2),
        rel_change,
    })
}
