//! One function per subcommand. Each writes its tables and charts into the
//! output directory and returns without writing the manifest.

use crate::config::{ExperimentConfig, FgrMethodName, Initial};
use crate::output::{line_chart, Axis, Emitted, Series, Table};
use crate::row;
use frictionlab_core::classical::measure_drag_clamped;
use frictionlab_core::fgr::{fgr_curve, fgr_curve_lorentzian};
use frictionlab_core::fit::geometric_ladder;
use frictionlab_core::spectral::{
    flatness_probe, ground_state_in, ir_ground_state_probe, ir_power_count, mourre_check, pt2_energy, IrProbeConfig,
};
use frictionlab_core::{
    drag_curve, drag_magnitude, ClassicalSystem, InitialField, LorentzianGrid, ModeGrid, RadialGrid, RunConfig,
    XiGrid,
};
use std::io;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum AppError {
    #[error(transparent)]
    Config(#[from] crate::config::ConfigError),
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] frictionlab_core::Error),
    #[error("i/o: {0}")]
    Io(#[from] io::Error),
}

impl AppError {
    pub fn exit_code(&self) -> i32 {
        match self {
            AppError::Config(_) | AppError::Usage(_) => 2,
            AppError::Core(e) if !e.is_numerical() => 2,
            AppError::Core(_) => 3,
            AppError::Io(_) => 1,
        }
    }
}

pub type AppResult<T> = Result<T, AppError>;

fn usage(msg: &str) -> AppError {
    AppError::Usage(msg.to_string())
}

pub fn drag(cfg: &ExperimentConfig, out: &mut Emitted) -> AppResult<()> {
    let d = &cfg.drag;
    if d.mu_list.is_empty() {
        return Err(usage("drag.mu_list is empty"));
    }
    if !(d.v_min > 0.0 && d.v_max > d.v_min) || d.points < 2 {
        return Err(usage("drag needs 0 < v_min < v_max and at least two points"));
    }
    let base = cfg.model()?;
    let q = cfg.quadrature();
    let vs = geometric_ladder(d.v_min, d.v_max, d.points);
    let mut curves = Table::new(&["mu", "v", "drag_per_g2", "drag"]);
    let mut fits = Table::new(&["mu", "exponent", "expected", "coefficient", "fit_min", "fit_max"]);
    let mut series = Vec::new();
    for &mu in &d.mu_list {
        let m = base.with_mu(mu)?;
        let c = drag_curve(&vs, (d.fit_min, d.fit_max), &m, &q)?;
        let g2 = m.g * m.g;
        for (v, f) in c.velocities.iter().zip(&c.magnitudes) {
            curves.push(row![mu, *v, *f, g2 * f]);
        }
        fits.push(row![mu, c.fit_exponent, 2.0 * (mu + 1.0), c.fit_coefficient, d.fit_min, d.fit_max]);
        series.push(Series {
            label: format!("mu = {mu}"),
            points: c.velocities.iter().copied().zip(c.magnitudes.iter().copied()).collect(),
        });
    }
    out.table("drag_curve.csv", &curves)?;
    out.table("drag_fit.csv", &fits)?;
    let svg = line_chart("drag per unit g²", "|v|", "|f_r| / g²", (Axis::Log, Axis::Log), &series);
    out.text("drag.svg", &svg)?;
    Ok(())
}

pub fn simulate(cfg: &ExperimentConfig, out: &mut Emitted) -> AppResult<()> {
    let s = &cfg.simulate;
    let sys = ClassicalSystem::new(&cfg.model()?, &cfg.mode_grid()?)?;
    let run = RunConfig {
        dt: s.dt,
        t_final: s.t_final,
        sample_every: s.sample_every,
        q0: s.q0,
        p0: s.p0,
        initial: match s.initial {
            Initial::Vacuum => InitialField::Vacuum,
            Initial::Static => InitialField::Static,
        },
    };
    let r = sys.run(&run)?;
    let mut traj = Table::new(&frictionlab_core::TrajectoryRecord::HEADER);
    for row in r.rows() {
        traj.push(row.iter().map(crate::output::Cell::cell).collect());
    }
    out.table("trajectory.csv", &traj)?;
    let mut cons = Table::new(&["energy_drift", "momentum_drift", "nodes", "steps"]);
    cons.push(row![
        r.energy_drift(),
        r.momentum_drift(),
        sys.len(),
        (s.t_final / s.dt).round() as usize
    ]);
    out.table("conservation.csv", &cons)?;
    let svg = line_chart(
        "trajectory",
        "t",
        "value",
        (Axis::Linear, Axis::Linear),
        &[
            Series {
                label: "q".into(),
                points: r.times.iter().copied().zip(r.q.iter().copied()).collect(),
            },
            Series {
                label: "p".into(),
                points: r.times.iter().copied().zip(r.p.iter().copied()).collect(),
            },
        ],
    );
    out.text("trajectory.svg", &svg)?;
    Ok(())
}

pub fn clamp(cfg: &ExperimentConfig, out: &mut Emitted) -> AppResult<()> {
    let c = &cfg.clamp;
    if c.v_list.is_empty() {
        return Err(usage("clamp.v_list is empty"));
    }
    let m = cfg.model()?;
    let grid = cfg.mode_grid()?;
    let q = cfg.quadrature();
    let mut t = Table::new(&["v", "force", "kernel", "ratio", "rel_change"]);
    let mut measured = Vec::new();
    let mut kernel = Vec::new();
    for &v in &c.v_list {
        let r = measure_drag_clamped(v, &m, &grid, c.t_final, c.dt, c.settle_tol)?;
        let k = m.g * m.g * drag_magnitude(v.abs(), &m, &q)?.value;
        t.push(row![v, r.force, k, r.force.abs() / k, r.rel_change]);
        measured.push((v.abs(), r.force.abs()));
        kernel.push((v.abs(), k));
    }
    out.table("clamp.csv", &t)?;
    let svg = line_chart(
        "clamped drag",
        "|v|",
        "|force|",
        (Axis::Linear, Axis::Linear),
        &[
            Series {
                label: "measured".into(),
                points: measured,
            },
            Series {
                label: "g² kernel".into(),
                points: kernel,
            },
        ],
    );
    out.text("clamp.svg", &svg)?;
    Ok(())
}

pub fn fgr(cfg: &ExperimentConfig, out: &mut Emitted) -> AppResult<()> {
    let f = &cfg.fgr;
    if f.mu_list.is_empty() {
        return Err(usage("fgr.mu_list is empty"));
    }
    let base = cfg.model()?;
    let q = cfg.quadrature();
    let ps: Vec<f64> = (0..f.points).map(|i| f.p_max * i as f64 / (f.points - 1) as f64).collect();
    let mut t = Table::new(&["p_abs", "c", "mu", "d", "method"]);
    let mut series = Vec::new();
    for &mu in &f.mu_list {
        let m = base.with_mu(mu)?;
        let curve = match f.method {
            FgrMethodName::Delta => fgr_curve(&ps, &m, &q)?,
            FgrMethodName::Lorentzian => {
                if f.eps.is_empty() {
                    return Err(usage("fgr.eps is empty"));
                }
                let lg = LorentzianGrid {
                    cutoff: q,
                    ..LorentzianGrid::default()
                };
                fgr_curve_lorentzian(&ps, &f.eps, &m, &lg)?
            }
        };
        let tag = curve.method.tag();
        for (p, c) in curve.p_abs.iter().zip(&curve.c) {
            t.push(row![*p, *c, mu, curve.d, tag.clone()]);
        }
        series.push(Series {
            label: format!("mu = {mu}"),
            points: curve.p_abs.iter().copied().zip(curve.c.iter().copied()).collect(),
        });
    }
    out.table("fgr.csv", &t)?;
    let title = format!("golden-rule coefficient, d = {}", base.d);
    out.text("fgr.svg", &line_chart(&title, "|P|", "c(P)", (Axis::Linear, Axis::Linear), &series))?;
    Ok(())
}

pub fn spectrum(cfg: &ExperimentConfig, out: &mut Emitted) -> AppResult<()> {
    let s = &cfg.spectrum;
    let m = cfg.model()?;
    let grid = cfg.spectrum_grid()?;
    let opts = cfg.eigen();

    let mut t = Table::new(&[
        "p", "energy", "e2", "vacuum_overlap", "mean_number", "residual", "dim", "frame",
    ]);
    let frame = format!("{:?}", s.frame).to_lowercase();
    for &p in &s.p_list {
        let (rep, _, _) = ground_state_in(cfg.frame(), p, &m, &grid, s.n_max, &opts)?;
        let e2 = pt2_energy(p, &m, &grid)?.energy;
        t.push(row![
            p,
            rep.energy,
            e2,
            rep.vacuum_overlap,
            rep.mean_number,
            rep.residual,
            rep.dim,
            frame.clone()
        ]);
    }
    out.table("spectrum.csv", &t)?;

    if !s.flatness_k_min.is_empty() {
        let levels = s
            .flatness_k_min
            .iter()
            .zip(&s.flatness_xi_half)
            .map(|(&k, &h)| {
                Ok(ModeGrid::new(
                    RadialGrid::geometric(k, cfg.grid.k_max, s.flatness_per_decade)?,
                    XiGrid::with_spacing(s.flatness_xi_spacing, h)?,
                ))
            })
            .collect::<frictionlab_core::Result<Vec<_>>>()?;
        let ps: Vec<f64> = s.p_list.iter().copied().filter(|p| *p != 0.0).collect();
        let rows = flatness_probe(&ps, &m, &levels, s.n_max, &opts)?;
        let mut t = Table::new(&["level", "p", "k_min", "xi_max", "energy", "energy_at_zero", "gap"]);
        for r in rows {
            t.push(row![r.level, r.p, r.k_min, r.xi_max, r.energy, r.energy_at_zero, r.gap]);
        }
        out.table("flatness.csv", &t)?;
    }

    if !s.ir_mu_list.is_empty() {
        let ir_opts = frictionlab_core::EigenOptions {
            tol: s.ir_eig_tol,
            ..opts.clone()
        };
        let (rows, fits) =
            ir_ground_state_probe(&s.ir_mu_list, &s.ir_k_min, &m.with_g(s.ir_g), &IrProbeConfig::default(), &ir_opts)?;
        let mut t = Table::new(&["mu", "k_min", "energy", "slice_norm", "pt_norm"]);
        for r in &rows {
            t.push(row![r.mu, r.k_min, r.energy, r.slice_norm, r.pt_norm]);
        }
        out.table("ir_probe.csv", &t)?;
        let mut t = Table::new(&["mu", "exponent", "power_count", "log_slope", "log_r_squared", "max_ratio"]);
        for f in &fits {
            let pc = ir_power_count(f.mu).map(|e| e.to_string()).unwrap_or_else(|| "none".into());
            t.push(row![f.mu, f.exponent, pc, f.log_slope, f.log_r_squared, f.max_ratio]);
        }
        out.table("ir_fit.csv", &t)?;
        let series: Vec<Series> = s
            .ir_mu_list
            .iter()
            .map(|&mu| Series {
                label: format!("mu = {mu}"),
                points: rows.iter().filter(|r| r.mu == mu).map(|r| (r.k_min, r.slice_norm)).collect(),
            })
            .collect();
        out.text(
            "ir_probe.svg",
            &line_chart("one-boson slice norm at ξ = 0", "k_min", "norm", (Axis::Log, Axis::Log), &series),
        )?;
    }

    if s.mourre {
        let r = mourre_check(&m, &grid, s.n_max, m.g, &opts)?;
        let mut t = Table::new(&["g", "norm_ah0", "c0", "min_eigenvalue", "margin", "holds"]);
        t.push(row![m.g, r.norm_ah0, r.c0, r.min_eigenvalue, r.margin, r.holds]);
        out.table("mourre.csv", &t)?;
    }
    Ok(())
}
