//! Experiment configuration: a sectioned TOML file plus `--set` overrides.

use frictionlab_core::{
    EigenOptions, FormFactorModel, Frame, ModeGrid, QuadratureGrid, RadialGrid, RadialProfile, XiGrid,
};
use serde::{Deserialize, Serialize};
use std::path::PathBuf;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("malformed config: {0}")]
    Parse(String),
    #[error("bad override `{0}`: expected key=value")]
    Override(String),
    #[error("invalid config: {0}")]
    Invalid(String),
}

fn invalid(msg: impl Into<String>) -> ConfigError {
    ConfigError::Invalid(msg.into())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Profile {
    Gaussian,
    Bump,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelSection {
    /// Shape of `ρ̂₁` (particle side).
    pub profile1: Profile,
    pub scale1: f64,
    /// Shape of `ρ̂₂` (membrane side).
    pub profile2: Profile,
    pub scale2: f64,
    pub mu: f64,
    pub g: f64,
    pub d: usize,
    pub m: f64,
}

impl Default for ModelSection {
    fn default() -> Self {
        ModelSection {
            profile1: Profile::Gaussian,
            scale1: 1.0,
            profile2: Profile::Gaussian,
            scale2: 1.0,
            mu: 0.0,
            g: 0.1,
            d: 1,
            m: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSection {
    pub k_max: f64,
    /// Node count of the uniform `k` grid (used when `k_min = 0`).
    pub k_nodes: usize,
    /// Positive values select a geometric `k` grid starting here.
    pub k_min: f64,
    pub per_decade: usize,
    pub xi_max: f64,
    /// Nodes on each side of `ξ = 0`.
    pub xi_half: usize,
    pub quad_panels: usize,
    pub quad_order: usize,
    pub quad_tol: f64,
}

impl Default for GridSection {
    fn default() -> Self {
        GridSection {
            k_max: 4.0,
            k_nodes: 40,
            k_min: 0.0,
            per_decade: 8,
            xi_max: 4.0,
            xi_half: 20,
            quad_panels: 8,
            quad_order: 16,
            quad_tol: 1e-10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunSection {
    pub eig_tol: f64,
    pub eig_max_iterations: usize,
    pub seeds: Vec<u64>,
}

impl Default for RunSection {
    fn default() -> Self {
        let e = EigenOptions::default();
        RunSection {
            eig_tol: e.tol,
            eig_max_iterations: e.max_iterations,
            seeds: e.seeds,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DragSection {
    pub mu_list: Vec<f64>,
    pub v_min: f64,
    pub v_max: f64,
    pub points: usize,
    pub fit_min: f64,
    pub fit_max: f64,
}

impl Default for DragSection {
    fn default() -> Self {
        DragSection {
            mu_list: vec![0.0],
            v_min: 1e-3,
            v_max: 1.0,
            points: 31,
            fit_min: 1e-3,
            fit_max: 1e-2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Initial {
    Vacuum,
    Static,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulateSection {
    pub dt: f64,
    pub t_final: f64,
    pub sample_every: usize,
    pub q0: f64,
    pub p0: f64,
    pub initial: Initial,
}

impl Default for SimulateSection {
    fn default() -> Self {
        SimulateSection {
            dt: 0.01,
            t_final: 100.0,
            sample_every: 10,
            q0: 0.0,
            p0: 1.0,
            initial: Initial::Vacuum,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClampSection {
    pub v_list: Vec<f64>,
    pub dt: f64,
    pub t_final: f64,
    /// Allowed relative change between the two averaging quarters.
    pub settle_tol: f64,
}

impl Default for ClampSection {
    fn default() -> Self {
        ClampSection {
            v_list: vec![0.3],
            dt: 0.05,
            t_final: 100.0,
            settle_tol: 1e-2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FgrMethodName {
    Delta,
    Lorentzian,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FgrSection {
    pub mu_list: Vec<f64>,
    /// The ladder is `p_max · i / (points - 1)`, starting at `P = 0`.
    pub p_max: f64,
    pub points: usize,
    pub method: FgrMethodName,
    pub eps: Vec<f64>,
}

impl Default for FgrSection {
    fn default() -> Self {
        FgrSection {
            mu_list: vec![-0.25, 0.0, 0.5, 1.0],
            p_max: 6.0,
            points: 49,
            method: FgrMethodName::Delta,
            eps: vec![1e-1, 1e-2, 1e-3],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FrameName {
    Bare,
    Displaced,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpectrumSection {
    pub p_list: Vec<f64>,
    /// Fock-space grid, kept separate from `[grid]`: the basis grows like
    /// `modes^n_max`.
    pub k_max: f64,
    pub k_nodes: usize,
    pub xi_max: f64,
    pub xi_half: usize,
    pub n_max: usize,
    pub frame: FrameName,
    /// Refinement levels of the flatness probe; empty disables it.
    pub flatness_k_min: Vec<f64>,
    pub flatness_xi_half: Vec<usize>,
    pub flatness_xi_spacing: f64,
    pub flatness_per_decade: usize,
    /// `μ` values of the infrared probe; empty disables it.
    pub ir_mu_list: Vec<f64>,
    pub ir_k_min: Vec<f64>,
    pub ir_g: f64,
    pub ir_eig_tol: f64,
    pub mourre: bool,
}

impl Default for SpectrumSection {
    fn default() -> Self {
        SpectrumSection {
            p_list: vec![0.0, 0.5, 1.0],
            k_max: 4.0,
            k_nodes: 8,
            xi_max: 2.0,
            xi_half: 2,
            n_max: 2,
            frame: FrameName::Bare,
            flatness_k_min: vec![0.2, 0.1, 0.05],
            flatness_xi_half: vec![6, 8, 10],
            flatness_xi_spacing: 0.25,
            flatness_per_decade: 6,
            ir_mu_list: vec![-0.75, -0.5, 0.0],
            ir_k_min: vec![1e-2, 1e-3, 1e-4, 1e-5],
            ir_g: 1e-5,
            ir_eig_tol: 1e-13,
            mourre: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    pub dir: PathBuf,
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection { dir: "out".into() }
    }
}

/// Every setting of every subcommand; all keys have defaults.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub model: ModelSection,
    pub grid: GridSection,
    pub run: RunSection,
    pub drag: DragSection,
    pub simulate: SimulateSection,
    pub clamp: ClampSection,
    pub fgr: FgrSection,
    pub spectrum: SpectrumSection,
    pub output: OutputSection,
}

/// Parses `value` as a TOML value, falling back to a bare string.
fn parse_value(value: &str) -> toml::Value {
    format!("v = {value}")
        .parse::<toml::Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(value.to_string()))
}

fn apply_override(table: &mut toml::Table, item: &str) -> Result<(), ConfigError> {
    let (key, value) = item.split_once('=').ok_or_else(|| ConfigError::Override(item.into()))?;
    let path: Vec<&str> = key.trim().split('.').collect();
    if path.iter().any(|p| p.is_empty()) {
        return Err(ConfigError::Override(item.into()));
    }
    let (last, sections) = path.split_last().expect("nonempty path");
    let mut t = table;
    for s in sections {
        t = t
            .entry(s.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()))
            .as_table_mut()
            .ok_or_else(|| ConfigError::Override(item.into()))?;
    }
    t.insert(last.to_string(), parse_value(value.trim()));
    Ok(())
}

impl ExperimentConfig {
    /// Parses `text`, applies `overrides` in order and checks the result.
    pub fn from_text(text: &str, overrides: &[String]) -> Result<Self, ConfigError> {
        let mut table: toml::Table = text.parse().map_err(|e: toml::de::Error| ConfigError::Parse(e.to_string()))?;
        for o in overrides {
            apply_override(&mut table, o)?;
        }
        let cfg: ExperimentConfig = table
            .try_into()
            .map_err(|e: toml::de::Error| ConfigError::Parse(e.message().to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: Option<&std::path::Path>, overrides: &[String]) -> Result<Self, ConfigError> {
        let text = match path {
            Some(p) => std::fs::read_to_string(p).map_err(|source| ConfigError::Read {
                path: p.to_path_buf(),
                source,
            })?,
            None => String::new(),
        };
        Self::from_text(&text, overrides)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    fn validate(&self) -> Result<(), ConfigError> {
        let m = &self.model;
        if !(m.mu > -1.0) {
            return Err(invalid("model.mu must exceed -1"));
        }
        if !(m.scale1 > 0.0 && m.scale2 > 0.0 && m.m > 0.0) {
            return Err(invalid("model scales and mass must be positive"));
        }
        let g = &self.grid;
        if !(g.k_max > 0.0) || g.k_nodes == 0 || g.k_min < 0.0 || g.k_min >= g.k_max {
            return Err(invalid("grid needs 0 <= k_min < k_max and k_nodes > 0"));
        }
        if !(g.xi_max > 0.0) || g.xi_half == 0 || g.per_decade == 0 {
            return Err(invalid("grid needs xi_max > 0, xi_half > 0 and per_decade > 0"));
        }
        if g.quad_panels == 0 || g.quad_order == 0 || !(g.quad_tol > 0.0) {
            return Err(invalid("quadrature settings must be positive"));
        }
        if self.run.seeds.is_empty() || !(self.run.eig_tol > 0.0) {
            return Err(invalid("run needs at least one seed and eig_tol > 0"));
        }
        let s = &self.simulate;
        if !(s.dt > 0.0) || !(s.t_final > 0.0) || s.sample_every == 0 {
            return Err(invalid("simulate needs dt > 0, t_final > 0 and sample_every > 0"));
        }
        let c = &self.clamp;
        if !(c.dt > 0.0) || !(c.t_final > 4.0 * c.dt) || c.v_list.iter().any(|v| *v == 0.0 || !v.is_finite()) {
            return Err(invalid("clamp needs dt > 0, t_final > 4 dt and nonzero velocities"));
        }
        let f = &self.fgr;
        if !(f.p_max > 0.0) || f.points < 2 {
            return Err(invalid("fgr needs p_max > 0 and at least two points"));
        }
        let sp = &self.spectrum;
        if !(sp.k_max > 0.0 && sp.xi_max > 0.0) || sp.k_nodes == 0 || sp.xi_half == 0 {
            return Err(invalid("spectrum grid needs positive ranges and node counts"));
        }
        if sp.flatness_k_min.len() != sp.flatness_xi_half.len() {
            return Err(invalid("spectrum.flatness_k_min and flatness_xi_half must have equal length"));
        }
        Ok(())
    }

    fn profile(kind: Profile, scale: f64) -> Result<RadialProfile, frictionlab_core::Error> {
        match kind {
            Profile::Gaussian => RadialProfile::gaussian(scale, 1.0),
            Profile::Bump => RadialProfile::compact_bump(scale, 1.0),
        }
    }

    pub fn model(&self) -> frictionlab_core::Result<FormFactorModel> {
        let m = &self.model;
        FormFactorModel::new(
            Self::profile(m.profile1, m.scale1)?,
            Self::profile(m.profile2, m.scale2)?,
            m.mu,
            m.d,
            m.m,
            m.g,
        )
    }

    pub fn mode_grid(&self) -> frictionlab_core::Result<ModeGrid> {
        let g = &self.grid;
        let k = if g.k_min > 0.0 {
            RadialGrid::geometric(g.k_min, g.k_max, g.per_decade)?
        } else {
            RadialGrid::uniform(g.k_max, g.k_nodes)?
        };
        Ok(ModeGrid::new(k, XiGrid::uniform(g.xi_max, g.xi_half)?))
    }

    pub fn spectrum_grid(&self) -> frictionlab_core::Result<ModeGrid> {
        let s = &self.spectrum;
        Ok(ModeGrid::new(
            RadialGrid::uniform(s.k_max, s.k_nodes)?,
            XiGrid::uniform(s.xi_max, s.xi_half)?,
        ))
    }

    pub fn quadrature(&self) -> QuadratureGrid {
        QuadratureGrid {
            panels: self.grid.quad_panels,
            order: self.grid.quad_order,
            tol: self.grid.quad_tol,
            ..QuadratureGrid::default()
        }
    }

    pub fn eigen(&self) -> EigenOptions {
        EigenOptions {
            tol: self.run.eig_tol,
            max_iterations: self.run.eig_max_iterations,
            seeds: self.run.seeds.clone(),
            ..EigenOptions::default()
        }
    }

    pub fn frame(&self) -> Frame {
        match self.spectrum.frame {
            FrameName::Bare => Frame::Bare,
            FrameName::Displaced => Frame::Displaced,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_text_gives_defaults() {
        assert_eq!(ExperimentConfig::from_text("", &[]).unwrap(), ExperimentConfig::default());
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let e = ExperimentConfig::from_text("[model]\nmuu = 0.5\n", &[]).unwrap_err();
        assert!(matches!(e, ConfigError::Parse(_)), "{e}");
        let e = ExperimentConfig::from_text("[modle]\nmu = 0.5\n", &[]).unwrap_err();
        assert!(matches!(e, ConfigError::Parse(_)), "{e}");
    }

    #[test]
    fn overrides_apply_in_order() {
        let sets = vec!["model.mu=0.5".to_string(), "drag.mu_list=[-0.5, 0.0]".into(), "model.mu = 0.25".into()];
        let c = ExperimentConfig::from_text("[model]\nmu = -0.25\n", &sets).unwrap();
        assert_eq!(c.model.mu, 0.25);
        assert_eq!(c.drag.mu_list, vec![-0.5, 0.0]);
        let c = ExperimentConfig::from_text("", &["spectrum.frame=displaced".into()]).unwrap();
        assert_eq!(c.spectrum.frame, FrameName::Displaced);
    }

    #[test]
    fn malformed_override_is_rejected() {
        assert!(matches!(
            ExperimentConfig::from_text("", &["model.mu".into()]),
            Err(ConfigError::Override(_))
        ));
        assert!(ExperimentConfig::from_text("", &["model.mu=fast".into()]).is_err());
    }

    #[test]
    fn nonpositive_dt_is_invalid() {
        assert!(matches!(
            ExperimentConfig::from_text("[simulate]\ndt = 0.0\n", &[]),
            Err(ConfigError::Invalid(_))
        ));
    }

    #[test]
    fn resolved_config_round_trips() {
        let c = ExperimentConfig::from_text("", &["fgr.points=5".into()]).unwrap();
        assert_eq!(ExperimentConfig::from_text(&c.to_toml(), &[]).unwrap(), c);
    }
}
