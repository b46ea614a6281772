//! JSON run configuration. Every block rejects unknown keys and the whole
//! document is validated before any computation starts.

use crate::angle::Angle;
use crate::error::CliError;
use cmc_core::geometry::{Convexity, CylinderConfig, TMode};
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioKind {
    Planar,
    Wedge,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConvexityName {
    Convex,
    Concave,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TModeName {
    DirichletEnds,
    Periodic,
    HalfPeriodNeumann,
}

impl From<TModeName> for TMode {
    fn from(t: TModeName) -> Self {
        match t {
            TModeName::DirichletEnds => TMode::DirichletEnds,
            TModeName::Periodic => TMode::Periodic,
            TModeName::HalfPeriodNeumann => TMode::HalfPeriodNeumann,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioBlock {
    pub kind: ScenarioKind,
    #[serde(default = "one")]
    pub r: f64,
    pub gamma: Angle,
    #[serde(default)]
    pub beta: Option<Angle>,
    #[serde(default)]
    pub convexity: Option<ConvexityName>,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Numerics {
    pub nt: usize,
    pub ns: usize,
    /// Transverse resolution of the Sturm oracle.
    pub oracle_ns: usize,
    pub t_mode: TModeName,
    /// Search interval in H for the bifurcation point.
    pub search: Option<[f64; 2]>,
    pub newton_tol: f64,
    pub max_newton_iter: usize,
    pub min_step_fraction: f64,
    pub max_step_factor: f64,
}

impl Default for Numerics {
    fn default() -> Self {
        Self {
            nt: 64,
            ns: 64,
            oracle_ns: 1001,
            t_mode: TModeName::HalfPeriodNeumann,
            search: None,
            newton_tol: 1e-10,
            max_newton_iter: 30,
            min_step_fraction: 1.0 / 64.0,
            max_step_factor: 4.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    Gamma,
    Beta,
    R,
    H,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepCommand {
    Critical,
    Stability,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepBlock {
    pub axis: SweepAxis,
    #[serde(default)]
    pub values: Vec<Angle>,
    #[serde(default = "default_sweep_command")]
    pub command: SweepCommand,
}

fn default_sweep_command() -> SweepCommand {
    SweepCommand::Critical
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Task {
    /// Cylinder length for `spectrum` and `stability`.
    pub h: Option<f64>,
    /// Number of eigenvalues for `spectrum`.
    pub m: usize,
    pub steps: usize,
    pub ds: f64,
    pub epsilon0: f64,
    pub reverse: bool,
    pub sweep: Option<SweepBlock>,
}

impl Default for Task {
    fn default() -> Self {
        Self { h: None, m: 5, steps: 20, ds: 1e-2, epsilon0: 1e-2, reverse: false, sweep: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Output {
    pub dir: Option<String>,
    pub format: Format,
    /// Write a mesh for every n-th branch state; 0 disables.
    pub obj_every: usize,
    pub svg: bool,
}

impl Default for Output {
    fn default() -> Self {
        Self { dir: None, format: Format::Csv, obj_every: 0, svg: true }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub scenario: Option<ScenarioBlock>,
    #[serde(default)]
    pub numerics: Numerics,
    #[serde(default)]
    pub task: Task,
    #[serde(default)]
    pub output: Output,
}

fn bad(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| bad(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| bad(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if let Some(s) = &self.scenario {
            scenario_config(s)?;
        }
        let n = &self.numerics;
        if n.nt < 4 || n.ns < 4 {
            return Err(bad(format!("grid {}x{} is too small", n.nt, n.ns)));
        }
        if n.oracle_ns < 64 {
            return Err(bad(format!("oracle_ns must be at least 64, got {}", n.oracle_ns)));
        }
        if !(n.newton_tol > 0.0 && n.newton_tol.is_finite()) {
            return Err(bad("newton_tol must be positive"));
        }
        if !(n.min_step_fraction > 0.0 && n.min_step_fraction <= 1.0) {
            return Err(bad("min_step_fraction must lie in (0, 1]"));
        }
        if !(n.max_step_factor >= 1.0 && n.max_step_factor.is_finite()) {
            return Err(bad("max_step_factor must be at least 1"));
        }
        if let Some([lo, hi]) = n.search {
            if !(lo > 0.0 && hi > lo && hi.is_finite()) {
                return Err(bad(format!("search interval [{lo}, {hi}] is invalid")));
            }
        }
        let t = &self.task;
        if let Some(h) = t.h {
            if !(h > 0.0 && h.is_finite()) {
                return Err(bad(format!("length h must be positive, got {h}")));
            }
        }
        if t.m == 0 {
            return Err(bad("m must be at least 1"));
        }
        if !(t.ds > 0.0 && t.ds.is_finite()) {
            return Err(bad(format!("ds must be positive, got {}", t.ds)));
        }
        if !t.epsilon0.is_finite() {
            return Err(bad("epsilon0 must be finite"));
        }
        if let Some(sw) = &t.sweep {
            if sw.values.iter().any(|v| !v.0.is_finite()) {
                return Err(bad("sweep values must be finite"));
            }
            if sw.axis == SweepAxis::H && sw.command == SweepCommand::Critical {
                return Err(bad("the critical command does not depend on h"));
            }
        }
        Ok(())
    }

    pub fn cylinder(&self) -> Result<CylinderConfig, CliError> {
        let s = self.scenario.as_ref().ok_or_else(|| bad("no scenario given (use --config or --scenario)"))?;
        scenario_config(s)
    }
}

pub fn scenario_config(s: &ScenarioBlock) -> Result<CylinderConfig, CliError> {
    let c = match s.kind {
        ScenarioKind::Planar => {
            if s.beta.is_some() || s.convexity.is_some() {
                return Err(bad("planar scenario takes no beta or convexity"));
            }
            CylinderConfig::planar(s.r, s.gamma.0)
        }
        ScenarioKind::Wedge => {
            let beta = s.beta.ok_or_else(|| bad("wedge scenario needs beta"))?;
            let convexity = match s.convexity.ok_or_else(|| bad("wedge scenario needs convexity"))? {
                ConvexityName::Convex => Convexity::Convex,
                ConvexityName::Concave => Convexity::Concave,
            };
            CylinderConfig::wedge(s.r, s.gamma.0, beta.0, convexity)
        }
    };
    c.map_err(|e| bad(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn parses_full_document() {
        let cfg = RunConfig::from_json(
            r#"{
                "scenario": {"kind": "wedge", "r": 2, "gamma": "pi/4", "beta": 1, "convexity": "convex"},
                "numerics": {"nt": 32, "ns": 40, "t_mode": "periodic"},
                "task": {"steps": 5, "sweep": {"axis": "gamma", "values": ["pi/3", 2.0]}},
                "output": {"format": "json", "obj_every": 2}
            }"#,
        )
        .unwrap();
        let c = cfg.cylinder().unwrap();
        assert_eq!(c.r, 2.0);
        assert_eq!(c.gamma, PI / 4.0);
        assert_eq!(c.beta(), Some(1.0));
        assert_eq!(cfg.numerics.ns, 40);
        assert_eq!(cfg.numerics.oracle_ns, 1001);
        assert_eq!(cfg.task.sweep.unwrap().values[0].0, PI / 3.0);
        assert_eq!(cfg.output.format, Format::Json);
    }

    #[test]
    fn rejects_unknown_keys_and_bad_values() {
        for doc in [
            r#"{"scenario": {"kind": "planar", "gamma": 2, "colour": 1}}"#,
            r#"{"numerics": {"nx": 3}}"#,
            r#"{"extra": {}}"#,
            r#"{"scenario": {"kind": "planar", "gamma": 2, "beta": 1}}"#,
            r#"{"scenario": {"kind": "wedge", "gamma": 2, "beta": 1}}"#,
            r#"{"scenario": {"kind": "planar", "gamma": "4pi"}}"#,
            r#"{"task": {"ds": -1}}"#,
            r#"{"numerics": {"nt": 2}}"#,
        ] {
            assert!(matches!(RunConfig::from_json(doc), Err(CliError::Config(_))), "{doc}");
        }
    }
}
