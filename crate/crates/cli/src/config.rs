//! Experiment configuration: one TOML file, optionally patched by dotted
//! `key=value` overrides, validated before any computation starts.

use std::path::Path;

use serde::{Deserialize, Serialize};
use toml::Value;

use crate::error::RunError;

fn seed_default() -> u64 {
    42
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Must match the subcommand when present.
    pub experiment: Option<String>,
    #[serde(default = "seed_default")]
    pub seed: u64,
    #[serde(default)]
    pub domain: DomainBlock,
    #[serde(default)]
    pub grid: GridBlock,
    #[serde(default)]
    pub uncertainty: UncertaintyBlock,
    #[serde(default)]
    pub solver: SolverBlock,
    #[serde(default)]
    pub coefficients: CoefficientsBlock,
    #[serde(default)]
    pub driver: DriverBlock,
    #[serde(default)]
    pub verify: VerifyBlock,
    #[serde(default)]
    pub gbm: GbmBlock,
    #[serde(default)]
    pub bench: BenchBlock,
    #[serde(default)]
    pub output: OutputBlock,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DomainBlock {
    /// `half-line`, `half-space`, `ball`, `box`, `polytope`, `shell`, `l-shape`.
    pub kind: String,
    pub dim: usize,
    pub center: Option<Vec<f64>>,
    pub radius: Option<f64>,
    pub inner: Option<f64>,
    pub outer: Option<f64>,
    pub lo: Option<Vec<f64>>,
    pub hi: Option<Vec<f64>>,
    pub corner: Option<Vec<f64>>,
    pub normal: Option<Vec<f64>>,
    pub offset: Option<f64>,
    /// Polytope faces as `[n_1, .., n_d, offset]`, meaning `⟨n, x⟩ > offset`.
    pub faces: Option<Vec<Vec<f64>>>,
    pub r0: Option<f64>,
    pub delta: Option<f64>,
    pub beta: Option<f64>,
    pub kappa: Option<f64>,
    /// `none` or `shell`.
    pub psi: Option<String>,
}

impl Default for DomainBlock {
    fn default() -> Self {
        Self {
            kind: "half-line".into(),
            dim: 1,
            center: None,
            radius: None,
            inner: None,
            outer: None,
            lo: None,
            hi: None,
            corner: None,
            normal: None,
            offset: None,
            faces: None,
            r0: None,
            delta: None,
            beta: None,
            kappa: None,
            psi: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridBlock {
    #[serde(rename = "T")]
    pub horizon: f64,
    #[serde(rename = "N")]
    pub n: usize,
}

impl Default for GridBlock {
    fn default() -> Self {
        Self { horizon: 1.0, n: 2000 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct UncertaintyBlock {
    /// Diagonal volatility bounds; one entry per dimension (or one for all).
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    /// `high`, `low`, `iid`, `bang-bang-time`, `bang-bang-state`, `feedback`.
    pub policies: Vec<String>,
    pub n_paths: usize,
    pub n_scenarios: usize,
    pub switch_time: f64,
    pub threshold: f64,
}

impl Default for UncertaintyBlock {
    fn default() -> Self {
        Self {
            lo: vec![1.0],
            hi: vec![2.0],
            policies: vec!["high".into(), "low".into(), "iid".into()],
            n_paths: 200,
            n_scenarios: 4,
            switch_time: 0.5,
            threshold: 0.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverBlock {
    pub m_ladder: Vec<f64>,
    pub theta: f64,
    /// Fixed substep count; overrides `theta` when set.
    pub substeps: Option<usize>,
    pub tol: f64,
    pub max_iter: usize,
    /// Defaults to a domain-specific interior point.
    pub x0: Option<Vec<f64>>,
    pub alpha: f64,
    /// `auto`, `exact`, `dyadic`.
    pub holder: String,
    /// rgsde studies: `convergence`, `picard`, `stability`.
    pub studies: Vec<String>,
    /// Picard initial iterate: `start` or `reflected-b`.
    pub init: String,
    pub uniqueness: bool,
    pub perturbations: Vec<f64>,
}

impl Default for SolverBlock {
    fn default() -> Self {
        Self {
            m_ladder: vec![1e2, 1e3, 1e4],
            theta: 0.5,
            substeps: None,
            tol: 1e-6,
            max_iter: 8,
            x0: None,
            alpha: 0.4,
            holder: "auto".into(),
            studies: vec!["convergence".into()],
            init: "start".into(),
            uniqueness: true,
            perturbations: vec![0.1, 0.05, 0.025],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CoefficientsBlock {
    /// `none`, `zero`, `constant-drift`, `identity`, `trig-bounded`.
    pub name: String,
    pub a: f64,
    pub b: f64,
    pub drift: Option<Vec<f64>>,
    /// Extra constant added to the drift.
    pub shift: Option<Vec<f64>>,
}

impl Default for CoefficientsBlock {
    fn default() -> Self {
        Self { name: "none".into(), a: 1.0, b: 0.1, drift: None, shift: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DriverBlock {
    /// `sin-drift` (`sin(4πt) − 2t`), `smooth` (random trigonometric) or
    /// `brownian` (G-Brownian paths under the uncertainty block).
    pub kind: String,
    pub count: usize,
    pub amplitude: f64,
}

impl Default for DriverBlock {
    fn default() -> Self {
        Self { kind: "sin-drift".into(), count: 1, amplitude: 0.6 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VerifyBlock {
    pub boundary_samples: usize,
    pub cone_samples: usize,
    pub psi_samples: usize,
}

impl Default for VerifyBlock {
    fn default() -> Self {
        Self { boundary_samples: 2000, cone_samples: 8, psi_samples: 400 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GbmBlock {
    /// `x`, `x2`, `-x2`, `abs`.
    pub functionals: Vec<String>,
    pub dx: f64,
    pub richardson: bool,
    /// Monte Carlo cells used by the feedback policy.
    pub mc_cells: usize,
    pub qv_scenarios: usize,
    /// Dimensions of the quadratic-variation check.
    pub qv_dims: Vec<usize>,
}

impl Default for GbmBlock {
    fn default() -> Self {
        Self {
            functionals: vec!["x".into(), "x2".into(), "-x2".into(), "abs".into()],
            dx: 0.02,
            richardson: true,
            mc_cells: 50,
            qv_scenarios: 1000,
            qv_dims: vec![1, 2],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BenchBlock {
    pub paths: usize,
    pub repeats: usize,
}

impl Default for BenchBlock {
    fn default() -> Self {
        Self { paths: 50, repeats: 1 }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputBlock {
    pub dir: Option<String>,
}

/// Parse `value` as a TOML value, falling back to a bare string.
fn parse_value(raw: &str) -> Value {
    match toml::from_str::<toml::Table>(&format!("v = {raw}")) {
        Ok(mut t) => t.remove("v").unwrap_or_else(|| Value::String(raw.into())),
        Err(_) => Value::String(raw.into()),
    }
}

/// Set `a.b.c = value` inside `root`, creating tables along the way.
pub fn apply_override(root: &mut toml::Table, assignment: &str) -> Result<(), RunError> {
    let (key, raw) = assignment
        .split_once('=')
        .ok_or_else(|| RunError::validation(assignment, "override must have the form key=value"))?;
    let key = key.trim();
    let parts: Vec<&str> = key.split('.').collect();
    if parts.iter().any(|p| p.is_empty()) {
        return Err(RunError::validation(key, "empty key segment"));
    }
    let mut table = root;
    for part in &parts[..parts.len() - 1] {
        let entry = table.entry(part.to_string()).or_insert_with(|| Value::Table(toml::Table::new()));
        table = entry.as_table_mut().ok_or_else(|| RunError::validation(key, "path crosses a non-table value"))?;
    }
    table.insert(parts[parts.len() - 1].to_string(), parse_value(raw.trim()));
    Ok(())
}

/// Read, patch and deserialize a configuration.
pub fn load(path: Option<&Path>, overrides: &[String]) -> Result<ExperimentConfig, RunError> {
    let mut table = match path {
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| RunError::validation("--config", format!("cannot read {}: {e}", p.display())))?;
            toml::from_str::<toml::Table>(&text).map_err(|e| RunError::validation("--config", e.to_string()))?
        }
        None => toml::Table::new(),
    };
    for o in overrides {
        apply_override(&mut table, o)?;
    }
    ExperimentConfig::deserialize(Value::Table(table)).map_err(|e| RunError::validation("config", e.to_string()))
}

impl ExperimentConfig {
    /// Canonical TOML echo; re-running it reproduces the experiment.
    pub fn echo(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Range checks that do not depend on the experiment kind.
    pub fn validate(&self) -> Result<(), RunError> {
        let d = self.domain.dim;
        if !(1..=3).contains(&d) {
            return Err(RunError::validation("domain.dim", "must be 1, 2 or 3"));
        }
        if !(self.grid.horizon > 0.0 && self.grid.horizon.is_finite()) {
            return Err(RunError::validation("grid.T", "must be positive"));
        }
        if self.grid.n == 0 || self.grid.n > 10_000_000 {
            return Err(RunError::validation("grid.N", "must be in 1..=10^7"));
        }
        let u = &self.uncertainty;
        for (key, v) in [("uncertainty.lo", &u.lo), ("uncertainty.hi", &u.hi)] {
            if v.len() != 1 && v.len() != d {
                return Err(RunError::validation(key, format!("needs 1 or {d} entries")));
            }
            if v.iter().any(|x| !(*x >= 0.0 && x.is_finite())) {
                return Err(RunError::validation(key, "entries must be finite and nonnegative"));
            }
        }
        for i in 0..d {
            if self.vol_lo(i) > self.vol_hi(i) {
                return Err(RunError::validation("uncertainty.lo", "lower bound exceeds upper bound"));
            }
        }
        if u.n_paths == 0 {
            return Err(RunError::validation("uncertainty.n_paths", "must be positive"));
        }
        if u.policies.is_empty() {
            return Err(RunError::validation("uncertainty.policies", "must not be empty"));
        }
        let s = &self.solver;
        if s.m_ladder.is_empty() || s.m_ladder.iter().any(|m| !(*m >= 1.0 && m.is_finite())) {
            return Err(RunError::validation("solver.m_ladder", "entries must be finite and >= 1"));
        }
        if !(s.theta > 0.0 && s.theta <= 1.0) {
            return Err(RunError::validation("solver.theta", "must lie in (0, 1]"));
        }
        if !(s.tol > 0.0) {
            return Err(RunError::validation("solver.tol", "must be positive"));
        }
        if s.max_iter == 0 {
            return Err(RunError::validation("solver.max_iter", "must be positive"));
        }
        if !(s.alpha > 0.0 && s.alpha < 0.5) {
            return Err(RunError::validation("solver.alpha", "must lie in (0, 1/2)"));
        }
        if let Some(x0) = &s.x0 {
            if x0.len() != d {
                return Err(RunError::validation("solver.x0", format!("needs {d} entries")));
            }
        }
        if self.driver.count == 0 {
            return Err(RunError::validation("driver.count", "must be positive"));
        }
        if !(self.gbm.dx > 0.0) {
            return Err(RunError::validation("gbm.dx", "must be positive"));
        }
        Ok(())
    }

    pub fn vol_lo(&self, i: usize) -> f64 {
        let v = &self.uncertainty.lo;
        if v.len() == 1 { v[0] } else { v[i] }
    }

    pub fn vol_hi(&self, i: usize) -> f64 {
        let v = &self.uncertainty.hi;
        if v.len() == 1 { v[0] } else { v[i] }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overrides_patch_nested_keys() {
        let mut t: toml::Table = toml::from_str("[solver]\nm_ladder = [1.0]\n").unwrap();
        apply_override(&mut t, "solver.m_ladder=[100,1000]").unwrap();
        apply_override(&mut t, "domain.kind=shell").unwrap();
        apply_override(&mut t, "seed=7").unwrap();
        assert_eq!(t["solver"]["m_ladder"].as_array().unwrap().len(), 2);
        assert_eq!(t["domain"]["kind"].as_str(), Some("shell"));
        assert_eq!(t["seed"].as_integer(), Some(7));
        assert!(apply_override(&mut t, "novalue").is_err());
        assert!(apply_override(&mut t, "seed.x=1").is_err());
    }

    #[test]
    fn echo_round_trips() {
        let cfg = load(None, &["domain.kind=shell".into(), "domain.dim=2".into(), "solver.m_ladder=[100, 1000]".into()]).unwrap();
        let back: ExperimentConfig = toml::from_str(&cfg.echo()).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn unknown_keys_are_named() {
        let err = load(None, &["domain.kind=ball".into(), "solver.mladder=[1]".into()]).unwrap_err();
        assert!(err.to_string().contains("mladder"), "{err}");
    }
}
