//! The run configuration: a single structured JSON file plus dotted-path
//! overrides from the command line.

use gfunc_core::contour::QuadratureSpec;
use gfunc_core::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProblemKind {
    NlsGenus0,
    NlsGenus2,
    Synthetic,
    AppendixToy,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct SweepConfig {
    /// Name of the swept beta component ("mu", "x", "t" for NLS).
    #[serde(default)]
    pub component: String,
    #[serde(default)]
    pub from: f64,
    #[serde(default)]
    pub to: f64,
    #[serde(default = "one")]
    pub steps: usize,
}

fn one() -> usize {
    1
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct QuadConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: u32,
    pub nodes_per_panel: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        let q = QuadratureSpec::default();
        QuadConfig {
            abs_tol: q.abs_tol,
            rel_tol: q.rel_tol,
            max_subdivisions: q.max_subdivisions,
            nodes_per_panel: q.nodes_per_panel,
        }
    }
}

impl QuadConfig {
    pub fn to_spec(&self) -> QuadratureSpec {
        QuadratureSpec {
            abs_tol: self.abs_tol,
            rel_tol: self.rel_tol,
            max_subdivisions: self.max_subdivisions,
            nodes_per_panel: self.nodes_per_panel,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NewtonConfig {
    pub residual_tol: f64,
    pub max_iters: usize,
}

impl Default for NewtonConfig {
    fn default() -> Self {
        NewtonConfig {
            residual_tol: 1e-10,
            max_iters: 30,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OutputConfig {
    pub dir: String,
    pub formats: Vec<String>,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig {
            dir: "out".into(),
            formats: vec!["csv".into(), "json".into()],
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SignsGridConfig {
    pub nx: usize,
    pub ny: usize,
    pub re_lo: f64,
    pub re_hi: f64,
    pub im_lo: f64,
    pub im_hi: f64,
}

impl Default for SignsGridConfig {
    fn default() -> Self {
        SignsGridConfig {
            nx: 200,
            ny: 200,
            re_lo: -2.0,
            re_hi: 2.5,
            im_lo: -2.0,
            im_hi: 2.0,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RayConfig {
    pub origin: [f64; 2],
    pub direction: [f64; 2],
    pub length: f64,
    pub samples: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunConfig {
    pub problem: ProblemKind,
    /// Beta values by component name; NLS uses "mu", "x", "t".
    #[serde(default)]
    pub parameters: serde_json::Map<String, serde_json::Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
    /// Optional starting branchpoints as [re, im] pairs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_alphas: Option<Vec<[f64; 2]>>,
    /// Fixed coefficients of the synthetic polynomial problem.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub synthetic_coeffs: Option<Vec<[f64; 2]>>,
    #[serde(default)]
    pub quadrature: QuadConfig,
    #[serde(default)]
    pub newton: NewtonConfig,
    #[serde(default = "default_offset_factor")]
    pub loop_offset_factor: f64,
    #[serde(default = "default_outer_factor")]
    pub outer_factor: f64,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default)]
    pub suites: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default)]
    pub signs_grid: SignsGridConfig,
    #[serde(default)]
    pub extension_rays: Vec<RayConfig>,
}

fn default_offset_factor() -> f64 {
    0.3
}

fn default_outer_factor() -> f64 {
    2.0
}

impl Default for RunConfig {
    fn default() -> Self {
        let mut parameters = serde_json::Map::new();
        parameters.insert("mu".into(), serde_json::json!(2.2));
        parameters.insert("x".into(), serde_json::json!(1.0));
        parameters.insert("t".into(), serde_json::json!(0.0));
        RunConfig {
            problem: ProblemKind::NlsGenus0,
            parameters,
            sweep: None,
            initial_alphas: None,
            synthetic_coeffs: None,
            quadrature: QuadConfig::default(),
            newton: NewtonConfig::default(),
            loop_offset_factor: default_offset_factor(),
            outer_factor: default_outer_factor(),
            output: OutputConfig::default(),
            suites: Vec::new(),
            seed: None,
            signs_grid: SignsGridConfig::default(),
            extension_rays: Vec::new(),
        }
    }
}

#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "usage error: {}", self.0)
    }
}

impl std::error::Error for UsageError {}

impl RunConfig {
    /// Parse a config file; a run-record file (with a top-level `config`
    /// key) replays its embedded config.
    pub fn from_json_str(text: &str) -> Result<Self, UsageError> {
        let value: serde_json::Value = serde_json::from_str(text)
            .map_err(|e| UsageError(format!("config is not valid JSON: {e}")))?;
        let config_value = if let Some(inner) = value.get("config") {
            inner.clone()
        } else {
            value
        };
        serde_json::from_value(config_value)
            .map_err(|e| UsageError(format!("bad config: {e}")))
    }

    /// Apply a `--set key.path=value` override.
    pub fn apply_override(&mut self, key: &str, raw: &str) -> Result<(), UsageError> {
        let mut root = serde_json::to_value(&*self)
            .map_err(|e| UsageError(format!("internal: {e}")))?;
        let parsed: serde_json::Value = serde_json::from_str(raw)
            .unwrap_or_else(|_| serde_json::Value::String(raw.to_string()));
        let mut cursor = &mut root;
        let parts: Vec<&str> = key.split('.').collect();
        for (i, part) in parts.iter().enumerate() {
            if i + 1 == parts.len() {
                match cursor {
                    serde_json::Value::Object(map) => {
                        map.insert((*part).to_string(), parsed.clone());
                    }
                    _ => return Err(UsageError(format!("cannot set '{key}'"))),
                }
            } else {
                let next = match cursor {
                    serde_json::Value::Object(map) => map
                        .entry((*part).to_string())
                        .or_insert_with(|| serde_json::Value::Object(Default::default())),
                    _ => return Err(UsageError(format!("cannot descend into '{part}'"))),
                };
                cursor = next;
            }
        }
        *self = serde_json::from_value(root)
            .map_err(|e| UsageError(format!("override '{key}={raw}' is invalid: {e}")))?;
        Ok(())
    }

    /// Beta component names for the configured problem.
    pub fn beta_names(&self) -> Vec<&'static str> {
        match self.problem {
            ProblemKind::NlsGenus0 | ProblemKind::NlsGenus2 => vec!["mu", "x", "t"],
            ProblemKind::AppendixToy => vec!["mu"],
            ProblemKind::Synthetic => vec![],
        }
    }

    /// Resolve the beta vector from the `parameters` map.
    pub fn beta(&self) -> Result<Vec<f64>, UsageError> {
        let mut beta = Vec::new();
        for name in self.beta_names() {
            let v = self
                .parameters
                .get(name)
                .and_then(|v| v.as_f64())
                .ok_or_else(|| UsageError(format!("missing numeric parameter '{name}'")))?;
            beta.push(v);
        }
        Ok(beta)
    }

    pub fn sweep_component_index(&self) -> Result<usize, UsageError> {
        let sweep = self
            .sweep
            .as_ref()
            .ok_or_else(|| UsageError("this command needs a sweep".into()))?;
        if sweep.steps < 1 {
            return Err(UsageError("sweep.steps must be >= 1".into()));
        }
        self.beta_names()
            .iter()
            .position(|n| *n == sweep.component)
            .ok_or_else(|| {
                UsageError(format!(
                    "sweep component '{}' is not one of {:?}",
                    sweep.component,
                    self.beta_names()
                ))
            })
    }

    pub fn initial_alphas_complex(&self) -> Option<Vec<Complex64>> {
        self.initial_alphas
            .as_ref()
            .map(|v| v.iter().map(|&[re, im]| Complex64::new(re, im)).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_minimal_config() {
        let cfg = RunConfig::from_json_str(
            r#"{"problem": "nls-genus0", "parameters": {"mu": 2.2, "x": 1.0, "t": 0.0}}"#,
        )
        .unwrap();
        assert_eq!(cfg.problem, ProblemKind::NlsGenus0);
        assert_eq!(cfg.beta().unwrap(), vec![2.2, 1.0, 0.0]);
        assert_eq!(cfg.loop_offset_factor, 0.3);
    }

    #[test]
    fn record_replay_extracts_embedded_config() {
        let record = r#"{"tool": {"name": "gfunc"}, "config": {"problem": "nls-genus0",
            "parameters": {"mu": 2.0, "x": 0.5, "t": 0.1}}}"#;
        let cfg = RunConfig::from_json_str(record).unwrap();
        assert_eq!(cfg.beta().unwrap(), vec![2.0, 0.5, 0.1]);
    }

    #[test]
    fn overrides_update_nested_fields() {
        let mut cfg = RunConfig::default();
        cfg.apply_override("parameters.mu", "2.5").unwrap();
        cfg.apply_override("newton.max_iters", "12").unwrap();
        cfg.apply_override("sweep.component", "mu").unwrap();
        cfg.apply_override("sweep.from", "2.2").unwrap();
        cfg.apply_override("sweep.to", "1.8").unwrap();
        cfg.apply_override("sweep.steps", "10").unwrap();
        assert_eq!(cfg.beta().unwrap()[0], 2.5);
        assert_eq!(cfg.newton.max_iters, 12);
        assert_eq!(cfg.sweep_component_index().unwrap(), 0);
    }

    #[test]
    fn bad_sweep_component_is_usage_error() {
        let mut cfg = RunConfig::default();
        cfg.sweep = Some(SweepConfig {
            component: "q".into(),
            from: 0.0,
            to: 1.0,
            steps: 5,
        });
        assert!(cfg.sweep_component_index().is_err());
    }

    #[test]
    fn malformed_config_is_usage_error() {
        assert!(RunConfig::from_json_str("{not json").is_err());
        assert!(RunConfig::from_json_str(r#"{"problem": "unknown-kind"}"#).is_err());
    }
}
