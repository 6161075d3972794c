//! Run configuration: a JSON document with a common header and one experiment block.

use std::fmt;
use std::path::{Path, PathBuf};

use magpl_core::field::{Geometry, Grid, MagneticPreset, NonlinearitySpec, PotentialSpec, ProblemParams};
use magpl_core::ineq::sweep::Check;
use magpl_core::instanton::critical_exponent;
use magpl_core::mountain_pass::{LambdaPolicy, SolverOptions, C_SMALL};
use magpl_core::quadrature::QuadLevel;
use magpl_core::rates::default_epsilons;
use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema_version: u32,
    pub seed: u64,
    /// Output root; `--out` and `MAGPL_OUT` take precedence.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    pub experiment: Experiment,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Experiment {
    IneqSweep(IneqSweepConfig),
    InstantonRates(RatesConfig),
    Certify(CertifyConfig),
    Solve(SolveConfig),
    Geometry(GeometryConfig),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    IneqSweep,
    InstantonRates,
    Certify,
    Solve,
    Geometry,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::IneqSweep => "ineq-sweep",
            ExperimentKind::InstantonRates => "instanton-rates",
            ExperimentKind::Certify => "certify",
            ExperimentKind::Solve => "solve",
            ExperimentKind::Geometry => "geometry",
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl Experiment {
    pub fn kind(&self) -> ExperimentKind {
        match self {
            Experiment::IneqSweep(_) => ExperimentKind::IneqSweep,
            Experiment::InstantonRates(_) => ExperimentKind::InstantonRates,
            Experiment::Certify(_) => ExperimentKind::Certify,
            Experiment::Solve(_) => ExperimentKind::Solve,
            Experiment::Geometry(_) => ExperimentKind::Geometry,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IneqSweepConfig {
    pub checks: Vec<Check>,
    pub exponents: Vec<f64>,
    pub trials: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RatesConfig {
    pub p: f64,
    pub n_math: usize,
    #[serde(default = "default_epsilons")]
    pub epsilons: Vec<f64>,
    #[serde(default = "one")]
    pub delta_psi: f64,
    /// Defaults to `p`, `(p + p*)/2` and the borderline exponent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q_values: Option<Vec<f64>>,
    #[serde(default)]
    pub level: QuadLevel,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub geometry: Geometry,
    pub half_width: f64,
    pub points: usize,
}

impl GridConfig {
    pub fn build(&self) -> magpl_core::Result<Grid> {
        Grid::new(self.geometry, self.half_width, self.points)
    }
}

/// Shared description of a discretised problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub params: ProblemParams,
    pub grid: GridConfig,
    pub potentials: PotentialSpec,
    #[serde(default)]
    pub nonlinearity: NonlinearitySpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertifyConfig {
    pub model: ModelConfig,
    #[serde(default = "default_epsilons")]
    pub epsilons: Vec<f64>,
    pub delta_psi: f64,
    #[serde(default)]
    pub lambda_policy: LambdaPolicy,
    #[serde(default = "c_small")]
    pub c_small: f64,
    #[serde(default)]
    pub level: QuadLevel,
    /// Also run the `f = 0`, `K ≡ K_sup` ray at the smallest ε.
    #[serde(default = "yes")]
    pub pure_critical: bool,
}

/// `amplitude · exp(-|x - center|²/width²)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaussianGuess {
    pub amplitude: f64,
    pub width: f64,
    #[serde(default)]
    pub center: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolveConfig {
    pub model: ModelConfig,
    pub v0: GaussianGuess,
    #[serde(default)]
    pub solver: SolverOptions,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LogRange {
    pub first: f64,
    pub last: f64,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometryConfig {
    pub model: ModelConfig,
    pub v0: GaussianGuess,
    pub radii: Vec<f64>,
    pub t_grid: LogRange,
    pub directions: usize,
}

fn one() -> f64 {
    1.0
}

fn yes() -> bool {
    true
}

fn c_small() -> f64 {
    C_SMALL
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}:{line}:{column}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{path}: invalid configuration:\n  - {}", .violations.join("\n  - "))]
    Invalid { path: PathBuf, violations: Vec<String> },
}

pub fn parse_config(path: &Path) -> Result<RunConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.to_owned(),
        source,
    })?;
    let config = parse_str(&text).map_err(|e| ConfigError::Parse {
        path: path.to_owned(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let violations = config.violations();
    if violations.is_empty() {
        Ok(config)
    } else {
        Err(ConfigError::Invalid {
            path: path.to_owned(),
            violations,
        })
    }
}

pub fn parse_str(text: &str) -> serde_json::Result<RunConfig> {
    serde_json::from_str(text)
}

/// Pretty JSON with a trailing newline.
pub fn to_json(config: &RunConfig) -> String {
    let mut s = serde_json::to_string_pretty(config).expect("configs serialise");
    s.push('\n');
    s
}

fn finite_positive(name: &str, v: f64, out: &mut Vec<String>) {
    if !(v > 0.0 && v.is_finite()) {
        out.push(format!("{name} = {v} must be positive and finite"));
    }
}

fn epsilon_list(eps: &[f64], out: &mut Vec<String>) {
    if eps.iter().any(|&e| !(e > 0.0 && e < 1.0)) {
        out.push("every epsilon must lie in (0, 1)".into());
    }
}

impl ModelConfig {
    fn violations(&self, out: &mut Vec<String>) {
        let pp = &self.params;
        let params_ok = match pp.validate() {
            Ok(()) => true,
            Err(e) => {
                out.push(e.to_string());
                false
            }
        };
        match self.grid.build() {
            Ok(grid) => {
                if let Geometry::Radial { n_math } = grid.geometry() {
                    if n_math != pp.n_math {
                        out.push(format!(
                            "radial grid dimension {n_math} differs from params.n_math = {}",
                            pp.n_math
                        ));
                    }
                }
            }
            Err(e) => out.push(e.to_string()),
        }
        if params_ok {
            if let Err(e) = self.potentials.validate(pp) {
                out.push(e.to_string());
            }
        }
    }

    /// On a radial grid a constant `A` is pure gauge: `e^{-iA·x}u` turns it into `A = 0`.
    /// Returns the reduced model and whether a reduction happened.
    pub fn gauge_reduced(&self) -> (ModelConfig, bool) {
        let radial = matches!(self.grid.geometry, Geometry::Radial { .. });
        if radial && matches!(self.potentials.magnetic, MagneticPreset::Constant { .. }) {
            let mut m = self.clone();
            m.potentials.magnetic = MagneticPreset::Zero;
            (m, true)
        } else {
            (self.clone(), false)
        }
    }
}

impl RunConfig {
    /// Every problem found in the configuration, with hypothesis names where they apply.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.schema_version != SCHEMA_VERSION {
            out.push(format!(
                "schema_version {} is not supported (expected {SCHEMA_VERSION})",
                self.schema_version
            ));
        }
        match &self.experiment {
            Experiment::IneqSweep(c) => {
                if c.exponents.iter().any(|p| !p.is_finite()) {
                    out.push("exponents must be finite".into());
                }
            }
            Experiment::InstantonRates(c) => {
                if !(c.p > 1.0 && c.p < c.n_math as f64) {
                    out.push(format!("need 1 < p < N, got p = {}, N = {}", c.p, c.n_math));
                } else if let Some(qs) = &c.q_values {
                    let ps = critical_exponent(c.p, c.n_math);
                    if qs.iter().any(|&q| !(q >= 1.0 && q <= ps)) {
                        out.push(format!("q values must lie in [1, p*] = [1, {ps}]"));
                    }
                }
                epsilon_list(&c.epsilons, &mut out);
                finite_positive("delta_psi", c.delta_psi, &mut out);
            }
            Experiment::Certify(c) => {
                c.model.violations(&mut out);
                epsilon_list(&c.epsilons, &mut out);
                if c.epsilons.is_empty() {
                    out.push("certify needs at least one epsilon".into());
                }
                finite_positive("delta_psi", c.delta_psi, &mut out);
                finite_positive("c_small", c.c_small, &mut out);
            }
            Experiment::Solve(c) => {
                c.model.violations(&mut out);
                if matches!(c.model.grid.geometry, Geometry::Radial { .. }) {
                    out.push("the solver runs on Cartesian grids".into());
                }
                finite_positive("v0.width", c.v0.width, &mut out);
                if !(c.v0.amplitude != 0.0 && c.v0.amplitude.is_finite()) {
                    out.push("v0.amplitude must be nonzero and finite".into());
                }
            }
            Experiment::Geometry(c) => {
                c.model.violations(&mut out);
                finite_positive("v0.width", c.v0.width, &mut out);
                if c.radii.iter().any(|&r| !(r > 0.0 && r.is_finite())) {
                    out.push("sphere radii must be positive".into());
                }
                let t = c.t_grid;
                if !(t.first > 0.0 && t.last > t.first && t.count >= 2) {
                    out.push("t_grid needs 0 < first < last and count >= 2".into());
                }
            }
        }
        out
    }
}
