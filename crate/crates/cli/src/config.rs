//! Experiment configuration files.
//!
//! A config is a TOML file with a master seed and sections for the
//! geometry, the step distribution, the `μ_k` family and the estimator
//! settings. Every default is filled in during validation, so the resolved
//! [`Config`] written into a report describes the run completely.

use std::fmt;
use std::path::{Path, PathBuf};

use hypwalk::space::{Mat2, Word};
use hypwalk::{FiniteMeasure, MuKFamily, SpaceModel};
use serde::{Deserialize, Serialize};

use crate::catalog::ExperimentId;

/// A config problem, located by line when possible.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub source_name: String,
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(l) => write!(f, "{}:{}: {}", self.source_name, l, self.message),
            None => write!(f, "{}: {}", self.source_name, self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BackendKind {
    FreeGroup,
    Fuchsian,
}

/// A generator of a Fuchsian backend.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum GeneratorSpec {
    /// Hyperbolic element with axis the geodesic from −1 to 1.
    Boost(f64),
    /// `z ↦ e^{2t} z`.
    Dilation(f64),
    /// Entries `[a, b, c, d]`, determinant 1.
    Matrix([f64; 4]),
}

impl GeneratorSpec {
    fn to_matrix(self) -> hypwalk::Result<Mat2> {
        match self {
            GeneratorSpec::Boost(t) => Ok(Mat2::boost(t)),
            GeneratorSpec::Dilation(t) => Ok(Mat2::dilation(t)),
            GeneratorSpec::Matrix([a, b, c, d]) => Mat2::new(a, b, c, d),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BackendConfig {
    pub kind: BackendKind,
    #[serde(default)]
    pub rank: Option<u16>,
    #[serde(default)]
    pub generators: Vec<GeneratorSpec>,
    #[serde(default = "default_visual_base")]
    pub visual_base: f64,
}

fn default_visual_base() -> f64 {
    std::f64::consts::E
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeasureKind {
    SimpleRandomWalk,
    Atoms,
}

/// One atom: a word over the generator letters (`a, b, …`, inverses
/// upper case) and its mass.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomConfig {
    pub word: String,
    pub mass: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureConfig {
    pub kind: MeasureKind,
    #[serde(default)]
    pub atoms: Vec<AtomConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MuKConfig {
    pub gamma0: String,
    pub k_grid: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WalkSection {
    pub steps: usize,
    pub trajectories: usize,
    /// Recording stride for exported trajectories.
    pub stride: usize,
}

impl Default for WalkSection {
    fn default() -> Self {
        WalkSection { steps: 1000, trajectories: 1000, stride: 100 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BoundarySection {
    pub samples: usize,
    /// Truncation depth; 0 selects `max(200, ⌈40/l̂⌉)` from the escape rate.
    pub steps: usize,
    pub depth_cap: usize,
    pub resolution_floor: f64,
}

impl Default for BoundarySection {
    fn default() -> Self {
        BoundarySection { samples: 100_000, steps: 0, depth_cap: 64, resolution_floor: 8.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EntropySection {
    /// Table length for exact tree sequences.
    pub n_table: usize,
    /// Convolution power budget for the certified bound.
    pub max_n: usize,
    pub support_cap: usize,
}

impl Default for EntropySection {
    fn default() -> Self {
        EntropySection { n_table: 60, max_n: 10, support_cap: 200_000 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DimensionSection {
    pub max_centers: usize,
    pub min_ball_count: f64,
    pub min_radii: usize,
    pub max_failed_fraction: f64,
}

impl Default for DimensionSection {
    fn default() -> Self {
        DimensionSection { max_centers: 2000, min_ball_count: 30.0, min_radii: 5, max_failed_fraction: 0.2 }
    }
}

/// Settings of the `μ_k` sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepSection {
    pub steps: usize,
    pub trajectories: usize,
    pub boundary_samples: usize,
    pub boundary_steps: usize,
    pub entropy_max_n: usize,
    pub support_cap: usize,
    /// Depth of the cylinders around `g·γ^±` in the atom diagnostic.
    pub atom_depth: usize,
    /// Largest cover depth checked exhaustively.
    pub cover_max_depth: usize,
}

impl Default for SweepSection {
    fn default() -> Self {
        SweepSection {
            steps: 1000,
            trajectories: 1000,
            boundary_samples: 2000,
            boundary_steps: 200,
            entropy_max_n: 8,
            support_cap: 200_000,
            atom_depth: 5,
            cover_max_depth: 12,
        }
    }
}

/// Acceptance tolerances.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Thresholds {
    /// Per-center RMS residual of pointwise scaling windows.
    pub pointwise_max_residual: f64,
    /// Correlation-dimension window residual.
    pub correlation_max_residual: f64,
    /// `|l̂ − l|` against a closed form.
    pub escape_abs_tol: f64,
    /// Relative error of the entropy limit against a closed form.
    pub entropy_rel_tol: f64,
    /// Relative error of dimension estimates against `h/l` on trees.
    pub dimension_rel_tol: f64,
    /// Relative disagreement allowed between the two dimension estimators.
    pub estimator_agreement_rel_tol: f64,
    /// Samples needed before estimator agreement is asserted.
    pub agreement_min_samples: usize,
    /// Standard errors allowed in the dimension bound.
    pub bound_sigmas: f64,
    /// Joint standard errors allowed between Busemann and Monte Carlo rates.
    pub busemann_joint_se: f64,
    /// Target for `h_bound / l̂` at the largest `k`.
    pub ratio_target: f64,
    pub escape_fit_min_r2: f64,
    /// Ceiling for the dimension of `ν̂_k` at the largest `k`.
    pub collapse_max_dimension: f64,
    /// Required factor between the boundary dimension and `dim ν̂_k`.
    pub collapse_factor: f64,
    /// Significance level of trend tests.
    pub trend_alpha: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            pointwise_max_residual: 0.05,
            correlation_max_residual: 0.05,
            escape_abs_tol: 0.015,
            entropy_rel_tol: 0.02,
            dimension_rel_tol: 0.10,
            estimator_agreement_rel_tol: 0.15,
            agreement_min_samples: 100_000,
            bound_sigmas: 3.0,
            busemann_joint_se: 2.0,
            ratio_target: 0.15,
            escape_fit_min_r2: 0.99,
            collapse_max_dimension: 0.3,
            collapse_factor: 3.0,
            trend_alpha: 0.05,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    experiment: String,
    seed: u64,
    #[serde(default)]
    output: Option<PathBuf>,
    backend: BackendConfig,
    measure: MeasureConfig,
    #[serde(default)]
    mu_k: Option<MuKConfig>,
    #[serde(default)]
    walk: WalkSection,
    #[serde(default)]
    boundary: BoundarySection,
    #[serde(default)]
    entropy: EntropySection,
    #[serde(default)]
    dimension: DimensionSection,
    #[serde(default)]
    sweep: SweepSection,
    #[serde(default)]
    thresholds: Thresholds,
}

/// A validated config with every default filled in.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Config {
    /// Label of the config, the file stem for files.
    pub name: String,
    pub experiment: ExperimentId,
    pub seed: u64,
    pub output: Option<PathBuf>,
    pub backend: BackendConfig,
    pub measure: MeasureConfig,
    pub mu_k: Option<MuKConfig>,
    pub walk: WalkSection,
    pub boundary: BoundarySection,
    pub entropy: EntropySection,
    pub dimension: DimensionSection,
    pub sweep: SweepSection,
    pub thresholds: Thresholds,
}

impl Config {
    pub fn from_path(path: &Path) -> Result<Config, ConfigError> {
        let name = path.file_stem().map_or("config".into(), |s| s.to_string_lossy().into_owned());
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError {
            source_name: path.display().to_string(),
            line: None,
            message: format!("cannot read: {e}"),
        })?;
        Config::parse(&name, &path.display().to_string(), &text)
    }

    /// Parses and validates `text`; `source_name` labels error messages.
    pub fn parse(name: &str, source_name: &str, text: &str) -> Result<Config, ConfigError> {
        let err = |line: Option<usize>, message: String| ConfigError { source_name: source_name.into(), line, message };
        let raw: RawConfig = toml::from_str(text).map_err(|e| {
            let line = e.span().map(|s| line_of_offset(text, s.start));
            err(line, e.message().trim().to_string())
        })?;
        let experiment: ExperimentId = raw
            .experiment
            .parse()
            .map_err(|m: String| err(find_key(text, None, "experiment"), m))?;
        let cfg = Config {
            name: name.to_string(),
            experiment,
            seed: raw.seed,
            output: raw.output,
            backend: raw.backend,
            measure: raw.measure,
            mu_k: raw.mu_k,
            walk: raw.walk,
            boundary: raw.boundary,
            entropy: raw.entropy,
            dimension: raw.dimension,
            sweep: raw.sweep,
            thresholds: raw.thresholds,
        };
        cfg.validate().map_err(|(section, key, message)| err(find_key(text, section, key), message))?;
        Ok(cfg)
    }

    /// Checks every cross-field invariant by building the objects.
    fn validate(&self) -> Result<(), (Option<&'static str>, &'static str, String)> {
        let model = self.model().map_err(|e| (Some("backend"), "kind", e))?;
        self.measure_on(&model).map_err(|e| (Some("measure"), "atoms", e))?;
        if let Some(mk) = &self.mu_k {
            if mk.k_grid.is_empty() || mk.k_grid.windows(2).any(|w| w[1] <= w[0]) {
                return Err((Some("mu_k"), "k_grid", "k_grid must be nonempty and strictly increasing".into()));
            }
            self.family(&model).map_err(|e| (Some("mu_k"), "gamma0", e))?;
        }
        let positive = [
            ("walk", "steps", self.walk.steps),
            ("walk", "trajectories", self.walk.trajectories),
            ("walk", "stride", self.walk.stride),
            ("boundary", "samples", self.boundary.samples),
            ("boundary", "depth_cap", self.boundary.depth_cap),
            ("entropy", "n_table", self.entropy.n_table),
            ("entropy", "max_n", self.entropy.max_n),
            ("sweep", "steps", self.sweep.steps),
            ("sweep", "trajectories", self.sweep.trajectories),
            ("sweep", "boundary_samples", self.sweep.boundary_samples),
            ("sweep", "boundary_steps", self.sweep.boundary_steps),
            ("sweep", "cover_max_depth", self.sweep.cover_max_depth),
        ];
        for (section, key, v) in positive {
            if v == 0 {
                return Err((Some(section), key, format!("{section}.{key} must be >= 1")));
            }
        }
        hypwalk::walker::WalkConfig::new(self.walk.steps, self.walk.trajectories, self.seed)
            .validate(&model)
            .map_err(|e| (Some("walk"), "steps", e.to_string()))?;
        let t = &self.thresholds;
        for (key, v) in [
            ("pointwise_max_residual", t.pointwise_max_residual),
            ("correlation_max_residual", t.correlation_max_residual),
            ("escape_abs_tol", t.escape_abs_tol),
            ("entropy_rel_tol", t.entropy_rel_tol),
            ("dimension_rel_tol", t.dimension_rel_tol),
            ("estimator_agreement_rel_tol", t.estimator_agreement_rel_tol),
            ("ratio_target", t.ratio_target),
            ("collapse_max_dimension", t.collapse_max_dimension),
            ("collapse_factor", t.collapse_factor),
            ("trend_alpha", t.trend_alpha),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err((Some("thresholds"), key, format!("thresholds.{key} must be positive, got {v}")));
            }
        }
        Ok(())
    }

    pub fn model(&self) -> Result<SpaceModel, String> {
        let b = &self.backend;
        let model = match b.kind {
            BackendKind::FreeGroup => {
                if !b.generators.is_empty() {
                    return Err("free_group backends take `rank`, not `generators`".into());
                }
                let rank = b.rank.ok_or("free_group backend needs `rank`")?;
                SpaceModel::free_group(rank).map_err(|e| e.to_string())?
            }
            BackendKind::Fuchsian => {
                if b.rank.is_some() {
                    return Err("fuchsian backends take `generators`, not `rank`".into());
                }
                if b.generators.is_empty() {
                    return Err("fuchsian backend needs at least one generator".into());
                }
                let mats = b
                    .generators
                    .iter()
                    .map(|g| g.to_matrix())
                    .collect::<hypwalk::Result<Vec<_>>>()
                    .map_err(|e| e.to_string())?;
                SpaceModel::fuchsian(mats).map_err(|e| e.to_string())?
            }
        };
        model.with_visual_base(b.visual_base).map_err(|e| e.to_string())
    }

    pub fn measure_on(&self, model: &SpaceModel) -> Result<FiniteMeasure, String> {
        match self.measure.kind {
            MeasureKind::SimpleRandomWalk => {
                if !self.measure.atoms.is_empty() {
                    return Err("simple_random_walk takes no atoms".into());
                }
                Ok(FiniteMeasure::simple_random_walk(model))
            }
            MeasureKind::Atoms => {
                if self.measure.atoms.is_empty() {
                    return Err("kind = \"atoms\" needs a nonempty atoms list".into());
                }
                let atoms = self
                    .measure
                    .atoms
                    .iter()
                    .map(|a| {
                        Word::parse(&a.word).map_err(|e| format!("atom {:?}: {e}", a.word))?;
                        let g = model.element_from_word(&a.word).map_err(|e| format!("atom {:?}: {e}", a.word))?;
                        Ok((g, a.mass))
                    })
                    .collect::<Result<Vec<_>, String>>()?;
                FiniteMeasure::new(atoms).map_err(|e| e.to_string())
            }
        }
    }

    pub fn family(&self, model: &SpaceModel) -> Result<MuKFamily, String> {
        let mk = self.mu_k.as_ref().ok_or("experiment needs a [mu_k] section")?;
        let gamma0 = model.element_from_word(&mk.gamma0).map_err(|e| e.to_string())?;
        let base = self.measure_on(model)?;
        MuKFamily::new(base, gamma0, model).map_err(|e| e.to_string())
    }
}

fn line_of_offset(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

/// Line of `key = …` inside `[section]` (top level when `None`), or of
/// the section header when the key is absent.
fn find_key(text: &str, section: Option<&str>, key: &str) -> Option<usize> {
    let mut current: Option<String> = None;
    let mut header_line = None;
    for (i, line) in text.lines().enumerate() {
        let t = line.trim();
        if let Some(h) = t.strip_prefix('[').and_then(|r| r.strip_suffix(']')) {
            current = Some(h.trim().to_string());
            if section == Some(h.trim()) {
                header_line = Some(i + 1);
            }
            continue;
        }
        if current.as_deref() == section {
            if let Some(rest) = t.strip_prefix(key) {
                if rest.trim_start().starts_with('=') {
                    return Some(i + 1);
                }
            }
        }
    }
    header_line
}
