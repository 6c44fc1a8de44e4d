//! Experiment configuration files.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};

use oltr_core::clicks::{ClickModelKind, ClickModelParams};
use oltr_core::engine::{EngineConfig, DEFAULT_RECORD_EVERY};
use oltr_core::evaluation::{DEFAULT_CUTOFF, DEFAULT_DISCOUNT};
use oltr_core::letor::{SplitRatio, SyntheticSpec};
use oltr_core::multileaving::Comparison;
use oltr_core::ranking::SelectionMethod;
use oltr_core::EngineConfig64;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

pub const DEFAULT_IMPRESSIONS: usize = 10_000;
pub const DEFAULT_REPEATS: usize = 125;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    Mgd,
    SimMgd,
    Cmgd,
}

impl Algorithm {
    pub fn as_str(self) -> &'static str {
        match self {
            Algorithm::Mgd => "mgd",
            Algorithm::SimMgd => "sim_mgd",
            Algorithm::Cmgd => "cmgd",
        }
    }
}

/// Where queries come from. A path is either a single LETOR file or a
/// directory with `Fold1..FoldK`; relative paths resolve against the config
/// file's directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum DatasetSource {
    Path(PathBuf),
    Synthetic(SyntheticSpec),
}

/// Engine parameters shared by every condition. The convergence window and
/// threshold live on the conditions because C-MGD requires them explicitly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EngineSection {
    pub candidates: usize,
    pub radius: f64,
    pub step_size: f64,
    pub cutoff: usize,
    pub discount: f64,
    pub comparison: Comparison,
}

impl Default for EngineSection {
    fn default() -> Self {
        let d = EngineConfig64::default();
        EngineSection {
            candidates: d.candidates,
            radius: d.radius,
            step_size: d.step_size,
            cutoff: DEFAULT_CUTOFF,
            discount: DEFAULT_DISCOUNT,
            comparison: d.comparison,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Condition {
    pub name: String,
    pub algorithm: Algorithm,
    pub click_model: ClickModelKind,
    /// Per-grade replacements for the named model's click probabilities.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub click_overrides: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub stop_overrides: BTreeMap<String, f64>,
    /// Number of reference documents (M) sampled per run.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub num_references: Option<usize>,
    #[serde(default = "default_selection")]
    pub selection: SelectionMethod,
    /// Explicit reference vectors, used instead of sampling.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fixed_references: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub history_window: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
}

fn default_selection() -> SelectionMethod {
    SelectionMethod::Uniform
}

impl Condition {
    pub fn click_params(&self) -> CliResult<ClickModelParams> {
        let base =
            ClickModelParams::of_kind(self.click_model).map_err(|e| CliError::invalid(&self.key("click_model"), e))?;
        ClickModelParams::with_overrides(&base, &self.click_overrides, &self.stop_overrides)
            .map_err(|e| CliError::invalid(&self.key("click_overrides"), e))
    }

    pub fn engine_config(&self, engine: &EngineSection, record_every: usize) -> EngineConfig64 {
        let defaults = EngineConfig64::default();
        EngineConfig {
            candidates: engine.candidates,
            radius: engine.radius,
            step_size: engine.step_size,
            cutoff: engine.cutoff,
            history_window: self.history_window.unwrap_or(defaults.history_window),
            epsilon: self.epsilon.unwrap_or(defaults.epsilon),
            discount: engine.discount,
            comparison: engine.comparison,
            record_every,
        }
    }

    fn key(&self, field: &str) -> String {
        format!("conditions[{}].{field}", self.name)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dir: Option<PathBuf>,
    /// Also write each run's final model as JSON.
    #[serde(default)]
    pub dump_models: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub dataset: DatasetSource,
    /// Split for a single-file dataset; ignored for fold directories.
    #[serde(default)]
    pub split: SplitRatio,
    /// Min-max normalize features per query after loading.
    #[serde(default = "default_true")]
    pub normalize: bool,
    #[serde(default)]
    pub engine: EngineSection,
    pub conditions: Vec<Condition>,
    /// Condition the others are tested against.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub baseline: Option<String>,
    #[serde(default = "default_impressions")]
    pub impressions: usize,
    #[serde(default = "default_repeats")]
    pub repeats: usize,
    #[serde(default)]
    pub base_seed: u64,
    #[serde(default = "default_record_every")]
    pub record_every: usize,
    #[serde(default)]
    pub output: OutputSection,
}

fn default_true() -> bool {
    true
}

fn default_impressions() -> usize {
    DEFAULT_IMPRESSIONS
}

fn default_repeats() -> usize {
    DEFAULT_REPEATS
}

fn default_record_every() -> usize {
    DEFAULT_RECORD_EVERY
}

impl ExperimentConfig {
    /// Checks every field and names the offending key on failure.
    pub fn validate(&self) -> CliResult<()> {
        if self.repeats == 0 {
            return Err(CliError::invalid("repeats", "must be at least 1"));
        }
        if self.impressions == 0 {
            return Err(CliError::invalid("impressions", "must be at least 1"));
        }
        if self.record_every == 0 {
            return Err(CliError::invalid("record_every", "must be at least 1"));
        }
        match &self.dataset {
            DatasetSource::Path(p) if !p.exists() => {
                return Err(CliError::invalid(
                    "dataset.path",
                    format!("{} does not exist", p.display()),
                ));
            }
            DatasetSource::Synthetic(spec) => spec.validate().map_err(|e| CliError::invalid("dataset.synthetic", e))?,
            _ => {}
        }
        if self.conditions.is_empty() {
            return Err(CliError::invalid("conditions", "at least one condition is required"));
        }
        let mut names = BTreeSet::new();
        for c in &self.conditions {
            if c.name.is_empty() || c.name.contains(|ch: char| ch == '/' || ch == ',' || ch.is_whitespace()) {
                return Err(CliError::invalid(
                    "conditions.name",
                    format!("{:?} must be non-empty without '/', ',' or whitespace", c.name),
                ));
            }
            if !names.insert(c.name.as_str()) {
                return Err(CliError::invalid(
                    "conditions.name",
                    format!("duplicate condition {:?}", c.name),
                ));
            }
            self.validate_condition(c)?;
        }
        if let Some(b) = &self.baseline {
            if !names.contains(b.as_str()) {
                return Err(CliError::invalid("baseline", format!("no condition named {b:?}")));
            }
        }
        Ok(())
    }

    fn validate_condition(&self, c: &Condition) -> CliResult<()> {
        if c.algorithm == Algorithm::Cmgd {
            if c.history_window.is_none() {
                return Err(CliError::invalid(
                    &c.key("history_window"),
                    "required when algorithm is cmgd",
                ));
            }
            if c.epsilon.is_none() {
                return Err(CliError::invalid(&c.key("epsilon"), "required when algorithm is cmgd"));
            }
        }
        match (c.algorithm, c.num_references, &c.fixed_references) {
            (Algorithm::Mgd, None, None) => {}
            (Algorithm::Mgd, _, _) => {
                return Err(CliError::invalid(
                    &c.key("num_references"),
                    "references only apply to sim_mgd and cmgd",
                ));
            }
            (_, Some(_), Some(_)) => {
                return Err(CliError::invalid(
                    &c.key("fixed_references"),
                    "give either num_references or fixed_references, not both",
                ));
            }
            (_, None, None) => {
                return Err(CliError::invalid(
                    &c.key("num_references"),
                    "required for sim_mgd and cmgd",
                ));
            }
            (_, Some(0), None) => return Err(CliError::invalid(&c.key("num_references"), "must be at least 1")),
            _ => {}
        }
        c.click_params()?;
        let engine = c.engine_config(&self.engine, self.record_every);
        engine.validate().map_err(|e| {
            let key = match engine_field_of(&e.to_string()) {
                Some(f @ ("history_window" | "epsilon")) => c.key(f),
                Some(f) => format!("engine.{f}"),
                None => "engine".to_string(),
            };
            CliError::invalid(&key, e)
        })
    }

    /// Makes a relative dataset path absolute against `base`.
    pub fn resolve_paths(&mut self, base: &Path) {
        if let DatasetSource::Path(p) = &mut self.dataset {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        if let Some(dir) = &mut self.output.dir {
            if dir.is_relative() {
                *dir = base.join(&*dir);
            }
        }
    }
}

fn engine_field_of(message: &str) -> Option<&'static str> {
    [
        ("candidates", "candidates"),
        ("radius", "radius"),
        ("step_size", "step_size"),
        ("cutoff", "cutoff"),
        ("history_window", "history_window"),
        ("epsilon", "epsilon"),
        ("discount", "discount"),
        ("samples", "comparison.samples"),
        ("tau", "comparison.tau"),
    ]
    .into_iter()
    .find(|(needle, _)| message.contains(needle))
    .map(|(_, key)| key)
}

/// Reads, resolves and validates a config file.
pub fn load_config(path: &Path) -> CliResult<ExperimentConfig> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let mut cfg: ExperimentConfig =
        serde_json::from_str(&text).map_err(|e| CliError::invalid("config", format!("{}: {e}", path.display())))?;
    cfg.resolve_paths(path.parent().unwrap_or(Path::new(".")));
    cfg.validate()?;
    Ok(cfg)
}

pub fn save_config(cfg: &ExperimentConfig, path: &Path) -> CliResult<()> {
    let text = serde_json::to_string_pretty(cfg).expect("configs always serialize");
    fs::write(path, text + "\n").map_err(|e| CliError::io(path, e))
}
