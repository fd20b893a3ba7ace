use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::capacity::BoundMode;
use crate::decomposition::{LearnerMode, DEFAULT_CASE_TOLERANCE};
use crate::dnf3::LogBase;
use crate::domain::{FiniteDistribution, Seed};
use crate::error::{LabError, Result};
use crate::hypotheses::{ClassDescriptor, Hypothesis, Predicate};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Tradeoff,
    Vc,
    Bounds,
    Dnf3Bench,
    Decompose,
}

/// Inline table or a uniform-marginal generator.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum DistributionSource {
    Inline(FiniteDistribution),
    UniformNoisy { target: Hypothesis, noise_rate: f64 },
    /// JSON file holding a distribution, relative to the config file.
    File(PathBuf),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundsConfig {
    /// VC dimension; computed from `class` when omitted.
    #[serde(default)]
    pub d: Option<usize>,
    pub m: u64,
    pub delta: f64,
    #[serde(default)]
    pub epsilon: Option<f64>,
    #[serde(default = "default_mode")]
    pub mode: String,
    #[serde(default = "default_constant")]
    pub constant: f64,
}

fn default_mode() -> String {
    "paper".into()
}

fn default_constant() -> f64 {
    BoundMode::DEFAULT_CONSTANT
}

impl BoundsConfig {
    pub fn bound_mode(&self) -> Result<BoundMode> {
        parse_bound_mode(&self.mode, self.constant)
    }
}

pub fn parse_bound_mode(mode: &str, constant: f64) -> Result<BoundMode> {
    match mode {
        "paper" => Ok(BoundMode::Paper { constant }),
        "classical" => Ok(BoundMode::Classical),
        other => Err(LabError::Config { field: "mode".into(), message: format!("unknown bound mode `{other}`") }),
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchConfig {
    pub n_values: Vec<usize>,
    #[serde(default = "default_bench_m")]
    pub m: usize,
    #[serde(default = "default_reps")]
    pub repetitions: usize,
    #[serde(default)]
    pub exhaustive_cap: Option<u64>,
    #[serde(default)]
    pub epsilon: Option<f64>,
    #[serde(default)]
    pub delta: Option<f64>,
    #[serde(default)]
    pub log_base: LogBase,
}

fn default_bench_m() -> usize {
    100
}

fn default_reps() -> usize {
    3
}

fn default_trials() -> usize {
    200
}

fn default_output() -> PathBuf {
    PathBuf::from("out")
}

fn default_tolerance() -> f64 {
    DEFAULT_CASE_TOLERANCE
}

fn default_learner() -> LearnerMode {
    LearnerMode::Exhaustive
}

/// One experiment run, read from a JSON file.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    #[serde(default)]
    pub class: Option<ClassDescriptor>,
    /// Defines `H_I` as the restriction of `class`.
    #[serde(default)]
    pub interpretable: Option<Predicate>,
    #[serde(default)]
    pub distribution: Option<DistributionSource>,
    #[serde(default)]
    pub m: Option<usize>,
    /// Extra sample sizes for a risk-versus-m sweep.
    #[serde(default)]
    pub m_values: Vec<usize>,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub base_seed: u64,
    #[serde(default = "default_learner")]
    pub learner: LearnerMode,
    /// Relative to the config file.
    #[serde(default = "default_output")]
    pub output_dir: PathBuf,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    #[serde(default)]
    pub enum_cap: Option<u64>,
    #[serde(default)]
    pub vc_size_cap: Option<usize>,
    #[serde(default)]
    pub bounds: Option<BoundsConfig>,
    #[serde(default)]
    pub bench: Option<BenchConfig>,
}

fn invalid(field: &str, message: impl Into<String>) -> LabError {
    LabError::Config { field: field.into(), message: message.into() }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(text).map_err(|e| invalid("<config>", e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn seed(&self) -> Seed {
        Seed(self.base_seed)
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials < 1 {
            return Err(invalid("trials", "must be at least 1"));
        }
        if self.tolerance.is_nan() || self.tolerance < 0.0 {
            return Err(invalid("tolerance", "must be non-negative"));
        }
        if let Some(DistributionSource::UniformNoisy { noise_rate, .. }) = &self.distribution {
            if !(0.0..0.5).contains(noise_rate) {
                return Err(invalid("distribution.uniform_noisy.noise_rate", format!("noise_rate {noise_rate} is outside [0, 0.5)")));
            }
        }
        let needs = |field: &str, present: bool| if present { Ok(()) } else { Err(invalid(field, "required for this experiment")) };
        match self.experiment {
            ExperimentKind::Tradeoff => {
                needs("class", self.class.is_some())?;
                needs("interpretable", self.interpretable.is_some())?;
                needs("distribution", self.distribution.is_some())?;
                needs("m", self.m.is_some())?;
                if self.trials < 2 {
                    return Err(invalid("trials", "tradeoff experiments need at least 2 trials"));
                }
            }
            ExperimentKind::Decompose => {
                needs("class", self.class.is_some())?;
                needs("distribution", self.distribution.is_some())?;
                needs("m", self.m.is_some())?;
            }
            ExperimentKind::Vc => needs("class", self.class.is_some())?,
            ExperimentKind::Bounds => {
                needs("bounds", self.bounds.is_some())?;
                let b = self.bounds.as_ref().expect("checked");
                b.bound_mode()?;
                needs("bounds.d", b.d.is_some() || self.class.is_some())?;
            }
            ExperimentKind::Dnf3Bench => {
                needs("bench", self.bench.is_some())?;
                if self.bench.as_ref().is_some_and(|b| b.n_values.is_empty()) {
                    return Err(invalid("bench.n_values", "must not be empty"));
                }
            }
        }
        if matches!(self.m, Some(0)) || self.m_values.contains(&0) {
            return Err(invalid("m", "sample sizes must be positive"));
        }
        Ok(())
    }

    pub fn distribution(&self, base_dir: &Path) -> Result<FiniteDistribution> {
        let n = self.class.as_ref().map(|c| c.n);
        let dist = match self.distribution.as_ref().ok_or_else(|| invalid("distribution", "missing"))? {
            DistributionSource::Inline(d) => d.clone(),
            DistributionSource::UniformNoisy { target, noise_rate } => {
                let tn = target.dimension().or(n).ok_or_else(|| invalid("distribution.uniform_noisy.target", "dimension unknown"))?;
                FiniteDistribution::uniform_noisy(tn, target, *noise_rate).map_err(|e| invalid("distribution.uniform_noisy", e.to_string()))?
            }
            DistributionSource::File(p) => {
                let path = base_dir.join(p);
                let text = std::fs::read_to_string(&path).map_err(|e| invalid("distribution.file", format!("{}: {e}", path.display())))?;
                serde_json::from_str(&text).map_err(|e| invalid("distribution.file", e.to_string()))?
            }
        };
        if let Some(n) = n {
            if dist.n() != n {
                return Err(invalid("distribution", format!("dimension {} does not match class dimension {n}", dist.n())));
            }
        }
        Ok(dist)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TRADEOFF: &str = r#"{
        "experiment": "tradeoff",
        "class": {"family": "conjunctions", "n": 3},
        "interpretable": {"kind": "max_literals", "k": 1},
        "distribution": {"uniform_noisy": {"target": {"kind": "conjunction", "n": 3, "positive": [1, 2], "negated": []}, "noise_rate": 0.1}},
        "m": 50,
        "trials": 10,
        "base_seed": 7
    }"#;

    #[test]
    fn parses_tradeoff() {
        let cfg = ExperimentConfig::from_json(TRADEOFF).unwrap();
        assert_eq!(cfg.experiment, ExperimentKind::Tradeoff);
        assert_eq!(cfg.learner, LearnerMode::Exhaustive);
        let d = cfg.distribution(Path::new(".")).unwrap();
        assert_eq!(d.n(), 3);
    }

    #[test]
    fn rejects_noise_rate() {
        let bad = TRADEOFF.replace("0.1}", "0.7}");
        let err = ExperimentConfig::from_json(&bad).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("noise_rate"));
    }

    #[test]
    fn missing_fields_name_the_field() {
        let err = ExperimentConfig::from_json(r#"{"experiment": "tradeoff"}"#).unwrap_err();
        assert!(err.to_string().contains("class"));
        let err = ExperimentConfig::from_json(r#"{"experiment": "nope"}"#).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }
}
