//! Batch runner behind the `ermlab` binary: config-driven experiments,
//! artifacts with a manifest, built-in scenarios and quick calculators.

pub mod config;
pub mod plot;

use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::capacity::{fast_rate_bound, vc_bound, vc_dimension, vc_sample_complexity, BoundMode, PacParams, DEFAULT_VC_SIZE_CAP};
use crate::decomposition::scenarios::{Scenario, ScenarioKind};
use crate::decomposition::{classify_case, decompose, tradeoff_experiment, LearnerMode, Summary, TradeoffReport};
use crate::dnf3::{benchmark_scaling, sample_complexity_3dnf, sample_complexity_expanded, write_scaling_csv, BenchOptions};
use crate::domain::draw_dataset;
use crate::erm::{erm_exhaustive, greedy_approx_erm};
use crate::error::{LabError, Result};
use crate::facts::{fact_suite, FactOutcome, FactSuiteOptions};
use crate::hypotheses::{ClassDescriptor, HypothesisClass, Predicate, DEFAULT_ENUM_CAP};

pub use config::{ExperimentConfig, ExperimentKind};
pub use plot::{plot_file, PlotKind};

pub const MAX_ENUM_ENV: &str = "ERMLAB_MAX_ENUM";
pub const MANIFEST_FILE: &str = "manifest.json";

/// The enumeration cap: `ERMLAB_MAX_ENUM` if set, else `configured`, else
/// the library default.
pub fn enumeration_cap(configured: Option<u64>) -> Result<u64> {
    match std::env::var(MAX_ENUM_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| LabError::Config { field: MAX_ENUM_ENV.into(), message: format!("`{v}` is not a non-negative integer") }),
        Err(_) => Ok(configured.unwrap_or(DEFAULT_ENUM_CAP)),
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    /// SHA-256 of the config file bytes, hex encoded.
    pub config_hash: String,
    pub tool_version: String,
    pub experiment: ExperimentKind,
    pub started_unix_seconds: u64,
    pub duration_seconds: f64,
    /// Artifact paths relative to the output directory.
    pub outputs: Vec<String>,
}

pub fn config_hash(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

struct Artifact {
    name: &'static str,
    bytes: Vec<u8>,
}

fn json_artifact(name: &'static str, value: &impl Serialize) -> Result<Artifact> {
    let mut bytes = serde_json::to_vec_pretty(value)?;
    bytes.push(b'\n');
    Ok(Artifact { name, bytes })
}

fn build_class(desc: &ClassDescriptor, cap: u64) -> Result<HypothesisClass> {
    desc.build()
        .map(|c| c.with_cap(cap))
        .map_err(|e| LabError::Config { field: "class".into(), message: e.to_string() })
}

/// Runs the experiment described by the JSON file at `config_path` and
/// writes its artifacts plus `manifest.json` into the configured directory.
pub fn run(config_path: &Path) -> Result<(PathBuf, RunManifest)> {
    let started = Instant::now();
    let started_unix_seconds = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    let bytes = std::fs::read(config_path)
        .map_err(|e| LabError::Config { field: "<path>".into(), message: format!("{}: {e}", config_path.display()) })?;
    let text = String::from_utf8(bytes.clone()).map_err(|_| LabError::Config { field: "<config>".into(), message: "not UTF-8".into() })?;
    let cfg = ExperimentConfig::from_json(&text)?;
    let base_dir = config_path.parent().unwrap_or(Path::new(".")).to_path_buf();
    let cap = enumeration_cap(cfg.enum_cap)?;

    let artifacts = match cfg.experiment {
        ExperimentKind::Tradeoff => run_tradeoff(&cfg, &base_dir, cap)?,
        ExperimentKind::Decompose => run_decompose(&cfg, &base_dir, cap)?,
        ExperimentKind::Vc => run_vc(&cfg, cap)?,
        ExperimentKind::Bounds => run_bounds(&cfg, cap)?,
        ExperimentKind::Dnf3Bench => run_bench(&cfg, cap)?,
    };

    let out_dir = base_dir.join(&cfg.output_dir);
    std::fs::create_dir_all(&out_dir)?;
    let mut outputs = Vec::new();
    for a in &artifacts {
        std::fs::write(out_dir.join(a.name), &a.bytes)?;
        outputs.push(a.name.to_string());
    }
    let manifest = RunManifest {
        config_hash: config_hash(&bytes),
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        experiment: cfg.experiment,
        started_unix_seconds,
        duration_seconds: started.elapsed().as_secs_f64(),
        outputs,
    };
    let m = json_artifact(MANIFEST_FILE, &manifest)?;
    std::fs::write(out_dir.join(m.name), m.bytes)?;
    Ok((out_dir, manifest))
}

fn tradeoff_csv(report: &TradeoffReport) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    report.write_csv(&mut buf)?;
    Ok(buf)
}

fn run_tradeoff(cfg: &ExperimentConfig, base_dir: &Path, cap: u64) -> Result<Vec<Artifact>> {
    let h = build_class(cfg.class.as_ref().expect("validated"), cap)?;
    let h_i = h.restrict(cfg.interpretable.clone().expect("validated"));
    let dist = cfg.distribution(base_dir)?;
    let m = cfg.m.expect("validated");
    let report = tradeoff_experiment(&h, &h_i, &dist, m, cfg.trials, cfg.seed(), cfg.learner)?;
    let case = classify_case(&report, cfg.tolerance);

    let mut artifacts = vec![Artifact { name: "samples.csv", bytes: tradeoff_csv(&report)? }];
    let mut sweep = Vec::new();
    if !cfg.m_values.is_empty() {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["m", "risk_h", "risk_hi", "risk_gap", "ci_low", "ci_high"])?;
        for &mv in &cfg.m_values {
            let r = tradeoff_experiment(&h, &h_i, &dist, mv, cfg.trials, cfg.seed(), cfg.learner)?;
            w.write_record([
                mv.to_string(),
                r.risk_h.mean.to_string(),
                r.risk_hi.mean.to_string(),
                r.risk_gap.mean.to_string(),
                r.risk_gap.ci_low.to_string(),
                r.risk_gap.ci_high.to_string(),
            ])?;
            sweep.push(json!({
                "m": mv,
                "risk_h": r.risk_h,
                "risk_hi": r.risk_hi,
                "risk_gap": r.risk_gap,
                "case": classify_case(&r, cfg.tolerance),
            }));
        }
        let bytes = w.into_inner().map_err(|e| LabError::Io(e.into_error()))?;
        artifacts.push(Artifact { name: "risk_vs_m.csv", bytes });
    }
    let value = json!({
        "experiment": "tradeoff",
        "h": h.name(),
        "h_i": h_i.name(),
        "tolerance": cfg.tolerance,
        "case": case,
        "report": report,
        "sweep": sweep,
    });
    artifacts.insert(0, json_artifact("report.json", &value)?);
    Ok(artifacts)
}

fn run_decompose(cfg: &ExperimentConfig, base_dir: &Path, cap: u64) -> Result<Vec<Artifact>> {
    let class = build_class(cfg.class.as_ref().expect("validated"), cap)?;
    let class = match &cfg.interpretable {
        Some(p) => class.restrict(p.clone()),
        None => class,
    };
    let dist = cfg.distribution(base_dir)?;
    let m = cfg.m.expect("validated");
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "trial",
        "approx_error",
        "estimation_error",
        "erm_empirical_risk",
        "optimization_error",
        "generalization_error",
        "total_risk",
    ])?;
    let mut rows = Vec::with_capacity(cfg.trials);
    for t in 0..cfg.trials {
        let seed = cfg.seed().derive(t as u64);
        let sample = draw_dataset(&dist, m, seed);
        let h = match cfg.learner {
            LearnerMode::Exhaustive => erm_exhaustive(&class, &sample)?.chosen,
            LearnerMode::Greedy { budget } => greedy_approx_erm(&class, &sample, budget, seed.derive(1))?,
        };
        let d = decompose(&h, &class, &sample, &dist)?;
        w.write_record([
            t.to_string(),
            d.approx_error.to_string(),
            d.estimation_error.to_string(),
            d.erm_empirical_risk.to_string(),
            d.optimization_error.to_string(),
            d.generalization_error.to_string(),
            d.total_risk.to_string(),
        ])?;
        rows.push(d);
    }
    let col = |f: fn(&crate::decomposition::RiskDecomposition) -> f64| Summary::of(&rows.iter().map(f).collect::<Vec<_>>());
    let value = json!({
        "experiment": "decompose",
        "class": class.name(),
        "m": m,
        "trials": cfg.trials,
        "learner": cfg.learner,
        "approx_error": rows[0].approx_error,
        "estimation_error": col(|d| d.estimation_error),
        "erm_empirical_risk": col(|d| d.erm_empirical_risk),
        "optimization_error": col(|d| d.optimization_error),
        "generalization_error": col(|d| d.generalization_error),
        "total_risk": col(|d| d.total_risk),
        "decompositions": rows,
    });
    let bytes = w.into_inner().map_err(|e| LabError::Io(e.into_error()))?;
    Ok(vec![json_artifact("report.json", &value)?, Artifact { name: "decompositions.csv", bytes }])
}

/// VC summary for a class, as printed by `ermlab vc` and written by `run`.
pub fn vc_report(class: &HypothesisClass, size_cap: usize) -> Result<Value> {
    let vc = vc_dimension(class, class.domain(), size_cap)?;
    Ok(json!({
        "class": class.name(),
        "n": class.n(),
        "cardinality": class.cardinality()?.to_string(),
        "vc_dimension": vc.value,
        "exact": vc.exact,
        "subsets_examined": vc.witness_subsets_examined,
    }))
}

fn run_vc(cfg: &ExperimentConfig, cap: u64) -> Result<Vec<Artifact>> {
    let h = build_class(cfg.class.as_ref().expect("validated"), cap)?;
    let size_cap = cfg.vc_size_cap.unwrap_or(DEFAULT_VC_SIZE_CAP);
    let mut value = json!({ "experiment": "vc", "h": vc_report(&h, size_cap)? });
    if let Some(p) = &cfg.interpretable {
        value["h_i"] = vc_report(&h.restrict(p.clone()), size_cap)?;
    }
    Ok(vec![json_artifact("report.json", &value)?])
}

/// The JSON object printed by `ermlab bounds`.
pub fn bounds_report(d: usize, m: u64, delta: f64, mode: BoundMode) -> Result<Value> {
    let value = vc_bound(&PacParams::new(d, m, delta)?, mode)?;
    Ok(json!({ "mode": mode.name(), "d": d, "m": m, "delta": delta, "value": value }))
}

fn run_bounds(cfg: &ExperimentConfig, cap: u64) -> Result<Vec<Artifact>> {
    let b = cfg.bounds.as_ref().expect("validated");
    let mode = b.bound_mode()?;
    let d = match (b.d, &cfg.class) {
        (Some(d), _) => d,
        (None, Some(desc)) => {
            let class = build_class(desc, cap)?;
            let class = match &cfg.interpretable {
                Some(p) => class.restrict(p.clone()),
                None => class,
            };
            vc_dimension(&class, class.domain(), cfg.vc_size_cap.unwrap_or(DEFAULT_VC_SIZE_CAP))?.value
        }
        (None, None) => unreachable!("validated"),
    };
    let params = PacParams::new(d, b.m, b.delta)?;
    let mut value = bounds_report(d, b.m, b.delta, mode)?;
    value["experiment"] = json!("bounds");
    if let BoundMode::Paper { constant } = mode {
        value["constant"] = json!(constant);
    }
    value["fast_rate"] = json!(fast_rate_bound(&params)?);
    if let Some(eps) = b.epsilon {
        value["epsilon"] = json!(eps);
        value["sample_complexity"] = json!(vc_sample_complexity(d, eps, b.delta, mode)?);
    }
    Ok(vec![json_artifact("report.json", &value)?])
}

fn run_bench(cfg: &ExperimentConfig, cap: u64) -> Result<Vec<Artifact>> {
    let b = cfg.bench.as_ref().expect("validated");
    let opts = BenchOptions { m: b.m, seed: cfg.seed(), exhaustive_cap: b.exhaustive_cap.unwrap_or(cap), repetitions: b.repetitions };
    let records = benchmark_scaling(&b.n_values, opts)?;
    let mut csv = Vec::new();
    write_scaling_csv(&records, &mut csv)?;
    let mut value = json!({
        "experiment": "dnf3-bench",
        "m": b.m,
        "repetitions": b.repetitions,
        "exhaustive_cap": opts.exhaustive_cap,
        "log_base": b.log_base,
        "records": records,
    });
    if let (Some(eps), Some(delta)) = (b.epsilon, b.delta) {
        let rows = b
            .n_values
            .iter()
            .map(|&n| {
                Ok(json!({
                    "n": n,
                    "sample_complexity_3dnf": sample_complexity_3dnf(n, eps, delta, b.log_base)?,
                    "sample_complexity_expanded": sample_complexity_expanded(n, eps, delta, b.log_base)?,
                }))
            })
            .collect::<Result<Vec<_>>>()?;
        value["sample_complexity"] = json!({ "epsilon": eps, "delta": delta, "rows": rows });
    }
    Ok(vec![json_artifact("report.json", &value)?, Artifact { name: "scaling.csv", bytes: csv }])
}

/// Outcome of `ermlab scenario <name>`.
pub enum ScenarioOutcome {
    Case { kind: ScenarioKind, report: Box<TradeoffReport>, case: crate::decomposition::Case },
    Facts(Vec<FactOutcome>),
}

impl ScenarioOutcome {
    pub fn lines(&self) -> Vec<String> {
        match self {
            ScenarioOutcome::Case { kind, report, case } => vec![
                format!("scenario {}", kind.name()),
                format!("m {} trials {} appincr {:.6}", report.m, report.trials, report.appincr),
                format!("estdecr mean {:.6}", report.estdecr.mean),
                format!(
                    "risk_gap mean {:.6} ci [{:.6}, {:.6}]",
                    report.risk_gap.mean, report.risk_gap.ci_low, report.risk_gap.ci_high
                ),
                format!("case {}", case.as_str()),
            ],
            ScenarioOutcome::Facts(out) => out.iter().map(FactOutcome::line).collect(),
        }
    }

    pub fn succeeded(&self) -> bool {
        match self {
            ScenarioOutcome::Case { .. } => true,
            ScenarioOutcome::Facts(out) => out.iter().all(FactOutcome::passed),
        }
    }
}

pub fn scenario(name: &str) -> Result<ScenarioOutcome> {
    if name == "fact-suite" {
        return Ok(ScenarioOutcome::Facts(fact_suite(&FactSuiteOptions::default())?));
    }
    let kind = ScenarioKind::parse(name)?;
    let mut s = Scenario::build(kind)?;
    let cap = enumeration_cap(None)?;
    s.h = s.h.with_cap(cap);
    s.h_i = s.h_i.with_cap(cap);
    let report = s.run()?;
    let case = s.classify(&report);
    Ok(ScenarioOutcome::Case { kind, report: Box::new(report), case })
}

/// Class for `ermlab vc`.
pub fn class_from_flags(family: &str, n: usize, max_depth: Option<usize>, predicates: &[String]) -> Result<HypothesisClass> {
    let desc = ClassDescriptor {
        family: family.to_string(),
        n,
        params: crate::hypotheses::ClassParams { max_depth, members: None },
        predicate: None,
    };
    let mut class = desc.build()?.with_cap(enumeration_cap(None)?);
    for p in predicates {
        let pred = Predicate::parse(p).ok_or_else(|| LabError::param("predicate", format!("cannot parse `{p}`")))?;
        class = class.restrict(pred);
    }
    Ok(class)
}
