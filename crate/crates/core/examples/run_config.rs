//! Drives the batch runner from a JSON config and plots its CSV output,
//! exactly as `ermlab run` and `ermlab plot` do.

use ermlab::cli::{plot_file, run, PlotKind};

const CONFIG: &str = r#"{
  "experiment": "tradeoff",
  "class": {"family": "trees", "n": 3, "params": {"max_depth": 2}},
  "interpretable": {"kind": "max_depth", "d": 1},
  "distribution": {"uniform_noisy": {
    "target": {"kind": "conjunction", "n": 3, "positive": [1, 3], "negated": []},
    "noise_rate": 0.1
  }},
  "m": 40,
  "m_values": [5, 10, 20, 40, 80, 160],
  "trials": 100,
  "base_seed": 42,
  "output_dir": "out"
}"#;

fn main() -> ermlab::Result<()> {
    let dir = std::env::temp_dir().join("ermlab-run-config");
    std::fs::create_dir_all(&dir)?;
    let config = dir.join("tradeoff.json");
    std::fs::write(&config, CONFIG)?;
    let (out, manifest) = run(&config)?;
    println!("config sha256 {}", manifest.config_hash);
    for o in &manifest.outputs {
        println!("wrote {}", out.join(o).display());
    }
    plot_file(&out.join("risk_vs_m.csv"), PlotKind::RiskVsM, false, &out.join("risk_vs_m.svg"))?;
    plot_file(&out.join("samples.csv"), PlotKind::GapHistogram, false, &out.join("gaps.svg"))?;
    println!("plots in {}", out.display());
    Ok(())
}
