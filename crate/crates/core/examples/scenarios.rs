//! Runs the three frozen fixtures and prints the classified outcome of each.

use ermlab::decomposition::scenarios::{Scenario, ScenarioKind};

fn main() -> ermlab::Result<()> {
    for kind in ScenarioKind::ALL {
        let scenario = Scenario::build(kind)?;
        let report = scenario.run()?;
        let case = scenario.classify(&report);
        println!(
            "{:<22} appincr {:+.4}  estdecr {:+.4}  risk_gap {:+.4} [{:+.4}, {:+.4}]  -> {}",
            kind.name(),
            report.appincr,
            report.estdecr.mean,
            report.risk_gap.mean,
            report.risk_gap.ci_low,
            report.risk_gap.ci_high,
            case.as_str()
        );
    }
    Ok(())
}
