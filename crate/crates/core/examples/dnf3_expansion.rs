//! Learns a random 3-term DNF improperly through the literal-triple
//! expansion and compares it with proper exhaustive ERM.

use ermlab::dnf3::{erm_3dnf_exhaustive, expanded_dimension, learn_3dnf_via_expansion, random_3dnf_target, sample_complexity_expanded, LogBase};
use ermlab::hypotheses::DEFAULT_ENUM_CAP;
use ermlab::{draw_dataset, empirical_risk, exact_risk, FiniteDistribution, Seed};

fn main() -> ermlab::Result<()> {
    for n in [3, 4, 6, 8] {
        let target = random_3dnf_target(n, Seed(n as u64))?;
        let dist = FiniteDistribution::uniform_realizable(n, &target)?;
        let m = sample_complexity_expanded(n, 0.1, 0.1, LogBase::Natural)? as usize;
        let sample = draw_dataset(&dist, m, Seed(99));
        let learned = learn_3dnf_via_expansion(&sample, n)?;
        println!(
            "n {n}: {:?}\n  expanded dim {:>5}, m {m:>5}: train risk {:.4}, true risk {:.4}",
            target,
            expanded_dimension(n),
            empirical_risk(&learned, &sample)?,
            exact_risk(&learned, &dist)?
        );
        if n <= 3 {
            let proper = erm_3dnf_exhaustive(&sample, n, DEFAULT_ENUM_CAP)?;
            println!("  proper ERM: {:?}, true risk {:.4}", proper.chosen, exact_risk(&proper.chosen, &dist)?);
        }
    }
    Ok(())
}
