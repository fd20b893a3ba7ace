//! Learns a conjunction from realizable data with the elimination learner
//! and checks it against exhaustive ERM over all 3^n conjunctions.

use ermlab::erm::{erm_exhaustive, learn_conjunction_realizable};
use ermlab::{draw_dataset, exact_risk, Conjunction, FiniteDistribution, Hypothesis, HypothesisClass, Seed};

fn main() -> ermlab::Result<()> {
    let n = 6;
    let target: Hypothesis = Conjunction::parse(n, "x1 & !x4 & x6")?.into();
    let dist = FiniteDistribution::uniform_realizable(n, &target)?;
    let class = HypothesisClass::conjunctions(n)?;

    for m in [5, 20, 80, 320] {
        let sample = draw_dataset(&dist, m, Seed(m as u64));
        let learned = learn_conjunction_realizable(&sample)?;
        let erm = erm_exhaustive(&class, &sample)?;
        println!(
            "m {m:>4}  elimination: {:<28} risk {:.4}   exhaustive ERM: {:<20} risk {:.4} ({} minimizers)",
            learned.to_string(),
            exact_risk(&learned.clone().into(), &dist)?,
            format!("{:?}", erm.chosen),
            exact_risk(&erm.chosen, &dist)?,
            erm.minimizer_count
        );
    }
    Ok(())
}
