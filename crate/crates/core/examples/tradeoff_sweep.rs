//! Risk of ERM over a class and over its interpretable restriction as the
//! sample grows, with the classified outcome at each size.

use ermlab::decomposition::{classify_case, tradeoff_experiment, LearnerMode, DEFAULT_CASE_TOLERANCE};
use ermlab::{Conjunction, FiniteDistribution, Hypothesis, HypothesisClass, Predicate, Seed};

fn main() -> ermlab::Result<()> {
    let h = HypothesisClass::trees(4, 3)?;
    let h_i = h.restrict(Predicate::MaxDepth { d: 2 });
    let target: Hypothesis = Conjunction::parse(4, "x1 & x2 & !x3")?.into();
    let dist = FiniteDistribution::uniform_noisy(4, &target, 0.1)?;
    println!("{:>5} {:>8} {:>8} {:>9} {:>9}  case", "m", "risk H", "risk H_I", "appincr", "estdecr");
    for m in [4, 8, 16, 32, 64, 128, 256] {
        let r = tradeoff_experiment(&h, &h_i, &dist, m, 200, Seed(1), LearnerMode::Exhaustive)?;
        println!(
            "{m:>5} {:>8.4} {:>8.4} {:>9.4} {:>9.4}  {}",
            r.risk_h.mean,
            r.risk_hi.mean,
            r.appincr,
            r.estdecr.mean,
            classify_case(&r, DEFAULT_CASE_TOLERANCE).as_str()
        );
    }
    Ok(())
}
