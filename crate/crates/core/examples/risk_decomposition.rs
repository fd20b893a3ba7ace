//! Splits the risk of an ERM output into approximation and estimation
//! error, and into empirical risk, optimization and generalization error.

use ermlab::decomposition::decompose;
use ermlab::erm::{erm_exhaustive, greedy_approx_erm};
use ermlab::{draw_dataset, Conjunction, FiniteDistribution, Hypothesis, HypothesisClass, Predicate, Seed};

fn main() -> ermlab::Result<()> {
    let trees = HypothesisClass::trees(3, 2)?;
    let target: Hypothesis = Conjunction::parse(3, "x1 & !x2")?.into();
    let dist = FiniteDistribution::uniform_noisy(3, &target, 0.15)?;
    for class in [trees.clone(), trees.restrict(Predicate::MaxDepth { d: 1 })] {
        let sample = draw_dataset(&dist, 12, Seed(11));
        let exact = erm_exhaustive(&class, &sample)?.chosen;
        let greedy = greedy_approx_erm(&class, &sample, 8, Seed(2))?;
        for (label, h) in [("exhaustive", exact), ("greedy(8)", greedy)] {
            let d = decompose(&h, &class, &sample, &dist)?;
            println!(
                "{:<32} {label:<10}  risk {:.4} = approx {:.4} + est {:.4} = emp {:.4} + opt {:.4} + gen {:+.4}",
                class.name(),
                d.total_risk,
                d.approx_error,
                d.estimation_error,
                d.erm_empirical_risk,
                d.optimization_error,
                d.generalization_error
            );
        }
    }
    Ok(())
}
