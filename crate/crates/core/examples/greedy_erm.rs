//! Optimization error of the budgeted hill climber as its budget grows.

use ermlab::erm::{greedy_approx_erm, optimization_error};
use ermlab::{draw_dataset, FiniteDistribution, HypothesisClass, Seed};

fn main() -> ermlab::Result<()> {
    let class = HypothesisClass::trees(4, 2)?;
    let target = class.unrank(900)?;
    let dist = FiniteDistribution::uniform_noisy(4, &target, 0.15)?;
    let samples: Vec<_> = (0..50).map(|s| draw_dataset(&dist, 40, Seed(s))).collect();
    for budget in [1u64, 4, 16, 64, 256, 1024] {
        let mut total = 0.0;
        for (s, sample) in samples.iter().enumerate() {
            let h = greedy_approx_erm(&class, sample, budget, Seed(1000 + s as u64))?;
            total += optimization_error(&h, &class, sample)?;
        }
        println!("budget {budget:>5}: mean optimization error {:.4}", total / samples.len() as f64);
    }
    Ok(())
}
