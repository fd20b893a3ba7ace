//! Generalization-bound and sample-complexity calculators.

use ermlab::capacity::{fast_rate_bound, vc_bound, vc_sample_complexity, BoundMode, PacParams};
use ermlab::dnf3::{sample_complexity_3dnf, sample_complexity_expanded, LogBase};

fn main() -> ermlab::Result<()> {
    println!("{:>4} {:>6} {:>10} {:>10} {:>10}", "d", "m", "paper", "classical", "fast");
    for d in [1, 3, 10] {
        for m in [100u64, 1_000, 10_000] {
            let p = PacParams::new(d, m, 0.05)?;
            println!(
                "{d:>4} {m:>6} {:>10.4} {:>10.4} {:>10.4}",
                vc_bound(&p, BoundMode::paper())?,
                vc_bound(&p, BoundMode::Classical)?,
                fast_rate_bound(&p)?
            );
        }
    }
    println!("m for eps 0.1, delta 0.05, d 3: paper {}, classical {}",
        vc_sample_complexity(3, 0.1, 0.05, BoundMode::paper())?,
        vc_sample_complexity(3, 0.1, 0.05, BoundMode::Classical)?);

    for base in [LogBase::Natural, LogBase::Two] {
        println!(
            "{base:?} log: 3-term DNF over n=10 needs {}, expanded conjunctions over n=6 need {}",
            sample_complexity_3dnf(10, 0.1, 0.05, base)?,
            sample_complexity_expanded(6, 0.1, 0.05, base)?
        );
    }
    Ok(())
}
