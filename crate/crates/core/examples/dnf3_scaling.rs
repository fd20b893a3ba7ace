//! Times exhaustive 3-term DNF ERM against the expansion learner and fits
//! the growth rates of both.

use ermlab::dnf3::{benchmark_scaling, BenchOptions};
use ermlab::Seed;

fn slope(points: &[(f64, f64)]) -> f64 {
    let k = points.len() as f64;
    let (mx, my) = points.iter().fold((0.0, 0.0), |(a, b), p| (a + p.0 / k, b + p.1 / k));
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

fn main() -> ermlab::Result<()> {
    let ns: Vec<usize> = (2..=12).collect();
    let opts = BenchOptions { seed: Seed(3), ..BenchOptions::default() };
    let records = benchmark_scaling(&ns, opts)?;
    println!("{:>3} {:>16} {:>8} {:>14} {:>10} {:>12}", "n", "|H|", "(2n)^3", "exhaustive s", "projected", "expansion s");
    for r in &records {
        println!(
            "{:>3} {:>16} {:>8} {:>14.4e} {:>10} {:>12.4e}",
            r.n, r.class_cardinality, r.expanded_dimension, r.exhaustive_seconds, r.exhaustive_projected, r.expansion_learn_seconds
        );
    }
    let measured: Vec<(f64, f64)> = records
        .iter()
        .filter(|r| !r.exhaustive_projected && r.n <= 5)
        .map(|r| (r.n as f64, r.exhaustive_seconds.ln()))
        .collect();
    let expansion: Vec<(f64, f64)> = records
        .iter()
        .filter(|r| r.n >= 4)
        .map(|r| ((r.n as f64).ln(), r.expansion_learn_seconds.ln()))
        .collect();
    println!("exhaustive log-time slope per variable: {:.3} (3 ln 3 = {:.3})", slope(&measured), 3.0 * 3f64.ln());
    println!("expansion log-log slope: {:.3}", slope(&expansion));
    if let Some(last) = records.last() {
        println!("n = {}: projected / measured = {:.3e}", last.n, last.exhaustive_seconds / last.expansion_learn_seconds);
    }
    Ok(())
}
