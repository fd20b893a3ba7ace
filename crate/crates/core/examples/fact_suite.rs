//! Checks the seven ordering and convergence facts on random fixtures.

use std::time::Instant;

use ermlab::facts::{fact_suite, FactSuiteOptions};

fn main() -> ermlab::Result<()> {
    let start = Instant::now();
    let outcomes = fact_suite(&FactSuiteOptions::default())?;
    for o in &outcomes {
        println!("{}", o.line());
    }
    println!("{:.1}s", start.elapsed().as_secs_f64());
    Ok(())
}
