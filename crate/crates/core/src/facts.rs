//! Randomized checks of the ordering facts between a class and an
//! interpretable subclass, plus the uniform-convergence checks.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;

use crate::capacity::{vc_bound, vc_dimension, worst_case_gen_error, BoundMode, PacParams};
use crate::decomposition::approximation_error;
use crate::domain::{draw_dataset, exact_risk, Atom, Dataset, DomainSpec, FiniteDistribution, Label, Seed};
use crate::erm::erm_exhaustive;
use crate::error::Result;
use crate::hypotheses::{Conjunction, Hypothesis, HypothesisClass, Predicate};
use crate::tabulate::{MassTable, SampleCounts, TabulatedClass};

/// A class, a nonempty interpretable restriction of it, a distribution and
/// a sample drawn from it.
#[derive(Debug, Clone)]
pub struct Fixture {
    pub h: HypothesisClass,
    pub h_i: HypothesisClass,
    pub dist: FiniteDistribution,
    pub sample: Dataset,
}

fn random_class<R: Rng>(n: usize, rng: &mut R) -> Result<HypothesisClass> {
    Ok(match rng.gen_range(0..4) {
        0 => HypothesisClass::constants(n)?,
        1 => HypothesisClass::conjunctions(n)?,
        2 if n <= 2 => HypothesisClass::dnf3(n)?,
        _ => HypothesisClass::trees(n, rng.gen_range(1..=2))?,
    })
}

pub fn random_predicate<R: Rng>(rng: &mut R) -> Predicate {
    match rng.gen_range(0..6) {
        0 => Predicate::MaxLiterals { k: rng.gen_range(0..=3) },
        1 => Predicate::MaxDepth { d: rng.gen_range(0..=2) },
        2 => Predicate::IsConstant,
        3 => Predicate::Always,
        4 => Predicate::HashSubset { seed: rng.gen(), fraction: rng.gen_range(0.2..0.9) },
        _ => Predicate::MaxLiterals { k: rng.gen_range(1..=3) }.and(Predicate::HashSubset {
            seed: rng.gen(),
            fraction: rng.gen_range(0.3..0.9),
        }),
    }
}

/// Random masses on a random subset of `{0,1}^n x {0,1}`.
pub fn random_distribution<R: Rng>(n: usize, rng: &mut R) -> Result<FiniteDistribution> {
    let mut keys: Vec<Atom> = DomainSpec::new(n)?
        .points()?
        .flat_map(|x| [Label::Zero, Label::One].map(|y| Atom { x: x.clone(), y, p: 0.0 }))
        .collect();
    keys.shuffle(rng);
    keys.truncate(rng.gen_range(1..=keys.len()));
    let weights: Vec<f64> = keys.iter().map(|_| rng.gen_range(0.05..1.0)).collect();
    let total: f64 = weights.iter().sum();
    for (a, w) in keys.iter_mut().zip(weights) {
        a.p = w / total;
    }
    FiniteDistribution::new(n, keys)
}

impl Fixture {
    /// `n <= 3`, `m <= 50`, restriction guaranteed nonempty.
    pub fn random(seed: Seed) -> Result<Self> {
        let mut rng = seed.rng();
        let n = rng.gen_range(1..=3);
        let h = random_class(n, &mut rng)?;
        let h_i = loop {
            let candidate = h.restrict(random_predicate(&mut rng));
            if candidate.cardinality()? > 0 {
                break candidate;
            }
        };
        let dist = random_distribution(n, &mut rng)?;
        let sample = draw_dataset(&dist, rng.gen_range(1..=50), Seed(rng.gen()));
        Ok(Fixture { h, h_i, dist, sample })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FactOutcome {
    pub fact: u8,
    pub statement: &'static str,
    pub checked: usize,
    pub violations: usize,
    pub detail: String,
}

impl FactOutcome {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }

    pub fn line(&self) -> String {
        format!(
            "{} Fact {}: {} ({} checked, {} violations{}{})",
            if self.passed() { "PASS" } else { "FAIL" },
            self.fact,
            self.statement,
            self.checked,
            self.violations,
            if self.detail.is_empty() { "" } else { "; " },
            self.detail
        )
    }
}

/// Absolute slack allowed on floating-point comparisons.
pub const FACT_TOLERANCE: f64 = 1e-12;

/// Facts 1 to 5 over `fixtures` random fixtures derived from `seed`.
pub fn ordering_facts(fixtures: usize, seed: Seed) -> Result<Vec<FactOutcome>> {
    let mut v = [0usize; 5];
    for t in 0..fixtures {
        let f = Fixture::random(seed.derive(t as u64))?;
        let domain = f.h.domain();
        let size_cap = 1usize << domain.n();

        if approximation_error(&f.h, &f.dist)? > approximation_error(&f.h_i, &f.dist)? {
            v[0] += 1;
        }

        let chosen = erm_exhaustive(&f.h, &f.sample)?;
        let estimation = exact_risk(&chosen.chosen, &f.dist)? - approximation_error(&f.h, &f.dist)?;
        let worst_h = worst_case_gen_error(&f.h, &f.sample, &f.dist)?;
        if estimation > 2.0 * worst_h + FACT_TOLERANCE {
            v[1] += 1;
        }

        if worst_case_gen_error(&f.h_i, &f.sample, &f.dist)? > worst_h + FACT_TOLERANCE {
            v[2] += 1;
        }

        if chosen.min_empirical_risk > erm_exhaustive(&f.h_i, &f.sample)?.min_empirical_risk {
            v[3] += 1;
        }

        if vc_dimension(&f.h_i, domain, size_cap)?.value > vc_dimension(&f.h, domain, size_cap)?.value {
            v[4] += 1;
        }
    }
    let statements = [
        "approximation error of H <= that of H_I",
        "estimation error <= 2 x worst-case generalization error",
        "worst-case generalization error of H_I <= that of H",
        "ERM empirical risk over H <= that over H_I",
        "VC dimension of H_I <= that of H",
    ];
    Ok((0..5)
        .map(|i| FactOutcome {
            fact: i as u8 + 1,
            statement: statements[i],
            checked: fixtures,
            violations: v[i],
            detail: String::new(),
        })
        .collect())
}

/// Conjunctions over `{0,1}^3` with a noisy conjunction target under the
/// uniform marginal.
pub fn convergence_fixture(noise: f64) -> Result<(HypothesisClass, FiniteDistribution)> {
    let class = HypothesisClass::conjunctions(3)?;
    let target: Hypothesis = Conjunction::parse(3, "x1 & !x3")?.into();
    Ok((class, FiniteDistribution::uniform_noisy(3, &target, noise)?))
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct BoundCheck {
    pub d: usize,
    pub bound: f64,
    pub samples: usize,
    pub violations: usize,
    pub violation_rate: f64,
}

/// Fraction of samples whose worst-case generalization error exceeds the
/// classical VC bound.
pub fn bound_violation_rate(
    class: &HypothesisClass,
    dist: &FiniteDistribution,
    m: usize,
    delta: f64,
    samples: usize,
    seed: Seed,
) -> Result<BoundCheck> {
    let d = vc_dimension(class, class.domain(), 1 << class.n())?.value;
    let bound = vc_bound(&PacParams::new(d, m as u64, delta)?, BoundMode::Classical)?;
    let tab = TabulatedClass::new(class)?;
    let masses = MassTable::new(dist);
    let violations = (0..samples)
        .filter(|&s| {
            let sample = draw_dataset(dist, m, seed.derive(s as u64));
            tab.worst_case_gap(&SampleCounts::new(&sample), &masses) > bound
        })
        .count();
    Ok(BoundCheck { d, bound, samples, violations, violation_rate: violations as f64 / samples as f64 })
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ConvergenceCheck {
    pub approximation_error: f64,
    pub mean_erm_risk: f64,
    pub distance: f64,
}

/// Mean exact risk of the ERM output over `seeds` samples of size `m`.
pub fn erm_convergence(class: &HypothesisClass, dist: &FiniteDistribution, m: usize, seeds: usize, seed: Seed) -> Result<ConvergenceCheck> {
    let tab = TabulatedClass::new(class)?;
    let masses = MassTable::new(dist);
    let total: f64 = (0..seeds)
        .map(|s| {
            let sample = draw_dataset(dist, m, seed.derive(s as u64));
            masses.risk(tab.entries()[tab.erm(&SampleCounts::new(&sample)).entry].table)
        })
        .sum();
    let approx = tab.min_risk(&masses);
    let mean = total / seeds as f64;
    Ok(ConvergenceCheck { approximation_error: approx, mean_erm_risk: mean, distance: (mean - approx).abs() })
}

pub struct FactSuiteOptions {
    pub fixtures: usize,
    pub bound_samples: usize,
    pub convergence_seeds: usize,
    pub seed: Seed,
}

impl Default for FactSuiteOptions {
    fn default() -> Self {
        FactSuiteOptions { fixtures: 100, bound_samples: 2000, convergence_seeds: 200, seed: Seed(0xfac7) }
    }
}

pub const BOUND_DELTA: f64 = 0.05;
pub const BOUND_M: usize = 200;
pub const CONVERGENCE_M: usize = 1000;
pub const CONVERGENCE_TOLERANCE: f64 = 0.02;

/// All seven facts, one outcome each.
pub fn fact_suite(opts: &FactSuiteOptions) -> Result<Vec<FactOutcome>> {
    let mut out = ordering_facts(opts.fixtures, opts.seed)?;
    let (class, dist) = convergence_fixture(0.1)?;

    let b = bound_violation_rate(&class, &dist, BOUND_M, BOUND_DELTA, opts.bound_samples, opts.seed.derive(6))?;
    out.push(FactOutcome {
        fact: 6,
        statement: "worst-case generalization error <= classical VC bound w.p. >= 1 - delta",
        checked: b.samples,
        violations: usize::from(b.violation_rate > BOUND_DELTA),
        detail: format!("d = {}, bound {:.4}, violation rate {:.4}", b.d, b.bound, b.violation_rate),
    });

    let c = erm_convergence(&class, &dist, CONVERGENCE_M, opts.convergence_seeds, opts.seed.derive(7))?;
    out.push(FactOutcome {
        fact: 7,
        statement: "mean ERM risk approaches the approximation error",
        checked: opts.convergence_seeds,
        violations: usize::from(c.distance > CONVERGENCE_TOLERANCE),
        detail: format!("mean risk {:.4}, approximation error {:.4}", c.mean_erm_risk, c.approximation_error),
    });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_are_reproducible_and_well_formed() {
        for s in 0..40 {
            let a = Fixture::random(Seed(s)).unwrap();
            let b = Fixture::random(Seed(s)).unwrap();
            assert_eq!(a.sample, b.sample);
            assert_eq!(a.dist, b.dist);
            assert!(a.h.n() <= 3 && (1..=50).contains(&a.sample.m()));
            for h in a.h_i.enumerate().unwrap() {
                assert!(a.h.contains(&h));
            }
        }
    }

    #[test]
    fn small_suite_passes() {
        let opts = FactSuiteOptions { fixtures: 15, bound_samples: 100, convergence_seeds: 20, seed: Seed(5) };
        let out = fact_suite(&opts).unwrap();
        assert_eq!(out.len(), 7);
        for o in &out {
            assert!(o.passed(), "{}", o.line());
        }
    }
}
