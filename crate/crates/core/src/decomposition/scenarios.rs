//! Frozen fixtures realizing each qualitative outcome of restricting ERM to
//! an interpretable subclass.

use serde::{Deserialize, Serialize};

use super::{classify_case, tradeoff_experiment, Case, LearnerMode, TradeoffReport, DEFAULT_CASE_TOLERANCE};
use crate::domain::{FiniteDistribution, Seed};
use crate::error::{LabError, Result};
use crate::hypotheses::{Conjunction, Hypothesis, HypothesisClass, Predicate};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScenarioKind {
    /// Bayes classifier in `H` but not in `H_I`; large samples.
    Tradeoff,
    /// Bayes classifier already interpretable; large samples.
    NoTradeoff,
    /// Small noisy samples; deep trees chase the noise.
    InterpretabilityWins,
}

impl ScenarioKind {
    pub const ALL: [ScenarioKind; 3] = [ScenarioKind::Tradeoff, ScenarioKind::NoTradeoff, ScenarioKind::InterpretabilityWins];

    pub fn name(self) -> &'static str {
        match self {
            ScenarioKind::Tradeoff => "tradeoff",
            ScenarioKind::NoTradeoff => "no-tradeoff",
            ScenarioKind::InterpretabilityWins => "interpretability-wins",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| LabError::param("scenario", format!("unknown scenario {s:?}")))
    }

    pub fn expected(self) -> Case {
        match self {
            ScenarioKind::Tradeoff => Case::Tradeoff,
            ScenarioKind::NoTradeoff => Case::NoTradeoff,
            ScenarioKind::InterpretabilityWins => Case::InterpretabilityWins,
        }
    }
}

pub struct Scenario {
    pub kind: ScenarioKind,
    pub h: HypothesisClass,
    pub h_i: HypothesisClass,
    pub dist: FiniteDistribution,
    pub m: usize,
    pub trials: usize,
    pub seed: Seed,
    pub mode: LearnerMode,
}

pub const SCENARIO_TRIALS: usize = 200;

fn conj(n: usize, s: &str) -> Hypothesis {
    Conjunction::parse(n, s).expect("fixture formula").into()
}

impl Scenario {
    pub fn build(kind: ScenarioKind) -> Result<Self> {
        let (h, h_i, dist, m, seed) = match kind {
            ScenarioKind::Tradeoff => {
                let h = HypothesisClass::conjunctions(3)?;
                let h_i = h.restrict(Predicate::MaxLiterals { k: 1 });
                let dist = FiniteDistribution::uniform_noisy(3, &conj(3, "x1 & x2"), 0.1)?;
                (h, h_i, dist, 2000, Seed(0x7ade))
            }
            ScenarioKind::NoTradeoff => {
                let h = HypothesisClass::conjunctions(3)?;
                let h_i = h.restrict(Predicate::MaxLiterals { k: 1 });
                let dist = FiniteDistribution::uniform_noisy(3, &conj(3, "x1"), 0.1)?;
                (h, h_i, dist, 2000, Seed(0x0e0e))
            }
            ScenarioKind::InterpretabilityWins => {
                let h = HypothesisClass::trees(4, 3)?;
                let h_i = h.restrict(Predicate::MaxDepth { d: 2 });
                let dist = FiniteDistribution::uniform_noisy(4, &conj(4, "x1 & x2"), 0.1)?;
                (h, h_i, dist, 32, Seed(0x1417))
            }
        };
        Ok(Scenario { kind, h, h_i, dist, m, trials: SCENARIO_TRIALS, seed, mode: LearnerMode::Exhaustive })
    }

    pub fn run(&self) -> Result<TradeoffReport> {
        tradeoff_experiment(&self.h, &self.h_i, &self.dist, self.m, self.trials, self.seed, self.mode)
    }

    pub fn classify(&self, report: &TradeoffReport) -> Case {
        classify_case(report, DEFAULT_CASE_TOLERANCE)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for k in ScenarioKind::ALL {
            assert_eq!(ScenarioKind::parse(k.name()).unwrap(), k);
        }
        assert!(ScenarioKind::parse("fact-suite").is_err());
    }
}
