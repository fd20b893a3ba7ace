//! Risk decompositions and Monte-Carlo measurement of what restricting ERM
//! to an interpretable subclass does to each term.

pub mod scenarios;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::domain::{draw_dataset, empirical_errors, exact_risk, Dataset, FiniteDistribution, Seed};
use crate::erm::{erm_exhaustive, greedy_approx_erm, min_errors};
use crate::error::{LabError, Result};
use crate::hypotheses::{Hypothesis, HypothesisClass};
use crate::tabulate::{MassTable, SampleCounts, TabulatedClass, MAX_TABULATED_DIM};

/// Smallest exact risk over the class.
pub fn approximation_error(class: &HypothesisClass, dist: &FiniteDistribution) -> Result<f64> {
    if class.n() != dist.n() {
        return Err(LabError::DimensionMismatch { expected: class.n(), found: dist.n() });
    }
    let mut best: Option<f64> = None;
    for h in class.enumerate()? {
        let r = exact_risk(&h, dist)?;
        best = Some(best.map_or(r, |b| b.min(r)));
    }
    best.ok_or_else(|| LabError::EmptyClass(class.name().to_string()))
}

/// Both decompositions of the risk of one hypothesis.
///
/// `total = approx + estimation` and
/// `total = erm_empirical_risk + optimization + generalization`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RiskDecomposition {
    pub approx_error: f64,
    pub estimation_error: f64,
    pub erm_empirical_risk: f64,
    pub optimization_error: f64,
    /// Signed: risk minus empirical risk.
    pub generalization_error: f64,
    pub total_risk: f64,
}

/// Tolerance for the algebraic identities.
pub const IDENTITY_TOLERANCE: f64 = 1e-12;

impl RiskDecomposition {
    pub fn two_term_residual(&self) -> f64 {
        (self.approx_error + self.estimation_error - self.total_risk).abs()
    }

    pub fn three_term_residual(&self) -> f64 {
        (self.erm_empirical_risk + self.optimization_error + self.generalization_error - self.total_risk).abs()
    }
}

pub fn decompose(
    h: &Hypothesis,
    class: &HypothesisClass,
    sample: &Dataset,
    dist: &FiniteDistribution,
) -> Result<RiskDecomposition> {
    if !class.contains(h) {
        return Err(LabError::NotAMember(class.name().to_string()));
    }
    if sample.is_empty() {
        return Err(LabError::EmptyDataset);
    }
    let m = sample.m() as f64;
    let total_risk = exact_risk(h, dist)?;
    let approx_error = approximation_error(class, dist)?;
    let own_errors = empirical_errors(h, sample)?;
    let best_errors = min_errors(class, sample)?;
    let emp = own_errors as f64 / m;
    let d = RiskDecomposition {
        approx_error,
        estimation_error: total_risk - approx_error,
        erm_empirical_risk: best_errors as f64 / m,
        optimization_error: own_errors.saturating_sub(best_errors) as f64 / m,
        generalization_error: total_risk - emp,
        total_risk,
    };
    debug_assert!(d.two_term_residual() <= IDENTITY_TOLERANCE);
    debug_assert!(d.three_term_residual() <= IDENTITY_TOLERANCE);
    Ok(d)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum LearnerMode {
    Exhaustive,
    Greedy { budget: u64 },
}

/// Mean with a normal-approximation 95% interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub mean: f64,
    pub std_dev: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

const Z_95: f64 = 1.959_963_984_540_054;

impl Summary {
    pub fn of(samples: &[f64]) -> Summary {
        let t = samples.len() as f64;
        let mean = samples.iter().sum::<f64>() / t;
        let var = if samples.len() > 1 {
            samples.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (t - 1.0)
        } else {
            0.0
        };
        let std_dev = var.sqrt();
        let half = Z_95 * std_dev / t.sqrt();
        Summary { mean, std_dev, ci_low: mean - half, ci_high: mean + half }
    }
}

/// One trial of the interpretability experiment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub risk_h: f64,
    pub risk_hi: f64,
    /// Change in estimation error.
    pub estdecr: f64,
    /// Increase in ERM empirical risk.
    pub emp_gap: f64,
    /// Change in (signed) generalization error of the learned hypotheses.
    pub gen_gap: f64,
    /// Change in optimization error; zero for exhaustive learners.
    pub opt_gap: f64,
    pub risk_gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TradeoffReport {
    pub m: usize,
    pub trials: usize,
    pub base_seed: Seed,
    pub learner: LearnerMode,
    pub approx_h: f64,
    pub approx_hi: f64,
    /// Increase in approximation error.
    pub appincr: f64,
    pub estdecr_samples: Vec<f64>,
    pub emp_gap_samples: Vec<f64>,
    pub gen_gap_samples: Vec<f64>,
    pub opt_gap_samples: Vec<f64>,
    pub risk_gap_samples: Vec<f64>,
    pub risk_h_samples: Vec<f64>,
    pub risk_hi_samples: Vec<f64>,
    pub estdecr: Summary,
    pub emp_gap: Summary,
    pub gen_gap: Summary,
    pub risk_gap: Summary,
    pub risk_h: Summary,
    pub risk_hi: Summary,
}

impl TradeoffReport {
    pub const CSV_HEADER: [&'static str; 5] = ["trial", "estdecr", "emp_gap", "gen_gap", "risk_gap"];

    fn assemble(
        m: usize,
        base_seed: Seed,
        learner: LearnerMode,
        approx_h: f64,
        approx_hi: f64,
        records: Vec<TrialRecord>,
    ) -> Self {
        let col = |f: fn(&TrialRecord) -> f64| records.iter().map(f).collect::<Vec<f64>>();
        let estdecr_samples = col(|r| r.estdecr);
        let emp_gap_samples = col(|r| r.emp_gap);
        let gen_gap_samples = col(|r| r.gen_gap);
        let risk_gap_samples = col(|r| r.risk_gap);
        let risk_h_samples = col(|r| r.risk_h);
        let risk_hi_samples = col(|r| r.risk_hi);
        TradeoffReport {
            m,
            trials: records.len(),
            base_seed,
            learner,
            approx_h,
            approx_hi,
            appincr: approx_hi - approx_h,
            estdecr: Summary::of(&estdecr_samples),
            emp_gap: Summary::of(&emp_gap_samples),
            gen_gap: Summary::of(&gen_gap_samples),
            risk_gap: Summary::of(&risk_gap_samples),
            risk_h: Summary::of(&risk_h_samples),
            risk_hi: Summary::of(&risk_hi_samples),
            opt_gap_samples: col(|r| r.opt_gap),
            estdecr_samples,
            emp_gap_samples,
            gen_gap_samples,
            risk_gap_samples,
            risk_h_samples,
            risk_hi_samples,
        }
    }

    /// Flat per-trial CSV: `trial,estdecr,emp_gap,gen_gap,risk_gap`.
    pub fn write_csv<W: std::io::Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(Self::CSV_HEADER)?;
        for t in 0..self.trials {
            w.write_record([
                t.to_string(),
                self.estdecr_samples[t].to_string(),
                self.emp_gap_samples[t].to_string(),
                self.gen_gap_samples[t].to_string(),
                self.risk_gap_samples[t].to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Learned hypothesis with its empirical error count and the class minimum.
struct Fit {
    risk: f64,
    errors: usize,
    min_errors: usize,
}

fn fit_direct(
    class: &HypothesisClass,
    sample: &Dataset,
    dist: &FiniteDistribution,
    mode: LearnerMode,
    seed: Seed,
) -> Result<Fit> {
    let best = erm_exhaustive(class, sample)?;
    let min_errors = (best.min_empirical_risk * sample.m() as f64).round() as usize;
    let h = match mode {
        LearnerMode::Exhaustive => best.chosen,
        LearnerMode::Greedy { budget } => greedy_approx_erm(class, sample, budget, seed)?,
    };
    Ok(Fit { risk: exact_risk(&h, dist)?, errors: empirical_errors(&h, sample)?, min_errors })
}

fn fit_tabulated(tab: &TabulatedClass, counts: &SampleCounts, masses: &MassTable) -> Fit {
    let best = tab.erm(counts);
    Fit {
        risk: masses.risk(tab.entries()[best.entry].table),
        errors: best.errors,
        min_errors: best.errors,
    }
}

fn record(m: usize, approx_h: f64, approx_hi: f64, h: Fit, hi: Fit) -> TrialRecord {
    let m = m as f64;
    let emp = |f: &Fit| f.errors as f64 / m;
    let min_emp = |f: &Fit| f.min_errors as f64 / m;
    TrialRecord {
        risk_h: h.risk,
        risk_hi: hi.risk,
        estdecr: (hi.risk - approx_hi) - (h.risk - approx_h),
        emp_gap: min_emp(&hi) - min_emp(&h),
        gen_gap: (hi.risk - emp(&hi)) - (h.risk - emp(&h)),
        opt_gap: (emp(&hi) - min_emp(&hi)) - (emp(&h) - min_emp(&h)),
        risk_gap: hi.risk - h.risk,
    }
}

fn check_restriction(h: &HypothesisClass, h_i: &HypothesisClass) -> Result<()> {
    if h.n() != h_i.n() {
        return Err(LabError::DimensionMismatch { expected: h.n(), found: h_i.n() });
    }
    for member in h_i.enumerate()? {
        if !h.contains(&member) {
            return Err(LabError::param("h_i", format!("{member:?} is not a member of {}", h.name())));
        }
    }
    Ok(())
}

/// Draws `trials` samples of size `m` (seed `base_seed.derive(t)` for trial
/// `t`), learns on both classes and records the four comparison quantities.
pub fn tradeoff_experiment(
    h: &HypothesisClass,
    h_i: &HypothesisClass,
    dist: &FiniteDistribution,
    m: usize,
    trials: usize,
    base_seed: Seed,
    mode: LearnerMode,
) -> Result<TradeoffReport> {
    if trials < 2 {
        return Err(LabError::param("trials", "at least 2 trials are needed for an interval"));
    }
    if m == 0 {
        return Err(LabError::param("m", "must be positive"));
    }
    if dist.n() != h.n() {
        return Err(LabError::DimensionMismatch { expected: h.n(), found: dist.n() });
    }
    check_restriction(h, h_i)?;

    let tabulate = mode == LearnerMode::Exhaustive && h.n() <= MAX_TABULATED_DIM;
    let (approx_h, approx_hi, records) = if tabulate {
        let (tab_h, tab_hi) = (TabulatedClass::new(h)?, TabulatedClass::new(h_i)?);
        let masses = MassTable::new(dist);
        let (approx_h, approx_hi) = (tab_h.min_risk(&masses), tab_hi.min_risk(&masses));
        let records = (0..trials)
            .into_par_iter()
            .map(|t| {
                let sample = draw_dataset(dist, m, base_seed.derive(t as u64));
                let counts = SampleCounts::new(&sample);
                record(
                    m,
                    approx_h,
                    approx_hi,
                    fit_tabulated(&tab_h, &counts, &masses),
                    fit_tabulated(&tab_hi, &counts, &masses),
                )
            })
            .collect();
        (approx_h, approx_hi, records)
    } else {
        let approx_h = approximation_error(h, dist)?;
        let approx_hi = approximation_error(h_i, dist)?;
        let records = (0..trials)
            .into_par_iter()
            .map(|t| {
                let seed = base_seed.derive(t as u64);
                let sample = draw_dataset(dist, m, seed);
                let learn_seed = seed.derive(1);
                Ok(record(
                    m,
                    approx_h,
                    approx_hi,
                    fit_direct(h, &sample, dist, mode, learn_seed)?,
                    fit_direct(h_i, &sample, dist, mode, learn_seed)?,
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        (approx_h, approx_hi, records)
    };
    Ok(TradeoffReport::assemble(m, base_seed, mode, approx_h, approx_hi, records))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Case {
    Tradeoff,
    NoTradeoff,
    InterpretabilityWins,
    Inconclusive,
}

impl Case {
    pub fn as_str(self) -> &'static str {
        match self {
            Case::Tradeoff => "tradeoff",
            Case::NoTradeoff => "no_tradeoff",
            Case::InterpretabilityWins => "interpretability_wins",
            Case::Inconclusive => "inconclusive",
        }
    }
}

/// Default tolerance for [`classify_case`].
pub const DEFAULT_CASE_TOLERANCE: f64 = 0.01;

/// Classifies a confidence interval on `risk(H_I) - risk(H)`.
pub fn classify_interval(ci_low: f64, ci_high: f64, tol: f64) -> Case {
    if ci_low > tol {
        Case::Tradeoff
    } else if ci_high < -tol {
        Case::InterpretabilityWins
    } else if ci_low >= -tol && ci_high <= tol {
        Case::NoTradeoff
    } else {
        Case::Inconclusive
    }
}

pub fn classify_case(report: &TradeoffReport, tol: f64) -> Case {
    classify_interval(report.risk_gap.ci_low, report.risk_gap.ci_high, tol)
}
