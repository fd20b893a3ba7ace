//! Learning 3-term DNF: exhaustive proper ERM over `3^(3n)` formulas versus
//! the polynomial route through the literal-triple expansion, where every
//! 3-term DNF becomes a conjunction.

use std::time::{Duration, Instant};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bits::BitVector;
use crate::domain::{draw_dataset, Dataset, DomainSpec, FiniteDistribution, LabeledExample, Point, Seed};
use crate::erm::{erm_exhaustive, learn_conjunction_realizable, ErmResult};
use crate::error::{LabError, Result};
use crate::hypotheses::{
    Conjunction, ExpandedConjunction, Hypothesis, HypothesisClass, Literal, ThreeTermDnf, VarState, DEFAULT_ENUM_CAP,
};

/// `(2n)^3`.
pub fn expanded_dimension(n: usize) -> usize {
    (2 * n).pow(3)
}

/// Position of a literal in the order `x1, !x1, x2, !x2, ...`.
pub fn literal_index(l: Literal) -> usize {
    2 * (l.var - 1) + l.negated as usize
}

pub fn literal_at(index: usize) -> Literal {
    Literal { var: index / 2 + 1, negated: index % 2 == 1 }
}

/// Literal triples `(u, v, w)` in lexicographic order of literal indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExpansionMap {
    n: usize,
    triples: Vec<[Literal; 3]>,
}

impl ExpansionMap {
    pub fn new(n: usize) -> Self {
        let k = 2 * n;
        let mut triples = Vec::with_capacity(k * k * k);
        for a in 0..k {
            for b in 0..k {
                for c in 0..k {
                    triples.push([literal_at(a), literal_at(b), literal_at(c)]);
                }
            }
        }
        ExpansionMap { n, triples }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn triples(&self) -> &[[Literal; 3]] {
        &self.triples
    }

    pub fn dimension(&self) -> usize {
        self.triples.len()
    }

    /// Coordinate of the triple `(u, v, w)`.
    pub fn coordinate(&self, u: Literal, v: Literal, w: Literal) -> usize {
        let k = 2 * self.n;
        (literal_index(u) * k + literal_index(v)) * k + literal_index(w)
    }
}

pub(crate) fn psi_expand_unchecked(x: &Point, map: &ExpansionMap) -> BitVector {
    let k = 2 * map.n;
    let lit: Vec<bool> = (0..k).map(|i| literal_at(i).eval(x)).collect();
    let mut out = BitVector::zeros(map.dimension());
    let mut idx = 0;
    for &a in &lit {
        for &b in &lit {
            let ab = a || b;
            for &c in &lit {
                if ab || c {
                    out.set(idx, true);
                }
                idx += 1;
            }
        }
    }
    out
}

/// Coordinate `(u, v, w)` of the result is `u(x) | v(x) | w(x)`.
pub fn psi_expand(x: &Point, map: &ExpansionMap) -> Result<BitVector> {
    if x.len() != map.n {
        return Err(LabError::DimensionMismatch { expected: map.n, found: x.len() });
    }
    Ok(psi_expand_unchecked(x, map))
}

/// Expands every input; labels and order are kept.
pub fn expand_dataset(sample: &Dataset, map: &ExpansionMap) -> Result<Dataset> {
    if sample.n() != map.n {
        return Err(LabError::DimensionMismatch { expected: map.n, found: sample.n() });
    }
    let examples = sample
        .iter()
        .map(|e| LabeledExample::new(psi_expand_unchecked(&e.x, map), e.y))
        .collect();
    Dataset::new(map.dimension(), examples)
}

/// The conjunction of `(u | v | w)` over `u in A1, v in A2, w in A3`.
pub fn dnf_as_expanded_conjunction(dnf: &ThreeTermDnf, map: &ExpansionMap) -> Result<ExpandedConjunction> {
    let [a, b, c] = &dnf.terms;
    let mut inner = Conjunction::empty(map.dimension());
    let (la, lb, lc) = (a.literals(), b.literals(), c.literals());
    for &u in &la {
        for &v in &lb {
            for &w in &lc {
                let coord = map.coordinate(u, v, w);
                inner.set_state(coord + 1, VarState::Positive);
            }
        }
    }
    ExpandedConjunction::new(map.n, inner)
}

/// Elimination learning in the expanded space, wrapped so that evaluation
/// expands inputs on the fly.
pub fn learn_3dnf_via_expansion(sample: &Dataset, n: usize) -> Result<Hypothesis> {
    if sample.n() != n {
        return Err(LabError::DimensionMismatch { expected: n, found: sample.n() });
    }
    let map = ExpansionMap::new(n);
    let expanded = expand_dataset(sample, &map)?;
    let inner = learn_conjunction_realizable(&expanded)?;
    Ok(ExpandedConjunction::new(n, inner)?.into())
}

/// Exhaustive proper ERM over all 3-term DNFs on `n` variables.
pub fn erm_3dnf_exhaustive(sample: &Dataset, n: usize, cap: u64) -> Result<ErmResult> {
    erm_exhaustive(&HypothesisClass::dnf3(n)?.with_cap(cap), sample)
}

/// Logarithm used by the sample-complexity calculators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LogBase {
    #[default]
    Natural,
    Two,
    Ten,
}

impl LogBase {
    pub fn log(self, v: f64) -> f64 {
        match self {
            LogBase::Natural => v.ln(),
            LogBase::Two => v.log2(),
            LogBase::Ten => v.log10(),
        }
    }
}

fn check_eps_delta(epsilon: f64, delta: f64) -> Result<()> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(LabError::param("epsilon", format!("{epsilon} is outside (0, 1)")));
    }
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(LabError::param("delta", format!("{delta} is outside (0, 1]")));
    }
    Ok(())
}

/// `3 n log(3/delta) / epsilon` before rounding up.
pub fn sample_complexity_3dnf_raw(n: usize, epsilon: f64, delta: f64, base: LogBase) -> Result<f64> {
    check_eps_delta(epsilon, delta)?;
    Ok(3.0 * n as f64 * base.log(3.0 / delta) / epsilon)
}

/// `ceil(3 n log(3/delta) / epsilon)`.
pub fn sample_complexity_3dnf(n: usize, epsilon: f64, delta: f64, base: LogBase) -> Result<u64> {
    Ok(sample_complexity_3dnf_raw(n, epsilon, delta, base)?.ceil() as u64)
}

/// `n^3 log(1/delta) / epsilon` before rounding up.
pub fn sample_complexity_expanded_raw(n: usize, epsilon: f64, delta: f64, base: LogBase) -> Result<f64> {
    check_eps_delta(epsilon, delta)?;
    Ok((n as f64).powi(3) * base.log(1.0 / delta) / epsilon)
}

/// `ceil(n^3 log(1/delta) / epsilon)`.
pub fn sample_complexity_expanded(n: usize, epsilon: f64, delta: f64, base: LogBase) -> Result<u64> {
    Ok(sample_complexity_expanded_raw(n, epsilon, delta, base)?.ceil() as u64)
}

fn random_term<R: Rng>(n: usize, rng: &mut R) -> Conjunction {
    let mut c = Conjunction::empty(n);
    for var in 1..=n {
        let s = match rng.gen_range(0..3u8) {
            0 => VarState::Absent,
            1 => VarState::Positive,
            _ => VarState::Negated,
        };
        c.set_state(var, s);
    }
    c
}

fn is_constant_function(dnf: &ThreeTermDnf) -> bool {
    // Terms are never contradictory, so only constant-1 is possible.
    if dnf.terms.iter().any(|t| t.literal_count() == 0) {
        return true;
    }
    let n = dnf.n();
    if n > 12 {
        return false;
    }
    DomainSpec::new(n)
        .and_then(|d| d.points())
        .map(|mut pts| pts.all(|x| dnf.satisfied_by(&x)))
        .unwrap_or(false)
}

/// A random non-constant 3-term DNF: each variable of each term is absent,
/// positive or negated with probability 1/3.
pub fn random_3dnf_target(n: usize, seed: Seed) -> Result<Hypothesis> {
    DomainSpec::new(n)?;
    let mut rng = seed.rng();
    loop {
        let dnf = ThreeTermDnf {
            terms: [random_term(n, &mut rng), random_term(n, &mut rng), random_term(n, &mut rng)],
        };
        if !is_constant_function(&dnf) {
            return Ok(dnf.into());
        }
    }
}

/// One row of the runtime comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingRecord {
    pub n: usize,
    pub class_cardinality: u128,
    pub expanded_dimension: usize,
    /// Measured, or projected when `exhaustive_projected` is set.
    pub exhaustive_seconds: f64,
    pub exhaustive_projected: bool,
    pub expansion_learn_seconds: f64,
}

impl ScalingRecord {
    pub const CSV_HEADER: [&'static str; 6] = [
        "n",
        "class_cardinality",
        "expanded_dim",
        "exhaustive_seconds",
        "exhaustive_projected",
        "expansion_seconds",
    ];
}

#[derive(Debug, Clone, Copy)]
pub struct BenchOptions {
    pub m: usize,
    pub seed: Seed,
    /// Largest class that is actually scanned.
    pub exhaustive_cap: u64,
    /// Timed repetitions per learner; the median is reported.
    pub repetitions: usize,
}

impl Default for BenchOptions {
    fn default() -> Self {
        BenchOptions {
            m: 100,
            seed: Seed(0),
            exhaustive_cap: DEFAULT_ENUM_CAP,
            repetitions: 3,
        }
    }
}

fn median_time<F: FnMut() -> Result<()>>(reps: usize, mut f: F) -> Result<Duration> {
    let mut times = Vec::with_capacity(reps);
    for _ in 0..reps.max(1) {
        let start = Instant::now();
        f()?;
        times.push(start.elapsed());
    }
    times.sort();
    Ok(times[times.len() / 2])
}

fn bench_sample(n: usize, opts: &BenchOptions) -> Result<Dataset> {
    let target = random_3dnf_target(n, opts.seed.derive(n as u64))?;
    let dist = FiniteDistribution::uniform_realizable(n, &target)?;
    Ok(draw_dataset(&dist, opts.m, opts.seed.derive(1000 + n as u64)))
}

fn time_exhaustive(sample: &Dataset, n: usize, opts: &BenchOptions) -> Result<f64> {
    Ok(median_time(opts.repetitions, || {
        std::hint::black_box(erm_3dnf_exhaustive(sample, n, opts.exhaustive_cap)?);
        Ok(())
    })?
    .as_secs_f64())
}

/// Times both learners for each `n` on a realizable sample of size `m`.
///
/// Sizes whose class exceeds the cap get a projected exhaustive time: the
/// per-formula cost at the largest measured `n` times `3^(3n)`. Timings run
/// on the calling thread only.
pub fn benchmark_scaling(n_values: &[usize], opts: BenchOptions) -> Result<Vec<ScalingRecord>> {
    let mut ns = n_values.to_vec();
    ns.sort_unstable();
    let mut per_formula: Option<f64> = None;
    let mut records = Vec::with_capacity(ns.len());
    for &n in &ns {
        let sample = bench_sample(n, &opts)?;
        let cardinality = HypothesisClass::dnf3(n)?.family_cardinality();
        let expansion = median_time(opts.repetitions, || {
            std::hint::black_box(learn_3dnf_via_expansion(&sample, n)?);
            Ok(())
        })?
        .as_secs_f64();
        let (exhaustive_seconds, projected) = if cardinality <= opts.exhaustive_cap as u128 {
            let t = time_exhaustive(&sample, n, &opts)?;
            per_formula = Some(t / cardinality as f64);
            (t, false)
        } else {
            let cost = match per_formula {
                Some(c) => c,
                None => {
                    let calib = bench_sample(2, &opts)?;
                    time_exhaustive(&calib, 2, &opts)? / 729.0
                }
            };
            (cost * cardinality as f64, true)
        };
        records.push(ScalingRecord {
            n,
            class_cardinality: cardinality,
            expanded_dimension: expanded_dimension(n),
            exhaustive_seconds,
            exhaustive_projected: projected,
            expansion_learn_seconds: expansion,
        });
    }
    Ok(records)
}

/// Writes records as CSV with the columns of [`ScalingRecord::CSV_HEADER`].
pub fn write_scaling_csv<W: std::io::Write>(records: &[ScalingRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(ScalingRecord::CSV_HEADER)?;
    for r in records {
        w.write_record([
            r.n.to_string(),
            r.class_cardinality.to_string(),
            r.expanded_dimension.to_string(),
            r.exhaustive_seconds.to_string(),
            r.exhaustive_projected.to_string(),
            r.expansion_learn_seconds.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
