//! Shattering, brute-force VC dimension and generalization-bound calculators.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::bits::BitVector;
use crate::domain::{empirical_errors, exact_risk, Dataset, DomainSpec, FiniteDistribution, Point};
use crate::error::{LabError, Result};
use crate::hypotheses::HypothesisClass;

/// Default bound on the subset size examined by [`vc_dimension`].
pub const DEFAULT_VC_SIZE_CAP: usize = 6;
/// Default bound on the number of point subsets examined by [`vc_dimension`].
pub const DEFAULT_VC_SUBSET_CAP: u64 = 10_000_000;

/// The label patterns a class induces on a point set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShatterCertificate {
    pub points: Vec<Point>,
    pub induced_count: u128,
    pub shattered: bool,
}

/// Computes `|H∘X|` by evaluating every member on `points`.
pub fn induced_partitions(class: &HypothesisClass, points: &[Point]) -> Result<ShatterCertificate> {
    for x in points {
        if x.len() != class.n() {
            return Err(LabError::DimensionMismatch { expected: class.n(), found: x.len() });
        }
    }
    let distinct: HashSet<&Point> = points.iter().collect();
    if distinct.len() != points.len() {
        return Err(LabError::DuplicatePoints);
    }
    let mut patterns: HashSet<BitVector> = HashSet::new();
    for h in class.enumerate()? {
        let bits: Vec<bool> = points.iter().map(|x| h.predict(x)).collect();
        patterns.insert(BitVector::from_bools(&bits));
    }
    let induced_count = patterns.len() as u128;
    let full = 1u128.checked_shl(points.len() as u32).unwrap_or(u128::MAX);
    Ok(ShatterCertificate {
        points: points.to_vec(),
        induced_count,
        shattered: induced_count == full,
    })
}

pub fn shatters(class: &HypothesisClass, points: &[Point]) -> Result<bool> {
    Ok(induced_partitions(class, points)?.shattered)
}

/// Result of the VC search. `exact` is false when a cap stopped the search
/// before it could rule out larger shattered sets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct VcDimension {
    pub value: usize,
    pub exact: bool,
    pub witness_subsets_examined: u64,
}

/// Largest `k <= size_cap` such that some `k`-subset of `{0,1}^n` is
/// shattered, with the default subset cap.
pub fn vc_dimension(class: &HypothesisClass, domain: DomainSpec, size_cap: usize) -> Result<VcDimension> {
    vc_dimension_with(class, domain, size_cap, DEFAULT_VC_SUBSET_CAP)
}

fn next_combination(idx: &mut [usize], total: usize) -> bool {
    let k = idx.len();
    for i in (0..k).rev() {
        if idx[i] < total - k + i {
            idx[i] += 1;
            for j in i + 1..k {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

pub fn vc_dimension_with(
    class: &HypothesisClass,
    domain: DomainSpec,
    size_cap: usize,
    subset_cap: u64,
) -> Result<VcDimension> {
    if domain.n() != class.n() {
        return Err(LabError::DimensionMismatch { expected: class.n(), found: domain.n() });
    }
    if size_cap > 63 {
        return Err(LabError::param("size_cap", "must be at most 63"));
    }
    if domain.size() > class.cap() as u128 {
        return Err(LabError::CapExceeded { cardinality: domain.size(), cap: class.cap() });
    }
    let points: Vec<Point> = domain.points()?.collect();
    let total = points.len();

    // Distinct functions computed by the class, as truth tables over the cube.
    let mut tables: HashSet<BitVector> = HashSet::new();
    for h in class.enumerate()? {
        let bits: Vec<bool> = points.iter().map(|x| h.predict(x)).collect();
        tables.insert(BitVector::from_bools(&bits));
    }
    let tables: Vec<BitVector> = tables.into_iter().collect();
    if tables.is_empty() {
        return Ok(VcDimension { value: 0, exact: true, witness_subsets_examined: 0 });
    }

    let mut examined = 0u64;
    let mut best = 0;
    let mut patterns: HashSet<u64> = HashSet::new();
    for k in 1..=size_cap.min(total) {
        // Fewer than 2^k functions cannot shatter k points.
        if (tables.len() as u128) < (1u128 << k) {
            return Ok(VcDimension { value: best, exact: true, witness_subsets_examined: examined });
        }
        let mut idx: Vec<usize> = (0..k).collect();
        let mut found = false;
        loop {
            examined += 1;
            if examined > subset_cap {
                return Ok(VcDimension { value: best, exact: false, witness_subsets_examined: examined - 1 });
            }
            patterns.clear();
            for t in &tables {
                let mut pat = 0u64;
                for (j, &p) in idx.iter().enumerate() {
                    pat |= (t.get(p) as u64) << j;
                }
                patterns.insert(pat);
                if patterns.len() == 1 << k {
                    break;
                }
            }
            if patterns.len() == 1 << k {
                found = true;
                break;
            }
            if !next_combination(&mut idx, total) {
                break;
            }
        }
        if !found {
            return Ok(VcDimension { value: best, exact: true, witness_subsets_examined: examined });
        }
        best = k;
    }
    // Either every point is shattered or the size cap was reached.
    Ok(VcDimension { value: best, exact: best == total, witness_subsets_examined: examined })
}

/// Parameters of a PAC statement.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PacParams {
    pub d: usize,
    pub m: u64,
    pub delta: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
}

impl PacParams {
    pub fn new(d: usize, m: u64, delta: f64) -> Result<Self> {
        let p = PacParams { d, m, delta, epsilon: None };
        p.validate()?;
        Ok(p)
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Result<Self> {
        self.epsilon = Some(epsilon);
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.m == 0 {
            return Err(LabError::param("m", "must be positive"));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(LabError::param("delta", format!("{} is outside (0, 1)", self.delta)));
        }
        if let Some(e) = self.epsilon {
            if !(e > 0.0 && e < 1.0) {
                return Err(LabError::param("epsilon", format!("{e} is outside (0, 1)")));
            }
        }
        Ok(())
    }

    fn require_m_at_least_d(&self) -> Result<()> {
        if self.m < self.d.max(1) as u64 {
            return Err(LabError::param("m", format!("must be at least max(d, 1) = {}", self.d.max(1))));
        }
        Ok(())
    }
}

/// Constants for the uniform-convergence bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum BoundMode {
    /// `C * sqrt((d + ln(1/delta)) / m)`.
    Paper { constant: f64 },
    /// `sqrt((8 d ln(2 e m / d) + 8 ln(4/delta)) / m)`.
    Classical,
}

impl BoundMode {
    pub const DEFAULT_CONSTANT: f64 = 2.0;

    pub fn paper() -> Self {
        BoundMode::Paper { constant: Self::DEFAULT_CONSTANT }
    }

    pub fn name(&self) -> &'static str {
        match self {
            BoundMode::Paper { .. } => "paper",
            BoundMode::Classical => "classical",
        }
    }
}

/// Upper bound on the worst-case generalization gap holding with
/// probability at least `1 - delta`.
pub fn vc_bound(p: &PacParams, mode: BoundMode) -> Result<f64> {
    p.validate()?;
    let (d, m, delta) = (p.d as f64, p.m as f64, p.delta);
    match mode {
        BoundMode::Paper { constant } => {
            if constant.is_nan() || constant <= 0.0 {
                return Err(LabError::param("constant", "must be positive"));
            }
            Ok(constant * ((d + (1.0 / delta).ln()) / m).sqrt())
        }
        BoundMode::Classical => {
            p.require_m_at_least_d()?;
            let dd = p.d.max(1) as f64;
            Ok(((8.0 * d * (2.0 * std::f64::consts::E * m / dd).ln() + 8.0 * (4.0 / delta).ln()) / m).sqrt())
        }
    }
}

/// Realizable-case bound `(4 d ln(2 e m / d) + 4 ln(2/delta)) / m`.
pub fn fast_rate_bound(p: &PacParams) -> Result<f64> {
    p.validate()?;
    p.require_m_at_least_d()?;
    let (d, m) = (p.d as f64, p.m as f64);
    let dd = p.d.max(1) as f64;
    Ok((4.0 * d * (2.0 * std::f64::consts::E * m / dd).ln() + 4.0 * (2.0 / p.delta).ln()) / m)
}

/// Smallest `m` at which `vc_bound` drops to `epsilon`.
pub fn vc_sample_complexity(d: usize, epsilon: f64, delta: f64, mode: BoundMode) -> Result<u64> {
    let probe = PacParams::new(d, d.max(1) as u64, delta)?.with_epsilon(epsilon)?;
    let at = |m: u64| vc_bound(&PacParams { m, ..probe }, mode);
    let mut hi = probe.m;
    while at(hi)? > epsilon {
        hi = hi.checked_mul(2).ok_or_else(|| LabError::param("epsilon", "too small"))?;
    }
    let mut lo = probe.m;
    if at(lo)? <= epsilon {
        return Ok(lo);
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if at(mid)? <= epsilon {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// `max over h in class of |risk(h) - empirical risk(h)|`.
pub fn worst_case_gen_error(class: &HypothesisClass, sample: &Dataset, dist: &FiniteDistribution) -> Result<f64> {
    if sample.is_empty() {
        return Err(LabError::EmptyDataset);
    }
    let m = sample.m() as f64;
    let mut worst: Option<f64> = None;
    for h in class.enumerate()? {
        let gap = (exact_risk(&h, dist)? - empirical_errors(&h, sample)? as f64 / m).abs();
        worst = Some(worst.map_or(gap, |w| w.max(gap)));
    }
    worst.ok_or_else(|| LabError::EmptyClass(class.name().to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{draw_dataset, generalization_gap, Seed};
    use crate::hypotheses::{Conjunction, Hypothesis, Predicate};

    fn pt(bits: &[u8]) -> Point {
        BitVector::from_bools(&bits.iter().map(|&b| b != 0).collect::<Vec<_>>())
    }

    #[test]
    fn induced_partition_examples() {
        let k = HypothesisClass::constants(2).unwrap();
        let one = induced_partitions(&k, &[pt(&[1, 0])]).unwrap();
        assert_eq!((one.induced_count, one.shattered), (2, true));
        let two = induced_partitions(&k, &[pt(&[1, 0]), pt(&[0, 1])]).unwrap();
        assert_eq!((two.induced_count, two.shattered), (2, false));

        let c = HypothesisClass::conjunctions(2).unwrap();
        let cert = induced_partitions(&c, &[pt(&[1, 0]), pt(&[0, 1])]).unwrap();
        assert_eq!((cert.induced_count, cert.shattered), (4, true));
        assert!(shatters(&c, &[pt(&[1, 0]), pt(&[0, 1])]).unwrap());
        assert!(!shatters(&k, &[pt(&[0, 0]), pt(&[1, 1])]).unwrap());

        assert!(matches!(
            induced_partitions(&c, &[pt(&[1, 0]), pt(&[1, 0])]),
            Err(LabError::DuplicatePoints)
        ));
    }

    #[test]
    fn induced_count_monotone_in_points() {
        let c = HypothesisClass::dnf3(2).unwrap();
        let pts: Vec<Point> = DomainSpec::new(2).unwrap().points().unwrap().collect();
        let mut last = 0;
        for k in 0..=pts.len() {
            let cert = induced_partitions(&c, &pts[..k]).unwrap();
            assert!(cert.induced_count <= 1 << k);
            assert!(cert.induced_count >= last);
            last = cert.induced_count;
        }
    }

    #[test]
    fn vc_examples() {
        let d2 = DomainSpec::new(2).unwrap();
        let d3 = DomainSpec::new(3).unwrap();
        assert_eq!(vc_dimension(&HypothesisClass::constants(2).unwrap(), d2, 6).unwrap().value, 1);
        let v = vc_dimension(&HypothesisClass::conjunctions(2).unwrap(), d2, 6).unwrap();
        assert_eq!((v.value, v.exact), (2, true));
        let v = vc_dimension(&HypothesisClass::conjunctions(3).unwrap(), d3, 6).unwrap();
        assert_eq!((v.value, v.exact), (3, true));
    }

    #[test]
    fn vc_caps_flag_lower_bounds() {
        let d3 = DomainSpec::new(3).unwrap();
        let c = HypothesisClass::conjunctions(3).unwrap();
        let v = vc_dimension(&c, d3, 2).unwrap();
        assert_eq!((v.value, v.exact), (2, false));
        let v = vc_dimension_with(&c, d3, 6, 3).unwrap();
        assert!(!v.exact);
        // All functions on two points: the whole cube is shattered.
        let t = HypothesisClass::trees(1, 1).unwrap();
        let v = vc_dimension(&t, DomainSpec::new(1).unwrap(), 6).unwrap();
        assert_eq!((v.value, v.exact), (2, true));
        assert!(vc_dimension(&c, d3, 64).is_err());
        assert_eq!(vc_dimension(&c.restrict(Predicate::Never), d3, 6).unwrap().value, 0);
    }

    #[test]
    fn paper_bound_fixture_and_scaling() {
        let p = PacParams::new(2, 100, 0.05).unwrap();
        let b = vc_bound(&p, BoundMode::paper()).unwrap();
        assert!((b - 0.4470).abs() < 1e-4, "{b}");
        let q = PacParams { m: 400, ..p };
        assert!((vc_bound(&q, BoundMode::paper()).unwrap() * 2.0 - b).abs() < 1e-12);
    }

    #[test]
    fn classical_bound_fixture() {
        // sqrt((24 ln(2e*200/3) + 8 ln 80) / 200), evaluated independently.
        let p = PacParams::new(3, 200, 0.05).unwrap();
        let b = vc_bound(&p, BoundMode::Classical).unwrap();
        assert!((b - 0.939_373_906_599_358_3).abs() < 1e-12, "{b}");
        assert!(vc_bound(&PacParams::new(5, 3, 0.05).unwrap(), BoundMode::Classical).is_err());
    }

    #[test]
    fn bounds_are_monotone() {
        for mode in [BoundMode::paper(), BoundMode::Classical] {
            let b = |d, m, delta| vc_bound(&PacParams::new(d, m, delta).unwrap(), mode).unwrap();
            assert!(b(3, 100, 0.05) > b(3, 200, 0.05));
            assert!(b(3, 100, 0.05) < b(4, 100, 0.05));
            assert!(b(3, 100, 0.05) < b(3, 100, 0.01));
        }
    }

    #[test]
    fn fast_rate_examples() {
        let f = |d, m| fast_rate_bound(&PacParams::new(d, m, 0.05).unwrap()).unwrap();
        assert!(f(2, 1000) / f(2, 100) < 0.2);
        for m in 3..500 {
            assert!(f(3, m + 1) <= f(3, m));
        }
        let slow = vc_bound(&PacParams::new(3, 10_000, 0.05).unwrap(), BoundMode::paper()).unwrap();
        assert!(f(3, 10_000) < slow);
        assert!(fast_rate_bound(&PacParams::new(4, 2, 0.05).unwrap()).is_err());
        // d = 0 uses max(d, 1) inside the logarithm.
        assert!(f(0, 10) > 0.0);
    }

    #[test]
    fn parameter_validation() {
        assert!(PacParams::new(2, 0, 0.05).is_err());
        assert!(PacParams::new(2, 10, 1.0).is_err());
        assert!(PacParams::new(2, 10, 0.5).unwrap().with_epsilon(0.0).is_err());
        assert!(vc_bound(&PacParams::new(2, 10, 0.5).unwrap(), BoundMode::Paper { constant: -1.0 }).is_err());
    }

    #[test]
    fn sample_complexity_inverts_bound() {
        let m = vc_sample_complexity(3, 0.1, 0.05, BoundMode::paper()).unwrap();
        let at = |m| vc_bound(&PacParams::new(3, m, 0.05).unwrap(), BoundMode::paper()).unwrap();
        assert!(at(m) <= 0.1 && at(m - 1) > 0.1);
    }

    #[test]
    fn worst_case_examples() {
        // D1: uniform on {0,1}^2, y = x1.
        let d1 = FiniteDistribution::uniform_realizable(2, &Conjunction::parse(2, "x1").unwrap().into()).unwrap();
        let k = HypothesisClass::constants(2).unwrap();
        let s = Dataset::from_pairs(2, &[(&[1, 1], 1)]).unwrap();
        assert!((worst_case_gen_error(&k, &s, &d1).unwrap() - 0.5).abs() < 1e-12);

        let exact = Dataset::from_pairs(2, &[(&[0, 0], 0), (&[1, 0], 1), (&[0, 1], 0), (&[1, 1], 1)]).unwrap();
        let c = HypothesisClass::conjunctions(2).unwrap();
        assert!(worst_case_gen_error(&c, &exact, &d1).unwrap() < 1e-12);

        let h: Hypothesis = Conjunction::parse(2, "!x2").unwrap().into();
        let single = HypothesisClass::explicit("single", 2, vec![h.clone()]).unwrap();
        let s = draw_dataset(&d1, 7, Seed(2));
        assert_eq!(
            worst_case_gen_error(&single, &s, &d1).unwrap(),
            generalization_gap(&h, &s, &d1).unwrap()
        );
    }
}
