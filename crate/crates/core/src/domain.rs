//! Inputs, labels, finite distributions, datasets and the risk functionals.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bits::BitVector;
use crate::error::{LabError, Result};
use crate::hypotheses::Hypothesis;

/// Tolerance on total probability mass.
pub const MASS_TOLERANCE: f64 = 1e-9;

/// Largest `n` for which `{0,1}^n` may be enumerated point by point.
pub const MAX_ENUMERABLE_DIM: usize = 24;

pub type Point = BitVector;

/// The boolean cube `{0,1}^n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DomainSpec {
    n: usize,
}

impl DomainSpec {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(LabError::param("n", "dimension must be at least 1"));
        }
        Ok(DomainSpec { n })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn size(&self) -> u128 {
        1u128 << self.n.min(127)
    }

    /// All `2^n` points in integer order of the bit pattern.
    pub fn points(&self) -> Result<impl Iterator<Item = Point> + Clone> {
        if self.n > MAX_ENUMERABLE_DIM {
            return Err(LabError::CapExceeded {
                cardinality: self.size(),
                cap: 1 << MAX_ENUMERABLE_DIM,
            });
        }
        let n = self.n;
        Ok((0..(1u64 << n)).map(move |i| BitVector::from_index(n, i)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Label {
    Zero,
    One,
}

impl Label {
    pub fn from_bool(b: bool) -> Self {
        if b {
            Label::One
        } else {
            Label::Zero
        }
    }

    pub fn is_positive(self) -> bool {
        self == Label::One
    }

    pub fn flipped(self) -> Self {
        Label::from_bool(!self.is_positive())
    }
}

impl Serialize for Label {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_u8(self.is_positive() as u8)
    }
}

impl<'de> Deserialize<'de> for Label {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        match u8::deserialize(d)? {
            0 => Ok(Label::Zero),
            1 => Ok(Label::One),
            v => Err(serde::de::Error::custom(format!("label must be 0 or 1, got {v}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledExample {
    pub x: Point,
    pub y: Label,
}

impl LabeledExample {
    pub fn new(x: Point, y: Label) -> Self {
        LabeledExample { x, y }
    }
}

/// An ordered sample of labelled points sharing one dimension.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "DatasetRepr")]
pub struct Dataset {
    n: usize,
    examples: Vec<LabeledExample>,
}

#[derive(Deserialize)]
struct DatasetRepr {
    n: usize,
    examples: Vec<LabeledExample>,
}

impl TryFrom<DatasetRepr> for Dataset {
    type Error = LabError;
    fn try_from(r: DatasetRepr) -> Result<Self> {
        Dataset::new(r.n, r.examples)
    }
}

impl Dataset {
    pub fn new(n: usize, examples: Vec<LabeledExample>) -> Result<Self> {
        for e in &examples {
            if e.x.len() != n {
                return Err(LabError::DimensionMismatch {
                    expected: n,
                    found: e.x.len(),
                });
            }
        }
        Ok(Dataset { n, examples })
    }

    pub fn empty(n: usize) -> Self {
        Dataset {
            n,
            examples: Vec::new(),
        }
    }

    /// Convenience constructor from `(bits, label)` pairs, e.g. `(&[1, 0], 1)`.
    pub fn from_pairs(n: usize, pairs: &[(&[u8], u8)]) -> Result<Self> {
        let examples = pairs
            .iter()
            .map(|(bits, y)| {
                let bools: Vec<bool> = bits.iter().map(|&b| b != 0).collect();
                LabeledExample::new(BitVector::from_bools(&bools), Label::from_bool(*y != 0))
            })
            .collect();
        Dataset::new(n, examples)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.examples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.examples.is_empty()
    }

    pub fn examples(&self) -> &[LabeledExample] {
        &self.examples
    }

    pub fn iter(&self) -> std::slice::Iter<'_, LabeledExample> {
        self.examples.iter()
    }
}

/// One atom of a finite distribution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub x: Point,
    pub y: Label,
    pub p: f64,
}

/// Exact probability table over labelled points.
///
/// Atoms are kept in canonical order: by the integer value of `x`, then by
/// label. Sampling walks the cumulative mass in that order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DistributionRepr")]
pub struct FiniteDistribution {
    n: usize,
    support: Vec<Atom>,
}

#[derive(Deserialize)]
struct DistributionRepr {
    n: usize,
    support: Vec<Atom>,
}

impl TryFrom<DistributionRepr> for FiniteDistribution {
    type Error = LabError;
    fn try_from(r: DistributionRepr) -> Result<Self> {
        FiniteDistribution::new(r.n, r.support)
    }
}

impl FiniteDistribution {
    pub fn new(n: usize, mut support: Vec<Atom>) -> Result<Self> {
        if n == 0 {
            return Err(LabError::InvalidDistribution("dimension must be at least 1".into()));
        }
        if support.is_empty() {
            return Err(LabError::InvalidDistribution("empty support".into()));
        }
        let mut total = 0.0;
        for a in &support {
            if a.x.len() != n {
                return Err(LabError::DimensionMismatch {
                    expected: n,
                    found: a.x.len(),
                });
            }
            if !(a.p >= 0.0 && a.p <= 1.0) {
                return Err(LabError::InvalidDistribution(format!(
                    "probability {} outside [0, 1]",
                    a.p
                )));
            }
            total += a.p;
        }
        if (total - 1.0).abs() > MASS_TOLERANCE {
            return Err(LabError::InvalidDistribution(format!(
                "total mass {total} is not 1"
            )));
        }
        support.sort_by(|a, b| a.x.cmp(&b.x).then(a.y.cmp(&b.y)));
        if support.windows(2).any(|w| w[0].x == w[1].x && w[0].y == w[1].y) {
            return Err(LabError::InvalidDistribution("duplicate support key".into()));
        }
        Ok(FiniteDistribution { n, support })
    }

    /// Mass on `(x, target(x))` for every `x` in the marginal.
    pub fn realizable(marginal: &[(Point, f64)], target: &Hypothesis) -> Result<Self> {
        Self::noisy(marginal, target, 0.0)
    }

    /// Labels follow `target` except that each is flipped with probability `noise`.
    pub fn noisy(marginal: &[(Point, f64)], target: &Hypothesis, noise: f64) -> Result<Self> {
        if !(0.0..0.5).contains(&noise) {
            return Err(LabError::param("noise_rate", format!("{noise} is outside [0, 0.5)")));
        }
        let n = marginal
            .first()
            .map(|(x, _)| x.len())
            .ok_or_else(|| LabError::InvalidDistribution("empty marginal".into()))?;
        let mut support = Vec::with_capacity(marginal.len() * 2);
        for (x, p) in marginal {
            let y = target.evaluate(x)?;
            support.push(Atom { x: x.clone(), y, p: p * (1.0 - noise) });
            if noise > 0.0 {
                support.push(Atom { x: x.clone(), y: y.flipped(), p: p * noise });
            }
        }
        Self::new(n, support)
    }

    /// Uniform marginal over `{0,1}^n`.
    pub fn uniform_marginal(n: usize) -> Result<Vec<(Point, f64)>> {
        let domain = DomainSpec::new(n)?;
        let p = 1.0 / domain.size() as f64;
        Ok(domain.points()?.map(|x| (x, p)).collect())
    }

    pub fn uniform_realizable(n: usize, target: &Hypothesis) -> Result<Self> {
        Self::realizable(&Self::uniform_marginal(n)?, target)
    }

    pub fn uniform_noisy(n: usize, target: &Hypothesis, noise: f64) -> Result<Self> {
        Self::noisy(&Self::uniform_marginal(n)?, target, noise)
    }

    /// The empirical measure of a nonempty dataset.
    pub fn empirical(sample: &Dataset) -> Result<Self> {
        if sample.is_empty() {
            return Err(LabError::EmptyDataset);
        }
        let mut counts: BTreeMap<(Point, Label), usize> = BTreeMap::new();
        for e in sample.iter() {
            *counts.entry((e.x.clone(), e.y)).or_default() += 1;
        }
        let m = sample.m() as f64;
        let support = counts
            .into_iter()
            .map(|((x, y), c)| Atom { x, y, p: c as f64 / m })
            .collect();
        Self::new(sample.n(), support)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn support(&self) -> &[Atom] {
        &self.support
    }

    /// Marginal mass of each point, in canonical order.
    pub fn marginal(&self) -> Vec<(Point, f64)> {
        let mut out: Vec<(Point, f64)> = Vec::new();
        for a in &self.support {
            match out.last_mut() {
                Some((x, p)) if *x == a.x => *p += a.p,
                _ => out.push((a.x.clone(), a.p)),
            }
        }
        out
    }
}

/// Reproducibility seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Seed(pub u64);

impl Seed {
    /// Seed for trial `t`: `base ^ t` followed by one splitmix64 finalisation.
    pub fn derive(self, t: u64) -> Seed {
        Seed(splitmix64(self.0 ^ t))
    }

    pub fn rng(self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.0)
    }
}

pub(crate) fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn check_dims(h: &Hypothesis, n: usize) -> Result<()> {
    match h.dimension() {
        Some(d) if d != n => Err(LabError::DimensionMismatch { expected: n, found: d }),
        _ => Ok(()),
    }
}

/// Probability that `h` mislabels a draw from `dist`.
pub fn exact_risk(h: &Hypothesis, dist: &FiniteDistribution) -> Result<f64> {
    check_dims(h, dist.n())?;
    let mut risk = 0.0;
    for a in dist.support() {
        if h.predict(&a.x) != a.y.is_positive() {
            risk += a.p;
        }
    }
    Ok(risk.clamp(0.0, 1.0))
}

/// Number of examples of `sample` that `h` mislabels.
pub fn empirical_errors(h: &Hypothesis, sample: &Dataset) -> Result<usize> {
    check_dims(h, sample.n())?;
    Ok(sample
        .iter()
        .filter(|e| h.predict(&e.x) != e.y.is_positive())
        .count())
}

/// Fraction of `sample` that `h` mislabels.
pub fn empirical_risk(h: &Hypothesis, sample: &Dataset) -> Result<f64> {
    if sample.is_empty() {
        return Err(LabError::EmptyDataset);
    }
    Ok(empirical_errors(h, sample)? as f64 / sample.m() as f64)
}

/// `|risk - empirical risk|` for a fixed hypothesis.
pub fn generalization_gap(h: &Hypothesis, sample: &Dataset, dist: &FiniteDistribution) -> Result<f64> {
    Ok((exact_risk(h, dist)? - empirical_risk(h, sample)?).abs())
}

/// Draws `m` i.i.d. examples by inverse CDF over the canonical support order.
pub fn draw_dataset(dist: &FiniteDistribution, m: usize, seed: Seed) -> Dataset {
    let mut cumulative = Vec::with_capacity(dist.support().len());
    let mut acc = 0.0;
    for a in dist.support() {
        acc += a.p;
        cumulative.push(acc);
    }
    let last = dist.support().len() - 1;
    let mut rng = seed.rng();
    let examples = (0..m)
        .map(|_| {
            let u = rng.gen::<f64>() * acc;
            let i = cumulative.partition_point(|&c| c <= u).min(last);
            let a = &dist.support()[i];
            LabeledExample::new(a.x.clone(), a.y)
        })
        .collect();
    Dataset { n: dist.n(), examples }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypotheses::Conjunction;

    /// Uniform on {0,1}^2 with y = x1.
    fn d1() -> FiniteDistribution {
        FiniteDistribution::uniform_realizable(2, &Conjunction::parse(2, "x1").unwrap().into()).unwrap()
    }

    fn conj(s: &str) -> Hypothesis {
        Conjunction::parse(2, s).unwrap().into()
    }

    #[test]
    fn exact_risk_examples() {
        let d = d1();
        assert_eq!(exact_risk(&conj("x1"), &d).unwrap(), 0.0);
        assert!((exact_risk(&Hypothesis::Const(Label::One), &d).unwrap() - 0.5).abs() < 1e-12);
        assert!((exact_risk(&conj("x1 & x2"), &d).unwrap() - 0.25).abs() < 1e-12);
    }

    #[test]
    fn exact_risk_dimension_mismatch() {
        let h: Hypothesis = Conjunction::parse(3, "x1").unwrap().into();
        assert!(matches!(exact_risk(&h, &d1()), Err(LabError::DimensionMismatch { .. })));
    }

    #[test]
    fn empirical_risk_examples() {
        let s = Dataset::from_pairs(2, &[(&[1, 1], 1), (&[0, 0], 1)]).unwrap();
        assert_eq!(empirical_risk(&Hypothesis::Const(Label::One), &s).unwrap(), 0.0);
        assert_eq!(empirical_risk(&Hypothesis::Const(Label::Zero), &s).unwrap(), 1.0);
        assert_eq!(empirical_risk(&conj("x1"), &s).unwrap(), 0.5);
        assert!(matches!(
            empirical_risk(&conj("x1"), &Dataset::empty(2)),
            Err(LabError::EmptyDataset)
        ));
    }

    #[test]
    fn generalization_gap_examples() {
        let s = Dataset::from_pairs(2, &[(&[1, 1], 1), (&[0, 0], 1)]).unwrap();
        let g = generalization_gap(&Hypothesis::Const(Label::One), &s, &d1()).unwrap();
        assert!((g - 0.5).abs() < 1e-12);

        // Sample listing the support at exact frequencies.
        let exact = Dataset::from_pairs(2, &[(&[0, 0], 0), (&[1, 0], 1), (&[0, 1], 0), (&[1, 1], 1)]).unwrap();
        for h in [conj("x2"), conj("x1 & !x2"), Hypothesis::Const(Label::One)] {
            assert!(generalization_gap(&h, &exact, &d1()).unwrap().abs() < 1e-12);
        }
        // Target of a realizable distribution.
        let s = draw_dataset(&d1(), 17, Seed(3));
        assert_eq!(generalization_gap(&conj("x1"), &s, &d1()).unwrap(), 0.0);
    }

    #[test]
    fn draw_dataset_examples() {
        let d = d1();
        assert!(draw_dataset(&d, 0, Seed(1)).is_empty());
        assert_eq!(draw_dataset(&d, 5, Seed(7)), draw_dataset(&d, 5, Seed(7)));

        let s = draw_dataset(&d, 10_000, Seed(7));
        let emp = FiniteDistribution::empirical(&s).unwrap();
        assert_eq!(emp.support().len(), 4);
        for (a, b) in emp.support().iter().zip(d.support()) {
            assert_eq!((&a.x, a.y), (&b.x, b.y));
            assert!((a.p - b.p).abs() < 0.02, "{a:?} vs {b:?}");
        }
    }

    #[test]
    fn zero_mass_atoms_never_drawn() {
        let x0 = BitVector::from_index(1, 0);
        let x1 = BitVector::from_index(1, 1);
        let d = FiniteDistribution::new(
            1,
            vec![
                Atom { x: x0, y: Label::Zero, p: 0.0 },
                Atom { x: x1.clone(), y: Label::One, p: 1.0 },
            ],
        )
        .unwrap();
        assert!(draw_dataset(&d, 500, Seed(9)).iter().all(|e| e.x == x1));
    }

    #[test]
    fn distribution_validation() {
        let x = BitVector::from_index(1, 0);
        let bad_mass = FiniteDistribution::new(1, vec![Atom { x: x.clone(), y: Label::Zero, p: 0.5 }]);
        assert!(bad_mass.is_err());
        let dup = FiniteDistribution::new(
            1,
            vec![
                Atom { x: x.clone(), y: Label::Zero, p: 0.5 },
                Atom { x, y: Label::Zero, p: 0.5 },
            ],
        );
        assert!(dup.is_err());
        assert!(FiniteDistribution::uniform_noisy(2, &Hypothesis::Const(Label::One), 0.7).is_err());
    }

    #[test]
    fn distribution_json_schema() {
        let d = d1();
        let v: serde_json::Value = serde_json::to_value(&d).unwrap();
        assert_eq!(v["n"], 2);
        assert_eq!(v["support"][1]["x"], serde_json::json!([1, 0]));
        assert_eq!(v["support"][1]["y"], 1);
        assert_eq!(v["support"][1]["p"], 0.25);
        let back: FiniteDistribution = serde_json::from_value(v).unwrap();
        assert_eq!(back, d);

        let bad = serde_json::json!({"n": 2, "support": [{"x": [1, 0], "y": 1, "p": 0.4}]});
        assert!(serde_json::from_value::<FiniteDistribution>(bad).is_err());
    }

    #[test]
    fn dataset_json_schema() {
        let s = Dataset::from_pairs(2, &[(&[1, 0], 1)]).unwrap();
        let text = serde_json::to_string(&s).unwrap();
        assert_eq!(text, r#"{"n":2,"examples":[{"x":[1,0],"y":1}]}"#);
        assert_eq!(serde_json::from_str::<Dataset>(&text).unwrap(), s);
        assert!(serde_json::from_str::<Dataset>(r#"{"n":3,"examples":[{"x":[1,0],"y":1}]}"#).is_err());
    }

    #[test]
    fn seeds_derive_distinct_streams() {
        let base = Seed(42);
        assert_ne!(base.derive(0), base.derive(1));
        assert_eq!(base.derive(5), base.derive(5));
    }
}
