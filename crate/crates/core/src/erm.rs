//! Empirical risk minimization: exhaustive search with canonical
//! tie-breaking, the elimination learner for conjunctions, and a budgeted
//! hill climber whose shortfall is the optimization error.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::domain::{empirical_errors, Dataset, Label, Seed};
use crate::error::{LabError, Result};
use crate::hypotheses::{Conjunction, Family, Hypothesis, HypothesisClass, TreeNode, VarState};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErmResult {
    /// First minimizer in canonical order.
    pub chosen: Hypothesis,
    pub min_empirical_risk: f64,
    pub minimizer_count: u64,
    /// Members visited by the scan.
    #[serde(skip)]
    pub scanned: u64,
}

fn check_inputs(class: &HypothesisClass, sample: &Dataset) -> Result<()> {
    if sample.is_empty() {
        return Err(LabError::EmptyDataset);
    }
    if class.n() != sample.n() {
        return Err(LabError::DimensionMismatch { expected: class.n(), found: sample.n() });
    }
    class.check_cap()
}

#[inline]
fn errors(h: &Hypothesis, sample: &Dataset) -> usize {
    sample
        .iter()
        .filter(|e| h.predict(&e.x) != e.y.is_positive())
        .count()
}

/// Scans `class` in canonical order and returns its first empirical-risk
/// minimizer on `sample`.
pub fn erm_exhaustive(class: &HypothesisClass, sample: &Dataset) -> Result<ErmResult> {
    check_inputs(class, sample)?;
    let mut best: Option<(usize, Hypothesis)> = None;
    let mut count = 0u64;
    let mut scanned = 0u64;
    for h in class.enumerate()? {
        scanned += 1;
        let e = errors(&h, sample);
        match &best {
            Some((b, _)) if e > *b => {}
            Some((b, _)) if e == *b => count += 1,
            _ => {
                best = Some((e, h));
                count = 1;
            }
        }
    }
    let (e, chosen) = best.ok_or_else(|| LabError::EmptyClass(class.name().to_string()))?;
    Ok(ErmResult {
        chosen,
        min_empirical_risk: e as f64 / sample.m() as f64,
        minimizer_count: count,
        scanned,
    })
}

/// All empirical-risk minimizers in canonical order.
pub fn erm_set(class: &HypothesisClass, sample: &Dataset) -> Result<Vec<Hypothesis>> {
    check_inputs(class, sample)?;
    let mut best = usize::MAX;
    let mut out = Vec::new();
    for h in class.enumerate()? {
        let e = errors(&h, sample);
        if e < best {
            best = e;
            out.clear();
        }
        if e == best {
            out.push(h);
        }
    }
    if out.is_empty() {
        return Err(LabError::EmptyClass(class.name().to_string()));
    }
    Ok(out)
}

/// Smallest empirical error count over the class.
pub(crate) fn min_errors(class: &HypothesisClass, sample: &Dataset) -> Result<usize> {
    check_inputs(class, sample)?;
    class
        .enumerate()?
        .map(|h| errors(&h, sample))
        .min()
        .ok_or_else(|| LabError::EmptyClass(class.name().to_string()))
}

/// Elimination learner: start from all `2n` literals and drop every literal
/// falsified by a positive example.
///
/// On data labelled by some conjunction the result is the most specific
/// consistent conjunction. With no positive examples it stays contradictory.
pub fn learn_conjunction_realizable(sample: &Dataset) -> Result<Conjunction> {
    if sample.is_empty() {
        return Err(LabError::EmptyDataset);
    }
    let mut c = Conjunction::full(sample.n());
    for e in sample.iter().filter(|e| e.y.is_positive()) {
        c.eliminate_falsified(&e.x);
    }
    Ok(c)
}

/// Negative examples that `c` labels positive. Nonzero means the sample is
/// not realizable by a conjunction.
pub fn negative_violations(c: &Conjunction, sample: &Dataset) -> usize {
    sample
        .iter()
        .filter(|e| !e.y.is_positive() && c.satisfied_by(&e.x))
        .count()
}

/// `empirical risk(h) - min over class`; `h` must belong to the class.
pub fn optimization_error(h: &Hypothesis, class: &HypothesisClass, sample: &Dataset) -> Result<f64> {
    if !class.contains(h) {
        return Err(LabError::NotAMember(class.name().to_string()));
    }
    let best = min_errors(class, sample)?;
    let own = empirical_errors(h, sample)?;
    Ok(own.saturating_sub(best) as f64 / sample.m() as f64)
}

fn conj_neighbours(c: &Conjunction) -> Vec<Conjunction> {
    let mut out = Vec::with_capacity(2 * c.n());
    for var in 1..=c.n() {
        let current = c.state(var);
        for s in [VarState::Absent, VarState::Positive, VarState::Negated] {
            if s != current {
                let mut nb = c.clone();
                nb.set_state(var, s);
                out.push(nb);
            }
        }
    }
    out
}

fn tree_neighbours(node: &TreeNode, depth: usize, max_depth: usize, n: usize) -> Vec<TreeNode> {
    let mut out = Vec::new();
    match node {
        TreeNode::Leaf(l) => {
            out.push(TreeNode::Leaf(l.flipped()));
            if depth < max_depth {
                for var in 1..=n {
                    out.push(TreeNode::split(var, TreeNode::Leaf(*l), TreeNode::Leaf(l.flipped())));
                    out.push(TreeNode::split(var, TreeNode::Leaf(l.flipped()), TreeNode::Leaf(*l)));
                }
            }
        }
        TreeNode::Split { var, zero, one } => {
            out.push(TreeNode::Leaf(Label::Zero));
            out.push(TreeNode::Leaf(Label::One));
            for v in (1..=n).filter(|v| v != var) {
                out.push(TreeNode::Split { var: v, zero: zero.clone(), one: one.clone() });
            }
            for z in tree_neighbours(zero, depth + 1, max_depth, n) {
                out.push(TreeNode::Split { var: *var, zero: z.into(), one: one.clone() });
            }
            for o in tree_neighbours(one, depth + 1, max_depth, n) {
                out.push(TreeNode::Split { var: *var, zero: zero.clone(), one: o.into() });
            }
        }
    }
    out
}

/// Single-edit neighbours of `h` inside the class (predicate applied).
pub fn neighbours(h: &Hypothesis, class: &HypothesisClass) -> Result<Vec<Hypothesis>> {
    let raw: Vec<Hypothesis> = match (class.family(), h) {
        (Family::Constants, Hypothesis::Const(l)) => vec![Hypothesis::Const(l.flipped())],
        (Family::Conjunctions, Hypothesis::Conjunction(c)) => {
            conj_neighbours(c).into_iter().map(Hypothesis::Conjunction).collect()
        }
        (Family::ThreeTermDnf, Hypothesis::ThreeTermDnf(d)) => {
            let mut out = Vec::new();
            for t in 0..3 {
                for nb in conj_neighbours(&d.terms[t]) {
                    let mut dd = d.clone();
                    dd.terms[t] = nb;
                    out.push(dd.into());
                }
            }
            out
        }
        (Family::DecisionTrees { max_depth }, Hypothesis::DecisionTree(t)) => {
            tree_neighbours(t.root(), 0, *max_depth, class.n())
                .into_iter()
                .map(|root| crate::hypotheses::DecisionTree::new(class.n(), root).map(Hypothesis::from))
                .collect::<Result<_>>()?
        }
        (Family::Explicit(_), _) => return Err(LabError::UnsupportedFamily("explicit".into())),
        _ => return Err(LabError::NotAMember(class.name().to_string())),
    };
    Ok(raw.into_iter().filter(|nb| class.contains(nb)).collect())
}

/// A uniformly random member of the class.
pub fn random_member<R: Rng>(class: &HypothesisClass, rng: &mut R) -> Result<Hypothesis> {
    let card = class.family_cardinality();
    if card == 0 {
        return Err(LabError::EmptyClass(class.name().to_string()));
    }
    let bound = card.min(u64::MAX as u128) as u64;
    for _ in 0..10_000 {
        let h = class.unrank(rng.gen_range(0..bound) as u128)?;
        if class.predicate().judge(&h) {
            return Ok(h);
        }
    }
    let members: Vec<Hypothesis> = class.enumerate()?.collect();
    members
        .choose(rng)
        .cloned()
        .ok_or_else(|| LabError::EmptyClass(class.name().to_string()))
}

/// Random-restart first-improvement hill climbing on empirical risk, using at
/// most `budget` empirical-risk evaluations.
///
/// A budget that covers the whole class is spent on an exhaustive scan.
pub fn greedy_approx_erm(class: &HypothesisClass, sample: &Dataset, budget: u64, seed: Seed) -> Result<Hypothesis> {
    if budget == 0 {
        return Err(LabError::param("budget", "must be at least 1"));
    }
    if sample.is_empty() {
        return Err(LabError::EmptyDataset);
    }
    if matches!(class.family(), Family::Explicit(_)) {
        return Err(LabError::UnsupportedFamily("explicit".into()));
    }
    if class.check_cap().is_ok() && budget as u128 >= class.cardinality()? {
        return Ok(erm_exhaustive(class, sample)?.chosen);
    }
    let mut rng = seed.rng();
    let mut spent = 0u64;
    let mut best: Option<(usize, Hypothesis)> = None;
    'restarts: while spent < budget {
        let mut current = random_member(class, &mut rng)?;
        let mut current_err = errors(&current, sample);
        spent += 1;
        if best.as_ref().is_none_or(|(b, _)| current_err < *b) {
            best = Some((current_err, current.clone()));
        }
        loop {
            let mut nbs = neighbours(&current, class)?;
            nbs.shuffle(&mut rng);
            let mut moved = false;
            for nb in nbs {
                if spent >= budget {
                    break 'restarts;
                }
                let e = errors(&nb, sample);
                spent += 1;
                if best.as_ref().is_none_or(|(b, _)| e < *b) {
                    best = Some((e, nb.clone()));
                }
                if e < current_err {
                    current = nb;
                    current_err = e;
                    moved = true;
                    break;
                }
            }
            if !moved {
                continue 'restarts;
            }
        }
    }
    Ok(best.expect("budget >= 1 evaluates a start").1)
}

/// A learning procedure together with the class it searches.
pub trait Learner: Send + Sync {
    fn name(&self) -> String;
    fn search_class(&self) -> &HypothesisClass;
    fn learn(&self, sample: &Dataset) -> Result<Hypothesis>;
}

pub struct ExhaustiveErm {
    pub class: HypothesisClass,
}

impl Learner for ExhaustiveErm {
    fn name(&self) -> String {
        format!("erm[{}]", self.class.name())
    }

    fn search_class(&self) -> &HypothesisClass {
        &self.class
    }

    fn learn(&self, sample: &Dataset) -> Result<Hypothesis> {
        Ok(erm_exhaustive(&self.class, sample)?.chosen)
    }
}

pub struct GreedyErm {
    pub class: HypothesisClass,
    pub budget: u64,
    pub seed: Seed,
}

impl Learner for GreedyErm {
    fn name(&self) -> String {
        format!("greedy[{}; budget={}]", self.class.name(), self.budget)
    }

    fn search_class(&self) -> &HypothesisClass {
        &self.class
    }

    fn learn(&self, sample: &Dataset) -> Result<Hypothesis> {
        greedy_approx_erm(&self.class, sample, self.budget, self.seed)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{draw_dataset, empirical_risk, DomainSpec, FiniteDistribution};
    use crate::hypotheses::Predicate;

    fn conj(n: usize, s: &str) -> Hypothesis {
        Conjunction::parse(n, s).unwrap().into()
    }

    #[test]
    fn erm_exhaustive_examples() {
        let c = HypothesisClass::conjunctions(2).unwrap();
        let s = Dataset::from_pairs(2, &[(&[1, 1], 1)]).unwrap();
        let r = erm_exhaustive(&c, &s).unwrap();
        assert_eq!(r.chosen, conj(2, ""));
        assert_eq!(r.min_empirical_risk, 0.0);

        let s = Dataset::from_pairs(2, &[(&[1, 1], 1), (&[0, 0], 0)]).unwrap();
        let r = erm_exhaustive(&c, &s).unwrap();
        assert_eq!(r.chosen, conj(2, "x1"));
        assert_eq!(r.min_empirical_risk, 0.0);
        assert_eq!(r.scanned, 9);

        let k = HypothesisClass::constants(2).unwrap();
        let r = erm_exhaustive(&k, &s).unwrap();
        assert_eq!(r.chosen, Hypothesis::Const(Label::Zero));
        assert_eq!(r.min_empirical_risk, 0.5);
        assert_eq!(r.minimizer_count, 2);
    }

    #[test]
    fn erm_errors() {
        let c = HypothesisClass::conjunctions(2).unwrap();
        assert!(matches!(erm_exhaustive(&c, &Dataset::empty(2)), Err(LabError::EmptyDataset)));
        let s = Dataset::from_pairs(2, &[(&[1, 1], 1)]).unwrap();
        assert!(matches!(
            erm_exhaustive(&c.restrict(Predicate::Never), &s),
            Err(LabError::EmptyClass(_))
        ));
        assert!(matches!(
            erm_exhaustive(&HypothesisClass::dnf3(2).unwrap().with_cap(100), &s),
            Err(LabError::CapExceeded { .. })
        ));
    }

    #[test]
    fn erm_set_examples() {
        let k = HypothesisClass::constants(2).unwrap();
        let ones = Dataset::from_pairs(2, &[(&[1, 1], 1), (&[0, 1], 1)]).unwrap();
        assert_eq!(erm_set(&k, &ones).unwrap(), vec![Hypothesis::Const(Label::One)]);
        let half = Dataset::from_pairs(2, &[(&[1, 1], 1), (&[0, 1], 0)]).unwrap();
        assert_eq!(
            erm_set(&k, &half).unwrap(),
            vec![Hypothesis::Const(Label::Zero), Hypothesis::Const(Label::One)]
        );
        let c = HypothesisClass::conjunctions(3).unwrap();
        let s = Dataset::from_pairs(3, &[(&[1, 0, 1], 1), (&[0, 0, 1], 0), (&[1, 1, 0], 0)]).unwrap();
        let set = erm_set(&c, &s).unwrap();
        assert_eq!(set[0], erm_exhaustive(&c, &s).unwrap().chosen);
        assert!(set.iter().all(|h| empirical_risk(h, &s).unwrap() == 0.0));
    }

    #[test]
    fn elimination_examples() {
        let s = Dataset::from_pairs(2, &[(&[1, 1], 1), (&[1, 0], 1), (&[0, 1], 0)]).unwrap();
        let c = learn_conjunction_realizable(&s).unwrap();
        assert_eq!(c, Conjunction::parse(2, "x1").unwrap());
        assert_eq!(negative_violations(&c, &s), 0);

        let all_pos = Dataset::from_pairs(2, &[(&[0, 0], 1), (&[0, 1], 1), (&[1, 0], 1), (&[1, 1], 1)]).unwrap();
        assert_eq!(learn_conjunction_realizable(&all_pos).unwrap(), Conjunction::empty(2));

        let no_pos = Dataset::from_pairs(2, &[(&[0, 0], 0), (&[1, 1], 0)]).unwrap();
        let c = learn_conjunction_realizable(&no_pos).unwrap();
        assert_eq!(c, Conjunction::full(2));
        assert!(c.is_contradictory());

        // x1 xor x2 is not a conjunction.
        let xor = Dataset::from_pairs(2, &[(&[1, 0], 1), (&[0, 1], 1), (&[0, 0], 0), (&[1, 1], 0)]).unwrap();
        assert!(negative_violations(&learn_conjunction_realizable(&xor).unwrap(), &xor) > 0);
    }

    /// Brute force: consistent conjunctions (including contradictory ones
    /// via a 4-state encoding) and their satisfying sets.
    #[test]
    fn elimination_is_most_specific_consistent() {
        for n in 1..=4usize {
            let domain = DomainSpec::new(n).unwrap();
            let points: Vec<_> = domain.points().unwrap().collect();
            let class = HypothesisClass::conjunctions(n).unwrap();
            for (ti, target) in class.enumerate().unwrap().enumerate().step_by(7) {
                let d = FiniteDistribution::uniform_realizable(n, &target).unwrap();
                let s = draw_dataset(&d, 6, Seed(ti as u64));
                let learned: Hypothesis = learn_conjunction_realizable(&s).unwrap().into();
                assert_eq!(empirical_risk(&learned, &s).unwrap(), 0.0);
                let learned_set: Vec<bool> = points.iter().map(|x| learned.predict(x)).collect();
                for other in class.enumerate().unwrap() {
                    if empirical_risk(&other, &s).unwrap() == 0.0 {
                        for (x, &l) in points.iter().zip(&learned_set) {
                            assert!(!l || other.predict(x), "n={n} target={target:?} other={other:?}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn optimization_error_examples() {
        let c = HypothesisClass::conjunctions(2).unwrap();
        let s = Dataset::from_pairs(2, &[(&[1, 1], 1), (&[0, 0], 0)]).unwrap();
        let chosen = erm_exhaustive(&c, &s).unwrap().chosen;
        assert_eq!(optimization_error(&chosen, &c, &s).unwrap(), 0.0);
        assert_eq!(optimization_error(&conj(2, ""), &c, &s).unwrap(), 0.5);

        let k = HypothesisClass::constants(2).unwrap();
        let ones = Dataset::from_pairs(2, &[(&[1, 1], 1), (&[0, 0], 1)]).unwrap();
        assert_eq!(optimization_error(&Hypothesis::Const(Label::Zero), &k, &ones).unwrap(), 1.0);
        assert!(matches!(
            optimization_error(&conj(2, "x1 & !x1"), &c, &s),
            Err(LabError::NotAMember(_))
        ));
    }

    #[test]
    fn greedy_budget_edges() {
        let c = HypothesisClass::conjunctions(3).unwrap();
        let target = conj(3, "x1 & !x2");
        let d = FiniteDistribution::uniform_noisy(3, &target, 0.2).unwrap();
        let s = draw_dataset(&d, 30, Seed(5));
        let exhaustive = erm_exhaustive(&c, &s).unwrap();
        let g = greedy_approx_erm(&c, &s, 27, Seed(1)).unwrap();
        assert_eq!(empirical_risk(&g, &s).unwrap(), exhaustive.min_empirical_risk);

        for seed in 0..20 {
            let start = random_member(&c, &mut Seed(seed).rng()).unwrap();
            assert_eq!(greedy_approx_erm(&c, &s, 1, Seed(seed)).unwrap(), start);
        }
        assert!(greedy_approx_erm(&c, &s, 0, Seed(0)).is_err());
        let explicit = HypothesisClass::explicit("e", 3, vec![target.clone()]).unwrap();
        assert!(matches!(
            greedy_approx_erm(&explicit, &s, 1, Seed(0)),
            Err(LabError::UnsupportedFamily(_))
        ));
    }

    #[test]
    fn greedy_is_deterministic_and_stays_in_class() {
        let c = HypothesisClass::trees(3, 2).unwrap().restrict(Predicate::MaxLiterals { k: 2 });
        let d = FiniteDistribution::uniform_noisy(3, &conj(3, "x2"), 0.1).unwrap();
        let s = draw_dataset(&d, 25, Seed(8));
        let a = greedy_approx_erm(&c, &s, 40, Seed(3)).unwrap();
        assert_eq!(a, greedy_approx_erm(&c, &s, 40, Seed(3)).unwrap());
        assert!(c.contains(&a));
        let dnf = HypothesisClass::dnf3(2).unwrap();
        let b = greedy_approx_erm(&dnf, &s_for(&dnf), 30, Seed(2)).unwrap();
        assert!(dnf.contains(&b));
    }

    fn s_for(class: &HypothesisClass) -> Dataset {
        let d = FiniteDistribution::uniform_noisy(class.n(), &Hypothesis::Const(Label::One), 0.3).unwrap();
        draw_dataset(&d, 10, Seed(4))
    }

    #[test]
    fn greedy_optimization_error_shrinks_with_budget() {
        let c = HypothesisClass::conjunctions(3).unwrap();
        let target = conj(3, "x1 & x3");
        let d = FiniteDistribution::uniform_realizable(3, &target).unwrap();
        let mean_opt = |budget: u64| -> f64 {
            (0..100u64)
                .map(|seed| {
                    let s = draw_dataset(&d, 20, Seed(1000 + seed));
                    let h = greedy_approx_erm(&c, &s, budget, Seed(seed)).unwrap();
                    optimization_error(&h, &c, &s).unwrap()
                })
                .sum::<f64>()
                / 100.0
        };
        let small = mean_opt(10);
        let large = mean_opt(500);
        assert!(small > large, "budget 10: {small}, budget 500: {large}");
        assert_eq!(large, 0.0);
    }

    #[test]
    fn neighbours_are_single_edits() {
        let c = HypothesisClass::conjunctions(3).unwrap();
        let nbs = neighbours(&conj(3, "x1"), &c).unwrap();
        assert_eq!(nbs.len(), 6);
        let t = HypothesisClass::trees(2, 1).unwrap();
        let leaf = t.unrank(0).unwrap();
        // flip + 2 orientations per variable
        assert_eq!(neighbours(&leaf, &t).unwrap().len(), 5);
    }
}
