use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{Conjunction, DecisionTree, Hypothesis, Predicate, ThreeTermDnf, TreeNode, VarState};
use crate::domain::{DomainSpec, Label};
use crate::error::{LabError, Result};

/// Default upper bound on the number of representations a scan may visit.
pub const DEFAULT_ENUM_CAP: u64 = 1 << 24;

/// A representation family over `{0,1}^n`, before any interpretability
/// restriction.
#[derive(Debug, Clone)]
pub enum Family {
    /// constant-0, constant-1
    Constants,
    /// `3^n` conjunctions ordered by their base-3 state code
    /// (absent = 0, positive = 1, negated = 2; variable 1 least significant).
    Conjunctions,
    /// `3^(3n)` triples of conjunctions, lexicographic in `(A1, A2, A3)`.
    ThreeTermDnf,
    /// Trees of depth at most `max_depth`: the two leaves first, then splits
    /// ordered by `(variable, zero-subtree, one-subtree)`.
    DecisionTrees { max_depth: usize },
    /// A fixed list; canonical order is list order.
    Explicit(Arc<Vec<Hypothesis>>),
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Constants => "constants",
            Family::Conjunctions => "conjunctions",
            Family::ThreeTermDnf => "dnf3",
            Family::DecisionTrees { .. } => "trees",
            Family::Explicit(_) => "explicit",
        }
    }
}

/// A finite, canonically ordered family of representations with a
/// membership predicate.
#[derive(Debug, Clone)]
pub struct HypothesisClass {
    name: String,
    domain: DomainSpec,
    family: Family,
    predicate: Predicate,
    cap: u64,
}

pub(crate) fn pow3(k: usize) -> u128 {
    3u128.saturating_pow(k as u32)
}

/// Number of trees of depth at most `d` over `n` variables.
pub(crate) fn tree_count(n: usize, d: usize) -> u128 {
    (0..d).fold(2u128, |t, _| 2u128.saturating_add((n as u128).saturating_mul(t.saturating_mul(t))))
}

fn state_of_digit(d: u8) -> VarState {
    match d {
        0 => VarState::Absent,
        1 => VarState::Positive,
        _ => VarState::Negated,
    }
}

fn conjunction_at(n: usize, mut rank: u128) -> Conjunction {
    let mut c = Conjunction::empty(n);
    for var in 1..=n {
        c.set_state(var, state_of_digit((rank % 3) as u8));
        rank /= 3;
    }
    c
}

fn all_conjunctions(n: usize) -> impl Iterator<Item = Conjunction> {
    let mut digits = vec![0u8; n];
    let mut current = Some(Conjunction::empty(n));
    std::iter::from_fn(move || {
        let out = current.clone()?;
        let c = current.as_mut().unwrap();
        let mut i = 0;
        loop {
            if i == n {
                current = None;
                break;
            }
            digits[i] = (digits[i] + 1) % 3;
            c.set_state(i + 1, state_of_digit(digits[i]));
            if digits[i] != 0 {
                break;
            }
            i += 1;
        }
        Some(out)
    })
}

fn trees_upto(n: usize, d: usize) -> Vec<Arc<TreeNode>> {
    let mut out = vec![Arc::new(TreeNode::Leaf(Label::Zero)), Arc::new(TreeNode::Leaf(Label::One))];
    if d == 0 {
        return out;
    }
    let sub = trees_upto(n, d - 1);
    for var in 1..=n {
        for z in &sub {
            for o in &sub {
                out.push(Arc::new(TreeNode::Split { var, zero: z.clone(), one: o.clone() }));
            }
        }
    }
    out
}

fn tree_at(n: usize, d: usize, rank: u128) -> TreeNode {
    if rank < 2 {
        return TreeNode::Leaf(Label::from_bool(rank == 1));
    }
    let sub = tree_count(n, d - 1);
    let r = rank - 2;
    let var = (r / (sub * sub)) as usize + 1;
    let rest = r % (sub * sub);
    TreeNode::Split {
        var,
        zero: Arc::new(tree_at(n, d - 1, rest / sub)),
        one: Arc::new(tree_at(n, d - 1, rest % sub)),
    }
}

impl HypothesisClass {
    fn with_family(name: String, n: usize, family: Family) -> Result<Self> {
        Ok(HypothesisClass {
            name,
            domain: DomainSpec::new(n)?,
            family,
            predicate: Predicate::Always,
            cap: DEFAULT_ENUM_CAP,
        })
    }

    pub fn constants(n: usize) -> Result<Self> {
        Self::with_family("constants".into(), n, Family::Constants)
    }

    pub fn conjunctions(n: usize) -> Result<Self> {
        Self::with_family(format!("conjunctions(n={n})"), n, Family::Conjunctions)
    }

    pub fn dnf3(n: usize) -> Result<Self> {
        Self::with_family(format!("dnf3(n={n})"), n, Family::ThreeTermDnf)
    }

    pub fn trees(n: usize, max_depth: usize) -> Result<Self> {
        Self::with_family(
            format!("trees(n={n},depth<={max_depth})"),
            n,
            Family::DecisionTrees { max_depth },
        )
    }

    pub fn explicit(name: impl Into<String>, n: usize, members: Vec<Hypothesis>) -> Result<Self> {
        for h in &members {
            if let Some(d) = h.dimension() {
                if d != n {
                    return Err(LabError::DimensionMismatch { expected: n, found: d });
                }
            }
        }
        Self::with_family(name.into(), n, Family::Explicit(Arc::new(members)))
    }

    pub fn with_cap(mut self, cap: u64) -> Self {
        self.cap = cap;
        self
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn domain(&self) -> DomainSpec {
        self.domain
    }

    pub fn n(&self) -> usize {
        self.domain.n()
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn predicate(&self) -> &Predicate {
        &self.predicate
    }

    pub fn cap(&self) -> u64 {
        self.cap
    }

    pub fn is_restricted(&self) -> bool {
        !self.predicate.is_always()
    }

    /// Closed-form size of the unrestricted family.
    pub fn family_cardinality(&self) -> u128 {
        let n = self.n();
        match &self.family {
            Family::Constants => 2,
            Family::Conjunctions => pow3(n),
            Family::ThreeTermDnf => pow3(3 * n),
            Family::DecisionTrees { max_depth } => tree_count(n, *max_depth),
            Family::Explicit(list) => list.len() as u128,
        }
    }

    /// Fails when a full scan would exceed the enumeration cap.
    pub fn check_cap(&self) -> Result<()> {
        let cardinality = self.family_cardinality();
        if cardinality > self.cap as u128 {
            return Err(LabError::CapExceeded { cardinality, cap: self.cap });
        }
        Ok(())
    }

    /// Number of members; counted by filtering when the class is restricted.
    pub fn cardinality(&self) -> Result<u128> {
        if !self.is_restricted() {
            return Ok(self.family_cardinality());
        }
        self.check_cap()?;
        Ok(self.family_iter().filter(|h| self.predicate.judge(h)).count() as u128)
    }

    /// Every family representation in canonical order, ignoring the predicate
    /// and the cap.
    pub fn family_iter(&self) -> Box<dyn Iterator<Item = Hypothesis> + Send + '_> {
        let n = self.n();
        match &self.family {
            Family::Constants => Box::new([Label::Zero, Label::One].into_iter().map(Hypothesis::Const)),
            Family::Conjunctions => Box::new(all_conjunctions(n).map(Hypothesis::Conjunction)),
            Family::ThreeTermDnf => {
                let conjs: Vec<Conjunction> = all_conjunctions(n).collect();
                let k = conjs.len();
                Box::new((0..k * k * k).map(move |r| {
                    let (a, b, c) = (r / (k * k), (r / k) % k, r % k);
                    Hypothesis::ThreeTermDnf(ThreeTermDnf {
                        terms: [conjs[a].clone(), conjs[b].clone(), conjs[c].clone()],
                    })
                }))
            }
            Family::DecisionTrees { max_depth } => {
                let leaves = [Label::Zero, Label::One].map(TreeNode::Leaf);
                let to_h = move |root: TreeNode| Hypothesis::DecisionTree(DecisionTree::from_root_unchecked(n, root));
                if *max_depth == 0 {
                    return Box::new(leaves.into_iter().map(to_h));
                }
                let sub = Arc::new(trees_upto(n, max_depth - 1));
                let k = sub.len();
                let splits = (1..=n).flat_map(move |var| {
                    let sub = sub.clone();
                    (0..k * k).map(move |r| TreeNode::Split {
                        var,
                        zero: sub[r / k].clone(),
                        one: sub[r % k].clone(),
                    })
                });
                Box::new(leaves.into_iter().chain(splits).map(to_h))
            }
            Family::Explicit(list) => Box::new(list.iter().cloned()),
        }
    }

    /// Members in canonical order together with their family rank.
    pub fn ranked_members(&self) -> Result<impl Iterator<Item = (u128, Hypothesis)> + Send + '_> {
        self.check_cap()?;
        Ok(self
            .family_iter()
            .enumerate()
            .map(|(i, h)| (i as u128, h))
            .filter(|(_, h)| self.predicate.judge(h)))
    }

    /// Members in canonical order.
    pub fn enumerate(&self) -> Result<impl Iterator<Item = Hypothesis> + Send + '_> {
        Ok(self.ranked_members()?.map(|(_, h)| h))
    }

    /// The family representation at position `rank` of the canonical order.
    pub fn unrank(&self, rank: u128) -> Result<Hypothesis> {
        let card = self.family_cardinality();
        if rank >= card {
            return Err(LabError::param("rank", format!("{rank} is not below {card}")));
        }
        let n = self.n();
        Ok(match &self.family {
            Family::Constants => Hypothesis::Const(Label::from_bool(rank == 1)),
            Family::Conjunctions => conjunction_at(n, rank).into(),
            Family::ThreeTermDnf => {
                let k = pow3(n);
                ThreeTermDnf {
                    terms: [
                        conjunction_at(n, rank / (k * k)),
                        conjunction_at(n, (rank / k) % k),
                        conjunction_at(n, rank % k),
                    ],
                }
                .into()
            }
            Family::DecisionTrees { max_depth } => {
                DecisionTree::from_root_unchecked(n, tree_at(n, *max_depth, rank)).into()
            }
            Family::Explicit(list) => list[rank as usize].clone(),
        })
    }

    fn family_contains(&self, h: &Hypothesis) -> bool {
        let n = self.n();
        match (&self.family, h) {
            (Family::Constants, Hypothesis::Const(_)) => true,
            (Family::Conjunctions, Hypothesis::Conjunction(c)) => c.n() == n && !c.is_contradictory(),
            (Family::ThreeTermDnf, Hypothesis::ThreeTermDnf(d)) => {
                d.n() == n && d.terms.iter().all(|t| !t.is_contradictory())
            }
            (Family::DecisionTrees { max_depth }, Hypothesis::DecisionTree(t)) => {
                t.n() == n && t.depth() <= *max_depth
            }
            (Family::Explicit(list), h) => list.contains(h),
            _ => false,
        }
    }

    /// Membership: family membership and the interpretability predicate.
    pub fn contains(&self, h: &Hypothesis) -> bool {
        self.family_contains(h) && self.predicate.judge(h)
    }

    /// The subclass of members that `predicate` judges interpretable.
    pub fn restrict(&self, predicate: Predicate) -> HypothesisClass {
        HypothesisClass {
            name: format!("{}|{:?}", self.name, predicate),
            domain: self.domain,
            family: self.family.clone(),
            predicate: self.predicate.clone().and(predicate),
            cap: self.cap,
        }
    }

    pub fn descriptor(&self) -> ClassDescriptor {
        let mut params = ClassParams::default();
        match &self.family {
            Family::DecisionTrees { max_depth } => params.max_depth = Some(*max_depth),
            Family::Explicit(list) => params.members = Some(list.as_ref().clone()),
            _ => {}
        }
        ClassDescriptor {
            family: self.family.name().to_string(),
            n: self.n(),
            params,
            predicate: self.is_restricted().then(|| self.predicate.clone()),
        }
    }
}

/// Serializable description of a (possibly restricted) class.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassDescriptor {
    pub family: String,
    pub n: usize,
    #[serde(default)]
    pub params: ClassParams,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub predicate: Option<Predicate>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassParams {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_depth: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub members: Option<Vec<Hypothesis>>,
}

impl ClassDescriptor {
    pub fn build(&self) -> Result<HypothesisClass> {
        let n = self.n;
        let base = match self.family.as_str() {
            "constants" => HypothesisClass::constants(n)?,
            "conjunctions" => HypothesisClass::conjunctions(n)?,
            "dnf3" => HypothesisClass::dnf3(n)?,
            "trees" => {
                let d = self
                    .params
                    .max_depth
                    .ok_or_else(|| LabError::param("params.max_depth", "required for trees"))?;
                HypothesisClass::trees(n, d)?
            }
            "explicit" => {
                let members = self
                    .params
                    .members
                    .clone()
                    .ok_or_else(|| LabError::param("params.members", "required for explicit"))?;
                HypothesisClass::explicit("explicit", n, members)?
            }
            other => return Err(LabError::param("family", format!("unknown family `{other}`"))),
        };
        Ok(match &self.predicate {
            Some(p) => base.restrict(p.clone()),
            None => base,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enumeration_counts_and_order() {
        let c = HypothesisClass::conjunctions(2).unwrap();
        let members: Vec<_> = c.enumerate().unwrap().collect();
        assert_eq!(members.len(), 9);
        assert_eq!(members[0], Conjunction::empty(2).into());
        assert_eq!(members[1], Conjunction::parse(2, "x1").unwrap().into());
        assert_eq!(members[2], Conjunction::parse(2, "!x1").unwrap().into());
        assert_eq!(members[3], Conjunction::parse(2, "x2").unwrap().into());

        let k: Vec<_> = HypothesisClass::constants(2).unwrap().enumerate().unwrap().collect();
        assert_eq!(k, vec![Hypothesis::Const(Label::Zero), Hypothesis::Const(Label::One)]);

        let d = HypothesisClass::dnf3(2).unwrap();
        assert_eq!(d.enumerate().unwrap().count(), 729);
        assert_eq!(d.family_cardinality(), 729);
    }

    #[test]
    fn cap_exceeded_names_cardinality() {
        let d = HypothesisClass::dnf3(5).unwrap().with_cap(1_000_000);
        match d.enumerate() {
            Err(LabError::CapExceeded { cardinality, cap }) => {
                assert_eq!(cardinality, 14_348_907);
                assert_eq!(cap, 1_000_000);
            }
            other => panic!("expected cap error, got {:?}", other.map(|_| ())),
        };
    }

    #[test]
    fn unrank_matches_streaming_order() {
        for class in [
            HypothesisClass::conjunctions(3).unwrap(),
            HypothesisClass::dnf3(2).unwrap(),
            HypothesisClass::trees(2, 2).unwrap(),
            HypothesisClass::trees(3, 0).unwrap(),
            HypothesisClass::constants(1).unwrap(),
        ] {
            for (i, h) in class.family_iter().enumerate() {
                assert_eq!(class.unrank(i as u128).unwrap(), h, "{} rank {i}", class.name());
            }
            assert!(class.unrank(class.family_cardinality()).is_err());
        }
    }

    #[test]
    fn tree_counts_follow_recurrence() {
        // depth 0: two leaves; depth d: leaves + n * T(d-1)^2 splits.
        assert_eq!(tree_count(3, 0), 2);
        assert_eq!(tree_count(3, 1), 14);
        assert_eq!(tree_count(3, 2), 590);
        assert_eq!(tree_count(3, 3), 1_044_302);
        for (n, d) in [(1, 2), (2, 2), (3, 2), (2, 3)] {
            let class = HypothesisClass::trees(n, d).unwrap();
            assert_eq!(class.family_iter().count() as u128, tree_count(n, d));
            assert!(class.family_iter().all(|h| h.depth() <= d));
        }
    }

    #[test]
    fn restrict_examples() {
        let c = HypothesisClass::conjunctions(2).unwrap();
        assert_eq!(c.restrict(Predicate::MaxLiterals { k: 1 }).cardinality().unwrap(), 5);
        assert_eq!(c.restrict(Predicate::Always).cardinality().unwrap(), 9);
        assert_eq!(c.restrict(Predicate::Never).cardinality().unwrap(), 0);

        let t = HypothesisClass::trees(3, 3).unwrap();
        let shallow = t.restrict(Predicate::MaxDepth { d: 2 });
        assert!(shallow.enumerate().unwrap().all(|h| t.contains(&h) && h.depth() <= 2));
    }

    #[test]
    fn membership() {
        let c = HypothesisClass::conjunctions(2).unwrap();
        assert!(c.contains(&Conjunction::parse(2, "x1 & !x2").unwrap().into()));
        assert!(!c.contains(&Conjunction::parse(2, "x1 & !x1").unwrap().into()));
        assert!(!c.contains(&Conjunction::empty(3).into()));
        assert!(!c.contains(&Hypothesis::Const(Label::One)));
        let r = c.restrict(Predicate::MaxLiterals { k: 1 });
        assert!(!r.contains(&Conjunction::parse(2, "x1 & x2").unwrap().into()));
    }

    #[test]
    fn descriptor_round_trip() {
        let c = HypothesisClass::trees(3, 3).unwrap().restrict(Predicate::MaxDepth { d: 2 });
        let v = serde_json::to_value(c.descriptor()).unwrap();
        assert_eq!(
            v,
            serde_json::json!({"family": "trees", "n": 3, "params": {"max_depth": 3}, "predicate": {"kind": "max_depth", "d": 2}})
        );
        let back: ClassDescriptor = serde_json::from_value(v).unwrap();
        let rebuilt = back.build().unwrap();
        assert_eq!(rebuilt.cardinality().unwrap(), 590);
        let bad: ClassDescriptor = serde_json::from_value(serde_json::json!({"family": "forest", "n": 2})).unwrap();
        assert!(bad.build().is_err());
    }
}
