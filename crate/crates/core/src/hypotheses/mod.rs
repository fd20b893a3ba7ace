//! Classifier representations, enumerable hypothesis classes and
//! interpretability predicates.
//!
//! Equality between hypotheses is representational: two distinct values may
//! compute the same boolean function.

mod class;
mod predicate;
mod repr;

use std::fmt;
use std::sync::Arc;

use crate::bits::BitVector;
use crate::dnf3;
use crate::domain::{Label, Point};
use crate::error::{LabError, Result};

pub use class::{ClassDescriptor, ClassParams, Family, HypothesisClass, DEFAULT_ENUM_CAP};
pub use predicate::Predicate;

/// A variable (1-based) or its negation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    pub var: usize,
    pub negated: bool,
}

impl Literal {
    pub fn pos(var: usize) -> Self {
        Literal { var, negated: false }
    }

    pub fn neg(var: usize) -> Self {
        Literal { var, negated: true }
    }

    #[inline]
    pub fn eval(self, x: &Point) -> bool {
        x.get(self.var - 1) != self.negated
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.negated {
            write!(f, "!x{}", self.var)
        } else {
            write!(f, "x{}", self.var)
        }
    }
}

/// Per-variable state of a conjunction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarState {
    Absent,
    Positive,
    Negated,
    /// Both `x_i` and `!x_i`: only produced by the elimination learner.
    Both,
}

/// AND of literals over `n` variables, stored as two literal masks.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Conjunction {
    positive: BitVector,
    negated: BitVector,
}

impl Conjunction {
    /// The empty conjunction (identically true).
    pub fn empty(n: usize) -> Self {
        Conjunction {
            positive: BitVector::zeros(n),
            negated: BitVector::zeros(n),
        }
    }

    /// Every variable both positive and negated (identically false).
    pub fn full(n: usize) -> Self {
        Conjunction {
            positive: BitVector::ones(n),
            negated: BitVector::ones(n),
        }
    }

    pub fn from_masks(positive: BitVector, negated: BitVector) -> Result<Self> {
        if positive.len() != negated.len() {
            return Err(LabError::DimensionMismatch {
                expected: positive.len(),
                found: negated.len(),
            });
        }
        Ok(Conjunction { positive, negated })
    }

    pub fn from_literals(n: usize, literals: &[Literal]) -> Result<Self> {
        let mut c = Self::empty(n);
        for &l in literals {
            if l.var == 0 || l.var > n {
                return Err(LabError::InvalidRepresentation(format!(
                    "variable x{} outside 1..={n}",
                    l.var
                )));
            }
            if l.negated {
                c.negated.set(l.var - 1, true);
            } else {
                c.positive.set(l.var - 1, true);
            }
        }
        Ok(c)
    }

    /// Parses `"x1 & !x3"`; the empty string or `"true"` gives the empty conjunction.
    pub fn parse(n: usize, text: &str) -> Result<Self> {
        let text = text.trim();
        if text.is_empty() || text == "true" {
            return Ok(Self::empty(n));
        }
        let mut literals = Vec::new();
        for tok in text.split(['&', '∧']) {
            let tok = tok.trim();
            let (negated, rest) = match tok.strip_prefix(['!', '~', '¬']) {
                Some(r) => (true, r.trim()),
                None => (false, tok),
            };
            let var = rest
                .strip_prefix('x')
                .and_then(|v| v.parse::<usize>().ok())
                .ok_or_else(|| LabError::InvalidRepresentation(format!("bad literal `{tok}`")))?;
            literals.push(Literal { var, negated });
        }
        Self::from_literals(n, &literals)
    }

    pub fn n(&self) -> usize {
        self.positive.len()
    }

    pub fn positive(&self) -> &BitVector {
        &self.positive
    }

    pub fn negated(&self) -> &BitVector {
        &self.negated
    }

    pub fn state(&self, var: usize) -> VarState {
        match (self.positive.get(var - 1), self.negated.get(var - 1)) {
            (false, false) => VarState::Absent,
            (true, false) => VarState::Positive,
            (false, true) => VarState::Negated,
            (true, true) => VarState::Both,
        }
    }

    pub fn set_state(&mut self, var: usize, state: VarState) {
        let (p, q) = match state {
            VarState::Absent => (false, false),
            VarState::Positive => (true, false),
            VarState::Negated => (false, true),
            VarState::Both => (true, true),
        };
        self.positive.set(var - 1, p);
        self.negated.set(var - 1, q);
    }

    pub fn literals(&self) -> Vec<Literal> {
        let mut out: Vec<Literal> = self
            .positive
            .ones_indices()
            .map(|i| Literal::pos(i + 1))
            .chain(self.negated.ones_indices().map(|i| Literal::neg(i + 1)))
            .collect();
        out.sort();
        out
    }

    pub fn literal_count(&self) -> usize {
        self.positive.count_ones() + self.negated.count_ones()
    }

    /// Contains some variable both positively and negated.
    pub fn is_contradictory(&self) -> bool {
        self.positive.intersects(&self.negated)
    }

    #[inline]
    pub fn satisfied_by(&self, x: &Point) -> bool {
        self.positive.is_subset_of(x) && self.negated.is_disjoint(x)
    }

    /// Removes every literal that `x` falsifies.
    pub(crate) fn eliminate_falsified(&mut self, x: &Point) {
        self.positive.and_assign(x);
        self.negated.and_not_assign(x);
    }
}

impl fmt::Debug for Conjunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Conjunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let lits = self.literals();
        if lits.is_empty() {
            return write!(f, "true");
        }
        for (i, l) in lits.iter().enumerate() {
            if i > 0 {
                write!(f, " & ")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

/// `A1 | A2 | A3`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ThreeTermDnf {
    pub terms: [Conjunction; 3],
}

impl ThreeTermDnf {
    pub fn new(a1: Conjunction, a2: Conjunction, a3: Conjunction) -> Result<Self> {
        let n = a1.n();
        for t in [&a2, &a3] {
            if t.n() != n {
                return Err(LabError::DimensionMismatch { expected: n, found: t.n() });
            }
        }
        Ok(ThreeTermDnf { terms: [a1, a2, a3] })
    }

    pub fn n(&self) -> usize {
        self.terms[0].n()
    }

    #[inline]
    pub fn satisfied_by(&self, x: &Point) -> bool {
        self.terms.iter().any(|t| t.satisfied_by(x))
    }
}

impl fmt::Debug for ThreeTermDnf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) | ({}) | ({})", self.terms[0], self.terms[1], self.terms[2])
    }
}

/// Decision-tree node. Split variables are 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum TreeNode {
    Leaf(Label),
    Split {
        var: usize,
        zero: Arc<TreeNode>,
        one: Arc<TreeNode>,
    },
}

impl TreeNode {
    pub fn split(var: usize, zero: TreeNode, one: TreeNode) -> Self {
        TreeNode::Split {
            var,
            zero: Arc::new(zero),
            one: Arc::new(one),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            TreeNode::Leaf(_) => 0,
            TreeNode::Split { zero, one, .. } => 1 + zero.depth().max(one.depth()),
        }
    }

    pub fn internal_nodes(&self) -> usize {
        match self {
            TreeNode::Leaf(_) => 0,
            TreeNode::Split { zero, one, .. } => 1 + zero.internal_nodes() + one.internal_nodes(),
        }
    }

    fn max_var(&self) -> usize {
        match self {
            TreeNode::Leaf(_) => 0,
            TreeNode::Split { var, zero, one } => (*var).max(zero.max_var()).max(one.max_var()),
        }
    }

    #[inline]
    fn predict(&self, x: &Point) -> bool {
        let mut node = self;
        loop {
            match node {
                TreeNode::Leaf(l) => return l.is_positive(),
                TreeNode::Split { var, zero, one } => {
                    node = if x.get(var - 1) { one } else { zero };
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DecisionTree {
    n: usize,
    root: TreeNode,
}

impl DecisionTree {
    pub fn new(n: usize, root: TreeNode) -> Result<Self> {
        if root.max_var() > n {
            return Err(LabError::InvalidRepresentation(format!(
                "tree tests x{} but n = {n}",
                root.max_var()
            )));
        }
        if let Some(0) = Self::min_var(&root) {
            return Err(LabError::InvalidRepresentation("variables are 1-based".into()));
        }
        Ok(DecisionTree { n, root })
    }

    fn min_var(node: &TreeNode) -> Option<usize> {
        match node {
            TreeNode::Leaf(_) => None,
            TreeNode::Split { var, zero, one } => [Some(*var), Self::min_var(zero), Self::min_var(one)]
                .into_iter()
                .flatten()
                .min(),
        }
    }

    pub(crate) fn from_root_unchecked(n: usize, root: TreeNode) -> Self {
        DecisionTree { n, root }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn root(&self) -> &TreeNode {
        &self.root
    }

    pub fn depth(&self) -> usize {
        self.root.depth()
    }
}

/// A conjunction over the `(2n)^3` literal-triple coordinates of an
/// `n`-dimensional input.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ExpandedConjunction {
    n: usize,
    inner: Conjunction,
}

impl ExpandedConjunction {
    pub fn new(n: usize, inner: Conjunction) -> Result<Self> {
        let expected = dnf3::expanded_dimension(n);
        if inner.n() != expected {
            return Err(LabError::DimensionMismatch { expected, found: inner.n() });
        }
        Ok(ExpandedConjunction { n, inner })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn inner(&self) -> &Conjunction {
        &self.inner
    }
}

/// A classifier representation.
#[derive(Debug, Clone, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(into = "repr::HypothesisRepr", try_from = "repr::HypothesisRepr")]
pub enum Hypothesis {
    Const(Label),
    Conjunction(Conjunction),
    ThreeTermDnf(ThreeTermDnf),
    DecisionTree(DecisionTree),
    ExpandedConjunction(ExpandedConjunction),
}

impl From<Conjunction> for Hypothesis {
    fn from(c: Conjunction) -> Self {
        Hypothesis::Conjunction(c)
    }
}

impl From<ThreeTermDnf> for Hypothesis {
    fn from(d: ThreeTermDnf) -> Self {
        Hypothesis::ThreeTermDnf(d)
    }
}

impl From<DecisionTree> for Hypothesis {
    fn from(t: DecisionTree) -> Self {
        Hypothesis::DecisionTree(t)
    }
}

impl From<ExpandedConjunction> for Hypothesis {
    fn from(e: ExpandedConjunction) -> Self {
        Hypothesis::ExpandedConjunction(e)
    }
}

impl Hypothesis {
    /// Input dimension, or `None` for constants (which accept any input).
    pub fn dimension(&self) -> Option<usize> {
        match self {
            Hypothesis::Const(_) => None,
            Hypothesis::Conjunction(c) => Some(c.n()),
            Hypothesis::ThreeTermDnf(d) => Some(d.n()),
            Hypothesis::DecisionTree(t) => Some(t.n()),
            Hypothesis::ExpandedConjunction(e) => Some(e.n()),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Hypothesis::Const(_) => "const",
            Hypothesis::Conjunction(_) => "conjunction",
            Hypothesis::ThreeTermDnf(_) => "dnf3",
            Hypothesis::DecisionTree(_) => "tree",
            Hypothesis::ExpandedConjunction(_) => "expanded_conjunction",
        }
    }

    pub fn evaluate(&self, x: &Point) -> Result<Label> {
        if let Some(n) = self.dimension() {
            if x.len() != n {
                return Err(LabError::DimensionMismatch { expected: n, found: x.len() });
            }
        }
        Ok(Label::from_bool(self.predict(x)))
    }

    /// Evaluation without the dimension check.
    #[inline]
    pub(crate) fn predict(&self, x: &Point) -> bool {
        match self {
            Hypothesis::Const(l) => l.is_positive(),
            Hypothesis::Conjunction(c) => c.satisfied_by(x),
            Hypothesis::ThreeTermDnf(d) => d.satisfied_by(x),
            Hypothesis::DecisionTree(t) => t.root.predict(x),
            Hypothesis::ExpandedConjunction(e) => {
                let map = dnf3::ExpansionMap::new(e.n);
                e.inner.satisfied_by(&dnf3::psi_expand_unchecked(x, &map))
            }
        }
    }

    /// Literal count: conjunction literals, the largest DNF term, or the
    /// number of tree tests.
    pub fn literal_size(&self) -> usize {
        match self {
            Hypothesis::Const(_) => 0,
            Hypothesis::Conjunction(c) => c.literal_count(),
            Hypothesis::ThreeTermDnf(d) => d.terms.iter().map(Conjunction::literal_count).max().unwrap_or(0),
            Hypothesis::DecisionTree(t) => t.root.internal_nodes(),
            Hypothesis::ExpandedConjunction(e) => e.inner.literal_count(),
        }
    }

    /// Tree depth; 0 for every other representation.
    pub fn depth(&self) -> usize {
        match self {
            Hypothesis::DecisionTree(t) => t.depth(),
            _ => 0,
        }
    }

    /// Stable 64-bit fingerprint of the representation.
    pub fn fingerprint(&self) -> u64 {
        let mut h = Fnv::default();
        match self {
            Hypothesis::Const(l) => {
                h.write(0);
                h.write(l.is_positive() as u64);
            }
            Hypothesis::Conjunction(c) => {
                h.write(1);
                h.conj(c);
            }
            Hypothesis::ThreeTermDnf(d) => {
                h.write(2);
                d.terms.iter().for_each(|t| h.conj(t));
            }
            Hypothesis::DecisionTree(t) => {
                h.write(3);
                h.write(t.n as u64);
                h.tree(&t.root);
            }
            Hypothesis::ExpandedConjunction(e) => {
                h.write(4);
                h.write(e.n as u64);
                h.conj(&e.inner);
            }
        }
        h.0
    }
}

struct Fnv(u64);

impl Default for Fnv {
    fn default() -> Self {
        Fnv(0xcbf2_9ce4_8422_2325)
    }
}

impl Fnv {
    fn write(&mut self, v: u64) {
        for b in v.to_le_bytes() {
            self.0 ^= b as u64;
            self.0 = self.0.wrapping_mul(0x0000_0100_0000_01b3);
        }
    }

    fn conj(&mut self, c: &Conjunction) {
        self.write(c.n() as u64);
        c.positive.words().iter().for_each(|&w| self.write(w));
        c.negated.words().iter().for_each(|&w| self.write(w));
    }

    fn tree(&mut self, node: &TreeNode) {
        match node {
            TreeNode::Leaf(l) => self.write(l.is_positive() as u64),
            TreeNode::Split { var, zero, one } => {
                self.write(2 + *var as u64);
                self.tree(zero);
                self.tree(one);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::DomainSpec;

    fn pt(bits: &[u8]) -> Point {
        BitVector::from_bools(&bits.iter().map(|&b| b != 0).collect::<Vec<_>>())
    }

    #[test]
    fn conjunction_semantics() {
        let empty: Hypothesis = Conjunction::empty(3).into();
        assert_eq!(empty.evaluate(&pt(&[0, 1, 0])).unwrap(), Label::One);

        let c: Hypothesis = Conjunction::parse(2, "x1 & !x2").unwrap().into();
        assert_eq!(c.evaluate(&pt(&[1, 0])).unwrap(), Label::One);
        assert_eq!(c.evaluate(&pt(&[1, 1])).unwrap(), Label::Zero);

        let contradictory = Conjunction::parse(2, "x1 & !x1").unwrap();
        assert!(contradictory.is_contradictory());
        let h: Hypothesis = contradictory.into();
        for x in DomainSpec::new(2).unwrap().points().unwrap() {
            assert_eq!(h.evaluate(&x).unwrap(), Label::Zero);
        }
    }

    #[test]
    fn dnf_semantics() {
        let n = 2;
        let d = ThreeTermDnf::new(
            Conjunction::parse(n, "x1").unwrap(),
            Conjunction::parse(n, "x2").unwrap(),
            Conjunction::parse(n, "x1 & x2").unwrap(),
        )
        .unwrap();
        let h: Hypothesis = d.into();
        assert_eq!(h.evaluate(&pt(&[0, 0])).unwrap(), Label::Zero);
        assert_eq!(h.evaluate(&pt(&[0, 1])).unwrap(), Label::One);
    }

    #[test]
    fn tree_semantics() {
        let root = TreeNode::split(
            2,
            TreeNode::Leaf(Label::Zero),
            TreeNode::split(1, TreeNode::Leaf(Label::One), TreeNode::Leaf(Label::Zero)),
        );
        let t = DecisionTree::new(2, root).unwrap();
        assert_eq!(t.depth(), 2);
        let h: Hypothesis = t.into();
        assert_eq!(h.evaluate(&pt(&[0, 0])).unwrap(), Label::Zero);
        assert_eq!(h.evaluate(&pt(&[0, 1])).unwrap(), Label::One);
        assert_eq!(h.evaluate(&pt(&[1, 1])).unwrap(), Label::Zero);
        assert!(DecisionTree::new(1, TreeNode::split(2, TreeNode::Leaf(Label::Zero), TreeNode::Leaf(Label::One))).is_err());
    }

    #[test]
    fn evaluate_rejects_wrong_dimension() {
        let c: Hypothesis = Conjunction::empty(3).into();
        assert!(c.evaluate(&pt(&[1, 0])).is_err());
        assert!(Hypothesis::Const(Label::One).evaluate(&pt(&[1, 0])).is_ok());
    }

    #[test]
    fn parse_and_display() {
        let c = Conjunction::parse(4, "!x3 & x1").unwrap();
        assert_eq!(c.to_string(), "x1 & !x3");
        assert_eq!(c.state(3), VarState::Negated);
        assert!(Conjunction::parse(2, "x3").is_err());
        assert!(Conjunction::parse(2, "y1").is_err());
    }
}
