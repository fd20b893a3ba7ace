//! JSON form of hypotheses: an object tagged by `"kind"` with 1-based
//! variable indices.

use serde::{Deserialize, Serialize};

use super::{Conjunction, DecisionTree, ExpandedConjunction, Hypothesis, Literal, ThreeTermDnf, TreeNode};
use crate::domain::Label;
use crate::error::LabError;

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub(super) enum HypothesisRepr {
    Const { label: Label },
    Conjunction { n: usize, positive: Vec<usize>, negated: Vec<usize> },
    Dnf3 { n: usize, terms: Vec<TermRepr> },
    Tree { n: usize, root: NodeRepr },
    ExpandedConjunction { n: usize, positive: Vec<usize>, negated: Vec<usize> },
}

#[derive(Serialize, Deserialize)]
pub(super) struct TermRepr {
    positive: Vec<usize>,
    negated: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
pub(super) enum NodeRepr {
    Leaf { leaf: Label },
    Split { var: usize, zero: Box<NodeRepr>, one: Box<NodeRepr> },
}

fn term_of(c: &Conjunction) -> TermRepr {
    TermRepr {
        positive: c.positive.ones_indices().map(|i| i + 1).collect(),
        negated: c.negated.ones_indices().map(|i| i + 1).collect(),
    }
}

fn conj_from(n: usize, positive: &[usize], negated: &[usize]) -> Result<Conjunction, LabError> {
    let lits: Vec<Literal> = positive
        .iter()
        .map(|&v| Literal::pos(v))
        .chain(negated.iter().map(|&v| Literal::neg(v)))
        .collect();
    Conjunction::from_literals(n, &lits)
}

fn node_of(node: &TreeNode) -> NodeRepr {
    match node {
        TreeNode::Leaf(l) => NodeRepr::Leaf { leaf: *l },
        TreeNode::Split { var, zero, one } => NodeRepr::Split {
            var: *var,
            zero: Box::new(node_of(zero)),
            one: Box::new(node_of(one)),
        },
    }
}

fn node_from(repr: NodeRepr) -> TreeNode {
    match repr {
        NodeRepr::Leaf { leaf } => TreeNode::Leaf(leaf),
        NodeRepr::Split { var, zero, one } => TreeNode::split(var, node_from(*zero), node_from(*one)),
    }
}

impl From<Hypothesis> for HypothesisRepr {
    fn from(h: Hypothesis) -> Self {
        match h {
            Hypothesis::Const(label) => HypothesisRepr::Const { label },
            Hypothesis::Conjunction(c) => {
                let t = term_of(&c);
                HypothesisRepr::Conjunction { n: c.n(), positive: t.positive, negated: t.negated }
            }
            Hypothesis::ThreeTermDnf(d) => HypothesisRepr::Dnf3 {
                n: d.n(),
                terms: d.terms.iter().map(term_of).collect(),
            },
            Hypothesis::DecisionTree(t) => HypothesisRepr::Tree { n: t.n(), root: node_of(t.root()) },
            Hypothesis::ExpandedConjunction(e) => {
                let t = term_of(e.inner());
                HypothesisRepr::ExpandedConjunction { n: e.n(), positive: t.positive, negated: t.negated }
            }
        }
    }
}

impl TryFrom<HypothesisRepr> for Hypothesis {
    type Error = LabError;

    fn try_from(r: HypothesisRepr) -> Result<Self, LabError> {
        Ok(match r {
            HypothesisRepr::Const { label } => Hypothesis::Const(label),
            HypothesisRepr::Conjunction { n, positive, negated } => conj_from(n, &positive, &negated)?.into(),
            HypothesisRepr::Dnf3 { n, terms } => {
                let [a, b, c]: [TermRepr; 3] = terms
                    .try_into()
                    .map_err(|_| LabError::InvalidRepresentation("dnf3 needs exactly 3 terms".into()))?;
                ThreeTermDnf::new(
                    conj_from(n, &a.positive, &a.negated)?,
                    conj_from(n, &b.positive, &b.negated)?,
                    conj_from(n, &c.positive, &c.negated)?,
                )?
                .into()
            }
            HypothesisRepr::Tree { n, root } => DecisionTree::new(n, node_from(root))?.into(),
            HypothesisRepr::ExpandedConjunction { n, positive, negated } => {
                let inner = conj_from(crate::dnf3::expanded_dimension(n), &positive, &negated)?;
                ExpandedConjunction::new(n, inner)?.into()
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    use crate::hypotheses::HypothesisClass;

    #[test]
    fn tagged_shapes() {
        let c: Hypothesis = Conjunction::parse(3, "x1 & !x3").unwrap().into();
        assert_eq!(
            serde_json::to_value(&c).unwrap(),
            serde_json::json!({"kind": "conjunction", "n": 3, "positive": [1], "negated": [3]})
        );
        assert_eq!(
            serde_json::to_value(Hypothesis::Const(Label::One)).unwrap(),
            serde_json::json!({"kind": "const", "label": 1})
        );
        let t = serde_json::json!({"kind": "tree", "n": 2, "root": {"var": 2, "zero": {"leaf": 0}, "one": {"leaf": 1}}});
        let h: Hypothesis = serde_json::from_value(t.clone()).unwrap();
        assert_eq!(h.depth(), 1);
        assert_eq!(serde_json::to_value(&h).unwrap(), t);
        let bad = serde_json::json!({"kind": "dnf3", "n": 2, "terms": []});
        assert!(serde_json::from_value::<Hypothesis>(bad).is_err());
    }

    proptest! {
        #[test]
        fn json_round_trip_dnf(rank in 0u64..19683) {
            let h = HypothesisClass::dnf3(3).unwrap().unrank(rank as u128).unwrap();
            let text = serde_json::to_string(&h).unwrap();
            let back: Hypothesis = serde_json::from_str(&text).unwrap();
            prop_assert_eq!(back, h);
        }

        #[test]
        fn json_round_trip_tree(rank in 0u64..590) {
            let h = HypothesisClass::trees(3, 2).unwrap().unrank(rank as u128).unwrap();
            let back: Hypothesis = serde_json::from_str(&serde_json::to_string(&h).unwrap()).unwrap();
            prop_assert_eq!(back, h);
        }
    }
}
