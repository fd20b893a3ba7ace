//! Exact, finite-domain laboratory for empirical risk minimization over
//! boolean hypothesis classes and interpretable subclasses of them.

pub mod bits;
pub mod capacity;
pub mod cli;
pub mod decomposition;
pub mod dnf3;
pub mod domain;
pub mod erm;
pub mod error;
pub mod facts;
pub mod hypotheses;
pub mod tabulate;

pub use bits::BitVector;
pub use domain::{
    draw_dataset, empirical_risk, exact_risk, generalization_gap, Dataset, DomainSpec, FiniteDistribution, Label,
    LabeledExample, Point, Seed,
};
pub use error::{LabError, Result};
pub use hypotheses::{Conjunction, DecisionTree, Hypothesis, HypothesisClass, Predicate, ThreeTermDnf};
