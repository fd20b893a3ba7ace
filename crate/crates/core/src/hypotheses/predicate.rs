use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::Hypothesis;
use crate::domain::splitmix64;

type Judge = Arc<dyn Fn(&Hypothesis) -> bool + Send + Sync>;

/// An interpretability judgment: a pure function of the representation.
#[derive(Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Predicate {
    Always,
    Never,
    /// Conjunctions with at most `k` literals, DNFs whose terms each have at
    /// most `k` literals, trees with at most `k` tests.
    MaxLiterals { k: usize },
    /// Trees of depth at most `d`; other representations pass.
    MaxDepth { d: usize },
    IsConstant,
    /// Keeps a pseudo-random `fraction` of representations, keyed by `seed`.
    HashSubset { seed: u64, fraction: f64 },
    And { all: Vec<Predicate> },
    #[serde(skip)]
    Custom { name: String, judge: Judge },
}

impl Predicate {
    pub fn custom(name: impl Into<String>, judge: impl Fn(&Hypothesis) -> bool + Send + Sync + 'static) -> Self {
        Predicate::Custom {
            name: name.into(),
            judge: Arc::new(judge),
        }
    }

    pub fn judge(&self, h: &Hypothesis) -> bool {
        match self {
            Predicate::Always => true,
            Predicate::Never => false,
            Predicate::MaxLiterals { k } => h.literal_size() <= *k,
            Predicate::MaxDepth { d } => h.depth() <= *d,
            Predicate::IsConstant => matches!(h, Hypothesis::Const(_)),
            Predicate::HashSubset { seed, fraction } => {
                let u = splitmix64(h.fingerprint() ^ seed) as f64 / u64::MAX as f64;
                u < *fraction
            }
            Predicate::And { all } => all.iter().all(|p| p.judge(h)),
            Predicate::Custom { judge, .. } => judge(h),
        }
    }

    pub fn is_always(&self) -> bool {
        match self {
            Predicate::Always => true,
            Predicate::And { all } => all.iter().all(Predicate::is_always),
            _ => false,
        }
    }

    /// Conjunction of two predicates, flattening trivial parts.
    pub fn and(self, other: Predicate) -> Predicate {
        match (self, other) {
            (p, q) if q.is_always() => p,
            (p, q) if p.is_always() => q,
            (Predicate::And { mut all }, q) => {
                all.push(q);
                Predicate::And { all }
            }
            (p, q) => Predicate::And { all: vec![p, q] },
        }
    }

    /// Parses the command-line form: `max_literals:1`, `max_depth:2`,
    /// `is_constant`, `always`, `never`, `hash_subset:SEED:FRACTION`.
    pub fn parse(text: &str) -> Option<Predicate> {
        let mut parts = text.split(':');
        let head = parts.next()?;
        let p = match head {
            "always" => Predicate::Always,
            "never" => Predicate::Never,
            "is_constant" => Predicate::IsConstant,
            "max_literals" => Predicate::MaxLiterals { k: parts.next()?.parse().ok()? },
            "max_depth" => Predicate::MaxDepth { d: parts.next()?.parse().ok()? },
            "hash_subset" => Predicate::HashSubset {
                seed: parts.next()?.parse().ok()?,
                fraction: parts.next()?.parse().ok()?,
            },
            _ => return None,
        };
        parts.next().is_none().then_some(p)
    }
}

impl fmt::Debug for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Predicate::Always => write!(f, "always"),
            Predicate::Never => write!(f, "never"),
            Predicate::MaxLiterals { k } => write!(f, "max_literals({k})"),
            Predicate::MaxDepth { d } => write!(f, "max_depth({d})"),
            Predicate::IsConstant => write!(f, "is_constant"),
            Predicate::HashSubset { seed, fraction } => write!(f, "hash_subset({seed}, {fraction})"),
            Predicate::And { all } => f.debug_list().entries(all).finish(),
            Predicate::Custom { name, .. } => write!(f, "custom({name})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::Label;
    use crate::hypotheses::Conjunction;

    #[test]
    fn parse_forms() {
        assert!(matches!(Predicate::parse("max_literals:2"), Some(Predicate::MaxLiterals { k: 2 })));
        assert!(matches!(Predicate::parse("max_depth:1"), Some(Predicate::MaxDepth { d: 1 })));
        assert!(matches!(Predicate::parse("is_constant"), Some(Predicate::IsConstant)));
        assert!(Predicate::parse("max_depth").is_none());
        assert!(Predicate::parse("max_depth:1:2").is_none());
        assert!(Predicate::parse("bogus").is_none());
    }

    #[test]
    fn json_form() {
        let p = Predicate::MaxLiterals { k: 1 }.and(Predicate::IsConstant);
        let v = serde_json::to_value(&p).unwrap();
        assert_eq!(v["kind"], "and");
        assert_eq!(v["all"][0], serde_json::json!({"kind": "max_literals", "k": 1}));
        let back: Predicate = serde_json::from_value(v).unwrap();
        assert!(back.judge(&Hypothesis::Const(Label::One)));
        assert!(serde_json::to_value(Predicate::custom("c", |_| true)).is_err());
    }

    #[test]
    fn hash_subset_is_stable() {
        let p = Predicate::HashSubset { seed: 11, fraction: 0.5 };
        let h: Hypothesis = Conjunction::parse(3, "x2").unwrap().into();
        assert_eq!(p.judge(&h), p.judge(&h.clone()));
        assert!(!Predicate::HashSubset { seed: 11, fraction: 0.0 }.judge(&h));
        assert!(Predicate::HashSubset { seed: 11, fraction: 1.0 + 1e-9 }.judge(&h));
    }
}
