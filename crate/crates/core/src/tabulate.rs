//! Truth-table view of a class over a small cube (`n <= 6`).
//!
//! Each distinct function computed by the class is stored once, with the
//! canonical rank of its first representation and its multiplicity. Scans
//! over this view reproduce the canonical tie-break of the exhaustive search
//! because entries are kept in order of first occurrence.

use std::collections::HashMap;

use crate::domain::{Dataset, FiniteDistribution};
use crate::error::{LabError, Result};
use crate::hypotheses::{Hypothesis, HypothesisClass};

pub const MAX_TABULATED_DIM: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TableEntry {
    /// Bit `x` holds the prediction on the point with integer code `x`.
    pub table: u64,
    pub first_rank: u128,
    pub multiplicity: u64,
}

#[derive(Debug, Clone)]
pub struct TabulatedClass {
    class: HypothesisClass,
    entries: Vec<TableEntry>,
}

/// Per-point positive/negative label counts of a sample.
#[derive(Debug, Clone)]
pub struct SampleCounts {
    pos: Vec<u32>,
    neg: Vec<u32>,
    m: usize,
}

impl SampleCounts {
    pub fn new(sample: &Dataset) -> Self {
        let size = 1usize << sample.n();
        let mut pos = vec![0u32; size];
        let mut neg = vec![0u32; size];
        for e in sample.iter() {
            let x = e.x.as_index() as usize;
            if e.y.is_positive() {
                pos[x] += 1;
            } else {
                neg[x] += 1;
            }
        }
        SampleCounts { pos, neg, m: sample.m() }
    }

    #[inline]
    pub fn errors(&self, table: u64) -> usize {
        let mut e = 0;
        for x in 0..self.pos.len() {
            e += if (table >> x) & 1 == 1 { self.neg[x] } else { self.pos[x] } as usize;
        }
        e
    }

    pub fn m(&self) -> usize {
        self.m
    }
}

/// Per-point label masses of a distribution.
#[derive(Debug, Clone)]
pub struct MassTable {
    pos: Vec<f64>,
    neg: Vec<f64>,
}

impl MassTable {
    pub fn new(dist: &FiniteDistribution) -> Self {
        let size = 1usize << dist.n();
        let mut pos = vec![0.0; size];
        let mut neg = vec![0.0; size];
        for a in dist.support() {
            let x = a.x.as_index() as usize;
            if a.y.is_positive() {
                pos[x] += a.p;
            } else {
                neg[x] += a.p;
            }
        }
        MassTable { pos, neg }
    }

    #[inline]
    pub fn risk(&self, table: u64) -> f64 {
        let mut r = 0.0;
        for x in 0..self.pos.len() {
            r += if (table >> x) & 1 == 1 { self.neg[x] } else { self.pos[x] };
        }
        r.clamp(0.0, 1.0)
    }
}

/// Minimizer over a tabulated class.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TabulatedErm {
    pub entry: usize,
    pub errors: usize,
    pub minimizer_count: u64,
}

impl TabulatedClass {
    pub fn new(class: &HypothesisClass) -> Result<Self> {
        let n = class.n();
        if n > MAX_TABULATED_DIM {
            return Err(LabError::param("n", format!("tabulation needs n <= {MAX_TABULATED_DIM}")));
        }
        let points: Vec<_> = class.domain().points()?.collect();
        let mut index: HashMap<u64, usize> = HashMap::new();
        let mut entries: Vec<TableEntry> = Vec::new();
        for (rank, h) in class.ranked_members()? {
            let mut table = 0u64;
            for (i, x) in points.iter().enumerate() {
                if h.predict(x) {
                    table |= 1 << i;
                }
            }
            match index.get(&table) {
                Some(&i) => entries[i].multiplicity += 1,
                None => {
                    index.insert(table, entries.len());
                    entries.push(TableEntry { table, first_rank: rank, multiplicity: 1 });
                }
            }
        }
        if entries.is_empty() {
            return Err(LabError::EmptyClass(class.name().to_string()));
        }
        Ok(TabulatedClass { class: class.clone(), entries })
    }

    pub fn class(&self) -> &HypothesisClass {
        &self.class
    }

    pub fn entries(&self) -> &[TableEntry] {
        &self.entries
    }

    /// The canonical representative of entry `i`.
    pub fn representative(&self, i: usize) -> Result<Hypothesis> {
        self.class.unrank(self.entries[i].first_rank)
    }

    pub fn erm(&self, counts: &SampleCounts) -> TabulatedErm {
        let mut best = TabulatedErm { entry: 0, errors: usize::MAX, minimizer_count: 0 };
        for (i, e) in self.entries.iter().enumerate() {
            let err = counts.errors(e.table);
            if err < best.errors {
                best = TabulatedErm { entry: i, errors: err, minimizer_count: e.multiplicity };
            } else if err == best.errors {
                best.minimizer_count += e.multiplicity;
            }
        }
        best
    }

    pub fn min_risk(&self, masses: &MassTable) -> f64 {
        self.entries
            .iter()
            .map(|e| masses.risk(e.table))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn worst_case_gap(&self, counts: &SampleCounts, masses: &MassTable) -> f64 {
        let m = counts.m() as f64;
        self.entries
            .iter()
            .map(|e| (masses.risk(e.table) - counts.errors(e.table) as f64 / m).abs())
            .fold(0.0, f64::max)
    }
}
