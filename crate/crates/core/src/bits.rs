//! Fixed-length boolean vectors packed into 64-bit words.
//!
//! Bit `i` holds variable `i + 1`. Vectors of length up to 64 live inline.

use std::cmp::Ordering;
use std::fmt;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use smallvec::{smallvec, SmallVec};

type Words = SmallVec<[u64; 1]>;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitVector {
    len: usize,
    words: Words,
}

fn word_count(len: usize) -> usize {
    len.div_ceil(64).max(1)
}

impl BitVector {
    pub fn zeros(len: usize) -> Self {
        BitVector {
            len,
            words: smallvec![0; word_count(len)],
        }
    }

    pub fn ones(len: usize) -> Self {
        let mut v = BitVector {
            len,
            words: smallvec![u64::MAX; word_count(len)],
        };
        v.clear_tail();
        v
    }

    /// Builds the vector whose bits are the binary digits of `value`.
    pub fn from_index(len: usize, value: u64) -> Self {
        let mut v = Self::zeros(len);
        v.words[0] = value;
        v.clear_tail();
        v
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b {
                v.set(i, true);
            }
        }
        v
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        debug_assert!(i < self.len);
        let mask = 1u64 << (i % 64);
        if value {
            self.words[i / 64] |= mask;
        } else {
            self.words[i / 64] &= !mask;
        }
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    /// Integer value of the pattern (only meaningful for `len <= 64`).
    pub fn as_index(&self) -> u64 {
        self.words[0]
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    /// Indices of set bits in increasing order.
    pub fn ones_indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut rest = w;
            std::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let tz = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(wi * 64 + tz)
            })
        })
    }

    pub fn and_assign(&mut self, other: &BitVector) {
        for (a, b) in self.words.iter_mut().zip(other.words.iter()) {
            *a &= *b;
        }
    }

    pub fn and_not_assign(&mut self, other: &BitVector) {
        for (a, b) in self.words.iter_mut().zip(other.words.iter()) {
            *a &= !*b;
        }
    }

    pub fn intersects(&self, other: &BitVector) -> bool {
        self.words
            .iter()
            .zip(other.words.iter())
            .any(|(a, b)| a & b != 0)
    }

    /// True iff every set bit of `self` is set in `other`.
    #[inline]
    pub fn is_subset_of(&self, other: &BitVector) -> bool {
        self.words
            .iter()
            .zip(other.words.iter())
            .all(|(a, b)| a & !b == 0)
    }

    /// True iff no set bit of `self` is set in `other`.
    #[inline]
    pub fn is_disjoint(&self, other: &BitVector) -> bool {
        !self.intersects(other)
    }

    fn clear_tail(&mut self) {
        let rem = self.len % 64;
        let last = word_count(self.len) - 1;
        if self.len == 0 {
            self.words[0] = 0;
        } else if rem != 0 {
            self.words[last] &= (1u64 << rem) - 1;
        }
    }
}

impl Ord for BitVector {
    /// Numeric order of the bit pattern, variable 1 least significant.
    fn cmp(&self, other: &Self) -> Ordering {
        self.len.cmp(&other.len).then_with(|| {
            for (a, b) in self.words.iter().rev().zip(other.words.iter().rev()) {
                match a.cmp(b) {
                    Ordering::Equal => continue,
                    ord => return ord,
                }
            }
            Ordering::Equal
        })
    }
}

impl PartialOrd for BitVector {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, b) in self.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", b as u8)?;
        }
        write!(f, ")")
    }
}

impl Serialize for BitVector {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let bits: Vec<u8> = self.iter().map(u8::from).collect();
        bits.serialize(s)
    }
}

impl<'de> Deserialize<'de> for BitVector {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = Vec::<u8>::deserialize(d)?;
        let mut bools = Vec::with_capacity(raw.len());
        for b in raw {
            match b {
                0 => bools.push(false),
                1 => bools.push(true),
                other => return Err(D::Error::custom(format!("bit must be 0 or 1, got {other}"))),
            }
        }
        Ok(BitVector::from_bools(&bools))
    }
}
