use std::fmt;

use serde::{Deserialize, Serialize};

/// Largest ground set size supported by the core value types.
pub const MAX_GROUND: u8 = 12;

/// One subset of `{1, ..., n}` stored as its characteristic vector.
///
/// Element `i` (1-based) is present iff bit `i - 1` is set. The ground size
/// is carried by the surrounding [`SetFamily`](crate::SetFamily), not by the
/// mask itself.
#[derive(
    Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(transparent)]
pub struct SubsetMask(u16);

impl SubsetMask {
    pub const EMPTY: SubsetMask = SubsetMask(0);

    pub const fn from_bits(bits: u16) -> Self {
        SubsetMask(bits)
    }

    pub const fn bits(self) -> u16 {
        self.0
    }

    /// The whole ground set `M_n`.
    pub const fn full(n: u8) -> Self {
        SubsetMask(((1u32 << n) - 1) as u16)
    }

    /// Builds a mask from 1-based element labels. Labels outside `1..=16`
    /// are rejected.
    pub fn from_elements<I: IntoIterator<Item = u8>>(labels: I) -> Option<Self> {
        let mut bits = 0u16;
        for label in labels {
            if label == 0 || label > 16 {
                return None;
            }
            bits |= 1 << (label - 1);
        }
        Some(SubsetMask(bits))
    }

    pub const fn len(self) -> u32 {
        self.0.count_ones()
    }

    pub const fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub const fn contains(self, label: u8) -> bool {
        label >= 1 && label <= 16 && self.0 & (1 << (label - 1)) != 0
    }

    pub const fn union(self, other: SubsetMask) -> SubsetMask {
        SubsetMask(self.0 | other.0)
    }

    pub const fn intersection(self, other: SubsetMask) -> SubsetMask {
        SubsetMask(self.0 & other.0)
    }

    pub const fn is_subset_of(self, other: SubsetMask) -> bool {
        self.0 & !other.0 == 0
    }

    /// True iff no bit at or above position `n` is set.
    pub const fn fits(self, n: u8) -> bool {
        (self.0 as u32) >> n == 0
    }

    /// Ascending 1-based labels.
    pub fn elements(self) -> impl Iterator<Item = u8> {
        (1..=16u8).filter(move |&i| self.contains(i))
    }

    /// Image of this set under an element relabeling.
    pub fn relabel(self, perm: &Permutation) -> SubsetMask {
        let mut out = 0u16;
        let mut rest = self.0;
        while rest != 0 {
            let i = rest.trailing_zeros() as usize;
            out |= 1 << perm.images[i];
            rest &= rest - 1;
        }
        SubsetMask(out)
    }
}

/// Family text notation: `{}` for the empty set, otherwise ascending labels
/// joined by commas.
impl fmt::Display for SubsetMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return f.write_str("{}");
        }
        let mut first = true;
        for e in self.elements() {
            if !first {
                f.write_str(",")?;
            }
            write!(f, "{e}")?;
            first = false;
        }
        Ok(())
    }
}

/// A permutation of `{1, ..., n}`, stored 0-based: element `i + 1` maps to
/// `images[i] + 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Permutation {
    images: Vec<u8>,
}

impl Permutation {
    pub fn identity(n: u8) -> Self {
        Permutation {
            images: (0..n).collect(),
        }
    }

    /// `images` must be a rearrangement of `0..images.len()`.
    pub fn from_images(images: Vec<u8>) -> Option<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &x in &images {
            let x = x as usize;
            if x >= n || seen[x] {
                return None;
            }
            seen[x] = true;
        }
        Some(Permutation { images })
    }

    pub fn degree(&self) -> u8 {
        self.images.len() as u8
    }

    /// 1-based image of a 1-based label.
    pub fn apply(&self, label: u8) -> u8 {
        self.images[label as usize - 1] + 1
    }

    pub fn images(&self) -> &[u8] {
        &self.images
    }

    pub fn is_identity(&self) -> bool {
        self.images
            .iter()
            .enumerate()
            .all(|(i, &x)| i == x as usize)
    }

    /// Every permutation of `{1, ..., n}`, identity first.
    pub fn all(n: u8) -> impl Iterator<Item = Permutation> {
        use itertools::Itertools;
        (0..n)
            .permutations(n as usize)
            .map(|images| Permutation { images })
    }
}
