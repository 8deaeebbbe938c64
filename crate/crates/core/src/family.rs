//! Finite families of subsets of a small ground set `M_n = {1, ..., n}` and
//! the predicates used throughout the crate: union-closure, the minimum
//! nonempty level `T(F)`, element frequencies and abundance, and the co-atom
//! frequency bound.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::mask::{Permutation, SubsetMask, MAX_GROUND};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FamilyError {
    #[error("ground set size {0} is outside 2..={MAX_GROUND}")]
    InvalidGroundSize(u8),
    #[error("member {mask} does not fit in a ground set of size {n}")]
    MemberOutOfRange { mask: SubsetMask, n: u8 },
    #[error("duplicate member {0}")]
    DuplicateMember(SubsetMask),
    #[error("family has no nonempty member")]
    NoNonemptyMember,
    #[error("family consists only of the empty set")]
    DegenerateFamily,
    #[error("family is not union-closed")]
    NotUnionClosed,
    #[error("S-Frankl property is only stated for T(F) >= 2, got T(F) = {0}")]
    NotApplicable(u32),
    #[error("precondition violated: {0}")]
    PreconditionViolation(String),
}

/// A family of distinct subsets of `M_n`, stored in ascending mask order.
///
/// Equality is structural on `(n, members)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SetFamily {
    n: u8,
    members: Vec<SubsetMask>,
}

impl SetFamily {
    /// Validates and sorts `members`. Duplicates are an error.
    pub fn new(n: u8, members: Vec<SubsetMask>) -> Result<Self, FamilyError> {
        check_ground(n)?;
        let mut members = members;
        for &mask in &members {
            if !mask.fits(n) {
                return Err(FamilyError::MemberOutOfRange { mask, n });
            }
        }
        members.sort_unstable();
        if let Some(w) = members.windows(2).find(|w| w[0] == w[1]) {
            return Err(FamilyError::DuplicateMember(w[0]));
        }
        Ok(SetFamily { n, members })
    }

    /// Like [`SetFamily::new`] but silently drops duplicates.
    pub fn from_iter_dedup<I>(n: u8, members: I) -> Result<Self, FamilyError>
    where
        I: IntoIterator<Item = SubsetMask>,
    {
        let set: BTreeSet<SubsetMask> = members.into_iter().collect();
        SetFamily::new(n, set.into_iter().collect())
    }

    /// Caller guarantees the members are in range, strictly ascending.
    pub(crate) fn from_sorted_unchecked(n: u8, members: Vec<SubsetMask>) -> Self {
        debug_assert!(members.windows(2).all(|w| w[0] < w[1]));
        debug_assert!(members.iter().all(|m| m.fits(n)));
        SetFamily { n, members }
    }

    pub fn n(&self) -> u8 {
        self.n
    }

    pub fn members(&self) -> &[SubsetMask] {
        &self.members
    }

    /// `m = |F|`, the empty set included.
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, mask: SubsetMask) -> bool {
        self.members.binary_search(&mask).is_ok()
    }

    pub fn universe(&self) -> SubsetMask {
        SubsetMask::full(self.n)
    }

    /// Union of all members.
    pub fn span(&self) -> SubsetMask {
        self.members
            .iter()
            .fold(SubsetMask::EMPTY, |acc, &m| acc.union(m))
    }

    pub fn has_nonempty_member(&self) -> bool {
        self.members.iter().any(|m| !m.is_empty())
    }

    /// Members of cardinality exactly `k`, in storage order.
    pub fn level(&self, k: u32) -> Vec<SubsetMask> {
        self.members
            .iter()
            .copied()
            .filter(|m| m.len() == k)
            .collect()
    }

    /// `σ·F`: every member relabeled by `perm`.
    pub fn relabel(&self, perm: &Permutation) -> SetFamily {
        assert_eq!(perm.degree(), self.n, "permutation degree must equal n");
        let mut members: Vec<SubsetMask> = self.members.iter().map(|m| m.relabel(perm)).collect();
        members.sort_unstable();
        SetFamily { n: self.n, members }
    }

    pub fn with_member(&self, mask: SubsetMask) -> Result<SetFamily, FamilyError> {
        let mut members = self.members.clone();
        members.push(mask);
        SetFamily::new(self.n, members)
    }
}

fn check_ground(n: u8) -> Result<(), FamilyError> {
    if (2..=MAX_GROUND).contains(&n) {
        Ok(())
    } else {
        Err(FamilyError::InvalidGroundSize(n))
    }
}

/// Per-cardinality member counts `n_0, ..., n_n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelProfile {
    counts: Vec<u32>,
}

impl LevelProfile {
    pub fn count(&self, k: usize) -> u32 {
        self.counts.get(k).copied().unwrap_or(0)
    }

    pub fn counts(&self) -> &[u32] {
        &self.counts
    }

    pub fn total(&self) -> u32 {
        self.counts.iter().sum()
    }
}

/// Occurrence counts of each element and the abundance verdicts derived
/// from them.
///
/// `freq[i - 1]` is the number of members containing element `i`; element
/// `i` is abundant iff `2 * freq[i - 1] >= m`, with the empty set counted
/// in `m`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrequencyProfile {
    pub freq: Vec<u32>,
    pub m: u32,
    pub abundant: SubsetMask,
}

impl FrequencyProfile {
    pub fn freq_of(&self, label: u8) -> u32 {
        self.freq[label as usize - 1]
    }

    pub fn is_abundant(&self, label: u8) -> bool {
        self.abundant.contains(label)
    }

    pub fn abundant_count(&self) -> u32 {
        self.abundant.len()
    }

    pub fn abundant_elements(&self) -> Vec<u8> {
        self.abundant.elements().collect()
    }
}

impl fmt::Display for FrequencyProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "m={} freq=[", self.m)?;
        for (i, c) in self.freq.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "] abundant={{{}}}", self.abundant)
    }
}

pub fn is_union_closed(family: &SetFamily) -> bool {
    let members = family.members();
    members.iter().enumerate().all(|(i, &a)| {
        members[i + 1..]
            .iter()
            .all(|&b| family.contains(a.union(b)))
    })
}

/// Smallest union-closed superfamily of `family`.
pub fn union_closure(family: &SetFamily) -> SetFamily {
    let mut present: BTreeSet<SubsetMask> = family.members().iter().copied().collect();
    let mut frontier: Vec<SubsetMask> = present.iter().copied().collect();
    while let Some(a) = frontier.pop() {
        let snapshot: Vec<SubsetMask> = present.iter().copied().collect();
        for b in snapshot {
            let u = a.union(b);
            if present.insert(u) {
                frontier.push(u);
            }
        }
    }
    SetFamily::from_sorted_unchecked(family.n(), present.into_iter().collect())
}

/// Members added by [`union_closure`].
pub fn closure_delta(family: &SetFamily) -> Vec<SubsetMask> {
    union_closure(family)
        .members()
        .iter()
        .copied()
        .filter(|&m| !family.contains(m))
        .collect()
}

/// `T(F)`: the smallest cardinality of a nonempty member.
pub fn t_value(family: &SetFamily) -> Result<u32, FamilyError> {
    family
        .members()
        .iter()
        .filter(|m| !m.is_empty())
        .map(|m| m.len())
        .min()
        .ok_or(FamilyError::NoNonemptyMember)
}

pub fn level_profile(family: &SetFamily) -> LevelProfile {
    let mut counts = vec![0u32; family.n() as usize + 1];
    for m in family.members() {
        counts[m.len() as usize] += 1;
    }
    LevelProfile { counts }
}

pub fn frequency_profile(family: &SetFamily) -> FrequencyProfile {
    let n = family.n();
    let mut freq = vec![0u32; n as usize];
    for m in family.members() {
        for e in m.elements() {
            freq[e as usize - 1] += 1;
        }
    }
    let m = family.len() as u32;
    let abundant = SubsetMask::from_elements((1..=n).filter(|&i| 2 * freq[i as usize - 1] >= m))
        .expect("labels are within the ground set");
    FrequencyProfile { freq, m, abundant }
}

/// Frankl's property: some element lies in at least half of the members.
pub fn frankl_holds(family: &SetFamily) -> Result<bool, FamilyError> {
    if !family.has_nonempty_member() {
        return Err(FamilyError::DegenerateFamily);
    }
    if !is_union_closed(family) {
        return Err(FamilyError::NotUnionClosed);
    }
    Ok(frequency_profile(family).abundant_count() > 0)
}

/// S-Frankl property: at least `T(F)` elements lie in at least half of the
/// members. Only defined for `T(F) >= 2`.
pub fn s_frankl_holds(family: &SetFamily) -> Result<bool, FamilyError> {
    let t = t_value(family)?;
    if t < 2 {
        return Err(FamilyError::NotApplicable(t));
    }
    if !is_union_closed(family) {
        return Err(FamilyError::NotUnionClosed);
    }
    Ok(frequency_profile(family).abundant_count() >= t)
}

/// Outcome of measuring the co-atom frequency bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoatomBound {
    /// Minimum over `i ∈ M` of the number of members containing `i`.
    pub min_freq: u32,
    /// `min_freq >= |G| - 1`.
    pub holds: bool,
}

/// For a family `G` of at least two distinct co-atoms of `M` (subsets of
/// size `|M| - 1`), measures how many members of `G` every element of `M`
/// belongs to. The bound `|G| - 1` is expected to hold; this function
/// measures it rather than assuming it.
pub fn lemma_1_2_bound(outer: SubsetMask, coatoms: &SetFamily) -> Result<CoatomBound, FamilyError> {
    if outer.len() < 2 {
        return Err(FamilyError::PreconditionViolation(format!(
            "|M| = {} < 2",
            outer.len()
        )));
    }
    if coatoms.len() < 2 {
        return Err(FamilyError::PreconditionViolation(format!(
            "|G| = {} < 2",
            coatoms.len()
        )));
    }
    if let Some(bad) = coatoms
        .members()
        .iter()
        .find(|g| !g.is_subset_of(outer) || g.len() + 1 != outer.len())
    {
        return Err(FamilyError::PreconditionViolation(format!(
            "{bad} is not a co-atom of {outer}"
        )));
    }
    let min_freq = outer
        .elements()
        .map(|i| coatoms.members().iter().filter(|g| g.contains(i)).count() as u32)
        .min()
        .expect("|M| >= 2");
    Ok(CoatomBound {
        min_freq,
        holds: min_freq + 1 >= coatoms.len() as u32,
    })
}
