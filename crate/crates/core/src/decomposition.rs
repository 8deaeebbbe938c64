//! Structural analysis of union-closed families with `T(F) = 3` over `M_6`:
//! the four level shapes, pairings of a level slice into sets whose union is
//! a fixed target, the union signature of what is left unpaired, and
//! certified abundance witnesses.

use std::collections::BTreeMap;
use std::fmt;

use petgraph::algo::maximum_matching;
use petgraph::graph::UnGraph;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::family::{
    frequency_profile, is_union_closed, level_profile, s_frankl_holds, t_value, FamilyError,
    LevelProfile, SetFamily,
};
use crate::mask::SubsetMask;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecompositionError {
    #[error("family is outside the n = 6, T(F) = 3 shape taxonomy: {0}")]
    NotInScope(String),
    #[error("no abundance witness: fewer than T(F) elements are abundant")]
    WitnessUnavailable,
    #[error(transparent)]
    Family(#[from] FamilyError),
}

/// Which of the levels 4 and 5 are populated in `{∅, M_6} ∪ G_3 [∪ G_4] [∪ G_5]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[allow(non_camel_case_types)]
pub enum ShapeTag {
    G3,
    G3_G5,
    G3_G4,
    G3_G4_G5,
}

impl ShapeTag {
    pub const ALL: [ShapeTag; 4] = [
        ShapeTag::G3,
        ShapeTag::G3_G5,
        ShapeTag::G3_G4,
        ShapeTag::G3_G4_G5,
    ];

    pub fn from_levels(has_four: bool, has_five: bool) -> ShapeTag {
        match (has_four, has_five) {
            (false, false) => ShapeTag::G3,
            (false, true) => ShapeTag::G3_G5,
            (true, false) => ShapeTag::G3_G4,
            (true, true) => ShapeTag::G3_G4_G5,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ShapeTag::G3 => "G3",
            ShapeTag::G3_G5 => "G3_G5",
            ShapeTag::G3_G4 => "G3_G4",
            ShapeTag::G3_G4_G5 => "G3_G4_G5",
        }
    }
}

impl fmt::Display for ShapeTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShapeClass {
    pub tag: ShapeTag,
    pub level_profile: LevelProfile,
}

pub fn classify_shape(family: &SetFamily) -> Result<ShapeClass, DecompositionError> {
    let out = |why: &str| Err(DecompositionError::NotInScope(why.to_string()));
    if family.n() != 6 {
        return out("ground size is not 6");
    }
    if !family.contains(SubsetMask::EMPTY) {
        return out("∅ is not a member");
    }
    if !family.contains(family.universe()) {
        return out("M_6 is not a member");
    }
    match t_value(family) {
        Ok(3) => {}
        Ok(_) | Err(_) => return out("T(F) is not 3"),
    }
    if !is_union_closed(family) {
        return out("family is not union-closed");
    }
    let levels = level_profile(family);
    Ok(ShapeClass {
        tag: ShapeTag::from_levels(levels.count(4) > 0, levels.count(5) > 0),
        level_profile: levels,
    })
}

/// A maximum set of disjoint index pairs whose members union to the target,
/// plus the indices left over.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairDecomposition {
    pub pairs: Vec<(usize, usize)>,
    pub residue: Vec<usize>,
    pub k: usize,
}

impl PairDecomposition {
    /// True iff every pair is disjoint from the others, achieves the target
    /// union, and pairs plus residue partition `0..slice.len()`.
    pub fn is_valid_for(&self, slice: &[SubsetMask], target: SubsetMask) -> bool {
        let mut seen = vec![false; slice.len()];
        let mut mark = |i: usize| i < seen.len() && !std::mem::replace(&mut seen[i], true);
        let pairs_ok = self
            .pairs
            .iter()
            .all(|&(i, j)| mark(i) && mark(j) && slice[i].union(slice[j]) == target);
        let residue_ok = self.residue.iter().all(|&i| mark(i));
        pairs_ok && residue_ok && seen.iter().all(|&s| s) && self.k == self.pairs.len()
    }
}

/// Pairs up `slice` into sets whose union is `target`, as many pairs as
/// possible.
///
/// Among all maximum matchings the lexicographically least pair list (pairs
/// written `(i, j)` with `i < j`, listed in ascending order) is returned.
pub fn pair_decompose(slice: &[SubsetMask], target: SubsetMask) -> PairDecomposition {
    let n = slice.len();
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if slice[i].union(slice[j]) == target {
                edges.push((i, j));
            }
        }
    }

    let mut alive = vec![true; n];
    let mut remaining = max_pairs(&edges, &alive);
    let mut pairs = Vec::with_capacity(remaining);

    for i in 0..n {
        if remaining == 0 {
            break;
        }
        if !alive[i] {
            continue;
        }
        let partners: Vec<usize> = edges
            .iter()
            .filter(|&&(a, b)| a == i && alive[b])
            .map(|&(_, b)| b)
            .collect();
        let mut chosen = None;
        for j in partners {
            alive[i] = false;
            alive[j] = false;
            if max_pairs(&edges, &alive) + 1 == remaining {
                chosen = Some(j);
                break;
            }
            alive[j] = true;
        }
        // Either i is paired with j, or i is unmatched in every maximum matching.
        alive[i] = false;
        if let Some(j) = chosen {
            pairs.push((i, j));
            remaining -= 1;
        }
    }

    let mut matched = vec![false; n];
    for &(i, j) in &pairs {
        matched[i] = true;
        matched[j] = true;
    }
    let residue = (0..n).filter(|&i| !matched[i]).collect();
    PairDecomposition {
        k: pairs.len(),
        pairs,
        residue,
    }
}

/// Size of a maximum matching among the `alive` endpoints of `edges`.
fn max_pairs(edges: &[(usize, usize)], alive: &[bool]) -> usize {
    let graph = UnGraph::<(), ()>::from_edges(
        edges
            .iter()
            .filter(|&&(i, j)| alive[i] && alive[j])
            .map(|&(i, j)| (i as u32, j as u32)),
    );
    maximum_matching(&graph).len()
}

/// Union of every pair of residue members, keyed by index pair `(i, j)`,
/// `i < j`.
pub fn residue_union_signature(residue: &[SubsetMask]) -> BTreeMap<(usize, usize), SubsetMask> {
    let mut out = BTreeMap::new();
    for i in 0..residue.len() {
        for j in i + 1..residue.len() {
            out.insert((i, j), residue[i].union(residue[j]));
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ElementCertificate {
    pub element: u8,
    pub freq: u32,
    pub m: u32,
}

impl ElementCertificate {
    pub fn is_sound(&self) -> bool {
        2 * self.freq >= self.m
    }
}

/// Elements occurring in at least half of the members, with the counts that
/// certify each one.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AbundanceWitness {
    pub elements: Vec<u8>,
    pub certificates: Vec<ElementCertificate>,
}

pub fn abundance_witness(family: &SetFamily) -> Result<AbundanceWitness, DecompositionError> {
    if !s_frankl_holds(family)? {
        return Err(DecompositionError::WitnessUnavailable);
    }
    let profile = frequency_profile(family);
    let elements = profile.abundant_elements();
    let certificates = elements
        .iter()
        .map(|&e| ElementCertificate {
            element: e,
            freq: profile.freq_of(e),
            m: profile.m,
        })
        .collect();
    Ok(AbundanceWitness {
        elements,
        certificates,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::union_closure;

    fn set(labels: &[u8]) -> SubsetMask {
        SubsetMask::from_elements(labels.iter().copied()).unwrap()
    }

    fn fam(sets: &[&[u8]]) -> SetFamily {
        SetFamily::new(6, sets.iter().map(|s| set(s)).collect()).unwrap()
    }

    const M6: &[u8] = &[1, 2, 3, 4, 5, 6];

    #[test]
    fn shapes_of_worked_families() {
        let tag = |f: &SetFamily| classify_shape(f).unwrap().tag;
        assert_eq!(tag(&fam(&[&[], &[1, 2, 3], M6])), ShapeTag::G3);
        assert_eq!(
            tag(&fam(&[&[], &[1, 2, 3], &[1, 2, 3, 4, 5], M6])),
            ShapeTag::G3_G5
        );
        assert_eq!(
            tag(&fam(&[&[], &[1, 2, 3], &[1, 2, 3, 4], M6])),
            ShapeTag::G3_G4
        );
        assert_eq!(
            tag(&fam(&[
                &[],
                &[1, 2, 3],
                &[1, 2, 3, 4],
                &[1, 2, 3, 4, 5],
                M6
            ])),
            ShapeTag::G3_G4_G5
        );
    }

    #[test]
    fn shape_rejects_out_of_scope() {
        let not_scope =
            |f: &SetFamily| matches!(classify_shape(f), Err(DecompositionError::NotInScope(_)));
        assert!(not_scope(&fam(&[&[], &[1, 2], M6])));
        assert!(not_scope(&fam(&[&[1, 2, 3], M6])));
        assert!(not_scope(&fam(&[&[], &[1, 2, 3]])));
        assert!(not_scope(&fam(&[&[], &[1, 2, 3], &[1, 4, 5], M6])));
        let n5 = SetFamily::new(5, vec![set(&[]), set(&[1, 2, 3]), SubsetMask::full(5)]).unwrap();
        assert!(not_scope(&n5));
    }

    #[test]
    fn pair_decompose_examples() {
        let target = SubsetMask::full(6);
        let d = pair_decompose(&[set(&[1, 2, 3]), set(&[4, 5, 6])], target);
        assert_eq!(d.k, 1);
        assert_eq!(d.pairs, vec![(0, 1)]);
        assert!(d.residue.is_empty());

        let d = pair_decompose(&[set(&[1, 2, 3]), set(&[1, 4, 5])], target);
        assert_eq!(d.k, 0);
        assert_eq!(d.residue, vec![0, 1]);

        let slice = [
            set(&[1, 2, 3]),
            set(&[4, 5, 6]),
            set(&[1, 2, 4]),
            set(&[3, 5, 6]),
            set(&[1, 2, 5]),
        ];
        let d = pair_decompose(&slice, target);
        assert_eq!(d.k, 2);
        assert_eq!(d.pairs, vec![(0, 1), (2, 3)]);
        assert_eq!(d.residue, vec![4]);
        assert!(d.is_valid_for(&slice, target));

        let d = pair_decompose(&[], target);
        assert_eq!((d.k, d.residue.len()), (0, 0));
    }

    #[test]
    fn tie_break_prefers_least_pair_list() {
        // Five-sets pair with each other; the triangle 0-1-2 has three maximum
        // matchings of size 1 and (0,1) is the least.
        let target = SubsetMask::full(6);
        let slice = [
            set(&[1, 2, 3, 4, 5]),
            set(&[1, 2, 3, 4, 6]),
            set(&[1, 2, 3, 5, 6]),
        ];
        let d = pair_decompose(&slice, target);
        assert_eq!(d.pairs, vec![(0, 1)]);
        assert_eq!(d.residue, vec![2]);

        // Vertex 0 only pairs with 1, and 1 is also needed by 2: taking (0,1)
        // would still leave (2,3) so (0,1) is chosen.
        let slice = [
            set(&[1, 2, 3]),
            set(&[4, 5, 6]),
            set(&[1, 2, 3, 4, 5]),
            set(&[1, 2, 3, 4, 6]),
        ];
        let d = pair_decompose(&slice, target);
        assert_eq!(d.pairs, vec![(0, 1), (2, 3)]);
    }

    #[test]
    fn matched_sets_cover_every_element_k_times() {
        let target = SubsetMask::full(6);
        let slice = [
            set(&[1, 2, 3]),
            set(&[4, 5, 6]),
            set(&[1, 2, 4]),
            set(&[3, 5, 6]),
            set(&[1, 2, 5]),
        ];
        let d = pair_decompose(&slice, target);
        for e in 1..=6u8 {
            let hits = d
                .pairs
                .iter()
                .flat_map(|&(i, j)| [i, j])
                .filter(|&i| slice[i].contains(e))
                .count();
            assert!(hits >= d.k);
        }
    }

    #[test]
    fn residue_signatures() {
        let sig = residue_union_signature(&[set(&[1, 2, 3]), set(&[1, 4, 5])]);
        assert_eq!(sig.len(), 1);
        assert_eq!(sig[&(0, 1)], set(&[1, 2, 3, 4, 5]));

        assert!(residue_union_signature(&[]).is_empty());

        let sig = residue_union_signature(&[set(&[1, 2, 3]), set(&[1, 4, 5]), set(&[2, 4, 6])]);
        let unions: Vec<SubsetMask> = sig.values().copied().collect();
        assert_eq!(
            unions,
            vec![
                set(&[1, 2, 3, 4, 5]),
                set(&[1, 2, 3, 4, 6]),
                set(&[1, 2, 4, 5, 6])
            ]
        );
    }

    #[test]
    fn witnesses_of_worked_families() {
        let w = abundance_witness(&fam(&[&[], &[1, 2, 3], M6])).unwrap();
        assert_eq!(w.elements, vec![1, 2, 3]);
        assert!(w.certificates.iter().all(|c| (c.freq, c.m) == (2, 3)));

        let w = abundance_witness(&fam(&[&[], &[1, 2, 3], &[4, 5, 6], M6])).unwrap();
        assert_eq!(w.elements, vec![1, 2, 3, 4, 5, 6]);
        assert!(w.certificates.iter().all(|c| (c.freq, c.m) == (2, 4)));

        let seed = fam(&[&[], &[1, 2, 3], &[1, 4, 5], &[2, 4, 6], &[3, 5, 6]]);
        let closed = union_closure(&seed);
        let w = abundance_witness(&closed).unwrap();
        assert_eq!(w.elements, vec![1, 2, 3, 4, 5, 6]);
        for c in &w.certificates {
            let recount = closed
                .members()
                .iter()
                .filter(|m| m.contains(c.element))
                .count() as u32;
            assert_eq!((c.freq, c.m), (recount, closed.len() as u32));
            assert!(c.is_sound());
        }
    }

    #[test]
    fn witness_errors() {
        // T = 1: the S-Frankl statement does not apply.
        let f = fam(&[&[], &[1], M6]);
        assert_eq!(
            abundance_witness(&f),
            Err(DecompositionError::Family(FamilyError::NotApplicable(1)))
        );
        let f = fam(&[&[], &[1, 2, 3], &[4, 5, 6]]);
        assert_eq!(
            abundance_witness(&f),
            Err(DecompositionError::Family(FamilyError::NotUnionClosed))
        );
    }
}
