use ucf_core::decomposition::{abundance_witness, classify_shape, pair_decompose, ShapeTag};
use ucf_core::family::{lemma_1_2_bound, union_closure};
use ucf_core::verifier::{check_single, Verdict};
use ucf_core::{SetFamily, SubsetMask};

fn set(labels: &[u8]) -> SubsetMask {
    SubsetMask::from_elements(labels.iter().copied()).unwrap()
}

fn fam(sets: &[&[u8]]) -> SetFamily {
    SetFamily::from_iter_dedup(6, sets.iter().map(|s| set(s))).unwrap()
}

const M6: &[u8] = &[1, 2, 3, 4, 5, 6];

fn witness_of(f: &SetFamily) -> Vec<u8> {
    let record = check_single(f);
    assert!(record.passed());
    assert_eq!(record.s_frankl, Verdict::Pass);
    record.witness.expect("witness").elements
}

#[test]
fn single_triple() {
    let f = fam(&[&[], &[1, 2, 3], M6]);
    assert_eq!(witness_of(&f), vec![1, 2, 3]);
    assert_eq!(classify_shape(&f).unwrap().tag, ShapeTag::G3);
}

#[test]
fn two_complementary_triples() {
    let f = fam(&[&[], &[1, 2, 3], &[4, 5, 6], M6]);
    assert_eq!(witness_of(&f), vec![1, 2, 3, 4, 5, 6]);
    let d = pair_decompose(&[set(&[1, 2, 3]), set(&[4, 5, 6])], set(M6));
    assert_eq!(d.pairs, vec![(0, 1)]);
    assert!(d.residue.is_empty());
}

#[test]
fn four_triples_closure() {
    let f = union_closure(&fam(&[&[1, 2, 3], &[1, 4, 5], &[2, 4, 6], &[3, 5, 6], &[]]));
    assert_eq!(f.len(), 12);
    let w = abundance_witness(&f).unwrap();
    assert_eq!(w.elements, vec![1, 2, 3, 4, 5, 6]);
    assert!(w
        .certificates
        .iter()
        .all(|c| c.m == 12 && c.freq == 8 && c.is_sound()));
    assert_eq!(classify_shape(&f).unwrap().tag, ShapeTag::G3_G5);
}

#[test]
fn three_triples_under_a_five_set() {
    let f = union_closure(&fam(&[
        &[],
        &[1, 2, 3],
        &[1, 2, 4],
        &[1, 2, 5],
        &[1, 2, 3, 4, 5],
        M6,
    ]));
    let record = check_single(&f);
    assert_eq!(record.frequency.m, 9);
    assert_eq!(record.frequency.freq, vec![8, 8, 5, 5, 5, 1]);
    assert_eq!(witness_of(&f), vec![1, 2, 3, 4, 5]);
}

#[test]
fn co_atoms_of_m6() {
    let coatoms: Vec<SubsetMask> = (1..=6u8)
        .map(|i| SubsetMask::full(6).intersection(SubsetMask::from_bits(!(1 << (i - 1)))))
        .collect();
    for size in 2..=6 {
        let g = SetFamily::new(6, coatoms[..size].to_vec()).unwrap();
        let bound = lemma_1_2_bound(SubsetMask::full(6), &g).unwrap();
        assert!(bound.holds);
        assert_eq!(bound.min_freq as usize, size - 1);
    }
}
