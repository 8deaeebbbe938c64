//! Generate-and-filter oracle for cross-checking the search.

use std::collections::BTreeMap;

use crate::family::SetFamily;

use super::canonical::RelabelTables;
use super::packed::{iter_bits, PackedFamily, MAX_PACKED_GROUND};
use super::{EnumerationConstraints, EnumerationError};

/// Largest candidate pool the oracle will expand (2^22 subsets).
pub const MAX_ORACLE_POOL: usize = 22;

/// Every family satisfying `constraints`, found by testing each subset of
/// the candidate pool. With `up_to_iso`, one family per isomorphism class:
/// its canonical key, in ascending key order.
pub fn brute_force_enumerate(
    constraints: &EnumerationConstraints,
) -> Result<Vec<SetFamily>, EnumerationError> {
    let n = constraints.n;
    if n > MAX_PACKED_GROUND {
        return Err(EnumerationError::InfeasibleScale(format!(
            "oracle supports n <= {MAX_PACKED_GROUND}, got n = {n}"
        )));
    }
    let full = (1u64 << n) - 1;
    let mut fixed = 1u64; // ∅
    let mut pool = Vec::new();
    for mask in 1..=full {
        let size = mask.count_ones();
        if constraints.require_universe && mask == full {
            fixed |= 1u64 << mask;
        } else if size >= constraints.t as u32 {
            pool.push(mask);
        }
    }
    if pool.len() > MAX_ORACLE_POOL {
        return Err(EnumerationError::InfeasibleScale(format!(
            "oracle pool has {} candidate sets, limit is {MAX_ORACLE_POOL}",
            pool.len()
        )));
    }

    let mut found = Vec::new();
    for choice in 0u64..(1u64 << pool.len()) {
        let bits = iter_bits(choice).fold(fixed, |acc, i| acc | 1u64 << pool[i as usize]);
        if closed_under_union(bits) {
            found.push(PackedFamily { n, bits });
        }
    }

    if !constraints.up_to_iso {
        return Ok(found.into_iter().map(PackedFamily::to_family).collect());
    }
    let tables = RelabelTables::new(n);
    let classes: BTreeMap<_, ()> = found
        .into_iter()
        .map(|f| (tables.canonical_key(f), ()))
        .collect();
    Ok(classes.into_keys().map(|k| k.into_family()).collect())
}

fn closed_under_union(bits: u64) -> bool {
    iter_bits(bits).all(|a| iter_bits(bits).all(|b| bits & (1u64 << (a | b)) != 0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_element_ground() {
        let c = EnumerationConstraints::new(2, 1, true, false).unwrap();
        let all = brute_force_enumerate(&c).unwrap();
        assert_eq!(all.len(), 4);
        let c = EnumerationConstraints::new(2, 1, true, true).unwrap();
        assert_eq!(brute_force_enumerate(&c).unwrap().len(), 3);
    }

    #[test]
    fn only_one_three_set_at_n3() {
        let c = EnumerationConstraints::new(3, 3, true, false).unwrap();
        let all = brute_force_enumerate(&c).unwrap();
        assert_eq!(all.len(), 1);
        assert_eq!(all[0].len(), 2);
    }

    #[test]
    fn n4_t3_pool_is_four_triples() {
        // Candidates: the four 3-subsets; M_4 is fixed. Any two distinct
        // triples union to M_4, so every subset of triples is closed.
        let c = EnumerationConstraints::new(4, 3, true, false).unwrap();
        assert_eq!(brute_force_enumerate(&c).unwrap().len(), 16);
        let c = EnumerationConstraints::new(4, 3, true, true).unwrap();
        assert_eq!(brute_force_enumerate(&c).unwrap().len(), 5);
    }

    #[test]
    fn refuses_large_pools() {
        let c = EnumerationConstraints::new(6, 2, true, false).unwrap();
        assert!(matches!(
            brute_force_enumerate(&c),
            Err(EnumerationError::InfeasibleScale(_))
        ));
    }
}
