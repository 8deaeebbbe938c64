use std::fmt;

use crate::family::SetFamily;
use crate::format::format_family_inline;
use crate::mask::{Permutation, SubsetMask};

use super::packed::{iter_bits, PackedFamily};

/// Orbit representative of a family under relabeling of `M_n`: the
/// lexicographically least ascending member list over all permutations.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonicalKey {
    family: SetFamily,
}

impl CanonicalKey {
    pub fn n(&self) -> u8 {
        self.family.n()
    }

    pub fn members(&self) -> &[SubsetMask] {
        self.family.members()
    }

    pub fn as_family(&self) -> &SetFamily {
        &self.family
    }

    pub fn into_family(self) -> SetFamily {
        self.family
    }
}

impl fmt::Display for CanonicalKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_family_inline(&self.family))
    }
}

/// Scans all `n!` relabelings; intended for `n <= 8`.
pub fn canonical_key(family: &SetFamily) -> CanonicalKey {
    let mut best = family.clone();
    for perm in Permutation::all(family.n()).skip(1) {
        let image = family.relabel(&perm);
        if image.members() < best.members() {
            best = image;
        }
    }
    CanonicalKey { family: best }
}

/// Precomputed relabeling tables for packed families over `M_n`, `n <= 6`.
#[derive(Clone, Debug)]
pub struct RelabelTables {
    n: u8,
    /// One row per non-identity permutation: image of every mask.
    maps: Vec<[u8; 64]>,
}

impl RelabelTables {
    pub fn new(n: u8) -> Self {
        assert!(n <= 6);
        let maps = Permutation::all(n)
            .skip(1)
            .map(|p| {
                let mut row = [0u8; 64];
                for (mask, slot) in row.iter_mut().enumerate().take(1 << n) {
                    *slot = SubsetMask::from_bits(mask as u16).relabel(&p).bits() as u8;
                }
                row
            })
            .collect();
        RelabelTables { n, maps }
    }

    pub fn n(&self) -> u8 {
        self.n
    }

    /// Non-identity relabelings as mask maps.
    pub fn maps(&self) -> &[[u8; 64]] {
        &self.maps
    }

    pub fn apply(map: &[u8; 64], bits: u64) -> u64 {
        iter_bits(bits).fold(0u64, |acc, b| acc | 1u64 << map[b as usize])
    }

    /// Same result as [`canonical_key`], computed on the packed form.
    pub fn canonical_key(&self, family: PackedFamily) -> CanonicalKey {
        assert_eq!(family.n, self.n);
        let mut best = family.bits;
        for map in &self.maps {
            let image = Self::apply(map, family.bits);
            if sorted_list_less(image, best) {
                best = image;
            }
        }
        CanonicalKey {
            family: PackedFamily {
                n: self.n,
                bits: best,
            }
            .to_family(),
        }
    }
}

/// Compares the ascending member lists of two packed families
/// lexicographically (a proper prefix is smaller).
fn sorted_list_less(a: u64, b: u64) -> bool {
    if a == b {
        return false;
    }
    let x = (a ^ b).trailing_zeros();
    if a & (1u64 << x) != 0 {
        b >> x != 0
    } else {
        a >> x == 0
    }
}
