use crate::family::SetFamily;
use crate::mask::SubsetMask;

/// Largest ground size the packed representation covers (2^6 = 64 masks).
pub const MAX_PACKED_GROUND: u8 = 6;

/// `ELEMENT_BITS[i]`: every mask over `M_6` that contains element `i + 1`.
pub const ELEMENT_BITS: [u64; 6] = element_bits();

/// `LEVEL_BITS[k]`: every mask over `M_6` of cardinality `k`.
pub const LEVEL_BITS: [u64; 7] = level_bits();

const fn element_bits() -> [u64; 6] {
    let mut out = [0u64; 6];
    let mut mask = 0;
    while mask < 64 {
        let mut i = 0;
        while i < 6 {
            if mask & (1 << i) != 0 {
                out[i] |= 1u64 << mask;
            }
            i += 1;
        }
        mask += 1;
    }
    out
}

const fn level_bits() -> [u64; 7] {
    let mut out = [0u64; 7];
    let mut mask = 0u32;
    while mask < 64 {
        out[mask.count_ones() as usize] |= 1u64 << mask;
        mask += 1;
    }
    out
}

/// A family over `M_n`, `n <= 6`, as a 64-bit set of masks: bit `A` is set
/// iff the subset with characteristic vector `A` is a member.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PackedFamily {
    pub n: u8,
    pub bits: u64,
}

impl PackedFamily {
    pub fn from_family(family: &SetFamily) -> Option<Self> {
        if family.n() > MAX_PACKED_GROUND {
            return None;
        }
        let bits = family
            .members()
            .iter()
            .fold(0u64, |acc, m| acc | 1u64 << m.bits());
        Some(PackedFamily {
            n: family.n(),
            bits,
        })
    }

    pub fn to_family(self) -> SetFamily {
        let members = iter_bits(self.bits)
            .map(|b| SubsetMask::from_bits(b as u16))
            .collect();
        SetFamily::from_sorted_unchecked(self.n, members)
    }

    pub fn len(self) -> u32 {
        self.bits.count_ones()
    }

    pub fn is_empty(self) -> bool {
        self.bits == 0
    }

    pub fn contains(self, mask: u8) -> bool {
        self.bits & (1u64 << mask) != 0
    }

    /// Number of members containing element `label` (1-based).
    pub fn freq(self, label: u8) -> u32 {
        (self.bits & ELEMENT_BITS[label as usize - 1]).count_ones()
    }

    pub fn level_count(self, k: usize) -> u32 {
        (self.bits & LEVEL_BITS[k]).count_ones()
    }

    /// Smallest cardinality of a nonempty member.
    pub fn t_value(self) -> Option<u32> {
        let nonempty = self.bits & !1;
        (nonempty != 0).then(|| {
            (1..=self.n as usize)
                .find(|&k| nonempty & LEVEL_BITS[k] != 0)
                .expect("nonempty member has a level") as u32
        })
    }

    /// Abundant elements (`2 * freq >= m`) as a subset mask.
    pub fn abundant(self) -> SubsetMask {
        let m = self.len();
        let bits = (1..=self.n)
            .filter(|&i| 2 * self.freq(i) >= m)
            .fold(0u16, |acc, i| acc | 1 << (i - 1));
        SubsetMask::from_bits(bits)
    }

    pub fn is_union_closed(self) -> bool {
        iter_bits(self.bits).all(|a| iter_bits(self.bits).all(|b| self.contains(a | b)))
    }
}

/// Set bit positions of `bits`, ascending.
pub fn iter_bits(bits: u64) -> impl Iterator<Item = u8> {
    let mut rest = bits;
    std::iter::from_fn(move || {
        (rest != 0).then(|| {
            let b = rest.trailing_zeros() as u8;
            rest &= rest - 1;
            b
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::{frequency_profile, is_union_closed, t_value};
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn agrees_with_set_family(n in 2u8..=6, raw in any::<u64>()) {
            let bits = if n == 6 { raw } else { raw & ((1u64 << (1u32 << n)) - 1) };
            let packed = PackedFamily { n, bits };
            let family = packed.to_family();
            prop_assert_eq!(PackedFamily::from_family(&family), Some(packed));
            let profile = frequency_profile(&family);
            prop_assert_eq!(packed.abundant(), profile.abundant);
            for i in 1..=n {
                prop_assert_eq!(packed.freq(i), profile.freq_of(i));
            }
            prop_assert_eq!(packed.t_value(), t_value(&family).ok());
            prop_assert_eq!(packed.is_union_closed(), is_union_closed(&family));
        }
    }
}
