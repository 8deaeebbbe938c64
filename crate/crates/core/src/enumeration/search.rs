use crate::mask::SubsetMask;

use super::canonical::RelabelTables;
use super::packed::{iter_bits, PackedFamily};
use super::{CandidateOrder, EnumerationConstraints};

/// Frontier size the search forest is split into before work is handed out.
/// The split depends only on the constraints and candidate order, never on
/// the worker count.
const TARGET_SUBTREES: usize = 256;

/// Depth-first search over candidate sets in a fixed decision order.
///
/// Each node holds a union-closed family. Including a candidate forces the
/// union of it with every present member; a forced set that was already
/// excluded kills the branch. With `up_to_iso`, a node survives only if its
/// decided prefix is lexicographically maximal (1 before 0, in decision
/// order) among all relabelings, so every isomorphism class is reached at
/// exactly one leaf: its lex-maximal representative.
#[derive(Clone, Debug)]
pub struct SearchPlan {
    constraints: EnumerationConstraints,
    order: CandidateOrder,
    fixed: u64,
    pool: Vec<u8>,
    /// `prefix[k]`: bits of the first `k` candidates.
    prefix: Vec<u64>,
    relabel: Option<RelabelTables>,
}

/// A node of the search forest whose descendants are explored as one unit of
/// work.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Subtree {
    depth: usize,
    family: u64,
    excluded: u64,
}

impl Subtree {
    pub fn depth(&self) -> usize {
        self.depth
    }

    /// Members present at the subtree root, ascending.
    pub fn root_members(&self) -> Vec<SubsetMask> {
        iter_bits(self.family)
            .map(|b| SubsetMask::from_bits(b as u16))
            .collect()
    }

    /// Checkpoint label: the root's member masks as decimal integers.
    pub fn label(&self) -> String {
        let masks: Vec<String> = iter_bits(self.family).map(|b| b.to_string()).collect();
        format!("[{}]", masks.join(","))
    }
}

impl SearchPlan {
    /// Caller has validated the constraints and the packed ground limit.
    pub(crate) fn new(constraints: EnumerationConstraints, order: CandidateOrder) -> Self {
        let n = constraints.n;
        let full = (1u8 << n) - 1;
        let mut fixed = 1u64;
        if constraints.require_universe {
            fixed |= 1u64 << full;
        }
        let mut pool: Vec<u8> = (1..=full)
            .filter(|&m| m.count_ones() >= constraints.t as u32 && fixed & (1u64 << m) == 0)
            .collect();
        if order == CandidateOrder::Descending {
            pool.reverse();
        }
        let mut prefix = Vec::with_capacity(pool.len() + 1);
        let mut acc = 0u64;
        prefix.push(acc);
        for &c in &pool {
            acc |= 1u64 << c;
            prefix.push(acc);
        }
        let relabel = constraints.up_to_iso.then(|| RelabelTables::new(n));
        SearchPlan {
            constraints,
            order,
            fixed,
            pool,
            prefix,
            relabel,
        }
    }

    pub fn constraints(&self) -> &EnumerationConstraints {
        &self.constraints
    }

    pub fn order(&self) -> CandidateOrder {
        self.order
    }

    /// Candidate sets in decision order.
    pub fn candidates(&self) -> Vec<SubsetMask> {
        self.pool
            .iter()
            .map(|&m| SubsetMask::from_bits(m as u16))
            .collect()
    }

    fn root(&self) -> Subtree {
        Subtree {
            depth: 0,
            family: self.fixed,
            excluded: 0,
        }
    }

    /// Splits the forest at the shallowest depth whose frontier has at least
    /// `TARGET_SUBTREES` nodes (or at the leaves).
    pub fn subtrees(&self) -> Vec<Subtree> {
        let mut frontier = vec![self.root()];
        let mut depth = 0;
        while frontier.len() < TARGET_SUBTREES && depth < self.pool.len() {
            frontier = frontier
                .iter()
                .flat_map(|node| self.children(node))
                .collect();
            depth += 1;
        }
        frontier
    }

    /// Explores one subtree depth-first, calling `visit` on every accepted
    /// leaf. Returns the number of leaves visited.
    pub fn walk<V: FnMut(PackedFamily)>(&self, subtree: &Subtree, visit: &mut V) -> u64 {
        let mut count = 0;
        self.descend(*subtree, &mut |bits| {
            count += 1;
            visit(PackedFamily {
                n: self.constraints.n,
                bits,
            });
        });
        count
    }

    fn descend(&self, node: Subtree, visit: &mut dyn FnMut(u64)) {
        if node.depth == self.pool.len() {
            visit(node.family);
            return;
        }
        for child in self.children(&node) {
            self.descend(child, visit);
        }
    }

    /// Surviving children of a node: include first, then exclude.
    fn children(&self, node: &Subtree) -> Vec<Subtree> {
        let pos = node.depth;
        let bit = 1u64 << self.pool[pos];
        let next = pos + 1;
        let mut out = Vec::with_capacity(2);
        if node.family & bit != 0 {
            // Already forced in by an earlier inclusion.
            if self.prefix_is_canonical(node.family, next) {
                out.push(Subtree {
                    depth: next,
                    ..*node
                });
            }
            return out;
        }
        if let Some(family) = self.include(node.family, self.pool[pos], node.excluded) {
            if self.prefix_is_canonical(family, next) {
                out.push(Subtree {
                    depth: next,
                    family,
                    excluded: node.excluded,
                });
            }
        }
        if self.prefix_is_canonical(node.family, next) {
            out.push(Subtree {
                depth: next,
                family: node.family,
                excluded: node.excluded | bit,
            });
        }
        out
    }

    /// Adds `candidate` and closes under union. `None` if closure needs an
    /// excluded set.
    fn include(&self, family: u64, candidate: u8, excluded: u64) -> Option<u64> {
        let mut family = family | 1u64 << candidate;
        let mut pending = vec![candidate];
        while let Some(x) = pending.pop() {
            for y in iter_bits(family) {
                let u = x | y;
                let ubit = 1u64 << u;
                if family & ubit != 0 {
                    continue;
                }
                if excluded & ubit != 0 {
                    return None;
                }
                family |= ubit;
                pending.push(u);
            }
        }
        Some(family)
    }

    fn order_key(&self, bits: u64) -> u64 {
        match self.order {
            CandidateOrder::Descending => bits,
            CandidateOrder::Ascending => bits.reverse_bits(),
        }
    }

    /// No relabeling may make the first `decided` positions of the
    /// characteristic vector lexicographically larger.
    fn prefix_is_canonical(&self, family: u64, decided: usize) -> bool {
        let Some(tables) = &self.relabel else {
            return true;
        };
        let window = self.prefix[decided];
        let own = self.order_key(family & window);
        tables
            .maps()
            .iter()
            .all(|map| self.order_key(RelabelTables::apply(map, family) & window) <= own)
    }
}
