use std::collections::BTreeSet;
use std::sync::Mutex;

use ucf_core::enumeration::{
    brute_force_enumerate, enumerate_packed, CandidateOrder, CanonicalKey, EnumerationConstraints,
    PackedFamily, RelabelTables, SearchOptions,
};

fn options(order: CandidateOrder, workers: usize) -> SearchOptions {
    SearchOptions {
        order,
        workers,
        unbounded: true,
    }
}

fn search_keys(c: &EnumerationConstraints, opts: &SearchOptions) -> Vec<CanonicalKey> {
    let tables = RelabelTables::new(c.n);
    let keys = Mutex::new(Vec::new());
    enumerate_packed(c, opts, |f| {
        let key = tables.canonical_key(f);
        keys.lock().unwrap().push(key);
    })
    .unwrap();
    let mut keys = keys.into_inner().unwrap();
    keys.sort();
    keys
}

fn oracle_keys(c: &EnumerationConstraints) -> Vec<CanonicalKey> {
    let tables = RelabelTables::new(c.n);
    let mut keys: Vec<_> = brute_force_enumerate(c)
        .unwrap()
        .iter()
        .map(|f| tables.canonical_key(PackedFamily::from_family(f).unwrap()))
        .collect();
    keys.sort();
    keys
}

fn all_configs(n: u8) -> Vec<EnumerationConstraints> {
    let mut out = Vec::new();
    for t in 1..=n {
        for universe in [true, false] {
            for iso in [false, true] {
                out.push(EnumerationConstraints::new(n, t, universe, iso).unwrap());
            }
        }
    }
    out
}

#[test]
fn search_matches_oracle_up_to_n4() {
    for n in 2..=4 {
        for c in all_configs(n) {
            for order in [CandidateOrder::Descending, CandidateOrder::Ascending] {
                let found = search_keys(&c, &options(order, 1));
                assert_eq!(found, oracle_keys(&c), "{} order={order}", c.tag());
            }
        }
    }
}

#[test]
fn search_matches_oracle_on_small_pools_at_n5() {
    for t in 3..=5 {
        for universe in [true, false] {
            for iso in [false, true] {
                let c = EnumerationConstraints::new(5, t, universe, iso).unwrap();
                let found = search_keys(&c, &options(CandidateOrder::Descending, 0));
                assert_eq!(found, oracle_keys(&c), "{}", c.tag());
            }
        }
    }
}

#[test]
fn known_totals() {
    let total = |n, t, iso| {
        let c = EnumerationConstraints::new(n, t, true, iso).unwrap();
        enumerate_packed(&c, &SearchOptions::default(), |_| {}).unwrap()
    };
    // Moore families on four points containing ∅ and the whole set.
    assert_eq!(total(4, 1, false), 2271);
    assert_eq!(total(4, 1, true), 165);
    assert_eq!(total(6, 5, true), 7);
    assert_eq!(total(6, 4, true), 464);
}

#[test]
fn iso_search_is_isomorph_free_and_complete() {
    for (n, t) in [(4, 1), (5, 2), (6, 4)] {
        let iso = EnumerationConstraints::new(n, t, true, true).unwrap();
        let labeled = EnumerationConstraints {
            up_to_iso: false,
            ..iso
        };
        let reps = search_keys(&iso, &SearchOptions::default());
        let distinct: BTreeSet<_> = reps.iter().cloned().collect();
        assert_eq!(distinct.len(), reps.len(), "duplicate class at n={n} t={t}");
        let classes: BTreeSet<_> = search_keys(&labeled, &SearchOptions::default())
            .into_iter()
            .collect();
        assert_eq!(distinct, classes, "n={n} t={t}");
    }
}

/// Orbit-counting: summing n!/|Aut(F)| over class representatives must give
/// the labeled total.
#[test]
fn orbit_sizes_add_up_to_labeled_total() {
    for (n, t) in [(4, 1), (5, 2), (5, 3), (6, 4), (6, 5)] {
        let iso = EnumerationConstraints::new(n, t, true, true).unwrap();
        let labeled = EnumerationConstraints {
            up_to_iso: false,
            ..iso
        };
        let tables = RelabelTables::new(n);
        let group_order: u64 = (1..=n as u64).product();
        let orbit_sum = Mutex::new(0u64);
        enumerate_packed(&iso, &SearchOptions::default(), |f| {
            let stabilizer = 1 + tables
                .maps()
                .iter()
                .filter(|m| RelabelTables::apply(m, f.bits) == f.bits)
                .count() as u64;
            assert_eq!(group_order % stabilizer, 0);
            *orbit_sum.lock().unwrap() += group_order / stabilizer;
        })
        .unwrap();
        let total = enumerate_packed(&labeled, &SearchOptions::default(), |_| {}).unwrap();
        assert_eq!(orbit_sum.into_inner().unwrap(), total, "n={n} t={t}");
    }
}

#[test]
fn worker_count_does_not_change_output() {
    let c = EnumerationConstraints::new(5, 2, true, true).unwrap();
    let reference = search_keys(&c, &options(CandidateOrder::Descending, 1));
    for workers in [2, 8] {
        for order in [CandidateOrder::Descending, CandidateOrder::Ascending] {
            assert_eq!(search_keys(&c, &options(order, workers)), reference);
        }
    }
}

#[test]
fn every_visited_family_satisfies_constraints() {
    let c = EnumerationConstraints::new(5, 3, false, false).unwrap();
    enumerate_packed(&c, &SearchOptions::default(), |f| {
        assert!(f.is_union_closed());
        assert!(f.contains(0));
        assert!(f.t_value().is_none_or(|t| t >= 3));
    })
    .unwrap();
}
