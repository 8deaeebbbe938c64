//! Isomorph-free generation of union-closed families containing `∅`.
//!
//! The search itself lives in [`SearchPlan`]; [`run_subtrees`] distributes
//! its top-level subtrees over a worker pool and optionally records each
//! finished subtree in a checkpoint so long campaigns can be split.

mod brute;
mod canonical;
mod checkpoint;
mod packed;
mod search;

use std::fmt;
use std::path::Path;
use std::str::FromStr;
use std::sync::Mutex;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::family::SetFamily;

pub use brute::{brute_force_enumerate, MAX_ORACLE_POOL};
pub use canonical::{canonical_key, CanonicalKey, RelabelTables};
pub use checkpoint::{CheckpointEntry, CheckpointError, CheckpointLog, SubtreeTally};
pub use packed::{iter_bits, PackedFamily, ELEMENT_BITS, LEVEL_BITS, MAX_PACKED_GROUND};
pub use search::{SearchPlan, Subtree};

#[derive(Debug, Error)]
pub enum EnumerationError {
    #[error("infeasible scale: {0}")]
    InfeasibleScale(String),
    #[error("inconsistent constraints: {0}")]
    InconsistentConstraints(String),
    #[error("worker pool: {0}")]
    WorkerPool(String),
    #[error(transparent)]
    Checkpoint(#[from] CheckpointError),
}

/// What to enumerate: union-closed `F ⊆ 2^{M_n}` with `∅ ∈ F` whose
/// nonempty members all have at least `t` elements.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EnumerationConstraints {
    pub n: u8,
    /// Minimum size of a nonempty member.
    pub t: u8,
    /// Require `∪F = M_n`, i.e. `M_n ∈ F`.
    pub require_universe: bool,
    /// Visit one family per relabeling class.
    pub up_to_iso: bool,
}

impl EnumerationConstraints {
    pub fn new(
        n: u8,
        t: u8,
        require_universe: bool,
        up_to_iso: bool,
    ) -> Result<Self, EnumerationError> {
        if !(2..=crate::mask::MAX_GROUND).contains(&n) {
            return Err(EnumerationError::InconsistentConstraints(format!(
                "n = {n} is outside 2..={}",
                crate::mask::MAX_GROUND
            )));
        }
        if t == 0 || t > n {
            return Err(EnumerationError::InconsistentConstraints(format!(
                "t = {t} must satisfy 1 <= t <= n = {n}"
            )));
        }
        Ok(EnumerationConstraints {
            n,
            t,
            require_universe,
            up_to_iso,
        })
    }

    /// Checks the supported envelope: `n <= 6` always, and `t >= 3` at
    /// `n = 6` unless explicitly acknowledged.
    pub fn check_envelope(&self, unbounded: bool) -> Result<(), EnumerationError> {
        if self.n > MAX_PACKED_GROUND {
            return Err(EnumerationError::InfeasibleScale(format!(
                "exhaustive search supports n <= {MAX_PACKED_GROUND}, got n = {}",
                self.n
            )));
        }
        if self.n == MAX_PACKED_GROUND && self.t <= 2 && !unbounded {
            return Err(EnumerationError::InfeasibleScale(format!(
                "n = 6 with t = {} is outside the supported envelope (pass --unbounded to run anyway)",
                self.t
            )));
        }
        Ok(())
    }

    /// Stable text used in checkpoint headers.
    pub fn tag(&self) -> String {
        format!(
            "n={} t={} universe={} iso={}",
            self.n, self.t, self.require_universe, self.up_to_iso
        )
    }
}

/// Decision order of candidate sets, by numeric mask value.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CandidateOrder {
    #[default]
    Descending,
    Ascending,
}

impl fmt::Display for CandidateOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CandidateOrder::Descending => "desc",
            CandidateOrder::Ascending => "asc",
        })
    }
}

impl FromStr for CandidateOrder {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "desc" | "descending" => Ok(CandidateOrder::Descending),
            "asc" | "ascending" => Ok(CandidateOrder::Ascending),
            other => Err(format!(
                "unknown candidate order {other:?} (use asc or desc)"
            )),
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct SearchOptions {
    pub order: CandidateOrder,
    /// Worker threads; 0 means one per available core.
    pub workers: usize,
    /// Acknowledges runs outside the supported envelope.
    pub unbounded: bool,
}

impl SearchOptions {
    pub fn with_workers(workers: usize) -> Self {
        SearchOptions {
            workers,
            ..Default::default()
        }
    }
}

/// Builds the search for `constraints` after checking the envelope.
pub fn plan(
    constraints: &EnumerationConstraints,
    options: &SearchOptions,
) -> Result<SearchPlan, EnumerationError> {
    constraints.check_envelope(options.unbounded)?;
    Ok(SearchPlan::new(*constraints, options.order))
}

/// Visits every family matching `constraints` (one per class with
/// `up_to_iso`) and returns how many were visited. `visit` may run on
/// several workers at once.
pub fn enumerate_families<V>(
    constraints: &EnumerationConstraints,
    options: &SearchOptions,
    visit: V,
) -> Result<u64, EnumerationError>
where
    V: Fn(&SetFamily) + Sync,
{
    let plan = plan(constraints, options)?;
    let counts: Vec<u64> = run_subtrees(&plan, options.workers, None, |subtree| {
        plan.walk(subtree, &mut |f| visit(&f.to_family()))
    })?;
    Ok(counts.iter().sum())
}

/// Same as [`enumerate_families`] without materializing [`SetFamily`]
/// values.
pub fn enumerate_packed<V>(
    constraints: &EnumerationConstraints,
    options: &SearchOptions,
    visit: V,
) -> Result<u64, EnumerationError>
where
    V: Fn(PackedFamily) + Sync,
{
    let plan = plan(constraints, options)?;
    let counts: Vec<u64> = run_subtrees(&plan, options.workers, None, |subtree| {
        plan.walk(subtree, &mut |f| visit(f))
    })?;
    Ok(counts.iter().sum())
}

/// Runs `work` on every top-level subtree of `plan` using `workers` threads
/// (0 = all cores) and returns the tallies in frontier order, independent of
/// scheduling.
///
/// With a checkpoint, subtrees already recorded there are restored instead
/// of recomputed, and each newly finished subtree is appended as soon as it
/// completes.
pub fn run_subtrees<T, W>(
    plan: &SearchPlan,
    workers: usize,
    checkpoint: Option<(&Path, &str)>,
    work: W,
) -> Result<Vec<T>, EnumerationError>
where
    T: SubtreeTally,
    W: Fn(&Subtree) -> T + Sync,
{
    let subtrees = plan.subtrees();
    let log = match checkpoint {
        Some((path, extra)) => {
            let config = format!(
                "{} order={} {}",
                plan.constraints().tag(),
                plan.order(),
                extra
            );
            let log = CheckpointLog::open(path, config.trim_end())?;
            let labels: std::collections::HashSet<String> =
                subtrees.iter().map(Subtree::label).collect();
            if let Some(unknown) = log.completed_labels().find(|l| !labels.contains(*l)) {
                return Err(CheckpointError::UnknownSubtree(unknown.to_string()).into());
            }
            Some(Mutex::new(log))
        }
        None => None,
    };

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| EnumerationError::WorkerPool(e.to_string()))?;

    pool.install(|| {
        subtrees
            .par_iter()
            .map(|subtree| -> Result<T, EnumerationError> {
                let label = subtree.label();
                if let Some(log) = &log {
                    let restored = log
                        .lock()
                        .expect("checkpoint lock poisoned")
                        .completed(&label)
                        .cloned();
                    if let Some(entry) = restored {
                        return T::from_entry(&entry).map_err(|reason| {
                            CheckpointError::Malformed { line: 0, reason }.into()
                        });
                    }
                }
                let tally = work(subtree);
                if let Some(log) = &log {
                    let entry = CheckpointEntry {
                        subtree: label,
                        count: tally.count(),
                        fields: tally.to_fields(),
                    };
                    log.lock()
                        .expect("checkpoint lock poisoned")
                        .record(&entry)?;
                }
                Ok(tally)
            })
            .collect()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::is_union_closed;
    use std::collections::BTreeSet;
    use std::sync::Mutex;

    fn collect(
        c: &EnumerationConstraints,
        order: CandidateOrder,
        workers: usize,
    ) -> Vec<SetFamily> {
        let out = Mutex::new(Vec::new());
        let options = SearchOptions {
            order,
            workers,
            unbounded: false,
        };
        let count =
            enumerate_families(c, &options, |f| out.lock().unwrap().push(f.clone())).unwrap();
        let out = out.into_inner().unwrap();
        assert_eq!(count as usize, out.len());
        out
    }

    #[test]
    fn n2_labeled_and_up_to_iso() {
        let c = EnumerationConstraints::new(2, 1, true, false).unwrap();
        assert_eq!(collect(&c, CandidateOrder::Descending, 1).len(), 4);
        let c = EnumerationConstraints::new(2, 1, true, true).unwrap();
        assert_eq!(collect(&c, CandidateOrder::Descending, 1).len(), 3);
        assert_eq!(collect(&c, CandidateOrder::Ascending, 1).len(), 3);
    }

    #[test]
    fn visited_families_meet_constraints() {
        for up_to_iso in [false, true] {
            for order in [CandidateOrder::Descending, CandidateOrder::Ascending] {
                let c = EnumerationConstraints::new(4, 2, true, up_to_iso).unwrap();
                let fams = collect(&c, order, 2);
                let keys: BTreeSet<_> = fams.iter().map(canonical_key).collect();
                if up_to_iso {
                    assert_eq!(keys.len(), fams.len());
                }
                for f in &fams {
                    assert!(is_union_closed(f));
                    assert!(f.contains(crate::mask::SubsetMask::EMPTY));
                    assert!(f.contains(f.universe()));
                    assert!(f.members().iter().all(|m| m.is_empty() || m.len() >= 2));
                }
            }
        }
    }

    #[test]
    fn envelope() {
        let c = EnumerationConstraints::new(7, 3, true, true).unwrap();
        assert!(matches!(
            c.check_envelope(true),
            Err(EnumerationError::InfeasibleScale(_))
        ));
        let c = EnumerationConstraints::new(6, 2, true, true).unwrap();
        assert!(c.check_envelope(false).is_err());
        assert!(c.check_envelope(true).is_ok());
        assert!(EnumerationConstraints::new(4, 0, true, true).is_err());
        assert!(EnumerationConstraints::new(4, 5, true, true).is_err());
        assert!(EnumerationConstraints::new(1, 1, true, true).is_err());
    }

    #[test]
    fn t_equal_n_gives_trivial_families() {
        let c = EnumerationConstraints::new(5, 5, true, false).unwrap();
        assert_eq!(collect(&c, CandidateOrder::Descending, 1).len(), 1);
        let c = EnumerationConstraints::new(5, 5, false, false).unwrap();
        assert_eq!(collect(&c, CandidateOrder::Descending, 1).len(), 2);
    }

    #[test]
    fn checkpoint_resume_restores_counts() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ck.txt");
        let c = EnumerationConstraints::new(5, 2, true, true).unwrap();
        let plan = plan(&c, &SearchOptions::default()).unwrap();
        let first: Vec<u64> =
            run_subtrees(&plan, 2, Some((&path, "")), |s| plan.walk(s, &mut |_| {})).unwrap();
        // Second run must not recompute anything.
        let second: Vec<u64> = run_subtrees(&plan, 2, Some((&path, "")), |_| -> u64 {
            panic!("subtree recomputed")
        })
        .unwrap();
        assert_eq!(first, second);
    }
}
