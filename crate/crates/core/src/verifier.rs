//! Exhaustive verification campaigns and single-family diagnostics.
//!
//! A campaign walks every family produced by the enumeration, applies the
//! selected checks, and aggregates exact counts per subtree. Subtree tallies
//! are merged in frontier order, so the report body does not depend on the
//! worker count or on scheduling. Counterexamples are written to the dump
//! directory the moment they are found.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Mutex;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::decomposition::{
    abundance_witness, classify_shape, pair_decompose, AbundanceWitness, ShapeTag,
};
use crate::enumeration::{
    self, canonical_key, CandidateOrder, CheckpointEntry, EnumerationConstraints, EnumerationError,
    PackedFamily, SearchOptions, SubtreeTally, LEVEL_BITS,
};
use crate::family::{
    frequency_profile, is_union_closed, lemma_1_2_bound, level_profile, t_value, union_closure,
    FamilyError, FrequencyProfile, SetFamily,
};
use crate::format::{format_family, format_family_inline, parse_family_inline};

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error(transparent)]
    Enumeration(#[from] EnumerationError),
    #[error("counterexample dump: {0}")]
    Dump(#[from] std::io::Error),
}

/// A property applied to every family of a campaign.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Check {
    #[serde(rename = "frankl")]
    Frankl,
    #[serde(rename = "s_frankl")]
    SFrankl,
    /// Co-atom frequency bound applied to the `(n-1)`-level of `M_n`.
    #[serde(rename = "lemma_1_2_spot")]
    LemmaSpot,
}

impl Check {
    pub const ALL: [Check; 3] = [Check::Frankl, Check::SFrankl, Check::LemmaSpot];

    pub fn name(self) -> &'static str {
        match self {
            Check::Frankl => "frankl",
            Check::SFrankl => "s_frankl",
            Check::LemmaSpot => "lemma_1_2_spot",
        }
    }

    fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Check {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Check::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| {
                format!("unknown check {s:?} (expected frankl, s_frankl or lemma_1_2_spot)")
            })
    }
}

#[derive(Clone, Debug)]
pub struct CampaignConfig {
    pub constraints: EnumerationConstraints,
    pub checks: BTreeSet<Check>,
    pub search: SearchOptions,
    /// Apply the lemma spot check to every `lemma_every`-th family of each
    /// subtree (1 = every family).
    pub lemma_every: u64,
    pub checkpoint: Option<PathBuf>,
    pub dump_dir: Option<PathBuf>,
}

impl CampaignConfig {
    pub fn new(
        constraints: EnumerationConstraints,
        checks: impl IntoIterator<Item = Check>,
    ) -> Self {
        CampaignConfig {
            constraints,
            checks: checks.into_iter().collect(),
            search: SearchOptions::default(),
            lemma_every: 1,
            checkpoint: None,
            dump_dir: None,
        }
    }

    fn shapes_tracked(&self) -> bool {
        let c = &self.constraints;
        c.n == 6 && c.t == 3 && c.require_universe
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CounterexampleRecord {
    /// The family in inline text form (`n=6: {} 1,2,3 ...`).
    pub family: String,
    pub check: Check,
    pub frequency: FrequencyProfile,
}

/// Result of a campaign.
///
/// `families_by_T` is keyed by `T(F)`, with key 0 for the family `{∅}`
/// (only possible without the universe requirement). `wall_time` is in
/// milliseconds.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub constraints: EnumerationConstraints,
    pub checks: Vec<Check>,
    pub families_total: u64,
    #[serde(rename = "families_by_T")]
    pub families_by_t: BTreeMap<u32, u64>,
    pub families_by_shape: BTreeMap<ShapeTag, u64>,
    /// How many families each check was applicable to.
    pub checks_applied: BTreeMap<Check, u64>,
    pub counterexamples: Vec<CounterexampleRecord>,
    pub wall_time: u64,
    pub workers: usize,
    pub search_order: CandidateOrder,
}

/// The scheduling-independent part of a report.
#[derive(Serialize)]
struct ReportBody<'a> {
    constraints: &'a EnumerationConstraints,
    checks: &'a [Check],
    families_total: u64,
    #[serde(rename = "families_by_T")]
    families_by_t: &'a BTreeMap<u32, u64>,
    families_by_shape: &'a BTreeMap<ShapeTag, u64>,
    checks_applied: &'a BTreeMap<Check, u64>,
    counterexamples: &'a [CounterexampleRecord],
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.counterexamples.is_empty()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Report without `wall_time`, `workers` and `search_order`; identical
    /// across reruns of the same constraints and checks.
    pub fn body_json(&self) -> String {
        let body = ReportBody {
            constraints: &self.constraints,
            checks: &self.checks,
            families_total: self.families_total,
            families_by_t: &self.families_by_t,
            families_by_shape: &self.families_by_shape,
            checks_applied: &self.checks_applied,
            counterexamples: &self.counterexamples,
        };
        serde_json::to_string_pretty(&body).expect("report serializes")
    }

    /// `families_total = Σ families_by_T`, and for shape-tracked runs
    /// `Σ families_by_shape = families_by_T[3]`.
    pub fn conservation_holds(&self) -> bool {
        let by_t: u64 = self.families_by_t.values().sum();
        let shapes: u64 = self.families_by_shape.values().sum();
        let shape_ok = self.families_by_shape.is_empty()
            || shapes == self.families_by_t.get(&3).copied().unwrap_or(0);
        by_t == self.families_total && shape_ok
    }
}

/// Per-subtree accumulator.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
struct Tally {
    total: u64,
    by_t: [u64; 7],
    by_shape: [u64; 4],
    applied: [u64; 3],
    failures: Vec<(Check, u64)>,
}

impl Tally {
    fn merge(&mut self, other: &Tally) {
        self.total += other.total;
        for (a, b) in self.by_t.iter_mut().zip(other.by_t) {
            *a += b;
        }
        for (a, b) in self.by_shape.iter_mut().zip(other.by_shape) {
            *a += b;
        }
        for (a, b) in self.applied.iter_mut().zip(other.applied) {
            *a += b;
        }
        self.failures.extend_from_slice(&other.failures);
    }
}

fn encode_counts(counts: &[u64], key: impl Fn(usize) -> String) -> String {
    let parts: Vec<String> = counts
        .iter()
        .enumerate()
        .filter(|(_, &c)| c > 0)
        .map(|(i, c)| format!("{}:{c}", key(i)))
        .collect();
    if parts.is_empty() {
        "-".to_string()
    } else {
        parts.join(",")
    }
}

fn decode_counts<const N: usize>(
    text: &str,
    key: impl Fn(&str) -> Option<usize>,
) -> Result<[u64; N], String> {
    let mut out = [0u64; N];
    if text == "-" {
        return Ok(out);
    }
    for part in text.split(',') {
        let (k, v) = part
            .split_once(':')
            .ok_or_else(|| format!("bad count entry {part:?}"))?;
        let idx = key(k)
            .filter(|&i| i < N)
            .ok_or_else(|| format!("bad count key {k:?}"))?;
        out[idx] = v.parse().map_err(|_| format!("bad count value {v:?}"))?;
    }
    Ok(out)
}

impl SubtreeTally for Tally {
    fn count(&self) -> u64 {
        self.total
    }

    fn to_fields(&self) -> Vec<(String, String)> {
        let failures = if self.failures.is_empty() {
            "-".to_string()
        } else {
            self.failures
                .iter()
                .map(|(c, bits)| format!("{}@{bits:016x}", c.name()))
                .collect::<Vec<_>>()
                .join(",")
        };
        vec![
            ("by_t".into(), encode_counts(&self.by_t, |i| i.to_string())),
            (
                "by_shape".into(),
                encode_counts(&self.by_shape, |i| ShapeTag::ALL[i].name().to_string()),
            ),
            (
                "applied".into(),
                encode_counts(&self.applied, |i| Check::ALL[i].name().to_string()),
            ),
            ("cex".into(), failures),
        ]
    }

    fn from_entry(entry: &CheckpointEntry) -> Result<Self, String> {
        let field = |k: &str| entry.field(k).ok_or_else(|| format!("missing field {k}"));
        let by_t = decode_counts::<7>(field("by_t")?, |k| k.parse().ok())?;
        let by_shape = decode_counts::<4>(field("by_shape")?, |k| {
            ShapeTag::ALL.iter().position(|s| s.name() == k)
        })?;
        let applied = decode_counts::<3>(field("applied")?, |k| {
            Check::ALL.iter().position(|c| c.name() == k)
        })?;
        let cex = field("cex")?;
        let failures = if cex == "-" {
            Vec::new()
        } else {
            cex.split(',')
                .map(|item| {
                    let (name, bits) = item
                        .split_once('@')
                        .ok_or_else(|| format!("bad counterexample {item:?}"))?;
                    let check = name.parse::<Check>()?;
                    let bits = u64::from_str_radix(bits, 16).map_err(|e| e.to_string())?;
                    Ok((check, bits))
                })
                .collect::<Result<_, String>>()?
        };
        Ok(Tally {
            total: entry.count,
            by_t,
            by_shape,
            applied,
            failures,
        })
    }
}

/// Outcome of the checks on one packed family.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct PackedVerdicts {
    pub t: Option<u32>,
    pub shape: Option<ShapeTag>,
    /// `Some(passed)` when the check applies.
    pub frankl: Option<bool>,
    pub s_frankl: Option<bool>,
    pub lemma: Option<bool>,
}

/// Campaign fast path: every check evaluated with popcounts on the packed
/// family. The family is assumed union-closed with `∅ ∈ F`.
pub fn packed_verdicts(family: PackedFamily, track_shape: bool, lemma: bool) -> PackedVerdicts {
    let t = family.t_value();
    let abundant = family.abundant().len();
    let shape = (track_shape && t == Some(3))
        .then(|| ShapeTag::from_levels(family.level_count(4) > 0, family.level_count(5) > 0));
    let frankl = t.map(|_| abundant > 0);
    let s_frankl = t.filter(|&t| t >= 2).map(|t| abundant >= t);
    let lemma = if lemma {
        let n = family.n;
        let coatoms = family.bits & LEVEL_BITS[n as usize - 1];
        let g = coatoms.count_ones();
        (g >= 2).then(|| {
            let min_freq = (0..n as usize)
                .map(|i| (coatoms & enumeration::ELEMENT_BITS[i]).count_ones())
                .min()
                .expect("n >= 2");
            min_freq + 1 >= g
        })
    } else {
        None
    };
    PackedVerdicts {
        t,
        shape,
        frankl,
        s_frankl,
        lemma,
    }
}

struct DumpSink {
    dir: Option<PathBuf>,
}

impl DumpSink {
    fn write(&self, family: &SetFamily, check: Check) -> std::io::Result<()> {
        let Some(dir) = &self.dir else {
            return Ok(());
        };
        fs::create_dir_all(dir)?;
        let bits = PackedFamily::from_family(family)
            .map(|p| p.bits)
            .unwrap_or(0);
        let path = dir.join(format!("cex-{}-{bits:016x}.txt", check.name()));
        let body = format!(
            "# failed check: {}\n# {}\n{}",
            check.name(),
            frequency_profile(family),
            format_family(family)
        );
        fs::write(path, body)
    }
}

/// Runs every selected check on every enumerated family.
pub fn run_campaign(config: &CampaignConfig) -> Result<VerificationReport, VerifyError> {
    let started = Instant::now();
    let plan = enumeration::plan(&config.constraints, &config.search)?;
    let track_shape = config.shapes_tracked();
    let want = |c: Check| config.checks.contains(&c);
    let (frankl, s_frankl, lemma) = (
        want(Check::Frankl),
        want(Check::SFrankl),
        want(Check::LemmaSpot),
    );
    let every = config.lemma_every.max(1);
    let sink = Mutex::new(DumpSink {
        dir: config.dump_dir.clone(),
    });
    let dump_error: Mutex<Option<std::io::Error>> = Mutex::new(None);

    let checks_tag = config
        .checks
        .iter()
        .map(|c| c.name())
        .collect::<Vec<_>>()
        .join(",");
    let extra = format!("checks={checks_tag} lemma_every={every}");
    let checkpoint = config.checkpoint.as_deref().map(|p| (p, extra.as_str()));

    let tallies: Vec<Tally> =
        enumeration::run_subtrees(&plan, config.search.workers, checkpoint, |subtree| {
            let mut tally = Tally::default();
            let mut index = 0u64;
            plan.walk(subtree, &mut |family| {
                let spot = lemma && index.is_multiple_of(every);
                index += 1;
                let v = packed_verdicts(family, track_shape, spot);
                tally.total += 1;
                tally.by_t[v.t.unwrap_or(0) as usize] += 1;
                if let Some(shape) = v.shape {
                    tally.by_shape[shape as usize] += 1;
                }
                let outcomes = [
                    (Check::Frankl, frankl, v.frankl),
                    (Check::SFrankl, s_frankl, v.s_frankl),
                    (Check::LemmaSpot, spot, v.lemma),
                ];
                for (check, selected, outcome) in outcomes {
                    let (true, Some(passed)) = (selected, outcome) else {
                        continue;
                    };
                    tally.applied[check.index()] += 1;
                    if !passed {
                        tally.failures.push((check, family.bits));
                        let result = sink
                            .lock()
                            .expect("dump sink poisoned")
                            .write(&family.to_family(), check);
                        if let Err(e) = result {
                            dump_error
                                .lock()
                                .expect("dump error poisoned")
                                .get_or_insert(e);
                        }
                    }
                }
            });
            tally
        })?;
    if let Some(e) = dump_error.into_inner().expect("dump error poisoned") {
        return Err(VerifyError::Dump(e));
    }

    let mut merged = Tally::default();
    for t in &tallies {
        merged.merge(t);
    }

    let n = config.constraints.n;
    let mut counterexamples: Vec<CounterexampleRecord> = merged
        .failures
        .iter()
        .map(|&(check, bits)| {
            let family = PackedFamily { n, bits }.to_family();
            let shown = if config.constraints.up_to_iso {
                canonical_key(&family).into_family()
            } else {
                family
            };
            CounterexampleRecord {
                family: format_family_inline(&shown),
                check,
                frequency: frequency_profile(&shown),
            }
        })
        .collect();
    counterexamples.sort_by(|a, b| (&a.family, a.check).cmp(&(&b.family, b.check)));

    let families_by_t = merged
        .by_t
        .iter()
        .enumerate()
        .filter(|(_, &c)| c > 0)
        .map(|(t, &c)| (t as u32, c))
        .collect();
    let families_by_shape = if track_shape {
        ShapeTag::ALL
            .iter()
            .map(|&s| (s, merged.by_shape[s as usize]))
            .collect()
    } else {
        BTreeMap::new()
    };
    let checks_applied = config
        .checks
        .iter()
        .map(|&c| (c, merged.applied[c.index()]))
        .collect();

    Ok(VerificationReport {
        constraints: config.constraints,
        checks: config.checks.iter().copied().collect(),
        families_total: merged.total,
        families_by_t,
        families_by_shape,
        checks_applied,
        counterexamples,
        wall_time: started.elapsed().as_millis() as u64,
        workers: if config.search.workers == 0 {
            rayon::current_num_threads()
        } else {
            config.search.workers
        },
        search_order: config.search.order,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    NotApplicable,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairDecompositionRecord {
    pub level: u32,
    pub k: usize,
    /// Matched pairs, as sets.
    pub pairs: Vec<(String, String)>,
    pub residue: Vec<String>,
}

/// Diagnostic record for one family. When the input is not union-closed the
/// analysis runs on its closure and `closure_delta` lists what was added.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub family: String,
    pub is_union_closed: bool,
    pub closure_delta: Vec<String>,
    pub analyzed: String,
    #[serde(rename = "T")]
    pub t: Option<u32>,
    pub level_profile: Vec<u32>,
    pub frequency: FrequencyProfile,
    pub abundant: Vec<u8>,
    pub frankl: Verdict,
    pub s_frankl: Verdict,
    pub lemma_1_2_spot: Verdict,
    pub shape: Option<ShapeTag>,
    pub pair_decomposition: Option<PairDecompositionRecord>,
    pub witness: Option<AbundanceWitness>,
}

impl CheckRecord {
    pub fn passed(&self) -> bool {
        ![self.frankl, self.s_frankl, self.lemma_1_2_spot].contains(&Verdict::Fail)
    }

    pub fn verdict(&self, check: Check) -> Verdict {
        match check {
            Check::Frankl => self.frankl,
            Check::SFrankl => self.s_frankl,
            Check::LemmaSpot => self.lemma_1_2_spot,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("record serializes")
    }
}

fn verdict(result: Result<bool, FamilyError>) -> Verdict {
    match result {
        Ok(true) => Verdict::Pass,
        Ok(false) => Verdict::Fail,
        Err(_) => Verdict::NotApplicable,
    }
}

/// Full diagnostic of one family, independent of the campaign fast path.
pub fn check_single(input: &SetFamily) -> CheckRecord {
    let closed = is_union_closed(input);
    let family = if closed {
        input.clone()
    } else {
        union_closure(input)
    };
    let closure_delta = family
        .members()
        .iter()
        .filter(|&&m| !input.contains(m))
        .map(|m| m.to_string())
        .collect();
    let t = t_value(&family).ok();
    let frequency = frequency_profile(&family);

    let universe = family.universe();
    let coatoms = family.level(family.n() as u32 - 1);
    let lemma = if coatoms.len() >= 2 {
        let g = SetFamily::new(family.n(), coatoms).expect("members of a valid family");
        verdict(lemma_1_2_bound(universe, &g).map(|b| b.holds))
    } else {
        Verdict::NotApplicable
    };

    let pair_decomposition = t.map(|t| {
        let slice = family.level(t);
        let d = pair_decompose(&slice, universe);
        PairDecompositionRecord {
            level: t,
            k: d.k,
            pairs: d
                .pairs
                .iter()
                .map(|&(i, j)| (slice[i].to_string(), slice[j].to_string()))
                .collect(),
            residue: d.residue.iter().map(|&i| slice[i].to_string()).collect(),
        }
    });

    CheckRecord {
        family: format_family_inline(input),
        is_union_closed: closed,
        closure_delta,
        analyzed: format_family_inline(&family),
        t,
        level_profile: level_profile(&family).counts().to_vec(),
        abundant: frequency.abundant_elements(),
        frequency,
        frankl: verdict(crate::family::frankl_holds(&family)),
        s_frankl: verdict(crate::family::s_frankl_holds(&family)),
        lemma_1_2_spot: lemma,
        shape: classify_shape(&family).ok().map(|s| s.tag),
        pair_decomposition,
        witness: abundance_witness(&family).ok(),
    }
}

/// Replays a counterexample through [`check_single`]; true iff the recorded
/// check fails again.
pub fn replay_counterexample(record: &CounterexampleRecord) -> bool {
    match parse_family_inline(&record.family) {
        Ok(family) => check_single(&family).verdict(record.check) == Verdict::Fail,
        Err(_) => false,
    }
}

/// Writes `report` as JSON to `path`.
pub fn write_report(report: &VerificationReport, path: &Path) -> std::io::Result<()> {
    fs::write(path, report.to_json() + "\n")
}
