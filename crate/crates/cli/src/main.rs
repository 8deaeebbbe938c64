//! `ucf`: check union-closed families, run exhaustive verification
//! campaigns, and cross-check the enumeration against a brute-force oracle.
//!
//! Exit status: 0 = all checks passed, 1 = a counterexample was found,
//! 2 = bad input, infeasible configuration, or aborted run.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use ucf_core::enumeration::{
    self, brute_force_enumerate, canonical_key, CandidateOrder, CheckpointEntry,
    EnumerationConstraints, PackedFamily, SearchOptions, SubtreeTally,
};
use ucf_core::format::{format_family, parse_family};
use ucf_core::verifier::{check_single, run_campaign, write_report, CampaignConfig, Check};
use ucf_core::SetFamily;

const PASS: u8 = 0;
const FAIL: u8 = 1;
const ABORT: u8 = 2;

#[derive(Parser, Debug)]
#[command(
    name = "ucf",
    version,
    about = "Union-closed family checks and exhaustive campaigns"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Analyze one family file and print its diagnostic record as JSON.
    Check { path: PathBuf },
    /// Print the union-closure of a family file.
    Closure { path: PathBuf },
    /// Run a verification campaign over all enumerated families.
    Verify(VerifyArgs),
    /// Brute-force the family list and print its canonical keys.
    Oracle(OracleArgs),
    /// Dump the enumerated families (or their canonical keys).
    Enumerate(EnumerateArgs),
}

#[derive(Args, Debug, Clone)]
struct FamilySpace {
    /// Ground set size.
    #[arg(long)]
    n: u8,
    /// Minimum size of a nonempty member.
    #[arg(long)]
    t: u8,
    /// One family per relabeling class.
    #[arg(long)]
    up_to_iso: bool,
    /// Do not require the union of the family to be the whole ground set.
    #[arg(long)]
    no_universe: bool,
}

#[derive(Args, Debug, Clone)]
struct SearchArgs {
    /// Worker threads (0 = one per core).
    #[arg(long, env = "UCF_WORKERS", default_value_t = 0)]
    workers: usize,
    /// Resumable progress log, one line per finished subtree.
    #[arg(long)]
    checkpoint: Option<PathBuf>,
    /// Run outside the supported envelope (n = 6 with t <= 2).
    #[arg(long)]
    unbounded: bool,
    /// Candidate decision order: desc or asc.
    #[arg(long, default_value = "desc")]
    order: CandidateOrder,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[command(flatten)]
    space: FamilySpace,
    #[command(flatten)]
    search: SearchArgs,
    /// Checks to apply.
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "frankl,s_frankl,lemma_1_2_spot"
    )]
    checks: Vec<Check>,
    /// Apply lemma_1_2_spot to every N-th family of each subtree.
    #[arg(long, default_value_t = 1)]
    lemma_every: u64,
    /// Where to write the JSON report.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Directory for counterexample family files.
    #[arg(long, default_value = "counterexamples")]
    dump_dir: PathBuf,
}

#[derive(Args, Debug)]
struct OracleArgs {
    #[command(flatten)]
    space: FamilySpace,
    /// Write the canonical-key list here instead of stdout.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct EnumerateArgs {
    #[command(flatten)]
    space: FamilySpace,
    #[command(flatten)]
    search: SearchArgs,
    /// Print sorted canonical keys instead of families.
    #[arg(long)]
    keys: bool,
}

/// Validated command-line configuration shared by the campaign commands.
#[derive(Debug, Clone)]
struct CliConfig {
    constraints: EnumerationConstraints,
    options: SearchOptions,
    checkpoint: Option<PathBuf>,
}

impl CliConfig {
    fn new(space: &FamilySpace, search: Option<&SearchArgs>) -> Result<Self, String> {
        let constraints =
            EnumerationConstraints::new(space.n, space.t, !space.no_universe, space.up_to_iso)
                .map_err(|e| e.to_string())?;
        let options = match search {
            Some(s) => SearchOptions {
                order: s.order,
                workers: s.workers,
                unbounded: s.unbounded,
            },
            None => SearchOptions::default(),
        };
        constraints
            .check_envelope(options.unbounded)
            .map_err(|e| e.to_string())?;
        Ok(CliConfig {
            constraints,
            options,
            checkpoint: search.and_then(|s| s.checkpoint.clone()),
        })
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Check { path } => cmd_check(&path),
        Command::Closure { path } => cmd_closure(&path),
        Command::Verify(args) => cmd_verify(&args),
        Command::Oracle(args) => cmd_oracle(&args),
        Command::Enumerate(args) => cmd_enumerate(&args),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(ABORT)
        }
    }
}

fn read_family(path: &Path) -> Result<SetFamily, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    parse_family(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn cmd_check(path: &Path) -> Result<u8, String> {
    let family = read_family(path)?;
    let record = check_single(&family);
    println!("{}", record.to_json());
    Ok(if record.passed() { PASS } else { FAIL })
}

fn cmd_closure(path: &Path) -> Result<u8, String> {
    let family = read_family(path)?;
    print!(
        "{}",
        format_family(&ucf_core::family::union_closure(&family))
    );
    Ok(PASS)
}

fn cmd_verify(args: &VerifyArgs) -> Result<u8, String> {
    let cfg = CliConfig::new(&args.space, Some(&args.search))?;
    let mut campaign = CampaignConfig::new(cfg.constraints, args.checks.iter().copied());
    campaign.search = cfg.options;
    campaign.lemma_every = args.lemma_every;
    campaign.checkpoint = cfg.checkpoint;
    campaign.dump_dir = Some(args.dump_dir.clone());

    let report = run_campaign(&campaign).map_err(|e| e.to_string())?;
    if let Some(path) = &args.report {
        write_report(&report, path).map_err(|e| format!("{}: {e}", path.display()))?;
    }

    println!("constraints      {}", cfg.constraints.tag());
    println!("families         {}", report.families_total);
    for (t, count) in &report.families_by_t {
        let label = if *t == 0 {
            "-".to_string()
        } else {
            t.to_string()
        };
        println!("  T={label:<3}         {count}");
    }
    for (shape, count) in &report.families_by_shape {
        println!("  shape {:<9}  {count}", shape.name());
    }
    for (check, count) in &report.checks_applied {
        println!("  checked {:<15} {count}", check.name());
    }
    println!("counterexamples  {}", report.counterexamples.len());
    for cex in &report.counterexamples {
        println!("  {} fails {}", cex.family, cex.check);
    }
    println!(
        "wall time        {} ms on {} workers",
        report.wall_time, report.workers
    );

    Ok(if report.passed() { PASS } else { FAIL })
}

fn cmd_oracle(args: &OracleArgs) -> Result<u8, String> {
    let cfg = CliConfig::new(&args.space, None)?;
    let families = brute_force_enumerate(&cfg.constraints).map_err(|e| e.to_string())?;
    let mut keys: Vec<String> = families
        .iter()
        .map(|f| canonical_key(f).to_string())
        .collect();
    keys.sort();
    println!("count={}", families.len());
    let listing = keys.join("\n") + "\n";
    match &args.report {
        Some(path) => fs::write(path, listing).map_err(|e| format!("{}: {e}", path.display()))?,
        None => print!("{listing}"),
    }
    Ok(PASS)
}

/// Families found in one subtree; listings are never restored from a
/// checkpoint.
struct Listing(Vec<u64>);

impl SubtreeTally for Listing {
    fn count(&self) -> u64 {
        self.0.len() as u64
    }

    fn to_fields(&self) -> Vec<(String, String)> {
        Vec::new()
    }

    fn from_entry(_: &CheckpointEntry) -> Result<Self, String> {
        Err("family listings cannot be restored from a checkpoint".to_string())
    }
}

fn cmd_enumerate(args: &EnumerateArgs) -> Result<u8, String> {
    let cfg = CliConfig::new(&args.space, Some(&args.search))?;
    let plan = enumeration::plan(&cfg.constraints, &cfg.options).map_err(|e| e.to_string())?;

    if let Some(path) = &cfg.checkpoint {
        // Count-only mode: restored subtrees cannot be listed again.
        let counts: Vec<u64> = enumeration::run_subtrees(
            &plan,
            cfg.options.workers,
            Some((path.as_path(), "mode=count")),
            |s| plan.walk(s, &mut |_| {}),
        )
        .map_err(|e| e.to_string())?;
        println!("count={}", counts.iter().sum::<u64>());
        return Ok(PASS);
    }

    let listings: Vec<Listing> = enumeration::run_subtrees(&plan, cfg.options.workers, None, |s| {
        let mut found = Vec::new();
        plan.walk(s, &mut |f| found.push(f.bits));
        Listing(found)
    })
    .map_err(|e| e.to_string())?;

    let n = cfg.constraints.n;
    let families = listings
        .iter()
        .flat_map(|l| l.0.iter())
        .map(|&bits| PackedFamily { n, bits }.to_family());
    let mut total = 0u64;
    if args.keys {
        let mut keys: Vec<String> = families.map(|f| canonical_key(&f).to_string()).collect();
        keys.sort();
        total = keys.len() as u64;
        for k in keys {
            println!("{k}");
        }
    } else {
        for f in families {
            total += 1;
            println!("# family {total}");
            print!("{}", format_family(&f));
        }
    }
    println!("# count={total}");
    Ok(PASS)
}
