//! Command-line surface and report emission.
//!
//! Exit codes: 0 on success, 1 when inputs fail validation or a computation
//! reports an error, 2 on bad usage. All randomness flows from `--seed`;
//! nothing in any output path reads the clock or OS entropy, so reruns with
//! identical inputs produce byte-identical files.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use clap::{ArgGroup, Args, Parser, Subcommand};
use rayon::prelude::*;

use crate::audit::{self, AuditConfig, AuditError, FileSource};
use crate::cascade::{Cascade, RemovalEvent, RiskProbabilities, RiskSummary};
use crate::metrics::{
    classify_quadrant, compute_metrics, corpus_medians, unavailability_breakdown,
};
use crate::model::{
    self, ingest_mentions, ingest_statuses, select_highly_tweeted, Corpus, Snapshot,
};
use crate::report::{self, PublicationRow, RiskRow};
use crate::stats::{self, XminPolicy};
use crate::structure::{build_structure, DisseminationStructure};

/// Validated run inputs shared by the subcommands.
#[derive(Debug, Clone, Default)]
pub struct RunConfig {
    pub mentions: PathBuf,
    pub statuses: Option<PathBuf>,
    pub scenario: Option<PathBuf>,
    pub min_nutu: u64,
    pub seed: Option<u64>,
    pub out_dir: Option<PathBuf>,
    pub max_inflight: usize,
}

impl RunConfig {
    /// Paths are checked before any computation starts.
    fn validate(&self) -> Result<()> {
        for path in [Some(&self.mentions), self.statuses.as_ref(), self.scenario.as_ref()]
            .into_iter()
            .flatten()
        {
            if !path.is_file() {
                bail!("input file not found: {}", path.display());
            }
        }
        Ok(())
    }
}

#[derive(Parser)]
#[command(
    name = "dissemetrics",
    version,
    about = "Dissemination-structure metrics, availability audits, and removal-cascade risk for tweet mention dumps"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Ingest a mention dump and print the ingestion report.
    Validate {
        /// Mention dump (mentions.jsonl).
        #[arg(long)]
        mentions: PathBuf,
        /// Optional status dump to validate alongside.
        #[arg(long)]
        statuses: Option<PathBuf>,
    },
    /// Per-publication indicator CSV (counts, DO, DC, quadrant, breakdown).
    Metrics {
        #[arg(long)]
        mentions: PathBuf,
        #[arg(long)]
        statuses: Option<PathBuf>,
        /// Keep publications with at least this many unique users.
        #[arg(long, default_value_t = 1000)]
        min_nutu: u64,
        /// Output directory.
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Recheck every tweet id against a status source fixture.
    Audit {
        #[arg(long)]
        mentions: PathBuf,
        /// Verdict fixture in the statuses.jsonl format.
        #[arg(long)]
        source: PathBuf,
        /// Timestamp stamped on the emitted snapshot records.
        #[arg(long, default_value = "1970-01-01T00:00:00Z")]
        checked_at: String,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Worst-hit publications by unavailability rate, descending.
    Breakdown {
        #[arg(long)]
        mentions: PathBuf,
        #[arg(long)]
        statuses: PathBuf,
        /// Number of rows to keep.
        #[arg(long, default_value_t = 10)]
        top: usize,
        #[arg(long, default_value_t = 1000)]
        min_nutu: u64,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Replay a removal scenario or run Monte Carlo removal risk.
    Simulate(SimulateArgs),
    /// Fit a discrete power law to the unique-user distribution.
    Fit {
        #[arg(long)]
        mentions: PathBuf,
        /// Fix the tail cutoff instead of scanning for it.
        #[arg(long)]
        xmin: Option<u64>,
        #[arg(long, default_value_t = 1)]
        min_nutu: u64,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Rank correlation between recorded and still-available counts.
    Correlate {
        #[arg(long)]
        mentions: PathBuf,
        #[arg(long)]
        statuses: PathBuf,
        #[arg(long, default_value_t = 1)]
        min_nutu: u64,
    },
}

#[derive(Args)]
#[command(group(ArgGroup::new("mode").required(true).args(["scenario", "monte_carlo"])))]
struct SimulateArgs {
    #[arg(long)]
    mentions: PathBuf,
    /// Ordered event list (one {kind, target} object per line).
    #[arg(long)]
    scenario: Option<PathBuf>,
    /// Sample independent removals instead of replaying a scenario.
    #[arg(long)]
    monte_carlo: bool,
    #[arg(long, default_value_t = 0.0, value_parser = probability)]
    p_delete: f64,
    #[arg(long, default_value_t = 0.0, value_parser = probability)]
    p_suspend: f64,
    #[arg(long, default_value_t = 0.0, value_parser = probability)]
    p_protect: f64,
    #[arg(long, default_value_t = 1000)]
    trials: u64,
    /// RNG seed; required for Monte Carlo runs.
    #[arg(long, required_if_eq("monte_carlo", "true"))]
    seed: Option<u64>,
    #[arg(long, default_value_t = 1)]
    min_nutu: u64,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

fn probability(raw: &str) -> std::result::Result<f64, String> {
    let value: f64 = raw.parse().map_err(|_| format!("`{raw}` is not a number"))?;
    if (0.0..=1.0).contains(&value) {
        Ok(value)
    } else {
        Err(format!("probability {value} outside [0, 1]"))
    }
}

/// Parses and runs one invocation, returning the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(err) => {
            use clap::error::ErrorKind;
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
            let _ = err.print();
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(err) => {
            eprintln!("error: {err:#}");
            1
        }
    }
}

fn dispatch(command: Command) -> Result<()> {
    match command {
        Command::Validate { mentions, statuses } => cmd_validate(mentions, statuses),
        Command::Metrics { mentions, statuses, min_nutu, out } => {
            cmd_metrics(mentions, statuses, min_nutu, out)
        }
        Command::Audit { mentions, source, checked_at, out } => {
            cmd_audit(mentions, source, &checked_at, out)
        }
        Command::Breakdown { mentions, statuses, top, min_nutu, out } => {
            cmd_breakdown(mentions, statuses, top, min_nutu, out)
        }
        Command::Simulate(args) => cmd_simulate(args),
        Command::Fit { mentions, xmin, min_nutu, out } => cmd_fit(mentions, xmin, min_nutu, out),
        Command::Correlate { mentions, statuses, min_nutu } => {
            cmd_correlate(mentions, statuses, min_nutu)
        }
    }
}

fn load_corpus(path: &Path) -> Result<Corpus> {
    let file = File::open(path).with_context(|| format!("open {}", path.display()))?;
    ingest_mentions(BufReader::new(file)).with_context(|| format!("read {}", path.display()))
}

fn load_snapshot(path: &Path) -> Result<Snapshot> {
    let file = File::open(path).with_context(|| format!("open {}", path.display()))?;
    let (snapshot, _) =
        ingest_statuses(BufReader::new(file)).with_context(|| format!("read {}", path.display()))?;
    Ok(snapshot)
}

/// Builds metrics and breakdown rows for the selected publications, quadrants
/// assigned against the selection's own medians. Rows come back sorted by
/// publication id.
pub fn publication_rows(corpus: &Corpus, snapshot: &Snapshot, min_nutu: u64) -> Vec<PublicationRow> {
    let selected: Vec<String> = select_highly_tweeted(corpus, min_nutu).into_iter().collect();
    let mut rows: Vec<PublicationRow> = selected
        .par_iter()
        .map(|publication| {
            let structure = build_structure(corpus, publication)
                .expect("selected publication exists in the corpus");
            let metrics = compute_metrics(&structure, corpus)
                .expect("selected publication has recorded mentions");
            let breakdown = unavailability_breakdown(&structure, snapshot);
            PublicationRow { metrics, breakdown }
        })
        .collect();
    if rows.is_empty() {
        return rows;
    }
    let metrics_only: Vec<_> = rows.iter().map(|r| r.metrics.clone()).collect();
    let medians = corpus_medians(&metrics_only).expect("non-empty selection");
    for row in &mut rows {
        row.metrics.quadrant = Some(classify_quadrant(
            row.metrics.originality,
            row.metrics.concentration,
            medians.originality,
            medians.concentration,
        ));
    }
    rows
}

fn cmd_validate(mentions: PathBuf, statuses: Option<PathBuf>) -> Result<()> {
    let config = RunConfig {
        mentions,
        statuses,
        min_nutu: 1000,
        ..RunConfig::default()
    };
    config.validate()?;
    let corpus = load_corpus(&config.mentions)?;
    let mut summary = serde_json::json!({ "mentions": corpus.report() });
    if let Some(path) = &config.statuses {
        let file = File::open(path)?;
        let (_, status_report) = ingest_statuses(BufReader::new(file))?;
        summary["statuses"] = serde_json::to_value(&status_report)?;
    }
    println!("{}", serde_json::to_string_pretty(&summary)?);
    Ok(())
}

fn cmd_metrics(
    mentions: PathBuf,
    statuses: Option<PathBuf>,
    min_nutu: u64,
    out: PathBuf,
) -> Result<()> {
    let config = RunConfig {
        mentions,
        statuses,
        min_nutu,
        out_dir: Some(out.clone()),
        ..RunConfig::default()
    };
    config.validate()?;
    let corpus = load_corpus(&config.mentions)?;
    let snapshot = match &config.statuses {
        Some(path) => load_snapshot(path)?,
        None => Snapshot::new(),
    };
    let rows = publication_rows(&corpus, &snapshot, config.min_nutu);
    let path = out.join("metrics.csv");
    report::write_atomic(&path, report::metrics_csv(&rows).as_bytes())?;
    eprintln!("wrote {} ({} publications)", path.display(), rows.len());
    Ok(())
}

fn cmd_audit(mentions: PathBuf, source: PathBuf, checked_at: &str, out: PathBuf) -> Result<()> {
    let config = RunConfig {
        mentions,
        statuses: Some(source.clone()),
        out_dir: Some(out.clone()),
        max_inflight: AuditConfig::from_env().max_inflight,
        ..RunConfig::default()
    };
    config.validate()?;
    let checked_at = model::parse_utc(checked_at)
        .ok_or_else(|| anyhow!("--checked-at must be an ISO-8601 timestamp"))?;
    let corpus = load_corpus(&config.mentions)?;
    let file = File::open(&source)?;
    let fixture = FileSource::from_reader(BufReader::new(file))?;

    let ids = corpus.tweet_ids();
    let audit_config = AuditConfig::from_env();
    let snapshot = match audit::audit(&ids, &fixture, checked_at, &audit_config) {
        Ok(snapshot) => snapshot,
        Err(AuditError::Unresolved { snapshot, unresolved }) => {
            // Emit what resolved, then fail: the caller decides how to
            // proceed with the partial snapshot.
            write_audit_reports(&corpus, &snapshot, &out)?;
            bail!("{} tweet ids unresolved after retries", unresolved.len());
        }
    };
    write_audit_reports(&corpus, &snapshot, &out)?;
    let tally = audit::reason_distribution(&snapshot);
    let yearly = audit::yearly_distribution(&corpus, &snapshot);
    println!(
        "{}",
        serde_json::json!({
            "checked": snapshot.len(),
            "unavailable": tally.total(),
            "undated": yearly.undated,
        })
    );
    Ok(())
}

fn write_audit_reports(corpus: &Corpus, snapshot: &Snapshot, out: &Path) -> Result<()> {
    let mut snapshot_bytes = Vec::new();
    snapshot.to_jsonl(&mut snapshot_bytes)?;
    report::write_atomic(&out.join("snapshot.jsonl"), &snapshot_bytes)?;
    let tally = audit::reason_distribution(snapshot);
    report::write_atomic(&out.join("reasons.csv"), report::reason_csv(&tally).as_bytes())?;
    let yearly = audit::yearly_distribution(corpus, snapshot);
    report::write_atomic(&out.join("yearly.csv"), report::yearly_csv(&yearly).as_bytes())?;
    Ok(())
}

fn cmd_breakdown(
    mentions: PathBuf,
    statuses: PathBuf,
    top: usize,
    min_nutu: u64,
    out: PathBuf,
) -> Result<()> {
    let config = RunConfig {
        mentions,
        statuses: Some(statuses.clone()),
        min_nutu,
        out_dir: Some(out.clone()),
        ..RunConfig::default()
    };
    config.validate()?;
    let corpus = load_corpus(&config.mentions)?;
    let snapshot = load_snapshot(&statuses)?;
    let rows = publication_rows(&corpus, &snapshot, config.min_nutu);
    let path = out.join("breakdown.csv");
    report::write_atomic(&path, report::breakdown_csv(&rows, top).as_bytes())?;
    eprintln!("wrote {}", path.display());
    Ok(())
}

fn cmd_simulate(args: SimulateArgs) -> Result<()> {
    let config = RunConfig {
        mentions: args.mentions,
        scenario: args.scenario.clone(),
        min_nutu: args.min_nutu,
        seed: args.seed,
        out_dir: Some(args.out.clone()),
        ..RunConfig::default()
    };
    config.validate()?;
    let corpus = load_corpus(&config.mentions)?;
    let selected: Vec<String> =
        select_highly_tweeted(&corpus, config.min_nutu).into_iter().collect();
    let structures: BTreeMap<String, DisseminationStructure> = selected
        .iter()
        .map(|publication| {
            (
                publication.clone(),
                build_structure(&corpus, publication).expect("selected publication exists"),
            )
        })
        .collect();

    let rows: Vec<RiskRow> = if let Some(scenario_path) = &config.scenario {
        let events = read_scenario(scenario_path)?;
        let assignments = partition_events(&corpus, &structures, &events)?;
        structures
            .iter()
            .map(|(publication, structure)| {
                let cascade = Cascade::new(structure, &corpus);
                let events = assignments.get(publication).map_or(&[][..], Vec::as_slice);
                let state = cascade
                    .simulate(events)
                    .map_err(|e| anyhow!("publication {publication}: {e}"))?;
                let loss = cascade.loss_fraction(&state);
                Ok(RiskRow {
                    publication_id: publication.clone(),
                    summary: RiskSummary { mean: loss, p50: loss, p90: loss, p99: loss, max: loss },
                    worst: cascade.worst_case_single_event()?,
                })
            })
            .collect::<Result<_>>()?
    } else {
        let seed = config.seed.expect("clap enforces --seed for monte carlo");
        let probabilities = RiskProbabilities {
            delete: args.p_delete,
            suspend: args.p_suspend,
            protect: args.p_protect,
        };
        structures
            .iter()
            .map(|(publication, structure)| {
                let cascade = Cascade::new(structure, &corpus);
                Ok(RiskRow {
                    publication_id: publication.clone(),
                    summary: cascade.monte_carlo_risk(probabilities, args.trials, seed)?,
                    worst: cascade.worst_case_single_event()?,
                })
            })
            .collect::<Result<_>>()?
    };

    let path = args.out.join("risk.csv");
    report::write_atomic(&path, report::risk_csv(&rows).as_bytes())?;
    eprintln!("wrote {}", path.display());
    Ok(())
}

fn read_scenario(path: &Path) -> Result<Vec<RemovalEvent>> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("read {}", path.display()))?;
    let mut events = Vec::new();
    for (number, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let event: RemovalEvent = serde_json::from_str(line)
            .with_context(|| format!("{}:{}: bad event", path.display(), number + 1))?;
        events.push(event);
    }
    Ok(events)
}

/// Routes each scenario event to the publications it can touch: a tweet
/// target to its publication, a user target to every publication the user
/// posted in. A target matching nothing anywhere is an error.
fn partition_events(
    corpus: &Corpus,
    structures: &BTreeMap<String, DisseminationStructure>,
    events: &[RemovalEvent],
) -> Result<BTreeMap<String, Vec<RemovalEvent>>> {
    let mut publications_of_author: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    for mention in corpus.mentions() {
        if let Some(author) = mention.author_id.as_deref() {
            publications_of_author
                .entry(author)
                .or_default()
                .push(&mention.publication_id);
        }
    }
    let mut assignments: BTreeMap<String, Vec<RemovalEvent>> = BTreeMap::new();
    for event in events {
        let target = event.target();
        let mut known = false;
        match event {
            RemovalEvent::DeleteTweet(_) => {
                if let Some(mention) = corpus.mention(target) {
                    known = true;
                    if structures.contains_key(&mention.publication_id) {
                        assignments
                            .entry(mention.publication_id.clone())
                            .or_default()
                            .push(event.clone());
                    }
                } else {
                    // Synthetic node ids live only inside structures.
                    for (publication, structure) in structures {
                        if structure.node(target).is_some() {
                            known = true;
                            assignments
                                .entry(publication.clone())
                                .or_default()
                                .push(event.clone());
                        }
                    }
                }
            }
            RemovalEvent::SuspendUser(_)
            | RemovalEvent::ProtectUser(_)
            | RemovalEvent::RestoreUser(_) => {
                if let Some(publications) = publications_of_author.get(target) {
                    known = true;
                    let mut seen = std::collections::BTreeSet::new();
                    for publication in publications {
                        if seen.insert(*publication) && structures.contains_key(*publication) {
                            assignments
                                .entry((*publication).to_string())
                                .or_default()
                                .push(event.clone());
                        }
                    }
                }
            }
        }
        if !known {
            bail!("unknown event target `{target}`");
        }
    }
    Ok(assignments)
}

fn cmd_fit(mentions: PathBuf, xmin: Option<u64>, min_nutu: u64, out: PathBuf) -> Result<()> {
    let config = RunConfig {
        mentions,
        min_nutu,
        out_dir: Some(out.clone()),
        ..RunConfig::default()
    };
    config.validate()?;
    let corpus = load_corpus(&config.mentions)?;
    let samples: Vec<u64> = select_highly_tweeted(&corpus, config.min_nutu)
        .iter()
        .map(|publication| corpus.unique_users(publication))
        .collect();
    let policy = match xmin {
        Some(x) => XminPolicy::Fixed(x.max(1)),
        None => XminPolicy::ScanKs,
    };
    let fit = stats::fit_power_law(&samples, policy)?;
    let rows = stats::pdf_ccdf(&samples)?;
    report::write_atomic(&out.join("pdf_ccdf.csv"), report::pdf_ccdf_csv(&rows).as_bytes())?;
    println!("{}", serde_json::to_string(&fit)?);
    Ok(())
}

fn cmd_correlate(mentions: PathBuf, statuses: PathBuf, min_nutu: u64) -> Result<()> {
    let config = RunConfig {
        mentions,
        statuses: Some(statuses.clone()),
        min_nutu,
        ..RunConfig::default()
    };
    config.validate()?;
    let corpus = load_corpus(&config.mentions)?;
    let snapshot = load_snapshot(&statuses)?;
    let rows = publication_rows(&corpus, &snapshot, config.min_nutu);
    let pairs: Vec<(u64, u64)> = rows
        .iter()
        .map(|row| (row.metrics.total_mentions, row.breakdown.unavailable_total))
        .collect();
    let rho = stats::stability_correlation(&pairs)?;
    println!(
        "{}",
        serde_json::json!({ "publications": pairs.len(), "rho": rho })
    );
    Ok(())
}

/// Convenience used by tests and examples: run and capture nothing.
pub fn run_args(args: &[&str]) -> i32 {
    run(std::iter::once("dissemetrics").chain(args.iter().copied()))
}
