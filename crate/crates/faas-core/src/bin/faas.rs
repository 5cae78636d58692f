//! Role-oriented command line for the fairness auditing protocol.
//!
//! The ML system runs `setup`, `phase1` and `phase2`; the auditor runs
//! `audit` and `board-serve`; anyone runs `verify` against a board. Every
//! phase reads and writes file artifacts so the stages can run on different
//! machines and at different times.
//!
//! Exit codes: 0 success, 2 verification failure, 3 input error, 4 I/O
//! error. Failures print a machine-readable `{"error_kind": ..}` line on
//! stderr.

use std::path::PathBuf;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde_json::json;

use faas_core::auditor::{
    compute_metrics, verify_audit_table_with_counts, AuditorError, MetricMode, TallyPolicy,
};
use faas_core::bench::run_pipeline_bench;
use faas_core::board::http::{serve, BoardClient};
use faas_core::board::{universal_verify, BoardConfig, BoardEntry, BoardError, BoardStore, EntryKind};
use faas_core::codec::{self, CodecError};
use faas_core::group::{setup_group, GroupError, Profile};
use faas_core::prover::{
    build_audit_table, build_cryptogram_table, CryptogramTable, FairnessAuditTable, ProverError,
};
use faas_core::samples::{gen_synthetic, ingest_csv, write_csv, SampleError, UNIFORM_RATES};

#[derive(Parser)]
#[command(
    name = "faas",
    about = "Privacy-preserving, universally verifiable fairness auditing",
    version
)]
struct Cli {
    /// Worker threads for row-level parallelism (default: all cores).
    #[arg(long, global = true)]
    workers: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write the versioned group-parameters fixture for a profile.
    Setup(SetupArgs),
    /// Phase I: build and store the cryptogram table (no labels needed).
    Phase1(Phase1Args),
    /// Phase II: derive the signed fairness auditing table from samples.
    Phase2(Phase2Args),
    /// Phase III: verify a table, tally, compute metrics, publish to a board.
    Audit(AuditArgs),
    /// Universal verification from board data alone.
    Verify(VerifyArgs),
    /// Single-threaded pipeline benchmark with per-step records.
    Bench(BenchArgs),
    /// Generate a synthetic samples CSV.
    GenSynthetic(GenArgs),
    /// Serve a board store over HTTP.
    BoardServe(ServeArgs),
}

#[derive(Args)]
struct SetupArgs {
    #[arg(long, default_value = "test")]
    profile: Profile,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct Phase1Args {
    #[arg(long, default_value = "test")]
    profile: Profile,
    #[arg(long)]
    n: u64,
    /// Deterministic seed; omit for OS entropy.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value = "session-1")]
    session_id: String,
    /// Output path for the local cryptogram-table store (contains secrets).
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct Phase2Args {
    /// Phase I cryptogram-table store.
    #[arg(long = "table", alias = "in")]
    table: PathBuf,
    /// Samples CSV with header A,Y,Yhat.
    #[arg(long)]
    samples: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value = "audit-1")]
    audit_session_id: String,
    /// Skip the delegated count declaration.
    #[arg(long)]
    no_declare: bool,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct AuditArgs {
    /// Fairness auditing table to verify.
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, default_value_t = TallyPolicy::default().budget)]
    tally_budget: u64,
    #[arg(long, default_value = "joint")]
    metric_mode: MetricMode,
    /// Directory for the verification and fairness report artifacts.
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Publish results to a board over HTTP.
    #[arg(long)]
    board_url: Option<String>,
    /// Publish results directly into a board store directory.
    #[arg(long)]
    board_store: Option<PathBuf>,
    #[arg(long, default_value = "")]
    credential: String,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    board_url: Option<String>,
    #[arg(long)]
    board_store: Option<PathBuf>,
    #[arg(long, default_value_t = TallyPolicy::default().budget)]
    tally_budget: u64,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, default_value = "production")]
    profile: Profile,
    #[arg(long)]
    n: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Directory for the bench artifacts (tables, samples).
    #[arg(long)]
    dir: PathBuf,
    /// Bench report output path.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    n: u64,
    /// Eight comma-separated per-permutation probabilities summing to 1.
    #[arg(long)]
    rates: Option<String>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ServeArgs {
    /// Board store directory.
    #[arg(long)]
    store: PathBuf,
    #[arg(long, default_value = "127.0.0.1:8780")]
    addr: String,
    #[arg(long)]
    credential: String,
    #[arg(long, default_value_t = TallyPolicy::default().budget)]
    tally_budget: u64,
}

/// A failure with its machine-readable kind and process exit code.
struct Failure {
    kind: &'static str,
    exit: i32,
    message: String,
}

impl Failure {
    fn new(kind: &'static str, exit: i32, message: impl std::fmt::Display) -> Self {
        Failure {
            kind,
            exit,
            message: message.to_string(),
        }
    }
}

trait IntoFailure<T> {
    fn or_fail(self, kind: &'static str, exit: i32) -> Result<T, Failure>;
}

impl<T, E: std::fmt::Display> IntoFailure<T> for Result<T, E> {
    fn or_fail(self, kind: &'static str, exit: i32) -> Result<T, Failure> {
        self.map_err(|e| Failure::new(kind, exit, e))
    }
}

impl From<ProverError> for Failure {
    fn from(e: ProverError) -> Self {
        match &e {
            ProverError::SizeMismatch { .. } => Failure::new("size-mismatch", 3, e),
            ProverError::EmptyTable | ProverError::TableTooLarge { .. } => {
                Failure::new("input-error", 3, e)
            }
            ProverError::Codec(CodecError::Io(_)) => Failure::new("io-error", 4, e),
            ProverError::Codec(_) | ProverError::BadFormat(_) => Failure::new("parse-error", 3, e),
            _ => Failure::new("prover-error", 2, e),
        }
    }
}

impl From<SampleError> for Failure {
    fn from(e: SampleError) -> Self {
        match &e {
            SampleError::Io(_) => Failure::new("io-error", 4, e),
            _ => Failure::new("input-error", 3, e),
        }
    }
}

impl From<GroupError> for Failure {
    fn from(e: GroupError) -> Self {
        Failure::new("input-error", 3, e)
    }
}

impl From<CodecError> for Failure {
    fn from(e: CodecError) -> Self {
        match &e {
            CodecError::Io(_) => Failure::new("io-error", 4, e),
            _ => Failure::new("parse-error", 3, e),
        }
    }
}

impl From<BoardError> for Failure {
    fn from(e: BoardError) -> Self {
        match &e {
            BoardError::BadCredential => Failure::new("bad-credential", 2, e),
            BoardError::GateRejected(_) => Failure::new("gate-rejected", 2, e),
            BoardError::ChainInvalid(_) => Failure::new("chain-invalid", 2, e),
            BoardError::NotFound(_) => Failure::new("input-error", 3, e),
            BoardError::Io(_) => Failure::new("io-error", 4, e),
            _ => Failure::new("board-error", 2, e),
        }
    }
}

impl From<AuditorError> for Failure {
    fn from(e: AuditorError) -> Self {
        Failure::new("verification-failed", 2, e)
    }
}

fn main() {
    let cli = Cli::parse();
    if let Some(workers) = cli.workers {
        rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build_global()
            .ok();
    }
    match run(cli.command) {
        Ok(()) => {}
        Err(failure) => {
            eprintln!(
                "{}",
                json!({ "error_kind": failure.kind, "message": failure.message })
            );
            std::process::exit(failure.exit);
        }
    }
}

fn rng_from(seed: Option<u64>) -> ChaCha20Rng {
    match seed {
        Some(s) => ChaCha20Rng::seed_from_u64(s),
        None => ChaCha20Rng::from_entropy(),
    }
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Setup(args) => {
            let params = setup_group(args.profile)?;
            let doc = codec::write_sealed(&args.out, params.to_doc())?;
            println!(
                "{}",
                json!({ "profile": args.profile.id(), "out": args.out, "digest": doc.digest })
            );
            Ok(())
        }
        Command::Phase1(args) => {
            let params = setup_group(args.profile)?;
            let mut rng = rng_from(args.seed);
            let table = build_cryptogram_table(&params, args.n, &args.session_id, &mut rng)?;
            table.save(&params, &args.out)?;
            println!(
                "{}",
                json!({
                    "profile": args.profile.id(),
                    "n": args.n,
                    "m": table.m,
                    "session_id": table.session_id,
                    "out": args.out,
                })
            );
            Ok(())
        }
        Command::Phase2(args) => {
            let (params, table) = CryptogramTable::load(&args.table)?;
            let samples = ingest_csv(&args.samples)?;
            let mut rng = rng_from(args.seed);
            let audit = build_audit_table(
                &params,
                &table,
                &samples,
                &args.audit_session_id,
                !args.no_declare,
                &mut rng,
            )?;
            audit.save(&params, &args.out)?;
            let digest = codec::content_digest(&audit.to_doc(&params))?;
            println!(
                "{}",
                json!({
                    "n": audit.n,
                    "audit_session_id": audit.audit_session_id,
                    "declared_counts": audit.declared_counts.as_ref().map(|c| *c.as_array()),
                    "out": args.out,
                    "digest": digest,
                })
            );
            Ok(())
        }
        Command::Audit(args) => cmd_audit(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Bench(args) => cmd_bench(args),
        Command::GenSynthetic(args) => {
            let rates = match &args.rates {
                None => UNIFORM_RATES,
                Some(text) => parse_rates(text)?,
            };
            let samples = gen_synthetic(args.n, &rates, args.seed)?;
            write_csv(&args.out, &samples)?;
            let digest = codec::sha256_hex(&std::fs::read(&args.out).or_fail("io-error", 4)?);
            println!(
                "{}",
                json!({ "n": args.n, "seed": args.seed, "out": args.out, "digest": digest })
            );
            Ok(())
        }
        Command::BoardServe(args) => {
            let store = BoardStore::open(
                &args.store,
                BoardConfig {
                    credential: args.credential,
                    tally_budget: args.tally_budget,
                },
            )?;
            let runtime = tokio::runtime::Builder::new_multi_thread()
                .enable_all()
                .build()
                .or_fail("io-error", 4)?;
            let listener = runtime
                .block_on(tokio::net::TcpListener::bind(&args.addr))
                .or_fail("io-error", 4)?;
            let addr = listener.local_addr().or_fail("io-error", 4)?;
            println!("{}", json!({ "serving": format!("http://{addr}") }));
            runtime
                .block_on(serve(Arc::new(store), listener))
                .or_fail("io-error", 4)?;
            Ok(())
        }
    }
}

fn parse_rates(text: &str) -> Result<[f64; 8], Failure> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 8 {
        return Err(Failure::new(
            "input-error",
            3,
            format!("expected 8 rates, got {}", parts.len()),
        ));
    }
    let mut rates = [0.0f64; 8];
    for (slot, part) in rates.iter_mut().zip(&parts) {
        *slot = part
            .trim()
            .parse::<f64>()
            .or_fail("input-error", 3)?;
    }
    Ok(rates)
}

fn cmd_audit(args: AuditArgs) -> Result<(), Failure> {
    let (params, table) = FairnessAuditTable::load(&args.input)?;
    let policy = TallyPolicy {
        budget: args.tally_budget,
    };
    let (report, counts) = verify_audit_table_with_counts(&params, &table, &policy);
    let table_doc = codec::seal(table.to_doc(&params))?;
    let table_digest = table_doc.digest.clone();
    let verification_doc = codec::seal(report.to_doc(&table_digest))?;

    if !report.overall {
        let path = args
            .out_dir
            .as_ref()
            .map(|d| d.join("verification-report.json"));
        if let Some(path) = path {
            std::fs::write(&path, codec::canonical_bytes(&verification_doc)?)
                .or_fail("io-error", 4)?;
        }
        return Err(Failure::new(
            "verification-failed",
            2,
            serde_json::to_string(&report).unwrap_or_default(),
        ));
    }
    let counts = counts.ok_or_else(|| {
        Failure::new("verification-failed", 2, "counts unresolved after verification")
    })?;
    let fairness = compute_metrics(&counts, table.n, args.metric_mode);
    let fairness_doc = codec::seal(fairness.to_doc(&table_digest))?;

    if let Some(dir) = &args.out_dir {
        std::fs::create_dir_all(dir).or_fail("io-error", 4)?;
        std::fs::write(
            dir.join("verification-report.json"),
            codec::canonical_bytes(&verification_doc)?,
        )
        .or_fail("io-error", 4)?;
        std::fs::write(
            dir.join("fairness-report.json"),
            codec::canonical_bytes(&fairness_doc)?,
        )
        .or_fail("io-error", 4)?;
    }

    let mut published = 0u64;
    let entries: Vec<(EntryKind, serde_json::Value)> = vec![
        (
            EntryKind::GroupParams,
            serde_json::to_value(codec::seal(params.to_doc())?).or_fail("parse-error", 3)?,
        ),
        (
            EntryKind::PublicKeyAnnouncement,
            json!({
                "format": "faas.key-announcement.v1",
                "session_id": table.session_id,
                "profile": params.profile().id(),
                "signer_public": params.element_hex(&table.signer_public),
            }),
        ),
        (
            EntryKind::AuditTable,
            serde_json::to_value(&table_doc).or_fail("parse-error", 3)?,
        ),
        (
            EntryKind::VerificationReport,
            serde_json::to_value(&verification_doc).or_fail("parse-error", 3)?,
        ),
        (
            EntryKind::FairnessReport,
            serde_json::to_value(&fairness_doc).or_fail("parse-error", 3)?,
        ),
    ];

    if let Some(url) = &args.board_url {
        let client = BoardClient::new(url).with_credential(&args.credential);
        for (kind, payload) in &entries {
            client.append(*kind, payload.clone())?;
            published += 1;
        }
    } else if let Some(dir) = &args.board_store {
        let store = BoardStore::open(
            dir,
            BoardConfig {
                credential: args.credential.clone(),
                tally_budget: args.tally_budget,
            },
        )?;
        for (kind, payload) in &entries {
            store.append(*kind, payload.clone(), &args.credential)?;
            published += 1;
        }
    }

    println!(
        "{}",
        json!({
            "overall": report.overall,
            "counts": counts.as_array(),
            "mode": args.metric_mode.id(),
            "dp": fairness.dp.value,
            "eod_y0": fairness.eod_y0.value,
            "eod_y1": fairness.eod_y1.value,
            "eop": fairness.eop.value,
            "table_digest": table_digest,
            "board_entries": published,
        })
    );
    Ok(())
}

fn cmd_verify(args: VerifyArgs) -> Result<(), Failure> {
    let entries: Vec<BoardEntry> = if let Some(url) = &args.board_url {
        let client = BoardClient::new(url);
        // A board that cannot even list itself is not verifiable.
        let listed = client
            .list()
            .map_err(|e| Failure::new("chain-invalid", 2, format!("board unreadable: {e}")))?;
        let remote = client.verify_remote();
        if let Ok(report) = remote {
            if !report.valid {
                return Err(Failure::new(
                    "chain-invalid",
                    2,
                    report.error.unwrap_or_else(|| "remote chain check failed".into()),
                ));
            }
        }
        listed
    } else if let Some(dir) = &args.board_store {
        let store = BoardStore::open(dir, BoardConfig::new(""))?;
        store.list(None, None)?
    } else {
        return Err(Failure::new(
            "input-error",
            3,
            "one of --board-url or --board-store is required",
        ));
    };

    let outcome = universal_verify(&entries, args.tally_budget);
    if !outcome.ok() {
        return Err(Failure::new(
            "chain-invalid",
            2,
            serde_json::to_string(&outcome).unwrap_or_default(),
        ));
    }
    println!(
        "{}",
        json!({
            "chain_valid": outcome.chain_valid,
            "entries": entries.len(),
            "audit_tables": outcome.audit_tables,
            "reports_reproduced": outcome.reports_reproduced,
        })
    );
    Ok(())
}

fn cmd_bench(args: BenchArgs) -> Result<(), Failure> {
    let params = setup_group(args.profile)?;
    std::fs::create_dir_all(&args.dir).or_fail("io-error", 4)?;
    let output = run_pipeline_bench(&params, args.n, &UNIFORM_RATES, args.seed, &args.dir)
        .or_fail("verification-failed", 2)?;
    let doc = codec::write_sealed(&args.out, output.to_doc(&params, args.n, args.seed))?;
    for record in &output.records {
        println!(
            "{:<8} {:<28} items={:<6} mean={:.3}ms std={:.3}ms total={:.3}s",
            record.phase, record.step, record.items, record.mean_ms, record.std_ms, record.total_s
        );
    }
    println!(
        "{}",
        json!({
            "profile": args.profile.id(),
            "n": args.n,
            "phase_totals_s": output.phase_totals_s,
            "counts": output.counts.as_array(),
            "report": args.out,
            "digest": doc.digest,
        })
    );
    Ok(())
}
