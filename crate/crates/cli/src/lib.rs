//! The `rela check` pipeline: parse, compile, load, check, report.

use std::fs;
use std::io::{self, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicBool, Ordering};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::{info, warn};
use rela_core::checker::{check_all, sha256_hex, CheckOptions, CompiledProgram, Report};
use rela_core::frontend::{parse_program, LocationDb};
use rela_core::snapshot::{load_fecs, Granularity};

#[derive(Debug, Parser)]
#[command(name = "rela", version, about = "Check network forwarding changes against a relational spec")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check pre/post forwarding snapshots against a spec program.
    Check(RunConfig),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Debug, Clone, Args)]
pub struct RunConfig {
    /// Spec program.
    #[arg(long)]
    pub spec: PathBuf,
    /// Location database (JSON array of records).
    #[arg(long)]
    pub locations: PathBuf,
    /// FEC records, one JSON object per line.
    #[arg(long)]
    pub fecs: PathBuf,
    /// interface, device (or router), or group.
    #[arg(long, default_value = "device")]
    pub granularity: Granularity,
    /// Worker threads; defaults to the number of cores.
    #[arg(long, value_parser = clap::value_parser!(u16).range(1..))]
    pub workers: Option<u16>,
    /// Paths listed per FEC in each direction of a counterexample.
    #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u32).range(1..))]
    pub max_counterexamples: u32,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Abort on the first malformed FEC record.
    #[arg(long)]
    pub strict: bool,
    /// Print the compiled RIR to stderr.
    #[arg(long)]
    pub emit_rir: bool,
}

impl RunConfig {
    pub fn new(spec: impl Into<PathBuf>, locations: impl Into<PathBuf>, fecs: impl Into<PathBuf>) -> Self {
        RunConfig {
            spec: spec.into(),
            locations: locations.into(),
            fecs: fecs.into(),
            granularity: Granularity::Device,
            workers: None,
            max_counterexamples: 100,
            output: None,
            format: Format::Json,
            strict: false,
            emit_rir: false,
        }
    }

    pub fn workers(&self) -> usize {
        self.workers
            .map(usize::from)
            .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
    }
}

static INTERRUPTED: AtomicBool = AtomicBool::new(false);

/// Makes Ctrl-C stop checking and flush a report marked incomplete.
pub fn install_interrupt_handler() {
    if let Err(e) = ctrlc::set_handler(|| INTERRUPTED.store(true, Ordering::SeqCst)) {
        warn!("cannot install interrupt handler: {e}");
    }
}

/// An input problem, reported with exit status 2.
#[derive(Debug)]
pub struct InputFailure(pub String);

impl std::fmt::Display for InputFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

fn read(path: &Path) -> Result<Vec<u8>, InputFailure> {
    fs::read(path).map_err(|e| InputFailure(format!("{}: {e}", path.display())))
}

/// The compiled RIR of every spec in the program, headed by spec name.
pub fn emit_rir(program: &CompiledProgram) -> String {
    let mut out = String::new();
    for entry in &program.entries {
        out.push_str(&format!("// spec {}\n", entry.name));
        out.push_str(&entry.spec.emit_rir(&program.table));
    }
    out
}

/// Runs the pipeline and returns the report, without writing it.
pub fn execute(config: &RunConfig) -> Result<Report, InputFailure> {
    let started = Instant::now();
    let db_bytes = read(&config.locations)?;
    let db_text = String::from_utf8(db_bytes.clone())
        .map_err(|_| InputFailure(format!("{}: not UTF-8", config.locations.display())))?;
    let db = LocationDb::from_json(&db_text).map_err(|e| InputFailure(format!("{}: {e}", config.locations.display())))?;
    let spec_bytes = read(&config.spec)?;
    let spec_text = String::from_utf8(spec_bytes.clone())
        .map_err(|_| InputFailure(format!("{}: not UTF-8", config.spec.display())))?;
    let program = parse_program(&spec_text, &db, config.granularity)
        .map_err(|e| InputFailure(format!("{}: {e}", config.spec.display())))?;
    let compiled = CompiledProgram::new(&program, config.granularity);
    info!(
        "compiled {} spec(s) at {} granularity in {:.2?}",
        compiled.entries.len(),
        config.granularity,
        started.elapsed()
    );
    if config.emit_rir {
        eprint!("{}", emit_rir(&compiled));
    }

    let loading = Instant::now();
    let fec_bytes = read(&config.fecs)?;
    let mut fecs = Vec::new();
    for item in load_fecs(BufReader::new(fec_bytes.as_slice()), Some(&db)) {
        if config.strict {
            if let Err(e) = &item {
                return Err(InputFailure(format!("{}: {e}", config.fecs.display())));
            }
        }
        fecs.push(item);
    }
    info!("loaded {} FEC record(s) in {:.2?}", fecs.len(), loading.elapsed());

    let checking = Instant::now();
    let options = CheckOptions {
        workers: config.workers(),
        max_counterexamples: config.max_counterexamples as usize,
        ..CheckOptions::default()
    };
    let mut report = check_all(&compiled, &db, fecs, &options, Some(&INTERRUPTED));
    info!(
        "checked {} FEC(s) with {} worker(s) in {:.2?}",
        report.totals.fecs,
        options.workers,
        checking.elapsed()
    );
    if !report.complete {
        warn!("interrupted: {} FEC(s) not checked", report.totals.skipped);
    }
    report.metadata.spec_sha256 = Some(sha256_hex(&spec_bytes));
    report.metadata.locations_sha256 = Some(sha256_hex(&db_bytes));
    report.metadata.fecs_sha256 = Some(sha256_hex(&fec_bytes));
    Ok(report)
}

pub fn render(report: &Report, format: Format) -> String {
    match format {
        Format::Json => report.to_json(),
        Format::Text => report.to_text(),
    }
}

/// Runs `rela check` and returns the exit status.
pub fn run(config: &RunConfig) -> i32 {
    let report = match execute(config) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    let text = render(&report, config.format);
    let written = match &config.output {
        Some(path) => fs::write(path, text).map_err(|e| format!("{}: {e}", path.display())),
        None => io::stdout().write_all(text.as_bytes()).map_err(|e| e.to_string()),
    };
    if let Err(e) = written {
        eprintln!("error: cannot write report: {e}");
        return 2;
    }
    for e in &report.errors {
        eprintln!("error: {}", e.message);
    }
    report.exit_code()
}
