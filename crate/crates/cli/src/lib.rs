//! The `csev` command line: parameter setup, key generation, ingestion,
//! verification, linking, anchoring, inclusion proofs and benchmarks.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use csev::bench::{run_bench, BenchConfig, BenchMode};
use csev::Parallelism;

mod commands;
pub mod keyfile;
pub mod output;

use output::Out;

/// Exit codes.
pub const EXIT_OK: i32 = 0;
pub const EXIT_REJECT: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_IO: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] csev::Error),
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use csev::Error as E;
        match self {
            CliError::Config(_) => EXIT_USAGE,
            CliError::Io(_) => EXIT_IO,
            CliError::Core(e) => match e {
                E::Storage(_) | E::SinkUnavailable(_) => EXIT_IO,
                E::CorruptRecord(_) | E::CorruptFile { .. } | E::MissingEvent(_) => EXIT_REJECT,
                _ => EXIT_USAGE,
            },
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "csev",
    version,
    about = "Constant-size evidence for auditable workflows"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Global {
    /// Public parameters file.
    #[arg(
        long,
        global = true,
        env = "CSEV_PARAMS",
        default_value = "params.csev"
    )]
    pub params: PathBuf,
    /// Secret key file; the public key lives at `<key>.pub`.
    #[arg(long, global = true, env = "CSEV_KEY", default_value = "signing.key")]
    pub key: PathBuf,
    /// Evidence log; its sidecar index is `<log>.idx`.
    #[arg(long, global = true, env = "CSEV_LOG", default_value = "evidence.csel")]
    pub log: PathBuf,
    /// Content-addressed event store directory.
    #[arg(
        long = "events-dir",
        global = true,
        env = "CSEV_EVENTS",
        default_value = "events"
    )]
    pub events_dir: PathBuf,
    /// Append-only anchor file.
    #[arg(
        long = "anchor-file",
        global = true,
        env = "CSEV_ANCHOR",
        default_value = "anchors.csan"
    )]
    pub anchor_file: PathBuf,
    /// Worker threads for verification (default: all cores) and bench
    /// (default: 1).
    #[arg(long, global = true, env = "CSEV_THREADS")]
    pub threads: Option<usize>,
    /// Print `key=value` lines instead of prose.
    #[arg(long, global = true, env = "CSEV_MACHINE")]
    pub machine: bool,
}

impl Global {
    pub fn parallelism(&self) -> Parallelism {
        match self.threads {
            Some(n) => Parallelism::Threads(n),
            None => Parallelism::Available,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Create a parameters file.
    Setup {
        #[arg(long, default_value_t = csev::params::DEFAULT_FIELDS)]
        fields: usize,
        #[arg(long, default_value = "v1")]
        suite: String,
        /// Output path (default: --params).
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        force: bool,
    },
    /// Generate a signing key pair.
    Keygen {
        /// 32-byte seed as 64 hex characters, for reproducible keys.
        #[arg(long)]
        seed: Option<String>,
        #[arg(long, default_value = "v1")]
        suite: String,
        /// Output path (default: --key).
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        force: bool,
    },
    /// Sign and append events from a JSON-lines file (`-` for stdin).
    Ingest { input: PathBuf },
    /// Verify log records against their stored events.
    Verify {
        #[arg(long, conflicts_with = "all", required_unless_present = "all")]
        index: Option<u64>,
        #[arg(long)]
        all: bool,
        /// Report every mismatched field rather than the first.
        #[arg(long)]
        full_scan: bool,
    },
    /// Compute the chain tip or Merkle root over the log.
    Link {
        #[arg(long, conflicts_with = "merkle", required_unless_present = "merkle")]
        chain: bool,
        #[arg(long)]
        merkle: bool,
        /// Record the result in the anchor file.
        #[arg(long)]
        anchor: bool,
        #[arg(long, requires = "anchor")]
        label: Option<String>,
    },
    /// List anchored values.
    Anchors,
    /// Write a Merkle inclusion proof for one record.
    Prove {
        #[arg(long)]
        index: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Check a Merkle inclusion proof.
    CheckProof {
        #[arg(long)]
        proof: PathBuf,
        /// Take the item from this log record.
        #[arg(
            long,
            conflicts_with = "item_hex",
            required_unless_present = "item_hex"
        )]
        index: Option<u64>,
        /// Serialized item as hex.
        #[arg(long)]
        item_hex: Option<String>,
        /// Require the proof to lead to this root.
        #[arg(long)]
        root: Option<String>,
    },
    /// Time generate, verify or link over synthetic events.
    Bench {
        #[arg(long, default_value = "generate")]
        mode: BenchMode,
        #[arg(long, default_value_t = 10_000)]
        n: usize,
        #[arg(long, default_value_t = 100)]
        payload_bytes: usize,
        #[arg(long, default_value_t = csev::params::DEFAULT_FIELDS)]
        fields: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Emit synthetic events as JSON lines.
    Synth {
        #[arg(long, default_value_t = 1000)]
        n: usize,
        #[arg(long, default_value_t = 100)]
        payload_bytes: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output path (default: stdout).
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Runs one command, writing normal output to `w` and diagnostics to
/// stderr. Returns the process exit code.
pub fn run(cli: Cli, w: &mut dyn Write) -> i32 {
    let mut out = Out::new(w, cli.global.machine);
    match commands::dispatch(&cli.global, cli.command, &mut out) {
        Ok(code) => code,
        Err(e) => {
            let code = e.exit_code();
            let _ = out.machine_only(
                output::Line::new("error")
                    .kv("exit", code)
                    .kv("message", &e),
            );
            eprintln!("csev: {e}");
            code
        }
    }
}

pub(crate) fn bench(
    params: &csev::Params,
    mode: BenchMode,
    n: usize,
    threads: usize,
    payload_bytes: usize,
    seed: u64,
) -> Result<csev::bench::BenchReport, CliError> {
    let mut s = [0u8; 32];
    s[..8].copy_from_slice(&seed.to_be_bytes());
    let kp = csev::KeyPair::from_seed(&s);
    Ok(run_bench(
        params,
        &kp,
        &BenchConfig {
            mode,
            events: n,
            threads,
            payload_bytes,
            seed,
        },
    )?)
}

pub(crate) fn refuse_overwrite(path: &Path, force: bool) -> Result<(), CliError> {
    if path.exists() && !force {
        return Err(CliError::Config(format!(
            "{} already exists (pass --force to overwrite)",
            path.display()
        )));
    }
    Ok(())
}
