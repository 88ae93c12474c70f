//! Command line front end. Machine-readable output goes to stdout, prose and
//! warnings to stderr.
//!
//! Exit codes: 0 success, 1 validation or integrity errors, 2 usage or I/O
//! errors (including unknown ids).

use std::ffi::OsString;
use std::io::Write;
use std::net::IpAddr;
use std::num::NonZeroU32;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::api::{self, ServeConfig};
use crate::corpus;
use crate::graph::{self, ExportFormat, ValidationScope};
use crate::model::{LanguageId, PatternId, ViewId};
use crate::store::{import_bundle, Bundle, ImportMode, Store, StoreError};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExitStatus {
    Success,
    ValidationFailed,
    UsageError,
}

impl ExitStatus {
    pub fn code(self) -> u8 {
        match self {
            ExitStatus::Success => 0,
            ExitStatus::ValidationFailed => 1,
            ExitStatus::UsageError => 2,
        }
    }
}

impl From<ExitStatus> for std::process::ExitCode {
    fn from(status: ExitStatus) -> Self {
        std::process::ExitCode::from(status.code())
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "pattern-views",
    version,
    about = "Pattern language repository with pattern views"
)]
struct Cli {
    /// Repository state file.
    #[arg(long, env = "PA_DB", global = true, default_value = "pattern-repository.json")]
    db_path: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Load a bundle into an empty repository.
    Import {
        bundle: PathBuf,
        /// Drop invalid items and report them instead of failing.
        #[arg(long)]
        lenient: bool,
    },
    /// Write the repository as a bundle (`-` for stdout).
    Export { path: PathBuf },
    /// Print diagnostics; exits 1 if any has error severity.
    Validate {
        #[arg(long, conflicts_with = "language")]
        view: Option<String>,
        #[arg(long)]
        language: Vec<String>,
    },
    /// Render a view graph to stdout.
    Render {
        #[arg(long)]
        view: String,
        /// dot, graphml or json.
        #[arg(long, default_value = "dot")]
        format: String,
        /// Include a layout computed with this seed.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, requires = "seed")]
        iterations: Option<NonZeroU32>,
    },
    /// Run the HTTP service.
    Serve {
        #[arg(long, env = "PA_PORT", default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        bind: IpAddr,
        /// Bundle to load when the repository is empty.
        #[arg(long)]
        corpus: Option<PathBuf>,
        /// Keep state in memory instead of the state file.
        #[arg(long)]
        in_memory: bool,
        /// Require `Authorization: Bearer <token>`.
        #[arg(long, env = "PA_AUTH_TOKEN", hide_env_values = true)]
        auth_token: Option<String>,
    },
    /// Built-in seed corpus.
    Corpus {
        #[command(subcommand)]
        action: CorpusCommand,
    },
    /// Delete a pattern and its relations. `--force` also removes it from views.
    DeletePattern {
        id: String,
        #[arg(long)]
        force: bool,
    },
}

#[derive(Subcommand, Debug)]
enum CorpusCommand {
    /// Install the seed corpus into the repository.
    Seed {
        /// Discard the current repository contents first.
        #[arg(long)]
        replace: bool,
    },
    /// Print the seed bundle.
    Bundle,
    /// Print the seed corpus manifest.
    Manifest,
}

struct Failure {
    status: ExitStatus,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            status: ExitStatus::UsageError,
            message: message.into(),
        }
    }
}

impl From<StoreError> for Failure {
    fn from(e: StoreError) -> Self {
        let status = match &e {
            StoreError::IntegrityViolation { .. } | StoreError::SchemaViolation { .. } => ExitStatus::ValidationFailed,
            StoreError::Model(m) if !matches!(m.code(), "UnknownEntity" | "UnknownLanguage") => {
                ExitStatus::ValidationFailed
            }
            _ => ExitStatus::UsageError,
        };
        Self {
            status,
            message: format!("{}: {e}", e.code()),
        }
    }
}

impl From<graph::GraphError> for Failure {
    fn from(e: graph::GraphError) -> Self {
        Self::usage(format!("{}: {e}", e.code()))
    }
}

fn io_failure(path: &Path, e: std::io::Error) -> Failure {
    Failure::usage(format!("{}: {e}", path.display()))
}

/// Parses `argv` (including the program name) and runs the command.
pub fn run<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> ExitStatus
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let informational = matches!(
                e.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            );
            let rendered = e.render().to_string();
            if informational {
                let _ = write!(stdout, "{rendered}");
                return ExitStatus::Success;
            }
            let _ = write!(stderr, "{rendered}");
            return ExitStatus::UsageError;
        }
    };
    match execute(cli, stdout, stderr) {
        Ok(status) => status,
        Err(failure) => {
            let _ = writeln!(stderr, "error: {}", failure.message);
            failure.status
        }
    }
}

fn write_out(stdout: &mut dyn Write, bytes: &[u8]) -> Result<(), Failure> {
    stdout
        .write_all(bytes)
        .map_err(|e| Failure::usage(format!("stdout: {e}")))
}

fn execute(cli: Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<ExitStatus, Failure> {
    let open = || Store::open(&cli.db_path).map_err(Failure::from);
    match cli.command {
        Command::Import { bundle, lenient } => {
            let bytes = std::fs::read(&bundle).map_err(|e| io_failure(&bundle, e))?;
            let mode = if lenient {
                ImportMode::Lenient
            } else {
                ImportMode::Strict
            };
            let report = open()?.import(&Bundle::from_json(&bytes)?, mode)?;
            for warning in &report.warnings {
                let _ = writeln!(
                    stderr,
                    "warning\t{}\t{}\t{}",
                    warning.code, warning.subject, warning.message
                );
            }
            write_out(stdout, &crate::canonical::to_vec(&report).expect("reports serialize"))?;
        }
        Command::Export { path } => {
            let bytes = open()?.export().to_canonical_json();
            if path.as_os_str() == "-" {
                write_out(stdout, &bytes)?;
            } else {
                std::fs::write(&path, bytes).map_err(|e| io_failure(&path, e))?;
            }
        }
        Command::Validate { view, language } => {
            let scope = match (view, language.is_empty()) {
                (Some(view), _) => ValidationScope::View(ViewId::new(view)),
                (None, false) => ValidationScope::Languages(language.into_iter().map(LanguageId::new).collect()),
                (None, true) => ValidationScope::Repository,
            };
            let diagnostics = graph::validate(&open()?.snapshot(), &scope)?;
            let mut text = String::new();
            for diagnostic in &diagnostics {
                text.push_str(&diagnostic.to_string());
                text.push('\n');
            }
            write_out(stdout, text.as_bytes())?;
            if diagnostics.iter().any(|d| d.is_error()) {
                return Ok(ExitStatus::ValidationFailed);
            }
        }
        Command::Render {
            view,
            format,
            seed,
            iterations,
        } => {
            let format: ExportFormat = format.parse()?;
            let repo = open()?.snapshot();
            let graph = graph::build_view_graph(&repo, &ViewId::new(view))?;
            let layout = seed.map(|seed| graph::layout(&graph, seed, iterations.unwrap_or(graph::DEFAULT_ITERATIONS)));
            write_out(stdout, &graph::export_graph(&graph, format, layout.as_ref()))?;
        }
        Command::Serve {
            port,
            bind,
            corpus,
            in_memory,
            auth_token,
        } => {
            let config = ServeConfig {
                bind,
                port,
                db_path: (!in_memory).then(|| cli.db_path.clone()),
                corpus,
                auth_token,
            };
            let runtime = tokio::runtime::Runtime::new().map_err(|e| Failure::usage(e.to_string()))?;
            runtime
                .block_on(api::serve(config))
                .map_err(|e| Failure::usage(e.to_string()))?;
        }
        Command::Corpus {
            action: CorpusCommand::Seed { replace },
        } => {
            let store = open()?;
            let report = store.transact(|repo| {
                if !repo.is_empty() && !replace {
                    return Err(StoreError::NonEmptyStore);
                }
                let (seeded, report) = import_bundle(&corpus::seed_bundle(), ImportMode::Strict)?;
                *repo = seeded;
                Ok(report)
            })?;
            let _ = writeln!(
                stderr,
                "seeded {} languages, {} patterns, {} views into {}",
                report.imported.languages,
                report.imported.patterns,
                report.imported.views,
                cli.db_path.display()
            );
        }
        Command::Corpus {
            action: CorpusCommand::Bundle,
        } => {
            write_out(stdout, corpus::SEED_BUNDLE_JSON.as_bytes())?;
        }
        Command::Corpus {
            action: CorpusCommand::Manifest,
        } => {
            let manifest = corpus::CorpusManifest::of(&corpus::seed_repository());
            write_out(
                stdout,
                &crate::canonical::to_vec(&manifest).expect("manifests serialize"),
            )?;
        }
        Command::DeletePattern { id, force } => {
            let pattern = PatternId::new(id);
            let deletion = open()?.transact(|repo| repo.delete_pattern(&pattern, force))?;
            let mut text = String::new();
            for relation in &deletion.removed_relations {
                text.push_str(&format!("removed-relation\t{relation}\n"));
            }
            for view in &deletion.updated_views {
                text.push_str(&format!("updated-view\t{view}\n"));
            }
            write_out(stdout, text.as_bytes())?;
        }
    }
    Ok(ExitStatus::Success)
}
