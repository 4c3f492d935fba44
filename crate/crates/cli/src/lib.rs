//! The `gkmkit` command line: argument handling, graph loading and exit
//! codes. Each subcommand builds a [`Doc`], rendered as text or in the
//! structured format.
//!
//! Exit codes: 0 success, 1 validation failure, 2 I/O or parse error,
//! 3 a hypothesis of the requested operation fails.

mod commands;
pub mod doc;

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use gkmkit::catalog::{parse_graph_components, FormatError};
use gkmkit::graph::{find_connection, GkmGraph, DEFAULT_MAX_VERTICES};

pub use doc::{parse_structured, Doc, STRUCTURED_VERSION};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_IO: i32 = 2;
pub const EXIT_HYPOTHESIS: i32 = 3;

pub const MAX_VERTICES_VAR: &str = "GKMKIT_MAX_VERTICES";

#[derive(Parser, Debug)]
#[command(name = "gkmkit", version, about = "Exact-arithmetic analysis of GKM graphs")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Structured,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Coeff {
    Z,
    Q,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check labels and connection axioms.
    Validate { input: PathBuf },
    /// Valence, rank, independence, effectiveness and covalence-one faces.
    Info { input: PathBuf },
    /// Connection paths, monodromy and the tree decomposition.
    Paths { input: PathBuf },
    /// Extend the labeling to an effective torus-graph labeling.
    Extend {
        input: PathBuf,
        /// Where to write the extended graph.
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Equivariant and ordinary cohomology ranks.
    Cohomology {
        input: PathBuf,
        /// Highest polynomial degree (default: valence + 1).
        #[arg(long)]
        max_degree: Option<usize>,
        #[arg(long, value_enum, default_value_t = Coeff::Z)]
        coeff: Coeff,
    },
    /// Sufficient condition for orientability.
    Orientable { input: PathBuf },
    /// Everything above in one document (extension is not written out).
    Report {
        input: PathBuf,
        #[arg(long)]
        max_degree: Option<usize>,
        #[arg(long, value_enum, default_value_t = Coeff::Z)]
        coeff: Coeff,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Validate { .. } => "validate",
            Command::Info { .. } => "info",
            Command::Paths { .. } => "paths",
            Command::Extend { .. } => "extend",
            Command::Cohomology { .. } => "cohomology",
            Command::Orientable { .. } => "orientable",
            Command::Report { .. } => "report",
        }
    }

    fn input(&self) -> &Path {
        match self {
            Command::Validate { input }
            | Command::Info { input }
            | Command::Paths { input }
            | Command::Extend { input, .. }
            | Command::Cohomology { input, .. }
            | Command::Orientable { input }
            | Command::Report { input, .. } => input,
        }
    }
}

/// Settings taken from the environment.
#[derive(Clone, Debug, Default)]
pub struct Env {
    pub max_vertices: Option<String>,
}

impl Env {
    pub fn from_process() -> Self {
        Env {
            max_vertices: std::env::var(MAX_VERTICES_VAR).ok(),
        }
    }
}

/// Where the connection of a loaded component came from.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub(crate) enum ConnectionSource {
    File,
    /// Not in the file; found by search and reported, never written back
    /// to the input.
    Found,
    Missing,
}

impl ConnectionSource {
    fn as_str(self) -> &'static str {
        match self {
            ConnectionSource::File => "file",
            ConnectionSource::Found => "found",
            ConnectionSource::Missing => "none",
        }
    }
}

pub(crate) struct Component {
    pub graph: GkmGraph,
    pub source: ConnectionSource,
}

enum LoadError {
    Io(String),
    Parse(String),
    Invariant { rule: &'static str, location: String },
}

fn load(path: &Path) -> Result<Vec<Component>, LoadError> {
    let text = std::fs::read_to_string(path).map_err(|e| LoadError::Io(format!("{}: {e}", path.display())))?;
    let graphs = parse_graph_components(&text).map_err(|e| match e {
        FormatError::Parse { .. } => LoadError::Parse(e.to_string()),
        FormatError::InvariantViolation { rule, location } => LoadError::Invariant { rule, location },
    })?;
    Ok(graphs
        .into_iter()
        .map(|g| {
            if g.connection().is_some() {
                return Component {
                    graph: g,
                    source: ConnectionSource::File,
                };
            }
            match find_connection(&g) {
                Some(c) => Component {
                    graph: g.with_connection(Some(c)),
                    source: ConnectionSource::Found,
                },
                None => Component {
                    graph: g,
                    source: ConnectionSource::Missing,
                },
            }
        })
        .collect())
}

/// Runs the command line `args` (including the program name) with settings
/// from the process environment.
pub fn run(args: &[String], out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    run_with(args, &Env::from_process(), out, err)
}

pub fn run_with(args: &[String], env: &Env, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{text}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{text}");
                    EXIT_IO
                }
            };
        }
    };
    let mut doc = Doc::new();
    doc.put("command", cli.command.name());
    let code = execute(&cli.command, env, &mut doc, err);
    doc.put("exit", code);
    let rendered = match cli.format {
        Format::Text => doc.render_text(),
        Format::Structured => doc.render_structured(),
    };
    if out.write_all(rendered.as_bytes()).is_err() {
        return EXIT_IO;
    }
    code
}

fn execute(cmd: &Command, env: &Env, doc: &mut Doc, err: &mut dyn Write) -> i32 {
    let max_vertices = match &env.max_vertices {
        None => DEFAULT_MAX_VERTICES,
        Some(s) => match s.trim().parse::<usize>() {
            Ok(v) => v,
            Err(_) => {
                let msg = format!("{MAX_VERTICES_VAR} must be a non-negative integer, got {s:?}");
                let _ = writeln!(err, "error: {msg}");
                doc.put("error", msg);
                return EXIT_IO;
            }
        },
    };
    let components = match load(cmd.input()) {
        Ok(c) => c,
        Err(LoadError::Io(msg)) | Err(LoadError::Parse(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            doc.put("error", msg);
            return EXIT_IO;
        }
        Err(LoadError::Invariant { rule, location }) => {
            let _ = writeln!(err, "invalid graph: invariant `{rule}` violated at {location}");
            doc.put("valid", false);
            doc.put("findings", 1);
            doc.put("finding.0.severity", "error");
            doc.put("finding.0.rule", rule);
            doc.put("finding.0.location", location);
            doc.put("finding.0.message", format!("load-time invariant `{rule}` violated"));
            return EXIT_INVALID;
        }
    };
    if let Command::Extend { output, .. } = cmd {
        if components.len() != 1 {
            let msg = format!(
                "extension needs a connected graph; the input has {} components",
                components.len()
            );
            let _ = writeln!(err, "hypothesis failed: {msg}");
            doc.put("error", msg);
            return EXIT_HYPOTHESIS;
        }
        let mut section = Doc::new();
        let code = commands::extend(&components[0], output, max_vertices, &mut section, err);
        doc.extend(section);
        return code;
    }
    let multi = components.len() > 1;
    if multi {
        doc.put("components", components.len());
    }
    let mut code = EXIT_OK;
    for (i, comp) in components.iter().enumerate() {
        let mut section = Doc::new();
        let c = match cmd {
            Command::Validate { .. } => commands::validate(comp, &mut section),
            Command::Info { .. } => commands::info(comp, &mut section),
            Command::Paths { .. } => commands::paths(comp, &mut section),
            Command::Cohomology { max_degree, coeff, .. } => {
                commands::cohomology(comp, *max_degree, *coeff, &mut section)
            }
            Command::Orientable { .. } => commands::orientable(comp, &mut section),
            Command::Report { max_degree, coeff, .. } => commands::report(comp, *max_degree, *coeff, &mut section),
            Command::Extend { .. } => unreachable!("handled above"),
        };
        code = code.max(c);
        if multi {
            doc.nest(&format!("component.{i}"), section);
        } else {
            doc.extend(section);
        }
    }
    if code == EXIT_INVALID {
        let _ = writeln!(err, "invalid graph: see findings");
    }
    code
}
