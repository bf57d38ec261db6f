//! `flatcg`: build, run, compare and query call graphs.
//!
//! Exit codes: 0 success (for `reach`: no target reachable), 1 a target is
//! reachable, 2 unreadable or malformed input, 3 unknown entry point or
//! target.

use std::collections::BTreeSet;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::{info, warn};
use thiserror::Error;

use flatcg::analysis::{resolve_entries, run_analysis, AnalysisError, AnalysisOptions};
use flatcg::callgraph::{compare, reachable, CallGraph};
use flatcg::frontend::{ast, lower, parse_ast};
use flatcg::ir::{json, Program, TypeId, TypeKind};
use flatcg::oracle::{interpret, DEFAULT_STEP_BUDGET};
use flatcg::scfg::{build_scfg, validate_scfg};
use flatcg::DiagnosticKind;

#[derive(Parser)]
#[command(
    name = "flatcg",
    version,
    about = "Flow-insensitive call graphs for a Python subset"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the static call graph.
    Analyze {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        #[command(flatten)]
        analysis: AnalysisArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Print the final type mapping of every variable.
    Types {
        file: PathBuf,
        #[command(flatten)]
        analysis: AnalysisArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Run the reference interpreter and record the dynamic call graph.
    Interpret {
        file: PathBuf,
        /// Entry point (repeatable); defaults to `main` and `test*` functions.
        #[arg(long = "entry", value_name = "NAME")]
        entries: Vec<String>,
        /// Step budget per entry point.
        #[arg(long, default_value_t = DEFAULT_STEP_BUDGET)]
        budget: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Compare a static call graph against a dynamic one.
    Compare {
        static_graph: PathBuf,
        dynamic_graph: PathBuf,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Report call paths from the entry points to the target methods.
    Reach {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        /// Target method, e.g. `Banana:eat` (repeatable).
        #[arg(long = "target", value_name = "NAME", required = true)]
        targets: Vec<String>,
        #[command(flatten)]
        analysis: AnalysisArgs,
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// Print the lowered program as JSON-AST.
    Lower {
        file: PathBuf,
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// Print the cyclic flow graph of each method as DOT.
    Scfg {
        file: PathBuf,
        /// Only this method.
        #[arg(long, value_name = "NAME")]
        method: Option<String>,
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct AnalysisArgs {
    /// Entry point (repeatable); defaults to `main` and `test*` functions.
    #[arg(long = "entry", value_name = "NAME")]
    entries: Vec<String>,
    /// Longest concatenation of string literals tried for `getattr`.
    #[arg(long, value_name = "K", default_value_t = 2)]
    reflect_depth: usize,
    /// Literal values kept per type and variable before widening.
    #[arg(long, value_name = "L", default_value_t = 32)]
    literal_limit: usize,
}

impl AnalysisArgs {
    fn options(&self) -> AnalysisOptions {
        AnalysisOptions {
            reflect_depth: self.reflect_depth,
            literal_limit: self.literal_limit,
            step_limit: None,
        }
    }
}

#[derive(Args)]
struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write to this file instead of standard output.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Dot,
    Table,
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}:{detail}")]
    Parse { path: String, detail: String },
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    NotFound(String),
    #[error("{0} output is not available for this command")]
    Format(&'static str),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Io { .. }
            | CliError::Parse { .. }
            | CliError::Input(_)
            | CliError::Format(_) => 2,
            CliError::NotFound(_) => 3,
        }
    }
}

impl From<AnalysisError> for CliError {
    fn from(e: AnalysisError) -> Self {
        match e {
            AnalysisError::EntryNotFound(_) | AnalysisError::NoEntryPoints => {
                CliError::NotFound(e.to_string())
            }
            AnalysisError::BudgetExceeded(_) => CliError::Input(e.to_string()),
        }
    }
}

struct Loaded {
    path: String,
    program: Program,
    /// Structured source, absent for JSON-AST input.
    ast: Option<ast::Module>,
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Source files are parsed; `.json` files are read as JSON-AST.
fn load(path: &Path) -> Result<Loaded, CliError> {
    let text = read(path)?;
    let name = path.display().to_string();
    if path.extension().is_some_and(|e| e == "json") {
        let program = json::from_json(&text).map_err(|e| CliError::Parse {
            path: name.clone(),
            detail: format!(" {e}"),
        })?;
        return Ok(Loaded {
            path: name,
            program,
            ast: None,
        });
    }
    let parse_err = |e: flatcg::ParseError| CliError::Parse {
        path: name.clone(),
        detail: e.to_string(),
    };
    let module = parse_ast(&text).map_err(parse_err)?;
    let program = lower(&module).map_err(parse_err)?;
    Ok(Loaded {
        path: name,
        program,
        ast: Some(module),
    })
}

/// Entry methods of each file. Named entries need only exist in one file;
/// without names every file contributes its declared entry points.
fn entries_per_file(files: &[Loaded], names: &[String]) -> Result<Vec<Vec<TypeId>>, CliError> {
    if names.is_empty() {
        let per: Vec<Vec<TypeId>> = files
            .iter()
            .map(|f| f.program.entry_points().to_vec())
            .collect();
        if per.iter().all(Vec::is_empty) {
            return Err(AnalysisError::NoEntryPoints.into());
        }
        return Ok(per);
    }
    let mut found = BTreeSet::new();
    let per = files
        .iter()
        .map(|f| {
            names
                .iter()
                .filter_map(|n| {
                    let m = resolve_entries(&f.program, std::slice::from_ref(n)).ok()?;
                    found.insert(n.clone());
                    Some(m[0])
                })
                .collect()
        })
        .collect();
    match names.iter().find(|n| !found.contains(*n)) {
        Some(missing) => Err(AnalysisError::EntryNotFound(missing.clone()).into()),
        None => Ok(per),
    }
}

/// Analyzes every file from its entries, logging diagnostics, and merges
/// the graphs.
fn static_graph(files: &[Loaded], args: &AnalysisArgs) -> Result<CallGraph, CliError> {
    let mut graph = CallGraph::new();
    for (f, entries) in files.iter().zip(entries_per_file(files, &args.entries)?) {
        if entries.is_empty() {
            continue;
        }
        let r = run_analysis(&f.program, &entries, args.options())?;
        for d in r.diagnostics.iter() {
            let at = d
                .line
                .map(|l| format!("{}:{l}", f.path))
                .unwrap_or_else(|| f.path.clone());
            let msg = format!("{at}: {}: {}", d.kind.as_str(), d.detail);
            match d.kind {
                DiagnosticKind::LiteralWidened => info!("{msg}"),
                _ => warn!("{msg}"),
            }
        }
        graph.merge(&r.graph);
    }
    Ok(graph)
}

fn render_graph(g: &CallGraph, format: Format) -> String {
    match format {
        Format::Json => g.to_json(),
        Format::Dot => g.to_dot(),
        Format::Table => g.to_table(),
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, text).map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        }),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|source| CliError::Io {
                    path: "<stdout>".into(),
                    source,
                })
        }
    }
}

fn load_all(files: &[PathBuf]) -> Result<Vec<Loaded>, CliError> {
    files.iter().map(|p| load(p)).collect()
}

fn method_named(p: &Program, name: &str) -> Option<TypeId> {
    p.method_named(name)
        .filter(|&m| p.kind(m) == TypeKind::Method)
}

fn run(cli: Cli) -> Result<u8, CliError> {
    match cli.command {
        Command::Analyze {
            files,
            analysis,
            output,
        } => {
            let files = load_all(&files)?;
            let graph = static_graph(&files, &analysis)?;
            emit(output.out.as_deref(), &render_graph(&graph, output.format))?;
            Ok(0)
        }
        Command::Types {
            file,
            analysis,
            output,
        } => {
            let f = load(&file)?;
            let entries = resolve_entries(&f.program, &analysis.entries)?;
            let r = run_analysis(&f.program, &entries, analysis.options())?;
            let text = match output.format {
                Format::Table => r.env.display(&f.program).to_string(),
                Format::Json => {
                    let rows: Vec<_> = r
                        .env
                        .rows(&f.program)
                        .into_iter()
                        .map(|(scope, name, types)| serde_json::json!({ "scope": scope, "name": name, "types": types }))
                        .collect();
                    let mut s = serde_json::to_string_pretty(&rows).expect("rows serialize");
                    s.push('\n');
                    s
                }
                Format::Dot => return Err(CliError::Format("dot")),
            };
            emit(output.out.as_deref(), &text)?;
            Ok(0)
        }
        Command::Interpret {
            file,
            entries,
            budget,
            output,
        } => {
            let f = load(&file)?;
            let Some(module) = &f.ast else {
                return Err(CliError::Input(format!(
                    "{}: the interpreter needs source, not JSON-AST",
                    f.path
                )));
            };
            let entries = resolve_entries(&f.program, &entries)?;
            let mut graph = CallGraph::new();
            for e in entries {
                let run = interpret(&f.program, module, e, budget);
                eprintln!(
                    "{}: {} ({} steps)",
                    f.program.qualified_name(e),
                    run.outcome,
                    run.calls.steps_executed
                );
                graph.merge(&run.calls.graph);
            }
            emit(output.out.as_deref(), &render_graph(&graph, output.format))?;
            Ok(0)
        }
        Command::Compare {
            static_graph,
            dynamic_graph,
            output,
        } => {
            let parse = |path: &Path| -> Result<CallGraph, CliError> {
                CallGraph::from_json(&read(path)?).map_err(|e| CliError::Parse {
                    path: path.display().to_string(),
                    detail: format!(" {e}"),
                })
            };
            let report = compare(&parse(&static_graph)?, &parse(&dynamic_graph)?);
            let text = match output.format {
                Format::Json => report.to_json(),
                Format::Table => report.to_table(),
                Format::Dot => return Err(CliError::Format("dot")),
            };
            emit(output.out.as_deref(), &text)?;
            Ok(0)
        }
        Command::Reach {
            files,
            targets,
            analysis,
            out,
        } => {
            let files = load_all(&files)?;
            for t in &targets {
                if !files.iter().any(|f| method_named(&f.program, t).is_some()) {
                    return Err(CliError::NotFound(format!("target `{t}` not found")));
                }
            }
            let graph = static_graph(&files, &analysis)?;
            let sources: BTreeSet<String> = files
                .iter()
                .zip(entries_per_file(&files, &analysis.entries)?)
                .flat_map(|(f, es)| {
                    es.into_iter()
                        .map(|e| f.program.qualified_name(e).to_string())
                })
                .collect();
            let mut text = String::new();
            let mut found = false;
            for t in &targets {
                match reachable(&graph, &sources, &BTreeSet::from([t.clone()])) {
                    Some(path) => {
                        found = true;
                        if !text.is_empty() {
                            text.push('\n');
                        }
                        for m in path.iter().rev() {
                            text.push_str(m);
                            text.push('\n');
                        }
                    }
                    None => text.push_str(&format!("not reachable: {t}\n")),
                }
            }
            emit(out.as_deref(), &text)?;
            Ok(if found { 1 } else { 0 })
        }
        Command::Lower { file, out } => {
            let f = load(&file)?;
            emit(out.as_deref(), &json::to_json(&f.program))?;
            Ok(0)
        }
        Command::Scfg { file, method, out } => {
            let f = load(&file)?;
            let p = &f.program;
            let methods: Vec<TypeId> = match &method {
                Some(name) => vec![method_named(p, name)
                    .filter(|&m| p.method(m).is_some())
                    .ok_or_else(|| CliError::NotFound(format!("method `{name}` not found")))?],
                None => p.methods().map(|(m, _)| m).collect(),
            };
            let mut text = String::new();
            for m in methods {
                let g = build_scfg(&p.method(m).expect("method with a body").body, m);
                for v in validate_scfg(&g) {
                    warn!("{}: {v}", p.qualified_name(m));
                }
                text.push_str(&g.to_dot(p));
            }
            emit(out.as_deref(), &text)?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("NOCFG_LOG", "warn"))
        .format(|buf, rec| {
            writeln!(
                buf,
                "{}: {}",
                rec.level().as_str().to_lowercase(),
                rec.args()
            )
        })
        .init();
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
