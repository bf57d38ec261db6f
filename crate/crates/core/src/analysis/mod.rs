//! Control-flow-insensitive type propagation over the flat IR. Each method
//! body is analyzed once per distinct input environment; the call graph
//! falls out of the calls resolved along the way.

mod engine;
pub mod env;
pub mod eval;

use std::collections::BTreeSet;

use serde::Serialize;
use thiserror::Error;

use crate::ir::{NodeId, Program, TypeId};

pub use engine::{
    reapply_transfers, replay_summary, run_seeded, AnalysisResult, AnalysisTables, ContextId,
    ContextKey, NoObserver, Observer, Position,
};
pub use env::{TypeEnv, TypeSet, DEFAULT_LITERAL_LIMIT};
pub use eval::{item_of, CallHandler, CallOutcome, Evaluator, Transfer};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AnalysisOptions {
    /// Longest string concatenation tried when resolving `getattr`.
    pub reflect_depth: usize,
    /// Distinct literals kept per type and variable before widening.
    pub literal_limit: usize,
    /// Abort after this many worklist steps.
    pub step_limit: Option<u64>,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        AnalysisOptions {
            reflect_depth: 2,
            literal_limit: DEFAULT_LITERAL_LIMIT,
            step_limit: None,
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AnalysisError {
    #[error("entry point `{0}` not found")]
    EntryNotFound(String),
    #[error("no entry points")]
    NoEntryPoints,
    #[error("analysis exceeded {0} steps")]
    BudgetExceeded(u64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DiagnosticKind {
    UnresolvedCall,
    ArityMismatch,
    LiteralWidened,
}

impl DiagnosticKind {
    pub fn as_str(self) -> &'static str {
        match self {
            DiagnosticKind::UnresolvedCall => "unresolved_call",
            DiagnosticKind::ArityMismatch => "arity_mismatch",
            DiagnosticKind::LiteralWidened => "literal_widened",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Diagnostic {
    pub kind: DiagnosticKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub node: Option<NodeId>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub line: Option<u32>,
    pub detail: String,
}

/// Deduplicated, ordered diagnostics of a run.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Diagnostics(BTreeSet<Diagnostic>);

impl Diagnostics {
    pub fn push(&mut self, d: Diagnostic) {
        self.0.insert(d);
    }

    pub fn iter(&self) -> impl Iterator<Item = &Diagnostic> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn count(&self, kind: DiagnosticKind) -> usize {
        self.0.iter().filter(|d| d.kind == kind).count()
    }

    /// One JSON object per line.
    pub fn to_json_lines(&self) -> String {
        let mut out = String::new();
        for d in &self.0 {
            out.push_str(&serde_json::to_string(d).expect("diagnostics serialize"));
            out.push('\n');
        }
        out
    }
}

/// Analyzes `program` from `entries`.
pub fn run_analysis(
    program: &Program,
    entries: &[TypeId],
    options: AnalysisOptions,
) -> Result<AnalysisResult, AnalysisError> {
    engine::run(program, entries, options, &mut NoObserver)
}

/// Like [`run_analysis`], reporting every state growth to `observer`.
pub fn run_analysis_observed(
    program: &Program,
    entries: &[TypeId],
    options: AnalysisOptions,
    observer: &mut dyn Observer,
) -> Result<AnalysisResult, AnalysisError> {
    engine::run(program, entries, options, observer)
}

/// Resolves entry names to methods. An empty list selects the program's
/// declared entry points.
pub fn resolve_entries(program: &Program, names: &[String]) -> Result<Vec<TypeId>, AnalysisError> {
    if names.is_empty() {
        let v = program.entry_points().to_vec();
        return if v.is_empty() {
            Err(AnalysisError::NoEntryPoints)
        } else {
            Ok(v)
        };
    }
    names
        .iter()
        .map(|n| {
            program
                .method_named(n)
                .filter(|&m| program.method(m).is_some())
                .ok_or_else(|| AnalysisError::EntryNotFound(n.clone()))
        })
        .collect()
}
