//! Flow-insensitive call graph construction for a small Python-like
//! language. Method bodies are flattened into cyclic statement lists, types
//! are propagated with a context-sensitive worklist, and a reference
//! interpreter provides ground truth for testing.

pub mod analysis;
pub mod callgraph;
pub mod check;
pub mod frontend;
pub mod ir;
pub mod oracle;
pub mod scfg;
pub mod synth;

pub use analysis::{
    resolve_entries, run_analysis, AnalysisError, AnalysisOptions, AnalysisResult, Diagnostic,
    DiagnosticKind, Diagnostics, TypeEnv,
};
pub use callgraph::{compare, reachable, CallGraph, CallGraphError, ComparisonReport};
pub use frontend::{parse, parse_str, ParseError, SourceModule};
pub use ir::{Program, TypeId, TypeValue, Variable};
pub use oracle::{interpret, DynamicCallGraph, Outcome};
