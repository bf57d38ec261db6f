//! Cross-checks of analysis results: against the reference interpreter,
//! under statement permutation, and for monotone growth.

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::analysis::{
    run_analysis, AnalysisError, AnalysisOptions, AnalysisResult, ContextId, Observer, Position,
    TypeEnv,
};
use crate::frontend::ast;
use crate::ir::{Program, TypeId};
use crate::oracle::{interpret, Outcome};

#[derive(Debug)]
pub struct SoundnessReport {
    pub outcome: Outcome,
    pub dynamic_edges: usize,
    pub observations: usize,
    /// Edges the interpreter took that the analysis missed.
    pub missing_edges: Vec<(String, String)>,
    /// `(scope, variable, type)` observed at run time but absent from the
    /// final environment.
    pub uncovered: Vec<(String, String, String)>,
}

impl SoundnessReport {
    pub fn is_sound(&self) -> bool {
        self.missing_edges.is_empty() && self.uncovered.is_empty()
    }
}

/// Runs the interpreter and the analysis from `entry` and compares them.
/// Runtime types are compared by type; string payloads built by
/// concatenation are not tracked by the analysis.
pub fn check_soundness(
    program: &Program,
    module: &ast::Module,
    entry: TypeId,
    options: AnalysisOptions,
    budget: u64,
) -> Result<SoundnessReport, AnalysisError> {
    let run = interpret(program, module, entry, budget);
    let result = run_analysis(program, &[entry], options)?;
    let missing_edges = run
        .calls
        .graph
        .edge_set()
        .into_iter()
        .filter(|(a, b)| !result.graph.has_edge(a, b))
        .collect();
    let uncovered = run
        .observations
        .iter()
        .filter(|(v, ty)| {
            !result
                .env
                .get(v)
                .is_some_and(|set| set.iter().any(|tv| tv.ty == *ty))
        })
        .map(|(v, ty)| {
            (
                program.qualified_name(v.scope).to_string(),
                v.name.to_string(),
                program.qualified_name(*ty).to_string(),
            )
        })
        .collect();
    Ok(SoundnessReport {
        outcome: run.outcome,
        dynamic_edges: run.calls.graph.edge_count(),
        observations: run.observations.len(),
        missing_edges,
        uncovered,
    })
}

/// `program` with the statements of every method body shuffled.
pub fn permuted<R: Rng>(program: &Program, rng: &mut R) -> Program {
    let mut p = program.clone();
    let methods: Vec<TypeId> = program.methods().map(|(m, _)| m).collect();
    for m in methods {
        let mut body = p.method(m).expect("listed method").body.clone();
        body.shuffle(rng);
        p = p.with_body(m, body);
    }
    p
}

/// Final environment and edge set, the parts that must not depend on
/// statement order.
pub fn fingerprint(r: &AnalysisResult) -> (TypeEnv, Vec<(String, String)>) {
    (r.env.clone(), r.graph.edge_set().into_iter().collect())
}

/// Observer that records every growth and flags any that loses
/// information.
#[derive(Debug, Default)]
pub struct GrowthLog {
    pub partial_updates: HashMap<(ContextId, Position), usize>,
    pub summary_updates: HashMap<ContextId, usize>,
    pub shrinks: Vec<String>,
}

impl Observer for GrowthLog {
    fn partial_state(
        &mut self,
        ctx: ContextId,
        pos: Position,
        old: Option<&TypeEnv>,
        new: &TypeEnv,
    ) {
        *self.partial_updates.entry((ctx, pos)).or_default() += 1;
        if let Some(old) = old {
            if !old.covered_by(new) {
                self.shrinks
                    .push(format!("partial state ({ctx}, {pos}) lost bindings"));
            }
        }
    }

    fn summary(&mut self, ctx: ContextId, old: Option<&TypeEnv>, new: &TypeEnv) {
        *self.summary_updates.entry(ctx).or_default() += 1;
        if let Some(old) = old {
            if !old.covered_by(new) {
                self.shrinks.push(format!("summary {ctx} lost bindings"));
            }
        }
    }
}

impl GrowthLog {
    /// Largest number of updates to any single state.
    pub fn max_updates(&self) -> usize {
        self.partial_updates
            .values()
            .chain(self.summary_updates.values())
            .copied()
            .max()
            .unwrap_or(0)
    }
}

/// Height bound of the environment lattice: every variable can gain each
/// bare type and up to `limit` literals of it once.
pub fn lattice_bound(program: &Program, env: &TypeEnv, limit: usize) -> usize {
    let types = program.types().count();
    (env.len().max(1)) * types * (limit + 1)
}
