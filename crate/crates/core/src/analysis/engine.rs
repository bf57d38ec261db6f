use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet, VecDeque};

use super::env::TypeEnv;
use super::eval::{CallHandler, CallOutcome, Evaluator, Transfer};
use super::{AnalysisError, AnalysisOptions, Diagnostic, DiagnosticKind, Diagnostics};
use crate::callgraph::{CallGraph, Site};
use crate::ir::{NodeId, Program, StatementNode, TypeId, Variable};
use crate::scfg::{build_scfg, Scfg};

/// A method together with the environment it was entered with.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ContextKey {
    pub method: TypeId,
    pub input: TypeEnv,
}

pub type ContextId = usize;

/// Position within a method's graph: 0 is entry, `1..=n` the statements in
/// order, `n + 1` exit.
pub type Position = usize;

/// Worklist state of a run. Kept after the run for inspection.
#[derive(Clone, Debug, Default)]
pub struct AnalysisTables {
    pub contexts: Vec<ContextKey>,
    index: HashMap<ContextKey, ContextId>,
    pub partial_state: HashMap<(ContextId, Position), TypeEnv>,
    pub summary: HashMap<ContextId, TypeEnv>,
    /// Call nodes to resume when a context's summary grows.
    pub return_sites: HashMap<ContextId, BTreeSet<(ContextId, Position)>>,
    worklist: VecDeque<(ContextId, Position)>,
    queued: HashSet<(ContextId, Position)>,
    pub steps: u64,
}

impl AnalysisTables {
    pub fn context(&self, key: &ContextKey) -> Option<ContextId> {
        self.index.get(key).copied()
    }

    fn intern(&mut self, key: ContextKey) -> (ContextId, bool) {
        if let Some(&id) = self.index.get(&key) {
            return (id, false);
        }
        let id = self.contexts.len();
        self.contexts.push(key.clone());
        self.index.insert(key, id);
        (id, true)
    }

    fn push(&mut self, item: (ContextId, Position)) {
        if self.queued.insert(item) {
            self.worklist.push_back(item);
        }
    }

    fn pop(&mut self) -> Option<(ContextId, Position)> {
        let item = self.worklist.pop_front()?;
        self.queued.remove(&item);
        Some(item)
    }
}

/// Hook into every growth of a partial state or summary.
pub trait Observer {
    fn partial_state(
        &mut self,
        _ctx: ContextId,
        _pos: Position,
        _old: Option<&TypeEnv>,
        _new: &TypeEnv,
    ) {
    }
    fn summary(&mut self, _ctx: ContextId, _old: Option<&TypeEnv>, _new: &TypeEnv) {}
}

/// Observer that ignores everything.
pub struct NoObserver;

impl Observer for NoObserver {}

#[derive(Debug)]
pub struct AnalysisResult {
    /// Join of every partial state of every context.
    pub env: TypeEnv,
    pub graph: CallGraph,
    pub diagnostics: Diagnostics,
    pub tables: AnalysisTables,
}

/// Call descriptions with their resolution flag, and node diagnostics.
type NodeCalls = (Vec<(String, bool)>, Vec<Diagnostic>);

struct Engine<'a, 'p> {
    ev: &'a Evaluator<'p>,
    scfgs: &'a HashMap<TypeId, (Scfg, Vec<StatementNode>)>,
    tables: AnalysisTables,
    graph: CallGraph,
    observer: &'a mut dyn Observer,
    // Set while a node is being evaluated.
    current: (ContextId, Position, Option<(NodeId, u32)>),
    /// Latest call resolutions and diagnostics per evaluated node.
    node_calls: HashMap<(ContextId, Position), NodeCalls>,
    widened: BTreeSet<Diagnostic>,
}

impl CallHandler for Engine<'_, '_> {
    fn call(&mut self, callee: TypeId, entry: TypeEnv) -> CallOutcome {
        let (ctx, pos, _) = self.current;
        let (id, fresh) = self.tables.intern(ContextKey {
            method: callee,
            input: entry.clone(),
        });
        self.tables
            .return_sites
            .entry(id)
            .or_default()
            .insert((ctx, pos));
        if fresh {
            self.observer.partial_state(id, 0, None, &entry);
            self.tables.partial_state.insert((id, 0), entry);
            self.tables.push((id, 0));
            return CallOutcome::Pending;
        }
        match self.tables.summary.get(&id) {
            Some(s) => CallOutcome::Ready(s.clone()),
            None => CallOutcome::InFlight,
        }
    }

    fn edge(&mut self, callee: TypeId) {
        let (ctx, _, site) = self.current;
        let p = self.ev.program;
        let caller = p.qualified_name(self.tables.contexts[ctx].method);
        let site = site.map(|(node, line)| Site {
            line: (line > 0).then_some(line),
            node: Some(node.0),
        });
        self.graph.add_edge(caller, p.qualified_name(callee), site);
    }
}

impl Engine<'_, '_> {
    fn record_summary(&mut self, ctx: ContextId, state: &TypeEnv) {
        let p = self.ev.program;
        let method = self.tables.contexts[ctx].method;
        let stripped = state
            .restrict(|v| !p.is_method_scope(v.scope) || (v.scope == method && v.is_return_slot()));
        let limit = self.ev.options.literal_limit;
        let grew = match self.tables.summary.get_mut(&ctx) {
            None => {
                self.observer.summary(ctx, None, &stripped);
                self.tables.summary.insert(ctx, stripped);
                true
            }
            Some(cur) => {
                let old = cur.clone();
                let g = cur.join(&stripped, limit);
                if g.changed {
                    self.observer.summary(ctx, Some(&old), cur);
                }
                g.changed
            }
        };
        if grew {
            let sites: Vec<_> = self
                .tables
                .return_sites
                .get(&ctx)
                .into_iter()
                .flatten()
                .copied()
                .collect();
            for s in sites {
                self.tables.push(s);
            }
        }
    }

    fn step(&mut self, ctx: ContextId, pos: Position) {
        let method = self.tables.contexts[ctx].method;
        let scfgs = self.scfgs;
        let (scfg, body) = &scfgs[&method];
        let input = self.tables.partial_state[&(ctx, pos)].clone();
        let out = if pos == 0 || pos == scfg.len() - 1 {
            input
        } else {
            let node = &body[pos - 1];
            self.current = (ctx, pos, Some((node.id, node.line)));
            let ev = self.ev;
            let t: Transfer = ev.transfer(node, &input, self);
            self.node_calls.insert((ctx, pos), (t.calls, t.diagnostics));
            for (v, ty) in t.widened {
                self.widened.insert(widened_diag(ev.program, node, &v, ty));
            }
            if t.waiting {
                return;
            }
            t.out
        };
        let succ = scfg.next_position(pos);
        let limit = self.ev.options.literal_limit;
        match self.tables.partial_state.get_mut(&(ctx, succ)) {
            None => {
                self.observer.partial_state(ctx, succ, None, &out);
                self.tables.partial_state.insert((ctx, succ), out);
                self.tables.push((ctx, succ));
            }
            Some(cur) => {
                let old = cur.clone();
                let g = cur.join(&out, limit);
                if g.changed {
                    self.observer.partial_state(ctx, succ, Some(&old), cur);
                    self.tables.push((ctx, succ));
                } else {
                    self.record_summary(ctx, &old);
                }
            }
        }
    }
}

fn widened_diag(p: &Program, node: &StatementNode, v: &Variable, ty: TypeId) -> Diagnostic {
    Diagnostic {
        kind: DiagnosticKind::LiteralWidened,
        node: Some(node.id),
        line: (node.line > 0).then_some(node.line),
        detail: format!(
            "literal values of {} in ({}, {}) collapsed to the bare type",
            p.qualified_name(ty),
            p.qualified_name(v.scope),
            v.name
        ),
    }
}

pub(crate) fn method_graphs(p: &Program) -> HashMap<TypeId, (Scfg, Vec<StatementNode>)> {
    p.methods()
        .map(|(m, b)| (m, (build_scfg(&b.body, m), b.body.clone())))
        .collect()
}

pub fn run(
    program: &Program,
    entries: &[TypeId],
    options: AnalysisOptions,
    observer: &mut dyn Observer,
) -> Result<AnalysisResult, AnalysisError> {
    if entries.is_empty() {
        return Err(AnalysisError::NoEntryPoints);
    }
    for &e in entries {
        if program.method(e).is_none() {
            return Err(AnalysisError::EntryNotFound(
                program.qualified_name(e).to_string(),
            ));
        }
    }
    let seeds: Vec<_> = entries.iter().map(|&e| (e, TypeEnv::new())).collect();
    run_seeded(program, &seeds, options, observer)
}

/// Runs from the given `(method, input)` contexts; context `i` of the
/// result is seed `i` when the seeds are distinct.
pub fn run_seeded(
    program: &Program,
    seeds: &[(TypeId, TypeEnv)],
    options: AnalysisOptions,
    observer: &mut dyn Observer,
) -> Result<AnalysisResult, AnalysisError> {
    let ev = Evaluator::new(program, options);
    let scfgs = method_graphs(program);
    let mut engine = Engine {
        ev: &ev,
        scfgs: &scfgs,
        tables: AnalysisTables::default(),
        graph: CallGraph::new(),
        observer,
        current: (0, 0, None),
        node_calls: HashMap::new(),
        widened: BTreeSet::new(),
    };
    for (e, input) in seeds {
        engine.graph.add_node(program.qualified_name(*e));
        let (id, fresh) = engine.tables.intern(ContextKey {
            method: *e,
            input: input.clone(),
        });
        if fresh {
            engine.observer.partial_state(id, 0, None, input);
            engine.tables.partial_state.insert((id, 0), input.clone());
            engine.tables.push((id, 0));
        }
    }
    while let Some((ctx, pos)) = engine.tables.pop() {
        engine.tables.steps += 1;
        if let Some(limit) = options.step_limit {
            if engine.tables.steps > limit {
                return Err(AnalysisError::BudgetExceeded(limit));
            }
        }
        engine.step(ctx, pos);
    }

    let mut env = TypeEnv::new();
    for s in engine.tables.partial_state.values() {
        env.join(s, options.literal_limit);
    }
    let diagnostics = collect_diagnostics(&engine);
    Ok(AnalysisResult {
        env,
        graph: engine.graph,
        diagnostics,
        tables: engine.tables,
    })
}

fn collect_diagnostics(engine: &Engine) -> Diagnostics {
    let mut diags = Diagnostics::default();
    // A call is unresolved only if no context ever resolved it.
    let mut calls: BTreeMap<(NodeId, u32, String), bool> = BTreeMap::new();
    for (&(ctx, pos), (cs, ds)) in &engine.node_calls {
        let method = engine.tables.contexts[ctx].method;
        let node = &engine.scfgs[&method].1[pos - 1];
        for (text, resolved) in cs {
            *calls.entry((node.id, node.line, text.clone())).or_default() |= *resolved;
        }
        for d in ds {
            diags.push(d.clone());
        }
    }
    for ((node, line, text), resolved) in calls {
        if !resolved {
            diags.push(Diagnostic {
                kind: DiagnosticKind::UnresolvedCall,
                node: Some(node),
                line: (line > 0).then_some(line),
                detail: format!("no target for `{text}`"),
            });
        }
    }
    for d in &engine.widened {
        diags.push(d.clone());
    }
    diags
}

/// Answers calls from the summaries of a finished run. A context the run
/// never created is analyzed on its own by a fresh run.
struct TableHandler<'a> {
    program: &'a Program,
    options: AnalysisOptions,
    tables: &'a AnalysisTables,
    fresh: HashMap<ContextKey, TypeEnv>,
    /// Contexts the run did not know about.
    missing: usize,
}

impl<'a> TableHandler<'a> {
    fn new(program: &'a Program, options: AnalysisOptions, tables: &'a AnalysisTables) -> Self {
        TableHandler {
            program,
            options,
            tables,
            fresh: HashMap::new(),
            missing: 0,
        }
    }
}

impl CallHandler for TableHandler<'_> {
    fn call(&mut self, callee: TypeId, entry: TypeEnv) -> CallOutcome {
        let key = ContextKey {
            method: callee,
            input: entry,
        };
        if let Some(s) = self
            .tables
            .context(&key)
            .and_then(|id| self.tables.summary.get(&id))
        {
            return CallOutcome::Ready(s.clone());
        }
        self.missing += 1;
        if let Some(s) = self.fresh.get(&key) {
            return CallOutcome::Ready(s.clone());
        }
        let seeds = [(callee, key.input.clone())];
        let summary = run_seeded(self.program, &seeds, self.options, &mut NoObserver)
            .ok()
            .and_then(|mut r| r.tables.summary.remove(&0))
            .unwrap_or_default();
        self.fresh.insert(key, summary.clone());
        CallOutcome::Ready(summary)
    }

    fn edge(&mut self, _callee: TypeId) {}
}

/// Re-runs the body of context `ctx` from its input, iterating around the
/// cycle until nothing changes. Callees are answered from the finished
/// summaries where possible. Returns the stripped state, which should
/// equal the stored summary.
pub fn replay_summary(
    program: &Program,
    options: AnalysisOptions,
    result: &AnalysisResult,
    ctx: ContextId,
) -> TypeEnv {
    let ev = Evaluator::new(program, options);
    let key = &result.tables.contexts[ctx];
    let body = &program
        .method(key.method)
        .expect("context of a method")
        .body;
    let mut h = TableHandler::new(program, options, &result.tables);
    let mut state = key.input.clone();
    loop {
        let mut changed = false;
        for node in body {
            let t = ev.transfer(node, &state, &mut h);
            changed |= state.join(&t.out, options.literal_limit).changed;
        }
        if !changed {
            break;
        }
    }
    state.restrict(|v| {
        !program.is_method_scope(v.scope) || (v.scope == key.method && v.is_return_slot())
    })
}

/// Applies every node's transfer to its context's final state. Returns the
/// `(context, node)` pairs whose output is not already contained in the
/// state, or whose calls hit a context the run never summarized.
pub fn reapply_transfers(
    program: &Program,
    options: AnalysisOptions,
    result: &AnalysisResult,
) -> Vec<(ContextId, NodeId)> {
    let ev = Evaluator::new(program, options);
    let mut bad = Vec::new();
    for (ctx, key) in result.tables.contexts.iter().enumerate() {
        let Some(state) = result.tables.partial_state.get(&(ctx, 0)) else {
            continue;
        };
        for node in &program
            .method(key.method)
            .expect("context of a method")
            .body
        {
            let mut h = TableHandler::new(program, options, &result.tables);
            let t = ev.transfer(node, state, &mut h);
            let grows = state.clone().join(&t.out, options.literal_limit).changed;
            if grows || h.missing > 0 {
                bad.push((ctx, node.id));
            }
        }
    }
    bad
}
