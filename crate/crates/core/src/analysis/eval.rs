//! Expression evaluation and the transfer functions of the three statement
//! kinds. Calls to methods with bodies are delegated to a [`CallHandler`],
//! which is the worklist engine during analysis and a table lookup when
//! checking a finished result.

use std::collections::{BTreeMap, HashMap, HashSet};

use super::env::{Growth, TypeEnv, TypeSet};
use super::{AnalysisOptions, Diagnostic, DiagnosticKind};
use crate::ir::{
    Expression, Intrinsic, Invocation, Literal, NativeMethod, Payload, Program, StatementKind,
    StatementNode, TypeId, TypeKind, TypeValue, Variable, ITEMS_FIELD,
};

/// How a call to a method with a body was answered.
#[derive(Clone, Debug)]
pub enum CallOutcome {
    /// The callee's summary for this input is known.
    Ready(TypeEnv),
    /// The callee context is being analyzed (recursion or a pending call
    /// from elsewhere); proceed with no effects.
    InFlight,
    /// A new context was created; the calling node must wait.
    Pending,
}

pub trait CallHandler {
    fn call(&mut self, callee: TypeId, entry: TypeEnv) -> CallOutcome;
    fn edge(&mut self, callee: TypeId);
}

/// Read-only evaluation context shared by every node of a run.
pub struct Evaluator<'p> {
    pub program: &'p Program,
    pub options: AnalysisOptions,
    locals: HashMap<TypeId, HashSet<String>>,
}

/// Output of one transfer.
#[derive(Debug, Default)]
pub struct Transfer {
    pub out: TypeEnv,
    /// A fresh callee context was created; the output must not propagate.
    pub waiting: bool,
    /// Calls evaluated at this node, with whether any target resolved.
    pub calls: Vec<(String, bool)>,
    pub diagnostics: Vec<Diagnostic>,
    pub widened: Vec<(Variable, TypeId)>,
}

struct NodeCx<'a, 'p, H: CallHandler + ?Sized> {
    ev: &'a Evaluator<'p>,
    handler: &'a mut H,
    node: &'a StatementNode,
    t: Transfer,
}

impl<'p> Evaluator<'p> {
    pub fn new(program: &'p Program, options: AnalysisOptions) -> Self {
        let mut locals: HashMap<TypeId, HashSet<String>> = HashMap::new();
        for (m, body) in program.methods() {
            let set = locals.entry(m).or_default();
            set.extend(body.params.iter().cloned());
            for s in &body.body {
                if let StatementKind::Assignment {
                    lhs: Expression::Name(n),
                    ..
                } = &s.kind
                {
                    set.insert(n.clone());
                }
            }
        }
        Evaluator {
            program,
            options,
            locals,
        }
    }

    pub fn is_local(&self, method: TypeId, name: &str) -> bool {
        self.locals.get(&method).is_some_and(|s| s.contains(name))
    }

    /// Applies the transfer function of `node` to `env`.
    pub fn transfer<H: CallHandler + ?Sized>(
        &self,
        node: &StatementNode,
        env: &TypeEnv,
        handler: &mut H,
    ) -> Transfer {
        let mut cx = NodeCx {
            ev: self,
            handler,
            node,
            t: Transfer {
                out: env.clone(),
                ..Transfer::default()
            },
        };
        let scope = node.owner;
        match &node.kind {
            StatementKind::Assignment { lhs, rhs } => {
                let value = cx.eval(rhs);
                for v in cx.lhs_variables(lhs) {
                    cx.extend(&v, &value);
                }
            }
            StatementKind::Invocation(inv) => {
                cx.invoke(inv);
            }
            StatementKind::Return(e) => {
                let value = match e {
                    Some(e) => cx.eval(e),
                    None => TypeSet::from([TypeValue::of(self.program.builtins().none_type)]),
                };
                cx.extend(&Variable::return_slot(scope), &value);
            }
        }
        cx.t
    }

    /// Evaluates an expression without effects on `env` beyond what calls
    /// report through `handler`.
    pub fn eval<H: CallHandler + ?Sized>(
        &self,
        env: &TypeEnv,
        expr: &Expression,
        node: &StatementNode,
        handler: &mut H,
    ) -> TypeSet {
        let mut cx = NodeCx {
            ev: self,
            handler,
            node,
            t: Transfer {
                out: env.clone(),
                ..Transfer::default()
            },
        };
        cx.eval(expr)
    }
}

impl<H: CallHandler + ?Sized> NodeCx<'_, '_, H> {
    fn program(&self) -> &Program {
        self.ev.program
    }

    fn limit(&self) -> usize {
        self.ev.options.literal_limit
    }

    fn extend(&mut self, v: &Variable, values: &TypeSet) -> Growth {
        let g = self.t.out.extend(v, values, self.ev.options.literal_limit);
        self.t.widened.extend(g.widened.iter().cloned());
        g
    }

    fn diag(&mut self, kind: DiagnosticKind, detail: String) {
        let node = self.node;
        self.t.diagnostics.push(Diagnostic {
            kind,
            node: Some(node.id),
            line: (node.line > 0).then_some(node.line),
            detail,
        });
    }

    fn lhs_variables(&mut self, lhs: &Expression) -> Vec<Variable> {
        match lhs {
            Expression::Name(n) => vec![Variable::new(self.node.owner, n)],
            Expression::MemberAccess { object, field } => {
                let recv = self.eval(object);
                let p = self.program();
                let mut out: Vec<Variable> = recv
                    .iter()
                    .filter(|tv| p.kind(tv.ty) == TypeKind::Class)
                    .map(|tv| Variable::new(tv.ty, field))
                    .collect();
                out.dedup();
                out
            }
            Expression::Literal(_) | Expression::Invocation(_) => Vec::new(),
        }
    }

    fn eval(&mut self, e: &Expression) -> TypeSet {
        let p = self.ev.program;
        match e {
            Expression::Name(n) => {
                let scope = self.node.owner;
                if self.ev.is_local(scope, n) {
                    self.t.out.types(&Variable::new(scope, n))
                } else {
                    p.lookup_global(n)
                        .map(|g| TypeSet::from([TypeValue::of(g)]))
                        .unwrap_or_default()
                }
            }
            Expression::MemberAccess { object, field } => {
                let recv = self.eval(object);
                member_values(p, &self.t.out, &recv, field)
            }
            Expression::Literal(l) => literal_value(p, l),
            Expression::Invocation(inv) => self.invoke(inv),
        }
    }

    fn invoke(&mut self, inv: &Invocation) -> TypeSet {
        let p = self.ev.program;
        let mut result = TypeSet::new();
        let mut resolved = false;

        // Bound calls `o.f(...)` pass the receiver types as `self`.
        let mut dispatch: BTreeMap<TypeId, TypeSet> = BTreeMap::new();
        let mut values = TypeSet::new();
        match &*inv.target {
            Expression::MemberAccess { object, field } if !is_special(field) => {
                let recv = self.eval(object);
                for tv in &recv {
                    if !matches!(p.kind(tv.ty), TypeKind::Class | TypeKind::Builtin) {
                        continue;
                    }
                    if let Some(m) = p.lookup_method(tv.ty, field) {
                        dispatch.entry(m).or_default().insert(TypeValue::of(tv.ty));
                    }
                    values.extend(self.t.out.types(&Variable::new(tv.ty, field)));
                }
            }
            target => values = self.eval(target),
        }
        let args: Vec<TypeSet> = inv.args.iter().map(|a| self.eval(a)).collect();

        for (m, receivers) in dispatch {
            resolved = true;
            let v = self.call_method(m, Some(receivers), &args);
            result.extend(v);
        }
        for tv in &values {
            if let Some(v) = self.call_value(tv, &args, inv) {
                resolved = true;
                result.extend(v);
            }
        }
        self.t.calls.push((inv.to_string(), resolved));
        result
    }

    /// Calls one value. `None` when the value is not callable.
    fn call_value(
        &mut self,
        tv: &TypeValue,
        args: &[TypeSet],
        inv: &Invocation,
    ) -> Option<TypeSet> {
        let p = self.ev.program;
        let def = p.type_def(tv.ty);
        match def.kind {
            TypeKind::Method => {
                let receivers = match def.parent {
                    Some(parent)
                        if p.kind(parent) == TypeKind::Class
                            || p.kind(parent) == TypeKind::Builtin =>
                    {
                        Some(
                            p.receivers_of(tv.ty)
                                .into_iter()
                                .map(TypeValue::of)
                                .collect(),
                        )
                    }
                    _ => None,
                };
                Some(self.call_method(tv.ty, receivers, args))
            }
            TypeKind::Class => {
                if let Some(ctor) = p.constructor(tv.ty) {
                    self.call_method(ctor, Some(TypeSet::from([TypeValue::of(tv.ty)])), args);
                }
                Some(TypeSet::from([TypeValue::of(tv.ty)]))
            }
            TypeKind::Builtin => def.intrinsic.map(|i| self.intrinsic(i, args, inv)),
            TypeKind::Module => None,
        }
    }

    fn call_method(&mut self, m: TypeId, receivers: Option<TypeSet>, args: &[TypeSet]) -> TypeSet {
        let p = self.ev.program;
        let none = TypeValue::of(p.builtins().none_type);
        self.handler.edge(m);
        if let Some(native) = p.type_def(m).native {
            return match native {
                NativeMethod::ListAppend => {
                    if args.len() != 1 {
                        self.arity(m, 1, args.len());
                    }
                    if let Some(a) = args.first() {
                        let items = Variable::new(p.builtins().array, ITEMS_FIELD);
                        self.extend(&items, a);
                    }
                    TypeSet::from([none])
                }
            };
        }
        let (entry, mismatch) =
            bind_parameters(p, &self.t.out, m, receivers.as_ref(), args, self.limit());
        if let Some(expected) = mismatch {
            self.arity(m, expected, args.len());
        }
        let falls_through = p.method(m).is_some_and(|b| b.falls_through);
        let mut value = TypeSet::new();
        match self.handler.call(m, entry) {
            CallOutcome::Ready(summary) => {
                let fields = summary.fields(p);
                let g = self.t.out.join(&fields, self.limit());
                self.t.widened.extend(g.widened);
                value = summary.types(&Variable::return_slot(m));
            }
            CallOutcome::InFlight => {}
            CallOutcome::Pending => self.t.waiting = true,
        }
        if falls_through {
            value.insert(none);
        }
        value
    }

    fn arity(&mut self, m: TypeId, expected: usize, got: usize) {
        let name = self.program().qualified_name(m).to_string();
        self.diag(
            DiagnosticKind::ArityMismatch,
            format!("`{name}` takes {expected} argument(s), {got} given"),
        );
    }

    fn intrinsic(&mut self, i: Intrinsic, args: &[TypeSet], inv: &Invocation) -> TypeSet {
        let p = self.ev.program;
        let b = *p.builtins();
        let items = Variable::new(b.array, ITEMS_FIELD);
        let int = TypeValue::of(b.integer);
        let all = || args.iter().flatten().cloned().collect::<TypeSet>();
        match i {
            Intrinsic::Range => {
                self.extend(&items, &TypeSet::from([int]));
                TypeSet::from([TypeValue::of(b.array)])
            }
            Intrinsic::ItemOf => {
                let coll = args.first().cloned().unwrap_or_default();
                item_of(p, &coll, &self.t.out)
            }
            Intrinsic::GetAttr => {
                if !(2..=3).contains(&args.len()) {
                    let name = inv.target.to_string();
                    self.diag(
                        DiagnosticKind::ArityMismatch,
                        format!("`{name}` takes 2 or 3 arguments, {} given", args.len()),
                    );
                }
                let empty = TypeSet::new();
                resolve_reflective(
                    p,
                    &self.t.out,
                    args.first().unwrap_or(&empty),
                    args.get(1).unwrap_or(&empty),
                    args.get(2).unwrap_or(&empty),
                    self.ev.options.reflect_depth,
                )
            }
            Intrinsic::Len | Intrinsic::Compare | Intrinsic::Not => TypeSet::from([int]),
            Intrinsic::Print => TypeSet::from([TypeValue::of(b.none_type)]),
            Intrinsic::Add | Intrinsic::Mul => all()
                .into_iter()
                .filter_map(|tv| {
                    if tv.ty == b.str && i == Intrinsic::Add {
                        Some(tv)
                    } else if tv.ty == b.integer || tv.ty == b.str || tv.ty == b.array {
                        Some(tv.bare())
                    } else {
                        None
                    }
                })
                .collect(),
            Intrinsic::Sub => {
                if all().iter().any(|tv| tv.ty == b.integer) {
                    TypeSet::from([int])
                } else {
                    TypeSet::new()
                }
            }
            Intrinsic::And | Intrinsic::Or => all(),
            Intrinsic::List => {
                self.extend(&items, &all());
                TypeSet::from([TypeValue::of(b.array)])
            }
        }
    }
}

fn is_special(field: &str) -> bool {
    field == "__class__" || field == "__name__"
}

pub fn literal_value(p: &Program, l: &Literal) -> TypeSet {
    let b = p.builtins();
    TypeSet::from([match l {
        Literal::Int(v) => TypeValue::with_literal(b.integer, Payload::Int(*v)),
        Literal::Str(s) => TypeValue::with_literal(b.str, Payload::Str(s.as_str().into())),
        Literal::List => TypeValue::of(b.array),
        Literal::None => TypeValue::of(b.none_type),
    }])
}

/// Values of `o.field` for each receiver type of `o`: the field bindings of
/// that type plus the method the name resolves to. `__class__` yields the
/// type itself and `__name__` the short name of a class or method.
pub fn member_values(p: &Program, env: &TypeEnv, receivers: &TypeSet, field: &str) -> TypeSet {
    let mut out = TypeSet::new();
    for tv in receivers {
        let def = p.type_def(tv.ty);
        let class_like = def.kind == TypeKind::Class
            || (def.kind == TypeKind::Builtin && def.intrinsic.is_none());
        match field {
            "__class__" => {
                if class_like {
                    out.insert(tv.bare());
                }
            }
            "__name__" => {
                if class_like || def.kind == TypeKind::Method || def.intrinsic.is_some() {
                    let s = p.builtins().str;
                    out.insert(TypeValue::with_literal(
                        s,
                        Payload::Str(def.name.as_str().into()),
                    ));
                }
            }
            _ if class_like => {
                out.extend(env.types(&Variable::new(tv.ty, field)));
                if let Some(m) = p.lookup_method(tv.ty, field) {
                    out.insert(TypeValue::of(m));
                }
            }
            _ => {}
        }
    }
    out
}

/// Element types of the collections in `coll`: the `items` field of `array`
/// for lists, and `Str` for strings.
pub fn item_of(p: &Program, coll: &TypeSet, env: &TypeEnv) -> TypeSet {
    let b = p.builtins();
    let mut out = TypeSet::new();
    for tv in coll {
        if tv.ty == b.array {
            out.extend(env.types(&Variable::new(b.array, ITEMS_FIELD)));
        } else if tv.ty == b.str {
            out.insert(TypeValue::of(b.str));
        }
    }
    out
}

/// Targets of `getattr(receiver, name, default)`. Candidate names are
/// ordered concatenations of 1..=k distinct string payloads of `names`; each
/// is looked up as a method and as a field of every receiver type. A
/// payload-free string stands for any name and selects every member.
pub fn resolve_reflective(
    p: &Program,
    env: &TypeEnv,
    receivers: &TypeSet,
    names: &TypeSet,
    default: &TypeSet,
    k: usize,
) -> TypeSet {
    let str_ty = p.builtins().str;
    let payloads: Vec<&str> = names
        .iter()
        .filter(|tv| tv.ty == str_ty)
        .filter_map(|tv| match &tv.literal {
            Some(Payload::Str(s)) => Some(&**s),
            _ => None,
        })
        .collect();
    let any_name = names.contains(&TypeValue::of(str_ty));
    let candidates = name_combinations(&payloads, k);

    let mut out = default.clone();
    for tv in receivers {
        let kind = p.kind(tv.ty);
        if !(kind == TypeKind::Class || (kind == TypeKind::Builtin && p.intrinsic(tv.ty).is_none()))
        {
            continue;
        }
        if any_name {
            out.extend(p.all_methods(tv.ty).into_iter().map(TypeValue::of));
            for (v, set) in env.iter() {
                if v.scope == tv.ty {
                    out.extend(set.iter().cloned());
                }
            }
        }
        for c in &candidates {
            if let Some(m) = p.lookup_method(tv.ty, c) {
                out.insert(TypeValue::of(m));
            }
            out.extend(env.types(&Variable::new(tv.ty, c)));
        }
    }
    out
}

/// Every concatenation of 1..=k distinct elements of `parts`, in order.
pub fn name_combinations(parts: &[&str], k: usize) -> Vec<String> {
    fn go(parts: &[&str], k: usize, used: &mut Vec<bool>, cur: &mut String, out: &mut Vec<String>) {
        if k == 0 {
            return;
        }
        for i in 0..parts.len() {
            if used[i] {
                continue;
            }
            used[i] = true;
            let len = cur.len();
            cur.push_str(parts[i]);
            out.push(cur.clone());
            go(parts, k - 1, used, cur, out);
            cur.truncate(len);
            used[i] = false;
        }
    }
    let mut out = Vec::new();
    go(
        parts,
        k,
        &mut vec![false; parts.len()],
        &mut String::new(),
        &mut out,
    );
    out.sort();
    out.dedup();
    out
}

/// Callee entry environment: the field-level bindings of `env`, `self`
/// bound to `receivers` when given, and positional parameters bound to the
/// argument types. Returns the expected argument count on a mismatch; the
/// common prefix is bound either way.
pub fn bind_parameters(
    p: &Program,
    env: &TypeEnv,
    target: TypeId,
    receivers: Option<&TypeSet>,
    args: &[TypeSet],
    limit: usize,
) -> (TypeEnv, Option<usize>) {
    let mut entry = env.fields(p);
    let params: &[String] = p.method(target).map_or(&[], |b| &b.params);
    let synthetic = p.type_def(target).synthetic;
    let mut rest = params;
    if let Some(recv) = receivers {
        if let Some((first, tail)) = params.split_first() {
            entry.extend(&Variable::new(target, first), recv, limit);
            rest = tail;
        } else if !synthetic {
            // A method without a `self` parameter cannot be called bound.
            return (entry, Some(0));
        }
    }
    for (param, arg) in rest.iter().zip(args) {
        entry.extend(&Variable::new(target, param), arg, limit);
    }
    let mismatch = (rest.len() != args.len()).then_some(rest.len());
    (entry, mismatch)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn combinations_are_ordered_and_distinct() {
        let c = name_combinations(&["visit_", "If", "Name"], 2);
        assert_eq!(c.len(), 3 + 6);
        assert!(c.contains(&"visit_If".to_string()));
        assert!(c.contains(&"Ifvisit_".to_string()));
        assert!(!c.contains(&"IfIf".to_string()));
        assert!(name_combinations(&[], 2).is_empty());
        assert_eq!(name_combinations(&["a", "a"], 2), vec!["a", "aa"]);
    }
}
