//! Reference interpreter. Runs the structured syntax tree (not the lowered
//! IR) with ordinary semantics and records the calls that actually happen.

use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::rc::Rc;

use crate::callgraph::{CallGraph, Site};
use crate::frontend::ast::{self, BinOp, BoolOp, CmpOp, Expr, FunctionDef, Stmt, StmtKind};
use crate::ir::{Intrinsic, NativeMethod, Program, TypeId, TypeKind, Variable, ITEMS_FIELD};

pub const DEFAULT_STEP_BUDGET: u64 = 100_000;
pub const MAX_CALL_DEPTH: usize = 64;

#[derive(Debug)]
pub struct Instance {
    pub class: TypeId,
    pub fields: BTreeMap<String, RuntimeValue>,
}

#[derive(Clone, Debug)]
pub enum RuntimeValue {
    Instance(Rc<RefCell<Instance>>),
    Int(i64),
    Str(Rc<str>),
    ListVal(Rc<RefCell<Vec<RuntimeValue>>>),
    BoundMethod(Box<RuntimeValue>, TypeId),
    FunctionVal(TypeId),
    Class(TypeId),
    Builtin(Intrinsic),
    NoneVal,
}

impl RuntimeValue {
    /// The analysis type this value belongs to.
    pub fn type_of(&self, p: &Program) -> TypeId {
        let b = p.builtins();
        match self {
            RuntimeValue::Instance(o) => o.borrow().class,
            RuntimeValue::Int(_) => b.integer,
            RuntimeValue::Str(_) => b.str,
            RuntimeValue::ListVal(_) => b.array,
            RuntimeValue::BoundMethod(_, m) | RuntimeValue::FunctionVal(m) => *m,
            RuntimeValue::Class(c) => *c,
            RuntimeValue::Builtin(i) => p.intrinsic_id(*i),
            RuntimeValue::NoneVal => b.none_type,
        }
    }

    fn truthy(&self) -> bool {
        match self {
            RuntimeValue::Int(v) => *v != 0,
            RuntimeValue::Str(s) => !s.is_empty(),
            RuntimeValue::ListVal(l) => !l.borrow().is_empty(),
            RuntimeValue::NoneVal => false,
            _ => true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Completed,
    BudgetExhausted,
    RuntimeError(String),
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Outcome::Completed => f.write_str("completed"),
            Outcome::BudgetExhausted => f.write_str("budget_exhausted"),
            Outcome::RuntimeError(d) => write!(f, "runtime_error: {d}"),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DynamicCallGraph {
    pub graph: CallGraph,
    pub steps_executed: u64,
}

/// Result of one run.
#[derive(Debug)]
pub struct Interpretation {
    pub calls: DynamicCallGraph,
    pub outcome: Outcome,
    /// Every `(variable, runtime type)` written: locals, parameters, fields
    /// (scoped to the instance's class), list items and return values.
    pub observations: BTreeSet<(Variable, TypeId)>,
}

enum Fault {
    Error(String),
    Budget,
}

type Exec<T> = Result<T, Fault>;

fn err<T>(msg: impl Into<String>) -> Exec<T> {
    Err(Fault::Error(msg.into()))
}

enum Flow {
    Next,
    Break,
    Continue,
    Return(RuntimeValue),
}

struct Frame {
    method: TypeId,
    locals: HashMap<String, RuntimeValue>,
}

struct Interp<'a> {
    p: &'a Program,
    bodies: HashMap<TypeId, &'a FunctionDef>,
    /// Names assigned anywhere in each function, which makes them local.
    local_names: HashMap<TypeId, BTreeSet<String>>,
    budget: u64,
    steps: u64,
    depth: usize,
    graph: CallGraph,
    observations: BTreeSet<(Variable, TypeId)>,
}

/// Runs `entry` of `module`, which must be the module `program` was lowered
/// from.
pub fn interpret(
    program: &Program,
    module: &ast::Module,
    entry: TypeId,
    budget: u64,
) -> Interpretation {
    let mut bodies = HashMap::new();
    for item in &module.items {
        match item {
            ast::Item::Function(f) => {
                if let Some(m) = program.method_named(&f.name) {
                    bodies.insert(m, f);
                }
            }
            ast::Item::Class(c) => {
                for f in &c.methods {
                    if let Some(m) = program.method_named(&format!("{}:{}", c.name, f.name)) {
                        bodies.insert(m, f);
                    }
                }
            }
        }
    }
    let local_names = bodies
        .iter()
        .map(|(&m, f)| {
            let mut set: BTreeSet<String> = f.params.iter().cloned().collect();
            assigned_names(&f.body, &mut set);
            (m, set)
        })
        .collect();
    let mut it = Interp {
        p: program,
        bodies,
        local_names,
        budget,
        steps: 0,
        depth: 0,
        graph: CallGraph::new(),
        observations: BTreeSet::new(),
    };
    it.graph.add_node(program.qualified_name(entry));
    let outcome = match it.call_method(entry, None, Vec::new()) {
        Ok(_) => Outcome::Completed,
        Err(Fault::Budget) => Outcome::BudgetExhausted,
        Err(Fault::Error(e)) => Outcome::RuntimeError(e),
    };
    Interpretation {
        calls: DynamicCallGraph {
            graph: it.graph,
            steps_executed: it.steps,
        },
        outcome,
        observations: it.observations,
    }
}

fn assigned_names(body: &[Stmt], out: &mut BTreeSet<String>) {
    for s in body {
        match &s.kind {
            StmtKind::Assign {
                target: Expr::Name(n),
                ..
            }
            | StmtKind::AugAssign {
                target: Expr::Name(n),
                ..
            } => {
                out.insert(n.clone());
            }
            StmtKind::For { var, body, .. } => {
                out.insert(var.clone());
                assigned_names(body, out);
            }
            StmtKind::While { body, .. } => assigned_names(body, out),
            StmtKind::If { branches, orelse } => {
                for b in branches {
                    assigned_names(&b.body, out);
                }
                assigned_names(orelse, out);
            }
            _ => {}
        }
    }
}

impl<'a> Interp<'a> {
    fn tick(&mut self, n: u64) -> Exec<()> {
        self.steps += n;
        if self.steps > self.budget {
            Err(Fault::Budget)
        } else {
            Ok(())
        }
    }

    fn observe(&mut self, scope: TypeId, name: &str, v: &RuntimeValue) {
        self.observations
            .insert((Variable::new(scope, name), v.type_of(self.p)));
    }

    fn call_method(
        &mut self,
        m: TypeId,
        receiver: Option<RuntimeValue>,
        args: Vec<RuntimeValue>,
    ) -> Exec<RuntimeValue> {
        self.tick(1)?;
        let p = self.p;
        if let Some(NativeMethod::ListAppend) = p.type_def(m).native {
            let Some(RuntimeValue::ListVal(l)) = receiver else {
                return err("append on a non-list");
            };
            let [x] = <[RuntimeValue; 1]>::try_from(args)
                .map_err(|a| Fault::Error(format!("append takes 1 argument, {} given", a.len())))?;
            self.observe(p.builtins().array, ITEMS_FIELD, &x);
            l.borrow_mut().push(x);
            return Ok(RuntimeValue::NoneVal);
        }
        let mut all = Vec::with_capacity(args.len() + 1);
        all.extend(receiver);
        all.extend(args);
        let Some(def) = self.bodies.get(&m).copied() else {
            // Synthesized constructor.
            return if all.len() <= 1 {
                Ok(RuntimeValue::NoneVal)
            } else {
                err(format!("`{}` takes no arguments", p.qualified_name(m)))
            };
        };
        if def.params.len() != all.len() {
            return err(format!(
                "`{}` takes {} argument(s), {} given",
                p.qualified_name(m),
                def.params.len(),
                all.len()
            ));
        }
        if self.depth >= MAX_CALL_DEPTH {
            return err("maximum call depth exceeded");
        }
        let mut frame = Frame {
            method: m,
            locals: HashMap::new(),
        };
        for (name, v) in def.params.iter().zip(all) {
            self.observe(m, name, &v);
            frame.locals.insert(name.clone(), v);
        }
        self.depth += 1;
        let r = self.block(&mut frame, &def.body);
        self.depth -= 1;
        match r? {
            Flow::Return(v) => Ok(v),
            _ => Ok(RuntimeValue::NoneVal),
        }
    }

    fn block(&mut self, f: &mut Frame, body: &[Stmt]) -> Exec<Flow> {
        for s in body {
            match self.stmt(f, s)? {
                Flow::Next => {}
                other => return Ok(other),
            }
        }
        Ok(Flow::Next)
    }

    fn stmt(&mut self, f: &mut Frame, s: &Stmt) -> Exec<Flow> {
        self.tick(1)?;
        let line = s.line;
        match &s.kind {
            StmtKind::Assign { target, value } => {
                let v = self.eval(f, value, line)?;
                self.assign(f, target, v, line)?;
            }
            StmtKind::AugAssign { target, op, value } => {
                let cur = self.eval(f, target, line)?;
                let rhs = self.eval(f, value, line)?;
                let v = binary(*op, cur, rhs)?;
                self.assign(f, target, v, line)?;
            }
            StmtKind::Expr(e) => {
                self.eval(f, e, line)?;
            }
            StmtKind::Return(e) => {
                let v = match e {
                    Some(e) => self.eval(f, e, line)?,
                    None => RuntimeValue::NoneVal,
                };
                self.observe(f.method, crate::ir::RETURN_SLOT, &v);
                return Ok(Flow::Return(v));
            }
            StmtKind::If { branches, orelse } => {
                for b in branches {
                    if self.eval(f, &b.cond, b.line)?.truthy() {
                        return self.block(f, &b.body);
                    }
                }
                return self.block(f, orelse);
            }
            StmtKind::While { cond, body } => {
                while self.eval(f, cond, line)?.truthy() {
                    self.tick(1)?;
                    match self.block(f, body)? {
                        Flow::Break => break,
                        Flow::Return(v) => return Ok(Flow::Return(v)),
                        Flow::Next | Flow::Continue => {}
                    }
                }
            }
            StmtKind::For { var, iter, body } => {
                let coll = self.eval(f, iter, line)?;
                let mut i = 0;
                loop {
                    self.tick(1)?;
                    let item = match &coll {
                        RuntimeValue::ListVal(l) => l.borrow().get(i).cloned(),
                        RuntimeValue::Str(s) => s
                            .chars()
                            .nth(i)
                            .map(|c| RuntimeValue::Str(c.to_string().into())),
                        _ => return err("iteration over a non-collection"),
                    };
                    let Some(item) = item else { break };
                    i += 1;
                    self.observe(f.method, var, &item);
                    f.locals.insert(var.clone(), item);
                    match self.block(f, body)? {
                        Flow::Break => break,
                        Flow::Return(v) => return Ok(Flow::Return(v)),
                        Flow::Next | Flow::Continue => {}
                    }
                }
            }
            StmtKind::Pass => {}
            StmtKind::Break => return Ok(Flow::Break),
            StmtKind::Continue => return Ok(Flow::Continue),
        }
        Ok(Flow::Next)
    }

    fn assign(&mut self, f: &mut Frame, target: &Expr, v: RuntimeValue, line: u32) -> Exec<()> {
        match target {
            Expr::Name(n) => {
                self.observe(f.method, n, &v);
                f.locals.insert(n.clone(), v);
                Ok(())
            }
            Expr::Attr(o, field) => match self.eval(f, o, line)? {
                RuntimeValue::Instance(obj) => {
                    let class = obj.borrow().class;
                    self.observe(class, field, &v);
                    obj.borrow_mut().fields.insert(field.clone(), v);
                    Ok(())
                }
                _ => err(format!("cannot set attribute `{field}`")),
            },
            _ => err("invalid assignment target"),
        }
    }

    fn lookup_name(&self, f: &Frame, n: &str) -> Exec<RuntimeValue> {
        if self
            .local_names
            .get(&f.method)
            .is_some_and(|s| s.contains(n))
        {
            return match f.locals.get(n) {
                Some(v) => Ok(v.clone()),
                None => err(format!("local `{n}` referenced before assignment")),
            };
        }
        let p = self.p;
        if let Some(t) = p.member(p.module(), n) {
            return Ok(match p.kind(t) {
                TypeKind::Class => RuntimeValue::Class(t),
                _ => RuntimeValue::FunctionVal(t),
            });
        }
        match Intrinsic::from_name(n) {
            Some(
                i @ (Intrinsic::Range | Intrinsic::GetAttr | Intrinsic::Len | Intrinsic::Print),
            ) => Ok(RuntimeValue::Builtin(i)),
            _ => err(format!("name `{n}` is not defined")),
        }
    }

    /// `o.name` with ordinary lookup: instance fields, then methods.
    fn attribute(&self, o: &RuntimeValue, name: &str) -> Option<RuntimeValue> {
        let p = self.p;
        let short = |t: TypeId| RuntimeValue::Str(p.type_def(t).name.as_str().into());
        match name {
            "__class__" => {
                return match o {
                    RuntimeValue::Instance(_)
                    | RuntimeValue::Int(_)
                    | RuntimeValue::Str(_)
                    | RuntimeValue::ListVal(_)
                    | RuntimeValue::NoneVal => Some(RuntimeValue::Class(o.type_of(p))),
                    _ => None,
                };
            }
            "__name__" => {
                return match o {
                    RuntimeValue::Class(t)
                    | RuntimeValue::FunctionVal(t)
                    | RuntimeValue::BoundMethod(_, t) => Some(short(*t)),
                    RuntimeValue::Builtin(i) => Some(RuntimeValue::Str(i.name().into())),
                    _ => None,
                };
            }
            _ => {}
        }
        let ty = match o {
            RuntimeValue::Instance(obj) => {
                if let Some(v) = obj.borrow().fields.get(name) {
                    return Some(v.clone());
                }
                obj.borrow().class
            }
            RuntimeValue::Int(_)
            | RuntimeValue::Str(_)
            | RuntimeValue::ListVal(_)
            | RuntimeValue::NoneVal => o.type_of(p),
            _ => return None,
        };
        p.lookup_method(ty, name)
            .map(|m| RuntimeValue::BoundMethod(Box::new(o.clone()), m))
    }

    fn eval(&mut self, f: &mut Frame, e: &Expr, line: u32) -> Exec<RuntimeValue> {
        Ok(match e {
            Expr::Name(n) => self.lookup_name(f, n)?,
            Expr::Attr(o, name) => {
                let o = self.eval(f, o, line)?;
                match self.attribute(&o, name) {
                    Some(v) => v,
                    None => return err(format!("no attribute `{name}`")),
                }
            }
            Expr::Int(v) => RuntimeValue::Int(*v),
            Expr::Str(s) => RuntimeValue::Str(s.as_str().into()),
            Expr::None => RuntimeValue::NoneVal,
            Expr::True => RuntimeValue::Int(1),
            Expr::False => RuntimeValue::Int(0),
            Expr::List(items) => {
                let mut v = Vec::with_capacity(items.len());
                for x in items {
                    let x = self.eval(f, x, line)?;
                    self.observe(self.p.builtins().array, ITEMS_FIELD, &x);
                    v.push(x);
                }
                RuntimeValue::ListVal(Rc::new(RefCell::new(v)))
            }
            Expr::Call(target, args) => {
                let callee = self.eval(f, target, line)?;
                let mut vals = Vec::with_capacity(args.len());
                for a in args {
                    vals.push(self.eval(f, a, line)?);
                }
                self.call_value(f.method, callee, vals, line)?
            }
            Expr::Binary(op, l, r) => {
                let l = self.eval(f, l, line)?;
                let r = self.eval(f, r, line)?;
                binary(*op, l, r)?
            }
            Expr::Compare(op, l, r) => {
                let l = self.eval(f, l, line)?;
                let r = self.eval(f, r, line)?;
                RuntimeValue::Int(compare(*op, &l, &r)? as i64)
            }
            Expr::Not(x) => RuntimeValue::Int(!self.eval(f, x, line)?.truthy() as i64),
            Expr::Bool(op, l, r) => {
                let l = self.eval(f, l, line)?;
                match (op, l.truthy()) {
                    (BoolOp::And, false) | (BoolOp::Or, true) => l,
                    _ => self.eval(f, r, line)?,
                }
            }
            Expr::Neg(x) => match self.eval(f, x, line)? {
                RuntimeValue::Int(v) => RuntimeValue::Int(v.wrapping_neg()),
                _ => return err("bad operand for unary -"),
            },
        })
    }

    fn edge(&mut self, caller: TypeId, callee: TypeId, line: u32) {
        let p = self.p;
        let site = Site {
            line: (line > 0).then_some(line),
            node: None,
        };
        self.graph.add_edge(
            p.qualified_name(caller),
            p.qualified_name(callee),
            Some(site),
        );
    }

    fn call_value(
        &mut self,
        caller: TypeId,
        callee: RuntimeValue,
        args: Vec<RuntimeValue>,
        line: u32,
    ) -> Exec<RuntimeValue> {
        let p = self.p;
        match callee {
            RuntimeValue::FunctionVal(m) => {
                self.edge(caller, m, line);
                self.call_method(m, None, args)
            }
            RuntimeValue::BoundMethod(recv, m) => {
                self.edge(caller, m, line);
                self.call_method(m, Some(*recv), args)
            }
            RuntimeValue::Class(c) if p.kind(c) == TypeKind::Class => {
                let obj = RuntimeValue::Instance(Rc::new(RefCell::new(Instance {
                    class: c,
                    fields: BTreeMap::new(),
                })));
                if let Some(ctor) = p.constructor(c) {
                    self.edge(caller, ctor, line);
                    self.call_method(ctor, Some(obj.clone()), args)?;
                }
                Ok(obj)
            }
            RuntimeValue::Builtin(i) => self.builtin(i, args),
            _ => err("value is not callable"),
        }
    }

    fn builtin(&mut self, i: Intrinsic, args: Vec<RuntimeValue>) -> Exec<RuntimeValue> {
        match (i, args.as_slice()) {
            (Intrinsic::Range, [RuntimeValue::Int(n)]) => self.range(0, *n),
            (Intrinsic::Range, [RuntimeValue::Int(a), RuntimeValue::Int(b)]) => self.range(*a, *b),
            (Intrinsic::Len, [RuntimeValue::ListVal(l)]) => {
                Ok(RuntimeValue::Int(l.borrow().len() as i64))
            }
            (Intrinsic::Len, [RuntimeValue::Str(s)]) => {
                Ok(RuntimeValue::Int(s.chars().count() as i64))
            }
            (Intrinsic::Print, _) => Ok(RuntimeValue::NoneVal),
            (Intrinsic::GetAttr, [o, RuntimeValue::Str(name), rest @ ..]) if rest.len() <= 1 => {
                match (self.attribute(o, name), rest.first()) {
                    (Some(v), _) => Ok(v),
                    (None, Some(d)) => Ok(d.clone()),
                    (None, None) => err(format!("no attribute `{name}`")),
                }
            }
            _ => err(format!("bad arguments to `{}`", i.name())),
        }
    }

    fn range(&mut self, a: i64, b: i64) -> Exec<RuntimeValue> {
        let n = b.saturating_sub(a).max(0) as u64;
        self.tick(n)?;
        let items: Vec<_> = (a..b).map(RuntimeValue::Int).collect();
        if let Some(x) = items.first() {
            self.observe(self.p.builtins().array, ITEMS_FIELD, x);
        }
        Ok(RuntimeValue::ListVal(Rc::new(RefCell::new(items))))
    }
}

fn binary(op: BinOp, l: RuntimeValue, r: RuntimeValue) -> Exec<RuntimeValue> {
    use RuntimeValue::*;
    let repeat = |n: i64| n.max(0) as usize;
    Ok(match (op, &l, &r) {
        (BinOp::Add, Int(a), Int(b)) => Int(a.wrapping_add(*b)),
        (BinOp::Sub, Int(a), Int(b)) => Int(a.wrapping_sub(*b)),
        (BinOp::Mul, Int(a), Int(b)) => Int(a.wrapping_mul(*b)),
        (BinOp::Add, Str(a), Str(b)) => Str(format!("{a}{b}").into()),
        (BinOp::Mul, Str(s), Int(n)) | (BinOp::Mul, Int(n), Str(s)) => {
            Str(s.repeat(repeat(*n).min(4096)).into())
        }
        (BinOp::Add, ListVal(a), ListVal(b)) => {
            let mut v = a.borrow().clone();
            v.extend(b.borrow().iter().cloned());
            ListVal(Rc::new(RefCell::new(v)))
        }
        (BinOp::Mul, ListVal(a), Int(n)) | (BinOp::Mul, Int(n), ListVal(a)) => {
            let src = a.borrow();
            let v: Vec<_> = (0..repeat(*n).min(4096))
                .flat_map(|_| src.iter().cloned())
                .collect();
            ListVal(Rc::new(RefCell::new(v)))
        }
        _ => return err("unsupported operand types"),
    })
}

fn compare(op: CmpOp, l: &RuntimeValue, r: &RuntimeValue) -> Exec<bool> {
    use std::cmp::Ordering;
    use RuntimeValue::*;
    let ord: Option<Ordering> = match (l, r) {
        (Int(a), Int(b)) => Some(a.cmp(b)),
        (Str(a), Str(b)) => Some(a.cmp(b)),
        _ => None,
    };
    match (op, ord) {
        (CmpOp::Eq, Some(o)) => Ok(o == Ordering::Equal),
        (CmpOp::Ne, Some(o)) => Ok(o != Ordering::Equal),
        (CmpOp::Eq, None) => Ok(identical(l, r)),
        (CmpOp::Ne, None) => Ok(!identical(l, r)),
        (CmpOp::Lt, Some(o)) => Ok(o == Ordering::Less),
        (CmpOp::Le, Some(o)) => Ok(o != Ordering::Greater),
        (CmpOp::Gt, Some(o)) => Ok(o == Ordering::Greater),
        (CmpOp::Ge, Some(o)) => Ok(o != Ordering::Less),
        _ => err("unorderable operands"),
    }
}

fn identical(l: &RuntimeValue, r: &RuntimeValue) -> bool {
    use RuntimeValue::*;
    match (l, r) {
        (NoneVal, NoneVal) => true,
        (Instance(a), Instance(b)) => Rc::ptr_eq(a, b),
        (ListVal(a), ListVal(b)) => Rc::ptr_eq(a, b),
        (FunctionVal(a), FunctionVal(b)) | (Class(a), Class(b)) => a == b,
        (Builtin(a), Builtin(b)) => a == b,
        _ => false,
    }
}
