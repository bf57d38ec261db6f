//! Lowering of the structured AST into a flat [`Program`].

use super::ast::*;
use super::ParseError;
use crate::ir::{
    Expression, Intrinsic, Invocation, Literal, NodeId, Program, ProgramBuilder, StatementKind,
    StatementNode, TypeId,
};

/// Names a program may not define at module level.
fn reserved(name: &str) -> bool {
    Intrinsic::from_name(name).is_some()
        || matches!(name, "Integer" | "Str" | "array" | "NoneType" | "object")
}

/// Entry points are functions named `main` or starting with `test`.
pub fn is_entry_name(name: &str) -> bool {
    name == "main" || name.starts_with("test")
}

pub fn lower(module: &Module) -> Result<Program, ParseError> {
    let mut b = ProgramBuilder::new();
    let root = b.module();
    let dup = |line: u32, what: &str| ParseError::Syntax {
        line,
        column: 1,
        message: format!("duplicate definition of `{what}`"),
    };

    // Types are registered in source order.
    // (method, definition, whether it is a module-level function)
    let mut pending: Vec<(TypeId, &FunctionDef, bool)> = Vec::new();
    let mut classes: Vec<(TypeId, &ClassDef)> = Vec::new();
    for item in &module.items {
        match item {
            Item::Function(f) => {
                if reserved(&f.name) {
                    return Err(ParseError::Unsupported {
                        line: f.line,
                        column: 1,
                        construct: format!("redefinition of builtin `{}`", f.name),
                    });
                }
                let id = b
                    .add_method(root, &f.name, f.params.clone(), false)
                    .map_err(|_| dup(f.line, &f.name))?;
                pending.push((id, f, true));
            }
            Item::Class(c) => {
                if reserved(&c.name) {
                    return Err(ParseError::Unsupported {
                        line: c.line,
                        column: 1,
                        construct: format!("redefinition of builtin `{}`", c.name),
                    });
                }
                let id = b.add_class(&c.name).map_err(|_| dup(c.line, &c.name))?;
                for m in &c.methods {
                    let mid = b
                        .add_method(id, &m.name, m.params.clone(), false)
                        .map_err(|_| dup(m.line, &format!("{}:{}", c.name, m.name)))?;
                    pending.push((mid, m, false));
                }
                classes.push((id, c));
            }
        }
    }
    for (id, c) in &classes {
        if let Some(base) = &c.base {
            let unknown = || ParseError::Syntax {
                line: c.line,
                column: 1,
                message: format!("unknown base class `{base}`"),
            };
            let base_id = b.type_named(base).ok_or_else(unknown)?;
            b.set_superclass(*id, base_id).map_err(|_| unknown())?;
        }
    }

    let mut next_id = 0u32;
    for (id, f, _) in &pending {
        let mut cx = Lowerer {
            owner: *id,
            next_id: &mut next_id,
            out: Vec::new(),
        };
        cx.block(&f.body);
        let body = cx.out;
        b.set_body(*id, body, !always_returns(&f.body))?;
    }
    for (id, f, top_level) in &pending {
        if *top_level && is_entry_name(&f.name) {
            b.add_entry_point(*id)?;
        }
    }
    Ok(b.finish()?)
}

/// Whether every path through `body` ends in a `return`.
pub fn always_returns(body: &[Stmt]) -> bool {
    body.iter().any(|s| match &s.kind {
        StmtKind::Return(_) => true,
        StmtKind::If { branches, orelse } => {
            !orelse.is_empty()
                && always_returns(orelse)
                && branches.iter().all(|b| always_returns(&b.body))
        }
        _ => false,
    })
}

struct Lowerer<'a> {
    owner: TypeId,
    next_id: &'a mut u32,
    out: Vec<StatementNode>,
}

impl Lowerer<'_> {
    fn emit(&mut self, line: u32, kind: StatementKind) {
        let id = NodeId(*self.next_id);
        *self.next_id += 1;
        self.out.push(StatementNode {
            id,
            line,
            owner: self.owner,
            kind,
        });
    }

    fn block(&mut self, body: &[Stmt]) {
        for s in body {
            self.stmt(s);
        }
    }

    fn stmt(&mut self, s: &Stmt) {
        let line = s.line;
        match &s.kind {
            StmtKind::Assign { target, value } => {
                let kind = StatementKind::Assignment {
                    lhs: expr(target),
                    rhs: expr(value),
                };
                self.emit(line, kind);
            }
            StmtKind::AugAssign { target, op, value } => {
                let rhs = binary(*op, expr(target), expr(value));
                self.emit(
                    line,
                    StatementKind::Assignment {
                        lhs: expr(target),
                        rhs,
                    },
                );
            }
            StmtKind::Expr(e) => self.effects(e, line),
            StmtKind::Return(e) => self.emit(line, StatementKind::Return(e.as_ref().map(expr))),
            StmtKind::If { branches, orelse } => {
                for br in branches {
                    self.effects(&br.cond, br.line);
                    self.block(&br.body);
                }
                self.block(orelse);
            }
            StmtKind::While { cond, body } => {
                self.effects(cond, line);
                self.block(body);
            }
            StmtKind::For { var, iter, body } => {
                let rhs = intrinsic(Intrinsic::ItemOf, vec![expr(iter)]);
                self.emit(
                    line,
                    StatementKind::Assignment {
                        lhs: Expression::name(var),
                        rhs,
                    },
                );
                self.block(body);
            }
            StmtKind::Pass | StmtKind::Break | StmtKind::Continue => {}
        }
    }

    /// Keeps the call parts of an expression evaluated only for effect.
    fn effects(&mut self, e: &Expr, line: u32) {
        if !e.contains_call() {
            return;
        }
        match expr(e) {
            Expression::Invocation(inv) => self.emit(line, StatementKind::Invocation(inv)),
            other => {
                let mut calls = Vec::new();
                maximal_invocations(other, &mut calls);
                for inv in calls {
                    self.emit(line, StatementKind::Invocation(inv));
                }
            }
        }
    }
}

fn maximal_invocations(e: Expression, out: &mut Vec<Invocation>) {
    match e {
        Expression::Invocation(inv) => out.push(inv),
        Expression::MemberAccess { object, .. } => maximal_invocations(*object, out),
        Expression::Name(_) | Expression::Literal(_) => {}
    }
}

fn intrinsic(i: Intrinsic, args: Vec<Expression>) -> Expression {
    Expression::call(Expression::name(i.name()), args)
}

fn binary(op: BinOp, l: Expression, r: Expression) -> Expression {
    let i = match op {
        BinOp::Add => Intrinsic::Add,
        BinOp::Sub => Intrinsic::Sub,
        BinOp::Mul => Intrinsic::Mul,
    };
    intrinsic(i, vec![l, r])
}

pub fn expr(e: &Expr) -> Expression {
    match e {
        Expr::Name(n) => Expression::name(n),
        Expr::Attr(o, f) => Expression::member(expr(o), f),
        Expr::Int(v) => Expression::int(*v),
        Expr::Str(s) => Expression::str(s),
        Expr::None => Expression::Literal(Literal::None),
        Expr::True => Expression::int(1),
        Expr::False => Expression::int(0),
        Expr::List(items) if items.is_empty() => Expression::Literal(Literal::List),
        Expr::List(items) => intrinsic(Intrinsic::List, items.iter().map(expr).collect()),
        Expr::Call(t, args) => Expression::call(expr(t), args.iter().map(expr).collect()),
        Expr::Binary(op, l, r) => binary(*op, expr(l), expr(r)),
        Expr::Compare(_, l, r) => intrinsic(Intrinsic::Compare, vec![expr(l), expr(r)]),
        Expr::Not(x) => intrinsic(Intrinsic::Not, vec![expr(x)]),
        Expr::Bool(BoolOp::And, l, r) => intrinsic(Intrinsic::And, vec![expr(l), expr(r)]),
        Expr::Bool(BoolOp::Or, l, r) => intrinsic(Intrinsic::Or, vec![expr(l), expr(r)]),
        Expr::Neg(x) => match **x {
            Expr::Int(v) => Expression::int(v.wrapping_neg()),
            _ => intrinsic(Intrinsic::Sub, vec![Expression::int(0), expr(x)]),
        },
    }
}
