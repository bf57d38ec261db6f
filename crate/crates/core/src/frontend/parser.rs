//! Recursive-descent parser for the accepted subset.

use super::ast::*;
use super::lexer::{tokenize, Tok, Token};
use super::ParseError;

/// Python keywords with no place in the subset.
const UNSUPPORTED_KEYWORDS: [&str; 18] = [
    "import", "from", "try", "except", "finally", "with", "lambda", "yield", "global", "nonlocal",
    "del", "assert", "raise", "async", "await", "is", "in", "as",
];

pub fn parse_module(src: &str) -> Result<Module, ParseError> {
    let tokens = tokenize(src)?;
    let mut p = Parser { tokens, pos: 0 };
    p.module()
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

fn is_keyword(name: &str) -> bool {
    matches!(
        name,
        "def"
            | "class"
            | "if"
            | "elif"
            | "else"
            | "while"
            | "for"
            | "return"
            | "pass"
            | "break"
            | "continue"
            | "and"
            | "or"
            | "not"
            | "None"
            | "True"
            | "False"
    ) || UNSUPPORTED_KEYWORDS.contains(&name)
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.tokens[(self.pos + k).min(self.tokens.len() - 1)].tok
    }

    fn next(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn syntax(&self, message: impl Into<String>) -> ParseError {
        let t = self.peek();
        ParseError::Syntax {
            line: t.line,
            column: t.column,
            message: message.into(),
        }
    }

    fn unsupported(&self, construct: impl Into<String>) -> ParseError {
        let t = self.peek();
        ParseError::Unsupported {
            line: t.line,
            column: t.column,
            construct: construct.into(),
        }
    }

    fn at_op(&self, op: &str) -> bool {
        matches!(&self.peek().tok, Tok::Op(o) if *o == op)
    }

    fn at_kw(&self, kw: &str) -> bool {
        matches!(&self.peek().tok, Tok::Name(n) if n == kw)
    }

    fn eat_op(&mut self, op: &str) -> bool {
        if self.at_op(op) {
            self.next();
            true
        } else {
            false
        }
    }

    fn expect_op(&mut self, op: &str) -> Result<(), ParseError> {
        if self.eat_op(op) {
            Ok(())
        } else {
            Err(self.syntax(format!(
                "expected `{op}`, found {}",
                describe(&self.peek().tok)
            )))
        }
    }

    fn expect_kw(&mut self, kw: &str) -> Result<(), ParseError> {
        if self.at_kw(kw) {
            self.next();
            Ok(())
        } else {
            Err(self.syntax(format!(
                "expected `{kw}`, found {}",
                describe(&self.peek().tok)
            )))
        }
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        match &self.peek().tok {
            Tok::Name(n) if !is_keyword(n) => {
                let n = n.clone();
                self.next();
                Ok(n)
            }
            other => Err(self.syntax(format!("expected identifier, found {}", describe(other)))),
        }
    }

    fn expect_newline(&mut self) -> Result<(), ParseError> {
        match self.peek().tok {
            Tok::Newline => {
                self.next();
                Ok(())
            }
            Tok::Eof => Ok(()),
            Tok::Op(";") => Err(self.unsupported("`;`")),
            _ => Err(self.syntax(format!(
                "expected end of line, found {}",
                describe(&self.peek().tok)
            ))),
        }
    }

    fn module(&mut self) -> Result<Module, ParseError> {
        let mut items = Vec::new();
        loop {
            match &self.peek().tok {
                Tok::Eof => break,
                Tok::Newline => {
                    self.next();
                }
                Tok::Indent => return Err(self.syntax("unexpected indent")),
                Tok::Name(n) if n == "def" => items.push(Item::Function(self.funcdef()?)),
                Tok::Name(n) if n == "class" => items.push(Item::Class(self.classdef()?)),
                Tok::Name(n) if n == "pass" => {
                    self.next();
                    self.expect_newline()?;
                }
                Tok::Str(_) => {
                    self.expr()?;
                    self.expect_newline()?;
                }
                _ => return Err(self.unsupported("module-level statement")),
            }
        }
        Ok(Module { items })
    }

    fn funcdef(&mut self) -> Result<FunctionDef, ParseError> {
        let line = self.peek().line;
        self.expect_kw("def")?;
        let name = self.ident()?;
        self.expect_op("(")?;
        let mut params = Vec::new();
        while !self.at_op(")") {
            if self.at_op("*") {
                return Err(self.unsupported("variadic parameter"));
            }
            let p = self.ident()?;
            if self.at_op("=") {
                return Err(self.unsupported("default parameter value"));
            }
            if self.at_op(":") {
                return Err(self.unsupported("type annotation"));
            }
            if params.contains(&p) {
                return Err(self.syntax(format!("duplicate parameter `{p}`")));
            }
            params.push(p);
            if !self.eat_op(",") {
                break;
            }
        }
        self.expect_op(")")?;
        if self.at_op("-") {
            return Err(self.unsupported("return annotation"));
        }
        self.expect_op(":")?;
        let body = self.block()?;
        Ok(FunctionDef {
            name,
            params,
            body,
            line,
        })
    }

    fn classdef(&mut self) -> Result<ClassDef, ParseError> {
        let line = self.peek().line;
        self.expect_kw("class")?;
        let name = self.ident()?;
        let mut base = None;
        if self.eat_op("(") {
            if !self.at_op(")") {
                let b = self.ident()?;
                if self.at_op(",") {
                    return Err(self.unsupported("multiple inheritance"));
                }
                if self.at_op("=") {
                    return Err(self.unsupported("class keyword argument"));
                }
                if b != "object" {
                    base = Some(b);
                }
            }
            self.expect_op(")")?;
        }
        self.expect_op(":")?;
        let mut methods = Vec::new();
        if !matches!(self.peek().tok, Tok::Newline) {
            // One-line body: `class A: pass`
            self.class_member(&mut methods)?;
            return Ok(ClassDef {
                name,
                base,
                methods,
                line,
            });
        }
        self.next();
        if !matches!(self.peek().tok, Tok::Indent) {
            return Err(self.syntax("expected an indented block"));
        }
        self.next();
        while !matches!(self.peek().tok, Tok::Dedent | Tok::Eof) {
            if matches!(self.peek().tok, Tok::Newline) {
                self.next();
                continue;
            }
            self.class_member(&mut methods)?;
        }
        self.next();
        Ok(ClassDef {
            name,
            base,
            methods,
            line,
        })
    }

    fn class_member(&mut self, methods: &mut Vec<FunctionDef>) -> Result<(), ParseError> {
        match &self.peek().tok {
            Tok::Name(n) if n == "def" => methods.push(self.funcdef()?),
            Tok::Name(n) if n == "pass" => {
                self.next();
                self.expect_newline()?;
            }
            Tok::Str(_) => {
                self.expr()?;
                self.expect_newline()?;
            }
            Tok::Name(n) if n == "class" => return Err(self.unsupported("nested class")),
            _ => return Err(self.unsupported("class-level statement")),
        }
        Ok(())
    }

    fn block(&mut self) -> Result<Vec<Stmt>, ParseError> {
        if !matches!(self.peek().tok, Tok::Newline) {
            let s = self.simple_stmt()?;
            self.expect_newline()?;
            return Ok(vec![s]);
        }
        self.next();
        if !matches!(self.peek().tok, Tok::Indent) {
            return Err(self.syntax("expected an indented block"));
        }
        self.next();
        let mut body = Vec::new();
        while !matches!(self.peek().tok, Tok::Dedent | Tok::Eof) {
            if matches!(self.peek().tok, Tok::Newline) {
                self.next();
                continue;
            }
            body.push(self.stmt()?);
        }
        self.next();
        Ok(body)
    }

    fn stmt(&mut self) -> Result<Stmt, ParseError> {
        let line = self.peek().line;
        let Tok::Name(kw) = &self.peek().tok else {
            let s = self.simple_stmt()?;
            self.expect_newline()?;
            return Ok(s);
        };
        match kw.as_str() {
            "if" => {
                self.next();
                let mut branches = Vec::new();
                let cond = self.expr()?;
                self.expect_op(":")?;
                branches.push(Branch {
                    cond,
                    line,
                    body: self.block()?,
                });
                let mut orelse = Vec::new();
                loop {
                    if self.at_kw("elif") {
                        let line = self.next().line;
                        let cond = self.expr()?;
                        self.expect_op(":")?;
                        branches.push(Branch {
                            cond,
                            line,
                            body: self.block()?,
                        });
                    } else if self.at_kw("else") {
                        self.next();
                        self.expect_op(":")?;
                        orelse = self.block()?;
                        break;
                    } else {
                        break;
                    }
                }
                Ok(Stmt {
                    kind: StmtKind::If { branches, orelse },
                    line,
                })
            }
            "while" => {
                self.next();
                let cond = self.expr()?;
                self.expect_op(":")?;
                let body = self.block()?;
                if self.at_kw("else") {
                    return Err(self.unsupported("loop `else` clause"));
                }
                Ok(Stmt {
                    kind: StmtKind::While { cond, body },
                    line,
                })
            }
            "for" => {
                self.next();
                let var = self.ident()?;
                if self.at_op(",") {
                    return Err(self.unsupported("multiple `for` targets"));
                }
                self.expect_kw("in")?;
                let iter = self.expr()?;
                self.expect_op(":")?;
                let body = self.block()?;
                if self.at_kw("else") {
                    return Err(self.unsupported("loop `else` clause"));
                }
                Ok(Stmt {
                    kind: StmtKind::For { var, iter, body },
                    line,
                })
            }
            "def" => Err(self.unsupported("nested function")),
            "class" => Err(self.unsupported("nested class")),
            "elif" | "else" => Err(self.syntax(format!("`{kw}` without `if`"))),
            _ => {
                let s = self.simple_stmt()?;
                self.expect_newline()?;
                Ok(s)
            }
        }
    }

    fn simple_stmt(&mut self) -> Result<Stmt, ParseError> {
        let line = self.peek().line;
        if let Tok::Name(kw) = &self.peek().tok {
            let kind = match kw.as_str() {
                "pass" => Some(StmtKind::Pass),
                "break" => Some(StmtKind::Break),
                "continue" => Some(StmtKind::Continue),
                _ => None,
            };
            if let Some(kind) = kind {
                self.next();
                return Ok(Stmt { kind, line });
            }
            if kw == "return" {
                self.next();
                let value = if matches!(self.peek().tok, Tok::Newline | Tok::Eof) {
                    None
                } else {
                    Some(self.expr()?)
                };
                return Ok(Stmt {
                    kind: StmtKind::Return(value),
                    line,
                });
            }
            if UNSUPPORTED_KEYWORDS.contains(&kw.as_str()) {
                return Err(self.unsupported(format!("`{kw}` statement")));
            }
        }
        let target = self.expr()?;
        let aug = match &self.peek().tok {
            Tok::Op("+=") => Some(BinOp::Add),
            Tok::Op("-=") => Some(BinOp::Sub),
            Tok::Op("*=") => Some(BinOp::Mul),
            _ => None,
        };
        if let Some(op) = aug {
            check_target(&target).map_err(|c| self.unsupported(c))?;
            self.next();
            let value = self.expr()?;
            return Ok(Stmt {
                kind: StmtKind::AugAssign { target, op, value },
                line,
            });
        }
        if self.eat_op("=") {
            check_target(&target).map_err(|c| self.unsupported(c))?;
            let value = self.expr()?;
            if self.at_op("=") {
                return Err(self.unsupported("chained assignment"));
            }
            return Ok(Stmt {
                kind: StmtKind::Assign { target, value },
                line,
            });
        }
        Ok(Stmt {
            kind: StmtKind::Expr(target),
            line,
        })
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let e = self.or_expr()?;
        if self.at_op(",") {
            return Err(self.unsupported("tuple"));
        }
        if self.at_kw("if") {
            return Err(self.unsupported("conditional expression"));
        }
        Ok(e)
    }

    fn or_expr(&mut self) -> Result<Expr, ParseError> {
        let mut l = self.and_expr()?;
        while self.at_kw("or") {
            self.next();
            let r = self.and_expr()?;
            l = Expr::Bool(BoolOp::Or, Box::new(l), Box::new(r));
        }
        Ok(l)
    }

    fn and_expr(&mut self) -> Result<Expr, ParseError> {
        let mut l = self.not_expr()?;
        while self.at_kw("and") {
            self.next();
            let r = self.not_expr()?;
            l = Expr::Bool(BoolOp::And, Box::new(l), Box::new(r));
        }
        Ok(l)
    }

    fn not_expr(&mut self) -> Result<Expr, ParseError> {
        if self.at_kw("not") {
            self.next();
            return Ok(Expr::Not(Box::new(self.not_expr()?)));
        }
        self.comparison()
    }

    fn comparison(&mut self) -> Result<Expr, ParseError> {
        let l = self.arith()?;
        let op = match &self.peek().tok {
            Tok::Op("==") => CmpOp::Eq,
            Tok::Op("!=") => CmpOp::Ne,
            Tok::Op("<") => CmpOp::Lt,
            Tok::Op("<=") => CmpOp::Le,
            Tok::Op(">") => CmpOp::Gt,
            Tok::Op(">=") => CmpOp::Ge,
            Tok::Name(n) if n == "in" || n == "is" => {
                return Err(self.unsupported(format!("`{n}` operator")))
            }
            Tok::Name(n) if n == "not" => return Err(self.unsupported("`not in` operator")),
            _ => return Ok(l),
        };
        self.next();
        let r = self.arith()?;
        if matches!(
            &self.peek().tok,
            Tok::Op("==" | "!=" | "<" | "<=" | ">" | ">=")
        ) {
            return Err(self.unsupported("chained comparison"));
        }
        Ok(Expr::Compare(op, Box::new(l), Box::new(r)))
    }

    fn arith(&mut self) -> Result<Expr, ParseError> {
        let mut l = self.term()?;
        loop {
            let op = match &self.peek().tok {
                Tok::Op("+") => BinOp::Add,
                Tok::Op("-") => BinOp::Sub,
                _ => return Ok(l),
            };
            self.next();
            let r = self.term()?;
            l = Expr::Binary(op, Box::new(l), Box::new(r));
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut l = self.unary()?;
        while self.at_op("*") {
            self.next();
            let r = self.unary()?;
            l = Expr::Binary(BinOp::Mul, Box::new(l), Box::new(r));
        }
        Ok(l)
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.eat_op("-") {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        if self.eat_op("+") {
            return self.unary();
        }
        self.postfix()
    }

    fn postfix(&mut self) -> Result<Expr, ParseError> {
        let mut e = self.atom()?;
        loop {
            if self.eat_op(".") {
                let field = match &self.peek().tok {
                    // Keywords are not valid attribute names either.
                    Tok::Name(n) if !is_keyword(n) => n.clone(),
                    other => {
                        return Err(self.syntax(format!(
                            "expected attribute name, found {}",
                            describe(other)
                        )))
                    }
                };
                self.next();
                e = Expr::Attr(Box::new(e), field);
            } else if self.at_op("(") {
                self.next();
                let mut args = Vec::new();
                while !self.at_op(")") {
                    if self.at_op("*") {
                        return Err(self.unsupported("argument unpacking"));
                    }
                    if matches!(self.peek().tok, Tok::Name(_))
                        && matches!(self.peek_at(1), Tok::Op("="))
                    {
                        return Err(self.unsupported("keyword argument"));
                    }
                    args.push(self.or_expr()?);
                    if self.at_kw("for") {
                        return Err(self.unsupported("generator expression"));
                    }
                    if !self.eat_op(",") {
                        break;
                    }
                }
                self.expect_op(")")?;
                e = Expr::Call(Box::new(e), args);
            } else if self.at_op("[") {
                return Err(self.unsupported("subscript"));
            } else {
                return Ok(e);
            }
        }
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let t = self.peek().clone();
        match t.tok {
            Tok::Int(v) => {
                self.next();
                Ok(Expr::Int(v))
            }
            Tok::Str(s) => {
                self.next();
                let mut s = s;
                while let Tok::Str(more) = &self.peek().tok {
                    s.push_str(more);
                    self.next();
                }
                Ok(Expr::Str(s))
            }
            Tok::Name(n) => match n.as_str() {
                "None" => {
                    self.next();
                    Ok(Expr::None)
                }
                "True" => {
                    self.next();
                    Ok(Expr::True)
                }
                "False" => {
                    self.next();
                    Ok(Expr::False)
                }
                "lambda" | "yield" | "await" => Err(self.unsupported(format!("`{n}` expression"))),
                _ if is_keyword(&n) => Err(self.syntax(format!("unexpected keyword `{n}`"))),
                _ => {
                    self.next();
                    Ok(Expr::Name(n))
                }
            },
            Tok::Op("(") => {
                self.next();
                if self.at_op(")") {
                    return Err(self.unsupported("tuple"));
                }
                let e = self.or_expr()?;
                if self.at_op(",") {
                    return Err(self.unsupported("tuple"));
                }
                self.expect_op(")")?;
                Ok(e)
            }
            Tok::Op("[") => {
                self.next();
                let mut items = Vec::new();
                while !self.at_op("]") {
                    items.push(self.or_expr()?);
                    if self.at_kw("for") {
                        return Err(self.unsupported("list comprehension"));
                    }
                    if !self.eat_op(",") {
                        break;
                    }
                }
                self.expect_op("]")?;
                Ok(Expr::List(items))
            }
            other => Err(self.syntax(format!("expected expression, found {}", describe(&other)))),
        }
    }
}

fn check_target(e: &Expr) -> Result<(), String> {
    match e {
        Expr::Name(_) | Expr::Attr(..) => Ok(()),
        _ => Err("assignment target other than a name or attribute".into()),
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Name(n) => format!("`{n}`"),
        Tok::Int(v) => format!("`{v}`"),
        Tok::Str(_) => "string literal".into(),
        Tok::Op(o) => format!("`{o}`"),
        Tok::Newline => "end of line".into(),
        Tok::Indent => "indent".into(),
        Tok::Dedent => "dedent".into(),
        Tok::Eof => "end of file".into(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn body(src: &str) -> Vec<Stmt> {
        let m = parse_module(src).unwrap();
        match m.items.into_iter().next().unwrap() {
            Item::Function(f) => f.body,
            Item::Class(_) => panic!("expected function"),
        }
    }

    #[test]
    fn parses_classes_with_bases_and_methods() {
        let m = parse_module(
            "class A(object):\n    'doc'\n    def f(self, x):\n        pass\nclass B(A): pass\n",
        )
        .unwrap();
        let classes: Vec<_> = m.classes().collect();
        assert_eq!(classes[0].base, None);
        assert_eq!(classes[0].methods[0].params, vec!["self", "x"]);
        assert_eq!(classes[1].base.as_deref(), Some("A"));
        assert!(classes[1].methods.is_empty());
    }

    #[test]
    fn operator_precedence() {
        let b = body("def f():\n    return not a + b * c == d or e and g\n");
        let StmtKind::Return(Some(e)) = &b[0].kind else {
            panic!()
        };
        let Expr::Bool(BoolOp::Or, l, r) = e else {
            panic!("{e:?}")
        };
        assert!(matches!(**r, Expr::Bool(BoolOp::And, ..)));
        let Expr::Not(inner) = &**l else { panic!() };
        let Expr::Compare(CmpOp::Eq, sum, _) = &**inner else {
            panic!()
        };
        let Expr::Binary(BinOp::Add, _, prod) = &**sum else {
            panic!()
        };
        assert!(matches!(**prod, Expr::Binary(BinOp::Mul, ..)));
    }

    #[test]
    fn compound_statements_nest() {
        let b = body(
            "def f(x):\n    if x:\n        g()\n    elif h():\n        pass\n    else:\n        while 1:\n            break\n    for i in x: i.go()\n",
        );
        assert_eq!(b.len(), 2);
        let StmtKind::If { branches, orelse } = &b[0].kind else {
            panic!()
        };
        assert_eq!(branches.len(), 2);
        assert!(matches!(orelse[0].kind, StmtKind::While { .. }));
        assert_eq!(b[1].line, 9);
    }

    #[test]
    fn unsupported_constructs_fail_loudly() {
        for (src, what) in [
            ("import os\n", "module-level statement"),
            ("def f():\n    import os\n", "`import` statement"),
            (
                "def f():\n    return [x for x in y]\n",
                "list comprehension",
            ),
            ("def f():\n    g(a=1)\n", "keyword argument"),
            ("def f():\n    a, b = 1, 2\n", "tuple"),
            ("def f():\n    return x[0]\n", "subscript"),
            ("def f():\n    def g():\n        pass\n", "nested function"),
            ("class A(B, C):\n    pass\n", "multiple inheritance"),
            ("def f(x=1):\n    pass\n", "default parameter value"),
            (
                "def f():\n    for a, b in x:\n        pass\n",
                "multiple `for` targets",
            ),
            (
                "def f():\n    return a if b else c\n",
                "conditional expression",
            ),
            ("def f():\n    return a in b\n", "`in` operator"),
        ] {
            match parse_module(src) {
                Err(ParseError::Unsupported { construct, .. }) => {
                    assert_eq!(construct, what, "{src}")
                }
                other => panic!("{src}: {other:?}"),
            }
        }
    }

    #[test]
    fn syntax_errors_carry_positions() {
        let err = parse_module("def f(:\n    pass\n").unwrap_err();
        assert_eq!(
            err,
            ParseError::Syntax {
                line: 1,
                column: 7,
                message: "expected identifier, found `:`".into()
            }
        );
        assert!(matches!(
            parse_module("def f():\nreturn 1\n"),
            Err(ParseError::Syntax { line: 2, .. })
        ));
        assert!(matches!(
            parse_module("  def f(): pass\n"),
            Err(ParseError::Syntax { .. })
        ));
        assert!(matches!(
            parse_module("def f():\n    x = = 1\n"),
            Err(ParseError::Syntax { .. })
        ));
    }
}
