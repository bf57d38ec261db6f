//! Structured syntax tree of the subject language, before lowering.

#[derive(Clone, Debug, PartialEq)]
pub struct Module {
    pub items: Vec<Item>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Item {
    Function(FunctionDef),
    Class(ClassDef),
}

#[derive(Clone, Debug, PartialEq)]
pub struct FunctionDef {
    pub name: String,
    pub params: Vec<String>,
    pub body: Vec<Stmt>,
    pub line: u32,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClassDef {
    pub name: String,
    pub base: Option<String>,
    pub methods: Vec<FunctionDef>,
    pub line: u32,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Stmt {
    pub kind: StmtKind,
    pub line: u32,
}

#[derive(Clone, Debug, PartialEq)]
pub enum StmtKind {
    Assign {
        target: Expr,
        value: Expr,
    },
    AugAssign {
        target: Expr,
        op: BinOp,
        value: Expr,
    },
    Expr(Expr),
    Return(Option<Expr>),
    /// `if`/`elif` arms in order, then the `else` block (possibly empty).
    If {
        branches: Vec<Branch>,
        orelse: Vec<Stmt>,
    },
    While {
        cond: Expr,
        body: Vec<Stmt>,
    },
    For {
        var: String,
        iter: Expr,
        body: Vec<Stmt>,
    },
    Pass,
    Break,
    Continue,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Branch {
    pub cond: Expr,
    /// Line of the `if`/`elif` keyword.
    pub line: u32,
    pub body: Vec<Stmt>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CmpOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoolOp {
    And,
    Or,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Name(String),
    Attr(Box<Expr>, String),
    Int(i64),
    Str(String),
    List(Vec<Expr>),
    Call(Box<Expr>, Vec<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Compare(CmpOp, Box<Expr>, Box<Expr>),
    Not(Box<Expr>),
    Bool(BoolOp, Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
    None,
    True,
    False,
}

impl Expr {
    pub fn contains_call(&self) -> bool {
        match self {
            Expr::Call(..) => true,
            Expr::Attr(e, _) | Expr::Not(e) | Expr::Neg(e) => e.contains_call(),
            Expr::List(items) => items.iter().any(Expr::contains_call),
            Expr::Binary(_, l, r) | Expr::Compare(_, l, r) | Expr::Bool(_, l, r) => {
                l.contains_call() || r.contains_call()
            }
            Expr::Name(_) | Expr::Int(_) | Expr::Str(_) | Expr::None | Expr::True | Expr::False => {
                false
            }
        }
    }
}

impl Module {
    pub fn functions(&self) -> impl Iterator<Item = &FunctionDef> {
        self.items.iter().filter_map(|i| match i {
            Item::Function(f) => Some(f),
            Item::Class(_) => None,
        })
    }

    pub fn classes(&self) -> impl Iterator<Item = &ClassDef> {
        self.items.iter().filter_map(|i| match i {
            Item::Class(c) => Some(c),
            Item::Function(_) => None,
        })
    }
}
