//! Language-independent intermediate representation.
//!
//! A [`Program`] is a flat table of [`TypeDef`]s (modules, classes, methods and
//! builtins) plus one [`MethodBody`] per method. Method bodies hold only three
//! statement kinds: assignments, invocations and returns. Everything else a
//! front end sees (branches, loops, operators) has been lowered away before a
//! `Program` is built.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub mod json;

/// Qualified name of the single module type of a compilation unit.
pub const MODULE_NAME: &str = "<module>";

/// Reserved variable name of a method's return slot. Not a valid identifier
/// in the subject language.
pub const RETURN_SLOT: &str = "μ";

/// Index of a type in its [`Program`]. Ids are assigned in registration order
/// (builtins first, then source order), so they are stable across runs.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct TypeId(u32);

impl TypeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Statement node identifier, unique within a program.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub u32);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n{}", self.0)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TypeKind {
    Module,
    Class,
    Method,
    Builtin,
}

/// Builtin operations that are evaluated in place by the analysis. They are
/// not methods and never appear as call graph nodes.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Intrinsic {
    Range,
    ItemOf,
    GetAttr,
    Len,
    Print,
    Add,
    Sub,
    Mul,
    Compare,
    Not,
    And,
    Or,
    List,
}

impl Intrinsic {
    pub const ALL: [Intrinsic; 13] = [
        Intrinsic::Range,
        Intrinsic::ItemOf,
        Intrinsic::GetAttr,
        Intrinsic::Len,
        Intrinsic::Print,
        Intrinsic::Add,
        Intrinsic::Sub,
        Intrinsic::Mul,
        Intrinsic::Compare,
        Intrinsic::Not,
        Intrinsic::And,
        Intrinsic::Or,
        Intrinsic::List,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Intrinsic::Range => "range",
            Intrinsic::ItemOf => "itemOf",
            Intrinsic::GetAttr => "getattr",
            Intrinsic::Len => "len",
            Intrinsic::Print => "print",
            Intrinsic::Add => "__add__",
            Intrinsic::Sub => "__sub__",
            Intrinsic::Mul => "__mul__",
            Intrinsic::Compare => "__cmp__",
            Intrinsic::Not => "__not__",
            Intrinsic::And => "__and__",
            Intrinsic::Or => "__or__",
            Intrinsic::List => "__list__",
        }
    }

    pub fn from_name(name: &str) -> Option<Intrinsic> {
        Intrinsic::ALL.into_iter().find(|i| i.name() == name)
    }
}

/// Builtin methods with a native effect (as opposed to an IR body).
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum NativeMethod {
    ListAppend,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TypeDef {
    pub kind: TypeKind,
    pub qualified_name: String,
    /// Unqualified name (`eat` for `Banana:eat`).
    pub name: String,
    /// Lexical container.
    pub parent: Option<TypeId>,
    /// Declared base class (classes only).
    pub superclass: Option<TypeId>,
    /// Constructors synthesized for classes that declare none.
    pub synthetic: bool,
    pub intrinsic: Option<Intrinsic>,
    pub native: Option<NativeMethod>,
}

/// Payload of a literal type value.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Payload {
    Int(i64),
    Str(Arc<str>),
}

impl fmt::Display for Payload {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Payload::Int(v) => write!(f, "{v}"),
            Payload::Str(s) => write!(f, "{s:?}"),
        }
    }
}

/// An abstract value: a type, optionally carrying a literal payload.
/// `Str("If")` and `Str("Name")` are distinct values.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct TypeValue {
    pub ty: TypeId,
    pub literal: Option<Payload>,
}

impl TypeValue {
    pub fn of(ty: TypeId) -> Self {
        TypeValue { ty, literal: None }
    }

    pub fn with_literal(ty: TypeId, literal: Payload) -> Self {
        TypeValue {
            ty,
            literal: Some(literal),
        }
    }

    /// The value with its payload dropped.
    pub fn bare(&self) -> Self {
        TypeValue::of(self.ty)
    }
}

/// A `(scope, name)` pair. Scopes are methods for locals and parameters,
/// classes and builtins for fields.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Variable {
    pub scope: TypeId,
    pub name: Arc<str>,
}

impl Variable {
    pub fn new(scope: TypeId, name: &str) -> Self {
        Variable {
            scope,
            name: Arc::from(name),
        }
    }

    pub fn return_slot(method: TypeId) -> Self {
        Variable::new(method, RETURN_SLOT)
    }

    pub fn is_return_slot(&self) -> bool {
        &*self.name == RETURN_SLOT
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Literal {
    Int(i64),
    Str(String),
    List,
    None,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Invocation {
    pub target: Box<Expression>,
    pub args: Vec<Expression>,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Expression {
    Name(String),
    MemberAccess {
        object: Box<Expression>,
        field: String,
    },
    Literal(Literal),
    Invocation(Invocation),
}

impl Expression {
    pub fn name(n: impl Into<String>) -> Self {
        Expression::Name(n.into())
    }

    pub fn member(object: Expression, field: impl Into<String>) -> Self {
        Expression::MemberAccess {
            object: Box::new(object),
            field: field.into(),
        }
    }

    pub fn call(target: Expression, args: Vec<Expression>) -> Self {
        Expression::Invocation(Invocation {
            target: Box::new(target),
            args,
        })
    }

    pub fn int(v: i64) -> Self {
        Expression::Literal(Literal::Int(v))
    }

    pub fn str(s: impl Into<String>) -> Self {
        Expression::Literal(Literal::Str(s.into()))
    }

    pub fn contains_invocation(&self) -> bool {
        match self {
            Expression::Invocation(_) => true,
            Expression::MemberAccess { object, .. } => object.contains_invocation(),
            Expression::Name(_) | Expression::Literal(_) => false,
        }
    }
}

impl fmt::Display for Expression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expression::Name(n) => f.write_str(n),
            Expression::MemberAccess { object, field } => write!(f, "{object}.{field}"),
            Expression::Literal(Literal::Int(v)) => write!(f, "{v}"),
            Expression::Literal(Literal::Str(s)) => write!(f, "{s:?}"),
            Expression::Literal(Literal::List) => f.write_str("[]"),
            Expression::Literal(Literal::None) => f.write_str("None"),
            Expression::Invocation(inv) => write!(f, "{inv}"),
        }
    }
}

impl fmt::Display for Invocation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.target)?;
        for (i, a) in self.args.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{a}")?;
        }
        f.write_str(")")
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum StatementKind {
    Assignment { lhs: Expression, rhs: Expression },
    Invocation(Invocation),
    Return(Option<Expression>),
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct StatementNode {
    pub id: NodeId,
    /// 1-based source line, 0 when unknown.
    pub line: u32,
    pub owner: TypeId,
    pub kind: StatementKind,
}

impl fmt::Display for StatementNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            StatementKind::Assignment { lhs, rhs } => write!(f, "{lhs} = {rhs}"),
            StatementKind::Invocation(inv) => write!(f, "{inv}"),
            StatementKind::Return(Some(e)) => write!(f, "return {e}"),
            StatementKind::Return(None) => f.write_str("return"),
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct MethodBody {
    pub params: Vec<String>,
    pub body: Vec<StatementNode>,
    /// Whether control can reach the end of the body without a `return`.
    pub falls_through: bool,
}

/// Ids of the builtin types every program carries.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Builtins {
    pub integer: TypeId,
    pub str: TypeId,
    pub array: TypeId,
    pub none_type: TypeId,
    pub array_append: TypeId,
}

/// Field of `array` holding the element types of every list.
pub const ITEMS_FIELD: &str = "items";

#[derive(Debug, Error, PartialEq, Eq)]
pub enum IrError {
    #[error("duplicate type `{0}`")]
    DuplicateType(String),
    #[error("unknown type `{0}`")]
    UnknownType(String),
    #[error("`{child}` cannot be nested in `{parent}`")]
    InvalidParent { child: String, parent: String },
    #[error("`{0}` is not a method")]
    NotAMethod(String),
    #[error("inheritance cycle through `{0}`")]
    InheritanceCycle(String),
    #[error("statement {node} in `{method}`: {reason}")]
    InvalidStatement {
        method: String,
        node: NodeId,
        reason: String,
    },
    #[error("duplicate statement id {0}")]
    DuplicateNode(NodeId),
}

/// A whole program: types, method bodies and the lookup tables over them.
/// Immutable once built.
#[derive(Clone, Debug)]
pub struct Program {
    types: Vec<TypeDef>,
    by_name: HashMap<String, TypeId>,
    members: HashMap<(TypeId, String), TypeId>,
    methods: BTreeMap<TypeId, MethodBody>,
    entry_points: Vec<TypeId>,
    module: TypeId,
    builtins: Builtins,
}

impl PartialEq for Program {
    fn eq(&self, other: &Self) -> bool {
        self.types == other.types
            && self.methods == other.methods
            && self.entry_points == other.entry_points
    }
}

impl Program {
    pub fn types(&self) -> impl Iterator<Item = (TypeId, &TypeDef)> {
        self.types
            .iter()
            .enumerate()
            .map(|(i, t)| (TypeId(i as u32), t))
    }

    pub fn type_def(&self, id: TypeId) -> &TypeDef {
        &self.types[id.index()]
    }

    pub fn kind(&self, id: TypeId) -> TypeKind {
        self.types[id.index()].kind
    }

    pub fn qualified_name(&self, id: TypeId) -> &str {
        &self.types[id.index()].qualified_name
    }

    pub fn type_named(&self, qualified_name: &str) -> Option<TypeId> {
        self.by_name.get(qualified_name).copied()
    }

    /// Resolves a qualified name to a method with a body.
    pub fn method_named(&self, qualified_name: &str) -> Option<TypeId> {
        self.type_named(qualified_name)
            .filter(|id| self.methods.contains_key(id))
    }

    pub fn module(&self) -> TypeId {
        self.module
    }

    pub fn builtins(&self) -> &Builtins {
        &self.builtins
    }

    pub fn methods(&self) -> impl Iterator<Item = (TypeId, &MethodBody)> {
        self.methods.iter().map(|(k, v)| (*k, v))
    }

    pub fn method(&self, id: TypeId) -> Option<&MethodBody> {
        self.methods.get(&id)
    }

    pub fn entry_points(&self) -> &[TypeId] {
        &self.entry_points
    }

    pub fn is_builtin(&self, id: TypeId) -> bool {
        let def = self.type_def(id);
        def.kind == TypeKind::Builtin || def.native.is_some()
    }

    /// Whether variables of this scope are method-local (locals, parameters,
    /// the return slot) rather than fields.
    pub fn is_method_scope(&self, id: TypeId) -> bool {
        self.kind(id) == TypeKind::Method
    }

    /// Value types that may carry a literal payload.
    pub fn is_literal_type(&self, id: TypeId) -> bool {
        id == self.builtins.integer || id == self.builtins.str
    }

    pub fn intrinsic(&self, id: TypeId) -> Option<Intrinsic> {
        self.type_def(id).intrinsic
    }

    pub fn intrinsic_id(&self, intrinsic: Intrinsic) -> TypeId {
        self.by_name[intrinsic.name()]
    }

    /// Own member of a type (no inheritance).
    pub fn member(&self, owner: TypeId, name: &str) -> Option<TypeId> {
        self.members.get(&(owner, name.to_string())).copied()
    }

    /// Names visible from any method body: module-level classes and
    /// functions, and the intrinsics.
    pub fn lookup_global(&self, name: &str) -> Option<TypeId> {
        self.member(self.module, name)
            .or_else(|| Intrinsic::from_name(name).map(|i| self.intrinsic_id(i)))
    }

    /// Superclass chain starting at `class` itself.
    pub fn ancestry(&self, class: TypeId) -> impl Iterator<Item = TypeId> + '_ {
        std::iter::successors(Some(class), move |c| self.type_def(*c).superclass)
    }

    /// Method named `name` on `receiver`: own methods first, then up the
    /// superclass chain. Absent for non-class receivers and missing names.
    pub fn lookup_method(&self, receiver: TypeId, name: &str) -> Option<TypeId> {
        match self.kind(receiver) {
            TypeKind::Class | TypeKind::Builtin => {}
            TypeKind::Method | TypeKind::Module => return None,
        }
        self.ancestry(receiver)
            .filter_map(|t| self.member(t, name))
            .find(|m| self.kind(*m) == TypeKind::Method)
    }

    /// All methods callable on `receiver`, including inherited ones,
    /// nearest definition winning.
    pub fn all_methods(&self, receiver: TypeId) -> Vec<TypeId> {
        let mut seen = BTreeMap::new();
        for t in self.ancestry(receiver) {
            for ((owner, name), m) in &self.members {
                if *owner == t && self.kind(*m) == TypeKind::Method {
                    seen.entry(name.clone()).or_insert(*m);
                }
            }
        }
        seen.into_values().collect()
    }

    /// Classes (and builtin types) whose lookup of `method`'s name yields
    /// `method`, i.e. every possible receiver of a bound-method value.
    pub fn receivers_of(&self, method: TypeId) -> Vec<TypeId> {
        let name = &self.type_def(method).name;
        self.types()
            .filter(|(_, d)| matches!(d.kind, TypeKind::Class | TypeKind::Builtin))
            .filter(|(id, _)| self.lookup_method(*id, name) == Some(method))
            .map(|(id, _)| id)
            .collect()
    }

    /// Constructor run when `class` is instantiated.
    pub fn constructor(&self, class: TypeId) -> Option<TypeId> {
        self.lookup_method(class, "__init__")
    }

    /// Method containing `node`.
    pub fn scope_of(&self, node: &StatementNode) -> TypeId {
        node.owner
    }

    /// Statement id to source line, over every method body.
    pub fn line_map(&self) -> BTreeMap<NodeId, u32> {
        self.methods
            .values()
            .flat_map(|m| m.body.iter().map(|s| (s.id, s.line)))
            .collect()
    }

    pub fn statement_count(&self) -> usize {
        self.methods.values().map(|m| m.body.len()).sum()
    }

    /// Replaces one method's statement list, keeping everything else. Used to
    /// check that results do not depend on statement order.
    pub fn with_body(&self, method: TypeId, body: Vec<StatementNode>) -> Program {
        let mut p = self.clone();
        if let Some(m) = p.methods.get_mut(&method) {
            m.body = body;
        }
        p
    }
}

/// Incremental construction of a [`Program`]. Builtins and the module type
/// are registered up front.
#[derive(Debug)]
pub struct ProgramBuilder {
    program: Program,
}

impl Default for ProgramBuilder {
    fn default() -> Self {
        Self::new()
    }
}

impl ProgramBuilder {
    pub fn new() -> Self {
        let placeholder = TypeId(0);
        let mut program = Program {
            types: Vec::new(),
            by_name: HashMap::new(),
            members: HashMap::new(),
            methods: BTreeMap::new(),
            entry_points: Vec::new(),
            module: placeholder,
            builtins: Builtins {
                integer: placeholder,
                str: placeholder,
                array: placeholder,
                none_type: placeholder,
                array_append: placeholder,
            },
        };
        let mut raw = |name: &str, kind: TypeKind, parent: Option<TypeId>| {
            let id = TypeId(program.types.len() as u32);
            program.types.push(TypeDef {
                kind,
                qualified_name: name.to_string(),
                name: name.rsplit(':').next().unwrap_or(name).to_string(),
                parent,
                superclass: None,
                synthetic: false,
                intrinsic: Intrinsic::from_name(name).filter(|_| kind == TypeKind::Builtin),
                native: None,
            });
            program.by_name.insert(name.to_string(), id);
            if let Some(p) = parent {
                program
                    .members
                    .insert((p, program.types[id.index()].name.clone()), id);
            }
            id
        };
        let integer = raw("Integer", TypeKind::Builtin, None);
        let str_ = raw("Str", TypeKind::Builtin, None);
        let array = raw("array", TypeKind::Builtin, None);
        let none_type = raw("NoneType", TypeKind::Builtin, None);
        let array_append = raw("array:append", TypeKind::Method, Some(array));
        for i in Intrinsic::ALL {
            raw(i.name(), TypeKind::Builtin, None);
        }
        let module = raw(MODULE_NAME, TypeKind::Module, None);
        program.types[array_append.index()].native = Some(NativeMethod::ListAppend);
        program.module = module;
        program.builtins = Builtins {
            integer,
            str: str_,
            array,
            none_type,
            array_append,
        };
        ProgramBuilder { program }
    }

    pub fn module(&self) -> TypeId {
        self.program.module
    }

    pub fn type_named(&self, name: &str) -> Option<TypeId> {
        self.program.type_named(name)
    }

    pub fn kind(&self, id: TypeId) -> TypeKind {
        self.program.kind(id)
    }

    fn add_type(
        &mut self,
        kind: TypeKind,
        qualified_name: String,
        name: String,
        parent: TypeId,
        synthetic: bool,
    ) -> Result<TypeId, IrError> {
        if self.program.by_name.contains_key(&qualified_name) {
            return Err(IrError::DuplicateType(qualified_name));
        }
        let parent_kind = self.program.kind(parent);
        let ok = match kind {
            TypeKind::Class => parent_kind == TypeKind::Module,
            TypeKind::Method => matches!(parent_kind, TypeKind::Module | TypeKind::Class),
            TypeKind::Module | TypeKind::Builtin => false,
        };
        if !ok {
            return Err(IrError::InvalidParent {
                child: qualified_name,
                parent: self.program.qualified_name(parent).to_string(),
            });
        }
        let id = TypeId(self.program.types.len() as u32);
        self.program.types.push(TypeDef {
            kind,
            qualified_name: qualified_name.clone(),
            name: name.clone(),
            parent: Some(parent),
            superclass: None,
            synthetic,
            intrinsic: None,
            native: None,
        });
        self.program.by_name.insert(qualified_name, id);
        self.program.members.insert((parent, name), id);
        Ok(id)
    }

    pub fn add_class(&mut self, name: &str) -> Result<TypeId, IrError> {
        let module = self.program.module;
        self.add_type(
            TypeKind::Class,
            name.to_string(),
            name.to_string(),
            module,
            false,
        )
    }

    pub fn set_superclass(&mut self, class: TypeId, superclass: TypeId) -> Result<(), IrError> {
        if self.program.kind(superclass) != TypeKind::Class {
            return Err(IrError::InvalidParent {
                child: self.program.qualified_name(class).to_string(),
                parent: self.program.qualified_name(superclass).to_string(),
            });
        }
        self.program.types[class.index()].superclass = Some(superclass);
        Ok(())
    }

    /// Registers a method (or module-level function when `owner` is the
    /// module) with an empty body.
    pub fn add_method(
        &mut self,
        owner: TypeId,
        name: &str,
        params: Vec<String>,
        synthetic: bool,
    ) -> Result<TypeId, IrError> {
        let qualified = if owner == self.program.module {
            name.to_string()
        } else {
            format!("{}:{}", self.program.qualified_name(owner), name)
        };
        let id = self.add_type(
            TypeKind::Method,
            qualified,
            name.to_string(),
            owner,
            synthetic,
        )?;
        self.program.methods.insert(
            id,
            MethodBody {
                params,
                body: Vec::new(),
                falls_through: true,
            },
        );
        Ok(id)
    }

    pub fn set_body(
        &mut self,
        method: TypeId,
        body: Vec<StatementNode>,
        falls_through: bool,
    ) -> Result<(), IrError> {
        let qn = self.program.qualified_name(method).to_string();
        let slot = self
            .program
            .methods
            .get_mut(&method)
            .ok_or(IrError::NotAMethod(qn))?;
        slot.body = body;
        slot.falls_through = falls_through;
        Ok(())
    }

    pub fn add_entry_point(&mut self, method: TypeId) -> Result<(), IrError> {
        if !self.program.methods.contains_key(&method) {
            return Err(IrError::NotAMethod(
                self.program.qualified_name(method).to_string(),
            ));
        }
        self.program.entry_points.push(method);
        Ok(())
    }

    /// Synthesizes missing constructors and checks the structural invariants.
    pub fn finish(mut self) -> Result<Program, IrError> {
        let classes: Vec<TypeId> = self
            .program
            .types()
            .filter(|(_, d)| d.kind == TypeKind::Class)
            .map(|(id, _)| id)
            .collect();
        for &c in &classes {
            let mut seen = 0;
            for _ in self.program.ancestry(c) {
                seen += 1;
                if seen > classes.len() {
                    return Err(IrError::InheritanceCycle(
                        self.program.qualified_name(c).to_string(),
                    ));
                }
            }
        }
        for &c in &classes {
            let root = self.program.type_def(c).superclass.is_none();
            if root && self.program.member(c, "__init__").is_none() {
                self.add_method(c, "__init__", Vec::new(), true)?;
            }
        }
        let mut ids = std::collections::BTreeSet::new();
        for (&m, body) in &self.program.methods {
            let method = self.program.qualified_name(m).to_string();
            for s in &body.body {
                if !ids.insert(s.id) {
                    return Err(IrError::DuplicateNode(s.id));
                }
                let bad = |reason: &str| IrError::InvalidStatement {
                    method: method.clone(),
                    node: s.id,
                    reason: reason.to_string(),
                };
                if s.owner != m {
                    return Err(bad("owner does not match the containing method"));
                }
                if let StatementKind::Assignment { lhs, .. } = &s.kind {
                    if !matches!(lhs, Expression::Name(_) | Expression::MemberAccess { .. }) {
                        return Err(bad("assignment target must be a name or member access"));
                    }
                }
            }
        }
        Ok(self.program)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bananas_skeleton() -> Program {
        let mut b = ProgramBuilder::new();
        let module = b.module();
        let banana = b.add_class("Banana").unwrap();
        b.add_method(banana, "eat", vec!["self".into()], false)
            .unwrap();
        let person = b.add_class("Person").unwrap();
        b.add_method(person, "__init__", vec!["self".into()], false)
            .unwrap();
        let main = b.add_method(module, "main", vec![], false).unwrap();
        b.add_entry_point(main).unwrap();
        b.finish().unwrap()
    }

    #[test]
    fn lookup_finds_own_and_builtin_methods() {
        let p = bananas_skeleton();
        let banana = p.type_named("Banana").unwrap();
        assert_eq!(p.lookup_method(banana, "eat"), p.type_named("Banana:eat"));
        let b = *p.builtins();
        assert_eq!(p.lookup_method(b.integer, "eat"), None);
        assert_eq!(p.lookup_method(b.array, "append"), Some(b.array_append));
    }

    #[test]
    fn root_classes_get_a_synthetic_constructor() {
        let p = bananas_skeleton();
        let banana = p.type_named("Banana").unwrap();
        let ctor = p.constructor(banana).unwrap();
        assert_eq!(p.qualified_name(ctor), "Banana:__init__");
        assert!(p.type_def(ctor).synthetic);
        assert!(p.method(ctor).unwrap().params.is_empty());
        let person = p.type_named("Person").unwrap();
        assert!(!p.type_def(p.constructor(person).unwrap()).synthetic);
    }

    #[test]
    fn inherited_methods_resolve_through_the_chain() {
        let mut b = ProgramBuilder::new();
        let runner = b.add_class("RegexRunner").unwrap();
        b.add_method(runner, "Scan", vec!["self".into()], false)
            .unwrap();
        b.add_method(runner, "Go", vec!["self".into()], false)
            .unwrap();
        let interp = b.add_class("RegexInterpreter").unwrap();
        b.set_superclass(interp, runner).unwrap();
        b.add_method(interp, "Go", vec!["self".into()], false)
            .unwrap();
        let p = b.finish().unwrap();
        let interp = p.type_named("RegexInterpreter").unwrap();
        let go = p.lookup_method(interp, "Go").unwrap();
        assert_eq!(p.qualified_name(go), "RegexInterpreter:Go");
        let scan = p.lookup_method(interp, "Scan").unwrap();
        assert_eq!(p.qualified_name(scan), "RegexRunner:Scan");
        // Subclass inherits the synthesized base constructor.
        assert_eq!(
            p.qualified_name(p.constructor(interp).unwrap()),
            "RegexRunner:__init__"
        );
        assert_eq!(p.receivers_of(scan).len(), 2);
    }

    #[test]
    fn duplicate_and_cyclic_definitions_are_rejected() {
        let mut b = ProgramBuilder::new();
        b.add_class("A").unwrap();
        assert_eq!(b.add_class("A"), Err(IrError::DuplicateType("A".into())));
        assert!(matches!(
            b.add_class("array"),
            Err(IrError::DuplicateType(_))
        ));

        let mut b = ProgramBuilder::new();
        let a = b.add_class("A").unwrap();
        let c = b.add_class("C").unwrap();
        b.set_superclass(a, c).unwrap();
        b.set_superclass(c, a).unwrap();
        assert!(matches!(b.finish(), Err(IrError::InheritanceCycle(_))));
    }

    #[test]
    fn globals_include_intrinsics() {
        let p = bananas_skeleton();
        let range = p.lookup_global("range").unwrap();
        assert_eq!(p.intrinsic(range), Some(Intrinsic::Range));
        assert_eq!(p.lookup_global("main"), p.type_named("main"));
        assert_eq!(p.lookup_global("eat"), None);
    }
}
