//! JSON-AST interchange format for [`Program`]s.
//!
//! See `docs/json-ast.md` for the field-by-field description. Builtins and
//! the module type are implicit; `types` lists classes and methods in id
//! order, and every parent must appear before its children.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use super::{
    Expression, Invocation, IrError, Literal, NodeId, Program, ProgramBuilder, StatementKind,
    StatementNode, TypeKind, MODULE_NAME,
};

#[derive(Debug, Error)]
pub enum JsonError {
    #[error("malformed JSON-AST: {0}")]
    Syntax(#[from] serde_json::Error),
    #[error(transparent)]
    Ir(#[from] IrError),
    #[error("type `{name}`: {reason}")]
    BadType { name: String, reason: String },
    #[error("method body for unknown method `{0}`")]
    UnknownMethod(String),
    #[error("literal `{kind}` has an invalid value")]
    BadLiteral { kind: &'static str },
}

#[derive(Serialize, Deserialize)]
struct ProgramDoc {
    types: Vec<TypeDoc>,
    methods: BTreeMap<String, MethodDoc>,
    entry_points: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct TypeDoc {
    kind: TypeKind,
    qualified_name: String,
    parent: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    superclass: Option<String>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    synthetic: bool,
}

fn yes() -> bool {
    true
}

#[derive(Serialize, Deserialize)]
struct MethodDoc {
    params: Vec<String>,
    #[serde(default = "yes")]
    falls_through: bool,
    body: Vec<StatementDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum StatementDoc {
    Assignment {
        id: u32,
        #[serde(default)]
        line: u32,
        lhs: ExprDoc,
        rhs: ExprDoc,
    },
    Invocation {
        id: u32,
        #[serde(default)]
        line: u32,
        target: ExprDoc,
        args: Vec<ExprDoc>,
    },
    Return {
        id: u32,
        #[serde(default)]
        line: u32,
        expr: Option<ExprDoc>,
    },
}

#[derive(Serialize, Deserialize, Clone, Copy)]
#[serde(rename_all = "snake_case")]
enum LiteralKind {
    Int,
    Str,
    List,
    None,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum ExprDoc {
    Name {
        id: String,
    },
    MemberAccess {
        object: Box<ExprDoc>,
        field: String,
    },
    Literal {
        literal_kind: LiteralKind,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        value: Option<Value>,
    },
    Invocation {
        target: Box<ExprDoc>,
        args: Vec<ExprDoc>,
    },
}

fn expr_to_doc(e: &Expression) -> ExprDoc {
    match e {
        Expression::Name(n) => ExprDoc::Name { id: n.clone() },
        Expression::MemberAccess { object, field } => ExprDoc::MemberAccess {
            object: Box::new(expr_to_doc(object)),
            field: field.clone(),
        },
        Expression::Literal(lit) => {
            let (literal_kind, value) = match lit {
                Literal::Int(v) => (LiteralKind::Int, Some(Value::from(*v))),
                Literal::Str(s) => (LiteralKind::Str, Some(Value::from(s.clone()))),
                Literal::List => (LiteralKind::List, None),
                Literal::None => (LiteralKind::None, None),
            };
            ExprDoc::Literal {
                literal_kind,
                value,
            }
        }
        Expression::Invocation(inv) => ExprDoc::Invocation {
            target: Box::new(expr_to_doc(&inv.target)),
            args: inv.args.iter().map(expr_to_doc).collect(),
        },
    }
}

fn expr_from_doc(d: ExprDoc) -> Result<Expression, JsonError> {
    Ok(match d {
        ExprDoc::Name { id } => Expression::Name(id),
        ExprDoc::MemberAccess { object, field } => Expression::MemberAccess {
            object: Box::new(expr_from_doc(*object)?),
            field,
        },
        ExprDoc::Literal {
            literal_kind,
            value,
        } => Expression::Literal(match literal_kind {
            LiteralKind::Int => Literal::Int(
                value
                    .and_then(|v| v.as_i64())
                    .ok_or(JsonError::BadLiteral { kind: "int" })?,
            ),
            LiteralKind::Str => Literal::Str(
                value
                    .and_then(|v| v.as_str().map(str::to_string))
                    .ok_or(JsonError::BadLiteral { kind: "str" })?,
            ),
            LiteralKind::List => Literal::List,
            LiteralKind::None => Literal::None,
        }),
        ExprDoc::Invocation { target, args } => Expression::Invocation(Invocation {
            target: Box::new(expr_from_doc(*target)?),
            args: args
                .into_iter()
                .map(expr_from_doc)
                .collect::<Result<_, _>>()?,
        }),
    })
}

fn statement_to_doc(s: &StatementNode) -> StatementDoc {
    let (id, line) = (s.id.0, s.line);
    match &s.kind {
        StatementKind::Assignment { lhs, rhs } => StatementDoc::Assignment {
            id,
            line,
            lhs: expr_to_doc(lhs),
            rhs: expr_to_doc(rhs),
        },
        StatementKind::Invocation(inv) => StatementDoc::Invocation {
            id,
            line,
            target: expr_to_doc(&inv.target),
            args: inv.args.iter().map(expr_to_doc).collect(),
        },
        StatementKind::Return(e) => StatementDoc::Return {
            id,
            line,
            expr: e.as_ref().map(expr_to_doc),
        },
    }
}

/// Serializes a program. Output is deterministic.
pub fn to_json(program: &Program) -> String {
    let types = program
        .types()
        .filter(|(_, d)| matches!(d.kind, TypeKind::Class | TypeKind::Method) && d.native.is_none())
        .map(|(_, d)| TypeDoc {
            kind: d.kind,
            qualified_name: d.qualified_name.clone(),
            parent: d.parent.map(|p| program.qualified_name(p).to_string()),
            superclass: d.superclass.map(|s| program.qualified_name(s).to_string()),
            synthetic: d.synthetic,
        })
        .collect();
    let methods = program
        .methods()
        .map(|(id, m)| {
            (
                program.qualified_name(id).to_string(),
                MethodDoc {
                    params: m.params.clone(),
                    falls_through: m.falls_through,
                    body: m.body.iter().map(statement_to_doc).collect(),
                },
            )
        })
        .collect();
    let entry_points = program
        .entry_points()
        .iter()
        .map(|e| program.qualified_name(*e).to_string())
        .collect();
    let doc = ProgramDoc {
        types,
        methods,
        entry_points,
    };
    let mut out = serde_json::to_string_pretty(&doc).expect("JSON-AST serialization");
    out.push('\n');
    out
}

/// Parses and validates a JSON-AST document.
pub fn from_json(text: &str) -> Result<Program, JsonError> {
    let doc: ProgramDoc = serde_json::from_str(text)?;
    let mut b = ProgramBuilder::new();
    for t in &doc.types {
        let bad = |reason: &str| JsonError::BadType {
            name: t.qualified_name.clone(),
            reason: reason.to_string(),
        };
        let parent = match t.parent.as_deref() {
            None | Some(MODULE_NAME) => b.module(),
            Some(p) => b
                .type_named(p)
                .ok_or_else(|| bad("parent must be listed first"))?,
        };
        match t.kind {
            TypeKind::Class => {
                if parent != b.module() {
                    return Err(bad("classes must be module-level"));
                }
                b.add_class(&t.qualified_name)?;
            }
            TypeKind::Method => {
                let short = t
                    .qualified_name
                    .rsplit(':')
                    .next()
                    .unwrap_or(&t.qualified_name);
                let params = doc
                    .methods
                    .get(&t.qualified_name)
                    .map(|m| m.params.clone())
                    .unwrap_or_default();
                let id = b.add_method(parent, short, params, t.synthetic)?;
                if b.type_named(&t.qualified_name) != Some(id) {
                    return Err(bad("qualified name does not match its parent"));
                }
            }
            TypeKind::Module | TypeKind::Builtin => {
                return Err(bad("modules and builtins are implicit"));
            }
        }
    }
    for t in &doc.types {
        if let Some(sup) = &t.superclass {
            let class = b.type_named(&t.qualified_name).expect("registered above");
            let sup = b
                .type_named(sup)
                .ok_or_else(|| IrError::UnknownType(sup.clone()))?;
            b.set_superclass(class, sup)?;
        }
    }
    for (name, m) in doc.methods {
        let id = b
            .type_named(&name)
            .filter(|id| b.kind(*id) == TypeKind::Method)
            .ok_or_else(|| JsonError::UnknownMethod(name.clone()))?;
        let body = m
            .body
            .into_iter()
            .map(|s| {
                let (id_, line, kind) = match s {
                    StatementDoc::Assignment { id, line, lhs, rhs } => (
                        id,
                        line,
                        StatementKind::Assignment {
                            lhs: expr_from_doc(lhs)?,
                            rhs: expr_from_doc(rhs)?,
                        },
                    ),
                    StatementDoc::Invocation {
                        id,
                        line,
                        target,
                        args,
                    } => (
                        id,
                        line,
                        StatementKind::Invocation(Invocation {
                            target: Box::new(expr_from_doc(target)?),
                            args: args
                                .into_iter()
                                .map(expr_from_doc)
                                .collect::<Result<_, _>>()?,
                        }),
                    ),
                    StatementDoc::Return { id, line, expr } => (
                        id,
                        line,
                        StatementKind::Return(expr.map(expr_from_doc).transpose()?),
                    ),
                };
                Ok(StatementNode {
                    id: NodeId(id_),
                    line,
                    owner: id,
                    kind,
                })
            })
            .collect::<Result<Vec<_>, JsonError>>()?;
        b.set_body(id, body, m.falls_through)?;
    }
    for e in &doc.entry_points {
        let id = b
            .type_named(e)
            .ok_or_else(|| IrError::UnknownType(e.clone()))?;
        b.add_entry_point(id)?;
    }
    Ok(b.finish()?)
}

#[cfg(test)]
mod tests {
    use super::*;

    const SMALL: &str = r#"{
      "types": [
        {"kind": "class", "qualified_name": "A", "parent": "<module>"},
        {"kind": "method", "qualified_name": "A:run", "parent": "A"},
        {"kind": "method", "qualified_name": "main", "parent": "<module>"}
      ],
      "methods": {
        "A:run": {"params": ["self"], "body": [
          {"kind": "return", "id": 0, "line": 3, "expr": {"kind": "name", "id": "self"}}
        ]},
        "main": {"params": [], "body": [
          {"kind": "assignment", "id": 1, "line": 5,
           "lhs": {"kind": "name", "id": "a"},
           "rhs": {"kind": "invocation", "target": {"kind": "name", "id": "A"}, "args": []}},
          {"kind": "invocation", "id": 2, "line": 6,
           "target": {"kind": "member_access", "object": {"kind": "name", "id": "a"}, "field": "run"},
           "args": [{"kind": "literal", "literal_kind": "str", "value": "x"}]}
        ]}
      },
      "entry_points": ["main"]
    }"#;

    #[test]
    fn parses_hand_written_document() {
        let p = from_json(SMALL).unwrap();
        let main = p.method_named("main").unwrap();
        assert_eq!(p.entry_points(), &[main]);
        let body = &p.method(main).unwrap().body;
        assert_eq!(body.len(), 2);
        assert_eq!(body[1].to_string(), "a.run(\"x\")");
        // synthesized on load since the document lists none
        assert!(p.method_named("A:__init__").is_some());
    }

    #[test]
    fn reserialized_document_parses_to_the_same_program() {
        let p = from_json(SMALL).unwrap();
        let again = from_json(&to_json(&p)).unwrap();
        assert_eq!(p, again);
        assert_eq!(to_json(&p), to_json(&again));
    }

    #[test]
    fn rejects_bad_documents() {
        assert!(matches!(from_json("{"), Err(JsonError::Syntax(_))));
        let bad_lhs = SMALL.replace(
            r#""lhs": {"kind": "name", "id": "a"}"#,
            r#""lhs": {"kind": "literal", "literal_kind": "int", "value": 1}"#,
        );
        assert!(matches!(
            from_json(&bad_lhs),
            Err(JsonError::Ir(IrError::InvalidStatement { .. }))
        ));
        let bad_lit = SMALL.replace(r#""value": "x""#, r#""value": 3"#);
        assert!(matches!(
            from_json(&bad_lit),
            Err(JsonError::BadLiteral { kind: "str" })
        ));
        let orphan = SMALL.replace(r#""parent": "A"}"#, r#""parent": "Z"}"#);
        assert!(matches!(from_json(&orphan), Err(JsonError::BadType { .. })));
    }
}
