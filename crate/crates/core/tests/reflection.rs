use std::collections::BTreeSet;

use flatcg::analysis::eval::{name_combinations, resolve_reflective};
use flatcg::analysis::{run_analysis, AnalysisOptions, TypeEnv, TypeSet};
use flatcg::frontend::parse_str;
use flatcg::ir::{Payload, TypeValue, Variable};

const VISITOR: &str = include_str!("../fixtures/visitor.py");

#[test]
fn getattr_resolves_to_the_three_visitors() {
    let p = parse_str(VISITOR).unwrap();
    let r = run_analysis(&p, p.entry_points(), AnalysisOptions::default()).unwrap();
    let visit = p.method_named("Visitor:visit").unwrap();
    let names = |set: &TypeSet| -> BTreeSet<String> {
        set.iter()
            .map(|t| p.qualified_name(t.ty).to_string())
            .collect()
    };
    let node = r.env.types(&Variable::new(visit, "node"));
    assert_eq!(names(&node), BTreeSet::from(["If".into(), "Name".into()]));
    let method = r.env.types(&Variable::new(visit, "method"));
    let s = p.builtins().str;
    let lit = |x: &str| TypeValue::with_literal(s, Payload::Str(x.into()));
    assert_eq!(
        method,
        TypeSet::from([lit("visit_"), lit("Name"), lit("If")])
    );
    let visitor = r.env.types(&Variable::new(visit, "visitor"));
    let expected: BTreeSet<String> = [
        "Visitor:generic_visit",
        "Visitor:visit_If",
        "Visitor:visit_Name",
    ]
    .map(String::from)
    .into();
    assert_eq!(names(&visitor), expected);
    let callees: BTreeSet<String> = r.graph.callees("Visitor:visit").map(String::from).collect();
    assert_eq!(callees, expected);
    assert!(!r.graph.has_edge("Visitor:visit", "Visitor:visit_Call"));
}

#[test]
fn unknown_string_selects_every_method() {
    let p = parse_str(VISITOR).unwrap();
    let v = p.type_named("Visitor").unwrap();
    let got = resolve_reflective(
        &p,
        &TypeEnv::new(),
        &TypeSet::from([TypeValue::of(v)]),
        &TypeSet::from([TypeValue::of(p.builtins().str)]),
        &TypeSet::new(),
        2,
    );
    let all: TypeSet = p.all_methods(v).into_iter().map(TypeValue::of).collect();
    assert_eq!(got, all);
    assert_eq!(all.len(), 6);
}

#[test]
fn no_receivers_leaves_only_the_default() {
    let p = parse_str(VISITOR).unwrap();
    let d = TypeSet::from([TypeValue::of(
        p.method_named("Visitor:generic_visit").unwrap(),
    )]);
    let names = TypeSet::from([TypeValue::with_literal(
        p.builtins().str,
        Payload::Str("visit_If".into()),
    )]);
    assert_eq!(
        resolve_reflective(&p, &TypeEnv::new(), &TypeSet::new(), &names, &d, 2),
        d
    );
}

#[test]
fn combinations_respect_depth() {
    assert_eq!(name_combinations(&["a", "b"], 1), vec!["a", "b"]);
    assert_eq!(
        name_combinations(&["a", "b"], 2),
        vec!["a", "ab", "b", "ba"]
    );
}
