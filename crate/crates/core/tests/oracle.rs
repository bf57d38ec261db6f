use flatcg::frontend::{lower, parse_ast};
use flatcg::oracle::{interpret, Outcome, DEFAULT_STEP_BUDGET};

fn run(src: &str, entry: &str, budget: u64) -> flatcg::oracle::Interpretation {
    let ast = parse_ast(src).unwrap();
    let p = lower(&ast).unwrap();
    let e = p.method_named(entry).unwrap();
    interpret(&p, &ast, e, budget)
}

#[test]
fn bananas_runs_to_completion_with_eight_edges() {
    let r = run(
        include_str!("../fixtures/bananas.py"),
        "main",
        DEFAULT_STEP_BUDGET,
    );
    assert_eq!(r.outcome, Outcome::Completed);
    let edges: Vec<_> = r.calls.graph.edge_set().into_iter().collect();
    let expected: Vec<(String, String)> = [
        ("Person:__init__", "Person:no_bananas"),
        ("Person:add_banana", "array:append"),
        ("Person:eat_bananas", "Banana:eat"),
        ("Person:eat_bananas", "Person:no_bananas"),
        ("main", "Banana:__init__"),
        ("main", "Person:__init__"),
        ("main", "Person:add_banana"),
        ("main", "Person:eat_bananas"),
    ]
    .iter()
    .map(|(a, b)| (a.to_string(), b.to_string()))
    .collect();
    assert_eq!(edges, expected);
}

#[test]
fn immediate_return_has_no_edges() {
    let r = run("def main():\n    return 1\n", "main", 100);
    assert_eq!(r.outcome, Outcome::Completed);
    assert_eq!(r.calls.graph.edge_count(), 0);
}

#[test]
fn infinite_loop_exhausts_the_budget() {
    let src = "def f():\n    pass\ndef main():\n    while True:\n        f()\n";
    let r = run(src, "main", 1000);
    assert_eq!(r.outcome, Outcome::BudgetExhausted);
    assert!(r.calls.graph.has_edge("main", "f"));
}

#[test]
fn faults_are_reported_not_raised() {
    let r = run(
        "class A:\n    pass\ndef main():\n    a = A()\n    a.missing()\n",
        "main",
        100,
    );
    assert!(matches!(r.outcome, Outcome::RuntimeError(ref d) if d.contains("missing")));
    assert!(r.calls.graph.has_edge("main", "A:__init__"));
}

#[test]
fn getattr_falls_back_to_the_default() {
    let src = "class A:\n    def d(self):\n        return 1\n    def x(self):\n        return 2\n\
def main():\n    a = A()\n    f = getattr(a, 'nope', a.d)\n    f()\n    g = getattr(a, 'x')\n    g()\n";
    let r = run(src, "main", 1000);
    assert_eq!(r.outcome, Outcome::Completed);
    assert!(r.calls.graph.has_edge("main", "A:d"));
    assert!(r.calls.graph.has_edge("main", "A:x"));
}
