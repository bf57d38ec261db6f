use flatcg::analysis::{run_analysis, AnalysisOptions};
use flatcg::frontend::parse_str;

const BANANAS: &str = include_str!("../fixtures/bananas.py");

fn rows(r: &[(&str, &str, &[&str])]) -> Vec<(String, String, Vec<String>)> {
    r.iter()
        .map(|(s, n, v)| {
            (
                s.to_string(),
                n.to_string(),
                v.iter().map(|x| x.to_string()).collect(),
            )
        })
        .collect()
}

#[test]
fn final_state_matches_the_table() {
    let p = parse_str(BANANAS).unwrap();
    let r = run_analysis(&p, p.entry_points(), AnalysisOptions::default()).unwrap();
    let expected = rows(&[
        ("Banana:eat", "self", &["Banana"]),
        ("Person", "bananas", &["array"]),
        ("Person:__init__", "self", &["Person"]),
        ("Person:add_banana", "banana", &["Banana"]),
        ("Person:add_banana", "self", &["Person"]),
        ("Person:eat_bananas", "banana", &["Banana", "Integer"]),
        ("Person:eat_bananas", "self", &["Person"]),
        ("Person:no_bananas", "self", &["Person"]),
        ("array", "items", &["Banana", "Integer"]),
        ("main", "a", &["Banana", "Integer"]),
        ("main", "person", &["Person"]),
    ]);
    assert_eq!(r.env.rows(&p), expected, "\n{}", r.env.display(&p));
    assert!(
        r.diagnostics.is_empty(),
        "{}",
        r.diagnostics.to_json_lines()
    );
}

#[test]
fn call_graph_has_the_expected_edges() {
    let p = parse_str(BANANAS).unwrap();
    let r = run_analysis(&p, p.entry_points(), AnalysisOptions::default()).unwrap();
    let mut edges: Vec<_> = r.graph.edge_set().into_iter().collect();
    edges.sort();
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
    assert!(!r.graph.has_edge("Person:eat_bananas", "Carrot:eat"));
}
