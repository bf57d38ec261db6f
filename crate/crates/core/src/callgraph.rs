//! Call graphs over method qualified names, with per-edge call sites,
//! serialization, comparison and reachability queries.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scfg::quote;

/// Where a call edge was observed. Static edges carry the statement node;
/// dynamic edges only the source line.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
pub struct Site {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub line: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub node: Option<u32>,
}

pub type Edge = (String, String);

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CallGraph {
    nodes: BTreeSet<String>,
    edges: BTreeMap<Edge, BTreeSet<Site>>,
}

#[derive(Debug, Error)]
pub enum CallGraphError {
    #[error("invalid call graph JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid call graph: {0}")]
    Schema(String),
}

// Field order is alphabetical so the serialized keys come out sorted.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphDoc {
    edges: Vec<EdgeDoc>,
    nodes: Vec<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EdgeDoc {
    callee: String,
    caller: String,
    #[serde(default)]
    sites: Vec<Site>,
}

impl CallGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_node(&mut self, method: &str) {
        if !self.nodes.contains(method) {
            self.nodes.insert(method.to_string());
        }
    }

    /// Adds `caller -> callee`, recording `site` if given. Idempotent.
    pub fn add_edge(&mut self, caller: &str, callee: &str, site: Option<Site>) -> bool {
        self.add_node(caller);
        self.add_node(callee);
        let key = (caller.to_string(), callee.to_string());
        let fresh = !self.edges.contains_key(&key);
        let sites = self.edges.entry(key).or_default();
        if let Some(s) = site {
            sites.insert(s);
        }
        fresh
    }

    pub fn nodes(&self) -> &BTreeSet<String> {
        &self.nodes
    }

    pub fn edges(&self) -> impl Iterator<Item = (&str, &str)> {
        self.edges.keys().map(|(a, b)| (a.as_str(), b.as_str()))
    }

    pub fn edge_set(&self) -> BTreeSet<Edge> {
        self.edges.keys().cloned().collect()
    }

    pub fn has_edge(&self, caller: &str, callee: &str) -> bool {
        self.edges
            .contains_key(&(caller.to_string(), callee.to_string()))
    }

    pub fn sites(&self, caller: &str, callee: &str) -> Option<&BTreeSet<Site>> {
        self.edges.get(&(caller.to_string(), callee.to_string()))
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn callees<'a>(&'a self, caller: &'a str) -> impl Iterator<Item = &'a str> + 'a {
        self.edges
            .range((caller.to_string(), String::new())..)
            .take_while(move |((c, _), _)| c == caller)
            .map(|((_, callee), _)| callee.as_str())
    }

    /// Union of two graphs.
    pub fn merge(&mut self, other: &CallGraph) {
        self.nodes.extend(other.nodes.iter().cloned());
        for (k, sites) in &other.edges {
            self.edges
                .entry(k.clone())
                .or_default()
                .extend(sites.iter().copied());
        }
    }

    pub fn to_json(&self) -> String {
        let doc = GraphDoc {
            edges: self
                .edges
                .iter()
                .map(|((caller, callee), sites)| EdgeDoc {
                    callee: callee.clone(),
                    caller: caller.clone(),
                    sites: sites.iter().copied().collect(),
                })
                .collect(),
            nodes: self.nodes.iter().cloned().collect(),
        };
        let mut s = serde_json::to_string_pretty(&doc).expect("graph serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<CallGraph, CallGraphError> {
        let doc: GraphDoc = serde_json::from_str(text)?;
        let mut g = CallGraph::new();
        for n in &doc.nodes {
            if n.is_empty() {
                return Err(CallGraphError::Schema("empty node name".into()));
            }
            g.add_node(n);
        }
        for e in &doc.edges {
            for end in [&e.caller, &e.callee] {
                if !g.nodes.contains(end) {
                    return Err(CallGraphError::Schema(format!(
                        "edge endpoint `{end}` is not a node"
                    )));
                }
            }
            g.add_edge(&e.caller, &e.callee, None);
            let sites = g
                .edges
                .get_mut(&(e.caller.clone(), e.callee.clone()))
                .unwrap();
            sites.extend(e.sites.iter().copied());
        }
        Ok(g)
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph callgraph {\n");
        for n in &self.nodes {
            let _ = writeln!(out, "  {} [label={}];", quote(n), quote(n));
        }
        for (caller, callee) in self.edges.keys() {
            let _ = writeln!(out, "  {} -> {};", quote(caller), quote(callee));
        }
        out.push_str("}\n");
        out
    }

    /// Plain listing, one `caller -> callee` per line with call-site lines.
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        for ((caller, callee), sites) in &self.edges {
            let lines: Vec<String> = sites
                .iter()
                .filter_map(|s| s.line)
                .map(|l| l.to_string())
                .collect();
            let _ = write!(out, "{caller} -> {callee}");
            if !lines.is_empty() {
                let _ = write!(out, "  (line {})", lines.join(", "));
            }
            out.push('\n');
        }
        out
    }
}

/// Shortest caller-to-callee path from any source to any target, found by a
/// breadth-first search that visits sources and callees in sorted order.
pub fn reachable(
    g: &CallGraph,
    sources: &BTreeSet<String>,
    targets: &BTreeSet<String>,
) -> Option<Vec<String>> {
    let mut parent: BTreeMap<&str, Option<&str>> = BTreeMap::new();
    let mut queue = VecDeque::new();
    for s in sources {
        if g.nodes.contains(s) || targets.contains(s) {
            parent.insert(s.as_str(), None);
            queue.push_back(s.as_str());
        }
    }
    while let Some(cur) = queue.pop_front() {
        if targets.contains(cur) {
            let mut path = vec![cur.to_string()];
            let mut at = cur;
            while let Some(Some(p)) = parent.get(at) {
                path.push(p.to_string());
                at = p;
            }
            path.reverse();
            return Some(path);
        }
        for next in g.callees(cur) {
            if !parent.contains_key(next) {
                parent.insert(next, Some(cur));
                queue.push_back(next);
            }
        }
    }
    None
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub matched: usize,
    pub over_approx: usize,
    pub missed: usize,
    pub precision: f64,
    pub recall: f64,
    pub matched_edges: Vec<Edge>,
    pub over_approx_edges: Vec<Edge>,
    pub missed_edges: Vec<Edge>,
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        1.0
    } else {
        num as f64 / den as f64
    }
}

/// A ratio as a percentage with two decimals.
pub fn percent(r: f64) -> String {
    format!("{:.2}", r * 100.0)
}

impl ComparisonReport {
    /// Report from bare counts, with no edge listings.
    pub fn from_counts(matched: usize, over_approx: usize, missed: usize) -> Self {
        ComparisonReport {
            matched,
            over_approx,
            missed,
            precision: ratio(matched, matched + over_approx),
            recall: ratio(matched, matched + missed),
            matched_edges: Vec::new(),
            over_approx_edges: Vec::new(),
            missed_edges: Vec::new(),
        }
    }

    pub fn precision_percent(&self) -> String {
        percent(self.precision)
    }

    pub fn recall_percent(&self) -> String {
        percent(self.recall)
    }

    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "matched      {}", self.matched);
        let _ = writeln!(out, "over-approx  {}", self.over_approx);
        let _ = writeln!(out, "missed       {}", self.missed);
        let _ = writeln!(out, "precision    {}%", self.precision_percent());
        let _ = writeln!(out, "recall       {}%", self.recall_percent());
        for (title, edges) in [
            ("over-approximated edges", &self.over_approx_edges),
            ("missed edges", &self.missed_edges),
        ] {
            if !edges.is_empty() {
                let _ = writeln!(out, "{title}:");
                for (a, b) in edges {
                    let _ = writeln!(out, "  {a} -> {b}");
                }
            }
        }
        out
    }

    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct EdgeOut<'a> {
            callee: &'a str,
            caller: &'a str,
        }
        #[derive(Serialize)]
        struct Out<'a> {
            matched: usize,
            matched_edges: Vec<EdgeOut<'a>>,
            missed: usize,
            missed_edges: Vec<EdgeOut<'a>>,
            over_approx: usize,
            over_approx_edges: Vec<EdgeOut<'a>>,
            precision: String,
            recall: String,
        }
        fn edges(v: &[Edge]) -> Vec<EdgeOut<'_>> {
            v.iter()
                .map(|(a, b)| EdgeOut {
                    callee: b,
                    caller: a,
                })
                .collect()
        }
        let out = Out {
            matched: self.matched,
            matched_edges: edges(&self.matched_edges),
            missed: self.missed,
            missed_edges: edges(&self.missed_edges),
            over_approx: self.over_approx,
            over_approx_edges: edges(&self.over_approx_edges),
            precision: self.precision_percent(),
            recall: self.recall_percent(),
        };
        let mut s = serde_json::to_string_pretty(&out).expect("report serializes");
        s.push('\n');
        s
    }
}

/// Buckets the edges of a static graph against a dynamic one.
pub fn compare(static_graph: &CallGraph, dynamic_graph: &CallGraph) -> ComparisonReport {
    let s = static_graph.edge_set();
    let d = dynamic_graph.edge_set();
    let matched_edges: Vec<Edge> = s.intersection(&d).cloned().collect();
    let over_approx_edges: Vec<Edge> = s.difference(&d).cloned().collect();
    let missed_edges: Vec<Edge> = d.difference(&s).cloned().collect();
    ComparisonReport {
        matched_edges,
        over_approx_edges,
        missed_edges,
        ..ComparisonReport::from_counts(
            s.intersection(&d).count(),
            s.difference(&d).count(),
            d.difference(&s).count(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(edges: &[(&str, &str)]) -> CallGraph {
        let mut g = CallGraph::new();
        for (i, (a, b)) in edges.iter().enumerate() {
            g.add_edge(
                a,
                b,
                Some(Site {
                    line: Some(i as u32 + 1),
                    node: Some(i as u32),
                }),
            );
        }
        g
    }

    #[test]
    fn edges_are_sets_with_merged_sites() {
        let mut x = CallGraph::new();
        let site = Site {
            line: Some(22),
            node: Some(3),
        };
        assert!(x.add_edge("main", "Person:eat_bananas", Some(site)));
        assert!(!x.add_edge("main", "Person:eat_bananas", Some(site)));
        assert_eq!(x.edge_count(), 1);
        assert_eq!(x.sites("main", "Person:eat_bananas").unwrap().len(), 1);
        x.add_edge("f", "f", None);
        assert!(x.has_edge("f", "f"));
    }

    #[test]
    fn json_round_trip_and_empty_forms() {
        let e = CallGraph::new();
        assert_eq!(e.to_json(), "{\n  \"edges\": [],\n  \"nodes\": []\n}\n");
        assert_eq!(e.to_dot(), "digraph callgraph {\n}\n");
        let x = g(&[("main", "b"), ("b", "c"), ("main", "c")]);
        let text = x.to_json();
        assert_eq!(CallGraph::from_json(&text).unwrap(), x);
        assert!(text.find("\"callee\"").unwrap() < text.find("\"caller\"").unwrap());
    }

    #[test]
    fn schema_violations_are_rejected() {
        let bad = r#"{"edges":[{"caller":"a","callee":"b","sites":[]}],"nodes":["a"]}"#;
        assert!(matches!(
            CallGraph::from_json(bad),
            Err(CallGraphError::Schema(_))
        ));
        assert!(matches!(
            CallGraph::from_json("{\"nodes\":[]}"),
            Err(CallGraphError::Json(_))
        ));
    }

    #[test]
    fn comparison_buckets_and_ratios() {
        let s = g(&[("a", "b"), ("a", "c")]);
        let d = g(&[("a", "b"), ("b", "d")]);
        let r = compare(&s, &d);
        assert_eq!((r.matched, r.over_approx, r.missed), (1, 1, 1));
        assert_eq!(r.precision_percent(), "50.00");
        let same = compare(&s, &s);
        assert_eq!((same.precision, same.recall), (1.0, 1.0));
        let none = compare(&CallGraph::new(), &CallGraph::new());
        assert_eq!((none.precision, none.recall), (1.0, 1.0));
        let disjoint = compare(&g(&[("x", "y")]), &g(&[("y", "x")]));
        assert_eq!(
            (disjoint.precision_percent(), disjoint.recall_percent()),
            ("0.00".into(), "0.00".into())
        );
    }

    #[test]
    fn reachability_follows_edge_direction() {
        let x = g(&[
            ("main", "p"),
            ("p", "t"),
            ("main", "q"),
            ("q", "r"),
            ("r", "t"),
        ]);
        let set = |v: &[&str]| v.iter().map(|s| s.to_string()).collect::<BTreeSet<_>>();
        assert_eq!(
            reachable(&x, &set(&["main"]), &set(&["t"])).unwrap(),
            vec!["main", "p", "t"]
        );
        assert_eq!(reachable(&x, &set(&["t"]), &set(&["main"])), None);
        assert_eq!(reachable(&x, &set(&[]), &set(&["t"])), None);
        assert_eq!(
            reachable(&x, &set(&["q"]), &set(&["q"])).unwrap(),
            vec!["q"]
        );
    }
}
