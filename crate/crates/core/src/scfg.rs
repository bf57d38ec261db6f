//! Per-method simplified control-flow graphs: entry, the flat statements in
//! source order, exit, and an edge from exit back to entry.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write as _};

use crate::ir::{NodeId, Program, StatementNode, TypeId};

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum CfgNode {
    Entry,
    Statement(NodeId),
    Exit,
}

impl fmt::Display for CfgNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CfgNode::Entry => f.write_str("entry"),
            CfgNode::Statement(id) => write!(f, "{id}"),
            CfgNode::Exit => f.write_str("exit"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Scfg {
    pub method: TypeId,
    pub order: Vec<NodeId>,
    /// Successor lists. A well-formed graph has exactly one successor per
    /// node; lists make malformed graphs representable for validation.
    pub succ: BTreeMap<CfgNode, Vec<CfgNode>>,
    /// Statements that are not assignments, invocations or returns. Always
    /// empty for graphs built from a [`Program`].
    pub foreign: BTreeSet<NodeId>,
}

pub fn build_scfg(body: &[StatementNode], method: TypeId) -> Scfg {
    let order: Vec<NodeId> = body.iter().map(|s| s.id).collect();
    let mut succ = BTreeMap::new();
    let mut prev = CfgNode::Entry;
    for &id in &order {
        succ.insert(prev, vec![CfgNode::Statement(id)]);
        prev = CfgNode::Statement(id);
    }
    succ.insert(prev, vec![CfgNode::Exit]);
    succ.insert(CfgNode::Exit, vec![CfgNode::Entry]);
    Scfg {
        method,
        order,
        succ,
        foreign: BTreeSet::new(),
    }
}

/// Graphs for every method with a body, keyed by method.
pub fn build_all(program: &Program) -> BTreeMap<TypeId, Scfg> {
    program
        .methods()
        .map(|(m, body)| (m, build_scfg(&body.body, m)))
        .collect()
}

impl Scfg {
    pub fn entry(&self) -> CfgNode {
        CfgNode::Entry
    }

    pub fn exit(&self) -> CfgNode {
        CfgNode::Exit
    }

    /// Nodes in cycle order starting at entry.
    pub fn nodes(&self) -> Vec<CfgNode> {
        let mut v = Vec::with_capacity(self.order.len() + 2);
        v.push(CfgNode::Entry);
        v.extend(self.order.iter().map(|id| CfgNode::Statement(*id)));
        v.push(CfgNode::Exit);
        v
    }

    pub fn len(&self) -> usize {
        self.order.len() + 2
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Position of the successor of the node at `pos` in [`Scfg::nodes`].
    pub fn next_position(&self, pos: usize) -> usize {
        (pos + 1) % self.len()
    }

    pub fn successor(&self, node: CfgNode) -> Option<CfgNode> {
        match self.succ.get(&node).map(Vec::as_slice) {
            Some([one]) => Some(*one),
            _ => None,
        }
    }

    /// DOT rendering: one box per statement labelled with its text, solid
    /// intraprocedural edges.
    pub fn to_dot(&self, program: &Program) -> String {
        let stmts: BTreeMap<NodeId, &StatementNode> = program
            .method(self.method)
            .map(|b| b.body.iter().map(|s| (s.id, s)).collect())
            .unwrap_or_default();
        let mut out = String::new();
        let name = program.qualified_name(self.method);
        let _ = writeln!(out, "digraph scfg {{");
        let _ = writeln!(out, "  label={};", quote(name));
        for n in self.nodes() {
            let label = match n {
                CfgNode::Entry => format!("entry {name}"),
                CfgNode::Exit => format!("exit {name}"),
                CfgNode::Statement(id) => match stmts.get(&id) {
                    Some(s) if s.line > 0 => format!("{}: {s}", s.line),
                    Some(s) => s.to_string(),
                    None => id.to_string(),
                },
            };
            let shape = if matches!(n, CfgNode::Statement(_)) {
                "box"
            } else {
                "ellipse"
            };
            let _ = writeln!(
                out,
                "  {} [label={}, shape={shape}];",
                quote(&n.to_string()),
                quote(&label)
            );
        }
        for (from, tos) in &self.succ {
            for to in tos {
                let _ = writeln!(
                    out,
                    "  {} -> {};",
                    quote(&from.to_string()),
                    quote(&to.to_string())
                );
            }
        }
        out.push_str("}\n");
        out
    }
}

pub(crate) fn quote(s: &str) -> String {
    let mut q = String::with_capacity(s.len() + 2);
    q.push('"');
    for c in s.chars() {
        match c {
            '"' => q.push_str("\\\""),
            '\\' => q.push_str("\\\\"),
            '\n' => q.push_str("\\n"),
            c => q.push(c),
        }
    }
    q.push('"');
    q
}

/// The four well-formedness properties of a simplified control-flow graph.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Property {
    /// A single entry node and a single exit node.
    SingleEntryExit = 1,
    /// Each node has a single predecessor and a single successor.
    SinglePredSucc = 2,
    /// Every statement node is an assignment, invocation or return.
    NodeKinds = 3,
    /// The nodes form a simple cycle.
    SimpleCycle = 4,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Violation {
    pub property: Property,
    pub node: Option<CfgNode>,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "property {}", self.property as u8)?;
        if let Some(n) = self.node {
            write!(f, " at {n}")?;
        }
        write!(f, ": {}", self.detail)
    }
}

pub fn validate_scfg(g: &Scfg) -> Vec<Violation> {
    let mut out = Vec::new();
    let v = |property, node, detail: &str| Violation {
        property,
        node,
        detail: detail.to_string(),
    };

    let mut nodes: BTreeSet<CfgNode> = g.succ.keys().copied().collect();
    for tos in g.succ.values() {
        nodes.extend(tos.iter().copied());
    }
    nodes.extend(g.order.iter().map(|id| CfgNode::Statement(*id)));
    for end in [CfgNode::Entry, CfgNode::Exit] {
        if !nodes.contains(&end) {
            out.push(v(Property::SingleEntryExit, Some(end), "missing"));
        }
    }
    let distinct: BTreeSet<NodeId> = g.order.iter().copied().collect();
    if distinct.len() != g.order.len() {
        out.push(v(Property::SingleEntryExit, None, "statement listed twice"));
    }

    let mut preds: BTreeMap<CfgNode, usize> = BTreeMap::new();
    for tos in g.succ.values() {
        for t in tos {
            *preds.entry(*t).or_default() += 1;
        }
    }
    for &n in &nodes {
        let s = g.succ.get(&n).map_or(0, Vec::len);
        if s != 1 {
            out.push(v(
                Property::SinglePredSucc,
                Some(n),
                &format!("{s} successors"),
            ));
        }
        let p = preds.get(&n).copied().unwrap_or(0);
        if p != 1 {
            out.push(v(
                Property::SinglePredSucc,
                Some(n),
                &format!("{p} predecessors"),
            ));
        }
    }

    for id in &g.foreign {
        out.push(v(
            Property::NodeKinds,
            Some(CfgNode::Statement(*id)),
            "not a flat statement",
        ));
    }

    // Walk from entry following first successors; a simple cycle returns to
    // entry after visiting every node exactly once.
    let mut seen = BTreeSet::new();
    let mut cur = CfgNode::Entry;
    let closed = loop {
        if !seen.insert(cur) {
            break cur == CfgNode::Entry;
        }
        match g.succ.get(&cur).and_then(|t| t.first()) {
            Some(next) => cur = *next,
            None => break false,
        }
    };
    if !closed {
        out.push(v(
            Property::SimpleCycle,
            Some(cur),
            "walk from entry does not return to entry",
        ));
    } else if seen.len() != nodes.len() {
        let stray = nodes.difference(&seen).next().copied();
        out.push(v(Property::SimpleCycle, stray, "node outside the cycle"));
    }
    out
}
