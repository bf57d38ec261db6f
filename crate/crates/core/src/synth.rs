//! Random program generator for property tests and benchmarks.
//!
//! Programs are reflection-free and loosely typed so that most runs do
//! real work: every class answers every method name of a shared pool, and
//! variables keep a known kind unless a branch could change it. Calls go
//! from earlier to later callables (methods before functions), so only the
//! explicit countdown functions recurse.

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::fmt::Write;

/// Method names every class answers, with their arity after `self`.
const METHODS: [(&str, usize); 3] = [("run", 0), ("step", 1), ("get", 0)];
const FIELDS: [&str; 2] = ["val", "nxt"];
const STRINGS: [&str; 4] = ["a", "b", "visit", "x"];

#[derive(Clone, Copy, Debug)]
pub struct SynthConfig {
    pub max_classes: usize,
    pub max_functions: usize,
    pub max_statements: usize,
    pub max_depth: usize,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            max_classes: 4,
            max_functions: 3,
            max_statements: 6,
            max_depth: 2,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Kind {
    Int,
    Str,
    List,
    Obj,
    Any,
    /// Callable with this many arguments.
    Func(usize),
}

/// Who is generating: bounds what may be called.
#[derive(Clone, Copy)]
enum Owner {
    Method(usize),
    Function(usize),
    Main,
}

struct Gen {
    rng: ChaCha8Rng,
    cfg: SynthConfig,
    classes: Vec<String>,
    functions: Vec<(String, usize)>,
    countdowns: Vec<String>,
    out: String,
}

struct Body {
    vars: Vec<(String, Kind)>,
    fresh: usize,
    owner: Owner,
    has_self: bool,
}

/// Generates a program from `seed` with the default configuration.
pub fn generate(seed: u64) -> String {
    generate_with(seed, SynthConfig::default())
}

pub fn generate_with(seed: u64, cfg: SynthConfig) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_classes = rng.random_range(1..=cfg.max_classes.max(1));
    let n_functions = rng.random_range(1..=cfg.max_functions.max(1));
    let mut g = Gen {
        classes: (0..n_classes).map(|i| format!("C{i}")).collect(),
        functions: (0..n_functions)
            .map(|i| (format!("f{i}"), rng.random_range(0..=2)))
            .collect(),
        countdowns: Vec::new(),
        cfg,
        rng,
        out: String::new(),
    };
    if g.rng.random_bool(0.5) {
        g.countdowns.push("countdown".to_string());
    }
    g.program();
    g.out
}

impl Gen {
    fn line(&mut self, indent: usize, text: &str) {
        let _ = writeln!(self.out, "{}{}", "    ".repeat(indent), text);
    }

    fn program(&mut self) {
        for i in 0..self.classes.len() {
            self.class(i);
        }
        for i in 0..self.functions.len() {
            self.function(i);
        }
        for name in self.countdowns.clone() {
            self.line(0, &format!("def {name}(n):"));
            self.line(1, "if n > 0:");
            self.line(2, &format!("return {name}(n - 1)"));
            self.line(1, "return n");
        }
        self.line(0, "def main():");
        let mut body = Body {
            vars: Vec::new(),
            fresh: 0,
            owner: Owner::Main,
            has_self: false,
        };
        let n = self.rng.random_range(2..=self.cfg.max_statements.max(2));
        // Make sure there are objects to work with.
        for _ in 0..2 {
            self.assign(&mut body, 1, Some(Kind::Obj), true);
        }
        self.block(&mut body, 1, n, self.cfg.max_depth, true);
    }

    fn class(&mut self, i: usize) {
        let name = self.classes[i].clone();
        let base = (i > 0 && self.rng.random_bool(0.4))
            .then(|| self.classes[self.rng.random_range(0..i)].clone());
        match &base {
            Some(b) => self.line(0, &format!("class {name}({b}):")),
            None => self.line(0, &format!("class {name}:")),
        }
        if base.is_none() || self.rng.random_bool(0.5) {
            self.line(1, "def __init__(self):");
            for f in FIELDS {
                let v = self.literal_text();
                self.line(2, &format!("self.{f} = {v}"));
            }
        }
        let mut any = false;
        for (mi, (m, arity)) in METHODS.iter().enumerate() {
            if base.is_some() && self.rng.random_bool(0.5) {
                continue;
            }
            any = true;
            let mut params = vec!["self".to_string()];
            params.extend((0..*arity).map(|k| format!("p{k}")));
            self.line(1, &format!("def {m}({}):", params.join(", ")));
            let mut body = Body {
                vars: params[1..].iter().map(|p| (p.clone(), Kind::Any)).collect(),
                fresh: 0,
                owner: Owner::Method(mi),
                has_self: true,
            };
            body.vars.push(("self".into(), Kind::Obj));
            let n = self.rng.random_range(1..=self.cfg.max_statements.max(1));
            self.block(&mut body, 2, n, self.cfg.max_depth, true);
        }
        if !any {
            self.line(1, "pass");
        }
    }

    fn function(&mut self, i: usize) {
        let (name, arity) = self.functions[i].clone();
        let params: Vec<String> = (0..arity).map(|k| format!("p{k}")).collect();
        self.line(0, &format!("def {name}({}):", params.join(", ")));
        let mut body = Body {
            vars: params.iter().map(|p| (p.clone(), Kind::Any)).collect(),
            fresh: 0,
            owner: Owner::Function(i),
            has_self: false,
        };
        let n = self.rng.random_range(1..=self.cfg.max_statements.max(1));
        self.block(&mut body, 1, n, self.cfg.max_depth, true);
    }

    fn block(&mut self, b: &mut Body, indent: usize, n: usize, depth: usize, top: bool) {
        for _ in 0..n {
            self.statement(b, indent, depth, top);
        }
        if top && self.rng.random_bool(0.6) {
            let e = self.expr(b, None);
            self.line(indent, &format!("return {e}"));
        } else if n == 0 {
            self.line(indent, "pass");
        }
    }

    fn nested(&mut self, b: &mut Body, indent: usize, depth: usize) {
        let saved = b.vars.len();
        let n = self.rng.random_range(1..=3);
        self.block(b, indent, n, depth, false);
        // Names first bound inside the block may be unbound after it.
        b.vars.truncate(saved);
    }

    fn statement(&mut self, b: &mut Body, indent: usize, depth: usize, top: bool) {
        let choice = self.rng.random_range(0..if depth > 0 { 10 } else { 7 });
        match choice {
            0..=2 => self.assign(b, indent, None, top),
            3 | 4 => {
                let call = self.call(b);
                match call {
                    Some(c) => self.line(indent, &c),
                    None => self.assign(b, indent, None, top),
                }
            }
            5 => {
                if let Some(o) = self.var_of(b, Kind::Obj) {
                    let f = *FIELDS.choose(&mut self.rng).unwrap();
                    let e = self.expr(b, None);
                    self.line(indent, &format!("{o}.{f} = {e}"));
                } else if let Some(l) = self.var_of(b, Kind::List) {
                    let e = self.expr(b, None);
                    self.line(indent, &format!("{l}.append({e})"));
                } else {
                    self.assign(b, indent, None, top);
                }
            }
            6 => {
                if let Some(l) = self.var_of(b, Kind::List) {
                    let e = self.expr(b, None);
                    self.line(indent, &format!("{l}.append({e})"));
                } else {
                    let e = self.expr(b, None);
                    self.line(indent, &format!("print({e})"));
                }
            }
            7 => {
                let c = self.condition(b);
                self.line(indent, &format!("if {c}:"));
                self.nested(b, indent + 1, depth - 1);
                if self.rng.random_bool(0.5) {
                    self.line(indent, "else:");
                    self.nested(b, indent + 1, depth - 1);
                }
            }
            8 => {
                let var = format!("i{}", b.fresh);
                b.fresh += 1;
                match self.var_of(b, Kind::List) {
                    Some(l) if self.rng.random_bool(0.6) => {
                        self.line(indent, &format!("for {var} in {l}:"));
                        b.vars.push((var, Kind::Any));
                    }
                    _ => {
                        let k = self.rng.random_range(0..4);
                        self.line(indent, &format!("for {var} in range({k}):"));
                        b.vars.push((var, Kind::Int));
                    }
                }
                let saved = b.vars.len() - 1;
                self.nested(b, indent + 1, depth - 1);
                b.vars.truncate(saved);
            }
            _ => {
                let var = format!("w{}", b.fresh);
                b.fresh += 1;
                let k = self.rng.random_range(0..4);
                self.line(indent, &format!("{var} = 0"));
                b.vars.push((var.clone(), Kind::Int));
                self.line(indent, &format!("while {var} < {k}:"));
                self.line(indent + 1, &format!("{var} = {var} + 1"));
                let saved = b.vars.len();
                // The counter must stay an Int inside the loop.
                let counter = b.vars.remove(saved - 1);
                self.nested(b, indent + 1, depth - 1);
                b.vars.truncate(saved - 1);
                b.vars.push(counter);
            }
        }
    }

    fn var_of(&mut self, b: &Body, kind: Kind) -> Option<String> {
        let c: Vec<&String> = b
            .vars
            .iter()
            .filter(|(_, k)| *k == kind)
            .map(|(n, _)| n)
            .collect();
        c.choose(&mut self.rng).map(|s| s.to_string())
    }

    /// Assigns an expression to a variable. Outside straight-line code an
    /// existing variable keeps its kind; otherwise a fresh one is bound.
    fn assign(&mut self, b: &mut Body, indent: usize, kind: Option<Kind>, top: bool) {
        let kind = kind.unwrap_or_else(|| {
            *[
                Kind::Int,
                Kind::Str,
                Kind::List,
                Kind::Obj,
                Kind::Any,
                Kind::Func(0),
            ]
            .choose(&mut self.rng)
            .unwrap()
        });
        let (e, kind) = self.typed_expr(b, kind);
        let reuse: Vec<usize> = (0..b.vars.len())
            .filter(|&i| b.vars[i].0 != "self" && (top || b.vars[i].1 == kind))
            .collect();
        let name = match reuse.choose(&mut self.rng) {
            Some(&i) if self.rng.random_bool(0.4) => {
                b.vars[i].1 = kind;
                b.vars[i].0.clone()
            }
            _ => {
                let n = format!("v{}", b.fresh);
                b.fresh += 1;
                b.vars.push((n.clone(), kind));
                n
            }
        };
        self.line(indent, &format!("{name} = {e}"));
    }

    fn literal_text(&mut self) -> String {
        match self.rng.random_range(0..4) {
            0 => self.rng.random_range(-3..10).to_string(),
            1 => format!("'{}'", STRINGS.choose(&mut self.rng).unwrap()),
            2 => "[]".to_string(),
            _ => "None".to_string(),
        }
    }

    fn condition(&mut self, b: &Body) -> String {
        match self.var_of(b, Kind::Int) {
            Some(v) if self.rng.random_bool(0.6) => {
                format!("{v} < {}", self.rng.random_range(0..5))
            }
            _ => {
                if self.rng.random_bool(0.5) {
                    "True".to_string()
                } else {
                    "not True".to_string()
                }
            }
        }
    }

    /// Method indices and functions `b` may call.
    fn callable_methods(&self, b: &Body) -> Vec<usize> {
        match b.owner {
            Owner::Method(i) => (i + 1..METHODS.len()).collect(),
            Owner::Function(_) => Vec::new(),
            Owner::Main => (0..METHODS.len()).collect(),
        }
    }

    fn callable_functions(&self, b: &Body) -> Vec<usize> {
        match b.owner {
            Owner::Method(_) | Owner::Main => (0..self.functions.len()).collect(),
            Owner::Function(i) => (i + 1..self.functions.len()).collect(),
        }
    }

    fn args(&mut self, b: &Body, n: usize) -> String {
        (0..n)
            .map(|_| self.expr(b, None))
            .collect::<Vec<_>>()
            .join(", ")
    }

    /// A call expression usable as a statement or a value of kind Any.
    fn call(&mut self, b: &Body) -> Option<String> {
        let mut options: Vec<u8> = Vec::new();
        if self.var_of(b, Kind::Obj).is_some() && !self.callable_methods(b).is_empty() {
            options.push(0);
        }
        if !self.callable_functions(b).is_empty() {
            options.push(1);
        }
        if b.vars.iter().any(|(_, k)| matches!(k, Kind::Func(_))) {
            options.push(2);
        }
        if !self.countdowns.is_empty() {
            options.push(3);
        }
        match options.choose(&mut self.rng)? {
            0 => {
                let o = self.var_of(b, Kind::Obj)?;
                let m = *self.callable_methods(b).choose(&mut self.rng)?;
                let (name, arity) = METHODS[m];
                let a = self.args(b, arity);
                Some(format!("{o}.{name}({a})"))
            }
            1 => {
                let f = *self.callable_functions(b).choose(&mut self.rng)?;
                let (name, arity) = self.functions[f].clone();
                let a = self.args(b, arity);
                Some(format!("{name}({a})"))
            }
            2 => {
                let fs: Vec<(String, usize)> = b
                    .vars
                    .iter()
                    .filter_map(|(n, k)| match k {
                        Kind::Func(a) => Some((n.clone(), *a)),
                        _ => None,
                    })
                    .collect();
                let (n, arity) = fs.choose(&mut self.rng)?.clone();
                let a = self.args(b, arity);
                Some(format!("{n}({a})"))
            }
            _ => {
                let name = self.countdowns.choose(&mut self.rng)?.clone();
                Some(format!("{name}({})", self.rng.random_range(0..4)))
            }
        }
    }

    fn expr(&mut self, b: &Body, kind: Option<Kind>) -> String {
        let kind = kind.unwrap_or_else(|| {
            *[Kind::Int, Kind::Str, Kind::List, Kind::Obj, Kind::Any]
                .choose(&mut self.rng)
                .unwrap()
        });
        self.typed_expr(b, kind).0
    }

    /// An expression of `kind`, or of a weaker kind when none is available.
    fn typed_expr(&mut self, b: &Body, kind: Kind) -> (String, Kind) {
        if let Some(v) = self.var_of(b, kind) {
            if self.rng.random_bool(0.3) {
                return (v, kind);
            }
        }
        match kind {
            Kind::Int => {
                let l = self.rng.random_range(0..10);
                match self.var_of(b, Kind::Int) {
                    Some(v) if self.rng.random_bool(0.4) => (format!("{v} + {l}"), kind),
                    _ => match self.var_of(b, Kind::List) {
                        Some(v) if self.rng.random_bool(0.3) => (format!("len({v})"), kind),
                        _ => (l.to_string(), kind),
                    },
                }
            }
            Kind::Str => {
                let s = STRINGS.choose(&mut self.rng).unwrap();
                match self.var_of(b, Kind::Str) {
                    Some(v) if self.rng.random_bool(0.4) => (format!("{v} + '{s}'"), kind),
                    _ => (format!("'{s}'"), kind),
                }
            }
            Kind::List => match self.rng.random_range(0..3) {
                0 => ("[]".to_string(), kind),
                1 => {
                    let a = self.expr(b, None);
                    (format!("[{a}]"), kind)
                }
                _ => (format!("range({})", self.rng.random_range(0..4)), kind),
            },
            Kind::Obj => {
                let c = self.classes.choose(&mut self.rng).unwrap().clone();
                (format!("{c}()"), kind)
            }
            Kind::Func(_) => {
                let fs = self.callable_functions(b);
                let ms = self.callable_methods(b);
                match (self.var_of(b, Kind::Obj), ms.choose(&mut self.rng)) {
                    (Some(o), Some(&m)) if self.rng.random_bool(0.5) || fs.is_empty() => {
                        (format!("{o}.{}", METHODS[m].0), Kind::Func(METHODS[m].1))
                    }
                    _ => match fs.choose(&mut self.rng) {
                        Some(&f) => {
                            let (n, a) = self.functions[f].clone();
                            (n, Kind::Func(a))
                        }
                        None => self.typed_expr(b, Kind::Int),
                    },
                }
            }
            Kind::Any => match self.rng.random_range(0..4) {
                0 => match self.call(b) {
                    Some(c) => (c, Kind::Any),
                    None => self.typed_expr(b, Kind::Str),
                },
                1 => match self.var_of(b, Kind::Obj) {
                    Some(o) if b.has_self || self.rng.random_bool(0.5) => (
                        format!("{o}.{}", FIELDS.choose(&mut self.rng).unwrap()),
                        Kind::Any,
                    ),
                    _ => (self.literal_text(), Kind::Any),
                },
                2 => (self.literal_text(), Kind::Any),
                _ => match self.var_of(b, Kind::Any) {
                    Some(v) => (v, Kind::Any),
                    None => (self.literal_text(), Kind::Any),
                },
            },
        }
    }
}
