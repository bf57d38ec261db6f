use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::ir::{Program, TypeId, TypeValue, Variable};

pub type TypeSet = BTreeSet<TypeValue>;

/// Default bound on distinct literal payloads per type within one variable.
pub const DEFAULT_LITERAL_LIMIT: usize = 32;

/// Collapses literal payloads of a type to the bare type when there are more
/// than `limit` of them or the bare type is already present. Returns the
/// types collapsed because of the limit.
pub fn normalize(set: &mut TypeSet, limit: usize) -> Vec<TypeId> {
    let mut counts: BTreeMap<TypeId, (bool, usize)> = BTreeMap::new();
    for tv in set.iter() {
        let e = counts.entry(tv.ty).or_default();
        match tv.literal {
            None => e.0 = true,
            Some(_) => e.1 += 1,
        }
    }
    let mut widened = Vec::new();
    for (ty, (bare, n)) in counts {
        if n == 0 || !(bare || n > limit) {
            continue;
        }
        if !bare {
            widened.push(ty);
        }
        set.retain(|tv| tv.ty != ty || tv.literal.is_none());
        set.insert(TypeValue::of(ty));
    }
    widened
}

/// Whether `v` is in `set` directly or through its bare type.
pub fn covers(set: &TypeSet, v: &TypeValue) -> bool {
    set.contains(v) || (v.literal.is_some() && set.contains(&v.bare()))
}

/// Result of growing an environment.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Growth {
    pub changed: bool,
    /// Variables whose literal payloads were collapsed by the limit.
    pub widened: Vec<(Variable, TypeId)>,
}

impl Growth {
    fn absorb(&mut self, other: Growth) {
        self.changed |= other.changed;
        self.widened.extend(other.widened);
    }
}

/// Map from variables to type sets. Absent variables have the empty set;
/// empty sets are never stored, so structural equality is lattice equality.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TypeEnv {
    bindings: BTreeMap<Variable, TypeSet>,
}

impl TypeEnv {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, v: &Variable) -> Option<&TypeSet> {
        self.bindings.get(v)
    }

    /// The set bound to `v`, empty when unbound.
    pub fn types(&self, v: &Variable) -> TypeSet {
        self.bindings.get(v).cloned().unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Variable, &TypeSet)> {
        self.bindings.iter()
    }

    pub fn variables(&self) -> impl Iterator<Item = &Variable> {
        self.bindings.keys()
    }

    /// Number of bound variables.
    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }

    /// Total number of (variable, value) pairs.
    pub fn size(&self) -> usize {
        self.bindings.values().map(BTreeSet::len).sum()
    }

    /// Weak update: adds `values` to `v`.
    pub fn extend(&mut self, v: &Variable, values: &TypeSet, limit: usize) -> Growth {
        if values.is_empty() {
            return Growth::default();
        }
        let mut g = Growth::default();
        match self.bindings.get_mut(v) {
            Some(cur) => {
                if values.iter().all(|x| covers(cur, x)) {
                    return g;
                }
                let before = cur.clone();
                cur.extend(values.iter().cloned());
                let w = normalize(cur, limit);
                g.changed = *cur != before;
                g.widened = w.into_iter().map(|t| (v.clone(), t)).collect();
            }
            None => {
                let mut set = values.clone();
                let w = normalize(&mut set, limit);
                g.widened = w.into_iter().map(|t| (v.clone(), t)).collect();
                g.changed = true;
                self.bindings.insert(v.clone(), set);
            }
        }
        g
    }

    pub fn insert_one(&mut self, v: &Variable, value: TypeValue, limit: usize) -> Growth {
        self.extend(v, &TypeSet::from([value]), limit)
    }

    /// Pointwise union followed by normalization.
    pub fn join(&mut self, other: &TypeEnv, limit: usize) -> Growth {
        let mut g = Growth::default();
        for (v, set) in &other.bindings {
            g.absorb(self.extend(v, set, limit));
        }
        g
    }

    pub fn joined(mut self, other: &TypeEnv, limit: usize) -> TypeEnv {
        self.join(other, limit);
        self
    }

    /// Bindings whose variable satisfies `keep`.
    pub fn restrict(&self, mut keep: impl FnMut(&Variable) -> bool) -> TypeEnv {
        TypeEnv {
            bindings: self
                .bindings
                .iter()
                .filter(|(v, _)| keep(v))
                .map(|(v, s)| (v.clone(), s.clone()))
                .collect(),
        }
    }

    /// Whether every value of `self` is covered by `other`: present as is,
    /// or through its bare type after widening.
    pub fn covered_by(&self, other: &TypeEnv) -> bool {
        self.bindings
            .iter()
            .all(|(v, set)| match other.bindings.get(v) {
                Some(o) => set.iter().all(|x| covers(o, x)),
                None => false,
            })
    }

    /// Field-level bindings only: those scoped to classes, builtins or the
    /// module rather than to a method.
    pub fn fields(&self, program: &Program) -> TypeEnv {
        self.restrict(|v| !program.is_method_scope(v.scope))
    }

    /// Readable listing, one binding per line, sorted by qualified names.
    pub fn display<'a>(&'a self, program: &'a Program) -> EnvDisplay<'a> {
        EnvDisplay { env: self, program }
    }

    /// Rows `(scope, name, types)` sorted by scope and name, with values
    /// rendered by [`value_name`].
    pub fn rows(&self, program: &Program) -> Vec<(String, String, Vec<String>)> {
        let mut rows: Vec<_> = self
            .bindings
            .iter()
            .map(|(v, set)| {
                let mut vals: Vec<String> = set.iter().map(|t| value_name(program, t)).collect();
                vals.sort();
                (
                    program.qualified_name(v.scope).to_string(),
                    v.name.to_string(),
                    vals,
                )
            })
            .collect();
        rows.sort();
        rows
    }
}

impl FromIterator<(Variable, TypeSet)> for TypeEnv {
    fn from_iter<I: IntoIterator<Item = (Variable, TypeSet)>>(iter: I) -> Self {
        let mut env = TypeEnv::new();
        for (v, s) in iter {
            env.extend(&v, &s, usize::MAX);
        }
        env
    }
}

/// `Banana`, `Str("If")`, `Integer(3)`.
pub fn value_name(program: &Program, tv: &TypeValue) -> String {
    let name = program.qualified_name(tv.ty);
    match &tv.literal {
        None => name.to_string(),
        Some(p) => format!("{name}({p})"),
    }
}

pub struct EnvDisplay<'a> {
    env: &'a TypeEnv,
    program: &'a Program,
}

impl fmt::Display for EnvDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (scope, name, vals) in self.env.rows(self.program) {
            writeln!(f, "{scope}\t{name}\t{{{}}}", vals.join(", "))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ir::{Payload, ProgramBuilder};
    use proptest::prelude::*;

    fn ids() -> (Program, TypeId, TypeId, TypeId) {
        let p = ProgramBuilder::new().finish().unwrap();
        let b = *p.builtins();
        (p, b.integer, b.str, b.array)
    }

    fn s(ty: TypeId, lit: &str) -> TypeValue {
        TypeValue::with_literal(ty, Payload::Str(lit.into()))
    }

    #[test]
    fn absent_means_empty_and_empty_is_not_stored() {
        let (p, _, str_, _) = ids();
        let v = Variable::new(p.module(), "x");
        let mut env = TypeEnv::new();
        assert!(env.types(&v).is_empty());
        assert!(!env.extend(&v, &TypeSet::new(), 4).changed);
        assert!(env.is_empty());
        assert!(env.insert_one(&v, s(str_, "a"), 4).changed);
        assert!(!env.insert_one(&v, s(str_, "a"), 4).changed);
    }

    #[test]
    fn payloads_collapse_past_the_limit() {
        let (p, int, str_, _) = ids();
        let v = Variable::new(p.module(), "x");
        let mut env = TypeEnv::new();
        env.insert_one(&v, TypeValue::with_literal(int, Payload::Int(1)), 2);
        env.insert_one(&v, s(str_, "a"), 2);
        env.insert_one(&v, s(str_, "b"), 2);
        let g = env.insert_one(&v, s(str_, "c"), 2);
        assert_eq!(g.widened, vec![(v.clone(), str_)]);
        let set = env.types(&v);
        assert!(set.contains(&TypeValue::of(str_)));
        assert!(set.contains(&TypeValue::with_literal(int, Payload::Int(1))));
        assert_eq!(set.len(), 2);
        // The bare type absorbs later payloads.
        assert!(!env.insert_one(&v, s(str_, "z"), 2).changed);
    }

    fn arb_env(
        p: &Program,
        int: TypeId,
        str_: TypeId,
        array: TypeId,
    ) -> impl Strategy<Value = TypeEnv> + Clone {
        let scopes = [p.module(), array, int];
        let vals = prop_oneof![
            Just(TypeValue::of(array)),
            Just(TypeValue::of(str_)),
            (0i64..4).prop_map(move |i| TypeValue::with_literal(int, Payload::Int(i))),
            "[ab]{1,2}".prop_map(move |x| TypeValue::with_literal(str_, Payload::Str(x.into()))),
        ];
        prop::collection::vec(
            (
                0usize..3,
                0usize..3,
                prop::collection::btree_set(vals, 1..5),
            ),
            0..5,
        )
        .prop_map(move |entries| {
            let mut env = TypeEnv::new();
            for (sc, n, set) in entries {
                let v = Variable::new(scopes[sc], ["a", "b", "c"][n]);
                env.extend(&v, &set, 3);
            }
            env
        })
    }

    proptest! {
        #[test]
        fn join_is_a_semilattice(
            (a, b, c) in {
                let (p, int, str_, array) = ids();
                let e = arb_env(&p, int, str_, array);
                (e.clone(), e.clone(), e)
            }
        ) {
            let ab = a.clone().joined(&b, 3);
            let ba = b.clone().joined(&a, 3);
            prop_assert_eq!(&ab, &ba);
            prop_assert_eq!(ab.clone().joined(&c, 3), a.clone().joined(&b.clone().joined(&c, 3), 3));
            prop_assert_eq!(a.clone().joined(&a, 3), a.clone());
            prop_assert!(a.covered_by(&ab) && b.covered_by(&ab));
        }
    }
}
