//! Node tests: attribute comparisons and conjunctions of literals.
//!
//! A literal test succeeds on an example when some substitution of its
//! (existentially quantified) variables turns every literal into a fact of
//! the example's interpretation. Tests further down a tree refine the
//! conjunction that succeeded on the path from the root, so variables bound
//! there can be reused.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::dataset::{Attribute, AttributeKind, Cell, Constant, Dataset, Example, GroundFact, Schema};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Term {
    Var(String),
    Const(Constant),
}

impl Term {
    pub fn var(name: impl Into<String>) -> Self {
        Term::Var(name.into())
    }

    pub fn sym(name: impl Into<String>) -> Self {
        Term::Const(Constant::Symbol(name.into()))
    }

    pub fn num(x: f64) -> Self {
        Term::Const(Constant::Number(x))
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => f.write_str(v),
            Term::Const(c) => write!(f, "{c}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Literal {
    pub functor: String,
    pub args: Vec<Term>,
}

impl Literal {
    pub fn new(functor: impl Into<String>, args: Vec<Term>) -> Self {
        Self { functor: functor.into(), args }
    }

    fn variables(&self) -> impl Iterator<Item = &str> {
        self.args.iter().filter_map(|t| match t {
            Term::Var(v) => Some(v.as_str()),
            Term::Const(_) => None,
        })
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.functor)?;
        if !self.args.is_empty() {
            f.write_str("(")?;
            for (i, a) in self.args.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{a}")?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

/// Variable to constant substitution. Ordered so bindings print and compare
/// deterministically.
pub type Binding = BTreeMap<String, Constant>;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Comparator {
    /// `attr <= threshold`
    Le(f64),
    /// `attr = value`, by nominal code
    Eq(u32),
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AttrTest {
    pub attr: usize,
    pub op: Comparator,
}

impl AttrTest {
    /// Missing cells fail every attribute test.
    pub fn holds(&self, example: &Example) -> bool {
        match (self.op, example.value(self.attr)) {
            (_, Cell::Missing) => false,
            (Comparator::Le(t), cell) => cell.as_f64().is_some_and(|x| x <= t),
            (Comparator::Eq(code), Cell::Code(c)) => c == code,
            (Comparator::Eq(code), Cell::Number(x)) => x == code as f64,
        }
    }
}

/// Typed variable introduced by a literal test, available to tests below
/// its yes branch.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TypedVar {
    pub name: String,
    pub ty: String,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum TestQuery {
    Attribute(AttrTest),
    Conjunction {
        literals: Vec<Literal>,
        /// Variables first introduced by this conjunction.
        #[cfg_attr(feature = "serde", serde(default))]
        introduces: Vec<TypedVar>,
    },
}

impl TestQuery {
    pub fn le(attr: usize, threshold: f64) -> Self {
        TestQuery::Attribute(AttrTest { attr, op: Comparator::Le(threshold) })
    }

    pub fn eq(attr: usize, code: u32) -> Self {
        TestQuery::Attribute(AttrTest { attr, op: Comparator::Eq(code) })
    }

    pub fn conjunction(literals: Vec<Literal>) -> Self {
        TestQuery::Conjunction { literals, introduces: Vec::new() }
    }

    /// Evaluates the test on `example`, given the literals that succeeded on
    /// the path above the node.
    pub fn holds(&self, example: &Example, path: &[Literal]) -> bool {
        match self {
            TestQuery::Attribute(t) => t.holds(example),
            TestQuery::Conjunction { literals, .. } => {
                if path.is_empty() {
                    match_query(literals, example.facts(), &Binding::new()).is_some()
                } else {
                    let mut all = path.to_vec();
                    all.extend(literals.iter().cloned());
                    match_query(&all, example.facts(), &Binding::new()).is_some()
                }
            }
        }
    }

    pub fn display<'a>(&'a self, schema: &'a Schema) -> DisplayTest<'a> {
        DisplayTest { test: self, schema }
    }
}

pub struct DisplayTest<'a> {
    test: &'a TestQuery,
    schema: &'a Schema,
}

impl fmt::Display for DisplayTest<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.test {
            TestQuery::Attribute(AttrTest { attr, op }) => {
                let a = self.schema.get(*attr);
                let name = a.map_or("?", |a| a.name.as_str());
                match (op, a) {
                    (Comparator::Le(t), _) => write!(f, "{name} <= {t}"),
                    (Comparator::Eq(c), Some(a)) => write!(f, "{name} = {}", a.display_value(Cell::Code(*c))),
                    (Comparator::Eq(c), None) => write!(f, "{name} = #{c}"),
                }
            }
            TestQuery::Conjunction { literals, .. } => {
                if literals.is_empty() {
                    return f.write_str("true");
                }
                for (i, l) in literals.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{l}")?;
                }
                Ok(())
            }
        }
    }
}

/// Finds the first extension of `seed` under which every literal of the
/// conjunction is a fact. Literals are solved left to right and facts tried
/// in stored order, so the returned binding is deterministic.
pub fn match_query(literals: &[Literal], facts: &[GroundFact], seed: &Binding) -> Option<Binding> {
    let mut binding = seed.clone();
    solve(literals, facts, &mut binding).then_some(binding)
}

fn solve(literals: &[Literal], facts: &[GroundFact], binding: &mut Binding) -> bool {
    let Some((first, rest)) = literals.split_first() else {
        return true;
    };
    let mut trail: Vec<String> = Vec::new();
    for fact in facts.iter().filter(|f| f.functor == first.functor && f.args.len() == first.args.len()) {
        if unify(first, fact, binding, &mut trail) && solve(rest, facts, binding) {
            return true;
        }
        for v in trail.drain(..) {
            binding.remove(&v);
        }
    }
    false
}

fn unify(literal: &Literal, fact: &GroundFact, binding: &mut Binding, trail: &mut Vec<String>) -> bool {
    for (term, value) in literal.args.iter().zip(&fact.args) {
        match term {
            Term::Const(c) => {
                if c != value {
                    return false;
                }
            }
            Term::Var(v) => match binding.get(v) {
                Some(bound) if bound != value => return false,
                Some(_) => {}
                None => {
                    binding.insert(v.clone(), value.clone());
                    trail.push(v.clone());
                }
            },
        }
    }
    true
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SlotMode {
    /// `+type`: a variable of that type already bound on the path
    Bound,
    /// `-type`: a new variable
    Fresh,
    /// `#type`: a constant observed in the data at that position
    Constant,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Slot {
    pub mode: SlotMode,
    pub ty: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Template {
    pub functor: String,
    pub slots: Vec<Slot>,
}

impl fmt::Display for Template {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.functor)?;
        for (i, s) in self.slots.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            let sigil = match s.mode {
                SlotMode::Bound => '+',
                SlotMode::Fresh => '-',
                SlotMode::Constant => '#',
            };
            write!(f, "{sigil}{}", s.ty)?;
        }
        f.write_str(")")
    }
}

/// Ordered template declarations. Order fixes the canonical candidate order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TemplateSet {
    templates: Vec<Template>,
}

impl TemplateSet {
    pub fn new(templates: Vec<Template>) -> Result<Self> {
        for (i, t) in templates.iter().enumerate() {
            if templates[..i].contains(t) {
                return Err(Error::DuplicateTemplate(t.to_string()));
            }
        }
        Ok(Self { templates })
    }

    pub fn templates(&self) -> &[Template] {
        &self.templates
    }

    pub fn is_empty(&self) -> bool {
        self.templates.is_empty()
    }
}

/// What is known on the succeeded path above a node.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PathContext {
    pub literals: Vec<Literal>,
    pub vars: Vec<TypedVar>,
}

impl PathContext {
    /// Context for the yes branch below a node with test `test`.
    pub fn refined(&self, test: &TestQuery) -> PathContext {
        match test {
            TestQuery::Attribute(_) => self.clone(),
            TestQuery::Conjunction { literals, introduces } => {
                let mut next = self.clone();
                next.literals.extend(literals.iter().cloned());
                next.vars.extend(introduces.iter().cloned());
                next
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct CandidateOptions<'a> {
    /// Attributes eligible for attribute tests, in schema order.
    pub test_attributes: &'a [usize],
    /// Longest conjunction placed in a single node.
    pub max_literals: usize,
}

/// Enumerates the tests that may be placed in a node, in canonical order:
/// attribute tests in schema order (thresholds ascending), then literal
/// conjunctions by length, template order and sorted constants.
pub fn generate_candidates(
    ctx: &PathContext,
    templates: &TemplateSet,
    ds: &Dataset,
    node_examples: &[usize],
    opts: &CandidateOptions<'_>,
) -> Vec<TestQuery> {
    let mut out = Vec::new();
    for &attr in opts.test_attributes {
        let Some(a) = ds.schema().get(attr) else { continue };
        attribute_candidates(attr, a, ds, node_examples, &mut out);
    }
    if templates.is_empty() || opts.max_literals == 0 {
        return out;
    }
    let constants = observed_constants(templates, ds, node_examples);
    let mut seen: BTreeSet<String> = BTreeSet::new();
    let mut frontier: Vec<(Vec<Literal>, Vec<TypedVar>)> = alloc::vec![(Vec::new(), Vec::new())];
    for depth in 0..opts.max_literals {
        let mut next = Vec::new();
        for (lits, intro) in &frontier {
            for t in templates.templates() {
                for (lit, new_vars) in instantiate(t, ctx, intro, &constants) {
                    // later literals must refine the ones before them
                    if depth > 0 && !lit.variables().any(|v| intro.iter().any(|tv| tv.name == v)) {
                        continue;
                    }
                    let mut l2 = lits.clone();
                    l2.push(lit);
                    let mut i2 = intro.clone();
                    i2.extend(new_vars);
                    let key = l2.iter().map(|l| l.to_string()).collect::<Vec<_>>().join(",");
                    if seen.insert(key) {
                        out.push(TestQuery::Conjunction { literals: l2.clone(), introduces: i2.clone() });
                        next.push((l2, i2));
                    }
                }
            }
        }
        frontier = next;
    }
    out
}

fn attribute_candidates(attr: usize, a: &Attribute, ds: &Dataset, ids: &[usize], out: &mut Vec<TestQuery>) {
    match &a.kind {
        AttributeKind::Numeric => {
            let mut values: Vec<f64> = ids.iter().filter_map(|&i| ds.value(i, attr).as_f64()).collect();
            values.sort_by(f64::total_cmp);
            values.dedup();
            for w in values.windows(2) {
                out.push(TestQuery::le(attr, 0.5 * (w[0] + w[1])));
            }
        }
        AttributeKind::Nominal(_) => {
            let mut codes: Vec<u32> = ids
                .iter()
                .filter_map(|&i| match ds.value(i, attr) {
                    Cell::Code(c) => Some(c),
                    _ => None,
                })
                .collect();
            codes.sort_unstable();
            codes.dedup();
            out.extend(codes.into_iter().map(|c| TestQuery::eq(attr, c)));
        }
        AttributeKind::Ignored => {}
    }
}

type ConstantTable = BTreeMap<(String, usize, usize), Vec<Constant>>;

/// Sorted constants seen at each (functor, arity, position) that some
/// template fills from data.
fn observed_constants(templates: &TemplateSet, ds: &Dataset, ids: &[usize]) -> ConstantTable {
    let mut wanted: BTreeMap<(String, usize, usize), BTreeSet<Constant>> = BTreeMap::new();
    for t in templates.templates() {
        for (pos, s) in t.slots.iter().enumerate() {
            if s.mode == SlotMode::Constant {
                wanted.entry((t.functor.clone(), t.slots.len(), pos)).or_default();
            }
        }
    }
    for &i in ids {
        for fact in ds.example(i).facts() {
            for (pos, c) in fact.args.iter().enumerate() {
                if let Some(set) = wanted.get_mut(&(fact.functor.clone(), fact.args.len(), pos)) {
                    set.insert(c.clone());
                }
            }
        }
    }
    wanted.into_iter().map(|(k, v)| (k, v.into_iter().collect())).collect()
}

/// Variable names A..Z, then V26, V27, ...
fn var_name(n: usize) -> String {
    if n < 26 {
        char::from(b'A' + n as u8).to_string()
    } else {
        format!("V{n}")
    }
}

fn instantiate(
    t: &Template,
    ctx: &PathContext,
    intro: &[TypedVar],
    constants: &ConstantTable,
) -> Vec<(Literal, Vec<TypedVar>)> {
    // per-slot choices; a choice is a term plus the variable it introduces
    let mut next_var = ctx.vars.len() + intro.len();
    let mut choices: Vec<Vec<(Term, Option<TypedVar>)>> = Vec::with_capacity(t.slots.len());
    for (pos, s) in t.slots.iter().enumerate() {
        let slot_choices = match s.mode {
            SlotMode::Bound => {
                let bound: Vec<_> = ctx
                    .vars
                    .iter()
                    .chain(intro)
                    .filter(|v| v.ty == s.ty)
                    .map(|v| (Term::Var(v.name.clone()), None))
                    .collect();
                if bound.is_empty() {
                    // nothing of this type bound yet: introduce it
                    let v = TypedVar { name: var_name(next_var), ty: s.ty.clone() };
                    next_var += 1;
                    alloc::vec![(Term::Var(v.name.clone()), Some(v))]
                } else {
                    bound
                }
            }
            SlotMode::Fresh => {
                let v = TypedVar { name: var_name(next_var), ty: s.ty.clone() };
                next_var += 1;
                alloc::vec![(Term::Var(v.name.clone()), Some(v))]
            }
            SlotMode::Constant => constants
                .get(&(t.functor.clone(), t.slots.len(), pos))
                .map(|cs| cs.iter().map(|c| (Term::Const(c.clone()), None)).collect())
                .unwrap_or_default(),
        };
        if slot_choices.is_empty() {
            return Vec::new();
        }
        choices.push(slot_choices);
    }
    // cartesian product, first slot varying slowest
    let mut out: Vec<(Vec<Term>, Vec<TypedVar>)> = alloc::vec![(Vec::new(), Vec::new())];
    for slot in &choices {
        let mut grown = Vec::with_capacity(out.len() * slot.len());
        for (terms, vars) in &out {
            for (term, var) in slot {
                let mut t2 = terms.clone();
                t2.push(term.clone());
                let mut v2 = vars.clone();
                v2.extend(var.iter().cloned());
                grown.push((t2, v2));
            }
        }
        out = grown;
    }
    out.into_iter().map(|(args, vars)| (Literal::new(t.functor.clone(), args), vars)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{Attribute, Example, Schema};
    use alloc::vec;

    fn fact(f: &str, args: &[&str]) -> GroundFact {
        GroundFact::new(
            f,
            args.iter()
                .map(|a| a.parse::<f64>().map(Constant::Number).unwrap_or_else(|_| Constant::symbol(*a)))
                .collect(),
        )
    }

    fn var(v: &str) -> Term {
        Term::var(v)
    }

    #[test]
    fn matches_atom_fact() {
        let facts = vec![fact("atom", &["d189_1", "c", "22", "-0.11"])];
        let q = vec![Literal::new("atom", vec![var("A"), Term::sym("c"), Term::num(22.0), var("C")])];
        let b = match_query(&q, &facts, &Binding::new()).unwrap();
        assert_eq!(b["A"], Constant::symbol("d189_1"));
        assert_eq!(b["C"], Constant::Number(-0.11));
    }

    #[test]
    fn empty_conjunction_keeps_seed() {
        let mut seed = Binding::new();
        seed.insert("X".into(), Constant::symbol("a"));
        assert_eq!(match_query(&[], &[], &seed), Some(seed));
    }

    #[test]
    fn bond_chain_needs_two_facts() {
        let q = vec![
            Literal::new("bond", vec![var("X"), var("Y"), Term::num(7.0)]),
            Literal::new("bond", vec![var("Y"), var("Z"), Term::num(7.0)]),
        ];
        let one = vec![fact("bond", &["a", "b", "7"])];
        assert_eq!(match_query(&q, &one, &Binding::new()), None);
        let two = vec![fact("bond", &["a", "b", "7"]), fact("bond", &["b", "c", "7"])];
        let b = match_query(&q, &two, &Binding::new()).unwrap();
        assert_eq!(b["X"], Constant::symbol("a"));
        assert_eq!(b["Y"], Constant::symbol("b"));
        assert_eq!(b["Z"], Constant::symbol("c"));
    }

    #[test]
    fn seed_restricts_solutions() {
        let facts = vec![fact("p", &["a"]), fact("p", &["b"])];
        let q = vec![Literal::new("p", vec![var("X")])];
        let mut seed = Binding::new();
        seed.insert("X".into(), Constant::symbol("b"));
        assert_eq!(match_query(&q, &facts, &seed).unwrap()["X"], Constant::symbol("b"));
        seed.insert("X".into(), Constant::symbol("z"));
        assert!(match_query(&q, &facts, &seed).is_none());
    }

    #[test]
    fn repeated_variable_must_agree() {
        let facts = vec![fact("edge", &["a", "b"]), fact("edge", &["c", "c"])];
        let q = vec![Literal::new("edge", vec![var("X"), var("X")])];
        assert_eq!(match_query(&q, &facts, &Binding::new()).unwrap()["X"], Constant::symbol("c"));
    }

    fn numeric_ds(values: &[f64]) -> Dataset {
        let schema = Schema::new(vec![Attribute::numeric("x")]).unwrap();
        Dataset::new(schema, values.iter().map(|&v| Example::new(vec![Cell::Number(v)])).collect()).unwrap()
    }

    #[test]
    fn thresholds_are_midpoints() {
        let ds = numeric_ds(&[10.0, 0.0, 8.0, 2.0, 8.0]);
        let opts = CandidateOptions { test_attributes: &[0], max_literals: 2 };
        let c = generate_candidates(&PathContext::default(), &TemplateSet::default(), &ds, &ds.ids(), &opts);
        assert_eq!(c, vec![TestQuery::le(0, 1.0), TestQuery::le(0, 5.0), TestQuery::le(0, 9.0)]);
    }

    #[test]
    fn constant_attribute_gives_nothing() {
        let ds = numeric_ds(&[3.0, 3.0, 3.0]);
        let opts = CandidateOptions { test_attributes: &[0], max_literals: 2 };
        let c = generate_candidates(&PathContext::default(), &TemplateSet::default(), &ds, &ds.ids(), &opts);
        assert!(c.is_empty());
    }

    #[test]
    fn template_constants_from_data() {
        let schema = Schema::new(vec![]).unwrap();
        let ex = vec![
            Example::new(vec![]).with_facts(vec![fact("atom", &["m1", "n"])]),
            Example::new(vec![]).with_facts(vec![fact("atom", &["m2", "c"]), fact("atom", &["m2", "n"])]),
        ];
        let ds = Dataset::new(schema, ex).unwrap();
        let t = TemplateSet::new(vec![Template {
            functor: "atom".into(),
            slots: vec![
                Slot { mode: SlotMode::Bound, ty: "mol".into() },
                Slot { mode: SlotMode::Constant, ty: "type".into() },
            ],
        }])
        .unwrap();
        let opts = CandidateOptions { test_attributes: &[], max_literals: 1 };
        let c = generate_candidates(&PathContext::default(), &t, &ds, &ds.ids(), &opts);
        let shown: Vec<_> = c.iter().map(|q| q.display(ds.schema()).to_string()).collect();
        assert_eq!(shown, vec!["atom(A,c)", "atom(A,n)"]);
    }

    #[test]
    fn bound_slots_reuse_path_variables() {
        let schema = Schema::new(vec![]).unwrap();
        let ex = vec![Example::new(vec![]).with_facts(vec![fact("bond", &["a", "b"])])];
        let ds = Dataset::new(schema, ex).unwrap();
        let t = TemplateSet::new(vec![Template {
            functor: "bond".into(),
            slots: vec![
                Slot { mode: SlotMode::Bound, ty: "atom".into() },
                Slot { mode: SlotMode::Fresh, ty: "atom".into() },
            ],
        }])
        .unwrap();
        let ctx = PathContext {
            literals: vec![Literal::new("atom", vec![var("A")])],
            vars: vec![TypedVar { name: "A".into(), ty: "atom".into() }],
        };
        let opts = CandidateOptions { test_attributes: &[], max_literals: 2 };
        let c = generate_candidates(&ctx, &t, &ds, &ds.ids(), &opts);
        let shown: Vec<_> = c.iter().map(|q| q.display(ds.schema()).to_string()).collect();
        // a second literal must hang off the variable the first one introduced
        assert_eq!(shown, vec!["bond(A,B)", "bond(A,B), bond(B,C)"]);
    }

    #[test]
    fn duplicate_templates_rejected() {
        let t = Template { functor: "p".into(), slots: vec![] };
        assert!(matches!(TemplateSet::new(vec![t.clone(), t]), Err(Error::DuplicateTemplate(_))));
    }

    #[test]
    fn missing_fails_attribute_tests() {
        let e = Example::new(vec![Cell::Missing]);
        assert!(!TestQuery::le(0, 1e300).holds(&e, &[]));
        assert!(!TestQuery::eq(0, 0).holds(&e, &[]));
    }
}
