//! Plain Datalog evaluation and the per-configuration correctness check.
//!
//! Nothing in here calls into the lifted engine's evaluation code: plain
//! inference is a separate semi-naive loop over string tuples, with a naive
//! reference loop next to it. [`check_theorem1`] runs the lifted engine once,
//! then for every valid configuration compares the restricted result with a
//! plain run over the restricted input.

use std::collections::{BTreeMap, BTreeSet};

use rustc_hash::{FxHashMap, FxHashSet};
use thiserror::Error;

use crate::engine::{infer, Database, EngineConfig, EngineError};
use crate::pcbdd::{BddError, BddManager, Configuration, FeatureTable};
use crate::syntax::{print_pc, Atom, Clause, PcExpr, Program, Term};

#[derive(Debug, Error)]
pub enum OracleError {
    #[error(transparent)]
    Bdd(#[from] BddError),
    #[error(transparent)]
    Engine(#[from] EngineError),
}

/// A set of ground tuples.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlainRelation {
    pub name: String,
    pub arity: usize,
    pub tuples: BTreeSet<Vec<String>>,
}

/// Plain relations by name.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PlainDatabase {
    relations: BTreeMap<String, PlainRelation>,
}

impl PlainDatabase {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn for_program(program: &Program) -> Self {
        let mut db = PlainDatabase::new();
        for d in &program.decls {
            db.add_relation(&d.name, d.arity());
        }
        db
    }

    pub fn add_relation(&mut self, name: &str, arity: usize) -> &mut PlainRelation {
        self.relations
            .entry(name.to_owned())
            .or_insert_with(|| PlainRelation {
                name: name.to_owned(),
                arity,
                tuples: BTreeSet::new(),
            })
    }

    /// Adds a tuple, creating the relation if needed. Returns whether it was
    /// new.
    pub fn insert<S: AsRef<str>>(&mut self, relation: &str, values: &[S]) -> bool {
        let rel = self.add_relation(relation, values.len());
        assert_eq!(rel.arity, values.len(), "arity mismatch for `{relation}`");
        rel.tuples
            .insert(values.iter().map(|v| v.as_ref().to_owned()).collect())
    }

    pub fn relation(&self, name: &str) -> Option<&PlainRelation> {
        self.relations.get(name)
    }

    /// Tuples of `name`; empty when the relation is absent.
    pub fn tuples(&self, name: &str) -> BTreeSet<Vec<String>> {
        self.relations
            .get(name)
            .map(|r| r.tuples.clone())
            .unwrap_or_default()
    }

    pub fn relations(&self) -> impl Iterator<Item = &PlainRelation> {
        self.relations.values()
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.relations.keys().map(String::as_str)
    }

    pub fn total_tuples(&self) -> usize {
        self.relations.values().map(|r| r.tuples.len()).sum()
    }
}

/// Keeps the tuples whose presence condition holds in `conf`.
pub fn restrict(db: &Database, conf: &Configuration, mgr: &BddManager) -> PlainDatabase {
    let mut out = PlainDatabase::new();
    for rel in db.relations() {
        let target = out.add_relation(rel.name(), rel.arity());
        for (tuple, pc) in rel.iter() {
            if mgr.eval(pc, conf) {
                target.tuples.insert(
                    tuple
                        .iter()
                        .map(|&s| db.symbols().resolve(s).to_owned())
                        .collect(),
                );
            }
        }
    }
    out
}

/// The clauses of `program` whose presence condition holds in `conf`, with
/// conditions removed. Features unknown to `features` are taken as false.
pub fn restrict_program(
    program: &Program,
    conf: &Configuration,
    features: &FeatureTable,
) -> Program {
    let value = |name: &str| features.get(name).is_some_and(|v| conf.get(v));
    let keep = |cs: &[Clause]| -> Vec<Clause> {
        cs.iter()
            .filter(|c| c.pc.eval(&value))
            .map(|c| Clause {
                pc: PcExpr::True,
                ..c.clone()
            })
            .collect()
    };
    Program {
        decls: program.decls.clone(),
        rules: keep(&program.rules),
        facts: keep(&program.facts),
        features: Vec::new(),
    }
}

// ---------------------------------------------------------------------------
// plain semi-naive evaluation

type Tuple = Box<[u32]>;

/// Column set, and key -> row numbers.
type Index = (Vec<usize>, FxHashMap<Tuple, Vec<usize>>);

#[derive(Default)]
struct Interner {
    names: Vec<String>,
    ids: FxHashMap<String, u32>,
}

impl Interner {
    fn intern(&mut self, s: &str) -> u32 {
        if let Some(&id) = self.ids.get(s) {
            return id;
        }
        let id = self.names.len() as u32;
        self.names.push(s.to_owned());
        self.ids.insert(s.to_owned(), id);
        id
    }
}

struct Table {
    arity: usize,
    rows: Vec<Tuple>,
    set: FxHashSet<Tuple>,
    indices: Vec<Index>,
}

impl Table {
    fn new(arity: usize) -> Self {
        Table {
            arity,
            rows: Vec::new(),
            set: FxHashSet::default(),
            indices: Vec::new(),
        }
    }

    fn add(&mut self, t: Tuple) -> bool {
        if self.set.contains(&t) {
            return false;
        }
        let row = self.rows.len();
        for (cols, map) in &mut self.indices {
            let key: Tuple = cols.iter().map(|&c| t[c]).collect();
            map.entry(key).or_default().push(row);
        }
        self.set.insert(t.clone());
        self.rows.push(t);
        true
    }

    fn index(&mut self, cols: &[usize]) -> usize {
        if let Some(i) = self.indices.iter().position(|(c, _)| c == cols) {
            return i;
        }
        let mut map: FxHashMap<Tuple, Vec<usize>> = FxHashMap::default();
        for (row, t) in self.rows.iter().enumerate() {
            map.entry(cols.iter().map(|&c| t[c]).collect())
                .or_default()
                .push(row);
        }
        self.indices.push((cols.to_vec(), map));
        self.indices.len() - 1
    }
}

#[derive(Clone, Copy)]
enum Arg {
    Const(u32),
    Var(usize),
}

struct PlainAtom {
    table: usize,
    args: Vec<Arg>,
}

/// One way to read a rule body: which atom comes from the delta, the order
/// of the others, and the index each of them is probed with.
struct Order {
    first: usize,
    rest: Vec<(usize, Option<usize>)>,
}

struct PlainRule {
    head: PlainAtom,
    body: Vec<PlainAtom>,
    nvars: usize,
    orders: Vec<Order>,
}

fn lower_atom(
    atom: &Atom,
    tables: &FxHashMap<&str, usize>,
    vars: &mut Vec<String>,
    syms: &mut Interner,
) -> PlainAtom {
    let table = tables[atom.predicate.as_str()];
    let args = atom
        .args
        .iter()
        .map(|t| match t {
            Term::Constant(c) => Arg::Const(syms.intern(c)),
            Term::Variable(v) => Arg::Var(match vars.iter().position(|x| x == v) {
                Some(i) => i,
                None => {
                    vars.push(v.clone());
                    vars.len() - 1
                }
            }),
        })
        .collect();
    PlainAtom { table, args }
}

fn bound_columns(atom: &PlainAtom, bound: &[bool]) -> Vec<usize> {
    atom.args
        .iter()
        .enumerate()
        .filter(|(_, a)| match a {
            Arg::Const(_) => true,
            Arg::Var(v) => bound[*v],
        })
        .map(|(i, _)| i)
        .collect()
}

fn bind_all(atom: &PlainAtom, bound: &mut [bool]) {
    for a in &atom.args {
        if let Arg::Var(v) = a {
            bound[*v] = true;
        }
    }
}

/// Matches `t` against `atom` under `env`, extending it. Returns false on a
/// clash; `env` may then be partly extended and must be restored by the
/// caller.
fn unify(atom: &PlainAtom, t: &[u32], env: &mut [Option<u32>], newly: &mut Vec<usize>) -> bool {
    for (a, &value) in atom.args.iter().zip(t) {
        match *a {
            Arg::Const(c) => {
                if c != value {
                    return false;
                }
            }
            Arg::Var(v) => match env[v] {
                Some(x) if x != value => return false,
                Some(_) => {}
                None => {
                    env[v] = Some(value);
                    newly.push(v);
                }
            },
        }
    }
    true
}

fn ground(atom: &PlainAtom, env: &[Option<u32>]) -> Tuple {
    atom.args
        .iter()
        .map(|a| match *a {
            Arg::Const(c) => c,
            Arg::Var(v) => env[v].expect("head variable bound by the body"),
        })
        .collect()
}

fn join(
    rule: &PlainRule,
    order: &Order,
    step: usize,
    tables: &[Table],
    env: &mut Vec<Option<u32>>,
    out: &mut Vec<(usize, Tuple)>,
) {
    if step == order.rest.len() {
        out.push((rule.head.table, ground(&rule.head, env)));
        return;
    }
    let (ai, ix) = order.rest[step];
    let atom = &rule.body[ai];
    let table = &tables[atom.table];
    let mut try_row = |t: &[u32], env: &mut Vec<Option<u32>>| {
        let mut newly = Vec::new();
        if unify(atom, t, env, &mut newly) {
            join(rule, order, step + 1, tables, env, out);
        }
        for v in newly {
            env[v] = None;
        }
    };
    match ix {
        Some(ix) => {
            let (cols, map) = &table.indices[ix];
            let key: Tuple = cols
                .iter()
                .map(|&c| match atom.args[c] {
                    Arg::Const(k) => k,
                    Arg::Var(v) => env[v].expect("index column bound"),
                })
                .collect();
            if let Some(rows) = map.get(&key) {
                for &r in rows {
                    try_row(&table.rows[r], env);
                }
            }
        }
        None => {
            for r in 0..table.rows.len() {
                try_row(&table.rows[r], env);
            }
        }
    }
}

struct Plain {
    syms: Interner,
    names: Vec<String>,
    tables: Vec<Table>,
    rules: Vec<PlainRule>,
}

impl Plain {
    fn new(program: &Program, edb: &PlainDatabase) -> Self {
        let mut syms = Interner::default();
        let mut names = Vec::new();
        let mut tables = Vec::new();
        let mut by_name: FxHashMap<&str, usize> = FxHashMap::default();
        let arities = program
            .decls
            .iter()
            .map(|d| (d.name.as_str(), d.arity()))
            .chain(edb.relations().map(|r| (r.name.as_str(), r.arity)));
        for (name, arity) in arities {
            if !by_name.contains_key(name) {
                by_name.insert(name, tables.len());
                names.push(name.to_owned());
                tables.push(Table::new(arity));
            }
        }
        for rel in edb.relations() {
            let ti = by_name[rel.name.as_str()];
            for t in &rel.tuples {
                tables[ti].add(t.iter().map(|v| syms.intern(v)).collect());
            }
        }
        for f in &program.facts {
            let ti = by_name[f.head.predicate.as_str()];
            tables[ti].add(f.head.args.iter().map(|a| syms.intern(a.text())).collect());
        }
        let rules = program
            .rules
            .iter()
            .map(|r| {
                let mut vars = Vec::new();
                let body: Vec<PlainAtom> = r
                    .body
                    .iter()
                    .map(|a| lower_atom(a, &by_name, &mut vars, &mut syms))
                    .collect();
                let head = lower_atom(&r.head, &by_name, &mut vars, &mut syms);
                PlainRule {
                    head,
                    body,
                    nvars: vars.len(),
                    orders: Vec::new(),
                }
            })
            .collect();
        let mut plain = Plain {
            syms,
            names,
            tables,
            rules,
        };
        plain.plan();
        plain
    }

    fn plan(&mut self) {
        for rule in &mut self.rules {
            for first in 0..rule.body.len() {
                let mut bound = vec![false; rule.nvars];
                bind_all(&rule.body[first], &mut bound);
                let mut rest = Vec::new();
                for ai in (0..rule.body.len()).filter(|&i| i != first) {
                    let atom = &rule.body[ai];
                    let cols = bound_columns(atom, &bound);
                    let ix = (!cols.is_empty()).then(|| self.tables[atom.table].index(&cols));
                    rest.push((ai, ix));
                    bind_all(atom, &mut bound);
                }
                rule.orders.push(Order { first, rest });
            }
        }
    }

    fn run(&mut self) {
        let mut delta: Vec<Vec<Tuple>> = self.tables.iter().map(|t| t.rows.clone()).collect();
        while delta.iter().any(|d| !d.is_empty()) {
            let mut derived = Vec::new();
            for rule in &self.rules {
                for order in &rule.orders {
                    let first = &rule.body[order.first];
                    for t in &delta[first.table] {
                        let mut env = vec![None; rule.nvars];
                        let mut newly = Vec::new();
                        if unify(first, t, &mut env, &mut newly) {
                            join(rule, order, 0, &self.tables, &mut env, &mut derived);
                        }
                    }
                }
            }
            let mut next: Vec<Vec<Tuple>> = vec![Vec::new(); self.tables.len()];
            for (ti, t) in derived {
                if self.tables[ti].add(t.clone()) {
                    next[ti].push(t);
                }
            }
            delta = next;
        }
    }

    fn into_database(self) -> PlainDatabase {
        let mut out = PlainDatabase::new();
        for (name, table) in self.names.iter().zip(&self.tables) {
            let rel = out.add_relation(name, table.arity);
            for t in &table.rows {
                rel.tuples.insert(
                    t.iter()
                        .map(|&s| self.syms.names[s as usize].clone())
                        .collect(),
                );
            }
        }
        out
    }
}

/// Least model of `program` over `edb`, by semi-naive evaluation. Presence
/// conditions in `program` are ignored; see [`restrict_program`].
pub fn plain_infer(program: &Program, edb: &PlainDatabase) -> PlainDatabase {
    let mut p = Plain::new(program, edb);
    p.run();
    p.into_database()
}

// ---------------------------------------------------------------------------
// naive reference

fn naive_match(
    body: &[Atom],
    db: &PlainDatabase,
    env: &mut BTreeMap<String, String>,
    head: &Atom,
    out: &mut Vec<Vec<String>>,
) {
    let Some((atom, rest)) = body.split_first() else {
        out.push(
            head.args
                .iter()
                .map(|t| match t {
                    Term::Constant(c) => c.clone(),
                    Term::Variable(v) => env[v].clone(),
                })
                .collect(),
        );
        return;
    };
    for t in db.tuples(&atom.predicate) {
        let mut local = env.clone();
        let ok = atom.args.iter().zip(&t).all(|(a, v)| match a {
            Term::Constant(c) => c == v,
            Term::Variable(x) => local.entry(x.clone()).or_insert_with(|| v.clone()) == v,
        });
        if ok {
            naive_match(rest, db, &mut local, head, out);
        }
    }
}

/// Least model by naive iteration: every rule over all tuples until nothing
/// changes. Slow; used to cross-check [`plain_infer`].
pub fn naive_infer(program: &Program, edb: &PlainDatabase) -> PlainDatabase {
    let mut db = edb.clone();
    for d in &program.decls {
        db.add_relation(&d.name, d.arity());
    }
    for f in &program.facts {
        let values: Vec<&str> = f.head.args.iter().map(Term::text).collect();
        db.insert(&f.head.predicate, &values);
    }
    loop {
        let mut new = Vec::new();
        for r in &program.rules {
            let mut out = Vec::new();
            naive_match(&r.body, &db, &mut BTreeMap::new(), &r.head, &mut out);
            new.extend(out.into_iter().map(|t| (r.head.predicate.clone(), t)));
        }
        let mut changed = false;
        for (rel, t) in new {
            changed |= db.insert(&rel, &t);
        }
        if !changed {
            return db;
        }
    }
}

// ---------------------------------------------------------------------------
// per-configuration check

/// Default cap on the number of configurations [`check_theorem1`] enumerates.
pub const DEFAULT_MAX_CONFIGURATIONS: usize = 1 << 16;

/// A configuration under which the lifted result and the plain result
/// disagree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counterexample {
    pub configuration: Configuration,
    /// `configuration` with feature names, e.g. `{Air=0, Land=0, Sea=1}`.
    pub assignment: String,
    pub relation: String,
    /// Tuples the plain run derives but the restricted lifted result lacks,
    /// with the lifted presence condition (`False` when absent).
    pub missing: Vec<(Vec<String>, String)>,
    /// Tuples in the restricted lifted result that the plain run does not
    /// derive, with their lifted presence condition.
    pub extra: Vec<(Vec<String>, String)>,
}

impl Counterexample {
    /// Human-readable report: the configuration, then one annotated fact line
    /// per differing tuple.
    pub fn report(&self) -> String {
        let mut s = format!(
            "counterexample in configuration {} for `{}`\n",
            self.assignment, self.relation
        );
        for (label, list) in [("missing", &self.missing), ("extra", &self.extra)] {
            for (t, pc) in list {
                s.push_str(&format!(
                    "  {label}: {}({}) @ {pc}\n",
                    self.relation,
                    t.join(", ")
                ));
            }
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Pass { configurations: usize },
    Counterexample(Box<Counterexample>),
}

impl Verdict {
    pub fn is_pass(&self) -> bool {
        matches!(self, Verdict::Pass { .. })
    }
}

/// Runs the lifted engine on `program` and `edb_hat`, then checks for every
/// configuration of the feature model that restricting the lifted result
/// gives the plain result over the restricted input and program.
///
/// Features are registered from `program` before anything else so that
/// their variable order is stable.
pub fn check_theorem1(
    program: &Program,
    edb_hat: &Database,
    config: &EngineConfig,
    mgr: &mut BddManager,
    max_configurations: usize,
) -> Result<Verdict, OracleError> {
    crate::syntax::register_features(program, mgr);
    let lifted = infer(program, edb_hat.clone(), config, mgr)?.database;
    let configurations = mgr.enumerate_configurations(config.feature_model, max_configurations)?;
    for conf in &configurations {
        let got = restrict(&lifted, conf, mgr);
        let restricted = restrict_program(program, conf, mgr.features());
        let want = plain_infer(&restricted, &restrict(edb_hat, conf, mgr));
        let names: BTreeSet<&str> = got.names().chain(want.names()).collect();
        for name in names {
            let (g, w) = (got.tuples(name), want.tuples(name));
            if g == w {
                continue;
            }
            let lifted_pc = |t: &Vec<String>| match lifted.exists(name, t) {
                Ok(Some(pc)) => print_pc(pc, mgr),
                _ => "False".to_owned(),
            };
            let missing = w
                .difference(&g)
                .map(|t| (t.clone(), lifted_pc(t)))
                .collect();
            let extra = g
                .difference(&w)
                .map(|t| (t.clone(), lifted_pc(t)))
                .collect();
            return Ok(Verdict::Counterexample(Box::new(Counterexample {
                configuration: conf.clone(),
                assignment: conf.describe(mgr.features()),
                relation: name.to_owned(),
                missing,
                extra,
            })));
        }
    }
    Ok(Verdict::Pass {
        configurations: configurations.len(),
    })
}
