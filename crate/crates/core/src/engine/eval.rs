use indexmap::IndexMap;
use rustc_hash::FxBuildHasher;

use super::{AnnotatedRelation, Database, EngineConfig, EngineError, Sym};
use crate::pcbdd::{BddManager, PresenceCondition};
use crate::syntax::{pc_to_bdd, Atom, Clause, Program, Term};

/// Counters collected during a run.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Stats {
    pub iterations: usize,
    pub sat_checks: u64,
    /// Rule instantiations that reached the head.
    pub derivations: u64,
    /// Inserts that widened a stored presence condition or added a tuple.
    pub changes: u64,
    pub bdd_nodes: usize,
}

/// Result of [`infer`].
#[derive(Debug, Clone)]
pub struct Inference {
    pub database: Database,
    pub stats: Stats,
}

#[derive(Debug, Clone, Copy)]
enum Slot {
    Const(Sym),
    Var(usize),
}

#[derive(Debug, Clone, Copy)]
enum Action {
    Bind(usize),
    Check(Slot),
}

#[derive(Debug, Clone, Copy)]
enum Access {
    Delta,
    Scan,
    Index(usize),
    Exact,
}

#[derive(Debug)]
struct Step {
    rel: usize,
    access: Access,
    /// Values of the indexed columns, in column order.
    key: Vec<Slot>,
    /// Per remaining column: bind a fresh variable or compare.
    actions: Vec<(usize, Action)>,
}

#[derive(Debug)]
struct CompiledRule {
    head_rel: usize,
    head: Vec<Slot>,
    body_rels: Vec<usize>,
    nvars: usize,
    pc: PresenceCondition,
    /// `plans[i]` reads body atom `i` from the delta and the rest from the
    /// full relations.
    plans: Vec<Vec<Step>>,
}

fn compile_rule(
    rule: &Clause,
    db: &mut Database,
    mgr: &mut BddManager,
) -> Result<CompiledRule, EngineError> {
    let mut vars: Vec<String> = Vec::new();
    let mut slots = |atom: &Atom, db: &mut Database| -> Result<(usize, Vec<Slot>), EngineError> {
        let rel = db
            .relation_index(&atom.predicate)
            .ok_or_else(|| EngineError::UnknownRelation(atom.predicate.clone()))?;
        let arity = db.relation_at(rel).arity();
        if arity != atom.args.len() {
            return Err(EngineError::ArityMismatch {
                relation: atom.predicate.clone(),
                expected: arity,
                found: atom.args.len(),
            });
        }
        let terms = atom
            .args
            .iter()
            .map(|t| match t {
                Term::Constant(c) => Slot::Const(db.symbols_mut().intern(c)),
                Term::Variable(v) => Slot::Var(match vars.iter().position(|x| x == v) {
                    Some(i) => i,
                    None => {
                        vars.push(v.clone());
                        vars.len() - 1
                    }
                }),
            })
            .collect();
        Ok((rel, terms))
    };

    let mut body = Vec::with_capacity(rule.body.len());
    for atom in &rule.body {
        body.push(slots(atom, db)?);
    }
    let (head_rel, head) = slots(&rule.head, db)?;
    let nvars = vars.len();
    let pc = pc_to_bdd(&rule.pc, mgr);

    let plans = (0..body.len())
        .map(|first| {
            let order = std::iter::once(first).chain((0..body.len()).filter(|&j| j != first));
            let mut bound = vec![false; nvars];
            order
                .map(|j| {
                    let (rel, terms) = &body[j];
                    plan_step(*rel, terms, j == first, &mut bound, db)
                })
                .collect()
        })
        .collect();

    Ok(CompiledRule {
        head_rel,
        head,
        body_rels: body.iter().map(|(r, _)| *r).collect(),
        nvars,
        pc,
        plans,
    })
}

fn plan_step(
    rel: usize,
    terms: &[Slot],
    from_delta: bool,
    bound: &mut [bool],
    db: &mut Database,
) -> Step {
    let before = bound.to_vec();
    let mut key_cols = Vec::new();
    let mut key = Vec::new();
    let mut actions = Vec::new();
    // values known before this step key an index lookup; the delta is scanned
    for (col, &slot) in terms.iter().enumerate() {
        let known = match slot {
            Slot::Const(_) => true,
            Slot::Var(v) => before[v],
        };
        match slot {
            _ if known && !from_delta => {
                key_cols.push(col);
                key.push(slot);
            }
            _ if known => actions.push((col, Action::Check(slot))),
            Slot::Var(v) if bound[v] => actions.push((col, Action::Check(slot))),
            Slot::Var(v) => {
                bound[v] = true;
                actions.push((col, Action::Bind(v)));
            }
            Slot::Const(_) => unreachable!(),
        }
    }

    let arity = terms.len();
    let access = if from_delta {
        Access::Delta
    } else if key_cols.is_empty() {
        Access::Scan
    } else if key_cols.len() == arity {
        Access::Exact
    } else {
        Access::Index(db.relation_at_mut(rel).ensure_index(&key_cols))
    };
    Step {
        rel,
        access,
        key,
        actions,
    }
}

#[inline]
fn value(slot: Slot, bindings: &[Sym]) -> Sym {
    match slot {
        Slot::Const(c) => c,
        Slot::Var(v) => bindings[v],
    }
}

struct Join<'a> {
    db: &'a Database,
    delta: &'a [Vec<(u32, PresenceCondition)>],
    steps: &'a [Step],
    head: &'a [Slot],
    bindings: Vec<Sym>,
    keys: Vec<Vec<Sym>>,
    head_buf: Vec<Sym>,
    keep_false: bool,
}

impl Join<'_> {
    fn run<F>(&mut self, depth: usize, acc: PresenceCondition, mgr: &mut BddManager, emit: &mut F)
    where
        F: FnMut(&mut BddManager, &[Sym], PresenceCondition),
    {
        if depth == self.steps.len() {
            self.head_buf.clear();
            for &s in self.head {
                self.head_buf.push(value(s, &self.bindings));
            }
            emit(mgr, &self.head_buf, acc);
            return;
        }
        let step = &self.steps[depth];
        let rel = self.db.relation_at(step.rel);
        match step.access {
            Access::Delta => {
                for &(row, pc) in &self.delta[step.rel] {
                    self.visit(depth, rel, row, pc, acc, mgr, emit);
                }
            }
            Access::Scan => {
                for row in 0..rel.len() as u32 {
                    let pc = rel.row(row).1;
                    self.visit(depth, rel, row, pc, acc, mgr, emit);
                }
            }
            Access::Index(ix) => {
                let mut key = std::mem::take(&mut self.keys[depth]);
                key.clear();
                key.extend(step.key.iter().map(|&s| value(s, &self.bindings)));
                for &row in rel.lookup(ix, &key) {
                    let pc = rel.row(row).1;
                    self.visit(depth, rel, row, pc, acc, mgr, emit);
                }
                self.keys[depth] = key;
            }
            Access::Exact => {
                let mut key = std::mem::take(&mut self.keys[depth]);
                key.clear();
                key.extend(step.key.iter().map(|&s| value(s, &self.bindings)));
                if let Some(row) = rel.row_of(&key) {
                    let pc = rel.row(row).1;
                    self.visit(depth, rel, row, pc, acc, mgr, emit);
                }
                self.keys[depth] = key;
            }
        }
    }

    #[allow(clippy::too_many_arguments)]
    #[inline]
    fn visit<F>(
        &mut self,
        depth: usize,
        rel: &AnnotatedRelation,
        row: u32,
        pc: PresenceCondition,
        acc: PresenceCondition,
        mgr: &mut BddManager,
        emit: &mut F,
    ) where
        F: FnMut(&mut BddManager, &[Sym], PresenceCondition),
    {
        let tuple = rel.row(row).0;
        for &(col, action) in &self.steps[depth].actions {
            match action {
                Action::Bind(v) => self.bindings[v] = tuple[col],
                Action::Check(s) => {
                    if tuple[col] != value(s, &self.bindings) {
                        return;
                    }
                }
            }
        }
        let acc = mgr.and(acc, pc);
        if acc.is_false() && !self.keep_false {
            return;
        }
        self.run(depth + 1, acc, mgr, emit);
    }
}

fn resolve<F>(
    rule: &CompiledRule,
    db: &Database,
    delta: &[Vec<(u32, PresenceCondition)>],
    mgr: &mut BddManager,
    keep_false: bool,
    emit: &mut F,
) where
    F: FnMut(&mut BddManager, &[Sym], PresenceCondition),
{
    if rule.pc.is_false() && !keep_false {
        return;
    }
    for (i, steps) in rule.plans.iter().enumerate() {
        if delta[rule.body_rels[i]].is_empty() {
            continue;
        }
        let mut join = Join {
            db,
            delta,
            steps,
            head: &rule.head,
            bindings: vec![0; rule.nvars],
            keys: vec![Vec::new(); steps.len()],
            head_buf: Vec::with_capacity(rule.head.len()),
            keep_false,
        };
        join.run(0, rule.pc, mgr, emit);
    }
}

/// Every instantiation of `rule` that takes at least one premise from
/// `delta` and the others from `edb`, with the head tuple and the conjunction
/// of the rule's and the premises' presence conditions. Delta premises use
/// the presence condition recorded in `delta`; each delta tuple must also be
/// in `edb`.
///
/// Candidates are neither merged nor checked against a feature model, those
/// whose condition is `False` included, and a
/// derivation with several delta premises is reported once per delta
/// position.
pub fn resolve_rule(
    rule: &Clause,
    edb: &mut Database,
    delta: &Database,
    mgr: &mut BddManager,
) -> Result<Vec<(Vec<String>, PresenceCondition)>, EngineError> {
    let compiled = compile_rule(rule, edb, mgr)?;
    let mut delta_rows = vec![Vec::new(); edb.relations.len()];
    for drel in delta.relations() {
        let Some(ri) = edb.relation_index(drel.name()) else {
            return Err(EngineError::UnknownRelation(drel.name().to_owned()));
        };
        let rel = edb.relation_at(ri);
        for (t, pc) in drel.iter() {
            let row = t
                .iter()
                .map(|&s| edb.symbols().get(delta.symbols().resolve(s)))
                .collect::<Option<Vec<Sym>>>()
                .and_then(|tuple| rel.row_of(&tuple))
                .ok_or_else(|| EngineError::DeltaNotInDatabase {
                    relation: drel.name().to_owned(),
                })?;
            delta_rows[ri].push((row, pc));
        }
    }
    let mut out = Vec::new();
    let symbols = edb.symbols();
    resolve(
        &compiled,
        edb,
        &delta_rows,
        mgr,
        true,
        &mut |_, head, pc| {
            out.push((
                head.iter()
                    .map(|&s| symbols.resolve(s).to_owned())
                    .collect(),
                pc,
            ));
        },
    );
    Ok(out)
}

/// A lifted evaluation in progress. Use [`infer`] unless you need to observe
/// individual iterations.
pub struct Engine {
    rules: Vec<CompiledRule>,
    db: Database,
    delta: Vec<Vec<(u32, PresenceCondition)>>,
    config: EngineConfig,
    stats: Stats,
}

impl Engine {
    /// Loads the inline facts of `program` into `edb`, drops input tuples
    /// that exist in no valid configuration, and compiles the rules. Every
    /// stored tuple starts out in the delta.
    pub fn new(
        program: &Program,
        edb: Database,
        config: EngineConfig,
        mgr: &mut BddManager,
    ) -> Result<Self, EngineError> {
        let mut db = edb;
        for d in &program.decls {
            db.add_relation(&d.name, d.arity())?;
        }
        let mut stats = Stats::default();

        for i in 0..db.relations.len() {
            db.relations[i].retain_map(|pc| admit(pc, &config, mgr, &mut stats));
        }
        for fact in &program.facts {
            let pc = pc_to_bdd(&fact.pc, mgr);
            let Some(pc) = admit(pc, &config, mgr, &mut stats) else {
                continue;
            };
            let rel = db
                .relation_index(&fact.head.predicate)
                .ok_or_else(|| EngineError::UnknownRelation(fact.head.predicate.clone()))?;
            let tuple: Vec<Sym> = fact
                .head
                .args
                .iter()
                .map(|t| db.symbols_mut().intern(t.text()))
                .collect();
            db.relation_at_mut(rel).insert(&tuple, pc, mgr)?;
        }

        let rules = program
            .rules
            .iter()
            .map(|r| compile_rule(r, &mut db, mgr))
            .collect::<Result<Vec<_>, _>>()?;

        let delta = db
            .relations()
            .map(|rel| {
                (0..rel.len() as u32)
                    .map(|row| (row, rel.row(row).1))
                    .collect()
            })
            .collect();

        Ok(Engine {
            rules,
            db,
            delta,
            config,
            stats,
        })
    }

    pub fn database(&self) -> &Database {
        &self.db
    }

    pub fn stats(&self) -> &Stats {
        &self.stats
    }

    pub fn is_done(&self) -> bool {
        self.delta.iter().all(Vec::is_empty)
    }

    /// Runs one semi-naive iteration. Returns `false` without doing anything
    /// once the fixpoint has been reached.
    pub fn step(&mut self, mgr: &mut BddManager) -> bool {
        if self.is_done() {
            return false;
        }
        let Engine {
            rules,
            db,
            delta,
            config,
            stats,
        } = self;
        stats.iterations += 1;

        let mut candidates: Vec<IndexMap<Box<[Sym]>, PresenceCondition, FxBuildHasher>> =
            (0..db.relations.len())
                .map(|_| IndexMap::default())
                .collect();
        for rule in rules.iter() {
            let target = &mut candidates[rule.head_rel];
            resolve(rule, db, delta, mgr, false, &mut |mgr, head, pc| {
                stats.derivations += 1;
                let Some(pc) = admit(pc, config, mgr, stats) else {
                    return;
                };
                match target.get_mut(head) {
                    Some(prev) => *prev = mgr.or(*prev, pc),
                    None => {
                        target.insert(head.into(), pc);
                    }
                }
            });
        }

        let mut next = vec![Vec::new(); db.relations.len()];
        for (ri, cands) in candidates.into_iter().enumerate() {
            let rel = db.relation_at_mut(ri);
            for (tuple, pc) in cands {
                if let Some(row) = rel.merge(&tuple, pc, mgr) {
                    stats.changes += 1;
                    next[ri].push((row, rel.row(row).1));
                }
            }
        }
        *delta = next;
        true
    }

    pub fn run(mut self, mgr: &mut BddManager) -> Inference {
        while self.step(mgr) {}
        self.stats.bdd_nodes = mgr.node_count();
        Inference {
            database: self.db,
            stats: self.stats,
        }
    }
}

/// Applies the feature-model policy to a candidate condition: `None` drops
/// it, otherwise the condition to store.
fn admit(
    pc: PresenceCondition,
    config: &EngineConfig,
    mgr: &mut BddManager,
    stats: &mut Stats,
) -> Option<PresenceCondition> {
    if pc.is_false() {
        return None;
    }
    let fm = config.feature_model;
    if config.sat_pruning {
        stats.sat_checks += 1;
        let within = mgr.and(pc, fm);
        if !within.is_sat() {
            return None;
        }
        return Some(if config.conjoin_fm_into_stored_pcs {
            within
        } else {
            pc
        });
    }
    if config.conjoin_fm_into_stored_pcs {
        let within = mgr.and(pc, fm);
        return within.is_sat().then_some(within);
    }
    Some(pc)
}

/// Lifted least fixpoint of `program` over `edb`.
pub fn infer(
    program: &Program,
    edb: Database,
    config: &EngineConfig,
    mgr: &mut BddManager,
) -> Result<Inference, EngineError> {
    Ok(Engine::new(program, edb, *config, mgr)?.run(mgr))
}

/// Removes tuples that exist in no configuration of `fm`. Surviving
/// presence conditions are left as they are.
pub fn post_prune(mut db: Database, fm: PresenceCondition, mgr: &mut BddManager) -> Database {
    for i in 0..db.relations.len() {
        db.relations[i].retain_map(|pc| {
            let within = mgr.and(pc, fm);
            within.is_sat().then_some(pc)
        });
    }
    db
}
