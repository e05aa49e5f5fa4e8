//! Lifted bottom-up inference.
//!
//! A derived tuple exists in the conjunction of the presence conditions of
//! the rule and of every premise it was derived from. Candidates whose
//! presence condition is unsatisfiable together with the feature model are
//! dropped, and a tuple derived again under a different condition has its
//! stored condition widened by disjunction. Evaluation is semi-naive: a tuple
//! is part of the next delta exactly when its stored condition changed.

mod eval;
mod relation;

pub use eval::{infer, post_prune, resolve_rule, Engine, Inference, Stats};
pub use relation::{AnnotatedRelation, SymbolTable};

use indexmap::IndexMap;
use thiserror::Error;

use crate::pcbdd::{BddError, BddManager, PresenceCondition};
use crate::syntax::Program;

/// Interned constant.
pub type Sym = u32;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("unknown relation `{0}`")]
    UnknownRelation(String),
    #[error("relation `{relation}` has arity {expected}, got a tuple of {found}")]
    ArityMismatch {
        relation: String,
        expected: usize,
        found: usize,
    },
    #[error(
        "refusing to insert a tuple with an unsatisfiable presence condition into `{relation}`"
    )]
    UnsatisfiablePc { relation: String },
    #[error("delta tuple for `{relation}` is not present in the database")]
    DeltaNotInDatabase { relation: String },
    #[error(transparent)]
    Bdd(#[from] BddError),
}

/// Knobs for [`infer`].
#[derive(Debug, Clone, Copy)]
pub struct EngineConfig {
    /// Valid configurations. Defaults to `True`.
    pub feature_model: PresenceCondition,
    /// Drop candidates whose condition is unsatisfiable under the feature
    /// model. With this off, only candidates whose raw condition is already
    /// `False` are dropped and [`post_prune`] should run before output.
    pub sat_pruning: bool,
    /// Store `pc /\ FM` instead of the raw conjunction of premise conditions.
    pub conjoin_fm_into_stored_pcs: bool,
}

impl EngineConfig {
    pub fn new(mgr: &BddManager) -> Self {
        EngineConfig {
            feature_model: mgr.pc_true(),
            sat_pruning: true,
            conjoin_fm_into_stored_pcs: false,
        }
    }

    pub fn with_feature_model(mut self, fm: PresenceCondition) -> Self {
        self.feature_model = fm;
        self
    }

    pub fn with_sat_pruning(mut self, on: bool) -> Self {
        self.sat_pruning = on;
        self
    }

    pub fn with_conjoined_fm(mut self, on: bool) -> Self {
        self.conjoin_fm_into_stored_pcs = on;
        self
    }
}

/// Named annotated relations over a shared symbol table.
#[derive(Debug, Clone, Default)]
pub struct Database {
    symbols: SymbolTable,
    relations: IndexMap<String, AnnotatedRelation>,
}

impl Database {
    pub fn new() -> Self {
        Self::default()
    }

    /// Empty relations for every declaration of `program`.
    pub fn for_program(program: &Program) -> Self {
        let mut db = Database::new();
        for d in &program.decls {
            db.relations.insert(
                d.name.clone(),
                AnnotatedRelation::new(d.name.clone(), d.arity()),
            );
        }
        db
    }

    /// Adds an empty relation, or checks the arity of an existing one.
    pub fn add_relation(
        &mut self,
        name: &str,
        arity: usize,
    ) -> Result<&mut AnnotatedRelation, EngineError> {
        let rel = self
            .relations
            .entry(name.to_owned())
            .or_insert_with(|| AnnotatedRelation::new(name, arity));
        if rel.arity() != arity {
            return Err(EngineError::ArityMismatch {
                relation: name.to_owned(),
                expected: rel.arity(),
                found: arity,
            });
        }
        Ok(rel)
    }

    pub fn symbols(&self) -> &SymbolTable {
        &self.symbols
    }

    pub fn symbols_mut(&mut self) -> &mut SymbolTable {
        &mut self.symbols
    }

    pub fn relation(&self, name: &str) -> Option<&AnnotatedRelation> {
        self.relations.get(name)
    }

    pub fn relations(&self) -> impl Iterator<Item = &AnnotatedRelation> {
        self.relations.values()
    }

    pub(crate) fn relation_index(&self, name: &str) -> Option<usize> {
        self.relations.get_index_of(name)
    }

    pub(crate) fn relation_at(&self, i: usize) -> &AnnotatedRelation {
        &self.relations[i]
    }

    pub(crate) fn relation_at_mut(&mut self, i: usize) -> &mut AnnotatedRelation {
        &mut self.relations[i]
    }

    fn relation_checked(&self, name: &str) -> Result<&AnnotatedRelation, EngineError> {
        self.relations
            .get(name)
            .ok_or_else(|| EngineError::UnknownRelation(name.to_owned()))
    }

    /// Inserts a fact given as strings; see [`AnnotatedRelation::insert`].
    pub fn insert_fact<S: AsRef<str>>(
        &mut self,
        relation: &str,
        values: &[S],
        pc: PresenceCondition,
        mgr: &mut BddManager,
    ) -> Result<bool, EngineError> {
        let tuple: Vec<Sym> = values
            .iter()
            .map(|v| self.symbols.intern(v.as_ref()))
            .collect();
        let rel = self
            .relations
            .get_mut(relation)
            .ok_or_else(|| EngineError::UnknownRelation(relation.to_owned()))?;
        rel.insert(&tuple, pc, mgr)
    }

    /// The stored presence condition of a fact given as strings.
    pub fn exists<S: AsRef<str>>(
        &self,
        relation: &str,
        values: &[S],
    ) -> Result<Option<PresenceCondition>, EngineError> {
        let rel = self.relation_checked(relation)?;
        if values.len() != rel.arity() {
            return Err(EngineError::ArityMismatch {
                relation: relation.to_owned(),
                expected: rel.arity(),
                found: values.len(),
            });
        }
        // a constant never interned cannot be part of a stored tuple
        let Some(tuple) = values
            .iter()
            .map(|v| self.symbols.get(v.as_ref()))
            .collect::<Option<Vec<Sym>>>()
        else {
            return Ok(None);
        };
        rel.exists(&tuple)
    }

    /// Tuples of `relation` as strings, sorted lexicographically.
    pub fn sorted_facts(
        &self,
        relation: &str,
    ) -> Result<Vec<(Vec<&str>, PresenceCondition)>, EngineError> {
        let rel = self.relation_checked(relation)?;
        let mut out: Vec<(Vec<&str>, PresenceCondition)> = rel
            .iter()
            .map(|(t, pc)| (t.iter().map(|&s| self.symbols.resolve(s)).collect(), pc))
            .collect();
        out.sort_by(|a, b| a.0.cmp(&b.0));
        Ok(out)
    }

    /// Total tuple count over all relations.
    pub fn total_tuples(&self) -> usize {
        self.relations.values().map(AnnotatedRelation::len).sum()
    }
}
