use indexmap::IndexMap;
use rustc_hash::{FxBuildHasher, FxHashMap};

use super::{EngineError, Sym};
use crate::pcbdd::{BddManager, PresenceCondition};

/// Interns constant symbols to dense numeric ids.
#[derive(Debug, Clone, Default)]
pub struct SymbolTable {
    names: Vec<String>,
    ids: FxHashMap<String, Sym>,
}

impl SymbolTable {
    pub fn intern(&mut self, s: &str) -> Sym {
        if let Some(&id) = self.ids.get(s) {
            return id;
        }
        let id = self.names.len() as Sym;
        self.names.push(s.to_owned());
        self.ids.insert(s.to_owned(), id);
        id
    }

    pub fn get(&self, s: &str) -> Option<Sym> {
        self.ids.get(s).copied()
    }

    pub fn resolve(&self, id: Sym) -> &str {
        &self.names[id as usize]
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }
}

#[derive(Debug, Clone)]
struct ColumnIndex {
    columns: Vec<usize>,
    map: FxHashMap<Box<[Sym]>, Vec<u32>>,
}

/// A relation whose tuples each carry a presence condition.
///
/// There is at most one entry per tuple; inserting a tuple that is already
/// present disjoins the presence conditions. A nullary relation holds at most
/// the empty tuple, so its whole content is a single presence condition.
/// Rows are never removed, which keeps row numbers stable for the indices.
#[derive(Debug, Clone)]
pub struct AnnotatedRelation {
    name: String,
    arity: usize,
    rows: IndexMap<Box<[Sym]>, PresenceCondition, FxBuildHasher>,
    indices: Vec<ColumnIndex>,
}

impl AnnotatedRelation {
    pub fn new(name: impl Into<String>, arity: usize) -> Self {
        AnnotatedRelation {
            name: name.into(),
            arity,
            rows: IndexMap::default(),
            indices: Vec::new(),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    fn check_arity(&self, tuple: &[Sym]) -> Result<(), EngineError> {
        if tuple.len() == self.arity {
            Ok(())
        } else {
            Err(EngineError::ArityMismatch {
                relation: self.name.clone(),
                expected: self.arity,
                found: tuple.len(),
            })
        }
    }

    /// The stored presence condition of `tuple`, if present.
    pub fn exists(&self, tuple: &[Sym]) -> Result<Option<PresenceCondition>, EngineError> {
        self.check_arity(tuple)?;
        Ok(self.rows.get(tuple).copied())
    }

    /// Adds `tuple` for the configurations of `pc`. Returns whether the set of
    /// configurations stored for the tuple grew, i.e. whether the stored
    /// presence condition changed.
    pub fn insert(
        &mut self,
        tuple: &[Sym],
        pc: PresenceCondition,
        mgr: &mut BddManager,
    ) -> Result<bool, EngineError> {
        self.check_arity(tuple)?;
        if !pc.is_sat() {
            return Err(EngineError::UnsatisfiablePc {
                relation: self.name.clone(),
            });
        }
        Ok(self.merge(tuple, pc, mgr).is_some())
    }

    /// Insert without the checks; returns the row number when the stored
    /// presence condition changed.
    pub(crate) fn merge(
        &mut self,
        tuple: &[Sym],
        pc: PresenceCondition,
        mgr: &mut BddManager,
    ) -> Option<u32> {
        if let Some((row, _, stored)) = self.rows.get_full_mut(tuple) {
            let merged = mgr.or(*stored, pc);
            if merged == *stored {
                return None;
            }
            *stored = merged;
            return Some(row as u32);
        }
        let row = self.rows.len() as u32;
        let key: Box<[Sym]> = tuple.into();
        for index in &mut self.indices {
            let k: Box<[Sym]> = index.columns.iter().map(|&c| key[c]).collect();
            index.map.entry(k).or_default().push(row);
        }
        self.rows.insert(key, pc);
        Some(row)
    }

    pub fn row(&self, row: u32) -> (&[Sym], PresenceCondition) {
        let (t, pc) = self.rows.get_index(row as usize).expect("row out of range");
        (t, *pc)
    }

    pub(crate) fn row_of(&self, tuple: &[Sym]) -> Option<u32> {
        self.rows.get_index_of(tuple).map(|r| r as u32)
    }

    /// Tuples in insertion order.
    pub fn iter(&self) -> impl Iterator<Item = (&[Sym], PresenceCondition)> {
        self.rows.iter().map(|(t, pc)| (&**t, *pc))
    }

    /// Returns the id of an index over `columns`, building it if needed. The
    /// index is kept current by later inserts.
    pub(crate) fn ensure_index(&mut self, columns: &[usize]) -> usize {
        if let Some(i) = self.indices.iter().position(|ix| ix.columns == columns) {
            return i;
        }
        let mut map: FxHashMap<Box<[Sym]>, Vec<u32>> = FxHashMap::default();
        for (row, (t, _)) in self.rows.iter().enumerate() {
            let k: Box<[Sym]> = columns.iter().map(|&c| t[c]).collect();
            map.entry(k).or_default().push(row as u32);
        }
        self.indices.push(ColumnIndex {
            columns: columns.to_vec(),
            map,
        });
        self.indices.len() - 1
    }

    pub(crate) fn lookup(&self, index: usize, key: &[Sym]) -> &[u32] {
        self.indices[index]
            .map
            .get(key)
            .map_or(&[], |v| v.as_slice())
    }

    /// Keeps the rows for which `f` returns a condition, storing that
    /// condition. Drops all indices.
    pub(crate) fn retain_map(
        &mut self,
        mut f: impl FnMut(PresenceCondition) -> Option<PresenceCondition>,
    ) {
        self.rows.retain(|_, pc| match f(*pc) {
            Some(new) => {
                *pc = new;
                true
            }
            None => false,
        });
        self.indices.clear();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn insert_merges_by_disjunction() {
        let mut m = BddManager::new();
        let sea = m.mk_var("Sea");
        let air = m.mk_var("Air");
        let mut r = AnnotatedRelation::new("Edge", 2);
        assert_eq!(r.exists(&[0, 1]).unwrap(), None);
        assert!(r.insert(&[0, 1], sea, &mut m).unwrap());
        assert_eq!(r.exists(&[0, 1]).unwrap(), Some(sea));
        assert!(!r.insert(&[0, 1], sea, &mut m).unwrap());
        assert!(r.insert(&[0, 1], air, &mut m).unwrap());
        let either = m.or(sea, air);
        assert_eq!(r.exists(&[0, 1]).unwrap(), Some(either));
        // a narrower condition adds nothing
        let both = m.and(sea, air);
        assert!(!r.insert(&[0, 1], both, &mut m).unwrap());
        assert_eq!(r.len(), 1);
    }

    #[test]
    fn insert_rejects_bad_input() {
        let mut m = BddManager::new();
        let mut r = AnnotatedRelation::new("Edge", 2);
        let t = m.pc_true();
        assert!(matches!(
            r.insert(&[0], t, &mut m),
            Err(EngineError::ArityMismatch {
                expected: 2,
                found: 1,
                ..
            })
        ));
        let f = m.pc_false();
        assert!(matches!(
            r.insert(&[0, 1], f, &mut m),
            Err(EngineError::UnsatisfiablePc { .. })
        ));
        assert!(matches!(
            r.exists(&[0, 1, 2]),
            Err(EngineError::ArityMismatch { .. })
        ));
    }

    #[test]
    fn nullary_relation_is_a_single_pc() {
        let mut m = BddManager::new();
        let a = m.mk_var("A");
        let b = m.mk_var("B");
        let mut r = AnnotatedRelation::new("Flag", 0);
        assert!(r.insert(&[], a, &mut m).unwrap());
        assert!(r.insert(&[], b, &mut m).unwrap());
        assert_eq!(r.len(), 1);
        let ab = m.or(a, b);
        assert_eq!(r.exists(&[]).unwrap(), Some(ab));
    }

    #[test]
    fn indices_follow_inserts() {
        let mut m = BddManager::new();
        let t = m.pc_true();
        let mut r = AnnotatedRelation::new("E", 2);
        r.insert(&[1, 2], t, &mut m).unwrap();
        let ix = r.ensure_index(&[0]);
        r.insert(&[1, 3], t, &mut m).unwrap();
        r.insert(&[2, 3], t, &mut m).unwrap();
        assert_eq!(r.lookup(ix, &[1]), &[0, 1]);
        assert_eq!(r.lookup(ix, &[2]), &[2]);
        assert!(r.lookup(ix, &[9]).is_empty());
        assert_eq!(r.ensure_index(&[0]), ix);
    }

    #[test]
    fn symbols_intern() {
        let mut s = SymbolTable::default();
        let a = s.intern("Athens");
        assert_eq!(s.intern("Athens"), a);
        assert_ne!(s.intern("Rome"), a);
        assert_eq!(s.resolve(a), "Athens");
        assert_eq!(s.get("NYC"), None);
    }
}
