//! Presence conditions as reduced ordered binary decision diagrams.
//!
//! Every presence condition lives in a [`BddManager`]. The manager owns the
//! feature table (which fixes the variable order), a hash-consed node store and
//! a memo cache for `and`/`or`/`not`. Because nodes are hash-consed, two
//! [`PresenceCondition`]s denote the same Boolean function exactly when their
//! roots are the same node, so equivalence is `==` and satisfiability is a
//! terminal check.
//!
//! Nodes are never freed. A manager is meant to live for one engine run.

use std::collections::HashMap;
use std::fmt;
use std::io::{self, Write};
use std::sync::atomic::{AtomicU32, Ordering};

use rustc_hash::FxHashMap;
use thiserror::Error;

/// Index of a node in a manager's store.
pub type NodeId = u32;

/// Position of a feature in the variable order.
pub type Var = u32;

const FALSE_ID: NodeId = 0;
const TRUE_ID: NodeId = 1;

/// Variable index carried by the two terminals; sorts after every real variable.
pub const TERMINAL_VAR: Var = Var::MAX;

static NEXT_MANAGER_ID: AtomicU32 = AtomicU32::new(1);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BddError {
    #[error("presence conditions belong to different BDD managers")]
    MixedManagers,
    #[error("feature model admits {count} configurations, more than the cap of {cap}")]
    TooManyConfigurations { count: u128, cap: usize },
    #[error("unknown feature `{0}`")]
    UnknownFeature(String),
    #[error("configuration does not assign feature `{0}`")]
    MissingFeature(String),
}

/// Feature names in registration order. The position of a name is its BDD
/// variable.
#[derive(Debug, Clone, Default)]
pub struct FeatureTable {
    names: Vec<String>,
    index: HashMap<String, Var>,
}

impl FeatureTable {
    /// Returns the variable for `name`, registering it at the end of the order
    /// if it has not been seen.
    pub fn register(&mut self, name: &str) -> Var {
        if let Some(&v) = self.index.get(name) {
            return v;
        }
        let v = self.names.len() as Var;
        self.names.push(name.to_owned());
        self.index.insert(name.to_owned(), v);
        v
    }

    pub fn get(&self, name: &str) -> Option<Var> {
        self.index.get(name).copied()
    }

    pub fn name(&self, var: Var) -> &str {
        &self.names[var as usize]
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }
}

/// A decision node. Terminals use [`TERMINAL_VAR`] and point at themselves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BddNode {
    pub var: Var,
    pub low: NodeId,
    pub high: NodeId,
}

/// Handle to a canonical BDD root inside a particular manager.
///
/// Handles are plain values: the root node is the identity of the function,
/// so copies of a handle and handles produced by different operations that
/// build the same function all compare equal.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PresenceCondition {
    root: NodeId,
    manager: u32,
}

impl PresenceCondition {
    pub fn root(self) -> NodeId {
        self.root
    }

    pub fn is_true(self) -> bool {
        self.root == TRUE_ID
    }

    pub fn is_false(self) -> bool {
        self.root == FALSE_ID
    }

    /// Satisfiability, a constant-time check on a reduced diagram.
    pub fn is_sat(self) -> bool {
        self.root != FALSE_ID
    }
}

impl fmt::Debug for PresenceCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.root {
            FALSE_ID => write!(f, "Pc(False)"),
            TRUE_ID => write!(f, "Pc(True)"),
            r => write!(f, "Pc(#{r})"),
        }
    }
}

/// A total truth assignment over the features of a manager, indexed by
/// variable.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Configuration {
    values: Vec<bool>,
}

impl Configuration {
    pub fn from_values(values: Vec<bool>) -> Self {
        Configuration { values }
    }

    pub fn get(&self, var: Var) -> bool {
        match self.values.get(var as usize) {
            Some(&b) => b,
            None => panic!(
                "configuration over {} features does not assign variable {var}",
                self.values.len()
            ),
        }
    }

    pub fn values(&self) -> &[bool] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Renders as `{Air=0, Land=0, Sea=1}`.
    pub fn describe(&self, features: &FeatureTable) -> String {
        let parts: Vec<String> = self
            .values
            .iter()
            .enumerate()
            .map(|(i, &b)| format!("{}={}", features.name(i as Var), u8::from(b)))
            .collect();
        format!("{{{}}}", parts.join(", "))
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
enum Op {
    And,
    Or,
    Not,
}

/// Hash-consed node store with an operation cache.
pub struct BddManager {
    id: u32,
    features: FeatureTable,
    nodes: Vec<BddNode>,
    unique: FxHashMap<BddNode, NodeId>,
    cache: FxHashMap<(Op, NodeId, NodeId), NodeId>,
}

impl Default for BddManager {
    fn default() -> Self {
        Self::new()
    }
}

impl fmt::Debug for BddManager {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BddManager")
            .field("id", &self.id)
            .field("features", &self.features.names)
            .field("nodes", &self.nodes.len())
            .finish()
    }
}

impl BddManager {
    pub fn new() -> Self {
        let terminal = |id| BddNode {
            var: TERMINAL_VAR,
            low: id,
            high: id,
        };
        BddManager {
            id: NEXT_MANAGER_ID.fetch_add(1, Ordering::Relaxed),
            features: FeatureTable::default(),
            nodes: vec![terminal(FALSE_ID), terminal(TRUE_ID)],
            unique: FxHashMap::default(),
            cache: FxHashMap::default(),
        }
    }

    pub fn features(&self) -> &FeatureTable {
        &self.features
    }

    /// Registers `name` without building anything.
    pub fn register_feature(&mut self, name: &str) -> Var {
        self.features.register(name)
    }

    fn handle(&self, root: NodeId) -> PresenceCondition {
        PresenceCondition {
            root,
            manager: self.id,
        }
    }

    fn owns(&self, pc: PresenceCondition) -> Result<NodeId, BddError> {
        if pc.manager == self.id {
            Ok(pc.root)
        } else {
            Err(BddError::MixedManagers)
        }
    }

    fn expect_owned(&self, pc: PresenceCondition) -> NodeId {
        match self.owns(pc) {
            Ok(r) => r,
            Err(e) => panic!("{e}"),
        }
    }

    pub fn pc_true(&self) -> PresenceCondition {
        self.handle(TRUE_ID)
    }

    pub fn pc_false(&self) -> PresenceCondition {
        self.handle(FALSE_ID)
    }

    pub fn constant(&self, value: bool) -> PresenceCondition {
        if value {
            self.pc_true()
        } else {
            self.pc_false()
        }
    }

    /// The single-variable function for `name`, registering the feature on
    /// first use.
    pub fn mk_var(&mut self, name: &str) -> PresenceCondition {
        let var = self.features.register(name);
        let root = self.mk(var, FALSE_ID, TRUE_ID);
        self.handle(root)
    }

    /// The literal `var` (or its negation when `positive` is false).
    pub fn literal(&mut self, var: Var, positive: bool) -> PresenceCondition {
        assert!(
            (var as usize) < self.features.len(),
            "variable {var} is not registered"
        );
        let root = if positive {
            self.mk(var, FALSE_ID, TRUE_ID)
        } else {
            self.mk(var, TRUE_ID, FALSE_ID)
        };
        self.handle(root)
    }

    fn mk(&mut self, var: Var, low: NodeId, high: NodeId) -> NodeId {
        if low == high {
            return low;
        }
        let node = BddNode { var, low, high };
        if let Some(&id) = self.unique.get(&node) {
            return id;
        }
        let id = self.nodes.len() as NodeId;
        self.nodes.push(node);
        self.unique.insert(node, id);
        id
    }

    #[inline]
    fn var_of(&self, id: NodeId) -> Var {
        self.nodes[id as usize].var
    }

    fn cofactors(&self, id: NodeId, var: Var) -> (NodeId, NodeId) {
        let n = self.nodes[id as usize];
        if n.var == var {
            (n.low, n.high)
        } else {
            (id, id)
        }
    }

    fn and_rec(&mut self, a: NodeId, b: NodeId) -> NodeId {
        if a == FALSE_ID || b == FALSE_ID {
            return FALSE_ID;
        }
        if a == TRUE_ID || a == b {
            return b;
        }
        if b == TRUE_ID {
            return a;
        }
        let (a, b) = if a < b { (a, b) } else { (b, a) };
        if let Some(&r) = self.cache.get(&(Op::And, a, b)) {
            return r;
        }
        let var = self.var_of(a).min(self.var_of(b));
        let (a0, a1) = self.cofactors(a, var);
        let (b0, b1) = self.cofactors(b, var);
        let low = self.and_rec(a0, b0);
        let high = self.and_rec(a1, b1);
        let r = self.mk(var, low, high);
        self.cache.insert((Op::And, a, b), r);
        r
    }

    fn or_rec(&mut self, a: NodeId, b: NodeId) -> NodeId {
        if a == TRUE_ID || b == TRUE_ID {
            return TRUE_ID;
        }
        if a == FALSE_ID || a == b {
            return b;
        }
        if b == FALSE_ID {
            return a;
        }
        let (a, b) = if a < b { (a, b) } else { (b, a) };
        if let Some(&r) = self.cache.get(&(Op::Or, a, b)) {
            return r;
        }
        let var = self.var_of(a).min(self.var_of(b));
        let (a0, a1) = self.cofactors(a, var);
        let (b0, b1) = self.cofactors(b, var);
        let low = self.or_rec(a0, b0);
        let high = self.or_rec(a1, b1);
        let r = self.mk(var, low, high);
        self.cache.insert((Op::Or, a, b), r);
        r
    }

    fn not_rec(&mut self, a: NodeId) -> NodeId {
        match a {
            FALSE_ID => return TRUE_ID,
            TRUE_ID => return FALSE_ID,
            _ => {}
        }
        if let Some(&r) = self.cache.get(&(Op::Not, a, 0)) {
            return r;
        }
        let n = self.nodes[a as usize];
        let low = self.not_rec(n.low);
        let high = self.not_rec(n.high);
        let r = self.mk(n.var, low, high);
        self.cache.insert((Op::Not, a, 0), r);
        // negation is an involution; seed the reverse direction too
        self.cache.insert((Op::Not, r, 0), a);
        r
    }

    pub fn try_and(
        &mut self,
        a: PresenceCondition,
        b: PresenceCondition,
    ) -> Result<PresenceCondition, BddError> {
        let (a, b) = (self.owns(a)?, self.owns(b)?);
        let r = self.and_rec(a, b);
        Ok(self.handle(r))
    }

    pub fn try_or(
        &mut self,
        a: PresenceCondition,
        b: PresenceCondition,
    ) -> Result<PresenceCondition, BddError> {
        let (a, b) = (self.owns(a)?, self.owns(b)?);
        let r = self.or_rec(a, b);
        Ok(self.handle(r))
    }

    pub fn try_not(&mut self, a: PresenceCondition) -> Result<PresenceCondition, BddError> {
        let a = self.owns(a)?;
        let r = self.not_rec(a);
        Ok(self.handle(r))
    }

    /// Conjunction.
    ///
    /// Panics if either operand came from another manager; use
    /// [`BddManager::try_and`] to get an error instead.
    pub fn and(&mut self, a: PresenceCondition, b: PresenceCondition) -> PresenceCondition {
        let (a, b) = (self.expect_owned(a), self.expect_owned(b));
        let r = self.and_rec(a, b);
        self.handle(r)
    }

    /// Disjunction. Panics on operands from another manager.
    pub fn or(&mut self, a: PresenceCondition, b: PresenceCondition) -> PresenceCondition {
        let (a, b) = (self.expect_owned(a), self.expect_owned(b));
        let r = self.or_rec(a, b);
        self.handle(r)
    }

    /// Negation. Panics on an operand from another manager.
    pub fn not(&mut self, a: PresenceCondition) -> PresenceCondition {
        let a = self.expect_owned(a);
        let r = self.not_rec(a);
        self.handle(r)
    }

    pub fn and_all<I>(&mut self, pcs: I) -> PresenceCondition
    where
        I: IntoIterator<Item = PresenceCondition>,
    {
        pcs.into_iter()
            .fold(self.pc_true(), |acc, pc| self.and(acc, pc))
    }

    pub fn or_all<I>(&mut self, pcs: I) -> PresenceCondition
    where
        I: IntoIterator<Item = PresenceCondition>,
    {
        pcs.into_iter()
            .fold(self.pc_false(), |acc, pc| self.or(acc, pc))
    }

    /// `a → b` holds in every assignment.
    pub fn implies(&mut self, a: PresenceCondition, b: PresenceCondition) -> bool {
        let nb = self.not(b);
        !self.and(a, nb).is_sat()
    }

    pub fn sat(&self, a: PresenceCondition) -> bool {
        a.is_sat()
    }

    /// Follows the path selected by `config` from the root to a terminal.
    pub fn eval(&self, a: PresenceCondition, config: &Configuration) -> bool {
        let mut id = self.expect_owned(a);
        loop {
            match id {
                FALSE_ID => return false,
                TRUE_ID => return true,
                _ => {
                    let n = self.nodes[id as usize];
                    id = if config.get(n.var) { n.high } else { n.low };
                }
            }
        }
    }

    /// Builds a configuration from `(feature, value)` pairs. Every registered
    /// feature must be assigned and every name must be registered.
    pub fn configuration(&self, assignment: &[(&str, bool)]) -> Result<Configuration, BddError> {
        let mut values = vec![None; self.features.len()];
        for &(name, value) in assignment {
            let var = self
                .features
                .get(name)
                .ok_or_else(|| BddError::UnknownFeature(name.to_owned()))?;
            values[var as usize] = Some(value);
        }
        let values = values
            .into_iter()
            .enumerate()
            .map(|(i, v)| {
                v.ok_or_else(|| BddError::MissingFeature(self.features.name(i as Var).to_owned()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Configuration { values })
    }

    /// The conjunction of literals that pins every feature to its value in
    /// `config`.
    pub fn configuration_cube(&mut self, config: &Configuration) -> PresenceCondition {
        // bottom-up so every mk call sees already-built children
        let mut root = TRUE_ID;
        for var in (0..config.len() as Var).rev() {
            root = if config.get(var) {
                self.mk(var, FALSE_ID, root)
            } else {
                self.mk(var, root, FALSE_ID)
            };
        }
        self.handle(root)
    }

    /// Number of satisfying total assignments over the currently registered
    /// features.
    pub fn sat_count(&self, a: PresenceCondition) -> u128 {
        let root = self.expect_owned(a);
        let nvars = self.features.len() as u32;
        let mut memo: FxHashMap<NodeId, u128> = FxHashMap::default();
        let count = self.count_rec(root, &mut memo, nvars);
        let top = self.level(root, nvars);
        count << top
    }

    fn level(&self, id: NodeId, nvars: u32) -> u32 {
        let v = self.var_of(id);
        if v == TERMINAL_VAR {
            nvars
        } else {
            v
        }
    }

    // Counts assignments to the variables at or below `id`'s level.
    fn count_rec(&self, id: NodeId, memo: &mut FxHashMap<NodeId, u128>, nvars: u32) -> u128 {
        match id {
            FALSE_ID => return 0,
            TRUE_ID => return 1,
            _ => {}
        }
        if let Some(&c) = memo.get(&id) {
            return c;
        }
        let n = self.nodes[id as usize];
        let lo = self.count_rec(n.low, memo, nvars) << (self.level(n.low, nvars) - n.var - 1);
        let hi = self.count_rec(n.high, memo, nvars) << (self.level(n.high, nvars) - n.var - 1);
        let c = lo + hi;
        memo.insert(id, c);
        c
    }

    /// Every total assignment over the registered features that satisfies
    /// `fm`, in lexicographic order of the value vector (false before true).
    ///
    /// Fails without enumerating anything when the model count exceeds `cap`.
    pub fn enumerate_configurations(
        &self,
        fm: PresenceCondition,
        cap: usize,
    ) -> Result<Vec<Configuration>, BddError> {
        let root = self.owns(fm)?;
        let count = self.sat_count(fm);
        if count > cap as u128 {
            return Err(BddError::TooManyConfigurations { count, cap });
        }
        let mut out = Vec::with_capacity(count as usize);
        let mut current = vec![false; self.features.len()];
        self.enumerate_rec(root, 0, &mut current, &mut out);
        Ok(out)
    }

    fn enumerate_rec(
        &self,
        id: NodeId,
        var: Var,
        current: &mut Vec<bool>,
        out: &mut Vec<Configuration>,
    ) {
        if id == FALSE_ID {
            return;
        }
        if var as usize == current.len() {
            debug_assert_eq!(id, TRUE_ID);
            out.push(Configuration {
                values: current.clone(),
            });
            return;
        }
        let (low, high) = self.cofactors(id, var);
        current[var as usize] = false;
        self.enumerate_rec(low, var + 1, current, out);
        current[var as usize] = true;
        self.enumerate_rec(high, var + 1, current, out);
    }

    /// The root-to-true paths of `a` as conjunctions of `(var, polarity)`
    /// literals, low branch first. The paths are disjoint and their
    /// disjunction is `a`.
    pub fn cubes(&self, a: PresenceCondition) -> Vec<Vec<(Var, bool)>> {
        let root = self.expect_owned(a);
        let mut out = Vec::new();
        let mut path = Vec::new();
        self.cubes_rec(root, &mut path, &mut out);
        out
    }

    fn cubes_rec(&self, id: NodeId, path: &mut Vec<(Var, bool)>, out: &mut Vec<Vec<(Var, bool)>>) {
        match id {
            FALSE_ID => {}
            TRUE_ID => out.push(path.clone()),
            _ => {
                let n = self.nodes[id as usize];
                path.push((n.var, false));
                self.cubes_rec(n.low, path, out);
                path.pop();
                path.push((n.var, true));
                self.cubes_rec(n.high, path, out);
                path.pop();
            }
        }
    }

    /// Total nodes in the store, terminals included.
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn node(&self, id: NodeId) -> BddNode {
        self.nodes[id as usize]
    }

    /// Nodes reachable from `a`, terminals included.
    pub fn reachable(&self, a: PresenceCondition) -> Vec<NodeId> {
        let root = self.expect_owned(a);
        let mut seen = vec![false; self.nodes.len()];
        let mut stack = vec![root];
        let mut out = Vec::new();
        while let Some(id) = stack.pop() {
            if std::mem::replace(&mut seen[id as usize], true) {
                continue;
            }
            out.push(id);
            if id > TRUE_ID {
                let n = self.nodes[id as usize];
                stack.push(n.low);
                stack.push(n.high);
            }
        }
        out
    }

    /// Writes one line per node: `id var-name low-id high-id`. Terminals
    /// print `0`/`1` as their variable name.
    pub fn dump<W: Write>(&self, w: &mut W) -> io::Result<()> {
        for (id, n) in self.nodes.iter().enumerate() {
            match id as NodeId {
                FALSE_ID => writeln!(w, "{id} 0 {} {}", n.low, n.high)?,
                TRUE_ID => writeln!(w, "{id} 1 {} {}", n.low, n.high)?,
                _ => writeln!(w, "{id} {} {} {}", self.features.name(n.var), n.low, n.high)?,
            }
        }
        Ok(())
    }
}
