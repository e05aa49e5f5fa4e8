//! Seeded generators for test and benchmark bundles: a program, annotated
//! input facts, and a feature model.

use std::fs;
use std::io;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::engine::{Database, EngineConfig};
use crate::facts_io::{load_records, FactRecord, FactsError, DEFAULT_DELIMITER};
use crate::pcbdd::BddManager;
use crate::syntax::{parse_program, pc_to_bdd, register_features, PcExpr, Program};

/// Program shapes over an `Edge` input relation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shape {
    /// `Path` as the transitive closure of `Edge`, right-linear.
    TransitiveClosure,
    /// `Path` joined with itself.
    NonlinearClosure,
    /// Paths of odd and even length, each defined through the other.
    MutualRecursion,
    /// Transitive closure with annotated rules and an annotated inline fact.
    RuleConditions,
    /// Transitive closure plus a nullary `Cyclic()` and a unary query from a
    /// fixed node.
    Nullary,
}

impl Shape {
    pub const ALL: [Shape; 5] = [
        Shape::TransitiveClosure,
        Shape::NonlinearClosure,
        Shape::MutualRecursion,
        Shape::RuleConditions,
        Shape::Nullary,
    ];
}

const EDGE_DECL: &str = ".decl Edge(a: symbol, b: symbol)\n.input Edge\n";

/// A program with its input facts and feature model.
#[derive(Debug, Clone)]
pub struct Bundle {
    pub program_text: String,
    pub program: Program,
    /// Input records per relation.
    pub facts: Vec<(String, Vec<FactRecord>)>,
    pub feature_model: PcExpr,
}

impl Bundle {
    pub fn new(
        program_text: String,
        facts: Vec<(String, Vec<FactRecord>)>,
        feature_model: PcExpr,
    ) -> Self {
        let program = parse_program(&program_text).expect("generated program parses");
        Bundle {
            program_text,
            program,
            facts,
            feature_model,
        }
    }

    /// Compiles the bundle into `mgr`: program features first, then the
    /// feature model, then the facts. Sat pruning is on.
    pub fn load(&self, mgr: &mut BddManager) -> Result<(Database, EngineConfig), FactsError> {
        register_features(&self.program, mgr);
        let fm = pc_to_bdd(&self.feature_model, mgr);
        let mut db = Database::for_program(&self.program);
        for (rel, records) in &self.facts {
            load_records(&mut db, rel, records, false, mgr)?;
        }
        Ok((db, EngineConfig::new(mgr).with_feature_model(fm)))
    }

    /// The same bundle with every presence condition and the feature model
    /// set to `True`.
    pub fn without_pcs(&self) -> Bundle {
        let program = self.program.without_pcs();
        Bundle {
            program_text: program.to_string(),
            program,
            facts: self
                .facts
                .iter()
                .map(|(r, recs)| {
                    let recs = recs
                        .iter()
                        .map(|f| FactRecord {
                            values: f.values.clone(),
                            pc: PcExpr::True,
                        })
                        .collect();
                    (r.clone(), recs)
                })
                .collect(),
            feature_model: PcExpr::True,
        }
    }

    pub fn edge_count(&self) -> usize {
        self.facts.iter().map(|(_, r)| r.len()).sum()
    }

    /// Writes `program.dl`, `fm.pc` and `facts/<Relation>.facts`.
    pub fn write_to_dir(&self, dir: &Path) -> io::Result<()> {
        fs::create_dir_all(dir.join("facts"))?;
        fs::write(dir.join("program.dl"), &self.program_text)?;
        fs::write(dir.join("fm.pc"), format!("{}\n", self.feature_model))?;
        for (rel, records) in &self.facts {
            let mut text = String::new();
            for r in records {
                text.push_str(&r.values.join(&DEFAULT_DELIMITER.to_string()));
                if !r.pc.is_true() {
                    text.push(DEFAULT_DELIMITER);
                    text.push('@');
                    text.push_str(&r.pc.to_string());
                }
                text.push('\n');
            }
            fs::write(dir.join("facts").join(format!("{rel}.facts")), text)?;
        }
        Ok(())
    }
}

pub fn feature_names(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("F{i}")).collect()
}

fn literal(rng: &mut impl Rng, features: &[String]) -> PcExpr {
    let f = PcExpr::id(features.choose(rng).expect("at least one feature").clone());
    if rng.gen_bool(0.3) {
        PcExpr::not(f)
    } else {
        f
    }
}

/// A random condition over `features`: usually a literal or a small
/// conjunction or disjunction, sometimes `True`, rarely `False`.
pub fn random_pc(rng: &mut impl Rng, features: &[String]) -> PcExpr {
    if features.is_empty() {
        return PcExpr::True;
    }
    match rng.gen_range(0..20) {
        0..=3 => PcExpr::True,
        4 => PcExpr::False,
        5..=11 => literal(rng, features),
        12..=15 => PcExpr::and(literal(rng, features), literal(rng, features)),
        16..=18 => PcExpr::or(literal(rng, features), literal(rng, features)),
        _ => PcExpr::not(PcExpr::and(
            literal(rng, features),
            PcExpr::or(literal(rng, features), literal(rng, features)),
        )),
    }
}

/// A random feature model: `True`, or a conjunction of a few constraints
/// (implications, exclusions, at-least-one clauses).
pub fn random_fm(rng: &mut impl Rng, features: &[String]) -> PcExpr {
    if features.len() < 2 || rng.gen_bool(0.2) {
        return PcExpr::True;
    }
    let mut fm: Option<PcExpr> = None;
    for _ in 0..rng.gen_range(1..=3) {
        let mut pick = features
            .choose_multiple(rng, 2)
            .map(|f| PcExpr::id(f.clone()));
        let (a, b) = (
            pick.next().expect("two features"),
            pick.next().expect("two features"),
        );
        let c = match rng.gen_range(0..3) {
            0 => PcExpr::or(PcExpr::not(a), b),
            1 => PcExpr::not(PcExpr::and(a, b)),
            _ => PcExpr::or(a, b),
        };
        fm = Some(match fm {
            Some(prev) => PcExpr::and(prev, c),
            None => c,
        });
    }
    fm.expect("at least one constraint")
}

fn program_text(rng: &mut impl Rng, shape: Shape, features: &[String]) -> String {
    let mut s = String::from(EDGE_DECL);
    match shape {
        Shape::TransitiveClosure => s.push_str(
            ".decl Path(a: symbol, b: symbol)\n.output Path\n\
             Path(x, y) :- Edge(x, y).\nPath(x, z) :- Edge(x, y), Path(y, z).\n",
        ),
        Shape::NonlinearClosure => s.push_str(
            ".decl Path(a: symbol, b: symbol)\n.output Path\n\
             Path(x, y) :- Edge(x, y).\nPath(x, z) :- Path(x, y), Path(y, z).\n",
        ),
        Shape::MutualRecursion => s.push_str(
            ".decl Odd(a: symbol, b: symbol)\n.output Odd\n\
             .decl Even(a: symbol, b: symbol)\n.output Even\n\
             Odd(x, y) :- Edge(x, y).\nEven(x, z) :- Odd(x, y), Edge(y, z).\n\
             Odd(x, z) :- Even(x, y), Edge(y, z).\n",
        ),
        Shape::RuleConditions => {
            s.push_str(".decl Path(a: symbol, b: symbol)\n.output Path\n");
            let (p1, p2, p3) = (
                random_pc(rng, features),
                random_pc(rng, features),
                random_pc(rng, features),
            );
            s.push_str(&format!("Path(x, y) :- Edge(x, y) @ {p1}.\n"));
            s.push_str(&format!("Path(x, z) :- Edge(x, y), Path(y, z) @ {p2}.\n"));
            s.push_str(&format!("Edge(N0, N1) @ {p3}.\n"));
        }
        Shape::Nullary => s.push_str(
            ".decl Path(a: symbol, b: symbol)\n.output Path\n\
             .decl Cyclic()\n.output Cyclic\n\
             .decl FromRoot(b: symbol)\n.output FromRoot\n\
             Path(x, y) :- Edge(x, y).\nPath(x, z) :- Edge(x, y), Path(y, z).\n\
             Cyclic() :- Path(x, x).\nFromRoot(y) :- Path(N0, y).\n",
        ),
    }
    s
}

/// A random instance: up to `max_nodes` nodes, up to `max_edges` annotated
/// edges over up to `max_features` features, and a random feature model.
pub fn random_bundle(
    rng: &mut impl Rng,
    shape: Shape,
    max_nodes: usize,
    max_edges: usize,
    max_features: usize,
) -> Bundle {
    let features = feature_names(rng.gen_range(1..=max_features.max(1)));
    let nodes = rng.gen_range(2..=max_nodes.max(2));
    let edges = rng.gen_range(1..=max_edges.max(1));
    let records = (0..edges)
        .map(|_| FactRecord {
            values: vec![
                format!("N{}", rng.gen_range(0..nodes)),
                format!("N{}", rng.gen_range(0..nodes)),
            ],
            pc: random_pc(rng, &features),
        })
        .collect();
    let text = program_text(rng, shape, &features);
    let fm = random_fm(rng, &features);
    Bundle::new(text, vec![("Edge".into(), records)], fm)
}

/// `count` random instances cycling through every [`Shape`], reproducible
/// from `seed`. Graphs have up to 30 nodes and 100 edges, conditions range
/// over up to 6 features.
pub fn random_suite(seed: u64, count: usize) -> Vec<Bundle> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| random_bundle(&mut rng, Shape::ALL[i % Shape::ALL.len()], 30, 100, 6))
        .collect()
}

/// A transitive-closure bundle of `components` disjoint random graphs with
/// `nodes_per_component` nodes and `edges / components` edges each. About
/// `annotated` of the edges carry a condition over `features` features; the
/// rest are unconditional. The feature model excludes `F0 /\ F1` and requires
/// `F2 -> F3`, leaving 9/16 of all assignments valid.
pub fn overhead_bundle(
    seed: u64,
    features: usize,
    edges: usize,
    components: usize,
    nodes_per_component: usize,
    annotated: f64,
) -> Bundle {
    assert!(features >= 4, "the feature model mentions F0..F3");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let names = feature_names(features);
    let per = edges / components;
    let mut records = Vec::with_capacity(edges);
    for c in 0..components {
        let node = |i: usize| format!("C{c}N{i}");
        for _ in 0..per {
            let (a, b) = (
                rng.gen_range(0..nodes_per_component),
                rng.gen_range(0..nodes_per_component),
            );
            let pc = if rng.gen_bool(annotated) {
                let l = literal(&mut rng, &names);
                if rng.gen_bool(0.3) {
                    PcExpr::and(l, literal(&mut rng, &names))
                } else {
                    l
                }
            } else {
                PcExpr::True
            };
            records.push(FactRecord {
                values: vec![node(a), node(b)],
                pc,
            });
        }
    }
    let text = program_text(&mut rng, Shape::TransitiveClosure, &names);
    let fm = PcExpr::and(
        PcExpr::not(PcExpr::and(PcExpr::id("F0"), PcExpr::id("F1"))),
        PcExpr::or(PcExpr::not(PcExpr::id("F2")), PcExpr::id("F3")),
    );
    Bundle::new(text, vec![("Edge".into(), records)], fm)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_is_reproducible_and_parses() {
        let a = random_suite(7, 10);
        let b = random_suite(7, 10);
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.program_text, y.program_text);
            assert_eq!(x.facts, y.facts);
            assert_eq!(x.feature_model, y.feature_model);
            assert!(x.edge_count() <= 100);
            assert!(x.program.features.len() <= 6);
        }
    }

    #[test]
    fn overhead_model_admits_enough_configurations() {
        let b = overhead_bundle(1, 10, 1000, 50, 10, 0.3);
        assert_eq!(b.edge_count(), 1000);
        let mut m = BddManager::new();
        let (_, cfg) = b.load(&mut m).unwrap();
        for f in feature_names(10) {
            m.register_feature(&f);
        }
        assert_eq!(m.sat_count(cfg.feature_model), 1024 * 9 / 16);
    }

    #[test]
    fn stripped_bundle_has_no_conditions() {
        let b = random_suite(3, 5).remove(3);
        let plain = b.without_pcs();
        assert!(plain.program.features.is_empty());
        assert!(plain
            .facts
            .iter()
            .all(|(_, r)| r.iter().all(|f| f.pc.is_true())));
        assert_eq!(plain.feature_model, PcExpr::True);
    }
}
