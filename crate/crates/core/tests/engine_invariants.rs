//! Properties of lifted inference over random bundles.

mod common;

use common::{plain_sets, tuple_sets};
use vdatalog::engine::{infer, resolve_rule, Engine};
use vdatalog::oracle::{naive_infer, plain_infer, PlainDatabase};
use vdatalog::pcbdd::BddManager;
use vdatalog::workload::random_suite;

const SEED: u64 = 0x5eed;

#[test]
fn stored_conditions_only_grow() {
    for bundle in random_suite(SEED, 40) {
        let mut m = BddManager::new();
        let (edb, cfg) = bundle.load(&mut m).unwrap();
        let mut engine = Engine::new(&bundle.program, edb, cfg, &mut m).unwrap();
        let mut before = engine.database().clone();
        while engine.step(&mut m) {
            let now = engine.database();
            for rel in before.relations() {
                for (values, old) in before.sorted_facts(rel.name()).unwrap() {
                    let new = now
                        .exists(rel.name(), &values)
                        .unwrap()
                        .expect("tuple kept");
                    assert!(m.implies(old, new), "{}({values:?}) shrank", rel.name());
                }
            }
            before = now.clone();
        }
        assert!(engine.is_done());
    }
}

#[test]
fn fixpoint_is_closed() {
    for bundle in random_suite(SEED + 1, 40) {
        let mut m = BddManager::new();
        let (edb, cfg) = bundle.load(&mut m).unwrap();
        let fm = cfg.feature_model;
        let out = infer(&bundle.program, edb, &cfg, &mut m).unwrap().database;
        for rule in &bundle.program.rules {
            let mut db = out.clone();
            for (tuple, p) in resolve_rule(rule, &mut db, &out, &mut m).unwrap() {
                let stored = out
                    .exists(&rule.head.predicate, &tuple)
                    .unwrap()
                    .unwrap_or(m.pc_false());
                let not_stored = m.not(stored);
                let gap = m.and_all([p, not_stored, fm]);
                assert!(!m.sat(gap), "{rule}: {tuple:?} not covered");
            }
        }
    }
}

#[test]
fn no_unsatisfiable_residue() {
    for bundle in random_suite(SEED + 2, 40) {
        let mut m = BddManager::new();
        let (edb, cfg) = bundle.load(&mut m).unwrap();
        let fm = cfg.feature_model;
        let out = infer(&bundle.program, edb, &cfg, &mut m).unwrap().database;
        for rel in out.relations() {
            for (_, p) in rel.iter() {
                let within = m.and(p, fm);
                assert!(m.sat(within));
            }
        }
    }
}

#[test]
fn inputs_are_preserved() {
    for bundle in random_suite(SEED + 3, 40) {
        let mut m = BddManager::new();
        let (edb, cfg) = bundle.load(&mut m).unwrap();
        let fm = cfg.feature_model;
        let out = infer(&bundle.program, edb.clone(), &cfg, &mut m)
            .unwrap()
            .database;
        for rel in edb.relations() {
            for (values, p) in edb.sorted_facts(rel.name()).unwrap() {
                let p_fm = m.and(p, fm);
                if !m.sat(p_fm) {
                    continue;
                }
                let stored = out
                    .exists(rel.name(), &values)
                    .unwrap()
                    .expect("input kept");
                let s_fm = m.and(stored, fm);
                assert!(m.implies(p_fm, s_fm));
            }
        }
    }
}

#[test]
fn without_conditions_matches_plain_datalog() {
    for bundle in random_suite(SEED + 4, 40) {
        let plain = bundle.without_pcs();
        let mut m = BddManager::new();
        let (edb, cfg) = plain.load(&mut m).unwrap();
        let out = infer(&plain.program, edb, &cfg, &mut m).unwrap().database;
        for rel in out.relations() {
            assert!(rel.iter().all(|(_, p)| p.is_true()));
        }
        let mut input = PlainDatabase::for_program(&plain.program);
        for (rel, records) in &plain.facts {
            for r in records {
                input.insert(rel, &r.values);
            }
        }
        let expected = naive_infer(&plain.program, &input);
        assert_eq!(tuple_sets(&out), plain_sets(&expected));
        assert_eq!(
            plain_sets(&plain_infer(&plain.program, &input)),
            plain_sets(&expected)
        );
    }
}
