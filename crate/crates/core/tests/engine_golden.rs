mod common;

use common::{pc, travel, travel_program};
use vdatalog::engine::{infer, post_prune, resolve_rule, Database, EngineConfig, EngineError};
use vdatalog::pcbdd::BddManager;
use vdatalog::syntax::{parse_program, print_pc};

#[test]
fn travel_paths_under_the_feature_model() {
    let mut m = BddManager::new();
    let (p, edb, cfg) = travel(&mut m);
    let fm = cfg.feature_model;
    let out = infer(&p, edb, &cfg, &mut m).unwrap().database;
    let facts = out.sorted_facts("Path").unwrap();
    let got: Vec<(String, String)> = facts
        .iter()
        .map(|(t, _)| (t[0].to_owned(), t[1].to_owned()))
        .collect();
    let want = [
        ("Athens", "Rome", "Sea"),
        ("NYC", "Athens", "!Land"),
        ("NYC", "Rome", "Sea"),
        ("Rome", "Toronto", "Air"),
        ("Toronto", "NYC", "Land"),
    ];
    assert_eq!(
        got,
        want.iter()
            .map(|(a, b, _)| (a.to_string(), b.to_string()))
            .collect::<Vec<_>>()
    );
    for ((_, stored), (_, _, expected)) in facts.iter().zip(want) {
        let e = pc(&mut m, expected);
        assert_eq!(m.and(*stored, fm), m.and(e, fm), "{expected}");
    }
    // stored conditions are the raw conjunctions
    let nyc_rome = out.exists("Path", &["NYC", "Rome"]).unwrap().unwrap();
    assert_eq!(nyc_rome, pc(&mut m, "!Land /\\ Sea"));
    for (a, b) in [
        ("Athens", "Toronto"),
        ("Rome", "NYC"),
        ("Toronto", "Athens"),
    ] {
        assert_eq!(out.exists("Path", &[a, b]).unwrap(), None);
    }
}

#[test]
fn folding_the_model_into_stored_conditions() {
    let mut m = BddManager::new();
    let (p, edb, cfg) = travel(&mut m);
    let out = infer(&p, edb, &cfg.with_conjoined_fm(true), &mut m)
        .unwrap()
        .database;
    let sea_only = pc(&mut m, "Sea /\\ !Air /\\ !Land");
    assert_eq!(
        out.exists("Path", &["NYC", "Rome"]).unwrap(),
        Some(sea_only)
    );
    assert_eq!(out.relation("Path").unwrap().len(), 5);
}

#[test]
fn first_rule_copies_edges() {
    let mut m = BddManager::new();
    let (p, edb, _) = travel(&mut m);
    let mut db = edb.clone();
    let mut out = resolve_rule(&p.rules[0], &mut db, &edb, &mut m).unwrap();
    out.sort_by(|a, b| a.0.cmp(&b.0));
    let printed: Vec<String> = out
        .iter()
        .map(|(t, c)| format!("{} {} {}", t[0], t[1], print_pc(*c, &m)))
        .collect();
    assert_eq!(
        printed,
        [
            "Athens Rome Sea",
            "NYC Athens !Land",
            "Rome Toronto Air",
            "Toronto NYC Land"
        ]
    );
}

#[test]
fn recursive_rule_yields_contradictions_too() {
    let mut m = BddManager::new();
    let (p, mut edb, _) = travel(&mut m);
    let land = pc(&mut m, "!Land");
    let mut delta = Database::new();
    delta.add_relation("Path", 2).unwrap();
    delta
        .insert_fact("Path", &["NYC", "Athens"], land, &mut m)
        .unwrap();
    edb.insert_fact("Path", &["NYC", "Athens"], land, &mut m)
        .unwrap();
    let out = resolve_rule(&p.rules[1], &mut edb, &delta, &mut m).unwrap();
    assert_eq!(
        out,
        vec![(
            vec!["Toronto".to_string(), "Athens".to_string()],
            m.pc_false()
        )]
    );
}

#[test]
fn absent_body_relation_yields_nothing() {
    let mut m = BddManager::new();
    let p = travel_program();
    let mut edb = Database::for_program(&p);
    let delta = edb.clone();
    assert!(resolve_rule(&p.rules[1], &mut edb, &delta, &mut m)
        .unwrap()
        .is_empty());
}

#[test]
fn delta_must_be_in_the_database() {
    let mut m = BddManager::new();
    let p = travel_program();
    let mut edb = Database::for_program(&p);
    let mut delta = Database::for_program(&p);
    let t = m.pc_true();
    delta.insert_fact("Edge", &["A", "B"], t, &mut m).unwrap();
    assert!(matches!(
        resolve_rule(&p.rules[0], &mut edb, &delta, &mut m),
        Err(EngineError::DeltaNotInDatabase { .. })
    ));
}

#[test]
fn rules_only_gives_inline_facts() {
    let mut m = BddManager::new();
    let p = parse_program(".decl E(a: symbol)\n.decl F(a: symbol)\nE(A) @ X.\nE(B).").unwrap();
    let cfg = EngineConfig::new(&m);
    let out = infer(&p, Database::for_program(&p), &cfg, &mut m)
        .unwrap()
        .database;
    assert_eq!(out.relation("E").unwrap().len(), 2);
    assert!(out.relation("F").unwrap().is_empty());
    let x = m.mk_var("X");
    assert_eq!(out.exists("E", &["A"]).unwrap(), Some(x));
}

#[test]
fn rule_conditions_join_the_conjunction() {
    let mut m = BddManager::new();
    let p = parse_program(
        ".decl E(a: symbol, b: symbol)\n.decl P(a: symbol, b: symbol)\n\
         E(A, B) @ X.\nE(B, C).\nP(x, y) :- E(x, y) @ Y.\nP(x, z) :- E(x, y), P(y, z) @ !Z.",
    )
    .unwrap();
    let cfg = EngineConfig::new(&m);
    let out = infer(&p, Database::for_program(&p), &cfg, &mut m)
        .unwrap()
        .database;
    let ac = out.exists("P", &["A", "C"]).unwrap().unwrap();
    assert_eq!(ac, pc(&mut m, "X /\\ Y /\\ !Z"));
    let bc = out.exists("P", &["B", "C"]).unwrap().unwrap();
    assert_eq!(bc, pc(&mut m, "Y"));
}

#[test]
fn disjunction_on_rederivation() {
    let mut m = BddManager::new();
    let p = parse_program(
        ".decl E(a: symbol, b: symbol)\n.decl P(a: symbol, b: symbol)\n\
         E(A, B) @ X.\nE(B, C) @ X.\nE(A, C) @ Y.\n\
         P(x, y) :- E(x, y).\nP(x, z) :- E(x, y), P(y, z).",
    )
    .unwrap();
    let cfg = EngineConfig::new(&m);
    let out = infer(&p, Database::for_program(&p), &cfg, &mut m)
        .unwrap()
        .database;
    assert_eq!(
        out.exists("P", &["A", "C"]).unwrap(),
        Some(pc(&mut m, "X \\/ Y"))
    );
}

#[test]
fn nullary_relations_hold_one_condition() {
    let mut m = BddManager::new();
    let p = parse_program(
        ".decl E(a: symbol, b: symbol)\n.decl P(a: symbol, b: symbol)\n.decl Cyclic()\n\
         E(A, B) @ X.\nE(B, A) @ Y.\nE(C, C) @ Z.\n\
         P(x, y) :- E(x, y).\nP(x, z) :- E(x, y), P(y, z).\nCyclic() :- P(x, x).",
    )
    .unwrap();
    let cfg = EngineConfig::new(&m);
    let out = infer(&p, Database::for_program(&p), &cfg, &mut m)
        .unwrap()
        .database;
    assert_eq!(out.relation("Cyclic").unwrap().len(), 1);
    let empty: [&str; 0] = [];
    assert_eq!(
        out.exists("Cyclic", &empty).unwrap(),
        Some(pc(&mut m, "X /\\ Y \\/ Z"))
    );
}

#[test]
fn post_prune_examples() {
    let mut m = BddManager::new();
    let (p, _, cfg) = travel(&mut m);
    let fm = cfg.feature_model;
    let mut db = Database::for_program(&p);
    let both = pc(&mut m, "Air /\\ Land");
    let sea = pc(&mut m, "Sea");
    db.insert_fact("Path", &["a", "b"], both, &mut m).unwrap();
    db.insert_fact("Path", &["c", "d"], sea, &mut m).unwrap();
    let kept = post_prune(db.clone(), m.pc_true(), &mut m);
    assert_eq!(
        kept.sorted_facts("Path").unwrap(),
        db.sorted_facts("Path").unwrap()
    );
    let pruned = post_prune(db, fm, &mut m);
    assert_eq!(
        pruned.sorted_facts("Path").unwrap(),
        vec![(vec!["c", "d"], sea)]
    );
}

#[test]
fn pruning_off_then_post_prune_matches() {
    let mut m = BddManager::new();
    let (p, edb, cfg) = travel(&mut m);
    let fm = cfg.feature_model;
    let on = infer(&p, edb.clone(), &cfg, &mut m).unwrap().database;
    let off = infer(&p, edb, &cfg.with_sat_pruning(false), &mut m)
        .unwrap()
        .database;
    assert!(off.relation("Path").unwrap().len() > 5);
    let off = post_prune(off, fm, &mut m);
    let a = on.sorted_facts("Path").unwrap();
    let b = off.sorted_facts("Path").unwrap();
    assert_eq!(a.len(), b.len());
    for ((t1, p1), (t2, p2)) in a.iter().zip(&b) {
        assert_eq!(t1, t2);
        assert_eq!(m.and(*p1, fm), m.and(*p2, fm));
    }
}

#[test]
fn false_model_empties_everything() {
    let mut m = BddManager::new();
    let (p, edb, cfg) = travel(&mut m);
    let cfg = cfg.with_feature_model(m.pc_false());
    let out = infer(&p, edb, &cfg, &mut m).unwrap().database;
    assert_eq!(out.total_tuples(), 0);
}

#[test]
fn runs_are_deterministic() {
    let render = || {
        let mut m = BddManager::new();
        let (p, edb, cfg) = travel(&mut m);
        let out = infer(&p, edb, &cfg, &mut m).unwrap();
        let facts: Vec<String> = out
            .database
            .sorted_facts("Path")
            .unwrap()
            .iter()
            .map(|(t, c)| format!("{t:?}@{}", print_pc(*c, &m)))
            .collect();
        (facts, out.stats)
    };
    assert_eq!(render(), render());
}
