#![allow(dead_code)]

use std::path::PathBuf;

use vdatalog::engine::{Database, EngineConfig};
use vdatalog::pcbdd::{BddManager, PresenceCondition};
use vdatalog::syntax::{parse_pc, parse_program, pc_to_bdd, Program};

pub const FM: &str =
    "(Air \\/ Land \\/ Sea) /\\ !(Air /\\ Land) /\\ !(Land /\\ Sea) /\\ !(Sea /\\ Air)";

pub const EDGES: [(&str, &str, &str); 4] = [
    ("Athens", "Rome", "Sea"),
    ("Rome", "Toronto", "Air"),
    ("NYC", "Athens", "!Land"),
    ("Toronto", "NYC", "Land"),
];

pub fn travel_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/travel")
}

pub fn travel_program() -> Program {
    parse_program(&std::fs::read_to_string(travel_dir().join("program.dl")).unwrap()).unwrap()
}

pub fn pc(mgr: &mut BddManager, text: &str) -> PresenceCondition {
    pc_to_bdd(&parse_pc(text).unwrap(), mgr)
}

/// Program, input edges and configuration with the travel feature model.
pub fn travel(mgr: &mut BddManager) -> (Program, Database, EngineConfig) {
    let program = travel_program();
    let mut db = Database::for_program(&program);
    for (a, b, p) in EDGES {
        let p = pc(mgr, p);
        db.insert_fact("Edge", &[a, b], p, mgr).unwrap();
    }
    let fm = pc(mgr, FM);
    (program, db, EngineConfig::new(mgr).with_feature_model(fm))
}

/// Tuples per relation, ignoring conditions.
pub fn tuple_sets(
    db: &Database,
) -> std::collections::BTreeMap<String, std::collections::BTreeSet<Vec<String>>> {
    db.relations()
        .map(|r| {
            let tuples = db
                .sorted_facts(r.name())
                .unwrap()
                .into_iter()
                .map(|(t, _)| t.into_iter().map(str::to_owned).collect())
                .collect();
            (r.name().to_owned(), tuples)
        })
        .collect()
}

pub fn plain_sets(
    db: &vdatalog::oracle::PlainDatabase,
) -> std::collections::BTreeMap<String, std::collections::BTreeSet<Vec<String>>> {
    db.relations()
        .map(|r| (r.name.clone(), r.tuples.clone()))
        .collect()
}
