//! Routes between four cities, each edge available only for some modes of
//! travel. Runs the travel bundle in `data/travel` and prints every path with
//! its condition.

use std::path::Path;

use vdatalog::cli::load_feature_model;
use vdatalog::engine::{infer, resolve_rule, Database, EngineConfig};
use vdatalog::facts_io::{load_records, read_facts, DEFAULT_DELIMITER};
use vdatalog::pcbdd::BddManager;
use vdatalog::syntax::{parse_program, print_pc, register_features};

fn main() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/travel");
    let program = parse_program(&std::fs::read_to_string(dir.join("program.dl")).unwrap()).unwrap();
    let mut mgr = BddManager::new();
    register_features(&program, &mut mgr);
    let fm = load_feature_model(&dir.join("fm.pc"), &mut mgr).unwrap();

    let mut edb = Database::for_program(&program);
    let decl = program.decl("Edge").unwrap();
    let records = read_facts(&dir.join("facts/Edge.facts"), decl, DEFAULT_DELIMITER).unwrap();
    load_records(&mut edb, "Edge", &records, false, &mut mgr).unwrap();

    let config = EngineConfig::new(&mgr).with_feature_model(fm);
    let result = infer(&program, edb, &config, &mut mgr).unwrap();
    println!("Path under the feature model:");
    for (tuple, pc) in result.database.sorted_facts("Path").unwrap() {
        let within = mgr.and(pc, fm);
        println!(
            "  Path({}) @ {}    (with model: {})",
            tuple.join(", "),
            print_pc(pc, &mgr),
            print_pc(within, &mgr)
        );
    }

    // the recursive rule with the surviving paths as the delta: the
    // candidates that were dropped are the ones no valid configuration admits
    let mut delta = Database::new();
    delta.add_relation("Path", 2).unwrap();
    for (tuple, pc) in result.database.sorted_facts("Path").unwrap() {
        delta.insert_fact("Path", &tuple, pc, &mut mgr).unwrap();
    }
    let mut db = result.database.clone();
    println!("candidates of `{}`:", program.rules[1]);
    for (tuple, pc) in resolve_rule(&program.rules[1], &mut db, &delta, &mut mgr).unwrap() {
        let within = mgr.and(pc, fm);
        let mark = if mgr.sat(within) { " " } else { "x" };
        println!(
            "  {mark} Path({}) @ {}",
            tuple.join(", "),
            print_pc(pc, &mgr)
        );
    }
    println!("{:?}", result.stats);
}
