//! Reading and writing annotated fact files.

use std::path::Path;

use vdatalog::engine::Database;
use vdatalog::facts_io::{
    format_facts, load_records, parse_facts, read_facts, write_facts, WriteMode,
};
use vdatalog::pcbdd::BddManager;
use vdatalog::syntax::parse_program;

const FACTS: &str = "Athens\tRome\t@Sea\n\
                     Rome\tToronto\t@Air\n\
                     \"@home\"\tAthens\n\
                     \"a\tb\"\tRome\t@Sea \\/ Air\n";

fn main() {
    let program =
        parse_program(".decl Edge(from: symbol, to: symbol)\n.input Edge\n.output Edge").unwrap();
    let decl = program.decl("Edge").unwrap();
    let records = parse_facts(FACTS, decl, '\t', Path::new("inline")).unwrap();
    for r in &records {
        println!("{:?} @ {}", r.values, r.pc);
    }

    let mut mgr = BddManager::new();
    let mut db = Database::for_program(&program);
    load_records(&mut db, "Edge", &records, false, &mut mgr).unwrap();
    print!(
        "{}",
        format_facts(&db, "Edge", WriteMode::WithPcs, '\t', &mgr).unwrap()
    );
    println!("--- plain, comma-separated");
    print!(
        "{}",
        format_facts(&db, "Edge", WriteMode::Plain, ',', &mgr).unwrap()
    );

    let dir = std::env::temp_dir().join(format!("vdatalog-fact-files-{}", std::process::id()));
    let path = dir.join("Edge.csv");
    let bytes = write_facts(&path, &db, "Edge", WriteMode::WithPcs, '\t', &mgr).unwrap();
    let back = read_facts(&path, decl, '\t').unwrap();
    let mut db2 = Database::for_program(&program);
    load_records(&mut db2, "Edge", &back, false, &mut mgr).unwrap();
    let same = db.sorted_facts("Edge").unwrap() == db2.sorted_facts("Edge").unwrap();
    println!(
        "wrote {bytes} bytes to {}; read back identical: {same}",
        path.display()
    );

    match parse_facts("a\tb\tc\n", decl, '\t', Path::new("bad.facts")) {
        Ok(_) => unreachable!(),
        Err(e) => println!("error: {e}"),
    }
    std::fs::remove_dir_all(dir).ok();
}
