//! Time of one lifted run against a run with conditions stripped and against
//! one plain run per valid configuration.
//!
//! cargo run --release --example overhead [edges]

use std::time::Instant;

use vdatalog::engine::{infer, Database, EngineConfig};
use vdatalog::oracle::{restrict, restrict_program};
use vdatalog::pcbdd::BddManager;
use vdatalog::workload::overhead_bundle;

fn main() {
    let edges: usize = std::env::args()
        .nth(1)
        .map_or(10_000, |s| s.parse().expect("edge count"));
    let bundle = overhead_bundle(7, 10, edges, edges / 20, 12, 0.3);

    let mut mgr = BddManager::new();
    let (edb, config) = bundle.load(&mut mgr).unwrap();
    let t = Instant::now();
    let lifted = infer(&bundle.program, edb.clone(), &config, &mut mgr).unwrap();
    let lifted_time = t.elapsed();
    println!(
        "lifted: {:?}, {} paths, {} iterations, {} BDD nodes",
        lifted_time,
        lifted.database.relation("Path").unwrap().len(),
        lifted.stats.iterations,
        mgr.node_count()
    );

    let plain = bundle.without_pcs();
    let mut pm = BddManager::new();
    let (pedb, pconfig) = plain.load(&mut pm).unwrap();
    let t = Instant::now();
    let out = infer(&plain.program, pedb, &pconfig, &mut pm).unwrap();
    let plain_time = t.elapsed();
    println!(
        "plain:  {:?}, {} paths",
        plain_time,
        out.database.relation("Path").unwrap().len()
    );
    println!(
        "ratio:  {:.2}",
        lifted_time.as_secs_f64() / plain_time.as_secs_f64()
    );

    let confs = mgr
        .enumerate_configurations(config.feature_model, 1 << 16)
        .unwrap();
    let t = Instant::now();
    for conf in &confs {
        let program = restrict_program(&bundle.program, conf, mgr.features());
        let input = restrict(&edb, conf, &mgr);
        let mut cm = BddManager::new();
        let mut db = Database::for_program(&program);
        let top = cm.pc_true();
        for rel in input.relations() {
            for t in &rel.tuples {
                db.insert_fact(&rel.name, t, top, &mut cm).unwrap();
            }
        }
        infer(&program, db, &EngineConfig::new(&cm), &mut cm).unwrap();
    }
    let per_config = t.elapsed();
    println!(
        "one plain run per configuration ({}): {:?}",
        confs.len(),
        per_config
    );
    println!(
        "speedup: {:.1}x",
        per_config.as_secs_f64() / lifted_time.as_secs_f64()
    );
}
