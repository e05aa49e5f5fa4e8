//! The same inference with the per-derivation satisfiability check on, off
//! (followed by a pruning pass), and with the feature model folded into the
//! stored conditions.

use vdatalog::engine::{infer, post_prune};
use vdatalog::pcbdd::BddManager;
use vdatalog::syntax::print_pc;
use vdatalog::workload::{random_bundle, Shape};

fn main() {
    let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(11);
    let bundle = random_bundle(&mut rng, Shape::TransitiveClosure, 12, 30, 4);
    println!("feature model: {}", bundle.feature_model);

    let mut mgr = BddManager::new();
    let (edb, config) = bundle.load(&mut mgr).unwrap();
    let fm = config.feature_model;

    let on = infer(&bundle.program, edb.clone(), &config, &mut mgr).unwrap();
    let off = infer(
        &bundle.program,
        edb.clone(),
        &config.with_sat_pruning(false),
        &mut mgr,
    )
    .unwrap();
    let conjoined = infer(
        &bundle.program,
        edb,
        &config.with_conjoined_fm(true),
        &mut mgr,
    )
    .unwrap();
    println!(
        "pruning on:  {} paths, {} sat checks",
        on.database.relation("Path").unwrap().len(),
        on.stats.sat_checks
    );
    println!(
        "pruning off: {} paths before the pruning pass",
        off.database.relation("Path").unwrap().len()
    );
    let pruned = post_prune(off.database, fm, &mut mgr);
    println!(
        "             {} paths after",
        pruned.relation("Path").unwrap().len()
    );

    let a = on.database.sorted_facts("Path").unwrap();
    let b = pruned.sorted_facts("Path").unwrap();
    let agree = a.len() == b.len()
        && a.iter()
            .zip(&b)
            .all(|((t1, p1), (t2, p2))| t1 == t2 && mgr.and(*p1, fm) == mgr.and(*p2, fm));
    println!("same tuples, conditions equal under the model: {agree}");

    for ((t, raw), (_, folded)) in a
        .iter()
        .zip(conjoined.database.sorted_facts("Path").unwrap())
        .take(5)
    {
        println!(
            "  Path({}) @ {}   |  with model folded in: {}",
            t.join(", "),
            print_pc(*raw, &mgr),
            print_pc(folded, &mgr)
        );
    }
}
